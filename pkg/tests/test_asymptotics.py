import math

import mpmath
import pytest

from plancherel import asymptotics as asy
from plancherel import holonomic, oracle


def test_limit_shape_values():
    assert asy.limit_shape(0) == pytest.approx(2 * math.sqrt(2) / math.pi, abs=1e-15)
    assert asy.limit_shape(0) == pytest.approx(0.900316, abs=1e-6)
    assert asy.limit_shape(math.sqrt(2)) == pytest.approx(math.sqrt(2), abs=1e-15)
    assert asy.limit_shape(3.0) == 3.0
    assert asy.limit_shape(-0.4) == asy.limit_shape(0.4)
    with mpmath.workprec(200):
        assert abs(asy.limit_shape_mp(mpmath.mpf("0.3")) - asy.limit_shape(0.3)) < 1e-15


def test_limit_shape_is_convex_and_above_abs():
    xs = [i / 50 for i in range(-80, 81)]
    ys = [asy.limit_shape(x) for x in xs]
    assert all(y >= abs(x) - 1e-15 for x, y in zip(xs, ys))
    assert all(ys[i - 1] + ys[i + 1] - 2 * ys[i] >= -1e-12 for i in range(1, len(xs) - 1))


def test_semicircle_mass():
    assert asy.semicircle_mass() == pytest.approx(1.0, abs=1e-13)


def test_x_plus_y_leading_term():
    lead = asy.x_plus_y_model().leading_groups(1)
    assert float(lead(10**4)) == pytest.approx(0.9607e6, rel=1e-4)


def test_models_reject_unsorted_terms():
    terms = asy.durfee_model().terms
    with pytest.raises(ValueError):
        asy.AsymptoticModel("bad", tuple(reversed(terms)), terms[0].n_power)


def test_omega_model_zero_is_durfee_model():
    for n in (100, 1234, 50000):
        assert abs(asy.omega_model(0)(n) - asy.durfee_model()(n)) < mpmath.mpf(10) ** -60


def test_model_precision_stability():
    model = asy.x_plus_y_model()
    for n in (1024, 65536):
        lo, hi = model(n, 128), model(n, 256)
        with mpmath.workprec(256):
            assert abs(lo - hi) / abs(hi) < mpmath.mpf(2) ** -110


def test_x_plus_y_ablation_is_monotone():
    n_max = 4096
    seq = holonomic.eval(holonomic.builtin("u"), n_max, "float", 256)
    model = asy.x_plus_y_model()
    grid = range(1024, n_max + 1, 64)
    worst = []
    with mpmath.workprec(256):
        for k in range(1, len(model.groups) + 1):
            m = model.leading_groups(k)
            worst.append(max(abs(seq[n] - n - m(n)) for n in grid))
    assert all(b < a for a, b in zip(worst, worst[1:]))


def test_aep_model_approaches_h():
    model = asy.aep_model()
    H = asy._const.constant_H().value
    with mpmath.workprec(256):
        assert abs(model(10**9) - H) < 1e-3
        assert abs(model(2048) - mpmath.mpf("1.7462734777")) < 1e-3


def test_aep_model_with_rounded_constants():
    a = asy.aep_model()(2048)
    b = asy.aep_model(H="1.87702830628", hprime0="0.001562493")(2048)
    assert abs(a - b) < 1e-8


def test_model_json_lists_terms():
    text = asy.x_plus_y_model().to_json()
    assert '"claimed_error_exponent": "-9/4"' in text
    assert "cos(8 sqrt(n) + pi/4)" in text


def test_fit_exponent_recovers_power():
    grid = asy.dyadic_grid(4, 12)
    slope, quality = asy.fit_exponent(grid, [3.0 * n**-1.5 for n in grid])
    assert slope == pytest.approx(-1.5, abs=1e-12) and quality == pytest.approx(1.0)


def test_durfee_residual_exponent():
    seq = holonomic.eval(holonomic.builtin("durfee"), 4300, "float", 256)
    # on a short grid the pointwise residual mostly reflects the oscillation phase
    rep = asy.residual_report(seq, asy.durfee_model(), asy.dyadic_grid(6, 12), envelope_frequency=4)
    assert -1.1 < rep.fitted_exponent < -0.9 and rep.fit_quality > 0.99
    assert rep.to_csv().startswith("n,residual\n64,")


def test_residual_report_drops_noisy_points():
    seq = {n: mpmath.mpf(n) ** -2 for n in asy.dyadic_grid(1, 8)}
    zero = asy.AsymptoticModel("zero", (), asy.durfee_model().claimed_error_exponent)
    noise = {n: (1.0 if n > 4 else 0.0) for n in seq}
    with pytest.raises(asy.ResidualError):
        asy.residual_report(seq, zero, sorted(seq), errors=noise)
    rep = asy.residual_report(seq, zero, sorted(seq), errors={n: 0.0 for n in seq})
    assert rep.fitted_exponent == pytest.approx(-2)


def test_envelope_residual_statistic():
    seq = {n: mpmath.cos(4 * mpmath.sqrt(n)) / n for n in range(1024, 17000)}
    zero = asy.AsymptoticModel("zero", (), asy.durfee_model().claimed_error_exponent)
    rep = asy.residual_report(seq, zero, asy.dyadic_grid(10, 14), envelope_frequency=4)
    assert rep.statistic == "envelope"
    assert rep.fitted_exponent == pytest.approx(-1, abs=0.05)


def test_profile_exact_matches_oracle():
    n = 10
    rows = asy.tilde_omega_profile(n, asy.max_profile_a(n), "exact")
    for r in rows:
        phi = oracle.expect_exact(n, f"phi:{r.a}")
        assert r.value == pytest.approx(math.sqrt(2 / n) * (float(phi) + r.a / 2), abs=1e-15)
    assert rows[0].value == pytest.approx(0.899305, abs=1e-6)


def test_profile_methods_agree():
    n = 700
    a_max = 20
    exact = asy.tilde_omega_profile(n, a_max, "exact")
    for method in ("mp", "fast"):
        rows = asy.tilde_omega_profile(n, a_max, method)
        for e, r in zip(exact, rows):
            assert r.value == pytest.approx(e.value, rel=1e-15, abs=1e-300)


def test_profile_csv_and_progression():
    rows = asy.tilde_omega_profile(50, 12)
    text = asy.profile_csv(rows)
    assert text.splitlines()[0] == "u,tilde_omega,omega,difference,error"
    assert len(text.splitlines()) == 14
    assert [r.a for r in asy.progression_export(rows, 4, 1)] == [1, 5, 9]


def test_profile_rejects_bad_arguments():
    with pytest.raises(ValueError):
        asy.tilde_omega_profile(0, 1)
    with pytest.raises(ValueError):
        asy.tilde_omega_profile(10, asy.max_profile_a(10) + 1)
    with pytest.raises(ValueError):
        asy.tilde_omega_profile(10, 2, "guess")


def test_profile_converges_to_limit_shape():
    rows = asy.tilde_omega_profile(20000, 150)
    assert max(abs(r.difference) for r in rows) < 2e-3


def test_heuristic_constants():
    h = asy.heuristic_constants()
    assert h.increment_integral == pytest.approx(h.increment_closed_form, abs=1e-12)
    assert h.variance_integral == pytest.approx(h.variance_closed_form, abs=1e-12)
    assert abs(h.variance_constant - 0.01496867061) < 1e-9
    assert h.quadrature_error < 1e-12

