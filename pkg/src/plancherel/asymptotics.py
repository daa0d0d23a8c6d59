"""Asymptotic expansions, the limit shape, profiles and residual-decay fits."""
from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Iterable, Mapping, Sequence

import mpmath
import numpy as np
from scipy import integrate

from . import constants as _const

SQRT2 = math.sqrt(2.0)


# ------------------------------------------------------------ limit shape


def limit_shape(u: float) -> float:
    if abs(u) >= SQRT2:
        return abs(u)
    return 2.0 / math.pi * (u * math.asin(u / SQRT2) + math.sqrt(2.0 - u * u))


def limit_shape_mp(u) -> mpmath.mpf:
    u = mpmath.mpf(u)
    r2 = mpmath.sqrt(2)
    if abs(u) >= r2:
        return abs(u)
    return 2 / mpmath.pi * (u * mpmath.asin(u / r2) + mpmath.sqrt(2 - u * u))


def semicircle(x: float) -> float:
    if abs(x) >= SQRT2:
        return 0.0
    return math.sqrt(2.0 - x * x) / math.pi


# -------------------------------------------------------------------- models


@dataclass(frozen=True)
class Oscillator:
    """cos(frequency * sqrt(n) + phase)"""

    frequency: float
    phase: Callable[[], mpmath.mpf]
    label: str


@dataclass(frozen=True)
class Term:
    coefficient: Callable[[], mpmath.mpf]  # evaluated under the caller's working precision
    n_power: Fraction
    log_factor: int = 0
    oscillator: Oscillator | None = None
    label: str = ""
    group: int = 0

    def value(self, n, sqrt_n, log_n):
        v = self.coefficient() * mpmath.power(n, mpmath.mpf(self.n_power.numerator) / self.n_power.denominator)
        if self.log_factor:
            v *= log_n**self.log_factor
        if self.oscillator is not None:
            v *= mpmath.cos(self.oscillator.frequency * sqrt_n + self.oscillator.phase())
        return v


@dataclass(frozen=True)
class AsymptoticModel:
    name: str
    terms: tuple[Term, ...]
    claimed_error_exponent: Fraction
    notes: str = ""

    def __post_init__(self):
        powers = [t.n_power for t in self.terms]
        if powers != sorted(powers, reverse=True):
            raise ValueError("terms must be sorted by decreasing power of n")

    @property
    def groups(self) -> list[int]:
        return sorted({t.group for t in self.terms})

    def evaluate(self, n, precision: int = 256) -> mpmath.mpf:
        with mpmath.workprec(precision):
            n = mpmath.mpf(n)
            sqrt_n = mpmath.sqrt(n)
            log_n = mpmath.log(n)
            return mpmath.fsum(t.value(n, sqrt_n, log_n) for t in self.terms)

    def __call__(self, n, precision: int = 256):
        return self.evaluate(n, precision)

    def without(self, predicate: Callable[[Term], bool]) -> "AsymptoticModel":
        return AsymptoticModel(
            self.name + "-ablated",
            tuple(t for t in self.terms if not predicate(t)),
            self.claimed_error_exponent,
            self.notes,
        )

    def without_oscillators(self) -> "AsymptoticModel":
        return self.without(lambda t: t.oscillator is not None)

    def leading_groups(self, k: int) -> "AsymptoticModel":
        keep = set(self.groups[:k])
        return self.without(lambda t: t.group not in keep)

    def to_json(self, precision: int = 64) -> str:
        with mpmath.workprec(precision):
            rows = [
                {
                    "label": t.label,
                    "coefficient": mpmath.nstr(t.coefficient(), 15),
                    "n_power": str(t.n_power),
                    "log_factor": t.log_factor,
                    "oscillator": None if t.oscillator is None else t.oscillator.label,
                    "group": t.group,
                }
                for t in self.terms
            ]
        return json.dumps(
            {"name": self.name, "claimed_error_exponent": str(self.claimed_error_exponent), "terms": rows},
            indent=2,
        )




def _delta0():
    # delta_n = log n + delta0
    return 2 * mpmath.euler + 12 * mpmath.log(2)


def x_plus_y_model() -> AsymptoticModel:
    """E(X_n + Y_n), expanded so that each log n appears as its own term."""
    pi2 = lambda: mpmath.pi**2
    F = Fraction
    terms = [
        Term(lambda: 256 / (27 * pi2()), F(3, 2), label="256/(27 pi^2) n^(3/2)", group=0),
        Term(lambda: mpmath.mpf(-1), F(1), label="-n", group=1),
        Term(lambda: 1 / pi2(), F(1, 2), 1, label="log n / pi^2 n^(1/2)", group=2),
        Term(lambda: (9 * _delta0() - 77) / (9 * pi2()), F(1, 2), label="(9 delta0 - 77)/(9 pi^2) n^(1/2)", group=2),
        Term(lambda: 3510 / (27648 * pi2()), F(-1, 2), 1, label="3510 log n/(27648 pi^2) n^(-1/2)", group=3),
        Term(
            lambda: (3510 * _delta0() - 31589) / (27648 * pi2()),
            F(-1, 2),
            label="(3510 delta0 - 31589)/(27648 pi^2) n^(-1/2)",
            group=3,
        ),
        Term(lambda: 5565 / (786432 * pi2()), F(-3, 2), 1, label="5565 log n/(786432 pi^2) n^(-3/2)", group=4),
        Term(
            lambda: (5565 * _delta0() - 62224) / (786432 * pi2()),
            F(-3, 2),
            label="(5565 delta0 - 62224)/(786432 pi^2) n^(-3/2)",
            group=4,
        ),
        Term(
            lambda: mpmath.e**8 / (2**12 * mpmath.pi ** mpmath.mpf(1.5)),
            F(-7, 4),
            oscillator=Oscillator(8, lambda: mpmath.pi / 4, "cos(8 sqrt(n) + pi/4)"),
            label="e^8/(2^12 pi^(3/2)) cos(8 sqrt(n) + pi/4) n^(-7/4)",
            group=5,
        ),
    ]
    return AsymptoticModel("x_plus_y", tuple(terms), Fraction(-9, 4), "delta0 = 2 gamma + 12 log 2")


romik_model = x_plus_y_model


def _sin4():
    return Oscillator(4, lambda: -mpmath.pi / 2, "sin(4 sqrt(n))")


def durfee_model() -> AsymptoticModel:
    F = Fraction
    terms = [
        Term(lambda: 2 / mpmath.pi, F(1, 2), label="2/pi n^(1/2)", group=0),
        Term(lambda: 3 / (16 * mpmath.pi), F(-1, 2), label="3/(16 pi) n^(-1/2)", group=1),
        Term(lambda: -mpmath.e**2 / (8 * mpmath.pi), F(-1, 2), oscillator=_sin4(), label="-e^2/(8 pi) sin(4 sqrt n) n^(-1/2)", group=1),
    ]
    return AsymptoticModel("durfee", tuple(terms), Fraction(-1))


def omega_model(a: int) -> AsymptoticModel:
    """Model for omega_{a,n} itself (the a/2 shift enters as a constant term)."""
    if a < 0:
        raise ValueError("a must be non-negative")
    F = Fraction
    sign = -1 if a % 2 else 1
    terms = [
        Term(lambda: 2 / mpmath.pi, F(1, 2), label="2/pi n^(1/2)", group=0),
        Term(lambda: mpmath.mpf(-a) / 2, F(0), label=f"-{a}/2", group=0),
        Term(lambda: mpmath.mpf(4 * a * a + 3) / (16 * mpmath.pi), F(-1, 2), label=f"{4 * a * a + 3}/(16 pi) n^(-1/2)", group=1),
        Term(
            lambda: -sign * mpmath.e**2 / (8 * mpmath.pi),
            F(-1, 2),
            oscillator=_sin4(),
            label=f"-(-1)^{a} e^2/(8 pi) sin(4 sqrt n) n^(-1/2)",
            group=1,
        ),
    ]
    return AsymptoticModel(f"omega:{a}", tuple(terms), Fraction(-1))


def aep_model(H=None, hprime0=None) -> AsymptoticModel:
    """(2 z_n - log n!)/sqrt(n) ~ H - (13/24 log n + C)/sqrt(n).

    ``H`` and ``hprime0`` default to the tail-corrected series values; pass
    numbers to evaluate with other (e.g. rounded) constants.
    """
    F = Fraction

    def h_const():
        return mpmath.mpf(H) if H is not None else _const.constant_H(mpmath.mp.prec).value

    def c_const():
        hp = mpmath.mpf(hprime0) if hprime0 is not None else _const.constant_hprime0(mpmath.mp.prec).value
        return _const.second_order_constant(mpmath.mp.prec, hp)

    terms = [
        Term(h_const, F(0), label="H", group=0),
        Term(lambda: -mpmath.mpf(13) / 24, F(-1, 2), 1, label="-13/24 log n n^(-1/2)", group=1),
        Term(lambda: -c_const(), F(-1, 2), label="-(13 gamma/12 + log sqrt(2 pi) + 1/4 - h'(0)) n^(-1/2)", group=1),
    ]
    return AsymptoticModel("aep", tuple(terms), Fraction(-1, 2), "error term is o(n^(-1/2))")


# ----------------------------------------------------------------- residuals


class ResidualError(ValueError):
    """Residual verdict not meaningful (too few usable grid points)."""


@dataclass
class ResidualReport:
    grid: list[int]
    residuals: list[float]
    fitted_exponent: float
    fit_quality: float
    discarded: list[int] = field(default_factory=list)
    statistic: str = "pointwise"

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["n", "residual"])
        for n, r in zip(self.grid, self.residuals):
            w.writerow([n, repr(r)])
        return buf.getvalue()


def dyadic_grid(lo_exp: int = 10, hi_exp: int = 16) -> list[int]:
    return [2**k for k in range(lo_exp, hi_exp + 1)]


def fit_exponent(grid: Sequence[float], residuals: Sequence[float]) -> tuple[float, float]:
    """Least-squares slope of log|r| against log n, and the R^2 of that fit."""
    x = np.log(np.asarray(grid, dtype=float))
    y = np.log(np.abs(np.asarray(residuals, dtype=float)))
    slope, intercept = np.polyfit(x, y, 1)
    pred = slope * x + intercept
    ss_res = float(np.sum((y - pred) ** 2))
    ss_tot = float(np.sum((y - y.mean()) ** 2))
    quality = 1.0 - ss_res / ss_tot if ss_tot > 0 else 1.0
    return float(slope), quality


def oscillation_period(n: int, frequency: float) -> int:
    """Index span of one period of cos(frequency * sqrt(m)) near m = n."""
    return math.ceil(4 * math.pi * math.sqrt(n) / frequency)


def residual_report(
    sequence,
    model: AsymptoticModel,
    grid: Iterable[int],
    errors: Mapping[int, object] | Callable | None = None,
    precision: int = 256,
    noise_fraction: float = 0.1,
    envelope_frequency: float | None = None,
) -> ResidualReport:
    """Residuals ``sequence[n] - model(n)`` on ``grid`` and their decay exponent.

    ``sequence`` is anything indexable by n (a :class:`~plancherel.holonomic.SequenceValues`,
    a dict, ...).  Grid points whose value error estimate is at least
    ``noise_fraction`` of the residual are dropped; fewer than three
    surviving points raise :class:`ResidualError`.

    By default the residual at each grid point is the pointwise difference.
    With ``envelope_frequency`` set, it is the largest |difference| over one
    period of ``cos(envelope_frequency * sqrt(m))`` starting at the grid
    point, which measures the amplitude of an oscillating residual instead of
    its phase at a single index.
    """
    grid = sorted(grid)
    if errors is None and hasattr(sequence, "error"):
        errors = sequence.error

    def err_at(m):
        if errors is None:
            return None
        return errors(m) if callable(errors) else errors.get(m)

    kept, res, dropped = [], [], []
    with mpmath.workprec(precision):

        def diff(m):
            v = sequence[m]
            if isinstance(v, Fraction):
                v = mpmath.mpf(v.numerator) / v.denominator
            return v - model.evaluate(m, precision)

        for n in grid:
            if envelope_frequency is None:
                window = [n]
            else:
                window = range(n, n + oscillation_period(n, envelope_frequency) + 1)
            r, at = max(((diff(m), m) for m in window), key=lambda t: abs(t[0]))
            err = err_at(at)
            if r == 0 or (err is not None and err >= noise_fraction * abs(r)):
                dropped.append(n)
                continue
            kept.append(n)
            res.append(float(r))
    if len(kept) < 3:
        raise ResidualError(f"only {len(kept)} grid points have residuals above the noise floor")
    slope, quality = fit_exponent(kept, res)
    return ResidualReport(kept, res, slope, quality, dropped, "pointwise" if envelope_frequency is None else "envelope")


# ------------------------------------------------------------------ profiles


@dataclass
class ProfileRow:
    a: int
    u: float
    value: float
    limit: float
    error: float = 0.0  # bound on |value - exact| from the omega evaluation

    @property
    def difference(self) -> float:
        return self.value - self.limit


def max_profile_a(n: int) -> int:
    return math.ceil(1.3 * math.sqrt(2 * n))


def tilde_omega_profile(n: int, a_max: int, method: str = "auto", precision: int = 256) -> list[ProfileRow]:
    """Rows (a, u = a/sqrt(2n), sqrt(2/n) (omega_{a,n} + a/2), Omega(u)) for a = 0..a_max.

    ``method``: ``"exact"`` (convolution sums, small n), ``"mp"`` (256-bit
    recurrence per a, ``precision`` bits) or ``"fast"`` (double-double kernel
    over all a at once, good to about 1e-18 relative up to n = 10^6).
    """
    from . import _kernels, formulas, holonomic

    if n < 1:
        raise ValueError("n must be positive")
    if not 0 <= a_max <= max_profile_a(n):
        raise ValueError(f"a_max must lie in [0, {max_profile_a(n)}]")
    if method == "auto":
        method = "exact" if n <= 200 else "fast"
    scale = math.sqrt(2.0 / n)
    if method == "exact":
        omegas = [formulas.omega_sum(a, n) for a in range(a_max + 1)]
        errors = [0.0] * (a_max + 1)
    elif method == "mp":
        omegas, errors = [], []
        for a in range(a_max + 1):
            seq = holonomic.eval(holonomic.builtin("omega", a), n, "float", precision)
            omegas.append(seq[n])
            errors.append(float(seq.error(n)))
    elif method == "fast":
        vals, errs = _kernels.omega_table([n], a_max)
        omegas, errors = list(vals[0]), list(errs[0])
    else:
        raise ValueError(f"unknown method {method!r}")
    rows = []
    for a, (w, err) in enumerate(zip(omegas, errors)):
        u = a / math.sqrt(2.0 * n)
        rows.append(ProfileRow(a, u, scale * (float(w) + a / 2), limit_shape(u), scale * err))
    return rows


def profile_csv(rows: Sequence[ProfileRow]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["u", "tilde_omega", "omega", "difference", "error"])
    for r in rows:
        w.writerow([f"{r.u:.15g}", f"{r.value:.15g}", f"{r.limit:.15g}", f"{r.difference:.12e}", f"{r.error:.3e}"])
    return buf.getvalue()


def progression_export(rows: Sequence[ProfileRow], step: int, start: int = 0) -> list[ProfileRow]:
    """Profile restricted to a = start, start + step, ... (data export only)."""
    return [r for r in rows if r.a >= start and (r.a - start) % step == 0]


# ------------------------------------------------------------ heuristics


@dataclass(frozen=True)
class HeuristicConstants:
    increment_integral: float
    increment_closed_form: float
    variance_integral: float
    variance_closed_form: float
    variance_constant: float
    quadrature_error: float


def _theta_quad(fn) -> tuple[float, float]:
    """integral of fn(x) s(x) over [-sqrt2, sqrt2] with x = sqrt2 sin(theta)."""

    def integrand(theta):
        c = math.cos(theta)
        x = SQRT2 * math.sin(theta)
        # s(x) dx = (sqrt2 cos / pi) * sqrt2 cos dtheta
        return fn(x) * 2.0 * c * c / math.pi

    return integrate.quad(integrand, -math.pi / 2, math.pi / 2, epsabs=1e-14, epsrel=1e-13, limit=200)


def semicircle_mass() -> float:
    value, _ = _theta_quad(lambda x: 1.0)
    return value


def heuristic_constants(tolerance: float = 1e-12) -> HeuristicConstants:
    pi = math.pi
    inc, e1 = _theta_quad(limit_shape)
    inc_closed = 64 * SQRT2 / (9 * pi * pi)
    var_half, e2 = _theta_quad(lambda x: (limit_shape(x) - inc_closed) ** 2)
    var_int = 2 * var_half
    var_closed = (54 * pi**4 + 2835 * pi**2 - 32768) / (162 * pi**4)
    err = max(e1, 2 * e2)
    if err > tolerance:
        raise ArithmeticError(f"quadrature did not converge: error estimate {err}")
    return HeuristicConstants(inc, inc_closed, var_int, var_closed, var_closed / 2, err)
