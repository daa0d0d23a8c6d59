from collections import Counter
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given
from scipy import stats

from plancherel import partitions as pc
from plancherel import rsk
from plancherel.partitions import Partition
from plancherel.rsk import StandardTableau
from strategies import partitions, permutations

EXAMPLE_PERM = (7, 5, 1, 8, 6, 3, 4, 2)
EXAMPLE_P = [[1, 2, 4], [3, 6], [5, 8], [7]]
EXAMPLE_Q = [[1, 4, 7], [2, 5], [3, 6], [8]]


def test_rsk_worked_example():
    out = rsk.rsk(EXAMPLE_PERM)
    assert out.p.to_lists() == EXAMPLE_P
    assert out.q.to_lists() == EXAMPLE_Q
    assert out.shape == Partition((3, 2, 2, 1))
    assert out.bump_total == 9
    assert str(out.p) == "1 2 4\n3 6\n5 8\n7"


def test_single_insertion_example():
    p, bumps, cell = rsk.row_insert(StandardTableau([[1, 3, 4], [5, 6], [7, 8]]), 2)
    assert p.to_lists() == [[1, 2, 4], [3, 6], [5, 8], [7]]
    assert bumps == 3
    assert cell == (4, 1)


def test_insert_into_empty_and_append():
    p, bumps, cell = rsk.row_insert(StandardTableau(), 5)
    assert p.to_lists() == [[5]] and bumps == 0 and cell == (1, 1)
    p, bumps, cell = rsk.row_insert(StandardTableau([[1, 3], [2]]), 9)
    assert p.to_lists() == [[1, 3, 9], [2]] and bumps == 0 and cell == (1, 3)


def test_insert_rejects_duplicates():
    with pytest.raises(ValueError):
        rsk.row_insert(StandardTableau([[1, 3], [2]]), 3)


def test_rsk_rejects_non_permutations():
    for bad in ([1, 1, 2], [0, 1], [2, 3]):
        with pytest.raises(ValueError):
            rsk.rsk(bad)


def test_invalid_tableaux_rejected():
    with pytest.raises(ValueError):
        StandardTableau([[1, 1]])
    with pytest.raises(ValueError):
        StandardTableau([[1, 2], [1]])
    with pytest.raises(ValueError):
        StandardTableau([[1], [2, 3]])


def test_identity_permutation():
    out = rsk.rsk(range(1, 8))
    assert out.shape == Partition((7,)) and out.bump_total == 0


def test_permutation_text_format():
    assert rsk.parse_permutation("7,5,1,8,6,3,4,2") == EXAMPLE_PERM
    assert rsk.parse_permutation("75186342") == EXAMPLE_PERM
    assert rsk.parse_permutation("7 5 1 8 6 3 4 2") == EXAMPLE_PERM
    assert rsk.parse_permutation("1") == (1,)
    assert rsk.format_permutation(EXAMPLE_PERM) == "7,5,1,8,6,3,4,2"
    with pytest.raises(ValueError):
        rsk.parse_permutation("1,3")


@given(permutations())
def test_rsk_invariants(perm):
    out = rsk.rsk(perm)
    assert out.p.shape == out.q.shape == out.shape
    assert out.q.is_standard() and out.p.is_standard()
    assert out.bump_total == pc.y_bump(out.shape)


@given(permutations(max_n=25))
def test_tableaux_stay_valid_after_every_insertion(perm):
    p = StandardTableau()
    total = 0
    for v in perm:
        p, bumps, (row, col) = rsk.row_insert(p, v)  # constructor re-checks monotonicity
        assert len(p.rows[row - 1]) == col
        total += bumps
    assert total == pc.y_bump(p.shape)


@given(permutations(max_n=30))
def test_inverse_permutation_swaps_tableaux(perm):
    inv = [0] * len(perm)
    for i, v in enumerate(perm, start=1):
        inv[v - 1] = i
    a, b = rsk.rsk(perm), rsk.rsk(inv)
    assert a.p == b.q and a.q == b.p


def test_sample_permutation_basics():
    assert rsk.sample_permutation(1, 0) == (1,)
    assert rsk.sample_permutation(50, 123) == rsk.sample_permutation(50, 123)
    assert sorted(rsk.sample_permutation(50, 123)) == list(range(1, 51))
    with pytest.raises(ValueError):
        rsk.sample_permutation(0, 1)


def test_sample_permutation_uniform_n3():
    rng = rsk.generator(2024)
    counts = Counter(rsk.sample_permutation(3, rng) for _ in range(60000))
    assert len(counts) == 6
    p = 1 / 6
    sigma = (60000 * p * (1 - p)) ** 0.5
    assert all(abs(c - 10000) < 5 * sigma for c in counts.values())


def test_growth_step_small_cases():
    assert rsk.growth_step((), 1) == Partition((1,))
    probs = dict(rsk.growth_probabilities((1,)))
    assert probs == {Partition((2,)): Fraction(1, 2), Partition((1, 1)): Fraction(1, 2)}


@given(partitions(max_n=18))
def test_growth_probabilities_sum_to_one(lam):
    probs = rsk.growth_probabilities(lam)
    assert sum(p for _, p in probs) == 1
    assert all(mu.n == lam.n + 1 for mu, _ in probs)


def test_growth_step_matches_chain_law():
    rng = rsk.generator(5)
    counts = Counter()
    for _ in range(4000):
        lam = ()
        for _ in range(3):
            lam = rsk.growth_step(lam, rng)
        counts[lam] += 1
    expected = {Partition(p): pc.plancherel_weight(p) for p in pc.iter_parts(3)}
    obs = [counts[k] for k in expected]
    exp = [4000 * float(w) for w in expected.values()]
    assert stats.chisquare(obs, exp).pvalue > 1e-4


def test_growth_chain_big_integers_path():
    # weights beyond 2^62 use the rejection sampler
    counts = rsk.growth_chain(24, 40, seed=3)
    assert sum(counts.values()) == 40
    assert all(lam.n == 24 for lam in counts)


def test_growth_chain_plancherel_n4():
    counts = rsk.growth_chain(4, 10**6, seed=9)
    shapes = [Partition(p) for p in pc.iter_parts(4)]
    obs = [counts.get(s, 0) for s in shapes]
    exp = [10**6 * float(pc.plancherel_weight(s)) for s in shapes]
    assert stats.chisquare(obs, exp).pvalue > 1e-4


def test_moments_merge_matches_direct():
    x = np.random.default_rng(0).normal(size=1000) ** 3
    parts = [rsk.Moments.of(x[i : i + 137]) for i in range(0, 1000, 137)]
    acc = rsk.Moments()
    for p in parts:
        acc = acc.merge(p)
    direct = rsk.Moments.of(x)
    for field in ("mean", "m2", "m3", "m4"):
        assert getattr(acc, field) == pytest.approx(getattr(direct, field), rel=1e-10)


def test_monte_carlo_n1_is_deterministic():
    recs = rsk.monte_carlo(1, 50, 3, ["x_plus_y", "bump_total", "durfee"])
    assert [(r.mean, r.variance) for r in recs] == [(0.0, 0.0), (0.0, 0.0), (1.0, 0.0)]


def test_monte_carlo_independent_of_workers():
    a = rsk.monte_carlo(20, 9000, 7, ["x_plus_y", "durfee"], workers=1)
    b = rsk.monte_carlo(20, 9000, 7, ["x_plus_y", "durfee"], workers=2)
    assert a == b


def test_monte_carlo_record_json():
    rec = rsk.monte_carlo(5, 100, 1, ["durfee"])[0]
    text = rec.to_json()
    for key in ("statistic", "n", "trials", "mean", "variance", "stderr", "seed"):
        assert f'"{key}"' in text


def test_monte_carlo_n4_means():
    recs = {r.statistic: r for r in rsk.monte_carlo(4, 10**6, 11, ["x_plus_y", "durfee", "x_minus_y"])}
    assert abs(recs["x_plus_y"].mean - 25 / 6) < 5 * recs["x_plus_y"].stderr
    assert abs(recs["durfee"].mean - 7 / 6) < 5 * recs["durfee"].stderr
    assert abs(recs["x_minus_y"].mean) < 5 * recs["x_minus_y"].stderr


def test_monte_carlo_variance_n50():
    rec = rsk.monte_carlo(50, 10**5, 4, ["x_plus_y"])[0]
    assert abs(rec.variance / 2500 - 0.01216526413) < 5 * rec.variance_stderr / 2500


def test_unknown_statistic():
    with pytest.raises(ValueError):
        rsk.monte_carlo(5, 10, 0, ["nope"])
    with pytest.raises(ValueError):
        rsk.monte_carlo(5, 0, 0, ["durfee"])
