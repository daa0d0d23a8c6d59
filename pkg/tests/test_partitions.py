import math
from fractions import Fraction

import mpmath
import pytest
from hypothesis import given
from hypothesis import strategies as st

from plancherel import partitions as pc
from plancherel.partitions import Partition
from strategies import partitions

# number of partitions of n for n = 0..20
PARTITION_COUNTS = [1, 1, 2, 3, 5, 7, 11, 15, 22, 30, 42, 56, 77, 101, 135, 176, 231, 297, 385, 490, 627]

N4_ROWS = {
    (4,): (Fraction(1, 24), 6, 6, 1),
    (3, 1): (Fraction(3, 8), 2, 4, 1),
    (2, 2): (Fraction(1, 6), 0, 4, 2),
    (2, 1, 1): (Fraction(3, 8), -2, 4, 1),
    (1, 1, 1, 1): (Fraction(1, 24), -6, 6, 1),
}


def test_partition_counts():
    assert [pc.partition_count(n) for n in range(21)] == PARTITION_COUNTS
    assert [sum(1 for _ in pc.enumerate_partitions(n)) for n in range(21)] == PARTITION_COUNTS
    assert pc.partition_count(50) == 204226


def test_enumeration_order_and_validity():
    seen = list(pc.iter_parts(6))
    assert seen == sorted(seen, reverse=True)
    assert len(set(seen)) == len(seen)
    assert all(sum(p) == 6 for p in seen)
    assert list(pc.enumerate_partitions(0)) == [Partition(())]


def test_first_part_chunks_cover_everything():
    n = 12
    chunks = [list(pc.iter_parts(n, k)) for k in pc.chunk_keys(n)]
    assert all(p[0] == k for k, chunk in zip(pc.chunk_keys(n), chunks) for p in chunk)
    assert sum(len(c) for c in chunks) == pc.partition_count(n)


@pytest.mark.parametrize("parts,expected", list(N4_ROWS.items()))
def test_n4_weights_and_statistics(parts, expected):
    weight, x_minus_y, x_plus_y, d = expected
    f = pc.functionals(parts)
    assert pc.plancherel_weight(parts) == weight
    assert f.x_minus_y == x_minus_y
    assert f.x_plus_y == x_plus_y
    assert f.durfee == d


def test_partition_text_roundtrip():
    lam = Partition.parse("5,3,1,1")
    assert lam.parts == (5, 3, 1, 1)
    assert str(lam) == "5,3,1,1"
    assert Partition.parse("") == Partition(())
    with pytest.raises(ValueError):
        Partition((1, 2))
    with pytest.raises(ValueError):
        Partition((2, 0))


def test_hooks_and_contents_small():
    stats = pc.cell_stats((2, 1))
    assert sorted(stats.hooks) == [1, 1, 3]
    assert sorted(stats.contents) == [-1, 0, 1]
    assert pc.syt_count((3, 2, 2, 1)) == 70
    assert pc.syt_count(()) == 1


def test_psi_example():
    lam = (5, 3, 1, 1)
    assert [pc.psi(lam, a) for a in range(-4, 5)] == [1, 1, 1, 2, 2, 1, 1, 1, 0]
    assert pc.phi(lam, 0) == pc.durfee(lam) == 2
    assert pc.phi(lam, 1) == Fraction(pc.psi(lam, 1) + pc.psi(lam, -1), 2)


def test_log_hook_sum_matches_log_of_product():
    lam = (4, 2, 1)
    with mpmath.workprec(200):
        assert abs(pc.log_hook_sum(lam, 200) - mpmath.log(pc.hook_product(lam))) < mpmath.mpf(2) ** -190


@given(partitions())
def test_conjugate_is_involution(lam):
    assert pc.conjugate(pc.conjugate(lam)) == lam
    assert pc.conjugate(lam).n == lam.n


@given(partitions())
def test_conjugation_swaps_x_and_y(lam):
    f = pc.functionals(lam)
    g = pc.functionals(pc.conjugate(lam))
    assert (f.x_bump, f.y_bump) == (g.y_bump, g.x_bump)
    assert f.durfee == g.durfee


@given(partitions())
def test_x_minus_y_is_sum_of_contents(lam):
    f = pc.functionals(lam)
    assert f.x_minus_y == sum(pc.cell_stats(lam).contents)


@given(partitions())
def test_psi_counts_every_box_once(lam):
    n = lam.n
    assert sum(pc.psi(lam, a) for a in range(-n, n + 1)) == n


@given(partitions(max_n=25))
def test_syt_count_is_integer_hook_formula(lam):
    assert pc.syt_count(lam) * pc.hook_product(lam) == math.factorial(lam.n)


@given(st.integers(0, 16))
def test_plancherel_weights_sum_to_one(n):
    assert sum(pc.plancherel_weight(p) for p in pc.iter_parts(n)) == 1


@given(partitions(max_n=20))
def test_addable_cells_give_partitions_of_n_plus_one(lam):
    parts = tuple(lam)
    for i, j in pc.addable_cells(parts):
        mu = Partition(pc.add_cell(parts, i))
        assert mu.n == lam.n + 1
        assert mu.parts[i] == j + 1
