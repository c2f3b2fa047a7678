import numpy as np
import pytest

from skewmorph.arith import totient
from skewmorph.enumerate import (
    ORACLE_CUTOFF,
    BudgetError,
    Method,
    brute_force_census,
    check_multiplicativity,
    clear_census_memo,
    enumerate_census,
    skew_count,
)

# Skew(n) for n = 1..11; the oracle is the ground truth these were frozen from
SMALL_COUNTS = [1, 1, 2, 2, 4, 4, 6, 6, 10, 8, 10]


def test_oracle_counts(oracle_censuses):
    for n, want in enumerate(SMALL_COUNTS, start=1):
        assert len(oracle_censuses[n]) == want, n


def test_oracle_known_rows(oracle_censuses):
    assert oracle_censuses[4].matrix.tolist() == [[0, 1, 2, 3], [0, 3, 2, 1]]
    assert len(oracle_censuses[8]) == 6
    assert len(oracle_censuses[6]) == 4
    assert oracle_censuses[8].method is Method.ORACLE


def test_oracle_cutoff():
    with pytest.raises(BudgetError) as exc:
        brute_force_census(ORACLE_CUTOFF + 1)
    assert exc.value.report.budget_exhausted


def test_oracle_equivalence(oracle_censuses):
    """The enumerator and the oracle agree as sorted sets for every n <= 11."""
    for n in range(1, 12):
        got = enumerate_census(n)
        assert np.array_equal(got.matrix, oracle_censuses[n].matrix), n


@pytest.mark.parametrize("n,want", [
    (1, 1),
    (12, 8),
    (15, 8),
    (16, 20),
    (20, 24),
    (21, 24),
])
def test_enumerate_known_counts(n, want):
    census = enumerate_census(n)
    assert len(census) == want
    assert census.method in (Method.BACKTRACKING,)


def test_census_rows_sorted_unique():
    c = enumerate_census(16)
    as_tuples = [tuple(r) for r in c.matrix.tolist()]
    assert as_tuples == sorted(set(as_tuples))


def test_entry_orders_against_bounds():
    for n in (12, 15, 16, 20):
        c = enumerate_census(n)
        for i in range(len(c)):
            d = int(c.orders[i])
            assert 1 <= d < n
            assert (n * totient(n)) % d == 0


def test_prime_rule(oracle_censuses):
    for p in (2, 3, 5, 7, 11):
        c = oracle_censuses[p]
        assert len(c) == p - 1
        assert all(int(k) == 1 for k in c.kernel_indices)


def test_determinism_across_jobs():
    clear_census_memo()
    a = enumerate_census(20, jobs=1)
    clear_census_memo()
    b = enumerate_census(20, jobs=8)
    assert np.array_equal(a.matrix, b.matrix)
    assert a.matrix.tobytes() == b.matrix.tobytes()


def test_budget_error_carries_lower_bound():
    clear_census_memo()
    with pytest.raises(BudgetError) as exc:
        enumerate_census(99, budget_secs=1e-9)
    report = exc.value.report
    assert report.budget_exhausted
    assert report.n == 99
    clear_census_memo()


class TestSkewCount:
    def test_oracle_dispatch(self):
        report = skew_count(2)
        assert report.count == 1 and report.method is Method.ORACLE
        report = skew_count(8)
        assert report.count == 6 and report.method is Method.ORACLE

    def test_twopower_dispatch(self):
        report = skew_count(32)
        assert report.count == 76 and report.method is Method.TWOPOWER
        assert skew_count(1024).count == 76460

    def test_backtracking_dispatch(self):
        report = skew_count(21)
        assert report.count == 24 and report.method is Method.BACKTRACKING


class TestMultiplicativity:
    def test_phi_coprime_product(self):
        rep = check_multiplicativity(3, 5)
        assert rep.phi_coprime and rep.product_equal
        assert (rep.skew_n, rep.skew_m, rep.skew_nm) == (2, 4, 8)

    def test_not_phi_coprime(self):
        rep = check_multiplicativity(2, 3)
        assert not rep.phi_coprime and not rep.product_equal
        assert rep.skew_nm == 4 and rep.skew_n * rep.skew_m == 2

    def test_four_q(self):
        rep = check_multiplicativity(4, 5)
        assert not rep.phi_coprime
        assert rep.skew_nm == 24  # 6q - 6 for q = 5
        assert rep.skew_n * rep.skew_m == 8

    def test_requires_coprime(self):
        with pytest.raises(ValueError):
            check_multiplicativity(4, 6)


def test_census_entry_materialization():
    c = enumerate_census(15)
    entries = c.entries()
    assert len(entries) == 8
    assert entries[0].n == 15
    assert {e.images for e in entries} == {tuple(r) for r in c.matrix.tolist()}
