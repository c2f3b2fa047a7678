"""Ground-truth enumeration of skew morphisms of Z_n.

Two independent routes: a brute-force oracle scanning all (n-1)! permutations
(for tiny n), and a backtracking enumerator driven by candidate derived
morphisms per Lemma-style structure: for every admissible order d the census
of Z_d supplies candidate power functions pi(j) = rho^j(1), and an orbit-walk
search reconstructs every morphism from its power function and the orbit of
1. The enumerator never consults the oracle, so the two routes can check
each other.
"""

from __future__ import annotations

import os
import threading
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from enum import Enum
from math import gcd

import numpy as np

from . import _kernels
from .arith import divisors, is_power_of_two, totient
from .core import SkewMorphism, try_from_images

__all__ = [
    "Method",
    "Census",
    "CountReport",
    "MultiplicativityReport",
    "BudgetError",
    "brute_force_census",
    "enumerate_census",
    "skew_count",
    "check_multiplicativity",
    "ORACLE_CUTOFF",
]

ORACLE_CUTOFF = 11

# rough kernel speeds used to translate a wall-clock budget into DFS node
# budgets; the wall clock is also checked between tasks
_NODES_PER_SECOND = 20_000_000 if _kernels.BACKEND == "numba" else 200_000


class Method(str, Enum):
    ORACLE = "oracle"
    BACKTRACKING = "backtracking"
    TWOPOWER = "twopower"
    IMPORTED = "imported"


@dataclass(frozen=True)
class CountReport:
    """Skew(n) with provenance. When budget_exhausted is true the count is
    only a lower bound and must never be used in equality assertions."""

    n: int
    count: int
    method: Method
    elapsed: float
    budget_exhausted: bool = False


class BudgetError(Exception):
    """Raised when a computation exceeds its time budget; carries the partial
    lower-bound report."""

    def __init__(self, report: CountReport):
        super().__init__(
            f"budget exhausted for n = {report.n}: Skew({report.n}) >= {report.count}"
        )
        self.report = report


@dataclass
class Census:
    """The complete set of skew morphisms of Z_n, as a lexicographically
    sorted matrix of image rows (one morphism per row)."""

    n: int
    matrix: np.ndarray  # (count, n) int32, rows sorted ascending, unique
    method: Method
    orders: np.ndarray = field(repr=False, default=None)
    kernel_indices: np.ndarray = field(repr=False, default=None)

    def __post_init__(self):
        if self.orders is None or self.kernel_indices is None:
            codes, ds, ks = _kernels.validate_rows(self.matrix.astype(np.int64))
            if np.any(codes != 0):
                bad = int(np.argmax(codes != 0))
                raise ValueError(f"census row {bad} is not a skew morphism")
            self.orders = ds.astype(np.int32)
            self.kernel_indices = ks.astype(np.int32)

    def __len__(self) -> int:
        return int(self.matrix.shape[0])

    @property
    def count(self) -> int:
        return len(self)

    def row(self, i: int) -> np.ndarray:
        return self.matrix[i]

    def entry(self, i: int) -> SkewMorphism:
        return try_from_images(self.n, self.matrix[i].astype(np.int64))

    def entries(self) -> list[SkewMorphism]:
        return [self.entry(i) for i in range(len(self))]

    def __iter__(self):
        return (self.entry(i) for i in range(len(self)))

    def __eq__(self, other) -> bool:
        if not isinstance(other, Census):
            return NotImplemented
        return self.n == other.n and np.array_equal(self.matrix, other.matrix)


def _finish_matrix(n: int, rows: np.ndarray) -> np.ndarray:
    """Sort rows lexicographically and drop duplicates; int32 output."""
    if rows.size == 0:
        return np.empty((0, n), np.int32)
    return np.unique(rows.astype(np.int32), axis=0)


def brute_force_census(n: int, cutoff: int = ORACLE_CUTOFF) -> Census:
    """Exhaustive oracle: scan all (n-1)! permutations fixing 0."""
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    if n > cutoff:
        raise BudgetError(CountReport(n, 0, Method.ORACLE, 0.0, True))
    start = time.monotonic()
    rows = _kernels.oracle_rows(n)
    matrix = _finish_matrix(n, rows)
    del start
    return Census(n, matrix, Method.ORACLE)


# ---------------------------------------------------------------------------
# backtracking enumerator
# ---------------------------------------------------------------------------

_CENSUS_MEMO: dict[int, Census] = {}
_MEMO_LOCK = threading.Lock()


def clear_census_memo() -> None:
    with _MEMO_LOCK:
        _CENSUS_MEMO.clear()


def _candidate_orders(n: int) -> list[int]:
    """Orders a skew morphism of Z_n can have: divisors of n*phi(n) below n."""
    if n == 1:
        return [1]
    return [d for d in divisors(n * totient(n)) if d < n]


def _power_seq(row: np.ndarray, order: int) -> tuple[int, ...]:
    """pi(j) = rho^j(1) for j = 0..ord(rho)-1, read off the orbit of 1."""
    seq = [1]
    cur = int(row[1])
    while cur != 1:
        seq.append(cur)
        cur = int(row[cur])
    assert len(seq) == order
    return tuple(seq)


def _residue_targets(row: np.ndarray, d: int, seq: tuple[int, ...]) -> np.ndarray | None:
    """Forced residues mod k of the orbit values, read off the candidate
    derived morphism: pi(phi^i(1)) = rho(i+1) - rho(i) mod d, and the pi
    values within one period are pairwise distinct. None when some difference
    is not a pi value at all (the candidate admits no solutions)."""
    where = {v: m for m, v in enumerate(seq)}
    rv = np.empty(d, np.int64)
    for i in range(d):
        diff = (int(row[(i + 1) % d]) - int(row[i])) % d
        m = where.get(diff)
        if m is None:
            return None
        rv[i] = m
    return rv


class _Deadline:
    def __init__(self, budget_secs: float):
        self.t0 = time.monotonic()
        self.budget = budget_secs

    def remaining(self) -> float:
        return self.budget - (time.monotonic() - self.t0)

    def elapsed(self) -> float:
        return time.monotonic() - self.t0

    def node_budget(self) -> int:
        return max(1, int(self.remaining() * _NODES_PER_SECOND))


def _enumerate_rows(n: int, deadline: _Deadline, jobs: int) -> np.ndarray:
    """All image rows for Z_n via the orbit-walk search, unsorted."""
    if n == 1:
        return np.zeros((1, 1), np.int64)
    if deadline.remaining() <= 0:
        raise BudgetError(CountReport(n, 1, Method.BACKTRACKING,
                                      deadline.elapsed(), True))
    two_group = is_power_of_two(n)
    tasks: list[tuple[int, np.ndarray, np.ndarray]] = []
    seen: set[tuple[int, ...]] = set()
    for d in _candidate_orders(n):
        if d == 1:
            continue
        sub = _census_memoized(d, deadline, jobs)
        coprime_order = gcd(d, n) == 1
        for i in range(len(sub)):
            k = int(sub.orders[i])
            if n % k != 0:
                continue
            if coprime_order and k != 1:
                # gcd(ord, n) = 1 forces an automorphism, whose derived
                # morphism is the identity
                continue
            seq = _power_seq(sub.matrix[i], k)
            rv = _residue_targets(sub.matrix[i], d, seq)
            if rv is None:
                continue
            key = (d,) + seq + tuple(int(r) for r in rv)
            if key in seen:
                continue
            seen.add(key)
            tasks.append((d, np.array(seq, dtype=np.int64), rv))

    partial = [np.arange(n, dtype=np.int64).reshape(1, n)]  # the identity

    def run(task):
        d, pis, rv = task
        rows, nodes, exhausted = _kernels.dfs_rows(
            n, d, pis, rv, two_group, deadline.node_budget()
        )
        return rows, exhausted

    def fail() -> BudgetError:
        done = np.unique(np.concatenate(partial, axis=0), axis=0)
        report = CountReport(n, len(done), Method.BACKTRACKING,
                             deadline.elapsed(), True)
        return BudgetError(report)

    if jobs > 1 and _kernels.BACKEND == "numba":
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            for rows, exhausted in pool.map(run, tasks):
                partial.append(rows)
                if exhausted:
                    raise fail()
    else:
        for task in tasks:
            if deadline.remaining() <= 0:
                raise fail()
            rows, exhausted = run(task)
            partial.append(rows)
            if exhausted:
                raise fail()
    return np.concatenate(partial, axis=0)


def _census_memoized(n: int, deadline: _Deadline, jobs: int) -> Census:
    with _MEMO_LOCK:
        hit = _CENSUS_MEMO.get(n)
    if hit is not None:
        return hit
    rows = _enumerate_rows(n, deadline, jobs)
    census = Census(n, _finish_matrix(n, rows), Method.BACKTRACKING)
    with _MEMO_LOCK:
        _CENSUS_MEMO[n] = census
    return census


def enumerate_census(n: int, budget_secs: float = 60.0, jobs: int | None = None) -> Census:
    """The complete census of Z_n via backtracking over derived-morphism
    candidates. Deterministic: output is sorted and independent of jobs."""
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    if jobs is None:
        jobs = os.cpu_count() or 1
    deadline = _Deadline(budget_secs)
    return _census_memoized(n, deadline, jobs)


# ---------------------------------------------------------------------------
# counting and the phi-coprime multiplicativity check
# ---------------------------------------------------------------------------


def skew_count(n: int, budget_secs: float = 60.0) -> CountReport:
    """Skew(n) with provenance: oracle for tiny n, the 2-power recursion for
    n = 2^e (e >= 3), the backtracking enumerator otherwise."""
    start = time.monotonic()
    if n <= ORACLE_CUTOFF:
        count = len(brute_force_census(n))
        return CountReport(n, count, Method.ORACLE, time.monotonic() - start)
    if is_power_of_two(n):
        from .twopower import count_2e

        e = n.bit_length() - 1
        return CountReport(n, count_2e(e), Method.TWOPOWER, time.monotonic() - start)
    census = enumerate_census(n, budget_secs)
    return CountReport(n, len(census), Method.BACKTRACKING, time.monotonic() - start)


@dataclass(frozen=True)
class MultiplicativityReport:
    n: int
    m: int
    phi_coprime: bool
    skew_n: int
    skew_m: int
    skew_nm: int
    product_equal: bool


def check_multiplicativity(n: int, m: int, budget_secs: float = 60.0) -> MultiplicativityReport:
    """Compare Skew(nm) with Skew(n)*Skew(m) for coprime n, m."""
    from .arith import is_phi_coprime

    if gcd(n, m) != 1:
        raise ValueError(f"n = {n} and m = {m} must be coprime")
    deadline = _Deadline(budget_secs)
    sn = skew_count(n, deadline.remaining()).count
    sm = skew_count(m, max(deadline.remaining(), 0.001)).count
    snm = skew_count(n * m, max(deadline.remaining(), 0.001)).count
    return MultiplicativityReport(
        n=n,
        m=m,
        phi_coprime=is_phi_coprime(n, m),
        skew_n=sn,
        skew_m=sm,
        skew_nm=snm,
        product_equal=(snm == sn * sm),
    )
