"""Definitional checkers for the algebraic invariants, shared by the property
and acceptance suites.

Everything here re-verifies identities directly from their definitions with
plain NumPy, independently of the construction-time validator, so the two
code paths check each other.
"""

from __future__ import annotations

from math import gcd

import numpy as np

from skewmorph import try_from_images
from skewmorph._kernels import perm_power
from skewmorph.arith import totient
from skewmorph.core import SkewMorphism
from skewmorph.enumerate import Census
from skewmorph.twopower import companions


def _pows(sm: SkewMorphism, up_to: int) -> list[np.ndarray]:
    im = sm.images_array
    out = [np.arange(sm.n, dtype=np.int64)]
    for _ in range(up_to):
        out.append(im[out[-1]])
    return out


def _pival(sm: SkewMorphism) -> np.ndarray:
    return np.array([sm.power(x) for x in range(sm.n)], dtype=np.int64)


def _sigma_table(sm: SkewMorphism, pows: list[np.ndarray]) -> np.ndarray:
    """S[r][x] = pi(x) + pi(phi(x)) + ... + pi(phi^{r-1}(x)), by summation."""
    n, d = sm.n, sm.order
    pv = _pival(sm)
    S = np.zeros((d + 1, n), dtype=np.int64)
    for r in range(1, d + 1):
        S[r] = S[r - 1] + pv[pows[r - 1]]
    return S


def check_defining_identity(sm: SkewMorphism) -> None:
    n = sm.n
    im = sm.images_array
    x = np.arange(n)
    lhs = im[(x[:, None] + x[None, :]) % n]
    rows = {c: perm_power(im, c) for c in set(sm.power.values)}
    rhs = (im[:, None] + np.stack([rows[sm.power(v)] for v in range(n)])) % n
    assert np.array_equal(lhs, rhs), f"defining identity fails for n={n}"


def check_sigma_lemma(sm: SkewMorphism) -> None:
    n, d = sm.n, sm.order
    im = sm.images_array
    pows = _pows(sm, d)
    S = _sigma_table(sm, pows)
    pv = _pival(sm)
    xs = np.arange(n)

    # the library sigma agrees with direct summation, including reduction of r
    for r in (0, 1, d // 2, d, d + 1, 2 * d + 3):
        for x in range(n):
            want = int(S[r % d][x]) % d
            assert sm.sigma(r, x) == want, f"sigma({r},{x}) != direct sum"

    for r in range(1, d + 1):
        for x in range(n):
            # (a) phi^r(x+y) = phi^r(x) + phi^{sigma(r,x)}(y)
            s = int(S[r][x]) % d
            lhs = pows[r][(x + xs) % n]
            rhs = (pows[r][x] + pows[s]) % n
            assert np.array_equal(lhs, rhs), f"sigma(a) fails r={r} x={x} n={n}"
    # (b) pi(x+y) = sigma(pi(x), y)
    for x in range(n):
        lhs = pv[(x + xs) % n] % d
        rhs = S[int(pv[x]) % d] % d
        assert np.array_equal(lhs, rhs), f"sigma(b) fails x={x} n={n}"
    # (c) sigma(r,x) = pi(phi^{r-1}(x)) + sigma(r-1,x)
    for r in range(1, d + 1):
        lhs = S[r] % d
        rhs = (pv[pows[r - 1]] + S[r - 1]) % d
        assert np.array_equal(lhs, rhs), f"sigma(c) fails r={r} n={n}"
    # (d) phi^{pi(z)}(x+y) = phi^{pi(z)}(x) + phi^{pi(z+x)}(y)
    for z in range(n):
        A = pows[int(pv[z]) % d]
        for x in range(n):
            lhs = A[(x + xs) % n]
            rhs = (A[x] + pows[int(pv[(z + x) % n]) % d]) % n
            assert np.array_equal(lhs, rhs), f"sigma(d) fails z={z} x={x} n={n}"


def check_quo_lemma(sm: SkewMorphism) -> None:
    d = sm.order
    bar = sm.derived()
    assert bar.order == sm.kernel_index, "ord of derived != n/|ker|"
    for x in range(d):
        for y in range(d):
            assert bar.apply_power(y, x) == sm.sigma(x, y), \
                f"quo(a) fails x={x} y={y}"
    for i in range(sm.n):
        assert sm.power(i) % d == bar.apply_power(i, 1) % d, \
            f"quo(b) fails i={i}"


def check_order_rules(sm: SkewMorphism) -> None:
    n, d = sm.n, sm.order
    if n > 1:
        assert d < n, "order must be below the group order"
    assert (n * totient(n)) % d == 0, "order must divide n*phi(n)"
    if gcd(d, n) == 1:
        assert sm.is_automorphism(), "coprime order forces an automorphism"
    if d <= 2:
        assert sm.is_automorphism(), "proper skew morphisms have order >= 3"


def check_power_function_shape(sm: SkewMorphism) -> None:
    pf = sm.power
    assert pf.values[0] == 1, "pi(0) must be 1"
    assert all(1 <= v <= sm.order for v in pf.values), "pi values out of range"
    assert sm.n % pf.period == 0, "pi period must divide n"
    assert len(set(pf.values)) == pf.period, \
        "pi must separate residues mod the kernel index"
    if sm.order == 1:
        assert set(pf.values) == {1}, "identity must have pi identically 1"
    assert sm.is_automorphism() == (sm.kernel_index == 1)
    if sm.is_automorphism():
        t = sm(1)
        assert all(sm(x) == (x * t) % sm.n for x in range(sm.n))


def check_reconstruction(sm: SkewMorphism) -> None:
    """Rebuild the images from (orbit of 1, power function) alone."""
    n, d = sm.n, sm.order
    if n == 1:
        return
    orb = sm.orbit_of(1)
    rebuilt = [0] * n
    acc = orb[0]
    for x in range(1, n):
        rebuilt[x] = acc % n
        acc += orb[sm.power(x) % d]
    assert tuple(rebuilt) == sm.images, "orbit+pi reconstruction mismatch"


def check_roundtrip(sm: SkewMorphism) -> None:
    again = try_from_images(sm.n, sm.images_array)
    assert again == sm
    assert again.order == sm.order
    assert again.kernel_index == sm.kernel_index
    assert again.power == sm.power


def check_power_is_skew_cross(sm: SkewMorphism) -> None:
    """Theorem-power route vs direct validation of phi^r."""
    im = sm.images_array
    for r in range(0, sm.order + 1):
        claimed = sm.power_is_skew(r)
        try:
            try_from_images(sm.n, perm_power(im, r))
            actual = True
        except Exception:
            actual = False
        assert claimed == actual, f"power_is_skew({r}) = {claimed}, direct = {actual}"


def check_core_battery(sm: SkewMorphism) -> None:
    check_defining_identity(sm)
    check_sigma_lemma(sm)
    check_quo_lemma(sm)
    check_order_rules(sm)
    check_power_function_shape(sm)
    check_reconstruction(sm)
    check_roundtrip(sm)
    check_power_is_skew_cross(sm)


# ---------------------------------------------------------------------------
# cyclic 2-group invariants
# ---------------------------------------------------------------------------


def check_tp_2basic(sm: SkewMorphism, e: int) -> None:
    d = sm.order
    assert d & (d - 1) == 0, "order must be a power of 2"
    for i in range(e + 1):
        sm.reduce_mod(1 << i)  # raises when not well defined
        sm.restrict(1 << i)    # raises when <2^i> is not preserved
    for r in range(1, d + 1):
        assert sm.power_is_skew(r), f"phi^{r} should be a skew morphism"


def check_tp_2power(sm: SkewMorphism) -> None:
    vals = sm.power.values
    assert all(v % 2 == 1 for v in vals), "pi values must be odd"
    evens = {vals[j] % 4 for j in range(0, len(vals), 2)}
    odds = {vals[j] % 4 for j in range(1, len(vals), 2)}
    assert evens <= {1}, "pi on even arguments must be 1 mod 4"
    assert odds <= {1} or odds <= {3}, \
        "pi on odd arguments must be constant mod 4"


def check_tp_half(sm: SkewMorphism) -> None:
    n, d = sm.n, sm.order
    if d < 4:
        return
    assert sm.apply_power(d // 2, 1) == n // 2 + 1, "half-orbit value wrong"
    assert sm.reduce_mod(n // 2).order == d // 2, "reduction must halve the order"
    for x in range(2, n, 2):
        assert len(sm.orbit_of(x)) < d, f"even element {x} has a full-length orbit"


def _reduction_groups(census: Census) -> dict[bytes, list[int]]:
    half = census.n // 2
    red = census.matrix[:, :half].astype(np.int64) % half
    groups: dict[bytes, list[int]] = {}
    for i in range(len(census)):
        groups.setdefault(red[i].tobytes(), []).append(i)
    return groups


def check_tp_actions(census: Census) -> None:
    for idxs in _reduction_groups(census).values():
        rows = [census.matrix[i].astype(np.int64) for i in idxs]
        p2 = [perm_power(r, 2) for r in rows]
        p4 = [perm_power(r, 4) for r in rows]
        for a in range(len(rows)):
            for b in range(a + 1, len(rows)):
                assert np.array_equal(rows[a][::4], rows[b][::4]), \
                    "lifts must share their action on <4>"
                assert np.array_equal(p2[a][::2], p2[b][::2]), \
                    "squared lifts must share their action on <2>"
                assert np.array_equal(p4[a], p4[b]), \
                    "fourth powers of lifts must coincide"


def check_tp_max4(census: Census, prev: Census, e: int) -> None:
    half = census.n // 2
    groups = _reduction_groups(census)
    # every reduction is a member of the previous census, and conversely
    prev_rows = {prev.matrix[i].astype(np.int64).tobytes() for i in range(len(prev))}
    assert set(groups) == prev_rows, "reductions must hit the previous census exactly"
    ident = np.arange(half, dtype=np.int64)
    exceptional = {ident.tobytes()}
    if e >= 4:
        t = (1 << (e - 2)) - 1
        exceptional.add(((t * ident) % half).tobytes())
    for key, idxs in groups.items():
        want = 2 if key in exceptional else 4
        assert len(idxs) == want, \
            f"base has {len(idxs)} lifts, expected {want}"
        seen_pairs = {
            (int(census.matrix[i, 1]), int(census.matrix[i, 2])) for i in idxs
        }
        assert len(seen_pairs) == len(idxs), \
            "at most one lift per (x1, x2) pair"


def check_tp_samesame(census: Census) -> None:
    n = census.n
    x = np.arange(n, dtype=np.int64)
    for idxs in _reduction_groups(census).values():
        for a in idxs:
            for b in idxs:
                if b <= a:
                    continue
                ra = census.matrix[a].astype(np.int64)
                rb = census.matrix[b].astype(np.int64)
                if not (np.array_equal(ra % 4, x % 4) and np.array_equal(rb % 4, x % 4)):
                    continue
                if ra[1] != rb[1]:
                    continue
                oa = try_from_images(n, ra).orbit_of(1)
                ob = try_from_images(n, rb).orbit_of(1)
                assert set(oa) == set(ob), "orbits of 1 must be equal as sets"
                doubled = oa + oa
                rotated = any(
                    doubled[i : i + len(oa)] == ob for i in range(len(oa))
                )
                assert rotated, (
                    "orbit sets equal but not equal as cyclic sequences: "
                    "flag for review"
                )


def check_tp_four(census: Census) -> None:
    n = census.n
    half = n // 2
    members = {census.matrix[i].astype(np.int64).tobytes() for i in range(len(census))}
    for i in range(len(census)):
        if int(census.orders[i]) < 8:
            continue
        sm = census.entry(i)
        trio = companions(sm)
        all_four = [sm, trio.alpha, trio.beta, trio.gamma]
        rows = [m.images_array for m in all_four]
        assert len({r.tobytes() for r in rows}) == 4, "companions must be distinct"
        for m in all_four[1:]:
            assert m.order == sm.order
            assert m.reduce_mod(half) == sm.reduce_mod(half)
            assert m.images_array.astype(np.int64).tobytes() in members, \
                "companion missing from the census"
        # power function transfer
        d = sm.order
        pphi = np.array([sm.power(v) % d for v in range(n)])
        phi_mod4_is_swap = np.array_equal(
            sm.images_array % 4, (3 * np.arange(n)) % 4
        )
        same_all = phi_mod4_is_swap and sm.power(1) % 4 == 3
        for name, m in (("alpha", trio.alpha), ("beta", trio.beta), ("gamma", trio.gamma)):
            pm = np.array([m.power(v) % d for v in range(n)])
            if name == "alpha" or same_all:
                assert np.array_equal(pm, pphi), f"{name} must keep the power function"
            else:
                want = pphi.copy()
                odd = np.arange(n) % 2 == 1
                want[odd] = (want[odd] + d // 2) % d
                assert np.array_equal(pm, want), \
                    f"{name} must shift the power function by ord/2 on odds"


def check_tp_census(census: Census, prev: Census, e: int) -> None:
    for i in range(len(census)):
        sm = census.entry(i)
        check_tp_2basic(sm, e)
        check_tp_2power(sm)
        check_tp_half(sm)
    check_tp_actions(census)
    check_tp_max4(census, prev, e)
    check_tp_samesame(census)
    check_tp_four(census)
