"""Skew morphisms of cyclic 2-groups Z_{2^e}: the order-4 classification, the
small-order lifts, the companion construction, the existence lift, the
recursive census Skew(2^e) = 4*Skew(2^{e-1}) - 4, and the closed form
(7*4^{e-2} + 8)/6.

A "lift" of a skew morphism phi' of Z_{2^{e-1}} is a skew morphism of Z_{2^e}
equal to phi' when taken modulo 2^{e-1}. Every base has exactly four lifts,
except the identity and multiplication by 2^{e-2} - 1, which have two each;
the census recursion is built from these lift constructions and every
constructed morphism is re-validated from scratch.
"""

from __future__ import annotations

import threading
from dataclasses import dataclass

import numpy as np

from . import _kernels
from .arith import is_power_of_two
from .core import (
    InternalInvariantBroken,
    SkewMorphism,
    ValidationError,
    try_from_images,
)
from .enumerate import Census, Method

__all__ = [
    "DomainError",
    "OrderTooLarge",
    "OrderTooSmall",
    "BaseOrderTooSmall",
    "LiftNotFound",
    "CompanionTriple",
    "LiftRequest",
    "closed_form",
    "count_2e",
    "order4_skew_morphisms",
    "lifts_small",
    "companions",
    "lift_exi",
    "census_2e",
    "evict_census_2e",
]


class DomainError(ValueError):
    """Argument outside the stated domain of a closed formula."""


class OrderTooLarge(ValueError):
    """lifts_small requires a base of order at most 2."""


class OrderTooSmall(ValueError):
    """companions requires order at least 8."""


class BaseOrderTooSmall(ValueError):
    """lift_exi requires a base of order at least 4 (use lifts_small)."""


class LiftNotFound(InternalInvariantBroken):
    """The previous-level census lacks a morphism the construction needs;
    signals a broken census."""


def closed_form(e: int) -> int:
    """Skew(2^e) = (7*4^(e-2) + 8)/6, stated for e >= 3."""
    if e < 3:
        raise DomainError(f"closed form requires e >= 3, got {e}")
    num = 7 * 4 ** (e - 2) + 8
    assert num % 6 == 0
    return num // 6


def count_2e(e: int) -> int:
    """Skew(2^e) for any e >= 0 (hardcoded below the closed form's domain)."""
    if e < 0:
        raise DomainError(f"e must be >= 0, got {e}")
    if e <= 1:
        return 1
    if e == 2:
        return 2
    return closed_form(e)


# ---------------------------------------------------------------------------
# row-level constructions
# ---------------------------------------------------------------------------


def _mult_row(n: int, t: int) -> np.ndarray:
    return (t * np.arange(n, dtype=np.int64)) % n


def _order4_proper_rows(e: int) -> list[np.ndarray]:
    """The four proper order-4 morphisms: odd x shifted by 2^{e-2} (plus
    optionally 2^{e-1}), or sent through 1 + (2^{e-1}-2)(1+k)."""
    n = 1 << e
    q = 1 << (e - 2)
    half = 1 << (e - 1)
    x = np.arange(n, dtype=np.int64)
    odd = x % 2 == 1
    kk = x // 2
    body34_even = ((half - 2) * kk) % n
    body34_odd = (1 + (half - 2) * (1 + kk)) % n
    phi1 = np.where(odd, (x + q) % n, x)
    phi2 = np.where(odd, (x + q + half) % n, x)
    phi3 = np.where(odd, body34_odd, body34_even)
    phi4 = np.where(odd, (body34_odd + half) % n, body34_even)
    return [phi1, phi2, phi3, phi4]


def _small_lift_rows(t: int, e: int) -> list[np.ndarray]:
    """Rows of all lifts of the order <= 2 automorphism x -> t*x of
    Z_{2^{e-1}} to Z_{2^e}."""
    n = 1 << e
    half = 1 << (e - 1)
    t = t % half
    if t == 1 % half:
        return [_mult_row(n, 1), _mult_row(n, half + 1)]
    if e == 3:
        if t == 3:
            return [_mult_row(8, 3), _mult_row(8, 7)] + _order4_proper_rows(3)[:2]
        raise OrderTooLarge(f"x -> {t}x is not an order <= 2 base of Z_4")
    q = 1 << (e - 2)
    if t == q - 1:
        return [_mult_row(n, q - 1), _mult_row(n, half + q - 1)]
    phi = _order4_proper_rows(e)
    if t == q + 1:
        return [_mult_row(n, q + 1), _mult_row(n, half + q + 1), phi[0], phi[1]]
    if t == half - 1:
        return [_mult_row(n, half - 1), _mult_row(n, n - 1), phi[2], phi[3]]
    raise OrderTooLarge(f"x -> {t}x is not an order <= 2 base of Z_{half}")


def _orbit_of_one(row: np.ndarray) -> list[int]:
    if row.shape[0] == 1:
        return [0]
    orb = [1]
    cur = int(row[1])
    while cur != 1:
        orb.append(cur)
        cur = int(row[cur])
    return orb


def _power_value_at(row: np.ndarray, orbpos: dict[int, int], x: int) -> int:
    """pi(x) read off the y=1 relation phi(x+1) = phi(x) + phi^{pi(x)}(1)."""
    n = row.shape[0]
    diff = (int(row[(x + 1) % n]) - int(row[x])) % n
    return orbpos[diff]


def _lift_index(prev: Census) -> tuple[dict, dict]:
    """Lookup structures on the previous-level census: reduced-row bytes to
    its lexicographically first lift, and (psi(1), psi(2)) to row indices."""
    idx = getattr(prev, "_exi_index", None)
    if idx is None:
        quarter = prev.n // 2
        red = (prev.matrix[:, :quarter].astype(np.int64) % quarter)
        byred: dict[bytes, int] = {}
        byval: dict[tuple[int, int], list[int]] = {}
        for i in range(len(prev)):
            key = red[i].tobytes()
            if key not in byred:
                byred[key] = i
            byval.setdefault(
                (int(prev.matrix[i, 1]), int(prev.matrix[i, 2])), []
            ).append(i)
        idx = (byred, byval, red)
        prev._exi_index = idx
    return idx


def _exi_lift_row(base_row: np.ndarray, e: int, prev: Census, x1: int, x2: int) -> np.ndarray:
    """One lift row per the existence construction: phi(2k) = 2*psi(k) and
    phi(1+2k) = x1 + 2*psi^{pi'(1)}(k), where psi lives one level down and is
    selected through the restriction of the base to <2>."""
    n = 1 << e
    half = n >> 1
    quarter = n >> 2
    if x2 % 2 != 0:
        raise InternalInvariantBroken(f"x2 = {x2} must be even")
    psi_p = base_row[0::2] // 2  # restriction of the base to <2>, over Z_{quarter}
    ord_psi_p = len(_orbit_of_one(psi_p)) if quarter > 1 else 1

    orb = _orbit_of_one(base_row)
    orbpos = {v: i for i, v in enumerate(orb)}
    pi1 = _power_value_at(base_row, orbpos, 1)
    y1 = (x2 // 2) % half

    if ord_psi_p > 2:
        pi2 = _power_value_at(base_row, orbpos, 2)
        if pi2 % 4 != 1:
            raise InternalInvariantBroken(f"pi'(2) = {pi2} should be 1 mod 4")
        i = (pi2 - 1) // 4
        byred, byval, red = _lift_index(prev)
        key = psi_p.astype(np.int64).tobytes()
        j0 = byred.get(key)
        if j0 is None:
            raise LiftNotFound(f"no lift of the <2>-restriction in the Z_{half} census")
        psi0 = prev.matrix[j0].astype(np.int64)
        y2 = (y1 + int(_kernels.perm_power(psi0, 4 * i)[y1])) % half
        cands = [
            j for j in byval.get((y1, y2), ())
            if red[j].tobytes() == key
        ]
        if not cands:
            raise LiftNotFound(
                f"no morphism of Z_{half} with images ({y1}, {y2}) over the "
                f"required restriction"
            )
        if len(cands) > 1:
            raise InternalInvariantBroken("lift selection is not unique")
        psi = prev.matrix[cands[0]].astype(np.int64)
    else:
        psi = _mult_row(half, y1)

    psipow = _kernels.perm_power(psi, pi1)
    row = np.empty(n, dtype=np.int64)
    row[0::2] = 2 * psi
    row[1::2] = (x1 + 2 * psipow) % n
    return row


# ---------------------------------------------------------------------------
# public object-level operations
# ---------------------------------------------------------------------------


def order4_skew_morphisms(e: int) -> list[SkewMorphism]:
    """All eight order-4 skew morphisms of Z_{2^e} (e >= 4): the four
    automorphisms given by multiplication by 2^{e-2}+-1 and 2^{e-1}+2^{e-2}+-1,
    then the four proper ones."""
    if e < 4:
        raise DomainError(f"order-4 classification requires e >= 4, got {e}")
    n = 1 << e
    q = 1 << (e - 2)
    half = 1 << (e - 1)
    rows = [
        _mult_row(n, q - 1),
        _mult_row(n, q + 1),
        _mult_row(n, half + q - 1),
        _mult_row(n, half + q + 1),
    ] + _order4_proper_rows(e)
    out = [try_from_images(n, r) for r in rows]
    for sm in out:
        if sm.order != 4:
            raise InternalInvariantBroken(f"constructed morphism has order {sm.order}")
    return out


def lifts_small(base: SkewMorphism, e: int) -> list[SkewMorphism]:
    """All lifts of an order <= 2 base of Z_{2^{e-1}} to Z_{2^e}: two for the
    identity and for multiplication by 2^{e-2}-1, four otherwise."""
    if base.order > 2:
        raise OrderTooLarge(f"base has order {base.order} > 2")
    if e < 2 or base.n != 1 << (e - 1):
        raise ValueError(f"base must live on Z_{1 << (e - 1)} for e = {e}")
    rows = _small_lift_rows(int(base.images_array[1]) if base.n > 1 else 1, e)
    out = [try_from_images(1 << e, r) for r in rows]
    for sm in out:
        if sm.reduce_mod(base.n) != base:
            raise InternalInvariantBroken("small lift does not reduce to its base")
    return out


@dataclass(frozen=True)
class CompanionTriple:
    """The three companions of a lift, each of the same order; alpha adds
    2^{e-1} on residue classes {1,3} mod 4, beta on {2,3}, gamma on {1,2}."""

    alpha: SkewMorphism
    beta: SkewMorphism
    gamma: SkewMorphism


def companions(phi: SkewMorphism) -> CompanionTriple:
    """The companions of a skew morphism of Z_{2^e} of order >= 8."""
    if not is_power_of_two(phi.n):
        raise ValueError(f"companions require a cyclic 2-group, got Z_{phi.n}")
    if phi.order < 8:
        raise OrderTooSmall(f"companions require order >= 8, got {phi.order}")
    n = phi.n
    half = n // 2
    im = phi.images_array
    cls = np.arange(n) % 4
    out = []
    for toggled in ((1, 3), (2, 3), (1, 2)):
        mask = (cls == toggled[0]) | (cls == toggled[1])
        row = np.where(mask, (im + half) % n, im)
        try:
            sm = try_from_images(n, row)
        except ValidationError as exc:  # pragma: no cover - paper-proved valid
            raise InternalInvariantBroken(f"companion failed validation: {exc}") from exc
        if sm.order != phi.order:
            raise InternalInvariantBroken("companion changed the order")
        out.append(sm)
    return CompanionTriple(*out)


@dataclass(frozen=True)
class LiftRequest:
    """A lift target: a base morphism of Z_{2^{e-1}} plus the chosen images
    x1 = phi(1), x2 = phi(2) in Z_{2^e}, congruent to the base's images."""

    base: SkewMorphism
    x1: int
    x2: int

    def __post_init__(self):
        half = self.base.n
        if not is_power_of_two(half) or half < 2:
            raise ValueError(f"base modulus {half} is not 2^(e-1) with e >= 2")
        n = 2 * half
        if not (0 <= self.x1 < n and 0 <= self.x2 < n):
            raise ValueError("x1, x2 must be residues of the doubled modulus")
        if self.x1 % half != self.base(1) % half:
            raise ValueError(f"x1 = {self.x1} is not congruent to base(1)")
        if self.x2 % half != self.base(2) % half:
            raise ValueError(f"x2 = {self.x2} is not congruent to base(2)")

    @property
    def e(self) -> int:
        return self.base.n.bit_length()


def lift_exi(request: LiftRequest, prev_census: Census) -> SkewMorphism:
    """The unique lift phi with phi(1) = x1, phi(2) = x2 of a base of order
    at least 4, built by the existence construction."""
    base = request.base
    if base.order < 4:
        raise BaseOrderTooSmall(f"base has order {base.order}; use lifts_small")
    if prev_census.n != base.n:
        raise ValueError("prev_census modulus does not match the base")
    e = request.e
    row = _exi_lift_row(base.images_array.astype(np.int64), e, prev_census,
                        request.x1, request.x2)
    try:
        sm = try_from_images(1 << e, row)
    except ValidationError as exc:
        raise InternalInvariantBroken(f"existence lift failed validation: {exc}") from exc
    if sm(1) != request.x1 or sm(2) != request.x2:
        raise InternalInvariantBroken("existence lift missed its target images")
    if sm.reduce_mod(base.n) != base:
        raise InternalInvariantBroken("existence lift does not reduce to its base")
    return sm


# ---------------------------------------------------------------------------
# the recursive census
# ---------------------------------------------------------------------------

_LEVEL_CACHE: dict[int, Census] = {}
_LEVEL_LOCK = threading.Lock()


def evict_census_2e(e: int) -> None:
    """Drop a cached level (the big e=9/10 matrices are worth reclaiming)."""
    with _LEVEL_LOCK:
        _LEVEL_CACHE.pop(e, None)


def census_2e(e: int) -> Census:
    """The complete census of Z_{2^e}: brute force for e <= 3, else one lift
    construction per base of the previous level, re-validated and counted
    against the recursion 4*Skew(2^{e-1}) - 4."""
    if e < 0:
        raise DomainError(f"e must be >= 0, got {e}")
    with _LEVEL_LOCK:
        hit = _LEVEL_CACHE.get(e)
    if hit is not None:
        return hit
    n = 1 << e
    if e <= 3:
        rows = _kernels.oracle_rows(n)
        census = Census(n, np.unique(rows.astype(np.int32), axis=0), Method.ORACLE)
    else:
        prev = census_2e(e - 1)
        half = n >> 1
        rows = []
        for i in range(len(prev)):
            base_row = prev.matrix[i].astype(np.int64)
            if int(prev.orders[i]) <= 2:
                rows.extend(_small_lift_rows(int(base_row[1]), e))
            else:
                b1 = int(base_row[1])
                b2 = int(base_row[2])
                for x2 in (b2, b2 + half):
                    for x1 in (b1, b1 + half):
                        rows.append(_exi_lift_row(base_row, e, prev, x1, x2))
        expected = 4 * len(prev) - 4
        if len(rows) != expected:
            raise InternalInvariantBroken(
                f"built {len(rows)} lifts at e = {e}, recursion expects {expected}"
            )
        mat = np.stack(rows)
        rows.clear()
        codes, orders, kindices = _kernels.validate_rows(mat)
        if np.any(codes != 0):
            bad = int(np.argmax(codes != 0))
            raise InternalInvariantBroken(
                f"lift row {bad} at e = {e} failed validation (code {int(codes[bad])})"
            )
        mat32 = mat.astype(np.int32)
        del mat
        matrix, first = np.unique(mat32, axis=0, return_index=True)
        if matrix.shape[0] != expected:
            raise InternalInvariantBroken(
                f"duplicate lifts at e = {e}: {matrix.shape[0]} unique of {expected}"
            )
        census = Census(n, matrix, Method.TWOPOWER,
                        orders=orders[first].astype(np.int32),
                        kernel_indices=kindices[first].astype(np.int32))
    with _LEVEL_LOCK:
        _LEVEL_CACHE[e] = census
    return census
