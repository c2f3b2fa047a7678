"""Elementary number theory shared by the rest of the package.

All residue arithmetic works on canonical representatives 0..n-1, and every
function here is a pure function of its integer arguments (Python ints, so no
overflow concerns up to and far beyond n = 2**20).
"""

from __future__ import annotations

from math import gcd, isqrt

__all__ = ["totient", "divisors", "is_phi_coprime", "sqrt_units_mod_2e", "gcd"]


def totient(n: int) -> int:
    """Euler's totient: the number of units of Z_n. totient(1) == 1."""
    if n < 1:
        raise ValueError(f"totient requires n >= 1, got {n}")
    result = n
    m = n
    p = 2
    while p * p <= m:
        if m % p == 0:
            while m % p == 0:
                m //= p
            result -= result // p
        p += 1 if p == 2 else 2
    if m > 1:
        result -= result // m
    return result


def divisors(n: int) -> list[int]:
    """All divisors of n in ascending order."""
    if n < 1:
        raise ValueError(f"divisors requires n >= 1, got {n}")
    small = []
    large = []
    for d in range(1, isqrt(n) + 1):
        if n % d == 0:
            small.append(d)
            if d != n // d:
                large.append(n // d)
    return small + large[::-1]


def is_phi_coprime(n: int, m: int) -> bool:
    """True iff gcd(n,m) = gcd(n, totient(m)) = gcd(totient(n), m) = 1."""
    if n < 1 or m < 1:
        raise ValueError("is_phi_coprime requires positive arguments")
    return (
        gcd(n, m) == 1
        and gcd(n, totient(m)) == 1
        and gcd(totient(n), m) == 1
    )


def sqrt_units_mod_2e(e: int) -> set[int]:
    """The square roots of unity modulo 2**e.

    {1} for e = 1, {1, 3} for e = 2, and the four residues
    {1, 2**(e-1) - 1, 2**(e-1) + 1, 2**e - 1} for e >= 3.
    """
    if e < 1:
        raise ValueError(f"sqrt_units_mod_2e requires e >= 1, got {e}")
    if e == 1:
        return {1}
    if e == 2:
        return {1, 3}
    half = 1 << (e - 1)
    return {1, half - 1, half + 1, (1 << e) - 1}


def is_power_of_two(n: int) -> bool:
    return n >= 1 and (n & (n - 1)) == 0
