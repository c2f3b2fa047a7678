"""The central data type: a validated skew morphism of Z_n.

A skew morphism is a permutation phi of Z_n fixing 0 such that for every x
there is an exponent i_x with phi(x + y) = phi(x) + phi^{i_x}(y) for all y.
Construction through :func:`try_from_images` is eager and total: order, power
function and kernel index are computed and the defining identity is fully
verified before an instance exists. Instances are immutable and safe to share
across threads.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import gcd

import numpy as np

from . import _kernels

__all__ = [
    "SkewMorphism",
    "PowerFunction",
    "try_from_images",
    "SkewMorphismError",
    "ValidationError",
    "NotAPermutation",
    "DoesNotFixZero",
    "NoPowerExponent",
    "OrbitOrderMismatch",
    "NotWellDefined",
    "SubgroupNotPreserved",
    "InternalInvariantBroken",
]


class SkewMorphismError(Exception):
    """Base class for all skew morphism errors."""


class ValidationError(SkewMorphismError):
    """A candidate image array is not a skew morphism."""


class NotAPermutation(ValidationError):
    pass


class DoesNotFixZero(ValidationError):
    pass


class NoPowerExponent(ValidationError):
    """No exponent i works for the witness x in the defining identity."""

    def __init__(self, witness: int):
        super().__init__(f"no power exponent exists for x = {witness}")
        self.witness = witness


class OrbitOrderMismatch(ValidationError):
    """phi^d is not the identity for d = orbit length of 1."""


class NotWellDefined(SkewMorphismError):
    """Reduction modulo m is not well defined; (x, y) is a witness pair."""

    def __init__(self, x: int, y: int, m: int):
        super().__init__(
            f"reduction mod {m} not well defined: x = {x} and y = {y} are "
            f"congruent but their images are not"
        )
        self.x = x
        self.y = y


class SubgroupNotPreserved(SkewMorphismError):
    """The subgroup is not preserved set-wise; witness maps outside it."""

    def __init__(self, witness: int, g: int):
        super().__init__(f"subgroup <{g}> not preserved: witness x = {witness}")
        self.witness = witness


class InternalInvariantBroken(SkewMorphismError):
    """A construction that is guaranteed valid failed validation: core bug."""


@dataclass(frozen=True)
class PowerFunction:
    """The power function pi on one period: pi(x) = values[x mod period].

    Values are stored in {1, ..., order}; values[0] == 1 always (0 is in the
    kernel), and the identity morphism has all values equal to 1.
    """

    period: int
    values: tuple[int, ...]
    order: int

    def __call__(self, x: int) -> int:
        return self.values[x % self.period]

    def __len__(self) -> int:
        return self.period


_CODE_TO_ERROR = {
    _kernels.NOT_A_PERMUTATION: NotAPermutation,
    _kernels.DOES_NOT_FIX_ZERO: DoesNotFixZero,
    _kernels.ORBIT_ORDER_MISMATCH: OrbitOrderMismatch,
}


class SkewMorphism:
    """A validated skew morphism of Z_n (immutable)."""

    __slots__ = ("_n", "_images", "_order", "_kernel_index", "_power", "_derived")

    def __init__(self, *_args, **_kwargs):
        raise TypeError("use try_from_images, identity or automorphism")

    @classmethod
    def _build(cls, n: int, images: np.ndarray, order: int, kernel_index: int,
               pi_values: tuple[int, ...]) -> "SkewMorphism":
        self = object.__new__(cls)
        arr = np.ascontiguousarray(images, dtype=np.int64)
        arr.setflags(write=False)
        object.__setattr__(self, "_n", n)
        object.__setattr__(self, "_images", arr)
        object.__setattr__(self, "_order", order)
        object.__setattr__(self, "_kernel_index", kernel_index)
        object.__setattr__(self, "_power",
                           PowerFunction(kernel_index, pi_values, order))
        object.__setattr__(self, "_derived", None)
        return self

    def __setattr__(self, name, value):
        raise AttributeError("SkewMorphism is immutable")

    # -- constructors ------------------------------------------------------

    @classmethod
    def identity(cls, n: int) -> "SkewMorphism":
        return try_from_images(n, np.arange(n))

    @classmethod
    def automorphism(cls, n: int, t: int) -> "SkewMorphism":
        """The automorphism x -> t*x of Z_n; t must be a unit."""
        if gcd(t % n if n > 1 else 1, n) != 1:
            raise ValueError(f"{t} is not a unit mod {n}")
        return try_from_images(n, (t * np.arange(n, dtype=np.int64)) % n)

    # -- basic accessors ---------------------------------------------------

    @property
    def n(self) -> int:
        return self._n

    @property
    def modulus(self) -> int:
        return self._n

    @property
    def order(self) -> int:
        """ord(phi): the length of the orbit of 1, cached at construction."""
        return self._order

    @property
    def kernel_index(self) -> int:
        """k with ker(phi) = <k>; the kernel has n/k elements."""
        return self._kernel_index

    @property
    def power(self) -> PowerFunction:
        return self._power

    @property
    def images(self) -> tuple[int, ...]:
        return tuple(int(v) for v in self._images)

    @property
    def images_array(self) -> np.ndarray:
        """Read-only int64 view of the image array."""
        return self._images

    def __call__(self, x: int) -> int:
        return int(self._images[x % self._n])

    def __eq__(self, other) -> bool:
        if not isinstance(other, SkewMorphism):
            return NotImplemented
        return self._n == other._n and np.array_equal(self._images, other._images)

    def __hash__(self) -> int:
        return hash((self._n, self._images.tobytes()))

    def __repr__(self) -> str:
        if self._n <= 16:
            body = " ".join(str(int(v)) for v in self._images)
            return f"SkewMorphism(n={self._n}, order={self._order}, images=[{body}])"
        return f"SkewMorphism(n={self._n}, order={self._order})"

    # -- operations --------------------------------------------------------

    def apply_power(self, i: int, x: int) -> int:
        """phi^i(x) with i taken mod ord(phi); negative i allowed."""
        i = i % self._order
        cur = x % self._n
        for _ in range(i):
            cur = int(self._images[cur])
        return cur

    def orbit_of(self, x: int) -> tuple[int, ...]:
        """The <phi>-orbit of x as a cyclic sequence starting at x."""
        x = x % self._n
        out = [x]
        cur = int(self._images[x])
        while cur != x:
            out.append(cur)
            cur = int(self._images[cur])
        return tuple(out)

    def sigma(self, r: int, x: int) -> int:
        """sigma(r, x) = pi(x) + pi(phi(x)) + ... + pi(phi^{r-1}(x)) mod ord."""
        if r < 0:
            raise ValueError("sigma requires r >= 0")
        d = self._order
        r = r % d
        total = 0
        cur = x % self._n
        for _ in range(r):
            total += self._power(cur)
            cur = int(self._images[cur])
        return total % d

    def derived(self) -> "SkewMorphism":
        """The derived skew morphism of Z_ord: x -> sigma(x, 1)."""
        if self._derived is not None:
            return self._derived
        d = self._order
        bar = np.zeros(d, dtype=np.int64)
        s = 0
        cur = 1 % self._n
        for x in range(1, d):
            s += self._power(cur)
            cur = int(self._images[cur])
            bar[x] = s % d
        try:
            result = try_from_images(d, bar)
        except ValidationError as exc:  # pragma: no cover - would be a core bug
            raise InternalInvariantBroken(f"derived morphism invalid: {exc}") from exc
        object.__setattr__(self, "_derived", result)
        return result

    def reduce_mod(self, m: int) -> "SkewMorphism":
        """phi taken modulo m (m | n), when well defined."""
        n = self._n
        if m < 1 or n % m != 0:
            raise ValueError(f"{m} does not divide {n}")
        if m == n:
            return self
        im = self._images
        rho = im[:m] % m
        table = (im % m).reshape(n // m, m)
        mism = table != rho[None, :]
        if mism.any():
            flat = int(np.argmax(mism))
            x = (flat // m) * m + flat % m
            raise NotWellDefined(x, x % m, m)
        try:
            return try_from_images(m, rho)
        except ValidationError as exc:  # pragma: no cover - would be a core bug
            raise InternalInvariantBroken(f"reduction mod {m} invalid: {exc}") from exc

    def restrict(self, g: int) -> "SkewMorphism":
        """The restriction to <g> as a skew morphism of Z_{n/g} (g | n)."""
        n = self._n
        if g < 1 or n % g != 0:
            raise ValueError(f"{g} does not divide {n}")
        sub = self._images[::g]
        offender = sub % g
        if offender.any():
            witness = g * int(np.argmax(offender != 0))
            raise SubgroupNotPreserved(witness, g)
        try:
            return try_from_images(n // g, sub // g)
        except ValidationError as exc:
            raise InternalInvariantBroken(f"restriction to <{g}> invalid: {exc}") from exc

    def power_is_skew(self, r: int) -> bool:
        """Whether phi^r is itself a skew morphism, decided through the
        derived morphism: <r mod ord> must be preserved set-wise."""
        if r < 0:
            raise ValueError("power_is_skew requires r >= 0")
        d = self._order
        bar = self.derived()
        g = gcd(r, d)
        if g == d:
            return True
        for h in range(0, d, g):
            if bar(h) % g != 0:
                return False
        return True

    def is_automorphism(self) -> bool:
        return self._kernel_index == 1


def try_from_images(n: int, images) -> SkewMorphism:
    """Validate an image sequence and build the skew morphism it defines.

    Raises NotAPermutation, DoesNotFixZero, NoPowerExponent (with the witness
    x) or OrbitOrderMismatch when the candidate fails.
    """
    if n < 1:
        raise ValueError(f"modulus must be >= 1, got {n}")
    arr = np.ascontiguousarray(images, dtype=np.int64)
    if arr.ndim != 1 or arr.shape[0] != n:
        raise ValueError(f"expected {n} images, got shape {arr.shape}")
    code, info, d, k, pi = _kernels.validate_images(arr)
    if code == _kernels.NO_POWER_EXPONENT:
        raise NoPowerExponent(info)
    if code != _kernels.OK:
        raise _CODE_TO_ERROR[code](f"invalid image array for Z_{n}")
    return SkewMorphism._build(n, arr, d, k, tuple(int(v) for v in pi))
