"""
Finite-resolution arithmetic on the Cantor dyadic group.

An element of G is stored as an integer word holding its first ``N``
coordinates.  Coordinate ``x_j`` lives in bit ``j - 1`` (coordinate 1 is the
least significant bit), so that

* group addition is XOR,
* the level-``m`` cylinder containing ``x`` has index ``bits mod 2**m``,
* ``w_k(x) = (-1) ** popcount(k & bits)``.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator, Optional

import numpy as np

from .errors import UsageError

MAX_LEVELS = 30
DEFAULT_MAX_LEVELS = 24


@dataclass(frozen=True)
class Resolution:
    """Number of retained coordinates, 1 <= n_levels <= 30."""

    n_levels: int

    def __post_init__(self):
        check_levels(self.n_levels)

    @property
    def size(self) -> int:
        return 1 << self.n_levels


def check_levels(n: int) -> int:
    if isinstance(n, bool) or not isinstance(n, (int, np.integer)):
        raise UsageError(f"resolution must be an integer, got {n!r}")
    if not 1 <= n <= MAX_LEVELS:
        raise UsageError(f"resolution must lie in [1, {MAX_LEVELS}], got {n}")
    return int(n)


def _levels(resolution) -> int:
    if isinstance(resolution, Resolution):
        return resolution.n_levels
    return check_levels(resolution)


@dataclass(frozen=True)
class GroupElement:
    bits: int
    n_levels: int

    def __post_init__(self):
        check_levels(self.n_levels)
        if not 0 <= self.bits < (1 << self.n_levels):
            raise UsageError(
                f"element word {self.bits} does not fit in {self.n_levels} coordinates"
            )

    @classmethod
    def from_coordinates(cls, coords, n_levels: Optional[int] = None) -> "GroupElement":
        """Build an element from ``(x_1, x_2, ...)``; missing coordinates are 0."""
        coords = list(coords)
        n = len(coords) if n_levels is None else n_levels
        if len(coords) > n:
            raise UsageError("more coordinates than the resolution holds")
        bits = 0
        for j, c in enumerate(coords):
            if c not in (0, 1):
                raise UsageError(f"coordinate x_{j + 1} must be 0 or 1, got {c!r}")
            bits |= c << j
        return cls(bits, n)

    @classmethod
    def zero(cls, n_levels: int) -> "GroupElement":
        return cls(0, n_levels)

    def coordinate(self, j: int) -> int:
        """Coordinate x_j, 1-based (x_1 is the lowest bit)."""
        if not 1 <= j <= self.n_levels:
            raise UsageError(f"coordinate index {j} outside 1..{self.n_levels}")
        return (self.bits >> (j - 1)) & 1

    def coordinates(self) -> tuple:
        return tuple((self.bits >> j) & 1 for j in range(self.n_levels))

    def __add__(self, other: "GroupElement") -> "GroupElement":
        return add(self, other)

    def __neg__(self) -> "GroupElement":
        return self


@dataclass(frozen=True)
class CylinderId:
    """Level-``m`` cylinder (coset of G_m) identified by its first m coordinates."""

    level: int
    index: int

    def __post_init__(self):
        if self.level < 0 or self.level > MAX_LEVELS:
            raise UsageError(f"cylinder level {self.level} out of range")
        if not 0 <= self.index < (1 << self.level):
            raise UsageError(f"cylinder index {self.index} invalid at level {self.level}")

    @classmethod
    def containing(cls, x: GroupElement, level: int) -> "CylinderId":
        if level > x.n_levels:
            raise UsageError("cylinder level exceeds the element's resolution")
        return cls(level, x.bits & ((1 << level) - 1))

    @classmethod
    def subgroup(cls, level: int) -> "CylinderId":
        """G_m = K_m^1."""
        return cls(level, 0)

    @classmethod
    def first_shell(cls, level: int) -> "CylinderId":
        """K_m^2: first m - 1 coordinates zero and x_m = 1."""
        if level < 1:
            raise UsageError("K_m^2 needs m >= 1")
        return cls(level, 1 << (level - 1))

    def contains(self, x: GroupElement) -> bool:
        return self.level <= x.n_levels and (x.bits & ((1 << self.level) - 1)) == self.index

    def haar_measure(self) -> Fraction:
        return haar_measure(self.level)


def haar_measure(level: int) -> Fraction:
    """Normalised Haar measure of any level-m cylinder, exactly 2**-m."""
    return Fraction(1, 1 << level)


def _same(x: GroupElement, y: GroupElement) -> None:
    if x.n_levels != y.n_levels:
        raise UsageError(
            f"resolution mismatch: {x.n_levels} vs {y.n_levels} coordinates"
        )


def add(x: GroupElement, y: GroupElement) -> GroupElement:
    _same(x, y)
    return GroupElement(x.bits ^ y.bits, x.n_levels)


def bit_reverse(word: int, n_levels: int) -> int:
    return int(format(word, f"0{n_levels}b")[::-1], 2) if n_levels else 0


def metric(x: GroupElement, y: GroupElement) -> Fraction:
    """rho(x, y) = sum_i 2**-i |x_i - y_i| as an exact dyadic rational."""
    _same(x, y)
    n = x.n_levels
    return Fraction(bit_reverse(x.bits ^ y.bits, n), 1 << n)


def metric_numerators(z: np.ndarray, n_levels: int) -> np.ndarray:
    """Vectorised ``2**N * rho(z, 0)`` for an array of difference words.

    The result is an exact integer, so ``rho < 2**-n`` can be tested as
    ``numerator < 2**(N - n)`` without rounding.
    """
    z = np.asarray(z, dtype=np.int64)
    out = np.zeros_like(z)
    for j in range(n_levels):
        out |= ((z >> j) & 1) << (n_levels - 1 - j)
    return out


def shell_level(z: GroupElement) -> Optional[int]:
    """The n with z in K_n^2 (first nonzero coordinate), or None for z = 0."""
    if z.bits == 0:
        return None
    return (z.bits & -z.bits).bit_length()


def trailing_zero_table(n_levels: int) -> np.ndarray:
    """``table[z]`` = (shell level of z) - 1 for z > 0, and N for z = 0."""
    size = 1 << n_levels
    table = np.full(size, n_levels, dtype=np.int8)
    for j in range(n_levels):
        # words whose lowest set bit is bit j
        table[(1 << j)::(1 << (j + 1))] = j
    return table


def walsh(k: int, x: GroupElement) -> int:
    """w_k(x) = (-1) ** (sum_i k_i x_{i+1})."""
    if not 0 <= k < (1 << x.n_levels):
        raise UsageError(f"Walsh index {k} outside [0, 2**{x.n_levels})")
    return -1 if bin(k & x.bits).count("1") & 1 else 1


def walsh_matrix(n_levels: int) -> np.ndarray:
    """Dense ``W[k, i] = w_k(element i)``, for small resolutions only."""
    n = check_levels(n_levels)
    if n > 12:
        raise UsageError("walsh_matrix is limited to 12 levels")
    idx = np.arange(1 << n, dtype=np.int64)
    anded = idx[:, None] & idx[None, :]
    parity = np.zeros_like(anded)
    for j in range(n):
        parity ^= (anded >> j) & 1
    return (1 - 2 * parity).astype(np.int8)


def coset_members(c: CylinderId, resolution) -> Iterator[GroupElement]:
    """All elements at resolution N lying in the cylinder ``c``."""
    n = _levels(resolution)
    if c.level > n:
        raise UsageError(f"cylinder level {c.level} exceeds resolution {n}")
    step = 1 << c.level
    for high in range(1 << (n - c.level)):
        yield GroupElement(c.index + high * step, n)


def coset_words(c: CylinderId, resolution) -> np.ndarray:
    """Same as :func:`coset_members` but as an integer array of words."""
    n = _levels(resolution)
    if c.level > n:
        raise UsageError(f"cylinder level {c.level} exceeds resolution {n}")
    return c.index + (np.arange(1 << (n - c.level), dtype=np.int64) << c.level)


def cylinder_diameter(level: int, n_levels: Optional[int] = None) -> Fraction:
    """Diameter of a level-m cylinder under rho.

    At infinite resolution this is 2**-m; with N retained coordinates the
    tail beyond N is missing and the value is 2**-m - 2**-N.
    """
    if n_levels is None:
        return Fraction(1, 1 << level)
    if level > n_levels:
        raise UsageError("cylinder level exceeds resolution")
    return Fraction(1, 1 << level) - Fraction(1, 1 << n_levels)
