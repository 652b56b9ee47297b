"""
Cylinder measures, their Walsh spectra and the multiscale mass table.

A :class:`CylinderMeasure` at resolution N holds the masses of the 2**N
level-N cylinders; the density is constant on each cylinder.  Cylinder
``i`` at level N is the set of x whose first N coordinates spell ``i``
(coordinate 1 = least significant bit), so the level-m parent of ``i`` is
``i mod 2**m`` and its two children at level m+1 are ``c`` and ``c + 2**m``.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, List, Optional, Sequence

import numpy as np

from .errors import UsageError
from .group import CylinderId, check_levels


def _frozen(a: np.ndarray) -> np.ndarray:
    a = np.array(a, dtype=np.float64)
    a.setflags(write=False)
    return a


def levels_for_length(length: int) -> int:
    if length < 2 or length & (length - 1):
        raise UsageError(f"length must be a power of two >= 2, got {length}")
    return length.bit_length() - 1


@dataclass(frozen=True)
class CylinderMeasure:
    n_levels: int
    masses: np.ndarray = field(repr=False)

    def __post_init__(self):
        n = check_levels(self.n_levels)
        m = _frozen(self.masses)
        if m.ndim != 1 or m.size != 1 << n:
            raise UsageError(f"expected {1 << n} masses for resolution {n}, got shape {m.shape}")
        if not np.all(np.isfinite(m)):
            bad = int(np.flatnonzero(~np.isfinite(m))[0])
            raise UsageError(f"mass at index {bad} is not finite")
        if np.any(m < 0):
            bad = int(np.flatnonzero(m < 0)[0])
            raise UsageError(f"mass at index {bad} is negative ({m[bad]!r})")
        if not m.sum() > 0:
            raise UsageError("measure has zero total mass")
        object.__setattr__(self, "n_levels", n)
        object.__setattr__(self, "masses", m)

    @classmethod
    def from_masses(cls, masses) -> "CylinderMeasure":
        masses = np.asarray(masses, dtype=np.float64)
        return cls(levels_for_length(masses.size), masses)

    @property
    def size(self) -> int:
        return self.masses.size

    @property
    def total_mass(self) -> float:
        return float(self.masses.sum())

    @property
    def support_size(self) -> int:
        return int(np.count_nonzero(self.masses))

    def scaled(self, c: float) -> "CylinderMeasure":
        return CylinderMeasure(self.n_levels, self.masses * c)

    def cylinder_mass(self, c: CylinderId) -> float:
        if c.level > self.n_levels:
            raise UsageError("cylinder finer than the measure's resolution")
        return float(self.masses[c.index :: 1 << c.level].sum())

    def coarsen(self, level: int) -> "CylinderMeasure":
        """The same measure viewed at a coarser resolution."""
        if not 1 <= level <= self.n_levels:
            raise UsageError(f"cannot coarsen resolution {self.n_levels} to {level}")
        return CylinderMeasure(level, level_masses(self).masses[level])

    def __eq__(self, other):
        if not isinstance(other, CylinderMeasure):
            return NotImplemented
        return self.n_levels == other.n_levels and np.array_equal(self.masses, other.masses)

    __hash__ = None


@dataclass(frozen=True)
class WalshSpectrum:
    """coeffs[k] = integral of w_k against the measure, for k < 2**N."""

    n_levels: int
    coeffs: np.ndarray = field(repr=False)

    def __post_init__(self):
        object.__setattr__(self, "coeffs", _frozen(self.coeffs))

    def density(self) -> np.ndarray:
        """Density on each level-N cylinder, i.e. masses * 2**N."""
        return fwht(self.coeffs)


@dataclass(frozen=True)
class LevelMassTable:
    """Masses of every cylinder at every level 0..N plus the squared-mass sums.

    ``cross[m-1]`` holds T_{m-1} - T_m computed directly as twice the sum of
    products of sibling masses, which is free of cancellation.
    """

    n_levels: int
    masses: List[np.ndarray] = field(repr=False)
    square_sums: np.ndarray = field(repr=False)
    cross: np.ndarray = field(repr=False)

    def max_mass(self, level: int) -> float:
        return float(self.masses[level].max())

    def occupied(self, level: int) -> int:
        return int(np.count_nonzero(self.masses[level]))


def fwht(values) -> np.ndarray:
    """Fast Walsh-Hadamard transform, natural (Hadamard) ordering.

    ``out[k] = sum_i values[i] * (-1) ** popcount(i & k)``; applying it twice
    multiplies by the length.  Runs in O(N 2**N) with N butterfly stages.
    """
    a = np.array(values, dtype=np.float64)
    if a.ndim != 1:
        raise UsageError("fwht expects a 1-d array")
    n = levels_for_length(a.size) if a.size != 1 else 0
    h = 1
    for _ in range(n):
        v = a.reshape(-1, 2, h)
        lo = v[:, 0, :].copy()
        hi = v[:, 1, :]
        v[:, 0, :] += hi
        hi *= -1
        hi += lo
        h *= 2
    return a


def naive_wht(values) -> np.ndarray:
    """Direct O(4**N) evaluation of the same transform, for cross-checks."""
    from .group import walsh_matrix

    v = np.asarray(values, dtype=np.float64)
    w = walsh_matrix(levels_for_length(v.size)).astype(np.float64)
    return w @ v


def spectrum(mu: CylinderMeasure) -> WalshSpectrum:
    return WalshSpectrum(mu.n_levels, fwht(mu.masses))


def level_masses(mu: CylinderMeasure) -> LevelMassTable:
    levels = [mu.masses]
    cross = []
    a = mu.masses
    while a.size > 1:
        half = a.size // 2
        lo, hi = a[:half], a[half:]
        cross.append(2.0 * float(np.dot(lo, hi)))
        a = lo + hi
        levels.append(a)
    levels.reverse()
    cross.reverse()
    for lvl in levels:
        lvl.setflags(write=False)
    squares = np.array([float(np.dot(lvl, lvl)) for lvl in levels])
    return LevelMassTable(mu.n_levels, levels, squares, np.array(cross))


# ---------------------------------------------------------------- generators


def haar(n_levels: int) -> CylinderMeasure:
    n = check_levels(n_levels)
    return CylinderMeasure(n, np.full(1 << n, 2.0 ** -n))


def cylinder_uniform(c: CylinderId, n_levels: int, mass: float = 1.0) -> CylinderMeasure:
    """Uniform mass on one level-m cylinder."""
    n = check_levels(n_levels)
    if c.level > n:
        raise UsageError(f"cylinder level {c.level} exceeds resolution {n}")
    m = np.zeros(1 << n)
    cells = m[c.index :: 1 << c.level]
    m[c.index :: 1 << c.level] = mass / cells.size
    return CylinderMeasure(n, m)


def pattern_measure(zero_positions: Iterable[int], n_levels: int) -> CylinderMeasure:
    """Uniform measure on {x : x_j = 0 for j in zero_positions}.

    Positions are 1-based coordinates; those beyond N are ignored.
    """
    n = check_levels(n_levels)
    zeros = sorted({int(j) for j in zero_positions})
    if any(j < 1 for j in zeros):
        raise UsageError("coordinate positions are 1-based")
    idx = np.arange(1 << n, dtype=np.int64)
    forbidden = 0
    for j in zeros:
        if j <= n:
            forbidden |= 1 << (j - 1)
    ok = (idx & forbidden) == 0
    count = int(ok.sum())
    m = np.where(ok, 1.0 / count, 0.0)
    return CylinderMeasure(n, m)


def even_zero_pattern(n_levels: int) -> CylinderMeasure:
    """Mass on sequences vanishing at every even coordinate (dimension 1/2)."""
    return pattern_measure(range(2, n_levels + 1, 2), n_levels)


def third_zero_pattern(n_levels: int) -> CylinderMeasure:
    """Mass on sequences vanishing at every coordinate not divisible by 3 (dimension 1/3)."""
    return pattern_measure([j for j in range(1, n_levels + 1) if j % 3], n_levels)


def bernoulli_product(p: Sequence[float]) -> CylinderMeasure:
    """Product measure with P(x_j = 1) = p[j-1]."""
    p = np.asarray(p, dtype=np.float64)
    n = check_levels(p.size)
    if np.any((p < 0) | (p > 1)):
        raise UsageError("probabilities must lie in [0, 1]")
    m = np.ones(1)
    for j in range(n):
        m = np.concatenate([m * (1 - p[j]), m * p[j]])
    return CylinderMeasure(n, m)


def random_measure(seed: int, n_levels: int, sparsity: float = 0.0) -> CylinderMeasure:
    """Random masses from numpy's PCG64 generator, normalised to total mass 1.

    Each cell is empty with probability ``sparsity``; occupied cells get
    uniform(0, 1] weights.  At least one cell is always occupied.
    """
    n = check_levels(n_levels)
    if not 0.0 <= sparsity < 1.0:
        raise UsageError(f"sparsity must lie in [0, 1), got {sparsity}")
    rng = np.random.Generator(np.random.PCG64(seed))
    w = 1.0 - rng.random(1 << n)
    if sparsity > 0:
        keep = rng.random(1 << n) >= sparsity
        if not keep.any():
            keep[int(rng.integers(1 << n))] = True
        w = np.where(keep, w, 0.0)
    return CylinderMeasure(n, w / w.sum())
