"""
s-potential and s-energy of cylinder measures.

Three routes compute the same energy:

* ``naive``: the full double sum over pairs of level-N cylinders, O(4**N);
* ``hierarchical``: pairs grouped by the level of their first differing
  coordinate, using the squared-mass sums of the level table, O(2**N);
* ``spectral``: kernel coefficients against squared Walsh coefficients of the
  measure, O(N 2**N).

For two cylinders whose words first differ at coordinate m, every pair of
points lies on shell m, so the kernel is constant there.  Inside one cylinder
the constant density makes the average kernel value exactly
``D = 2**N * int_{G_N} kernel``.  With these two facts all three routes are
exact for cylinder measures.
"""
from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Optional, Tuple

import numpy as np

from .errors import UsageError
from .group import trailing_zero_table
from .kernel import KernelSpec, block_coefficients, check_exponent, check_truncation, subgroup_integral
from .measure import CylinderMeasure, LevelMassTable, level_masses, spectrum

NAIVE_MAX_LEVELS = 14
METHODS = ("naive", "hierarchical", "spectral")

# rows x columns per kernel block in the naive sum
_NAIVE_BLOCK = 1 << 22


@dataclass(frozen=True)
class EnergyResult:
    value: float
    method: str
    s: float
    truncation: Optional[int]
    n_levels: int


@dataclass(frozen=True)
class PotentialField:
    n_levels: int
    s: float
    truncation: Optional[int]
    values: np.ndarray = field(repr=False)


def cell_averaged_kernel(s: float, n_levels: int, truncation: Optional[int] = None) -> Tuple[np.ndarray, float]:
    """Shell values for m = 1..N and the same-cylinder constant D."""
    spec = KernelSpec(s, truncation)
    shells = np.array([spec.shell_value(m) for m in range(1, n_levels + 1)])
    diag = 2.0 ** n_levels * subgroup_integral(spec.s, n_levels, spec.truncation)
    return shells, diag


def _check_truncation_fits(truncation, n_levels):
    t = check_truncation(truncation)
    if t is not None and t > n_levels:
        raise UsageError(f"truncation {t} exceeds the measure resolution {n_levels}")
    return t


def potential(mu: CylinderMeasure, s: float, truncation: Optional[int] = None) -> PotentialField:
    """Cylinder-averaged potential, one value per level-N cylinder.

    value[i] = sum_m shell_m * mass(sibling of i's level-m cylinder) + D * mass[i]
    """
    n = mu.n_levels
    t = _check_truncation_fits(truncation, n)
    shells, diag = cell_averaged_kernel(s, n, t)
    table = level_masses(mu)
    idx = np.arange(mu.size, dtype=np.int64)
    out = diag * mu.masses
    for m in range(n, 0, -1):
        sibling = (idx & ((1 << m) - 1)) ^ (1 << (m - 1))
        out = out + shells[m - 1] * table.masses[m][sibling]
    return PotentialField(n, check_exponent(s), t, out)


def kernel_matrix_rows(rows: np.ndarray, n_levels: int, shells: np.ndarray, diag: float,
                       lut: Optional[np.ndarray] = None) -> np.ndarray:
    """Kernel values between the given cylinders and every level-N cylinder."""
    if lut is None:
        lut = trailing_zero_table(n_levels)
    lookup = np.append(shells, diag)
    cols = np.arange(1 << n_levels, dtype=np.int64)
    return lookup[lut[rows[:, None] ^ cols[None, :]]]


def naive_energies(masses: np.ndarray, n_levels: int, s: float,
                   truncation: Optional[int] = None, threads: int = 1) -> np.ndarray:
    """Pairwise double sum for a batch of measures (columns of ``masses``).

    Rows are processed in fixed-size blocks whose partial sums are combined
    in block order, so the result does not depend on ``threads``.
    """
    if n_levels > NAIVE_MAX_LEVELS:
        raise UsageError(
            f"naive energy is O(4**N) and capped at N = {NAIVE_MAX_LEVELS}; "
            "use the hierarchical or spectral method"
        )
    t = _check_truncation_fits(truncation, n_levels)
    shells, diag = cell_averaged_kernel(s, n_levels, t)
    m = np.asarray(masses, dtype=np.float64)
    if m.ndim == 1:
        m = m[:, None]
    size = 1 << n_levels
    if m.shape[0] != size:
        raise UsageError("mass vectors do not match the resolution")
    lut = trailing_zero_table(n_levels)
    step = max(1, _NAIVE_BLOCK // size)
    starts = list(range(0, size, step))

    def block(start):
        rows = np.arange(start, min(start + step, size), dtype=np.int64)
        k = kernel_matrix_rows(rows, n_levels, shells, diag, lut)
        return np.einsum("rb,rb->b", m[rows], k @ m)

    if threads > 1 and len(starts) > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            partials = list(pool.map(block, starts))
    else:
        partials = [block(start) for start in starts]
    partials = np.array(partials)
    return np.array([math.fsum(partials[:, b]) for b in range(m.shape[1])])


def energy_naive(mu: CylinderMeasure, s: float, truncation: Optional[int] = None,
                 threads: int = 1) -> EnergyResult:
    value = naive_energies(mu.masses, mu.n_levels, s, truncation, threads)[0]
    return EnergyResult(float(value), "naive", check_exponent(s), check_truncation(truncation), mu.n_levels)


def hierarchical_from_table(table: LevelMassTable, s: float, truncation: Optional[int] = None) -> float:
    """Energy from the level table in O(N): sum_m shell_m (T_{m-1} - T_m) + D T_N."""
    n = table.n_levels
    shells, diag = cell_averaged_kernel(s, n, truncation)
    terms = list(shells * table.cross)
    terms.append(diag * table.square_sums[n])
    return math.fsum(terms)


def energy_hierarchical(mu: CylinderMeasure, s: float, truncation: Optional[int] = None,
                        table: Optional[LevelMassTable] = None) -> EnergyResult:
    t = _check_truncation_fits(truncation, mu.n_levels)
    if table is None:
        table = level_masses(mu)
    value = hierarchical_from_table(table, s, t)
    return EnergyResult(value, "hierarchical", check_exponent(s), t, mu.n_levels)


def block_square_sums(coeffs: np.ndarray) -> np.ndarray:
    """Sum of coeffs[k]**2 over each dyadic block, block 0 being k = 0."""
    sq = np.square(coeffs)
    n = coeffs.size.bit_length() - 1
    sums = [float(sq[0])]
    for m in range(1, n + 1):
        sums.append(float(np.sum(sq[1 << (m - 1): 1 << m])))
    return np.array(sums)


def energy_spectral(mu: CylinderMeasure, s: float, truncation: Optional[int] = None) -> EnergyResult:
    """Sum over k < 2**N of kernel coefficient times squared Walsh coefficient.

    Coefficients are constant on dyadic blocks, so the squares are summed per
    block first and the N + 1 products combined with ``math.fsum``.
    """
    n = mu.n_levels
    t = _check_truncation_fits(truncation, n)
    blocks = block_coefficients(s, n, t)
    squares = block_square_sums(spectrum(mu).coeffs)
    value = math.fsum(blocks * squares)
    return EnergyResult(value, "spectral", check_exponent(s), t, n)


def energy(mu: CylinderMeasure, s: float, truncation: Optional[int] = None,
           method: str = "hierarchical", threads: int = 1) -> EnergyResult:
    if method == "naive":
        return energy_naive(mu, s, truncation, threads)
    if method == "hierarchical":
        return energy_hierarchical(mu, s, truncation)
    if method == "spectral":
        return energy_spectral(mu, s, truncation)
    raise UsageError(f"unknown energy method {method!r}; choose from {METHODS}")


def relative_deviation(values) -> float:
    """Largest pairwise |a - b| / max(|a|, |b|)."""
    vals = [float(v) for v in values]
    worst = 0.0
    for i, a in enumerate(vals):
        for b in vals[i + 1:]:
            scale = max(abs(a), abs(b))
            if scale > 0:
                worst = max(worst, abs(a - b) / scale)
    return worst
