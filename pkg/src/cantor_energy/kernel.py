"""
The s-kernel on the dyadic group, its truncations and Walsh-Fourier
coefficients.

The kernel is radial: it equals ``2**(s*(m-1))`` on the shell ``K_m^2`` of
elements whose first nonzero coordinate is ``m``, and 0 at the origin.  The
truncation at level ``n`` caps it at ``2**(n*s)`` inside ``G_n``.

Because ``w_k`` is +1 on ``G_m``, -1 on ``K_m^2`` and integrates to zero over
every other coset of ``G_{m-1}`` (for ``k`` in the dyadic block
``[2**(m-1), 2**m)``), every coefficient reduces to

    hat(k) = int_{G_m} kernel - 2**((m-1)*s - m)

with ``m = k.bit_length()``.  ``hat(0)`` is the total integral.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import UsageError
from .group import GroupElement, check_levels, shell_level


def check_exponent(s) -> float:
    s = float(s)
    if not (0.0 < s < 1.0):
        raise UsageError(f"kernel exponent s must lie strictly inside (0, 1), got {s}")
    return s


def check_truncation(n) -> Optional[int]:
    if n is None:
        return None
    if isinstance(n, bool) or not isinstance(n, (int, np.integer)) or n < 1:
        raise UsageError(f"truncation level must be an integer >= 1, got {n!r}")
    return int(n)


def exp2(e: float) -> float:
    return 2.0 ** e


@dataclass(frozen=True)
class KernelSpec:
    s: float
    truncation: Optional[int] = None

    def __post_init__(self):
        object.__setattr__(self, "s", check_exponent(self.s))
        object.__setattr__(self, "truncation", check_truncation(self.truncation))

    def shell_value(self, m: int) -> float:
        """Kernel value on the shell K_m^2 (m >= 1)."""
        if m < 1:
            raise UsageError("shell levels start at 1")
        n = self.truncation
        if n is not None and m > n:
            return exp2(n * self.s)
        return exp2(self.s * (m - 1))

    def value(self, z: GroupElement) -> float:
        return kernel_value(self, z)

    def coefficient(self, k: int) -> float:
        if self.truncation is None:
            return full_coefficient(self.s, k)
        return truncated_coefficient(self.s, self.truncation, k)


def kernel_value(spec: KernelSpec, z: GroupElement) -> float:
    m = shell_level(z)
    if m is None:
        return 0.0
    return spec.shell_value(m)


def _one_minus_ratio(s: float) -> float:
    # 1 - 2**(s-1), accurate as s -> 1
    return -math.expm1((s - 1.0) * math.log(2.0))


def subgroup_integral(s: float, m: int, truncation: Optional[int] = None) -> float:
    """Integral of the (possibly truncated) kernel over G_m w.r.t. Haar measure.

    Untruncated: the geometric tail sum_{j>m} 2**((j-1)s - j)
    = 2**(m*s - m - 1) / (1 - 2**(s-1)).
    Truncated at n: shells m+1..n keep their values and G_n carries the cap
    2**(n*s) on mass 2**-n; if m >= n the whole of G_m sits under the cap.
    """
    s = check_exponent(s)
    if m < 0:
        raise UsageError("subgroup level must be >= 0")
    n = check_truncation(truncation)
    if n is None:
        return exp2(m * s - m - 1) / _one_minus_ratio(s)
    if m >= n:
        return exp2(n * s - m)
    terms = [exp2((j - 1) * s - j) for j in range(n, m, -1)]
    terms.append(exp2(n * (s - 1)))
    return math.fsum(terms)


def _block_coefficient(s: float, m: int, truncation: Optional[int]) -> float:
    if m == 0:
        return subgroup_integral(s, 0, truncation)
    n = truncation
    if n is not None:
        if m > n:
            return 0.0
        if m == n:
            return exp2(n * (s - 1)) * (1 - exp2(-s))
    return subgroup_integral(s, m, n) - exp2((m - 1) * s - m)


def _check_k(k) -> int:
    if isinstance(k, bool) or not isinstance(k, (int, np.integer)) or k < 0:
        raise UsageError(f"coefficient index must be a nonnegative integer, got {k!r}")
    return int(k)


def truncated_coefficient(s: float, n: int, k: int) -> float:
    """Walsh-Fourier coefficient of the kernel truncated at level n."""
    s = check_exponent(s)
    n = check_truncation(n)
    if n is None:
        raise UsageError("truncated_coefficient needs a truncation level")
    return _block_coefficient(s, _check_k(k).bit_length(), n)


def full_coefficient(s: float, k: int) -> float:
    """Walsh-Fourier coefficient of the untruncated kernel (the n -> inf limit)."""
    s = check_exponent(s)
    return _block_coefficient(s, _check_k(k).bit_length(), None)


def block_coefficients(s: float, n_levels: int, truncation: Optional[int] = None) -> np.ndarray:
    """Coefficient per dyadic block m = 0..N (block 0 is k = 0)."""
    s = check_exponent(s)
    n = check_levels(n_levels)
    t = check_truncation(truncation)
    return np.array([_block_coefficient(s, m, t) for m in range(n + 1)])


def coefficient_table(s: float, resolution, truncation: Optional[int] = None) -> np.ndarray:
    """All 2**N coefficients, entry k for k < 2**N."""
    n = resolution.n_levels if hasattr(resolution, "n_levels") else check_levels(resolution)
    blocks = block_coefficients(s, n, truncation)
    counts = [1] + [1 << (m - 1) for m in range(1, n + 1)]
    return np.repeat(blocks, counts)


def sampled_kernel(s: float, n_levels: int, truncation: Optional[int]) -> np.ndarray:
    """Kernel value on each level-N cylinder, sampled at one interior point.

    The sample point for cylinder ``i`` has coordinates 1..N spelling ``i``
    and x_{N+1} = 1, so the origin is never hit.  When the truncation level
    is at most N the kernel is constant on every level-N cylinder and the
    samples equal the cylinder averages.
    """
    spec = KernelSpec(s, truncation)
    n = check_levels(n_levels)
    if n + 1 > 30:
        raise UsageError("sampling resolution too large")
    return np.array([
        kernel_value(spec, GroupElement(i | (1 << n), n + 1)) for i in range(1 << n)
    ])


def quadrature_coefficients(s: float, truncation: int, n_levels: int) -> np.ndarray:
    """Brute-force coefficients 2**-N * sum_x kernel(x) w_k(x) for k < 2**N."""
    from .measure import fwht

    t = check_truncation(truncation)
    if t is None or t > n_levels:
        raise UsageError("quadrature is exact only for a truncation level <= N")
    return fwht(sampled_kernel(s, n_levels, t)) / float(1 << n_levels)
