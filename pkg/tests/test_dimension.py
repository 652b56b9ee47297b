import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from cantor_energy.dimension import (
    BOUNDED,
    DIVERGENT,
    INCONCLUSIVE,
    box_counting_dim,
    classify_s,
    dim_lower_bound,
    energy_profile,
    fourier_series_check,
    scaling_diagnostic,
)
from cantor_energy.energy import energy_spectral
from cantor_energy.errors import InconclusiveError, UsageError
from cantor_energy.group import CylinderId
from cantor_energy.kernel import full_coefficient
from cantor_energy.measure import (
    cylinder_uniform,
    even_zero_pattern,
    haar,
    level_masses,
    random_measure,
    spectrum,
)

from conftest import generator_measures


@pytest.fixture(scope="module")
def even20():
    return level_masses(even_zero_pattern(20))


def test_profile_matches_truncated_spectral_energies():
    mu = random_measure(3, 10, 0.4)
    prof = energy_profile(mu, 0.55)
    expected = [energy_spectral(mu, 0.55, n).value for n in range(1, 11)]
    assert np.allclose(prof.values, expected, rtol=1e-12)


@pytest.mark.parametrize("name", list(generator_measures(6)))
def test_profile_is_nondecreasing_and_increments_are_exact(name):
    mu = generator_measures(10)[name]
    for s in (0.2, 0.5, 0.9):
        prof = energy_profile(mu, s)
        assert np.all(np.diff(prof.values) >= -1e-14 * prof.values[1:])
        assert np.allclose(np.diff(prof.values), prof.increments, rtol=1e-9, atol=1e-14)


def test_profile_haar_converges():
    prof = energy_profile(haar(20), 0.5)
    assert prof.values[-1] == pytest.approx(full_coefficient(0.5, 0), rel=1e-3)
    assert prof.growth_ratio == pytest.approx(1.0, abs=1e-3)
    assert prof.increment_ratio == pytest.approx(2 ** -0.5, rel=1e-12)


def test_profile_single_cylinder_grows_like_two_to_the_s():
    mass = 0.75
    mu = cylinder_uniform(CylinderId(12, 77), 12, mass=mass)
    s = 0.3
    prof = energy_profile(mu, s)
    n = np.arange(1, 13)
    assert np.allclose(prof.values, 2.0 ** (n * s) * mass ** 2, rtol=1e-13)
    assert prof.growth_ratio == pytest.approx(2 ** s, rel=1e-12)


def test_profile_even_pattern_growth(even20):
    low, high = energy_profile(even20, 0.4), energy_profile(even20, 0.6)
    assert high.growth_ratio > 1.03
    assert high.growth_ratio > low.growth_ratio
    assert low.increment_ratio < 1 < high.increment_ratio


def test_classify_examples(even20):
    assert classify_s(haar(12), 0.5).verdict == BOUNDED
    assert classify_s(even20, 0.75).verdict == DIVERGENT
    assert classify_s(even20, 0.4).verdict == BOUNDED
    assert classify_s(even20, 0.5, window=2).verdict == INCONCLUSIVE
    # critical exponent: increments do not decay, so the energy is not shown to converge
    assert classify_s(even20, 0.5).verdict == DIVERGENT


def test_classify_rejects_bad_thresholds():
    with pytest.raises(UsageError):
        classify_s(haar(6), 0.5, eps_bounded=-1)
    with pytest.raises(UsageError):
        classify_s(haar(6), 0.5, eps_fit=0)


@given(st.sampled_from(sorted(generator_measures(4))), st.floats(0.01, 0.99), st.floats(0.01, 0.99))
@settings(max_examples=60, deadline=None)
def test_verdicts_monotone_in_s(name, s1, s2):
    s1, s2 = sorted((s1, s2))
    mu = generator_measures(14)[name]
    if classify_s(mu, s1).verdict == DIVERGENT:
        assert classify_s(mu, s2).verdict != BOUNDED


@pytest.mark.parametrize("mu, lo, hi", [
    (haar(20), 0.95, 1.0),
    (even_zero_pattern(20), 0.45, 0.55),
    (cylinder_uniform(CylinderId(20, 12345), 20), 0.0, 0.05),
])
def test_dim_lower_bound_examples(mu, lo, hi):
    est = dim_lower_bound(mu)
    assert est.resolved
    assert lo <= est.lower_bound <= hi
    assert est.bracket[1] - est.bracket[0] <= 2 ** -6
    assert est.lower_bound == pytest.approx(sum(est.bracket) / 2)


@pytest.mark.parametrize("name", ["haar", "even", "third", "pattern", "bernoulli", "random", "point"])
def test_bracket_invariant_and_sandwich(name):
    mu = generator_measures(18)[name]
    table = level_masses(mu)
    est = dim_lower_bound(table, tol=2 ** -8)
    lo, hi = est.bracket
    if lo > 0:
        assert classify_s(table, lo).verdict == BOUNDED
    if hi < 1:
        assert classify_s(table, hi).verdict == DIVERGENT
    for v in est.diagnostics:
        if v.verdict == BOUNDED:
            assert v.s <= lo
        elif v.verdict == DIVERGENT:
            assert v.s >= hi
    assert est.lower_bound <= box_counting_dim(table) + 0.05


def test_dim_all_inconclusive_raises():
    with pytest.raises(InconclusiveError) as info:
        dim_lower_bound(random_measure(1, 10), window=2)
    assert info.value.diagnostics and all(d["verdict"] == INCONCLUSIVE for d in info.value.diagnostics)


def test_dim_tol_precondition():
    with pytest.raises(UsageError):
        dim_lower_bound(haar(8), tol=2 ** -11)


def test_dim_fine_tolerance_uses_ten_steps():
    est = dim_lower_bound(haar(16), tol=2 ** -10)
    assert len(est.diagnostics) == 10
    assert est.bracket[1] - est.bracket[0] == 2 ** -10


def test_scaling_diagnostic():
    s = 0.4
    d = scaling_diagnostic(haar(10), s)
    assert np.allclose(d.per_level, 2.0 ** (np.arange(11) * (s - 1)))
    point = scaling_diagnostic(cylinder_uniform(CylinderId(10, 3), 10), s)
    assert np.allclose(point.per_level, 2.0 ** (np.arange(11) * s))
    even = scaling_diagnostic(even_zero_pattern(16), 0.5)
    assert np.all(even.per_level >= 2 ** -0.5 - 1e-15) and np.all(even.per_level <= 1 + 1e-15)
    assert even.supremum == 1.0


def test_box_counting_examples():
    assert box_counting_dim(haar(12)) == 1.0
    assert box_counting_dim(even_zero_pattern(20)) == pytest.approx(0.5, abs=0.02)
    assert box_counting_dim(cylinder_uniform(CylinderId(12, 9), 12)) == 0.0
    with pytest.raises(UsageError):
        box_counting_dim(haar(5), n_min=5)


def test_fourier_check_haar_is_zero():
    fc = fourier_series_check(haar(8), 0.5)
    assert not fc.power_partial.any() and not fc.kernel_partial.any()


@pytest.mark.parametrize("name", list(generator_measures(6)))
def test_fourier_kernel_series_completes_the_energy(name):
    mu = generator_measures(10)[name]
    s = 0.45
    fc = fourier_series_check(mu, s)
    c0 = spectrum(mu).coeffs[0]
    total = fc.kernel_partial[-1] + full_coefficient(s, 0) * c0 ** 2
    assert total == pytest.approx(energy_spectral(mu, s).value, rel=1e-12)


def test_fourier_block_sums_converge_for_even_pattern():
    fc = fourier_series_check(even_zero_pattern(16), 0.4)
    kb = fc.block_kernel[4:]
    # only every other block carries spectrum; those shrink by 2^{2(s - 1/2)}
    kb = kb[kb > 0]
    assert np.allclose(kb[1:] / kb[:-1], 2 ** (2 * (0.4 - 0.5)), rtol=0.02)


def test_fourier_weight_ratio_bounded():
    for s in (0.25, 0.5, 0.75):
        fc = fourier_series_check(random_measure(2, 14), s)
        lo, hi = fc.weight_ratio_min[2:], fc.weight_ratio_max[2:]
        assert lo.min() > 0
        assert hi.max() / lo.min() < 2 ** (1 - s) * 1.5
        ok = ~np.isnan(fc.block_ratio)
        assert np.all(fc.block_ratio[ok] >= fc.weight_ratio_min[ok] * (1 - 1e-12))
        assert np.all(fc.block_ratio[ok] <= fc.weight_ratio_max[ok] * (1 + 1e-12))


def test_fourier_k_max():
    mu = random_measure(1, 6)
    assert fourier_series_check(mu, 0.5, 10).power_partial.size == 10
    assert fourier_series_check(mu, 0.5, 64).k_max == 63
    with pytest.raises(UsageError):
        fourier_series_check(mu, 0.5, 65)
