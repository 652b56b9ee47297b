"""Riesz-type potentials, energies and dimension bounds on the Cantor dyadic group."""

__version__ = "0.1.0"

from .errors import InconclusiveError, MeasureFormatError, UsageError
from .group import (
    CylinderId,
    GroupElement,
    Resolution,
    add,
    coset_members,
    metric,
    shell_level,
    walsh,
)
from .kernel import (
    KernelSpec,
    coefficient_table,
    full_coefficient,
    kernel_value,
    truncated_coefficient,
)
from .measure import (
    CylinderMeasure,
    LevelMassTable,
    WalshSpectrum,
    bernoulli_product,
    cylinder_uniform,
    fwht,
    haar,
    level_masses,
    pattern_measure,
    random_measure,
    spectrum,
)
from .fileformat import read_measure, write_measure
from .energy import (
    EnergyResult,
    PotentialField,
    cell_averaged_kernel,
    energy,
    energy_hierarchical,
    energy_naive,
    energy_spectral,
    potential,
)
from .dimension import (
    DimensionEstimate,
    EnergyProfile,
    box_counting_dim,
    classify_s,
    dim_lower_bound,
    energy_profile,
    fourier_series_check,
    scaling_diagnostic,
)
