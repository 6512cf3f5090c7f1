"""Fisher-information engine for two-photon-absorption metrology."""

__version__ = "0.1.0"

from .exceptions import (
    ConfigError,
    DimensionMismatch,
    EngineError,
    GridTooNarrow,
    InsufficientPoints,
    InvalidSpec,
    NegativeState,
    NonHermitianInput,
    NonPositiveInput,
    TruncationError,
    UnsupportedFamily,
    ZeroPhotons,
    ZeroSignal,
)
from .fock import (
    DensityMatrix,
    FockBasisConfig,
    QuantumOperator,
    StateSpec,
    annihilation_op,
    creation_op,
    default_dim,
    expectation,
    make_state,
    number_op,
    quadrature_op,
)
from .dynamics import Absorbance, LossGenerator, generator_apply, photon_flux, propagate
from .fisher import (
    FisherRecord,
    SldResult,
    cfi_dim,
    cfi_photon_number,
    cfi_quadrature,
    cfi_tpa,
    compute_sld,
    exponent_via_step,
    fit_loglog_slope,
    qfi_tpa,
    scaling_exponent,
    sensitivity_mean_photon,
)
from .phase_space import (
    MarginalDistribution,
    PhaseSpaceField,
    QuadratureGrid,
    default_grid,
    negativity_volume,
    quadrature_pdf,
    wigner,
)
from .closed_forms import (
    CrossSectionInputs,
    cfi_quad_coherent,
    cfi_quad_squeezed,
    cross_section,
    dvar_photon_coherent,
    dvar_photon_squeezed,
    mean_photon_first_order,
    qfi_coherent_exact,
    shg_qfi,
)
from .sweep import SweepConfig, SweepResult, preset_config, run_sweep
