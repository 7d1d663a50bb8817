"""Isotropic scalar, vector and tensor Gaussian random fields on the sphere.

Spectral synthesis and analysis built on the rotation group: generalized
spherical functions and Wigner d/D functions, spin-weighted harmonic
transforms on Gauss-Legendre grids, counter-based coefficient sampling, and
a statistical verification battery for the coefficient laws.
"""

from .errors import (
    ConfigError,
    ConsistencyError,
    ConventionError,
    GridLookupError,
    ParseError,
    ResolutionError,
    SampleSizeError,
    VerificationFailure,
)
from .fields import (
    CoefficientEnsemble,
    FieldModel,
    GeneratorKind,
    PowerSpectrum,
    Symmetry,
    components_to_vector,
    conjugate_partner,
    covariance_series,
    covariance_series_angle,
    frame_point,
    lift_to_SO3,
    point_frame,
    sample_coefficients,
    sample_ensemble,
    sample_tensor_pair,
    spin2_from_stokes,
    stokes_from_spin2,
    synthesize_field,
    vector_components,
)
from .harmonics import (
    SphereGrid,
    SpinMap,
    TriangularCoefficients,
    analyze,
    build_grid,
    legendre_P,
    sph_harm,
    spin_harm,
    synthesize,
    synthesize_at,
)
from .estimate import (
    DiagnosticsConfig,
    DiagnosticsReport,
    SpectrumEstimate,
    average_cl,
    coefficient_diagnostics,
    empirical_covariance,
    estimate_cl,
)
from .kernels import BACKEND as kernel_backend
from .rotations import (
    Convention,
    EulerAngles,
    SpherePoint,
    angles_from_matrix,
    compose,
    convert_convention,
    identity,
    inverse,
    point_to_rotation,
    rotation_matrix,
)
from .wigner import (
    WignerBlock,
    WignerIndex,
    eval_D,
    eval_T,
    rodrigues_P,
    so3_orthogonality,
    wigner_d,
    wigner_d_block,
    wigner_d_table,
    wigner_matrix,
    wigner_matrix_stack,
)

__version__ = "0.1.0"
