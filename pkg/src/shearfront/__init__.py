"""Shearlet-type dilation groups, wavelet transforms of synthetic
distributions, decay-exponent wavefront detection, and numerical checks of
the supporting constants and inequalities."""

__version__ = "0.1.0"

from .errors import (
    ConstraintViolation,
    InvalidElementError,
    NotInGroupError,
    OutsideOrbitError,
    QuadratureError,
    ShearfrontError,
    SpecMismatchError,
    UnsupportedCombinationError,
)
from .groups import (
    GroupElement,
    GroupSpec,
    HaarLattice,
    from_matrix,
    haar_weight,
    invert,
    inverse_shear_coords,
    multiply,
    nilpotency_degree,
    operator_norm,
    standard_basis,
    to_matrix,
    toeplitz_basis,
)
from .orbit import (
    ConeSpec,
    FrequencyWindow,
    in_inner_box,
    in_inner_set,
    in_outer_box,
    in_outer_set,
    lemma_box_inner,
    lemma_box_outer,
    r_sufficient,
)
from .wavelets import (
    BandlimitedWavelet,
    MomentTensorWavelet,
    admissibility_constant,
    check_vanishing_moments,
    make_bandlimited,
    make_moment_wavelet,
    required_moments,
)
from .transform import (
    SyntheticDistribution,
    coefficient,
    coefficient_field,
    gaussian,
    grid_function,
    halfspace_edge,
    line_delta,
    point_delta,
)
from .detector import (
    DilationLadder,
    build_ladder,
    classify,
    estimate_decay,
    ladder_from_scales,
    thresholds,
    wavefront_map,
)
from .verifier import (
    ConstantsLedger,
    check_convolution_identity,
    check_cross_kernel_decay,
    check_norm_lemma,
    check_overlap_control,
    check_transfer,
    compute_ledger,
    group_convolve,
)
from .config import ExperimentConfig, load_config, parse_config
