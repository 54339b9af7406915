"""Empirical wavelet systems, transforms and numerical frame certificates."""

from .errors import EWFError, NumericalError, ValidationError
from .frames import (
    AlphaLattice,
    FrameReport,
    alpha_lattice,
    bessel_bound,
    certify,
    cross_term,
    frequency_grid,
    lic_diagnostic,
    lower_bound,
    parseval_sum,
)
from .partition import (
    BoundarySet,
    GammaRegion,
    Partition,
    PartitionKind,
    build_partition,
    compute_centers,
    detect_boundaries,
    gamma_region,
)
from .system import BandAtom, EmpiricalWaveletSystem, build_system, filter_spectrum
from .transform import (
    CoefficientSet,
    SampledSignal,
    cewt_forward,
    dewt_forward,
    frame_operator_apply,
    random_bandlimited,
    reconstruct,
    signal_grid,
    synthesize,
)
from .wavelets import (
    MotherWavelet,
    SupportDescriptor,
    SupportShape,
    essential_support,
    from_samples,
    gaussian,
    meyer,
    scale_factor_compact,
    scale_factor_essential,
    scale_factor_ray,
    shannon,
)

__version__ = "0.1.0"
