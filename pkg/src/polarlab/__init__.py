"""Polarizing BMS channels with few kernels: quantization into bundles,
exact kernel transforms, goodness testing and greedy kernel selection."""

from .channel import (
    Atom,
    BmsChannel,
    binary_entropy,
    capacity,
    cdf,
    channel_entropy,
    dominates,
    inverse_binary_entropy,
    merge,
)
from .errors import CapacityError, DomainError, KernelError, LookupFailure, PolarLabError
from .exponents import (
    GoodnessParams,
    GoodnessReport,
    alpha,
    error_exponent,
    gallager_e0,
    is_good,
    potential_h,
    theta,
)
from .hitting_set import BadnessMatrix, CoverReport, badness_matrix, bound_m, greedy_cover, min_cover_oracle
from .kernels import (
    ARIKAN,
    Kernel,
    bec_transform,
    kernel_construct,
    polar_transform,
    sample_invertible,
    sample_pool,
)
from .polar_sim import SimReport, TrackedChannel, simulate
from .quantize import (
    Bundle,
    Grid,
    Pavement,
    bundle_endpoints,
    enumerate_pavements,
    grid_size,
    quantize_pair,
)

__version__ = "0.1.0"
