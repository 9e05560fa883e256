"""Gauge integration for lattice-valued functions on [0,1].

Norm-type (Henstock) and order-type integrals over finite-dimensional
Banach lattices, with exact-rational certificates, an executable
theorem-check harness, and a CLI for experiments and reports.
"""

from .errors import (
    BackendMismatchError,
    ConfigError,
    DimensionMismatchError,
    GaugeIntError,
    MonotonicityError,
    NoConvergenceError,
    UnsupportedClassError,
    UnsupportedFormError,
)
from .lattice import LatticeVector, OSequence, Space, join, meet, modulus, norm, osequence_eval
from .partitions import (
    Gage,
    Interval,
    TaggedPartition,
    common_refinement,
    cousin_partition,
    is_fine,
    random_fine_partition,
    refine,
    riemann_sum,
)
from .functions import (
    AeModifiedFunction,
    LatticeFunction,
    PiecewiseFunction,
    StepFunction,
    escaping_function,
    evaluate,
    exact_integral,
    modulus_fn,
)

__version__ = "0.1.0"
