"""Ultrametric wavelets and the spectral theory of ultrametric pseudodifferential operators."""
from .exceptions import *  # noqa: F401,F403
from .measure import BallMeasure, from_leaf_masses, homogeneous_measure, measure_of
from .metric import (
    UltrametricAssignment,
    balls_of,
    distance,
    padic_assignment,
    standard_assignment,
    table_assignment,
    verify_ultrametric,
)
from .pdo import Kernel, Spectrum, apply, eigenvalue_of, heat_apply, power_kernel, spectrum, table_kernel
from .tree import (
    DirectedTree,
    build_tree,
    child_toward,
    generate_padic_tree,
    generate_random_tree,
    leaves_under,
    path_up,
    sup,
)
from .wavelets import Wavelet, WaveletBasis, analyze, fast_analyze, fast_synthesize, full_basis, local_basis, synthesize

__version__ = "0.1.0"
from .estimators import HeatDiffusion, UltrametricOperator, UltrametricWaveletTransform  # noqa: E402
