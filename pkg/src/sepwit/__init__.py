"""Joint and separable numerical ranges of Hermitian pairs, and the entanglement witnesses they define."""

from .geometry import PlanarRegion, contains, convex_hull, hausdorff, separating_direction, signed_distance
from .linalg import (
    ConvergenceError,
    DensityState,
    InvalidInputError,
    eig_hermitian,
    partial_transpose,
    pauli,
    schmidt,
)
from .optimize import OptimizerConfig, SepExtremum, brute_force_sep_min, sep_max, sep_min
from .ranges import ProductPair, joint_range, product_cloud, separable_range
from .refine import dominance_certificate, refine_pair
from .witness import (
    build_witness,
    common_eigenvectors,
    detect_state,
    detection_check,
    effectiveness_check,
    eigenspace_product_test,
    ground_state_scan,
)
from .experiments import deflation_hull_check, perturbation_scan
from .presets import operator_preset, state_preset

__version__ = "0.1.0"

__all__ = [
    "PlanarRegion", "contains", "convex_hull", "hausdorff", "separating_direction", "signed_distance",
    "ConvergenceError", "DensityState", "InvalidInputError", "eig_hermitian", "partial_transpose",
    "pauli", "schmidt",
    "OptimizerConfig", "SepExtremum", "brute_force_sep_min", "sep_max", "sep_min",
    "ProductPair", "joint_range", "product_cloud", "separable_range",
    "dominance_certificate", "refine_pair",
    "build_witness", "common_eigenvectors", "detect_state", "detection_check", "effectiveness_check",
    "eigenspace_product_test", "ground_state_scan",
    "deflation_hull_check", "perturbation_scan",
    "operator_preset", "state_preset",
]
