"""
qwspec: spectral analysis of coined quantum walks on graphs.

A walk ``U = S C`` whose local coins have two-point spectrum
``{kappa, kappa'}`` is reduced to a Hermitian discriminant ``T = K* S K``.
The spectrum of ``U`` is recovered from that of ``T`` by a quadratic lift,
plus ``+-kappa'`` on the complement of the inherited subspace.
"""

__version__ = "0.1.0"

from .coins import (  # noqa: E402
    CoinAssignment,
    KernelBasis,
    certify_two_point_spectrum,
    grover_coins,
    kernel_cons,
    moving_grover_coins,
    to_flipflop_coin,
)
from .discriminant import build_boundary, build_discriminant  # noqa: E402
from .exceptions import (  # noqa: E402
    CapExceeded,
    CoinError,
    GraphError,
    LiftError,
    MultiplicityViolation,
    OracleMismatch,
    QWSpecError,
    ShiftError,
    SpectrumViolation,
)
from .graph import (  # noqa: E402
    ArcPermutation,
    Graph,
    bouquet,
    build_graph,
    complete,
    cycle,
    hypercubic_torus,
    standard_graph,
)
from .spectral import SpectrumReport, analyze, full_report, lift_eigenvalue  # noqa: E402
from .walk import OneForm, dense_spectrum, shift_matrix, walk_matrix  # noqa: E402

__all__ = [
    "__version__",
    "ArcPermutation",
    "CapExceeded",
    "CoinAssignment",
    "CoinError",
    "Graph",
    "GraphError",
    "KernelBasis",
    "LiftError",
    "MultiplicityViolation",
    "OneForm",
    "OracleMismatch",
    "QWSpecError",
    "ShiftError",
    "SpectrumReport",
    "SpectrumViolation",
    "analyze",
    "bouquet",
    "build_boundary",
    "build_discriminant",
    "build_graph",
    "certify_two_point_spectrum",
    "complete",
    "cycle",
    "dense_spectrum",
    "full_report",
    "grover_coins",
    "hypercubic_torus",
    "kernel_cons",
    "lift_eigenvalue",
    "moving_grover_coins",
    "shift_matrix",
    "standard_graph",
    "to_flipflop_coin",
    "walk_matrix",
]
