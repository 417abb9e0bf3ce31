"""msreduce: reduce bipartite multistate systems to independent two-state pairs.

The degenerate decomposition splits two coupled level sets into 2x2 blocks
plus uncoupled dark states; the non-degenerate extension folds small
per-state energy shifts into a first-order effective Hamiltonian that keeps
the same transformation.  Built-in models, a propagation harness, and a CLI
sit on top.
"""

from .dynamics import (
    DarkPhaseResult,
    Trajectory,
    TrajectoryMetrics,
    compare,
    dark_phase_probe,
    propagate,
)
from .linalg import (
    TOL,
    ContractViolation,
    EigenSystem,
    SVDResult,
    Tolerances,
    eig_hermitian,
    fix_phase,
    is_unitary,
    propagator_step,
    svd,
)
from .models import KINDS, ModelSpec, build, expected_ms, special_case_flags
from .ms_core import (
    BipartiteSystem,
    MSDecomposition,
    dark_states,
    ms_decompose,
    ms_hamiltonian,
    pairing_permutation,
)
from .nondegenerate import (
    AmbiguousMatchError,
    EffectiveModel,
    ExactSpectrum,
    TwoStepTransform,
    build_q,
    effective_hamiltonian,
    effective_model,
    exact_spectrum,
    kappa_matrix,
    two_step,
)
from .pulses import EnvelopeSpec

__version__ = "0.1.0"

__all__ = [
    "TOL",
    "Tolerances",
    "ContractViolation",
    "AmbiguousMatchError",
    "EigenSystem",
    "SVDResult",
    "eig_hermitian",
    "fix_phase",
    "is_unitary",
    "svd",
    "propagator_step",
    "EnvelopeSpec",
    "BipartiteSystem",
    "MSDecomposition",
    "ms_decompose",
    "ms_hamiltonian",
    "pairing_permutation",
    "dark_states",
    "TwoStepTransform",
    "ExactSpectrum",
    "EffectiveModel",
    "two_step",
    "exact_spectrum",
    "kappa_matrix",
    "build_q",
    "effective_hamiltonian",
    "effective_model",
    "KINDS",
    "ModelSpec",
    "build",
    "expected_ms",
    "special_case_flags",
    "Trajectory",
    "TrajectoryMetrics",
    "DarkPhaseResult",
    "propagate",
    "compare",
    "dark_phase_probe",
]
