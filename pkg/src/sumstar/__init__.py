"""sumstar: decides array constraints that mix guarded sums, sets, and
cardinalities by reduction to star closures of semilinear sets.

The public surface re-exports the handful of entry points most callers
need; the submodules stay importable for everything else.
"""

from .ast import (
    FragmentProblem,
    LinTerm,
    Model,
    SetInterpretation,
    SumSpec,
    ValidatedProblem,
)
from .semantics import check_model, eval_qfpa, to_dnf, validate_fragment

__version__ = "0.1.0"

__all__ = [
    "FragmentProblem",
    "LinTerm",
    "Model",
    "SetInterpretation",
    "SumSpec",
    "ValidatedProblem",
    "check_model",
    "eval_qfpa",
    "to_dnf",
    "validate_fragment",
    "__version__",
]
