"""Iterated remainder operator calculus with certified tail bounds.

Discrete side: weighted tail sums that invert the m-th forward difference
up to sign.  Continuous side: weighted tail integrals that invert the m-th
derivative up to sign.  On top of both sit fixed-point solvers that attach
a solution of ``D^m x = a f(., x) + b`` (or ``x^(m) = a f(., x) + b``) to a
given approximative solution y, with the deviation ``x - y`` decaying like
``o(n^alpha)`` / ``o(t^alpha)``.
"""

from .errors import (
    ConfigError,
    DivergentEnvelopeError,
    DomainViolationError,
    EnvelopeDomainError,
    IndexRangeError,
    InsufficientDataError,
    NonIntegrableError,
    NonSummableError,
    QuadraturePrecisionError,
    RemopError,
    ShapeError,
)
from .quadrature import QuadratureConfig, integrate, integrate_fixed
from .remainder_continuous import (
    GridFunction,
    derivative_identity_check,
    fubini_check,
    integrability_certificate,
    rm_cont,
)
from .remainder_discrete import (
    RemainderInput,
    SummabilityReport,
    Verdict,
    check_difference_identity,
    rm_truncation_bound,
    rm_value,
    rm_window,
    summability_certificate,
)
from .sequences import (
    DecayEnvelope,
    EnvelopeKind,
    ExtendedNorm,
    Interval,
    SequenceWindow,
    forward_difference,
    framed_interior,
    rising_factorial,
    sup_metric,
    weighted_tail_sum,
)
from .solver_continuous import (
    OdeHypothesisReport,
    OdeSolveResult,
    OdeSpec,
    apply_A_ode,
    check_hypotheses_ode,
    equicontinuity_modulus,
    make_geometric_grid,
    residual_ode,
    solve_ode,
)
from .solver_discrete import (
    DifferenceEquationSpec,
    HypothesisReport,
    SolveResult,
    SolveStatus,
    apply_A,
    asymptotic_deviation,
    check_hypotheses,
    residual,
    solve,
)

__version__ = "0.1.0"

__all__ = [
    "ConfigError",
    "DecayEnvelope",
    "DifferenceEquationSpec",
    "DivergentEnvelopeError",
    "DomainViolationError",
    "EnvelopeDomainError",
    "EnvelopeKind",
    "ExtendedNorm",
    "GridFunction",
    "HypothesisReport",
    "IndexRangeError",
    "InsufficientDataError",
    "Interval",
    "NonIntegrableError",
    "NonSummableError",
    "OdeHypothesisReport",
    "OdeSolveResult",
    "OdeSpec",
    "QuadratureConfig",
    "QuadraturePrecisionError",
    "RemainderInput",
    "RemopError",
    "SequenceWindow",
    "ShapeError",
    "SolveResult",
    "SolveStatus",
    "SummabilityReport",
    "Verdict",
    "apply_A",
    "apply_A_ode",
    "asymptotic_deviation",
    "check_difference_identity",
    "check_hypotheses",
    "check_hypotheses_ode",
    "derivative_identity_check",
    "equicontinuity_modulus",
    "forward_difference",
    "framed_interior",
    "fubini_check",
    "integrability_certificate",
    "integrate",
    "integrate_fixed",
    "make_geometric_grid",
    "residual",
    "residual_ode",
    "rising_factorial",
    "rm_cont",
    "rm_truncation_bound",
    "rm_value",
    "rm_window",
    "solve",
    "solve_ode",
    "summability_certificate",
    "sup_metric",
    "weighted_tail_sum",
]
