"""Fixed-point construction of difference-equation solutions.

Given an approximative solution y of ``D^m y = b``, the solution operator

    (A x)_n = y_n + (-1)**m * (r^m xbar)_n,    xbar_n = a_n * f(n, x_n)

maps the tube ``|x - y| <= M * r^m |a|`` into itself whenever the weighted
tail of ``a`` fits inside the margin ``mu`` and y stays in the framed
interior of the admissible domain ``U``.  A fixed point of A solves
``D^m x_n = a_n f(n, x_n) + b_n`` and deviates from y by ``o(n^alpha)``.
Here the fixed point is found by plain successive substitution from
``x_0 = y``; non-convergence is reported honestly as a status.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from typing import Callable

import numpy as np

from .errors import DomainViolationError, InsufficientDataError, NonSummableError, ShapeError
from .remainder_discrete import (
    RemainderInput,
    rm_truncation_bound,
    rm_window,
    summability_certificate,
)
from .sequences import (
    DecayEnvelope,
    Interval,
    SequenceWindow,
    forward_difference,
    framed_interior,
    sup_metric,
)

__all__ = [
    "DifferenceEquationSpec",
    "HypothesisReport",
    "SolveResult",
    "SolveStatus",
    "check_hypotheses",
    "apply_A",
    "solve",
    "residual",
    "asymptotic_deviation",
]

DEFAULT_TOL = 1e-10
DEFAULT_MAX_ITER = 200


class SolveStatus(str, Enum):
    CONVERGED = "converged"
    MAX_ITERATIONS = "max-iterations"
    HYPOTHESIS_FAILED = "hypothesis-failed"


@dataclass(frozen=True)
class DifferenceEquationSpec:
    """All data of one difference-equation instance.

    ``f(n, x)`` is a caller-supplied callback with caller-declared sup
    bound ``M >= 1`` on the admissible domain (spot-checked by sampling)
    and optional Lipschitz constant in its second argument.
    """

    m: int
    a: SequenceWindow
    a_env: DecayEnvelope
    b: SequenceWindow
    f: Callable[[int, float], float]
    M: float
    U: Interval
    mu: float
    alpha: float
    y: SequenceWindow
    lipschitz: float | None = None

    def __post_init__(self):
        if self.m < 1:
            raise ValueError("order m must be >= 1")
        if self.M < 1:
            raise ValueError("declared bound M must be >= 1")
        if not self.mu > 0:
            raise ValueError("margin mu must be positive")
        if self.alpha > 0:
            raise ValueError("decay exponent alpha must be <= 0")
        for name, win in (("b", self.b), ("y", self.y)):
            if win.p != self.a.p or len(win) != len(self.a):
                raise ShapeError(f"window {name} must share range with a")

    @property
    def p(self) -> int:
        return self.a.p

    @property
    def end(self) -> int:
        return self.a.end


@dataclass(frozen=True)
class HypothesisReport:
    """Named pass/fail outcomes with the certified bound they rest on."""

    weighted_sum_bound: float
    margin: float
    sum_within_margin: bool
    containment_ok: bool
    approx_solution_deviation: float
    approx_solution_ok: bool
    f_bound_ok: bool
    failures: tuple[str, ...]

    @property
    def passed(self) -> bool:
        return not self.failures


def check_hypotheses(
    spec: DifferenceEquationSpec,
    approx_tol: float = 1e-8,
    f_samples: int = 9,
) -> HypothesisReport:
    """Verify the margin, containment, and approximative-solution premises.

    The weighted-sum premise is checked against a certified upper bound
    (stored part summed exactly, envelope tail in closed form), so a pass
    is rigorous up to the caller's envelope assertion.
    """
    cert = summability_certificate(spec.a_env, spec.a.abs(), spec.m, spec.alpha)
    if not cert.certified:
        raise NonSummableError(
            "envelope of a does not make the weighted coefficient sum finite"
        )
    bound = spec.M * cert.bound
    failures: list[str] = []
    sum_ok = bound <= spec.mu
    if not sum_ok:
        failures.append(
            f"weighted-sum-margin: certified bound {bound:.6g} exceeds mu = {spec.mu:.6g}"
        )

    interior = framed_interior(spec.U, spec.mu)
    containment_ok = (not interior.is_empty) and interior.contains_all(spec.y.values)
    if not containment_ok:
        failures.append("containment: approximative solution leaves the framed interior of U")

    approx_dev = 0.0
    if spec.m < len(spec.y):
        dmy = forward_difference(spec.y, spec.m)
        approx_dev = float(np.max(np.abs(dmy.values - spec.b.values[: len(dmy)])))
    approx_ok = approx_dev <= approx_tol
    if not approx_ok:
        failures.append(
            f"approximative-solution: max |D^m y - b| = {approx_dev:.3g} exceeds {approx_tol:.3g}"
        )

    f_ok = True
    if containment_ok:
        idx = np.unique(np.linspace(0, len(spec.y) - 1, num=min(32, len(spec.y)), dtype=int))
        offsets = np.linspace(-1.0, 1.0, f_samples) * spec.mu
        for i in idx:
            n = spec.p + int(i)
            for u in spec.y.values[i] + offsets:
                if abs(spec.f(n, float(u))) > spec.M * (1.0 + 1e-12):
                    f_ok = False
                    failures.append(
                        f"f-bound: |f({n}, {u:.6g})| exceeds declared M = {spec.M:.6g}"
                    )
                    break
            if not f_ok:
                break

    return HypothesisReport(
        weighted_sum_bound=bound,
        margin=spec.mu,
        sum_within_margin=sum_ok,
        containment_ok=containment_ok,
        approx_solution_deviation=approx_dev,
        approx_solution_ok=approx_ok,
        f_bound_ok=f_ok,
        failures=tuple(failures),
    )


def _forcing_input(spec: DifferenceEquationSpec, x: SequenceWindow) -> RemainderInput:
    xbar = np.array(
        [a * spec.f(n, xv) for n, a, xv in zip(x.indices, spec.a.values, x.values)]
    )
    return RemainderInput(SequenceWindow(spec.p, xbar), spec.a_env.scaled(spec.M), spec.m)


def apply_A(spec: DifferenceEquationSpec, x: SequenceWindow) -> SequenceWindow:
    """One application of the solution operator on the stored window."""
    if x.p != spec.p or len(x) != len(spec.a):
        raise ShapeError("iterate must live on the same window as the coefficients")
    if not spec.U.contains_all(x.values):
        bad = int(np.argmax((x.values < spec.U.lo) | (x.values > spec.U.hi)))
        raise DomainViolationError(
            f"x[{spec.p + bad}] = {x.values[bad]:.6g} escapes the admissible domain U"
        )
    rin = _forcing_input(spec, x)
    tail = rm_window(rin, (spec.p, spec.end))
    sign = -1.0 if spec.m % 2 else 1.0
    return SequenceWindow(spec.p, spec.y.values + sign * tail.values)


@dataclass(frozen=True)
class SolveResult:
    x: SequenceWindow
    status: SolveStatus
    iterations: int
    trace: tuple[float, ...]
    residual_max: float | None
    deviation_profile: tuple[tuple[int, float], ...]
    report: HypothesisReport
    truncation_bound: float | None


def solve(
    spec: DifferenceEquationSpec,
    tol: float = DEFAULT_TOL,
    max_iter: int = DEFAULT_MAX_ITER,
) -> SolveResult:
    """Successive substitution ``x_{k+1} = A x_k`` from ``x_0 = y``.

    Stops when the sup gap between successive iterates drops below ``tol``.
    The gap trace may oscillate; it is reported as observed.  When the
    hypotheses fail, no iteration is attempted.
    """
    if not tol > 0:
        raise ValueError("tol must be positive")
    report = check_hypotheses(spec)
    if not report.passed:
        return SolveResult(
            x=spec.y,
            status=SolveStatus.HYPOTHESIS_FAILED,
            iterations=0,
            trace=(),
            residual_max=None,
            deviation_profile=(),
            report=report,
            truncation_bound=None,
        )

    x = spec.y
    trace: list[float] = []
    status = SolveStatus.MAX_ITERATIONS
    iterations = max_iter
    for k in range(1, max_iter + 1):
        x_new = apply_A(spec, x)
        gap = float(sup_metric(x_new, x))
        trace.append(gap)
        x = x_new
        if gap < tol:
            status = SolveStatus.CONVERGED
            iterations = k
            break

    res = residual(spec, x) if spec.m < len(x) else None
    profile = asymptotic_deviation(x, spec.y, spec.alpha, tuple(x.indices))
    return SolveResult(
        x=x,
        status=status,
        iterations=iterations,
        trace=tuple(trace),
        residual_max=res,
        deviation_profile=profile,
        report=report,
        truncation_bound=rm_truncation_bound(_forcing_input(spec, x)),
    )


def residual(
    spec: DifferenceEquationSpec, x: SequenceWindow, span: tuple[int, int] | None = None
) -> float:
    """Max defect ``|D^m x_n - a_n f(n, x_n) - b_n|`` over the span."""
    if spec.m >= len(x):
        raise InsufficientDataError("window too short for the m-th difference")
    dmx = forward_difference(x, spec.m)
    if span is None:
        span = (dmx.p, dmx.end)
    n1, n2 = span
    if not (dmx.p <= n1 <= n2 <= dmx.end):
        raise InsufficientDataError(
            f"span [{n1}, {n2}] not covered by the differenced window [{dmx.p}, {dmx.end}]"
        )
    worst = 0.0
    for n in range(n1, n2 + 1):
        rhs = spec.a.value_at(n) * spec.f(n, x.value_at(n)) + spec.b.value_at(n)
        worst = max(worst, abs(dmx.value_at(n) - rhs))
    return worst


def asymptotic_deviation(
    x: SequenceWindow, y: SequenceWindow, alpha: float, checkpoints
) -> tuple[tuple[int, float], ...]:
    """Profile ``(n, |x_n - y_n| * n**(-alpha))`` at the checkpoints."""
    out = []
    for n in checkpoints:
        n = int(n)
        out.append((n, abs(x.value_at(n) - y.value_at(n)) * float(n) ** (-alpha)))
    return tuple(out)
