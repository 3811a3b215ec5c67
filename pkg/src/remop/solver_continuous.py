"""Fixed-point construction of differential-equation solutions on a grid.

Mirrors the discrete solver: the operator

    (A x)(t) = y(t) + (-1)**m * (r^m xbar)(t),    xbar(t) = a(t) * f(t, x(t))

is iterated from ``x_0 = y`` on an evaluation grid.  Between grid points
the iterate is reconstructed by monotone piecewise-cubic interpolation,
which cannot overshoot the admissible domain spuriously.  The tail
integral is truncated at the grid end with the envelope bound
``M * integral s**(m-1) env_a(s) ds`` covering what was cut.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Callable, Sequence

import numpy as np

from .errors import (
    DomainViolationError,
    EnvelopeDomainError,
    InsufficientDataError,
    NonIntegrableError,
    ShapeError,
)
from .quadrature import QuadratureConfig, _gauss_nodes, integrate
from .remainder_continuous import GridFunction
from .sequences import DecayEnvelope, Interval, framed_interior
from .solver_discrete import SolveStatus

__all__ = [
    "OdeSpec",
    "OdeHypothesisReport",
    "OdeSolveResult",
    "make_geometric_grid",
    "check_hypotheses_ode",
    "apply_A_ode",
    "solve_ode",
    "residual_ode",
    "equicontinuity_modulus",
]


def make_geometric_grid(
    t0: float, t_end: float, growth: float = 0.05, first_step: float | None = None
) -> np.ndarray:
    """Grid with geometrically growing spacing, from t0 to exactly t_end.

    Asymptotic behavior lives at large t, so spacing grows by a factor
    ``1 + growth`` per step instead of wasting points uniformly.  A plain
    geometric point progression would collapse for ``t0 = 0``; growing the
    spacing instead works from any start.
    """
    if t_end <= t0:
        raise ValueError("t_end must exceed t0")
    if growth <= 0:
        raise ValueError("growth must be positive")
    h = first_step if first_step is not None else growth * max(t0, 1.0)
    if h <= 0:
        raise ValueError("first_step must be positive")
    pts = [float(t0)]
    while True:
        nxt = pts[-1] + h
        if nxt >= t_end - 0.25 * h:
            break
        if len(pts) > 200_000:
            raise ValueError("grid would need more than 200000 points")
        pts.append(nxt)
        h *= 1.0 + growth
    pts.append(float(t_end))
    return np.array(pts)


def _vec(fn: Callable) -> Callable[[np.ndarray], np.ndarray]:
    """Wrap a scalar-or-vector callback so it always maps array -> array."""

    def call(arr):
        arr = np.asarray(arr, dtype=float)
        try:
            out = np.asarray(fn(arr), dtype=float)
        except Exception:
            out = None
        if out is not None:
            if out.shape == arr.shape:
                return out
            if out.ndim == 0:
                return np.full(arr.shape, float(out))
        return np.array([float(fn(t)) for t in arr.ravel()]).reshape(arr.shape)

    return call


def _eval_pairs(fn: Callable[[float, float], float], ts: np.ndarray, xs: np.ndarray) -> np.ndarray:
    return np.array([float(fn(t, x)) for t, x in zip(ts, xs)])


@dataclass(frozen=True, eq=False)
class OdeSpec:
    """All data of one differential-equation instance.

    ``a``, ``b``, ``y`` are callbacks on ``[t0, inf)``; ``a_env`` bounds
    ``|a(s)|`` beyond (at least) the grid end.  ``f(t, x)`` carries the
    caller-declared sup bound ``M >= 1`` and optional Lipschitz constant.
    """

    m: int
    t0: float
    a: Callable
    a_env: DecayEnvelope
    b: Callable
    f: Callable[[float, float], float]
    M: float
    U: Interval
    mu: float
    alpha: float
    y: Callable
    grid: np.ndarray
    quad: QuadratureConfig = field(default_factory=QuadratureConfig)
    lipschitz: float | None = None

    def __post_init__(self):
        if self.m < 1:
            raise ValueError("order m must be >= 1")
        if self.t0 < 0:
            raise ValueError("t0 must be >= 0")
        if self.M < 1:
            raise ValueError("declared bound M must be >= 1")
        if not self.mu > 0:
            raise ValueError("margin mu must be positive")
        if self.alpha > 0:
            raise ValueError("decay exponent alpha must be <= 0")
        grid = np.asarray(self.grid, dtype=float)
        if grid.ndim != 1 or grid.size < 4:
            raise ValueError("grid must hold at least four points")
        if not np.all(np.diff(grid) > 0):
            raise ValueError("grid must be strictly increasing")
        if abs(grid[0] - self.t0) > 1e-12 * max(1.0, abs(self.t0)):
            raise ValueError("grid must start at t0")
        if self.a_env.valid_from > grid[-1]:
            raise EnvelopeDomainError("envelope of a must be asserted from the grid end")
        grid = grid.copy()
        grid.flags.writeable = False
        object.__setattr__(self, "grid", grid)

    @property
    def t_end(self) -> float:
        return float(self.grid[-1])


@dataclass(frozen=True)
class OdeHypothesisReport:
    integral_bound: float
    margin: float
    integral_within_margin: bool
    containment_ok: bool
    approx_solution_deviation: float
    approx_solution_ok: bool
    f_bound_ok: bool
    failures: tuple[str, ...]

    @property
    def passed(self) -> bool:
        return not self.failures


def _central_difference(evaluate: Callable[[float], float], m: int, t: float, h: float) -> float:
    acc = math.fsum(
        (-1.0) ** i * math.comb(m, i) * evaluate(t + (0.5 * m - i) * h) for i in range(m + 1)
    )
    return acc / h**m


def check_hypotheses_ode(
    spec: OdeSpec,
    approx_tol: float = 1e-4,
    approx_points: int = 7,
    f_samples: int = 9,
) -> OdeHypothesisReport:
    """Verify the margin, containment, and approximative-solution premises.

    The weighted-integral premise gets a certified bound: adaptive
    quadrature of ``s**w |a(s)|`` on the represented range plus the
    closed-form envelope tail.  ``y^(m) = b`` is verified by sampled
    central differences, accurate to O(h**2) only.
    """
    w = spec.m - 1 - spec.alpha
    a_vec = _vec(spec.a)
    if not spec.a_env.integral_converges(w):
        raise NonIntegrableError(
            "envelope of a does not make the weighted coefficient integral finite"
        )
    part, q_err = integrate(
        lambda s: s**w * np.abs(a_vec(s)), spec.t0, spec.t_end, spec.quad
    )
    tail = spec.a_env.tail_integral(w, spec.t_end)
    bound = spec.M * (part + q_err + tail)

    failures: list[str] = []
    integral_ok = bound <= spec.mu
    if not integral_ok:
        failures.append(
            f"weighted-integral-margin: certified bound {bound:.6g} exceeds mu = {spec.mu:.6g}"
        )

    interior = framed_interior(spec.U, spec.mu)
    y_vec = _vec(spec.y)
    y_grid = y_vec(spec.grid)
    containment_ok = (not interior.is_empty) and interior.contains_all(y_grid)
    if not containment_ok:
        failures.append("containment: approximative solution leaves the framed interior of U")

    approx_dev = 0.0
    b_vec = _vec(spec.b)
    ts = np.linspace(spec.t0, spec.t_end, approx_points + 2)[1:-1]
    for t in ts:
        h = 1e-3 * max(1.0, abs(t))
        if t - 0.5 * spec.m * h < spec.t0 or t + 0.5 * spec.m * h > spec.t_end:
            continue
        d = _central_difference(lambda tau: float(y_vec(np.array([tau]))[0]), spec.m, t, h)
        approx_dev = max(approx_dev, abs(d - float(b_vec(np.array([t]))[0])))
    approx_ok = approx_dev <= approx_tol
    if not approx_ok:
        failures.append(
            f"approximative-solution: sampled |y^(m) - b| = {approx_dev:.3g} exceeds {approx_tol:.3g}"
        )

    f_ok = True
    if containment_ok:
        idx = np.unique(np.linspace(0, spec.grid.size - 1, num=min(24, spec.grid.size), dtype=int))
        offsets = np.linspace(-1.0, 1.0, f_samples) * spec.mu
        for i in idx:
            t = float(spec.grid[i])
            for u in y_grid[i] + offsets:
                if abs(spec.f(t, float(u))) > spec.M * (1.0 + 1e-12):
                    f_ok = False
                    failures.append(
                        f"f-bound: |f({t:.6g}, {u:.6g})| exceeds declared M = {spec.M:.6g}"
                    )
                    break
            if not f_ok:
                break

    return OdeHypothesisReport(
        integral_bound=bound,
        margin=spec.mu,
        integral_within_margin=integral_ok,
        containment_ok=containment_ok,
        approx_solution_deviation=approx_dev,
        approx_solution_ok=approx_ok,
        f_bound_ok=f_ok,
        failures=tuple(failures),
    )


def _segment_nodes(grid: np.ndarray, nodes: int) -> tuple[np.ndarray, np.ndarray]:
    """Flat Gauss-Legendre nodes/weights for every grid segment in order."""
    xg, wg = _gauss_nodes(nodes)
    half = 0.5 * (grid[1:] - grid[:-1])
    mid = 0.5 * (grid[1:] + grid[:-1])
    pts = (mid[:, None] + half[:, None] * xg[None, :]).ravel()
    weights = (half[:, None] * wg[None, :]).ravel()
    return pts, weights


def _apply_A_values(spec: OdeSpec, x: GridFunction, nodes: int) -> np.ndarray:
    """Grid values of ``y + (-1)^m r^m (a * f(., x))`` with per-segment quadrature.

    Inside each grid segment the integrand is smooth (the interpolant is a
    single cubic there), so the per-segment rule converges spectrally; node
    values are shared by all evaluation points.
    """
    grid = spec.grid
    pts, weights = _segment_nodes(grid, nodes)
    a_nodes = _vec(spec.a)(pts)
    x_nodes = np.asarray(x.interpolator()(pts))
    f_nodes = _eval_pairs(spec.f, pts, x_nodes)
    wxbar = weights * a_nodes * f_nodes
    fac = 1.0 / math.factorial(spec.m - 1)
    sign = -1.0 if spec.m % 2 else 1.0
    y_grid = _vec(spec.y)(grid)
    out = np.empty(grid.size)
    for i, t in enumerate(grid):
        start = i * nodes
        d = pts[start:] - t
        out[i] = y_grid[i] + sign * fac * float(d ** (spec.m - 1) @ wxbar[start:])
    return out


def apply_A_ode(spec: OdeSpec, x: GridFunction) -> GridFunction:
    """One application of the solution operator at every grid point."""
    if not np.array_equal(x.grid, spec.grid):
        raise ShapeError("iterate must live on the spec's grid")
    if not spec.U.contains_all(x.values):
        bad = int(np.argmax((x.values < spec.U.lo) | (x.values > spec.U.hi)))
        raise DomainViolationError(
            f"x({spec.grid[bad]:.6g}) = {x.values[bad]:.6g} escapes the admissible domain U"
        )
    vals = _apply_A_values(spec, x, spec.quad.nodes)
    return GridFunction(spec.grid, vals, env=None)


@dataclass(frozen=True)
class OdeSolveResult:
    x: GridFunction
    status: SolveStatus
    iterations: int
    trace: tuple[float, ...]
    residual_max: float | None
    deviation_profile: tuple[tuple[float, float], ...]
    report: OdeHypothesisReport
    quad_error_estimate: float | None


def solve_ode(
    spec: OdeSpec, tol: float = 1e-10, max_iter: int = 200
) -> OdeSolveResult:
    """Successive substitution on the grid from ``x_0 = y``.

    Convergence is judged by the sup gap over grid values.  The reported
    residual differencing step is fixed at ``h = 1e-3``; see
    :func:`residual_ode` for its discretization caveat.
    """
    if not tol > 0:
        raise ValueError("tol must be positive")
    report = check_hypotheses_ode(spec)
    y_start = GridFunction(spec.grid, _vec(spec.y)(spec.grid), env=None)
    if not report.passed:
        return OdeSolveResult(
            x=y_start,
            status=SolveStatus.HYPOTHESIS_FAILED,
            iterations=0,
            trace=(),
            residual_max=None,
            deviation_profile=(),
            report=report,
            quad_error_estimate=None,
        )

    x = y_start
    trace: list[float] = []
    status = SolveStatus.MAX_ITERATIONS
    iterations = max_iter
    for k in range(1, max_iter + 1):
        x_new = apply_A_ode(spec, x)
        gap = float(np.max(np.abs(x_new.values - x.values)))
        trace.append(gap)
        x = x_new
        if gap < tol:
            status = SolveStatus.CONVERGED
            iterations = k
            break

    res = residual_ode(spec, x, _default_samples(spec), h=1e-3)
    coarse = _apply_A_values(spec, x, max(4, spec.quad.nodes // 2))
    fine = _apply_A_values(spec, x, spec.quad.nodes)
    quad_est = float(np.max(np.abs(fine - coarse))) + spec.M * spec.a_env.tail_integral(
        spec.m - 1, spec.t_end
    )
    y_grid = y_start.values
    weights = np.array([t ** (-spec.alpha) if t > 0 else (1.0 if spec.alpha == 0 else 0.0)
                        for t in spec.grid])
    profile = tuple(
        (float(t), float(abs(xv - yv) * wt))
        for t, xv, yv, wt in zip(spec.grid, x.values, y_grid, weights)
    )
    return OdeSolveResult(
        x=x,
        status=status,
        iterations=iterations,
        trace=tuple(trace),
        residual_max=res,
        deviation_profile=profile,
        report=report,
        quad_error_estimate=quad_est,
    )


def _default_samples(spec: OdeSpec, limit: int = 40) -> np.ndarray:
    """Segment midpoints, subsampled; stencils stay inside one cubic piece."""
    mids = 0.5 * (spec.grid[:-1] + spec.grid[1:])
    widths = spec.grid[1:] - spec.grid[:-1]
    ok = widths > 2.5 * spec.m * 1e-3
    mids = mids[ok]
    if mids.size > limit:
        mids = mids[np.linspace(0, mids.size - 1, limit, dtype=int)]
    return mids


def residual_ode(spec: OdeSpec, x, sample_points, h: float = 1e-3) -> float:
    """Max defect ``|D_h^m x(t) - a(t) f(t, x(t)) - b(t)]`` over the samples.

    ``x`` may be a GridFunction (differenced through its interpolant) or a
    plain callable.  Central differences carry an O(h**2) truncation error,
    and for grid input the interpolant's own accuracy adds a floor that no
    h can push below.
    """
    if h <= 0:
        raise ValueError("h must be positive")
    if isinstance(x, GridFunction):
        lo, hi = x.t0, x.t_end

        def evaluate(tau: float) -> float:
            v = float(x.interpolator()(tau))
            return v

    elif callable(x):
        lo, hi = -math.inf, math.inf

        def evaluate(tau: float) -> float:
            return float(x(tau))

    else:
        raise TypeError("x must be a GridFunction or a callable")

    samples = np.atleast_1d(np.asarray(sample_points, dtype=float))
    if samples.size == 0:
        raise InsufficientDataError("no sample points supplied")
    reach = 0.5 * spec.m * h
    if np.any(samples - reach < lo) or np.any(samples + reach > hi):
        raise InsufficientDataError("difference stencil leaves the represented domain")

    worst = 0.0
    for t in samples:
        d = _central_difference(evaluate, spec.m, float(t), h)
        rhs = float(spec.a(t)) * spec.f(float(t), evaluate(float(t))) + float(spec.b(t))
        worst = max(worst, abs(d - rhs))
    return worst


def equicontinuity_modulus(xs: Sequence[GridFunction]) -> float:
    """Largest slope between consecutive grid points across the family."""
    if not xs:
        raise ValueError("empty family")
    grid = xs[0].grid
    worst = 0.0
    for gf in xs:
        if not np.array_equal(gf.grid, grid):
            raise ShapeError("family members must share one grid")
        slopes = np.abs(np.diff(gf.values)) / np.diff(grid)
        worst = max(worst, float(np.max(slopes)))
    return worst
