"""Continuous iterated remainder operator.

For an absolutely integrable function the order-m remainder at t is the
weighted tail integral

    (r^m f)(t) = integral_t^inf (s - t)**(m-1) / (m-1)! * f(s) ds,

the m-fold iterate of plain tail integration; it inverts the m-th
derivative up to the sign ``(-1)**m`` among functions vanishing at
infinity.  The kernel is bounded near ``s = t`` for every ``m >= 1``, so
no singularity handling is needed.  Improper integrals are split at the
represented end: quadrature on the finite part, closed-form envelope tail
beyond it.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Callable

import numpy as np
from scipy.interpolate import PchipInterpolator

from .errors import EnvelopeDomainError, IndexRangeError, NonIntegrableError
from .quadrature import QuadratureConfig, _gauss_nodes, _integrate_adaptive, integrate, integrate_fixed
from .remainder_discrete import SummabilityReport, Verdict
from .sequences import DecayEnvelope, EnvelopeKind

__all__ = [
    "GridFunction",
    "rm_cont",
    "fubini_check",
    "derivative_identity_check",
    "integrability_certificate",
]

# Rounding allowance attached to knot-aligned quadrature, which is exact
# for the interpolant up to floating-point noise.
_ROUNDING_SLACK = 1e-14


@dataclass(frozen=True, eq=False)
class GridFunction:
    """Function values on a strictly increasing grid, plus a tail envelope.

    Between grid points the function is reconstructed by monotone
    piecewise-cubic interpolation (no overshoot beyond neighboring
    values).  ``env`` bounds ``|f(s)|`` for ``s`` beyond the grid end.
    """

    grid: np.ndarray
    values: np.ndarray
    env: DecayEnvelope | None = None

    def __post_init__(self):
        grid = np.asarray(self.grid, dtype=float)
        vals = np.asarray(self.values, dtype=float)
        if grid.ndim != 1 or grid.size < 2:
            raise ValueError("grid must hold at least two points")
        if grid[0] < 0:
            raise ValueError("grid must start at t0 >= 0")
        if not np.all(np.diff(grid) > 0):
            raise ValueError("grid must be strictly increasing")
        if vals.shape != grid.shape:
            raise ValueError("values must match the grid point for point")
        if not np.all(np.isfinite(vals)):
            raise ValueError("grid values must be finite")
        grid, vals = grid.copy(), vals.copy()
        grid.flags.writeable = False
        vals.flags.writeable = False
        object.__setattr__(self, "grid", grid)
        object.__setattr__(self, "values", vals)

    @classmethod
    def from_callable(
        cls, fn: Callable, grid: np.ndarray, env: DecayEnvelope | None = None
    ) -> "GridFunction":
        grid = np.asarray(grid, dtype=float)
        vals = np.array([float(fn(t)) for t in grid])
        return cls(grid, vals, env)

    @property
    def t0(self) -> float:
        return float(self.grid[0])

    @property
    def t_end(self) -> float:
        return float(self.grid[-1])

    def interpolator(self) -> PchipInterpolator:
        cached = self.__dict__.get("_interp")
        if cached is None:
            cached = PchipInterpolator(self.grid, self.values, extrapolate=False)
            object.__setattr__(self, "_interp", cached)
        return cached

    def __call__(self, t):
        return self.interpolator()(t)


def _eval_scalar(fn, t: float) -> float:
    return float(np.asarray(fn(np.asarray([t], dtype=float))).ravel()[0])


def _kernel_factor(m: int) -> float:
    return 1.0 / math.factorial(m - 1)


def _segment_quadrature(edges: np.ndarray, fn: Callable, nodes: int = 16) -> float:
    """Gauss-Legendre rule applied per segment of an explicit edge list."""
    xg, wg = _gauss_nodes(nodes)
    half = 0.5 * (edges[1:] - edges[:-1])
    mid = 0.5 * (edges[1:] + edges[:-1])
    pts = (mid[:, None] + half[:, None] * xg[None, :]).ravel()
    weights = (half[:, None] * wg[None, :]).ravel()
    return math.fsum(weights * np.asarray(fn(pts), dtype=float))


def _rm_grid_part(gf: GridFunction, m: int, t: float) -> float:
    """Knot-aligned Gauss-Legendre integral of kernel * interpolant on [t, grid end].

    Each panel integrand is (cubic) * (polynomial of degree m-1), far below
    the exactness degree of the 16-node rule, so the only error is rounding.
    """
    grid = gf.grid
    if t >= grid[-1]:
        return 0.0
    i0 = int(np.searchsorted(grid, t, side="right"))
    edges = np.concatenate(([t], grid[i0:]))
    interp = gf.interpolator()
    fac = _kernel_factor(m)
    return _segment_quadrature(edges, lambda s: interp(s) * (s - t) ** (m - 1) * fac)


def _rm_callable_fixed(
    f: Callable, m: int, t: float, t_end: float, panels: int, nodes: int
) -> float:
    fac = _kernel_factor(m)
    return integrate_fixed(lambda s: (s - t) ** (m - 1) * np.asarray(f(s)) * fac, t, t_end, panels, nodes)


def rm_cont(
    f,
    m: int,
    t: float,
    cfg: QuadratureConfig | None = None,
    *,
    env: DecayEnvelope | None = None,
    t_end: float | None = None,
) -> tuple[float, float]:
    """Order-m remainder of ``f`` at ``t`` with a certified error bound.

    ``f`` is either a :class:`GridFunction` (its own envelope and grid end
    are used) or a vectorized callback, in which case ``env`` and ``t_end``
    must be supplied.  The error bound combines the quadrature estimate on
    ``[t, t_end]`` with the envelope tail
    ``integral_{t_end}^inf s**(m-1) * env(s) ds``, valid because
    ``(s-t)**(m-1)/(m-1)! <= s**(m-1)`` for ``s >= t >= 0``.
    """
    if m < 1:
        raise ValueError("remainder order m must be >= 1")
    if t < 0:
        raise IndexRangeError("evaluation point must satisfy t >= 0")
    cfg = cfg or QuadratureConfig()

    if isinstance(f, GridFunction):
        if f.env is None:
            raise ValueError("grid function needs a tail envelope for a certified bound")
        if t < f.t0:
            raise IndexRangeError(f"t = {t} precedes the represented start {f.t0}")
        if not f.env.integral_converges(m - 1):
            raise NonIntegrableError("envelope does not make the order-m remainder integrable")
        value = _rm_grid_part(f, m, t)
        tail = f.env.tail_integral(m - 1, max(t, f.t_end))
        return value, _ROUNDING_SLACK * (1.0 + abs(value)) + tail

    if env is None or t_end is None:
        raise ValueError("callback input requires env and t_end")
    if not env.integral_converges(m - 1):
        raise NonIntegrableError("envelope does not make the order-m remainder integrable")
    fac = _kernel_factor(m)
    value, quad_err = (0.0, 0.0)
    if t < t_end:
        value, quad_err = integrate(
            lambda s: (s - t) ** (m - 1) * np.asarray(f(s)) * fac, t, t_end, cfg
        )
    tail = env.tail_integral(m - 1, max(t, t_end))
    return value, quad_err + tail


def fubini_check(
    f: Callable, a: float, b: float, power: int, cfg: QuadratureConfig | None = None
) -> float:
    """Deviation between the two routes of the order-swap identity.

    Compares the nested tail integral
    ``integral_a^b integral_t^b (s-t)**power / power! * f(s) ds dt``
    against the collapsed form
    ``integral_a^b (s-a)**(power+1) / (power+1)! * f(s) ds``
    by independent quadratures of both sides.
    """
    if power < 0:
        raise ValueError("kernel power must be >= 0")
    if b <= a:
        raise ValueError("need b > a")
    cfg = cfg or QuadratureConfig()
    inner_cfg = replace(cfg, abs_tol=cfg.abs_tol / (8.0 * max(1.0, b - a)))
    fac = 1.0 / math.factorial(power)

    def inner(t: float) -> float:
        value, _ = integrate(lambda s: (s - t) ** power * np.asarray(f(s)) * fac, t, b, inner_cfg)
        return value

    lhs, _ = integrate(lambda ts: np.array([inner(t) for t in np.atleast_1d(ts)]), a, b, cfg)
    fac2 = 1.0 / math.factorial(power + 1)
    rhs, _ = integrate(lambda s: (s - a) ** (power + 1) * np.asarray(f(s)) * fac2, a, b, cfg)
    return abs(lhs - rhs)


def derivative_identity_check(
    f,
    m: int,
    k: int,
    t: float,
    cfg: QuadratureConfig | None = None,
    *,
    env: DecayEnvelope | None = None,
    t_end: float | None = None,
    h: float | None = None,
) -> float:
    """Deviation of the k-th derivative ladder at ``t``.

    Compares the k-th central difference of ``tau -> (r^m f)(tau)`` against
    ``(-1)**k * (r^(m-k) f)(t)``, with ``r^0 f = f``.  All stencil points
    share one fixed panel layout per order (adapted once at ``t``): the
    quadrature error then varies smoothly across the stencil and cancels in
    the difference instead of being amplified by ``h**(-k)``.
    """
    if m < 1:
        raise ValueError("order m must be >= 1")
    if not 0 <= k <= m:
        raise ValueError(f"k must lie in [0, {m}]")
    cfg = cfg or QuadratureConfig()
    if h is None:
        h = 1e-3 * max(1.0, t)

    if isinstance(f, GridFunction):
        if t - 0.5 * k * h < f.t0:
            raise IndexRangeError("stencil leaves the represented domain")

        def rm_at(order: int, tau: float) -> float:
            return _rm_grid_part(f, order, tau)

        def f_at(tau: float) -> float:
            return float(f.interpolator()(tau))

    else:
        if env is None or t_end is None:
            raise ValueError("callback input requires env and t_end")
        if t - 0.5 * k * h < 0:
            raise IndexRangeError("stencil would cross t = 0")
        panel_cache: dict[int, int] = {}

        def rm_at(order: int, tau: float) -> float:
            panels = panel_cache.get(order)
            if panels is None:
                fac = _kernel_factor(order)
                _, _, panels = _integrate_adaptive(
                    lambda s: (s - t) ** (order - 1) * np.asarray(f(s)) * fac, t, t_end, cfg
                )
                panel_cache[order] = panels
            return _rm_callable_fixed(f, order, tau, t_end, panels, cfg.nodes)

        def f_at(tau: float) -> float:
            return _eval_scalar(f, tau)

    stencil = math.fsum(
        (-1.0) ** i * math.comb(k, i) * rm_at(m, t + (0.5 * k - i) * h) for i in range(k + 1)
    )
    lhs = stencil / h**k if k > 0 else stencil
    rhs = f_at(t) if k == m else rm_at(m - k, t)
    sign = -1.0 if k % 2 else 1.0
    return abs(lhs - sign * rhs)


def integrability_certificate(
    env: DecayEnvelope,
    m: int,
    alpha: float,
    t0: float,
    grid_part: GridFunction | None = None,
) -> SummabilityReport:
    """Convergence verdict and bound for ``integral_t0^inf s**(m-1-alpha) |f(s)| ds``.

    Envelope-only when ``grid_part`` is None (the envelope must already be
    asserted from ``t0``); otherwise the represented part is integrated by
    knot-aligned quadrature and the envelope covers only the tail.
    """
    if m < 1:
        raise ValueError("order m must be >= 1")
    if alpha > 0:
        raise ValueError("decay exponent alpha must be <= 0")
    if t0 < 0:
        raise ValueError("t0 must be >= 0")
    w = m - 1 - alpha

    partial = 0.0
    if grid_part is not None:
        if grid_part.t0 > t0:
            raise EnvelopeDomainError(
                f"grid starts at {grid_part.t0}, after the requested t0 = {t0}"
            )
        interp = grid_part.interpolator()
        edges = np.concatenate(
            ([t0], grid_part.grid[grid_part.grid > t0])
        )
        partial = _segment_quadrature(edges, lambda s: s**w * np.abs(interp(s)))
        tail_from = grid_part.t_end
    else:
        if env.valid_from > t0:
            raise EnvelopeDomainError(
                f"envelope asserted only from {env.valid_from}, certificate needs t0 = {t0}"
            )
        tail_from = t0

    if not env.integral_converges(w):
        return SummabilityReport(w, partial, 0.0, Verdict.DIVERGENT_ENVELOPE)
    if env.kind is EnvelopeKind.POWER and env.amplitude > 0.0 and tail_from <= 0.0:
        # a power-law bound blows up toward 0, so it cannot certify from t0 = 0
        return SummabilityReport(w, partial, 0.0, Verdict.DIVERGENT_ENVELOPE)
    tail = env.tail_integral(w, tail_from)
    return SummabilityReport(w, partial, tail, Verdict.CERTIFIED_FINITE)
