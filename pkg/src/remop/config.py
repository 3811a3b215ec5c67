"""Experiment configuration: JSON loading, validation, spec construction.

Schema version 1.  Every validation error carries a JSON-path style
location so a broken config points at the offending field, not at a stack
trace.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import ConfigError
from .quadrature import QuadratureConfig
from .registry import FAMILY_NAMES, NONLINEARITY_NAMES, CoefficientFamily, Nonlinearity, make_family, make_nonlinearity
from .sequences import Interval, SequenceWindow
from .solver_continuous import OdeSpec, make_geometric_grid
from .solver_discrete import DifferenceEquationSpec

__all__ = ["ExperimentConfig", "load_config", "build_difference_spec", "build_ode_spec"]

KINDS = ("difference", "ode", "identity-suite")


@dataclass(frozen=True)
class GridControls:
    delta: float = 0.05
    t_end: float = 30.0
    first_step: float | None = None


@dataclass(frozen=True)
class ExperimentConfig:
    kind: str
    out_dir: str | None = None
    tol: float = 1e-10
    max_iter: int = 200
    window: int = 200
    # problem data (difference / ode kinds)
    m: int = 1
    p: int = 1
    t0: float = 0.0
    alpha: float = 0.0
    mu: float = 1.0
    M: float | None = None
    L: float | None = None
    U: Interval = field(default_factory=Interval.real_line)
    f: Nonlinearity | None = None
    a: CoefficientFamily | None = None
    b: CoefficientFamily | None = None
    y: CoefficientFamily | None = None
    grid: GridControls = field(default_factory=GridControls)
    quadrature: QuadratureConfig = field(default_factory=QuadratureConfig)
    raw: dict = field(default_factory=dict)


def _expect(obj: dict, key: str, types, where: str, default=None, required=True):
    if key not in obj:
        if required:
            raise ConfigError(f"$.{where}{key}" if where else f"$.{key}", "missing required field")
        return default
    val = obj[key]
    if types is not None and not isinstance(val, types):
        tn = " or ".join(t.__name__ for t in (types if isinstance(types, tuple) else (types,)))
        raise ConfigError(f"$.{where}{key}" if where else f"$.{key}", f"expected {tn}")
    return val


def _number(obj, key, where, required=True, default=None, positive=False, nonneg=False):
    val = _expect(obj, key, (int, float), where, default=default, required=required)
    if val is None:
        return default
    if isinstance(val, bool):
        raise ConfigError(f"$.{where}{key}", "expected a number")
    v = float(val)
    if not math.isfinite(v):
        raise ConfigError(f"$.{where}{key}", "must be finite")
    if positive and not v > 0:
        raise ConfigError(f"$.{where}{key}", "must be positive")
    if nonneg and v < 0:
        raise ConfigError(f"$.{where}{key}", "must be nonnegative")
    return v


def _integer(obj, key, where, required=True, default=None, minimum=None):
    val = _expect(obj, key, int, where, default=default, required=required)
    if val is None:
        return default
    if isinstance(val, bool):
        raise ConfigError(f"$.{where}{key}", "expected an integer")
    if minimum is not None and val < minimum:
        raise ConfigError(f"$.{where}{key}", f"must be >= {minimum}")
    return int(val)


def _interval(obj, key, where) -> Interval:
    if key not in obj or obj[key] is None:
        return Interval.real_line()
    val = obj[key]
    if not isinstance(val, list) or len(val) != 2:
        raise ConfigError(f"$.{where}{key}", "expected [lo, hi] with null for an unbounded side")
    lo = -math.inf if val[0] is None else float(val[0])
    hi = math.inf if val[1] is None else float(val[1])
    return Interval(lo, hi)


def _term(obj, key, where, maker, known: dict, required=True):
    spec = _expect(obj, key, dict, where, required=required)
    if spec is None:
        return None
    loc = f"$.{key}"
    fam = spec.get("family")
    if not isinstance(fam, str):
        raise ConfigError(f"{loc}.family", "missing or non-string family name")
    if fam not in known:
        raise ConfigError(f"{loc}.family", f"unknown family '{fam}' (choose from {sorted(known)})")
    params = {k: v for k, v in spec.items() if k != "family"}
    try:
        return maker(fam, **params)
    except (ValueError, TypeError, KeyError) as exc:
        raise ConfigError(loc, f"bad parameters for family '{fam}': {exc}") from exc


def load_config(path: str | Path) -> ExperimentConfig:
    """Read and validate an experiment configuration file."""
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ConfigError("$", f"cannot read config file: {exc}") from exc
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"$ (line {exc.lineno}, col {exc.colno})", f"invalid JSON: {exc.msg}") from exc
    if not isinstance(data, dict):
        raise ConfigError("$", "top level must be an object")

    schema = data.get("schema")
    if schema != 1:
        raise ConfigError("$.schema", "missing or unsupported schema version (expected 1)")
    kind = _expect(data, "kind", str, "")
    if kind not in KINDS:
        raise ConfigError("$.kind", f"unknown kind '{kind}' (choose from {KINDS})")

    out_dir = _expect(data, "out_dir", str, "", required=False)
    tol = _number(data, "tol", "", required=False, default=1e-10, positive=True)
    max_iter = _integer(data, "max_iter", "", required=False, default=200, minimum=1)
    window = _integer(data, "window", "", required=False, default=200, minimum=8)

    quad_raw = _expect(data, "quadrature", dict, "", required=False) or {}
    quadrature = QuadratureConfig(
        abs_tol=_number(quad_raw, "abs_tol", "quadrature.", required=False, default=1e-10, positive=True),
        max_subdivisions=_integer(quad_raw, "max_subdivisions", "quadrature.", required=False, default=14, minimum=1),
        nodes=_integer(quad_raw, "nodes", "quadrature.", required=False, default=16, minimum=2),
    )

    if kind == "identity-suite":
        return ExperimentConfig(
            kind=kind, out_dir=out_dir, tol=tol, max_iter=max_iter,
            window=window, quadrature=quadrature, raw=data,
        )

    m = _integer(data, "m", "", minimum=1)
    alpha = _number(data, "alpha", "", required=False, default=0.0)
    if alpha > 0:
        raise ConfigError("$.alpha", "decay exponent must be <= 0")
    mu = _number(data, "mu", "", positive=True)
    U = _interval(data, "U", "")
    f = _term(data, "f", "", make_nonlinearity, NONLINEARITY_NAMES)
    a = _term(data, "a", "", make_family, FAMILY_NAMES)
    b = _term(data, "b", "", make_family, FAMILY_NAMES)
    y = _term(data, "y", "", make_family, FAMILY_NAMES)

    M = _number(data, "M", "", required=False, default=None)
    if M is None:
        if f.bound is None:
            raise ConfigError("$.M", f"family '{f.name}' has no global bound: declare M explicitly")
        M = max(1.0, f.bound)
    if M < 1:
        raise ConfigError("$.M", "declared bound M must be >= 1")
    L = _number(data, "L", "", required=False, default=None)
    if L is None:
        L = f.lipschitz

    common = dict(
        kind=kind, out_dir=out_dir, tol=tol, max_iter=max_iter, window=window,
        m=m, alpha=alpha, mu=mu, M=M, L=L, U=U, f=f, a=a, b=b, y=y,
        quadrature=quadrature, raw=data,
    )

    if kind == "difference":
        p = _integer(data, "p", "", required=False, default=1, minimum=1)
        if a.name == "power" and p < 1:
            raise ConfigError("$.p", "power family needs indices >= 1")
        return ExperimentConfig(p=p, **common)

    t0 = _number(data, "t0", "", required=False, default=0.0, nonneg=True)
    grid_raw = _expect(data, "grid", dict, "", required=False) or {}
    grid = GridControls(
        delta=_number(grid_raw, "delta", "grid.", required=False, default=0.05, positive=True),
        t_end=_number(grid_raw, "t_end", "grid.", required=False, default=30.0, positive=True),
        first_step=_number(grid_raw, "first_step", "grid.", required=False, default=None, positive=True),
    )
    if grid.t_end <= t0:
        raise ConfigError("$.grid.t_end", "must exceed t0")
    if a.name == "power" and t0 <= 0:
        raise ConfigError("$.t0", "power-family coefficients need t0 > 0")
    return ExperimentConfig(t0=t0, grid=grid, **common)


def build_difference_spec(cfg: ExperimentConfig) -> DifferenceEquationSpec:
    ns = np.arange(cfg.p, cfg.p + cfg.window, dtype=float)
    a_win = SequenceWindow(cfg.p, np.asarray(cfg.a.term(ns), dtype=float))
    b_win = SequenceWindow(cfg.p, np.asarray(cfg.b.term(ns), dtype=float))
    y_win = SequenceWindow(cfg.p, np.asarray(cfg.y.term(ns), dtype=float))
    fn = cfg.f.fn
    return DifferenceEquationSpec(
        m=cfg.m,
        a=a_win,
        a_env=cfg.a.envelope(valid_from=cfg.p),
        b=b_win,
        f=lambda n, x: fn(float(n), x),
        M=cfg.M,
        U=cfg.U,
        mu=cfg.mu,
        alpha=cfg.alpha,
        y=y_win,
        lipschitz=cfg.L,
    )


def build_ode_spec(cfg: ExperimentConfig) -> OdeSpec:
    grid = make_geometric_grid(cfg.t0, cfg.grid.t_end, cfg.grid.delta, cfg.grid.first_step)
    return OdeSpec(
        m=cfg.m,
        t0=cfg.t0,
        a=cfg.a.term,
        a_env=cfg.a.envelope(valid_from=cfg.t0),
        b=cfg.b.term,
        f=cfg.f.fn,
        M=cfg.M,
        U=cfg.U,
        mu=cfg.mu,
        alpha=cfg.alpha,
        y=cfg.y.term,
        grid=grid,
        quad=cfg.quadrature,
        lipschitz=cfg.L,
    )
