"""Batch command-line front end.

``remop run <config.json>`` executes one experiment and writes a
structured ``report.json`` plus flat CSV tables into the output directory.
Exit status: 0 converged (or suite completed), 2 hypothesis check failed,
3 iteration budget exhausted, 1 usage or configuration error.
"""

from __future__ import annotations

import argparse
import sys
import time
from importlib.metadata import PackageNotFoundError, version
from pathlib import Path

import numpy as np

from .config import ExperimentConfig, build_difference_spec, build_ode_spec, load_config
from .errors import ConfigError, RemopError
from .quadrature import QuadratureConfig
from .registry import list_registry
from .remainder_continuous import derivative_identity_check, fubini_check, rm_cont
from .remainder_discrete import RemainderInput, check_difference_identity
from .report import fmt, write_report_json, write_table
from .sequences import DecayEnvelope, SequenceWindow
from .solver_continuous import solve_ode
from .solver_discrete import SolveStatus, solve

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_HYPOTHESIS = 2
EXIT_MAX_ITER = 3

_STATUS_EXIT = {
    SolveStatus.CONVERGED: EXIT_OK,
    SolveStatus.HYPOTHESIS_FAILED: EXIT_HYPOTHESIS,
    SolveStatus.MAX_ITERATIONS: EXIT_MAX_ITER,
}


def _package_version() -> str:
    try:
        return version("remop")
    except PackageNotFoundError:
        return "unknown"


class _Parser(argparse.ArgumentParser):
    # argparse exits with status 2 on usage errors, which collides with the
    # hypothesis-failed status; remap to 1.
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _build_parser() -> _Parser:
    parser = _Parser(prog="remop", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="execute an experiment config")
    run.add_argument("config", help="path to a schema-1 JSON config")
    run.add_argument("--out-dir", help="directory for report.json and CSV tables")
    run.add_argument("--tol", type=float, help="override the convergence tolerance")
    run.add_argument("--max-iter", type=int, help="override the iteration budget")

    sub.add_parser("list-registry", help="list named nonlinearities and coefficient families")
    return parser


def main(argv=None) -> int:
    ns = _build_parser().parse_args(argv)
    if ns.command == "list-registry":
        sys.stdout.write(list_registry())
        return EXIT_OK
    try:
        return _run(ns)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except RemopError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


def entrypoint() -> None:
    sys.exit(main())


def _run(ns) -> int:
    cfg = load_config(ns.config)
    if ns.tol is not None:
        if not ns.tol > 0:
            raise ConfigError("--tol", "must be positive")
        cfg = _override(cfg, tol=ns.tol)
    if ns.max_iter is not None:
        if ns.max_iter < 1:
            raise ConfigError("--max-iter", "must be >= 1")
        cfg = _override(cfg, max_iter=ns.max_iter)

    out_dir = Path(ns.out_dir or cfg.out_dir or f"{Path(ns.config).stem}_out")
    out_dir.mkdir(parents=True, exist_ok=True)

    if cfg.kind == "difference":
        return _run_difference(cfg, out_dir)
    if cfg.kind == "ode":
        return _run_ode(cfg, out_dir)
    return _run_identity_suite(cfg, out_dir)


def _override(cfg: ExperimentConfig, **changes) -> ExperimentConfig:
    from dataclasses import replace

    return replace(cfg, **changes)


def _meta(started: float, cfg: ExperimentConfig) -> dict:
    return {
        "package_version": _package_version(),
        "elapsed_seconds": time.perf_counter() - started,
        "config_echo": cfg.raw,
    }


def _run_difference(cfg: ExperimentConfig, out_dir: Path) -> int:
    started = time.perf_counter()
    spec = build_difference_spec(cfg)
    result = solve(spec, tol=cfg.tol, max_iter=cfg.max_iter)
    rep = result.report
    payload = {
        "schema": 1,
        "kind": cfg.kind,
        "certificate": {
            "weighted_sum_bound": rep.weighted_sum_bound,
            "margin": rep.margin,
            "weighted_sum_within_margin": rep.sum_within_margin,
            "containment_ok": rep.containment_ok,
            "approx_solution_deviation": rep.approx_solution_deviation,
            "approx_solution_ok": rep.approx_solution_ok,
            "f_bound_ok": rep.f_bound_ok,
            "failures": list(rep.failures),
            "passed": rep.passed,
        },
        "solve": {
            "status": result.status.value,
            "iterations": result.iterations,
            "residual_max": result.residual_max,
            "final_gap": result.trace[-1] if result.trace else None,
            "truncation_bound": result.truncation_bound,
        },
        "tables": {"deviation": "deviation.csv", "trace": "trace.csv"},
        "meta": _meta(started, cfg),
    }
    write_report_json(out_dir / "report.json", payload)
    write_table(out_dir / "deviation.csv", ("n_or_t", "value"), result.deviation_profile)
    write_table(
        out_dir / "trace.csv",
        ("n_or_t", "value"),
        [(k + 1, g) for k, g in enumerate(result.trace)],
    )
    print(
        f"difference: status={result.status.value} iterations={result.iterations} "
        f"certified_bound={fmt(rep.weighted_sum_bound)} -> {out_dir}"
    )
    return _STATUS_EXIT[result.status]


def _run_ode(cfg: ExperimentConfig, out_dir: Path) -> int:
    started = time.perf_counter()
    spec = build_ode_spec(cfg)
    result = solve_ode(spec, tol=cfg.tol, max_iter=cfg.max_iter)
    rep = result.report
    payload = {
        "schema": 1,
        "kind": cfg.kind,
        "certificate": {
            "weighted_integral_bound": rep.integral_bound,
            "margin": rep.margin,
            "weighted_integral_within_margin": rep.integral_within_margin,
            "containment_ok": rep.containment_ok,
            "approx_solution_deviation": rep.approx_solution_deviation,
            "approx_solution_ok": rep.approx_solution_ok,
            "f_bound_ok": rep.f_bound_ok,
            "failures": list(rep.failures),
            "passed": rep.passed,
        },
        "solve": {
            "status": result.status.value,
            "iterations": result.iterations,
            "residual_max": result.residual_max,
            "final_gap": result.trace[-1] if result.trace else None,
            "quad_error_estimate": result.quad_error_estimate,
        },
        "tables": {"deviation": "deviation.csv", "trace": "trace.csv"},
        "meta": _meta(started, cfg),
    }
    write_report_json(out_dir / "report.json", payload)
    write_table(out_dir / "deviation.csv", ("n_or_t", "value"), result.deviation_profile)
    write_table(
        out_dir / "trace.csv",
        ("n_or_t", "value"),
        [(k + 1, g) for k, g in enumerate(result.trace)],
    )
    print(
        f"ode: status={result.status.value} iterations={result.iterations} "
        f"certified_bound={fmt(rep.integral_bound)} -> {out_dir}"
    )
    return _STATUS_EXIT[result.status]


def _identity_suite_rows(window: int, quad: QuadratureConfig) -> list[tuple[str, float]]:
    """Max deviations of every operator identity on canonical inputs."""
    rows: list[tuple[str, float]] = []

    # discrete ladder and inversion on a geometric input
    x = SequenceWindow(1, 0.5 ** np.arange(1, window + 1, dtype=float))
    env = DecayEnvelope.geometric(1.0, 0.5)
    hi = min(30, window // 2)
    for m in (1, 2, 3, 4):
        rin = RemainderInput(x, env, m)
        for k in range(0, m + 1):
            dev = check_difference_identity(rin, k, (1, hi))
            name = "discrete_inversion" if k == m else "discrete_ladder"
            rows.append((f"{name}_m{m}_k{k}", dev))

    # continuous derivative ladder and inversion on exponential decay
    def fexp(s):
        return np.exp(-s)

    env_exp = DecayEnvelope.geometric(1.0, float(np.exp(-1.0)), valid_from=0.0)
    for m in (1, 2, 3):
        for k in range(0, m + 1):
            dev = derivative_identity_check(fexp, m, k, 1.0, quad, env=env_exp, t_end=45.0)
            name = "continuous_inversion" if k == m else "continuous_ladder"
            rows.append((f"{name}_m{m}_k{k}", dev))

    # eigen identity of exponential decay under every order
    for m in (1, 2, 3):
        for t in (0.5, 1.0, 2.0):
            value, _ = rm_cont(fexp, m, t, quad, env=env_exp, t_end=45.0)
            rows.append((f"exp_eigen_m{m}_t{fmt(t)}", abs(value - float(np.exp(-t)))))

    # order swap (nested tail integral vs collapsed kernel)
    cases = [
        ("one", lambda s: np.ones_like(np.asarray(s, dtype=float))),
        ("s", lambda s: np.asarray(s, dtype=float)),
        ("exp", fexp),
    ]
    for label, fn in cases:
        for (a, b) in ((0.0, 1.0), (1.0, 3.0)):
            for power in (0, 1, 2):
                dev = fubini_check(fn, a, b, power, quad)
                rows.append((f"order_swap_{label}_a{fmt(a)}_b{fmt(b)}_p{power}", dev))
    return rows


def _run_identity_suite(cfg: ExperimentConfig, out_dir: Path) -> int:
    started = time.perf_counter()
    rows = _identity_suite_rows(cfg.window, cfg.quadrature)
    payload = {
        "schema": 1,
        "kind": cfg.kind,
        "checks": {name: dev for name, dev in rows},
        "max_deviation": max(dev for _, dev in rows),
        "tables": {"identities": "identities.csv"},
        "meta": _meta(started, cfg),
    }
    write_report_json(out_dir / "report.json", payload)
    write_table(out_dir / "identities.csv", ("check", "max_deviation"), rows)
    print(f"identity-suite: {len(rows)} checks, max deviation {fmt(payload['max_deviation'])} -> {out_dir}")
    return EXIT_OK


if __name__ == "__main__":
    entrypoint()
