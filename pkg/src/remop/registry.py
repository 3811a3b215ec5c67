"""Named nonlinearities and coefficient families for declarative configs.

Keeping ``f`` in a registry (instead of accepting arbitrary expressions)
means every family ships with a documentable sup bound ``M`` and Lipschitz
constant ``L`` where they exist globally; ``poly`` has neither, so configs
using it must declare ``M`` themselves.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .sequences import DecayEnvelope

__all__ = [
    "Nonlinearity",
    "CoefficientFamily",
    "make_nonlinearity",
    "make_family",
    "list_registry",
    "NONLINEARITY_NAMES",
    "FAMILY_NAMES",
]


@dataclass(frozen=True)
class Nonlinearity:
    """A registered ``f(t, x)`` with its known bounds, if any."""

    name: str
    label: str
    fn: Callable[[float, float], float]
    bound: float | None  # sup of |f| over all of R in the second argument
    lipschitz: float | None
    params: dict = field(default_factory=dict)


def make_nonlinearity(name: str, **params) -> Nonlinearity:
    if name == "constant":
        c = float(params.pop("c"))
        _reject_extra(params)
        return Nonlinearity(
            "constant", f"constant(c={c:g})", lambda t, x: c, max(1.0, abs(c)), 0.0, {"c": c}
        )
    if name == "sin":
        _reject_extra(params)
        return Nonlinearity("sin", "sin", lambda t, x: math.sin(x), 1.0, 1.0)
    if name == "atan":
        _reject_extra(params)
        return Nonlinearity("atan", "atan", lambda t, x: math.atan(x), math.pi / 2, 1.0)
    if name == "logistic":
        k = float(params.pop("k"))
        _reject_extra(params)
        if k <= 0:
            raise ValueError("logistic steepness k must be positive")
        return Nonlinearity(
            "logistic",
            f"logistic(k={k:g})",
            lambda t, x: 1.0 / (1.0 + math.exp(-k * x)),
            1.0,
            k / 4.0,
            {"k": k},
        )
    if name == "poly":
        coeffs = [float(c) for c in params.pop("coeffs")]
        _reject_extra(params)
        if not coeffs:
            raise ValueError("poly requires at least one coefficient")

        def fn(t: float, x: float, _c=tuple(coeffs)) -> float:
            acc = 0.0
            for c in reversed(_c):
                acc = acc * x + c
            return acc

        label = "poly(" + ",".join(f"{c:g}" for c in coeffs) + ")"
        return Nonlinearity("poly", label, fn, None, None, {"coeffs": list(coeffs)})
    raise ValueError(f"unknown nonlinearity family '{name}'")


@dataclass(frozen=True)
class CoefficientFamily:
    """A named coefficient sequence/function with its honest decay envelope.

    ``term`` accepts scalars and numpy arrays alike.
    """

    name: str
    label: str
    term: Callable[[float], float]
    params: dict = field(default_factory=dict)

    def envelope(self, valid_from: float = 1.0) -> DecayEnvelope:
        name, p = self.name, self.params
        if name == "geometric":
            return DecayEnvelope.geometric(abs(p["C"]), p["q"], valid_from)
        if name == "power":
            return DecayEnvelope.power(abs(p["C"]), p["beta"], valid_from)
        if name == "exp":
            return DecayEnvelope.geometric(abs(p["C"]), math.exp(-p["lam"]), valid_from)
        if name == "zero":
            return DecayEnvelope.zero_beyond(valid_from)
        # constant: |c| * j**0, honestly divergent against nonnegative weights
        return DecayEnvelope.power(abs(p["c"]), 0.0, valid_from)


def make_family(name: str, **params) -> CoefficientFamily:
    if name == "geometric":
        C, q = float(params.pop("C")), float(params.pop("q"))
        _reject_extra(params)
        if not 0.0 < q < 1.0:
            raise ValueError("geometric family requires 0 < q < 1")
        return CoefficientFamily(
            "geometric", f"geometric(C={C:g},q={q:g})", lambda t: C * q**t, {"C": C, "q": q}
        )
    if name == "power":
        C, beta = float(params.pop("C")), float(params.pop("beta"))
        _reject_extra(params)
        return CoefficientFamily(
            "power",
            f"power(C={C:g},beta={beta:g})",
            lambda t: C * t ** (-beta),
            {"C": C, "beta": beta},
        )
    if name == "exp":
        C, lam = float(params.pop("C")), float(params.pop("lam"))
        _reject_extra(params)
        if lam <= 0:
            raise ValueError("exp family requires lam > 0")
        return CoefficientFamily(
            "exp", f"exp(C={C:g},lam={lam:g})", lambda t: C * np.exp(-lam * t), {"C": C, "lam": lam}
        )
    if name == "zero":
        _reject_extra(params)
        return CoefficientFamily("zero", "zero", lambda t: 0.0 * t, {})
    if name == "constant":
        c = float(params.pop("c"))
        _reject_extra(params)
        return CoefficientFamily("constant", f"constant(c={c:g})", lambda t: c + 0.0 * t, {"c": c})
    raise ValueError(f"unknown coefficient family '{name}'")


def _reject_extra(params: dict) -> None:
    if params:
        raise ValueError(f"unexpected parameters: {sorted(params)}")


NONLINEARITY_NAMES: dict[str, str] = {
    "atan": "f(t, x) = atan(x)                [|f| <= pi/2, Lipschitz 1]",
    "constant": "constant(c): f(t, x) = c          [|f| <= max(1, |c|), Lipschitz 0]",
    "logistic": "logistic(k): f(t, x) = 1/(1+e^(-k x))  [|f| <= 1, Lipschitz k/4]",
    "poly": "poly(coeffs): f(t, x) = sum c_i x^i    [no global bound: declare M]",
    "sin": "f(t, x) = sin(x)                  [|f| <= 1, Lipschitz 1]",
}

FAMILY_NAMES: dict[str, str] = {
    "constant": "constant(c): term(t) = c               [envelope c * t^0, non-decaying]",
    "exp": "exp(C, lam): term(t) = C e^(-lam t)    [geometric envelope, q = e^(-lam)]",
    "geometric": "geometric(C, q): term(t) = C q^t       [geometric envelope]",
    "power": "power(C, beta): term(t) = C t^(-beta)  [power envelope]",
    "zero": "zero: term(t) = 0                      [zero envelope]",
}


def list_registry() -> str:
    """Deterministic plain-text listing of every registered name."""
    lines = ["nonlinearities (f):"]
    for name in sorted(NONLINEARITY_NAMES):
        lines.append(f"  {name:<10} {NONLINEARITY_NAMES[name]}")
    lines.append("coefficient families (a, b, y):")
    for name in sorted(FAMILY_NAMES):
        lines.append(f"  {name:<10} {FAMILY_NAMES[name]}")
    return "\n".join(lines) + "\n"
