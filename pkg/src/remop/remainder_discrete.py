"""Discrete iterated remainder operator.

For a summable sequence the order-m remainder at index n is the weighted
tail sum

    (r^m x)_n = sum_{j >= n} binom(j - n + m - 1, m - 1) * x_j,

the m-fold iterate of plain tail summation.  It inverts the m-th forward
difference up to the sign ``(-1)**m`` among sequences vanishing at
infinity.  All values are reported together with a certified truncation
bound derived from the input's decay envelope.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .errors import EnvelopeDomainError, IndexRangeError, InsufficientDataError, NonSummableError
from .sequences import DecayEnvelope, SequenceWindow, forward_difference, weighted_tail_sum

__all__ = [
    "RemainderInput",
    "SummabilityReport",
    "Verdict",
    "rm_value",
    "rm_window",
    "rm_truncation_bound",
    "check_difference_identity",
    "summability_certificate",
]


class Verdict(str, Enum):
    CERTIFIED_FINITE = "certified-finite"
    DIVERGENT_ENVELOPE = "divergent-envelope"


@dataclass(frozen=True)
class SummabilityReport:
    """Outcome of a weighted-series convergence check.

    When the verdict is certified-finite, ``partial + tail_bound`` is an
    upper bound for the full series ``sum j**exponent * |x_j|``.
    """

    exponent: float
    partial: float
    tail_bound: float
    verdict: Verdict

    def __post_init__(self):
        if self.partial < 0 or self.tail_bound < 0:
            raise ValueError("partial and tail_bound must be nonnegative")

    @property
    def certified(self) -> bool:
        return self.verdict is Verdict.CERTIFIED_FINITE

    @property
    def bound(self) -> float:
        if not self.certified:
            raise NonSummableError("no certified bound: envelope diverges")
        return self.partial + self.tail_bound


@dataclass(frozen=True)
class RemainderInput:
    """A window plus envelope on which the order-m remainder is summable."""

    x: SequenceWindow
    env: DecayEnvelope
    m: int

    def __post_init__(self):
        if self.m < 1:
            raise ValueError("remainder order m must be >= 1")
        if not self.env.sum_converges(self.m - 1):
            raise NonSummableError(
                f"envelope does not make sum j**{self.m - 1} * |x_j| finite"
            )
        if self.env.valid_from > self.x.end + 1:
            raise EnvelopeDomainError(
                "envelope must be asserted from the first index beyond the window"
            )


def _kernel_weights(m: int, count: int) -> np.ndarray:
    """Tail-sum weights binom(d + m - 1, m - 1) for offsets d = 0 .. count-1.

    math.comb is exact in big integers; each weight is converted to float
    once, so there is no cumulative drift for long windows.
    """
    mm = m - 1
    return np.array([math.comb(d + mm, mm) for d in range(count)], dtype=float)


def rm_truncation_bound(rin: RemainderInput) -> float:
    """Certified bound for the part of the remainder beyond the window.

    Uses ``binom(j - n + m - 1, m - 1) <= j**(m-1)`` for ``j >= n >= 1``, so
    one envelope tail covers every evaluation index at once.
    """
    return rin.env.tail_sum(rin.m - 1, rin.x.end + 1)


def rm_value(rin: RemainderInput, n: int) -> tuple[float, float]:
    """Remainder value at index ``n`` with its truncation error bound."""
    x = rin.x
    if n < x.p:
        raise IndexRangeError(f"evaluation index {n} precedes window start {x.p}")
    bound = rm_truncation_bound(rin)
    if n > x.end:
        return 0.0, bound
    vals = x.values[n - x.p :]
    weights = _kernel_weights(rin.m, vals.size)
    return math.fsum(weights * vals), bound


def rm_window(rin: RemainderInput, span: tuple[int, int]) -> SequenceWindow:
    """Remainder values on ``[n1, n2]``; the shared truncation bound is
    available via :func:`rm_truncation_bound`."""
    n1, n2 = span
    x = rin.x
    if not (x.p <= n1 <= n2 <= x.end):
        raise IndexRangeError(
            f"span [{n1}, {n2}] must lie inside the window [{x.p}, {x.end}]"
        )
    weights = _kernel_weights(rin.m, x.end - n1 + 1)
    out = np.empty(n2 - n1 + 1)
    for i, n in enumerate(range(n1, n2 + 1)):
        vals = x.values[n - x.p :]
        out[i] = math.fsum(weights[: vals.size] * vals)
    return SequenceWindow(n1, out)


def check_difference_identity(
    rin: RemainderInput, k: int, span: tuple[int, int]
) -> float:
    """Max deviation of ``D^k (r^m x)`` from ``(-1)**k * (r^(m-k) x)`` on span.

    With ``r^0 x = x``; ``k = m`` is the inversion identity
    ``D^m r^m x = (-1)**m x``.  On a stored window the identity holds for
    the zero-extended sequence exactly, so the deviation measures pure
    floating-point noise.
    """
    if not 0 <= k <= rin.m:
        raise ValueError(f"k must lie in [0, {rin.m}]")
    n1, n2 = span
    if n2 + k > rin.x.end:
        raise InsufficientDataError(
            f"span end {n2} leaves no room for {k} differences inside the window"
        )
    lhs = forward_difference(rm_window(rin, (n1, n2 + k)), k)
    if k == rin.m:
        rhs = rin.x.restrict(n1, n2)
    else:
        rhs = rm_window(RemainderInput(rin.x, rin.env, rin.m - k), (n1, n2))
    sign = -1.0 if k % 2 else 1.0
    return float(np.max(np.abs(lhs.values - sign * rhs.values)))


def summability_certificate(
    env: DecayEnvelope, x: SequenceWindow, m: int, alpha: float
) -> SummabilityReport:
    """Convergence verdict and bound for ``sum n**(m-1-alpha) * |x_n|``.

    Divergence of the envelope is a verdict, not an error: the report then
    carries the partial sum with a zero tail bound and no certification.
    """
    if m < 1:
        raise ValueError("order m must be >= 1")
    if alpha > 0:
        raise ValueError("decay exponent alpha must be <= 0")
    w = m - 1 - alpha
    if not env.sum_converges(w):
        partial, _ = weighted_tail_sum(x, DecayEnvelope.zero_beyond(x.end + 1), w, x.p)
        return SummabilityReport(w, partial, 0.0, Verdict.DIVERGENT_ENVELOPE)
    partial, tail = weighted_tail_sum(x, env, w, x.p)
    return SummabilityReport(w, partial, tail, Verdict.CERTIFIED_FINITE)
