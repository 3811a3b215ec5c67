"""Sequence windows, decay envelopes, forward-difference calculus.

A genuinely infinite sequence is represented by a finite window of stored
values plus a caller-asserted :class:`DecayEnvelope` bounding everything
beyond the window.  Every infinite tail sum then becomes a finite partial
sum plus a closed-form upper bound, so downstream operators can report
certified brackets instead of silently truncating.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from typing import Callable

import numpy as np

from .errors import (
    EnvelopeDomainError,
    IndexRangeError,
    InsufficientDataError,
    NonIntegrableError,
    NonSummableError,
    ShapeError,
)

__all__ = [
    "SequenceWindow",
    "DecayEnvelope",
    "EnvelopeKind",
    "ExtendedNorm",
    "Interval",
    "rising_factorial",
    "forward_difference",
    "weighted_tail_sum",
    "sup_metric",
    "framed_interior",
]


# ---------------------------------------------------------------------------
# Intervals and the extended norm
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Interval:
    """A closed real interval, possibly unbounded on either side.

    Unbounded endpoints are ``-inf`` / ``+inf``; an interval with
    ``lo > hi`` is empty.
    """

    lo: float = -math.inf
    hi: float = math.inf

    def __post_init__(self):
        if math.isnan(self.lo) or math.isnan(self.hi):
            raise ValueError("interval endpoints must not be NaN")

    @classmethod
    def real_line(cls) -> "Interval":
        return cls(-math.inf, math.inf)

    @classmethod
    def empty(cls) -> "Interval":
        return cls(math.inf, -math.inf)

    @property
    def is_empty(self) -> bool:
        return self.lo > self.hi

    def contains(self, t: float) -> bool:
        return self.lo <= t <= self.hi

    def contains_all(self, values) -> bool:
        arr = np.asarray(values, dtype=float)
        return bool(np.all(arr >= self.lo) and np.all(arr <= self.hi))


def framed_interior(U: Interval, mu: float) -> Interval:
    """Points of ``U`` whose closed ``mu``-ball stays inside ``U``.

    For ``[lo, hi]`` this is ``[lo+mu, hi-mu]`` (empty once ``hi-lo < 2*mu``);
    unbounded sides stay unbounded because ``inf +- mu == inf``.
    """
    if not mu > 0:
        raise ValueError("mu must be positive")
    return Interval(U.lo + mu, U.hi - mu)


@dataclass(frozen=True)
class ExtendedNorm:
    """A sup-norm value in [0, inf], with infinity as an explicit tag.

    ``value is None`` encodes the infinite norm; floating-point ``inf``
    never enters arithmetic through this type.
    """

    value: float | None

    def __post_init__(self):
        if self.value is not None:
            if math.isnan(self.value) or self.value < 0 or math.isinf(self.value):
                raise ValueError("finite norm value must be a nonnegative real")

    @classmethod
    def finite(cls, v: float) -> "ExtendedNorm":
        return cls(float(v))

    @classmethod
    def infinite(cls) -> "ExtendedNorm":
        return cls(None)

    @property
    def is_finite(self) -> bool:
        return self.value is not None

    def __float__(self) -> float:
        if self.value is None:
            raise ValueError("norm is infinite")
        return self.value

    def _cmp_key(self, other) -> tuple[float | None, float | None]:
        if isinstance(other, ExtendedNorm):
            return self.value, other.value
        return self.value, float(other)

    def __lt__(self, other) -> bool:
        a, b = self._cmp_key(other)
        if a is None:
            return False
        if b is None:
            return True
        return a < b

    def __le__(self, other) -> bool:
        a, b = self._cmp_key(other)
        if b is None:
            return True
        if a is None:
            return False
        return a <= b

    def __gt__(self, other) -> bool:
        return not self.__le__(other)

    def __ge__(self, other) -> bool:
        return not self.__lt__(other)


# ---------------------------------------------------------------------------
# Decay envelopes
# ---------------------------------------------------------------------------


class EnvelopeKind(str, Enum):
    POWER = "power"
    GEOMETRIC = "geometric"
    ZERO = "zero"


@dataclass(frozen=True)
class DecayEnvelope:
    """Caller-asserted pointwise bound for the unseen tail of a sequence.

    ``power(C, beta)`` asserts ``|x_j| <= C * j**(-beta)``,
    ``geometric(C, q)`` asserts ``|x_j| <= C * q**j`` with ``0 < q < 1``,
    and ``zero_beyond(n0)`` asserts the tail vanishes identically.  The bound
    holds for ``j >= valid_from``; tail estimates before that point are
    refused rather than guessed.
    """

    kind: EnvelopeKind
    amplitude: float
    rate: float = 0.0
    valid_from: float = 1.0

    def __post_init__(self):
        if self.amplitude < 0 or not math.isfinite(self.amplitude):
            raise ValueError("envelope amplitude must be a finite nonnegative real")
        if self.kind is EnvelopeKind.GEOMETRIC and not (0.0 < self.rate < 1.0):
            raise ValueError("geometric envelope requires 0 < q < 1")
        if self.kind is EnvelopeKind.POWER and not math.isfinite(self.rate):
            raise ValueError("power envelope exponent must be finite")

    @classmethod
    def power(cls, C: float, beta: float, valid_from: float = 1.0) -> "DecayEnvelope":
        return cls(EnvelopeKind.POWER, float(C), float(beta), float(valid_from))

    @classmethod
    def geometric(cls, C: float, q: float, valid_from: float = 1.0) -> "DecayEnvelope":
        return cls(EnvelopeKind.GEOMETRIC, float(C), float(q), float(valid_from))

    @classmethod
    def zero_beyond(cls, start: float) -> "DecayEnvelope":
        return cls(EnvelopeKind.ZERO, 0.0, 0.0, float(start))

    def scaled(self, factor: float) -> "DecayEnvelope":
        """Envelope for ``factor * x``; the decay shape is unchanged."""
        return DecayEnvelope(self.kind, self.amplitude * abs(factor), self.rate, self.valid_from)

    def bound_at(self, j: float) -> float:
        """Pointwise bound at abscissa ``j >= valid_from``."""
        self._check_start(j)
        if self.kind is EnvelopeKind.ZERO or self.amplitude == 0.0:
            return 0.0
        if self.kind is EnvelopeKind.POWER:
            return self.amplitude * float(j) ** (-self.rate)
        return self.amplitude * math.exp(float(j) * math.log(self.rate))

    # -- convergence predicates ------------------------------------------

    def sum_converges(self, w: float) -> bool:
        """Whether ``sum j**w * env(j)`` is finite."""
        if self.kind is EnvelopeKind.POWER and self.amplitude > 0.0:
            return w - self.rate < -1.0
        return True

    def integral_converges(self, w: float) -> bool:
        """Whether ``integral s**w * env(s) ds`` is finite."""
        if self.kind is EnvelopeKind.POWER and self.amplitude > 0.0:
            return w - self.rate < -1.0
        return True

    # -- certified tail bounds -------------------------------------------

    def _check_start(self, start: float) -> None:
        if start < self.valid_from:
            raise EnvelopeDomainError(
                f"envelope asserted only from {self.valid_from}, tail requested from {start}"
            )

    def tail_sum(self, w: float, start: int) -> float:
        """Upper bound for ``sum_{j >= start} j**w * env(j)`` (integer j).

        Power envelopes use the integral comparison
        ``sum_{j > N} j**(w-beta) <= N**(w-beta+1) / (beta-w-1)``; geometric
        envelopes close the tail with a ratio bound once the term ratio
        drops below ``(1+q)/2``.
        """
        self._check_start(start)
        if start < 1:
            raise ValueError("tail sums are defined for start >= 1")
        if self.kind is EnvelopeKind.ZERO or self.amplitude == 0.0:
            return 0.0
        if self.kind is EnvelopeKind.POWER:
            if not self.sum_converges(w):
                raise NonSummableError(
                    f"sum of j**{w} against power({self.amplitude}, {self.rate}) diverges"
                )
            e = w - self.rate
            if start >= 2:
                return self.amplitude * float(start - 1) ** (e + 1.0) / (-e - 1.0)
            return self.amplitude * (1.0 + 1.0 / (-e - 1.0))
        # geometric
        q = self.rate
        if w <= 0.0:
            return self.amplitude * float(start) ** w * q**start / (1.0 - q)
        cap = (1.0 + q) / 2.0
        total = 0.0
        j = int(start)
        term = self._geom_term(w, j)
        while ((j + 1.0) / j) ** w * q > cap:
            total += term
            j += 1
            term = self._geom_term(w, j)
        return total + term / (1.0 - cap)

    def _geom_term(self, w: float, j: int) -> float:
        # exp of logs avoids overflow of j**w for large j before the decay bites
        return self.amplitude * math.exp(w * math.log(j) + j * math.log(self.rate))

    def tail_integral(self, w: float, start: float) -> float:
        """Upper bound for ``integral_{start}^inf s**w * env(s) ds``."""
        self._check_start(start)
        if self.kind is EnvelopeKind.ZERO or self.amplitude == 0.0:
            return 0.0
        if self.kind is EnvelopeKind.POWER:
            if not self.integral_converges(w):
                raise NonIntegrableError(
                    f"integral of s**{w} against power({self.amplitude}, {self.rate}) diverges"
                )
            if start <= 0.0:
                raise ValueError("power-law tail integrals require start > 0")
            e = w - self.rate
            return self.amplitude * start ** (e + 1.0) / (-e - 1.0)
        # geometric: q**s = exp(-lam*s)
        lam = -math.log(self.rate)
        if w <= 0.0:
            if start < 0.0 or (start == 0.0 and w < 0.0):
                raise ValueError("tail integrals with w < 0 require start > 0")
            return self.amplitude * start**w * math.exp(-lam * start) / lam
        head = 0.0
        lo = start
        if lo < 1.0:
            # s**w <= 1 on [start, 1] since w > 0
            head = (1.0 - lo) * math.exp(-lam * lo)
            lo = 1.0
        wc = math.ceil(w)  # s**w <= s**wc for s >= 1
        return self.amplitude * (head + _exp_moment_tail(wc, lam, lo))


def _exp_moment_tail(k: int, lam: float, T: float) -> float:
    """Exact ``integral_T^inf s**k * exp(-lam*s) ds`` for integer k >= 0."""
    acc = 0.0
    kfac = math.factorial(k)
    for i in range(k + 1):
        acc += (kfac / math.factorial(k - i)) * T ** (k - i) / lam ** (i + 1)
    return math.exp(-lam * T) * acc


# ---------------------------------------------------------------------------
# Sequence windows
# ---------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class SequenceWindow:
    """Real values stored on the integer index range ``[p, p + N]``."""

    p: int
    values: np.ndarray

    def __post_init__(self):
        if not isinstance(self.p, (int, np.integer)) or isinstance(self.p, bool):
            raise TypeError("start index p must be an integer")
        if self.p < 1:
            raise ValueError("start index p must be >= 1")
        arr = np.asarray(self.values, dtype=float)
        if arr.ndim != 1 or arr.size == 0:
            raise ValueError("window must hold at least one value")
        if not np.all(np.isfinite(arr)):
            raise ValueError("window values must be finite")
        arr = arr.copy()
        arr.flags.writeable = False
        object.__setattr__(self, "p", int(self.p))
        object.__setattr__(self, "values", arr)

    @classmethod
    def from_function(cls, fn: Callable[[int], float], p: int, length: int) -> "SequenceWindow":
        """Window of ``fn(n)`` for ``n = p .. p + length - 1``."""
        return cls(p, np.array([fn(n) for n in range(p, p + length)], dtype=float))

    def __len__(self) -> int:
        return int(self.values.size)

    @property
    def end(self) -> int:
        """Largest stored index ``p + N``."""
        return self.p + len(self) - 1

    @property
    def indices(self) -> np.ndarray:
        return np.arange(self.p, self.end + 1)

    def value_at(self, n: int) -> float:
        if not self.p <= n <= self.end:
            raise IndexRangeError(f"index {n} outside window [{self.p}, {self.end}]")
        return float(self.values[n - self.p])

    def restrict(self, n1: int, n2: int) -> "SequenceWindow":
        if not (self.p <= n1 <= n2 <= self.end):
            raise IndexRangeError(
                f"[{n1}, {n2}] is not a subrange of [{self.p}, {self.end}]"
            )
        return SequenceWindow(n1, self.values[n1 - self.p : n2 - self.p + 1])

    def abs(self) -> "SequenceWindow":
        return SequenceWindow(self.p, np.abs(self.values))


# ---------------------------------------------------------------------------
# Operations
# ---------------------------------------------------------------------------


def rising_factorial(n: int, m: int) -> int:
    """``n * (n+1) * ... * (n+m-1)``, exactly; 1 when ``m == 0``.

    Computed in arbitrary-precision integers, so the result never wraps.
    """
    if not isinstance(n, (int, np.integer)) or isinstance(n, bool):
        raise TypeError("n must be an integer")
    if not isinstance(m, (int, np.integer)) or isinstance(m, bool):
        raise TypeError("m must be an integer")
    if n < 0 or m < 0:
        raise ValueError("n and m must be nonnegative")
    out = 1
    for i in range(int(n), int(n) + int(m)):
        out *= i
    return out


def forward_difference(x: SequenceWindow, k: int) -> SequenceWindow:
    """k-fold forward difference ``(Dx)_n = x_{n+1} - x_n`` on ``[p, p+N-k]``.

    Implemented as k successive single differences, so composing
    ``forward_difference(forward_difference(x, j), k)`` reproduces
    ``forward_difference(x, j + k)`` bitwise.
    """
    if k < 0:
        raise ValueError("difference order k must be >= 0")
    if k == 0:
        return x
    if k >= len(x):
        raise InsufficientDataError(
            f"window of length {len(x)} too short for {k} differences"
        )
    vals = x.values
    for _ in range(k):
        vals = vals[1:] - vals[:-1]
    return SequenceWindow(x.p, vals)


def weighted_tail_sum(
    x: SequenceWindow, env: DecayEnvelope, w: float, n: int
) -> tuple[float, float]:
    """Certified bracket for ``sum_{j >= n} j**w * |x_j|``.

    Returns ``(value, tail_bound)``: the stored part summed exactly
    (compensated summation) and a closed-form upper bound for everything
    beyond the window, derived from the envelope.
    """
    if n < x.p:
        raise IndexRangeError(f"start {n} precedes window start {x.p}")
    if not env.sum_converges(w):
        raise NonSummableError(
            f"weight exponent {w} is not summable against the declared envelope"
        )
    lo = max(n, x.p)
    value = 0.0
    if lo <= x.end:
        js = np.arange(lo, x.end + 1, dtype=float)
        value = math.fsum(js**w * np.abs(x.values[lo - x.p :]))
    tail = env.tail_sum(w, max(n, x.end + 1))
    return value, tail


def sup_metric(f, g) -> ExtendedNorm:
    """Sup distance ``max |f - g|`` over a shared window or grid."""
    f_grid = getattr(f, "grid", None)
    g_grid = getattr(g, "grid", None)
    if f_grid is not None or g_grid is not None:
        if f_grid is None or g_grid is None or not np.array_equal(f_grid, g_grid):
            raise ShapeError("grid functions must share the same grid")
    else:
        if f.p != g.p or len(f) != len(g):
            raise ShapeError(
                f"windows [{f.p},{f.end}] and [{g.p},{g.end}] do not match"
            )
    return ExtendedNorm.finite(float(np.max(np.abs(f.values - g.values))))
