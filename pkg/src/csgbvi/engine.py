"""Bellman operator, lower/upper iteration and the bounded value iteration loop."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping

from . import matrix_game as mg
from .bec import DeflationEvent, deflate
from .graph import find_mecs
from .model import NormalizedCsg
from .valuation import (
    LOWER,
    NAIVE_UPPER,
    VALID_UPPER,
    Valuation,
    expected,
    initial_lower,
    initial_upper,
    payoff_matrix,
)

BVI = "bvi"
NAIVE = "naive"
LOWER_ONLY = "lower-only"
MODES = (BVI, LOWER_ONLY, NAIVE)

ALL_STATES = "all-states"
INITIAL = "initial"
SCOPES = (ALL_STATES, INITIAL)

EXACT = "exact"
FLOAT = "float"
SNAP_TOLERANCE = Fraction(1, 10**9)
DEFAULT_MAX_ITERS = 10**6


@dataclass
class IterationRecord:
    index: int
    lower: tuple[Fraction, ...]
    upper: tuple[Fraction, ...] | None  # after deflation
    upper_after_bellman: tuple[Fraction, ...] | None = None
    events: list[DeflationEvent] = field(default_factory=list)

    def to_json(self, g: NormalizedCsg) -> dict:
        names = g.game.states
        out = {
            "iteration": self.index,
            "lower": {names[s]: str(x) for s, x in enumerate(self.lower)},
        }
        if self.upper is not None:
            out["upper_after_bellman"] = {
                names[s]: str(x) for s, x in enumerate(self.upper_after_bellman)
            }
            out["upper"] = {names[s]: str(x) for s, x in enumerate(self.upper)}
        out["deflations"] = [e.to_json(g) for e in self.events]
        return out


@dataclass
class BviResult:
    lower: Valuation
    upper: Valuation | None
    iterations: int
    epsilon: Fraction
    trace: list[IterationRecord]
    converged: bool
    mode: str = BVI

    def gap(self, s: int) -> Fraction | None:
        if self.upper is None:
            return None
        return self.upper[s] - self.lower[s]


def pre_local(g, v, s: int, rho: Mapping, sigma: Mapping) -> Fraction:
    """Expected next-step valuation at ``s`` under local strategies rho, sigma."""
    game = g.game if isinstance(g, NormalizedCsg) else g
    total = Fraction(0)
    for i, a in enumerate(game.actions_reach[s]):
        pa = Fraction(rho.get(a, 0))
        if not pa:
            continue
        for j, b in enumerate(game.actions_safe[s]):
            pb = Fraction(sigma.get(b, 0))
            if pb:
                total += pa * pb * expected(game.delta[s][i][j], v)
    return total


def pre_operator(g: NormalizedCsg, v: Valuation) -> Valuation:
    """One Bellman update; sinks keep their value."""
    sinks = g.sinks
    vals = [
        v[s] if s in sinks else mg.solve(payoff_matrix(g, s, v)).value
        for s in range(g.game.n)
    ]
    return Valuation(vals, v.provenance)


def run_lower(g: NormalizedCsg, iters: int) -> Valuation:
    v = initial_lower(g)
    for _ in range(iters):
        v = pre_operator(g, v)
    return v


def run_naive_upper(g: NormalizedCsg, iters: int) -> Valuation:
    v = initial_upper(g).retag(NAIVE_UPPER)
    for _ in range(iters):
        v = pre_operator(g, v)
    return v


def simplest_between(lo: Fraction, hi: Fraction) -> Fraction:
    """The fraction with the smallest denominator in the closed interval [lo, hi]."""
    if lo > hi:
        lo, hi = hi, lo
    if lo <= 0 <= hi:
        return Fraction(0)
    if hi < 0:
        return -simplest_between(-hi, -lo)
    fl = lo.numerator // lo.denominator
    if Fraction(fl) == lo:
        return lo
    if fl + 1 <= hi:
        return Fraction(fl + 1)
    # lo and hi share the integer part; recurse on the reciprocals of the tails
    rest = simplest_between(1 / (hi - fl), 1 / (lo - fl))
    return fl + 1 / rest


def snap(x: float, tol: Fraction = SNAP_TOLERANCE) -> Fraction:
    f = Fraction(x)
    return simplest_between(f - tol, f + tol)


def round_down(x: Fraction, bits: int) -> Fraction:
    scale = 1 << bits
    return Fraction((x.numerator * scale) // x.denominator, scale)


def round_up(x: Fraction, bits: int) -> Fraction:
    scale = 1 << bits
    return Fraction(-((-x.numerator * scale) // x.denominator), scale)


def _outward(v: Valuation, bits: int | None, up: bool) -> Valuation:
    if bits is None:
        return v
    r = round_up if up else round_down
    return Valuation([r(x, bits) for x in v], v.provenance)


def _scope_states(g: NormalizedCsg, scope: str) -> list[int]:
    if scope == ALL_STATES:
        return list(range(g.game.n))
    if scope == INITIAL:
        return [g.initial_state]
    raise ValueError(f"unknown termination scope {scope!r}")


def bvi(
    g: NormalizedCsg,
    epsilon,
    max_iters: int | None = None,
    *,
    mode: str = BVI,
    termination: str = ALL_STATES,
    arithmetic: str = EXACT,
    keep_trace: bool = True,
    precision_bits: int | None = None,
) -> BviResult:
    """Iterate lower and upper bounds until they are ``epsilon`` apart.

    In ``bvi`` mode every maximal end component is deflated after each
    Bellman update.  ``naive`` skips deflation, and ``lower-only`` iterates
    only from below and stops when successive lower bounds are within
    ``epsilon`` (which proves nothing about the value).

    Exact denominators can grow by a constant factor in bit length per
    iteration.  With ``precision_bits`` set, L is rounded down and U up to
    a multiple of ``2**-precision_bits`` after every update; both bounds
    stay sound and monotone.
    """
    epsilon = Fraction(epsilon)
    if epsilon <= 0:
        raise ValueError("epsilon must be positive")
    if mode not in MODES:
        raise ValueError(f"unknown mode {mode!r}")
    if max_iters is None:
        max_iters = DEFAULT_MAX_ITERS
    if precision_bits is not None and precision_bits < 1:
        raise ValueError("precision_bits must be positive")
    watch = _scope_states(g, termination)
    if arithmetic == FLOAT:
        return _bvi_float(g, epsilon, max_iters, mode, watch, keep_trace)
    if arithmetic != EXACT:
        raise ValueError(f"unknown arithmetic {arithmetic!r}")

    mecs = find_mecs(g, g.inner_states) if mode == BVI else []
    lower = initial_lower(g)
    upper = None
    if mode == BVI:
        upper = initial_upper(g)
    elif mode == NAIVE:
        upper = initial_upper(g).retag(NAIVE_UPPER)
    trace: list[IterationRecord] = []
    k = 0
    converged = False
    while k < max_iters:
        prev = lower
        lower = _outward(pre_operator(g, lower), precision_bits, up=False)
        events: list[DeflationEvent] = []
        after = None
        if upper is not None:
            upper = _outward(pre_operator(g, upper), precision_bits, up=True)
            after = upper.values
            for mec in mecs:
                upper = deflate(g, upper, mec, events)
            upper = _outward(upper, precision_bits, up=True)
        if keep_trace:
            trace.append(IterationRecord(
                k, lower.values, None if upper is None else upper.values, after, events
            ))
        k += 1
        if upper is None:
            done = max(lower[s] - prev[s] for s in watch) <= epsilon
        else:
            done = max(upper[s] - lower[s] for s in watch) <= epsilon
        if done:
            converged = True
            break
    return BviResult(lower, upper, k, epsilon, trace, converged, mode)


def _bvi_float(g, epsilon, max_iters, mode, watch, keep_trace) -> BviResult:
    import numpy as np

    from .kernels import PackedGame

    packed = PackedGame(g)
    mecs = find_mecs(g, g.inner_states) if mode == BVI else []
    lo = np.array([float(x) for x in initial_lower(g)])
    hi = None if mode == LOWER_ONLY else np.array([float(x) for x in initial_upper(g)])
    eps = float(epsilon)
    trace: list[IterationRecord] = []
    k = 0
    converged = False
    tag = VALID_UPPER if mode == BVI else NAIVE_UPPER

    def rational(arr):
        return tuple(snap(float(x)) for x in arr)

    while k < max_iters:
        prev = lo
        lo = packed.sweep(lo)
        events: list[DeflationEvent] = []
        after = None
        if hi is not None:
            hi = packed.sweep(hi)
            if mecs or keep_trace:
                after = rational(hi)
            if mecs:
                u = Valuation(after, tag)
                for mec in mecs:
                    u = deflate(g, u, mec, events)
                hi = np.minimum(hi, [float(x) for x in u])
        if keep_trace:
            trace.append(IterationRecord(
                k, rational(lo), None if hi is None else rational(hi), after, events
            ))
        k += 1
        if hi is None:
            done = max(lo[s] - prev[s] for s in watch) <= eps
        else:
            done = max(hi[s] - lo[s] for s in watch) <= eps
        if done:
            converged = True
            break
    lower = Valuation(rational(lo), LOWER)
    upper = None if hi is None else Valuation(rational(hi), tag)
    return BviResult(lower, upper, k, epsilon, trace, converged, mode)
