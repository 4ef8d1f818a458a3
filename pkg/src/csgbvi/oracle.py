"""Independent value oracles for small games, used by the test-suite.

None of this touches the Bellman iteration or deflation code.  Values are
computed from concrete stationary strategies, each evaluated exactly on
the Markov chain or MDP it induces.
"""

from __future__ import annotations

from fractions import Fraction
from functools import lru_cache
from itertools import product
from math import comb
from typing import Sequence

import numpy as np

from .lp import linprog
from .model import Csg, NormalizedCsg
from .valuation import ORACLE, Valuation

MAX_STATES = 8
MAX_ACTIONS = 4
MAX_GRID_POINTS = 2_000_000

_ZERO = Fraction(0)
_ONE = Fraction(1)


class OracleLimitError(ValueError):
    """The game is too large for brute-force evaluation."""


def _game(g) -> Csg:
    return g.game if isinstance(g, NormalizedCsg) else g


def _solve_linear(a: list[list[Fraction]], b: list[Fraction]) -> list[Fraction]:
    """Gauss-Jordan elimination on a nonsingular system."""
    n = len(b)
    m = [row[:] + [rhs] for row, rhs in zip(a, b)]
    for col in range(n):
        piv = next(r for r in range(col, n) if m[r][col] != 0)
        m[col], m[piv] = m[piv], m[col]
        p = m[col][col]
        m[col] = [x / p for x in m[col]]
        for r in range(n):
            if r != col and m[r][col] != 0:
                f = m[r][col]
                m[r] = [x - f * y for x, y in zip(m[r], m[col])]
    return [m[r][n] for r in range(n)]


def chain_reach(chain: Sequence[dict[int, Fraction]], targets: frozenset[int]) -> list[Fraction]:
    """Exact reachability probabilities of ``targets`` in a Markov chain."""
    n = len(chain)
    # states that can reach a target at all
    can = set(targets)
    changed = True
    while changed:
        changed = False
        for s in range(n):
            if s not in can and any(t in can for t in chain[s]):
                can.add(s)
                changed = True
    unknown = [s for s in range(n) if s in can and s not in targets]
    pos = {s: k for k, s in enumerate(unknown)}
    a = [[_ZERO] * len(unknown) for _ in unknown]
    b = [_ZERO] * len(unknown)
    for s, k in pos.items():
        a[k][k] += 1
        for t, p in chain[s].items():
            if t in targets:
                b[k] += p
            elif t in pos:
                a[k][pos[t]] -= p
    x = _solve_linear(a, b) if unknown else []
    out = [_ONE if s in targets else _ZERO for s in range(n)]
    for s, k in pos.items():
        out[s] = x[k]
    return out


def _pure_chain(g: Csg, rho: Sequence[int], sigma: Sequence[int]):
    return [dict(g.delta[s][rho[s]][sigma[s]].items()) for s in range(g.n)]


def _pure_profiles(g: Csg, player: str):
    acts = g.actions_reach if player == "R" else g.actions_safe
    return product(*[range(len(acts[s])) for s in range(g.n)])


def pure_upper_value(g) -> list[Fraction]:
    """min over pure memoryless S of max over pure memoryless R, per state."""
    g = _game(g)
    best = None
    for sigma in _pure_profiles(g, "S"):
        worst = None
        for rho in _pure_profiles(g, "R"):
            v = chain_reach(_pure_chain(g, rho, sigma), g.targets)
            worst = v if worst is None else [max(x, y) for x, y in zip(worst, v)]
        best = worst if best is None else [min(x, y) for x, y in zip(best, worst)]
    return best


def pure_lower_value(g) -> list[Fraction]:
    """max over pure memoryless R of min over pure memoryless S, per state."""
    g = _game(g)
    best = None
    for rho in _pure_profiles(g, "R"):
        worst = None
        for sigma in _pure_profiles(g, "S"):
            v = chain_reach(_pure_chain(g, rho, sigma), g.targets)
            worst = v if worst is None else [min(x, y) for x, y in zip(worst, v)]
        best = worst if best is None else [max(x, y) for x, y in zip(best, worst)]
    return best


def sure_losing_states(g) -> frozenset[int]:
    """States where the pure upper value is 0 (Player S can avoid F surely)."""
    return frozenset(s for s, x in enumerate(pure_upper_value(g)) if x == 0)


def _mdp_min_reach(g: Csg, rho: Sequence[dict[int, Fraction]]) -> list[Fraction]:
    """Player S's optimal reachability probability against the stationary rho."""
    n = g.n
    targets = g.targets
    # mixed one-step distributions for every Player-S action
    moves = []
    for s in range(n):
        per_b = []
        for j in range(len(g.actions_safe[s])):
            acc: dict[int, Fraction] = {}
            for i, p in rho[s].items():
                for t, q in g.delta[s][i][j].items():
                    acc[t] = acc.get(t, _ZERO) + p * q
            per_b.append(acc)
        moves.append(per_b)
    # states where S can avoid the targets forever get 0
    zero = set(range(n)) - set(targets)
    changed = True
    while changed:
        changed = False
        for s in list(zero):
            if not any(set(d) <= zero for d in moves[s]):
                zero.discard(s)
                changed = True
    rest = [s for s in range(n) if s not in zero and s not in targets]
    out = [_ONE if s in targets else _ZERO for s in range(n)]
    if not rest:
        return out
    pos = {s: k for k, s in enumerate(rest)}
    # the unique fixpoint is the largest x with x_s <= sum_t P(s,b,t) x_t + P(s,b,F)
    a_ub, b_ub = [], []
    for s in rest:
        for d in moves[s]:
            row = [_ZERO] * len(rest)
            row[pos[s]] += 1
            rhs = _ZERO
            for t, p in d.items():
                if t in pos:
                    row[pos[t]] -= p
                elif t in targets:
                    rhs += p
            a_ub.append(row)
            b_ub.append(rhs)
    res = linprog([_ONE] * len(rest), a_ub, b_ub)
    for s, k in pos.items():
        out[s] = res.x[k]
    return out


@lru_cache(maxsize=64)
def _grid(m: int, res: int) -> np.ndarray:
    """All integer vectors of length m summing to res."""
    if m == 1:
        return np.array([[res]], dtype=np.int64)
    parts = []
    for first in range(res, -1, -1):
        tail = _grid(m - 1, res - first)
        parts.append(np.hstack([np.full((len(tail), 1), first, dtype=np.int64), tail]))
    return np.vstack(parts)


def strategy_value(g, rho: Sequence[dict]) -> list[Fraction]:
    """Exact guaranteed reachability of a stationary Player-R strategy.

    ``rho[s]`` maps action labels (or indices) to probabilities.
    """
    g = _game(g)
    norm = []
    for s in range(g.n):
        labels = g.actions_reach[s]
        norm.append({
            (labels.index(a) if isinstance(a, str) else a): Fraction(p)
            for a, p in rho[s].items() if p
        })
    return _mdp_min_reach(g, norm)


def oracle_value(g, grid_resolution: int) -> Valuation:
    """Best guarantee of Player R over stationary strategies on a 1/res grid.

    Fixing a grid strategy turns the game into an MDP for Player S, and the
    maximum over all grid strategies is the value of the turn-based game in
    which R first commits to a grid point.  That value is found exactly by
    strategy improvement for R: evaluate the current strategy against S's
    best response, switch states to strictly better grid points, repeat.
    The result is a lower bound on the game value.
    """
    g = _game(g)
    res = int(grid_resolution)
    if res < 1:
        raise ValueError("grid resolution must be positive")
    if g.n > MAX_STATES:
        raise OracleLimitError(f"{g.n} states exceed the limit of {MAX_STATES}")
    for s in range(g.n):
        if max(len(g.actions_reach[s]), len(g.actions_safe[s])) > MAX_ACTIONS:
            raise OracleLimitError(f"state {g.states[s]} has too many actions")
        if comb(res + len(g.actions_reach[s]) - 1, len(g.actions_reach[s]) - 1) > MAX_GRID_POINTS:
            raise OracleLimitError(f"grid at state {g.states[s]} is too large")

    grids = [_grid(len(g.actions_reach[s]), res) for s in range(g.n)]
    # start from the first action everywhere
    choice = [0] * g.n

    def rho_of(s, k):
        return {i: Fraction(int(c), res) for i, c in enumerate(grids[s][k]) if c}

    while True:
        v = _mdp_min_reach(g, [rho_of(s, choice[s]) for s in range(g.n)])
        switched = False
        for s in range(g.n):
            if s in g.targets or len(grids[s]) == 1:
                continue
            z = [
                [sum((p * v[t] for t, p in d.items()), _ZERO) for d in row]
                for row in g.delta[s]
            ]
            zf = np.array([[float(x) for x in r] for r in z])
            guar = (grids[s] @ zf).min(axis=1) / res
            top = guar.max()
            cand = np.flatnonzero(guar >= top - 1e-9)
            best_k, best_val = choice[s], v[s]
            for k in cand[:64]:
                counts = grids[s][k]
                exact = min(
                    sum((Fraction(int(counts[i]), res) * z[i][j] for i in range(len(z))), _ZERO)
                    for j in range(len(z[0]))
                )
                if exact > best_val:
                    best_k, best_val = int(k), exact
            if best_k != choice[s]:
                choice[s] = best_k
                switched = True
        if not switched:
            return Valuation(v, ORACLE)
