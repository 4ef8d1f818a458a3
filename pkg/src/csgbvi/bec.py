"""Bloated end components: hazard, trap and exit analysis, and DEFLATE.

Everything is decided on finite action supports.  Whether a mixed pair of
strategies leaves a set depends only on the supports, and whether some
optimal strategy has a given support is an LP question.

The hazard test needs more care than "optimal and non-leaving".  A strategy
rho with support S must also strictly beat every leaving tau against some
column.  That fails iff some leaving tau satisfies tau Z >= rho Z, and by LP
duality that depends on S alone: it holds iff for some maximal non-leaving
row set N containing S there are y >= 0 and w with

    (Z y)_a == w      for a in S
    (Z y)_a <= w      for a in N \\ S
    (Z y)_a <= w - 1  for a outside N.
"""

from __future__ import annotations

import os
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations
from typing import Iterable

from . import matrix_game as mg
from .graph import EcSet, as_game, find_mecs
from .lp import linprog
from .valuation import VALID_UPPER, Valuation, payoff_matrix

DEFAULT_SUPPORT_CAP = 12
_ZERO = Fraction(0)
_ONE = Fraction(1)


class SupportCapError(RuntimeError):
    """A state has more Player-R actions than support enumeration allows."""


def support_cap() -> int:
    raw = os.environ.get("CSGBVI_SUPPORT_CAP")
    return int(raw) if raw else DEFAULT_SUPPORT_CAP


@dataclass
class StateClassification:
    state: int
    hazard_supports: frozenset = frozenset()
    hazard_actions: frozenset = frozenset()
    trap_columns: frozenset = frozenset()
    defl_rows: frozenset = frozenset()
    exit_value: Fraction | None = None
    value: Fraction | None = None

    def to_json(self, g) -> dict:
        game = as_game(g)
        return {
            "state": game.states[self.state],
            "value": None if self.value is None else str(self.value),
            "hazard_supports": sorted(sorted(x) for x in self.hazard_supports),
            "hazard_actions": sorted(self.hazard_actions),
            "trap_columns": sorted(self.trap_columns),
            "defl_rows": sorted(self.defl_rows),
            "exit_value": None if self.exit_value is None else str(self.exit_value),
        }


@dataclass
class BecReport:
    mbecs: list[frozenset[int]]
    per_state: dict[int, StateClassification] = field(default_factory=dict)
    best_exit_value: list[Fraction] = field(default_factory=list)
    best_exits: list[frozenset[int]] = field(default_factory=list)

    def to_json(self, g) -> dict:
        game = as_game(g)
        name = game.states.__getitem__
        return {
            "mbecs": [
                {
                    "states": [name(s) for s in sorted(x)],
                    "best_exit_value": str(val),
                    "best_exits": [name(s) for s in sorted(ex)],
                    "states_detail": [self.per_state[s].to_json(g) for s in sorted(x)],
                }
                for x, val, ex in zip(self.mbecs, self.best_exit_value, self.best_exits)
            ]
        }


class LocalAnalysis:
    """All support-level facts about one state w.r.t. a set X and valuation v."""

    def __init__(self, g, s: int, region: Iterable[int], v):
        self.game = as_game(g)
        self.s = s
        self.region = frozenset(region)
        self.z = payoff_matrix(self.game, s, v)
        self.value = mg.solve(self.z).value
        game = self.game
        self.rows = game.actions_reach[s]
        self.cols = game.actions_safe[s]
        self.escapes = [
            [not game.delta[s][i][j].support <= self.region for j in range(len(self.cols))]
            for i in range(len(self.rows))
        ]
        self._hazard = None

    # -- leaving -------------------------------------------------------------
    def leaves(self, idx: Iterable[int]) -> bool:
        idx = list(idx)
        return all(any(self.escapes[i][j] for i in idx) for j in range(len(self.cols)))

    # -- hazard --------------------------------------------------------------
    def _hazard_lp(self, support: tuple[int, ...], keep: frozenset[int]) -> bool:
        z = self.z.payoff
        n = len(self.cols)
        a_eq, b_eq, a_ub, b_ub = [], [], [], []
        for a in range(len(self.rows)):
            row = list(z[a]) + [-_ONE]
            if a in support:
                a_eq.append(row)
                b_eq.append(_ZERO)
            elif a in keep:
                a_ub.append(row)
                b_ub.append(_ZERO)
            else:
                a_ub.append(row)
                b_ub.append(-_ONE)
        return linprog([_ZERO] * (n + 1), a_ub, b_ub, a_eq, b_eq, free=[n]).feasible

    def hazard_index_supports(self) -> list[tuple[int, ...]]:
        if self._hazard is not None:
            return self._hazard
        m = len(self.rows)
        cap = support_cap()
        if m > cap:
            raise SupportCapError(
                f"state {self.game.states[self.s]} has {m} actions, cap is {cap}"
            )
        subsets = [c for k in range(1, m + 1) for c in combinations(range(m), k)]
        staying = [c for c in subsets if not self.leaves(c)]
        maximal = [
            frozenset(c) for c in staying
            if not any(set(c) < set(d) for d in staying)
        ]
        out = []
        for sup in staying:
            labels = [self.rows[i] for i in sup]
            if not mg.optimal_support_exists(self.z, mg.ROW, labels, self.value):
                continue
            if any(set(sup) <= n and self._hazard_lp(sup, n) for n in maximal):
                out.append(sup)
        self._hazard = out
        return out

    def hazard_supports(self) -> frozenset[frozenset[str]]:
        return frozenset(
            frozenset(self.rows[i] for i in sup) for sup in self.hazard_index_supports()
        )

    def hazard_rows(self) -> frozenset[int]:
        return frozenset(i for sup in self.hazard_index_supports() for i in sup)

    # -- trap ----------------------------------------------------------------
    def trap_cols(self, hazard: Iterable[int] | None = None) -> frozenset[int]:
        hazard = self.hazard_rows() if hazard is None else frozenset(hazard)
        cand = [
            j for j in range(len(self.cols))
            if not any(self.escapes[i][j] for i in hazard)
        ]
        if not cand:
            return frozenset()
        labels = [self.cols[j] for j in cand]
        if mg.restricted_value(self.z, self.rows, labels) != self.value:
            return frozenset()
        return frozenset(
            j for j in cand
            if mg.max_prob_on_action(self.z, mg.COL, labels, self.cols[j], self.value) > 0
        )

    # -- deflating rows and exit value ---------------------------------------
    def defl_rows(self, hazard: frozenset[int], trap: frozenset[int]) -> frozenset[int]:
        if not trap:
            return frozenset()
        rest = [i for i in range(len(self.rows)) if i not in hazard]
        # any mix containing an escaping row is deflating, so every non-hazard
        # row lies in the support of some deflating strategy
        if any(self.escapes[i][j] for i in rest for j in trap):
            return frozenset(rest)
        return frozenset()

    def exit_subgame_value(self, defl: frozenset[int], trap: frozenset[int]) -> Fraction:
        """max(0, max over rho in Delta(defl) of min over optimal sigma on trap)."""
        if not defl:
            return _ZERO
        z = self.z.payoff
        m = len(self.rows)
        d = sorted(defl)
        # variables: rho_a (a in d), lambda_a (all rows), mu (free)
        # the inner minimum over the trap polytope is replaced by its LP dual
        nv = len(d) + m + 1
        mu = nv - 1
        c = [_ZERO] * len(d) + [-self.value] * m + [_ONE]
        a_ub = []
        for j in sorted(trap):
            row = [-z[a][j] for a in d] + [-z[a][j] for a in range(m)] + [_ONE]
            a_ub.append(row)
        a_eq = [[_ONE] * len(d) + [_ZERO] * (m + 1)]
        res = linprog(c, a_ub, [_ZERO] * len(a_ub), a_eq, [_ONE], free=[mu])
        return max(_ZERO, res.value)

    def classify(self) -> StateClassification:
        hazard = self.hazard_rows()
        out = StateClassification(
            self.s,
            hazard_supports=self.hazard_supports(),
            hazard_actions=frozenset(self.rows[i] for i in hazard),
            value=self.value,
        )
        trap = self.trap_cols(hazard)
        out.trap_columns = frozenset(self.cols[j] for j in trap)
        if not hazard or not trap:
            out.exit_value = self.value
            return out
        defl = self.defl_rows(hazard, trap)
        out.defl_rows = frozenset(self.rows[i] for i in defl)
        out.exit_value = self.exit_subgame_value(defl, trap)
        return out


# -- public, label-based API ---------------------------------------------------

def support_leaves(g, s: int, row_support: Iterable[str], region: Iterable[int]) -> bool:
    game = as_game(g)
    rows = game.actions_reach[s]
    idx = [rows.index(a) for a in row_support]
    if not idx:
        raise ValueError("row support must be nonempty")
    region = frozenset(region)
    return all(
        any(not game.delta[s][i][j].support <= region for i in idx)
        for j in range(len(game.actions_safe[s]))
    )


def compute_hazard(g, s: int, region: Iterable[int], v) -> frozenset[frozenset[str]]:
    return LocalAnalysis(g, s, region, v).hazard_supports()


def compute_trap(g, s: int, region: Iterable[int], v, hazard_actions: Iterable[str]) -> frozenset[str]:
    loc = LocalAnalysis(g, s, region, v)
    hazard = [loc.rows.index(a) for a in hazard_actions]
    return frozenset(loc.cols[j] for j in loc.trap_cols(hazard))


def classify_state(g, s: int, region: Iterable[int], v) -> StateClassification:
    return LocalAnalysis(g, s, region, v).classify()


def exit_value(g, s: int, region: Iterable[int], v) -> Fraction:
    return classify_state(g, s, region, v).exit_value


def best_exit(g, region: Iterable[int], v) -> tuple[Fraction, frozenset[int]]:
    region = frozenset(region)
    vals = {s: exit_value(g, s, region, v) for s in sorted(region)}
    top = max(vals.values())
    return top, frozenset(s for s, x in vals.items() if x == top)


def _states(mec) -> frozenset[int]:
    return mec.states if isinstance(mec, EcSet) else frozenset(mec)


def find_mbecs(g, mec, u) -> list[frozenset[int]]:
    """Maximal BECs inside an end component w.r.t. the valuation ``u``."""
    region = _states(mec)
    bloated = frozenset(
        s for s in region if LocalAnalysis(g, s, region, u).hazard_index_supports()
    )
    if not bloated:
        return []
    if bloated == region:
        return [region]
    out = []
    for sub in find_mecs(g, bloated):
        out.extend(find_mbecs(g, sub, u))
    return out


@dataclass
class DeflationEvent:
    states: frozenset[int]
    best_exit_value: Fraction
    best_exits: frozenset[int]
    upper: tuple[Fraction, ...]  # snapshot after lowering the BEC

    def to_json(self, g) -> dict:
        game = as_game(g)
        return {
            "bec": [game.states[s] for s in sorted(self.states)],
            "best_exit_value": str(self.best_exit_value),
            "best_exits": [game.states[s] for s in sorted(self.best_exits)],
            "upper": {game.states[s]: str(x) for s, x in enumerate(self.upper)},
        }


def _deflate(g, vals: list[Fraction], mec, events) -> None:
    for bec in find_mbecs(g, mec, vals):
        top, exits = best_exit(g, bec, vals)
        for s in bec:
            if top < vals[s]:
                vals[s] = top
        if events is not None:
            events.append(DeflationEvent(bec, top, exits, tuple(vals)))
        for sub in find_mecs(g, bec - exits):
            _deflate(g, vals, sub, events)


def deflate(g, u: Valuation, mec, events: list | None = None) -> Valuation:
    """Lower the upper bound inside every maximal BEC of ``mec`` to its best exit."""
    assert u.provenance == VALID_UPPER, (
        f"deflate expects a valid upper bound, got {u.provenance!r}"
    )
    vals = list(u.values)
    _deflate(g, vals, mec, events)
    return Valuation(vals, u.provenance)


def bec_report(g, u, mecs=None) -> BecReport:
    """Maximal BECs of every MEC with per-state classifications (no deflation)."""
    from .model import NormalizedCsg

    if mecs is None:
        inner = g.inner_states if isinstance(g, NormalizedCsg) else range(as_game(g).n)
        mecs = find_mecs(g, inner)
    report = BecReport([])
    for mec in mecs:
        for bec in find_mbecs(g, mec, u):
            report.mbecs.append(bec)
            vals = {}
            for s in sorted(bec):
                c = classify_state(g, s, bec, u)
                report.per_state[s] = c
                vals[s] = c.exit_value
            top = max(vals.values())
            report.best_exit_value.append(top)
            report.best_exits.append(frozenset(s for s, x in vals.items() if x == top))
    return report
