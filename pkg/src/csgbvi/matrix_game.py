"""Zero-sum matrix games with exact rational payoffs.

Player R picks a row and maximises, Player S picks a column and minimises.
Besides the plain value, BEC classification needs a handful of questions
about the polytopes of optimal strategies; those are small LPs as well.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Hashable, Iterable, Sequence

from .lp import INFEASIBLE, Tableau, linprog

ROW = "row"
COL = "col"

_ZERO = Fraction(0)
_ONE = Fraction(1)


class InfeasibleStrategyError(ValueError):
    """No optimal strategy exists within the requested action set."""


@dataclass(frozen=True)
class MatrixGame:
    rows: tuple
    cols: tuple
    payoff: tuple  # tuple of row tuples of Fractions

    def __post_init__(self):
        if not self.rows or not self.cols:
            raise ValueError("matrix game needs at least one row and one column")
        if len(self.payoff) != len(self.rows) or any(
            len(r) != len(self.cols) for r in self.payoff
        ):
            raise ValueError("payoff matrix is not rows x cols")

    @classmethod
    def of(cls, payoff: Sequence[Sequence], rows=None, cols=None) -> "MatrixGame":
        payoff = tuple(tuple(Fraction(x) for x in r) for r in payoff)
        if rows is None:
            rows = tuple(range(len(payoff)))
        if cols is None:
            cols = tuple(range(len(payoff[0]) if payoff else 0))
        return cls(tuple(rows), tuple(cols), payoff)

    @property
    def shape(self) -> tuple[int, int]:
        return len(self.rows), len(self.cols)

    def entry(self, r: Hashable, c: Hashable) -> Fraction:
        return self.payoff[self.rows.index(r)][self.cols.index(c)]

    def transpose_negated(self) -> "MatrixGame":
        """The same game seen from Player S (who now maximises)."""
        t = tuple(
            tuple(-self.payoff[i][j] for i in range(len(self.rows)))
            for j in range(len(self.cols))
        )
        return MatrixGame(self.cols, self.rows, t)

    def restrict(self, rows: Iterable, cols: Iterable) -> "MatrixGame":
        rset, cset = set(rows), set(cols)
        ri = [i for i, r in enumerate(self.rows) if r in rset]
        ci = [j for j, c in enumerate(self.cols) if c in cset]
        if not ri or not ci:
            raise ValueError("restriction to an empty action set")
        return MatrixGame(
            tuple(self.rows[i] for i in ri),
            tuple(self.cols[j] for j in ci),
            tuple(tuple(self.payoff[i][j] for j in ci) for i in ri),
        )


@dataclass(frozen=True)
class GameSolution:
    value: Fraction
    row_strategy: dict
    col_strategy: dict


def _saddle(z: MatrixGame) -> GameSolution | None:
    p = z.payoff
    row_mins = [min(r) for r in p]
    col_maxs = [max(p[i][j] for i in range(len(p))) for j in range(len(z.cols))]
    lo, hi = max(row_mins), min(col_maxs)
    if lo != hi:
        return None
    i = row_mins.index(lo)
    j = col_maxs.index(hi)
    return GameSolution(lo, {z.rows[i]: _ONE}, {z.cols[j]: _ONE})


def solve(z: MatrixGame) -> GameSolution:
    """Value and one optimal vertex strategy per player.

    After shifting all payoffs to be at least 1, the column player's LP
    ``max sum(y) s.t. Z y <= 1, y >= 0`` starts feasible at the slack
    basis.  The row strategy is read off the final reduced costs of the
    slack columns, i.e. from the dual.
    """
    s = _saddle(z)
    if s is not None:
        return s
    m, n = z.shape
    shift = _ONE - min(min(r) for r in z.payoff)
    rows = []
    for i in range(m):
        row = [z.payoff[i][j] + shift for j in range(n)]
        row += [_ONE if k == i else _ZERO for k in range(m)]
        row.append(_ONE)
        rows.append(row)
    t = Tableau(rows, [n + i for i in range(m)])
    t.set_objective([_ONE] * n + [_ZERO] * m)
    t.optimize()
    total = t.obj[-1]
    scale = 1 / total
    y = t.solution(n)
    col = {z.cols[j]: y[j] * scale for j in range(n) if y[j]}
    row = {z.rows[i]: t.obj[n + i] * scale for i in range(m) if t.obj[n + i]}
    return GameSolution(scale - shift, row, col)


def value(z: MatrixGame) -> Fraction:
    return solve(z).value


def row_lp_value(z: MatrixGame) -> Fraction:
    """max v s.t. v <= sum_i x_i z_ij for all j, x a distribution."""
    m, n = z.shape
    c = [_ZERO] * m + [_ONE]
    a_ub = [[-z.payoff[i][j] for i in range(m)] + [_ONE] for j in range(n)]
    res = linprog(c, a_ub, [0] * n, [[_ONE] * m + [_ZERO]], [1], free=[m])
    return res.value


def col_lp_value(z: MatrixGame) -> Fraction:
    """min w s.t. w >= sum_j y_j z_ij for all i, y a distribution."""
    m, n = z.shape
    c = [_ZERO] * n + [-_ONE]
    a_ub = [list(z.payoff[i]) + [-_ONE] for i in range(m)]
    res = linprog(c, a_ub, [0] * m, [[_ONE] * n + [_ZERO]], [1], free=[n])
    return -res.value


def restricted_value(z: MatrixGame, rows: Iterable, cols: Iterable) -> Fraction:
    """Value of the sub-game on ``rows`` x ``cols``."""
    return solve(z.restrict(rows, cols)).value


def _optimality_system(z: MatrixGame, side: str, allowed: Sequence, val: Fraction):
    """Constraints (A_ub, b_ub, A_eq, b_eq) over the probabilities of ``allowed``
    that characterise optimal strategies of ``side`` supported in ``allowed``."""
    if side == ROW:
        idx = [z.rows.index(a) for a in allowed]
        a_ub = [[-z.payoff[i][j] for i in idx] for j in range(len(z.cols))]
        b_ub = [-val] * len(z.cols)
    elif side == COL:
        idx = [z.cols.index(b) for b in allowed]
        a_ub = [[z.payoff[i][j] for j in idx] for i in range(len(z.rows))]
        b_ub = [val] * len(z.rows)
    else:
        raise ValueError(f"side must be {ROW!r} or {COL!r}")
    return a_ub, b_ub, [[_ONE] * len(idx)], [_ONE]


def _ordered(z: MatrixGame, side: str, actions: Iterable) -> list:
    labels = z.rows if side == ROW else z.cols
    wanted = set(actions)
    unknown = wanted.difference(labels)
    if unknown:
        raise ValueError(f"unknown actions {sorted(map(str, unknown))}")
    return [a for a in labels if a in wanted]


def optimal_support_exists(
    z: MatrixGame, side: str, support: Iterable, val: Fraction | None = None
) -> bool:
    """Is there an optimal strategy for ``side`` whose support is exactly ``support``?

    Maximises the smallest probability on ``support`` over the optimal
    strategies living on it; the answer is yes iff that optimum is positive.
    """
    support = _ordered(z, side, support)
    if not support:
        raise ValueError("support must be nonempty")
    if val is None:
        val = solve(z).value
    k = len(support)
    a_ub, b_ub, a_eq, b_eq = _optimality_system(z, side, support, val)
    # variables: p_1..p_k, t
    a_ub = [r + [_ZERO] for r in a_ub]
    a_ub += [[-_ONE if i == j else _ZERO for i in range(k)] + [_ONE] for j in range(k)]
    b_ub = list(b_ub) + [_ZERO] * k
    a_eq = [r + [_ZERO] for r in a_eq]
    res = linprog([_ZERO] * k + [_ONE], a_ub, b_ub, a_eq, b_eq)
    return res.status != INFEASIBLE and res.value > 0


def max_prob_on_action(
    z: MatrixGame, side: str, allowed: Iterable, action, val: Fraction | None = None
) -> Fraction:
    """Largest probability an optimal strategy supported in ``allowed`` puts on ``action``."""
    allowed = _ordered(z, side, allowed)
    if action not in allowed:
        raise ValueError(f"action {action!r} not in allowed set")
    if val is None:
        val = solve(z).value
    a_ub, b_ub, a_eq, b_eq = _optimality_system(z, side, allowed, val)
    c = [_ONE if a == action else _ZERO for a in allowed]
    res = linprog(c, a_ub, b_ub, a_eq, b_eq)
    if res.status == INFEASIBLE:
        raise InfeasibleStrategyError(
            f"no optimal {side} strategy supported in {[str(a) for a in allowed]}"
        )
    return res.value
