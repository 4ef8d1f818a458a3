"""Exact rational linear programming.

A dense two-phase simplex over :class:`fractions.Fraction` with Bland's
rule, so it never cycles and never rounds.  Problems here are tiny (a few
dozen variables at most), which is what makes exact arithmetic affordable.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

OPTIMAL = "optimal"
INFEASIBLE = "infeasible"
UNBOUNDED = "unbounded"

_ZERO = Fraction(0)
_ONE = Fraction(1)


@dataclass
class LPResult:
    status: str
    value: Fraction | None = None
    x: list[Fraction] = field(default_factory=list)

    @property
    def feasible(self) -> bool:
        return self.status != INFEASIBLE


class Tableau:
    """Simplex tableau in canonical form with respect to ``basis``.

    ``rows[i]`` holds the coefficients of constraint i followed by its
    right-hand side; column ``basis[i]`` is the unit vector for row i.
    """

    def __init__(self, rows: list[list[Fraction]], basis: list[int]):
        self.rows = rows
        self.basis = basis
        self.ncols = len(rows[0]) - 1 if rows else 0
        self.obj: list[Fraction] = []

    def set_objective(self, cost: Sequence[Fraction]) -> None:
        # reduced costs z_j - c_j for maximisation, last entry is the objective value
        obj = [-Fraction(c) for c in cost] + [_ZERO]
        for i, b in enumerate(self.basis):
            cb = cost[b]
            if cb:
                row = self.rows[i]
                for j, rj in enumerate(row):
                    if rj:
                        obj[j] += cb * rj
        self.obj = obj

    def pivot(self, r: int, c: int) -> None:
        prow = self.rows[r]
        p = prow[c]
        if p != 1:
            prow = [x / p for x in prow]
            self.rows[r] = prow
        nz = [j for j, x in enumerate(prow) if x]
        for i, row in enumerate(self.rows):
            if i != r:
                f = row[c]
                if f:
                    for j in nz:
                        row[j] -= f * prow[j]
        f = self.obj[c]
        if f:
            for j in nz:
                self.obj[j] -= f * prow[j]
        self.basis[r] = c

    def optimize(self, allowed: Sequence[bool] | None = None) -> str:
        """Maximise the current objective with Bland's rule."""
        while True:
            enter = -1
            for j in range(self.ncols):
                if self.obj[j] < 0 and (allowed is None or allowed[j]):
                    enter = j
                    break
            if enter < 0:
                return OPTIMAL
            leave = -1
            best = None
            for i, row in enumerate(self.rows):
                a = row[enter]
                if a > 0:
                    ratio = row[-1] / a
                    if best is None or ratio < best or (
                        ratio == best and self.basis[i] < self.basis[leave]
                    ):
                        best, leave = ratio, i
            if leave < 0:
                return UNBOUNDED
            self.pivot(leave, enter)

    def solution(self, n: int) -> list[Fraction]:
        x = [_ZERO] * n
        for i, b in enumerate(self.basis):
            if b < n:
                x[b] = self.rows[i][-1]
        return x


def linprog(
    c: Sequence,
    A_ub: Sequence[Sequence] = (),
    b_ub: Sequence = (),
    A_eq: Sequence[Sequence] = (),
    b_eq: Sequence = (),
    free: Sequence[int] = (),
) -> LPResult:
    """Maximise ``c @ x`` subject to ``A_ub x <= b_ub`` and ``A_eq x = b_eq``.

    Variables are nonnegative except those listed in ``free``.  All inputs
    are converted to Fractions; the answer is exact.
    """
    n = len(c)
    free = sorted(set(free))
    # free variables are split as x = x+ - x-, the x- parts appended after n
    nvar = n + len(free)

    def expand(row):
        row = [Fraction(v) for v in row]
        return row + [-row[j] for j in free]

    cons = [(expand(r), Fraction(b), True) for r, b in zip(A_ub, b_ub)]
    cons += [(expand(r), Fraction(b), False) for r, b in zip(A_eq, b_eq)]
    m = len(cons)
    nslack = sum(1 for _, _, ub in cons if ub)
    width = nvar + nslack + m  # artificials last
    rows: list[list[Fraction]] = []
    basis: list[int] = []
    artificial: list[int] = []
    k = nvar
    for i, (coef, rhs, ub) in enumerate(cons):
        row = coef + [_ZERO] * (nslack + m) + [rhs]
        slack = -1
        if ub:
            slack = k
            row[slack] = _ONE
            k += 1
        if rhs < 0:
            row = [-x for x in row]
        if slack >= 0 and row[slack] == 1:
            basis.append(slack)
        else:
            art = nvar + nslack + i
            row[art] = _ONE
            basis.append(art)
            artificial.append(art)
        rows.append(row)

    if m == 0:
        if any(Fraction(v) > 0 for v in c) or any(Fraction(c[j]) != 0 for j in free):
            return LPResult(UNBOUNDED)
        return LPResult(OPTIMAL, _ZERO, [_ZERO] * n)

    t = Tableau(rows, basis)
    is_art = [False] * width
    for a in artificial:
        is_art[a] = True
    if artificial:
        t.set_objective([-_ONE if is_art[j] else _ZERO for j in range(width)])
        t.optimize()
        if t.obj[-1] < 0:
            return LPResult(INFEASIBLE)
        # drive remaining artificials out of the basis, dropping redundant rows
        i = 0
        while i < len(t.rows):
            if is_art[t.basis[i]]:
                row = t.rows[i]
                col = next(
                    (j for j in range(width) if not is_art[j] and row[j] != 0), -1
                )
                if col < 0:
                    del t.rows[i]
                    del t.basis[i]
                    continue
                t.pivot(i, col)
            i += 1
    cost = expand(c) + [_ZERO] * (nslack + m)
    t.set_objective(cost)
    allowed = [not a for a in is_art]
    if t.optimize(allowed) == UNBOUNDED:
        return LPResult(UNBOUNDED)
    raw = t.solution(nvar)
    x = raw[:n]
    for k, j in enumerate(free):
        x[j] -= raw[n + k]
    return LPResult(OPTIMAL, t.obj[-1], x)


def feasible(
    A_ub: Sequence[Sequence] = (),
    b_ub: Sequence = (),
    A_eq: Sequence[Sequence] = (),
    b_eq: Sequence = (),
    free: Sequence[int] = (),
    nvars: int | None = None,
) -> bool:
    """True iff the constraint system has a solution."""
    if nvars is None:
        first = (list(A_ub) + list(A_eq))[0]
        nvars = len(first)
    return linprog([0] * nvars, A_ub, b_ub, A_eq, b_eq, free).feasible
