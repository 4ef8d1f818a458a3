"""Valuations (state -> [0, 1]) and the local matrix games they induce."""

from __future__ import annotations

from fractions import Fraction
from typing import Iterable, Sequence

from .matrix_game import MatrixGame
from .model import Csg, NormalizedCsg

LOWER = "lower"
NAIVE_UPPER = "naive-upper"
VALID_UPPER = "valid-upper"
ORACLE = "oracle"
USER = "user"


class Valuation(Sequence):
    """An immutable vector of rationals indexed by state, with a provenance tag.

    The tag records where the vector came from; deflation is only meaningful
    on valid upper bounds and checks for that tag.
    """

    __slots__ = ("values", "provenance")

    def __init__(self, values: Iterable, provenance: str = USER):
        self.values = tuple(Fraction(v) for v in values)
        self.provenance = provenance

    def __getitem__(self, i):
        return self.values[i]

    def __len__(self):
        return len(self.values)

    def __eq__(self, other):
        if isinstance(other, Valuation):
            return self.values == other.values
        return NotImplemented

    def __hash__(self):
        return hash(self.values)

    def __repr__(self):
        return f"Valuation([{', '.join(map(str, self.values))}], {self.provenance!r})"

    def replace(self, updates: dict, provenance: str | None = None) -> "Valuation":
        vals = list(self.values)
        for k, v in updates.items():
            vals[k] = Fraction(v)
        return Valuation(vals, provenance or self.provenance)

    def retag(self, provenance: str) -> "Valuation":
        return Valuation(self.values, provenance)

    def __le__(self, other: Sequence) -> bool:
        return all(a <= b for a, b in zip(self.values, other))

    def __ge__(self, other: Sequence) -> bool:
        return all(a >= b for a, b in zip(self.values, other))

    def as_dict(self, g) -> dict[str, Fraction]:
        game = g.game if isinstance(g, NormalizedCsg) else g
        return dict(zip(game.states, self.values))


def initial_lower(g: NormalizedCsg) -> Valuation:
    return Valuation(
        [1 if s == g.target_sink else 0 for s in range(g.game.n)], LOWER
    )


def initial_upper(g: NormalizedCsg) -> Valuation:
    return Valuation(
        [0 if s == g.losing_sink else 1 for s in range(g.game.n)], VALID_UPPER
    )


def expected(dist, v: Sequence[Fraction]) -> Fraction:
    return sum((p * v[t] for t, p in dist.items()), Fraction(0))


def payoff_matrix(g, s: int, v: Sequence[Fraction]) -> MatrixGame:
    """The one-shot game Z_v(s) with entries E[v(next state)]."""
    game: Csg = g.game if isinstance(g, NormalizedCsg) else g
    payoff = tuple(tuple(expected(d, v) for d in row) for row in game.delta[s])
    return MatrixGame(game.actions_reach[s], game.actions_safe[s], payoff)
