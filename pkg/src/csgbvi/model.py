"""Concurrent stochastic game model, JSON input and normalisation."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Iterable, Mapping

SINK_ACTION = "-"


class ModelError(ValueError):
    """The model document is malformed or violates a game invariant."""


class Distribution:
    """Finite probability distribution over state indices with exact weights."""

    __slots__ = ("_items",)

    def __init__(self, entries: Mapping[int, Fraction] | Iterable[tuple[int, Fraction]]):
        items = dict(entries)
        self._items = tuple(sorted((int(k), Fraction(v)) for k, v in items.items()))
        for _, p in self._items:
            if not 0 < p <= 1:
                raise ModelError(f"probability {p} outside (0, 1]")
        total = sum((p for _, p in self._items), Fraction(0))
        if total != 1:
            raise ModelError(f"distribution sums to {total}")

    @classmethod
    def dirac(cls, state: int) -> "Distribution":
        return cls({state: Fraction(1)})

    def items(self):
        return self._items

    @property
    def support(self) -> frozenset[int]:
        return frozenset(k for k, _ in self._items)

    def get(self, state: int) -> Fraction:
        for k, p in self._items:
            if k == state:
                return p
        return Fraction(0)

    def __eq__(self, other):
        return isinstance(other, Distribution) and self._items == other._items

    def __hash__(self):
        return hash(self._items)

    def __repr__(self):
        inner = ", ".join(f"{k}: {p}" for k, p in self._items)
        return f"Distribution({{{inner}}})"


@dataclass(frozen=True)
class Csg:
    """A concurrent stochastic game with a reachability objective.

    ``delta[s][i][j]`` is the distribution for the i-th Player-R action and
    the j-th Player-S action at state s.
    """

    states: tuple[str, ...]
    actions_reach: tuple[tuple[str, ...], ...]
    actions_safe: tuple[tuple[str, ...], ...]
    delta: tuple[tuple[tuple[Distribution, ...], ...], ...]
    initial_state: int
    targets: frozenset[int]
    _index: dict = field(default=None, compare=False, repr=False)

    def __post_init__(self):
        n = len(self.states)
        if len(set(self.states)) != n:
            raise ModelError("duplicate state names")
        if not (len(self.actions_reach) == len(self.actions_safe) == len(self.delta) == n):
            raise ModelError("per-state tables do not match the number of states")
        for s in range(n):
            if not self.actions_reach[s] or not self.actions_safe[s]:
                raise ModelError(f"state {self.states[s]}: empty enabled-action set")
            rows = self.delta[s]
            if len(rows) != len(self.actions_reach[s]) or any(
                len(r) != len(self.actions_safe[s]) for r in rows
            ):
                raise ModelError(f"state {self.states[s]}: transition table is not complete")
            for r in rows:
                for d in r:
                    if not d.support <= set(range(n)):
                        raise ModelError(f"state {self.states[s]}: successor out of range")
        if not 0 <= self.initial_state < n:
            raise ModelError("initial state out of range")
        if not self.targets <= set(range(n)):
            raise ModelError("target out of range")
        object.__setattr__(self, "_index", {name: i for i, name in enumerate(self.states)})

    @property
    def n(self) -> int:
        return len(self.states)

    def index(self, name: str) -> int:
        try:
            return self._index[name]
        except KeyError:
            raise KeyError(f"unknown state {name!r}") from None

    def dest(self, s: int, i: int, j: int) -> frozenset[int]:
        return self.delta[s][i][j].support

    @property
    def transitions(self) -> dict[tuple[int, str, str], Distribution]:
        """(state, a_R, a_S) -> distribution, keyed by action labels."""
        out = {}
        for s in range(self.n):
            for i, a in enumerate(self.actions_reach[s]):
                for j, b in enumerate(self.actions_safe[s]):
                    out[(s, a, b)] = self.delta[s][i][j]
        return out

    def is_absorbing(self, s: int) -> bool:
        return all(d.support == {s} for row in self.delta[s] for d in row)


@dataclass(frozen=True)
class NormalizedCsg:
    game: Csg
    target_sink: int
    losing_sink: int
    winning_region: frozenset[int]  # indices of the original game
    state_map: tuple[int, ...]  # original index -> normalized index
    original: Csg

    @property
    def sinks(self) -> frozenset[int]:
        return frozenset((self.target_sink, self.losing_sink))

    @property
    def inner_states(self) -> list[int]:
        return [s for s in range(self.game.n) if s not in self.sinks]

    @property
    def initial_state(self) -> int:
        return self.game.initial_state


def parse_prob(raw) -> Fraction:
    if isinstance(raw, bool):
        raise ModelError(f"bad probability {raw!r}")
    if isinstance(raw, (int, Fraction)):
        return Fraction(raw)
    if isinstance(raw, float):
        # only reachable when callers bypass parse_csg; go through repr for exactness
        return Fraction(repr(raw))
    if isinstance(raw, str):
        try:
            return Fraction(raw.strip())
        except (ValueError, ZeroDivisionError):
            raise ModelError(f"bad probability {raw!r}") from None
    raise ModelError(f"bad probability {raw!r}")


def _require(doc: dict, key: str, kind: type):
    if key not in doc:
        raise ModelError(f"missing top-level key {key!r}")
    val = doc[key]
    if not isinstance(val, kind):
        raise ModelError(f"{key!r} must be a {kind.__name__}")
    return val


def parse_csg(text: str) -> Csg:
    """Parse the JSON model format into a validated :class:`Csg`."""
    try:
        # decimal literals are kept as strings so that 0.2 becomes exactly 1/5
        doc = json.loads(text, parse_float=str)
    except json.JSONDecodeError as e:
        raise ModelError(f"malformed document: {e}") from None
    if not isinstance(doc, dict):
        raise ModelError("model must be a JSON object")
    names = _require(doc, "states", list)
    if not names or not all(isinstance(x, str) for x in names):
        raise ModelError("'states' must be a nonempty list of names")
    if len(set(names)) != len(names):
        raise ModelError("duplicate state names")
    index = {name: i for i, name in enumerate(names)}

    def lookup(name, where):
        if name not in index:
            raise ModelError(f"{where}: undeclared state {name!r}")
        return index[name]

    initial = lookup(_require(doc, "initial", str), "initial")
    targets = frozenset(lookup(t, "targets") for t in _require(doc, "targets", list))

    n = len(names)
    reach: list[list[str]] = [[] for _ in range(n)]
    safe: list[list[str]] = [[] for _ in range(n)]
    table: dict[tuple[int, str, str], Distribution] = {}
    for k, rec in enumerate(_require(doc, "transitions", list)):
        where = f"transition #{k}"
        if not isinstance(rec, dict):
            raise ModelError(f"{where}: not an object")
        try:
            src, a, b, to = rec["from"], rec["aR"], rec["aS"], rec["to"]
        except KeyError as e:
            raise ModelError(f"{where}: missing field {e.args[0]!r}") from None
        s = lookup(src, where)
        where = f"{where} (from {src}, aR {a}, aS {b})"
        if not isinstance(a, str) or not isinstance(b, str):
            raise ModelError(f"{where}: action labels must be strings")
        if (s, a, b) in table:
            raise ModelError(f"{where}: duplicate joint action")
        if not isinstance(to, list) or not to:
            raise ModelError(f"{where}: 'to' must be a nonempty list")
        entries: dict[int, Fraction] = {}
        for e in to:
            if not isinstance(e, dict) or "state" not in e or "prob" not in e:
                raise ModelError(f"{where}: successor entries need 'state' and 'prob'")
            t = lookup(e["state"], where)
            if t in entries:
                raise ModelError(f"{where}: successor {e['state']!r} listed twice")
            try:
                entries[t] = parse_prob(e["prob"])
            except ModelError as err:
                raise ModelError(f"{where}: {err}") from None
        try:
            table[(s, a, b)] = Distribution(entries)
        except ModelError as err:
            raise ModelError(f"{where}: {err}") from None
        if a not in reach[s]:
            reach[s].append(a)
        if b not in safe[s]:
            safe[s].append(b)

    delta = []
    for s in range(n):
        if not reach[s]:
            raise ModelError(f"state {names[s]}: empty enabled-action set")
        rows = []
        for a in reach[s]:
            row = []
            for b in safe[s]:
                if (s, a, b) not in table:
                    raise ModelError(f"state {names[s]}: no transition for ({a}, {b})")
                row.append(table[(s, a, b)])
            rows.append(tuple(row))
        delta.append(tuple(rows))
    return Csg(
        tuple(names),
        tuple(map(tuple, reach)),
        tuple(map(tuple, safe)),
        tuple(delta),
        initial,
        targets,
    )


def load_csg(path: str | Path) -> Csg:
    with open(path, encoding="utf-8") as fh:
        return parse_csg(fh.read())


def dump_csg(g: Csg) -> str:
    """Serialise back to the JSON model format (probabilities as "p/q")."""
    transitions = []
    for s in range(g.n):
        for i, a in enumerate(g.actions_reach[s]):
            for j, b in enumerate(g.actions_safe[s]):
                transitions.append({
                    "from": g.states[s], "aR": a, "aS": b,
                    "to": [{"state": g.states[t], "prob": str(p)}
                           for t, p in g.delta[s][i][j].items()],
                })
    doc = {
        "states": list(g.states),
        "initial": g.states[g.initial_state],
        "targets": [g.states[t] for t in sorted(g.targets)],
        "transitions": transitions,
    }
    return json.dumps(doc, indent=1)


def compute_winning_region(g: Csg) -> frozenset[int]:
    """States from which Player S can keep the play out of the targets surely."""
    w = frozenset(range(g.n)) - g.targets
    while True:
        nxt = frozenset(
            s for s in w
            if any(
                all(g.delta[s][i][j].support <= w for i in range(len(g.actions_reach[s])))
                for j in range(len(g.actions_safe[s]))
            )
        )
        if nxt == w:
            return w
        w = nxt


def _fresh(name: str, taken: set[str]) -> str:
    while name in taken:
        name = "_" + name
    return name


def normalize(g: Csg) -> NormalizedCsg:
    """Collapse the targets into one absorbing sink and W into another."""
    win = compute_winning_region(g)
    keep = [s for s in range(g.n) if s not in g.targets and s not in win]
    names = [g.states[s] for s in keep]
    taken = set(g.states)
    # reuse an existing absorbing singleton as the sink, otherwise append a fresh one
    if len(g.targets) == 1 and g.is_absorbing(min(g.targets)):
        top, top_key = g.states[min(g.targets)], min(g.targets)
    else:
        top, top_key = _fresh("target", taken), g.n
    if len(win) == 1 and g.is_absorbing(min(win)):
        bot, bot_key = g.states[min(win)], min(win)
    else:
        bot, bot_key = _fresh("losing", taken | {top}), g.n + 1
    keyed = sorted([(s, g.states[s]) for s in keep] + [(top_key, top), (bot_key, bot)])
    new_names = [name for _, name in keyed]
    t_idx = new_names.index(top)
    l_idx = new_names.index(bot)

    smap = []
    for s in range(g.n):
        if s in g.targets:
            smap.append(t_idx)
        elif s in win:
            smap.append(l_idx)
        else:
            smap.append(new_names.index(g.states[s]))

    reach, safe, delta = [], [], []
    for pos, name in enumerate(new_names):
        if pos in (t_idx, l_idx):
            reach.append((SINK_ACTION,))
            safe.append((SINK_ACTION,))
            delta.append(((Distribution.dirac(pos),),))
            continue
        s = g.index(name)
        reach.append(g.actions_reach[s])
        safe.append(g.actions_safe[s])
        rows = []
        for row in g.delta[s]:
            out = []
            for d in row:
                acc: dict[int, Fraction] = {}
                for t, p in d.items():
                    acc[smap[t]] = acc.get(smap[t], Fraction(0)) + p
                out.append(Distribution(acc))
            rows.append(tuple(out))
        delta.append(tuple(rows))
    game = Csg(
        tuple(new_names),
        tuple(reach),
        tuple(safe),
        tuple(delta),
        smap[g.initial_state],
        frozenset([t_idx]),
    )
    return NormalizedCsg(game, t_idx, l_idx, win, tuple(smap), g)
