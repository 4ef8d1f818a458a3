"""End components of the game viewed as an MDP with both players merged.

Every joint action pair (a_R, a_S) counts as one MDP action.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Iterable, Iterator

from .model import Csg, NormalizedCsg


def as_game(g) -> Csg:
    return g.game if isinstance(g, NormalizedCsg) else g


@dataclass(frozen=True)
class EcSet:
    states: frozenset[int]
    enabled_pairs: dict  # state -> frozenset of (i, j) action index pairs

    def __iter__(self):
        return iter(sorted(self.states))

    def __len__(self):
        return len(self.states)

    def __contains__(self, s):
        return s in self.states


def tarjan(nodes: Iterable[int], succ: Callable[[int], Iterable[int]]) -> Iterator[list[int]]:
    """Strongly connected components, iteratively, in reverse topological order."""
    index: dict[int, int] = {}
    low: dict[int, int] = {}
    on_stack: set[int] = set()
    stack: list[int] = []
    counter = 0
    for root in nodes:
        if root in index:
            continue
        work = [(root, iter(succ(root)))]
        index[root] = low[root] = counter
        counter += 1
        stack.append(root)
        on_stack.add(root)
        while work:
            v, it = work[-1]
            advanced = False
            for w in it:
                if w not in index:
                    index[w] = low[w] = counter
                    counter += 1
                    stack.append(w)
                    on_stack.add(w)
                    work.append((w, iter(succ(w))))
                    advanced = True
                    break
                if w in on_stack:
                    low[v] = min(low[v], index[w])
            if advanced:
                continue
            work.pop()
            if work:
                u = work[-1][0]
                low[u] = min(low[u], low[v])
            if low[v] == index[v]:
                comp = []
                while True:
                    w = stack.pop()
                    on_stack.discard(w)
                    comp.append(w)
                    if w == v:
                        break
                yield comp


def _staying_pairs(g: Csg, s: int, region: frozenset[int]) -> frozenset[tuple[int, int]]:
    return frozenset(
        (i, j)
        for i in range(len(g.actions_reach[s]))
        for j in range(len(g.actions_safe[s]))
        if g.delta[s][i][j].support <= region
    )


def find_mecs(g, restrict_to: Iterable[int]) -> list[EcSet]:
    """Maximal end components inside ``restrict_to``, ordered by least state."""
    g = as_game(g)
    pending = [frozenset(restrict_to)]
    done: list[EcSet] = []
    while pending:
        region = pending.pop()
        pairs = {s: _staying_pairs(g, s, region) for s in region}
        alive = frozenset(s for s in region if pairs[s])
        if alive != region:
            if alive:
                pending.append(alive)
            continue

        def succ(s):
            out = set()
            for i, j in pairs[s]:
                out |= g.delta[s][i][j].support
            return sorted(out)

        comps = [frozenset(c) for c in tarjan(sorted(region), succ)]
        if len(comps) == 1:
            done.append(EcSet(region, pairs))
        else:
            pending.extend(comps)
    done.sort(key=lambda e: min(e.states))
    return done


def is_ec(g, candidate: Iterable[int]) -> bool:
    """Closed under some joint pair at every state and strongly connected."""
    g = as_game(g)
    region = frozenset(candidate)
    if not region:
        return False
    pairs = {s: _staying_pairs(g, s, region) for s in region}
    if not all(pairs.values()):
        return False

    def succ(s):
        out = set()
        for i, j in pairs[s]:
            out |= g.delta[s][i][j].support
        return sorted(out)

    return sum(1 for _ in tarjan(sorted(region), succ)) == 1
