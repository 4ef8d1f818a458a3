import json
import random
from fractions import Fraction as F

import pytest

from csgbvi import fixtures
from csgbvi.model import Csg, Distribution, normalize, parse_csg
from csgbvi.oracle import (
    OracleLimitError,
    chain_reach,
    oracle_value,
    pure_lower_value,
    pure_upper_value,
    strategy_value,
)

from gamegen import random_game


def test_hide_run_or_slip_grid_value():
    g = normalize(fixtures.load("hide_run_or_slip.json"))
    v = oracle_value(g, 1000)[0]
    assert F(1, 2) - F(1, 100) <= v <= F(1, 2)


def test_all_targets():
    g = parse_csg(json.dumps({
        "states": ["a", "b"], "initial": "a", "targets": ["a", "b"],
        "transitions": [
            {"from": "a", "aR": "x", "aS": "y", "to": [{"state": "b", "prob": "1"}]},
            {"from": "b", "aR": "x", "aS": "y", "to": [{"state": "a", "prob": "1"}]},
        ],
    }))
    assert list(oracle_value(g, 5)) == [1, 1]


def turn_based(rng, n, owner_actions=2):
    """Each state lets only one player choose."""
    g = random_game(rng, max_states=n, min_states=n, max_actions=1)
    reach, safe, delta = [], [], []
    for s in range(g.n):
        k = rng.randint(1, owner_actions)
        dists = [rng.choice([Distribution.dirac(t) for t in range(g.n)] + [g.delta[s][0][0]])
                 for _ in range(k)]
        if rng.random() < 0.5:
            reach.append(tuple(f"a{i}" for i in range(k)))
            safe.append(("-",))
            delta.append(tuple((d,) for d in dists))
        else:
            reach.append(("-",))
            safe.append(tuple(f"b{j}" for j in range(k)))
            delta.append((tuple(dists),))
    return Csg(g.states, tuple(reach), tuple(safe), tuple(delta), 0, g.targets)


def test_turn_based_matches_pure_enumeration():
    rng = random.Random(13)
    for _ in range(30):
        g = turn_based(rng, 4)
        pure = pure_lower_value(g)
        assert pure == pure_upper_value(g)
        assert list(oracle_value(g, 7)) == pure


def test_grid_value_is_a_lower_bound_of_pure_upper():
    rng = random.Random(7)
    for _ in range(20):
        g = random_game(rng, max_states=3, max_actions=2)
        v = oracle_value(g, 12)
        assert v <= pure_upper_value(g)
        assert pure_lower_value(g) <= v


def test_chain_reach():
    chain = [{1: F(1, 2), 0: F(1, 2)}, {1: F(1)}, {2: F(1)}]
    assert chain_reach(chain, frozenset({1})) == [1, 1, 0]
    chain = [{1: F(1, 3), 2: F(2, 3)}, {1: F(1)}, {2: F(1)}]
    assert chain_reach(chain, frozenset({1})) == [F(1, 3), 1, 0]


def test_strategy_value_hide_run_or_slip():
    g = fixtures.load("hide_run_or_slip.json")
    v = strategy_value(g, [{"run": F(1, 2), "hide": F(1, 2)}, {"-": 1}, {"-": 1}])
    # against throw: 1/2; against wait the play stays with 1/2 per round
    assert v[0] == F(1, 2)


def test_limits():
    rng = random.Random(0)
    g = random_game(rng, max_states=9, min_states=9)
    with pytest.raises(OracleLimitError):
        oracle_value(g, 10)
    with pytest.raises(ValueError):
        oracle_value(fixtures.load("hide_run_or_slip.json"), 0)
