import math
import random
from fractions import Fraction as F

import numpy as np
import pytest

from csgbvi import fixtures, kernels
from csgbvi.engine import (
    BVI,
    FLOAT,
    INITIAL,
    LOWER_ONLY,
    NAIVE,
    bvi,
    pre_local,
    pre_operator,
    round_down,
    round_up,
    run_lower,
    run_naive_upper,
    simplest_between,
    snap,
)
from csgbvi.model import normalize
from csgbvi.oracle import oracle_value
from csgbvi.valuation import Valuation, initial_lower, initial_upper

from gamegen import random_game


def load(name):
    return normalize(fixtures.load(name))


def test_pre_local_examples():
    g = load("hide_run_or_slip.json")
    l0 = initial_lower(g)
    assert pre_local(g, l0, 0, {"hide": 1}, {"throw": 1}) == 1
    assert pre_local(g, l0, 0, {"run": 1}, {"wait": 1}) == F(1, 3)
    c = Valuation([F(2, 7)] * 3)
    mixed = pre_local(g, c, 0, {"run": F(1, 3), "hide": F(2, 3)}, {"wait": F(1, 2), "throw": F(1, 2)})
    assert mixed == F(2, 7)


def test_pre_operator_examples():
    g = load("hide_run_or_slip.json")
    assert pre_operator(g, initial_lower(g))[0] == F(1, 4)
    assert run_lower(g, 2)[0] == F(5, 14)
    assert run_naive_upper(g, 1)[0] == 1
    assert run_lower(g, 0) == initial_lower(g)
    swapped = load("hide_run_or_slip_swapped.json")
    assert run_lower(swapped, 1)[0] == F(1, 3)
    # rows run = (1, 2/3), hide = (0, 1): the 2x2 closed form gives 3/4
    assert run_naive_upper(swapped, 1)[0] == F(3, 4)


def test_naive_upper_stagnates_while_bvi_drops():
    g = load("hide_run_or_slip.json")
    assert all(run_naive_upper(g, k)[0] == 1 for k in (1, 10, 100))
    r = bvi(g, F(1, 1000))
    first = next(rec.index for rec in r.trace if rec.upper[0] < F(3, 5))
    assert first <= 2
    assert [rec.upper[0] for rec in r.trace[:3]] == [F(2, 3), F(5, 9), F(14, 27)]


def test_pre_order_preserving():
    rng = random.Random(6)
    for _ in range(40):
        g = normalize(random_game(rng, max_states=5))
        n = g.game.n
        a = [F(rng.randint(0, 8), 8) for _ in range(n)]
        b = [min(F(1), x + F(rng.randint(0, 8), 16)) for x in a]
        for s in g.sinks:
            a[s] = b[s] = F(int(s == g.target_sink))
        assert pre_operator(g, Valuation(a)) <= pre_operator(g, Valuation(b))


def test_constant_valuation_is_fixed_by_local_pre():
    rng = random.Random(1)
    g = normalize(random_game(rng))
    c = Valuation([F(3, 8)] * g.game.n)
    for s in g.inner_states:
        rho = {a: F(1, len(g.game.actions_reach[s])) for a in g.game.actions_reach[s]}
        sigma = {g.game.actions_safe[s][0]: 1}
        assert pre_local(g, c, s, rho, sigma) == F(3, 8)


def monotone_trace(result):
    prev = None
    for rec in result.trace:
        if rec.upper is not None:
            assert all(lo <= hi for lo, hi in zip(rec.lower, rec.upper))
            assert all(u <= a for u, a in zip(rec.upper, rec.upper_after_bellman))
        if prev is not None:
            assert all(p <= q for p, q in zip(prev.lower, rec.lower))
            if rec.upper is not None:
                assert all(p >= q for p, q in zip(prev.upper, rec.upper))
        prev = rec


@pytest.mark.parametrize("name", fixtures.names())
def test_fixture_sandwich_and_residual(name):
    g = load(name)
    eps = F(1, 1000)
    r = bvi(g, eps)
    assert r.converged
    monotone_trace(r)
    v = oracle_value(g, 200)
    assert r.upper >= v
    assert all(r.lower[s] <= v[s] + F(1, 100) for s in range(g.game.n))
    residual = pre_operator(g, r.lower)
    assert max(abs(residual[s] - r.lower[s]) for s in range(g.game.n)) <= eps


def test_random_sandwich():
    rng = random.Random(10)
    for _ in range(40):
        g = normalize(random_game(rng, max_states=5, min_states=5))
        r = bvi(g, F(1, 1000), max_iters=60, precision_bits=64)
        monotone_trace(r)


def test_outward_rounding():
    x = F(1, 3)
    assert round_down(x, 4) == F(5, 16) and round_up(x, 4) == F(6, 16)
    assert round_down(F(1, 2), 4) == round_up(F(1, 2), 4) == F(1, 2)
    g = load("hide_run_or_slip.json")
    exact = bvi(g, F(1, 1000))
    rounded = bvi(g, F(1, 1000), precision_bits=32)
    assert rounded.converged
    assert rounded.lower[0] <= exact.lower[0] + F(1, 2**20)
    assert rounded.lower[0] <= F(1, 2) <= rounded.upper[0]


def test_modes():
    g = load("hide_run_or_slip.json")
    naive = bvi(g, F(1, 1000), max_iters=50, mode=NAIVE)
    assert not naive.converged and naive.iterations == 50 and naive.upper[0] == 1
    low = bvi(g, F(1, 1000), mode=LOWER_ONLY)
    assert low.converged and low.upper is None
    assert F(1, 2) - F(1, 100) <= low.lower[0] <= F(1, 2)
    init = bvi(load("chatterjee_counterexample.json"), F(1, 100), termination=INITIAL)
    assert init.converged
    with pytest.raises(ValueError):
        bvi(g, 0)
    with pytest.raises(ValueError):
        bvi(g, F(1, 10), mode="other")


def test_chatterjee_values():
    g = load("chatterjee_counterexample.json")
    s0, s3, s4, s5 = (g.game.index(n) for n in ("s0", "s3", "s4", "s5"))
    eps = F(1, 10**4)
    r = bvi(g, eps)
    assert r.converged
    target = 2 - math.sqrt(2)
    assert float(r.lower[s0]) <= target <= float(r.upper[s0])
    assert r.lower[s5] == r.upper[s5] == F(3, 5)
    for s in (s3, s4):
        assert abs(r.upper[s] - F(3, 5)) <= eps
        assert min(rec.upper[s] for rec in r.trace) >= F(3, 5) - eps


# -- float mode and kernels --------------------------------------------------

def test_simplest_between_and_snap():
    assert simplest_between(F(3, 10), F(2, 5)) == F(1, 3)
    assert simplest_between(F(-1, 2), F(1, 2)) == 0
    assert simplest_between(F(5, 2), F(5, 2)) == F(5, 2)
    assert simplest_between(F(-2, 5), F(-3, 10)) == F(-1, 3)
    assert snap(1 / 3) == F(1, 3)
    assert snap(0.45) == F(9, 20)
    x = snap(math.sqrt(2) - 1)
    assert abs(x - F(math.sqrt(2) - 1)) <= F(1, 10**9)


@pytest.mark.parametrize("name", fixtures.names())
def test_float_mode_agrees(name):
    g = load(name)
    exact = bvi(g, F(1, 1000))
    fast = bvi(g, F(1, 1000), arithmetic=FLOAT)
    assert fast.converged
    for s in range(g.game.n):
        assert abs(fast.lower[s] - exact.lower[s]) <= F(1, 100)
        assert abs(fast.upper[s] - exact.upper[s]) <= F(1, 100)


def test_kernel_matrix_game_matches_exact():
    rng = random.Random(4)
    from csgbvi.matrix_game import MatrixGame, solve

    for _ in range(200):
        m, n = rng.randint(1, 5), rng.randint(1, 5)
        z = [[F(rng.randint(0, 12), 12) for _ in range(n)] for _ in range(m)]
        exact = solve(MatrixGame.of(z)).value
        flat = np.array([float(x) for row in z for x in row])
        for impl in ("python", "compiled") if kernels.COMPILED else ("python",):
            assert abs(kernels.matrix_game_value(flat, m, n, impl=impl) - float(exact)) < 1e-9


def test_sweep_compiled_matches_fallback():
    if not kernels.COMPILED:
        pytest.skip("compiled kernels not built")
    rng = random.Random(8)
    for _ in range(20):
        g = normalize(random_game(rng))
        packed = kernels.PackedGame(g)
        v = np.array([rng.random() for _ in range(g.game.n)])
        a = packed.sweep(v, impl="python")
        b = packed.sweep(v, impl="compiled")
        assert np.allclose(a, b, atol=1e-12)
        exact = pre_operator(g, Valuation([F(x) for x in v]))
        assert np.allclose(a, [float(x) for x in exact], atol=1e-9)


def test_sweep_keeps_sinks():
    g = load("appendix_b.json")
    packed = kernels.PackedGame(g)
    out = packed.sweep(np.array([float(x) for x in initial_upper(g)]))
    assert out[g.target_sink] == 1 and out[g.losing_sink] == 0
