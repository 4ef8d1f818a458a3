import random
from fractions import Fraction as F

import pytest

from csgbvi import matrix_game as mg
from csgbvi.lp import feasible, linprog
from csgbvi.matrix_game import MatrixGame, InfeasibleStrategyError


def game(payoff, rows=None, cols=None):
    return MatrixGame.of(payoff, rows, cols)


def random_matrix(rng, m, n, den=8):
    return [[F(rng.randint(-den, den), rng.randint(1, den)) for _ in range(n)] for _ in range(m)]


def check_solution(z, sol):
    rows = sol.row_strategy
    cols = sol.col_strategy
    assert sum(rows.values()) == 1 and all(p >= 0 for p in rows.values())
    assert sum(cols.values()) == 1 and all(p >= 0 for p in cols.values())
    for c in z.cols:
        assert sum(p * z.entry(r, c) for r, p in rows.items()) >= sol.value
    for r in z.rows:
        assert sum(p * z.entry(r, c) for c, p in cols.items()) <= sol.value


# -- lp ----------------------------------------------------------------------

def test_linprog_small():
    # max x + y s.t. x + 2y <= 4, 3x + y <= 6
    res = linprog([1, 1], [[1, 2], [3, 1]], [4, 6])
    assert res.status == "optimal"
    assert res.value == F(14, 5)
    assert res.x == [F(8, 5), F(6, 5)]


def test_linprog_equality_and_free():
    # max -z with z free, z >= 3 - x, x = 1
    res = linprog([0, -1], [[-1, -1]], [-3], A_eq=[[1, 0]], b_eq=[1], free=[1])
    assert res.status == "optimal" and res.value == -2


def test_linprog_infeasible_and_unbounded():
    assert linprog([1], [[1], [-1]], [1, -2]).status == "infeasible"
    assert linprog([1, 0], [[-1, 1]], [0]).status == "unbounded"
    assert not feasible([[1], [-1]], [1, -2])
    assert feasible([[1]], [1])


def test_linprog_degenerate_cycling_example():
    # Beale's example cycles under the textbook rule
    c = [F(3, 4), -150, F(1, 50), -6]
    a = [[F(1, 4), -60, F(-1, 25), 9], [F(1, 2), -90, F(-1, 50), 3], [0, 0, 1, 0]]
    res = linprog(c, a, [0, 0, 1])
    assert res.status == "optimal" and res.value == F(1, 20)


# -- solve -------------------------------------------------------------------

@pytest.mark.parametrize("payoff, expected", [
    ([[0, F(1, 3)], [1, 0]], F(1, 4)),
    ([[0, F(5, 12)], [1, F(1, 4)]], F(5, 14)),
    ([[F(7, 3)]], F(7, 3)),
])
def test_solve_examples(payoff, expected):
    z = game(payoff)
    sol = mg.solve(z)
    assert sol.value == expected
    check_solution(z, sol)


def test_solve_labels_and_dirac():
    z = game([[F(7, 3)]], ["only"], ["x"])
    sol = mg.solve(z)
    assert sol.row_strategy == {"only": 1} and sol.col_strategy == {"x": 1}
    hrs = game([[0, F(1, 3)], [1, 0]], ["run", "hide"], ["throw", "wait"])
    sol = mg.solve(hrs)
    assert sol.row_strategy == {"run": F(3, 4), "hide": F(1, 4)}
    assert sol.col_strategy == {"throw": F(1, 4), "wait": F(3, 4)}


def test_negated_transpose_symmetry():
    rng = random.Random(3)
    for _ in range(50):
        z = game(random_matrix(rng, rng.randint(1, 4), rng.randint(1, 4)))
        assert mg.solve(z).value == -mg.solve(z.transpose_negated()).value


def test_duality_fixture_matrices():
    for payoff in ([[0, F(1, 3)], [1, 0]], [[0, F(5, 12)], [1, F(1, 4)]],
                   [[0, F(2, 3)], [1, 1]], [[1, 1], [F(9, 10), 1]], [[0, 1], [1, 0]]):
        z = game(payoff)
        assert mg.row_lp_value(z) == mg.col_lp_value(z) == mg.solve(z).value


def test_random_3x3_bounds_and_saddle():
    rng = random.Random(11)
    saddles = 0
    for _ in range(300):
        z = game(random_matrix(rng, 3, 3, den=4))
        sol = mg.solve(z)
        lo = max(min(r) for r in z.payoff)
        hi = min(max(z.payoff[i][j] for i in range(3)) for j in range(3))
        assert lo <= sol.value <= hi
        check_solution(z, sol)
        if lo == hi:
            saddles += 1
            assert len(sol.row_strategy) == 1 and len(sol.col_strategy) == 1
    assert saddles > 10


def test_matrix_game_validation():
    with pytest.raises(ValueError):
        game([])
    with pytest.raises(ValueError):
        game([[1, 2], [3]])
    with pytest.raises(ValueError):
        game([[1, 2]], rows=["a", "a"])


# -- restricted values and support queries -----------------------------------

def test_restricted_value_examples():
    hrs = game([[0, F(2, 3)], [1, 1]], ["run", "hide"], ["throw", "wait"])
    assert mg.restricted_value(hrs, ["run"], ["wait"]) == F(2, 3)
    assert mg.restricted_value(hrs, hrs.rows, hrs.cols) == mg.solve(hrs).value
    s0 = game([[1, 1], [F(1, 5), F(1, 5)]], ["a1", "a2"], ["d1", "d2"])
    assert mg.restricted_value(s0, ["a2"], ["d1", "d2"]) == F(1, 5)
    with pytest.raises(ValueError):
        mg.restricted_value(hrs, [], ["wait"])


def test_restricted_value_monotone():
    rng = random.Random(5)
    for _ in range(100):
        z = game(random_matrix(rng, 3, 4))
        rows = rng.sample(z.rows, rng.randint(1, 3))
        cols = rng.sample(z.cols, rng.randint(1, 4))
        assert mg.restricted_value(z, rows, cols) >= mg.restricted_value(z, rows, z.cols)
        assert mg.restricted_value(z, rows, cols) <= mg.restricted_value(z, z.rows, cols)


def test_optimal_support_exists_examples():
    z = game([[0, F(2, 3)], [1, 1]], ["run", "hide"], ["throw", "wait"])
    assert mg.optimal_support_exists(z, mg.ROW, ["hide"])
    assert not mg.optimal_support_exists(z, mg.ROW, ["run"])
    saddle = game([[1, 1], [0, 0]])
    assert mg.optimal_support_exists(saddle, mg.ROW, [0])
    assert not mg.optimal_support_exists(saddle, mg.ROW, [0, 1])


def test_optimal_support_full_when_solver_mixes():
    rng = random.Random(8)
    seen = 0
    for _ in range(100):
        z = game(random_matrix(rng, 2, 2))
        sol = mg.solve(z)
        if len(sol.row_strategy) == 2:
            seen += 1
            assert mg.optimal_support_exists(z, mg.ROW, z.rows)
        if len(sol.col_strategy) == 2:
            assert mg.optimal_support_exists(z, mg.COL, z.cols)
    assert seen > 0


def test_max_prob_on_action_examples():
    s2 = game([[1, 1], [F(9, 10), 1]], ["e1", "e2"], ["f1", "f2"])
    assert mg.max_prob_on_action(s2, mg.COL, ["f2"], "f2") == 1
    hrs = game([[0, F(1, 3)], [1, 0]], ["run", "hide"], ["throw", "wait"])
    assert mg.max_prob_on_action(hrs, mg.COL, hrs.cols, "wait") == F(3, 4)
    assert mg.max_prob_on_action(hrs, mg.ROW, hrs.rows, "run") == F(3, 4)
    mp = game([[0, 1], [1, 0]])
    with pytest.raises(InfeasibleStrategyError):
        mg.max_prob_on_action(mp, mg.COL, [0], 0)
