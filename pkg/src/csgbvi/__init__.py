"""Bounded value iteration with deflation for concurrent stochastic reachability games."""

from .bec import (
    BecReport,
    StateClassification,
    best_exit,
    bec_report,
    classify_state,
    compute_hazard,
    compute_trap,
    deflate,
    exit_value,
    find_mbecs,
    support_leaves,
)
from .engine import (
    BviResult,
    IterationRecord,
    bvi,
    pre_local,
    pre_operator,
    run_lower,
    run_naive_upper,
)
from .graph import EcSet, find_mecs, is_ec
from .matrix_game import (
    GameSolution,
    MatrixGame,
    max_prob_on_action,
    optimal_support_exists,
    restricted_value,
    solve,
)
from .model import (
    Csg,
    Distribution,
    ModelError,
    NormalizedCsg,
    compute_winning_region,
    load_csg,
    normalize,
    parse_csg,
)
from .oracle import oracle_value
from .valuation import Valuation, initial_lower, initial_upper, payoff_matrix

__version__ = "0.1.0"
