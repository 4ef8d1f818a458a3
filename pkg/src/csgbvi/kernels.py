"""Float Bellman sweep used by the opt-in float arithmetic mode.

The compiled extension is used when it was built; otherwise the pure-Python
version is.  Setting ``CSGBVI_PURE_PYTHON=1`` forces the fallback.
"""

from __future__ import annotations

import os

import numpy as np

from . import _pykernels

try:
    if os.environ.get("CSGBVI_PURE_PYTHON"):
        raise ImportError("pure Python requested")
    from . import _ckernels as _impl

    COMPILED = True
except ImportError:
    _impl = _pykernels
    COMPILED = False


def implementation(impl=None):
    """Resolve ``None``, ``"python"`` or ``"compiled"`` to a kernel module."""
    if impl is None:
        return _impl
    if impl == "python":
        return _pykernels
    if impl == "compiled":
        if not COMPILED:
            raise RuntimeError("compiled kernels are not available")
        return _impl
    return impl


class PackedGame:
    """Flat CSR-style arrays describing the game, as the kernels expect them."""

    def __init__(self, g):
        game = g.game
        nr, nc, pair_ptr, entry_ptr, targets, probs = [], [], [], [0], [], []
        for s in range(game.n):
            nr.append(len(game.actions_reach[s]))
            nc.append(len(game.actions_safe[s]))
            pair_ptr.append(len(entry_ptr) - 1)
            for row in game.delta[s]:
                for d in row:
                    for t, p in d.items():
                        targets.append(t)
                        probs.append(float(p))
                    entry_ptr.append(len(targets))
        self.nr = np.array(nr, dtype=np.int32)
        self.nc = np.array(nc, dtype=np.int32)
        self.pair_ptr = np.array(pair_ptr, dtype=np.int32)
        self.entry_ptr = np.array(entry_ptr, dtype=np.int32)
        self.targets = np.array(targets, dtype=np.int32)
        self.probs = np.array(probs, dtype=np.float64)
        fixed = np.zeros(game.n, dtype=np.uint8)
        fixed[list(g.sinks)] = 1
        self.fixed = fixed

    def sweep(self, values: np.ndarray, impl=None) -> np.ndarray:
        impl = implementation(impl)
        values = np.ascontiguousarray(values, dtype=np.float64)
        out = np.empty_like(values)
        impl.bellman_sweep(
            self.nr, self.nc, self.pair_ptr, self.entry_ptr,
            self.targets, self.probs, self.fixed, values, out,
        )
        return out


def matrix_game_value(z, m: int, n: int, impl=None) -> float:
    return implementation(impl).matrix_game_value(list(map(float, z)), m, n)
