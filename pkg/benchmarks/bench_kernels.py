"""Time the float Bellman sweep: compiled extension vs pure-Python fallback.

    python3 benchmarks/bench_kernels.py --states 2000 --actions 3 --sweeps 5
"""

import argparse
import random
import time
from fractions import Fraction

import numpy as np

from csgbvi import kernels
from csgbvi.model import Csg, Distribution, normalize


def big_game(n: int, actions: int, seed: int) -> Csg:
    rng = random.Random(seed)
    reach, safe, delta = [], [], []
    for _ in range(n):
        nr, nc = rng.randint(1, actions), rng.randint(1, actions)
        reach.append(tuple(f"a{i}" for i in range(nr)))
        safe.append(tuple(f"b{j}" for j in range(nc)))
        rows = []
        for _ in range(nr):
            row = []
            for _ in range(nc):
                succ = rng.sample(range(n), 3)
                row.append(Distribution({succ[0]: Fraction(1, 2), succ[1]: Fraction(1, 4), succ[2]: Fraction(1, 4)}))
            rows.append(tuple(row))
        delta.append(tuple(rows))
    states = tuple(f"s{i}" for i in range(n))
    return Csg(states, tuple(reach), tuple(safe), tuple(delta), 0, frozenset({n - 1}))


def best_of(fn, repeat):
    times = []
    for _ in range(repeat):
        t = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t)
    return min(times)


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--states", type=int, default=2000)
    ap.add_argument("--actions", type=int, default=3)
    ap.add_argument("--sweeps", type=int, default=5)
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()

    g = normalize(big_game(args.states, args.actions, args.seed))
    packed = kernels.PackedGame(g)
    v0 = np.random.default_rng(args.seed).random(g.game.n)
    v0[g.target_sink], v0[g.losing_sink] = 1.0, 0.0

    def run(impl):
        v = v0
        for _ in range(args.sweeps):
            v = packed.sweep(v, impl=impl)
        return v

    print(f"game: {g.game.n} states, up to {args.actions}x{args.actions} actions, {args.sweeps} sweeps")
    t_py = best_of(lambda: run("python"), args.repeat)
    print(f"python    {t_py / args.sweeps * 1e3:9.2f} ms/sweep")
    if not kernels.COMPILED:
        print("compiled  not built (pip install --no-build-isolation -e .)")
        return
    t_c = best_of(lambda: run("compiled"), args.repeat)
    diff = float(np.max(np.abs(run("python") - run("compiled"))))
    print(f"compiled  {t_c / args.sweeps * 1e3:9.2f} ms/sweep")
    print(f"speedup   {t_py / t_c:9.1f}x   max |difference| {diff:.2e}")


if __name__ == "__main__":
    main()
