"""Benchmark the compiled sweep kernels against the pure-Python fallback.

Measures the two hot paths: fixpoint inference (alternating sweeps until
quiescent) and the training forward/backward. Run:

    python benchmarks/bench_backends.py [--nodes 400] [--repeat 200]
"""

from __future__ import annotations

import argparse
import time

import numpy as np

from lnnplay.lnn import InferenceConfig, TrainConfig
from lnnplay.lnn.kernels import pure
from lnnplay.rules import builtin, compile_rulebook

try:
    from lnnplay.lnn.kernels import _fast
except ImportError:
    _fast = None

import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parent.parent / "tests"))
from conftest import random_graph  # noqa: E402


def bench_fixpoint(mod, graphs, repeat: int) -> float:
    cfg = InferenceConfig()
    start = time.perf_counter()
    for _ in range(repeat):
        for g, lower0, upper0 in graphs:
            g.lower[:] = lower0
            g.upper[:] = upper0
            for _ in range(cfg.max_iterations):
                change = mod.upward_sweep(g.kind, g.asserted, g.beta, g.lower,
                                          g.upper, g.offsets, g.children, g.weights)
                change = max(change, mod.downward_sweep(
                    g.kind, g.asserted, g.beta, g.lower, g.upper,
                    g.offsets, g.children, g.weights))
                if change < cfg.epsilon:
                    break
    return time.perf_counter() - start


def bench_training(mod, graphs, repeat: int) -> float:
    n_out = max(len(g.ids) for g, _, _ in graphs)
    out_l = np.zeros(n_out)
    out_u = np.zeros(n_out)
    start = time.perf_counter()
    for _ in range(repeat):
        for g, _, _ in graphs:
            n = len(g.ids)
            mod.forward_eval(g.kind, g.beta, g.lower, g.upper, g.offsets,
                             g.children, g.weights, out_l[:n], out_u[:n])
            d_l = np.zeros(n)
            d_u = np.zeros(n)
            d_l[-1] = 1.0
            grad_beta = np.zeros(n)
            grad_w = np.zeros_like(g.weights)
            mod.backward_eval(g.kind, g.beta, g.offsets, g.children, g.weights,
                              out_l[:n], out_u[:n], d_l, d_u, grad_beta, grad_w)
    return time.perf_counter() - start


def bench_episode_rate(repeat: int) -> float:
    """End-to-end sanity number: LOA episodes per second on a mid-size maze."""
    from lnnplay import game
    from lnnplay.agents import LoaAgent, run_episode

    layout = game.generate_layout(8, 3, seed=1)
    agent = LoaAgent("avoid_revisit")
    start = time.perf_counter()
    for _ in range(repeat):
        run_episode(layout, agent)
    return repeat / (time.perf_counter() - start)


def main() -> None:
    parser = argparse.ArgumentParser()
    parser.add_argument("--graphs", type=int, default=20)
    parser.add_argument("--max-nodes", type=int, default=60)
    parser.add_argument("--repeat", type=int, default=100)
    args = parser.parse_args()

    rng = np.random.default_rng(5)
    graphs = []
    for _ in range(args.graphs):
        g = random_graph(rng, max_nodes=args.max_nodes)
        graphs.append((g, g.lower.copy(), g.upper.copy()))
    rb = compile_rulebook(builtin("avoid_revisit"))
    graphs.append((rb, rb.lower.copy(), rb.upper.copy()))

    backends = [("python", pure)]
    if _fast is not None:
        backends.append(("compiled", _fast))
    else:
        print("compiled kernels not built; benchmarking the fallback only")

    results = {}
    for name, mod in backends:
        fx = bench_fixpoint(mod, graphs, args.repeat)
        tr = bench_training(mod, graphs, args.repeat)
        results[name] = (fx, tr)

    print(f"{'backend':10s} {'fixpoint':>12s} {'train fwd/bwd':>14s}")
    for name, (fx, tr) in results.items():
        print(f"{name:10s} {fx:11.3f}s {tr:13.3f}s")
    if len(results) == 2:
        pfx, ptr = results["python"]
        cfx, ctr = results["compiled"]
        print(f"{'speedup':10s} {pfx / cfx:11.1f}x {ptr / ctr:12.1f}x")

    print(f"\nLOA episodes/second (current backend): {bench_episode_rate(200):,.0f}")


if __name__ == "__main__":
    main()
