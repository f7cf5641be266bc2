"""Shared fixtures and independent oracles for the test suite.

The oracles here deliberately avoid the production code paths: the Boolean
interval oracle evaluates gates by truth tables, the BFS oracle recomputes
shortest solutions from scratch, and the random graph generator builds
arbitrary DAGs to stress inference.
"""

from __future__ import annotations

import numpy as np
import pytest

from lnnplay import game
from lnnplay.lnn import LnnGraph, TruthBounds


# ----------------------------------------------------------- boolean oracle

def bool_interval(kind: str, child_bounds: list[tuple[float, float]]) -> tuple[float, float]:
    """Truth-table evaluation lifted to bound pairs; inputs must be crisp
    0/1 per bound. Independent of the Łukasiewicz activations."""
    ls = [b[0] >= 0.5 for b in child_bounds]
    us = [b[1] >= 0.5 for b in child_bounds]
    if kind == "and":
        return float(all(ls)), float(all(us))
    if kind == "or":
        return float(any(ls)), float(any(us))
    if kind == "not":
        return float(not us[0]), float(not ls[0])
    if kind == "implies":
        (la, ua), (lc, uc) = child_bounds
        return float((not (ua >= 0.5)) or (lc >= 0.5)), float((not (la >= 0.5)) or (uc >= 0.5))
    raise ValueError(kind)


# --------------------------------------------------------------- BFS oracle

def bfs_optimal_commands(layout: game.Layout) -> int:
    """Independent shortest-solution count: BFS over the room graph plus
    one take command. Reimplemented here on purpose."""
    from collections import deque

    seen = {layout.start}
    queue = deque([(layout.start, 0)])
    while queue:
        room, d = queue.popleft()
        if room == layout.coin_room:
            return d + 1
        for direction in game.DIRECTIONS:
            dest = layout.connections.get((room, direction))
            if dest is not None and dest not in seen:
                seen.add(dest)
                queue.append((dest, d + 1))
    raise AssertionError("coin unreachable")


# ------------------------------------------------------------ graph helpers

def single_gate_graph(kind: str, n_children: int, weights, beta,
                      child_bounds=None, gate_bounds=None,
                      gate_asserted=False) -> LnnGraph:
    """One gate over fresh propositions p0..p{n-1}."""
    nodes = [{"id": f"p{i}", "kind": "proposition"} for i in range(n_children)]
    gate = {"id": "g", "kind": kind, "beta": beta}
    if gate_asserted:
        gate["asserted"] = True
    if gate_bounds is not None:
        gate["lower"], gate["upper"] = gate_bounds
    nodes.append(gate)
    edges = [
        {"parent": "g", "child": f"p{i}", "weight": float(weights[i])}
        for i in range(n_children)
    ]
    g = LnnGraph.build({"nodes": nodes, "edges": edges, "actions": []})
    if child_bounds is not None:
        for i, (lo, hi) in enumerate(child_bounds):
            idx = g.index[f"p{i}"]
            g.lower[idx] = lo
            g.upper[idx] = hi
    return g


def random_graph(rng: np.random.Generator, max_nodes: int = 30) -> LnnGraph:
    """Random DAG with mixed gates, random parameters, and random facts."""
    n_props = int(rng.integers(2, 6))
    nodes = [{"id": f"p{i}", "kind": "proposition"} for i in range(n_props)]
    total = int(rng.integers(n_props + 1, max_nodes + 1))
    kinds = ("and", "or", "not", "implies")
    edges = []
    for i in range(n_props, total):
        kind = kinds[int(rng.integers(0, 4))]
        if kind == "not":
            arity = 1
        elif kind == "implies":
            arity = 2
        else:
            arity = int(rng.integers(1, 4))
        node = {"id": f"n{i}", "kind": kind, "beta": float(rng.uniform(0.2, 2.0))}
        if rng.random() < 0.15:
            node["asserted"] = True
            lo = float(rng.uniform(0, 1))
            hi = float(rng.uniform(lo, 1))
            node["lower"], node["upper"] = lo, hi
        nodes.append(node)
        pool = [nd["id"] for nd in nodes[:-1]]
        picks = rng.choice(len(pool), size=min(arity, len(pool)), replace=False)
        for j in picks:
            edges.append({
                "parent": node["id"],
                "child": pool[int(j)],
                "weight": float(rng.uniform(0.0, 2.0)),
            })
    g = LnnGraph.build({"nodes": nodes, "edges": edges, "actions": []})
    for i in range(n_props):
        if rng.random() < 0.7:
            lo = float(rng.uniform(0, 1))
            hi = float(rng.uniform(lo, 1)) if rng.random() < 0.8 else lo
            g.set_fact(f"p{i}", TruthBounds(lo, hi))
    return g


@pytest.fixture
def fix_a():
    return game.fix_a_layout()
