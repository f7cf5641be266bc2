"""Upward/downward sweeps and the inference fixpoint."""

import itertools

import numpy as np
import pytest

from lnnplay.lnn import InferenceConfig, LnnGraph, TruthBounds

from conftest import bool_interval, random_graph, single_gate_graph

CRISP = (0.0, 1.0)
STATES = [(0.0, 0.0), (0.0, 1.0), (1.0, 0.0), (1.0, 1.0)]


# ------------------------------------------------------------------- upward

@pytest.mark.parametrize("kind", ["and", "or", "implies"])
def test_upward_matches_boolean_oracle_two_inputs(kind):
    for b1, b2 in itertools.product(STATES, STATES):
        g = single_gate_graph(kind, 2, weights=(1, 1), beta=1.0,
                              child_bounds=[b1, b2])
        g.upward_pass()
        expect = bool_interval(kind, [b1, b2])
        got = g.bounds("g")
        assert (got.lower, got.upper) == expect, (kind, b1, b2)


def test_upward_not_crisp():
    for state in [(0.0, 0.0), (1.0, 1.0)]:
        g = single_gate_graph("not", 1, weights=(1,), beta=1.0,
                              child_bounds=[state])
        g.upward_pass()
        got = g.bounds("g")
        assert (got.lower, got.upper) == bool_interval("not", [state])


def test_upward_weighted_and_example():
    # pre-clamp 1 - 2*0.4 - 0.5*0 = 0.2 on both bound sides
    g = single_gate_graph("and", 2, weights=(2.0, 0.5), beta=1.0,
                          child_bounds=[(0.6, 0.6), (1.0, 1.0)])
    g.upward_pass()
    got = g.bounds("g")
    assert got.lower == pytest.approx(0.2)
    assert got.upper == pytest.approx(0.2)


def test_upward_or_all_false():
    g = single_gate_graph("or", 2, weights=(1, 1), beta=1.0,
                          child_bounds=[(0.0, 0.0), (0.0, 0.0)])
    g.upward_pass()
    assert g.bounds("g") == TruthBounds(0.0, 0.0)


def test_upward_skips_asserted_gate():
    g = single_gate_graph("and", 2, weights=(1, 1), beta=1.0,
                          child_bounds=[(0.0, 0.0), (0.0, 0.0)],
                          gate_bounds=(1.0, 1.0), gate_asserted=True)
    change = g.upward_pass()
    assert change == 0.0
    assert g.bounds("g") == TruthBounds(1.0, 1.0)


def test_upward_only_tightens():
    g = single_gate_graph("or", 2, weights=(1, 1), beta=1.0,
                          child_bounds=[(0.4, 0.6), (0.1, 0.2)],
                          gate_bounds=(0.55, 0.7))
    g.upward_pass()
    got = g.bounds("g")
    # new interval [0.5, 0.8] intersected with prior [0.55, 0.7]
    assert got == TruthBounds(0.55, 0.7)


# ----------------------------------------------------------------- downward

def test_downward_modus_ponens():
    g = single_gate_graph("implies", 2, weights=(1, 1), beta=1.0,
                          child_bounds=[(1.0, 1.0), (0.0, 1.0)],
                          gate_bounds=(1.0, 1.0), gate_asserted=True)
    g.downward_pass()
    assert g.bounds("p1").lower == pytest.approx(1.0)


def test_downward_not_negation():
    g = single_gate_graph("not", 1, weights=(1,), beta=1.0,
                          gate_bounds=(1.0, 1.0), gate_asserted=True)
    g.downward_pass()
    assert g.bounds("p0") == TruthBounds(0.0, 0.0)


def test_downward_false_antecedent_uninformative():
    g = single_gate_graph("implies", 2, weights=(1, 1), beta=1.0,
                          child_bounds=[(0.0, 0.0), (0.0, 1.0)],
                          gate_bounds=(1.0, 1.0), gate_asserted=True)
    g.downward_pass()
    assert g.bounds("p1") == TruthBounds(0.0, 1.0)


def test_downward_leaves_asserted_children():
    spec = {
        "nodes": [
            {"id": "p", "kind": "proposition", "asserted": True,
             "lower": 0.0, "upper": 0.0},
            {"id": "g", "kind": "not", "asserted": True,
             "lower": 0.0, "upper": 0.0},
        ],
        "edges": [{"parent": "g", "child": "p"}],
    }
    g = LnnGraph.build(spec)
    g.downward_pass()
    assert g.bounds("p") == TruthBounds(0.0, 0.0)


def _activation(kind, beta, ws, xs):
    """Vectorized gate activation over stacked child grids."""
    if kind == "and":
        return np.clip(beta - sum(w * (1.0 - x) for w, x in zip(ws, xs)), 0, 1)
    if kind == "or":
        return np.clip(1.0 - beta + sum(w * x for w, x in zip(ws, xs)), 0, 1)
    if kind == "not":
        return 1.0 - xs[0]
    if kind == "implies":
        return np.clip(1.0 - beta + ws[0] * (1.0 - xs[0]) + ws[1] * xs[1], 0, 1)
    raise ValueError(kind)


def grid_soundness_trials(n_trials: int, seed: int) -> int:
    """Brute-force oracle: no downward-tightened bound may exclude a child
    value that is jointly consistent with the gate's asserted output bounds.
    Returns the number of non-vacuous trials checked."""
    rng = np.random.default_rng(seed)
    kinds = ("and", "or", "not", "implies")
    checked = 0
    grid_step = 0.05
    for _ in range(n_trials):
        kind = kinds[int(rng.integers(0, 4))]
        arity = {"not": 1, "implies": 2}.get(kind, int(rng.integers(1, 4)))
        ws = [1.0] * arity if rng.random() < 0.3 else list(rng.uniform(0.2, 2.0, arity))
        beta = 1.0 if rng.random() < 0.3 else float(rng.uniform(0.5, 1.5))
        priors = []
        for _ in range(arity):
            lo = grid_step * int(rng.integers(0, 21))
            hi = grid_step * int(rng.integers(0, 21))
            lo, hi = min(lo, hi), max(lo, hi)
            priors.append((lo, hi))
        ly = grid_step * int(rng.integers(0, 21))
        uy = grid_step * int(rng.integers(0, 21))
        ly, uy = min(ly, uy), max(ly, uy)

        g = single_gate_graph(kind, arity, weights=ws, beta=beta,
                              child_bounds=priors, gate_bounds=(ly, uy),
                              gate_asserted=True)
        g.downward_pass()

        axes = [np.arange(lo, hi + grid_step / 2, grid_step) for lo, hi in priors]
        grids = np.meshgrid(*axes, indexing="ij") if arity > 1 else [axes[0]]
        y = _activation(kind, beta, ws, grids)
        feasible = (y >= ly - 1e-9) & (y <= uy + 1e-9)
        if not feasible.any():
            continue  # vacuous assertion; nothing to check
        checked += 1
        for i in range(arity):
            vals = grids[i][feasible]
            got = g.bounds(f"p{i}")
            assert got.lower <= vals.min() + 1e-9, (kind, ws, beta, priors, ly, uy, i)
            assert got.upper >= vals.max() - 1e-9, (kind, ws, beta, priors, ly, uy, i)
    return checked


def test_downward_grid_soundness():
    checked = grid_soundness_trials(150, seed=11)
    assert checked >= 50


# ----------------------------------------------------------------- fixpoint

def fig4_graph():
    return LnnGraph.build({
        "nodes": [
            {"id": "found(north)", "kind": "proposition"},
            {"id": "go(north)", "kind": "proposition"},
            {"id": "rule", "kind": "implies", "asserted": True},
        ],
        "edges": [
            {"parent": "rule", "child": "found(north)"},
            {"parent": "rule", "child": "go(north)"},
        ],
        "actions": ["go(north)"],
    })


def test_fixpoint_fig4():
    g = fig4_graph()
    g.set_fact("found(north)", TruthBounds.true())
    report = g.infer_fixpoint()
    assert g.bounds("go(north)") == TruthBounds(1.0, 1.0)
    assert report.converged
    assert report.iterations <= 2
    assert report.total_contradiction == 0.0


def test_fixpoint_no_facts_no_information():
    g = fig4_graph()
    report = g.infer_fixpoint()
    assert g.bounds("found(north)") == TruthBounds(0.0, 1.0)
    assert g.bounds("go(north)") == TruthBounds(0.0, 1.0)
    assert report.total_contradiction == 0.0


def test_fixpoint_random_graphs_terminate_and_stay_bounded():
    rng = np.random.default_rng(7)
    cfg = InferenceConfig()
    for _ in range(200):
        g = random_graph(rng)
        report = g.infer_fixpoint(cfg)
        assert report.iterations <= cfg.max_iterations
        assert (g.lower >= 0.0).all() and (g.lower <= 1.0).all()
        assert (g.upper >= 0.0).all() and (g.upper <= 1.0).all()


def test_sweeps_monotone_tightening():
    rng = np.random.default_rng(13)
    for _ in range(50):
        g = random_graph(rng)
        for _ in range(6):
            before_l, before_u = g.lower.copy(), g.upper.copy()
            g.upward_pass()
            assert (g.lower >= before_l - 1e-15).all()
            assert (g.upper <= before_u + 1e-15).all()
            before_l, before_u = g.lower.copy(), g.upper.copy()
            g.downward_pass()
            assert (g.lower >= before_l - 1e-15).all()
            assert (g.upper <= before_u + 1e-15).all()


def test_contradiction_loss_arithmetic():
    spec = {"nodes": [{"id": "a"}, {"id": "b"}], "edges": []}
    g = LnnGraph.build(spec)
    assert g.contradiction_loss() == 0.0
    g.set_fact("a", TruthBounds(0.9, 0.2))
    assert g.contradiction_loss() == pytest.approx(0.7)
    g.set_fact("a", TruthBounds(1.0, 0.0))
    g.set_fact("b", TruthBounds(0.6, 0.5))
    assert g.contradiction_loss() == pytest.approx(1.1)


def test_inference_config_validation():
    with pytest.raises(ValueError):
        InferenceConfig(epsilon=0.0)
    with pytest.raises(ValueError):
        InferenceConfig(max_iterations=0)
