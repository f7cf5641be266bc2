"""Bandit training: loss arithmetic, gradient correctness, update behavior."""

import numpy as np
import pytest

from lnnplay.lnn import LnnGraph, TrainConfig, TruthBounds
from lnnplay.rules import builtin, compile_rulebook

from conftest import single_gate_graph


def rule_graph(body_value: float) -> LnnGraph:
    """simple_nav-shaped single rule: body -> action, body pinned."""
    g = LnnGraph.build({
        "nodes": [
            {"id": "body", "kind": "proposition"},
            {"id": "act", "kind": "proposition"},
            {"id": "rule", "kind": "implies", "asserted": True},
        ],
        "edges": [
            {"parent": "rule", "child": "body"},
            {"parent": "rule", "child": "act"},
        ],
        "actions": ["act"],
    })
    g.set_fact("body", TruthBounds(body_value, body_value))
    return g


def test_loss_target_met_leaves_lambda_term():
    g = rule_graph(1.0)
    g.infer_fixpoint()
    cfg = TrainConfig(contradiction_weight=0.25)
    assert g.action_score("act") == pytest.approx(1.0)
    loss = g.train_step("act", reward=1.0, config=cfg)
    assert loss == pytest.approx(0.25 * g.contradiction_loss())
    assert loss == pytest.approx(0.0)  # nothing contradictory here


def test_loss_square_error_and_weight_sign_low_score():
    # score 0.2 with reward 1: loss 0.64, active rule edge weight increases
    g = rule_graph(0.2)
    cfg = TrainConfig(contradiction_weight=0.0)
    w_before = g.get_params()[0][g.edge_slot("rule", "body")]
    loss = g.train_step("act", reward=1.0, config=cfg)
    assert loss == pytest.approx(0.64)
    w_after = g.get_params()[0][g.edge_slot("rule", "body")]
    assert w_after > w_before


def test_loss_high_score_no_reward_weakens_rule():
    # interior score just below 1 (exact 1 sits on the clamp boundary and
    # is deliberately frozen); no reward pushes the rule down
    g = rule_graph(0.96)
    cfg = TrainConfig(contradiction_weight=0.0)
    w_before = g.get_params()[0][g.edge_slot("rule", "body")]
    loss = g.train_step("act", reward=0.0, config=cfg)
    assert loss == pytest.approx(0.96**2)
    w_after = g.get_params()[0][g.edge_slot("rule", "body")]
    assert w_after < w_before


def test_saturated_score_freezes_parameters():
    g = rule_graph(1.0)
    before = g.get_params()
    loss = g.train_step("act", reward=0.0)
    assert loss == pytest.approx(1.0)
    after = g.get_params()
    assert np.array_equal(before[0], after[0])
    assert np.array_equal(before[1], after[1])


def test_train_step_returns_pre_update_loss_and_projects():
    g = rule_graph(0.2)
    cfg = TrainConfig(learning_rate=100.0, contradiction_weight=0.0,
                      weight_max=3.0, beta_max=3.0)
    loss = g.train_step("act", reward=1.0, config=cfg)
    assert loss == pytest.approx(0.64)
    w, b = g.get_params()
    assert (w >= 0.0).all() and (w <= 3.0).all()
    assert (b >= 0.0).all() and (b <= 3.0).all()


def test_train_step_unknown_action():
    g = rule_graph(0.5)
    with pytest.raises(KeyError):
        g.train_step("nope", reward=1.0)
    with pytest.raises(KeyError):
        g.train_step("body", reward=1.0)  # a node, but not an action


def test_repeated_positive_updates_close_the_gap():
    g = rule_graph(0.2)
    cfg = TrainConfig(contradiction_weight=0.0)
    errors = []
    for _ in range(10):
        score = g.action_score("act")
        errors.append((score - 1.0) ** 2)
        g.train_step("act", reward=1.0, config=cfg)
    assert all(b <= a + 1e-12 for a, b in zip(errors, errors[1:]))
    assert errors[-1] < errors[0]


def saturation_margins(graph: LnnGraph, action: str) -> float:
    """Smallest distance of any pre-activation on the scoring path from a
    clamp boundary, including the rule-max gap (tie margin)."""
    import math

    from lnnplay.lnn.core import NodeKind

    n = len(graph.ids)
    out_l = np.zeros(n)
    out_u = np.zeros(n)
    from lnnplay.lnn.kernels import kernels
    kernels.forward_eval(graph.kind, graph.beta, graph.lower, graph.upper,
                         graph.offsets, graph.children, graph.weights,
                         out_l, out_u)
    margin = math.inf

    def clamp_margin(pre):
        return min(abs(pre), abs(pre - 1.0))

    for i in range(n):
        k = graph.kind[i]
        lo, hi = graph.offsets[i], graph.offsets[i + 1]
        if k == NodeKind.AND:
            s_l = sum(graph.weights[e] * (1 - out_l[graph.children[e]]) for e in range(lo, hi))
            s_u = sum(graph.weights[e] * (1 - out_u[graph.children[e]]) for e in range(lo, hi))
            margin = min(margin, clamp_margin(graph.beta[i] - s_l),
                         clamp_margin(graph.beta[i] - s_u))
        elif k == NodeKind.OR:
            s_l = sum(graph.weights[e] * out_l[graph.children[e]] for e in range(lo, hi))
            s_u = sum(graph.weights[e] * out_u[graph.children[e]] for e in range(lo, hi))
            margin = min(margin, clamp_margin(1 - graph.beta[i] + s_l),
                         clamp_margin(1 - graph.beta[i] + s_u))
        elif k == NodeKind.IMPLIES:
            a, c = graph.children[lo], graph.children[lo + 1]
            wa, wc = graph.weights[lo], graph.weights[lo + 1]
            margin = min(
                margin,
                clamp_margin(1 - graph.beta[i] + wa * (1 - out_u[a]) + wc * out_l[c]),
                clamp_margin(1 - graph.beta[i] + wa * (1 - out_l[a]) + wc * out_u[c]),
            )
    pres = []
    for r in graph.rules_concluding(action):
        lo = graph.offsets[r]
        pres.append(1.0 - graph.beta[r] + graph.weights[lo] * out_l[graph.children[lo]])
    pres.sort(reverse=True)
    margin = min(margin, clamp_margin(pres[0]))
    if len(pres) > 1:
        margin = min(margin, pres[0] - pres[1])
    return margin


def random_trainable_graph(rng) -> LnnGraph:
    g = compile_rulebook(builtin("avoid_revisit"))
    w, b = g.get_params()
    g.set_params(rng.uniform(0.3, 1.8, w.shape), rng.uniform(0.5, 1.5, b.shape))
    for atom in g.fact_index:
        lo = rng.uniform(0.05, 0.9)
        g.set_fact(atom, TruthBounds(lo, min(0.95, lo + rng.uniform(0, 0.4))))
    return g


def finite_difference_grads(graph, action, reward, cfg, h=1e-5):
    w0, b0 = graph.get_params()
    fd_w = np.zeros_like(w0)
    fd_b = np.zeros_like(b0)

    def loss_at(w, b):
        graph.set_params(w, b)
        loss, _, _ = graph.loss_and_grads(action, reward, cfg)
        return loss

    for i in range(len(w0)):
        wp, wm = w0.copy(), w0.copy()
        wp[i] += h
        wm[i] -= h
        fd_w[i] = (loss_at(wp, b0) - loss_at(wm, b0)) / (2 * h)
    for i in range(len(b0)):
        bp, bm = b0.copy(), b0.copy()
        bp[i] += h
        bm[i] -= h
        fd_b[i] = (loss_at(w0, bp) - loss_at(w0, bm)) / (2 * h)
    graph.set_params(w0, b0)
    return fd_w, fd_b


def test_gradients_match_finite_differences():
    rng = np.random.default_rng(123)
    cfg = TrainConfig()
    action = "go(north)"
    checked = 0
    attempts = 0
    while checked < 25 and attempts < 500:
        attempts += 1
        g = random_trainable_graph(rng)
        if saturation_margins(g, action) < 1e-3:
            continue
        reward = float(rng.integers(0, 2))
        loss, gw, gb = g.loss_and_grads(action, reward, cfg)
        fd_w, fd_b = finite_difference_grads(g, action, reward, cfg)
        np.testing.assert_allclose(gw, fd_w, atol=1e-4)
        np.testing.assert_allclose(gb, fd_b, atol=1e-4)
        checked += 1
    assert checked == 25


def test_score_falls_back_to_stored_bound_without_rules():
    g = LnnGraph.build({
        "nodes": [{"id": "act", "kind": "proposition"}],
        "edges": [],
        "actions": ["act"],
    })
    g.set_fact("act", TruthBounds(0.4, 0.9))
    assert g.action_score("act") == pytest.approx(0.4)
    loss = g.train_step("act", reward=1.0, config=TrainConfig(contradiction_weight=0.0))
    assert loss == pytest.approx(0.36)


def test_train_config_validation():
    with pytest.raises(ValueError):
        TrainConfig(learning_rate=0.0)
    with pytest.raises(ValueError):
        TrainConfig(contradiction_weight=-0.1)
    with pytest.raises(ValueError):
        TrainConfig(weight_max=0.5)
