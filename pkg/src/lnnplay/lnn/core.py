"""Propositional weighted real-valued logic graph with truth bounds.

Every node carries an interval ``[lower, upper]`` over its truth value.
Gates evaluate weighted Łukasiewicz activations:

    And:      y = clamp01(beta - sum_i w_i * (1 - x_i))
    Or:       y = clamp01(1 - beta + sum_i w_i * x_i)
    Not:      y = 1 - x                       (unweighted)
    Implies:  y = clamp01(1 - beta + w_a * (1 - a) + w_c * c)

All four are classical at unit weights and beta = 1. Inference alternates an
upward sweep (gates from children) with a downward sweep (children tightened
through the functional inverses), so asserted formulas push truth down to
their consequents. Bounds only ever tighten; a crossed interval
(lower > upper) is a visible contradiction signal, reported but never
repaired.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import IntEnum

import numpy as np

from .kernels import backend_name, kernels

W_MIN = 1e-6


class NodeKind(IntEnum):
    PROPOSITION = 0
    AND = 1
    OR = 2
    NOT = 3
    IMPLIES = 4

    @property
    def wire_name(self) -> str:
        return _KIND_TO_WIRE[self]


_KIND_TO_WIRE = {
    NodeKind.PROPOSITION: "proposition",
    NodeKind.AND: "and",
    NodeKind.OR: "or",
    NodeKind.NOT: "not",
    NodeKind.IMPLIES: "implies",
}
_WIRE_TO_KIND = {v: k for k, v in _KIND_TO_WIRE.items()}

# (min_children, max_children) per kind; None = unbounded
_ARITY = {
    NodeKind.PROPOSITION: (0, 0),
    NodeKind.AND: (1, None),
    NodeKind.OR: (1, None),
    NodeKind.NOT: (1, 1),
    NodeKind.IMPLIES: (2, 2),
}


class GraphError(ValueError):
    """Invalid graph structure (cycle, arity, duplicate id, bad weight)."""


@dataclass(frozen=True)
class TruthBounds:
    """Closed truth interval in [0, 1]; lower > upper marks a contradiction."""

    lower: float
    upper: float

    def __post_init__(self):
        if not (0.0 <= self.lower <= 1.0 and 0.0 <= self.upper <= 1.0):
            raise ValueError(f"bounds outside [0, 1]: {self}")

    @classmethod
    def unknown(cls) -> "TruthBounds":
        return cls(0.0, 1.0)

    @classmethod
    def true(cls) -> "TruthBounds":
        return cls(1.0, 1.0)

    @classmethod
    def false(cls) -> "TruthBounds":
        return cls(0.0, 0.0)

    def contradiction(self) -> float:
        return max(0.0, self.lower - self.upper)

    def classify(self, threshold: float = 0.5) -> str:
        """Wire truth label: contradiction first, then true/false/unknown."""
        if self.lower > self.upper:
            return "contradiction"
        if self.lower >= threshold and self.upper >= threshold:
            return "true"
        if self.lower <= threshold and self.upper <= threshold:
            return "false"
        return "unknown"


@dataclass(frozen=True)
class NodeView:
    """Read-only snapshot of one node."""

    id: str
    kind: NodeKind
    label: str
    beta: float
    bounds: TruthBounds
    asserted: bool


@dataclass(frozen=True)
class InferenceConfig:
    epsilon: float = 1e-6
    max_iterations: int = 20

    def __post_init__(self):
        if self.epsilon <= 0:
            raise ValueError("epsilon must be > 0")
        if self.max_iterations < 1:
            raise ValueError("max_iterations must be >= 1")


@dataclass(frozen=True)
class InferenceReport:
    iterations: int
    converged: bool
    total_contradiction: float


@dataclass(frozen=True)
class TrainConfig:
    learning_rate: float = 0.1
    contradiction_weight: float = 0.1
    weight_max: float = 10.0
    beta_max: float = 10.0

    def __post_init__(self):
        if self.learning_rate <= 0:
            raise ValueError("learning_rate must be > 0")
        if self.contradiction_weight < 0:
            raise ValueError("contradiction_weight must be >= 0")
        if self.weight_max < 1 or self.beta_max < 1:
            raise ValueError("parameter clamps must be >= 1")


class LnnGraph:
    """Mutable weighted-logic graph over flat arrays (single-writer).

    Nodes live in arrays ordered children-first; the sweep kernels run over
    the arrays directly. Construct with :meth:`build` from a spec dict (the
    same schema :meth:`snapshot` emits), then drive with ``set_fact`` /
    ``infer_fixpoint`` / ``train_step``.
    """

    def __init__(self):
        self.ids: list[str] = []
        self.labels: list[str] = []
        self.index: dict[str, int] = {}
        self.kind = np.zeros(0, dtype=np.int8)
        self.asserted = np.zeros(0, dtype=np.uint8)
        self.beta = np.zeros(0, dtype=np.float64)
        self.lower = np.zeros(0, dtype=np.float64)
        self.upper = np.zeros(0, dtype=np.float64)
        self.offsets = np.zeros(1, dtype=np.int64)
        self.children = np.zeros(0, dtype=np.int32)
        self.weights = np.zeros(0, dtype=np.float64)
        # build-time assertions survive reset_bounds; runtime facts do not
        self._base_asserted = np.zeros(0, dtype=np.uint8)
        self._base_lower = np.zeros(0, dtype=np.float64)
        self._base_upper = np.zeros(0, dtype=np.float64)
        self.action_index: list[str] = []
        self.fact_index: dict[str, str] = {}

    # ------------------------------------------------------------------ build

    @classmethod
    def build(cls, spec: dict) -> "LnnGraph":
        """Validate and build a graph from a node/edge spec.

        ``spec`` uses the snapshot schema: ``nodes`` (id, kind, label, beta,
        asserted, optional lower/upper), ``edges`` (parent, child, weight,
        order significant per parent) and ``actions``. Bounds default to
        [0, 1]; asserted nodes without explicit bounds default to [1, 1].
        """
        nodes = spec.get("nodes", [])
        edges = spec.get("edges", [])
        actions = spec.get("actions", [])

        ids = []
        seen = set()
        for nd in nodes:
            nid = nd["id"]
            if nid in seen:
                raise GraphError(f"duplicate node id {nid!r}")
            seen.add(nid)
            ids.append(nid)
        by_id = {nd["id"]: nd for nd in nodes}

        children_of: dict[str, list[tuple[str, float]]] = {nid: [] for nid in ids}
        edge_seen = set()
        for ed in edges:
            p, c = ed["parent"], ed["child"]
            if p not in by_id or c not in by_id:
                raise GraphError(f"edge references unknown node: {p!r} -> {c!r}")
            if (p, c) in edge_seen:
                raise GraphError(f"duplicate edge {p!r} -> {c!r}")
            edge_seen.add((p, c))
            w = float(ed.get("weight", 1.0))
            if w < 0:
                raise GraphError(f"negative weight on edge {p!r} -> {c!r}")
            children_of[p].append((c, w))

        for nid in ids:
            kind = _parse_kind(by_id[nid].get("kind", "proposition"))
            n_children = len(children_of[nid])
            lo, hi = _ARITY[kind]
            if n_children < lo or (hi is not None and n_children > hi):
                raise GraphError(
                    f"node {nid!r} ({kind.wire_name}) has {n_children} children"
                )

        order = _topo_order(ids, children_of)

        g = cls()
        g.ids = order
        g.index = {nid: i for i, nid in enumerate(order)}
        n = len(order)
        g.labels = [by_id[nid].get("label", nid) for nid in order]
        g.kind = np.zeros(n, dtype=np.int8)
        g.asserted = np.zeros(n, dtype=np.uint8)
        g.beta = np.ones(n, dtype=np.float64)
        g.lower = np.zeros(n, dtype=np.float64)
        g.upper = np.ones(n, dtype=np.float64)

        offsets = [0]
        child_idx: list[int] = []
        wts: list[float] = []
        for i, nid in enumerate(order):
            nd = by_id[nid]
            kind = _parse_kind(nd.get("kind", "proposition"))
            g.kind[i] = int(kind)
            is_asserted = bool(nd.get("asserted", False))
            g.asserted[i] = 1 if is_asserted else 0
            g.beta[i] = float(nd.get("beta", 1.0))
            default_lo, default_hi = (1.0, 1.0) if is_asserted else (0.0, 1.0)
            lo_v = float(nd.get("lower", default_lo))
            hi_v = float(nd.get("upper", default_hi))
            if not (0.0 <= lo_v <= 1.0 and 0.0 <= hi_v <= 1.0):
                raise GraphError(f"node {nid!r} bounds outside [0, 1]")
            g.lower[i] = lo_v
            g.upper[i] = hi_v
            for c, w in children_of[nid]:
                child_idx.append(g.index[c])
                wts.append(w)
            offsets.append(len(child_idx))
        g.offsets = np.asarray(offsets, dtype=np.int64)
        g.children = np.asarray(child_idx, dtype=np.int32)
        g.weights = np.asarray(wts, dtype=np.float64)

        for a in actions:
            if a not in g.index:
                raise GraphError(f"unknown action node {a!r}")
        g.action_index = list(actions)

        action_set = set(actions)
        g.fact_index = dict(spec.get("fact_index", {}))
        if not g.fact_index:
            for i, nid in enumerate(order):
                if g.kind[i] == NodeKind.PROPOSITION and nid not in action_set:
                    g.fact_index[g.labels[i]] = nid

        g._base_asserted = g.asserted.copy()
        g._base_lower = g.lower.copy()
        g._base_upper = g.upper.copy()
        return g

    # ------------------------------------------------------------- inspection

    def __len__(self) -> int:
        return len(self.ids)

    def __contains__(self, node_id: str) -> bool:
        return node_id in self.index

    def node(self, node_id: str) -> NodeView:
        i = self._resolve(node_id)
        return NodeView(
            id=self.ids[i],
            kind=NodeKind(int(self.kind[i])),
            label=self.labels[i],
            beta=float(self.beta[i]),
            bounds=TruthBounds(float(self.lower[i]), float(self.upper[i])),
            asserted=bool(self.asserted[i]),
        )

    def bounds(self, node_id: str) -> TruthBounds:
        i = self._resolve(node_id)
        return TruthBounds(float(self.lower[i]), float(self.upper[i]))

    def children_of(self, node_id: str) -> list[tuple[str, float]]:
        i = self._resolve(node_id)
        lo, hi = self.offsets[i], self.offsets[i + 1]
        return [
            (self.ids[int(self.children[e])], float(self.weights[e]))
            for e in range(lo, hi)
        ]

    def edge_slot(self, parent_id: str, child_id: str) -> int:
        """Flat index of an edge in the weights array (for tests/tools)."""
        p = self._resolve(parent_id)
        c = self.index[child_id]
        for e in range(self.offsets[p], self.offsets[p + 1]):
            if self.children[e] == c:
                return int(e)
        raise KeyError(f"no edge {parent_id!r} -> {child_id!r}")

    def get_params(self) -> tuple[np.ndarray, np.ndarray]:
        return self.weights.copy(), self.beta.copy()

    def set_params(self, weights, beta) -> None:
        w = np.asarray(weights, dtype=np.float64)
        b = np.asarray(beta, dtype=np.float64)
        if w.shape != self.weights.shape or b.shape != self.beta.shape:
            raise ValueError("parameter shape mismatch")
        if (w < 0).any() or (b < 0).any():
            raise ValueError("parameters must be nonnegative")
        self.weights[:] = w
        self.beta[:] = b

    def _resolve(self, node_id: str) -> int:
        try:
            return self.index[node_id]
        except KeyError:
            raise KeyError(f"unknown node {node_id!r}") from None

    # -------------------------------------------------------------- inference

    def set_fact(self, node_id: str, bounds: TruthBounds) -> None:
        """Pin a proposition's bounds exactly and mark it asserted."""
        node_id = self.fact_index.get(node_id, node_id)
        i = self._resolve(node_id)
        if self.kind[i] != NodeKind.PROPOSITION:
            raise ValueError(f"facts may only target propositions, not {node_id!r}")
        if not isinstance(bounds, TruthBounds):
            bounds = TruthBounds(*bounds)
        self.lower[i] = bounds.lower
        self.upper[i] = bounds.upper
        self.asserted[i] = 1

    def upward_pass(self) -> float:
        return kernels.upward_sweep(
            self.kind, self.asserted, self.beta, self.lower, self.upper,
            self.offsets, self.children, self.weights,
        )

    def downward_pass(self) -> float:
        return kernels.downward_sweep(
            self.kind, self.asserted, self.beta, self.lower, self.upper,
            self.offsets, self.children, self.weights,
        )

    def infer_fixpoint(self, config: InferenceConfig | None = None) -> InferenceReport:
        """Alternate upward/downward sweeps until quiescent.

        One iteration is an upward plus a downward sweep; convergence means
        the last iteration moved no bound by ``epsilon`` or more.
        """
        cfg = config or InferenceConfig()
        iterations = 0
        converged = False
        for _ in range(cfg.max_iterations):
            change = max(self.upward_pass(), self.downward_pass())
            iterations += 1
            if change < cfg.epsilon:
                converged = True
                break
        return InferenceReport(
            iterations=iterations,
            converged=converged,
            total_contradiction=self.contradiction_loss(),
        )

    def contradiction_loss(self) -> float:
        return float(np.maximum(0.0, self.lower - self.upper).sum())

    def reset_bounds(self) -> None:
        """Forget runtime facts and inferred bounds; keep build-time
        assertions (rules) and all trained parameters."""
        runtime = self._base_asserted == 0
        self.lower[runtime] = 0.0
        self.upper[runtime] = 1.0
        self.asserted[:] = self._base_asserted
        self.lower[~runtime] = self._base_lower[~runtime]
        self.upper[~runtime] = self._base_upper[~runtime]

    # --------------------------------------------------------------- training

    def rules_concluding(self, action_id: str) -> list[int]:
        """Indices of Implies nodes whose consequent is the given node."""
        t = self._resolve(action_id)
        out = []
        for i in range(len(self.ids)):
            if self.kind[i] == NodeKind.IMPLIES:
                lo = self.offsets[i]
                if int(self.children[lo + 1]) == t:
                    out.append(i)
        return out

    def action_score(self, action_id: str) -> float:
        """Differentiable support for an action: the strongest Or-style
        activation 1 - beta_r + w_body * body over the rules concluding it,
        with bodies evaluated by one pure upward sweep. Falls back to the
        action's stored lower bound when no rule concludes it."""
        score, _, _, _, _ = self._score_forward(action_id)
        return score

    def _score_forward(self, action_id: str):
        n = len(self.ids)
        out_l = np.zeros(n, dtype=np.float64)
        out_u = np.zeros(n, dtype=np.float64)
        kernels.forward_eval(
            self.kind, self.beta, self.lower, self.upper,
            self.offsets, self.children, self.weights, out_l, out_u,
        )
        rules = self.rules_concluding(action_id)
        if not rules:
            return float(self.lower[self._resolve(action_id)]), None, None, out_l, out_u
        best_r = -1
        best_pre = -math.inf
        for r in rules:
            lo = self.offsets[r]
            body = int(self.children[lo])
            pre = 1.0 - self.beta[r] + self.weights[lo] * out_l[body]
            if pre > best_pre:
                best_pre = pre
                best_r = r
        score = min(1.0, max(0.0, best_pre))
        return float(score), best_r, float(best_pre), out_l, out_u

    def loss_and_grads(self, action_id: str, reward: float, config: TrainConfig):
        """Bandit loss and its gradients; does not update parameters.

        loss = (score - target)^2 + contradiction_weight * contradiction,
        target = 1 if reward > 0 else 0. The contradiction term is read from
        the current bounds and is constant with respect to the parameters.
        """
        target = 1.0 if reward > 0 else 0.0
        score, best_r, best_pre, out_l, out_u = self._score_forward(action_id)
        contradiction = self.contradiction_loss()
        loss = (score - target) ** 2 + config.contradiction_weight * contradiction

        grad_w = np.zeros_like(self.weights)
        grad_beta = np.zeros_like(self.beta)
        if best_r is not None:
            d_score = 2.0 * (score - target)
            # saturated scores (pre-activation at or past a clamp boundary)
            # carry subgradient 0: fully-confirmed rules stay frozen
            if 0.0 < best_pre < 1.0 and d_score != 0.0:
                lo = self.offsets[best_r]
                body = int(self.children[lo])
                grad_beta[best_r] += -d_score
                grad_w[lo] += d_score * out_l[body]
                d_l = np.zeros_like(out_l)
                d_u = np.zeros_like(out_u)
                d_l[body] = d_score * self.weights[lo]
                kernels.backward_eval(
                    self.kind, self.beta, self.offsets, self.children,
                    self.weights, out_l, out_u, d_l, d_u, grad_beta, grad_w,
                )
        return float(loss), grad_w, grad_beta

    def train_step(self, action_id: str, reward: float,
                   config: TrainConfig | None = None) -> float:
        """One projected gradient-descent step on the bandit loss for the
        chosen action; returns the pre-update loss."""
        cfg = config or TrainConfig()
        if action_id not in self.index:
            raise KeyError(f"unknown action {action_id!r}")
        if action_id not in self.action_index:
            raise KeyError(f"{action_id!r} is not an action node")
        loss, grad_w, grad_beta = self.loss_and_grads(action_id, reward, cfg)
        np.clip(self.weights - cfg.learning_rate * grad_w, 0.0, cfg.weight_max,
                out=self.weights)
        np.clip(self.beta - cfg.learning_rate * grad_beta, 0.0, cfg.beta_max,
                out=self.beta)
        return loss

    # ------------------------------------------------------------------ export

    def snapshot(self) -> dict:
        """JSON-serializable state: nodes with bounds and truth labels,
        weighted edges, and the action list."""
        nodes = []
        for i, nid in enumerate(self.ids):
            tb = TruthBounds(float(self.lower[i]), float(self.upper[i]))
            nodes.append({
                "id": nid,
                "kind": NodeKind(int(self.kind[i])).wire_name,
                "label": self.labels[i],
                "lower": tb.lower,
                "upper": tb.upper,
                "beta": float(self.beta[i]),
                "asserted": bool(self.asserted[i]),
                "truth": tb.classify(),
            })
        edges = []
        for i, nid in enumerate(self.ids):
            for e in range(self.offsets[i], self.offsets[i + 1]):
                edges.append({
                    "parent": nid,
                    "child": self.ids[int(self.children[e])],
                    "weight": float(self.weights[e]),
                })
        return {"nodes": nodes, "edges": edges, "actions": list(self.action_index)}

    def to_dot(self) -> str:
        """GraphViz rendering; truth=true nodes fill red, Implies gates draw
        antecedent -> gate -> consequent so rules read left to right."""
        snap = self.snapshot()
        lines = ["digraph lnn {", "  rankdir=LR;"]
        action_set = set(snap["actions"])
        for nd in snap["nodes"]:
            fill = "red" if nd["truth"] == "true" else "white"
            if nd["kind"] == "proposition":
                shape = "box" if nd["id"] in action_set else "ellipse"
            else:
                shape = "circle"
            label = nd["label"].replace('"', r"\"")
            lines.append(
                f'  "{nd["id"]}" [label="{label}", shape={shape}, '
                f'style=filled, fillcolor={fill}];'
            )
        for i, nid in enumerate(self.ids):
            lo, hi = self.offsets[i], self.offsets[i + 1]
            if self.kind[i] == NodeKind.IMPLIES:
                ant = self.ids[int(self.children[lo])]
                con = self.ids[int(self.children[lo + 1])]
                lines.append(f'  "{ant}" -> "{nid}" [label="{self.weights[lo]:g}"];')
                lines.append(f'  "{nid}" -> "{con}" [label="{self.weights[lo + 1]:g}"];')
            else:
                for e in range(lo, hi):
                    c = self.ids[int(self.children[e])]
                    lines.append(f'  "{c}" -> "{nid}" [label="{self.weights[e]:g}"];')
        lines.append("}")
        return "\n".join(lines)

    @classmethod
    def from_snapshot(cls, snap: dict) -> "LnnGraph":
        return cls.build(snap)


def _parse_kind(name) -> NodeKind:
    if isinstance(name, NodeKind):
        return name
    try:
        return _WIRE_TO_KIND[str(name).lower()]
    except KeyError:
        raise GraphError(f"unknown node kind {name!r}") from None


def _topo_order(ids: list[str], children_of: dict[str, list[tuple[str, float]]]) -> list[str]:
    """Children-first order, stable in declaration order; raises on cycles."""
    WHITE, GREY, BLACK = 0, 1, 2
    state = {nid: WHITE for nid in ids}
    order: list[str] = []

    def visit(nid: str, stack: list[str]):
        state[nid] = GREY
        for c, _ in children_of[nid]:
            if state[c] == GREY:
                cycle = " -> ".join(stack + [nid, c])
                raise GraphError(f"cycle detected: {cycle}")
            if state[c] == WHITE:
                visit(c, stack + [nid])
        state[nid] = BLACK
        order.append(nid)

    for nid in ids:
        if state[nid] == WHITE:
            visit(nid, [])
    return order


__all__ = [
    "GraphError",
    "InferenceConfig",
    "InferenceReport",
    "LnnGraph",
    "NodeKind",
    "NodeView",
    "TrainConfig",
    "TruthBounds",
    "W_MIN",
    "backend_name",
]
