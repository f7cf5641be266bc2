"""Graph construction, fact assertion, reset, snapshot, classification."""

import json

import pytest

from lnnplay.lnn import GraphError, LnnGraph, TruthBounds


def three_node_spec():
    return {
        "nodes": [
            {"id": "found_north", "kind": "proposition"},
            {"id": "go_north", "kind": "proposition"},
            {"id": "rule", "kind": "implies", "beta": 1.0, "asserted": True},
        ],
        "edges": [
            {"parent": "rule", "child": "found_north", "weight": 1.0},
            {"parent": "rule", "child": "go_north", "weight": 1.0},
        ],
        "actions": ["go_north"],
    }


def test_build_initializes_bounds():
    g = LnnGraph.build(three_node_spec())
    assert len(g) == 3
    assert g.bounds("found_north") == TruthBounds(0.0, 1.0)
    assert g.bounds("go_north") == TruthBounds(0.0, 1.0)
    assert g.bounds("rule") == TruthBounds(1.0, 1.0)
    assert g.node("rule").asserted


def test_build_cycle_error():
    spec = {
        "nodes": [
            {"id": "a", "kind": "not"},
            {"id": "b", "kind": "not"},
        ],
        "edges": [
            {"parent": "a", "child": "b"},
            {"parent": "b", "child": "a"},
        ],
    }
    with pytest.raises(GraphError, match="cycle"):
        LnnGraph.build(spec)


def test_build_arity_errors():
    with pytest.raises(GraphError, match="children"):
        LnnGraph.build({"nodes": [{"id": "g", "kind": "and"}], "edges": []})
    with pytest.raises(GraphError, match="children"):
        LnnGraph.build({
            "nodes": [{"id": "p", "kind": "proposition"},
                      {"id": "g", "kind": "not"},
                      {"id": "q", "kind": "proposition"}],
            "edges": [{"parent": "g", "child": "p"}, {"parent": "g", "child": "q"}],
        })
    with pytest.raises(GraphError, match="children"):
        LnnGraph.build({
            "nodes": [{"id": "p", "kind": "proposition"}],
            "edges": [{"parent": "p", "child": "p"}],
        })


def test_build_duplicate_and_negative_and_unknown():
    with pytest.raises(GraphError, match="duplicate"):
        LnnGraph.build({"nodes": [{"id": "x"}, {"id": "x"}], "edges": []})
    with pytest.raises(GraphError, match="negative"):
        LnnGraph.build({
            "nodes": [{"id": "p"}, {"id": "g", "kind": "not"}],
            "edges": [{"parent": "g", "child": "p", "weight": -1.0}],
        })
    with pytest.raises(GraphError, match="unknown"):
        LnnGraph.build({"nodes": [{"id": "p"}],
                        "edges": [{"parent": "p", "child": "q"}]})
    with pytest.raises(GraphError, match="unknown node kind"):
        LnnGraph.build({"nodes": [{"id": "p", "kind": "xor"}], "edges": []})


def test_set_fact():
    g = LnnGraph.build(three_node_spec())
    g.set_fact("found_north", TruthBounds.true())
    assert g.bounds("found_north") == TruthBounds(1.0, 1.0)
    assert g.node("found_north").asserted

    g.set_fact("go_north", TruthBounds(0.3, 0.8))
    assert g.bounds("go_north") == TruthBounds(0.3, 0.8)

    with pytest.raises(ValueError, match="propositions"):
        g.set_fact("rule", TruthBounds.true())
    with pytest.raises(KeyError):
        g.set_fact("nope", TruthBounds.true())
    with pytest.raises(ValueError):
        g.set_fact("found_north", TruthBounds(1.5, 2.0))


def test_reset_bounds_idempotent():
    g = LnnGraph.build(three_node_spec())
    g.set_fact("found_north", TruthBounds.true())
    g.infer_fixpoint()
    assert g.bounds("go_north") == TruthBounds(1.0, 1.0)

    g.reset_bounds()
    assert g.bounds("found_north") == TruthBounds(0.0, 1.0)
    assert not g.node("found_north").asserted
    assert g.bounds("go_north") == TruthBounds(0.0, 1.0)
    assert g.bounds("rule") == TruthBounds(1.0, 1.0)  # build-time assertion kept
    first = g.snapshot()
    g.reset_bounds()
    assert g.snapshot() == first


def test_snapshot_roundtrip_identical():
    g = LnnGraph.build(three_node_spec())
    g.set_fact("found_north", TruthBounds.true())
    g.infer_fixpoint()
    snap = g.snapshot()
    rebuilt = LnnGraph.from_snapshot(json.loads(json.dumps(snap)))
    for nid in g.ids:
        assert rebuilt.bounds(nid) == g.bounds(nid)
        assert rebuilt.node(nid).beta == g.node(nid).beta
    assert rebuilt.snapshot()["edges"] == snap["edges"]
    assert rebuilt.action_index == g.action_index


def test_truth_classification():
    assert TruthBounds(0.9, 0.2).classify() == "contradiction"
    assert TruthBounds(1.0, 1.0).classify() == "true"
    assert TruthBounds(0.0, 0.0).classify() == "false"
    assert TruthBounds(0.0, 1.0).classify() == "unknown"
    assert TruthBounds(0.6, 0.9).classify() == "true"
    assert TruthBounds(0.1, 0.4).classify() == "false"
    assert TruthBounds(0.2, 0.9).classify() == "unknown"

    g = LnnGraph.build(three_node_spec())
    snap = g.snapshot()
    by_id = {n["id"]: n for n in snap["nodes"]}
    assert by_id["found_north"]["truth"] == "unknown"
    assert by_id["rule"]["truth"] == "true"


def test_bounds_validation():
    with pytest.raises(ValueError):
        TruthBounds(-0.1, 0.5)
    with pytest.raises(ValueError):
        TruthBounds(0.5, 1.1)
    assert TruthBounds(0.9, 0.2).contradiction() == pytest.approx(0.7)
    assert TruthBounds(0.2, 0.9).contradiction() == 0.0


def test_dot_export_marks_true_nodes():
    g = LnnGraph.build(three_node_spec())
    g.set_fact("found_north", TruthBounds.true())
    g.infer_fixpoint()
    dot = g.to_dot()
    assert '"go_north" [label="go_north", shape=box' in dot
    assert "fillcolor=red" in dot
    # implies draws antecedent -> gate -> consequent
    assert '"found_north" -> "rule"' in dot
    assert '"rule" -> "go_north"' in dot


def test_edge_slot_and_params_roundtrip():
    g = LnnGraph.build(three_node_spec())
    w, b = g.get_params()
    w[g.edge_slot("rule", "found_north")] = 2.5
    g.set_params(w, b)
    assert g.children_of("rule")[0] == ("found_north", 2.5)
    with pytest.raises(ValueError):
        g.set_params(w * -1.0, b)
