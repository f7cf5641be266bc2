"""Rule templates and their grounding into logic graphs.

A template is written over a single direction variable ``D``
(``go(D) <- found(D) & !visited(D)``) and grounds into one rule instance per
direction; templates without ``D`` (``take_coin <- coin_here``) ground once.
Grounding is pure and deterministic: the same rulebook always yields the
same node ids in the same order, so snapshots stay diffable across steps.

Rules become asserted Implies nodes ``body -> head``; constraints become
asserted Implies ``body -> Not(head)``, so a firing constraint suppresses
the action through downward inference and shows up as contradiction when a
plain rule supports the same action.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field

from .lnn import LnnGraph

DIRECTIONS = ("north", "east", "south", "west")

# action command labels in recommendation/tie order
ACTION_ORDER = ("go north", "go east", "go south", "go west", "take coin")

FACT_PREDICATES = {"found", "visited", "coin_here"}
ACTION_PREDICATES = {"go", "take_coin"}

_LITERAL_RE = re.compile(r"^(!)?([a-z_]+)(?:\((\w+)\))?$")


class RulebookError(ValueError):
    """Malformed template or rulebook."""


@dataclass(frozen=True)
class Literal:
    predicate: str
    arg: str | None = None  # "D" or None
    negated: bool = False

    @classmethod
    def parse(cls, text: str) -> "Literal":
        m = _LITERAL_RE.match(text.strip())
        if not m:
            raise RulebookError(f"cannot parse literal {text!r}")
        neg, pred, arg = m.groups()
        if arg is not None and arg != "D":
            raise RulebookError(f"only the variable D is supported, got {text!r}")
        return cls(predicate=pred, arg=arg, negated=bool(neg))

    def ground(self, direction: str | None) -> str:
        """Grounded atom string, e.g. found(north) or coin_here."""
        if self.arg is None:
            return self.predicate
        return f"{self.predicate}({direction})"

    def __str__(self) -> str:
        sign = "!" if self.negated else ""
        var = f"({self.arg})" if self.arg else ""
        return f"{sign}{self.predicate}{var}"


@dataclass(frozen=True)
class RuleTemplate:
    head: str
    body: tuple[str, ...]
    kind: str = "rule"  # "rule" | "constraint"
    weight: float = 1.0

    def __post_init__(self):
        if self.kind not in ("rule", "constraint"):
            raise RulebookError(f"unknown template kind {self.kind!r}")
        if self.weight < 0:
            raise RulebookError("initial weight must be nonnegative")
        head = Literal.parse(self.head)
        if head.negated:
            raise RulebookError("template heads may not be negated")
        if head.predicate not in ACTION_PREDICATES:
            raise RulebookError(f"head {self.head!r} is not an action predicate")
        if not self.body:
            raise RulebookError("template body may not be empty")
        body = [Literal.parse(b) for b in self.body]
        for lit in body:
            if lit.predicate not in FACT_PREDICATES:
                raise RulebookError(f"unknown predicate {lit.predicate!r}")
        body_has_var = any(b.arg is not None for b in body)
        if (head.arg is not None) != body_has_var:
            raise RulebookError(
                f"the variable D must be shared by head and body: {self.head} <- {self.body}"
            )

    @property
    def head_literal(self) -> Literal:
        return Literal.parse(self.head)

    @property
    def body_literals(self) -> tuple[Literal, ...]:
        return tuple(Literal.parse(b) for b in self.body)

    def groundings(self):
        """Direction bindings this template expands over."""
        uses_var = self.head_literal.arg is not None or any(
            b.arg is not None for b in self.body_literals
        )
        return DIRECTIONS if uses_var else (None,)


@dataclass(frozen=True)
class Rulebook:
    name: str
    templates: tuple[RuleTemplate, ...]
    constants: tuple[str, ...] = DIRECTIONS


def action_label(atom: str) -> str:
    """Command label for a grounded action atom: go(north) -> "go north"."""
    if atom == "take_coin":
        return "take coin"
    m = re.match(r"^go\((\w+)\)$", atom)
    if not m:
        raise RulebookError(f"not an action atom: {atom!r}")
    return f"go {m.group(1)}"


def action_atom(label: str) -> str:
    """Inverse of :func:`action_label`."""
    if label == "take coin":
        return "take_coin"
    m = re.match(r"^go (\w+)$", label)
    if not m:
        raise RulebookError(f"not an action label: {label!r}")
    return f"go({m.group(1)})"


def pretty_atom(atom: str) -> str:
    return atom.replace("(", " ").replace(")", "").replace("_", " ")


class _GraphAssembler:
    """Accumulates unique nodes/edges in first-reference order."""

    def __init__(self):
        self.nodes: list[dict] = []
        self.edges: list[dict] = []
        self.seen: set[str] = set()

    def add_node(self, node_id: str, **fields) -> str:
        if node_id not in self.seen:
            self.seen.add(node_id)
            self.nodes.append({"id": node_id, **fields})
        return node_id

    def add_edge(self, parent: str, child: str, weight: float) -> None:
        self.edges.append({"parent": parent, "child": child, "weight": weight})


def compile_rulebook(rulebook: Rulebook) -> LnnGraph:
    """Ground every template over the direction constants into one graph.

    Shared atoms (found(north), go(east), ...) become a single proposition
    node no matter how many templates mention them. Rule and constraint
    nodes are asserted [1, 1]; every edge carries the template's initial
    weight.
    """
    asm = _GraphAssembler()
    actions_present: set[str] = set()
    fact_index: dict[str, str] = {}

    def prop(atom: str, is_action: bool) -> str:
        nid = asm.add_node(atom, kind="proposition", label=pretty_atom(atom))
        if not is_action and atom not in fact_index:
            fact_index[atom] = nid
        return nid

    def body_node(template: RuleTemplate, direction: str | None) -> tuple[str, str]:
        """Returns (node id, grounded body text) for the template body."""
        literal_ids = []
        parts = []
        for lit in template.body_literals:
            atom = lit.ground(direction)
            pid = prop(atom, is_action=False)
            if lit.negated:
                nid = asm.add_node(f"not:{atom}", kind="not", label="¬")
                asm.add_edge(nid, pid, template.weight)
                literal_ids.append(nid)
                parts.append(f"!{atom}")
            else:
                literal_ids.append(pid)
                parts.append(atom)
        text = "&".join(parts)
        if len(literal_ids) == 1:
            return literal_ids[0], text
        and_id = asm.add_node(f"and:{text}", kind="and", label="∧")
        for lid in literal_ids:
            asm.add_edge(and_id, lid, template.weight)
        return and_id, text

    for template in rulebook.templates:
        for direction in template.groundings():
            head_atom = template.head_literal.ground(direction)
            head_id = prop(head_atom, is_action=True)
            actions_present.add(head_atom)
            body_id, body_text = body_node(template, direction)
            if template.kind == "rule":
                rule_id = asm.add_node(
                    f"rule:{head_atom}<-{body_text}",
                    kind="implies", label="→", asserted=True,
                )
            else:
                not_head = asm.add_node(
                    f"not:{head_atom}", kind="not", label="¬"
                )
                asm.add_edge(not_head, head_id, template.weight)
                rule_id = asm.add_node(
                    f"constraint:!{head_atom}<-{body_text}",
                    kind="implies", label="→", asserted=True,
                )
                head_id = not_head
            asm.add_edge(rule_id, body_id, template.weight)
            asm.add_edge(rule_id, head_id, template.weight)

    actions = [
        action_atom(label) for label in ACTION_ORDER
        if action_atom(label) in actions_present
    ]
    graph = LnnGraph.build({
        "nodes": asm.nodes,
        "edges": asm.edges,
        "actions": actions,
        "fact_index": fact_index,
    })
    return graph


_BUILTINS = {
    "simple_nav": (
        RuleTemplate(head="go(D)", body=("found(D)",)),
        RuleTemplate(head="take_coin", body=("coin_here",)),
    ),
    "avoid_revisit": (
        RuleTemplate(head="go(D)", body=("found(D)", "!visited(D)")),
        RuleTemplate(head="take_coin", body=("coin_here",)),
    ),
    "constraint_revisit": (
        RuleTemplate(head="go(D)", body=("found(D)",)),
        RuleTemplate(head="go(D)", body=("visited(D)",), kind="constraint"),
        RuleTemplate(head="take_coin", body=("coin_here",)),
    ),
}

BUILTIN_RULEBOOKS = tuple(_BUILTINS)


def builtin(name: str) -> Rulebook:
    """One of simple_nav, avoid_revisit, constraint_revisit."""
    try:
        templates = _BUILTINS[name]
    except KeyError:
        raise RulebookError(f"unknown rulebook {name!r}") from None
    return Rulebook(name=name, templates=templates)


def load_rulebook(path) -> Rulebook:
    """Read the JSON rulebook file format:
    {"name": str, "templates": [{"head", "body", "kind", "weight"}, ...]}"""
    with open(path, "r", encoding="utf-8") as fh:
        data = json.load(fh)
    templates = tuple(
        RuleTemplate(
            head=t["head"],
            body=tuple(t["body"]),
            kind=t.get("kind", "rule"),
            weight=float(t.get("weight", 1.0)),
        )
        for t in data["templates"]
    )
    return Rulebook(name=data.get("name", "custom"), templates=templates)
