"""Pattern-based fact extraction from observation text, plus the spatial
tracker that turns movement history into visited(direction) knowledge.

The parser is total: text that matches no template simply contributes no
facts. The tracker walks the integer lattice alongside the agent; because
generated layouts never place two rooms on one coordinate, an adjacent
coordinate that was never entered is *provably* unvisited, so the tracker
emits a negative visited fact for it (open-world reading is kept for
everything it cannot prove). Hand-written layouts that alias coordinates
are outside this guarantee.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field, replace

from .game import Command, Direction, Go

FACT_PREDICATES = ("found", "visited", "coin_here")

_EXIT_RE = re.compile(r"There (?:is an exit|are exits) to the ([^.]+)\.", re.IGNORECASE)
_DIRECTION_RE = re.compile(r"\b(north|east|south|west)\b", re.IGNORECASE)
_COIN_RE = re.compile(r"There is a coin here\.", re.IGNORECASE)
_HEADER_RE = re.compile(r"^= Room (.+) =", re.MULTILINE)


@dataclass(frozen=True, order=True)
class Fact:
    """Grounded logical fact; ``positive=False`` marks known falsehood."""

    predicate: str
    direction: Direction | None = None
    positive: bool = True

    def __post_init__(self):
        if self.predicate not in FACT_PREDICATES:
            raise ValueError(f"unknown predicate {self.predicate!r}")
        needs_dir = self.predicate in ("found", "visited")
        if needs_dir and self.direction is None:
            raise ValueError(f"{self.predicate} requires a direction")
        if not needs_dir and self.direction is not None:
            raise ValueError(f"{self.predicate} takes no direction")

    @property
    def atom(self) -> str:
        """Proposition label, sign excluded: found(north), coin_here."""
        if self.direction is None:
            return self.predicate
        return f"{self.predicate}({self.direction.value})"

    def __str__(self) -> str:
        return self.atom if self.positive else f"!{self.atom}"

    @classmethod
    def parse(cls, text: str) -> "Fact":
        positive = not text.startswith("!")
        body = text.lstrip("!")
        m = re.match(r"^(\w+)(?:\((\w+)\))?$", body)
        if not m:
            raise ValueError(f"cannot parse fact {text!r}")
        pred, arg = m.groups()
        return cls(pred, Direction(arg) if arg else None, positive)


FactSet = frozenset  # of Fact


def found(direction: Direction, positive: bool = True) -> Fact:
    return Fact("found", direction, positive)


def visited(direction: Direction, positive: bool = True) -> Fact:
    return Fact("visited", direction, positive)


def coin_here() -> Fact:
    return Fact("coin_here")


def parse_observation(text: str) -> frozenset[Fact]:
    """Extract found(d) for every direction named in an exit sentence, plus
    coin_here when the coin sentence is present. Never fails."""
    facts: set[Fact] = set()
    for m in _EXIT_RE.finditer(text):
        for d in _DIRECTION_RE.findall(m.group(1)):
            facts.add(found(Direction(d.lower())))
    if _COIN_RE.search(text):
        facts.add(coin_here())
    return frozenset(facts)


def parse_room_header(text: str) -> str | None:
    """Room name from the observation header line, or None."""
    m = _HEADER_RE.search(text)
    return m.group(1) if m else None


@dataclass(frozen=True)
class Tracker:
    """Lattice map of everywhere the agent has been."""

    current_room: str | None = None
    current_pos: tuple[int, int] = (0, 0)
    room_positions: dict[str, tuple[int, int]] = field(default_factory=dict)
    visited_rooms: frozenset[str] = frozenset()

    @classmethod
    def start(cls, observation_text: str) -> "Tracker":
        room = parse_room_header(observation_text)
        if room is None:
            return cls()
        return cls(
            current_room=room,
            current_pos=(0, 0),
            room_positions={room: (0, 0)},
            visited_rooms=frozenset({room}),
        )


def update_tracker(tracker: Tracker, executed: Command, observation_text: str) -> Tracker:
    """Advance the tracker for one step.

    Only a successful move changes anything: success is recognized by the
    room header in the observation. Failed moves, invalid commands, and
    take-coin leave the lattice untouched.
    """
    if not isinstance(executed, Go):
        return tracker
    room = parse_room_header(observation_text)
    if room is None:
        return tracker
    dx, dy = executed.direction.delta
    pos = (tracker.current_pos[0] + dx, tracker.current_pos[1] + dy)
    positions = dict(tracker.room_positions)
    positions.setdefault(room, pos)
    return Tracker(
        current_room=room,
        current_pos=pos,
        room_positions=positions,
        visited_rooms=tracker.visited_rooms | {room},
    )


def tracker_facts(tracker: Tracker, found_facts: frozenset[Fact]) -> frozenset[Fact]:
    """Annotate found(d) facts with visited knowledge.

    For each found(d), the lattice coordinate behind d either holds a room
    the agent entered before (visited(d)) or holds nothing the agent ever
    entered (!visited(d)); both are knowledge, not assumption, on layouts
    without coordinate aliasing. Other facts pass through unchanged.
    """
    out = set(found_facts)
    occupied = set(tracker.room_positions.values())
    x, y = tracker.current_pos
    for fact in found_facts:
        if fact.predicate != "found" or not fact.positive:
            continue
        dx, dy = fact.direction.delta
        out.add(visited(fact.direction, positive=(x + dx, y + dy) in occupied))
    return frozenset(out)
