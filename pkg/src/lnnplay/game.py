"""Deterministic coin-collector text game.

Rooms form a symmetric graph embedded on the integer lattice; the quest is
to walk from the start room to the coin room and take the coin (sparse
reward: 1 on pickup, 0 otherwise). Observations are rendered from fixed
sentence templates so the pattern parser can recover the exit set exactly.

Generated layouts are a main path plus one-room dead-end branches. Two
guarantees matter downstream and are enforced here:

* no two rooms share a lattice coordinate (the visited-direction tracker
  relies on it), and
* at any path room, the on-path exit precedes every branch exit in the
  fixed north/east/south/west order, and the coin room has no branches, so
  a knowledge-driven agent that breaks ties in that order walks the optimal
  route.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field, replace
from enum import Enum

from .rng import Lcg

MAX_STEPS_DEFAULT = 50

CANT_GO_TEXT = "You can't go that way."
INVALID_TEXT = "I don't understand that command."
NO_COIN_TEXT = "There is no coin here."
COIN_TEXT = "You pick up the coin. Your score has just gone up by one point."


class Direction(str, Enum):
    NORTH = "north"
    EAST = "east"
    SOUTH = "south"
    WEST = "west"

    @property
    def opposite(self) -> "Direction":
        return _OPPOSITE[self]

    @property
    def delta(self) -> tuple[int, int]:
        return _DELTA[self]

    def __str__(self) -> str:
        return self.value


DIRECTIONS = (Direction.NORTH, Direction.EAST, Direction.SOUTH, Direction.WEST)
_OPPOSITE = {
    Direction.NORTH: Direction.SOUTH,
    Direction.SOUTH: Direction.NORTH,
    Direction.EAST: Direction.WEST,
    Direction.WEST: Direction.EAST,
}
_DELTA = {
    Direction.NORTH: (0, 1),
    Direction.EAST: (1, 0),
    Direction.SOUTH: (0, -1),
    Direction.WEST: (-1, 0),
}


class LayoutError(ValueError):
    pass


class GameOverError(RuntimeError):
    """Raised when stepping a finished game."""


# --------------------------------------------------------------------- commands

@dataclass(frozen=True)
class Go:
    direction: Direction


@dataclass(frozen=True)
class TakeCoin:
    pass


@dataclass(frozen=True)
class Invalid:
    text: str


Command = Go | TakeCoin | Invalid


def parse_command(text: str) -> Command:
    """Case-insensitive "go <direction>" / "take coin"; anything else is
    Invalid and never mutates game state."""
    words = text.strip().lower().split()
    if len(words) == 2 and words[0] == "go":
        try:
            return Go(Direction(words[1]))
        except ValueError:
            return Invalid(text)
    if words == ["take", "coin"]:
        return TakeCoin()
    return Invalid(text)


def command_label(cmd: Command) -> str:
    if isinstance(cmd, Go):
        return f"go {cmd.direction.value}"
    if isinstance(cmd, TakeCoin):
        return "take coin"
    return cmd.text


# ----------------------------------------------------------------------- layout

@dataclass(frozen=True)
class Layout:
    """Symmetric room graph. ``rooms`` keeps generation order so that
    serialization round-trips byte-identically."""

    rooms: tuple[str, ...]
    connections: dict[tuple[str, Direction], str]
    start: str
    coin_room: str

    def exits(self, room: str) -> list[Direction]:
        return [d for d in DIRECTIONS if (room, d) in self.connections]

    def neighbor(self, room: str, direction: Direction) -> str | None:
        return self.connections.get((room, direction))

    def validate(self) -> "Layout":
        room_set = set(self.rooms)
        if len(room_set) != len(self.rooms):
            raise LayoutError("duplicate room ids")
        if self.start not in room_set or self.coin_room not in room_set:
            raise LayoutError("start and coin room must exist")
        for (room, d), dest in self.connections.items():
            if room not in room_set or dest not in room_set:
                raise LayoutError(f"connection references unknown room: {room}-{dest}")
            back = self.connections.get((dest, d.opposite))
            if back != room:
                raise LayoutError(f"asymmetric connection {room} -{d}-> {dest}")
        optimal_steps(self)  # raises if the coin is unreachable
        return self

    def to_json(self) -> dict:
        conns = []
        seen = set()
        for room in self.rooms:
            for d in self.exits(room):
                dest = self.connections[(room, d)]
                if (dest, d.opposite, room) in seen:
                    continue
                seen.add((room, d, dest))
                conns.append({"from": room, "dir": d.value, "to": dest})
        return {
            "rooms": list(self.rooms),
            "connections": conns,
            "start": self.start,
            "coin": self.coin_room,
        }

    @classmethod
    def from_json(cls, data: dict) -> "Layout":
        """Accepts the layout file format; symmetric pairs are completed."""
        connections: dict[tuple[str, Direction], str] = {}
        for c in data.get("connections", []):
            d = Direction(c["dir"])
            a, b = c["from"], c["to"]
            for key, dest in (((a, d), b), ((b, d.opposite), a)):
                if key in connections and connections[key] != dest:
                    raise LayoutError(f"conflicting connection at {key}")
                connections[key] = dest
        layout = cls(
            rooms=tuple(data["rooms"]),
            connections=connections,
            start=data["start"],
            coin_room=data["coin"],
        )
        return layout.validate()


def load_layout(path) -> Layout:
    with open(path, "r", encoding="utf-8") as fh:
        return Layout.from_json(json.load(fh))


def fix_a_layout() -> Layout:
    """Three-room walkthrough fixture: A -north-> B -east-> C, coin in C."""
    return Layout.from_json({
        "rooms": ["A", "B", "C"],
        "connections": [
            {"from": "A", "dir": "north", "to": "B"},
            {"from": "B", "dir": "east", "to": "C"},
        ],
        "start": "A",
        "coin": "C",
    })


def _room_name(i: int) -> str:
    # A, B, ..., Z, AA, AB, ...
    name = ""
    i += 1
    while i:
        i, rem = divmod(i - 1, 26)
        name = chr(ord("A") + rem) + name
    return name


def generate_layout(chain_length: int, branches: int, seed: int) -> Layout:
    """Main path of ``chain_length`` moves plus dead-end branch rooms.

    All random choices come from the shared LCG, so a seed pins the layout
    exactly. Branches attach to distinct non-coin path rooms, always in a
    direction that follows the path's own exit in north/east/south/west
    order (see module docstring). Raises LayoutError when more branches are
    requested than attachment rooms exist.
    """
    if chain_length < 1:
        raise LayoutError("chain_length must be >= 1")
    if branches < 0:
        raise LayoutError("branches must be >= 0")
    if branches > chain_length:
        raise LayoutError(
            f"{branches} branches requested but only {chain_length} "
            "non-coin path rooms are attachable"
        )

    rng = Lcg(seed)
    for _ in range(10000):
        layout = _try_generate(chain_length, branches, rng)
        if layout is not None:
            return layout
    raise LayoutError("layout generation did not converge")  # pragma: no cover


def _try_generate(chain_length: int, branches: int, rng: Lcg) -> Layout | None:
    rooms = [_room_name(0)]
    coords = {rooms[0]: (0, 0)}
    occupied = {(0, 0)}
    connections: dict[tuple[str, Direction], str] = {}
    path_exit: dict[str, Direction] = {}

    def free_dirs(room: str) -> list[Direction]:
        x, y = coords[room]
        out = []
        for d in DIRECTIONS:
            if (room, d) in connections:
                continue
            dx, dy = d.delta
            if (x + dx, y + dy) in occupied:
                continue
            out.append(d)
        return out

    def attach(room: str, d: Direction) -> str:
        new_room = _room_name(len(rooms))
        x, y = coords[room]
        dx, dy = d.delta
        rooms.append(new_room)
        coords[new_room] = (x + dx, y + dy)
        occupied.add((x + dx, y + dy))
        connections[(room, d)] = new_room
        connections[(new_room, d.opposite)] = room
        return new_room

    current = rooms[0]
    for _ in range(chain_length):
        options = free_dirs(current)
        if not options:
            return None  # the walk trapped itself; retry with fresh draws
        d = options[rng.below(len(options))]
        path_exit[current] = d
        current = attach(current, d)
    coin_room = current

    path_rooms = [r for r in rooms if r != coin_room]
    for _ in range(branches):
        candidates = []
        for room in path_rooms:
            out = path_exit[room]
            dirs = [d for d in free_dirs(room)
                    if DIRECTIONS.index(d) > DIRECTIONS.index(out)]
            if dirs:
                candidates.append((room, dirs))
        if not candidates:
            return None
        room, dirs = candidates[rng.below(len(candidates))]
        d = dirs[rng.below(len(dirs))]
        attach(room, d)
        path_rooms.remove(room)

    return Layout(
        rooms=tuple(rooms),
        connections=connections,
        start=rooms[0],
        coin_room=coin_room,
    )


def optimal_steps(layout: Layout) -> int:
    """Shortest command count (moves plus the take) by breadth-first search."""
    frontier = [layout.start]
    dist = {layout.start: 0}
    while frontier:
        nxt = []
        for room in frontier:
            for d in layout.exits(room):
                dest = layout.connections[(room, d)]
                if dest not in dist:
                    dist[dest] = dist[room] + 1
                    nxt.append(dest)
        frontier = nxt
    if layout.coin_room not in dist:
        raise LayoutError("coin room unreachable from start")
    return dist[layout.coin_room] + 1


# ------------------------------------------------------------------------ state

@dataclass(frozen=True)
class GameState:
    layout: Layout
    location: str
    has_coin: bool = False
    coin_taken: bool = False
    visited: frozenset[str] = frozenset()
    steps: int = 0
    done: bool = False
    score: int = 0
    max_steps: int = MAX_STEPS_DEFAULT


@dataclass(frozen=True)
class Observation:
    text: str
    reward: float
    done: bool
    score: int


def new_game(layout: Layout, max_steps: int = MAX_STEPS_DEFAULT) -> tuple[GameState, Observation]:
    if max_steps < 1:
        raise ValueError("max_steps must be >= 1")
    state = GameState(
        layout=layout,
        location=layout.start,
        visited=frozenset({layout.start}),
        max_steps=max_steps,
    )
    return state, Observation(render_observation(state), 0.0, False, 0)


def render_observation(state: GameState) -> str:
    """Fixed-template room description; exits listed north/east/south/west."""
    room = state.location
    exits = [d.value for d in state.layout.exits(room)]
    lines = [f"= Room {room} =", f"You are in room {room}."]
    if not exits:
        lines.append("There are no exits.")
    elif len(exits) == 1:
        lines.append(f"There is an exit to the {exits[0]}.")
    elif len(exits) == 2:
        lines.append(f"There are exits to the {exits[0]} and {exits[1]}.")
    else:
        listed = ", ".join(exits[:-1]) + f", and {exits[-1]}"
        lines.append(f"There are exits to the {listed}.")
    if room == state.layout.coin_room and not state.coin_taken:
        lines.append("There is a coin here.")
    return lines[0] + "\n" + " ".join(lines[1:])


def step(state: GameState, command: Command) -> tuple[GameState, Observation]:
    """Apply one command. Invalid commands and blocked moves burn a step and
    leave the position unchanged; the coin pickup ends the game with
    reward 1."""
    if state.done:
        raise GameOverError("game is already finished")

    reward = 0.0
    new_state = replace(state, steps=state.steps + 1)
    text: str

    if isinstance(command, Go):
        dest = state.layout.neighbor(state.location, command.direction)
        if dest is None:
            text = CANT_GO_TEXT
        else:
            new_state = replace(
                new_state,
                location=dest,
                visited=new_state.visited | {dest},
            )
            text = render_observation(new_state)
    elif isinstance(command, TakeCoin):
        if state.location == state.layout.coin_room and not state.coin_taken:
            reward = 1.0
            new_state = replace(new_state, has_coin=True, coin_taken=True, score=1)
            text = COIN_TEXT
        else:
            text = NO_COIN_TEXT
    else:
        text = INVALID_TEXT

    done = new_state.coin_taken or new_state.steps >= new_state.max_steps
    new_state = replace(new_state, done=done)
    return new_state, Observation(text, reward, done, new_state.score)
