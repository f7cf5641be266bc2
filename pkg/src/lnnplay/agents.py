"""Agents and the perceive-decide-act-train loop.

Three agents share one protocol: ``decide(facts)`` picks a command label and
``observe(transition, next_facts)`` learns from its outcome.

* ``LoaAgent`` grounds a rulebook into a logic graph, pins the step's facts,
  runs bounds inference to a fixpoint, and recommends every action whose
  both bounds clear the threshold; ties break in the fixed action order.
* ``RandomAgent`` picks uniformly among fact-applicable actions.
* ``TabQAgent`` is epsilon-greedy tabular Q-learning keyed on the sorted
  fact labels.

``run_episode``/``train_run`` drive any of them through the game with the
pattern parser and spatial tracker supplying facts, and record replayable
logs and per-episode metrics.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

from . import game as g
from . import parsing
from .lnn import InferenceConfig, LnnGraph, TrainConfig, TruthBounds
from .parsing import Fact, Tracker
from .rng import Lcg
from .rules import ACTION_ORDER, Rulebook, action_atom, action_label, builtin, compile_rulebook

AGENT_NAMES = ("loa", "random", "tabq")


@dataclass(frozen=True)
class AgentConfig:
    tau: float = 0.5
    tie_order: tuple[str, ...] = ACTION_ORDER
    explore_epsilon: float = 0.0

    def __post_init__(self):
        if not (0.0 < self.tau < 1.0):
            raise ValueError("tau must be in (0, 1)")
        if not (0.0 <= self.explore_epsilon <= 1.0):
            raise ValueError("explore_epsilon must be in [0, 1]")


@dataclass(frozen=True)
class Recommendation:
    action: str
    lower: float
    upper: float
    recommended: bool

    def to_json(self) -> dict:
        return {
            "action": self.action,
            "lower": self.lower,
            "upper": self.upper,
            "recommended": self.recommended,
        }


@dataclass(frozen=True)
class Transition:
    facts: frozenset[Fact]
    action: str
    reward: float
    done: bool


def applicable_actions(facts: frozenset[Fact],
                       tie_order: tuple[str, ...] = ACTION_ORDER) -> list[str]:
    """Actions the current facts enable: go d for found(d), take coin for
    coin_here."""
    atoms = {f.atom for f in facts if f.positive}
    out = []
    for label in tie_order:
        if label == "take coin":
            if "coin_here" in atoms:
                out.append(label)
        elif label.removeprefix("go ") != label:
            if f"found({label.removeprefix('go ')})" in atoms:
                out.append(label)
    return out


def loa_decide(graph: LnnGraph, facts: frozenset[Fact],
               config: AgentConfig | None = None,
               inference: InferenceConfig | None = None,
               ) -> tuple[str, list[Recommendation]]:
    """Fact grounding + fixpoint inference + threshold recommendation.

    Positive facts pin their proposition to [1, 1], negative ones to [0, 0];
    facts whose proposition the rulebook never mentions are skipped (a
    simple rulebook is free to ignore visited knowledge). An action is
    recommended when both bounds reach tau, which excludes unknown and
    contradictory actions. Chosen is the first recommended action in tie
    order, falling back to the first fact-applicable one.
    """
    cfg = config or AgentConfig()
    graph.reset_bounds()
    for fact in sorted(facts):
        if fact.atom in graph.fact_index:
            graph.set_fact(
                fact.atom,
                TruthBounds.true() if fact.positive else TruthBounds.false(),
            )
    graph.infer_fixpoint(inference)

    recommendations = []
    by_label: dict[str, Recommendation] = {}
    for atom in graph.action_index:
        b = graph.bounds(atom)
        rec = Recommendation(
            action=action_label(atom),
            lower=b.lower,
            upper=b.upper,
            recommended=bool(b.lower >= cfg.tau and b.upper >= cfg.tau),
        )
        recommendations.append(rec)
        by_label[rec.action] = rec

    chosen = None
    for label in cfg.tie_order:
        rec = by_label.get(label)
        if rec is not None and rec.recommended:
            chosen = label
            break
    if chosen is None:
        candidates = applicable_actions(facts, cfg.tie_order)
        chosen = candidates[0] if candidates else next(
            (label for label in cfg.tie_order if label in by_label),
            cfg.tie_order[0],
        )
    return chosen, recommendations


class LoaAgent:
    """Knowledge-driven agent: logic recommendations plus bandit training."""

    def __init__(self, rulebook: Rulebook | str = "avoid_revisit",
                 config: AgentConfig | None = None,
                 train_config: TrainConfig | None = None,
                 rng: Lcg | None = None,
                 trainable: bool = True):
        if isinstance(rulebook, str):
            rulebook = builtin(rulebook)
        self.rulebook = rulebook
        self.graph = compile_rulebook(rulebook)
        self.config = config or AgentConfig()
        self.train_config = train_config or TrainConfig()
        self.rng = rng or Lcg(0)
        self.trainable = trainable
        self.name = f"loa({rulebook.name})"
        self.last_recommendations: list[Recommendation] = []

    def decide(self, facts: frozenset[Fact]) -> str:
        chosen, recs = loa_decide(self.graph, facts, self.config)
        self.last_recommendations = recs
        if self.config.explore_epsilon > 0 and self.rng.chance(self.config.explore_epsilon):
            candidates = applicable_actions(facts, self.config.tie_order)
            if candidates:
                chosen = self.rng.choice(candidates)
        return chosen

    def observe(self, transition: Transition, next_facts: frozenset[Fact]) -> float | None:
        if not self.trainable:
            return None
        return self.graph.train_step(
            action_atom(transition.action), transition.reward, self.train_config
        )


class RandomAgent:
    """Uniform choice among fact-applicable actions (all five when the fact
    set is empty)."""

    name = "random"

    def __init__(self, rng: Lcg | None = None):
        self.rng = rng or Lcg(0)

    def decide(self, facts: frozenset[Fact]) -> str:
        candidates = applicable_actions(facts) or list(ACTION_ORDER)
        return self.rng.choice(candidates)

    def observe(self, transition: Transition, next_facts: frozenset[Fact]) -> None:
        return None


class TabQAgent:
    """Tabular Q-learning over fact-label state keys; missing entries read 0.

    Exploration decays per episode from ``epsilon_start`` down to the
    standing rate ``epsilon_greedy``; with the fixed tie order and a sparse
    terminal reward, a constant low epsilon never escapes the zero-Q greedy
    loops that some layouts form.
    """

    name = "tabq"

    def __init__(self, alpha: float = 0.5, gamma: float = 0.9,
                 epsilon_greedy: float = 0.1, epsilon_start: float = 1.0,
                 epsilon_decay: float = 0.985, rng: Lcg | None = None):
        self.alpha = alpha
        self.gamma = gamma
        self.epsilon_greedy = epsilon_greedy
        self.epsilon_start = epsilon_start
        self.epsilon_decay = epsilon_decay
        self.rng = rng or Lcg(0)
        self.table: dict[tuple[str, str], float] = {}
        self.episode = 0

    @property
    def epsilon(self) -> float:
        return max(self.epsilon_greedy,
                   self.epsilon_start * self.epsilon_decay ** self.episode)

    @staticmethod
    def state_key(facts: frozenset[Fact]) -> str:
        return "|".join(sorted(str(f) for f in facts))

    def q(self, state: str, action: str) -> float:
        return self.table.get((state, action), 0.0)

    def _candidates(self, facts: frozenset[Fact]) -> list[str]:
        return applicable_actions(facts) or list(ACTION_ORDER)

    def decide(self, facts: frozenset[Fact]) -> str:
        candidates = self._candidates(facts)
        if self.rng.chance(self.epsilon):
            return self.rng.choice(candidates)
        state = self.state_key(facts)
        best = candidates[0]  # greedy ties break in tie order
        best_q = self.q(state, best)
        for a in candidates[1:]:
            qa = self.q(state, a)
            if qa > best_q:
                best, best_q = a, qa
        return best

    def observe(self, transition: Transition, next_facts: frozenset[Fact]) -> None:
        state = self.state_key(transition.facts)
        if transition.done:
            target = transition.reward
            self.episode += 1
        else:
            nxt = self.state_key(next_facts)
            target = transition.reward + self.gamma * max(
                self.q(nxt, a) for a in self._candidates(next_facts)
            )
        old = self.q(state, transition.action)
        self.table[(state, transition.action)] = old + self.alpha * (target - old)


def make_agent(name: str, rulebook: Rulebook | str = "avoid_revisit",
               seed: int = 0, **kwargs):
    if name == "loa":
        return LoaAgent(rulebook, rng=Lcg(seed), **kwargs)
    if name == "random":
        return RandomAgent(rng=Lcg(seed))
    if name == "tabq":
        return TabQAgent(rng=Lcg(seed), **kwargs)
    raise ValueError(f"unknown agent {name!r}")


# ----------------------------------------------------------------- episode loop

@dataclass(frozen=True)
class EpisodeStep:
    t: int
    obs: str
    facts: tuple[str, ...]
    action: str
    reward: float
    done: bool
    recommendations: tuple[Recommendation, ...] = ()

    def to_json(self) -> dict:
        return {
            "t": self.t,
            "obs": self.obs,
            "facts": list(self.facts),
            "action": self.action,
            "reward": self.reward,
            "done": self.done,
        }


@dataclass(frozen=True)
class EpisodeLog:
    steps: tuple[EpisodeStep, ...]
    score: int
    solved: bool

    @property
    def n_steps(self) -> int:
        return len(self.steps)


def run_episode(layout: g.Layout, agent, max_steps: int = g.MAX_STEPS_DEFAULT) -> EpisodeLog:
    """One full episode; the agent sees parsed facts, never raw state."""
    state, obs = g.new_game(layout, max_steps)
    tracker = Tracker.start(obs.text)
    facts = parsing.tracker_facts(tracker, parsing.parse_observation(obs.text))
    steps: list[EpisodeStep] = []

    while not state.done:
        action = agent.decide(facts)
        command = g.parse_command(action)
        state, obs = g.step(state, command)
        tracker = parsing.update_tracker(tracker, command, obs.text)
        new_found = parsing.parse_observation(obs.text)
        if parsing.parse_room_header(obs.text) is not None:
            next_facts = parsing.tracker_facts(tracker, new_found)
        else:
            next_facts = facts  # no room description: retain previous facts
        transition = Transition(facts=facts, action=action,
                                reward=obs.reward, done=obs.done)
        agent.observe(transition, next_facts)
        steps.append(EpisodeStep(
            t=len(steps),
            obs=obs.text,
            facts=tuple(sorted(str(f) for f in facts)),
            action=action,
            reward=obs.reward,
            done=obs.done,
            recommendations=tuple(getattr(agent, "last_recommendations", ())),
        ))
        facts = next_facts

    return EpisodeLog(steps=tuple(steps), score=state.score, solved=state.score > 0)


@dataclass(frozen=True)
class EpisodeMetric:
    episode: int
    steps: int
    return_: float
    solved: bool

    def to_json(self) -> dict:
        return {
            "episode": self.episode,
            "steps": self.steps,
            "return": self.return_,
            "solved": self.solved,
        }


@dataclass(frozen=True)
class RunMetrics:
    agent_name: str
    seed: int
    episodes: tuple[EpisodeMetric, ...]

    def steps_list(self) -> list[int]:
        return [e.steps for e in self.episodes]


def train_run(layout: g.Layout, agent, episodes: int, seed: int,
              max_steps: int = g.MAX_STEPS_DEFAULT) -> RunMetrics:
    """Run ``episodes`` sequential episodes on one fixed layout. Learning
    agents carry their state across episodes; the seed names the run (the
    agent's own RNG must be seeded by the caller, see :func:`make_agent`)."""
    if episodes < 1:
        raise ValueError("episodes must be >= 1")
    metrics = []
    for ep in range(episodes):
        log = run_episode(layout, agent, max_steps)
        metrics.append(EpisodeMetric(
            episode=ep,
            steps=log.n_steps,
            return_=float(log.score),
            solved=log.solved,
        ))
    return RunMetrics(agent_name=agent.name, seed=seed, episodes=tuple(metrics))


def write_metrics(metrics: RunMetrics, path) -> None:
    """JSON-lines: one header object, then one object per episode."""
    with open(path, "w", encoding="utf-8") as fh:
        header = {"agent": metrics.agent_name, "seed": metrics.seed,
                  "episodes": len(metrics.episodes)}
        fh.write(json.dumps(header, separators=(",", ":")) + "\n")
        for em in metrics.episodes:
            fh.write(json.dumps(em.to_json(), separators=(",", ":")) + "\n")


def read_metrics(path) -> RunMetrics:
    with open(path, "r", encoding="utf-8") as fh:
        lines = [json.loads(line) for line in fh if line.strip()]
    header, rows = lines[0], lines[1:]
    return RunMetrics(
        agent_name=header["agent"],
        seed=int(header["seed"]),
        episodes=tuple(
            EpisodeMetric(r["episode"], r["steps"], r["return"], r["solved"])
            for r in rows
        ),
    )


def write_episode_log(log: EpisodeLog, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for st in log.steps:
            fh.write(json.dumps(st.to_json(), separators=(",", ":")) + "\n")
