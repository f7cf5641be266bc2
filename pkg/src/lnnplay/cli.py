"""Command-line entry points: play, train, compare, export-lnn, serve.

Exit codes: 0 success, 1 runtime failure, 2 usage error (argparse default).
All subcommands are deterministic under fixed --seed.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path
from statistics import median

from . import agents, game
from .lnn import InferenceConfig
from .parsing import Fact
from .rules import BUILTIN_RULEBOOKS, builtin, compile_rulebook, load_rulebook


class UsageError(ValueError):
    """Bad flag values that argparse choices cannot express (exit code 2)."""


def _add_layout_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--layout", metavar="FILE", help="layout JSON file (or 'fix_a')")
    p.add_argument("--chain-length", type=int, default=3)
    p.add_argument("--branches", type=int, default=0)
    p.add_argument("--seed", type=int, default=0)


def _resolve_layout(args) -> game.Layout:
    if args.layout == "fix_a":
        return game.fix_a_layout()
    if args.layout:
        return game.load_layout(args.layout)
    return game.generate_layout(args.chain_length, args.branches, args.seed)


def _resolve_rulebook(name_or_path: str):
    if name_or_path in BUILTIN_RULEBOOKS:
        return builtin(name_or_path)
    if Path(name_or_path).is_file():
        return load_rulebook(name_or_path)
    raise UsageError(f"unknown rulebook {name_or_path!r}")


def cmd_play(args) -> int:
    layout = _resolve_layout(args)
    rulebook = _resolve_rulebook(args.rulebook)
    agent = agents.LoaAgent(rulebook, trainable=False)
    state, obs = game.new_game(layout, args.max_steps)
    from . import parsing

    tracker = parsing.Tracker.start(obs.text)
    facts = parsing.tracker_facts(tracker, parsing.parse_observation(obs.text))
    print(obs.text)
    while not state.done:
        agent.decide(facts)
        print("recommended:" if any(r.recommended for r in agent.last_recommendations)
              else "no recommendation; options:")
        for r in agent.last_recommendations:
            mark = "*" if r.recommended else " "
            print(f"  {mark} {r.action:10s} [{r.lower:.2f}, {r.upper:.2f}]")
        try:
            line = input("> ").strip()
        except EOFError:
            print()
            return 0
        if line.lower() in ("quit", "exit"):
            return 0
        command = game.parse_command(line)
        state, obs = game.step(state, command)
        tracker = parsing.update_tracker(tracker, command, obs.text)
        if parsing.parse_room_header(obs.text) is not None:
            facts = parsing.tracker_facts(tracker, parsing.parse_observation(obs.text))
        print(obs.text)
        print(f"reward: {obs.reward:g}  score: {obs.score}")
    print("Game over." if state.score else "Out of steps.")
    return 0


def _summary_line(metrics: agents.RunMetrics) -> str:
    steps = metrics.steps_list()
    q = max(1, len(steps) // 5)
    return (
        f"agent={metrics.agent_name} episodes={len(steps)} "
        f"median_steps_first_quintile={median(steps[:q]):g} "
        f"median_steps_last_quintile={median(steps[-q:]):g} "
        f"solved={sum(e.solved for e in metrics.episodes)}/{len(steps)}"
    )


def cmd_train(args) -> int:
    if args.episodes < 1:
        raise ValueError("--episodes must be >= 1")
    layout = _resolve_layout(args)
    rulebook = _resolve_rulebook(args.rulebook)
    agent = agents.make_agent(args.agent, rulebook=rulebook, seed=args.seed)
    metrics = agents.train_run(layout, agent, args.episodes, args.seed,
                               max_steps=args.max_steps)
    if args.out:
        agents.write_metrics(metrics, args.out)
        print(f"wrote {args.out}")
    print(_summary_line(metrics))
    return 0


def cmd_compare(args) -> int:
    if args.episodes < 1:
        raise ValueError("--episodes must be >= 1")
    names = [a.strip() for a in args.agents.split(",") if a.strip()]
    for name in names:
        if name not in agents.AGENT_NAMES:
            raise UsageError(f"unknown agent {name!r}")
    layout = _resolve_layout(args)
    rulebook = _resolve_rulebook(args.rulebook)
    rows = []
    for name in names:
        agent = agents.make_agent(name, rulebook=rulebook, seed=args.seed)
        metrics = agents.train_run(layout, agent, args.episodes, args.seed,
                                   max_steps=args.max_steps)
        if args.out:
            path = Path(args.out)
            path.mkdir(parents=True, exist_ok=True)
            agents.write_metrics(metrics, path / f"{name}_seed{args.seed}.jsonl")
        steps = metrics.steps_list()
        rows.append({
            "agent": agent.name,
            "median_steps": median(steps),
            "mean_steps": sum(steps) / len(steps),
            "solved": sum(e.solved for e in metrics.episodes),
            "episodes": len(steps),
        })
    rows.sort(key=lambda r: (r["median_steps"], r["agent"]))
    print(f"{'agent':24s} {'median':>8s} {'mean':>8s} {'solved':>10s}")
    for r in rows:
        print(f"{r['agent']:24s} {r['median_steps']:8g} {r['mean_steps']:8.2f} "
              f"{r['solved']:>6d}/{r['episodes']}")
    return 0


def cmd_export_lnn(args) -> int:
    rulebook = _resolve_rulebook(args.rulebook)
    graph = compile_rulebook(rulebook)
    from .lnn import TruthBounds

    for text in (args.facts.split(",") if args.facts else []):
        text = text.strip()
        if not text:
            continue
        fact = Fact.parse(text)
        if fact.atom not in graph.fact_index:
            raise ValueError(f"no proposition for fact {text!r} in this rulebook")
        graph.set_fact(fact.atom,
                       TruthBounds.true() if fact.positive else TruthBounds.false())
    graph.infer_fixpoint(InferenceConfig())
    if args.format == "json":
        content = json.dumps(graph.snapshot(), indent=2)
    else:
        content = graph.to_dot()
    if args.out:
        Path(args.out).write_text(content + "\n", encoding="utf-8")
        print(f"wrote {args.out}")
    else:
        print(content)
    return 0


def cmd_serve(args) -> int:
    from .server import serve

    serve(port=args.port, ui_dir=args.ui_dir, runs_dir=args.runs_dir)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="lnnplay",
        description="Play, train, compare, and visualize logic-network game agents.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("play", help="interactive terminal session")
    p.add_argument("--game", default="coin_collector", choices=["coin_collector"])
    p.add_argument("--rulebook", default="avoid_revisit")
    p.add_argument("--max-steps", type=int, default=game.MAX_STEPS_DEFAULT)
    _add_layout_flags(p)
    p.set_defaults(func=cmd_play)

    p = sub.add_parser("train", help="run training episodes, write metrics")
    p.add_argument("--game", default="coin_collector", choices=["coin_collector"])
    p.add_argument("--agent", default="loa", choices=list(agents.AGENT_NAMES))
    p.add_argument("--rulebook", default="avoid_revisit")
    p.add_argument("--episodes", type=int, default=100)
    p.add_argument("--out", metavar="PATH")
    p.add_argument("--max-steps", type=int, default=game.MAX_STEPS_DEFAULT)
    _add_layout_flags(p)
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("compare", help="run several agents on identical layouts")
    p.add_argument("--game", default="coin_collector", choices=["coin_collector"])
    p.add_argument("--agents", default="loa,random,tabq",
                   help="comma-separated agent names")
    p.add_argument("--rulebook", default="avoid_revisit")
    p.add_argument("--episodes", type=int, default=100)
    p.add_argument("--out", metavar="DIR")
    p.add_argument("--max-steps", type=int, default=game.MAX_STEPS_DEFAULT)
    _add_layout_flags(p)
    p.set_defaults(func=cmd_compare)

    p = sub.add_parser("export-lnn", help="compile a rulebook, set facts, export")
    p.add_argument("--rulebook", default="simple_nav")
    p.add_argument("--facts", default="", metavar="F1,F2",
                   help='e.g. "found(north),coin_here" (prefix ! for false)')
    p.add_argument("--format", default="json", choices=["json", "dot"])
    p.add_argument("--out", metavar="PATH")
    p.set_defaults(func=cmd_export_lnn)

    p = sub.add_parser("serve", help="run the HTTP session service")
    p.add_argument("--port", type=int, default=8080)
    p.add_argument("--ui-dir", metavar="DIR")
    p.add_argument("--runs-dir", metavar="DIR")
    p.set_defaults(func=cmd_serve)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except KeyboardInterrupt:
        return 130
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (ValueError, OSError, KeyError, game.LayoutError, game.GameOverError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
