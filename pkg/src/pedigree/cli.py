"""Command-line front end: adjacency checks, simulations, validation suites.

All subcommands print JSON to stdout (CSV telemetry is opt-in via flags).
Randomized subcommands accept --seed; when omitted, a seed is generated and
printed in the JSON so the run can be reproduced byte for byte.
"""

from __future__ import annotations

import argparse
import csv
import json
import os
import secrets
import sys

from .cycles import (
    HistoryError,
    InsertionHistory,
    Tour,
    decode_tour,
    format_tour,
    parse_history_text,
    parse_tour_text,
    replay_history,
)

EXIT_OK = 0
EXIT_NEGATIVE = 1
EXIT_ERROR = 2


def _read_if_file(text: str) -> str:
    if os.path.exists(text) and os.path.isfile(text):
        with open(text) as fh:
            return fh.read()
    return text


def _tour_arg(text: str) -> Tour:
    """Accept a tour ("1 4 2 3"), a history ("4: 1 2" lines), or a file of either."""
    raw = _read_if_file(text)
    if ":" in raw:
        return replay_history(parse_history_text(raw))
    return parse_tour_text(raw)


def _history_arg(text: str) -> InsertionHistory:
    """Accept history text, the JSON mapping printed by `decode`, or a file."""
    raw = _read_if_file(text).strip()
    if raw.startswith("{"):
        mapping = {int(k): tuple(v) for k, v in json.loads(raw).items()}
        return InsertionHistory.from_mapping(mapping)
    return parse_history_text(raw)


def _emit_json(obj: dict, path: str | None = None) -> None:
    text = json.dumps(obj, indent=2, sort_keys=True)
    print(text)
    if path:
        with open(path, "w") as fh:
            fh.write(text + "\n")


def _seed_arg(value: int | None) -> int:
    return value if value is not None else secrets.randbits(32)


def _cmd_adjacency(args) -> int:
    from .adjacency import pedigree_adjacent

    tour_a = _tour_arg(args.tour_a)
    tour_b = _tour_arg(args.tour_b)
    verdict = pedigree_adjacent(tour_a, tour_b)
    out = {
        "adjacent": verdict.adjacent,
        "n": tour_a.n,
        "tour_a": format_tour(tour_a),
        "tour_b": format_tour(tour_b),
        "component_count": verdict.graph.component_count,
    }
    if args.dump_graph:
        out["graph"] = verdict.graph.to_json_dict()
    _emit_json(out)
    return EXIT_OK if verdict.adjacent else EXIT_NEGATIVE


def _scripted_history(spec: str, horizon: int) -> InsertionHistory:
    path = spec.split(":", 1)[1]
    if not path:
        raise ValueError("scripted strategy needs a file: scripted:<file>")
    history = _history_arg(path)
    if history.last_node < horizon:
        raise ValueError(
            f"scripted history ends at {history.last_node}, horizon {horizon} requested"
        )
    return history


def _cmd_simulate(args) -> int:
    from . import experiments, game

    seed = _seed_arg(args.seed)
    if args.strategy.startswith("scripted:"):
        strategy_name = "scripted"
        scripted = _scripted_history(args.strategy, args.n)
    else:
        strategy_name = args.strategy
        scripted = None

    out = {
        "strategy": args.strategy,
        "n": args.n,
        "trials": args.trials,
        "seed": seed,
        "version": experiments.artifact_version(),
    }
    if args.emit:
        rows = 0
        iso_total = 0
        s_total = 0
        t_total = 0
        connected = 0
        with open(args.emit, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["trial", "n", "move_class", "dS", "dT", "S", "T", "isolated"])
            for trial in range(args.trials):
                alice_rng, bob_rng = game.trial_streams(seed, trial)
                if strategy_name == "random":
                    alice = game.UniformRandomAlice(alice_rng)
                elif strategy_name == "greedy-common":
                    alice = game.GreedyCommonAlice()
                else:
                    alice = game.ScriptedAlice(scripted)
                records, state = game.run_game(alice, bob_rng, n_max=args.n)
                s, t = 3, 0
                for rec in records:
                    s += rec.delta_common
                    t += rec.delta_components
                    writer.writerow(
                        [
                            trial,
                            rec.n,
                            rec.move_class.value,
                            rec.delta_common,
                            rec.delta_components,
                            s,
                            t,
                            int(rec.isolated_created),
                        ]
                    )
                    rows += 1
                iso_total += sum(r.isolated_created for r in records)
                s_total += state.num_common
                t_total += state.num_components
                connected += state.num_components <= 1
        out["emitted"] = args.emit
        out["rows"] = rows
        k = args.trials
        out.update(
            mean_isolated=iso_total / k,
            mean_final_common=s_total / k,
            mean_final_components=t_total / k,
            connected_fraction=connected / k,
        )
    else:
        from .kernels import mc_trials

        res = mc_trials(args.n, strategy_name, args.trials, seed, scripted=scripted)
        out.update(
            mean_isolated=float(res["isolated"].mean()),
            mean_final_common=float(res["final_common"].mean()),
            mean_final_components=float(res["final_components"].mean()),
            connected_fraction=float((res["final_components"] <= 1).mean()),
        )
    _emit_json(out)
    return EXIT_OK


def _cmd_validate(args) -> int:
    from . import experiments

    seed = _seed_arg(args.seed)
    report = experiments.run_suite(args.suite, seed, trials=args.trials, n=args.n)
    _emit_json(report, args.json)
    return EXIT_OK


def _cmd_skeleton(args) -> int:
    from . import experiments
    from .cycles import enumerate_histories
    from .kernels import pairwise_adjacency_degrees

    report = experiments.enumerate_skeleton(args.n, allow_large=args.allow_large)
    _emit_json(report.to_json_dict())
    if args.csv:
        histories = list(enumerate_histories(args.n))
        degrees = pairwise_adjacency_degrees(histories, args.n)
        with open(args.csv, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["tour", "degree"])
            for history, degree in zip(histories, degrees):
                writer.writerow([format_tour(replay_history(history)), int(degree)])
    return EXIT_OK


def _cmd_decode(args) -> int:
    tour = _tour_arg(args.tour)
    history = decode_tour(tour)
    _emit_json({str(k): list(history.edge_of(k)) for k in range(4, tour.n + 1)})
    return EXIT_OK


def _cmd_replay(args) -> int:
    history = _history_arg(args.history)
    tour = replay_history(history)
    _emit_json({"tour": format_tour(tour), "n": tour.n})
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="pedigree",
        description=(
            "Insertion-history (pedigree) encodings of tours, the pedigree-graph "
            "adjacency test, and the two-player insertion game."
        ),
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("adjacency", help="test whether two tours are adjacent")
    p.add_argument("--tour-a", required=True, help="tour text, history text, or a file")
    p.add_argument("--tour-b", required=True, help="tour text, history text, or a file")
    p.add_argument("--dump-graph", action="store_true", help="include the witness graph")
    p.set_defaults(func=_cmd_adjacency)

    p = sub.add_parser("simulate", help="run seeded games and summarize them")
    p.add_argument(
        "--strategy",
        default="random",
        help="random | greedy-common | scripted:<history file>",
    )
    p.add_argument("--n", type=int, required=True, help="final cycle size (horizon)")
    p.add_argument("--trials", type=int, default=1000)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--emit", metavar="steps.csv", help="write per-step telemetry CSV")
    p.set_defaults(func=_cmd_simulate)

    p = sub.add_parser("validate", help="run a named validation suite")
    p.add_argument(
        "--suite",
        required=True,
        choices=[
            "lemma10",
            "lemma7",
            "lemma8",
            "transition",
            "connectivity",
            "common-edges",
            "dmoves",
        ],
    )
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--trials", type=int, default=None, help="suite-specific count override")
    p.add_argument("--n", type=int, default=None, help="suite-specific size override")
    p.add_argument("--json", metavar="out.json", help="also write the report to a file")
    p.set_defaults(func=_cmd_validate)

    p = sub.add_parser("skeleton", help="all-pairs adjacency census at one n")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--csv", metavar="degrees.csv", help="write per-tour degrees")
    p.add_argument(
        "--allow-large", action="store_true", help="permit n > 8 despite the cost"
    )
    p.set_defaults(func=_cmd_skeleton)

    p = sub.add_parser("decode", help="tour -> insertion history")
    p.add_argument("--tour", required=True, help="tour text or a file")
    p.set_defaults(func=_cmd_decode)

    p = sub.add_parser("replay", help="insertion history -> tour")
    p.add_argument(
        "--history", required=True, help="history text, decode JSON, or a file"
    )
    p.set_defaults(func=_cmd_replay)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (HistoryError, ValueError, OSError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
