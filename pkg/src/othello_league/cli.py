"""Command line front end.

Subcommands: ``arch`` (generate architectures), ``train`` (evolution-strategy
runs), ``eval`` (league measurements), ``bench`` (engine throughput), and
``fmt`` (network file checking and normalization).  Training runs write a
manifest with the fully resolved configuration, so any result directory can
be reproduced from its manifest alone.
"""
from __future__ import annotations

import argparse
import json
import os
import sys
import time
from pathlib import Path

import numpy as np

from othello_league import __version__, arch, engine, evolve, netfmt
from othello_league.evaluation import (
    BoardInversion,
    OutputNegation,
    Perspective,
    Player,
)
from othello_league.league import MatchConfig, performance, swh_player

_PERSPECTIVES = {
    "negation": OutputNegation,
    "inversion": BoardInversion,
}


def _perspective(name: str) -> Perspective:
    try:
        return _PERSPECTIVES[name]()
    except KeyError:
        raise argparse.ArgumentTypeError(
            f"unknown perspective {name!r} (choose from {sorted(_PERSPECTIVES)})"
        ) from None


def _workers_default() -> int | None:
    value = os.environ.get("OTHELLO_LEAGUE_WORKERS")
    return int(value) if value else None


def _load_player(spec: str, perspective: Perspective | None) -> tuple[str, Player]:
    """Resolve a player argument: ``swh``, ``champion``, or a file path."""
    if spec == "swh":
        player = swh_player()
        if perspective is not None:
            player = Player(player.evaluator, perspective)
        return "swh", player
    if spec == "champion":
        player = netfmt.load_champion()
        if perspective is not None:
            player = Player(player.evaluator, perspective)
        return "champion", player
    return Path(spec).name, netfmt.load_player_file(spec, perspective)


# ---------------------------------------------------------------------------
# arch


def cmd_arch(args) -> int:
    try:
        spec = arch.parse_architecture(args.spec, seed=args.seed)
    except ValueError as error:
        print(f"error: {error}", file=sys.stderr)
        return 2
    network = arch.build_architecture(spec)
    print(
        f"{arch.format_architecture(spec)}: {len(network.tuples)} tuples, "
        f"{network.weight_count} weights"
    )
    if args.output:
        Path(args.output).write_text(netfmt.serialize(network))
        print(f"wrote {args.output}")
    return 0


# ---------------------------------------------------------------------------
# train

_TRAIN_FIELDS = {
    "generations": int,
    "mu": int,
    "lam": int,
    "sigma": float,
    "epsilon": float,
    "fitness_doubles": int,
    "measure_interval": int,
    "measure_doubles": int,
    "init_low": float,
    "init_high": float,
    "seed": int,
    "perspective": str,
    "arch": str,
}

_TRAIN_DEFAULTS = {
    "generations": 5000,
    "mu": 10,
    "lam": 90,
    "sigma": 1.0,
    "epsilon": 0.1,
    "fitness_doubles": 1000,
    "measure_interval": 10,
    "measure_doubles": 50_000,
    "init_low": -0.1,
    "init_high": 0.1,
    "seed": 0,
    "perspective": "inversion",
    "arch": None,
}


def _read_config_file(path: str) -> dict:
    """``key = value`` lines; blank lines and ``#`` comments are ignored."""
    values = {}
    for line_no, raw in enumerate(Path(path).read_text().splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise SystemExit(f"{path}:{line_no}: expected key = value, got {raw!r}")
        key, _, value = line.partition("=")
        key = key.strip().replace("-", "_")
        if key not in _TRAIN_FIELDS:
            raise SystemExit(f"{path}:{line_no}: unknown option {key!r}")
        try:
            values[key] = _TRAIN_FIELDS[key](value.strip())
        except ValueError:
            raise SystemExit(f"{path}:{line_no}: bad value for {key}: {value.strip()!r}")
    return values


def _resolve_train_config(args) -> dict:
    """Precedence: command line flag, then config file, then defaults."""
    resolved = dict(_TRAIN_DEFAULTS)
    if args.config:
        resolved.update(_read_config_file(args.config))
    for key in _TRAIN_FIELDS:
        value = getattr(args, key, None)
        if value is not None:
            resolved[key] = value
    if resolved["arch"] is None:
        raise SystemExit("no architecture: pass --arch or set arch in the config file")
    return resolved


def cmd_train(args) -> int:
    resolved = _resolve_train_config(args)
    if args.dry_run:
        print(json.dumps(resolved, indent=2, sort_keys=True))
        return 0

    spec = arch.parse_architecture(resolved["arch"], seed=resolved["seed"])
    template = arch.build_architecture(spec)
    config = evolve.EsConfig(
        mu=resolved["mu"],
        lam=resolved["lam"],
        sigma=resolved["sigma"],
        init_low=resolved["init_low"],
        init_high=resolved["init_high"],
        generations=resolved["generations"],
        fitness_doubles=resolved["fitness_doubles"],
        epsilon=resolved["epsilon"],
        measure_interval=resolved["measure_interval"],
        measure_doubles=resolved["measure_doubles"],
        master_seed=resolved["seed"],
        perspective=_perspective(resolved["perspective"]),
        workers=args.workers,
    )

    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    checkpoint_path = out_dir / "checkpoint.npz"

    state = None
    resumed_from = 0
    if args.resume:
        try:
            state = _load_checkpoint(Path(args.resume) / "checkpoint.npz")
        except OSError as error:
            raise SystemExit(f"cannot resume: {error}") from None
        resumed_from = state.generation
        print(f"resuming after generation {resumed_from}")

    def on_generation(record, current_state):
        if args.progress:
            measured = (
                "" if record.measured_performance is None
                else f"  perf={record.measured_performance:.4f}"
            )
            print(
                f"gen {record.generation}: best={record.best_fitness:.4f} "
                f"mean={record.mean_fitness:.4f}{measured}",
                flush=True,
            )
        if args.checkpoint_every and record.generation % args.checkpoint_every == 0:
            _save_checkpoint(checkpoint_path, current_state)

    result = evolve.run(template, config, on_generation=on_generation, state=state)
    _save_checkpoint(checkpoint_path, result.state)
    (out_dir / "best.ntn").write_text(netfmt.serialize(result.best_network))
    (out_dir / "log.csv").write_text(result.log.to_csv())
    manifest = {
        "command": "train",
        "version": __version__,
        "config": {k: resolved[k] for k in sorted(resolved)},
        "resumed_after_generation": resumed_from,
        "workers_hint": args.workers,
        "initial_performance": result.log.initial_performance,
        "final_generation": result.state.generation,
        "best_fitness": result.best_fitness,
        "outputs": ["best.ntn", "log.csv", "checkpoint.npz"],
    }
    (out_dir / "manifest.json").write_text(json.dumps(manifest, indent=2) + "\n")
    print(
        f"trained {resolved['arch']} for {resolved['generations']} generations: "
        f"best fitness {result.best_fitness:.4f}; outputs in {out_dir}"
    )
    return 0


def _save_checkpoint(path: Path, state: evolve.EsState):
    np.savez(path, generation=state.generation, parents=state.parents)


def _load_checkpoint(path: Path) -> evolve.EsState:
    with np.load(path) as data:
        return evolve.EsState(
            generation=int(data["generation"]), parents=np.array(data["parents"])
        )


# ---------------------------------------------------------------------------
# eval

_EVAL_CSV_HEADER = (
    "run,seed,player,opponent,epsilon,double_games,wins,draws,losses,mean_score,ci95"
)


def cmd_eval(args) -> int:
    try:
        player_name, player = _load_player(args.player, args.perspective)
        opponent_name, opponent = _load_player(args.opponent, args.opponent_perspective)
    except (OSError, netfmt.NetworkFormatError) as error:
        print(f"error: {error}", file=sys.stderr)
        return 1
    rows = []
    means = []
    for run_index in range(args.runs):
        seed = args.seed + run_index
        estimate = performance(
            player,
            opponent,
            MatchConfig(args.doubles, args.epsilon, seed),
            workers=args.workers,
        )
        means.append(estimate.mean_score)
        print(
            f"run {run_index}: {player_name} vs {opponent_name}  "
            f"mean={estimate.mean_score:.4f} +/- {estimate.ci95_halfwidth:.4f}  "
            f"w/d/l={estimate.wins}/{estimate.draws}/{estimate.losses}"
        )
        rows.append(
            f"{run_index},{seed},{player_name},{opponent_name},{args.epsilon},"
            f"{args.doubles},{estimate.wins},{estimate.draws},{estimate.losses},"
            f"{estimate.mean_score!r},{estimate.ci95_halfwidth!r}"
        )
    if args.runs > 1:
        print(f"mean of runs: {sum(means) / len(means):.4f}")
    if args.log:
        log_path = Path(args.log)
        header_needed = not log_path.exists() or not log_path.read_text().strip()
        with log_path.open("a") as handle:
            if header_needed:
                handle.write(_EVAL_CSV_HEADER + "\n")
            handle.write("\n".join(rows) + "\n")
    return 0


# ---------------------------------------------------------------------------
# bench


def cmd_bench(args) -> int:
    pairings = {
        "champion": lambda: (netfmt.load_champion(), swh_player()),
        "swh": lambda: (swh_player(), swh_player()),
    }
    first, second = pairings[args.pairing]()
    packed_a = engine.pack_player(first)
    packed_b = engine.pack_player(second)
    engine.warm_up()
    engine.run_match(packed_a, packed_b, args.epsilon, 8, 0, workers=args.workers)

    games = 0
    batch = 128
    start = time.perf_counter()
    while True:
        engine.run_match(packed_a, packed_b, args.epsilon, batch, games, workers=args.workers)
        games += 2 * batch
        elapsed = time.perf_counter() - start
        if elapsed >= args.seconds:
            break
        batch = min(4 * batch, 4096)
    rate = games / elapsed
    workers = args.workers if args.workers is not None else engine.max_workers()
    print(
        f"{args.pairing} pairing, epsilon {args.epsilon}: {games} games in "
        f"{elapsed:.2f}s = {rate:.0f} games/sec (workers={workers})"
    )
    return 0


# ---------------------------------------------------------------------------
# fmt


def cmd_fmt(args) -> int:
    path = Path(args.path)
    is_wpc = args.wpc or path.suffix == ".wpc"
    try:
        text = path.read_text()
    except OSError as error:
        print(f"error: {error}", file=sys.stderr)
        return 1
    try:
        if is_wpc:
            weights = netfmt.parse_wpc(text)
            summary = "64 weights"
            normalized = netfmt.serialize_wpc(weights)
            detail = [
                "weighted piece counter grid",
                f"  range [{weights.weights.min()}, {weights.weights.max()}]",
            ]
        else:
            network = netfmt.parse(text)
            summary = f"{len(network.tuples)} tuples, {network.weight_count} weights"
            normalized = netfmt.serialize(network)
            detail = [f"n-tuple network: {summary}"]
            for i, t in enumerate(network.tuples):
                detail.append(
                    f"  tuple {i}: n={t.size} expansions={len(t.expansions)} "
                    f"main={list(t.locations)} "
                    f"weights [{t.lut.min():.4g}, {t.lut.max():.4g}]"
                )
    except netfmt.NetworkFormatError as error:
        kind = "syntax" if isinstance(error, netfmt.NetworkSyntaxError) else "schema"
        print(f"{path}: {kind} error: {error}", file=sys.stderr)
        return 1
    if args.mode == "check":
        print(f"OK: {summary}")
    elif args.mode == "print":
        print("\n".join(detail))
    else:
        if args.output:
            Path(args.output).write_text(normalized)
            print(f"wrote {args.output}")
        else:
            sys.stdout.write(normalized)
    return 0


# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="othello-league",
        description="Othello evaluators, evolution-strategy training, and league play.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="subcommand", required=True)

    p_arch = sub.add_parser("arch", help="generate a network architecture")
    p_arch.add_argument("spec", help="all-N or rand-MxN")
    p_arch.add_argument("--seed", type=int, default=0, help="seed for random walks")
    p_arch.add_argument("-o", "--output", help="write the zero-weight network here")
    p_arch.set_defaults(func=cmd_arch)

    p_train = sub.add_parser("train", help="run an evolution strategy")
    p_train.add_argument("--arch", help="architecture, e.g. all-2 or rand-8x4")
    p_train.add_argument("--config", help="key = value file with train options")
    for key in ("generations", "mu", "lam", "fitness_doubles", "measure_interval",
                "measure_doubles", "seed"):
        p_train.add_argument(f"--{key.replace('_', '-')}", type=int, default=None)
    for key in ("sigma", "epsilon", "init_low", "init_high"):
        p_train.add_argument(f"--{key.replace('_', '-')}", type=float, default=None)
    p_train.add_argument("--perspective", choices=sorted(_PERSPECTIVES), default=None)
    p_train.add_argument("--out-dir", default="train-out", help="output directory")
    p_train.add_argument("--checkpoint-every", type=int, default=0,
                         help="save a rolling checkpoint every N generations")
    p_train.add_argument("--resume", help="directory with a checkpoint.npz to continue")
    p_train.add_argument("--workers", type=int, default=_workers_default())
    p_train.add_argument("--progress", action="store_true", help="print each generation")
    p_train.add_argument("--dry-run", action="store_true",
                         help="print the resolved configuration and exit")
    p_train.set_defaults(func=cmd_train)

    p_eval = sub.add_parser("eval", help="measure a player against an opponent")
    p_eval.add_argument("player", help="swh, champion, or a .ntn/.wpc file")
    p_eval.add_argument("--opponent", default="swh", help="same forms as player")
    p_eval.add_argument("--perspective", type=_perspective, default=None,
                        help="negation or inversion (default: file type's usual)")
    p_eval.add_argument("--opponent-perspective", type=_perspective, default=None)
    p_eval.add_argument("--doubles", type=int, default=1000,
                        help="double games per run")
    p_eval.add_argument("--epsilon", type=float, default=0.1)
    p_eval.add_argument("--seed", type=int, default=0)
    p_eval.add_argument("--runs", type=int, default=1,
                        help="repeat with seeds seed, seed+1, ...")
    p_eval.add_argument("--workers", type=int, default=_workers_default())
    p_eval.add_argument("--log", help="append CSV rows to this file")
    p_eval.set_defaults(func=cmd_eval)

    p_bench = sub.add_parser("bench", help="measure engine throughput")
    p_bench.add_argument("--seconds", type=float, default=3.0)
    p_bench.add_argument("--pairing", choices=["champion", "swh"], default="champion")
    p_bench.add_argument("--epsilon", type=float, default=0.1)
    p_bench.add_argument("--workers", type=int, default=_workers_default())
    p_bench.set_defaults(func=cmd_bench)

    p_fmt = sub.add_parser("fmt", help="check, print, or normalize network files")
    p_fmt.add_argument("mode", choices=["check", "print", "normalize"])
    p_fmt.add_argument("path")
    p_fmt.add_argument("--wpc", action="store_true",
                       help="treat the file as a weight grid regardless of suffix")
    p_fmt.add_argument("-o", "--output", help="normalize: write here instead of stdout")
    p_fmt.set_defaults(func=cmd_fmt)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
