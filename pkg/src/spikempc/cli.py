"""Command-line entry points: generate, run, gradcheck."""

from __future__ import annotations

import argparse
import concurrent.futures
import sys
from pathlib import Path

from .config import PRESETS, ExperimentConfig, default_config, load_config, preset_config
from .errors import SpikeMpcError
from .gradcheck import GradCheckSettings, run_gradient_check, run_zero_gradient_demo
from .harness import run_experiment, write_outputs, validate_outputs
from .metrics import format_table
from .netgen import generate_network, load_network, save_network


def _resolve_config(args) -> ExperimentConfig:
    base = preset_config(args.preset) if args.preset else default_config()
    if args.config:
        base = load_config(args.config, base=base)
    return base


def _add_common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--config", help="INI config file overlaying the preset/defaults")
    parser.add_argument("--preset", choices=PRESETS, help="built-in experiment setup")
    parser.add_argument("--verbose", action="store_true", help="progress lines on stderr")


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="spikempc",
        description=(
            "Design control currents for one module of a spiking network so the "
            "other two modules swap firing dominance at a prescribed time."
        ),
    )
    sub = parser.add_subparsers(dest="command", required=True)

    gen = sub.add_parser("generate", help="sample a network and write its edge-list file")
    _add_common(gen)
    gen.add_argument("--seed", type=int, default=None, help="override the config seed")
    gen.add_argument("--out", required=True, help="network file to write")

    run = sub.add_parser("run", help="run the controlled experiment and its baseline")
    _add_common(run)
    run.add_argument(
        "--seed", type=int, nargs="+", default=None,
        help="seed(s); several seeds write one subdirectory each",
    )
    run.add_argument("--network", help="use this network file instead of sampling one")
    run.add_argument("--out", required=True, help="output directory")
    run.add_argument(
        "--no-control", action="store_true",
        help="skip optimization; applied controls stay zero",
    )
    run.add_argument(
        "--jobs", type=int, default=1, help="parallel processes for multi-seed runs"
    )

    grad = sub.add_parser("gradcheck", help="verify rollout gradients against finite differences")
    _add_common(grad)
    grad.add_argument("--seed", type=int, default=None, help="override the config seed")
    grad.add_argument("--samples", type=int, default=100, help="random plans per battery")
    return parser


def cmd_generate(args) -> int:
    config = _resolve_config(args)
    if args.seed is not None:
        config = config.with_seed(args.seed)
    graph = generate_network(config.network)
    save_network(graph, args.out)
    inhibitory = [i for i, flag in enumerate(graph.inhibitory_mask) if flag]
    print(f"wrote {args.out}: n={graph.n}, edges={len(graph.edges)}, "
          f"inhibitory={inhibitory}")
    return 0


def _run_one(config: ExperimentConfig, args, out_dir: Path, preset: str | None) -> dict:
    graph = load_network(args.network) if args.network else None
    result = run_experiment(
        config, graph=graph, no_control=args.no_control, verbose=args.verbose
    )
    paths = write_outputs(result, out_dir, preset)
    validate_outputs(paths, result)
    return {
        "seed": config.seed,
        "out": out_dir,
        "table": format_table(result.controlled_report, result.graph.partition),
        "controlled": result.controlled_report.objective,
        "baseline": result.baseline_report.objective,
        "mean_step_seconds": (
            sum(result.controlled.step_seconds) / len(result.controlled.step_seconds)
            if result.controlled.step_seconds else 0.0
        ),
    }


def _run_seed_task(payload):
    config, args, out_dir, preset = payload
    return _run_one(config, args, Path(out_dir), preset)


def cmd_run(args) -> int:
    config = _resolve_config(args)
    seeds = args.seed if args.seed is not None else [config.seed]
    out_root = Path(args.out)

    tasks = []
    for seed in seeds:
        seeded = config.with_seed(seed)
        out_dir = out_root if len(seeds) == 1 else out_root / f"seed-{seed}"
        tasks.append((seeded, args, str(out_dir), args.preset))

    if len(tasks) > 1 and args.jobs > 1:
        with concurrent.futures.ProcessPoolExecutor(max_workers=args.jobs) as pool:
            summaries = list(pool.map(_run_seed_task, tasks))
    else:
        summaries = [_run_seed_task(t) for t in tasks]

    for summary in summaries:
        print(f"seed {summary['seed']} -> {summary['out']}")
        print(summary["table"])
        print(
            f"baseline objective: {summary['baseline']}  "
            f"(improvement: {summary['controlled'] - summary['baseline']})"
        )
        print(f"mean seconds per control step: {summary['mean_step_seconds']:.3f}")
    return 0


def cmd_gradcheck(args) -> int:
    config = _resolve_config(args)
    if args.seed is not None:
        config = config.with_seed(args.seed)
    graph = generate_network(config.network)
    params = config.model
    settings = GradCheckSettings(samples=args.samples)
    switch = config.mpc.switch_step(params.dt)
    total = config.mpc.total_steps(params.dt)

    soft = run_gradient_check(graph, params, switch, total, config.seed, settings)
    soft_ok = soft.passed(settings)
    print(
        f"soft synapse: checked {soft.checked}/{soft.samples} plans "
        f"({soft.excluded} excluded near nonsmooth points), "
        f"max relative error {soft.max_rel_error:.3e} -> "
        f"{'PASS' if soft_ok else 'FAIL'}"
    )

    demo = run_zero_gradient_demo(graph, params, switch, total, config.seed, settings)
    demo_ok = demo.zero_fraction >= 0.9
    print(
        f"hard synapse: {100.0 * demo.zero_fraction:.1f}% of control-entry "
        f"gradients exactly zero -> "
        f"{'PASS (zero-gradient pathology confirmed)' if demo_ok else 'FAIL'}"
    )
    return 0 if (soft_ok and demo_ok) else 1


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        if args.command == "generate":
            return cmd_generate(args)
        if args.command == "run":
            return cmd_run(args)
        if args.command == "gradcheck":
            return cmd_gradcheck(args)
        raise AssertionError(f"unhandled command {args.command}")
    except SpikeMpcError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
