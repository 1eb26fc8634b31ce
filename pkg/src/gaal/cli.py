"""Command-line entry points.

    gaal run --config experiment.cfg [--seed N] [--out DIR]
    gaal compare --config experiment.cfg [--strategies a,b] [--out DIR]
    gaal train-gan --config experiment.cfg [--out DIR]
    gaal serve --port 8765 --config experiment.cfg [--state-dir DIR]
"""

from __future__ import annotations

import argparse
import dataclasses
import os
import sys

from gaal import experiment as exp
from gaal.config_io import load_config
from gaal.gan import train_gan, write_loss_history
from gaal.networks import save_network


def _add_common(parser):
    parser.add_argument("--config", required=True, help="experiment config file")
    parser.add_argument("--out", default=".", help="output directory")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="gaal")
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="run one strategy, write curve CSVs")
    _add_common(p_run)
    p_run.add_argument("--seed", type=int, default=None, help="run a single seed")

    p_cmp = sub.add_parser("compare", help="run several strategies, write a comparison")
    _add_common(p_cmp)
    p_cmp.add_argument(
        "--strategies",
        default=None,
        help="comma-separated strategies (default: config strategy + random)",
    )

    p_gan = sub.add_parser("train-gan", help="train the generator on the pool")
    _add_common(p_gan)

    p_srv = sub.add_parser("serve", help="serve live human-labeling sessions")
    p_srv.add_argument("--config", required=True)
    p_srv.add_argument("--port", type=int, default=8765)
    p_srv.add_argument("--state-dir", default="gaal_sessions")
    return parser


def cmd_run(args) -> int:
    config = load_config(args.config)
    os.makedirs(args.out, exist_ok=True)
    seeds = [args.seed] if args.seed is not None else list(config.seeds)
    curves = []
    for seed in seeds:
        result = exp.run_active_learning(config, seed)
        curves.append(result.curve)
        path = os.path.join(args.out, f"curve_{config.strategy}_{seed}.csv")
        exp.write_curve_csv(path, result.curve)
        print(f"wrote {path} ({result.labeled} labeled, {result.skipped} skipped)")
    if len(curves) > 1:
        summary = exp.summarize_curves(curves, config.strategy)
        path = os.path.join(args.out, f"summary_{config.strategy}.csv")
        exp.write_summary_csv(path, summary)
        print(f"wrote {path}")
    return 0


def cmd_compare(args) -> int:
    config = load_config(args.config)
    os.makedirs(args.out, exist_ok=True)
    if args.strategies:
        names = [s.strip() for s in args.strategies.split(",") if s.strip()]
    else:
        names = [config.strategy] + (["random"] if config.strategy != "random" else [])
    configs = [dataclasses.replace(config, strategy=name) for name in names]
    report = exp.compare_strategies(configs)
    for summary in report.summaries:
        path = os.path.join(args.out, f"summary_{summary.strategy}.csv")
        exp.write_summary_csv(path, summary)
        print(f"wrote {path}")
    path = os.path.join(args.out, "comparison.csv")
    exp.write_comparison_csv(path, report)
    print(f"wrote {path} (supervised baseline {report.supervised_baseline:.4f})")
    return 0


def cmd_train_gan(args) -> int:
    config = load_config(args.config)
    os.makedirs(args.out, exist_ok=True)
    pool, _, _ = exp.build_datasets(config.dataset)
    gen, disc, history = train_gan(pool.instances, config.gan)
    gen_path = os.path.join(args.out, "generator.net")
    disc_path = os.path.join(args.out, "discriminator.net")
    save_network(gen, gen_path)
    save_network(disc, disc_path)
    write_loss_history(os.path.join(args.out, "gan_losses.csv"), history)
    print(f"wrote {gen_path}, {disc_path}, gan_losses.csv")
    return 0


def cmd_serve(args) -> int:
    from gaal.server import LabelingServer  # deferred: pulls in the HTTP stack

    config = load_config(args.config)
    server = LabelingServer(config, state_dir=args.state_dir, port=args.port)
    host, port = server.address
    print(f"serving on http://{host}:{port}", flush=True)
    try:
        server.serve_forever()
    except KeyboardInterrupt:
        server.shutdown()
    return 0


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    handlers = {
        "run": cmd_run,
        "compare": cmd_compare,
        "train-gan": cmd_train_gan,
        "serve": cmd_serve,
    }
    return handlers[args.command](args)


if __name__ == "__main__":
    sys.exit(main())
