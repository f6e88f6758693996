"""Command-line entry point: ``pbsb run | grid | validate``."""
from __future__ import annotations

import argparse
import sys

from ..environments import DatasetError
from .config import ConfigError, ExperimentConfig, build_environment
from .experiment import SimulationError, run_experiment
from .report import report_document, write_report, write_round_logs

# CLI flag -> config key
_FLAG_KEYS = {
    "policy": "policy.name",
    "strategy": "strategy.name",
    "bandit_reward": "strategy.bandit_reward",
    "k": "k",
    "psi_max": "psi_max",
    "horizon": "horizon",
    "runs": "runs",
    "seed": "seed",
    "delta": "delta",
    "workers": "workers",
    "out": "output.dir",
}


def _add_common(p: argparse.ArgumentParser):
    p.add_argument("--config", required=True, help="flat key = value configuration file")
    p.add_argument("--policy", help="epsilon-greedy, ts, ucb1, ucb2, linucb or lints")
    p.add_argument("--strategy", help="bandit, semi-bandit, pbsb-re, pbsb-oe or pbsb-rd")
    p.add_argument("--bandit-reward", choices=("normalized", "raw"))
    p.add_argument("--k", type=int)
    p.add_argument("--psi-max", type=int)
    p.add_argument("--horizon", type=int)
    p.add_argument("--runs", type=int)
    p.add_argument("--seed", type=int)
    p.add_argument("--delta", type=float)
    p.add_argument("--workers", type=int)
    p.add_argument("--out", help="output directory for summary.json and round logs")
    p.add_argument("--round-log", action="store_true", default=None, help="write per-round logs")
    p.add_argument(
        "--set", action="append", default=[], metavar="KEY=VALUE", help="override any configuration key"
    )


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="pbsb", description="Combinatorial bandits with partial feedback")
    sub = parser.add_subparsers(dest="command", required=True)
    _add_common(sub.add_parser("run", help="run one policy/strategy cell"))
    _add_common(sub.add_parser("grid", help="sweep grid.policies x grid.strategies"))
    _add_common(sub.add_parser("validate", help="check configuration and load the environment"))
    return parser


def load_config(args) -> ExperimentConfig:
    cfg = ExperimentConfig.from_file(args.config)
    overrides = {}
    for item in args.set:
        if "=" not in item:
            raise ConfigError(f"--set expects KEY=VALUE, got {item!r}")
        key, value = item.split("=", 1)
        overrides[key.strip()] = value.strip()
    for attr, key in _FLAG_KEYS.items():
        value = getattr(args, attr)
        if value is not None:
            overrides[key] = value
    if args.round_log:
        overrides["output.round_log"] = "true"
    return cfg.with_overrides(overrides)


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = load_config(args)
        grid = args.command == "grid"
        env = build_environment(cfg.env)
        cells = cfg.validate(env.n_arms, grid=grid)
        if args.command == "validate":
            meta = env.metadata()
            print(
                f"ok: {meta['kind']} environment, m={meta['m']}, d={meta['d']}, "
                f"{len(cells)} cell(s), {cfg.runs} run(s) of {cfg.horizon} rounds"
            )
            return 0
        report = run_experiment(cfg, env, grid=grid)
        if cfg.out_dir:
            path = write_report(report, cfg.out_dir)
            if cfg.round_log:
                write_round_logs(report, cfg.out_dir)
            print(f"summary written to {path}")
        else:
            sys.stdout.write(report_document(report))
    except (ConfigError, DatasetError, SimulationError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
