"""Command-line entry point: ``predtrace run|sweep|oracle|plot|heatmap``.

Exit status is 0 on success, 1 on a configuration error and 2 when every
configured run diverged.
"""
from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

from ..core import generate_episodes, make_rng
from ..envs import make_env
from .. import tabular
from .experiment import (ConfigError, RunResult, SWEEP_AXES, build_config, coerce,
                         load_config_file, read_csv, run_experiment, sweep, to_csv,
                         write_csv)
from .export import ORACLE_WHAT, emit_learning_curves, export_heatmap, export_oracle

log = logging.getLogger("predtrace")

EXIT_OK, EXIT_CONFIG, EXIT_DIVERGED = 0, 1, 2

_RUN_FLAGS = (
    ("--env", "env"), ("--algo", "algos"), ("--alpha-v", "alpha_v"),
    ("--alpha-m", "alpha_m"), ("--gamma", "gamma"), ("--lambda", "lambda_"),
    ("--eta", "eta"), ("--episodes", "episodes"), ("--seeds", "seeds"),
    ("--eval-every", "eval_every"), ("--out", "out"), ("--features", "features"),
    ("--sr-discount-mode", "sr_discount_mode"), ("--m-init-mode", "m_init_mode"),
    ("--credit-mode", "credit_mode"), ("--max-steps", "max_steps"), ("--workers", "workers"),
)


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_CONFIG, f"{self.prog}: error: {message}\n")


def _add_run_flags(p):
    for flag, dest in _RUN_FLAGS:
        p.add_argument(flag, dest=dest, default=None)


def _overrides(args) -> dict:
    out = {}
    for _, dest in _RUN_FLAGS:
        val = getattr(args, dest)
        if val is not None:
            key, v = coerce(dest, val)
            out[key] = v
    return out


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="predtrace", description=__doc__.splitlines()[0])
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    run = sub.add_parser("run", help="run one or more algorithms over seeded episode streams")
    run.add_argument("--config", default=None, help="flat key = value file; flags win")
    _add_run_flags(run)
    run.add_argument("--plot", default=None, help="also write learning curves to this SVG")

    sw = sub.add_parser("sweep", help="vary one hyperparameter, others at base values")
    sw.add_argument("--config", default=None)
    sw.add_argument("--axis", required=True, choices=SWEEP_AXES)
    sw.add_argument("--values", required=True, help="comma-separated values")
    _add_run_flags(sw)
    sw.add_argument("--plot", default=None)

    orc = sub.add_parser("oracle", help="export an exact oracle quantity as CSV")
    orc.add_argument("--env", default="plinko")
    orc.add_argument("--what", required=True, choices=ORACLE_WHAT)
    orc.add_argument("--kappa", type=float, default=1.0)
    orc.add_argument("--out", required=True)

    pl = sub.add_parser("plot", help="learning curves from metric CSVs")
    pl.add_argument("--in", dest="inputs", nargs="+", required=True)
    pl.add_argument("--metric", choices=("rmse", "return"), default="rmse")
    pl.add_argument("--out", required=True)

    hm = sub.add_parser("heatmap", help="TD-PR credit vector of one state as a grid")
    hm.add_argument("--config", default=None)
    _add_run_flags(hm)
    hm.add_argument("--state", type=int, required=True)
    hm.add_argument("--seed", type=int, default=0)
    return p


def _config(args):
    file_values = load_config_file(args.config) if args.config else {}
    return build_config(file_values, _overrides(args))


def _finish(result: RunResult, cfg, plot) -> int:
    if cfg.out:
        write_csv(result, cfg.out)
    else:
        sys.stdout.write(to_csv(result))
    if plot:
        emit_learning_curves([result], plot)
    return EXIT_DIVERGED if result.all_diverged else EXIT_OK


def cmd_run(args) -> int:
    cfg = _config(args)
    return _finish(run_experiment(cfg), cfg, args.plot)


def cmd_sweep(args) -> int:
    cfg = _config(args)
    try:
        values = [float(v) for v in args.values.split(",") if v.strip()]
    except ValueError:
        raise ConfigError(f"bad --values {args.values!r}") from None
    merged = RunResult()
    for res in sweep(cfg, args.axis, values):
        merged.extend(res)
    return _finish(merged, cfg, args.plot)


def cmd_oracle(args) -> int:
    export_oracle(args.env, args.what, args.kappa, args.out)
    return EXIT_OK


def cmd_plot(args) -> int:
    results = [read_csv(p) for p in args.inputs]
    emit_learning_curves(results, args.out, metric=args.metric)
    return EXIT_OK


def cmd_heatmap(args) -> int:
    cfg = _config(args)
    if not cfg.out:
        raise ConfigError("heatmap needs --out")
    mdp = make_env(cfg.env)
    if not 0 <= args.state < mdp.n_states:
        raise ConfigError(f"state {args.state} out of range")
    state = tabular.new_td_pr(mdp.n_states, cfg.learner())
    for ep in generate_episodes(mdp, make_rng(args.seed), cfg.episodes):
        tabular.td_pr_episode(state, ep)
    export_heatmap(tabular.credit_vector(state, args.state), Path(cfg.out))
    return EXIT_OK


COMMANDS = {"run": cmd_run, "sweep": cmd_sweep, "oracle": cmd_oracle,
            "plot": cmd_plot, "heatmap": cmd_heatmap}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return COMMANDS[args.command](args)
    except (ConfigError, ValueError, OSError) as exc:
        log.error("%s", exc)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
