"""Command line entry point.

    kljnloop run CONFIG [--seed N] [--format csv|json] [--out PATH]
    kljnloop predict CONFIG [...]
    kljnloop selftest

Exit status: 0 on success, 1 on a configuration error, 2 on a runtime
or insufficient-data error.
"""

from __future__ import annotations

import argparse
import sys
from dataclasses import replace

import numpy as np

from .errors import ConfigError, InsufficientDataError


def _load(args):
    from .experiment import parse_config

    try:
        with open(args.config) as fh:
            text = fh.read()
    except OSError as exc:
        raise ConfigError(args.config, f"cannot read config: {exc.strerror}") from exc
    config = parse_config(text)
    if args.seed is not None:
        config = replace(config, base=replace(config.base, master_seed=args.seed))
    if args.out is not None:
        config = replace(config, output_path=args.out)
    return config


def _write(text, path):
    if path is None:
        sys.stdout.write(text)
    else:
        with open(path, "w", newline="") as fh:
            fh.write(text)


def cmd_run(args):
    from .experiment import emit_report, run_experiment

    config = _load(args)
    report = run_experiment(config, workers=args.workers)
    _write(emit_report(report, args.format), config.output_path)
    return 0


def cmd_predict(args):
    from .experiment import emit_rows, predict_grid

    config = _load(args)
    rows = predict_grid(config)
    text = emit_rows(rows, ("temp_k", "delta_u_v", "defense", "p_analytic"), args.format)
    _write(text, config.output_path)
    return 0


def _selftest_checks():
    from .analytic import erf, predict
    from .eve import run_attack
    from .exchange import run_key_exchange
    from .physics import BitState, SystemParams, draw_noise, wire_trace

    base = SystemParams(temp_eff=1e13, u_dca=0.1, u_dcb=0.0, master_seed=7)

    def loop_identity():
        for state in BitState:
            u_an, u_bn = draw_noise(state, base, 3)
            tr = wire_trace(state, base, u_an, u_bn)
            r_b = state.resistances(base)[1]
            resid = tr.u - tr.i * r_b - u_bn - base.u_dcb
            if np.max(np.abs(resid)) > 1e-12 * np.max(np.abs(tr.u)):
                return False
        return True

    def shift_invariance():
        a = run_attack(run_key_exchange(base))
        b = run_attack(run_key_exchange(replace(base, u_dca=0.1 + 7, u_dcb=7.0)))
        return a == b

    def current_null():
        stats = run_attack(run_key_exchange(replace(base, temp_eff=1e10)), channel="current")
        return abs(stats.p - 0.5) <= 3 * (0.25 / stats.n_tot) ** 0.5

    def erf_values():
        return abs(erf(1.0) - 0.8427007929497149) < 1e-12 and erf(0.0) == 0.0

    def analytic_limits():
        return (predict(replace(base, temp_eff=1e8)).p_bit > 0.999
                and abs(predict(replace(base, temp_eff=1e22)).p_bit - 0.5) < 1e-3)

    return [
        ("loop identity", loop_identity),
        ("shift invariance", shift_invariance),
        ("current attack null", current_null),
        ("erf values", erf_values),
        ("analytic limits", analytic_limits),
    ]


def cmd_selftest(args):
    failed = 0
    for name, check in _selftest_checks():
        ok = bool(check())
        failed += not ok
        print(f"{'PASS' if ok else 'FAIL'}  {name}")
    return 0 if failed == 0 else 2


def build_parser():
    parser = argparse.ArgumentParser(prog="kljnloop", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    for name, func, help_ in (
        ("run", cmd_run, "Monte Carlo attack sweep with analytic comparison"),
        ("predict", cmd_predict, "analytic prediction only"),
    ):
        p = sub.add_parser(name, help=help_)
        p.add_argument("config")
        p.add_argument("--seed", type=int)
        p.add_argument("--format", choices=("csv", "json"), default="csv")
        p.add_argument("--out")
        if name == "run":
            p.add_argument("--workers", type=int, default=1)
        p.set_defaults(func=func)
    p = sub.add_parser("selftest", help="quick invariant checks")
    p.set_defaults(func=cmd_selftest)
    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 1
    except (InsufficientDataError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
