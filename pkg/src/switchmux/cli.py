"""Thin command line front end over the simulator library.

Subcommands map one-to-one onto library calls: `simulate` runs a single
config, `sweep` expands its grid keys, `codes` and `power` print the
closed-form tables, and `validate` runs the self-check suite.  Exit codes:
0 success, 1 bad config or missing file, 2 validation failure.
"""

from __future__ import annotations

import argparse
import sys

import numpy as np

from . import codes as codes_mod
from . import metrics, runner
from .config import ConfigError, load_config, with_overrides
from .frontend import SwitchMatrix


def _load(args) -> "ExperimentConfig":
    cfg = load_config(args.config)
    if getattr(args, "seed", None) is not None:
        cfg = with_overrides(cfg, seed=args.seed)
    return cfg


def _out_path(args, cfg) -> str:
    return args.out or cfg.out or "results.csv"


def _cmd_simulate(args) -> int:
    cfg = _load(args)
    out = _out_path(args, cfg)
    rows = runner.run_sweep(cfg, out, workers=args.workers, use_sweep=False)
    print(f"wrote {rows} rows to {out}")
    return 0


def _cmd_sweep(args) -> int:
    cfg = _load(args)
    out = _out_path(args, cfg)
    combos = len(runner.sweep_combos(cfg))
    rows = runner.run_sweep(cfg, out, workers=args.workers, use_sweep=True)
    print(f"wrote {rows} rows ({combos} configs) to {out}")
    return 0


def _cmd_codes(args) -> int:
    K = args.slots
    all_codes = codes_mod.generate_codes(K)
    print(f"switching codes, {K} slots per period")
    for code in all_codes:
        pattern = "".join(str(b) for b in code.bits)
        print(f"  code {code.phase_index}: {pattern}")
    word = SwitchMatrix.identity(K).to_control_word()
    print(f"identity control word: {word}")
    print("harmonic phases (degrees), rows = code, cols = harmonic m*B")
    header = "".join(f"{f'm={m}':>10}" for m in range(K))
    print("  " + header)
    deg = np.degrees(codes_mod.phase_matrix(K).entries) % 360
    for i in range(K):
        row = "".join(f"{-d + 0.0:>10.1f}" for d in deg[i])
        print("  " + row)
    return 0


def _cmd_power(args) -> int:
    bw = args.bandwidth_hz
    rows = [
        ("switched", args.antennas, args.users, bw),
        ("dbf", args.antennas, args.antennas, bw),
        ("hbf", args.antennas, args.users, bw),
        ("fdma", 1, 1, args.users * bw),
    ]
    print(f"{'arch':<10}{'M':>4}{'chains':>8}{'rfe_mw':>10}"
          f"{'switch_mw':>11}{'adc_mw':>9}{'total_mw':>10}")
    for arch, m, chains, per_chain in rows:
        report = metrics.power(arch, m, chains, per_chain)
        print(
            f"{arch:<10}{m:>4}{chains:>8}{report.rfe_mw:>10.1f}"
            f"{report.switch_mw:>11.1f}{report.adc_mw:>9.1f}{report.total_mw:>10.1f}"
        )
    return 0


def _cmd_validate(args) -> int:
    from . import acceptance

    results = acceptance.run_all(quick=args.quick)
    failed = 0
    for res in results:
        status = "PASS" if res.passed else "FAIL"
        failed += not res.passed
        print(f"{status} {res.name}: {res.detail}")
    print(f"{len(results) - failed}/{len(results)} checks passed")
    return 2 if failed else 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="switchmux", description="switched-antenna multi-user receiver simulator"
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_run_args(p):
        p.add_argument("--config", required=True, help="path to a key = value config file")
        p.add_argument("--out", default=None, help="output CSV path")
        p.add_argument("--workers", type=int, default=1, help="parallel worker processes")
        p.add_argument("--seed", type=int, default=None, help="override the config seed")

    sim = sub.add_parser("simulate", help="run one configuration")
    add_run_args(sim)
    sim.set_defaults(func=_cmd_simulate)

    swp = sub.add_parser("sweep", help="run the config's sweep grid")
    add_run_args(swp)
    swp.set_defaults(func=_cmd_sweep)

    cds = sub.add_parser("codes", help="print switching codes and harmonic phases")
    cds.add_argument("--slots", type=int, default=4, help="slots per switching period")
    cds.set_defaults(func=_cmd_codes)

    pwr = sub.add_parser("power", help="print the receiver power table")
    pwr.add_argument("--antennas", type=int, default=8)
    pwr.add_argument("--users", type=int, default=4)
    pwr.add_argument("--bandwidth-hz", type=float, default=10e6)
    pwr.set_defaults(func=_cmd_power)

    val = sub.add_parser("validate", help="run the acceptance checks")
    val.add_argument(
        "--quick", action="store_true", help="only the fast deterministic checks"
    )
    val.set_defaults(func=_cmd_validate)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ConfigError, FileNotFoundError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
