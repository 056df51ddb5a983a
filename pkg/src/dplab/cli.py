"""Batch experiment runner.

Usage: dplab <run|validate|list> [config] [--out DIR] [--threads N] [--seed U64]

Configs are flat INI files (``[section]`` headers, ``key = value`` pairs,
decimal numbers, true/false booleans).  A run writes three files into the
output directory: ``results.csv`` (deterministic for a fixed config and
seed), ``report.txt`` (one PASS/FAIL line per check), and ``plot.gp`` (a
gnuplot script referencing only the CSV).  Exit codes: 0 all checks pass,
1 runtime error, 2 config error, 3 check failure.
"""

import argparse
import configparser
import os
import sys
from pathlib import Path

from .experiments import RUNNERS, ConfigError

KIND_SUMMARY = {
    "solve": "time-step a double-phase problem (modes: field, heat_oracle, class_s)",
    "compare": "sub/supersolution ordering or vector inequalities (modes: pairs, vector_ineq)",
    "barrier": "time-regularity barrier search (modes: grid, scaling)",
    "modulus": "space-Lipschitz / time-Hoelder modulus estimation on solved fields",
    "steklov": "Steklov and mollification weighted-modular convergence sweeps",
    "infconv": "inf-convolution property suite (ordering, argmin radii, semiconcavity)",
    "caccioppoli": "weighted energy estimate ratio with mesh-refinement stability",
    "counterexample": "divergence rate of the a-weighted Steklov energy",
    "psi_scan": "doubling-functional threshold search on solved fields",
}


def load_config(path):
    parser = configparser.ConfigParser(inline_comment_prefixes=("#", ";"))
    parser.optionxform = str
    try:
        with open(path) as fh:
            parser.read_file(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read config: {exc}") from None
    except configparser.Error as exc:
        raise ConfigError(f"malformed config: {exc}") from None
    cfg = {section: dict(parser.items(section)) for section in parser.sections()}
    if "experiment" not in cfg or "kind" not in cfg["experiment"]:
        raise ConfigError("config needs [experiment] kind = <name>")
    kind = cfg["experiment"]["kind"]
    if kind not in RUNNERS:
        raise ConfigError(f"unknown experiment kind {kind!r}; choices: {', '.join(sorted(RUNNERS))}")
    return cfg


def validate_config(cfg):
    """Dry-run checks: referenced builtins exist, grids positive, sweeps nonempty."""
    from .experiments import _coefficient, _domain, _floats, _params

    problems = []
    try:
        _coefficient(cfg)
    except ConfigError as exc:
        problems.append(str(exc))
    try:
        _domain(cfg)
    except ConfigError as exc:
        problems.append(str(exc))
    if "params" in cfg:
        try:
            _params(cfg)
        except ConfigError as exc:
            problems.append(str(exc))
    for section, key in (
        ("oracle", "n_list"), ("class_s", "n_list"), ("compare", "p_list"),
        ("barrier", "p_list"), ("counterexample", "n_list"), ("mollify", "deltas"),
        ("steklov", "h_steps"),
    ):
        if section in cfg and key in cfg[section]:
            try:
                _floats(cfg[section][key])
            except ConfigError as exc:
                problems.append(f"[{section}] {key}: {exc}")
    for section in cfg:
        for key, value in cfg[section].items():
            if key in ("nx", "nt", "n_pairs", "count") and float(value) <= 0:
                problems.append(f"[{section}] {key} must be positive")
    return problems


def _write_outputs(out_dir, header, rows, checks):
    out_dir.mkdir(parents=True, exist_ok=True)
    csv_path = out_dir / "results.csv"
    with open(csv_path, "w", newline="") as fh:
        fh.write(",".join(header) + "\n")
        for row in rows:
            fh.write(",".join(str(v) for v in row) + "\n")
    with open(out_dir / "report.txt", "w", newline="") as fh:
        for name, passed, detail in checks:
            fh.write(f"{'PASS' if passed else 'FAIL'} {name}: {detail}\n")
    with open(out_dir / "plot.gp", "w", newline="") as fh:
        fh.write('set datafile separator ","\n')
        fh.write('set key autotitle columnhead\n')
        fh.write(f'set xlabel "{header[0]}"\n')
        y = min(2, len(header))
        fh.write(f'plot "results.csv" using 1:{y} with linespoints\n')


def cmd_run(args):
    cfg = load_config(args.config)
    seed = args.seed if args.seed is not None else int(cfg.get("experiment", {}).get("seed", 12345))
    out_dir = Path(
        args.out
        or cfg.get("output", {}).get("dir")
        or os.environ.get("DPLAB_OUT")
        or "dplab_out"
    )
    kind = cfg["experiment"]["kind"]
    header, rows, checks = RUNNERS[kind](cfg, seed)
    _write_outputs(out_dir, header, rows, checks)
    failed = [c for c in checks if not c[1]]
    for name, passed, detail in checks:
        print(f"{'PASS' if passed else 'FAIL'} {name}: {detail}")
    print(f"wrote {out_dir / 'results.csv'}")
    return 3 if failed else 0


def cmd_validate(args):
    cfg = load_config(args.config)
    problems = validate_config(cfg)
    if problems:
        for line in problems:
            print(f"invalid: {line}")
        return 2
    print("ok")
    return 0


def cmd_list(_args):
    for kind in sorted(KIND_SUMMARY):
        print(f"{kind:15s} {KIND_SUMMARY[kind]}")
    return 0


def main(argv=None):
    parser = argparse.ArgumentParser(prog="dplab", description=__doc__.splitlines()[0])
    parser.add_argument("command", choices=["run", "validate", "list"])
    parser.add_argument("config", nargs="?", help="experiment config (INI)")
    parser.add_argument("--out", help="output directory (default: $DPLAB_OUT or ./dplab_out)")
    parser.add_argument("--threads", type=int, default=1, help="worker thread cap")
    parser.add_argument("--seed", type=int, help="override the experiment seed")
    args = parser.parse_args(argv)

    if args.threads is not None and args.threads < 1:
        print("error: --threads must be >= 1", file=sys.stderr)
        return 2
    os.environ["DPLAB_THREADS"] = str(args.threads)

    if args.command == "list":
        return cmd_list(args)
    if not args.config:
        print("error: config path required", file=sys.stderr)
        return 2
    try:
        if args.command == "validate":
            return cmd_validate(args)
        return cmd_run(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except Exception as exc:  # noqa: BLE001 - runtime failures map to exit 1
        print(f"runtime error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
