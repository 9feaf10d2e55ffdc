"""Command-line experiment runner.

Usage: ``qha <subcommand> [config-path] [--out DIR] [--set key=value ...]``

Subcommands: ``moyal``, ``localization-scaling``, ``berezin-lieb``,
``cohen-map``, ``admissibility``, ``wavelet-moyal``, ``suite``.  The only
positional arguments are the subcommand and an optional config path; every
knob lives in the flat key-value config (see :mod:`qha.config`).  Each run
writes config-stamped CSV (and, where applicable, JSON) artifacts into the
output directory and prints a one-line verdict.

Exit codes: 0 all checks passed, 1 a mathematical invariant failed,
2 configuration error.
"""

from __future__ import annotations

import argparse
import os
import sys

from . import experiments, serialize
from .config import ConfigError, parse_config_text
from .suite import run_suite

EXIT_OK = 0
EXIT_INVARIANT = 1
EXIT_CONFIG = 2

SUBCOMMANDS = (
    "moyal",
    "localization-scaling",
    "berezin-lieb",
    "cohen-map",
    "admissibility",
    "wavelet-moyal",
    "suite",
)


def _load_config(args):
    cfg = {}
    if args.config:
        try:
            with open(args.config) as fh:
                cfg.update(parse_config_text(fh.read()))
        except OSError as exc:
            raise ConfigError("config", f"cannot read {args.config}: {exc}")
    for item in args.set or []:
        if "=" not in item:
            raise ConfigError("--set", f"expected key=value, got {item!r}")
        key, value = item.split("=", 1)
        cfg[key.strip()] = value.strip()
    return cfg


def _out_path(args, name):
    os.makedirs(args.out, exist_ok=True)
    return os.path.join(args.out, name)


def _cmd_moyal(args, cfg):
    full = experiments.merged(cfg)
    rows, worst, ok = experiments.run_moyal(cfg)
    serialize.write_csv(
        _out_path(args, "moyal.csv"),
        full,
        ["pair", "lhs_re", "lhs_im", "rhs_re", "rhs_im", "rel_err"],
        rows,
    )
    print(f"moyal: max relative error {worst:.3e} -> {'pass' if ok else 'FAIL'}")
    return EXIT_OK if ok else EXIT_INVARIANT


def _cmd_localization(args, cfg):
    full = experiments.merged(cfg, experiments.SCALING_DEFAULTS)
    reports, lemma_ok, final_ok = experiments.run_localization_scaling(cfg)
    serialize.write_csv(
        _out_path(args, "localization_scaling.csv"),
        full,
        serialize.LOCALIZATION_FIELDS,
        serialize.localization_rows(reports),
    )
    serialize.write_json(
        _out_path(args, "localization_scaling.json"),
        full,
        {
            "spectra": {
                serialize.format_value(rep.R): [float(v) for v in rep.eigenvalues]
                for rep in reports
            }
        },
    )
    last = reports[-1]
    print(
        f"localization-scaling: final ratio {last.ratio:.4f} "
        f"(lemma {'ok' if lemma_ok else 'VIOLATED'}, "
        f"limit {'ok' if final_ok else 'MISSED'})"
    )
    return EXIT_OK if (lemma_ok and final_ok) else EXIT_INVARIANT


def _cmd_berezin(args, cfg):
    full = experiments.merged(cfg)
    rows, ok = experiments.run_berezin_lieb(cfg)
    serialize.write_csv(
        _out_path(args, "berezin_lieb.csv"),
        full,
        ["instance", "phi", "side", "lhs", "rhs", "holds"],
        rows,
    )
    print(f"berezin-lieb: {len(rows)} inequalities -> {'pass' if ok else 'FAIL'}")
    return EXIT_OK if ok else EXIT_INVARIANT


def _cmd_cohen(args, cfg):
    full = experiments.merged(cfg)
    cmap, energy, expect, ok = experiments.run_cohen_map(cfg)
    names, rows = serialize.cohen_map_rows(cmap)
    serialize.write_csv(_out_path(args, "cohen_map.csv"), full, names, rows)
    print(
        f"cohen-map: total energy {energy:.6f} vs {expect:.6f} -> "
        f"{'pass' if ok else 'FAIL'}"
    )
    return EXIT_OK if ok else EXIT_INVARIANT


def _cmd_admissibility(args, cfg):
    full = experiments.merged(cfg)
    rows, rel, ok = experiments.run_admissibility(cfg)
    serialize.write_csv(
        _out_path(args, "admissibility.csv"),
        full,
        ["operator", "constant", "trace_norm", "half_ratio", "edge_share",
         "converged"],
        rows,
    )
    print(
        f"admissibility: integral-route error {rel:.3e} -> "
        f"{'pass' if ok else 'FAIL'}"
    )
    return EXIT_OK if ok else EXIT_INVARIANT


def _cmd_wavelet(args, cfg):
    full = experiments.merged(cfg)
    rows, worst, ok = experiments.run_wavelet_moyal(cfg)
    serialize.write_csv(
        _out_path(args, "wavelet_moyal.csv"),
        full,
        ["identity", "lhs_re", "lhs_im", "rhs_re", "rhs_im", "rel_err"],
        rows,
    )
    print(
        f"wavelet-moyal: max relative error {worst:.3e} -> "
        f"{'pass' if ok else 'FAIL'}"
    )
    return EXIT_OK if ok else EXIT_INVARIANT


def _cmd_suite(args, cfg):
    full = experiments.merged(cfg)
    rows, failed = run_suite(cfg)
    serialize.write_csv(
        _out_path(args, "suite.csv"),
        full,
        ["check", "backend", "measured", "tolerance", "status", "note"],
        [
            {
                "check": r.check,
                "backend": r.backend,
                "measured": r.measured,
                "tolerance": r.tolerance,
                "status": r.status,
                "note": r.note,
            }
            for r in rows
        ],
    )
    counts = {
        "pass": sum(r.status == "pass" for r in rows),
        "fail": sum(r.status == "fail" for r in rows),
        "skip": sum(r.status == "skip" for r in rows),
    }
    serialize.write_json(
        _out_path(args, "suite.json"),
        full,
        {"summary": counts, "failed_checks": failed},
    )
    for r in rows:
        print(
            f"[{r.status:4s}] {r.check:38s} {r.backend:7s} "
            f"measured={r.measured:.3e} tol={r.tolerance:.1e}"
        )
    print(f"suite: {counts['pass']} pass, {counts['fail']} fail, "
          f"{counts['skip']} skip")
    if failed:
        print("failed checks: " + " ".join(failed))
        return EXIT_INVARIANT
    return EXIT_OK


HANDLERS = {
    "moyal": _cmd_moyal,
    "localization-scaling": _cmd_localization,
    "berezin-lieb": _cmd_berezin,
    "cohen-map": _cmd_cohen,
    "admissibility": _cmd_admissibility,
    "wavelet-moyal": _cmd_wavelet,
    "suite": _cmd_suite,
}


def main(argv=None):
    parser = argparse.ArgumentParser(
        prog="qha",
        description="quantum harmonic analysis experiments on group models",
    )
    parser.add_argument("subcommand", choices=SUBCOMMANDS)
    parser.add_argument("config", nargs="?", help="flat key=value config file")
    parser.add_argument("--out", default="qha-out", help="output directory")
    parser.add_argument(
        "--set",
        action="append",
        metavar="KEY=VALUE",
        help="override a config key (repeatable)",
    )
    args = parser.parse_args(argv)
    try:
        cfg = _load_config(args)
        return HANDLERS[args.subcommand](args, cfg)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
