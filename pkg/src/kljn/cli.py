"""Command-line harness: the toolkit's only human interface.

Subcommands:

    simulate   run a key-exchange session, write the per-bit CSV,
               print efficiency and Eve's guess accuracy
    attack     replay a session from Eve's side: guess record plus,
               for the random-temperature variant, the solution-family
               sweep table
    vmg-solve  print the temperature triple matching the LH and HL wire
               triples for a four-resistor configuration
    table      build and dump the singularity look-up table

Exit codes: 0 success, 1 runtime failure, 2 configuration error.
Every command is deterministic given (config file, --seed).
"""

from __future__ import annotations

import argparse
import csv
import io
import sys
from dataclasses import replace
from pathlib import Path

from . import __version__
from .adversary import (
    GuessRecord,
    EveView,
    default_assumed_grid,
    eve_guess_session,
    eve_pair_extraction,
    eve_rrrt_solution_family,
)
from .config import load_config
from .errors import ConfigError, GridTooLarge, KljnError
from .protocol import (
    STATUS_SECURE,
    ProtocolConfig,
    build_lookup_table,
    run_session,
)
from .report import session_to_report, write_report
from .resolver import vmg_matching_residual

EXIT_OK = 0
EXIT_RUNTIME = 1
EXIT_CONFIG = 2


def _say(args, *message):
    if not args.quiet:
        print(*message)


def _load(args) -> tuple[ProtocolConfig, dict]:
    config, extras = load_config(args.config)
    if args.seed is not None:
        config = replace(config, master_seed=args.seed)
    return config, extras


def _write_text(path, text: str):
    if path:
        Path(path).write_text(text)


def cmd_simulate(args) -> int:
    config, extras = _load(args)
    report = run_session(config)
    strategy = extras.get("eve_strategy", "nearest-class")
    guesses = eve_guess_session(config, strategy, report=report)
    csv_report = session_to_report(report, guesses)
    if args.out:
        write_report(csv_report, args.out)
    efficiency = "n/a" if report.efficiency is None else f"{report.efficiency:.4f}"
    accuracy = "n/a" if guesses.accuracy is None else f"{guesses.accuracy:.4f}"
    _say(args, f"variant={config.variant} bits={config.bits} "
               f"secure={report.counts.get(STATUS_SECURE, 0)} "
               f"efficiency={efficiency} eve[{strategy}]={accuracy}")
    return EXIT_OK


def _family_rows(config: ProtocolConfig, extras: dict, report) -> list[dict]:
    grid = default_assumed_grid(config, extras.get("eve_grid_points", 10))
    tolerance = extras.get("family_tolerance", 1e-9)
    rows = []
    for outcome in report.outcomes:
        if outcome.status != STATUS_SECURE:
            continue
        view = EveView(outcome.observables, config.band.bandwidth_hz, config)
        for point in eve_rrrt_solution_family(view, grid, tolerance,
                                              config.constants):
            rows.append({
                "index": outcome.index,
                "assumed_r_a": point.assumed_r_a,
                "implied_t_a": point.implied_t_a,
                "implied_alpha": point.implied_alpha,
                "implied_beta": point.implied_beta,
                "implied_alice_bit": point.implied_alice_bit(),
                "residual": point.residual,
            })
    return rows


def _pair_rows(config: ProtocolConfig, report) -> list[dict]:
    rows = []
    for outcome in report.outcomes:
        if outcome.status != STATUS_SECURE:
            continue
        view = EveView(outcome.observables, config.band.bandwidth_hz, config)
        pair = eve_pair_extraction(view, config.t_eff, config.constants,
                                   mismatch_tolerance=1e-3)
        rows.append({"index": outcome.index, "r_pair_low": pair.low,
                     "r_pair_high": pair.high,
                     "degenerate": int(pair.degenerate)})
    return rows


def _dump_rows(rows: list[dict], columns: list[str], summary: dict,
               out_path) -> str:
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(columns)
    for row in rows:
        writer.writerow(["" if row.get(c) is None else
                         (repr(row[c]) if isinstance(row[c], float) else row[c])
                         for c in columns])
    for key, value in summary.items():
        buffer.write(f"# {key},{repr(value) if isinstance(value, float) else value}\n")
    text = buffer.getvalue()
    _write_text(out_path, text)
    return text


def cmd_attack(args) -> int:
    config, extras = _load(args)
    report = run_session(config)
    strategy = extras.get("eve_strategy",
                          "pair-extraction" if config.variant != "rrrt-kljn"
                          else "random")
    guesses = eve_guess_session(config, strategy, report=report)

    if config.variant == "rrrt-kljn":
        rows = _family_rows(config, extras, report)
        columns = ["index", "assumed_r_a", "implied_t_a", "implied_alpha",
                   "implied_beta", "implied_alice_bit", "residual"]
    else:
        rows = _pair_rows(config, report)
        columns = ["index", "r_pair_low", "r_pair_high", "degenerate"]

    summary = {
        "schema": "kljn-attack-csv-1",
        "variant": config.variant,
        "master_seed": config.master_seed,
        "eve_strategy": strategy,
        "secure_bits": guesses.n,
        "eve_accuracy": guesses.accuracy,
    }
    interval = guesses.wilson_interval()
    if interval:
        summary["eve_wilson99_low"], summary["eve_wilson99_high"] = interval
    _dump_rows(rows, columns, summary, args.out)
    accuracy = "n/a" if guesses.accuracy is None else f"{guesses.accuracy:.4f}"
    _say(args, f"variant={config.variant} secure={guesses.n} "
               f"eve[{strategy}]={accuracy} table_rows={len(rows)}")
    return EXIT_OK


def cmd_vmg_solve(args) -> int:
    config, _ = _load(args)
    if config.variant != "vmg-kljn":
        raise ConfigError("vmg-solve needs a vmg-kljn configuration")
    temps = config.vmg_temperatures()
    residual = vmg_matching_residual(*config.vmg_resistors, config.t_eff,
                                     temps, config.constants)
    _say(args, f"t_al={config.t_eff!r} t_ah={temps.t_ah!r} "
               f"t_bl={temps.t_bl!r} t_bh={temps.t_bh!r}")
    _say(args, f"lh_hl_max_relative_mismatch={residual!r}")
    _dump_rows([{"t_al": float(config.t_eff), "t_ah": temps.t_ah,
                 "t_bl": temps.t_bl, "t_bh": temps.t_bh,
                 "residual": residual}],
               ["t_al", "t_ah", "t_bl", "t_bh", "residual"],
               {"schema": "kljn-vmg-csv-1"}, args.out)
    return EXIT_OK


_MEMBER_DUMP_LIMIT = 100_000  # settings; above this, membership lists are omitted


def cmd_table(args) -> int:
    config, _ = _load(args)
    table = build_lookup_table(config)
    if config.degeneracy_tolerance == 0.0:
        print("warning: zero cell width puts every setting in its own cell; "
              "all cells are singular", file=sys.stderr)
    with_members = table.n_settings <= _MEMBER_DUMP_LIMIT
    rows = []
    for cell in range(table.n_cells):
        row = {"cell": cell, "size": int(table.cell_sizes[cell]),
               "singular": int(table.cell_singular[cell])}
        if with_members:
            members = table.cell_members(cell)
            row["members"] = ";".join(str(int(m)) for m in members)
        rows.append(row)
    columns = ["cell", "size", "singular"] + (["members"] if with_members else [])
    summary = {
        "schema": "kljn-table-csv-1",
        "variant": config.variant,
        "settings": table.n_settings,
        "cells": table.n_cells,
        "cell_width": config.degeneracy_tolerance,
        "singular_fraction": table.singular_fraction(),
    }
    _dump_rows(rows, columns, summary, args.out)
    _say(args, f"settings={table.n_settings} cells={table.n_cells} "
               f"singular_fraction={table.singular_fraction():.6f}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="kljn",
        description="Thermal-noise key-exchange simulation and analysis toolkit")
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)
    for name, func, help_text in (
            ("simulate", cmd_simulate, "run a key-exchange session"),
            ("attack", cmd_attack, "replay a session from the eavesdropper's side"),
            ("vmg-solve", cmd_vmg_solve, "solve the four-resistor temperature matching"),
            ("table", cmd_table, "build and dump the singularity look-up table")):
        cmd = sub.add_parser(name, help=help_text)
        cmd.add_argument("--config", required=True, help="experiment JSON file")
        cmd.add_argument("--out", default=None, help="output CSV path")
        cmd.add_argument("--seed", type=int, default=None,
                         help="override master_seed from the config")
        cmd.add_argument("--quiet", action="store_true")
        cmd.set_defaults(func=func)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except GridTooLarge as exc:
        print(f"refused: {exc}", file=sys.stderr)
        return EXIT_RUNTIME
    except KljnError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
