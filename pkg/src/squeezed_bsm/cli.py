"""Command-line interface.

Subcommands: `table`, `discriminate`, `usd-sweep`, `psd-sweep`, `envelope`,
`nonuniform-scan`, `figures`.  Flag values may also be supplied through a
key=value config file (`--config`); explicit command-line flags win.
Exit codes: 0 on success, 2 on an invalid specification.
"""

from __future__ import annotations

import argparse
import json
import math
import sys

from .circuit import CircuitParams, DetectionTable, build_detection_table, table_dump
from .discrimination import ErrorBudget, classify, psd_oracle, psd_select
from .figures import FIGURES, run_figure
from .sweep import (
    COARSE_SCAN_VALUES,
    DEFAULT_ALPHA_BIN_WIDTH,
    SweepSpec,
    SweepSpecError,
    default_pe_budgets,
    envelope,
    envelope_to_csv,
    envelope_to_json_obj,
    nonuniform_scan,
    points_from_csv,
    points_from_json_obj,
    points_to_csv,
    points_to_json_obj,
    psd_sweep,
    usd_sweep,
    write_text,
)

CI_SCAN_VALUES = (0.0, 0.45, 0.6585)


# ---------------------------------------------------------------------------
# flag parsing helpers (all flags are strings so config-file defaults can be
# substituted uniformly)
# ---------------------------------------------------------------------------

def _parse_float(text: str, what: str) -> float:
    try:
        return float(text)
    except ValueError:
        raise SweepSpecError(f"invalid {what}: {text!r}")


def _parse_float_list(text: str, what: str) -> tuple[float, ...]:
    return tuple(_parse_float(tok, what) for tok in text.split(",") if tok.strip())


def _parse_nmax(text: str) -> int | None:
    tok = text.strip().lower()
    if tok in ("inf", "none", "infinity"):
        return None
    try:
        value = int(tok)
    except ValueError:
        raise SweepSpecError(f"invalid n_max: {text!r}")
    return value


def _parse_nmax_list(text: str) -> tuple[int | None, ...]:
    return tuple(_parse_nmax(tok) for tok in text.split(",") if tok.strip())


def _parse_budget(text: str) -> float:
    tok = text.strip().lower()
    if tok == "inf":
        return math.inf
    return _parse_float(tok, "pe_max")


def _parse_budget_list(text: str) -> tuple[float, ...]:
    if text.strip().lower() == "decades":
        return default_pe_budgets()
    return tuple(_parse_budget(tok) for tok in text.split(",") if tok.strip())


def _parse_grid(text: str) -> tuple[float, float, float]:
    parts = text.split(":")
    if len(parts) != 3:
        raise SweepSpecError(f"grid must look like start:stop:step, got {text!r}")
    return tuple(_parse_float(p, "grid value") for p in parts)  # type: ignore


def _parse_bool(value) -> bool:
    if isinstance(value, bool):
        return value
    tok = str(value).strip().lower()
    if tok in ("1", "true", "yes", "on"):
        return True
    if tok in ("0", "false", "no", "off"):
        return False
    raise SweepSpecError(f"invalid boolean: {value!r}")


def load_config(path: str) -> dict[str, str]:
    """Read a key=value config file; '#' starts a comment."""
    entries: dict[str, str] = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise SweepSpecError(f"{path}:{lineno}: expected key = value")
            key, value = line.split("=", 1)
            entries[key.strip().replace("-", "_")] = value.strip()
    return entries


# ---------------------------------------------------------------------------
# command handlers
# ---------------------------------------------------------------------------

def _emit(text: str, out: str | None) -> None:
    if out:
        write_text(out, text)
    else:
        sys.stdout.write(text)


def _cmd_table(args) -> int:
    if args.per_mode_r:
        rs = _parse_float_list(args.per_mode_r, "per-mode r")
        if len(rs) != 4:
            raise SweepSpecError("--per-mode-r needs exactly four values")
        params = CircuitParams.per_mode(rs, n_max=_parse_nmax(args.nmax),
                                        eta=_parse_float(args.eta, "eta"))
    else:
        params = CircuitParams.uniform(_parse_float(args.r, "r"),
                                       n_max=_parse_nmax(args.nmax),
                                       eta=_parse_float(args.eta, "eta"))
    table = build_detection_table(params)
    fmt = args.format
    if fmt is None:
        fmt = "csv" if (args.out or "").endswith(".csv") else "json"
    _emit(table_dump(table, fmt), args.out)
    return 0


def _cmd_discriminate(args) -> int:
    with open(args.table, encoding="utf-8") as fh:
        table = DetectionTable.loads(fh.read())
    classes = classify(table)
    budget = ErrorBudget(_parse_budget(args.pe_max))
    select = psd_oracle if args.oracle else psd_select
    result = select(classes, budget, allow_coinflip=_parse_bool(args.allow_coinflip))
    _emit(json.dumps(result.to_json_obj(), indent=1) + "\n", args.out)
    return 0


def _spec_from_args(args, budgets: tuple[float, ...]) -> SweepSpec:
    start, stop, step = _parse_grid(args.r_grid)
    return SweepSpec(
        r_start=start, r_stop=stop, r_step=step,
        n_max_values=_parse_nmax_list(args.nmax),
        eta_values=_parse_float_list(args.eta, "eta"),
        pe_max_values=budgets,
        include_singular=_parse_bool(args.include_singular),
        allow_coinflip=_parse_bool(args.allow_coinflip),
    )


def _emit_points(points, args) -> None:
    fmt = args.format or ("json" if (args.out or "").endswith(".json") else "csv")
    if fmt == "json":
        _emit(json.dumps(points_to_json_obj(points), indent=1) + "\n", args.out)
    elif fmt == "csv":
        _emit(points_to_csv(points), args.out)
    else:
        raise SweepSpecError(f"unsupported sweep output format {fmt!r}")


def _cmd_usd_sweep(args) -> int:
    spec = _spec_from_args(args, budgets=(0.0,))
    points = usd_sweep(spec, workers=int(args.threads),
                       progress=_parse_bool(args.progress))
    _emit_points(points, args)
    return 0


def _cmd_psd_sweep(args) -> int:
    spec = _spec_from_args(args, budgets=_parse_budget_list(args.pe_max))
    points = psd_sweep(spec, workers=int(args.threads),
                       progress=_parse_bool(args.progress))
    _emit_points(points, args)
    return 0


def _cmd_envelope(args) -> int:
    with open(args.points, encoding="utf-8") as fh:
        text = fh.read()
    if args.points.endswith(".json"):
        points = points_from_json_obj(json.loads(text))
    else:
        points = points_from_csv(text)
    env = envelope(points, _parse_float(args.bin_width, "bin width"))
    fmt = args.format or ("json" if (args.out or "").endswith(".json") else "csv")
    if fmt == "json":
        _emit(json.dumps(envelope_to_json_obj(env), indent=1) + "\n", args.out)
    elif fmt == "csv":
        _emit(envelope_to_csv(env), args.out)
    else:
        raise SweepSpecError(f"unsupported envelope output format {fmt!r}")
    return 0


def _cmd_nonuniform_scan(args) -> int:
    if args.r_values:
        values = _parse_float_list(args.r_values, "r")
    elif args.grid == "ci":
        values = CI_SCAN_VALUES
    else:
        values = COARSE_SCAN_VALUES
    report = nonuniform_scan(values, n_max=_parse_nmax(args.nmax),
                             workers=int(args.threads),
                             progress=_parse_bool(args.progress))
    if args.out:
        write_text(args.out, report.to_csv())
    sys.stdout.write(json.dumps(report.to_json_obj(), indent=1) + "\n")
    return 0


def _cmd_figures(args) -> int:
    svg = args.format != "csv"
    r_step = None if args.r_step is None else _parse_float(args.r_step, "r step")
    written = run_figure(args.name, args.out_dir, svg=svg,
                         workers=int(args.threads),
                         progress=_parse_bool(args.progress),
                         r_step=r_step)
    for path in written:
        print(path)
    return 0


# ---------------------------------------------------------------------------
# parser
# ---------------------------------------------------------------------------

def _add_common(sub, *, sweep: bool) -> None:
    sub.add_argument("--config", help="key=value file mirroring these flags")
    if sweep:
        sub.add_argument("--r-grid", default="0:0.9:0.005",
                         help="squeezing grid start:stop:step")
        sub.add_argument("--nmax", default="inf",
                         help="comma list of detector ceilings ('inf' allowed)")
        sub.add_argument("--eta", default="1.0", help="comma list of transmissions")
        sub.add_argument("--include-singular", default="true",
                         help="inject the singular squeezing value into the grid")
        sub.add_argument("--allow-coinflip", default="false",
                         help="let equal-weight patterns into the selection")
        sub.add_argument("--threads", default="1", help="parallel table builds")
        sub.add_argument("--progress", default="false",
                         help="print progress/ETA to stderr")
        sub.add_argument("--out", help="output path (default: stdout)")
        sub.add_argument("--format", choices=("csv", "json"),
                         help="output format (default: by extension, else csv)")


def build_parser() -> tuple[argparse.ArgumentParser, dict]:
    parser = argparse.ArgumentParser(
        prog="squeezed-bsm",
        description="Squeezing-boosted Bell measurement simulator")
    subs = parser.add_subparsers(dest="command", required=True)
    tbl: dict[str, argparse.ArgumentParser] = {}

    sub = subs.add_parser("table", help="build one detection table")
    sub.add_argument("--r", default="0.0", help="uniform squeezing intensity")
    sub.add_argument("--per-mode-r", help="four comma-separated intensities")
    sub.add_argument("--eta", default="1.0", help="detector transmission")
    sub.add_argument("--nmax", default="inf", help="detector ceiling or 'inf'")
    sub.add_argument("--out", help="output path (default: stdout)")
    sub.add_argument("--format", choices=("json", "csv"))
    sub.add_argument("--config")
    sub.set_defaults(func=_cmd_table)
    tbl["table"] = sub

    sub = subs.add_parser("discriminate", help="evaluate a stored table")
    sub.add_argument("--table", required=True, help="detection table JSON path")
    sub.add_argument("--pe-max", default="0", help="error budget (or 'inf')")
    sub.add_argument("--oracle", action="store_true",
                     help="exhaustive subset search instead of the greedy")
    sub.add_argument("--allow-coinflip", default="false")
    sub.add_argument("--out")
    sub.add_argument("--config")
    sub.set_defaults(func=_cmd_discriminate)
    tbl["discriminate"] = sub

    sub = subs.add_parser("usd-sweep", help="zero-error sweep over r")
    _add_common(sub, sweep=True)
    sub.set_defaults(func=_cmd_usd_sweep)
    tbl["usd-sweep"] = sub

    sub = subs.add_parser("psd-sweep", help="budgeted sweep over r and pe_max")
    _add_common(sub, sweep=True)
    sub.add_argument("--pe-max", default="decades",
                     help="comma list of budgets, or 'decades'")
    sub.set_defaults(func=_cmd_psd_sweep)
    tbl["psd-sweep"] = sub

    sub = subs.add_parser("envelope", help="confidence envelope of a sweep file")
    sub.add_argument("--points", required=True, help="sweep CSV or JSON path")
    sub.add_argument("--bin-width", default=str(DEFAULT_ALPHA_BIN_WIDTH))
    sub.add_argument("--out")
    sub.add_argument("--format", choices=("csv", "json"))
    sub.add_argument("--config")
    sub.set_defaults(func=_cmd_envelope)
    tbl["envelope"] = sub

    sub = subs.add_parser("nonuniform-scan",
                          help="coarse per-mode intensity scan")
    sub.add_argument("--r-values", help="comma list of per-mode intensities")
    sub.add_argument("--grid", choices=("full", "ci"), default="full",
                     help="preset value list (full: 7 values, ci: 3)")
    sub.add_argument("--nmax", default="inf")
    sub.add_argument("--threads", default="1")
    sub.add_argument("--progress", default="false")
    sub.add_argument("--out", help="per-tuple CSV path")
    sub.add_argument("--config")
    sub.set_defaults(func=_cmd_nonuniform_scan)
    tbl["nonuniform-scan"] = sub

    sub = subs.add_parser("figures", help="regenerate a figure's data files")
    sub.add_argument("name", choices=FIGURES)
    sub.add_argument("--out-dir", default="figures")
    sub.add_argument("--r-step", help="coarsen the recipe's squeezing grid")
    sub.add_argument("--format", choices=("csv", "svg"), default="svg",
                     help="svg also writes the CSV data")
    sub.add_argument("--threads", default="1")
    sub.add_argument("--progress", default="true")
    sub.add_argument("--config")
    sub.set_defaults(func=_cmd_figures)
    tbl["figures"] = sub

    return parser, tbl


def main(argv: list[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser, subparsers = build_parser()
    # config file values become subcommand defaults; explicit flags override
    if "--config" in argv:
        try:
            cfg_path = argv[argv.index("--config") + 1]
        except IndexError:
            parser.error("--config requires a path")
        command = next((a for a in argv if not a.startswith("-")), None)
        if command in subparsers:
            try:
                entries = load_config(cfg_path)
            except OSError as exc:
                print(f"error: {exc}", file=sys.stderr)
                return 2
            known = {a.dest for a in subparsers[command]._actions}
            unknown = set(entries) - known
            if unknown:
                print(f"error: unknown config keys: {sorted(unknown)}",
                      file=sys.stderr)
                return 2
            subparsers[command].set_defaults(**entries)
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except SweepSpecError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
