"""Command-line front end.

Three subcommands write CSV (UTF-8, LF line endings, 10 significant
digits):

``sweep``      PIE of one scheme over a log-spaced photon-number grid.
``threshold``  photon number below which two-symbol detection is superadditive.
``bound``      asymptotic PIE bounds of the collective designs.

Every flag may also come from a JSON file given by ``--config`` whose keys
are the flag names with dashes replaced by underscores; flags given on the
command line take precedence.

Exit codes: 0 success, 1 I/O failure, 2 usage error, 3 numerical failure.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from functools import partial

import numpy as np

from .errors import DomainError, NumericalError
from .lowcost import U_STAR, three_symbol_bound
from .optimize import (
    SweepSpec,
    best_two_symbol_u,
    hadamard_strategy_pie,
    optimal_pie_three_symbol,
    optimal_pie_two_symbol,
    superadditivity_threshold,
)
from .receivers import helstrom_mi, homodyne_bpsk_mi, shannon_hartley, three_symbol_mi, two_symbol_mi

SCHEMES = (
    "helstrom",
    "shannon_hartley",
    "homodyne_bpsk",
    "two_symbol",
    "two_symbol_displaced",
    "three_symbol",
    "hadamard",
)
BOUND_SCHEMES = ("two_symbol", "three_symbol", "hadamard")
HADAMARD_TABLE = (2, 4, 8, 12, 16, 32)

DEFAULTS = {
    "sweep": {"nbar_min": 1e-4, "nbar_max": 1.0, "points": 50, "beta": 0.0, "nb": 0.0, "M": 2},
    "threshold": {"nbar_min": 1e-3, "nbar_max": 0.05, "points": 25},
    "bound": {"points": 51},
}

EXIT_IO = 1
EXIT_USAGE = 2
EXIT_NUMERICAL = 3


def fmt(x) -> str:
    if x is None:
        return ""
    if isinstance(x, str):
        return x
    return format(float(x), ".10g")


def sweep_point(scheme: str, params: dict, nbar: float) -> tuple[float, float | None]:
    """PIE at one photon number and the optimized parameter, if any."""
    if scheme == "helstrom":
        return helstrom_mi(nbar) / nbar, None
    if scheme == "shannon_hartley":
        return shannon_hartley(nbar, params["nb"]) / nbar, None
    if scheme == "homodyne_bpsk":
        return homodyne_bpsk_mi(nbar) / nbar, None
    if scheme == "two_symbol":
        if params.get("u") is not None:
            return two_symbol_mi(nbar, params["u"], params["beta"]) / (2 * nbar), params["u"]
        u, pie = best_two_symbol_u(nbar, params["beta"])
        return pie, u
    if scheme == "two_symbol_displaced":
        pie, _, beta = optimal_pie_two_symbol(nbar, with_displacement=True)
        return pie, beta
    if scheme == "three_symbol":
        if params.get("v") is not None:
            return three_symbol_mi(nbar, params["v"]) / (3 * nbar), params["v"]
        pie, v = optimal_pie_three_symbol(nbar)
        return pie, v
    if scheme == "hadamard":
        pie, strategy = hadamard_strategy_pie(params["M"])
        return pie, (1.0 / params["M"] if strategy == "ppm" else U_STAR)
    raise DomainError(f"unknown scheme {scheme!r}")


def _map(fn, items, threads: int):
    items = list(items)
    if threads <= 1 or len(items) <= 1:
        return [fn(x) for x in items]
    with ProcessPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(fn, items))


def _csv_text(header, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([fmt(x) for x in row])
    return buf.getvalue()


def _emit(text: str, out: str | None) -> None:
    if out is None:
        sys.stdout.write(text)
        return
    with open(out, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)


def cmd_sweep(cfg: dict) -> int:
    spec = SweepSpec(cfg["nbar_min"], cfg["nbar_max"], cfg["points"], cfg["scheme"])
    grid = spec.grid()
    results = _map(partial(sweep_point, cfg["scheme"], cfg), grid, cfg["threads"])
    rows = [(n, pie, param) for n, (pie, param) in zip(grid, results)]
    _emit(_csv_text(("nbar", "pie", "param_opt"), rows), cfg["out"])
    return 0


def _threshold_curve_point(nbar: float) -> tuple[float, float]:
    return best_two_symbol_u(nbar)[1], helstrom_mi(nbar) / nbar


def cmd_threshold(cfg: dict) -> int:
    nbar = superadditivity_threshold()
    print(f"{nbar:.4f}")
    if cfg["out"] is not None:
        grid = SweepSpec(cfg["nbar_min"], cfg["nbar_max"], cfg["points"]).grid()
        curves = _map(_threshold_curve_point, grid, cfg["threads"])
        rows = [(n, two, hel) for n, (two, hel) in zip(grid, curves)]
        _emit(_csv_text(("nbar", "pie_two_symbol", "pie_helstrom"), rows), cfg["out"])
    return 0


def bound_table(scheme: str, cfg: dict) -> str:
    if scheme == "two_symbol":
        return _csv_text(("u", "pie"), [(U_STAR, 2 + U_STAR)])
    if scheme == "three_symbol":
        vs = np.linspace(0.0, 0.5, cfg["points"])
        return _csv_text(("v", "pie"), [(v, three_symbol_bound(v)) for v in vs])
    if scheme == "hadamard":
        Ms = (cfg["M"],) if cfg.get("M") is not None else HADAMARD_TABLE
        rows = []
        for M in Ms:
            pie, strategy = hadamard_strategy_pie(M)
            rows.append((M, strategy, pie))
        return _csv_text(("M", "strategy", "pie"), rows)
    raise DomainError(f"no asymptotic bound for scheme {scheme!r}")


def cmd_bound(cfg: dict) -> int:
    if cfg["scheme"] is not None:
        text = bound_table(cfg["scheme"], cfg)
    else:
        text = "\n".join(f"# {s}\n" + bound_table(s, cfg) for s in BOUND_SCHEMES)
    _emit(text, cfg["out"])
    return 0


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="JSON file with default flag values")
    common.add_argument("--out", help="output CSV path (default: stdout)")
    common.add_argument("--threads", type=int, help="worker processes (default: CPU count)")
    common.add_argument("--nbar-min", type=float)
    common.add_argument("--nbar-max", type=float)
    common.add_argument("--points", type=int)

    parser = argparse.ArgumentParser(prog="lowcostmi", description=__doc__.split("\n\n")[0])
    sub = parser.add_subparsers(dest="command", required=True)

    sweep = sub.add_parser("sweep", parents=[common], help="PIE versus mean photon number")
    sweep.add_argument("--scheme", choices=SCHEMES)
    sweep.add_argument("--u", type=float, help="fixed two-symbol probability of word 01")
    sweep.add_argument("--v", type=float, help="fixed three-symbol probability of words 001, 010")
    sweep.add_argument("--beta", type=float, help="fixed SPD displacement for two_symbol")
    sweep.add_argument("--nb", type=float, help="thermal photon number for shannon_hartley")
    sweep.add_argument("--M", type=int, help="Hadamard word length")

    sub.add_parser("threshold", parents=[common], help="superadditivity threshold")

    bound = sub.add_parser("bound", parents=[common], help="asymptotic PIE bounds")
    bound.add_argument("--scheme", choices=BOUND_SCHEMES)
    bound.add_argument("--M", type=int, help="single Hadamard order instead of the default table")
    return parser


def resolve_config(parser: argparse.ArgumentParser, args: argparse.Namespace) -> dict:
    """Merge built-in defaults, the config file and explicit flags, in that order."""
    cfg = dict(DEFAULTS[args.command])
    cfg.update({"out": None, "threads": os.cpu_count() or 1, "scheme": None})
    if args.config:
        try:
            with open(args.config, encoding="utf-8") as fh:
                filecfg = json.load(fh)
        except OSError as exc:
            parser.error(f"cannot read config: {exc}")
        except json.JSONDecodeError as exc:
            parser.error(f"malformed config: {exc}")
        if not isinstance(filecfg, dict):
            parser.error("config must be a JSON object")
        cfg.update({k.replace("-", "_"): v for k, v in filecfg.items()})
    cfg.update({k: v for k, v in vars(args).items() if v is not None and k not in ("config", "command")})

    schemes = SCHEMES if args.command == "sweep" else BOUND_SCHEMES
    if args.command == "sweep" and cfg["scheme"] is None:
        parser.error("sweep needs --scheme")
    if cfg["scheme"] is not None and cfg["scheme"] not in schemes:
        parser.error(f"invalid scheme {cfg['scheme']!r}; choose from {', '.join(schemes)}")
    return cfg


COMMANDS = {"sweep": cmd_sweep, "threshold": cmd_threshold, "bound": cmd_bound}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    cfg = resolve_config(parser, args)
    try:
        return COMMANDS[args.command](cfg)
    except DomainError as exc:
        print(f"lowcostmi: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (NumericalError, FloatingPointError) as exc:
        print(f"lowcostmi: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except OSError as exc:
        print(f"lowcostmi: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
