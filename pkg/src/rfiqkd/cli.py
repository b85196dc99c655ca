"""Command line front end.

Three subcommands share one CSV output format:

    keyrate --config <path>   one distance per configured variant
    sweep   --config <path>   full distance grid per variant
    preset  <name>            bundled sweep configuration by short name

Columns are variant, distance_km, rate, mu_opt, c_lower, e_zz, i_eve and
abort_flag, printed with 10 significant digits.  Protocol aborts (bit
error at or past the hard limit, or statistics too thin to bound the
phase error) are ordinary rows with abort_flag 1 and zero rate.  Exit
status: 0 on success, 1 for configuration or usage problems, 2 when the
observed statistics are inconsistent with any physical channel.
"""

from __future__ import annotations

import argparse
import math
import sys

from .config import ConfigError, RunConfig, load_config, load_preset, preset_names
from .rate import KeyRatePoint, sweep_distance
from .security import DegenerateSystemError, InfeasibleStatisticsError

CSV_HEADER = "variant,distance_km,rate,mu_opt,c_lower,e_zz,i_eve,abort_flag"


class _Parser(argparse.ArgumentParser):
    # usage mistakes share the config-error exit status
    def error(self, message: str) -> None:
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def _build_parser() -> _Parser:
    parser = _Parser(prog="rfiqkd",
                     description="Key rates for four-state "
                                 "reference-frame-independent QKD with "
                                 "imperfect sources.")
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p: argparse.ArgumentParser) -> None:
        p.add_argument("--out", metavar="PATH",
                       help="write CSV here instead of stdout")
        p.add_argument("--mode", choices=("asymptotic", "finite"),
                       help="override the configured analysis mode")

    p_key = sub.add_parser("keyrate", help="single-distance key rate")
    p_key.add_argument("--config", required=True, metavar="PATH")
    p_key.add_argument("--distance", type=float, metavar="KM",
                       help="override the configured distance")
    add_common(p_key)

    p_sweep = sub.add_parser("sweep", help="key rate versus distance")
    p_sweep.add_argument("--config", required=True, metavar="PATH")
    add_common(p_sweep)

    p_preset = sub.add_parser("preset", help="run a bundled configuration")
    p_preset.add_argument("name", metavar="NAME",
                          help="preset short name (see package presets)")
    add_common(p_preset)
    return parser


def _fmt(value: float) -> str:
    return f"{value:.10g}"


def format_row(variant: str, point: KeyRatePoint) -> str:
    if point.summary is not None:
        c_lower = point.summary.c_lower
        e_zz = point.summary.e_zz_upper
        i_eve = point.summary.i_eve_upper
    else:
        c_lower = math.nan
        e_zz = math.nan
        i_eve = 1.0
    return ",".join((variant, _fmt(point.distance_km), _fmt(point.rate),
                     _fmt(point.mu_opt), _fmt(c_lower), _fmt(e_zz),
                     _fmt(i_eve), str(int(point.abort))))


def run_config(cfg: RunConfig, mode_override: str | None = None,
               single_point: bool = False,
               distance_override: float | None = None) -> list[str]:
    """CSV rows for every (variant, distance), in configuration order.

    With single_point each variant contributes one row, at the override
    distance if given and its configured channel distance otherwise.
    """
    rows = []
    for var in cfg.variants:
        mode = mode_override or var.mode
        if single_point:
            one = var.channel.distance_km if distance_override is None \
                else distance_override
            distances: tuple[float, ...] = (one,)
        else:
            distances = var.distances
        points = sweep_distance(var.source, var.channel, var.protocol,
                                distances, mode=mode,
                                optimize_mu=var.optimize_mu)
        rows.extend(format_row(var.name, p) for p in points)
    return rows


def _emit(rows: list[str], out_path: str | None) -> None:
    text = "\n".join([CSV_HEADER, *rows]) + "\n"
    if out_path is None:
        sys.stdout.write(text)
    else:
        with open(out_path, "w", encoding="utf-8", newline="") as handle:
            handle.write(text)


def main(argv: list[str] | None = None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        if args.command == "preset":
            cfg = load_preset(args.name)
        else:
            cfg = load_config(args.config)
        if args.command == "keyrate":
            rows = run_config(cfg, args.mode, single_point=True,
                              distance_override=args.distance)
        else:
            rows = run_config(cfg, args.mode)
    except (ConfigError, OSError) as exc:
        print(f"rfiqkd: {exc}", file=sys.stderr)
        return 1
    except (InfeasibleStatisticsError, DegenerateSystemError) as exc:
        print(f"rfiqkd: inconsistent statistics: {exc}", file=sys.stderr)
        return 2
    _emit(rows, args.out)
    return 0


def console_main() -> None:
    sys.exit(main())


if __name__ == "__main__":
    console_main()
