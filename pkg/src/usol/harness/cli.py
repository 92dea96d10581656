"""Command-line entry point.

    usol <subcommand> [--dim D] [--signature-k K] [--grid N] [--box L]
         [--pair ip,iq] [--lambda-seq a:b:count] [--z-sweep circle:N|line:...]
         [--out PATH] [--svg PATH] [--no-svg] [--seed S]
         [--profile quick|full] [--config FILE]

Subcommands run one experiment each and write CSV (plus, when an output path
is given and the experiment has a log-log sample table, an SVG figure with
the fitted lines rendered alongside the CSV).  `all` runs every experiment
for the chosen profile.  Exit codes: 0 all verdicts pass, 1 some verdict
fails, 2 configuration error, 3 numerical non-convergence.

CSV schema per subcommand (also shown by --help of each):
  region              name,ip,iq,status,violated,sobolev_status
  dyadic-check        case,target,value,abs_error,truncation_bound
  pv-check            case,value,target,error
  kernel              series,lam,value
  oscillatory         series,xd,value
  restrict-extend     epsilon,rel_l2_diff
  polar-check         case,polar,cartesian,rel_err
  sharpness-*         series,lambda_or_T,norm_p,norm_q_or_value,ratio,
                      fitted_slope,predicted_slope,verdict
  sweep               mode,re_z,im_z,lower_bound
  normest             case,value,expected,error
Fitted slopes, checks, and the overall verdict append as '# fit:',
'# check:', and '# verdict:' comment lines.
"""

from __future__ import annotations

import argparse
import os
import sys

from ..oscprofile import QuadratureError
from .config import ConfigError, load_config, parse_lambda_seq, parse_pair, parse_z_sweep
from .experiments import EXPERIMENTS
from .report import render_csv, write_csv, write_svg




def _profile_overrides(profile: str) -> dict:
    if profile == "quick":
        return {"grid_n": 32, "lambda_seq": parse_lambda_seq("0.125:0.0078125:5")}
    # full: larger lattice and a seven-point scale sequence
    return {"grid_n": 64, "lambda_seq": parse_lambda_seq("0.25:0.0078125:7")}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="usol",
        description="Scaling-law and uniformity experiments for resolvent-type "
                    "multipliers of non-elliptic quadratic symbols.",
        epilog=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    sub = parser.add_subparsers(dest="command", required=True)
    names = list(EXPERIMENTS) + ["all"]
    for name in names:
        sp = sub.add_parser(name, help=f"run the {name} experiment"
                            if name != "all" else "run every experiment")
        sp.add_argument("--dim", type=int, default=None)
        sp.add_argument("--signature-k", type=int, default=None, dest="signature_k")
        sp.add_argument("--grid", type=int, default=None, dest="grid_n")
        sp.add_argument("--box", type=float, default=None, dest="box_L")
        sp.add_argument("--pair", type=str, default=None)
        sp.add_argument("--lambda-seq", type=str, default=None, dest="lambda_seq")
        sp.add_argument("--z-sweep", type=str, default=None, dest="z_sweep")
        sp.add_argument("--out", type=str, default=None)
        sp.add_argument("--svg", type=str, default=None)
        sp.add_argument("--no-svg", action="store_true")
        sp.add_argument("--seed", type=int, default=None)
        sp.add_argument("--profile", type=str, default=None,
                        choices=("quick", "full"))
        sp.add_argument("--config", type=str, default=None)
        sp.add_argument("--no-timestamp", action="store_true",
                        help="omit the generated-at comment line")
    return parser


def _config_from_args(args) -> "ExperimentConfig":
    overrides = {}
    profile = args.profile
    if args.config:
        pre = load_config(args.config)
        profile = profile or pre.profile
    profile = profile or "quick"
    overrides.update(_profile_overrides(profile))
    overrides["profile"] = profile
    for key in ("dim", "signature_k", "grid_n", "box_L", "seed"):
        val = getattr(args, key, None)
        if val is not None:
            overrides[key] = val
    if args.pair is not None:
        overrides["pair"] = parse_pair(args.pair)
    if args.lambda_seq is not None:
        overrides["lambda_seq"] = parse_lambda_seq(args.lambda_seq)
    if args.z_sweep is not None:
        overrides["z_sweep"] = parse_z_sweep(args.z_sweep)
    return load_config(args.config, overrides)


def _emit(report, args) -> None:
    timestamp = not args.no_timestamp
    if args.out:
        write_csv(report, args.out, timestamp=timestamp)
        svg_path = args.svg
        if svg_path is None and not args.no_svg:
            stem, _ = os.path.splitext(args.out)
            svg_path = stem + ".svg"
        if svg_path and not args.no_svg:
            write_svg(report, svg_path)
    else:
        sys.stdout.write(render_csv(report, timestamp=timestamp))
        if args.svg:
            write_svg(report, args.svg)


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = _config_from_args(args)
    except ConfigError as exc:
        print(f"usol: configuration error: {exc}", file=sys.stderr)
        return 2
    names = list(EXPERIMENTS) if args.command == "all" else [args.command]
    all_passed = True
    try:
        if args.command == "all" and cfg.workers > 1:
            from concurrent.futures import ThreadPoolExecutor

            with ThreadPoolExecutor(max_workers=cfg.workers) as pool:
                futures = {name: pool.submit(EXPERIMENTS[name], cfg)
                           for name in names}
            reports = {name: futures[name].result() for name in names}
        else:
            reports = None
        for name in names:
            report = reports[name] if reports is not None else EXPERIMENTS[name](cfg)
            if args.command == "all":
                if args.out:
                    stem, ext = os.path.splitext(args.out)
                    sub_args = argparse.Namespace(
                        out=f"{stem}-{name}{ext or '.csv'}", svg=None,
                        no_svg=args.no_svg, no_timestamp=args.no_timestamp)
                    _emit(report, sub_args)
                else:
                    sys.stdout.write(render_csv(report,
                                                timestamp=not args.no_timestamp))
                status = "PASS" if report.passed else "FAIL"
                print(f"# {name}: {status}", file=sys.stderr)
            else:
                _emit(report, args)
            all_passed = all_passed and report.passed
    except QuadratureError as exc:
        print(f"usol: numerical non-convergence: {exc}", file=sys.stderr)
        return 3
    except (ConfigError, NotImplementedError) as exc:
        print(f"usol: configuration error: {exc}", file=sys.stderr)
        return 2
    return 0 if all_passed else 1


if __name__ == "__main__":
    sys.exit(main())
