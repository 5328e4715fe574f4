"""``plm`` command line interface.

Exit status: 0 on success, 1 on validation/numerical errors, 2 on usage errors.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from typing import List, Optional

from . import analysis, registry
from .dataset import Dataset, GenSpec, dump_csv, filter as filter_ds, generate_synthetic, load_csv, where
from .errors import PathLossError
from .estimation import fit_model, sig6
from .models import (
    AbgParams,
    CifParams,
    CiParams,
    Environment,
    FiParams,
    MODEL_NAMES,
    Scenario,
    compute_f0,
)
from .plot import emit_plot

MODEL_CHOICES = ("fi", "ci", "abg", "cif")


class UsageError(Exception):
    pass


def _add_output(p):
    p.add_argument("-o", "--output", metavar="PATH", help="write the result here instead of stdout")


def _add_filters(p, freq_help="keep only samples at this frequency (repeatable)"):
    p.add_argument("--input", required=True, metavar="CSV", help="measurement CSV ('-' for stdin)")
    p.add_argument("--env", choices=("los", "nlos"), help="keep only this environment")
    p.add_argument("--scenario", metavar="NAME", help="keep only this scenario (umi_sc, indoor_office, other:<label>)")
    p.add_argument("--freq", type=float, action="append", metavar="GHZ", help=freq_help)


def _add_f0(p, auto_help):
    p.add_argument("--f0", metavar="auto|GHZ", help=auto_help)
    p.add_argument("--f0-ghz", type=float, metavar="GHZ", help="explicit CIF reference frequency (same as --f0 GHZ)")


def _add_params(p):
    g = p.add_argument_group("model parameters")
    g.add_argument("--n", type=float, help="CI path loss exponent / CIF distance exponent")
    g.add_argument("--alpha", type=float, help="FI/ABG distance coefficient")
    g.add_argument("--beta", type=float, help="FI/ABG intercept in dB")
    g.add_argument("--gamma", type=float, help="ABG frequency coefficient")
    g.add_argument("--b", type=float, help="CIF frequency balance coefficient")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="plm",
        description="Fit, evaluate and invert FI, CI, ABG and CIF millimeter-wave path loss models.",
    )
    sub = parser.add_subparsers(dest="verb", metavar="{fit,eval,gen,compare,range,plot,registry}")
    sub.required = True

    p = sub.add_parser("fit", help="fit a model (or all models) to a measurement CSV")
    p.add_argument("--model", required=True, choices=MODEL_CHOICES + ("all",), help="model to fit; 'all' emits a comparison report")
    _add_filters(p)
    _add_f0(p, "CIF reference frequency: 'auto' (default) or a value in GHz")
    p.add_argument("--format", choices=("json", "table"), default="json", help="output format (default json)")
    p.add_argument("--verbose", action="store_true", help="include per-sample residuals in JSON output")
    _add_output(p)

    p = sub.add_parser("eval", help="evaluate a model's mean path loss")
    p.add_argument("--model", required=True, choices=MODEL_CHOICES, help="model to evaluate")
    _add_params(p)
    _add_f0(p, "CIF reference frequency in GHz")
    p.add_argument("--freq", type=float, action="append", metavar="GHZ", help="carrier frequency (repeatable)")
    p.add_argument("--dist", type=float, action="append", required=True, metavar="M", help="T-R distance in meters (repeatable)")
    p.add_argument("--format", choices=("json", "csv"), default="json", help="output format (default json)")
    _add_output(p)

    p = sub.add_parser("gen", help="generate synthetic shadowed samples as CSV")
    p.add_argument("--model", required=True, choices=MODEL_CHOICES, help="generating model")
    _add_params(p)
    _add_f0(p, "CIF reference frequency: 'auto' (from the frequency plan) or GHz")
    p.add_argument("--freq", type=float, action="append", required=True, metavar="GHZ", help="frequency (repeatable)")
    p.add_argument("--count", type=int, action="append", required=True, metavar="N",
                   help="samples per frequency; give once for all or once per --freq")
    p.add_argument("--dmin", type=float, required=True, metavar="M", help="minimum distance in meters")
    p.add_argument("--dmax", type=float, required=True, metavar="M", help="maximum distance in meters")
    p.add_argument("--sigma", type=float, default=0.0, metavar="DB", help="shadow fading standard deviation (default 0)")
    p.add_argument("--seed", type=int, default=0, help="64-bit generator seed (default 0)")
    p.add_argument("--scenario", default="other:synthetic", metavar="NAME", help="scenario tag written to each row")
    p.add_argument("--env", choices=("los", "nlos"), default="nlos", help="environment tag written to each row")
    _add_output(p)

    p = sub.add_parser("compare", help="fit several models and report them side by side")
    p.add_argument("--model", action="append", choices=MODEL_CHOICES + ("all",), help="model to include (repeatable, default all)")
    _add_filters(p)
    _add_f0(p, "CIF reference frequency: 'auto' (default) or a value in GHz")
    p.add_argument("--format", choices=("table", "json"), default="table", help="output format (default table)")
    _add_output(p)

    p = sub.add_parser("range", help="maximum distance for a path loss budget")
    p.add_argument("--model", required=True, choices=MODEL_CHOICES, help="model to invert")
    _add_params(p)
    _add_f0(p, "CIF reference frequency in GHz")
    p.add_argument("--freq", type=float, metavar="GHZ", help="carrier frequency (not needed for FI)")
    p.add_argument("--max-pl", type=float, required=True, metavar="DB", help="maximum allowed path loss in dB")
    _add_output(p)

    p = sub.add_parser("plot", help="SVG scatter plot with fitted model lines")
    p.add_argument("--model", action="append", choices=MODEL_CHOICES + ("all",), help="model line to draw (repeatable; none for scatter only)")
    _add_filters(p)
    _add_f0(p, "CIF reference frequency: 'auto' (default) or a value in GHz")
    _add_output(p)

    p = sub.add_parser("registry", help="print the built-in reference parameter tables")
    p.add_argument("--scenario", metavar="NAME", help="only rows for this scenario")
    p.add_argument("--env", choices=("los", "nlos"), help="only rows for this environment")
    p.add_argument("--model", choices=MODEL_CHOICES, help="only rows for this model")
    p.add_argument("--format", choices=("csv", "json", "table"), default="csv", help="output format (default csv)")
    _add_output(p)
    return parser


def _f0_option(args, allow_auto: bool):
    if args.f0 is not None and args.f0_ghz is not None:
        raise UsageError("--f0 and --f0-ghz are mutually exclusive")
    if args.f0_ghz is not None:
        return args.f0_ghz
    if args.f0 is None:
        return "auto" if allow_auto else None
    if args.f0.lower() == "auto":
        if not allow_auto:
            raise UsageError("--f0 auto is not meaningful here; give a value in GHz")
        return "auto"
    try:
        return float(args.f0)
    except ValueError:
        raise UsageError(f"--f0 expects 'auto' or a number, got {args.f0!r}") from None


def _need(args, model, *names):
    missing = [n for n in names if getattr(args, n) is None]
    if missing:
        raise UsageError(f"model {model} needs " + ", ".join("--" + n for n in missing))
    return [getattr(args, n) for n in names]


def _params_from_args(args, f0=None):
    model = args.model
    if model == "fi":
        return FiParams(*_need(args, model, "alpha", "beta"))
    if model == "ci":
        return CiParams(*_need(args, model, "n"))
    if model == "abg":
        return AbgParams(*_need(args, model, "alpha", "beta", "gamma"))
    n, b = _need(args, model, "n", "b")
    if f0 is None:
        raise UsageError("model cif needs --f0 or --f0-ghz")
    return CifParams(n, b, f0)


def _load(args) -> Dataset:
    if args.input == "-":
        ds = load_csv(sys.stdin.buffer, name="<stdin>")
    else:
        with open(args.input, "rb") as fh:
            ds = load_csv(fh, name=args.input)
    scenario = None if args.scenario is None else Scenario.parse(args.scenario)
    env = None if args.env is None else Environment.parse(args.env)
    return filter_ds(ds, where(scenario, env, args.freq))


def _models(selected) -> List[str]:
    if not selected or "all" in selected:
        return list(MODEL_NAMES)
    return [m.upper() for m in selected]


def _bold() -> bool:
    mode = os.environ.get("PLM_COLOR", "auto").lower()
    if mode == "always":
        return True
    if mode == "never":
        return False
    return sys.stdout.isatty()


def cmd_fit(args):
    f0 = _f0_option(args, allow_auto=True)
    ds = _load(args)
    if args.model == "all":
        report = analysis.compare_models(ds, MODEL_NAMES, f0)
        if args.format == "table":
            return report.to_table(bold_header=_bold() and not args.output)
        return report.to_json(residuals=args.verbose)
    fit = fit_model(ds, args.model, f0)
    if args.format == "table":
        report = analysis.compare_models(ds, [args.model], f0)
        return report.to_table(bold_header=_bold() and not args.output)
    return json.dumps(fit.to_dict(residuals=args.verbose), indent=2) + "\n"


def cmd_compare(args):
    f0 = _f0_option(args, allow_auto=True)
    report = analysis.compare_models(_load(args), _models(args.model), f0)
    if args.format == "json":
        return report.to_json()
    return report.to_table(bold_header=_bold() and not args.output)


def cmd_eval(args):
    params = _params_from_args(args, _f0_option(args, allow_auto=False))
    freqs = args.freq or []
    if args.model != "fi" and not freqs:
        raise UsageError(f"model {args.model} needs --freq")
    rows = []
    for f in freqs or [None]:
        for d in args.dist:
            pl = params.evaluate(1.0 if f is None else f, d)
            rows.append((f, d, float(pl)))
    if args.format == "csv":
        lines = ["frequency_ghz,distance_m,path_loss_db"]
        lines += [f"{'' if f is None else repr(f)},{d!r},{pl!r}" for f, d, pl in rows]
        return "\n".join(lines) + "\n"
    doc = {
        "model": params.model,
        "params": {k: sig6(v) for k, v in params.as_dict().items()},
        "points": [
            {"freq_ghz": None if f is None else sig6(f), "dist_m": sig6(d), "path_loss_db": sig6(pl)}
            for f, d, pl in rows
        ],
    }
    return json.dumps(doc, indent=2) + "\n"


def cmd_gen(args):
    counts = args.count
    if len(counts) == 1:
        counts = counts * len(args.freq)
    if len(counts) != len(args.freq):
        raise UsageError("give --count once, or once per --freq")
    plan = list(zip(args.freq, counts))
    f0 = _f0_option(args, allow_auto=True) if args.model == "cif" else None
    if f0 == "auto":
        f0 = compute_f0(plan)
    spec = GenSpec(
        model=_params_from_args(args, f0),
        freq_plan=plan,
        dist_range=(args.dmin, args.dmax),
        sigma=args.sigma,
        seed=args.seed,
        scenario=Scenario.parse(args.scenario),
        environment=Environment.parse(args.env),
    )
    return dump_csv(generate_synthetic(spec))


def cmd_range(args):
    params = _params_from_args(args, _f0_option(args, allow_auto=False))
    if args.model != "fi" and args.freq is None:
        raise UsageError(f"model {args.model} needs --freq")
    query = analysis.RangeQuery(params, args.freq, args.max_pl)
    d = analysis.max_range(query)
    doc = {
        "model": params.model,
        "params": {k: sig6(v) for k, v in params.as_dict().items()},
        "freq_ghz": None if args.freq is None else sig6(args.freq),
        "max_path_loss_db": sig6(args.max_pl),
        "max_range_m": sig6(d),
    }
    return json.dumps(doc, indent=2) + "\n"


def cmd_plot(args):
    f0 = _f0_option(args, allow_auto=True)
    ds = _load(args)
    fits = []
    if args.model:
        report = analysis.compare_models(ds, _models(args.model), f0)
        fits = list(report.fits.values())
        for m, reason in report.skipped.items():
            print(f"plm: not drawing {m}: {reason}", file=sys.stderr)
    return emit_plot(ds, fits)


def cmd_registry(args):
    entries = registry.ENTRIES
    if args.scenario:
        scen = Scenario.parse(args.scenario)
        entries = [e for e in entries if e.scenario == scen]
    if args.env:
        entries = [e for e in entries if e.environment.value == args.env]
    if args.model:
        entries = [e for e in entries if e.model == args.model.upper()]
    rows = [registry.entry_row(e) for e in entries]
    if args.format == "json":
        return json.dumps(rows, indent=2) + "\n"
    if args.format == "table":
        header = registry.CSV_COLUMNS
        table = [header] + [tuple(r[c] or "-" for c in header) for r in rows]
        widths = [max(len(r[i]) for r in table) for i in range(len(header))]
        return "\n".join("  ".join(c.ljust(w) for c, w in zip(r, widths)).rstrip() for r in table) + "\n"
    return registry.export_csv(entries)


COMMANDS = {
    "fit": cmd_fit,
    "eval": cmd_eval,
    "gen": cmd_gen,
    "compare": cmd_compare,
    "range": cmd_range,
    "plot": cmd_plot,
    "registry": cmd_registry,
}


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        text = COMMANDS[args.verb](args)
    except UsageError as exc:
        parser.print_usage(sys.stderr)
        print(f"plm {args.verb}: error: {exc}", file=sys.stderr)
        return 2
    except (PathLossError, OSError, UnicodeDecodeError) as exc:
        print(f"plm {args.verb}: error: {exc}", file=sys.stderr)
        return 1
    if args.output:
        with open(args.output, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return 0


if __name__ == "__main__":
    sys.exit(main())
