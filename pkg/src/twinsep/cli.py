"""Command-line front end.

Pipelines the sieve -> spectrum -> fit -> predict -> simulate flow and
emits plot-ready datasets.  Configuration precedence is flags, then
TWINSEP_* environment variables, then defaults.  Exit codes: 0 success,
2 validation, 3 numerical, 4 I/O.
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import os
import sys

from .errors import NumericalError, ValidationError
from .fit import fit_exp_slope, fit_m0, fit_s0_linear, fit_s0_loglog
from .ioutil import format_metadata, split_metadata
from .model import SolverInput, solve_approx, solve_f0
from .montecarlo import GENERATOR, SimConfig, gof_compare, sample_separations
from .pipeline import (
    figure_pipeline,
    ingest_counts,
    per_checkpoint_spectra,
    table_from_report,
    write_counts,
)
from .sieve import (
    DEFAULT_SEGMENT_FLAGS,
    SieveConfig,
    geometric_checkpoints,
    read_separations,
    sieve_range,
    write_separations,
)
from .spectrum import (
    S0Convention,
    accumulate,
    read_spectrum_csv,
    s0_from_counts,
    write_spectrum_csv,
)

EXIT_OK = 0
EXIT_VALIDATION = 2
EXIT_NUMERICAL = 3
EXIT_IO = 4

CONVENTIONS = {
    "raw": S0Convention.RAW,
    "paper": S0Convention.PAPER_OFFSET,
    "exact": S0Convention.INTERVAL_EXACT,
}


def _env(name, default):
    return os.environ.get(f"TWINSEP_{name}", default)


def _parse_checkpoints(text, limit):
    if text.startswith("geometric"):
        _, _, arg = text.partition(":")
        per_decade = int(arg) if arg else 20
        return geometric_checkpoints(limit, per_decade=per_decade)
    try:
        grid = tuple(int(tok) for tok in text.split(",") if tok.strip())
    except ValueError as exc:
        raise ValidationError(f"bad checkpoint spec {text!r}") from exc
    return grid


def _read_points(path, xcol, ycol):
    with open(path, newline="") as fh:
        meta, rows = split_metadata(fh)
    reader = csv.DictReader(rows)
    if reader.fieldnames is None or xcol not in reader.fieldnames or ycol not in reader.fieldnames:
        raise ValidationError(f"{path}: expected columns {xcol!r} and {ycol!r}")
    pts = []
    for row in reader:
        try:
            pts.append((float(row[xcol]), float(row[ycol])))
        except (TypeError, ValueError) as exc:
            raise ValidationError(f"{path}: unparseable row {row!r}") from exc
    del meta
    return pts


def _solve_from_flags(s0, f, pi2):
    if f > 0:
        if pi2 is None:
            raise ValidationError("--pi2 is required when f > 0")
        return solve_approx(SolverInput(s0=s0, pi2=pi2, f=f))
    return solve_f0(s0)


def cmd_sieve(args):
    grid = _parse_checkpoints(args.checkpoints, args.limit)
    config = SieveConfig(
        limit=args.limit, segment_size=args.segment_size, checkpoint_grid=grid
    )
    report = sieve_range(config)
    table = table_from_report(report)
    table.metadata["generator"] = "twinsep-sieve"
    table.metadata["segment_size"] = str(args.segment_size)
    write_counts(args.out, table)
    write_separations(args.separations, report.separations)
    if args.onsets:
        with open(args.onsets, "w", newline="") as fh:
            for line in format_metadata(report.metadata):
                fh.write(line + "\n")
            writer = csv.writer(fh)
            writer.writerow(["separation", "n"])
            writer.writerows(report.max_separation_onsets)
    rec = report.counts[-1]
    print(
        f"sieved to {args.limit}: pi1={rec.pi1} pi2={rec.pi2} "
        f"separations={report.separations.size} checkpoints={len(report.counts)}"
    )
    return EXIT_OK


def cmd_spectrum(args):
    seps = read_separations(args.separations)
    spec = accumulate(seps)
    write_spectrum_csv(
        args.out, spec, metadata={"source": args.separations, "intervals": str(spec.total_intervals)}
    )
    print(f"{spec.total_intervals} intervals, max separation {spec.max_separation()}")
    return EXIT_OK


def cmd_s0(args):
    conv = CONVENTIONS[args.convention]
    table = ingest_counts(args.counts)
    rows = []
    skipped = 0
    if conv is S0Convention.INTERVAL_EXACT:
        if not args.spectrum:
            raise ValidationError("--spectrum is required for the exact convention")
        spec, _ = read_spectrum_csv(args.spectrum)
        est = s0_from_counts(table.rows[-1], conv, spectrum=spec)
        rows.append((table.rows[-1].n, table.rows[-1].pi1, est.value))
    else:
        for rec in table.rows:
            try:
                est = s0_from_counts(rec, conv)
            except ValidationError:
                skipped += 1
                continue
            rows.append((rec.n, rec.pi1, est.value))
    lines = format_metadata({"s0_convention": conv.value, "log_base": "natural"})
    lines.append("n,pi1,s0")
    lines.extend(f"{n},{pi1},{v!r}" for n, pi1, v in rows)
    text = "\n".join(lines) + "\n"
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    if skipped:
        print(f"skipped {skipped} rows with too few twins", file=sys.stderr)
    return EXIT_OK


def cmd_fit(args):
    if args.kind == "slope":
        spec, _ = read_spectrum_csv(args.infile)
        fit = fit_exp_slope(spec)
    elif args.kind == "m0":
        fit = fit_m0(_read_points(args.infile, "pi1", "m"))
    elif args.kind == "s0lin":
        fit = fit_s0_linear(_read_points(args.infile, "pi1", "s0"))
    else:
        fit = fit_s0_loglog(_read_points(args.infile, "pi1", "s0"))
    payload = {
        "model_id": fit.model_id,
        "coefficients": list(fit.coefficients),
        "std_errors": list(fit.std_errors),
        "residual_rms": fit.residual_rms,
        "n_points": fit.n_points,
        "warnings": list(fit.warnings),
        "sensitivity_deltas": (
            list(fit.sensitivity_deltas) if fit.sensitivity_deltas is not None else None
        ),
        "metadata": {"log_base": "natural"},
    }
    with open(args.out, "w") as fh:
        json.dump(payload, fh, indent=2)
        fh.write("\n")
    coeffs = ", ".join(f"{c:.6g}" for c in fit.coefficients)
    print(f"{fit.model_id}: [{coeffs}] over {fit.n_points} points")
    return EXIT_OK


def cmd_predict(args):
    conv = CONVENTIONS[args.convention]
    table = ingest_counts(args.counts)
    skipped = 0
    with open(args.out, "w", newline="") as fh:
        for line in format_metadata(
            {"risk_factor": repr(args.f), "s0_convention": conv.value, "log_base": "natural"}
        ):
            fh.write(line + "\n")
        writer = csv.writer(fh)
        writer.writerow(["n", "log_n", "s0", "sbar", "a", "l_cut", "l_ceil"])
        for rec in table.rows:
            try:
                s0 = s0_from_counts(rec, conv).value
                params = solve_approx(SolverInput(s0=s0, pi2=rec.pi2, f=args.f))
            except ValidationError:
                skipped += 1
                continue
            writer.writerow(
                [
                    rec.n,
                    repr(math.log(rec.n)),
                    repr(s0),
                    repr(params.sbar),
                    repr(params.a),
                    repr(params.l_cut),
                    params.l_ceil,
                ]
            )
    if skipped:
        print(f"skipped {skipped} rows outside the solvable regime", file=sys.stderr)
    return EXIT_OK


def cmd_simulate(args):
    params = _solve_from_flags(args.s0, args.f, args.pi2)
    draws = sample_separations(SimConfig(params=params, n_events=args.n, seed=args.seed))
    spec = accumulate(draws)
    write_spectrum_csv(
        args.out,
        spec,
        metadata={
            "generator": GENERATOR,
            "seed": str(args.seed),
            "n_events": str(args.n),
            "s0": repr(args.s0),
            "risk_factor": repr(args.f),
            "pi2": "" if args.pi2 is None else str(args.pi2),
        },
    )
    print(f"{args.n} draws, sample mean {draws.mean():.4f}")
    return EXIT_OK


def cmd_gof(args):
    spec, _ = read_spectrum_csv(args.spectrum)
    params = _solve_from_flags(args.s0, args.f, args.pi2)
    report = gof_compare(spec, params, alpha=args.alpha)
    print(
        f"chi2={report.chi2:.4f} dof={report.dof} critical={report.chi2_critical:.4f} "
        f"ks={report.ks_distance:.5f} pass={report.passed}"
    )
    print(f"note: {report.note}")
    return EXIT_OK


def cmd_figures(args):
    conv = CONVENTIONS[args.convention]
    table = ingest_counts(args.counts)
    spectra = None
    if args.separations:
        spectra = per_checkpoint_spectra(read_separations(args.separations), table)
    onsets = None
    if args.onsets:
        with open(args.onsets, newline="") as fh:
            _, rows = split_metadata(fh)
        reader = csv.DictReader(rows)
        onsets = [(int(r["separation"]), int(r["n"])) for r in reader]
    figures = figure_pipeline(table, spectra=spectra, f=args.f, convention=conv, onsets=onsets)
    for path in figures.write(args.out_dir):
        print(f"wrote {path}")
    return EXIT_OK


def build_parser():
    parser = argparse.ArgumentParser(
        prog="twinsep",
        description="Twin-prime separation statistics: sieve, model, fits, predictions.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("sieve", help="sieve primes/twins and stream separations")
    p.add_argument("--limit", type=int, required=True)
    p.add_argument(
        "--segment-size", type=int, default=int(_env("SEGMENT_SIZE", DEFAULT_SEGMENT_FLAGS))
    )
    p.add_argument("--checkpoints", default=_env("CHECKPOINTS", "geometric:20"))
    p.add_argument("--out", required=True, help="counts CSV")
    p.add_argument("--separations", required=True, help="binary separation stream")
    p.add_argument("--onsets", help="optional CSV of record-separation onsets")
    p.set_defaults(func=cmd_sieve)

    p = sub.add_parser("spectrum", help="histogram a separation stream")
    p.add_argument("--separations", required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_spectrum)

    p = sub.add_parser("s0", help="average separation per checkpoint")
    p.add_argument("--counts", required=True)
    p.add_argument(
        "--convention", choices=sorted(CONVENTIONS), default=_env("CONVENTION", "raw")
    )
    p.add_argument("--spectrum", help="spectrum CSV (required for --convention exact)")
    p.add_argument("--out")
    p.set_defaults(func=cmd_s0)

    p = sub.add_parser("fit", help="least-squares fits")
    p.add_argument("--kind", choices=["slope", "m0", "s0lin", "s0loglog"], required=True)
    p.add_argument("--in", dest="infile", required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_fit)

    p = sub.add_parser("predict", help="maximal-separation cutoff per checkpoint")
    p.add_argument("--counts", required=True)
    p.add_argument("--f", type=float, default=float(_env("F", "1.0")))
    p.add_argument(
        "--convention", choices=sorted(CONVENTIONS), default=_env("CONVENTION", "raw")
    )
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_predict)

    p = sub.add_parser("simulate", help="sample synthetic separations")
    p.add_argument("--s0", type=float, required=True)
    p.add_argument("--pi2", type=int)
    p.add_argument("--f", type=float, default=float(_env("F", "0.0")))
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("gof", help="goodness of fit of a spectrum against the model")
    p.add_argument("--spectrum", required=True)
    p.add_argument("--s0", type=float, required=True)
    p.add_argument("--f", type=float, default=float(_env("F", "0.0")))
    p.add_argument("--pi2", type=int)
    p.add_argument("--alpha", type=float, default=float(_env("ALPHA", "0.01")))
    p.set_defaults(func=cmd_gof)

    p = sub.add_parser("figures", help="emit the three plot datasets")
    p.add_argument("--counts", required=True)
    p.add_argument("--separations")
    p.add_argument("--onsets")
    p.add_argument("--f", type=float, default=float(_env("F", "1.0")))
    p.add_argument(
        "--convention", choices=sorted(CONVENTIONS), default=_env("CONVENTION", "raw")
    )
    p.add_argument("--out-dir", required=True)
    p.set_defaults(func=cmd_figures)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ValidationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except NumericalError as exc:
        print(f"numerical error: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
