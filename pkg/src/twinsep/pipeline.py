"""Count-table ingestion and plot-ready dataset assembly.

A CountTable is the bridge between sieved runs and externally published
count tables: rows of (n, pi1, pi2[, pi1_adjusted]) sorted by n.  The
figure pipeline turns a table (plus, optionally, the separation stream)
into three CSV-ready datasets: slopes against log(pi1), the average
separation against log(pi1), and the predicted maximal separation
against log(n) alongside observed record onsets.
"""

from __future__ import annotations

import csv
import math
import os
from dataclasses import dataclass, field

import numpy as np

from .errors import ValidationError
from .fit import fit_exp_slope, fit_m0, fit_s0_linear
from .ioutil import format_metadata
from .model import DEFAULT_RISK_FACTOR, SolverInput, solve_approx
from .sieve import CountRecord, SieveReport
from .spectrum import S0Convention, SeparationSpectrum, accumulate, s0_from_counts

SOURCE_SIEVED = "sieved"
SOURCE_EXTERNAL = "external"

FIG1_COLUMNS = ["n", "pi1", "log_pi1", "inv_s0", "slope_m", "slope_se", "m0_curve"]
FIG2_COLUMNS = ["n", "pi1", "log_pi1", "s0", "s0_fit"]
FIG3_COLUMNS = ["series", "n", "log_n", "value", "l_ceil"]


@dataclass
class CountTable:
    rows: list[CountRecord]
    source: str = SOURCE_EXTERNAL
    metadata: dict[str, str] = field(default_factory=dict)

    def __post_init__(self):
        if self.source not in (SOURCE_SIEVED, SOURCE_EXTERNAL):
            raise ValidationError(f"unknown source {self.source!r}")
        ns = [r.n for r in self.rows]
        if any(b <= a for a, b in zip(ns, ns[1:])):
            raise ValidationError("rows must be sorted by n with no duplicates")


def table_from_report(report: SieveReport) -> CountTable:
    return CountTable(
        rows=list(report.counts),
        source=SOURCE_SIEVED,
        metadata=dict(report.metadata),
    )


def ingest_counts(path) -> CountTable:
    """Parse a counts CSV, rejecting malformed or non-monotone rows by line number."""
    metadata: dict[str, str] = {}
    data: list[tuple[int, list[str]]] = []
    with open(path, newline="") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.strip()
            if not line:
                continue
            if line.startswith("#"):
                body = line.lstrip("#").strip()
                if body.startswith("metadata:"):
                    key, _, value = body[len("metadata:"):].strip().partition("=")
                    metadata[key.strip()] = value.strip()
                continue
            data.append((lineno, next(csv.reader([line]))))
    if not data:
        raise ValidationError(f"{path}: no data rows")

    header_line, header = data[0]
    cols = [h.strip() for h in header]
    for required in ("n", "pi1", "pi2"):
        if required not in cols:
            raise ValidationError(f"{path}:{header_line}: missing column {required!r}")
    idx = {name: cols.index(name) for name in cols}
    has_adjusted = "pi1_adjusted" in idx

    rows: list[CountRecord] = []
    seen: dict[int, int] = {}
    prev: CountRecord | None = None
    for lineno, fields in data[1:]:
        try:
            n = int(fields[idx["n"]])
            pi1 = int(fields[idx["pi1"]])
            pi2 = int(fields[idx["pi2"]])
            adj_text = fields[idx["pi1_adjusted"]].strip() if has_adjusted else ""
            adj = int(adj_text) if adj_text else None
        except (IndexError, ValueError) as exc:
            raise ValidationError(f"{path}:{lineno}: unparseable row {fields!r}") from exc
        if n in seen:
            raise ValidationError(
                f"{path}:{lineno}: duplicate n={n} (first seen on line {seen[n]})"
            )
        seen[n] = lineno
        try:
            rec = CountRecord(n=n, pi1=pi1, pi2=pi2, pi1_adjusted=adj)
        except ValidationError as exc:
            raise ValidationError(f"{path}:{lineno}: {exc}") from exc
        if prev is not None and (n < prev.n or pi1 < prev.pi1 or pi2 < prev.pi2):
            raise ValidationError(
                f"{path}:{lineno}: monotonicity violation at n={n} "
                f"(previous row had n={prev.n}, pi1={prev.pi1}, pi2={prev.pi2})"
            )
        rows.append(rec)
        prev = rec
    return CountTable(rows=rows, source=SOURCE_EXTERNAL, metadata=metadata)


def write_counts(path, table: CountTable) -> None:
    with open(path, "w", newline="") as fh:
        for line in format_metadata(table.metadata):
            fh.write(line + "\n")
        writer = csv.writer(fh)
        writer.writerow(["n", "pi1", "pi2", "pi1_adjusted"])
        for r in table.rows:
            writer.writerow(
                [r.n, r.pi1, r.pi2, "" if r.pi1_adjusted is None else r.pi1_adjusted]
            )


def per_checkpoint_spectra(separations, table: CountTable) -> dict[int, SeparationSpectrum]:
    """Spectrum of the separations completed by each checkpoint.

    By the time pi2 twins have appeared, exactly pi2 - 2 separation
    intervals have closed (the pair (3 5) is discarded and the last
    interval is still open), so each checkpoint sees a prefix of the
    stream.
    """
    arr = np.asarray(separations)
    out: dict[int, SeparationSpectrum] = {}
    for rec in table.rows:
        k = max(0, rec.pi2 - 2)
        if k > arr.size:
            raise ValidationError(
                f"separation stream too short for checkpoint n={rec.n}: "
                f"needs {k}, have {arr.size}"
            )
        out[rec.n] = accumulate(arr[:k])
    return out


def max_separation_by_checkpoint(separations, table: CountTable) -> dict[int, int | None]:
    """Running-maximum separation seen by each checkpoint (None before data)."""
    arr = np.asarray(separations)
    cummax = np.maximum.accumulate(arr) if arr.size else arr
    out: dict[int, int | None] = {}
    for rec in table.rows:
        k = max(0, rec.pi2 - 2)
        out[rec.n] = int(cummax[k - 1]) if 0 < k <= arr.size else None
    return out


def count_cutoff_exceedances(
    separations,
    table: CountTable,
    f: float = DEFAULT_RISK_FACTOR,
    convention: S0Convention | str = S0Convention.RAW,
) -> dict[int, int]:
    """Per checkpoint, how many completed separations exceed that checkpoint's cutoff."""
    arr = np.asarray(separations)
    out: dict[int, int] = {}
    for rec in table.rows:
        k = max(0, rec.pi2 - 2)
        s0 = s0_from_counts(rec, convention).value
        params = solve_approx(SolverInput(s0=s0, pi2=rec.pi2, f=f))
        out[rec.n] = int(np.count_nonzero(arr[:k] > params.l_cut))
    return out


@dataclass
class FigureSet:
    fig1: list[dict]
    fig2: list[dict]
    fig3: list[dict]
    metadata: dict[str, str]

    def write(self, out_dir) -> list[str]:
        os.makedirs(out_dir, exist_ok=True)
        written = []
        for name, columns, rows in (
            ("fig1.csv", FIG1_COLUMNS, self.fig1),
            ("fig2.csv", FIG2_COLUMNS, self.fig2),
            ("fig3.csv", FIG3_COLUMNS, self.fig3),
        ):
            path = os.path.join(out_dir, name)
            with open(path, "w", newline="") as fh:
                for line in format_metadata(self.metadata):
                    fh.write(line + "\n")
                writer = csv.DictWriter(fh, fieldnames=columns, extrasaction="ignore")
                writer.writeheader()
                writer.writerows(rows)
            written.append(path)
        return written


def figure_pipeline(
    table: CountTable,
    spectra: dict[int, SeparationSpectrum] | None = None,
    f: float = DEFAULT_RISK_FACTOR,
    convention: S0Convention | str = S0Convention.RAW,
    onsets: list[tuple[int, int]] | None = None,
) -> FigureSet:
    """Assemble the three plot datasets from a count table.

    spectra (keyed by checkpoint n) feed the computed-slope series of the
    first dataset; onsets feed the observed-record series of the third.
    Rows whose counts cannot support an estimate are skipped rather than
    failing the whole export.
    """
    conv = S0Convention(convention)
    s0_by_n: dict[int, float] = {}
    for rec in table.rows:
        try:
            s0_by_n[rec.n] = s0_from_counts(
                rec, conv, spectrum=(spectra or {}).get(rec.n)
            ).value
        except ValidationError:
            continue

    # slopes from per-checkpoint spectra, then the one-parameter decay law
    slope_rows: dict[int, tuple[float, float]] = {}
    for rec in table.rows:
        spec = (spectra or {}).get(rec.n)
        if spec is None:
            continue
        try:
            fit = fit_exp_slope(spec)
        except ValidationError:
            continue
        slope_rows[rec.n] = (-fit.coefficients[1], fit.std_errors[1])
    m0 = None
    m0_points = [
        (rec.pi1, slope_rows[rec.n][0])
        for rec in table.rows
        if rec.n in slope_rows and rec.pi1 >= 3
    ]
    if m0_points:
        m0 = fit_m0(m0_points).coefficients[0]

    fig1 = []
    for rec in table.rows:
        s0 = s0_by_n.get(rec.n)
        if s0 is None or s0 <= 0 or rec.pi1 < 2:
            continue
        row = {
            "n": rec.n,
            "pi1": rec.pi1,
            "log_pi1": math.log(rec.pi1),
            "inv_s0": 1.0 / s0,
            "slope_m": "",
            "slope_se": "",
            "m0_curve": "",
        }
        if rec.n in slope_rows:
            row["slope_m"], row["slope_se"] = slope_rows[rec.n]
        if m0 is not None:
            row["m0_curve"] = m0 / math.log(rec.pi1)
        fig1.append(row)

    line = None
    fit_pts = [(rec.pi1, s0_by_n[rec.n]) for rec in table.rows if rec.n in s0_by_n]
    if len(fit_pts) >= 2 and len({p for p, _ in fit_pts}) >= 2:
        line = fit_s0_linear(fit_pts).coefficients
    fig2 = []
    for rec in table.rows:
        if rec.n not in s0_by_n or rec.pi1 < 1:
            continue
        x = math.log(rec.pi1)
        fig2.append(
            {
                "n": rec.n,
                "pi1": rec.pi1,
                "log_pi1": x,
                "s0": s0_by_n[rec.n],
                "s0_fit": line[0] + line[1] * x if line else "",
            }
        )

    fig3 = []
    for rec in table.rows:
        s0 = s0_by_n.get(rec.n)
        if s0 is None or s0 <= 0 or rec.pi2 < 3:
            continue
        try:
            params = solve_approx(SolverInput(s0=s0, pi2=rec.pi2, f=f))
        except ValidationError:
            continue
        fig3.append(
            {
                "series": "predicted",
                "n": rec.n,
                "log_n": math.log(rec.n),
                "value": params.l_cut,
                "l_ceil": params.l_ceil,
            }
        )
    for sep, n in onsets or []:
        fig3.append(
            {
                "series": "onset",
                "n": n,
                "log_n": math.log(n),
                "value": sep,
                "l_ceil": "",
            }
        )

    metadata = dict(table.metadata)
    metadata.update(
        {
            "log_base": "natural",
            "s0_convention": conv.value,
            "risk_factor": repr(float(f)),
        }
    )
    return FigureSet(fig1=fig1, fig2=fig2, fig3=fig3, metadata=metadata)
