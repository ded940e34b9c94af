"""Separation histograms and the average-separation estimate.

Spectra are mergeable value objects: accumulation is single-writer,
merging enables parallel reduction.  Three conventions for the average
separation s0 are kept first-class because published count tables and
interval-exact bookkeeping disagree by small offsets.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from .errors import ValidationError
from .ioutil import format_metadata, split_metadata
from .sieve import CountRecord


class S0Convention(str, Enum):
    RAW = "raw"                        # (pi1 - 2*pi2) / pi2
    PAPER_OFFSET = "paper_offset"      # (pi1 - 2*pi2 + 2) / (pi2 - 2)
    INTERVAL_EXACT = "interval_exact"  # singletons inside intervals / intervals


@dataclass(frozen=True)
class S0Estimate:
    """Average number of singleton primes per twin interval."""

    value: float
    convention: S0Convention

    def __post_init__(self):
        if not np.isfinite(self.value) or self.value < 0:
            raise ValidationError(f"s0 must be finite and >= 0, got {self.value}")


@dataclass
class SeparationSpectrum:
    """Histogram of separations: bins maps separation -> occurrence count."""

    bins: dict[int, int] = field(default_factory=dict)
    total_intervals: int = 0
    total_singletons: int = 0

    def __post_init__(self):
        if any(s < 0 or c < 0 for s, c in self.bins.items()):
            raise ValidationError("bins must have non-negative keys and counts")
        if self.total_intervals != sum(self.bins.values()):
            raise ValidationError("total_intervals inconsistent with bins")
        if self.total_singletons != sum(s * c for s, c in self.bins.items()):
            raise ValidationError("total_singletons inconsistent with bins")

    def max_separation(self) -> int | None:
        return max(self.bins) if self.bins else None


def accumulate(separations) -> SeparationSpectrum:
    """Histogram a separation sequence."""
    arr = np.asarray(separations)
    if arr.size == 0:
        return SeparationSpectrum()
    if not np.issubdtype(arr.dtype, np.integer):
        if not np.all(arr == np.floor(arr)):
            raise ValidationError("separations must be integers")
        arr = arr.astype(np.int64)
    if int(arr.min()) < 0:
        raise ValidationError("separations must be >= 0")
    vals, cnts = np.unique(arr, return_counts=True)
    bins = {int(s): int(c) for s, c in zip(vals, cnts)}
    return SeparationSpectrum(
        bins=bins,
        total_intervals=int(arr.size),
        total_singletons=int(arr.astype(np.int64).sum()),
    )


def merge(a: SeparationSpectrum, b: SeparationSpectrum) -> SeparationSpectrum:
    """Binwise sum; associative and commutative."""
    bins = dict(a.bins)
    for s, c in b.bins.items():
        bins[s] = bins.get(s, 0) + c
    return SeparationSpectrum(
        bins=bins,
        total_intervals=a.total_intervals + b.total_intervals,
        total_singletons=a.total_singletons + b.total_singletons,
    )


def s0_from_counts(
    record: CountRecord,
    convention: S0Convention | str = S0Convention.RAW,
    spectrum: SeparationSpectrum | None = None,
) -> S0Estimate:
    """Average separation under the chosen convention.

    raw:            (pi1 - 2*pi2) / pi2
    paper_offset:   (pi1 - 2*pi2 + 2) / (pi2 - 2), discounting the primes
                    2 and 3 and the two leading twins
    interval_exact: total_singletons / total_intervals from a spectrum
    """
    conv = S0Convention(convention)
    if conv is S0Convention.INTERVAL_EXACT:
        if spectrum is None:
            raise ValidationError("interval_exact convention requires a spectrum")
        if spectrum.total_intervals <= 0:
            raise ValidationError("insufficient twins: no separation intervals")
        return S0Estimate(spectrum.total_singletons / spectrum.total_intervals, conv)

    if conv is S0Convention.RAW:
        num = record.pi1 - 2 * record.pi2
        den = record.pi2
    else:
        num = record.pi1 - 2 * record.pi2 + 2
        den = record.pi2 - 2
    if den <= 0:
        raise ValidationError(
            f"insufficient twins for {conv.value} convention: pi2={record.pi2}"
        )
    if num < 0:
        raise ValidationError(
            f"inconsistent counts: pi1={record.pi1}, pi2={record.pi2} give negative s0"
        )
    return S0Estimate(num / den, conv)


def write_spectrum_csv(path, spectrum: SeparationSpectrum, metadata=None) -> None:
    """CSV with columns s,count sorted ascending, plus metadata comments."""
    with open(path, "w", newline="") as fh:
        for line in format_metadata(metadata or {}):
            fh.write(line + "\n")
        writer = csv.writer(fh)
        writer.writerow(["s", "count"])
        for s in sorted(spectrum.bins):
            writer.writerow([s, spectrum.bins[s]])


def read_spectrum_csv(path) -> tuple[SeparationSpectrum, dict[str, str]]:
    with open(path, newline="") as fh:
        meta, rows = split_metadata(fh)
    reader = csv.reader(rows)
    header = next(reader, None)
    if header is None or [h.strip() for h in header[:2]] != ["s", "count"]:
        raise ValidationError(f"{path}: expected header 's,count'")
    bins: dict[int, int] = {}
    for row in reader:
        if not row:
            continue
        try:
            s, c = int(row[0]), int(row[1])
        except (IndexError, ValueError) as exc:
            raise ValidationError(f"{path}: bad spectrum row {row!r}") from exc
        if s in bins:
            raise ValidationError(f"{path}: duplicate separation {s}")
        bins[s] = c
    spec = SeparationSpectrum(
        bins=bins,
        total_intervals=sum(bins.values()),
        total_singletons=sum(s * c for s, c in bins.items()),
    )
    return spec, meta
