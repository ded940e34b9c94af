"""Synthetic separation sampling and goodness-of-fit checks.

Tests the core working hypothesis that twin occurrences behave like
fixed-probability random events in the prime sequence: draws from the
model pmf should be statistically indistinguishable from real separation
spectra.  The pass/fail thresholds (Pearson chi-square at a chosen alpha,
plus a KS distance) are reporting conventions of this toolkit.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import stats as _stats

from .errors import ValidationError
from .model import ModelParams
from .spectrum import SeparationSpectrum

GENERATOR = "philox4x64"  # counter-based; the seed fully determines the stream
DEFAULT_ALPHA = 0.01
POOL_MIN_EXPECTED = 5.0
THRESHOLD_NOTE = "chi-square/KS pass thresholds are conventions of this toolkit"


@dataclass(frozen=True)
class SimConfig:
    params: ModelParams
    n_events: int
    seed: int

    def __post_init__(self):
        if self.n_events < 1:
            raise ValidationError(f"n_events must be >= 1, got {self.n_events}")
        if not 0 <= self.seed < 2**64:
            raise ValidationError("seed must fit in an unsigned 64-bit integer")


@dataclass(frozen=True)
class GofReport:
    chi2: float
    dof: int
    ks_distance: float
    passed: bool
    alpha: float
    chi2_critical: float
    note: str = THRESHOLD_NOTE

    def __post_init__(self):
        if self.chi2 < 0 or not 0.0 <= self.ks_distance <= 1.0:
            raise ValidationError("chi2 must be >= 0 and ks_distance in [0, 1]")


def sample_separations(config: SimConfig) -> np.ndarray:
    """i.i.d. draws from the model pmf, by inverse CDF on the geometric law.

    With a cutoff the pmf is renormalised over the integers 0..floor(l_cut)
    and sampled by mapping uniforms into the truncated CDF range; without
    one the draws are plain geometric.  Identical seeds give identical
    streams.
    """
    p = config.params
    rng = np.random.Generator(np.random.Philox(config.seed))
    u = rng.random(config.n_events)
    lnq = math.log(p.q)
    if p.l_cut is None:
        s = np.floor(np.log1p(-u) / lnq)
    else:
        m = math.floor(p.l_cut)
        u = u * -math.expm1((m + 1) * lnq)  # scale into (0, 1 - q**(m+1))
        s = np.minimum(np.floor(np.log1p(-u) / lnq), m)
    return s.astype(np.int64)


def _support_probabilities(params: ModelParams, s_max: int):
    """Renormalised pmf over 0..s_max plus the tail mass beyond s_max."""
    q = params.q
    s = np.arange(s_max + 1)
    probs = (1.0 - q) * q**s
    if params.l_cut is None:
        tail = q ** (s_max + 1)
    else:
        m = math.floor(params.l_cut)
        norm = -math.expm1((m + 1) * math.log(q))  # 1 - q**(m+1)
        probs = np.where(s <= m, probs / norm, 0.0)
        tail = max(0.0, (q ** (s_max + 1) - q ** (m + 1)) / norm) if s_max < m else 0.0
    return probs, tail


def gof_compare(
    empirical: SeparationSpectrum, params: ModelParams, alpha: float = DEFAULT_ALPHA
) -> GofReport:
    """Pearson chi-square and KS distance of a spectrum against the model.

    Expected counts below POOL_MIN_EXPECTED are pooled upward from the tail
    so the chi-square approximation stays valid; dof is the pooled bin
    count minus one.  Pass means the chi-square statistic stays below the
    critical value at the given alpha.
    """
    total = empirical.total_intervals
    if total < 50:
        raise ValidationError(f"insufficient events: need >= 50 intervals, got {total}")
    if not 0.0 < alpha < 1.0:
        raise ValidationError(f"alpha must be in (0, 1), got {alpha}")

    s_max = empirical.max_separation() or 0
    probs, tail = _support_probabilities(params, s_max)
    observed = np.array([empirical.bins.get(s, 0) for s in range(s_max + 1)] + [0.0])
    expected = np.append(total * probs, total * tail)

    # pool from the tail until every pooled bin has enough expected mass
    pooled: list[tuple[float, float]] = []
    acc_o = acc_e = 0.0
    for o, e in zip(observed[::-1], expected[::-1]):
        acc_o += o
        acc_e += e
        if acc_e >= POOL_MIN_EXPECTED:
            pooled.append((acc_o, acc_e))
            acc_o = acc_e = 0.0
    if acc_o or acc_e:
        if pooled:
            last_o, last_e = pooled[-1]
            pooled[-1] = (last_o + acc_o, last_e + acc_e)
        else:
            pooled.append((acc_o, acc_e))
    pooled.reverse()
    if len(pooled) < 2:
        raise ValidationError("insufficient data: fewer than 2 bins after pooling")

    chi2 = 0.0
    for o, e in pooled:
        if e <= 0.0:
            if o > 0:
                chi2 = math.inf
            continue
        chi2 += (o - e) ** 2 / e
    dof = len(pooled) - 1
    crit = float(_stats.chi2.ppf(1.0 - alpha, dof))

    cum_model = np.cumsum(probs)
    cum_emp = np.cumsum(observed[:-1]) / total
    ks = float(np.max(np.abs(cum_emp - cum_model)))

    return GofReport(
        chi2=float(chi2),
        dof=dof,
        ks_distance=min(1.0, ks),
        passed=bool(chi2 < crit),
        alpha=alpha,
        chi2_critical=crit,
    )
