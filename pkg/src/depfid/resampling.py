"""Bootstrap intervals for the covariance divergence, subset sensitivity of
covariance divergence versus 1-RV, and Spearman rank correlation.

Every routine is a pure function of its inputs and a seed: replicate b and
subset k each draw from the dedicated stream (seed, index), so results are
independent of evaluation order and bit-identical across runs.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .diagnostics import d_sigma, rv_coefficient
from .errors import (
    DegenerateInput,
    IndexOutOfRange,
    InsufficientSamples,
    ShapeMismatch,
)
from .linalg import DataMatrix, SymMatrix, estimate_covariance
from .marginals import ks_two_sample
from .rng import Stream
from .special import student_t_cdf


@dataclass(frozen=True)
class BootstrapSummary:
    """Percentile bootstrap of one statistic.

    The observed value is not forced into [ci_low, ci_high]: with few rows
    relative to the dimension the bootstrap overestimates the divergence and
    the interval can sit strictly above the observed value. That bias is
    reported, not corrected.
    """

    observed: float
    ci_low: float
    ci_high: float
    standard_error: float
    n_resamples: int
    seed: int


@dataclass(frozen=True)
class SensitivityResult:
    """Covariance divergence and 1-RV over random column subsets.

    When every subset statistic is zero (identical inputs) the comparison
    degenerates; the rank-correlation and KS fields are then None.
    """

    subset_size: int
    n_subsets: int
    d_sigma_values: tuple[float, ...]
    one_minus_rv_values: tuple[float, ...]
    spearman_r: float | None
    spearman_p: float | None
    ks_p: float | None


def bootstrap_d_sigma(
    ref: DataMatrix, syn: DataMatrix, n_resamples: int, seed: int
) -> BootstrapSummary:
    """Percentile bootstrap CI for the covariance divergence.

    Each replicate b resamples rows with replacement, independently from
    both datasets (original sizes), using stream (seed, b): first the ref
    indices, then the syn indices. The CI is the [2.5%, 97.5%] percentile
    interval with linear interpolation between order statistics.
    """
    if ref.n < 2 or syn.n < 2:
        raise InsufficientSamples("bootstrap requires at least 2 rows per dataset")
    if n_resamples < 1:
        raise DegenerateInput("n_resamples must be at least 1")
    observed = d_sigma(estimate_covariance(ref), estimate_covariance(syn))
    values = np.empty(n_resamples)
    for b in range(n_resamples):
        stream = Stream(seed, b)
        idx_ref = stream.integers(ref.n, ref.n)
        idx_syn = stream.integers(syn.n, syn.n)
        cov_ref = estimate_covariance(DataMatrix(ref.values[idx_ref]))
        cov_syn = estimate_covariance(DataMatrix(syn.values[idx_syn]))
        values[b] = d_sigma(cov_ref, cov_syn)
    ci_low, ci_high = np.percentile(values, [2.5, 97.5])
    se = float(np.std(values, ddof=1)) if n_resamples > 1 else 0.0
    return BootstrapSummary(
        observed=float(observed),
        ci_low=float(ci_low),
        ci_high=float(ci_high),
        standard_error=se,
        n_resamples=int(n_resamples),
        seed=int(seed),
    )


def _ranks(values: np.ndarray) -> np.ndarray:
    _, inverse, counts = np.unique(values, return_inverse=True, return_counts=True)
    starts = np.concatenate([[0], np.cumsum(counts)[:-1]])
    return (starts + (counts + 1) / 2.0)[inverse]


def spearman(a, b) -> tuple[float, float]:
    """Spearman rank correlation with a two-sided t-approximation p-value."""
    xa = np.asarray(a, dtype=np.float64).ravel()
    xb = np.asarray(b, dtype=np.float64).ravel()
    if xa.size != xb.size:
        raise ShapeMismatch(f"lengths differ: {xa.size} vs {xb.size}")
    n = xa.size
    if n < 3:
        raise InsufficientSamples("spearman requires at least 3 pairs")
    if np.all(xa == xa[0]) or np.all(xb == xb[0]):
        raise DegenerateInput("spearman is undefined for constant input")
    ra = _ranks(xa)
    rb = _ranks(xb)
    ra = ra - ra.mean()
    rb = rb - rb.mean()
    denom = math.sqrt(float(np.dot(ra, ra)) * float(np.dot(rb, rb)))
    r = float(np.dot(ra, rb)) / denom
    r = min(max(r, -1.0), 1.0)
    if abs(r) == 1.0:
        return r, 0.0
    t = r * math.sqrt((n - 2) / (1.0 - r * r))
    p = 2.0 * (1.0 - student_t_cdf(abs(t), n - 2))
    return r, float(min(max(p, 0.0), 1.0))


def _restrict(cov: SymMatrix, cols: np.ndarray) -> SymMatrix:
    return SymMatrix(cov.entries[np.ix_(cols, cols)], kind="covariance")


def subset_sensitivity(
    ref: DataMatrix,
    syn: DataMatrix,
    subset_size: int,
    n_subsets: int,
    seed: int,
) -> SensitivityResult:
    """Covariance divergence vs 1-RV over seeded random column subsets.

    Subset k draws ``subset_size`` distinct columns from stream (seed, k);
    both metrics are evaluated on the covariance restriction to those
    columns. The two metric lists are then compared by Spearman correlation
    and a two-sample KS test after each list is z-scored by its own mean
    and standard deviation.
    """
    if ref.d != syn.d:
        raise ShapeMismatch(f"column counts differ: {ref.d} vs {syn.d}")
    if subset_size > ref.d:
        raise IndexOutOfRange(
            f"subset_size {subset_size} exceeds the {ref.d} available columns"
        )
    if subset_size < 1:
        raise DegenerateInput("subset_size must be at least 1")
    if n_subsets < 3:
        raise InsufficientSamples("subset sensitivity requires n_subsets >= 3")
    cov_ref = estimate_covariance(ref)
    cov_syn = estimate_covariance(syn)
    div_values = np.empty(n_subsets)
    rv_values = np.empty(n_subsets)
    for k in range(n_subsets):
        cols = Stream(seed, k).choose_distinct(ref.d, subset_size)
        sub_ref = _restrict(cov_ref, cols)
        sub_syn = _restrict(cov_syn, cols)
        div_values[k] = d_sigma(sub_ref, sub_syn)
        rv_values[k] = 1.0 - rv_coefficient(sub_ref, sub_syn)

    spearman_r: float | None
    spearman_p: float | None
    ks_p: float | None
    sd_div = float(np.std(div_values))
    sd_rv = float(np.std(rv_values))
    if sd_div == 0.0 or sd_rv == 0.0:
        # Identical inputs (or a constant metric) leave nothing to correlate.
        spearman_r = spearman_p = ks_p = None
    else:
        spearman_r, spearman_p = spearman(div_values, rv_values)
        z_div = (div_values - div_values.mean()) / sd_div
        z_rv = (rv_values - rv_values.mean()) / sd_rv
        ks_p = ks_two_sample(z_div, z_rv).p_value
    return SensitivityResult(
        subset_size=int(subset_size),
        n_subsets=int(n_subsets),
        d_sigma_values=tuple(float(v) for v in div_values),
        one_minus_rv_values=tuple(float(v) for v in rv_values),
        spearman_r=spearman_r,
        spearman_p=spearman_p,
        ks_p=ks_p,
    )
