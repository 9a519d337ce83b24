"""Covariance-level and downstream-stability diagnostics.

Everything here is a pure function of covariance matrices or data columns:
the Frobenius divergence and its correlation-matrix form, the stability
ratio against the leading eigengap, Weyl eigenvalue deltas, Davis-Kahan
subspace bounds, the RV-coefficient, simple-regression slope comparisons,
and empirical joint tail probabilities.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import (
    DegenerateInput,
    DegenerateVariance,
    IndexOutOfRange,
    ShapeMismatch,
)
from .linalg import (
    DataMatrix,
    SymMatrix,
    covariance_to_correlation,
    frobenius_norm,
    leading_eigengap,
    sym_eigendecompose,
)

SLOPE_TOLERANCE = 1e-6
VARIANCE_MATCH_RTOL = 0.05


@dataclass(frozen=True)
class StabilityVerdict:
    """Covariance divergence relative to the reference eigengap.

    ``regime`` is ``"stable"`` exactly when ``ratio < 1``; a zero eigengap
    forces ``ratio = inf`` and the unstable regime.
    """

    d_sigma: float
    d_sigma_normalized: float
    eigengap: float
    ratio: float
    regime: str


@dataclass(frozen=True)
class DavisKahanBound:
    """Value of 2 * d_sigma / eigengap with a vacuity flag.

    The bound constrains nothing once it reaches 1 (sines of angles cannot
    exceed 1) or when the eigengap vanishes; those cases carry
    ``vacuous=True`` and callers render them as absent.
    """

    value: float
    vacuous: bool


@dataclass(frozen=True)
class SlopeComparison:
    """Simple-regression slopes of one target column on several predictors."""

    target_index: int
    predictor_indices: tuple[int, ...]
    slopes_ref: tuple[float, ...]
    slopes_syn: tuple[float, ...]
    sign_flips: int
    theorem2_bound: float | None


def _check_same_d(a: SymMatrix, b: SymMatrix) -> None:
    if a.d != b.d:
        raise ShapeMismatch(f"matrix sizes differ: {a.d} vs {b.d}")


def d_sigma(cov_ref: SymMatrix, cov_syn: SymMatrix) -> float:
    """Frobenius distance between two covariance matrices."""
    _check_same_d(cov_ref, cov_syn)
    return float(np.sqrt(np.sum((cov_ref.entries - cov_syn.entries) ** 2)))


def d_sigma_normalized(cov_ref: SymMatrix, cov_syn: SymMatrix) -> float:
    """Frobenius distance between the induced correlation matrices."""
    _check_same_d(cov_ref, cov_syn)
    corr_ref = covariance_to_correlation(cov_ref)
    corr_syn = covariance_to_correlation(cov_syn)
    return d_sigma(corr_ref, corr_syn)


def stability_verdict(cov_ref: SymMatrix, cov_syn: SymMatrix, r: int) -> StabilityVerdict:
    """Assemble divergence, eigengap at r, their ratio, and the regime call.

    The boundary ratio 1.0 classifies as unstable (stability requires the
    ratio to be strictly below one).
    """
    _check_same_d(cov_ref, cov_syn)
    div = d_sigma(cov_ref, cov_syn)
    div_norm = d_sigma_normalized(cov_ref, cov_syn)
    gap = leading_eigengap(sym_eigendecompose(cov_ref), r)
    if gap > 0.0:
        ratio = div / gap
    else:
        ratio = math.inf
    regime = "stable" if ratio < 1.0 else "unstable"
    return StabilityVerdict(
        d_sigma=div,
        d_sigma_normalized=div_norm,
        eigengap=gap,
        ratio=ratio,
        regime=regime,
    )


def weyl_deltas(cov_ref: SymMatrix, cov_syn: SymMatrix) -> np.ndarray:
    """|lambda_k(ref) - lambda_k(syn)| with both spectra sorted descending."""
    _check_same_d(cov_ref, cov_syn)
    ev_ref = sym_eigendecompose(cov_ref).eigenvalues
    ev_syn = sym_eigendecompose(cov_syn).eigenvalues
    return np.abs(ev_ref - ev_syn)


def davis_kahan_bound(d_sigma_value: float, eigengap: float) -> DavisKahanBound:
    """Subspace-angle bound 2 * d_sigma / eigengap with its vacuity flag."""
    if eigengap < 0.0:
        raise DegenerateInput("eigengap must be nonnegative")
    if eigengap == 0.0:
        return DavisKahanBound(value=math.inf, vacuous=True)
    value = 2.0 * d_sigma_value / eigengap
    return DavisKahanBound(value=float(value), vacuous=bool(value >= 1.0))


def rv_coefficient(cov_ref: SymMatrix, cov_syn: SymMatrix) -> float:
    """trace(A B) / (||A||_F ||B||_F); in [0, 1] for PSD inputs."""
    _check_same_d(cov_ref, cov_syn)
    norm_ref = frobenius_norm(cov_ref)
    norm_syn = frobenius_norm(cov_syn)
    if norm_ref == 0.0 or norm_syn == 0.0:
        raise DegenerateInput("rv_coefficient requires nonzero matrices")
    # trace(A @ B) for symmetric A, B equals the elementwise product sum.
    trace_prod = float(np.sum(cov_ref.entries * cov_syn.entries))
    return trace_prod / (norm_ref * norm_syn)


def pairwise_slopes(
    data: DataMatrix, target: int, predictors: Sequence[int]
) -> list[float]:
    """Simple-regression slope of the target on each predictor, centered.

    Slope j is ``Cov(x_target, x_j) / Var(x_j)`` on mean-centered columns.
    """
    if not 0 <= target < data.d:
        raise IndexOutOfRange(f"target column {target} out of range for d={data.d}")
    for j in predictors:
        if not 0 <= j < data.d:
            raise IndexOutOfRange(f"predictor column {j} out of range for d={data.d}")
        if j == target:
            raise IndexOutOfRange(f"target column {target} cannot be its own predictor")
    n = data.n
    x = data.values - data.values.mean(axis=0)
    y = x[:, target]
    slopes = []
    for j in predictors:
        xj = x[:, j]
        var_j = float(np.dot(xj, xj)) / (n - 1)
        if var_j <= 1e-12:
            raise DegenerateVariance(
                f"predictor column {j} has (near-)zero variance", index=j
            )
        slopes.append(float(np.dot(y, xj) / np.dot(xj, xj)))
    return slopes


def slope_instability(
    slopes_ref: Sequence[float],
    slopes_syn: Sequence[float],
    var_x: float,
    d_sigma_value: float,
    *,
    target_index: int = 0,
    predictor_indices: Sequence[int] | None = None,
    var_x_syn: float | None = None,
) -> SlopeComparison:
    """Compare slope lists, count sign flips, and attach the slope bound.

    ``theorem2_bound = d_sigma / (sqrt(2) * var_x)`` equals the observed
    slope change only for covariance-only perturbations with matched
    variances; when ``var_x_syn`` is given and differs from ``var_x`` by
    more than 5% relative, the bound's premise fails and it is reported as
    not applicable (None). A sign flip is counted only when both slopes
    exceed ``SLOPE_TOLERANCE`` in magnitude.
    """
    ref = [float(s) for s in slopes_ref]
    syn = [float(s) for s in slopes_syn]
    if len(ref) != len(syn):
        raise ShapeMismatch(f"slope list lengths differ: {len(ref)} vs {len(syn)}")
    if predictor_indices is None:
        predictor_indices = tuple(range(1, len(ref) + 1))
    else:
        predictor_indices = tuple(int(j) for j in predictor_indices)
        if len(predictor_indices) != len(ref):
            raise ShapeMismatch("predictor_indices length must match the slope lists")
    flips = sum(
        1
        for a, b in zip(ref, syn)
        if a * b < 0.0 and abs(a) > SLOPE_TOLERANCE and abs(b) > SLOPE_TOLERANCE
    )
    bound: float | None
    if var_x_syn is not None and abs(var_x_syn - var_x) > VARIANCE_MATCH_RTOL * abs(var_x):
        bound = None
    else:
        bound = float(d_sigma_value / (math.sqrt(2.0) * var_x))
    return SlopeComparison(
        target_index=int(target_index),
        predictor_indices=predictor_indices,
        slopes_ref=tuple(ref),
        slopes_syn=tuple(syn),
        sign_flips=flips,
        theorem2_bound=bound,
    )


def joint_tail_probability(data: DataMatrix, i: int, j: int, u: float) -> float:
    """Empirical fraction of rows exceeding u in both columns i and j."""
    col_i = data.column(i)
    col_j = data.column(j)
    return float(np.mean((col_i > u) & (col_j > u)))
