"""CSV ingestion, PCA projection, audit assembly, and report emission.

The audit wires the individual diagnostics into one record per
(reference, synthetic) pair. JSON output has a stable field order, reals
rendered at 6 significant digits, an infinite stability ratio serialized as
the string "inf", and vacuous Davis-Kahan bounds as null with a
``vacuous: true`` marker.
"""

from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass
from typing import Sequence

from ._version import __version__ as _version
from .diagnostics import (
    DavisKahanBound,
    SlopeComparison,
    StabilityVerdict,
    davis_kahan_bound,
    pairwise_slopes,
    rv_coefficient,
    slope_instability,
    stability_verdict,
)
from .errors import DepfidError, IndexOutOfRange, InsufficientSamples, IoError, ParseError, RaggedRows
from .kernels import MmdResult, copula_mmd, median_heuristic_bandwidth, mmd_unbiased
from .linalg import (
    DataMatrix,
    estimate_covariance,
    leading_eigengap,
    principal_subspace,
    subspace_sin_theta,
    sym_eigendecompose,
)
from .marginals import KsProfile, ks_profile
from .resampling import BootstrapSummary, SensitivityResult, bootstrap_d_sigma, subset_sensitivity
from .rng import derive

import numpy as np

DEFAULT_SUBSPACE_DIMS = (1, 2, 3, 5, 10)
DEFAULT_BOOTSTRAP_B = 500
DEFAULT_SEED = 42


@dataclass(frozen=True)
class DatasetMeta:
    n_ref: int
    n_syn: int
    d: int
    pca_dims: int | None
    variance_explained: float | None


@dataclass(frozen=True)
class SubspaceEntry:
    r: int
    sin_theta: float
    dk_bound: float
    vacuous: bool


@dataclass(frozen=True)
class PcaProjection:
    ref_proj: DataMatrix
    syn_proj: DataMatrix
    variance_explained: float


@dataclass(frozen=True)
class AuditReport:
    """The full diagnostic record for one (reference, synthetic) pair."""

    dataset_meta: DatasetMeta
    verdict: StabilityVerdict
    rv: float
    ks: KsProfile
    subspace: tuple[SubspaceEntry, ...]
    slopes: SlopeComparison
    bootstrap: BootstrapSummary | None
    sensitivity: SensitivityResult | None
    mmd: MmdResult | None
    copula_mmd: MmdResult | None
    seed: int
    tool_version: str


def ingest_csv(path: str, has_header: bool) -> DataMatrix:
    """Parse a comma-separated numeric table (LF or CRLF).

    A flagged header row supplies column names. Rows whose width differs
    from the first data row raise :class:`RaggedRows`; cells that do not
    parse as decimal numbers raise :class:`ParseError`; both carry 1-based
    file-line coordinates.
    """
    try:
        with open(path, "r", encoding="utf-8", newline="") as handle:
            rows = list(csv.reader(handle))
    except OSError as exc:
        raise IoError(f"cannot read {path}: {exc}") from exc
    rows = [row for row in rows if row]  # blank lines carry no cells
    if not rows:
        raise InsufficientSamples(f"{path} contains no rows")
    names: tuple[str, ...] | None = None
    start = 0
    if has_header:
        names = tuple(cell.strip() for cell in rows[0])
        start = 1
    data: list[list[float]] = []
    width: int | None = None
    for line_no, row in enumerate(rows[start:], start=start + 1):
        if width is None:
            width = len(row)
        elif len(row) != width:
            raise RaggedRows(line_no)
        parsed = []
        for col_no, cell in enumerate(row, start=1):
            try:
                parsed.append(float(cell))
            except ValueError:
                raise ParseError(line_no, col_no) from None
        data.append(parsed)
    if not data:
        raise InsufficientSamples(f"{path} contains no data rows")
    return DataMatrix(np.asarray(data), column_names=names)


def pca_project(ref: DataMatrix, syn: DataMatrix, p: int) -> PcaProjection:
    """Project both datasets onto the reference's top-p eigenvectors.

    Both datasets are centered by the REFERENCE column means, so the
    projection is one fixed affine map applied uniformly.
    ``variance_explained`` is the retained share of the reference spectrum.
    """
    if ref.d != syn.d:
        raise IndexOutOfRange(f"column counts differ: {ref.d} vs {syn.d}")
    if not 1 <= p <= ref.d:
        raise IndexOutOfRange(f"pca dims must satisfy 1 <= p <= d, got p={p}")
    mean = ref.values.mean(axis=0)
    es = sym_eigendecompose(estimate_covariance(ref))
    basis = principal_subspace(es, p)
    ref_proj = (ref.values - mean) @ basis
    syn_proj = (syn.values - mean) @ basis
    eigvals = np.maximum(es.eigenvalues, 0.0)
    total = float(np.sum(eigvals))
    explained = float(np.sum(eigvals[:p]) / total) if total > 0.0 else 1.0
    explained = min(max(explained, 0.0), 1.0)
    return PcaProjection(
        ref_proj=DataMatrix(ref_proj),
        syn_proj=DataMatrix(syn_proj),
        variance_explained=explained,
    )


def run_audit(
    ref: DataMatrix,
    syn: DataMatrix,
    *,
    pca_dims: int | None = None,
    subspace_dims: Sequence[int] = DEFAULT_SUBSPACE_DIMS,
    bootstrap_b: int | None = DEFAULT_BOOTSTRAP_B,
    subsets: tuple[int, int] | None = None,
    mmd: bool = False,
    copula_mmd_flag: bool = False,
    slope_target: int = 0,
    slope_predictors: Sequence[int] | None = None,
    seed: int = DEFAULT_SEED,
    cov_mode: str = "empirical",
) -> AuditReport:
    """Assemble every requested diagnostic into an AuditReport.

    The headline verdict uses the r=1 eigengap; each subspace entry carries
    its own local-eigengap Davis-Kahan bound and vacuity flag. ``subsets``
    is a (count, size) pair. Sub-seeds for the bootstrap, subset
    sensitivity, and kernel bandwidths are derived from ``seed`` so the
    whole report is one deterministic function of inputs and flags.
    """
    variance_explained: float | None = None
    if pca_dims is not None:
        projection = pca_project(ref, syn, pca_dims)
        ref, syn = projection.ref_proj, projection.syn_proj
        variance_explained = projection.variance_explained
    if ref.d != syn.d:
        raise IndexOutOfRange(f"column counts differ: {ref.d} vs {syn.d}")

    cov_ref = estimate_covariance(ref, mode=cov_mode)
    cov_syn = estimate_covariance(syn, mode=cov_mode)
    verdict = stability_verdict(cov_ref, cov_syn, 1)
    rv = rv_coefficient(cov_ref, cov_syn)
    ks = ks_profile(ref, syn)

    es_ref = sym_eigendecompose(cov_ref)
    es_syn = sym_eigendecompose(cov_syn)
    dims = sorted({int(r) for r in subspace_dims if 1 <= int(r) < ref.d})
    subspace = []
    for r in dims:
        angle = subspace_sin_theta(
            principal_subspace(es_ref, r), principal_subspace(es_syn, r)
        )
        gap = leading_eigengap(es_ref, r)
        bound: DavisKahanBound = davis_kahan_bound(verdict.d_sigma, gap)
        subspace.append(
            SubspaceEntry(r=r, sin_theta=angle, dk_bound=bound.value, vacuous=bound.vacuous)
        )

    if slope_predictors is None:
        predictors = [j for j in range(1, min(9, ref.d - 1) + 1) if j != slope_target]
    else:
        predictors = [int(j) for j in slope_predictors]
    if not predictors:
        raise IndexOutOfRange("the audit needs at least one predictor column")
    slopes_ref = pairwise_slopes(ref, slope_target, predictors)
    slopes_syn = pairwise_slopes(syn, slope_target, predictors)
    first = predictors[0]
    var_ref = float(np.var(ref.values[:, first], ddof=1))
    var_syn = float(np.var(syn.values[:, first], ddof=1))
    slopes = slope_instability(
        slopes_ref,
        slopes_syn,
        var_ref,
        verdict.d_sigma,
        target_index=slope_target,
        predictor_indices=predictors,
        var_x_syn=var_syn,
    )

    bootstrap = None
    if bootstrap_b:
        bootstrap = bootstrap_d_sigma(ref, syn, bootstrap_b, derive(seed, 1))
    sensitivity = None
    if subsets is not None:
        count, size = subsets
        sensitivity = subset_sensitivity(ref, syn, size, count, derive(seed, 2))
    mmd_result = None
    if mmd:
        pooled = DataMatrix(np.vstack([ref.values, syn.values]))
        bandwidth = median_heuristic_bandwidth(pooled, derive(seed, 3))
        mmd_result = mmd_unbiased(ref, syn, bandwidth)
    copula_result = None
    if copula_mmd_flag:
        copula_result = copula_mmd(ref, syn, derive(seed, 4))

    meta = DatasetMeta(
        n_ref=ref.n,
        n_syn=syn.n,
        d=ref.d,
        pca_dims=pca_dims,
        variance_explained=variance_explained,
    )
    return AuditReport(
        dataset_meta=meta,
        verdict=verdict,
        rv=float(rv),
        ks=ks,
        subspace=tuple(subspace),
        slopes=slopes,
        bootstrap=bootstrap,
        sensitivity=sensitivity,
        mmd=mmd_result,
        copula_mmd=copula_result,
        seed=int(seed),
        tool_version=_version,
    )


def _sig6(x: float | None):
    """Round a real to 6 significant digits for emission; inf becomes 'inf'."""
    if x is None:
        return None
    if math.isinf(x):
        return "inf"
    return float(f"{x:.6g}")


def report_to_dict(report: AuditReport) -> dict:
    """AuditReport as a JSON-ready dict with a stable field order."""
    verdict = report.verdict
    out = {
        "dataset_meta": {
            "n_ref": report.dataset_meta.n_ref,
            "n_syn": report.dataset_meta.n_syn,
            "d": report.dataset_meta.d,
            "pca_dims": report.dataset_meta.pca_dims,
            "variance_explained": _sig6(report.dataset_meta.variance_explained),
        },
        "verdict": {
            "d_sigma": _sig6(verdict.d_sigma),
            "d_sigma_normalized": _sig6(verdict.d_sigma_normalized),
            "eigengap": _sig6(verdict.eigengap),
            "ratio": _sig6(verdict.ratio),
            "regime": verdict.regime,
        },
        "rv": _sig6(report.rv),
        "ks": {
            "median_statistic": _sig6(report.ks.median_statistic),
            "per_dimension": [
                {"statistic": _sig6(r.statistic), "p_value": _sig6(r.p_value)}
                for r in report.ks.per_dimension
            ],
        },
        "subspace": [
            {
                "r": entry.r,
                "sin_theta": _sig6(entry.sin_theta),
                "dk_bound": None if entry.vacuous else _sig6(entry.dk_bound),
                "vacuous": entry.vacuous,
            }
            for entry in report.subspace
        ],
        "slopes": {
            "target_index": report.slopes.target_index,
            "predictor_indices": list(report.slopes.predictor_indices),
            "slopes_ref": [_sig6(s) for s in report.slopes.slopes_ref],
            "slopes_syn": [_sig6(s) for s in report.slopes.slopes_syn],
            "sign_flips": report.slopes.sign_flips,
            "theorem2_bound": _sig6(report.slopes.theorem2_bound),
        },
        "bootstrap": None,
        "sensitivity": None,
        "mmd": None,
        "copula_mmd": None,
        "seed": report.seed,
        "tool_version": report.tool_version,
    }
    if report.bootstrap is not None:
        b = report.bootstrap
        out["bootstrap"] = {
            "observed": _sig6(b.observed),
            "ci_low": _sig6(b.ci_low),
            "ci_high": _sig6(b.ci_high),
            "standard_error": _sig6(b.standard_error),
            "n_resamples": b.n_resamples,
            "seed": b.seed,
        }
    if report.sensitivity is not None:
        s = report.sensitivity
        out["sensitivity"] = {
            "subset_size": s.subset_size,
            "n_subsets": s.n_subsets,
            "d_sigma_values": [_sig6(v) for v in s.d_sigma_values],
            "one_minus_rv_values": [_sig6(v) for v in s.one_minus_rv_values],
            "spearman_r": _sig6(s.spearman_r),
            "spearman_p": _sig6(s.spearman_p),
            "ks_p": _sig6(s.ks_p),
        }
    for key, res in (("mmd", report.mmd), ("copula_mmd", report.copula_mmd)):
        if res is not None:
            out[key] = {
                "mmd_squared_unbiased": _sig6(res.mmd_squared_unbiased),
                "mmd": _sig6(res.mmd),
                "bandwidth": _sig6(res.bandwidth),
                "n_ref": res.n_ref,
                "n_syn": res.n_syn,
            }
    return out


def _md_num(x: float | None, vacuous: bool = False) -> str:
    if vacuous or x is None:
        return "---"
    if math.isinf(x):
        return "inf"
    return f"{x:.6g}"


def emit_report(report: AuditReport, fmt: str = "json") -> str:
    """Serialize an AuditReport as JSON or a Markdown summary."""
    if fmt == "json":
        return json.dumps(report_to_dict(report), indent=2) + "\n"
    if fmt != "markdown":
        raise DepfidError(f"unknown report format {fmt!r}")
    v = report.verdict
    lines = [
        "# Dependence fidelity audit",
        "",
        f"- samples: ref n={report.dataset_meta.n_ref}, syn n={report.dataset_meta.n_syn}, d={report.dataset_meta.d}"
        + (
            f", PCA dims={report.dataset_meta.pca_dims}"
            f" (variance explained {_md_num(report.dataset_meta.variance_explained)})"
            if report.dataset_meta.pca_dims is not None
            else ""
        ),
        f"- seed: {report.seed}, tool version: {report.tool_version}",
        "",
        "| Median KS | D_sigma | D_sigma (normalized) | eigengap | D_sigma/eigengap | Regime | RV | Sign flips |",
        "|---|---|---|---|---|---|---|---|",
        "| {ks} | {ds} | {dsn} | {gap} | {ratio} | {regime} | {rv} | {flips} |".format(
            ks=_md_num(report.ks.median_statistic),
            ds=_md_num(v.d_sigma),
            dsn=_md_num(v.d_sigma_normalized),
            gap=_md_num(v.eigengap),
            ratio=_md_num(v.ratio),
            regime=v.regime,
            rv=_md_num(report.rv),
            flips=report.slopes.sign_flips,
        ),
        "",
        "## Principal subspace angles",
        "",
        "| r | sin_theta | Davis-Kahan bound |",
        "|---|---|---|",
    ]
    for entry in report.subspace:
        lines.append(
            f"| {entry.r} | {_md_num(entry.sin_theta)} | {_md_num(entry.dk_bound, entry.vacuous)} |"
        )
    if report.slopes.theorem2_bound is not None:
        lines += [
            "",
            f"- slope bound (matched variances): {_md_num(report.slopes.theorem2_bound)}",
        ]
    if report.bootstrap is not None:
        b = report.bootstrap
        lines += [
            "",
            f"- bootstrap D_sigma: observed {_md_num(b.observed)}, "
            f"95% CI [{_md_num(b.ci_low)}, {_md_num(b.ci_high)}], SE {_md_num(b.standard_error)} "
            f"(B={b.n_resamples})",
        ]
    if report.sensitivity is not None:
        s = report.sensitivity
        lines += [
            "",
            f"- subset sensitivity ({s.n_subsets} subsets of size {s.subset_size}): "
            f"Spearman r {_md_num(s.spearman_r)} (p {_md_num(s.spearman_p)}), KS p {_md_num(s.ks_p)}",
        ]
    for label, res in (("MMD", report.mmd), ("copula MMD", report.copula_mmd)):
        if res is not None:
            lines += [
                "",
                f"- {label}: {_md_num(res.mmd)} (MMD^2 {_md_num(res.mmd_squared_unbiased)}, "
                f"bandwidth {_md_num(res.bandwidth)})",
            ]
    return "\n".join(lines) + "\n"
