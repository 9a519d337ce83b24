"""depfid: covariance-level dependence-fidelity audit for synthetic data.

The library checks whether a synthetic dataset preserves the dependence
structure of a reference dataset along a three-level hierarchy: marginal
fidelity (per-dimension KS), covariance divergence (Frobenius distance of
covariance/correlation matrices, stability ratio against the leading
eigengap, RV-coefficient, Weyl and Davis-Kahan bounds), and downstream
stability (regression slopes, subspace angles, joint tail probabilities,
kernel two-sample tests). Every sampler and resampler is a pure function
of its seed.
"""

from ._version import __version__
from .diagnostics import (
    DavisKahanBound,
    SlopeComparison,
    StabilityVerdict,
    d_sigma,
    d_sigma_normalized,
    davis_kahan_bound,
    joint_tail_probability,
    pairwise_slopes,
    rv_coefficient,
    slope_instability,
    stability_verdict,
    weyl_deltas,
)
from .errors import (
    DegenerateInput,
    DegenerateVariance,
    DepfidError,
    DomainError,
    EigenNoConverge,
    IndexOutOfRange,
    InsufficientSamples,
    InvalidData,
    InvalidSubspace,
    IoError,
    NotPositiveDefinite,
    ParseError,
    RaggedRows,
    ShapeMismatch,
)
from .kernels import (
    MmdResult,
    copula_mmd,
    copula_mmd_significance,
    median_heuristic_bandwidth,
    mmd_unbiased,
    pseudo_observations,
)
from .linalg import (
    DataMatrix,
    EigenSystem,
    SymMatrix,
    cholesky_factor,
    covariance_to_correlation,
    estimate_covariance,
    frobenius_norm,
    leading_eigengap,
    principal_subspace,
    subspace_sin_theta,
    sym_eigendecompose,
)
from .marginals import KsProfile, KsResult, ks_profile, ks_two_sample
from .report import (
    AuditReport,
    PcaProjection,
    emit_report,
    ingest_csv,
    pca_project,
    report_to_dict,
    run_audit,
)
from .resampling import (
    BootstrapSummary,
    SensitivityResult,
    bootstrap_d_sigma,
    spearman,
    subset_sensitivity,
)
from .scenarios import (
    ClosedForms,
    FittedGaussian,
    ScenarioPair,
    ScenarioSpec,
    eigengap_exact_sin_theta,
    fit_full_gaussian,
    fit_marginal_gaussian,
    make_diagonal_collapse_pair,
    make_eigengap_pair,
    make_sign_flip_pair,
    normal_quantile,
    off_diagonal_norm,
    sample_gaussian_copula,
    sample_mvn,
    sample_t_copula,
    student_t_cdf,
)

__all__ = [name for name in dir() if not name.startswith("_")]
