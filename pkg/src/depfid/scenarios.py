"""Deterministic samplers and population objects for the closed-form
synthetic constructions: sign-flip pairs, the eigengap perturbation family,
Gaussian and t copulas with standard-normal marginals, diagonal-collapse
pairs, and the two Gaussian baseline fitters.

All samplers are pure functions of (parameters, seed). Normal variates come
from the inverse CDF of the stream's uniforms and the chi-square draw uses
Marsaglia-Tsang gamma sampling on the same stream discipline, so every
dataset here is bit-reproducible.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError, InsufficientSamples, NotPositiveDefinite
from .linalg import DataMatrix, SymMatrix, cholesky_factor
from .rng import Stream, derive
from .special import normal_quantile, student_t_cdf

__all__ = [
    "ScenarioSpec",
    "ScenarioPair",
    "ClosedForms",
    "FittedGaussian",
    "normal_quantile",
    "student_t_cdf",
    "sample_mvn",
    "make_sign_flip_pair",
    "make_eigengap_pair",
    "sample_gaussian_copula",
    "sample_t_copula",
    "make_diagonal_collapse_pair",
    "off_diagonal_norm",
    "fit_marginal_gaussian",
    "fit_full_gaussian",
]

SCENARIO_KINDS = (
    "sign_flip",
    "eigengap",
    "gaussian_copula",
    "t_copula",
    "diagonal_collapse",
)


@dataclass(frozen=True)
class ScenarioSpec:
    """Parameters of one synthetic construction."""

    kind: str
    rho: float = 0.0
    sigma2: float = 1.0
    epsilon: float = 0.0
    nu: float = 4.0
    n: int = 1000
    seed: int = 42
    d: int = 2

    def __post_init__(self):
        if self.kind not in SCENARIO_KINDS:
            raise DomainError(f"unknown scenario kind {self.kind!r}")
        if not abs(self.rho) < 1.0:
            raise DomainError("rho must satisfy |rho| < 1")
        if self.sigma2 <= 0.0:
            raise DomainError("sigma2 must be positive")
        if self.epsilon < 0.0:
            raise DomainError("epsilon must be nonnegative")
        if self.kind == "t_copula" and not self.nu > 2.0:
            raise DomainError("t_copula requires nu > 2 (finite second moments)")
        if self.n < 2:
            raise InsufficientSamples("scenario sample count must be at least 2")
        if self.d < 2:
            raise DomainError("scenario dimension must be at least 2")


@dataclass(frozen=True)
class ClosedForms:
    """Population-level values known in closed form for a scenario pair."""

    d_sigma: float | None
    beta_ref: float | None
    beta_syn: float | None
    exact_sin_theta: float | None


@dataclass(frozen=True)
class ScenarioPair:
    """Population covariances plus matched samples for one construction."""

    population_cov_ref: SymMatrix
    population_cov_syn: SymMatrix
    samples_ref: DataMatrix
    samples_syn: DataMatrix
    closed_forms: ClosedForms


def sample_mvn(mean, cov: SymMatrix, n: int, seed: int) -> DataMatrix:
    """n rows of N(mean, cov) via ``mean + L z`` with L the Cholesky factor.

    Consumes n*d uniforms from stream (seed, 0), row-major, turned into
    normals by the inverse CDF.
    """
    mean = np.asarray(mean, dtype=np.float64).ravel()
    d = cov.d
    if mean.shape[0] != d:
        raise DomainError(f"mean has length {mean.shape[0]}, covariance is {d}x{d}")
    lower = cholesky_factor(cov)
    z = Stream(seed, 0).normals(n * d).reshape(n, d)
    return DataMatrix(mean + z @ lower.T)


def _gamma_marsaglia_tsang(stream: Stream, alpha: float, n: int) -> np.ndarray:
    """Gamma(alpha, 1) variates; the alpha < 1 case boosts from alpha + 1."""
    boost = None
    a = float(alpha)
    if a < 1.0:
        boost = stream.uniforms(n)
        a += 1.0
    d = a - 1.0 / 3.0
    c = 1.0 / math.sqrt(9.0 * d)
    out = np.empty(n)
    pending = np.arange(n)
    while pending.size:
        x = stream.normals(pending.size)
        u = stream.uniforms(pending.size)
        v = (1.0 + c * x) ** 3
        positive = v > 0.0
        log_v = np.log(np.where(positive, v, 1.0))
        accept = positive & (np.log(u) < 0.5 * x * x + d - d * v + d * log_v)
        out[pending[accept]] = d * v[accept]
        pending = pending[~accept]
    if boost is not None:
        out *= boost ** (1.0 / alpha)
    return out


def _chi_square(stream: Stream, nu: float, n: int) -> np.ndarray:
    return 2.0 * _gamma_marsaglia_tsang(stream, nu / 2.0, n)


def _correlation_cov(rho: float, sigma2: float = 1.0) -> SymMatrix:
    return SymMatrix(sigma2 * np.array([[1.0, rho], [rho, 1.0]]), kind="covariance")


def _embed(cov2: SymMatrix, d: int) -> SymMatrix:
    """Place a 2x2 block in the top-left corner of a d x d identity-padded matrix."""
    if d == 2:
        return cov2
    big = np.eye(d)
    big[:2, :2] = cov2.entries
    return SymMatrix(big, kind="covariance")


def make_sign_flip_pair(
    rho: float, sigma2: float, n: int, seed: int, d: int = 2
) -> ScenarioPair:
    """Bivariate normal pair differing only in the correlation sign.

    Population covariances sigma2*[[1, rho], [rho, 1]] and its negated-rho
    twin; for d > 2 the pair is padded with independent unit-variance
    coordinates, which leaves the divergence unchanged. Closed forms:
    d_sigma = 2*sqrt(2)*sigma2*|rho|, slopes (rho, -rho).
    """
    spec = ScenarioSpec(kind="sign_flip", rho=rho, sigma2=sigma2, n=n, seed=seed, d=d)
    cov_ref = _embed(_correlation_cov(spec.rho, spec.sigma2), d)
    cov_syn = _embed(_correlation_cov(-spec.rho, spec.sigma2), d)
    forms = ClosedForms(
        d_sigma=2.0 * math.sqrt(2.0) * spec.sigma2 * abs(spec.rho),
        beta_ref=spec.rho,
        beta_syn=-spec.rho,
        exact_sin_theta=None,
    )
    return ScenarioPair(
        population_cov_ref=cov_ref,
        population_cov_syn=cov_syn,
        samples_ref=sample_mvn(np.zeros(d), cov_ref, n, derive(seed, 1)),
        samples_syn=sample_mvn(np.zeros(d), cov_syn, n, derive(seed, 2)),
        closed_forms=forms,
    )


def eigengap_exact_sin_theta(epsilon: float) -> float:
    """Closed-form sine of the leading-eigenvector angle for the eigengap family."""
    eps = abs(epsilon)
    return eps / math.sqrt((1.0 + math.sqrt(1.0 + eps * eps)) ** 2 + eps * eps)


def make_eigengap_pair(epsilon: float, n: int, seed: int) -> ScenarioPair:
    """Perturbation-family pair diag(3, 1) vs [[3, eps], [eps, 1]].

    Positive definiteness requires eps^2 < 3. Closed forms:
    d_sigma = sqrt(2)*eps and the exact leading-eigenvector angle
    eps / sqrt((1 + sqrt(1 + eps^2))^2 + eps^2).
    """
    spec = ScenarioSpec(kind="eigengap", epsilon=epsilon, n=n, seed=seed)
    if spec.epsilon**2 >= 3.0:
        raise NotPositiveDefinite(
            f"eigengap covariance needs epsilon^2 < 3, got epsilon={epsilon}"
        )
    cov_ref = SymMatrix(np.diag([3.0, 1.0]), kind="covariance")
    cov_syn = SymMatrix(
        np.array([[3.0, spec.epsilon], [spec.epsilon, 1.0]]), kind="covariance"
    )
    forms = ClosedForms(
        d_sigma=math.sqrt(2.0) * spec.epsilon,
        beta_ref=None,
        beta_syn=None,
        exact_sin_theta=eigengap_exact_sin_theta(spec.epsilon),
    )
    return ScenarioPair(
        population_cov_ref=cov_ref,
        population_cov_syn=cov_syn,
        samples_ref=sample_mvn(np.zeros(2), cov_ref, n, derive(seed, 1)),
        samples_syn=sample_mvn(np.zeros(2), cov_syn, n, derive(seed, 2)),
        closed_forms=forms,
    )


def sample_gaussian_copula(rho: float, n: int, seed: int) -> DataMatrix:
    """Bivariate normal with unit variances and correlation rho.

    The marginals are exactly N(0, 1) by construction; all dependence sits
    in the correlation parameter.
    """
    spec = ScenarioSpec(kind="gaussian_copula", rho=rho, n=n, seed=seed)
    return sample_mvn(np.zeros(2), _correlation_cov(spec.rho), n, seed)


def sample_t_copula(rho: float, nu: float, n: int, seed: int) -> DataMatrix:
    """t-copula dependence pushed to standard-normal marginals.

    Draws Z bivariate normal (stream (seed, 1)) and W = chi2_nu / nu
    (stream (seed, 2)), forms T = Z / sqrt(W), then maps each coordinate
    through the t CDF and the normal quantile. The output has exactly
    standard-normal marginals and the t-copula's tail dependence.
    """
    spec = ScenarioSpec(kind="t_copula", rho=rho, nu=nu, n=n, seed=seed)
    z = sample_mvn(np.zeros(2), _correlation_cov(spec.rho), n, derive(seed, 1)).values
    w = _chi_square(Stream(seed, 2), spec.nu, n) / spec.nu
    t = z / np.sqrt(w)[:, None]
    u = student_t_cdf(t, spec.nu)
    return DataMatrix(normal_quantile(u))


def make_diagonal_collapse_pair(rho: float, n: int, seed: int) -> ScenarioPair:
    """Correlated pair [[1, rho], [rho, 1]] vs the identity.

    Models a generator that keeps marginals but zeroes covariance. Closed
    forms: d_sigma = sqrt(2)|rho|, slopes (rho, 0), and leading-eigenvector
    angle 1/sqrt(2) under the deterministic tie-break (the identity's
    leading eigenvector is e1); rho = 0 gives angle 0 since the populations
    coincide.
    """
    spec = ScenarioSpec(kind="diagonal_collapse", rho=rho, n=n, seed=seed)
    cov_ref = _correlation_cov(spec.rho)
    cov_syn = SymMatrix(np.eye(2), kind="covariance")
    forms = ClosedForms(
        d_sigma=math.sqrt(2.0) * abs(spec.rho),
        beta_ref=spec.rho,
        beta_syn=0.0,
        exact_sin_theta=0.0 if spec.rho == 0.0 else 1.0 / math.sqrt(2.0),
    )
    return ScenarioPair(
        population_cov_ref=cov_ref,
        population_cov_syn=cov_syn,
        samples_ref=sample_mvn(np.zeros(2), cov_ref, n, derive(seed, 1)),
        samples_syn=sample_mvn(np.zeros(2), cov_syn, n, derive(seed, 2)),
        closed_forms=forms,
    )


def off_diagonal_norm(cov: SymMatrix) -> float:
    """Frobenius norm of the strictly off-diagonal part.

    This is the floor on the covariance divergence of any generator that
    outputs a diagonal covariance.
    """
    a = cov.entries.copy()
    np.fill_diagonal(a, 0.0)
    return float(np.sqrt(np.sum(a**2)))


@dataclass(frozen=True)
class FittedGaussian:
    """Mean vector and covariance of a fitted Gaussian baseline."""

    mean: np.ndarray
    cov: SymMatrix


def fit_marginal_gaussian(data: DataMatrix) -> FittedGaussian:
    """Column means plus a diagonal covariance: the structure-discarding baseline."""
    if data.n < 2:
        raise InsufficientSamples("fitting requires at least 2 rows")
    mean = data.values.mean(axis=0)
    variances = data.values.var(axis=0, ddof=1)
    return FittedGaussian(mean=mean, cov=SymMatrix(np.diag(variances), kind="covariance"))


def fit_full_gaussian(data: DataMatrix) -> FittedGaussian:
    """Empirical mean and full covariance: the structure-preserving baseline."""
    if data.n < 2:
        raise InsufficientSamples("fitting requires at least 2 rows")
    mean = data.values.mean(axis=0)
    centered = data.values - mean
    cov = (centered.T @ centered) / (data.n - 1)
    return FittedGaussian(mean=mean, cov=SymMatrix(cov, kind="covariance"))
