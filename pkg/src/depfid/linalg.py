"""Dense symmetric linear algebra: covariance estimation, Jacobi
eigendecomposition, Cholesky, Frobenius norms, and principal-subspace angles.

The eigensolver is cyclic Jacobi with a fixed tolerance and deterministic
sign/tie conventions, so eigenvector orientation (and everything downstream
that depends on it, such as subspace angles against the identity matrix) is
reproducible across platforms.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import (
    DegenerateVariance,
    EigenNoConverge,
    IndexOutOfRange,
    InsufficientSamples,
    InvalidData,
    InvalidSubspace,
    NotPositiveDefinite,
    ShapeMismatch,
)

JACOBI_TOL = 1e-12
JACOBI_MAX_SWEEPS = 100
CHOLESKY_PIVOT_FLOOR = 1e-14


def _freeze(a: np.ndarray) -> np.ndarray:
    a = np.array(a, dtype=np.float64, copy=True)
    a.setflags(write=False)
    return a


@dataclass(frozen=True)
class DataMatrix:
    """An n x d table of real observations (rows = samples, columns = variables)."""

    values: np.ndarray
    column_names: tuple[str, ...] | None = None

    def __post_init__(self):
        values = np.asarray(self.values, dtype=np.float64)
        if values.ndim != 2:
            raise InvalidData("DataMatrix requires a 2-d array")
        n, d = values.shape
        if n < 2:
            raise InsufficientSamples(f"DataMatrix requires n >= 2, got n={n}")
        if d < 1:
            raise InvalidData("DataMatrix requires d >= 1")
        if not np.all(np.isfinite(values)):
            raise InvalidData("DataMatrix entries must all be finite")
        if self.column_names is not None:
            names = tuple(str(c) for c in self.column_names)
            if len(names) != d:
                raise InvalidData(f"expected {d} column names, got {len(names)}")
            object.__setattr__(self, "column_names", names)
        object.__setattr__(self, "values", _freeze(values))

    @property
    def n(self) -> int:
        return self.values.shape[0]

    @property
    def d(self) -> int:
        return self.values.shape[1]

    def column(self, j: int) -> np.ndarray:
        if not 0 <= j < self.d:
            raise IndexOutOfRange(f"column {j} out of range for d={self.d}")
        return self.values[:, j]


@dataclass(frozen=True)
class SymMatrix:
    """A d x d symmetric matrix tagged as covariance, correlation, or generic."""

    entries: np.ndarray
    kind: str = "generic-symmetric"

    def __post_init__(self):
        a = np.asarray(self.entries, dtype=np.float64)
        if a.ndim != 2 or a.shape[0] != a.shape[1]:
            raise InvalidData("SymMatrix requires a square 2-d array")
        if not np.all(np.isfinite(a)):
            raise InvalidData("SymMatrix entries must all be finite")
        a = 0.5 * (a + a.T)
        if self.kind not in ("covariance", "correlation", "generic-symmetric"):
            raise InvalidData(f"unknown SymMatrix kind {self.kind!r}")
        if self.kind == "correlation":
            if np.max(np.abs(np.diag(a) - 1.0)) > 1e-12:
                raise InvalidData("correlation matrix must have unit diagonal")
            if np.max(np.abs(a)) > 1.0 + 1e-12:
                raise InvalidData("correlation entries must lie in [-1, 1]")
            a = np.clip(a, -1.0, 1.0)
            np.fill_diagonal(a, 1.0)
        elif self.kind == "covariance":
            if np.min(np.diag(a)) < 0.0:
                raise InvalidData("covariance matrix must have a nonnegative diagonal")
        object.__setattr__(self, "entries", _freeze(a))

    @property
    def d(self) -> int:
        return self.entries.shape[0]


@dataclass(frozen=True)
class EigenSystem:
    """Descending eigenvalues with matching orthonormal eigenvector columns."""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray

    def __post_init__(self):
        vals = np.asarray(self.eigenvalues, dtype=np.float64)
        vecs = np.asarray(self.eigenvectors, dtype=np.float64)
        d = vals.shape[0]
        if vecs.shape != (d, d):
            raise ShapeMismatch("eigenvector matrix must be d x d")
        if np.any(np.diff(vals) > 0.0):
            raise InvalidData("eigenvalues must be sorted in descending order")
        gram = vecs.T @ vecs
        if np.max(np.abs(gram - np.eye(d))) > 1e-10:
            raise InvalidSubspace("eigenvector columns must be orthonormal")
        object.__setattr__(self, "eigenvalues", _freeze(vals))
        object.__setattr__(self, "eigenvectors", _freeze(vecs))

    @property
    def d(self) -> int:
        return self.eigenvalues.shape[0]


def estimate_covariance(data: DataMatrix, mode: str = "empirical") -> SymMatrix:
    """Sample covariance (denominator n-1) or its Ledoit-Wolf shrinkage.

    ``ledoit_wolf`` shrinks toward the scaled-identity target
    ``mu * I, mu = trace(S)/d`` with the Ledoit-Wolf (2004) intensity, so the
    result's eigenvalues stay between the smallest and largest empirical
    eigenvalue.
    """
    if mode not in ("empirical", "ledoit_wolf"):
        raise InvalidData(f"unknown covariance mode {mode!r}")
    x = data.values
    n, d = x.shape
    if n < 2:
        raise InsufficientSamples("covariance requires at least 2 rows")
    centered = x - x.mean(axis=0)
    cov = (centered.T @ centered) / (n - 1)
    if mode == "empirical":
        return SymMatrix(cov, kind="covariance")

    # Shrinkage intensity per Ledoit & Wolf (2004), computed on the biased
    # (1/n) scale, then applied to the unbiased estimate.
    s_biased = cov * (n - 1) / n
    mu_b = np.trace(s_biased) / d
    delta_hat = np.sum((s_biased - mu_b * np.eye(d)) ** 2) / d
    if delta_hat <= 0.0:
        shrinkage = 0.0
    else:
        x2 = centered**2
        beta_hat = (np.sum(x2.T @ x2) / n - np.sum(s_biased**2)) / (d * n)
        shrinkage = min(beta_hat, delta_hat) / delta_hat
        shrinkage = float(min(max(shrinkage, 0.0), 1.0))
    mu = np.trace(cov) / d
    shrunk = (1.0 - shrinkage) * cov + shrinkage * mu * np.eye(d)
    return SymMatrix(shrunk, kind="covariance")


def covariance_to_correlation(cov: SymMatrix) -> SymMatrix:
    """Rescale a covariance (or correlation) matrix to unit diagonal."""
    a = cov.entries
    diag = np.diag(a)
    bad = np.flatnonzero(diag <= 0.0)
    if bad.size:
        idx = int(bad[0])
        raise DegenerateVariance(
            f"diagonal entry {idx} is not positive ({diag[idx]!r})", index=idx
        )
    scale = 1.0 / np.sqrt(diag)
    corr = a * np.outer(scale, scale)
    corr = np.clip(corr, -1.0, 1.0)
    np.fill_diagonal(corr, 1.0)
    return SymMatrix(corr, kind="correlation")


def frobenius_norm(a: SymMatrix) -> float:
    """sqrt of the sum of squared entries."""
    return float(np.sqrt(np.sum(a.entries**2)))


def sym_eigendecompose(a: SymMatrix) -> EigenSystem:
    """Cyclic Jacobi eigendecomposition with deterministic conventions.

    Sweeps until every off-diagonal magnitude is at most
    ``1e-12 * ||a||_F`` (or 100 sweeps, raising :class:`EigenNoConverge`).
    Eigenpairs are sorted descending with a stable sort, so exact ties keep
    their original coordinate order; each eigenvector is oriented so its
    largest-magnitude component (lowest index on magnitude ties) is positive.
    """
    d = a.d
    m = np.array(a.entries, dtype=np.float64, copy=True)
    v = np.eye(d)
    if d > 1:
        tol = JACOBI_TOL * float(np.sqrt(np.sum(m**2)))
        converged = False
        for _ in range(JACOBI_MAX_SWEEPS):
            rotated = False
            for p in range(d - 1):
                for q in range(p + 1, d):
                    apq = m[p, q]
                    if abs(apq) <= tol:
                        continue
                    rotated = True
                    theta = (m[q, q] - m[p, p]) / (2.0 * apq)
                    t = np.sign(theta) / (abs(theta) + np.hypot(1.0, theta)) if theta != 0.0 else 1.0
                    c = 1.0 / np.sqrt(1.0 + t * t)
                    s = t * c
                    col_p, col_q = m[:, p].copy(), m[:, q].copy()
                    m[:, p] = c * col_p - s * col_q
                    m[:, q] = s * col_p + c * col_q
                    row_p, row_q = m[p, :].copy(), m[q, :].copy()
                    m[p, :] = c * row_p - s * row_q
                    m[q, :] = s * row_p + c * row_q
                    m[p, q] = 0.0
                    m[q, p] = 0.0
                    vec_p, vec_q = v[:, p].copy(), v[:, q].copy()
                    v[:, p] = c * vec_p - s * vec_q
                    v[:, q] = s * vec_p + c * vec_q
            if not rotated:
                converged = True
                break
        if not converged:
            raise EigenNoConverge(
                f"Jacobi did not converge within {JACOBI_MAX_SWEEPS} sweeps"
            )
    vals = np.diag(m).copy()
    order = np.argsort(-vals, kind="stable")
    vals = vals[order]
    v = v[:, order]
    for k in range(d):
        lead = int(np.argmax(np.abs(v[:, k])))
        if v[lead, k] < 0.0:
            v[:, k] = -v[:, k]
    return EigenSystem(vals, v)


def leading_eigengap(es: EigenSystem, r: int) -> float:
    """Gap ``lambda_r - lambda_{r+1}`` (1-based r); the audit's delta uses r=1."""
    if not 1 <= r < es.d:
        raise IndexOutOfRange(f"eigengap needs 1 <= r < d, got r={r}, d={es.d}")
    return float(es.eigenvalues[r - 1] - es.eigenvalues[r])


def cholesky_factor(a: SymMatrix) -> np.ndarray:
    """Lower-triangular L with L L^T = a, for positive-definite a."""
    d = a.d
    m = a.entries
    lower = np.zeros((d, d))
    for j in range(d):
        s = m[j, j] - np.dot(lower[j, :j], lower[j, :j])
        if s <= CHOLESKY_PIVOT_FLOOR:
            raise NotPositiveDefinite(
                f"pivot {j} is not positive ({s!r})", pivot_index=j
            )
        lower[j, j] = np.sqrt(s)
        if j + 1 < d:
            lower[j + 1 :, j] = (
                m[j + 1 :, j] - lower[j + 1 :, :j] @ lower[j, :j]
            ) / lower[j, j]
    return lower


def principal_subspace(es: EigenSystem, r: int) -> np.ndarray:
    """First r eigenvector columns (d x r, orthonormal)."""
    if not 1 <= r <= es.d:
        raise IndexOutOfRange(f"subspace needs 1 <= r <= d, got r={r}, d={es.d}")
    return es.eigenvectors[:, :r].copy()


def subspace_sin_theta(u: np.ndarray, v: np.ndarray) -> float:
    """Spectral-norm sine of the principal angles between two subspaces.

    Computes the smallest singular value of ``U^T V`` through the
    eigendecomposition of its (small) Gram matrix and returns
    ``sqrt(1 - sigma_min^2)`` clamped into [0, 1].
    """
    u = np.asarray(u, dtype=np.float64)
    v = np.asarray(v, dtype=np.float64)
    if u.ndim == 1:
        u = u[:, None]
    if v.ndim == 1:
        v = v[:, None]
    if u.shape != v.shape:
        raise ShapeMismatch(f"subspace shapes differ: {u.shape} vs {v.shape}")
    r = u.shape[1]
    for name, mat in (("u", u), ("v", v)):
        gram = mat.T @ mat
        if np.max(np.abs(gram - np.eye(r))) > 1e-8:
            raise InvalidSubspace(f"{name} does not have orthonormal columns")
    if np.array_equal(u, v):
        return 0.0
    cross = u.T @ v
    gram = SymMatrix(cross.T @ cross, kind="generic-symmetric")
    eigvals = sym_eigendecompose(gram).eigenvalues
    sigma_min_sq = float(max(eigvals[-1], 0.0))
    return float(np.sqrt(min(max(1.0 - sigma_min_sq, 0.0), 1.0)))
