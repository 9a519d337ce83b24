"""Scalar special functions backing the samplers and p-values.

All functions are vectorized over numpy arrays and deterministic: the same
inputs give bit-identical outputs on any IEEE-754 platform, which is what
lets the sampling streams stay reproducible end to end.
"""

from __future__ import annotations

import math

import numpy as np

from .errors import DomainError

# Wichura-class rational approximation for the standard normal quantile
# (PPND16 coefficient set; absolute error well below 1e-9 over the full
# double range).
_A = (
    3.3871328727963666080e0,
    1.3314166789178437745e2,
    1.9715909503065514427e3,
    1.3731693765509461125e4,
    4.5921953931549871457e4,
    6.7265770927008700853e4,
    3.3430575583588128105e4,
    2.5090809287301226727e3,
)
_B = (
    1.0,
    4.2313330701600911252e1,
    6.8718700749205790830e2,
    5.3941960214247511077e3,
    2.1213794301586595867e4,
    3.9307895800092710610e4,
    2.8729085735721942674e4,
    5.2264952788528545610e3,
)
_C = (
    1.42343711074968357734e0,
    4.63033784615654529590e0,
    5.76949722146069140550e0,
    3.64784832476320460504e0,
    1.27045825245236838258e0,
    2.41780725177450611770e-1,
    2.27238449892691845833e-2,
    7.74545014278341407640e-4,
)
_D = (
    1.0,
    2.05319162663775882187e0,
    1.67638483018380384940e0,
    6.89767334985100004550e-1,
    1.48103976427480074590e-1,
    1.51986665636164571966e-2,
    5.47593808499534494600e-4,
    1.05075007164441684324e-9,
)
_E = (
    6.65790464350110377720e0,
    5.46378491116411436990e0,
    1.78482653991729133580e0,
    2.96560571828504891230e-1,
    2.65321895265761230930e-2,
    1.24266094738807843860e-3,
    2.71155556874348757815e-5,
    2.01033439929228813265e-7,
)
_F = (
    1.0,
    5.99832206555887937690e-1,
    1.36929880922735805310e-1,
    1.48753612908506148525e-2,
    7.86869131145613259100e-4,
    1.84631831751005468180e-5,
    1.42151175831644588870e-7,
    2.04426310338993978564e-15,
)


def _poly(coeffs, r):
    acc = np.full_like(r, coeffs[-1])
    for c in reversed(coeffs[:-1]):
        acc = acc * r + c
    return acc


def normal_quantile(p):
    """Inverse standard normal CDF.

    Accepts a scalar or array with entries strictly inside (0, 1); raises
    :class:`DomainError` otherwise.
    """
    arr = np.asarray(p, dtype=np.float64)
    if arr.size and (np.any(arr <= 0.0) | np.any(arr >= 1.0)):
        raise DomainError("normal_quantile requires 0 < p < 1")
    q = arr - 0.5
    out = np.empty_like(arr)

    central = np.abs(q) <= 0.425
    if np.any(central):
        r = 0.180625 - q[central] ** 2
        out[central] = q[central] * _poly(_A, r) / _poly(_B, r)

    tails = ~central
    if np.any(tails):
        r = np.where(q[tails] < 0.0, arr[tails], 1.0 - arr[tails])
        r = np.sqrt(-np.log(r))
        near = r <= 5.0
        val = np.empty_like(r)
        if np.any(near):
            rn = r[near] - 1.6
            val[near] = _poly(_C, rn) / _poly(_D, rn)
        if np.any(~near):
            rf = r[~near] - 5.0
            val[~near] = _poly(_E, rf) / _poly(_F, rf)
        out[tails] = np.where(q[tails] < 0.0, -val, val)

    return out if out.ndim else float(out)


def _betacf(x: np.ndarray, a: float, b: float, max_iter: int = 300, tol: float = 3e-15) -> np.ndarray:
    """Continued fraction for the incomplete beta (modified Lentz), vectorized in x."""
    tiny = 1e-300
    qab, qap, qam = a + b, a + 1.0, a - 1.0
    c = np.ones_like(x)
    d = 1.0 - qab * x / qap
    d = np.where(np.abs(d) < tiny, tiny, d)
    d = 1.0 / d
    h = d.copy()
    for m in range(1, max_iter + 1):
        m2 = 2 * m
        aa = m * (b - m) * x / ((qam + m2) * (a + m2))
        d = 1.0 + aa * d
        d = np.where(np.abs(d) < tiny, tiny, d)
        c = 1.0 + aa / c
        c = np.where(np.abs(c) < tiny, tiny, c)
        d = 1.0 / d
        h = h * d * c
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2))
        d = 1.0 + aa * d
        d = np.where(np.abs(d) < tiny, tiny, d)
        c = 1.0 + aa / c
        c = np.where(np.abs(c) < tiny, tiny, c)
        d = 1.0 / d
        delta = d * c
        h = h * delta
        if np.all(np.abs(delta - 1.0) < tol):
            break
    return h


def regularized_incomplete_beta(x, a: float, b: float):
    """Regularized incomplete beta I_x(a, b) for fixed positive a, b."""
    arr = np.asarray(x, dtype=np.float64)
    if a <= 0.0 or b <= 0.0:
        raise DomainError("incomplete beta requires a > 0 and b > 0")
    if arr.size and (np.any(arr < 0.0) | np.any(arr > 1.0)):
        raise DomainError("incomplete beta requires 0 <= x <= 1")
    out = np.empty_like(arr)
    ln_beta = math.lgamma(a) + math.lgamma(b) - math.lgamma(a + b)

    lo = arr <= 0.0
    hi = arr >= 1.0
    out[lo] = 0.0
    out[hi] = 1.0
    mid = ~(lo | hi)
    if np.any(mid):
        xm = arr[mid]
        front = np.exp(a * np.log(xm) + b * np.log1p(-xm) - ln_beta)
        direct = xm < (a + 1.0) / (a + b + 2.0)
        vals = np.empty_like(xm)
        if np.any(direct):
            xd = xm[direct]
            vals[direct] = front[direct] * _betacf(xd, a, b) / a
        if np.any(~direct):
            xc = xm[~direct]
            vals[~direct] = 1.0 - front[~direct] * _betacf(1.0 - xc, b, a) / b
        out[mid] = vals
    return out if out.ndim else float(out)


def student_t_cdf(x, nu: float):
    """Student-t CDF via the regularized incomplete beta.

    Uses ``I_{nu/(nu+x^2)}(nu/2, 1/2)`` with continued-fraction evaluation;
    relative error is at the 1e-12 level or better for moderate ``nu``.
    """
    if nu <= 0.0:
        raise DomainError("student_t_cdf requires nu > 0")
    arr = np.asarray(x, dtype=np.float64)
    z = nu / (nu + arr * arr)
    tail = 0.5 * regularized_incomplete_beta(z, 0.5 * nu, 0.5)
    tail = np.asarray(tail, dtype=np.float64)
    out = np.where(arr > 0.0, 1.0 - tail, tail)
    out = np.where(arr == 0.0, 0.5, out)
    return out if out.ndim else float(out)


def kolmogorov_sf(lam: float, max_terms: int = 100) -> float:
    """Survival function of the Kolmogorov distribution, Q(lam) = 2 sum (-1)^{j-1} exp(-2 j^2 lam^2).

    Returns 1.0 when the series does not converge (small lam), matching the
    convention that a tiny KS statistic carries no evidence.
    """
    if lam <= 0.0:
        return 1.0
    a2 = -2.0 * lam * lam
    total = 0.0
    sign = 1.0
    for j in range(1, max_terms + 1):
        term = sign * math.exp(a2 * j * j)
        total += term
        if abs(term) <= 1e-16 * abs(total) or abs(term) <= 1e-300:
            return float(min(max(2.0 * total, 0.0), 1.0))
        sign = -sign
    # No convergence within budget: the statistic is tiny, report p = 1.
    return 1.0
