"""Marginal diagnostics cannot see a correlation sign flip.

Two bivariate normal populations share exactly the same N(0, 1) marginals
but carry opposite correlation. Per-column KS distances shrink toward zero
as the sample grows, while the covariance divergence stays at its
closed-form value and the regression slope reverses sign.
"""

import numpy as np

from depfid import (
    d_sigma,
    estimate_covariance,
    ks_profile,
    make_sign_flip_pair,
    pairwise_slopes,
)

RHO = 0.6

print(f"sign-flip pair, rho = {RHO}")
print(f"population covariance divergence: {2 * np.sqrt(2) * RHO:.6f}")
print()
print(f"{'n':>8} {'median KS':>10} {'sample div':>11} {'slope ref':>10} {'slope syn':>10}")
for n in (1_000, 10_000, 100_000):
    pair = make_sign_flip_pair(RHO, 1.0, n, seed=42)
    ks = ks_profile(pair.samples_ref, pair.samples_syn).median_statistic
    div = d_sigma(
        estimate_covariance(pair.samples_ref), estimate_covariance(pair.samples_syn)
    )
    slope_ref = pairwise_slopes(pair.samples_ref, 0, [1])[0]
    slope_syn = pairwise_slopes(pair.samples_syn, 0, [1])[0]
    print(f"{n:>8} {ks:>10.4f} {div:>11.4f} {slope_ref:>10.4f} {slope_syn:>10.4f}")

print()
print("KS vanishes with n; the divergence and the slope reversal do not.")
