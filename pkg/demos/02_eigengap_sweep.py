"""Principal-subspace rotation under a controlled covariance perturbation.

The reference covariance diag(3, 1) has eigengap 2. Perturbing the
off-diagonal by eps rotates the leading eigenvector; the subspace-angle
bound 2 * d_sigma / gap = sqrt(2) * eps tracks the exact angle closely in
the stable regime and goes vacuous past eps = sqrt(2).
"""

import numpy as np

from depfid import (
    SymMatrix,
    davis_kahan_bound,
    eigengap_exact_sin_theta,
    principal_subspace,
    stability_verdict,
    subspace_sin_theta,
    sym_eigendecompose,
)

ref = SymMatrix(np.diag([3.0, 1.0]), kind="covariance")
u_ref = principal_subspace(sym_eigendecompose(ref), 1)

print(f"{'eps':>5} {'d_sigma':>8} {'exact sin':>10} {'bound':>8} {'regime':>9}")
for eps in np.arange(0.0, 1.71, 0.1):
    syn = SymMatrix([[3.0, eps], [eps, 1.0]], kind="covariance")
    verdict = stability_verdict(ref, syn, 1)
    angle = subspace_sin_theta(
        u_ref, principal_subspace(sym_eigendecompose(syn), 1)
    )
    bound = davis_kahan_bound(verdict.d_sigma, verdict.eigengap)
    bound_txt = "---" if bound.vacuous else f"{bound.value:.4f}"
    print(
        f"{eps:>5.2f} {verdict.d_sigma:>8.4f} {angle:>10.4f} {bound_txt:>8} "
        f"{verdict.regime:>9}"
    )
    assert abs(angle - eigengap_exact_sin_theta(float(eps))) < 1e-10

print()
print("The bound is nearly tight while informative; the regime flips at eps = sqrt(2).")
