"""Diagonal of the doubly regularized kernel and its two eigenvalues.

At coinciding points the kernel reduces to two cutoff norms, so the
quadrature can be compared against a closed form.  As the regularization
length shrinks the eigenvalues grow like ``eps^-3`` and ``lambda_-`` stays
negative.
"""

import numpy as np

from cfslab import kernels
from cfslab.regularization import cutoff_l1_norms, gaussian_cutoff, sharp_cutoff, sharp_norms_closed_form


def main():
    print("sharp cutoff: quadrature against closed-form norms")
    print(f"{'m eps':>8} {'rel. error':>12} {'lambda+':>14} {'lambda-':>14}")
    for eps in (1.0, 0.3, 0.1, 0.03):
        g = sharp_cutoff(eps)
        num = np.array(cutoff_l1_norms(g))
        exact = np.array(sharp_norms_closed_form(eps))
        lp, lm = kernels.diagonal_spectrum(g)
        print(f"{eps:8.2f} {np.max(np.abs(num - exact) / exact):12.2e} {lp:14.6g} {lm:14.6g}")

    g = gaussian_cutoff(0.2)
    K = kernels.kernel(np.zeros(4), g, -1).value
    closed = kernels.diagonal_closed_form(g, -1)
    print("\ngaussian cutoff m eps = 0.2")
    print("  diagonal from the radial integrals:", np.round(np.diag(K).real, 8))
    print("  closed form:                       ", np.round(np.diag(closed).real, 8))

    print("\noff the diagonal the kernel decays with spatial distance")
    for r in (0.0, 0.5, 1.0, 2.0, 4.0):
        K = kernels.kernel([0, r, 0, 0], g, -1).value
        print(f"  |xi| = {r:3.1f}  ||P(xi)||_2 = {np.linalg.norm(K, 2):.4e}")


if __name__ == "__main__":
    main()
