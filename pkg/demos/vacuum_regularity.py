"""The vacuum is regular: four special solutions span a spin space of signature (2, 2).

The four special packets take the values ``e2, e3, -e0, e1`` at the origin.
Their local correlation matrix therefore has full rank and splits into two
positive and two negative directions.  Taking the range of ``F(x0)`` out of
the family destroys the correlation at that point.
"""

import numpy as np

from cfslab import correlation, holes
from cfslab import packets as pk
from cfslab.regularization import gaussian_cutoff, mollifier_cutoff


def main():
    family = pk.SolutionFamily.from_packets(pk.special_family(1.0))
    x0 = np.zeros(4)
    print("values at x0 (rows: u_up^a, u_down^a, u_up^b, u_down^b)")
    print(np.round(family.values(x0).real, 10))

    for make in (gaussian_cutoff, mollifier_cutoff):
        for eps in (0.01, 0.1):
            rep = correlation.spin_space_report(correlation.correlation_matrix(family, x0, make(eps)))
            print(f"{make.__name__:>17} m eps = {eps:<5} rank {rep.rank}, signature {rep.signature}")

    g = gaussian_cutoff(0.1)
    ortho = pk.orthonormalize_family(family)
    r = holes.hole_at_point(ortho, x0, g)
    print(f"\nremoving range F(x0): ||F(x0)|| {r['norm_before']:.4f} -> {r['norm_after']:.1e}")

    pts = [[0, 0, 0, 0], [0, 1, 0, 0], [0, 0, 1, 0], [1, 0, 0, 0]]
    probe = correlation.injectivity_probe(ortho, pts, g)
    print(f"smallest ||F(x) - F(y)|| over {len(pts)} points: {probe['min_distance']:.3e}")


if __name__ == "__main__":
    main()
