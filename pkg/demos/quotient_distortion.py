"""Lower bounds on the distortion of cube quotients.

Compares the plain L_p bound with the L_p(log L)^{p/2} bound for a few
families of identifications. The printed numbers omit the universal constant.
"""
import numpy as np

from cubelsi import quotient as qt


def show(name, rel):
    b0 = qt.distortion_lower_bound(rel, 1.0, alpha=0.0)
    b1 = qt.distortion_lower_bound(rel, 1.0)
    print(f"{name:22s} classes={rel.m:3d}  L_1: {b0.bound_without_c:.4f}  "
          f"L_1(log L)^1/2: {b1.bound_without_c:.4f}")


def main():
    n = 6
    show("diagonal", qt.diagonal_relation(n))
    show("antipodal", qt.antipodal_relation(n))
    show("coords {1,2}", qt.coordinate_quotient(n, [1, 2]))
    rng = np.random.default_rng(3)
    for k in range(3):
        show(f"random #{k}", qt.random_relation(rng, n, pairs=12))
    # the small example: (1,1) ~ (-1,-1) on the square
    rel = qt.relation_from_pairs(2, [(0, 3)])
    print(qt.quotient_metric(rel).distances)


if __name__ == "__main__":
    main()
