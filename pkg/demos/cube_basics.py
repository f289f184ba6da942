"""Walsh expansion, the heat semigroup and the Rademacher gradient term on a small cube."""
import math

import numpy as np

from cubelsi import cube
from cubelsi.cube import CubeFunction, walsh_function
from cubelsi.gradients import rademacher_gradient, type_gradient
from cubelsi.norms import TargetNorm


def main():
    n = 6
    rng = np.random.default_rng(0)
    # majority-like function plus a little noise, valued in R^2
    xs = cube.coordinates(n)
    maj = np.sign(xs[:, :3].sum(axis=1))
    f = CubeFunction(n, np.stack([maj, 0.3 * rng.normal(size=1 << n)], axis=1))

    spec = cube.walsh_transform(f)
    deg = cube.popcounts(n)
    for k in range(n + 1):
        w = float(np.sum(spec.coeffs[deg == k] ** 2))
        print(f"degree {k}: spectral weight {w:.4f}")

    # P_t damps degree k by e^{-tk}
    for t in (0.0, 0.5, 2.0):
        g = cube.heat_semigroup(f, t)
        print(f"t={t}: ||P_t f||_2 = {math.sqrt(np.mean(np.sum(g.values ** 2, axis=1))):.4f}")

    for q in (1.0, 2.0, math.inf):
        tn = TargetNorm(q)
        print(f"q={q}: G_2 = {rademacher_gradient(f, 2.0, tn):.4f}, "
              f"type gradient = {type_gradient(f, 2.0, tn):.4f}")

    x1 = walsh_function(n, [1])
    print("dictator G_1:", rademacher_gradient(x1, 1.0))


if __name__ == "__main__":
    main()
