"""Transposition Dirichlet forms on S_n and the three inequalities evaluated on them."""
import numpy as np

from cubelsi.sampling import random_perm_function
from cubelsi.symgroup import (evaluate_dsc, evaluate_kn, evaluate_sym_lsi, sign_function,
                              sym_lsi_pipeline_constant, transposition_dirichlet)


def main():
    print("Dirichlet form of sign on S_3:", transposition_dirichlet(sign_function(3)))
    rng = np.random.default_rng(1)
    for n in (3, 4, 5, 6):
        fs = [random_perm_function(rng, n) for _ in range(50)]
        dsc = max(evaluate_dsc(f).ratio for f in fs)
        kn = max(evaluate_kn(f).ratio for f in fs)
        lsi = max(evaluate_sym_lsi(f).ratio for f in fs)
        print(f"n={n}: entropy {dsc:.3f}  poincare {kn:.3f}  "
              f"log-sobolev {lsi:.3f} (implied bound {sym_lsi_pipeline_constant(n):.1f})")


if __name__ == "__main__":
    main()
