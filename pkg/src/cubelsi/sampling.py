"""Random test functions on the cube and on S_n.

A mix of families is used so that randomized suites see smooth, sparse,
Boolean and heavy-tailed functions. Every draw is a function of the
generator passed in.
"""
import math

import numpy as np

from .cube import CubeFunction, WalshSpectrum, coordinates, inverse_walsh, popcounts
from .symgroup import PermFunction

KINDS = ("gaussian", "walsh-sparse", "boolean", "heavy", "subcube")


def random_values(rng, n, d=1, kind=None):
    size = 1 << n
    kind = kind or KINDS[int(rng.integers(len(KINDS)))]
    if kind == "gaussian":
        return rng.normal(size=(size, d))
    if kind == "walsh-sparse":
        coeffs = np.zeros((size, d))
        k = popcounts(n)
        terms = int(rng.integers(1, min(6, size) + 1))
        degree_w = np.exp(-0.7 * k.astype(float))
        degree_w /= degree_w.sum()
        for S in rng.choice(size, size=terms, p=degree_w):
            coeffs[S] += rng.normal(size=d)
        return inverse_walsh(WalshSpectrum(n, coeffs)).values.copy()
    if kind == "boolean":
        return rng.choice([-1.0, 1.0], size=(size, d)) if rng.random() < 0.5 else \
            (rng.random((size, d)) < rng.uniform(0.05, 0.5)).astype(float)
    if kind == "heavy":
        return np.exp(2.0 * rng.normal(size=(size, d))) * rng.choice([-1.0, 1.0], size=(size, d))
    if kind == "subcube":
        xs = coordinates(n)
        k = int(rng.integers(1, n + 1))
        ind = np.all(xs[:, :k] == 1, axis=1).astype(float)
        return ind[:, None] * rng.normal(size=d)[None, :] + 0.1 * rng.normal(size=(size, d))
    raise ValueError(f"unknown kind {kind!r}")


def random_function(rng, n, d=1, kind=None):
    return CubeFunction(n, random_values(rng, n, d, kind))


def random_perm_function(rng, n, d=1):
    size = math.factorial(n)
    r = rng.random()
    if r < 0.4:
        vals = rng.normal(size=(size, d))
    elif r < 0.7:
        vals = (rng.random((size, d)) < rng.uniform(0.02, 0.5)).astype(float)
    else:
        vals = np.exp(1.5 * rng.normal(size=(size, d)))
    return PermFunction(n, vals)
