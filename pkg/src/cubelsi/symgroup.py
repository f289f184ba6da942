"""Functions on the symmetric group and the transposition Dirichlet form.

Permutations are arrays ``pi`` with ``pi[k]`` the image of ``k`` (0-based).
Tables are indexed by Lehmer rank, which coincides with lexicographic order,
so the identity has rank 0. Composition is ``(tau o pi)[k] = tau[pi[k]]``:
the transposition acts on the left, swapping two values of ``pi``.
"""
from dataclasses import dataclass
from functools import lru_cache
import itertools
import math

import numpy as np

from .entropy import ent
from .errors import ArgumentError
from .inequalities import safe_ratio
from .norms import EUCLIDEAN, OrliczGauge, lp_of_magnitudes, luxemburg_norm, vector_norm

MIN_N, MAX_N = 3, 8


def _check_n(n):
    if not isinstance(n, (int, np.integer)) or not MIN_N <= n <= MAX_N:
        raise ArgumentError(f"group degree must be in [{MIN_N}, {MAX_N}], got {n!r}")
    return int(n)


def perm_rank(perm):
    perm = [int(v) for v in perm]
    n = len(perm)
    if sorted(perm) != list(range(n)):
        raise ArgumentError(f"not a permutation of 0..{n - 1}: {perm}")
    rank = 0
    for k in range(n):
        smaller = sum(1 for v in perm[k + 1:] if v < perm[k])
        rank += smaller * math.factorial(n - 1 - k)
    return rank


def perm_unrank(n, rank):
    if not 0 <= rank < math.factorial(n):
        raise ArgumentError(f"rank {rank} out of range for n={n}")
    items = list(range(n))
    out = []
    for k in range(n - 1, -1, -1):
        q, rank = divmod(rank, math.factorial(k))
        out.append(items.pop(q))
    return tuple(out)


@lru_cache(maxsize=None)
def all_perms(n):
    """``(n!, n)`` array of permutations in rank order."""
    arr = np.array(list(itertools.permutations(range(n))), dtype=np.int64)
    arr.flags.writeable = False
    return arr


def ranks_of(perms):
    """Vectorized Lehmer rank of the rows of ``perms``."""
    perms = np.asarray(perms, dtype=np.int64)
    n = perms.shape[1]
    later_smaller = (perms[:, None, :] < perms[:, :, None]) & np.triu(np.ones((n, n), bool), 1)[None]
    code = later_smaller.sum(axis=2)
    fact = np.array([math.factorial(n - 1 - k) for k in range(n)], dtype=np.int64)
    return code @ fact


def transpositions(n):
    return list(itertools.combinations(range(n), 2))


@lru_cache(maxsize=None)
def left_action_table(n):
    """``table[t, r]`` = rank of ``tau_t o pi_r`` for each transposition ``tau_t``."""
    perms = all_perms(n)
    rows = []
    for a, b in transpositions(n):
        swapped = perms.copy()
        swapped[perms == a] = b
        swapped[perms == b] = a
        rows.append(ranks_of(swapped))
    table = np.array(rows)
    table.flags.writeable = False
    return table


def sign(perm):
    perm = list(perm)
    s, seen = 1, [False] * len(perm)
    for k in range(len(perm)):
        if not seen[k]:
            j, length = k, 0
            while not seen[j]:
                seen[j] = True
                j = perm[j]
                length += 1
            if length % 2 == 0:
                s = -s
    return s


@dataclass(frozen=True, eq=False)
class PermFunction:
    """``f: S_n -> R^d`` as an ``(n!, d)`` table in rank order."""

    n: int
    values: np.ndarray

    def __post_init__(self):
        n = _check_n(self.n)
        vals = np.array(self.values, dtype=np.float64)
        if vals.ndim == 1:
            vals = vals[:, None]
        if vals.ndim != 2 or vals.shape[0] != math.factorial(n):
            raise ArgumentError(f"values must have shape ({math.factorial(n)}, d)")
        if not np.all(np.isfinite(vals)):
            raise ArgumentError("function values must be finite")
        vals.flags.writeable = False
        object.__setattr__(self, "n", n)
        object.__setattr__(self, "values", vals)

    @property
    def d(self):
        return self.values.shape[1]

    @classmethod
    def from_callable(cls, n, fn):
        return cls(n, np.vstack([np.atleast_1d(fn(p)) for p in all_perms(_check_n(n))]))

    def right_translate(self, g):
        """``pi -> f(pi o g)``."""
        g = np.asarray(g)
        perms = all_perms(self.n)
        return PermFunction(self.n, self.values[ranks_of(perms[:, g])])


def sign_function(n):
    return PermFunction.from_callable(n, lambda p: float(sign(p)))


def transposition_dirichlet(f, tn=EUCLIDEAN):
    """``sum_tau E_pi ||f(pi) - f(tau o pi)||_E^2`` (no leading constant)."""
    table = left_action_table(f.n)
    vals = f.values
    total = 0.0
    for row in table:
        diff = vals - vals[row]
        mags = np.abs(diff[:, 0]) if f.d == 1 else vector_norm(diff, tn)
        total += float(np.mean(mags ** 2))
    return total


def _centered_mags(f, tn):
    fc = f.values - f.values.mean(axis=0)
    return np.abs(fc[:, 0]) if f.d == 1 else vector_norm(fc, tn)


@dataclass
class SymReport:
    """Same layout as the cube reports; ``id`` is a plain string here."""

    id: str
    lhs: float
    rhs_unit: float
    ratio: float
    params: dict

    def as_dict(self):
        return {"id": self.id, "params": self.params, "lhs": self.lhs,
                "rhs_unit": self.rhs_unit, "ratio": self.ratio}


def evaluate_dsc(f):
    """``Ent(f^2)`` against ``(6 log n / (n - 1)) * Dirichlet``, explicit constant included."""
    if f.d != 1:
        raise ArgumentError("the entropy inequality on S_n is scalar")
    lhs = ent(f.values[:, 0] ** 2)
    rhs = 6.0 * math.log(f.n) / (f.n - 1) * transposition_dirichlet(f)
    scale = float(np.abs(f.values).max()) ** 2
    return SymReport("dsc", float(lhs), float(rhs), safe_ratio(lhs, rhs, scale=scale), {"n": f.n})


def evaluate_kn(f, tn=EUCLIDEAN, m2=1.0):
    """``||f - Ef||_2^2`` against ``(2 m2^2 / (n - 1)) * Dirichlet``."""
    lhs = lp_of_magnitudes(_centered_mags(f, tn), 2.0) ** 2
    rhs = 2.0 * m2 ** 2 / (f.n - 1) * transposition_dirichlet(f, tn)
    scale = float(np.abs(f.values).max()) ** 2
    return SymReport("kn", float(lhs), float(rhs), safe_ratio(lhs, rhs, scale=scale),
                     {"n": f.n, "d": f.d, "m2": m2, "q_target": tn.label})


def evaluate_sym_lsi(f, tn=EUCLIDEAN, tol=1e-12):
    """``||f - Ef||^2_{L_2 log L (E)}`` against ``(log n / (n - 1)) * Dirichlet``; ratio is the empirical constant."""
    lhs = luxemburg_norm(_centered_mags(f, tn), OrliczGauge(2.0, 1.0), tol=tol) ** 2
    rhs = math.log(f.n) / (f.n - 1) * transposition_dirichlet(f, tn)
    scale = float(np.abs(f.values).max()) ** 2
    return SymReport("sym-lsi", float(lhs), float(rhs), safe_ratio(lhs, rhs, scale=scale),
                     {"n": f.n, "d": f.d, "q_target": tn.label})


def transposition_kernel(n, m2=1.0):
    """The pair measure of the Poincare inequality on ``S_n``: weight ``2 m2^2 / ((n-1) n!)`` per ``(pi, tau o pi)``."""
    from .inequalities import DirichletKernel

    table = left_action_table(n)
    size = table.shape[1]
    rows = np.tile(np.arange(size), table.shape[0])
    cols = table.ravel()
    w = np.full(rows.size, 2.0 * m2 ** 2 / ((n - 1) * size))
    return DirichletKernel(np.full(size, 1.0 / size), (rows, cols, w))


def sym_lsi_pipeline_constant(n):
    """Constant implied for the ``S_n`` log-Sobolev ratio by the self-improvement argument.

    Scalar step: the Orlicz/entropy comparison with constant 14, the entropy
    inequality with ``6 log n / (n-1)`` and the Poincare inequality with
    ``2 / (n-1)`` give ``C^2 = 14 max(1, 3 log n)`` relative to the kernel of
    :func:`transposition_kernel`. The boost then yields ``2 (C^2 + 1)`` times the
    kernel energy ``(2 / (n-1)) D``, i.e. ``4 (C^2 + 1) / log n`` times
    ``(log n / (n-1)) D``.
    """
    c2 = 14.0 * max(1.0, 3.0 * math.log(n))
    return 4.0 * (c2 + 1.0) / math.log(n)
