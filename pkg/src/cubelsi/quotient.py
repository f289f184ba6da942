"""Equivalence relations on the cube, quotient metrics and distortion lower bounds.

The cube carries the metric ``rho(x, y) = ||x - y||_1``, so neighbouring
points are at distance 2.
"""
from dataclasses import dataclass

import numpy as np

from .cube import CubeFunction, MAX_N_QUADRATIC, _check_n, hamming_l1
from .errors import ArgumentError, CapabilityError
from .norms import OrliczGauge, luxemburg_norm, orlicz_norm

#: largest n for which the product space is realized as a cube on 2n variables
MAX_N_PRODUCT = MAX_N_QUADRATIC // 2


class UnionFind:
    def __init__(self, size):
        self.parent = list(range(size))
        self.rank = [0] * size

    def find(self, k):
        root = k
        while self.parent[root] != root:
            root = self.parent[root]
        while self.parent[k] != root:
            self.parent[k], k = root, self.parent[k]
        return root

    def union(self, a, b):
        ra, rb = self.find(a), self.find(b)
        if ra == rb:
            return ra
        if self.rank[ra] < self.rank[rb]:
            ra, rb = rb, ra
        self.parent[rb] = ra
        if self.rank[ra] == self.rank[rb]:
            self.rank[ra] += 1
        return ra


@dataclass(frozen=True, eq=False)
class EquivalenceRelation:
    """``class_of[u]`` is the class id of cube point ``u``; ids are ``0..m-1``."""

    n: int
    class_of: np.ndarray

    def __post_init__(self):
        n = _check_n(self.n)
        c = np.asarray(self.class_of, dtype=np.int64)
        if c.shape != (1 << n,):
            raise ArgumentError("class_of must list one class per cube point")
        m = int(c.max()) + 1
        if c.min() < 0 or np.unique(c).size != m:
            raise ArgumentError("class ids must be contiguous 0..m-1")
        c.flags.writeable = False
        object.__setattr__(self, "class_of", c)

    @property
    def m(self):
        return int(self.class_of.max()) + 1

    def classes(self):
        return [np.flatnonzero(self.class_of == a) for a in range(self.m)]

    def related(self, u, v):
        return self.class_of[u] == self.class_of[v]


def relation_from_pairs(n, pairs=()):
    """Smallest equivalence relation containing ``pairs`` (point-index pairs)."""
    n = _check_n(n)
    size = 1 << n
    uf = UnionFind(size)
    for u, v in pairs:
        if not (0 <= u < size and 0 <= v < size):
            raise ArgumentError(f"pair ({u}, {v}) out of range for n={n}")
        uf.union(int(u), int(v))
    roots = [uf.find(u) for u in range(size)]
    # number classes by first appearance
    ids = {}
    class_of = np.array([ids.setdefault(r, len(ids)) for r in roots], dtype=np.int64)
    return EquivalenceRelation(n, class_of)


def diagonal_relation(n):
    return relation_from_pairs(n, ())


def antipodal_relation(n):
    """Identify ``x`` with ``-x``."""
    full = (1 << n) - 1
    return relation_from_pairs(n, [(u, u ^ full) for u in range(1 << n)])


def coordinate_quotient(n, directions):
    """Identify points that differ only in the given (1-based) directions."""
    pairs = []
    for i in directions:
        if not 1 <= i <= n:
            raise ArgumentError(f"direction {i} out of range")
        pairs.extend((u, u ^ (1 << (i - 1))) for u in range(1 << n))
    return relation_from_pairs(n, pairs)


def single_class_relation(n):
    return EquivalenceRelation(n, np.zeros(1 << n, dtype=np.int64))


def random_relation(rng, n, pairs=None):
    """Closure of a random set of pairs (between 0 and ``2^n`` pairs by default)."""
    size = 1 << n
    k = int(rng.integers(0, size + 1)) if pairs is None else pairs
    return relation_from_pairs(n, rng.integers(0, size, size=(k, 2)).tolist())


@dataclass(frozen=True, eq=False)
class QuotientMetric:
    distances: np.ndarray

    def __call__(self, a, b):
        return self.distances[a, b]

    def check_axioms(self, atol=0.0):
        D = self.distances
        symmetric = np.array_equal(D, D.T)
        zero_diag = not np.any(np.diag(D))
        nonneg = bool(np.all(D >= 0))
        triangle = bool(np.all(D[:, None, :] <= D[:, :, None] + D[None, :, :] + atol))
        return symmetric and zero_diag and nonneg and triangle


def class_graph(rel):
    """Edge weights ``w(a, b) = min{rho(x, y) : x in a, y in b}`` of the class graph."""
    size = 1 << rel.n
    u = np.arange(size)
    m = rel.m
    W = np.full((m, m), np.inf)
    c = rel.class_of
    order = np.argsort(c, kind="stable")
    starts = np.searchsorted(c[order], np.arange(m))
    for start in range(0, size, 1024):
        rows = u[start:start + 1024]
        dist = hamming_l1(rows[:, None], order[None, :]).astype(float)
        # min over target points within each class, then over source points
        per_class = np.minimum.reduceat(dist, starts, axis=1)
        np.minimum.at(W, c[rows], per_class)
    return W


def quotient_metric(rel):
    """All-pairs shortest paths over the class graph (Floyd-Warshall relaxation)."""
    D = class_graph(rel)
    np.fill_diagonal(D, 0.0)
    for k in range(rel.m):
        np.minimum(D, D[:, k:k + 1] + D[k:k + 1, :], out=D)
    return QuotientMetric(D)


def boundary(rel, i):
    """Indices ``u`` whose flip in direction ``i`` lies in a different class."""
    if not 1 <= i <= rel.n:
        raise ArgumentError(f"direction must be in [1, {rel.n}], got {i}")
    u = np.arange(1 << rel.n)
    return np.flatnonzero(rel.class_of != rel.class_of[u ^ (1 << (i - 1))])


def boundary_measures(rel):
    """``sigma_n(boundary_i)`` for ``i = 1..n``."""
    size = 1 << rel.n
    return np.array([boundary(rel, i).size / size for i in range(1, rel.n + 1)])


def flip_distance_violations(rel, metric=None):
    """Points where ``rho([x], [flip_i x])`` is not 2 on the boundary and 0 off it.

    Returns a list of ``(u, i, distance)``; an empty list confirms the claim.
    """
    metric = metric or quotient_metric(rel)
    out = []
    u = np.arange(1 << rel.n)
    for i in range(1, rel.n + 1):
        v = u ^ (1 << (i - 1))
        dist = metric.distances[rel.class_of[u], rel.class_of[v]]
        expected = np.where(rel.class_of[u] != rel.class_of[v], 2.0, 0.0)
        for k in np.flatnonzero(dist != expected):
            out.append((int(k), i, float(dist[k])))
    return out


def lift(rel, g):
    """``F(x) = g(class_of(x))`` as a CubeFunction."""
    g = np.asarray(g, dtype=np.float64)
    if g.ndim == 1:
        g = g[:, None]
    if g.shape[0] != rel.m:
        raise ArgumentError(f"g must have {rel.m} rows, got {g.shape[0]}")
    return CubeFunction(rel.n, g[rel.class_of])


def product_distance_function(rel, metric=None):
    """``(x, y) -> rho([x], [y])`` as a scalar function on the cube with ``2n`` variables.

    Index ``u + 2^n v`` holds the pair ``(x_u, y_v)``.
    """
    if rel.n > MAX_N_PRODUCT:
        raise CapabilityError(f"product-space mode supports n <= {MAX_N_PRODUCT}, got n={rel.n}")
    metric = metric or quotient_metric(rel)
    c = rel.class_of
    table = metric.distances[c[:, None], c[None, :]]  # [u, v]
    return CubeFunction(2 * rel.n, table.T.reshape(-1))


def product_distance_norm(rel, p, alpha, metric=None, mode="auto", tol=1e-12):
    """``||rho([x], [y])||_{L_p(log L)^alpha}`` on the product of two cubes.

    ``mode='product'`` builds the 2n-variable cube function; ``mode='classes'``
    sums over class pairs weighted by ``|a||b| / 4^n``, which is exact and works
    for any ``n``. ``auto`` picks ``product`` when ``n`` allows it.
    """
    metric = metric or quotient_metric(rel)
    gauge = OrliczGauge(p, alpha)
    if mode == "auto":
        mode = "product" if rel.n <= MAX_N_PRODUCT else "classes"
    if mode == "product":
        return orlicz_norm(product_distance_function(rel, metric), gauge, tol=tol)
    if mode != "classes":
        raise ArgumentError(f"unknown mode {mode!r}")
    sizes = np.bincount(rel.class_of, minlength=rel.m) / float(1 << rel.n)
    w = np.outer(sizes, sizes).ravel()
    return luxemburg_norm(metric.distances.ravel(), gauge, weights=w, tol=tol)


@dataclass
class DistortionBound:
    numerator: float
    denominator: float
    bound_without_c: float
    degenerate: bool
    p: float
    alpha: float
    type_constant: float

    def as_dict(self):
        return dict(self.__dict__)


def distortion_lower_bound(rel, p, alpha=None, T=1.0, mode="auto"):
    """``T^-1 ||rho_quotient||_{L_p(log L)^alpha} / (sum_i sigma(boundary_i))^(1/p)``.

    ``alpha=None`` means ``p/2``; ``alpha=0`` gives the plain ``L_p`` bound.
    The true distortion lower bound is an unspecified universal constant ``c``
    times ``bound_without_c``. A relation with empty boundaries (one class)
    is flagged degenerate and gets bound 0.
    """
    if not p >= 1:
        raise ArgumentError(f"p must be >= 1, got {p}")
    alpha = p / 2 if alpha is None else float(alpha)
    if not T > 0:
        raise ArgumentError("type constant must be positive")
    total = float(boundary_measures(rel).sum())
    if total == 0:
        return DistortionBound(0.0, 0.0, 0.0, True, p, alpha, T)
    metric = quotient_metric(rel)
    num = product_distance_norm(rel, p, alpha, metric, mode=mode)
    den = total ** (1.0 / p)
    return DistortionBound(num, den, num / (T * den), False, p, alpha, T)
