"""Hamming cube functions, discrete derivatives and Fourier-Walsh analysis.

Points of ``{-1, 1}^n`` are encoded as integers ``u`` in ``[0, 2**n)``. Bit
``i - 1`` of ``u`` decides coordinate ``x_i``: a clear bit means ``x_i = +1``
and a set bit means ``x_i = -1``. Every module goes through :func:`coordinates`
and :func:`flip` instead of re-deriving this rule.

Directions ``i`` are 1-based throughout, as in the usual notation ``x_1..x_n``.

The heat semigroup ``P_t`` and the Laplacian are defined spectrally:
``P_t w_S = exp(-t|S|) w_S`` and ``Delta w_S = |S| w_S``. This is the standard
convention under which ``f - E f = 2 * int_0^inf P_t Delta P_t f dt``.
"""
from dataclasses import dataclass

import numpy as np
from scipy import integrate

from .errors import ArgumentError, CapabilityError

MAX_N = 24
#: largest dimension for operations that enumerate pairs of cube points
MAX_N_QUADRATIC = 14


def _check_n(n):
    if not isinstance(n, (int, np.integer)) or n < 1 or n > MAX_N:
        raise ArgumentError(f"dimension n must be an integer in [1, {MAX_N}], got {n!r}")
    return int(n)


def _check_direction(i, n):
    if not isinstance(i, (int, np.integer)) or not 1 <= i <= n:
        raise ArgumentError(f"direction must be in [1, {n}], got {i!r}")
    return int(i)


@dataclass(frozen=True)
class CubePoint:
    index: int
    n: int

    def __post_init__(self):
        _check_n(self.n)
        if not 0 <= self.index < (1 << self.n):
            raise ArgumentError(f"index {self.index} out of range for n={self.n}")

    @property
    def coords(self):
        return coordinates(self.n)[self.index]


def coordinates(n):
    """Return the ``(2**n, n)`` array of +-1 coordinates in index order."""
    n = _check_n(n)
    u = np.arange(1 << n, dtype=np.int64)
    bits = (u[:, None] >> np.arange(n, dtype=np.int64)) & 1
    return 1.0 - 2.0 * bits


def popcounts(n):
    """``|S|`` for every subset mask ``S`` of ``{1..n}``, as an int array."""
    n = _check_n(n)
    counts = np.zeros(1, dtype=np.int64)
    for _ in range(n):
        counts = np.concatenate([counts, counts + 1])
    return counts


def flip(x, i):
    """Negate coordinate ``i`` of ``x`` (a :class:`CubePoint`)."""
    i = _check_direction(i, x.n)
    return CubePoint(x.index ^ (1 << (i - 1)), x.n)


def flip_index(u, i):
    """Index form of :func:`flip`; ``u`` may be an int or an integer array."""
    return np.bitwise_xor(u, 1 << (i - 1))


def hamming_l1(u, v):
    """``||x - y||_1`` between the cube points with indices ``u`` and ``v``.

    Adjacent points are at distance 2. Works elementwise on integer arrays.
    """
    x = np.bitwise_xor(np.asarray(u, dtype=np.int64), np.asarray(v, dtype=np.int64))
    count = np.zeros(x.shape, dtype=np.int64)
    while np.any(x):
        count += x & 1
        x = x >> 1
    return 2 * count


@dataclass(frozen=True, eq=False)
class CubeFunction:
    """A function ``f: {-1,1}^n -> R^d`` stored as a ``(2**n, d)`` table."""

    n: int
    values: np.ndarray

    def __post_init__(self):
        n = _check_n(self.n)
        vals = np.array(self.values, dtype=np.float64)
        if vals.ndim == 1:
            vals = vals[:, None]
        if vals.ndim != 2 or vals.shape[0] != 1 << n or vals.shape[1] < 1:
            raise ArgumentError(f"values must have shape (2**{n}, d), got {np.shape(self.values)}")
        if not np.all(np.isfinite(vals)):
            raise ArgumentError("function values must be finite")
        vals.flags.writeable = False
        object.__setattr__(self, "n", n)
        object.__setattr__(self, "values", vals)

    @property
    def d(self):
        return self.values.shape[1]

    @property
    def size(self):
        return self.values.shape[0]

    @property
    def is_scalar(self):
        return self.d == 1

    def scalar(self):
        """Values as a 1-d array; only for ``d == 1``."""
        if self.d != 1:
            raise ArgumentError(f"expected a scalar function, got d={self.d}")
        return self.values[:, 0]

    def __add__(self, other):
        if isinstance(other, CubeFunction):
            return CubeFunction(self.n, self.values + other.values)
        return CubeFunction(self.n, self.values + np.asarray(other, dtype=float))

    def __sub__(self, other):
        if isinstance(other, CubeFunction):
            return CubeFunction(self.n, self.values - other.values)
        return CubeFunction(self.n, self.values - np.asarray(other, dtype=float))

    def __mul__(self, c):
        return CubeFunction(self.n, self.values * float(c))

    __rmul__ = __mul__

    def __neg__(self):
        return CubeFunction(self.n, -self.values)

    def __repr__(self):
        return f"CubeFunction(n={self.n}, d={self.d})"

    @classmethod
    def from_callable(cls, n, fn, d=None):
        """Tabulate ``fn(x)`` where ``x`` is the +-1 coordinate vector."""
        xs = coordinates(n)
        rows = [np.atleast_1d(np.asarray(fn(x), dtype=float)) for x in xs]
        vals = np.vstack(rows)
        if d is not None and vals.shape[1] != d:
            raise ArgumentError(f"callable returned dimension {vals.shape[1]}, expected {d}")
        return cls(n, vals)

    @classmethod
    def constant(cls, n, c):
        c = np.atleast_1d(np.asarray(c, dtype=float))
        return cls(n, np.tile(c, (1 << n, 1)))

    def centered(self):
        return CubeFunction(self.n, self.values - self.values.mean(axis=0))


def walsh_function(n, subset):
    """The character ``w_S(x) = prod_{i in S} x_i`` as a scalar CubeFunction.

    ``subset`` is an iterable of 1-based directions.
    """
    xs = coordinates(n)
    w = np.ones(1 << n)
    for i in subset:
        w = w * xs[:, _check_direction(i, n) - 1]
    return CubeFunction(n, w)


def subset_mask(subset):
    mask = 0
    for i in subset:
        mask |= 1 << (int(i) - 1)
    return mask


@dataclass(frozen=True, eq=False)
class WalshSpectrum:
    """Fourier-Walsh coefficients; row ``S`` (a subset bitmask) is ``E[f w_S]``."""

    n: int
    coeffs: np.ndarray

    def __post_init__(self):
        n = _check_n(self.n)
        c = np.array(self.coeffs, dtype=np.float64)
        if c.ndim == 1:
            c = c[:, None]
        if c.ndim != 2 or c.shape[0] != 1 << n:
            raise ArgumentError(f"coeffs must have shape (2**{n}, d), got {np.shape(self.coeffs)}")
        c.flags.writeable = False
        object.__setattr__(self, "n", n)
        object.__setattr__(self, "coeffs", c)

    @property
    def d(self):
        return self.coeffs.shape[1]


def fwht(a):
    """Unnormalized Walsh-Hadamard butterfly along axis 0, in place.

    ``a`` must have leading length ``2**n``. Returns ``a``.
    """
    size = a.shape[0]
    rest = a.shape[1:]
    h = 1
    while h < size:
        v = a.reshape((size // (2 * h), 2, h) + rest)
        lo = v[:, 0].copy()
        v[:, 0] += v[:, 1]
        lo -= v[:, 1]
        v[:, 1] = lo
        h *= 2
    return a


def walsh_transform(f):
    """Forward transform with the ``2**-n`` normalization (coefficients are expectations)."""
    a = np.array(f.values, dtype=np.float64, copy=True)
    fwht(a)
    a *= 1.0 / f.size
    return WalshSpectrum(f.n, a)


def inverse_walsh(s):
    a = np.array(s.coeffs, dtype=np.float64, copy=True)
    fwht(a)
    return CubeFunction(s.n, a)


def partials(f):
    """All discrete partial derivatives at once, shape ``(n, 2**n, d)``."""
    u = np.arange(f.size)
    out = np.empty((f.n,) + f.values.shape)
    for i in range(f.n):
        out[i] = 0.5 * (f.values - f.values[u ^ (1 << i)])
    return out


def partial_derivative(f, i):
    """``(f(x) - f(x with x_i negated)) / 2``."""
    i = _check_direction(i, f.n)
    u = np.arange(f.size)
    return CubeFunction(f.n, 0.5 * (f.values - f.values[u ^ (1 << (i - 1))]))


def multilinear_eval(g, y):
    """Evaluate the multilinear extension ``F`` at a point ``y`` of ``R^n``.

    With a :class:`WalshSpectrum`, ``F(y) = sum_S coeffs[S] prod_{i in S} y_i``.
    With a :class:`CubeFunction` the value-space formula
    ``F(y) = sum_u f(u) prod_i (1 + x_i(u) y_i) / 2`` is used, which reproduces
    ``f`` bit-exactly at cube points.
    """
    y = np.asarray(y, dtype=np.float64)
    if y.shape != (g.n,):
        raise ArgumentError(f"y must have shape ({g.n},), got {y.shape}")
    w = np.ones(1)
    if isinstance(g, WalshSpectrum):
        for yi in y:
            w = np.concatenate([w, w * yi])
        return w @ g.coeffs
    for yi in y:
        w = np.concatenate([w * (0.5 * (1.0 + yi)), w * (0.5 * (1.0 - yi))])
    return w @ g.values


def heat_semigroup(f, t):
    """``P_t f``: multiply the coefficient of ``w_S`` by ``exp(-t|S|)``."""
    if not t >= 0:
        raise ArgumentError(f"t must be nonnegative, got {t}")
    if t == 0:
        return CubeFunction(f.n, f.values)
    s = walsh_transform(f)
    mult = np.exp(-t * popcounts(f.n))[:, None]
    return inverse_walsh(WalshSpectrum(f.n, s.coeffs * mult))


def laplacian(f):
    """``Delta f = sum_i d_i f``; on ``w_S`` this is ``|S| w_S``."""
    u = np.arange(f.size)
    acc = np.zeros_like(f.values)
    for i in range(f.n):
        acc += 0.5 * (f.values - f.values[u ^ (1 << i)])
    return CubeFunction(f.n, acc)


def laplacian_spectral(f):
    s = walsh_transform(f)
    return inverse_walsh(WalshSpectrum(f.n, s.coeffs * popcounts(f.n)[:, None]))


def reproduction_integral(f, epsabs=1e-13, epsrel=1e-12):
    """Numerically evaluate ``2 * int_0^inf P_t Delta P_t f dt`` by adaptive quadrature.

    For any ``f`` the exact value is ``f - E f``. The integrand is computed on
    the spectrum, so each quadrature node costs one vector multiply.
    """
    s = walsh_transform(f)
    k = popcounts(f.n)[:, None].astype(float)

    def integrand(t):
        return (2.0 * k * np.exp(-2.0 * t * k) * s.coeffs).ravel()

    val, _ = integrate.quad_vec(integrand, 0.0, np.inf, epsabs=epsabs, epsrel=epsrel)
    return inverse_walsh(WalshSpectrum(f.n, val.reshape(s.coeffs.shape)))


def biased_threshold(t):
    """``P{xi_i(t) = 1} = (1 + e^-t) / 2``."""
    return 0.5 * (1.0 + np.exp(-t))


def biased_values(t):
    """The two values ``(delta | xi=+1, delta | xi=-1)`` of ``delta_i(t)``."""
    s = np.sqrt(-np.expm1(-2.0 * t))
    return -np.expm1(-t) / s, (-1.0 - np.exp(-t)) / s


def sample_biased_delta(t, n, rng, size=None):
    """Draw ``delta_i(t) = (xi_i(t) - e^-t) / sqrt(1 - e^-2t)`` for ``i = 1..n``.

    The ``xi_i(t)`` are independent with ``P{xi=1} = (1 + e^-t)/2``; each
    ``delta_i(t)`` has mean 0 and variance 1. ``size`` adds leading sample axes.
    """
    if not t > 0:
        raise ArgumentError(f"t must be positive, got {t}")
    shape = (n,) if size is None else tuple(np.atleast_1d(size)) + (n,)
    return biased_from_uniforms(t, rng.random(shape))


def biased_from_uniforms(t, uniforms):
    """Map uniforms on [0, 1) to ``delta(t)`` samples (monotone coupling across ``t``)."""
    plus, minus = biased_values(t)
    return np.where(uniforms < biased_threshold(t), plus, minus)


def sign_vectors(n, half=False):
    """All ``2**n`` sign vectors in index order, as an ``(2**n, n)`` array.

    With ``half=True`` only the vectors with ``delta_n = +1`` are returned;
    for even functionals of ``delta`` this halves the enumeration.
    """
    if n > MAX_N_QUADRATIC:
        raise CapabilityError(f"exact sign enumeration supports n <= {MAX_N_QUADRATIC}, got n={n}")
    xs = coordinates(n)
    return xs[: 1 << (n - 1)] if half else xs
