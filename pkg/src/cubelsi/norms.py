"""Target norms, L_p norms and Luxemburg (Orlicz) norms.

All expectations are taken with respect to the uniform measure on the cube
unless explicit probability ``weights`` are supplied; the weighted entry
points let the symmetric-group and quotient code reuse the same machinery.
"""
from dataclasses import dataclass
import math

import numpy as np

from .errors import ArgumentError, NumericalError

MAX_BISECTION_ITER = 200


@dataclass(frozen=True)
class TargetNorm:
    """The norm of ``l_q^d``; ``q`` may be ``math.inf``."""

    q: float = 2.0
    d: int = None

    def __post_init__(self):
        q = float(self.q)
        if not (q >= 1.0):
            raise ArgumentError(f"q must be in [1, inf], got {self.q}")
        object.__setattr__(self, "q", q)

    def __call__(self, v):
        return vector_norm(v, self)

    @property
    def label(self):
        return "inf" if math.isinf(self.q) else f"{self.q:g}"


EUCLIDEAN = TargetNorm(2.0)


@dataclass(frozen=True)
class OrliczGauge:
    """``psi(t) = t^p * log(e + t^p)^alpha``; ``alpha = 0`` gives plain ``L_p``."""

    p: float
    alpha: float = 0.0

    def __post_init__(self):
        if not self.p >= 1:
            raise ArgumentError(f"gauge exponent p must be >= 1, got {self.p}")
        if not self.alpha > -1:
            raise ArgumentError(f"gauge alpha must be > -1, got {self.alpha}")

    def __call__(self, t):
        tp = np.power(np.asarray(t, dtype=np.float64), self.p)
        if self.alpha == 0:
            return tp
        # e + t^p > 1, so the signed power is the ordinary power here
        return tp * np.power(np.log(np.e + tp), self.alpha)

    @property
    def convex(self):
        return self.alpha >= 0


def vector_norm(v, tn=EUCLIDEAN):
    """``l_q`` norm along the last axis."""
    v = np.asarray(v, dtype=np.float64)
    if tn.d is not None and v.shape[-1] != tn.d:
        raise ArgumentError(f"vector dimension {v.shape[-1]} does not match target d={tn.d}")
    a = np.abs(v)
    if math.isinf(tn.q):
        return a.max(axis=-1)
    if tn.q == 1.0:
        return a.sum(axis=-1)
    if tn.q == 2.0:
        return np.sqrt((a * a).sum(axis=-1))
    # scale by the max entry to avoid overflow for large q
    m = a.max(axis=-1, keepdims=True)
    safe = np.where(m > 0, m, 1.0)
    return (np.power(a / safe, tn.q).sum(axis=-1)) ** (1.0 / tn.q) * safe[..., 0]


def magnitudes(f, tn=EUCLIDEAN):
    """Pointwise ``||f(x)||_E`` as a 1-d array."""
    vals = f.values if hasattr(f, "values") else np.asarray(f, dtype=np.float64)
    if vals.ndim == 1:
        return np.abs(vals)
    return vector_norm(vals, tn)


def _mean(a, weights):
    if weights is None:
        return float(np.mean(a))
    return float(np.sum(weights * a))


def expectation(f, weights=None):
    """Componentwise mean of the value table."""
    vals = f.values if hasattr(f, "values") else np.asarray(f, dtype=np.float64)
    if weights is None:
        return vals.mean(axis=0)
    return np.tensordot(weights, vals, axes=(0, 0))


def lp_of_magnitudes(a, p, weights=None):
    a = np.asarray(a, dtype=np.float64)
    if not p >= 1:
        raise ArgumentError(f"p must be >= 1, got {p}")
    m = a.max() if a.size else 0.0
    if m == 0:
        return 0.0
    return m * _mean(np.power(a / m, p), weights) ** (1.0 / p)


def lp_norm(f, p, tn=EUCLIDEAN, weights=None):
    """``(E ||f||_E^p)^(1/p)``."""
    return lp_of_magnitudes(magnitudes(f, tn), p, weights)


def luxemburg_norm(a, gauge, weights=None, tol=1e-10):
    """Luxemburg norm of the nonnegative sample ``a``.

    Returns the smallest ``gamma`` with ``E psi(a / gamma) <= 1`` to relative
    accuracy ``tol``. The constraint is bracketed starting from the ``L_p``
    norm and then bisected; the returned value always satisfies the
    constraint.
    """
    a = np.asarray(a, dtype=np.float64)
    if not tol > 0:
        raise ArgumentError("tol must be positive")
    scale = a.max() if a.size else 0.0
    if scale == 0:
        return 0.0
    b = a / scale

    def excess(gamma):
        with np.errstate(over="ignore"):
            return _mean(gauge(b / gamma), weights) - 1.0

    g0 = lp_of_magnitudes(b, gauge.p, weights)
    it = 0
    if excess(g0) > 0:
        lo, hi = g0, 2.0 * g0
        while excess(hi) > 0:
            lo, hi = hi, 2.0 * hi
            it += 1
            if it >= MAX_BISECTION_ITER:
                raise NumericalError("could not bracket the Luxemburg norm", (lo * scale, hi * scale))
    else:
        lo, hi = 0.5 * g0, g0
        while excess(lo) <= 0:
            lo, hi = 0.5 * lo, lo
            it += 1
            if it >= MAX_BISECTION_ITER:
                raise NumericalError("could not bracket the Luxemburg norm", (lo * scale, hi * scale))
    while hi - lo > tol * hi:
        mid = 0.5 * (lo + hi)
        if excess(mid) > 0:
            lo = mid
        else:
            hi = mid
        it += 1
        if it >= MAX_BISECTION_ITER:
            raise NumericalError("Luxemburg bisection did not converge", (lo * scale, hi * scale))
    return hi * scale


def orlicz_norm(f, gauge, tn=EUCLIDEAN, tol=1e-10, weights=None):
    """``||f||_{L_psi(E)} = inf{gamma > 0 : E psi(||f||_E / gamma) <= 1}``."""
    return luxemburg_norm(magnitudes(f, tn), gauge, weights=weights, tol=tol)


def llog_norm(f, p, alpha, tn=EUCLIDEAN, tol=1e-10, weights=None):
    """Shorthand for the ``L_p (log L)^alpha (E)`` norm."""
    return orlicz_norm(f, OrliczGauge(p, alpha), tn, tol=tol, weights=weights)


def constant_orlicz_norm(gauge):
    """``||1||_{L_psi}``, i.e. ``1 / psi^{-1}(1)`` for a probability space."""
    return luxemburg_norm(np.ones(1), gauge, tol=1e-14)
