"""Entropy, alpha-entropy and the two-sided Orlicz/entropy comparison."""
from dataclasses import dataclass, asdict
import math

import numpy as np

from .errors import ArgumentError
from .norms import EUCLIDEAN, OrliczGauge, lp_of_magnitudes, luxemburg_norm, magnitudes


def signed_log_alpha(x, alpha):
    """``sign(log x) * |log x|^alpha``, increasing in ``x``."""
    x = np.asarray(x, dtype=np.float64)
    if np.any(x <= 0):
        raise ArgumentError("signed_log_alpha needs x > 0")
    lg = np.log(x)
    out = np.sign(lg) * np.power(np.abs(lg), alpha)
    return float(out) if out.ndim == 0 else out


def _as_nonneg(h, weights):
    vals = h.values if hasattr(h, "values") else np.asarray(h, dtype=np.float64)
    if vals.ndim == 2:
        if vals.shape[1] != 1:
            raise ArgumentError("entropy needs a scalar function")
        vals = vals[:, 0]
    if np.any(vals < 0):
        raise ArgumentError("entropy needs a nonnegative function")
    if weights is not None:
        weights = np.asarray(weights, dtype=np.float64)
        if weights.shape != vals.shape:
            raise ArgumentError("weights must match the function table")
    return vals, weights


def _mean(a, weights):
    return float(np.mean(a)) if weights is None else float(np.sum(weights * a))


def ent(h, weights=None):
    """``E[h log h] - E[h] log E[h]`` with ``0 log 0 = 0``.

    ``weights`` are probabilities of the atoms (uniform when omitted).
    """
    vals, weights = _as_nonneg(h, weights)
    mass = _mean(vals, weights)
    if mass == 0:
        return 0.0
    # h log(h / E h) has the same mean and avoids cancellation of large terms
    pos = vals > 0
    terms = np.zeros_like(vals)
    terms[pos] = vals[pos] * np.log(vals[pos] / mass)
    return max(_mean(terms, weights), 0.0)


def ent_alpha(h, alpha, weights=None):
    """``E[h slog^alpha(h / E h)]`` with ``0 slog^alpha 0 = 0``."""
    vals, weights = _as_nonneg(h, weights)
    mass = _mean(vals, weights)
    if mass == 0:
        return 0.0
    pos = vals > 0
    terms = np.zeros_like(vals)
    lg = np.log(vals[pos] / mass)
    terms[pos] = vals[pos] * np.sign(lg) * np.power(np.abs(lg), alpha)
    return _mean(terms, weights)


@dataclass(frozen=True)
class EntropyBoundsConstants:
    p: float
    alpha: float
    c_alpha: float
    K_alpha: float
    C_alpha: float
    B: float

    def as_dict(self):
        return asdict(self)


def entropy_bounds_constants(p, alpha):
    """Explicit constants of the two-sided Orlicz norm / alpha-entropy comparison."""
    if not alpha > 0:
        raise ArgumentError(f"alpha must be positive, got {alpha}")
    a = float(alpha)
    r = (a / math.e) ** a
    c = 2.0 ** max(a - 1.0, 0.0) * (1.0 + r) + r
    beta = 2.0 ** (1.0 / a)
    B = (beta + math.e - 1.0) / (beta - 1.0)
    K = max(math.log(math.e + 1.0) ** a + 2.0 * r, B * math.log(math.e + B) ** a)
    return EntropyBoundsConstants(float(p), a, c, K, K + 2.0, B)


def eleme_sides(y, alpha, K=None):
    """Both sides of ``y log^a(e + y) <= K_a + 2 y slog^a(y)`` (elementwise)."""
    y = np.asarray(y, dtype=np.float64)
    if K is None:
        K = entropy_bounds_constants(1.0, alpha).K_alpha
    lhs = y * np.power(np.log(np.e + y), alpha)
    rhs = K + 2.0 * y * signed_log_alpha(y, alpha)
    return lhs, rhs


@dataclass
class OrliczEntropyCheck:
    lower: float
    middle: float
    upper: float
    lp_p: float
    ent_alpha: float
    holds: bool


def check_orlicz_entropy_equivalence(f, p, alpha, tn=EUCLIDEAN, weights=None, c=None, C=None,
                                     rtol=1e-9):
    """Evaluate ``c^-1 M <= ||f||^p_{L_p(log L)^alpha(E)} <= C M``.

    ``M = max(||f||_p^p, Ent^alpha(||f||_E^p))``. The default constants are
    ``c_alpha`` and ``C_alpha``; pass ``c``/``C`` to test other values (for
    instance 2 and 14 when ``p = 2``, ``alpha = 1``). ``rtol`` absorbs the
    relative accuracy of the Luxemburg bisection.
    """
    consts = entropy_bounds_constants(p, alpha)
    c = consts.c_alpha if c is None else c
    C = consts.C_alpha if C is None else C
    a = magnitudes(f, tn)
    middle = luxemburg_norm(a, OrliczGauge(p, alpha), weights=weights, tol=1e-12) ** p
    lpp = lp_of_magnitudes(a, p, weights) ** p
    ea = ent_alpha(np.power(a, p), alpha, weights)
    m = max(lpp, ea)
    lower, upper = m / c, C * m
    holds = bool(lower <= middle * (1 + rtol) and middle <= upper * (1 + rtol))
    return OrliczEntropyCheck(lower, middle, upper, lpp, ea, holds)


def check_equi2(f, tn=EUCLIDEAN, weights=None):
    """``(1/2) M <= ||f||^2_{L_2 log L (E)} <= 14 M`` with ``M = max(||f||_2^2, Ent(||f||^2))``."""
    return check_orlicz_entropy_equivalence(f, 2.0, 1.0, tn, weights=weights, c=2.0, C=14.0)
