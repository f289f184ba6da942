"""Evaluators for the cube inequalities, with every unknown constant set to 1.

Each evaluator returns an :class:`InequalityReport` holding both sides of the
display and the ratio ``lhs / rhs_unit``. For a statement ``lhs <= K * rhs``
with an unspecified constant ``K``, the ratio is an empirical lower estimate
of the best ``K``. Explicitly known constants that multiply only one of several
right-hand terms (``2(log n + 1)``, ``pi``, ``log n + 1``) are kept in place.
"""
from dataclasses import dataclass, field
import enum
import math

import numpy as np

from . import cube
from .cube import CubeFunction, heat_semigroup, partials
from .entropy import ent
from .errors import ArgumentError, InequalityViolation
from .gradients import (EXACT, GradientTermConfig, QuadratureConfig, asymmetric_gradient,
                        gradient_lp, lower_median, rademacher_gradient,
                        semigroup_gradient_integral, type_gradient)
from .norms import (EUCLIDEAN, OrliczGauge, TargetNorm, lp_norm, lp_of_magnitudes,
                    luxemburg_norm, magnitudes, orlicz_norm, vector_norm)

#: relative size below which a side is treated as zero
ZERO_TOL = 1e-12


class InequalityId(enum.Enum):
    TalagrandLSI = "talagrand-lsi"
    PoincareLp = "poincare-lp"
    IVVPoincare = "ivv-poincare"
    MainLSI = "main-lsi"
    StrongPisier = "strong-pisier"
    PisierLogN = "pisier-log-n"
    TalagrandAsym = "talagrand-asym"
    TypeLSI = "type-lsi"
    Beckner = "beckner"
    IsopFunctional = "isop-functional"
    MostGeneral = "most-general"
    OrliczHypercontract = "orlicz-hypercontract"
    RieszP2 = "riesz-p2"

    @classmethod
    def parse(cls, name):
        if isinstance(name, cls):
            return name
        for member in cls:
            if name in (member.value, member.name):
                return member
        raise ArgumentError(f"unknown inequality {name!r}; choose from {[m.value for m in cls]}")


SCALAR_IDS = {InequalityId.TalagrandLSI, InequalityId.PoincareLp, InequalityId.TalagrandAsym,
              InequalityId.RieszP2}
#: statements that need no centering, so constants are not sent to zero
UNCENTERED_IDS = {InequalityId.OrliczHypercontract, InequalityId.RieszP2,
                  InequalityId.TalagrandAsym}


@dataclass
class InequalityReport:
    id: InequalityId
    lhs: float
    rhs_unit: float
    ratio: float
    params: dict = field(default_factory=dict)
    terms: dict = field(default_factory=dict)
    witness: CubeFunction = None

    def as_dict(self):
        return {"id": self.id.value, "params": self.params, "lhs": self.lhs,
                "rhs_unit": self.rhs_unit, "ratio": self.ratio, "terms": self.terms}


def safe_ratio(lhs, rhs, scale=1.0, proven=True):
    """``lhs / rhs`` with the degenerate conventions.

    ``rhs == 0`` and ``lhs == 0`` (relative to ``scale``) gives 0. ``rhs == 0``
    with ``lhs > 0`` raises for proven statements and returns ``inf`` otherwise.
    """
    tiny = ZERO_TOL * max(scale, 1e-300)
    if rhs > tiny:
        return float(lhs / rhs)
    if lhs <= tiny:
        return 0.0
    if proven:
        raise InequalityViolation(f"right-hand side vanishes but left-hand side is {lhs!r}")
    return math.inf


def _require_scalar(f, what):
    if f.d != 1:
        raise ArgumentError(f"{what} is a scalar inequality; got a function with d={f.d}")


def _scale(f):
    return float(np.abs(f.values).max())


def evaluate(ineq, f, tn=EUCLIDEAN, p=2.0, alpha=None, q=None, t=None,
             cfg=EXACT, quad=None, tol=1e-10):
    """Evaluate one named inequality on ``f``.

    Parameters by id: ``p`` everywhere; ``alpha`` (Orlicz exponent) for
    ``orlicz-hypercontract``; ``q`` in ``[1, 2]`` for ``beckner``; ``t`` for
    ``orlicz-hypercontract`` (``0 < t < 1``) and ``riesz-p2`` (``t > 0``).
    Statements about mean-zero functions are applied to ``f - E f``.
    """
    ineq = InequalityId.parse(ineq)
    p = float(p)
    if not p >= 1:
        raise ArgumentError(f"p must be >= 1, got {p}")
    params = {"p": p, "q_target": tn.label, "n": f.n, "d": f.d}
    fc = f.centered()
    scale = _scale(f)
    terms = {}
    if ineq in SCALAR_IDS:
        _require_scalar(f, ineq.value)

    if ineq is InequalityId.TalagrandLSI:
        lhs = orlicz_norm(fc, OrliczGauge(p, p / 2), tol=tol)
        rhs = gradient_lp(f, p)
    elif ineq is InequalityId.PoincareLp:
        lhs = lp_norm(fc, p)
        rhs = gradient_lp(f, p)
    elif ineq is InequalityId.IVVPoincare:
        lhs = lp_norm(fc, p, tn)
        rhs = rademacher_gradient(f, p, tn, cfg)
    elif ineq is InequalityId.MainLSI:
        lhs = orlicz_norm(fc, OrliczGauge(p, p / 2), tn, tol=tol)
        rhs = rademacher_gradient(f, p, tn, cfg)
    elif ineq is InequalityId.StrongPisier:
        lhs = orlicz_norm(fc, OrliczGauge(p, p / 2), tn, tol=tol)
        gp = rademacher_gradient(f, p, tn, cfg)
        g1 = rademacher_gradient(f, 1.0, tn, cfg)
        weight = 2.0 * (math.log(f.n) + 1.0)
        terms = {"G_p": gp, "G_1": g1, "log_weight": weight}
        rhs = gp + weight * g1
    elif ineq is InequalityId.PisierLogN:
        lhs = lp_norm(fc, p, tn)
        gp = rademacher_gradient(f, p, tn, cfg)
        terms = {"G_p": gp, "log_weight": math.log(f.n) + 1.0}
        rhs = (math.log(f.n) + 1.0) * gp
    elif ineq is InequalityId.TalagrandAsym:
        h = f.scalar()
        if np.any(h < 0):
            raise ArgumentError("talagrand-asym needs a nonnegative function")
        if np.mean(h == 0) < 0.5:
            raise ArgumentError("talagrand-asym needs sigma{h = 0} >= 1/2")
        lhs = orlicz_norm(f, OrliczGauge(p, p / 2), tol=tol)
        rhs = lp_norm(asymmetric_gradient(f), p)
    elif ineq is InequalityId.TypeLSI:
        lhs = orlicz_norm(fc, OrliczGauge(p, p / 2), tn, tol=tol)
        rhs = type_gradient(f, p, tn)
    elif ineq is InequalityId.Beckner:
        q = 1.0 if q is None else float(q)
        if not 1 <= q <= 2:
            raise ArgumentError(f"beckner needs q in [1, 2], got {q}")
        params["q"] = q
        lhs = lp_norm(fc, 2.0, tn) ** 2 - lp_norm(fc, q, tn) ** 2
        rhs = (2.0 - q) * rademacher_gradient(f, 2.0, tn, cfg) ** 2
    elif ineq is InequalityId.IsopFunctional:
        a = magnitudes(fc, tn)
        lp_ = lp_of_magnitudes(a, p)
        l1 = lp_of_magnitudes(a, 1.0)
        log_term = math.log(lp_ / l1) if l1 > 0 else 0.0
        lhs = lp_ * (1.0 + math.sqrt(max(log_term, 0.0)))
        rhs = rademacher_gradient(f, p, tn, cfg)
    elif ineq is InequalityId.MostGeneral:
        lhs = orlicz_norm(fc, OrliczGauge(p, p / 2), tn, tol=tol)
        gp = rademacher_gradient(f, p, tn, cfg)
        integral = semigroup_gradient_integral(f, tn, quad or QuadratureConfig())
        terms = {"G_p": gp, "semigroup_integral": integral.value,
                 "tail_bound": integral.tail_bound, "integral_stderr": integral.stderr}
        rhs = gp + math.pi * integral.value
    elif ineq is InequalityId.OrliczHypercontract:
        t = 0.5 if t is None else float(t)
        alpha = p / 2 if alpha is None else float(alpha)
        if not 0 < t < 1:
            raise ArgumentError(f"orlicz-hypercontract needs 0 < t < 1, got {t}")
        if not 0 <= alpha <= p / 2:
            raise ArgumentError(f"orlicz-hypercontract needs alpha in [0, p/2], got {alpha}")
        params.update(t=t, alpha=alpha)
        pstar = min(p, 2.0)
        lhs = orlicz_norm(heat_semigroup(f, t), OrliczGauge(p, alpha), tn, tol=tol)
        rhs = t ** (-2.0 * alpha / (p * pstar)) * lp_norm(f, p, tn)
    elif ineq is InequalityId.RieszP2:
        t = 1.0 if t is None else float(t)
        if not t > 0:
            raise ArgumentError(f"riesz-p2 needs t > 0, got {t}")
        params.update(t=t, p=2.0)
        lhs = gradient_lp(heat_semigroup(f, t), 2.0)
        rhs = lp_norm(f, 2.0) / math.sqrt(math.expm1(2.0 * t))
    else:  # pragma: no cover
        raise ArgumentError(f"no evaluator for {ineq}")

    lhs, rhs = float(lhs), float(rhs)
    ratio = safe_ratio(lhs, rhs, scale=scale)
    return InequalityReport(ineq, lhs, rhs, ratio, params, terms, f)


# ---------------------------------------------------------------------------
# kernel form: scalar log-Sobolev + vector Poincare => vector log-Sobolev


@dataclass
class DirichletKernel:
    """A probability space of ``m`` atoms with a pair measure ``beta``.

    ``beta`` is either a dense ``(m, m)`` array or a sparse triple
    ``(rows, cols, weights)``.
    """

    mu: np.ndarray
    beta: object

    def __post_init__(self):
        self.mu = np.asarray(self.mu, dtype=np.float64)
        if self.mu.ndim != 1 or np.any(self.mu < 0) or not np.isclose(self.mu.sum(), 1.0, atol=1e-12):
            raise ArgumentError("mu must be a probability vector")
        if isinstance(self.beta, tuple):
            rows, cols, w = (np.asarray(a) for a in self.beta)
        else:
            b = np.asarray(self.beta, dtype=np.float64)
            if b.shape != (self.m, self.m):
                raise ArgumentError("dense beta must be m x m")
            rows, cols = np.nonzero(b)
            w = b[rows, cols]
        w = np.asarray(w, dtype=np.float64)
        if np.any(~np.isfinite(w)) or np.any(w < 0):
            raise ArgumentError("beta weights must be finite and nonnegative")
        self.pairs = (rows.astype(np.int64), cols.astype(np.int64), w)

    @property
    def m(self):
        return self.mu.size

    def energy(self, values, p, tn=EUCLIDEAN):
        """``sum beta(x, y) ||f(x) - f(y)||^p``."""
        rows, cols, w = self.pairs
        vals = np.asarray(values, dtype=np.float64)
        diff = vals[rows] - vals[cols]
        mags = np.abs(diff) if diff.ndim == 1 else vector_norm(diff, tn)
        return float(np.sum(w * mags ** p))

    def scaled(self, c):
        rows, cols, w = self.pairs
        return DirichletKernel(self.mu, (rows, cols, c * w))


def cube_kernel(n, p=2.0):
    """``beta(x, flip_i x) = 1 / (2^p * 2^n)``, so that the energy is ``sum_i ||d_i f||_p^p``."""
    size = 1 << n
    u = np.arange(size)
    rows = np.concatenate([u] * n)
    cols = np.concatenate([u ^ (1 << i) for i in range(n)])
    w = np.full(rows.size, 1.0 / (2.0 ** p * size))
    return DirichletKernel(np.full(size, 1.0 / size), (rows, cols, w))


@dataclass
class KernelFormReport:
    vec_lhs: float
    vec_rhs: float
    scalar_lhs: float
    scalar_rhs: float
    boosted_lhs: float
    boosted_rhs_unit: float
    combined_constant: float
    holds: bool
    hypotheses_hold: bool


def evaluate_kernel_form(kernel, values, tn=EUCLIDEAN, p=2.0, alpha=1.0, C=None, rtol=1e-9):
    """The three inequalities of the self-improvement argument on a kernel.

    * vector Poincare: ``||f - Ef||_p^p`` against ``sum beta ||f(x) - f(y)||^p``
    * scalar log-Sobolev for ``h = ||f - Ef||_E``: ``||h - Eh||^p_{L_p(log L)^alpha}``
      against ``sum beta |h(x) - h(y)|^p`` (constant ``C^p``)
    * boosted: ``||f - Ef||^p_{L_p(log L)^alpha(E)}`` against the vector energy,
      with combined constant ``2^(p-1) (C^p + 1)``.

    When ``C`` is omitted the instance-tight value ``(scalar_lhs / scalar_rhs)^(1/p)``
    is used. ``holds`` is the implication: if both hypotheses hold, so does the
    boosted bound.
    """
    vals = np.asarray(values, dtype=np.float64)
    if vals.ndim == 1:
        vals = vals[:, None]
    if vals.shape[0] != kernel.m:
        raise ArgumentError("function table does not match the kernel size")
    mu = kernel.mu
    gauge = OrliczGauge(p, alpha)
    fc = vals - mu @ vals
    a = vector_norm(fc, tn)
    vec_lhs = lp_of_magnitudes(a, p, mu) ** p
    vec_rhs = kernel.energy(vals, p, tn)
    h = a
    hc = h - mu @ h
    scalar_lhs = luxemburg_norm(np.abs(hc), gauge, weights=mu, tol=1e-12) ** p
    scalar_rhs = kernel.energy(h, p)
    if C is None:
        C = (scalar_lhs / scalar_rhs) ** (1.0 / p) if scalar_rhs > 0 else 0.0
    combined = 2.0 ** (p - 1.0) * (C ** p + 1.0)
    boosted_lhs = luxemburg_norm(a, gauge, weights=mu, tol=1e-12) ** p
    hyp = vec_lhs <= vec_rhs * (1 + rtol) and scalar_lhs <= C ** p * scalar_rhs * (1 + rtol)
    ok = boosted_lhs <= combined * vec_rhs * (1 + rtol)
    return KernelFormReport(vec_lhs, vec_rhs, scalar_lhs, scalar_rhs, boosted_lhs, vec_rhs,
                            combined, (not hyp) or ok, hyp)


# ---------------------------------------------------------------------------
# Beckner quotients


def beckner_quotient(f, q, tn=EUCLIDEAN):
    """``(||f||_2^2 - ||f||_q^2) / (1/q - 1/2)`` for the centered ``f``."""
    fc = f.centered()
    return (lp_norm(fc, 2.0, tn) ** 2 - lp_norm(fc, q, tn) ** 2) / (1.0 / q - 0.5)


def beckner_limit(f, tn=EUCLIDEAN):
    """The ``q -> 2`` limit of the Beckner quotient, ``2 Ent(||f - Ef||^2)``."""
    a = magnitudes(f.centered(), tn)
    return 2.0 * ent(a ** 2)


@dataclass
class BecknerTable:
    qs: list
    values: list
    nondecreasing: bool


def beckner_monotonicity(f, qs=(1.0, 1.25, 1.5, 1.75, 1.9), tn=EUCLIDEAN, slack=1e-9):
    qs = sorted(float(q) for q in qs)
    if any(not 1 <= q < 2 for q in qs):
        raise ArgumentError("Beckner grid must lie in [1, 2)")
    vals = [beckner_quotient(f, q, tn) for q in qs]
    scale = max(abs(v) for v in vals) if vals else 0.0
    ok = all(b >= a - slack * max(scale, 1.0) for a, b in zip(vals, vals[1:]))
    return BecknerTable(qs, vals, ok)


# ---------------------------------------------------------------------------
# two-point Holder inequality


def _two_point_parts(x, y, p, alpha):
    xp = np.power(np.asarray(x, dtype=np.float64), p)
    yp = np.power(np.asarray(y, dtype=np.float64), p)
    lhs = np.sqrt(xp * yp)
    right = xp * np.power(np.log(np.e + xp), alpha) + yp * np.power(np.log(np.e + yp), -alpha)
    return lhs, right


def two_point_holder_check(x, y, p, alpha, C, rtol=1e-12):
    """``(xy)^(p/2) <= (C/2) (x^p log^a(e + x^p) + y^p log^-a(e + y^p))``; elementwise."""
    lhs, right = _two_point_parts(x, y, p, alpha)
    out = lhs <= 0.5 * C * right * (1 + rtol)
    return bool(out) if np.ndim(out) == 0 else out


def two_point_threshold(x, y, p, alpha):
    """Smallest ``C`` for which the two-point inequality holds at ``(x, y)``."""
    lhs, right = _two_point_parts(x, y, p, alpha)
    with np.errstate(invalid="ignore", divide="ignore"):
        return np.where(lhs > 0, 2.0 * lhs / np.where(right > 0, right, 1.0), 0.0)


def estimate_two_point_constant(p, alpha, upper=1e3, points=400, refine=True):
    """Grid search (log-spaced in ``x, y`` on ``(0, upper]``) for the best two-point constant.

    The inequality depends on ``(x, y)`` only through ``(x^p, y^p)``, so the
    search runs in those variables; the best grid cell is then polished by a
    bounded Nelder-Mead step.
    """
    from scipy import optimize

    hi = np.log(upper ** p)
    lo = np.log(1e-12)
    grid = np.linspace(lo, hi, points)
    A, B = np.meshgrid(grid, grid, indexing="ij")
    vals = two_point_threshold(np.exp(A), np.exp(B), 1.0, alpha)
    k = np.unravel_index(np.argmax(vals), vals.shape)
    best = float(vals[k])
    if refine:
        def neg(z):
            z = np.clip(z, lo, hi)
            return -float(two_point_threshold(np.exp(z[0]), np.exp(z[1]), 1.0, alpha))

        res = optimize.minimize(neg, x0=[A[k], B[k]], method="Nelder-Mead",
                                options={"xatol": 1e-12, "fatol": 1e-15, "maxiter": 4000})
        best = max(best, -neg(res.x))
    return best


# ---------------------------------------------------------------------------
# p = 2 gradient bound for the heat semigroup


def riesz_p2_closed_form(t, n=None):
    """``sup_{1 <= k <= n} sqrt(k) e^{-tk}``; ``n=None`` means all ``k >= 1``."""
    if not t > 0:
        raise ArgumentError(f"t must be positive, got {t}")
    k_star = 1.0 / (2.0 * t)
    cands = {1, max(1, math.floor(k_star)), max(1, math.ceil(k_star))}
    if n is not None:
        cands = {min(k, n) for k in cands}
    return max(math.sqrt(k) * math.exp(-t * k) for k in cands)


@dataclass
class RieszP2Report:
    t: float
    n: int
    closed_form: float
    power_iteration: float
    product: float
    iterations: int


def riesz_p2_bound(t, n=10, seed=0, iters=400, rtol=1e-10):
    """Operator norm of ``h -> nabla P_t h`` on mean-zero ``L_2`` functions.

    The closed form is ``sup_k sqrt(k) e^{-tk}``. The power-iteration estimate
    repeatedly applies ``P_t Delta P_t`` (the Gram operator) to a random
    mean-zero start vector in value space, and reports the square root of the
    final Rayleigh quotient. ``product`` is the closed form times
    ``sqrt(e^{2t} - 1)``.
    """
    from .rng import make_rng

    if not t > 0:
        raise ArgumentError(f"t must be positive, got {t}")
    rng = make_rng(seed, "riesz-p2", n)
    h = CubeFunction(n, rng.normal(size=1 << n)).centered()
    h = h * (1.0 / lp_norm(h, 2.0))
    est, prev, it = 0.0, -1.0, 0
    for it in range(1, iters + 1):
        g = heat_semigroup(cube.laplacian(heat_semigroup(h, t)), t).centered()
        est = float(np.mean(h.values * g.values))
        nrm = lp_norm(g, 2.0)
        if nrm == 0:
            break
        h = g * (1.0 / nrm)
        if abs(est - prev) <= rtol * est:
            break
        prev = est
    closed = riesz_p2_closed_form(t, n)
    return RieszP2Report(t, n, closed, math.sqrt(max(est, 0.0)), closed * math.sqrt(math.expm1(2 * t)), it)
