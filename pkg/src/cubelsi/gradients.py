"""Gradient-type functionals on the cube.

The central quantity is the Rademacher gradient term

    G_p(f) = ( E_delta || sum_i delta_i d_i f ||_{L_p(E)}^p )^(1/p),

computed exactly by enumerating sign vectors (``n <= 14``) or estimated by
Monte Carlo with a reported standard error.
"""
from dataclasses import dataclass
import math

import numpy as np

from . import cube
from .cube import CubeFunction, MAX_N_QUADRATIC, partials
from .errors import ArgumentError, CapabilityError
from .norms import EUCLIDEAN, lp_of_magnitudes, vector_norm
from .rng import make_rng

# elements per chunk of the (delta, x, d) tensor
_CHUNK_ELEMS = 1 << 22


@dataclass(frozen=True)
class GradientTermConfig:
    mode: str = "exact"
    samples: int = 4096
    seed: int = 0

    def __post_init__(self):
        if self.mode not in ("exact", "monte-carlo"):
            raise ArgumentError(f"mode must be 'exact' or 'monte-carlo', got {self.mode!r}")
        if self.samples < 2:
            raise ArgumentError("monte-carlo needs at least 2 samples")


EXACT = GradientTermConfig()


@dataclass(frozen=True)
class Estimate:
    value: float
    stderr: float = 0.0
    samples: int = 0

    def __post_init__(self):
        object.__setattr__(self, "value", float(self.value))
        object.__setattr__(self, "stderr", float(self.stderr))

    def __float__(self):
        return float(self.value)


def _scalar_partials(h, allow_complex=False):
    if h.d == 2 and allow_complex:
        return partials(h)
    if h.d != 1:
        raise ArgumentError(f"expected a scalar function, got d={h.d}")
    return partials(h)[:, :, 0]


def gradient_lp(h, p, complex_pair=False):
    """``(E (sum_i |d_i h|^2)^(p/2))^(1/p)`` for scalar ``h``.

    With ``complex_pair=True`` a ``d = 2`` table is read as a complex function
    and ``|.|`` is the modulus.
    """
    P = _scalar_partials(h, complex_pair)
    sq = (P ** 2).sum(axis=0)
    if sq.ndim == 2:
        sq = sq.sum(axis=1)
    return lp_of_magnitudes(np.sqrt(sq), p)


def gradient_magnitude(h):
    """Pointwise ``|nabla h|`` as a scalar CubeFunction."""
    P = _scalar_partials(h)
    return CubeFunction(h.n, np.sqrt((P ** 2).sum(axis=0)))


def _signed_sum_power_means(P, deltas, p, tn):
    """For each row of ``deltas``, ``E_x ||sum_i delta_i P_i(x)||^p`` (unnormalized by max)."""
    n, size, d = P.shape
    flat = P.reshape(n, size * d)
    out = np.empty(deltas.shape[0])
    step = max(1, _CHUNK_ELEMS // (size * d))
    for start in range(0, deltas.shape[0], step):
        block = deltas[start:start + step] @ flat
        norms = vector_norm(block.reshape(-1, size, d), tn)
        out[start:start + step] = np.mean(norms ** p, axis=1)
    return out


def estimate_rademacher_gradient(f, p, tn=EUCLIDEAN, cfg=EXACT):
    """``G_p(f)`` with its standard error (zero in exact mode)."""
    if not p >= 1:
        raise ArgumentError(f"p must be >= 1, got {p}")
    P = partials(f)
    scale = np.abs(P).max()
    if scale == 0:
        return Estimate(0.0, 0.0, 0)
    P = P / scale
    if cfg.mode == "exact":
        if f.n > MAX_N_QUADRATIC:
            raise CapabilityError(f"exact G_p supports n <= {MAX_N_QUADRATIC}, got n={f.n}")
        # the summand is even in delta: enumerate delta_n = +1 only
        vals = _signed_sum_power_means(P, cube.sign_vectors(f.n, half=True), p, tn)
        return Estimate(scale * float(np.mean(vals)) ** (1.0 / p), 0.0, vals.size)
    rng = make_rng(cfg.seed, "rademacher-gradient")
    deltas = rng.choice(np.array([-1.0, 1.0]), size=(cfg.samples, f.n))
    vals = _signed_sum_power_means(P, deltas, p, tn)
    return _power_mean_estimate(vals, p, scale)


def _power_mean_estimate(vals, p, scale):
    m = float(np.mean(vals))
    se = float(np.std(vals, ddof=1) / math.sqrt(vals.size))
    if m == 0:
        return Estimate(0.0, scale * se ** (1.0 / p), vals.size)
    g = m ** (1.0 / p)
    # delta method for m -> m^(1/p)
    return Estimate(scale * g, scale * se * g / (p * m), vals.size)


def rademacher_gradient(f, p, tn=EUCLIDEAN, cfg=EXACT):
    return estimate_rademacher_gradient(f, p, tn, cfg).value


def type_gradient(f, p, tn=EUCLIDEAN):
    """``(sum_i ||d_i f||_{L_p(E)}^p)^(1/p)``."""
    P = partials(f)
    return sum(lp_of_magnitudes(vector_norm(P[i], tn), p) ** p for i in range(f.n)) ** (1.0 / p)


def estimate_rademacher_gradient_biased(f, p, tn=EUCLIDEAN, t=1.0, cfg=None, uniforms=None):
    """``(E || sum_i delta_i(t) d_i f ||_{L_p(E)}^p)^(1/p)`` for the biased variables.

    Monte Carlo by default. ``uniforms`` (shape ``(samples, n)``) can be passed
    to couple draws across different ``t``. ``cfg.mode == 'exact'`` enumerates
    the ``2**n`` outcomes of ``xi(t)`` with their product probabilities.
    """
    if not t > 0:
        raise ArgumentError(f"t must be positive, got {t}")
    if cfg is None:
        cfg = GradientTermConfig(mode="monte-carlo")
    P = partials(f)
    scale = np.abs(P).max()
    if scale == 0:
        return Estimate(0.0, 0.0, 0)
    P = P / scale
    if cfg.mode == "exact":
        signs = cube.sign_vectors(f.n)
        plus, minus = cube.biased_values(t)
        deltas = np.where(signs > 0, plus, minus)
        q = cube.biased_threshold(t)
        probs = np.prod(np.where(signs > 0, q, 1.0 - q), axis=1)
        vals = _signed_sum_power_means(P, deltas, p, tn)
        return Estimate(scale * float(np.sum(probs * vals)) ** (1.0 / p), 0.0, vals.size)
    if uniforms is None:
        uniforms = make_rng(cfg.seed, "biased-gradient").random((cfg.samples, f.n))
    deltas = cube.biased_from_uniforms(t, uniforms)
    vals = _signed_sum_power_means(P, deltas, p, tn)
    return _power_mean_estimate(vals, p, scale)


def rademacher_gradient_biased(f, p, tn=EUCLIDEAN, t=1.0, cfg=None):
    return estimate_rademacher_gradient_biased(f, p, tn, t, cfg).value


@dataclass(frozen=True)
class QuadratureConfig:
    """Composite Gauss-Legendre rule for the semigroup gradient integral.

    ``[0, 1]`` is integrated in ``u = sqrt(t)`` with ``panels_head`` panels,
    ``[1, T]`` in ``t`` with ``panels_tail`` panels, ``order`` nodes each.
    """

    panels_head: int = 8
    panels_tail: int = 24
    order: int = 8
    T: float = 40.0
    gradient: GradientTermConfig = GradientTermConfig(mode="exact")

    def refined(self):
        return QuadratureConfig(2 * self.panels_head, 2 * self.panels_tail, self.order, self.T,
                                self.gradient)


@dataclass(frozen=True)
class IntegralEstimate:
    value: float
    tail_bound: float
    stderr: float
    nodes: int


def _gauss_nodes(a, b, panels, order):
    x, w = np.polynomial.legendre.leggauss(order)
    edges = np.linspace(a, b, panels + 1)
    lo, hi = edges[:-1, None], edges[1:, None]
    nodes = 0.5 * (hi - lo) * x[None, :] + 0.5 * (hi + lo)
    weights = 0.5 * (hi - lo) * w[None, :]
    return nodes.ravel(), weights.ravel()


def semigroup_gradient_integral(f, tn=EUCLIDEAN, quad=QuadratureConfig()):
    """``int_0^inf E||sum_i delta_i(t) d_i f||_{L_1(E)} dt / sqrt(e^{2t} - 1)``.

    The ``t^{-1/2}`` endpoint singularity is removed by ``t = u^2`` on
    ``(0, 1]``; the tail beyond ``T`` is dropped and bounded by
    ``sum_i ||d_i f||_{L_1(E)} * e^{-T} / sqrt(1 - e^{-2T})``, using
    ``E|delta_i(t)| <= 1``. In Monte Carlo mode all nodes share the same
    uniforms, so the integrand is a deterministic function of ``t``.
    """
    cfg = quad.gradient
    uniforms = None
    if cfg.mode == "monte-carlo":
        uniforms = make_rng(cfg.seed, "semigroup-integral").random((cfg.samples, f.n))

    def g(t):
        est = estimate_rademacher_gradient_biased(f, 1.0, tn, t, cfg, uniforms=uniforms)
        return est.value, est.stderr

    total, var, count = 0.0, 0.0, 0
    u_nodes, u_w = _gauss_nodes(0.0, 1.0, quad.panels_head, quad.order)
    for u, w in zip(u_nodes, u_w):
        t = u * u
        val, se = g(t)
        jac = 2.0 * u / math.sqrt(math.expm1(2.0 * t))
        total += w * jac * val
        var += (w * jac * se) ** 2
        count += 1
    t_nodes, t_w = _gauss_nodes(1.0, quad.T, quad.panels_tail, quad.order)
    for t, w in zip(t_nodes, t_w):
        val, se = g(t)
        jac = 1.0 / math.sqrt(math.expm1(2.0 * t))
        total += w * jac * val
        var += (w * jac * se) ** 2
        count += 1
    P = partials(f)
    l1_sum = sum(float(np.mean(vector_norm(P[i], tn))) for i in range(f.n))
    tail = l1_sum * math.exp(-quad.T) / math.sqrt(-math.expm1(-2.0 * quad.T))
    # stderr is an upper bound: node errors are positively correlated
    return IntegralEstimate(total, tail, math.sqrt(var) if cfg.mode != "exact" else 0.0, count)


def asymmetric_gradient(h):
    """``Mh(x) = (sum_i (d_i h(x))_+^2)^(1/2)``."""
    P = _scalar_partials(h)
    pos = np.maximum(P, 0.0)
    return CubeFunction(h.n, np.sqrt((pos ** 2).sum(axis=0)))


def positive_part(h):
    if h.d != 1:
        raise ArgumentError(f"expected a scalar function, got d={h.d}")
    return CubeFunction(h.n, np.maximum(h.values, 0.0))


def lower_median(h, weights=None):
    """Smallest attained value ``m`` with ``P{h <= m} >= 1/2`` (then also ``P{h >= m} >= 1/2``)."""
    vals = h.values[:, 0] if hasattr(h, "values") else np.asarray(h, dtype=np.float64)
    if hasattr(h, "values") and h.d != 1:
        raise ArgumentError(f"expected a scalar function, got d={h.d}")
    order = np.argsort(vals, kind="stable")
    w = np.full(vals.size, 1.0 / vals.size) if weights is None else np.asarray(weights)[order]
    cdf = np.cumsum(w)
    k = int(np.searchsorted(cdf, 0.5 - 1e-15, side="left"))
    return float(vals[order][k])


def norm_function(f, tn=EUCLIDEAN):
    """``x -> ||f(x)||_E`` as a scalar CubeFunction."""
    return CubeFunction(f.n, vector_norm(f.values, tn))


def m_control_field(f, tn=EUCLIDEAN):
    """``(E_delta ||sum_i delta_i d_i f(x)||_E^2)^(1/2)`` at every cube point."""
    if f.n > MAX_N_QUADRATIC:
        raise CapabilityError(f"exact enumeration supports n <= {MAX_N_QUADRATIC}, got n={f.n}")
    P = partials(f)
    deltas = cube.sign_vectors(f.n, half=True)
    n, size, d = P.shape
    acc = np.zeros(size)
    flat = P.reshape(n, size * d)
    step = max(1, _CHUNK_ELEMS // (size * d))
    for start in range(0, deltas.shape[0], step):
        block = (deltas[start:start + step] @ flat).reshape(-1, size, d)
        acc += (vector_norm(block, tn) ** 2).sum(axis=0)
    return np.sqrt(acc / deltas.shape[0])


def m_control_rhs(f, x, tn=EUCLIDEAN):
    """The right side of the pointwise bound on ``M||f||_E`` at the point ``x``."""
    u = x.index if isinstance(x, cube.CubePoint) else int(x)
    if f.n > MAX_N_QUADRATIC:
        raise CapabilityError(f"exact enumeration supports n <= {MAX_N_QUADRATIC}, got n={f.n}")
    P = partials(f)[:, u, :]
    deltas = cube.sign_vectors(f.n, half=True)
    return float(np.sqrt(np.mean(vector_norm(deltas @ P, tn) ** 2)))
