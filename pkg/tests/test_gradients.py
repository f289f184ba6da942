import itertools
import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from cubelsi.cube import CubeFunction, coordinates, walsh_function
from cubelsi.errors import ArgumentError, CapabilityError
from cubelsi.gradients import (GradientTermConfig, QuadratureConfig, asymmetric_gradient,
                               estimate_rademacher_gradient, estimate_rademacher_gradient_biased,
                               gradient_lp, lower_median, m_control_field, m_control_rhs,
                               positive_part, rademacher_gradient, semigroup_gradient_integral,
                               type_gradient)
from cubelsi.norms import TargetNorm, lp_norm


def brute_partials(f):
    xs = coordinates(f.n)
    out = np.empty((f.n, 1 << f.n, f.d))
    for i in range(f.n):
        for u in range(1 << f.n):
            out[i, u] = (f.values[u] - f.values[u ^ (1 << i)]) / 2
    return out


def brute_G(f, p, q):
    # independent oracle: full loop over delta in {-1, 1}^n
    P = brute_partials(f)
    acc = 0.0
    for delta in itertools.product([-1.0, 1.0], repeat=f.n):
        s = np.tensordot(np.array(delta), P, axes=1)
        acc += np.mean(np.linalg.norm(s, ord=q, axis=1) ** p)
    return (acc / 2 ** f.n) ** (1 / p)


def test_gradient_lp_examples():
    x1, x2 = walsh_function(3, [1]), walsh_function(3, [2])
    assert gradient_lp(x1 + x2, 2) == pytest.approx(math.sqrt(2))
    assert gradient_lp(x1, 1.3) == pytest.approx(1.0)
    assert gradient_lp(CubeFunction.constant(4, 2.0), 2) == 0.0
    with pytest.raises(ArgumentError):
        gradient_lp(CubeFunction(2, np.ones((4, 2))), 2)


def test_gradient_lp_complex_pair():
    # x1 + i x2 has |d_1|^2 + |d_2|^2 = 2 at every point
    f = CubeFunction(2, np.stack([walsh_function(2, [1]).scalar(), walsh_function(2, [2]).scalar()], 1))
    assert gradient_lp(f, 3, complex_pair=True) == pytest.approx(math.sqrt(2))


@pytest.mark.parametrize("q", [1.0, 2.0, math.inf])
@pytest.mark.parametrize("p", [1.0, 2.0, 3.0])
def test_G_against_brute_force(rng, p, q):
    for n in (1, 3, 5):
        f = CubeFunction(n, rng.normal(size=(1 << n, 3)))
        assert rademacher_gradient(f, p, TargetNorm(q)) == pytest.approx(brute_G(f, p, q), rel=1e-12)


def test_G_examples():
    f = CubeFunction(2, np.stack([walsh_function(2, [1]).scalar(), walsh_function(2, [2]).scalar()], 1))
    assert rademacher_gradient(f, 2) == pytest.approx(math.sqrt(2))
    assert rademacher_gradient(CubeFunction.constant(3, [1.0, 2.0]), 2) == 0.0
    with pytest.raises(ArgumentError):
        rademacher_gradient(f, 0.5)


@given(st.integers(1, 8), st.integers(1, 4), st.integers(0, 2**31))
def test_G2_identity(n, d, seed):
    f = CubeFunction(n, np.random.default_rng(seed).normal(size=(1 << n, d)))
    P = brute_partials(f) if n <= 4 else None
    lhs = rademacher_gradient(f, 2) ** 2
    if P is None:
        from cubelsi.cube import partials
        P = partials(f)
    assert lhs == pytest.approx(sum(np.mean(np.sum(P[i] ** 2, axis=1)) for i in range(n)), rel=1e-10)


@given(st.integers(1, 7), st.floats(1, 4), st.floats(-5, 5), st.integers(0, 2**31))
def test_G_homogeneous(n, p, c, seed):
    f = CubeFunction(n, np.random.default_rng(seed).normal(size=(1 << n, 2)))
    assert rademacher_gradient(f * c, p) == pytest.approx(abs(c) * rademacher_gradient(f, p), rel=1e-10, abs=1e-12)


def test_G_monte_carlo_within_stderr(rng):
    f = CubeFunction(8, rng.normal(size=(256, 2)))
    exact = rademacher_gradient(f, 1.5)
    est = estimate_rademacher_gradient(f, 1.5, cfg=GradientTermConfig("monte-carlo", 20000, seed=3))
    assert est.stderr > 0
    assert abs(est.value - exact) <= 3 * est.stderr


def test_G_exact_capability():
    f = CubeFunction(15, np.zeros(1 << 15))
    f = f + walsh_function(15, [1])
    with pytest.raises(CapabilityError):
        rademacher_gradient(f, 2)


def test_gradient_config_validation():
    with pytest.raises(ArgumentError):
        GradientTermConfig(mode="quasi")
    with pytest.raises(ArgumentError):
        GradientTermConfig(mode="monte-carlo", samples=1)


def test_type_gradient(rng):
    f = CubeFunction(4, rng.normal(size=(16, 2)))
    P = brute_partials(f)
    expect = sum(np.mean(np.linalg.norm(P[i], axis=1) ** 3) for i in range(4)) ** (1 / 3)
    assert type_gradient(f, 3) == pytest.approx(expect, rel=1e-12)
    # at p = 2 with a Euclidean target, type and Rademacher gradients coincide
    assert type_gradient(f, 2) == pytest.approx(rademacher_gradient(f, 2), rel=1e-12)


@pytest.mark.parametrize("t", [0.05, 0.5, 2.0])
def test_biased_dictator_exact(t):
    # f = x1: G reduces to the moments of one delta(t), which has unit variance
    f = walsh_function(3, [1])
    exact = estimate_rademacher_gradient_biased(f, 2.0, t=t, cfg=GradientTermConfig("exact")).value
    assert exact == pytest.approx(1.0, rel=1e-12)
    e = math.exp(-t)
    q = (1 + e) / 2
    a, b = (1 - e) / math.sqrt(1 - e * e), (1 + e) / math.sqrt(1 - e * e)
    first = estimate_rademacher_gradient_biased(f, 1.0, t=t, cfg=GradientTermConfig("exact")).value
    assert first == pytest.approx(q * a + (1 - q) * b, rel=1e-12)


def test_biased_monte_carlo_and_limit(rng):
    f = CubeFunction(5, rng.normal(size=32))
    exact = estimate_rademacher_gradient_biased(f, 2.0, t=0.7, cfg=GradientTermConfig("exact")).value
    mc = estimate_rademacher_gradient_biased(f, 2.0, t=0.7, cfg=GradientTermConfig("monte-carlo", 40000, 1))
    assert abs(mc.value - exact) <= 4 * mc.stderr
    # large t: the biased variables approach Rademacher signs
    big = estimate_rademacher_gradient_biased(f, 1.5, t=30.0, cfg=GradientTermConfig("exact")).value
    assert big == pytest.approx(rademacher_gradient(f, 1.5), rel=1e-9)
    with pytest.raises(ArgumentError):
        estimate_rademacher_gradient_biased(f, 1.0, t=0.0)


def test_semigroup_integral_converges(rng):
    f = CubeFunction(4, rng.normal(size=(16, 2)))
    coarse = semigroup_gradient_integral(f)
    fine = semigroup_gradient_integral(f, quad=QuadratureConfig().refined())
    assert abs(coarse.value - fine.value) < 0.01 * fine.value
    assert coarse.tail_bound < 1e-12
    assert coarse.stderr == 0.0


def test_semigroup_integral_dictator():
    # f = x1: integrand E|delta(t)| = 2 q (1 - q) (a - b) with q, a, b from the biased law
    from cubelsi.cube import biased_threshold, biased_values
    from scipy import integrate

    def g(t):
        q = biased_threshold(t)
        a, b = biased_values(t)
        return (q * abs(a) + (1 - q) * abs(b)) / math.sqrt(math.expm1(2 * t))

    oracle = integrate.quad(g, 0, 1, limit=200)[0] + integrate.quad(g, 1, 60)[0]
    val = semigroup_gradient_integral(walsh_function(3, [1])).value
    assert val == pytest.approx(oracle, rel=1e-6)


def test_asymmetric_gradient_example():
    # indicator of {x1 = 1}: d_1 h = 1/2 on the support, -1/2 off it
    n = 3
    h = CubeFunction(n, (coordinates(n)[:, 0] > 0).astype(float))
    M = asymmetric_gradient(h).scalar()
    assert np.allclose(M, 0.5 * h.scalar())
    assert np.allclose(positive_part(h - CubeFunction.constant(n, 0.5)).scalar(), 0.5 * h.scalar())


def test_lower_median():
    assert lower_median(np.array([0.0, 2.0])) == 0.0
    assert lower_median(np.array([3.0, 1.0, 2.0])) == 2.0
    assert lower_median(np.array([0.0, 5.0]), weights=[0.3, 0.7]) == 5.0


@given(st.integers(1, 6), st.floats(-10, 10), st.integers(0, 2**31))
def test_M_translation_invariant(n, c, seed):
    h = CubeFunction(n, np.random.default_rng(seed).normal(size=1 << n))
    shifted = h - CubeFunction.constant(n, c)
    assert np.allclose(asymmetric_gradient(shifted).scalar(), asymmetric_gradient(h).scalar())


def test_m_control_euclidean_formula(rng):
    # for a Hilbert target the delta-average reduces to sum_i ||d_i f(x)||^2
    f = CubeFunction(5, rng.normal(size=(32, 3)))
    P = brute_partials(f)
    expect = np.sqrt(np.sum(np.sum(P ** 2, axis=2), axis=0))
    field = m_control_field(f)
    assert np.allclose(field, expect, rtol=1e-12)
    for u in (0, 7, 31):
        assert m_control_rhs(f, u) == pytest.approx(expect[u], rel=1e-12)


def test_m_control_sup_norm_brute(rng):
    f = CubeFunction(3, rng.normal(size=(8, 2)))
    P = brute_partials(f)
    tn = TargetNorm(math.inf)
    field = m_control_field(f, tn)
    for u in range(8):
        acc = np.mean([np.max(np.abs(np.tensordot(np.array(dl), P[:, u], axes=1))) ** 2
                       for dl in itertools.product([-1, 1], repeat=3)])
        assert field[u] == pytest.approx(math.sqrt(acc), rel=1e-12)
