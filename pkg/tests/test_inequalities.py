import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from cubelsi.cube import CubeFunction, coordinates, walsh_function
from cubelsi.errors import ArgumentError, InequalityViolation
from cubelsi.gradients import type_gradient
from cubelsi.inequalities import (SCALAR_IDS, DirichletKernel, InequalityId, beckner_limit,
                                  beckner_monotonicity, beckner_quotient, cube_kernel,
                                  estimate_two_point_constant, evaluate, evaluate_kernel_form,
                                  riesz_p2_bound, riesz_p2_closed_form, safe_ratio,
                                  two_point_holder_check, two_point_threshold)
from cubelsi.norms import TargetNorm

# the median-zero nonnegative precondition makes this one special
GENERAL_IDS = [i for i in InequalityId if i is not InequalityId.TalagrandAsym]


def sample_for(ineq, rng, n=4):
    if ineq is InequalityId.TalagrandAsym:
        vals = np.abs(rng.normal(size=1 << n))
        vals[rng.permutation(1 << n)[: (1 << n) // 2]] = 0.0
        return CubeFunction(n, vals)
    d = 1 if ineq in SCALAR_IDS else 2
    return CubeFunction(n, rng.normal(size=(1 << n, d)))


def test_parse():
    assert InequalityId.parse("main-lsi") is InequalityId.MainLSI
    assert InequalityId.parse("MainLSI") is InequalityId.MainLSI
    with pytest.raises(ArgumentError):
        InequalityId.parse("nope")


@pytest.mark.parametrize("ineq", [i for i in InequalityId if i not in {InequalityId.OrliczHypercontract,
                                                                        InequalityId.TalagrandAsym}])
def test_constant_gives_zero_ratio(ineq):
    d = 1 if ineq in SCALAR_IDS else 2
    rep = evaluate(ineq, CubeFunction.constant(3, [1.5] * d), quad=None)
    assert rep.ratio == 0.0 and rep.lhs == pytest.approx(0.0, abs=1e-12)


def test_uncentered_constant():
    # the hypercontractive bound is not centered, so constants give a finite positive ratio
    rep = evaluate("orlicz-hypercontract", CubeFunction.constant(3, 2.0), p=2, alpha=1, t=0.5)
    assert 0 < rep.ratio < 1


@pytest.mark.parametrize("ineq", list(InequalityId))
def test_scale_invariance(rng, ineq):
    f = sample_for(ineq, rng)
    r1 = evaluate(ineq, f).ratio
    r2 = evaluate(ineq, f * 3.7).ratio
    assert r2 == pytest.approx(r1, rel=1e-8)
    assert math.isfinite(r1) and r1 >= 0


@given(st.integers(1, 7), st.floats(1, 4), st.integers(0, 2**31))
def test_scalar_poincare_bounded(n, p, seed):
    f = CubeFunction(n, np.random.default_rng(seed).normal(size=1 << n))
    assert evaluate("poincare-lp", f, p=2).ratio <= 1 + 1e-12
    assert evaluate("ivv-poincare", CubeFunction(n, np.random.default_rng(seed).normal(size=(1 << n, 3))),
                    p=2).ratio <= 1 + 1e-12


def test_dictator_values():
    x1 = walsh_function(4, [1])
    assert evaluate("poincare-lp", x1, p=2).ratio == pytest.approx(1.0)
    assert evaluate("poincare-lp", x1, p=3).ratio == pytest.approx(1.0)
    rep = evaluate("pisier-log-n", CubeFunction(4, np.stack([x1.scalar()] * 2, 1)), p=2)
    assert rep.terms["log_weight"] == pytest.approx(math.log(4) + 1)
    assert rep.ratio == pytest.approx(1 / (math.log(4) + 1))


def test_scalar_only_ids_reject_vectors(rng):
    f = CubeFunction(3, rng.normal(size=(8, 2)))
    for ineq in SCALAR_IDS:
        with pytest.raises(ArgumentError):
            evaluate(ineq, f)


def test_talagrand_asym_preconditions():
    n = 3
    with pytest.raises(ArgumentError):
        evaluate("talagrand-asym", CubeFunction(n, -np.ones(8)))
    with pytest.raises(ArgumentError):
        evaluate("talagrand-asym", CubeFunction(n, np.r_[np.zeros(3), np.ones(5)]))
    rep = evaluate("talagrand-asym", CubeFunction(n, (coordinates(n)[:, 0] > 0).astype(float)))
    assert rep.ratio > 0


def test_parameter_validation(rng):
    f = CubeFunction(3, rng.normal(size=8))
    with pytest.raises(ArgumentError):
        evaluate("beckner", f, q=2.5)
    with pytest.raises(ArgumentError):
        evaluate("orlicz-hypercontract", f, t=1.5)
    with pytest.raises(ArgumentError):
        evaluate("orlicz-hypercontract", f, p=2, alpha=1.5)
    with pytest.raises(ArgumentError):
        evaluate("riesz-p2", f, t=0)
    with pytest.raises(ArgumentError):
        evaluate("poincare-lp", f, p=0.5)


def test_safe_ratio():
    assert safe_ratio(0.0, 0.0) == 0.0
    assert safe_ratio(1.0, 2.0) == 0.5
    assert isinstance(safe_ratio(np.float64(1), np.float64(4)), float)
    assert safe_ratio(1.0, 0.0, proven=False) == math.inf
    with pytest.raises(InequalityViolation):
        safe_ratio(1.0, 0.0)


def test_cube_kernel_energy_matches_type_gradient(rng):
    for n in (1, 4, 7):
        f = CubeFunction(n, rng.normal(size=(1 << n, 3)))
        energy = cube_kernel(n, 2.0).energy(f.values, 2.0)
        assert energy == pytest.approx(type_gradient(f, 2.0) ** 2, rel=1e-10)
        e3 = cube_kernel(n, 3.0).energy(f.values, 3.0)
        assert e3 == pytest.approx(type_gradient(f, 3.0) ** 3, rel=1e-10)


def test_kernel_validation():
    with pytest.raises(ArgumentError):
        DirichletKernel([0.5, 0.6], np.zeros((2, 2)))
    with pytest.raises(ArgumentError):
        DirichletKernel([0.5, 0.5], np.zeros((3, 3)))
    with pytest.raises(ArgumentError):
        DirichletKernel([0.5, 0.5], np.array([[0, -1.0], [0, 0]]))
    dense = DirichletKernel([0.5, 0.5], np.array([[0, 0.25], [0.25, 0]]))
    assert dense.energy(np.array([0.0, 2.0]), 2.0) == pytest.approx(2.0)
    assert dense.scaled(2.0).energy(np.array([0.0, 2.0]), 2.0) == pytest.approx(4.0)


def test_kernel_form_instance_tight(rng):
    # with the instance-tight scalar constant the implication must hold
    for n in (2, 4, 6):
        f = CubeFunction(n, rng.normal(size=(1 << n, 3)))
        rep = evaluate_kernel_form(cube_kernel(n), f.values)
        assert rep.vec_lhs <= rep.vec_rhs * (1 + 1e-9)
        assert rep.holds


def test_kernel_form_failed_hypothesis_is_vacuous():
    k = cube_kernel(2)
    vals = np.arange(8.0).reshape(4, 2)
    rep = evaluate_kernel_form(k, vals, C=1e-6)
    assert not rep.hypotheses_hold and rep.holds


@pytest.mark.parametrize("n", [3, 6])
def test_beckner_monotone_and_limit(rng, n):
    f = CubeFunction(n, rng.normal(size=(1 << n, 2)))
    table = beckner_monotonicity(f)
    assert table.nondecreasing
    near = beckner_quotient(f, 1.999)
    assert near == pytest.approx(beckner_limit(f), rel=0.05)
    assert beckner_quotient(f, 1.0) <= beckner_limit(f) * (1 + 1e-9)


def test_beckner_grid_validation(rng):
    with pytest.raises(ArgumentError):
        beckner_monotonicity(CubeFunction(2, rng.normal(size=4)), qs=(1.0, 2.0))


def test_two_point_at_one():
    for alpha in (0.5, 1.0, 2.0):
        L = math.log(math.e + 1)
        thr = 2 / (L ** alpha + L ** -alpha)
        assert float(two_point_threshold(1.0, 1.0, 2.0, alpha)) == pytest.approx(thr, rel=1e-14)
        assert two_point_holder_check(1.0, 1.0, 2.0, alpha, thr)
        assert not two_point_holder_check(1.0, 1.0, 2.0, alpha, thr * (1 - 1e-6))


def test_two_point_scalar_p_reduction():
    # only (x^p, y^p) matters
    assert float(two_point_threshold(2.0, 3.0, 2.0, 1.0)) == pytest.approx(
        float(two_point_threshold(4.0, 9.0, 1.0, 1.0)), rel=1e-14)


@pytest.mark.parametrize("alpha", [0.5, 1.0])
def test_two_point_constant_holds_on_random_pairs(alpha):
    C = estimate_two_point_constant(2.0, alpha, upper=30.0)
    assert C >= 1.0 - 1e-9
    rng = np.random.default_rng(11)
    x = np.exp(rng.uniform(-12, np.log(30), 10 ** 6))
    y = np.exp(rng.uniform(-12, np.log(30), 10 ** 6))
    assert np.all(two_point_holder_check(x, y, 2.0, alpha, C, rtol=1e-9))


def test_riesz_closed_form():
    assert riesz_p2_closed_form(1.0) == pytest.approx(math.exp(-1))
    assert riesz_p2_closed_form(0.1) == pytest.approx(math.sqrt(5) * math.exp(-0.5))
    assert riesz_p2_closed_form(0.1, n=2) == pytest.approx(math.sqrt(2) * math.exp(-0.2))
    t = 20.0
    assert riesz_p2_closed_form(t) * math.sqrt(math.expm1(2 * t)) == pytest.approx(1.0, rel=1e-12)
    with pytest.raises(ArgumentError):
        riesz_p2_closed_form(0.0)


@pytest.mark.parametrize("t", [0.5, 1.0, 2.0])
def test_riesz_power_iteration(t):
    rep = riesz_p2_bound(t, n=8)
    assert rep.power_iteration == pytest.approx(rep.closed_form, rel=0.01)
    assert rep.product <= 1.1


def test_riesz_report_matches_evaluator(rng):
    f = CubeFunction(6, rng.normal(size=64))
    rep = evaluate("riesz-p2", f.centered(), t=0.5)
    assert rep.ratio <= riesz_p2_closed_form(0.5, 6) * math.sqrt(math.expm1(1.0)) * (1 + 1e-10)


def test_vector_targets(rng):
    f = CubeFunction(4, rng.normal(size=(16, 3)))
    for q in (1.0, 2.0, math.inf):
        rep = evaluate("main-lsi", f, tn=TargetNorm(q))
        assert rep.params["q_target"] == TargetNorm(q).label
        assert rep.ratio > 0
