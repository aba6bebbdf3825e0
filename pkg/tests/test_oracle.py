import math

import numpy as np
import pytest

from riskbound import bounds as B
from riskbound import distortion as D
from riskbound import oracle as O
from riskbound.errors import BoundViolated, DomainError, NonConvergent

STD = B.MomentInfo(0.0, 1.0)


def test_identity_distortion_is_the_mean():
    ident = D.custom_distortion(lambda u: np.asarray(u, dtype=float))
    Q = O.QuantileFn.from_callable(lambda u: 0.2 + u)  # uniform on [0.2, 1.2]
    val = O.riskmetric_of_quantile(ident, "riskmetric", {}, Q)
    assert val == pytest.approx(0.7, abs=1e-9)


def test_gini_of_uniform01():
    Q = O.QuantileFn.from_callable(lambda u: u)
    val = O.riskmetric_of_quantile(D.catalog_lookup("GiniSemidiff", {}), None, None, Q)
    assert val == pytest.approx(1.0 / 6.0, abs=1e-8)


def test_es_of_uniform01():
    Q = O.QuantileFn.from_callable(lambda u: u)
    val = O.riskmetric_of_quantile(D.catalog_lookup("ES", {"p": 0.5}), None, None, Q)
    assert val == pytest.approx(0.75, abs=1e-10)


def test_gaussian_gini_value():
    from scipy.special import ndtri

    Q = O.QuantileFn(fn=lambda u: ndtri(np.asarray(u, dtype=float)),
                     tail_class="log-divergent",
                     upper_tail=lambda t: -ndtri(np.asarray(t, dtype=float)),
                     lower_tail=lambda t: ndtri(np.asarray(t, dtype=float)))
    val = O.riskmetric_of_quantile(D.catalog_lookup("GiniSemidiff", {}), None, None, Q)
    assert val == pytest.approx(1.0 / math.sqrt(math.pi), abs=1e-6)


def test_weighted_unit_weight_consistency():
    g = D.catalog_lookup("CRE", {})
    Q = O.QuantileFn.from_callable(lambda u: 1.0 + u)
    plain = O.riskmetric_of_quantile(g, "entropy", {}, Q)
    weighted = O.weighted_entropy_of_quantile(g, D.unit_weight(), Q)
    assert weighted == pytest.approx(plain, rel=1e-10)


def test_weighted_attainment():
    wm = B.MomentInfo(5.0, 2.0, weighted=True)
    res = B.worst_case_weighted(D.catalog_lookup("WCRE", {}), D.linear_weight(), wm)
    val = O.weighted_entropy_of_quantile(D.catalog_lookup("WCRE", {}),
                                         D.linear_weight(), res.quantile)
    assert val == pytest.approx(res.sup_value, rel=1e-5)


def test_weighted_constant_is_zero():
    g = D.catalog_lookup("CRE", {})
    val = O.weighted_entropy_of_quantile(g, D.linear_weight(),
                                         O.QuantileFn.constant(3.0))
    assert val == pytest.approx(0.0, abs=1e-10)


def test_quantile_moments_cases():
    mean, var = O.quantile_moments(O.QuantileFn.constant(2.5))
    assert (mean, var) == (pytest.approx(2.5, abs=1e-12), pytest.approx(0.0, abs=1e-12))
    # two-point worst case of the expected shortfall at level 0.9
    res = B.worst_case_bound(D.catalog_lookup("ES", {"p": 0.9}), moments=STD)
    mean, var = O.quantile_moments(res.quantile)
    assert mean == pytest.approx(0.0, abs=1e-10)
    assert var == pytest.approx(1.0, rel=1e-10)
    res = B.worst_case_bound(D.catalog_lookup("CRE", {}), moments=STD)
    mean, var = O.quantile_moments(res.quantile)
    assert mean == pytest.approx(0.0, abs=1e-6)
    assert var == pytest.approx(1.0, rel=1e-6)


def test_grid_quantile_and_step_interpolation():
    us = np.linspace(0.0, 1.0, 11)
    qs = np.linspace(-1.0, 1.0, 11)
    Q = O.QuantileFn.from_grid(us, qs, interp="linear")
    assert float(Q.fn(0.55)) == pytest.approx(0.1)
    Qs = O.QuantileFn.from_grid(us, qs, interp="step")
    assert float(Qs.fn(0.55)) == pytest.approx(0.0)
    with pytest.raises(DomainError):
        O.QuantileFn.from_grid(us, qs[::-1], interp="linear")
    with pytest.raises(DomainError):
        O.QuantileFn.from_grid(us, qs, interp="cubic")


def test_midpoint_and_trapezoid_agree_for_continuous_transform():
    g = D.catalog_lookup("TCRE", {"p": 0.5})
    res = B.worst_case_bound(g, moments=STD)
    mid = O.riskmetric_of_quantile(g, None, None, res.quantile, rule="midpoint")
    trap = O.riskmetric_of_quantile(g, None, None, res.quantile, rule="trapezoid")
    assert mid == pytest.approx(trap, rel=1e-6)


def test_nonconvergent_raised_for_unreachable_tolerance():
    res = B.worst_case_bound(D.catalog_lookup("CRE", {}), moments=STD)
    with pytest.raises(NonConvergent):
        O.riskmetric_of_quantile(D.catalog_lookup("CRE", {}), None, None,
                                 res.quantile, rel_tol=1e-16)


def test_shapes_are_standardized():
    for kind in O._SHAPES:
        rng = np.random.default_rng(17)
        Q = O._standard_shape(kind, rng)
        mean, var = O.quantile_moments(Q)
        assert mean == pytest.approx(0.0, abs=1e-8)
        assert var == pytest.approx(1.0, rel=1e-8)


def test_stress_empty_and_deterministic():
    g = D.catalog_lookup("GiniSemidiff", {})
    empty = O.feasibility_stress(g, None, None, STD, trials=0, seed=9)
    assert empty.trials == 0 and empty.worst_shape == ""
    r1 = O.feasibility_stress(g, None, None, STD, trials=120, seed=9)
    r2 = O.feasibility_stress(g, None, None, STD, trials=120, seed=9)
    assert r1.to_json() == r2.to_json()
    r3 = O.feasibility_stress(g, None, None, STD, trials=120, seed=10)
    assert r3.to_json() != r1.to_json()


def test_stress_uniform_attains_gini():
    rep = O.feasibility_stress(D.catalog_lookup("GiniSemidiff", {}), None, None,
                               STD, trials=60, seed=3)
    assert rep.worst_shape == "uniform"
    assert abs(rep.bound - rep.shape_max["uniform"]) < 1e-9
    assert rep.shape_max["gaussian"] == pytest.approx(1.0 / math.sqrt(math.pi), abs=1e-6)


def test_stress_detects_violation(monkeypatch):
    # shrink the engine's bound: the dominance check must trip
    import dataclasses

    real = B.worst_case_bound

    def shrunken(*args, **kwargs):
        res = real(*args, **kwargs)
        return dataclasses.replace(res, sup_value=res.sup_value * 0.9)

    monkeypatch.setattr(B, "worst_case_bound", shrunken)
    with pytest.raises(BoundViolated) as exc:
        O.feasibility_stress(D.catalog_lookup("GiniSemidiff", {}), None, None,
                             STD, trials=12, seed=1)
    assert exc.value.observed > exc.value.bound
    assert exc.value.quantile is not None
