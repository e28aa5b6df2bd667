import numpy as np
import pytest
from hypothesis import given, strategies as st

from sparsepath import (
    DegenerateCurvatureError,
    ParameterError,
    RegularizerSpec,
    penalty_derivative,
    penalty_total,
    penalty_value,
    scalar_threshold,
)

from oracles import grid_minimize_1d, penalty_by_quadrature, subproblem_objective


def test_spec_validation():
    assert RegularizerSpec("l1").kind == "l1"
    assert RegularizerSpec("mcp").gamma == 3.0
    assert RegularizerSpec("scad").gamma == 3.7
    with pytest.raises(ParameterError):
        RegularizerSpec("mcp", gamma=1.0)
    with pytest.raises(ParameterError):
        RegularizerSpec("scad", gamma=2.0)
    with pytest.raises(ParameterError):
        RegularizerSpec("mcp", gamma=np.inf)
    with pytest.raises(ParameterError):
        RegularizerSpec("ridge")


def test_penalty_value_closed_forms():
    assert penalty_value(RegularizerSpec("l1"), 2.0, 0.5) == pytest.approx(1.0)
    assert penalty_value(RegularizerSpec("mcp", 2.0), 0.0, 1.0) == 0.0
    # saturation values checked against quadrature of the derivative
    assert penalty_value(RegularizerSpec("mcp", 2.0), 5.0, 1.0) == pytest.approx(
        penalty_by_quadrature("mcp", 2.0, 5.0, 1.0), abs=1e-10)
    assert penalty_value(RegularizerSpec("mcp", 2.0), 5.0, 1.0) == pytest.approx(1.0)
    assert penalty_value(RegularizerSpec("scad", 3.7), 10.0, 1.0) == pytest.approx(
        penalty_by_quadrature("scad", 3.7, 10.0, 1.0), abs=1e-10)
    assert penalty_value(RegularizerSpec("scad", 3.7), 10.0, 1.0) == pytest.approx(2.35)


@pytest.mark.parametrize("kind,gamma", [("l1", None), ("mcp", 3.0), ("scad", 3.7)])
def test_penalty_value_matches_quadrature(kind, gamma, rng):
    spec = RegularizerSpec(kind, gamma)
    for _ in range(25):
        t = float(rng.uniform(-8, 8))
        lam = float(rng.uniform(0, 2.5))
        assert penalty_value(spec, t, lam) == pytest.approx(
            penalty_by_quadrature(kind, spec.gamma or 1.0, t, lam), abs=1e-9)


@pytest.mark.parametrize("kind,gamma", [("l1", None), ("mcp", 3.0), ("scad", 3.7)])
def test_penalty_symmetry_monotonicity(kind, gamma, rng):
    spec = RegularizerSpec(kind, gamma)
    ts = np.sort(rng.uniform(0, 10, size=40))
    lam = 0.8
    vals = [penalty_value(spec, t, lam) for t in ts]
    assert all(penalty_value(spec, -t, lam) == pytest.approx(v) for t, v in zip(ts, vals))
    assert np.all(np.diff(vals) >= -1e-12)
    assert penalty_value(spec, 0.0, lam) == 0.0


def test_penalty_total_matches_scalar_sum(rng):
    for kind, gamma in (("l1", None), ("mcp", 2.5), ("scad", 4.0)):
        spec = RegularizerSpec(kind, gamma)
        beta = rng.normal(size=30) * 3
        lam = 0.7
        total = sum(penalty_value(spec, float(t), lam) for t in beta)
        assert penalty_total(spec, beta, lam) == pytest.approx(total, rel=1e-12)


def test_threshold_trivial_cases():
    assert scalar_threshold(RegularizerSpec("l1"), 0.0, 1.0, 0.3) == 0.0
    assert scalar_threshold(RegularizerSpec("l1"), 2.0, 1.0, 0.5) == pytest.approx(1.5)
    assert scalar_threshold(RegularizerSpec("mcp", 3.0), 1.2, 1.0, 1.0) == pytest.approx(0.3)
    assert scalar_threshold(RegularizerSpec("mcp", 3.0), 4.0, 1.0, 1.0) == pytest.approx(4.0)
    for kind in ("l1", "mcp", "scad"):
        assert scalar_threshold(RegularizerSpec(kind), 3.0, 2.0, 0.0) == pytest.approx(1.5)
    # exact tie |u| = lambda sits in the subdifferential: return 0
    for kind in ("l1", "mcp", "scad"):
        assert scalar_threshold(RegularizerSpec(kind), 0.7, 1.0, 0.7) == 0.0
        assert scalar_threshold(RegularizerSpec(kind), -0.7, 1.0, 0.7) == 0.0


def test_threshold_errors():
    with pytest.raises(ParameterError):
        scalar_threshold(RegularizerSpec("l1"), 1.0, 0.0, 0.5)
    with pytest.raises(DegenerateCurvatureError):
        scalar_threshold(RegularizerSpec("mcp", 3.0), 1.0, 0.25, 0.5)
    with pytest.raises(DegenerateCurvatureError):
        scalar_threshold(RegularizerSpec("scad", 3.7), 1.0, 0.25, 0.5)


def _random_tuple(rng):
    kind = rng.choice(["l1", "mcp", "scad"])
    if kind == "l1":
        spec = RegularizerSpec("l1")
    elif kind == "mcp":
        spec = RegularizerSpec("mcp", float(rng.uniform(1.05, 10.0)))
    else:
        spec = RegularizerSpec("scad", float(rng.uniform(2.05, 10.0)))
    u = float(rng.uniform(-10, 10))
    lam = float(rng.uniform(0, 3))
    floor = spec.curvature_floor()
    v = float(rng.uniform(max(0.2, floor * 1.05), 5.0))
    return spec, u, v, lam


def test_threshold_agrees_with_grid_oracle(rng):
    for _ in range(300):
        spec, u, v, lam = _random_tuple(rng)
        got = scalar_threshold(spec, u, v, lam)
        want = grid_minimize_1d(spec.kind, spec.gamma or 1.0, u, v, lam)
        assert got == pytest.approx(want, abs=1e-6), (spec, u, v, lam)


def test_threshold_zero_region(rng):
    for kind, gamma in (("l1", None), ("mcp", 3.0), ("scad", 3.7)):
        spec = RegularizerSpec(kind, gamma)
        for _ in range(200):
            lam = float(rng.uniform(0.1, 3.0))
            u = float(rng.uniform(-lam, lam))
            assert scalar_threshold(spec, u, 1.0, lam) == 0.0


def test_mcp_approaches_l1_for_huge_gamma(rng):
    spec = RegularizerSpec("mcp", 1e8)
    l1 = RegularizerSpec("l1")
    for _ in range(300):
        u = float(rng.uniform(-10, 10))
        v = float(rng.uniform(0.2, 5.0))
        lam = float(rng.uniform(0, 3))
        assert scalar_threshold(spec, u, v, lam) == pytest.approx(
            scalar_threshold(l1, u, v, lam), abs=1e-6)


@given(st.sampled_from(["l1", "mcp", "scad"]), st.floats(-9, 9), st.floats(0.5, 5.0),
       st.floats(0.0, 3.0))
def test_threshold_continuity_in_u(kind, u, v, lam):
    spec = RegularizerSpec(kind)
    if v <= spec.curvature_floor():
        return
    du = 1e-4
    a = scalar_threshold(spec, u, v, lam)
    b = scalar_threshold(spec, u + du, v, lam)
    assert abs(a - b) <= 1e-2


@given(st.sampled_from(["l1", "mcp", "scad"]), st.floats(-9, 9), st.floats(0.6, 5.0),
       st.floats(0.0, 3.0))
def test_threshold_result_is_local_min(kind, u, v, lam):
    spec = RegularizerSpec(kind)
    t = scalar_threshold(spec, u, v, lam)
    phi = lambda s: float(subproblem_objective(kind, spec.gamma or 1.0, u, v, lam, s))
    assert phi(t) <= phi(t + 1e-4) + 1e-12
    assert phi(t) <= phi(t - 1e-4) + 1e-12


@given(st.sampled_from(["l1", "mcp", "scad"]), st.floats(-9, 9), st.floats(0.6, 5.0),
       st.floats(0.05, 3.0))
def test_threshold_sign_and_zero_iff(kind, u, v, lam):
    spec = RegularizerSpec(kind)
    t = scalar_threshold(spec, u, v, lam)
    if abs(u) <= lam:
        assert t == 0.0
    else:
        assert t != 0.0
        assert np.sign(t) == np.sign(u)


def test_penalty_derivative_values():
    mcp = RegularizerSpec("mcp", 3.0)
    assert penalty_derivative(mcp, 0.0, 1.0) == pytest.approx(1.0)
    assert penalty_derivative(mcp, 1.5, 1.0) == pytest.approx(0.5)
    assert penalty_derivative(mcp, 4.0, 1.0) == 0.0
    scad = RegularizerSpec("scad", 3.7)
    assert penalty_derivative(scad, 0.5, 1.0) == pytest.approx(1.0)
    assert penalty_derivative(scad, 2.0, 1.0) == pytest.approx((3.7 - 2.0) / 2.7)
    assert penalty_derivative(scad, 5.0, 1.0) == 0.0
