"""Exponential-map series: charts, hand values, ODE oracle, recursions."""

import math
import random
from fractions import Fraction

import pytest

from defquant.exactnum import QC
from defquant.exactpoly import Poly, sin_jet, cos_jet
from defquant.geodesics import (MetricJet, CovariantTensorJet,
                                exp_map_series, series_eval,
                                restrict_velocity, geodesic_ode_oracle,
                                sphere_gamma_fn, poincare_gamma_fn,
                                metric_gamma_fn, classical_fedosov_taylor)

TH0 = math.asin(0.6)


@pytest.fixture(scope="module")
def sphere8():
    return MetricJet.sphere(8)


@pytest.fixture(scope="module")
def sphere_series(sphere8):
    return exp_map_series(sphere8, 8)


@pytest.fixture(scope="module")
def poincare8():
    return MetricJet.poincare_half_plane(8)


@pytest.fixture(scope="module")
def poincare_series(poincare8):
    return exp_map_series(poincare8, 8)


# ---------------------------------------------------------------------
# metric jets
# ---------------------------------------------------------------------

def test_metric_rejects_asymmetric_jets():
    x1 = Poly.var(2, 0, 4)
    with pytest.raises(ValueError, match="symmetric"):
        MetricJet(2, 4, [[Poly.one(2, 4), x1], [Poly.zero(2, 4),
                                               Poly.one(2, 4)]])


def test_metric_rejects_singular_base_point():
    x1 = Poly.var(2, 0, 4)
    with pytest.raises(ValueError, match="singular"):
        MetricJet(2, 4, [[x1, Poly.zero(2, 4)],
                         [Poly.zero(2, 4), Poly.one(2, 4)]])


def test_inverse_jet_really_inverts():
    m = MetricJet.random_metric(2, 5, random.Random(12))
    for i in range(2):
        for j in range(2):
            acc = Poly.zero(2, 5)
            for k in range(2):
                acc = acc + m.g[i][k] * m.g_inv[k][j]
            want = Poly.const(2, 1 if i == j else 0, 5)
            assert acc == want


def test_sphere_christoffels_are_the_closed_forms(sphere8):
    # the Christoffel jets sit one differentiation below the metric order,
    # so the closed forms are compared at truncation 7
    s = sin_jet(Fraction(3, 5), Fraction(4, 5), 2, 0, 8)
    c = cos_jet(Fraction(3, 5), Fraction(4, 5), 2, 0, 8)
    assert sphere8.gamma[0][1][1] == (-(s * c)).truncate(7)
    assert sphere8.gamma[1][0][1] == (c * s.inverse()).truncate(7)
    assert sphere8.gamma[0][0][0].is_zero()
    assert sphere8.gamma[1][1][1].is_zero()


def test_poincare_christoffels_are_the_closed_forms(poincare8):
    w = (Poly.one(2, 8) + Poly.var(2, 1, 8)).inverse().truncate(7)
    assert poincare8.gamma[0][0][1] == -w
    assert poincare8.gamma[1][0][0] == w
    assert poincare8.gamma[1][1][1] == -w
    assert poincare8.gamma[0][0][0].is_zero()


def test_jet_gammas_match_float_gammas_off_base(sphere8):
    got = metric_gamma_fn(sphere8)((0.05, 0.0))
    want = sphere_gamma_fn((TH0 + 0.05, 0.0))
    for k in range(2):
        for i in range(2):
            for j in range(2):
                assert got[k][i][j] == pytest.approx(want[k][i][j],
                                                     abs=1e-7)


# ---------------------------------------------------------------------
# series structure
# ---------------------------------------------------------------------

def test_flat_series_is_offset_plus_velocity():
    phi = exp_map_series(MetricJet.flat(2, 5), 5)
    assert phi[0] == Poly(4, {(1, 0, 0, 0): QC(1), (0, 0, 1, 0): QC(1)})
    assert phi[1] == Poly(4, {(0, 1, 0, 0): QC(1), (0, 0, 0, 1): QC(1)})


def test_sphere_meridians_are_unit_speed_lines(sphere_series):
    polar = restrict_velocity(sphere_series[0], 2, (1, 0))
    azimuth = restrict_velocity(sphere_series[1], 2, (1, 0))
    assert polar == Poly(3, {(1, 0, 0): QC(1), (0, 0, 1): QC(1)})
    assert azimuth == Poly(3, {(0, 1, 0): QC(1)})


def test_poincare_vertical_ray_is_exponential(poincare_series):
    # y(t) = e^t from the base: offset coefficients 1/k!; x never moves
    horiz = restrict_velocity(poincare_series[0], 2, (0, 1))
    assert horiz == Poly(3, {(1, 0, 0): QC(1)})
    vert = restrict_velocity(poincare_series[1], 2, (0, 1))
    for k in range(1, 9):
        assert vert.terms.get((0, 0, k)) == QC(Fraction(1, math.factorial(k)))


def test_sphere_hand_coefficients(sphere_series):
    # quadratic: -(1/2) Gamma^0_{11} = (1/2) s0 c0 = 6/25
    assert sphere_series[0].terms[(0, 0, 0, 2)] == QC(Fraction(6, 25))
    # cubic v_0 v_1^2: -(1/6) [2 cot * s0 c0 + 2 cot * s0 c0 + (s0^2 - c0^2
    # + 2 cot * s0 c0)] = -19/50 at s0 = 3/5, c0 = 4/5
    assert sphere_series[0].terms[(0, 0, 1, 2)] == QC(Fraction(-19, 50))


def test_order_guards():
    flat3 = MetricJet.flat(2, 3)
    with pytest.raises(ValueError, match="order"):
        exp_map_series(flat3, 5)
    with pytest.raises(ValueError, match="order"):
        classical_fedosov_taylor(flat3, 0, 5)


# ---------------------------------------------------------------------
# numeric oracle
# ---------------------------------------------------------------------

def test_ode_gate_sphere(sphere_series):
    got = series_eval(sphere_series, (0.0, 0.2), (0.5, 0.0))
    end = geodesic_ode_oracle(sphere_gamma_fn, (TH0, 0.2), (1.0, 0.0), 0.5)
    for i in range(2):
        base = TH0 if i == 0 else 0.0
        assert abs((got[i] + base) - end[i]) < 1e-8


def test_ode_gate_poincare(poincare_series):
    got = series_eval(poincare_series, (0.3, 0.0), (0.0, 0.5))
    end = geodesic_ode_oracle(poincare_gamma_fn, (0.3, 1.0), (0.0, 1.0), 0.5)
    assert abs(got[0] + 0.0 - end[0]) < 1e-8
    assert abs(got[1] + 1.0 - end[1]) < 1e-8


def test_ode_gate_random_metric():
    m = MetricJet.random_metric(2, 6, random.Random(2026))
    phi = exp_map_series(m, 6)
    u = (0.05, -0.1)
    vdir = (0.3, 0.2)
    t = 0.4
    got = series_eval(phi, u, (t * vdir[0], t * vdir[1]))
    end = geodesic_ode_oracle(metric_gamma_fn(m), u, vdir, t)
    for i in range(2):
        assert abs(got[i] - end[i]) < 1e-6


def test_truncation_error_has_the_right_slope(sphere8):
    phi4 = exp_map_series(sphere8, 4)
    vdir = (0.7, 0.5)

    def err(t):
        got = series_eval(phi4, (0.0, 0.0), (t * vdir[0], t * vdir[1]))
        end = geodesic_ode_oracle(sphere_gamma_fn, (TH0, 0.0), vdir, t)
        return max(abs((got[0] + TH0) - end[0]), abs(got[1] - end[1]))

    slope = math.log(err(0.4) / err(0.2)) / math.log(2.0)
    assert abs(slope - 5.0) < 0.3


def test_oracle_affine_reparametrization():
    a = geodesic_ode_oracle(sphere_gamma_fn, (TH0, 0.1), (0.4, 0.3), 0.5)
    b = geodesic_ode_oracle(sphere_gamma_fn, (TH0, 0.1), (0.2, 0.15), 1.0)
    for i in range(2):
        assert abs(a[i] - b[i]) < 1e-9


def test_oracle_step_underflow_guard():
    with pytest.raises(ValueError, match="underflow"):
        geodesic_ode_oracle(sphere_gamma_fn, (TH0, 0.0), (1.0, 0.0), 1e-20)


# ---------------------------------------------------------------------
# tensor symmetrization
# ---------------------------------------------------------------------

def _velocity_buckets(tensor, trunc):
    """Sum components over lower-slot orderings (what a symmetric velocity
    contraction sees), truncated to the common reliability level."""
    out = {}
    for (up, lows), p in tensor.comps.items():
        key = (up, tuple(sorted(lows)))
        cur = out.get(key, Poly.zero(tensor.dim))
        out[key] = cur + p
    return {k: p.truncate(trunc) for k, p in out.items()
            if not p.truncate(trunc).is_zero()}


def test_symmetrization_is_invisible_to_the_contraction(sphere8):
    tensor = CovariantTensorJet.from_christoffel(sphere8)
    tensor = tensor.nabla_lower(sphere8.gamma).nabla_lower(sphere8.gamma)
    sym = tensor.symmetrized()
    assert tensor.comps != sym.comps       # the tensor itself does change
    # components reach the contraction with mixed per-path truncations;
    # compare at the worst one, which is what any consumer may rely on
    tmin = min(p.trunc for p in tensor.comps.values())
    assert _velocity_buckets(tensor, tmin) == _velocity_buckets(sym, tmin)


# ---------------------------------------------------------------------
# the commutative flat-section recursion
# ---------------------------------------------------------------------

@pytest.mark.parametrize("index", [0, 1])
def test_classical_recursion_matches_series(index, sphere8, poincare8):
    rnd = MetricJet.random_metric(2, 6, random.Random(99))
    for metric in (sphere8, poincare8, rnd):
        phi = exp_map_series(metric, 4)
        tau = classical_fedosov_taylor(metric, index, 4)
        assert tau == phi[index]
