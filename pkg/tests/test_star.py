"""Graph operators, HKR components, star assembly, associativity gates."""

import random
from fractions import Fraction

import pytest

from defquant.exactnum import QC
from defquant.exactpoly import Poly
from defquant.graphs import AdmissibleGraph, Edge, fan_graph, graph2
from defquant.star import (PolyVectorField, PolyDiffOperator, graph_operator,
                           hkr_operator, StarProductSeries, star_order2,
                           associativity_residual, associativity_sigma,
                           so3_bivector, u2_vector_fields)
from defquant.weight_mc import WeightSource


def rand_poly(rng, dim, deg=2):
    terms = {}
    for _ in range(4):
        e = tuple(rng.randint(0, deg) for _ in range(dim))
        terms[e] = QC(Fraction(rng.randint(-3, 3), rng.randint(1, 2)))
    return Poly(dim, terms)


# ---------------------------------------------------------------------
# polyvector fields
# ---------------------------------------------------------------------

def test_bivector_requires_antisymmetry():
    with pytest.raises(ValueError, match="antisymmetric"):
        PolyVectorField.bivector(2, [[0, 1], [1, 0]])


def test_component_signs():
    pi = so3_bivector()
    x = [Poly.var(3, i) for i in range(3)]
    assert pi.component((0, 1)) == x[2]
    assert pi.component((1, 0)) == -x[2]
    assert pi.component((1, 1)).is_zero()
    v = PolyVectorField.vector(2, [1, 2])
    assert v.component((1,)) == Poly.const(2, 2)


# ---------------------------------------------------------------------
# polydifferential operators
# ---------------------------------------------------------------------

def test_multiplication_operator():
    mul = PolyDiffOperator.multiplication(2)
    f = Poly(2, {(1, 0): QC(1)})
    g = Poly(2, {(0, 2): QC(3)})
    assert mul.apply(f, g) == f * g


def test_operator_linear_structure_and_json():
    mul = PolyDiffOperator.multiplication(2)
    s = mul + mul.scale(2)
    assert s == mul.scale(3)
    assert (mul + mul.scale(-1)).is_zero()
    blob = mul.to_jsonable()
    assert blob["arity"] == 2 and blob["dim"] == 2
    assert blob["terms"][0]["slots"] == [[0, 0], [0, 0]]


# ---------------------------------------------------------------------
# graph -> operator
# ---------------------------------------------------------------------

def test_wedge_fan_is_the_poisson_half():
    pi = so3_bivector()
    rng = random.Random(3)
    f, g = rand_poly(rng, 3), rand_poly(rng, 3)
    op = graph_operator(fan_graph(2), [pi])
    want = Poly.zero(3)
    for i in range(3):
        for j in range(3):
            want = want + pi.component((i, j)) * f.diff(i) * g.diff(j)
    assert op.apply(f, g) == want


def test_two_cycle_hand_formula():
    # K(2,2)[1>b1#1, 1>2#2, 2>1#1, 2>b2#2] routes
    # (d_k Pi^{ij}) (d_j Pi^{kl}) d_i f d_l g
    pi = so3_bivector()
    rng = random.Random(4)
    f, g = rand_poly(rng, 3), rand_poly(rng, 3)
    op = graph_operator(graph2(), [pi, pi])
    want = Poly.zero(3)
    for i in range(3):
        for j in range(3):
            for k in range(3):
                for l in range(3):
                    want = want + (pi.component((i, j)).diff(k)
                                   * pi.component((k, l)).diff(j)
                                   * f.diff(i) * g.diff(l))
    assert op.apply(f, g) == want


def test_arity_and_degree_mismatches_raise():
    pi = so3_bivector()
    with pytest.raises(ValueError, match="polyvector fields"):
        graph_operator(graph2(), [pi])
    v = PolyVectorField.vector(3, [1, 0, 0])
    with pytest.raises(ValueError, match="out-degree"):
        graph_operator(fan_graph(2), [v])


def test_derivatives_of_constant_bivector_vanish():
    pi_const = PolyVectorField.bivector(2, [[0, 1], [-1, 0]])
    assert graph_operator(graph2(), [pi_const, pi_const]).is_zero()


def test_second_derivative_of_linear_bivector_vanishes():
    # both edges of vertex 2 land on vertex 1: the coefficient carries two
    # derivatives of a linear field, which is identically zero
    g = AdmissibleGraph(2, 2, [Edge(1, 3, 1), Edge(1, 4, 2),
                               Edge(2, 1, 1), Edge(2, 1, 2)])
    pi = so3_bivector()
    assert graph_operator(g, [pi, pi]).is_zero()


# ---------------------------------------------------------------------
# first Taylor component vs the antisymmetrized-derivative operator
# ---------------------------------------------------------------------

def test_aligned_fan_on_coordinates_is_one():
    dim = 2
    gamma = PolyVectorField.bivector(dim, [[0, 1], [-1, 0]])
    op = graph_operator(fan_graph(2), [gamma])
    x = [Poly.var(dim, i) for i in range(dim)]
    assert op.apply(x[0], x[1]) == Poly.one(dim)
    assert hkr_operator(gamma).apply(x[0], x[1]) \
        == Poly.const(dim, Fraction(1, 2))


def _labeled_fans(p):
    import itertools
    out = []
    for perm in itertools.permutations(range(1, p + 1)):
        edges = [Edge(1, 1 + j, perm[j - 1]) for j in range(1, p + 1)]
        out.append(AdmissibleGraph(1, p, edges))
    return out


@pytest.mark.parametrize("p", [2, 3])
def test_first_component_assembly_matches_hkr(p):
    dim = 3
    rng = random.Random(10 + p)
    comps = {}
    for idx in __import__("itertools").combinations(range(dim), p):
        comps[idx] = rand_poly(rng, dim, deg=1)
    gamma = PolyVectorField(dim, p - 1, comps)
    src = WeightSource(n_samples=10, seed=0)
    total = PolyDiffOperator.zero(dim, p)
    norm = Fraction(1, __import__("math").factorial(p))  # 1/|Star|!
    for g in _labeled_fans(p):
        res = src.weight(g, lam=0.4)
        assert res.exact
        total = total + graph_operator(g, [gamma]).scale(res.value * norm)
    assert total == hkr_operator(gamma)


def test_fan_weight_label_parity():
    src = WeightSource(n_samples=10, seed=0)
    aligned, swapped = _labeled_fans(2)
    assert src.weight(aligned, lam=0.2).value == Fraction(1, 2)
    assert src.weight(swapped, lam=0.2).value == -Fraction(1, 2)


# ---------------------------------------------------------------------
# constant-coefficient assembly is exact and sampling-free
# ---------------------------------------------------------------------

class _ExactOnlySource(WeightSource):
    """Weight lookups are fine; falling through to Monte Carlo is not."""

    def weight(self, g, lam=0.5, convention="raw"):
        res = super().weight(g, lam=lam, convention=convention)
        assert res.exact, "constant bivector must resolve from the exact table"
        return res


def test_constant_assembly_never_samples():
    pi = PolyVectorField.bivector(2, [[0, 1], [-1, 0]])
    series = star_order2(pi, 0.7, _ExactOnlySource(n_samples=10, seed=0))
    assert series.uncertainties == {1: [], 2: []}


def test_constant_assembly_is_moyal():
    from defquant.fedosov import moyal_star_jets
    pi = PolyVectorField.bivector(2, [[0, 1], [-1, 0]])
    series = star_order2(pi, 0.25, WeightSource(n_samples=10, seed=0))
    rng = random.Random(17)
    for _ in range(3):
        f, g = rand_poly(rng, 2), rand_poly(rng, 2)
        jets = moyal_star_jets([[0, 1], [-1, 0]], f, g, 2)
        for n in range(3):
            assert series.apply_order(n, f, g) \
                == jets.get(n, Poly.zero(2))
        assert associativity_residual(series, f, g, rand_poly(rng, 2), 2) == {}


def test_order1_commutator_is_the_bracket():
    pi = PolyVectorField.bivector(2, [[0, 1], [-1, 0]])
    series = star_order2(pi, 0.5, WeightSource(n_samples=10, seed=0))
    rng = random.Random(23)
    f, g = rand_poly(rng, 2), rand_poly(rng, 2)
    got = series.apply_order(1, f, g) - series.apply_order(1, g, f)
    bracket = f.diff(0) * g.diff(1) - f.diff(1) * g.diff(0)
    assert got == bracket * QC(0, 1)


def test_rejects_non_bivector():
    v = PolyVectorField.vector(2, [1, 0])
    with pytest.raises(ValueError, match="bivector"):
        star_order2(v, 0.5, WeightSource(n_samples=10, seed=0))


# ---------------------------------------------------------------------
# linear bivector: sampled order 2 within propagated error
# ---------------------------------------------------------------------

def test_so3_assembly_respects_associativity_sigma():
    src = WeightSource(n_samples=80_000, seed=606)
    series = star_order2(so3_bivector(), 0.5, src)
    assert series.uncertainties[1] == []       # order 1 stays exact
    assert len(series.uncertainties[2]) >= 1   # order 2 is sampled
    x = [Poly.var(3, i) for i in range(3)]
    f, g, h = x[0] * x[1], x[2] * x[2], x[0] + x[2]
    res = associativity_residual(series, f, g, h, 2)
    sig = associativity_sigma(series, f, g, h, 2)
    assert 0 not in res and 1 not in res
    for e, c in res.get(2, Poly.zero(3)).terms.items():
        bound = sig[2].get(e, 0.0)
        assert abs(c.to_complex()) <= 3.0 * bound


def test_u2_on_vector_fields_is_certified_zero():
    # the closed-loop contraction sum_{ij} (d_j v1^i)(d_i v2^j) must be
    # nonzero for the certificate to say anything
    v1 = PolyVectorField.vector(2, [Poly.var(2, 1), 0])
    v2 = PolyVectorField.vector(2, [0, Poly.var(2, 0)])
    res, loop_op = u2_vector_fields(v1, v2, n_samples=60_000, seed=3)
    assert not loop_op.is_zero()
    assert abs(res.value) <= 3.0 * res.stderr
    with pytest.raises(ValueError, match="vector fields"):
        u2_vector_fields(so3_bivector(), so3_bivector())
