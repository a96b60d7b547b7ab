"""Graph operators on polynomial data and the interpolation star product.

A labeled graph with uniform aerial out-degree 2 acts on a bivector by
routing one summation index along every edge: each aerial vertex
contributes the component of its polyvector field picked out by the
indices of its outgoing edges (in label order), differentiated once per
incoming edge; each ground vertex becomes an argument slot carrying the
derivatives of its incoming edges.  Summing over all index assignments
gives a polydifferential operator, and the star product to second order
is the weighted sum

    f * g = fg + (i hbar) U_1(f, g) + ((i hbar)^2 / 2!) U_2(f, g) + ...

with U_l the sum over out-degree-2 graphs of type (l, 2), each graph
weighted by its configuration-space integral times 1/|Star(k)|! per
aerial vertex.  Weight values come from a weight source (exact table,
cache, or Monte Carlo); every Monte Carlo value carries a standard error
which is propagated linearly into associativity residuals.

Graphs whose operator vanishes identically on the given bivector (for
instance every derivative-carrying graph when the bivector is constant)
are skipped before their weight is ever requested, so constant-
coefficient assemblies stay exact and sampling-free.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import permutations, product as iproduct
from math import factorial

from .exactnum import QC
from .exactpoly import Poly
from .graphs import AdmissibleGraph, enumerate_graphs

_I = QC(0, 1)


def _perm_parity(seq) -> int:
    inv = 0
    for a in range(len(seq)):
        for b in range(a + 1, len(seq)):
            if seq[a] > seq[b]:
                inv += 1
    return -1 if inv % 2 else 1


class PolyVectorField:
    """Totally antisymmetric (degree+1)-vector field with Poly components.

    Components are stored on strictly increasing index tuples; lookups
    with permuted indices pick up the permutation sign, repeated indices
    give zero.
    """

    def __init__(self, dim: int, degree: int, comps=None):
        self.dim = dim
        self.degree = degree
        self.comps = {}
        if comps:
            for idx, poly in comps.items():
                idx = tuple(idx)
                assert len(idx) == degree + 1
                assert all(a < b for a, b in zip(idx, idx[1:])), \
                    "components must be keyed by increasing tuples"
                if not isinstance(poly, Poly):
                    poly = Poly.const(dim, poly)
                if not poly.is_zero():
                    self.comps[idx] = poly

    @staticmethod
    def bivector(dim: int, upper: list) -> "PolyVectorField":
        """Degree-1 field from a matrix of upper components Pi^{ij}
        (antisymmetry of the matrix is asserted)."""
        comps = {}
        mat = [[e if isinstance(e, Poly) else Poly.const(dim, e)
                for e in row] for row in upper]
        for i in range(dim):
            for j in range(dim):
                if mat[i][j] != -mat[j][i]:
                    raise ValueError("bivector matrix must be antisymmetric")
                if i < j:
                    comps[(i, j)] = mat[i][j]
        return PolyVectorField(dim, 1, comps)

    @staticmethod
    def vector(dim: int, comps_list) -> "PolyVectorField":
        comps = {}
        for i, e in enumerate(comps_list):
            if not isinstance(e, Poly):
                e = Poly.const(dim, e)
            comps[(i,)] = e
        return PolyVectorField(dim, 0, comps)

    def component(self, idx) -> Poly:
        """Pi^{idx} with full antisymmetry (any index order)."""
        idx = tuple(idx)
        if len(set(idx)) != len(idx):
            return Poly.zero(self.dim)
        key = tuple(sorted(idx))
        poly = self.comps.get(key)
        if poly is None:
            return Poly.zero(self.dim)
        return poly if _perm_parity(idx) > 0 else -poly


class PolyDiffOperator:
    """Polydifferential operator: sum of terms
    coeff(x) * prod_slots d^{alpha_slot}, keyed by per-slot exponents."""

    def __init__(self, dim: int, arity: int, terms=None):
        self.dim = dim
        self.arity = arity
        self.terms = {}
        if terms:
            for key, poly in terms.items():
                if not poly.is_zero():
                    self.terms[key] = poly

    @staticmethod
    def zero(dim: int, arity: int) -> "PolyDiffOperator":
        return PolyDiffOperator(dim, arity)

    @staticmethod
    def multiplication(dim: int, arity: int = 2) -> "PolyDiffOperator":
        key = tuple((0,) * dim for _ in range(arity))
        return PolyDiffOperator(dim, arity, {key: Poly.one(dim)})

    def is_zero(self) -> bool:
        return not self.terms

    def __eq__(self, other):
        if not isinstance(other, PolyDiffOperator):
            return NotImplemented
        return (self.dim == other.dim and self.arity == other.arity
                and self.terms == other.terms)

    def __add__(self, other):
        assert (self.dim, self.arity) == (other.dim, other.arity)
        out = dict(self.terms)
        for key, poly in other.terms.items():
            cur = out.get(key)
            s = poly if cur is None else cur + poly
            if s.is_zero():
                out.pop(key, None)
            else:
                out[key] = s
        return PolyDiffOperator(self.dim, self.arity, out)

    def scale(self, c) -> "PolyDiffOperator":
        c = QC.coerce(c)
        if c.is_zero():
            return PolyDiffOperator.zero(self.dim, self.arity)
        return PolyDiffOperator(self.dim, self.arity,
                                {k: p * c for k, p in self.terms.items()})

    def apply(self, *fs: Poly) -> Poly:
        assert len(fs) == self.arity
        out = Poly.zero(self.dim)
        for key, coeff in self.terms.items():
            prod = coeff
            for alpha, f in zip(key, fs):
                df = f
                for i, k in enumerate(alpha):
                    for _ in range(k):
                        df = df.diff(i)
                if df.is_zero():
                    prod = None
                    break
                prod = prod * df
            if prod is not None:
                out = out + prod
        return out

    def to_jsonable(self):
        items = []
        for key, poly in sorted(self.terms.items()):
            items.append({
                "slots": [list(alpha) for alpha in key],
                "coeff": [[list(e), [str(c.re), str(c.im)]]
                          for e, c in sorted(poly.terms.items())],
            })
        return {"dim": self.dim, "arity": self.arity, "terms": items}


# -- graph -> operator ------------------------------------------------

def graph_operator(g: AdmissibleGraph, gammas) -> PolyDiffOperator:
    """Operator of a labeled graph acting on one polyvector field per
    aerial vertex; arity = number of ground slots."""
    if len(gammas) != g.n:
        raise ValueError(f"need {g.n} polyvector fields, got {len(gammas)}")
    dim = gammas[0].dim
    for v in range(1, g.n + 1):
        want = g.out_degree(v)
        if gammas[v - 1].degree + 1 != want:
            raise ValueError(
                f"vertex {v} has out-degree {want} but its field takes "
                f"{gammas[v - 1].degree + 1} indices")
    edges = list(g.edges)
    out_edges = {v: sorted((e for e in edges if e.src == v),
                           key=lambda e: e.label)
                 for v in range(1, g.n + 1)}
    in_edges = {v: [e for e in edges if e.dst == v]
                for v in range(1, g.n + g.m + 1)}
    terms = {}
    for assign in iproduct(range(dim), repeat=len(edges)):
        index = {id(e): i for e, i in zip(edges, assign)}
        coeff = Poly.one(dim)
        ok = True
        for v in range(1, g.n + 1):
            comp = gammas[v - 1].component(
                tuple(index[id(e)] for e in out_edges[v]))
            for e in in_edges[v]:
                comp = comp.diff(index[id(e)])
                if comp.is_zero():
                    break
            if comp.is_zero():
                ok = False
                break
            coeff = coeff * comp
        if not ok:
            continue
        slots = []
        for j in range(1, g.m + 1):
            alpha = [0] * dim
            for e in in_edges[g.n + j]:
                alpha[index[id(e)]] += 1
            slots.append(tuple(alpha))
        key = tuple(slots)
        cur = terms.get(key)
        s = coeff if cur is None else cur + coeff
        if s.is_zero():
            terms.pop(key, None)
        else:
            terms[key] = s
    return PolyDiffOperator(dim, g.m, terms)


def hkr_operator(gamma: PolyVectorField) -> PolyDiffOperator:
    """(1/p!) sum_sigma sgn(sigma) gamma^{i_1...i_p} d_{i_sigma} per slot."""
    p = gamma.degree + 1
    dim = gamma.dim
    terms = {}
    pref = Fraction(1, factorial(p))
    for idx, poly in gamma.comps.items():
        for sigma in permutations(range(p)):
            slots = []
            for s in range(p):
                alpha = [0] * dim
                alpha[idx[sigma[s]]] += 1
                slots.append(tuple(alpha))
            key = tuple(slots)
            contrib = poly * (pref * _perm_parity(sigma))
            cur = terms.get(key)
            s2 = contrib if cur is None else cur + contrib
            if s2.is_zero():
                terms.pop(key, None)
            else:
                terms[key] = s2
    return PolyDiffOperator(dim, p, terms)


# -- star product assembly -------------------------------------------

@dataclass
class StarProductSeries:
    """Bidifferential operators of f * g = sum_n hbar^n B_n(f, g),
    truncated at ``order``; B_0 is the multiplication.

    ``uncertainties[n]`` lists (sigma, V) pairs: the assembled B_n moves
    by delta * V when the pooled Monte Carlo weight of one canonical
    graph class moves by delta, and sigma is that weight's standard
    error.  Exact-table classes contribute no entry.
    """

    dim: int
    order: int
    ops: dict = field(default_factory=dict)
    uncertainties: dict = field(default_factory=dict)

    def star(self, f: Poly, g: Poly) -> dict:
        out = {}
        for n, op in self.ops.items():
            val = op.apply(f, g)
            if not val.is_zero() or n == 0:
                out[n] = val
        return out

    def apply_order(self, n: int, f: Poly, g: Poly) -> Poly:
        op = self.ops.get(n)
        if op is None:
            return Poly.zero(self.dim)
        return op.apply(f, g)


def star_order2(pi: PolyVectorField, lam, source) -> StarProductSeries:
    """Assemble B_0, B_1, B_2 for the bivector ``pi`` at interpolation
    parameter ``lam`` from the given weight source.

    Per order l the operator is (i^l / l!) sum_graphs w^formality U_graph;
    weights are looked up once per canonical class and transported to the
    labeled representatives by the relabeling parity.  Classes whose
    summed operator vanishes on ``pi`` are skipped without a weight
    lookup, so a constant bivector never triggers sampling.
    """
    if pi.degree != 1:
        raise ValueError("star_order2 needs a bivector (degree 1)")
    dim = pi.dim
    series = StarProductSeries(dim, 2)
    series.ops[0] = PolyDiffOperator.multiplication(dim)
    series.uncertainties = {1: [], 2: []}
    for level in (1, 2):
        classes = {}
        for g in enumerate_graphs(level, 2, 2):
            op = graph_operator(g, [pi] * level)
            if op.is_zero():
                continue
            gc, par, consistent = g.canonical_form()
            if not consistent:
                continue
            key = gc.to_text()
            entry = classes.setdefault(key, [gc, PolyDiffOperator.zero(dim, 2)])
            entry[1] = entry[1] + (op if par > 0 else op.scale(-1))
        total = PolyDiffOperator.zero(dim, 2)
        pref = (_I ** level) * Fraction(1, factorial(level))
        formality = Fraction(1, 2 ** level)  # 1/|Star(k)|! per vertex
        for key, (gc, combo) in sorted(classes.items()):
            if combo.is_zero():
                continue
            res = source.weight(gc, lam=lam, convention="raw")
            scaled = combo.scale(pref * formality)
            w = res.value
            if isinstance(w, (complex, float)):
                w = QC.coerce(complex(w))  # MC estimate, binary-exact float
            total = total + scaled.scale(QC.coerce(w))
            if res.stderr > 0:
                series.uncertainties[level].append((res.stderr, scaled))
        series.ops[level] = total
    return series


def associativity_residual(series: StarProductSeries, f: Poly, g: Poly,
                           h: Poly, order: int) -> dict:
    """Per hbar-order coefficients of (f*g)*h - f*(g*h)."""
    assert order <= series.order
    out = {}
    for l in range(order + 1):
        acc = Poly.zero(series.dim)
        for a in range(l + 1):
            b = l - a
            acc = acc + series.apply_order(a, series.apply_order(b, f, g), h)
            acc = acc - series.apply_order(a, f, series.apply_order(b, g, h))
        if not acc.is_zero():
            out[l] = acc
    return out


def associativity_sigma(series: StarProductSeries, f: Poly, g: Poly,
                        h: Poly, order: int) -> dict:
    """Per hbar-order, per-monomial 1-sigma bound on the residual from the
    weight-source standard errors (linear propagation, classes pooled)."""
    out = {}
    for l in range(order + 1):
        acc = {}
        for b, entries in series.uncertainties.items():
            if b > l:
                continue
            a = l - b  # the complementary exact order in each cross term
            for sigma, v_op in entries:
                move = series.apply_order(a, v_op.apply(f, g), h)
                move = move - series.apply_order(a, f, v_op.apply(g, h))
                move = move + v_op.apply(series.apply_order(a, f, g), h)
                move = move - v_op.apply(f, series.apply_order(a, g, h))
                for e, c in move.terms.items():
                    mag = abs(c.to_complex()) * sigma
                    acc[e] = (acc.get(e, 0.0) ** 2 + mag ** 2) ** 0.5
        out[l] = acc
    return out


def so3_bivector() -> PolyVectorField:
    """Linear Poisson structure of so(3): Pi^{ij} = eps^{ijk} x_k."""
    d = 3
    x = [Poly.var(d, i) for i in range(d)]
    return PolyVectorField.bivector(
        d, [[Poly.zero(d), x[2], -x[1]],
            [-x[2], Poly.zero(d), x[0]],
            [x[1], -x[0], Poly.zero(d)]])


def u2_vector_fields(v1: PolyVectorField, v2: PolyVectorField, lam=0.5,
                     n_samples: int = 400_000, seed: int = 0):
    """Second Taylor component on two vector fields.

    The single candidate graph is the aerial two-cycle with no ground
    slots; its weight is the closed in-out loop integral of one propagator
    differential against a reversed one, which vanishes.  Returns
    (weight_result, loop_operator): the component is weight * operator,
    certified zero by |weight| falling below the sampling error.
    """
    from .graphs import enumerate_graphs
    from .weight_mc import two_valent_integral
    if v1.degree != 0 or v2.degree != 0:
        raise ValueError("u2_vector_fields needs two vector fields")
    candidates = [g for g in enumerate_graphs(2, 0, 1)]
    assert len(candidates) == 1, "only the aerial two-cycle has the degrees"
    loop_op = graph_operator(candidates[0], [v1, v2])
    res = two_valent_integral("in-out", 0.35 + 0.1j, 0.35 + 0.1j, lam=lam,
                              n_samples=n_samples, seed=seed)
    return res, loop_op
