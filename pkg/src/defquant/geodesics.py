"""Formal exponential maps from the covariant jet recursion, with an ODE
oracle.

The geodesic flow from a base point solves d^2 phi/dt^2 + Gamma(dphi, dphi)
= 0; expanding phi in the initial velocity gives

    phi^i(x, v) = x^i + v^i
                  - sum_{n >= 0} 1/(n+2)! (nabla^n Gamma)^(i)_{c...} v^c...

where nabla differentiates the lower indices only (the raised index is
never touched) and only the totally symmetric part of each tensor
survives the contraction with the v's.

Polynomials live in 2*dim variables: the first dim are offsets u from the
base point, the last dim are fiber velocities v.  All outputs are the
offsets phi^i - base^i, so irrational base data (a sphere base angle, say)
never enters the exact arithmetic -- closed-form charts only need the
metric entries at the base point as exact rationals.

A fixed-step 4th-order integrator of the geodesic equations acts as an
independent numeric oracle, and the commutative (hbar-free, Pi-free)
flat-section recursion tau = (1 - delta_inv nabla)^{-1} on the fiberwise
polynomial algebra recomputes the same series a third way.
"""

from __future__ import annotations

import random
from fractions import Fraction
from itertools import product as iproduct
from math import factorial

from .exactnum import QC
from .exactpoly import Poly, cos_jet, sin_jet
from .weyl import WeylElement


# ---------------------------------------------------------------------
# exact matrix inverse of a jet-valued metric
# ---------------------------------------------------------------------

def _constant_matrix_inverse(mat):
    """Exact inverse of a QC matrix by Gaussian elimination."""
    d = len(mat)
    a = [[QC(mat[i][j]) for j in range(d)] + [QC(1) if j == i else QC(0)
                                              for j in range(d)]
         for i in range(d)]
    for col in range(d):
        piv = next((r for r in range(col, d) if not a[r][col].is_zero()),
                   None)
        if piv is None:
            raise ValueError("metric is singular at the base point")
        a[col], a[piv] = a[piv], a[col]
        inv = QC(1) / a[col][col]
        a[col] = [x * inv for x in a[col]]
        for r in range(d):
            if r != col and not a[r][col].is_zero():
                f = a[r][col]
                a[r] = [x - f * y for x, y in zip(a[r], a[col])]
    return [[a[i][d + j] for j in range(d)] for i in range(d)]


def _matrix_inverse_jet(g, dim, order):
    """Jet inverse: g = g0 (1 + g0^{-1} E) with E the non-constant part,
    then a terminating Neumann series."""
    g0 = [[gij.constant_term() for gij in row] for row in g]
    g0_inv = _constant_matrix_inverse(g0)

    def mat_mul(a, b):
        return [[sum((a[i][k] * b[k][j] for k in range(dim)),
                     Poly.zero(dim, order)) for j in range(dim)]
                for i in range(dim)]

    e = [[g[i][j] - Poly.const(dim, g0[i][j], order) for j in range(dim)]
         for i in range(dim)]
    m = [[Poly.const(dim, g0_inv[i][j], order) for j in range(dim)]
         for i in range(dim)]
    em = mat_mul(e, m)
    out = [row[:] for row in m]
    power = [row[:] for row in m]
    for _ in range(order):
        power = [[-p for p in row] for row in mat_mul(power, em)]
        if all(p.is_zero() for row in power for p in row):
            break
        out = [[out[i][j] + power[i][j] for j in range(dim)]
               for i in range(dim)]
    return out


class MetricJet:
    """Symmetric metric jets around a base point with derived Christoffel
    jets Gamma^k_{ij} = (1/2) g^{km} (d_i g_{mj} + d_j g_{mi} - d_m g_{ij}).
    """

    def __init__(self, dim: int, order: int, g):
        self.dim = dim
        self.order = order
        self.g = [[gij if isinstance(gij, Poly)
                   else Poly.const(dim, gij, order)
                   for gij in row] for row in g]
        for i in range(dim):
            for j in range(dim):
                if self.g[i][j] != self.g[j][i]:
                    raise ValueError("metric jets must be symmetric")
        self.g_inv = _matrix_inverse_jet(self.g, dim, order)
        self.gamma = self._christoffel()

    def _christoffel(self):
        d = self.dim
        gamma = [[[Poly.zero(d, self.order) for _ in range(d)]
                  for _ in range(d)] for _ in range(d)]
        for k in range(d):
            for i in range(d):
                for j in range(i, d):
                    acc = Poly.zero(d, self.order)
                    for m in range(d):
                        acc = acc + self.g_inv[k][m] * (
                            self.g[m][j].diff(i) + self.g[m][i].diff(j)
                            - self.g[i][j].diff(m))
                    acc = acc * QC(Fraction(1, 2))
                    gamma[k][i][j] = acc
                    gamma[k][j][i] = acc
        return gamma

    # -- stock charts -------------------------------------------------

    @staticmethod
    def flat(dim: int, order: int) -> "MetricJet":
        return MetricJet(dim, order,
                         [[Poly.const(dim, 1 if i == j else 0, order)
                           for j in range(dim)] for i in range(dim)])

    @staticmethod
    def sphere(order: int, s0=Fraction(3, 5), c0=Fraction(4, 5)
               ) -> "MetricJet":
        """Unit round sphere in polar/azimuthal coordinates, expanded
        around a base polar angle with exact sine s0 and cosine c0."""
        s = sin_jet(s0, c0, 2, 0, order)
        zero = Poly.zero(2, order)
        one = Poly.one(2, order)
        return MetricJet(2, order, [[one, zero], [zero, s * s]])

    @staticmethod
    def poincare_half_plane(order: int) -> "MetricJet":
        """Hyperbolic upper half plane (dx1^2 + dx2^2)/x2^2 around the
        base point with second coordinate 1."""
        x2 = Poly.one(2, order) + Poly.var(2, 1, order)
        w = x2.inverse()
        w2 = w * w
        zero = Poly.zero(2, order)
        return MetricJet(2, order, [[w2, zero], [zero, w2]])

    @staticmethod
    def random_metric(dim: int, order: int, rng: random.Random,
                      denom: int = 4) -> "MetricJet":
        """Identity plus a small random polynomial perturbation (symmetric,
        exact rational coefficients); invertible near the base point."""
        g = [[Poly.const(dim, 1 if i == j else 0, order)
              for j in range(dim)] for i in range(dim)]
        for i in range(dim):
            for j in range(i, dim):
                pert = Poly.zero(dim, order)
                for _ in range(3):
                    e = [0] * dim
                    e[rng.randrange(dim)] += 1
                    if rng.random() < 0.5:
                        e[rng.randrange(dim)] += 1
                    c = QC(Fraction(rng.randrange(-2, 3), denom))
                    pert = pert + Poly(dim, {tuple(e): c}, order)
                g[i][j] = g[i][j] + pert
                if j != i:
                    g[j][i] = g[i][j]
        return MetricJet(dim, order, g)


# ---------------------------------------------------------------------
# covariant tensors with one raised slot
# ---------------------------------------------------------------------

class CovariantTensorJet:
    """a^(i)_{c_1...c_n}: one raised slot, n lowered slots, Poly jets.

    nabla_lower appends a lowered slot by the covariant rule that never
    differentiates the raised index:

        (nabla a)^(i)_{c_1...c_n b}
            = d_b a^(i)_{c_1...c_n} - sum_l Gamma^c_{b c_l} a^(i)_{...c...}
    """

    def __init__(self, dim: int, n_lower: int, comps=None):
        self.dim = dim
        self.n_lower = n_lower
        self.comps = {}
        if comps:
            for (up, lows), p in comps.items():
                assert len(lows) == n_lower
                if not p.is_zero():
                    self.comps[(up, tuple(lows))] = p

    @staticmethod
    def from_christoffel(metric: MetricJet) -> "CovariantTensorJet":
        comps = {}
        for k in range(metric.dim):
            for i in range(metric.dim):
                for j in range(metric.dim):
                    comps[(k, (i, j))] = metric.gamma[k][i][j]
        return CovariantTensorJet(metric.dim, 2, comps)

    def component(self, up: int, lows) -> Poly:
        return self.comps.get((up, tuple(lows)), Poly.zero(self.dim))

    def nabla_lower(self, gamma) -> "CovariantTensorJet":
        d = self.dim
        out = {}

        def accum(key, p):
            cur = out.get(key)
            s = p if cur is None else cur + p
            if s.is_zero():
                out.pop(key, None)
            else:
                out[key] = s

        # iterate over stored components, so the contraction term is the
        # transpose of the defining formula: the stored slot index l feeds
        # outputs with c in its place, weighted by -Gamma^l_{bc}
        for (up, lows), p in self.comps.items():
            for b in range(d):
                dp = p.diff(b)
                if not dp.is_zero():
                    accum((up, lows + (b,)), dp)
                for pos, l in enumerate(lows):
                    for c in range(d):
                        glc = gamma[l][b][c]
                        if glc.is_zero():
                            continue
                        nl = lows[:pos] + (c,) + lows[pos + 1:]
                        accum((up, nl + (b,)), -(glc * p))
        return CovariantTensorJet(d, self.n_lower + 1, out)

    def symmetrized(self) -> "CovariantTensorJet":
        """Average over lower-slot orderings (the raised slot stays put)."""
        out = {}
        norm = QC(Fraction(1, factorial(self.n_lower)))
        from itertools import permutations
        for (up, lows), p in self.comps.items():
            for perm in permutations(lows):
                key = (up, perm)
                cur = out.get(key, Poly.zero(self.dim))
                out[key] = cur + p * norm
        return CovariantTensorJet(self.dim, self.n_lower, out)


def nabla_lower(tensor: CovariantTensorJet, gamma) -> CovariantTensorJet:
    return tensor.nabla_lower(gamma)


# ---------------------------------------------------------------------
# the exponential-map series
# ---------------------------------------------------------------------

def _lift_to_uv(p: Poly, dim: int) -> Poly:
    """Reinterpret a Poly in the offsets u as one in (u, v)."""
    return Poly(2 * dim, {e + (0,) * dim: c for e, c in p.terms.items()})


def _reliability_trim(p: Poly, dim: int, order: int) -> Poly:
    """Drop (u, v) terms beyond the jet-reliability ladder.

    Each covariant step consumes one order of metric jet, so the v^k
    coefficient (k >= 2) of the series is only determined to u-degree
    order + 1 - k.  Trimming both series constructions to this region
    makes their agreement an exact polynomial identity.
    """
    out = {}
    for e, c in p.terms.items():
        k = sum(e[dim:])
        if k >= 2 and sum(e[:dim]) > order + 1 - k:
            continue
        out[e] = c
    return Poly(2 * dim, out)


def exp_map_series(metric: MetricJet, order: int):
    """Per-coordinate offset series phi^i - base^i as Polys in (u, v).

    order bounds the total v-degree; it may not exceed the metric jet
    order (each nabla consumes one order of x-differentiation).
    """
    if order > metric.order:
        raise ValueError(
            f"series order {order} exceeds metric jet order {metric.order}")
    d = metric.dim
    phi = [Poly(2 * d, {tuple(e): QC(1) for e in
                        ([int(k == i) for k in range(d)] + [0] * d,
                         [0] * d + [int(k == i) for k in range(d)])})
           for i in range(d)]
    tensor = CovariantTensorJet.from_christoffel(metric)
    for n in range(order - 1):
        coeff = QC(Fraction(-1, factorial(n + 2)))
        for (up, lows), p in tensor.comps.items():
            mono = [0] * d
            for l in lows:
                mono[l] += 1
            vm = Poly(2 * d, {(0,) * d + tuple(mono): coeff})
            phi[up] = phi[up] + _lift_to_uv(p, d) * vm
        if n < order - 2:
            tensor = tensor.nabla_lower(metric.gamma)
    return [_reliability_trim(p, d, metric.order) for p in phi]


def series_eval(phi, u, v):
    """Evaluate exponential-map components at numeric (u, v)."""
    vals = list(u) + list(v)
    return [p.eval_complex(vals) for p in phi]


def restrict_velocity(p: Poly, dim: int, direction) -> Poly:
    """Substitute v = t * direction, returning a Poly in (u, t)."""
    out = {}
    for e, c in p.terms.items():
        scale = QC(1)
        t_deg = 0
        for k in range(dim):
            vk = e[dim + k]
            if vk:
                dk = QC.coerce(direction[k])
                if dk.is_zero():
                    scale = QC(0)
                    break
                scale = scale * dk ** vk
                t_deg += vk
        if scale.is_zero():
            continue
        key = e[:dim] + (t_deg,)
        cur = out.get(key, QC(0)) + c * scale
        if cur.is_zero():
            out.pop(key, None)
        else:
            out[key] = cur
    return Poly(dim + 1, out)


# ---------------------------------------------------------------------
# numeric oracle: fixed-step RK4 on the geodesic equations
# ---------------------------------------------------------------------

def geodesic_ode_oracle(gamma_fn, x, v, t: float, steps: int = 4000):
    """Integrate d^2 phi/dt^2 + Gamma^k(dphi, dphi) = 0 from (x, v) for
    time t.  gamma_fn(point) -> nested [k][i][j] floats.  Returns the end
    point; classic 4th-order Runge-Kutta with a fixed step.
    """
    d = len(x)
    h = t / steps
    if steps > 0 and abs(h) < 1e-15:
        raise ValueError("step underflow")

    def deriv(state):
        pos, vel = state[:d], state[d:]
        gam = gamma_fn(pos)
        acc = [-sum(gam[k][i][j] * vel[i] * vel[j]
                    for i in range(d) for j in range(d))
               for k in range(d)]
        return list(vel) + acc

    y = [float(c) for c in x] + [float(c) for c in v]
    for _ in range(steps):
        k1 = deriv(y)
        k2 = deriv([a + 0.5 * h * b for a, b in zip(y, k1)])
        k3 = deriv([a + 0.5 * h * b for a, b in zip(y, k2)])
        k4 = deriv([a + h * b for a, b in zip(y, k3)])
        y = [a + h / 6.0 * (b1 + 2 * b2 + 2 * b3 + b4)
             for a, b1, b2, b3, b4 in zip(y, k1, k2, k3, k4)]
    return y[:d]


def sphere_gamma_fn(point):
    import math
    th = point[0]
    s, c = math.sin(th), math.cos(th)
    cot = c / s
    return [[[0.0, 0.0], [0.0, -s * c]],
            [[0.0, cot], [cot, 0.0]]]


def poincare_gamma_fn(point):
    w = 1.0 / point[1]
    return [[[0.0, -w], [-w, 0.0]],
            [[w, 0.0], [0.0, -w]]]


def metric_gamma_fn(metric: MetricJet):
    """Float Christoffel callable from the jets (valid near the base)."""
    def fn(point):
        vals = [complex(c) for c in point]
        return [[[metric.gamma[k][i][j].eval_complex(vals).real
                  for j in range(metric.dim)]
                 for i in range(metric.dim)]
                for k in range(metric.dim)]
    return fn


# ---------------------------------------------------------------------
# the commutative flat-section recursion
# ---------------------------------------------------------------------

def classical_fedosov_taylor(metric: MetricJet, index: int, order: int
                             ) -> Poly:
    """tau(x^index) via the commutative fixed point
    a = u_index + delta_inv(nabla a) on fiberwise polynomials, returned as
    a Poly in (u, v); contracts to exp_map_series component index."""
    if order > metric.order:
        raise ValueError("order exceeds metric jet order")
    d = metric.dim
    seed = WeylElement.from_function(Poly.var(d, index, metric.order),
                                     d, order)
    a = seed
    for _ in range(order + 2):
        nxt = seed + a.nabla(metric.gamma).delta_inv()
        if nxt == a:
            break
        a = nxt
    else:
        raise AssertionError("flat-section recursion did not stabilize")
    out = Poly.zero(2 * d)
    for (vexp, dxs, hpow), p in a.terms.items():
        assert hpow == 0 and dxs == ()
        vm = Poly(2 * d, {(0,) * d + tuple(vexp): QC(1)})
        out = out + _lift_to_uv(p, d) * vm
    return _reliability_trim(out, d, metric.order)
