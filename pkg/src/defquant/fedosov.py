"""Fedosov fixed-point machinery on polynomial jets over R^d.

Everything runs inside the Deg-truncated Weyl algebra of ``weyl``:

  * curvature data for a torsion-free connection, and the fiber-quadratic
    curvature element R = (1/4) omega_{kr} R^r_{lij} v^k v^l dx^i dx^j;
  * the abelian-connection fixed point
        r = delta_inv(Omega + R + nabla r + (i/hbar) r o r),
    solved by iteration (the map raises Deg, so cap+2 rounds stabilize);
  * the same element assembled from rooted full binary trees with leaf
        z = (1 - delta_inv nabla)^{-1} delta_inv(Omega + R)
    and node
        (i/2hbar) (1 - delta_inv nabla)^{-1} delta_inv [a, b],
    whose per-leaf-count tree numbers are the Catalan numbers;
  * the Taylor-expansion fixed point tau(f) and the induced star product
        f * g = sigma(tau(f) o tau(g)),
    plus an independent constant-coefficient Moyal oracle to pin the
    conventions down in the flat case.

The base is a polynomial neighbourhood of the origin of R^d: symplectic
form, bivector and Christoffel symbols all enter as exact polynomial
matrices.  No manifold-level globalization is attempted.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product as iproduct
from math import comb

from .exactnum import QC
from .exactpoly import Poly
from .weyl import (WeylElement, commutator, ihbar_circ, ihbar_commutator)


def _as_poly_matrix(entries, dim):
    out = []
    for row in entries:
        new = []
        for e in row:
            new.append(e if isinstance(e, Poly) else Poly.const(dim, e))
        out.append(new)
    return out


@dataclass
class FedosovInput:
    """Polynomial input data around the origin of R^d.

    omega   : symplectic form coefficients omega_{ij}(x), antisymmetric.
    pi      : bivector Pi^{kl}(x) entering the fiberwise Weyl product.
    gamma   : Christoffel symbols, gamma[k][i][j] = Gamma^k_{ij}(x),
              symmetric in (i, j); None means the flat connection.
    center  : the closed central 2-form (an hbar-multiple), as a Weyl
              element with fiber-scalar 2-form terms only; None means 0.
    """

    dim: int
    cap: int
    omega: list
    pi: list
    gamma: list | None = None
    center: WeylElement | None = None

    def __post_init__(self):
        d = self.dim
        self.omega = _as_poly_matrix(self.omega, d)
        self.pi = _as_poly_matrix(self.pi, d)
        for a in range(d):
            for b in range(d):
                if self.omega[a][b] != -self.omega[b][a]:
                    raise ValueError("omega must be antisymmetric")
                if self.pi[a][b] != -self.pi[b][a]:
                    raise ValueError("pi must be antisymmetric")
        origin = [0] * d
        mat = [[self.omega[a][b].eval_complex(origin) for b in range(d)]
               for a in range(d)]
        det = _det_complex(mat)
        if abs(det) < 1e-12:
            raise ValueError("omega is degenerate at the base point")
        if self.gamma is not None:
            self.gamma = [_as_poly_matrix(layer, d) for layer in self.gamma]
            for k in range(d):
                for i in range(d):
                    for j in range(d):
                        if self.gamma[k][i][j] != self.gamma[k][j][i]:
                            raise ValueError(
                                "Christoffel symbols must be symmetric "
                                "in the lower indices")
        if self.center is None:
            self.center = WeylElement.zero(d, self.cap)
        for (vexp, dxs, hpow), _ in self.center.terms.items():
            if sum(vexp) != 0 or len(dxs) != 2 or hpow < 1:
                raise ValueError("center must be an hbar-multiple of a "
                                 "fiber-scalar 2-form")
        ext = self.center.nabla(None)
        if not ext.is_zero():
            raise ValueError("center 2-form is not closed")

    # convenience -----------------------------------------------------

    def zero(self) -> WeylElement:
        return WeylElement.zero(self.dim, self.cap)

    def embed(self, f: Poly, hpow: int = 0) -> WeylElement:
        return WeylElement.from_function(f, self.dim, self.cap, hpow)


def _det_complex(mat):
    n = len(mat)
    if n == 1:
        return mat[0][0]
    total = 0
    for j in range(n):
        minor = [row[:j] + row[j + 1:] for row in mat[1:]]
        total += (-1) ** j * mat[0][j] * _det_complex(minor)
    return total


def flat_input(dim: int = 2, cap: int = 6, center: WeylElement | None = None,
               pi12=1) -> FedosovInput:
    """Standard-symplectic flat plane: omega = dx^1 ^ dx^2, Pi^{12} = pi12."""
    assert dim == 2
    return FedosovInput(
        dim, cap,
        omega=[[0, 1], [-1, 0]],
        pi=[[0, pi12], [-pi12, 0]],
        gamma=None,
        center=center)


# -- curvature --------------------------------------------------------

def curvature_tensor(inp: FedosovInput):
    """R^r_{lij} = d_i G^r_{jl} - d_j G^r_{il} + G^r_{im} G^m_{jl}
    - G^r_{jm} G^m_{il}; zero for the flat connection."""
    d = inp.dim
    zero = Poly.zero(d)
    if inp.gamma is None:
        return [[[[zero] * d for _ in range(d)] for _ in range(d)]
                for _ in range(d)]
    g = inp.gamma
    out = []
    for r in range(d):
        lay_r = []
        for l in range(d):
            lay_l = []
            for i in range(d):
                row = []
                for j in range(d):
                    term = g[r][j][l].diff(i) - g[r][i][l].diff(j)
                    for m in range(d):
                        term = term + g[r][i][m] * g[m][j][l]
                        term = term - g[r][j][m] * g[m][i][l]
                    row.append(term)
                lay_l.append(row)
            lay_r.append(lay_l)
        out.append(lay_r)
    return out


def curvature_element(inp: FedosovInput) -> WeylElement:
    """R = (1/4) omega_{kr} R^r_{lij} v^k v^l dx^i dx^j (fiber degree 2)."""
    d = inp.dim
    rt = curvature_tensor(inp)
    out = inp.zero()
    quarter = Fraction(1, 4)
    for k in range(d):
        for r in range(d):
            if inp.omega[k][r].is_zero():
                continue
            for l in range(d):
                for i in range(d):
                    for j in range(i + 1, d):
                        # dx^i dx^j + dx^j dx^i contributions, i < j kept
                        poly = inp.omega[k][r] * (rt[r][l][i][j]
                                                  - rt[r][l][j][i])
                        if poly.is_zero():
                            continue
                        vexp = [0] * d
                        vexp[k] += 1
                        vexp[l] += 1
                        out = out + WeylElement.monomial(
                            d, inp.cap, poly * quarter,
                            vexp=tuple(vexp), dxs=(i, j))
    return out


def curvature_square_scalar(inp: FedosovInput, samples) -> QC:
    """Calibrate the scalar c with nabla^2 a = c * (i/hbar)[R, a] on the
    supplied sample elements; raises if no candidate matches."""
    r_el = curvature_element(inp)
    candidates = [QC(1), QC(-1), QC(0, 1), QC(0, -1),
                  QC(Fraction(1, 2)), QC(Fraction(-1, 2)),
                  QC(0, Fraction(1, 2)), QC(0, Fraction(-1, 2)),
                  QC(2), QC(-2)]
    for c in candidates:
        ok = True
        for a in samples:
            lhs = a.nabla(inp.gamma).nabla(inp.gamma)
            rhs = ihbar_commutator(r_el, a, inp.pi).scale(c)
            if lhs != rhs:
                ok = False
                break
        if ok:
            return c
    raise ArithmeticError("no scalar matches nabla^2 against [R, .]")


# -- geometric series helpers ----------------------------------------

def neumann_delta_inv_nabla(inp: FedosovInput, a: WeylElement) -> WeylElement:
    """(1 - delta_inv nabla)^{-1} a; terminates because delta_inv nabla
    raises Deg by one per application."""
    total = a
    cur = a
    for _ in range(inp.cap + 2):
        cur = cur.nabla(inp.gamma).delta_inv()
        if cur.is_zero():
            break
        total = total + cur
    return total


# -- the abelian-connection fixed point ------------------------------

def solve_connection(inp: FedosovInput, max_rounds: int | None = None
                     ) -> WeylElement:
    """Unique solution of r = delta_inv(center + R + nabla r +
    (i/hbar) r o r) with delta_inv r = 0, by Deg-raising iteration."""
    source = inp.center + curvature_element(inp)
    rounds = (inp.cap + 2) if max_rounds is None else max_rounds
    r = inp.zero()
    prev = None
    for _ in range(rounds):
        quad = ihbar_circ(r, r, inp.pi) if not r.is_zero() else inp.zero()
        r = (source + r.nabla(inp.gamma) + quad).delta_inv()
        if prev is not None and r == prev:
            break
        prev = r
    # fixed point reached and normalized
    quad = ihbar_circ(r, r, inp.pi) if not r.is_zero() else inp.zero()
    again = (source + r.nabla(inp.gamma) + quad).delta_inv()
    if again != r:
        raise ArithmeticError("connection iteration did not stabilize")
    if not r.delta_inv().is_zero():
        raise ArithmeticError("normalization delta_inv r = 0 violated")
    return r


# -- Catalan tree expansion ------------------------------------------

def catalan_leaf(inp: FedosovInput) -> WeylElement:
    """z = (1 - delta_inv nabla)^{-1} delta_inv(center + R)."""
    source = inp.center + curvature_element(inp)
    return neumann_delta_inv_nabla(inp, source.delta_inv())


def catalan_node(inp: FedosovInput, a: WeylElement, b: WeylElement
                 ) -> WeylElement:
    """(i/2hbar) (1 - delta_inv nabla)^{-1} delta_inv [a, b]."""
    half = ihbar_commutator(a, b, inp.pi).scale(Fraction(1, 2))
    return neumann_delta_inv_nabla(inp, half.delta_inv())


def catalan_trees(inp: FedosovInput, n_max: int):
    """Per-leaf-count lists of tree values; leaves all carry the same z.

    Returns (values, counts) with values[n] the list of evaluated trees
    with n leaves and counts[n] = len(values[n]) = Catalan(n-1).
    """
    z = catalan_leaf(inp)
    values = {1: [z]}
    for n in range(2, n_max + 1):
        vals = []
        for a in range(1, n):
            for left in values[a]:
                for right in values[n - a]:
                    vals.append(catalan_node(inp, left, right))
        values[n] = vals
    counts = {n: len(values[n]) for n in values}
    return values, counts


def catalan_expansion(inp: FedosovInput, n_max: int) -> WeylElement:
    values, _ = catalan_trees(inp, n_max)
    total = inp.zero()
    for n in range(1, n_max + 1):
        for t in values[n]:
            total = total + t
    return total


def catalan_number(n: int) -> int:
    return comb(2 * n - 2, n - 1) // n


# -- Taylor expansion and star product -------------------------------

def fedosov_taylor(inp: FedosovInput, f: Poly,
                   connection: WeylElement | None = None) -> WeylElement:
    """tau(f): fixed point of tau = f + delta_inv(nabla tau +
    (i/hbar)[r, tau])."""
    if connection is None:
        connection = solve_connection(inp)
    f_el = inp.embed(f)
    tau = f_el
    prev = None
    for _ in range(inp.cap + 2):
        br = ihbar_commutator(connection, tau, inp.pi)
        tau = f_el + (tau.nabla(inp.gamma) + br).delta_inv()
        if prev is not None and tau == prev:
            break
        prev = tau
    br = ihbar_commutator(connection, tau, inp.pi)
    if f_el + (tau.nabla(inp.gamma) + br).delta_inv() != tau:
        raise ArithmeticError("Taylor expansion did not stabilize")
    return tau


def fedosov_star(inp: FedosovInput, f: Poly, g: Poly,
                 connection: WeylElement | None = None):
    """sigma(tau(f) o tau(g)) as {hbar power: Poly}."""
    if connection is None:
        connection = solve_connection(inp)
    tf = fedosov_taylor(inp, f, connection)
    tg = fedosov_taylor(inp, g, connection)
    return tf.circ(tg, inp.pi).sigma_jets()


def moyal_star_jets(pi_entries, f: Poly, g: Poly, order: int):
    """Independent constant-coefficient Moyal oracle:
    order-j coefficient (1/j!) (i/2)^j Pi^{k1 l1} ... Pi^{kj lj}
    d_{k...} f d_{l...} g, returned as {j: Poly}."""
    d = f.nvars
    out = {}
    for j in range(order + 1):
        acc = Poly.zero(d)
        pref = (QC(0, Fraction(1, 2)) ** j) * Fraction(1, _factorial(j))
        for ks in iproduct(range(d), repeat=j):
            for ls in iproduct(range(d), repeat=j):
                c = QC(1)
                for k, l in zip(ks, ls):
                    c = c * QC.coerce(pi_entries[k][l])
                if c.is_zero():
                    continue
                df = f
                for k in ks:
                    df = df.diff(k)
                if df.is_zero():
                    continue
                dg = g
                for l in ls:
                    dg = dg.diff(l)
                if dg.is_zero():
                    continue
                acc = acc + df * dg * c
        acc = acc * pref
        if not acc.is_zero():
            out[j] = acc
    return out


def _factorial(n: int) -> int:
    out = 1
    for k in range(2, n + 1):
        out *= k
    return out


# -- the flat Fedosov differential and its homotopy -------------------

def fedosov_differential(inp: FedosovInput, connection: WeylElement,
                         a: WeylElement) -> WeylElement:
    """D a = -delta a + nabla a + (i/hbar)[r, a]."""
    return (-a.delta() + a.nabla(inp.gamma)
            + ihbar_commutator(connection, a, inp.pi))


def fedosov_homotopy(inp: FedosovInput, connection: WeylElement,
                     a: WeylElement) -> WeylElement:
    """D^{-1} a = -(1 - delta_inv(nabla + (i/hbar)[r, .]))^{-1} delta_inv a."""
    cur = a.delta_inv()
    total = cur
    for _ in range(inp.cap + 2):
        cur = (cur.nabla(inp.gamma)
               + ihbar_commutator(connection, cur, inp.pi)).delta_inv()
        if cur.is_zero():
            break
        total = total + cur
    return -total


def deformed_poincare_defect(inp: FedosovInput, a: WeylElement
                             ) -> WeylElement:
    """D^{-1} D a + D D^{-1} a + tau(sigma a) - a, truncated to inp.cap;
    zero iff the deformed homotopy identity holds on a.

    Because -delta inside D lowers Deg by one, the cap-degree slice of
    D D^{-1} a feeds on the (cap+1)-slice of D^{-1} a; the check therefore
    runs the whole computation one Deg higher and truncates at the end.
    """
    lifted = FedosovInput(inp.dim, inp.cap + 1, inp.omega, inp.pi,
                          inp.gamma, inp.center.with_cap(inp.cap + 1))
    connection = solve_connection(lifted)
    b = a.with_cap(lifted.cap)
    dinv_d = fedosov_homotopy(lifted, connection,
                              fedosov_differential(lifted, connection, b))
    d_dinv = fedosov_differential(lifted, connection,
                                  fedosov_homotopy(lifted, connection, b))
    tail = lifted.zero()
    for hpow, jet in b.sigma_jets().items():
        tail = tail + fedosov_taylor(lifted, jet, connection).mul_hbar(hpow)
    return (dinv_d + d_dinv + tail - b).with_cap(inp.cap)
