"""Exact multivariate polynomials / truncated jets over Gaussian rationals.

Terms are stored sparsely as {exponent tuple: QC}.  A polynomial may carry a
truncation order `trunc`; when set, every operation drops monomials of total
degree > trunc, which turns the class into a jet (truncated power series)
around the origin.  trunc=None means genuinely polynomial arithmetic with no
dropping.  Mixing a jet with a polynomial propagates the tighter truncation.
"""

from __future__ import annotations

from fractions import Fraction
from math import factorial

from .exactnum import QC


def _min_trunc(a, b):
    if a is None:
        return b
    if b is None:
        return a
    return min(a, b)


class Poly:
    __slots__ = ("nvars", "terms", "trunc")

    def __init__(self, nvars: int, terms=None, trunc=None):
        self.nvars = nvars
        self.trunc = trunc
        self.terms = {}
        if terms:
            for e, c in terms.items():
                c = QC.coerce(c)
                if c.is_zero():
                    continue
                if trunc is not None and sum(e) > trunc:
                    continue
                self.terms[e] = c

    # -- constructors -------------------------------------------------

    @staticmethod
    def const(nvars: int, c, trunc=None) -> "Poly":
        return Poly(nvars, {(0,) * nvars: QC.coerce(c)}, trunc)

    @staticmethod
    def zero(nvars: int, trunc=None) -> "Poly":
        return Poly(nvars, {}, trunc)

    @staticmethod
    def one(nvars: int, trunc=None) -> "Poly":
        return Poly.const(nvars, 1, trunc)

    @staticmethod
    def var(nvars: int, i: int, trunc=None) -> "Poly":
        e = [0] * nvars
        e[i] = 1
        return Poly(nvars, {tuple(e): QC(1)}, trunc)

    def copy_with(self, terms) -> "Poly":
        return Poly(self.nvars, terms, self.trunc)

    # -- basic queries ------------------------------------------------

    def is_zero(self) -> bool:
        return not self.terms

    def constant_term(self) -> QC:
        return self.terms.get((0,) * self.nvars, QC(0))

    def degree(self) -> int:
        """Total degree; -1 for the zero polynomial."""
        if not self.terms:
            return -1
        return max(sum(e) for e in self.terms)

    def __eq__(self, other):
        if not isinstance(other, Poly):
            return NotImplemented
        return self.nvars == other.nvars and self.terms == other.terms

    def __hash__(self):
        return hash((self.nvars, frozenset(self.terms.items())))

    # -- arithmetic ---------------------------------------------------

    def __add__(self, other):
        if not isinstance(other, Poly):
            other = Poly.const(self.nvars, other, self.trunc)
        assert self.nvars == other.nvars
        tr = _min_trunc(self.trunc, other.trunc)
        out = dict(self.terms)
        for e, c in other.terms.items():
            s = out.get(e, QC(0)) + c
            if s.is_zero():
                out.pop(e, None)
            else:
                out[e] = s
        return Poly(self.nvars, out, tr)

    __radd__ = __add__

    def __neg__(self):
        return Poly(self.nvars, {e: -c for e, c in self.terms.items()},
                    self.trunc)

    def __sub__(self, other):
        if not isinstance(other, Poly):
            other = Poly.const(self.nvars, other, self.trunc)
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if not isinstance(other, Poly):
            c = QC.coerce(other)
            if c.is_zero():
                return Poly.zero(self.nvars, self.trunc)
            return Poly(self.nvars,
                        {e: v * c for e, v in self.terms.items()}, self.trunc)
        assert self.nvars == other.nvars
        tr = _min_trunc(self.trunc, other.trunc)
        out = {}
        for e1, c1 in self.terms.items():
            d1 = sum(e1)
            for e2, c2 in other.terms.items():
                if tr is not None and d1 + sum(e2) > tr:
                    continue
                e = tuple(a + b for a, b in zip(e1, e2))
                s = out.get(e)
                p = c1 * c2
                s = p if s is None else s + p
                if s.is_zero():
                    out.pop(e, None)
                else:
                    out[e] = s
        return Poly(self.nvars, out, tr)

    __rmul__ = __mul__

    def __pow__(self, k: int):
        assert k >= 0
        out = Poly.one(self.nvars, self.trunc)
        base = self
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    def diff(self, i: int) -> "Poly":
        """Partial derivative.  A jet truncated at total degree k only
        determines its derivative through degree k-1, so trunc drops by
        one (untruncated polynomials are unaffected)."""
        out = {}
        tr = self.trunc if self.trunc is None else max(self.trunc - 1, 0)
        for e, c in self.terms.items():
            if e[i] == 0:
                continue
            e2 = list(e)
            e2[i] -= 1
            out[tuple(e2)] = c * e[i]
        return Poly(self.nvars, out, tr)

    def truncate(self, k: int) -> "Poly":
        return Poly(self.nvars,
                    {e: c for e, c in self.terms.items() if sum(e) <= k},
                    k if self.trunc is None else min(k, self.trunc))

    def with_trunc(self, trunc) -> "Poly":
        return Poly(self.nvars, self.terms, trunc)

    # -- evaluation / inversion --------------------------------------

    def eval_qc(self, vals) -> QC:
        total = QC(0)
        for e, c in self.terms.items():
            term = c
            for x, k in zip(vals, e):
                if k:
                    term = term * (QC.coerce(x) ** k)
            total = total + term
        return total

    def eval_complex(self, vals) -> complex:
        total = 0j
        for e, c in self.terms.items():
            term = c.to_complex()
            for x, k in zip(vals, e):
                if k:
                    term *= complex(x) ** k
            total += term
        return total

    def inverse(self) -> "Poly":
        """Multiplicative inverse as a jet (requires trunc and a nonzero
        constant term): 1/(c + u) = (1/c) sum_k (-u/c)^k."""
        if self.trunc is None:
            raise ValueError("inverse requires a truncation order")
        c0 = self.constant_term()
        if c0.is_zero():
            raise ZeroDivisionError("jet has zero constant term")
        u = self - Poly.const(self.nvars, c0, self.trunc)
        inv_c0 = QC(1) / c0
        out = Poly.const(self.nvars, inv_c0, self.trunc)
        acc = Poly.const(self.nvars, inv_c0, self.trunc)
        for _ in range(self.trunc):
            acc = acc * u * (-inv_c0)
            if acc.is_zero():
                break
            out = out + acc
        return out

    def __repr__(self):
        if not self.terms:
            return "Poly(0)"
        bits = []
        for e, c in sorted(self.terms.items()):
            mono = "*".join(f"x{i}^{k}" for i, k in enumerate(e) if k)
            bits.append(f"({c.re}{'+' if c.im >= 0 else ''}{c.im}i)"
                        + (f"*{mono}" if mono else ""))
        return "Poly[" + " + ".join(bits) + "]"


# -- elementary jets --------------------------------------------------

def sin_jet(s0, c0, nvars: int, i: int, trunc: int) -> Poly:
    """Jet of sin(theta0 + xi_i) with sin(theta0)=s0, cos(theta0)=c0 exact."""
    xi = Poly.var(nvars, i, trunc)
    out = Poly.zero(nvars, trunc)
    p = Poly.one(nvars, trunc)
    for k in range(trunc + 1):
        coeff = Fraction((-1) ** (k // 2), factorial(k))
        base = QC.coerce(c0) if k % 2 else QC.coerce(s0)
        out = out + p * (base * coeff)
        p = p * xi
    return out


def cos_jet(s0, c0, nvars: int, i: int, trunc: int) -> Poly:
    """Jet of cos(theta0 + xi_i): cos(a+x) = cos a cos x - sin a sin x."""
    xi = Poly.var(nvars, i, trunc)
    out = Poly.zero(nvars, trunc)
    p = Poly.one(nvars, trunc)
    for k in range(trunc + 1):
        coeff = Fraction((-1) ** ((k + 1) // 2), factorial(k))
        base = QC.coerce(s0) if k % 2 else QC.coerce(c0)
        out = out + p * (base * coeff)
        p = p * xi
    return out
