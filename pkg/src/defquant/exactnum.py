"""Exact Gaussian-rational scalars.

Coefficients throughout the symbolic modules are complex numbers with
rational real and imaginary parts, kept exact with fractions.Fraction.
Enough arithmetic is implemented for the graded-algebra and jet code:
+, -, *, / (by nonzero), integer powers, conjugation, equality, hashing.
"""

from __future__ import annotations

from fractions import Fraction


class QC:
    """A complex number re + im*i with exact rational re, im."""

    __slots__ = ("re", "im")

    def __init__(self, re=0, im=0):
        if isinstance(re, QC):
            assert im == 0
            self.re, self.im = re.re, re.im
            return
        self.re = Fraction(re)
        self.im = Fraction(im)

    # -- constructors -------------------------------------------------

    @staticmethod
    def i():
        return QC(0, 1)

    @staticmethod
    def coerce(x) -> "QC":
        if isinstance(x, QC):
            return x
        if isinstance(x, complex):
            # exact binary-float rationals; used when MC estimates enter
            # otherwise-exact bookkeeping
            return QC(Fraction(x.real), Fraction(x.imag))
        return QC(x)

    # -- arithmetic ---------------------------------------------------

    def __add__(self, other):
        o = QC.coerce(other)
        return QC(self.re + o.re, self.im + o.im)

    __radd__ = __add__

    def __neg__(self):
        return QC(-self.re, -self.im)

    def __sub__(self, other):
        return self + (-QC.coerce(other))

    def __rsub__(self, other):
        return QC.coerce(other) + (-self)

    def __mul__(self, other):
        o = QC.coerce(other)
        return QC(self.re * o.re - self.im * o.im,
                  self.re * o.im + self.im * o.re)

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = QC.coerce(other)
        n = o.re * o.re + o.im * o.im
        if n == 0:
            raise ZeroDivisionError("division by zero QC")
        return QC((self.re * o.re + self.im * o.im) / n,
                  (self.im * o.re - self.re * o.im) / n)

    def __rtruediv__(self, other):
        return QC.coerce(other) / self

    def __pow__(self, k: int):
        if k < 0:
            return QC(1) / self ** (-k)
        out = QC(1)
        base = self
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    def conj(self):
        return QC(self.re, -self.im)

    # -- predicates / conversions ------------------------------------

    def is_zero(self) -> bool:
        return self.re == 0 and self.im == 0

    def __bool__(self):
        return not self.is_zero()

    def __eq__(self, other):
        try:
            o = QC.coerce(other)
        except (TypeError, ValueError):
            return NotImplemented
        return self.re == o.re and self.im == o.im

    def __hash__(self):
        if self.im == 0:
            return hash(self.re)
        return hash((self.re, self.im))

    def to_complex(self) -> complex:
        return complex(self.re) + 1j * complex(self.im)

    def __repr__(self):
        if self.im == 0:
            return f"QC({self.re})"
        return f"QC({self.re}, {self.im})"


I = QC.i()
ZERO = QC(0)
ONE = QC(1)
