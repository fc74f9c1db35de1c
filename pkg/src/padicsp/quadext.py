"""Quadratic extensions E = Q_p(sqrt(d)) in exact arithmetic.

Elements are pairs of rationals a + b*sqrt(d) for a fixed nonsquare d.
Valuations are normalized on the base field, so they are half-integers
in the ramified case (v(d) odd).  The one nontrivial algorithm here
splits a unit of almost-trivial norm into an exact norm-one element
times a principal unit, using the rational parametrization of the norm
conic; everything it returns is verified exactly.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

from .padic import INF, PAdic, PadicError, PrimeCtx, fraction_valuation, square_root_in_unit_ball

Q = Fraction


@dataclass(frozen=True)
class QuadExt:
    ctx: PrimeCtx
    d: Q

    def __post_init__(self):
        d = Q(self.d)
        object.__setattr__(self, "d", d)
        if PAdic(d, self.ctx).is_square():
            raise PadicError(f"d = {d} is a square in Q_{self.ctx.p}, not an extension")

    @property
    def ramified(self) -> bool:
        return fraction_valuation(self.d, self.ctx.p) % 2 == 1

    def elem(self, a, b=0) -> "QuadExtElem":
        return QuadExtElem(self, Q(a), Q(b))

    def one(self) -> "QuadExtElem":
        return self.elem(1)

    def gen(self) -> "QuadExtElem":
        """The formal square root of d."""
        return self.elem(0, 1)


@dataclass(frozen=True)
class QuadExtElem:
    ext: QuadExt
    a: Q
    b: Q

    def _lift(self, other) -> "QuadExtElem":
        if isinstance(other, QuadExtElem):
            if other.ext != self.ext:
                raise PadicError("mixed extensions")
            return other
        if isinstance(other, (int, Q)):
            return QuadExtElem(self.ext, Q(other), Q(0))
        raise PadicError(f"cannot coerce {other!r}")

    def __add__(self, other):
        o = self._lift(other)
        return QuadExtElem(self.ext, self.a + o.a, self.b + o.b)

    __radd__ = __add__

    def __sub__(self, other):
        o = self._lift(other)
        return QuadExtElem(self.ext, self.a - o.a, self.b - o.b)

    def __rsub__(self, other):
        return self._lift(other) - self

    def __mul__(self, other):
        o = self._lift(other)
        d = self.ext.d
        return QuadExtElem(self.ext, self.a * o.a + d * self.b * o.b, self.a * o.b + self.b * o.a)

    __rmul__ = __mul__

    def __neg__(self):
        return QuadExtElem(self.ext, -self.a, -self.b)

    def __truediv__(self, other):
        o = self._lift(other)
        n = o.norm_fraction()
        if n == 0:
            raise ZeroDivisionError("division by zero in quadratic extension")
        c = o.conjugate()
        return self * QuadExtElem(self.ext, c.a / n, c.b / n)

    def __rtruediv__(self, other):
        return self._lift(other) / self

    def __eq__(self, other):
        if isinstance(other, (int, Q)):
            other = self._lift(other)
        if isinstance(other, QuadExtElem):
            return self.ext == other.ext and self.a == other.a and self.b == other.b
        return NotImplemented

    def __hash__(self):
        return hash((self.a, self.b, self.ext.d, self.ext.ctx.p))

    def __str__(self):
        return f"{self.a} + {self.b}*sqrt({self.ext.d})"

    def conjugate(self) -> "QuadExtElem":
        return QuadExtElem(self.ext, self.a, -self.b)

    def norm_fraction(self) -> Q:
        return self.a * self.a - self.ext.d * self.b * self.b

    def norm(self) -> PAdic:
        return PAdic(self.norm_fraction(), self.ext.ctx)

    def trace(self) -> PAdic:
        return PAdic(2 * self.a, self.ext.ctx)

    def base_valuation(self):
        """v normalized so v(p) = 1; half-integers occur when ramified."""
        p = self.ext.ctx.p
        va = fraction_valuation(self.a, p)
        vb = fraction_valuation(self.b, p)
        vd = fraction_valuation(self.d_frac(), p)
        cand = []
        if va is not INF:
            cand.append(Q(va))
        if vb is not INF:
            cand.append(Q(vb) + Q(vd, 2))
        if not cand:
            return INF
        return min(cand)

    def d_frac(self) -> Q:
        return self.ext.d

    def is_integral(self) -> bool:
        v = self.base_valuation()
        return v is INF or v >= 0


def norm_one_decompose(x: QuadExtElem, m: int):
    """Split x = e * u with norm(e) = 1 exactly and u in 1 + p^m O_E.

    Requires norm(x) in 1 + P^m.  The norm-one factor comes from the
    rational point parametrization of a^2 - d b^2 = 1, steered next to
    x / sqrt(norm(x)); the principal-unit factor is then x / e, exact.
    """
    if m < 1:
        raise PadicError("level m must be >= 1")
    ext = x.ext
    ctx = ext.ctx
    p = ctx.p
    d = ext.d
    t = x.norm_fraction()
    if fraction_valuation(t - 1, p) < m:
        raise PadicError(f"norm {t} is not in 1 + P^{m}")
    one = ext.one()
    if (x - one).base_valuation() >= m:
        e, u = one, x
    else:
        extra = m + 8
        xn = square_root_in_unit_ball(PAdic(t, ctx), m, extra_digits=extra).value
        a0 = x / ext.elem(xn)
        for sigma in (1, -1):
            if fraction_valuation(1 + sigma * a0.a, p) == 0:
                break
        else:
            raise PadicError("no admissible chart point on the norm conic")
        s = sigma * a0.b / (1 + sigma * a0.a)
        den = 1 - d * s * s
        e = ext.elem(sigma * (1 + d * s * s) / den, sigma * 2 * s / den)
        u = x / e
    assert e.norm_fraction() == 1
    assert e * u == x
    assert (u - one).base_valuation() >= m
    return e, u
