"""Double cover of SL2 over Q_p and its induced-section machinery.

The cover multiplies group elements against a sign computed from two
Hilbert symbols of lower-row data.  On top of it this module builds
multiplicative characters of Q_p^* with finite conductor data, the cell
decomposition of products lower(y)*upper(x), a compactly supported
family of induced-section functions indexed by a level i, and the exact
evaluation of the standard intertwining integral against that family.

Values stay symbolic as long as possible: a SectionValue is a root of
unity recorded as a turn fraction together with a power of q, and only
the public entry points collapse that to a complex float.
"""
import cmath
from dataclasses import dataclass
from fractions import Fraction as Q
from functools import lru_cache

from .padic import (
    Mu8,
    PAdic,
    PadicError,
    PrimeCtx,
    fraction_valuation,
    hilbert_symbol,
    mu_psi,
)


class MetaError(PadicError):
    pass


def _as_q(x):
    if isinstance(x, PAdic):
        return x.value
    return Q(x)


def _rows2(rows):
    t = tuple(tuple(Q(v) for v in row) for row in rows)
    if len(t) != 2 or any(len(row) != 2 for row in t):
        raise MetaError("need a 2x2 matrix")
    return t


def _mat_mul(a, b):
    return tuple(
        tuple(sum(a[i][k] * b[k][j] for k in range(2)) for j in range(2)) for i in range(2)
    )


def rao_x(ctx: PrimeCtx, rows) -> PAdic:
    """Lower-row invariant: the (2,1) entry when nonzero, else (2,2)."""
    g = _rows2(rows)
    if g[0][0] * g[1][1] - g[0][1] * g[1][0] != 1:
        raise MetaError("matrix is not in SL2")
    return ctx.of(g[1][0] if g[1][0] != 0 else g[1][1])


def rao_cocycle(ctx: PrimeCtx, rows1, rows2) -> int:
    """Sign attached to a pair of SL2 elements by two Hilbert symbols."""
    g1, g2 = _rows2(rows1), _rows2(rows2)
    prod = _mat_mul(g1, g2)
    x1 = rao_x(ctx, g1)
    x2 = rao_x(ctx, g2)
    x12 = rao_x(ctx, prod)
    return hilbert_symbol(x1, x2) * hilbert_symbol(ctx.of(-x1.value * x2.value), x12)


@dataclass(frozen=True)
class MetaSL2:
    """An element of the double cover: an SL2 matrix plus a sheet sign."""

    ctx: PrimeCtx
    rows: tuple
    zeta: int = 1

    def __post_init__(self):
        object.__setattr__(self, "rows", _rows2(self.rows))
        if self.rows[0][0] * self.rows[1][1] - self.rows[0][1] * self.rows[1][0] != 1:
            raise MetaError("matrix is not in SL2")
        if self.zeta not in (1, -1):
            raise MetaError("sheet sign must be +1 or -1")

    @classmethod
    def identity(cls, ctx: PrimeCtx) -> "MetaSL2":
        return cls(ctx, ((1, 0), (0, 1)))

    @classmethod
    def upper(cls, ctx: PrimeCtx, b, zeta=1) -> "MetaSL2":
        return cls(ctx, ((1, _as_q(b)), (0, 1)), zeta)

    @classmethod
    def lower(cls, ctx: PrimeCtx, y, zeta=1) -> "MetaSL2":
        return cls(ctx, ((1, 0), (_as_q(y), 1)), zeta)

    @classmethod
    def diag(cls, ctx: PrimeCtx, a, zeta=1) -> "MetaSL2":
        a = _as_q(a)
        if a == 0:
            raise MetaError("torus entry must be nonzero")
        return cls(ctx, ((a, 0), (0, 1 / a)), zeta)

    @classmethod
    def flip(cls, ctx: PrimeCtx, zeta=1) -> "MetaSL2":
        return cls(ctx, ((0, 1), (-1, 0)), zeta)

    def __mul__(self, other: "MetaSL2") -> "MetaSL2":
        if self.ctx != other.ctx:
            raise MetaError("mixed prime contexts")
        sign = rao_cocycle(self.ctx, self.rows, other.rows)
        return MetaSL2(self.ctx, _mat_mul(self.rows, other.rows), self.zeta * other.zeta * sign)

    def inverse(self) -> "MetaSL2":
        g = self.rows
        ginv = ((g[1][1], -g[0][1]), (-g[1][0], g[0][0]))
        sign = rao_cocycle(self.ctx, g, ginv)
        return MetaSL2(self.ctx, ginv, self.zeta * sign)

    def matrix_is_identity(self) -> bool:
        return self.rows == ((1, 0), (0, 1))

    def is_identity(self) -> bool:
        return self.matrix_is_identity() and self.zeta == 1


def decompose_big_cell(y: PAdic, x: PAdic):
    """Split lower(y)*upper(x) as a Borel part times lower(ybar).

    Returns (a, b, ybar) with lower(y)*upper(x) equal to the matrix
    ((a, b), (0, 1/a)) times lower(ybar).  The relations a = 1 - x*ybar
    and a*y = ybar pin the answer; the product leaves the decomposable
    cell exactly when 1 + x*y = 0.
    """
    if y.ctx != x.ctx:
        raise MetaError("mixed prime contexts")
    d = 1 + x.value * y.value
    if d == 0:
        raise MetaError("product lies outside the decomposable cell")
    a = 1 / d
    ybar = y.value / d
    assert a == 1 - x.value * ybar and a * y.value == ybar
    return y.ctx.of(a), x, y.ctx.of(ybar)


# ----------------------------------------------------------- characters

@lru_cache(maxsize=None)
def _unit_group_table(p: int, c: int):
    """(generator, dlog table) for the units of the residue ring mod p^c."""
    mod = p**c
    order = (p - 1) * p ** (c - 1)
    for g in range(2, mod):
        if g % p == 0:
            continue
        seen = {}
        acc = 1
        for e in range(order):
            seen[acc] = e
            acc = acc * g % mod
        if len(seen) == order and acc == 1:
            return g, seen
    raise MetaError(f"no cyclic generator mod {p}^{c}")


@dataclass(frozen=True)
class CharacterFx:
    """A multiplicative character of Q_p^* with finite conductor data.

    unit_phase is the turn fraction assigned to the canonical generator
    of the residue units at the stated conductor depth, varpi_phase the
    turn fraction at the uniformizer.  Conductor 0 means trivial on all
    units.  The stated conductor must be exact, not just an upper bound.
    """

    ctx: PrimeCtx
    conductor: int
    unit_phase: Q = Q(0)
    varpi_phase: Q = Q(0)

    def __post_init__(self):
        object.__setattr__(self, "unit_phase", Q(self.unit_phase) % 1)
        object.__setattr__(self, "varpi_phase", Q(self.varpi_phase) % 1)
        if self.conductor < 0:
            raise MetaError("conductor exponent must be >= 0")
        if self.conductor == 0:
            if self.unit_phase != 0:
                raise MetaError("conductor 0 forces trivial unit values")
            return
        p = self.ctx.p
        order = (p - 1) * p ** (self.conductor - 1)
        if (self.unit_phase * order) % 1 != 0:
            raise MetaError("unit phase must be a multiple of 1/#units")
        if self.conductor == 1:
            if self.unit_phase == 0:
                raise MetaError("conductor 1 needs a nontrivial unit phase")
        else:
            probe = 1 + p ** (self.conductor - 1)
            if self._unit_turn(Q(probe)) == 0:
                raise MetaError("character is trivial one level down; conductor overstated")

    def _unit_turn(self, u: Q) -> Q:
        if self.conductor == 0:
            return Q(0)
        p = self.ctx.p
        mod = p**self.conductor
        _, table = _unit_group_table(p, self.conductor)
        res = (u.numerator * pow(u.denominator, -1, mod)) % mod
        return (self.unit_phase * table[res]) % 1

    def phase(self, a) -> Q:
        """Turn fraction of the character value at a nonzero argument."""
        a = _as_q(a)
        if a == 0:
            raise MetaError("character evaluated at 0")
        v = fraction_valuation(a, self.ctx.p)
        u = a / Q(self.ctx.p) ** v
        return (self._unit_turn(u) + v * self.varpi_phase) % 1

    def value(self, a) -> complex:
        return cmath.exp(2j * cmath.pi * float(self.phase(a)))

    def is_trivial_on_units(self) -> bool:
        return self.conductor == 0


def unramified_character(ctx: PrimeCtx, varpi_phase=Q(0)) -> CharacterFx:
    return CharacterFx(ctx, 0, Q(0), varpi_phase)


def ramified_character(ctx: PrimeCtx, conductor: int, turns: int = 1, varpi_phase=Q(0)) -> CharacterFx:
    """Character of exact conductor c >= 1 sending the canonical residue
    unit generator to turns/#units of a full turn."""
    if conductor < 1:
        raise MetaError("need conductor >= 1")
    order = (ctx.p - 1) * ctx.p ** (conductor - 1)
    return CharacterFx(ctx, conductor, Q(turns, order), varpi_phase)


# -------------------------------------------------------- section values

@dataclass(frozen=True)
class SectionValue:
    """An exact scalar: a root of unity (turn fraction) times q**qexp.

    qexp is a Fraction for rational s and drops to a complex number only
    when a complex s parameter forces it.
    """

    phase: Q = Q(0)
    qexp: object = Q(0)
    zero: bool = False

    def __post_init__(self):
        if self.zero:
            object.__setattr__(self, "phase", Q(0))
            object.__setattr__(self, "qexp", Q(0))
        else:
            object.__setattr__(self, "phase", Q(self.phase) % 1)
            if not isinstance(self.qexp, complex):
                object.__setattr__(self, "qexp", Q(self.qexp))

    @classmethod
    def nothing(cls) -> "SectionValue":
        return cls(zero=True)

    @classmethod
    def one(cls) -> "SectionValue":
        return cls()

    def __mul__(self, other: "SectionValue") -> "SectionValue":
        if self.zero or other.zero:
            return SectionValue.nothing()
        return SectionValue(self.phase + other.phase, self.qexp + other.qexp)

    def scaled_by_sign(self, sign: int) -> "SectionValue":
        if self.zero:
            return self
        return SectionValue(self.phase + (Q(1, 2) if sign == -1 else 0), self.qexp)

    def as_complex(self, q: int) -> complex:
        if self.zero:
            return 0j
        root = cmath.exp(2j * cmath.pi * float(self.phase))
        if isinstance(self.qexp, complex):
            return root * cmath.exp(self.qexp * cmath.log(q))
        return root * float(q) ** float(self.qexp)


def _mu8_phase(m: Mu8) -> Q:
    return Q(m.k, 8)


def _as_s(s):
    if isinstance(s, complex):
        if s.imag == 0:
            return Q(s.real)
        return s
    return Q(s)


# ------------------------------------------------------------- sections

@dataclass(frozen=True)
class SectionFsi:
    """Level-i member of the compactly-induced family of sections.

    Supported on products (Borel part)*lower(x) with x in P^{3i}; the
    value there is the sheet sign times the inverse normalizing eighth
    root at the torus entry times eta(a)|a|^{s+1/2}.
    """

    i: int
    eta: CharacterFx
    s: object = Q(1, 2)

    def __post_init__(self):
        object.__setattr__(self, "s", _as_s(self.s))
        if self.i < 1:
            raise MetaError("level must be a positive integer")

    @property
    def ctx(self) -> PrimeCtx:
        return self.eta.ctx


def _eval_fsi_raw(sec: SectionFsi, g: MetaSL2) -> SectionValue:
    ctx = g.ctx
    rows = g.rows
    if rows[1][1] == 0:
        return SectionValue.nothing()
    a = 1 / rows[1][1]
    x = rows[1][0] * a
    if fraction_valuation(x, ctx.p) < 3 * sec.i:
        return SectionValue.nothing()
    # the defining factorization lives in the cover: peeling the lower
    # factor off (g, zeta) flips the sheet by the cocycle of the pair
    borel = ((a, rows[0][1]), (0, rows[1][1]))
    peel = rao_cocycle(ctx, borel, ((1, 0), (x, 1)))
    mu_inv = mu_psi(ctx.of(a), twist=-1).inverse()
    v = fraction_valuation(a, ctx.p)
    val = SectionValue(
        _mu8_phase(mu_inv) + sec.eta.phase(a),
        -v * (sec.s + Q(1, 2)),
    )
    return val.scaled_by_sign(g.zeta * peel)


def eval_fsi_exact(sec: SectionFsi, g: MetaSL2) -> SectionValue:
    """Evaluate the level-i section at a cover element, symbolically.

    The level must clear the empirical threshold for eta, below which
    the right-invariance that makes the family useful is not yet there.
    """
    if sec.eta.ctx != g.ctx:
        raise MetaError("mixed prime contexts")
    if sec.i < section_level(sec.eta):
        raise MetaError("level below the section threshold for this character")
    return _eval_fsi_raw(sec, g)


def eval_fsi(sec: SectionFsi, g: MetaSL2) -> complex:
    return eval_fsi_exact(sec, g).as_complex(g.ctx.p)


_SECTION_LEVELS: dict = {}


def _invariance_samples(ctx: PrimeCtx):
    p = ctx.p
    gs = [
        MetaSL2.identity(ctx),
        MetaSL2.flip(ctx),
        MetaSL2.upper(ctx, Q(2, p)),
        MetaSL2.lower(ctx, Q(p**2)),
        MetaSL2.diag(ctx, Q(p)),
        MetaSL2.diag(ctx, Q(2)),
    ]
    words = list(gs)
    for g1 in gs:
        for g2 in gs:
            words.append(g1 * g2)
    for g1 in gs[:4]:
        for g2 in gs:
            for g3 in gs[2:]:
                words.append(g1 * g2 * g3)
    return words


def section_level(eta: CharacterFx, max_level: int = 12) -> int:
    """Smallest level whose section passes the right-invariance battery.

    Right translation by generators of the depth-4i congruence subgroup
    must fix every sampled value exactly.  The result is cached per
    character datum.
    """
    key = (eta.ctx.p, eta.conductor, eta.unit_phase, eta.varpi_phase)
    if key in _SECTION_LEVELS:
        return _SECTION_LEVELS[key]
    ctx = eta.ctx
    words = _invariance_samples(ctx)
    level = None
    for i in range(1, max_level + 1):
        sec = SectionFsi(i=i, eta=eta, s=Q(1, 2))
        step = Q(ctx.p) ** (4 * i)
        hs = [
            MetaSL2.upper(ctx, step),
            MetaSL2.upper(ctx, 2 * step),
            MetaSL2.lower(ctx, step),
            MetaSL2.lower(ctx, 2 * step),
            MetaSL2.diag(ctx, 1 + step),
            MetaSL2.diag(ctx, 1 + 2 * step),
        ]
        ok = True
        for g in words:
            base = _eval_fsi_raw(sec, g)
            for h in hs:
                if _eval_fsi_raw(sec, g * h) != base:
                    ok = False
                    break
            if not ok:
                break
        if ok:
            level = i
            break
    if level is None:
        raise MetaError("no section level found below the cap")
    _SECTION_LEVELS[key] = level
    return level


def _bound_exponent(p: int, x_bound) -> int:
    """Smallest integer M with p^M >= x_bound, so the compact set
    {|x| <= x_bound} sits inside P^{-M}."""
    b = Q.from_float(x_bound) if isinstance(x_bound, float) else Q(x_bound)
    if b <= 0:
        raise MetaError("the bound on |x| must be positive")
    m = 0
    while Q(p) ** m < b:
        m += 1
    while m > -64 and Q(p) ** (m - 1) >= b:
        m -= 1
    return m


def intertwine_level(eta: CharacterFx, x_bound) -> int:
    """Level needed for the intertwining integral to stabilize on the
    whole compact set {upper(x): |x| <= x_bound}."""
    m = _bound_exponent(eta.ctx.p, x_bound)
    need = max(eta.conductor, 1) + max(m, 0)
    return max(section_level(eta), -(need // -3))


def intertwine_eval_exact(sec: SectionFsi, x: PAdic, x_bound) -> SectionValue:
    """The standard intertwining integral of the level-i section at
    flip*upper(x), computed exactly.

    The integrand at b is the section at lower(-b)*upper(x).  The cell
    decomposition pushes the support onto the ball P^{3i} through the
    substitution b = -z/(1 - z*x), which preserves valuations once
    3i + v(x) >= 1; on the support the torus entry lands in a ball where
    the character and the normalizing root are both trivial, so the
    integral collapses to the volume q^{-3i} exactly.
    """
    ctx = sec.ctx
    if x.ctx != ctx:
        raise MetaError("mixed prime contexts")
    i = sec.i
    if x.value != 0 and Q(ctx.p) ** (-fraction_valuation(x.value, ctx.p)) > Q(x_bound):
        raise MetaError("point lies outside the stated compact set")
    c = max(sec.eta.conductor, 1)
    depth = 3 * i + (fraction_valuation(x.value, ctx.p) if x.value != 0 else 0)
    if x.value != 0 and (depth < 1 or depth < c):
        raise MetaError(
            "support detection failed to stabilize: level too small for this point"
        )
    if i < intertwine_level(sec.eta, x_bound):
        raise MetaError(
            "support detection failed to stabilize somewhere on the compact set"
        )
    # representative checks on the detected support: the decomposition
    # lands back in the ball and the integrand is exactly 1 there
    for t in (1, 2, ctx.p - 1):
        z = Q(t) * Q(ctx.p) ** (3 * i)
        b = -z / (1 - z * x.value)
        a, _, ybar = decompose_big_cell(ctx.of(-b), x)
        assert fraction_valuation(ybar.value, ctx.p) >= 3 * i
        assert fraction_valuation(a.value - 1, ctx.p) >= c
        assert mu_psi(a, twist=-1) == Mu8(0)
        assert sec.eta.phase(a.value) == 0
        val = _eval_fsi_raw(sec, MetaSL2.lower(ctx, -b) * MetaSL2.upper(ctx, x.value))
        assert val == SectionValue.one()
    return SectionValue(Q(0), Q(-3 * i))


def intertwine_eval(sec: SectionFsi, x: PAdic, x_bound) -> complex:
    return intertwine_eval_exact(sec, x, x_bound).as_complex(sec.ctx.p)
