"""The rank-n symplectic group over exact p-adic rationals.

Matrix conventions.  Sp_2n is defined by the form [[0, J], [-J, 0]]
with J the n x n antidiagonal of ones, so the torus is
diag(a_1..a_n, a_n^-1..a_1^-1) and the Borel is upper triangular.  The
Levi embedding is m(A) = diag(A, J tA^-1 J), the abelian radical is
n(X) = [[I, X], [0, I]] with tX = J X J.  One-parameter root subgroups
are realized as follows (rows/columns 1-based, N = 2n + 1):

  line root e_a - e_b:   I + r E[a, b]     - r E[N-b, N-a]
  sum root  e_a + e_b:   I + r E[a, N-b]   + r E[b, N-a]   (a < b)
  long root 2 e_a:       I + r E[a, N-a]
  negatives: the mirrored lower positions with the same signs.

The first listed position is the "primary" one: the coefficient of a
root factor can be read off there.  Weyl generators are m(swap) for the
short simple roots and the middle [[0, 1], [-1, 0]] block for the long
one; canonical monomial representatives multiply those along a reduced
word.  Everything is exact (fractions.Fraction), and the structural
routines (Bruhat normal form, unipotent refactoring, the two cell
rewrites) verify their own output before returning it.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .padic import PhaseQZ, fraction_valuation, _pfrac
from .rootsys import (
    Root,
    WeylElem,
    bruhat_leq,
    is_bad_pair,
    ordered_negated_roots,
    positive_roots,
    reflection,
)

Q = Fraction


class MatrixError(ValueError):
    pass


class FactorizationError(MatrixError):
    pass


@dataclass(frozen=True)
class Mat:
    """Immutable exact matrix tagged with a prime context."""

    ctx: PrimeCtx
    rows: tuple

    @classmethod
    def from_lists(cls, ctx, rows) -> "Mat":
        return cls(ctx, tuple(tuple(Q(x) for x in row) for row in rows))

    @classmethod
    def identity(cls, ctx, size: int) -> "Mat":
        return cls(ctx, tuple(tuple(Q(1 if i == j else 0) for j in range(size)) for i in range(size)))

    @classmethod
    def diagonal(cls, ctx, entries) -> "Mat":
        es = [Q(e) for e in entries]
        return cls(ctx, tuple(tuple(es[i] if i == j else Q(0) for j in range(len(es))) for i in range(len(es))))

    @property
    def size(self) -> int:
        return len(self.rows)

    def __getitem__(self, ij):
        return self.rows[ij[0]][ij[1]]

    def __mul__(self, other: "Mat") -> "Mat":
        if self.ctx != other.ctx or self.size != other.size:
            raise MatrixError("incompatible matrices")
        n = self.size
        orows = other.rows
        out = [[Q(0)] * n for _ in range(n)]
        for i in range(n):
            srow = self.rows[i]
            orow = out[i]
            for k in range(n):
                a = srow[k]
                if a:
                    brow = orows[k]
                    for j in range(n):
                        b = brow[j]
                        if b:
                            orow[j] += a * b
        return Mat(self.ctx, tuple(tuple(r) for r in out))

    def transpose(self) -> "Mat":
        return Mat(self.ctx, tuple(zip(*self.rows)))

    def scale(self, c) -> "Mat":
        c = Q(c)
        return Mat(self.ctx, tuple(tuple(c * x for x in row) for row in self.rows))

    def inverse(self) -> "Mat":
        n = self.size
        a = [list(row) for row in self.rows]
        b = [[Q(1 if i == j else 0) for j in range(n)] for i in range(n)]
        for col in range(n):
            piv = next((r for r in range(col, n) if a[r][col]), None)
            if piv is None:
                raise MatrixError("singular matrix")
            a[col], a[piv] = a[piv], a[col]
            b[col], b[piv] = b[piv], b[col]
            d = a[col][col]
            a[col] = [x / d for x in a[col]]
            b[col] = [x / d for x in b[col]]
            for r in range(n):
                if r != col and a[r][col]:
                    f = a[r][col]
                    a[r] = [x - f * y for x, y in zip(a[r], a[col])]
                    b[r] = [x - f * y for x, y in zip(b[r], b[col])]
        return Mat(self.ctx, tuple(tuple(row) for row in b))

    def is_identity(self) -> bool:
        return all(x == (1 if i == j else 0) for i, row in enumerate(self.rows) for j, x in enumerate(row))

    def is_diagonal(self) -> bool:
        return all(i == j or not x for i, row in enumerate(self.rows) for j, x in enumerate(row))

    def is_upper_triangular(self) -> bool:
        return all(not x for i, row in enumerate(self.rows) for j, x in enumerate(row) if i > j)

    def is_upper_unitriangular(self) -> bool:
        return self.is_upper_triangular() and all(row[i] == 1 for i, row in enumerate(self.rows))

    def is_lower_unitriangular(self) -> bool:
        return self.transpose().is_upper_unitriangular()


def form_matrix(ctx, n: int) -> Mat:
    rows = [[Q(0)] * (2 * n) for _ in range(2 * n)]
    for i in range(n):
        rows[i][2 * n - 1 - i] = Q(1)
        rows[n + i][n - 1 - i] = Q(-1)
    return Mat(ctx, tuple(tuple(r) for r in rows))


def is_symplectic(g: Mat) -> bool:
    n = g.size // 2
    jp = form_matrix(g.ctx, n)
    return g.transpose() * jp * g == jp


def symplectic_inverse(g: Mat) -> Mat:
    # g^-1 = -J' tg J' for symplectic g
    n = g.size // 2
    jp = form_matrix(g.ctx, n)
    return (jp * g.transpose() * jp).scale(-1)


# ------------------------------------------------------- block builders

def levi_embed(ctx, n: int, a_rows) -> Mat:
    """m(A) = diag(A, J tA^-1 J) for A in GL_n."""
    a = Mat.from_lists(ctx, a_rows) if not isinstance(a_rows, Mat) else a_rows
    if a.size != n:
        raise MatrixError("Levi block has wrong size")
    ainv = a.inverse()
    rows = [[Q(0)] * (2 * n) for _ in range(2 * n)]
    for i in range(n):
        for j in range(n):
            rows[i][j] = a.rows[i][j]
            # J tA^-1 J reverses both indices of the transpose
            rows[n + i][n + j] = ainv.rows[n - 1 - j][n - 1 - i]
    return Mat(ctx, tuple(tuple(r) for r in rows))


def radical_embed(ctx, n: int, x_rows) -> Mat:
    """n(X) = [[I, X], [0, I]]; X must satisfy tX = J X J."""
    x = Mat.from_lists(ctx, x_rows) if not isinstance(x_rows, Mat) else x_rows
    for i in range(n):
        for j in range(n):
            if x.rows[j][i] != x.rows[n - 1 - i][n - 1 - j]:
                raise MatrixError("block is not symmetric about the antidiagonal")
    rows = [[Q(1 if i == j else 0) for j in range(2 * n)] for i in range(2 * n)]
    for i in range(n):
        for j in range(n):
            rows[i][n + j] = x.rows[i][j]
    return Mat(ctx, tuple(tuple(r) for r in rows))


def torus(ctx, entries) -> Mat:
    es = [Q(e) for e in entries]
    n = len(es)
    return Mat.diagonal(ctx, es + [1 / e for e in reversed(es)])


def first_axis_torus(ctx, n: int, a) -> Mat:
    """diag(a, 1, ..., 1, a^-1)."""
    return torus(ctx, [Q(a)] + [Q(1)] * (n - 1))


def sl2_embed(ctx, n: int, g2) -> Mat:
    """The middle SL_2 block at lines n, n+1."""
    rows = [[Q(1 if i == j else 0) for j in range(2 * n)] for i in range(2 * n)]
    for i in range(2):
        for j in range(2):
            rows[n - 1 + i][n - 1 + j] = Q(g2[i][j])
    return Mat(ctx, tuple(tuple(r) for r in rows))


def rotation_matrix(ctx, n: int) -> Mat:
    """m of the n-cycle sending line k to line k+1 (line n to line 1)."""
    c = [[Q(0)] * n for _ in range(n)]
    c[0][n - 1] = Q(1)
    for i in range(n - 1):
        c[i + 1][i] = Q(1)
    return levi_embed(ctx, n, c)


def rotate_conjugate(g: Mat) -> Mat:
    """Conjugation by the coordinate rotation."""
    n = g.size // 2
    w1 = rotation_matrix(g.ctx, n)
    return w1 * g * symplectic_inverse(w1)


def corner_column_unipotent(ctx, n: int, ys, x) -> Mat:
    """m of [[I_{n-2}, 0, y], [0, 1, x], [0, 0, 1]]: the zeta-integral slice."""
    if n < 2:
        raise MatrixError("needs rank >= 2")
    if len(ys) != n - 2:
        raise MatrixError("y must have n - 2 entries")
    a = [[Q(1 if i == j else 0) for j in range(n)] for i in range(n)]
    for i, y in enumerate(ys):
        a[i][n - 1] = Q(y)
    a[n - 2][n - 1] = Q(x)
    return levi_embed(ctx, n, a)


# --------------------------------------------------- root group elements

def root_positions(n: int, root: Root):
    """(row, col, sign) list, 0-based, primary first."""
    vec = root.euclid()
    nz = [(i, c) for i, c in enumerate(vec) if c]
    big = 2 * n - 1  # mirror index: pos p maps to big - p
    if len(nz) == 1:
        a, c = nz[0]
        if c == 2:
            return [(a, big - a, 1)]
        return [(big - a, a, 1)]
    (a, ca), (b, cb) = nz
    if ca == 1 and cb == -1:
        return [(a, b, 1), (big - b, big - a, -1)]
    if ca == -1 and cb == 1:
        return [(b, a, 1), (big - a, big - b, -1)]
    if ca == 1 and cb == 1:
        return [(a, big - b, 1), (b, big - a, 1)]
    return [(big - b, a, 1), (big - a, b, 1)]


def root_elem(ctx, n: int, root: Root, r) -> Mat:
    r = Q(r)
    rows = [[Q(1 if i == j else 0) for j in range(2 * n)] for i in range(2 * n)]
    for i, j, s in root_positions(n, root):
        rows[i][j] += s * r
    return Mat(ctx, tuple(tuple(row) for row in rows))


def mul_root_elem(g: Mat, root: Root, r) -> Mat:
    """g * x_root(r) as column updates (cheap for long products)."""
    r = Q(r)
    if not r:
        return g
    n = g.size // 2
    rows = [list(row) for row in g.rows]
    for a, b, s in root_positions(n, root):
        c = s * r
        for i in range(2 * n):
            v = rows[i][a]
            if v:
                rows[i][b] += v * c
    return Mat(g.ctx, tuple(tuple(row) for row in rows))


def mul_root_elem_left(root: Root, r, g: Mat) -> Mat:
    """x_root(r) * g as row updates."""
    r = Q(r)
    if not r:
        return g
    n = g.size // 2
    rows = [list(row) for row in g.rows]
    for a, b, s in root_positions(n, root):
        c = s * r
        src = rows[b]
        dst = rows[a]
        for j in range(2 * n):
            if src[j]:
                dst[j] += c * src[j]
    return Mat(g.ctx, tuple(tuple(row) for row in rows))


def root_product(ctx, n: int, factors) -> Mat:
    """x_{g_1}(r_1) ... x_{g_k}(r_k), left to right."""
    out = Mat.identity(ctx, 2 * n)
    for root, r in factors:
        out = mul_root_elem(out, root, r)
    return out


def root_product_inverse(ctx, n: int, factors) -> Mat:
    return root_product(ctx, n, [(root, -r) for root, r in reversed(list(factors))])


def weyl_generator_matrix(ctx, n: int, k: int) -> Mat:
    if not 1 <= k <= n:
        raise MatrixError("generator index out of range")
    if k < n:
        a = [[Q(1 if i == j else 0) for j in range(n)] for i in range(n)]
        a[k - 1][k - 1] = a[k][k] = Q(0)
        a[k - 1][k] = a[k][k - 1] = Q(1)
        return levi_embed(ctx, n, a)
    return sl2_embed(ctx, n, ((0, 1), (-1, 0)))


def weyl_rep(ctx, w: WeylElem) -> Mat:
    """Canonical monomial representative: generators along a reduced word."""
    out = Mat.identity(ctx, 2 * w.n)
    for k in w.reduced_word():
        out = out * weyl_generator_matrix(ctx, w.n, k)
    return out


def top_cell_matrix(ctx, n: int) -> Mat:
    """Representative of the reflection in 2 e_1: the long corner element."""
    rows = [[Q(0)] * (2 * n) for _ in range(2 * n)]
    rows[0][2 * n - 1] = Q(1)
    rows[2 * n - 1][0] = Q(-1)
    for i in range(1, 2 * n - 1):
        rows[i][i] = Q(1)
    return Mat(ctx, tuple(tuple(r) for r in rows))


# --------------------------------------------------------- Bruhat cells

def _line_weight(n: int, idx: int):
    """Torus weight of coordinate line idx (0-based): +-e_k as (k, sign)."""
    if idx < n:
        return idx, 1
    return 2 * n - 1 - idx, -1


def weyl_from_monomial_pattern(n: int, positions) -> WeylElem:
    """w with w(weight(col)) = weight(row) for each pivot (row, col)."""
    imgs = [0] * n
    by_col = {col: row for row, col in positions}
    for j in range(n):
        row = by_col[j]
        k, s = _line_weight(n, row)
        imgs[j] = (k + 1) * s
    return WeylElem(n, tuple(imgs))


def bruhat_decompose(g: Mat):
    """g = u * t * W(w) * um with u in U, t in T, um in U_w^-.

    Gaussian elimination with lowest-possible pivots: row operations
    only ever add a lower row to a higher one (recorded in an upper
    unitriangular L), column operations only push rightward (recorded in
    an upper unitriangular R).  The result is verified by recomposition
    before returning.
    """
    ctx = g.ctx
    size = g.size
    n = size // 2
    if not is_symplectic(g):
        raise MatrixError("not symplectic")
    a = [list(row) for row in g.rows]
    lmat = [[Q(1 if i == j else 0) for j in range(size)] for i in range(size)]
    rmat = [[Q(1 if i == j else 0) for j in range(size)] for i in range(size)]
    used = [False] * size
    pivots = []
    for col in range(size):
        piv = max((r for r in range(size) if not used[r] and a[r][col]), default=None)
        assert piv is not None, "singular input"
        used[piv] = True
        pivots.append((piv, col))
        pval = a[piv][col]
        for r in range(piv):
            if a[r][col]:
                f = a[r][col] / pval
                for j in range(size):
                    if a[piv][j]:
                        a[r][j] -= f * a[piv][j]
                for j in range(size):
                    if lmat[piv][j]:
                        lmat[r][j] -= f * lmat[piv][j]
        for c2 in range(col + 1, size):
            if a[piv][c2]:
                f = a[piv][c2] / pval
                for r in range(size):
                    if a[r][col]:
                        a[r][c2] -= f * a[r][col]
                for r in range(size):
                    if rmat[r][col]:
                        rmat[r][c2] -= f * rmat[r][col]
    lm = Mat(ctx, tuple(tuple(r) for r in lmat))
    rm = Mat(ctx, tuple(tuple(r) for r in rmat))
    monomial = Mat(ctx, tuple(tuple(r) for r in a))
    w = weyl_from_monomial_pattern(n, pivots)
    wrep = weyl_rep(ctx, w)
    wrep_inv = symplectic_inverse(wrep)
    d = monomial * wrep_inv
    assert d.is_diagonal()
    u_r = rm.inverse()
    a2 = wrep * u_r * wrep_inv
    bmat, cmat = _unitriangular_ul(a2)
    um = wrep_inv * cmat * wrep
    assert um.is_upper_unitriangular()
    dinv = d.inverse()
    u = lm.inverse() * (d * bmat * dinv)
    assert u.is_upper_unitriangular()
    assert u * d * wrep * um == g
    for part in (d, um, u):
        assert is_symplectic(part)
    return u, d, w, um


def _unitriangular_ul(a: Mat):
    """A = B C with B upper and C lower unitriangular, by back recursion."""
    size = a.size
    b = [[Q(1 if i == j else 0) for j in range(size)] for i in range(size)]
    c = [[Q(1 if i == j else 0) for j in range(size)] for i in range(size)]
    for k in range(size - 1, -1, -1):
        for i in range(k):
            s = a.rows[i][k]
            for kp in range(k + 1, size):
                if b[i][kp] and c[kp][k]:
                    s -= b[i][kp] * c[kp][k]
            b[i][k] = s
        for j in range(k):
            s = a.rows[k][j]
            for kp in range(k + 1, size):
                if b[k][kp] and c[kp][j]:
                    s -= b[k][kp] * c[kp][j]
            c[k][j] = s
        diag = a.rows[k][k]
        for kp in range(k + 1, size):
            if b[k][kp] and c[kp][k]:
                diag -= b[k][kp] * c[kp][k]
        if diag != 1:
            raise FactorizationError("input is not in the unitriangular cell")
    return (
        Mat(a.ctx, tuple(tuple(r) for r in b)),
        Mat(a.ctx, tuple(tuple(r) for r in c)),
    )


def weyl_from_rank_pattern(g: Mat) -> WeylElem:
    """Independent cell detector from corner ranks.

    r(i, j) = rank of the submatrix on rows i.., columns ..j; the pivot
    pattern is its discrete mixed difference.  No pivoting choices are
    involved, so this cross-checks the elimination route.
    """
    size = g.size
    n = size // 2

    def corner_rank(i: int, j: int) -> int:
        if i >= size or j <= 0:
            return 0
        sub = [list(row[:j]) for row in g.rows[i:]]
        rank = 0
        rows_n = len(sub)
        for col in range(j):
            piv = next((r for r in range(rank, rows_n) if sub[r][col]), None)
            if piv is None:
                continue
            sub[rank], sub[piv] = sub[piv], sub[rank]
            pr = sub[rank]
            for r in range(rank + 1, rows_n):
                if sub[r][col]:
                    f = sub[r][col] / pr[col]
                    sub[r] = [x - f * y for x, y in zip(sub[r], pr)]
            rank += 1
        return rank

    table = [[corner_rank(i, j) for j in range(size + 1)] for i in range(size + 1)]
    positions = []
    for i in range(size):
        for j in range(1, size + 1):
            if table[i][j] - table[i + 1][j] - table[i][j - 1] + table[i + 1][j - 1] == 1:
                positions.append((i, j - 1))
    return weyl_from_monomial_pattern(n, positions)


# ------------------------------------------------ unipotent coordinates

def primary_position(n: int, root: Root):
    i, j, s = root_positions(n, root)[0]
    return i, j, s


def peel_unipotent(u: Mat):
    """Coordinates of an upper unipotent over ascending root height.

    Peels x_g(-c) off the left for each positive root in height order;
    exact because leftover cross terms always sit at taller positions.
    """
    n = u.size // 2
    if not u.is_upper_unitriangular():
        raise FactorizationError("not upper unitriangular")
    coords = {}
    cur = u
    for g in positive_roots(n):
        i, j, s = primary_position(n, g)
        c = cur.rows[i][j] / s
        if c:
            coords[g] = c
            cur = mul_root_elem_left(g, -c, cur)
    if not cur.is_identity():
        raise FactorizationError("residue after peeling")
    return coords


def unipotent_coords(u: Mat, roots_order):
    """Factor u as prod x_g(c_g) along roots_order, exactly.

    Fixed-point refinement: read discrepancies of the current guess by
    height peeling, push them into the coordinates, repeat.  Converges
    within the nilpotency class; raises if u needs a root outside the
    given order.
    """
    ctx = u.ctx
    n = u.size // 2
    order = list(roots_order)
    cs = {g: Q(0) for g in order}
    max_rounds = 2 * n + 2
    for _ in range(max_rounds):
        prod = root_product(ctx, n, [(g, cs[g]) for g in order])
        if prod == u:
            return [(g, cs[g]) for g in order]
        delta = symplectic_inverse(prod) * u
        fix = peel_unipotent(delta)
        for g, c in fix.items():
            if g not in cs:
                raise FactorizationError(f"needs root {g.coeffs} outside the given order")
            cs[g] += c
    raise FactorizationError("refinement did not converge")


def commutator_coefficients(ctx, n: int, g1: Root, r, g2: Root, s):
    """[x_g1(r), x_g2(s)] = prod x_{i g1 + j g2}(c_ij); returns {(i, j): c}.

    Candidate roots are peeled in ascending height; the residue must be
    the identity, which is asserted.
    """
    from .rootsys import root_from_vector

    r, s = Q(r), Q(s)
    com = root_product(ctx, n, [(g1, r), (g2, s), (g1, -r), (g2, -s)])
    cands = []
    for i in range(1, 5):
        for j in range(1, 5):
            vec = tuple(i * a + j * b for a, b in zip(g1.euclid(), g2.euclid()))
            root = root_from_vector(n, vec)
            if root is not None:
                cands.append(((i, j), root))
    cands.sort(key=lambda t: t[1].height)
    out = {}
    cur = com
    for (i, j), root in cands:
        a, b, sg = primary_position(n, root)
        c = cur.rows[a][b] / sg
        if c:
            out[(i, j)] = c
            cur = mul_root_elem_left(root, -c, cur)
    assert cur.is_identity(), "commutator escaped the candidate span"
    return out


def cell_identity_borel_part(ctx, n: int, root: Root, r) -> Mat:
    """b with x_g(r) x_{-g}(-1/r) = W(s_g) b; checks b is in the Borel."""
    r = Q(r)
    if not r:
        raise MatrixError("needs r nonzero")
    lhs = root_product(ctx, n, [(root, r), (-root, -1 / r)])
    s = reflection(root)
    b = symplectic_inverse(weyl_rep(ctx, s)) * lhs
    if not b.is_upper_triangular():
        raise MatrixError("cell identity failed")
    return b


# --------------------------------------------------- congruence layers

def level_exponents(n: int, m: int):
    """Diagonal valuations of the conjugating torus element."""
    return [-(2 * n - 2 * i - 1) * m for i in range(n)] + [(2 * k + 1) * m for k in range(n)]


def conjugating_torus(ctx, n: int, m: int) -> Mat:
    p = Q(ctx.p)
    return Mat.diagonal(ctx, [p**e for e in level_exponents(n, m)])


def in_standard_level(g: Mat, m: int) -> bool:
    """Membership in the principal congruence subgroup of depth m."""
    p = g.ctx.p
    for i, row in enumerate(g.rows):
        for j, x in enumerate(row):
            if fraction_valuation(x - (1 if i == j else 0), p) < m:
                return False
    return True


def in_skew_level(g: Mat, m: int) -> bool:
    """Membership in the torus-conjugated congruence subgroup."""
    p = g.ctx.p
    es = level_exponents(g.size // 2, m)
    for i, row in enumerate(g.rows):
        for j, x in enumerate(row):
            if fraction_valuation(x - (1 if i == j else 0), p) < m + es[i] - es[j]:
                return False
    return True


def radical_coordinate_bound(root: Root, m: int) -> int:
    """x_root(r) lies in the skew level iff v(r) >= this (positive root)."""
    return -(2 * root.height - 1) * m


def negative_coordinate_bound(root: Root, m: int) -> int:
    """x_{-root}(r) lies in the skew level iff v(r) >= this."""
    return (2 * root.height + 1) * m


def generic_character(u: Mat) -> PhaseQZ:
    """psi of the sum of the n superdiagonal entries through the middle."""
    n = u.size // 2
    if not u.is_upper_unitriangular():
        raise MatrixError("not unipotent upper triangular")
    total = sum((u.rows[i][i + 1] for i in range(n)), Q(0))
    return PhaseQZ(_pfrac(total, u.ctx.p), u.ctx.p)


def skew_level_character(h: Mat, m: int) -> PhaseQZ:
    """The depth-m character: conjugate back and read the superdiagonal."""
    ctx = h.ctx
    n = h.size // 2
    if not in_skew_level(h, m):
        raise MatrixError("not in the skew level subgroup")
    d = conjugating_torus(ctx, n, m)
    k = d.inverse() * h * d
    p = Q(ctx.p)
    total = sum((k.rows[i][i + 1] for i in range(n)), Q(0)) * p ** (-2 * m)
    return PhaseQZ(_pfrac(total, ctx.p), ctx.p)


# --------------------------------------------------------- volume ledger

VOLUME_KINDS = ("U", "U_gamma", "U_w_minus", "U_w_plus", "D")


def volume_exponent(kind: str, n: int, m: int, root: Root = None, w: WeylElem = None) -> int:
    """log_q of the volume of a depth-m coordinate box, vol(U cap K) = 1.

    Each positive-root coordinate contributes (2 ht - 1) m.
    """
    if m < 0:
        raise MatrixError("level must be nonnegative")
    if kind == "U":
        return m * sum(2 * g.height - 1 for g in positive_roots(n))
    if kind == "U_gamma":
        if root is None or not root.is_positive():
            raise MatrixError("needs a positive root")
        return m * (2 * root.height - 1)
    if kind in ("U_w_minus", "U_w_plus"):
        if w is None:
            raise MatrixError("needs a Weyl element")
        roots = w.negated_positive_roots() if kind == "U_w_minus" else w.kept_positive_roots()
        return m * sum(2 * g.height - 1 for g in roots)
    if kind == "D":
        # first-row slice of the radical: 2e_1 and e_1 + e_k
        if n < 2:
            raise MatrixError("needs rank >= 2")
        roots = [Root.from_euclid(n, tuple(2 if k == 0 else 0 for k in range(n)))]
        for j in range(2, n + 1):
            roots.append(Root.from_euclid(n, tuple(1 if k in (0, j - 1) else 0 for k in range(n))))
        return m * sum(2 * g.height - 1 for g in roots)
    raise MatrixError(f"unknown volume kind {kind!r}")


# ----------------------------------------------------------- cell moves

def cell_word_rewrite(t: Mat, w: WeylElem, rs, u: Mat, m: int):
    """Push a depth-m unipotent through a negated-root word.

    Input: torus t, w below the top reflection, coefficients rs along
    ordered_negated_roots(w), and u in the depth-m unipotent subgroup.
    With q the first index whose coefficient escapes depth m, rewrites

        t W(w) x_{q..top}(r) u  =  u~ t W(w) x_{0..top}(r~)

    returning (u_tilde, rs_tilde, q).  The identity is verified exactly
    and the pivot coefficient keeps its absolute value, which is also
    asserted.  Raises FactorizationError when every coefficient already
    sits at depth m (nothing to rewrite).
    """
    ctx = t.ctx
    n = w.n
    order = ordered_negated_roots(w)
    rs = [Q(r) for r in rs]
    if len(rs) != len(order):
        raise MatrixError("coefficient list does not match the negated-root order")
    q = next(
        (k for k, (g, r) in enumerate(zip(order, rs)) if fraction_valuation(r, ctx.p) < radical_coordinate_bound(g, m)),
        None,
    )
    if q is None:
        raise FactorizationError("word already lies at depth m")
    if not (u.is_upper_unitriangular() and in_skew_level(u, m)):
        raise MatrixError("u is not in the depth-m unipotent subgroup")
    if not t.is_diagonal() or not is_symplectic(t):
        raise MatrixError("t is not in the torus")

    plus_order = sorted(w.kept_positive_roots(), key=lambda g: (g.height, g.coeffs))
    full_order = plus_order + list(reversed(order))
    u_coords = unipotent_coords(u, full_order)
    u_plus = root_product(ctx, n, u_coords[: len(plus_order)])
    tail = u_coords[len(plus_order):]

    desc = [(order[k], rs[k]) for k in range(len(order) - 1, q - 1, -1)]
    x_part = root_product(ctx, n, desc)
    conj = x_part * u_plus * root_product_inverse(ctx, n, desc)
    conj_coords = unipotent_coords(conj, full_order)
    u1_plus = root_product(ctx, n, conj_coords[: len(plus_order)])
    u1_minus = root_product(ctx, n, conj_coords[len(plus_order):])

    v = u1_minus * x_part * root_product(ctx, n, tail)
    v_coords = unipotent_coords(v, list(reversed(order)))
    rt = {g: c for g, c in v_coords}
    rs_tilde = [rt[g] for g in order]

    wrep = weyl_rep(ctx, w)
    tw = t * wrep
    u_tilde = tw * u1_plus * symplectic_inverse(tw)
    if not u_tilde.is_upper_unitriangular():
        raise FactorizationError("conjugated plus part left the unipotent radical")

    lhs = tw * x_part * u
    rhs = u_tilde * tw * root_product(ctx, n, list(reversed(list(zip(order, rs_tilde)))))
    assert lhs == rhs, "rewrite identity failed"
    assert fraction_valuation(rs_tilde[q], ctx.p) == fraction_valuation(rs[q], ctx.p), "pivot size drifted"
    return u_tilde, rs_tilde, q


def cell_collapse_witness(t: Mat, w: WeylElem, roots, rs, bad_index: int = None):
    """Append an opposite root factor and land strictly below w.

    roots is a height-ordered sublist of the negated positive roots of
    w (typically a tail of the insertion order) with coefficients rs.
    Without bad_index the lowest root must not start a bad pair inside
    the list and its coefficient must be nonzero; the product

        t W(w) x_{top}(r_top) ... x_{0}(r_0) x_{-roots[0]}(-1/r_0)

    is then decomposed.  With bad_index = l the pair
    (roots[0], roots[l]) must be bad; the factor at l is omitted from
    the descending product and reinstated at the far right next to its
    opposite.  Returns the cell w' of the result, asserting w' < w.
    """
    ctx = t.ctx
    n = w.n
    roots = list(roots)
    rs = [Q(r) for r in rs]
    if not roots or len(rs) != len(roots):
        raise MatrixError("coefficient list does not match the root list")
    negated = set(w.negated_positive_roots())
    if any(g not in negated for g in roots):
        raise MatrixError("list must consist of roots sent negative by w")
    if any(roots[k].height > roots[k + 1].height for k in range(len(roots) - 1)):
        raise MatrixError("list must be weakly increasing in height")
    if bad_index is None:
        if any(is_bad_pair(roots[0], g) for g in roots[1:]):
            raise MatrixError("lowest root starts a bad pair; pass bad_index")
        if not rs[0]:
            raise MatrixError("lowest coefficient must be nonzero")
        factors = [(roots[k], rs[k]) for k in range(len(roots) - 1, -1, -1)]
        factors.append((-roots[0], -1 / rs[0]))
    else:
        if not 1 <= bad_index < len(roots):
            raise MatrixError("bad_index out of range")
        if not is_bad_pair(roots[0], roots[bad_index]):
            raise MatrixError("chosen index does not complete a bad pair")
        if not rs[bad_index]:
            raise MatrixError("bad-pair coefficient must be nonzero")
        factors = [(roots[k], rs[k]) for k in range(len(roots) - 1, -1, -1) if k != bad_index]
        factors.append((roots[bad_index], rs[bad_index]))
        factors.append((-roots[bad_index], -1 / rs[bad_index]))
    g = t * weyl_rep(ctx, w) * root_product(ctx, n, factors)
    _, _, w_prime, _ = bruhat_decompose(g)
    assert bruhat_leq(w_prime, w) and w_prime != w, "cell did not drop"
    return w_prime
