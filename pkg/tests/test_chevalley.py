"""Symplectic matrix layer: root subgroups, cells, congruence filtrations.

Independent routes used here:
  * a standalone matrix multiplier plus literal generator matrices, so
    commutator tables and Weyl representatives are cross-checked without
    going through the Mat class;
  * the corner-rank cell detector (no pivoting choices) against the
    elimination-based Bruhat normal form;
  * a filtration-walk volume oracle that counts one-root coset layers
    directly, against the closed-form volume exponents.
"""
import random
from fractions import Fraction as Q

import pytest

from padicsp.padic import PAdic, PrimeCtx, fraction_valuation, psi
from padicsp.rootsys import (
    Root,
    WeylElem,
    bad_triples,
    bruhat_leq,
    coordinate_rotation,
    full_weyl_group,
    highest_root_reflection,
    is_bad_pair,
    ordered_negated_roots,
    positive_roots,
    reflection,
    root_from_vector,
    simple_roots,
)
from padicsp.chevalley import (
    FactorizationError,
    Mat,
    MatrixError,
    bruhat_decompose,
    cell_collapse_witness,
    cell_identity_borel_part,
    cell_word_rewrite,
    commutator_coefficients,
    conjugating_torus,
    corner_column_unipotent,
    first_axis_torus,
    form_matrix,
    generic_character,
    in_skew_level,
    in_standard_level,
    is_symplectic,
    level_exponents,
    levi_embed,
    mul_root_elem,
    mul_root_elem_left,
    negative_coordinate_bound,
    peel_unipotent,
    radical_coordinate_bound,
    radical_embed,
    root_elem,
    root_product,
    rotate_conjugate,
    rotation_matrix,
    skew_level_character,
    sl2_embed,
    symplectic_inverse,
    top_cell_matrix,
    torus,
    unipotent_coords,
    volume_exponent,
    weyl_from_rank_pattern,
    weyl_rep,
)

C3 = PrimeCtx(3)


# --------------------------------------------------------------- oracles

def oracle_matmul(a, b):
    """Plain nested-loop product on tuples, independent of Mat."""
    size = len(a)
    return tuple(
        tuple(sum(a[i][k] * b[k][j] for k in range(size)) for j in range(size))
        for i in range(size)
    )


def oracle_identity(size):
    return tuple(tuple(Q(1 if i == j else 0) for j in range(size)) for i in range(size))


def oracle_commutator(x, y):
    """x y x^-1 y^-1 for square-zero displacements, where I - N inverts I + N."""
    size = len(x)
    eye = oracle_identity(size)
    xi = tuple(tuple(2 * eye[i][j] - x[i][j] for j in range(size)) for i in range(size))
    yi = tuple(tuple(2 * eye[i][j] - y[i][j] for j in range(size)) for i in range(size))
    return oracle_matmul(oracle_matmul(x, y), oracle_matmul(xi, yi))


def rank2_literal(name, r):
    """Literal 4x4 one-parameter matrices for the rank-2 group."""
    r = Q(r)
    eye = [[Q(1 if i == j else 0) for j in range(4)] for i in range(4)]
    spots = {
        "line": [(0, 1, 1), (2, 3, -1)],    # e1 - e2
        "long_low": [(1, 2, 1)],            # 2 e2
        "sum": [(0, 2, 1), (1, 3, 1)],      # e1 + e2
        "long_high": [(0, 3, 1)],           # 2 e1
    }[name]
    for i, j, s in spots:
        eye[i][j] += s * r
    return tuple(tuple(row) for row in eye)


def oracle_volume_exponent(ctx, n, m, roots, rng, enumerate_cap=60000):
    """Walk the descending-height filtration and count each coset layer.

    Adding one root at level m on top of level-0 coordinates is a group
    step whose quotient is P^{-(2h-1)m}/O; the layer size is counted by
    enumerating representatives when small enough, asserting pairwise
    distinctness mod O on samples.  Membership semantics are checked
    through coordinate factorization.
    """
    total = 0
    order = sorted(roots, key=lambda h: (h.height, h.coeffs))
    for g in sorted(roots, key=lambda h: -h.height):
        bound = (2 * g.height - 1) * m
        layer = ctx.p**bound
        if layer <= enumerate_cap:
            reps = [Q(a, layer) for a in range(layer)]
            assert len(set(reps)) == layer
            for _ in range(8):
                a, b = rng.randrange(layer), rng.randrange(layer)
                diff = reps[a] - reps[b]
                assert (fraction_valuation(diff, ctx.p) >= 0) == (a == b)
        total += bound
        # the new coordinate is visible at exactly this layer
        r = Q(rng.randrange(1, ctx.p), layer)
        x = root_elem(ctx, n, g, r)
        for root, c in unipotent_coords(x, order):
            if root == g:
                assert fraction_valuation(c, ctx.p) == -bound
            else:
                assert c == 0
    # box closure and unique recovery of shuffled products
    for _ in range(12):
        factors = []
        for g in roots:
            v = -(2 * g.height - 1) * m + rng.randrange(0, 2 * g.height)
            factors.append((g, Q(rng.randrange(-4, 5)) * Q(ctx.p) ** v))
        rng.shuffle(factors)
        u = root_product(ctx, n, factors)
        for g, c in unipotent_coords(u, order):
            assert fraction_valuation(c, ctx.p) >= -(2 * g.height - 1) * m
    return total


def random_root_word_matrix(ctx, n, rng, length=6):
    roots = positive_roots(n)
    g = Mat.identity(ctx, 2 * n)
    for _ in range(length):
        root = roots[rng.randrange(len(roots))]
        if rng.random() < 0.5:
            root = -root
        g = mul_root_elem(g, root, Q(rng.randint(-6, 6), rng.choice([1, 1, 3, 9])))
    entries = [Q(ctx.p) ** rng.randrange(-2, 3) * rng.choice([1, 2, -1]) for _ in range(n)]
    g = g * torus(ctx, entries)
    if rng.random() < 0.5:
        word = [rng.randrange(1, n + 1) for _ in range(rng.randrange(3))]
        for k in word:
            g = g * weyl_rep(ctx, WeylElem.simple(n, k))
    return g


def random_unipotent(ctx, n, rng, depth=None):
    u = Mat.identity(ctx, 2 * n)
    for g in positive_roots(n):
        if depth is None:
            v = rng.randrange(-3, 3)
        else:
            v = radical_coordinate_bound(g, depth) + rng.randrange(0, 3)
        u = mul_root_elem(u, g, Q(rng.randint(-5, 5)) * Q(ctx.p) ** v)
    return u


# ---------------------------------------------------------- matrix layer

def test_mat_mul_matches_oracle():
    rng = random.Random(1)
    for _ in range(10):
        a = Mat(C3, tuple(tuple(Q(rng.randint(-5, 5), rng.choice([1, 2, 3])) for _ in range(4)) for _ in range(4)))
        b = Mat(C3, tuple(tuple(Q(rng.randint(-5, 5), rng.choice([1, 2, 3])) for _ in range(4)) for _ in range(4)))
        assert (a * b).rows == oracle_matmul(a.rows, b.rows)


def test_mat_inverse_round_trip():
    rng = random.Random(2)
    for n in (2, 3):
        g = random_root_word_matrix(C3, n, rng)
        assert (g * g.inverse()).is_identity()
        assert symplectic_inverse(g) == g.inverse()


def test_form_matrix_and_symplectic_checks():
    jp = form_matrix(C3, 2)
    assert jp.rows == (
        (0, 0, 0, 1),
        (0, 0, 1, 0),
        (0, -1, 0, 0),
        (-1, 0, 0, 0),
    )
    assert not is_symplectic(Mat.diagonal(C3, [1, 2, 3, 4]))
    assert is_symplectic(Mat.diagonal(C3, [2, 3, Q(1, 3), Q(1, 2)]))


def test_levi_embed_is_homomorphism():
    rng = random.Random(3)
    done = 0
    while done < 6:
        a = [[Q(rng.randint(-4, 4)) for _ in range(3)] for _ in range(3)]
        b = [[Q(rng.randint(-4, 4)) for _ in range(3)] for _ in range(3)]
        try:
            Mat.from_lists(C3, a).inverse()
            Mat.from_lists(C3, b).inverse()
        except MatrixError:
            continue
        done += 1
        ma = levi_embed(C3, 3, a)
        mb = levi_embed(C3, 3, b)
        assert is_symplectic(ma)
        ab = oracle_matmul(tuple(map(tuple, a)), tuple(map(tuple, b)))
        assert ma * mb == levi_embed(C3, 3, ab)


def test_radical_embed_addition_and_validation():
    x = [[Q(1), Q(2)], [Q(3), Q(1)]]
    y = [[Q(0), Q(5)], [Q(7), Q(0)]]
    nx = radical_embed(C3, 2, x)
    ny = radical_embed(C3, 2, y)
    assert is_symplectic(nx)
    assert nx * ny == radical_embed(C3, 2, [[Q(1), Q(7)], [Q(10), Q(1)]])
    with pytest.raises(MatrixError):
        radical_embed(C3, 2, [[Q(1), Q(2)], [Q(3), Q(4)]])


def test_sl2_embed_and_middle_block():
    g = sl2_embed(C3, 3, ((Q(2), Q(1)), (Q(1), Q(1))))
    assert is_symplectic(g)
    assert g.rows[2][2] == 2 and g.rows[2][3] == 1 and g.rows[3][2] == 1


# ------------------------------------------------------- root subgroups

@pytest.mark.parametrize("n", [2, 3, 4])
def test_one_parameter_property(n):
    rng = random.Random(10 + n)
    for g in positive_roots(n):
        for root in (g, -g):
            r = Q(rng.randint(-9, 9), rng.choice([1, 3, 9]))
            s = Q(rng.randint(-9, 9), rng.choice([1, 3]))
            x = root_elem(C3, n, root, r)
            assert is_symplectic(x)
            assert x * root_elem(C3, n, root, s) == root_elem(C3, n, root, r + s)
            assert symplectic_inverse(x) == root_elem(C3, n, root, -r)


def test_rank2_matrices_match_literals():
    names = {(1, 0): "line", (0, 1): "long_low", (1, 1): "sum", (2, 1): "long_high"}
    for coeffs, name in names.items():
        root = Root(2, coeffs)
        assert root_elem(C3, 2, root, Q(7, 3)).rows == rank2_literal(name, Q(7, 3))


@pytest.mark.parametrize("n", [2, 3])
def test_torus_conjugation_scales_by_root_value(n):
    rng = random.Random(20 + n)
    entries = [Q(rng.choice([1, 2, 3, 5]), rng.choice([1, 3])) for _ in range(n)]
    t = torus(C3, entries)
    for g in positive_roots(n):
        for root in (g, -g):
            val = Q(1)
            for i, c in enumerate(root.euclid()):
                val *= entries[i] ** c
            x = root_elem(C3, n, root, Q(5))
            assert t * x * symplectic_inverse(t) == root_elem(C3, n, root, val * 5)


@pytest.mark.parametrize("n", [2, 3])
def test_weyl_conjugation_permutes_root_groups(n):
    rng = random.Random(30 + n)
    group = full_weyl_group(n)
    for _ in range(15):
        w = group[rng.randrange(len(group))]
        wrep = weyl_rep(C3, w)
        g = positive_roots(n)[rng.randrange(n * n)]
        r = Q(rng.randint(1, 7))
        conj = wrep * root_elem(C3, n, g, r) * symplectic_inverse(wrep)
        target = w.apply(g)
        assert conj in (root_elem(C3, n, target, r), root_elem(C3, n, target, -r))


def test_fast_multiplication_paths():
    rng = random.Random(4)
    for n in (2, 3):
        g = random_root_word_matrix(C3, n, rng)
        for root in (positive_roots(n)[1], -positive_roots(n)[2]):
            r = Q(rng.randint(-5, 5), 3)
            assert mul_root_elem(g, root, r) == g * root_elem(C3, n, root, r)
            assert mul_root_elem_left(root, r, g) == root_elem(C3, n, root, r) * g


# ------------------------------------------------ corner slice relations

def test_corner_slice_torus_product():
    # t(a) j(r(y, 0)) is the Levi element with first column (a, y, .., 1)
    for n in (3, 4):
        rng = random.Random(40 + n)
        for _ in range(25):
            ys = [Q(rng.randint(-6, 6), rng.choice([1, 3])) for _ in range(n - 2)]
            a = Q(rng.choice([1, 2, 5]), rng.choice([1, 3]))
            lhs = first_axis_torus(C3, n, a) * rotate_conjugate(corner_column_unipotent(C3, n, ys, 0))
            block = [[Q(1 if i == j else 0) for j in range(n)] for i in range(n)]
            block[0][0] = a
            for i, y in enumerate(ys):
                block[i + 1][0] = y
            assert lhs == levi_embed(C3, n, block)


def test_corner_slice_conjugation_extracts_character_entry():
    # X(-r) m(lower block) X(r) equals a column bump times the block; the
    # bump carries y_k r in rows 2..i+1 of column i+2 plus an (a-1) r
    # corner entry that the superdiagonal character never sees, so its
    # character value is psi(y_i r) exactly.
    for n in (3, 4):
        rng = random.Random(50 + n)
        for i in range(1, n - 1):
            for _ in range(12):
                ys = [Q(rng.randint(-6, 6), rng.choice([1, 3])) for _ in range(i)]
                a = Q(rng.choice([1, 2, 5]), rng.choice([1, 3]))
                block = [[Q(1 if u == v else 0) for v in range(n)] for u in range(n)]
                block[0][0] = a
                for k, y in enumerate(ys):
                    block[k + 1][0] = y
                mid = levi_embed(C3, n, block)
                r = Q(rng.randint(-5, 5), rng.choice([1, 3, 9]))
                chain = Root(n, tuple(1 if k <= i else 0 for k in range(n - 1)) + (0,))
                assert chain.euclid()[0] == 1 and chain.euclid()[i + 1] == -1
                lhs = root_elem(C3, n, chain, -r) * mid * root_elem(C3, n, chain, r)
                bump = [[Q(1 if u == v else 0) for v in range(n)] for u in range(n)]
                bump[0][i + 1] = (a - 1) * r
                for k, y in enumerate(ys):
                    bump[k + 1][i + 1] = y * r
                assert lhs == levi_embed(C3, n, bump) * mid
                assert generic_character(levi_embed(C3, n, bump)) == psi(PAdic(ys[-1] * r, C3))


# ------------------------------------------------------------ Weyl layer

def test_weyl_rep_patterns_and_frozen_top_cell():
    w0 = top_cell_matrix(C3, 2)
    assert w0.rows == ((0, 0, 0, 1), (0, 1, 0, 0), (0, 0, 1, 0), (-1, 0, 0, 0))
    assert is_symplectic(w0)
    assert weyl_from_rank_pattern(w0) == highest_root_reflection(2)
    assert weyl_from_rank_pattern(rotation_matrix(C3, 3)) == coordinate_rotation(3)
    assert weyl_from_rank_pattern(Mat.identity(C3, 6)).is_identity()
    assert weyl_from_rank_pattern(torus(C3, [Q(3), Q(1, 3), Q(5)])).is_identity()


@pytest.mark.parametrize("n", [2, 3])
def test_weyl_rep_consistent_with_abstract_group(n):
    for w in full_weyl_group(n):
        rep = weyl_rep(C3, w)
        assert is_symplectic(rep)
        assert weyl_from_rank_pattern(rep) == w


# ---------------------------------------------------------- Bruhat cells

@pytest.mark.parametrize("n", [2, 3])
def test_bruhat_decompose_random_products(n):
    rng = random.Random(60 + n)
    for _ in range(60):
        g = random_root_word_matrix(C3, n, rng)
        u, d, w, um = bruhat_decompose(g)
        assert u * d * weyl_rep(C3, w) * um == g
        assert weyl_from_rank_pattern(g) == w
        minus = sorted(w.negated_positive_roots(), key=lambda x: (x.height, x.coeffs))
        unipotent_coords(um, minus)  # must factor over the negated set


def test_bruhat_decompose_edge_cells():
    assert bruhat_decompose(Mat.identity(C3, 4))[2].is_identity()
    u, d, w, um = bruhat_decompose(top_cell_matrix(C3, 3))
    assert w == highest_root_reflection(3)
    assert u.is_identity() and um.is_identity()
    g = root_elem(C3, 2, Root(2, (1, 0)), Q(2, 3))
    u, d, w, um = bruhat_decompose(g)
    assert w.is_identity() and um.is_identity() and d.is_identity()


def test_bruhat_rejects_non_symplectic():
    with pytest.raises(MatrixError):
        bruhat_decompose(Mat.diagonal(C3, [1, 2, 3, 4]))


# ------------------------------------------------- unipotent coordinates

@pytest.mark.parametrize("n", [2, 3])
def test_peel_and_coords_round_trip(n):
    rng = random.Random(70 + n)
    roots = positive_roots(n)
    for _ in range(20):
        u = Mat.identity(C3, 2 * n)
        for g in roots:
            if rng.random() < 0.7:
                u = mul_root_elem(u, g, Q(rng.randint(-6, 6), rng.choice([1, 3, 9])))
        cs = peel_unipotent(u)
        asc = sorted(cs.items(), key=lambda t: (t[0].height, t[0].coeffs))
        assert root_product(C3, n, asc) == u
        shuffled = list(roots)
        rng.shuffle(shuffled)
        cs2 = unipotent_coords(u, shuffled)
        assert root_product(C3, n, cs2) == u


def test_unipotent_coords_rejects_missing_root():
    u = root_elem(C3, 2, Root(2, (0, 1)), Q(1, 3))
    with pytest.raises(FactorizationError):
        unipotent_coords(u, [Root(2, (1, 0)), Root(2, (1, 1)), Root(2, (2, 1))])


def test_peel_rejects_non_unipotent():
    with pytest.raises(FactorizationError):
        peel_unipotent(torus(C3, [Q(3), Q(5)]))


# ------------------------------------------------------------ commutators

def test_commutators_match_literal_oracle_rank2():
    rng = random.Random(8)
    names = {(1, 0): "line", (0, 1): "long_low", (1, 1): "sum", (2, 1): "long_high"}
    pairs = [((1, 0), (0, 1)), ((1, 0), (1, 1)), ((0, 1), (1, 1)), ((1, 1), (2, 1)), ((1, 0), (2, 1))]
    for c1, c2 in pairs:
        r = Q(rng.randint(1, 7), rng.choice([1, 3]))
        s = Q(rng.randint(1, 7), rng.choice([1, 3]))
        got = commutator_coefficients(C3, 2, Root(2, c1), r, Root(2, c2), s)
        lhs = oracle_commutator(rank2_literal(names[c1], r), rank2_literal(names[c2], s))
        rhs = oracle_identity(4)
        for (i, j), c in sorted(got.items(), key=lambda t: sum(t[0])):
            vec = tuple(i * a + j * b for a, b in zip(Root(2, c1).euclid(), Root(2, c2).euclid()))
            root = root_from_vector(2, vec)
            rhs = oracle_matmul(rhs, root_elem(C3, 2, root, c).rows)
        assert lhs == rhs


def test_commutator_frozen_values_rank2():
    # [x_{e1-e2}(r), x_{2e2}(s)] = x_{e1+e2}(rs) x_{2e1}(r^2 s)
    got = commutator_coefficients(C3, 2, Root(2, (1, 0)), Q(2), Root(2, (0, 1)), Q(3))
    assert got == {(1, 1): Q(6), (2, 1): Q(12)}
    # [x_{e1-e2}(r), x_{e1+e2}(s)] = x_{2e1}(2 r s)
    got = commutator_coefficients(C3, 2, Root(2, (1, 0)), Q(2), Root(2, (1, 1)), Q(3))
    assert got == {(1, 1): Q(12)}
    # members of a bad pair commute
    got = commutator_coefficients(C3, 2, Root(2, (1, 1)), Q(2), Root(2, (2, 1)), Q(3))
    assert got == {}


@pytest.mark.parametrize("n", [2, 3])
def test_radical_roots_commute(n):
    rng = random.Random(80 + n)
    radical = [g for g in positive_roots(n) if g.in_radical()]
    for g1 in radical:
        for g2 in radical:
            if g1 == g2:
                continue
            got = commutator_coefficients(
                C3, n, g1, Q(rng.randint(1, 5)), g2, Q(rng.randint(1, 5))
            )
            assert got == {}


# ------------------------------------------------------- cell identities

@pytest.mark.parametrize("n", [2, 3])
def test_cell_identity_all_roots(n):
    rng = random.Random(90 + n)
    for g in positive_roots(n):
        for _ in range(5):
            r = Q(rng.choice([1, 2, 4, 5]), rng.choice([1, 3, 9]))
            if rng.random() < 0.5:
                r = -r
            b = cell_identity_borel_part(C3, n, g, r)
            assert b.is_upper_triangular()
            lhs = root_product(C3, n, [(g, r), (-g, -1 / r)])
            assert weyl_rep(C3, reflection(g)) * b == lhs


def test_cell_identity_long_root_block():
    # the middle 2x2 content of the long-root identity, frozen
    r = Q(5, 3)
    lhs = root_product(C3, 2, [(Root(2, (0, 1)), r), (-Root(2, (0, 1)), -1 / r)])
    assert lhs == sl2_embed(C3, 2, ((Q(0), r), (-1 / r, Q(1))))


def test_cell_identity_rejects_zero():
    with pytest.raises(MatrixError):
        cell_identity_borel_part(C3, 2, Root(2, (1, 0)), Q(0))


# ------------------------------------------------------------ congruence

def test_level_exponents_frozen():
    assert level_exponents(2, 1) == [-3, -1, 1, 3]
    assert level_exponents(3, 2) == [-10, -6, -2, 2, 6, 10]
    assert conjugating_torus(C3, 2, 1) == Mat.diagonal(C3, [Q(3) ** e for e in (-3, -1, 1, 3)])


@pytest.mark.parametrize("n", [2, 3, 4])
@pytest.mark.parametrize("m", [1, 2])
def test_root_coordinate_bounds_sharp(n, m):
    for g in positive_roots(n):
        b = radical_coordinate_bound(g, m)
        assert b == -(2 * g.height - 1) * m
        assert in_skew_level(root_elem(C3, n, g, Q(3) ** b), m)
        assert not in_skew_level(root_elem(C3, n, g, Q(3) ** (b - 1)), m)
        nb = negative_coordinate_bound(g, m)
        assert nb == (2 * g.height + 1) * m
        assert in_skew_level(root_elem(C3, n, -g, Q(3) ** nb), m)
        assert not in_skew_level(root_elem(C3, n, -g, Q(3) ** (nb - 1)), m)


def test_skew_level_is_conjugated_standard_level():
    rng = random.Random(5)
    n, m = 2, 1
    d = conjugating_torus(C3, n, m)
    dinv = d.inverse()
    for _ in range(30):
        factors = []
        for g in positive_roots(n):
            v = radical_coordinate_bound(g, m) + rng.randrange(0, 4)
            factors.append((g, Q(rng.randint(-4, 4)) * Q(3) ** v))
        for g in positive_roots(n):
            v = negative_coordinate_bound(g, m) + rng.randrange(0, 3)
            factors.append((-g, Q(rng.randint(-4, 4)) * Q(3) ** v))
        rng.shuffle(factors)
        h = root_product(C3, n, factors)
        assert in_skew_level(h, m)
        assert in_standard_level(dinv * h * d, m)


@pytest.mark.parametrize("n", [2, 3, 4])
@pytest.mark.parametrize("m", [1, 2])
def test_depth_unipotent_product_closure(n, m):
    rng = random.Random(100 + n + m)
    for _ in range(10):
        factors = []
        for g in positive_roots(n):
            v = radical_coordinate_bound(g, m) + rng.randrange(0, 2 * g.height + 1)
            factors.append((g, Q(rng.randint(-6, 6)) * Q(3) ** v))
        rng.shuffle(factors)
        u = root_product(C3, n, factors)
        assert u.is_upper_unitriangular() and in_skew_level(u, m)
        # factoring back in ascending order stays within the box
        for g, c in unipotent_coords(u, positive_roots(n)):
            assert c == 0 or fraction_valuation(c, 3) >= radical_coordinate_bound(g, m)


def test_generic_character_values_and_multiplicativity():
    rng = random.Random(6)
    n = 3
    for g in simple_roots(n):
        u = root_elem(C3, n, g, Q(2, 9))
        assert generic_character(u).exponent == Q(2, 9)
    for g in positive_roots(n):
        if g.height > 1:
            u = root_elem(C3, n, g, Q(1, 27))
            assert generic_character(u).is_one()
    for _ in range(20):
        u1 = random_unipotent(C3, n, rng)
        u2 = random_unipotent(C3, n, rng)
        assert generic_character(u1 * u2) == generic_character(u1) * generic_character(u2)


@pytest.mark.parametrize("n", [2, 3])
@pytest.mark.parametrize("m", [1, 2])
def test_depth_character_agrees_with_generic_on_unipotent_part(n, m):
    rng = random.Random(110 + n + m)
    for _ in range(15):
        u = random_unipotent(C3, n, rng, depth=m)
        assert in_skew_level(u, m)
        assert skew_level_character(u, m) == generic_character(u)


def test_depth_character_multiplicative_and_nontrivial():
    n, m = 2, 1
    rng = random.Random(7)
    g = simple_roots(n)[0]
    h = root_elem(C3, n, g, Q(1, 3**m))
    assert not skew_level_character(h, m).is_one()
    for _ in range(15):
        h1 = random_unipotent(C3, n, rng, depth=m)
        h2 = random_unipotent(C3, n, rng, depth=m)
        lhs = skew_level_character(h1 * h2, m)
        assert lhs == skew_level_character(h1, m) * skew_level_character(h2, m)
    with pytest.raises(MatrixError):
        skew_level_character(root_elem(C3, n, g, Q(1, 3 ** (m + 5))), m)


# --------------------------------------------------------------- volumes

def test_volume_exponent_closed_forms():
    for n in (2, 3, 4):
        w0 = highest_root_reflection(n)
        assert volume_exponent("U_w_minus", n, 1, w=w0) == (2 * n - 1) ** 2
        d_exp = volume_exponent("D", n, 1)
        assert d_exp - (2 * n - 1) ** 2 == -((n - 1) ** 2)
        total = volume_exponent("U", n, 1)
        assert total == sum(2 * g.height - 1 for g in positive_roots(n))
        assert volume_exponent("U_w_plus", n, 1, w=w0) == total - (2 * n - 1) ** 2
    for g in positive_roots(3):
        assert volume_exponent("U_gamma", 3, 2, root=g) == (2 * g.height - 1) * 2
    with pytest.raises(MatrixError):
        volume_exponent("U", 2, -1)
    with pytest.raises(MatrixError):
        volume_exponent("banana", 2, 1)


@pytest.mark.parametrize("n", [2, 3])
def test_volume_exponent_against_filtration_oracle(n):
    rng = random.Random(120 + n)
    m = 1
    w0 = highest_root_reflection(n)
    assert volume_exponent("U", n, m) == oracle_volume_exponent(C3, n, m, positive_roots(n), rng)
    assert volume_exponent("U_w_minus", n, m, w=w0) == oracle_volume_exponent(
        C3, n, m, w0.negated_positive_roots(), rng
    )
    d_roots = [Root.from_euclid(n, tuple(2 if k == 0 else 0 for k in range(n)))]
    for j in range(2, n + 1):
        d_roots.append(Root.from_euclid(n, tuple(1 if k in (0, j - 1) else 0 for k in range(n))))
    assert volume_exponent("D", n, m) == oracle_volume_exponent(C3, n, m, d_roots, rng)


# -------------------------------------------------------- cell rewriting

def admissible_rewrite_case(ctx, n, m, rng):
    w0 = highest_root_reflection(n)
    ws = [w for w in full_weyl_group(n) if bruhat_leq(w, w0) and w.length() >= 1]
    w = ws[rng.randrange(len(ws))]
    order = ordered_negated_roots(w)
    q_at = rng.randrange(len(order))
    rs = []
    for k, g in enumerate(order):
        bound = radical_coordinate_bound(g, m)
        if k == q_at:
            v = bound - 1 - rng.randrange(3)
        elif k < q_at:
            v = bound + rng.randrange(3)
        else:
            v = bound - rng.randrange(3)
        units = [c for c in (1, 2, 4, 5, 7) if c % ctx.p]
        rs.append(Q(rng.choice(units)) * Q(ctx.p) ** v)
    u = random_unipotent(ctx, n, rng, depth=m)
    t = torus(ctx, [Q(ctx.p) ** rng.randrange(-2, 3) * rng.choice([1, 2]) for _ in range(n)])
    return w, rs, u, t, q_at


@pytest.mark.parametrize("n,m", [(2, 1), (2, 2), (3, 1), (3, 2)])
def test_cell_word_rewrite_admissible_cases(n, m):
    rng = random.Random(130 + 10 * n + m)
    for _ in range(12):
        w, rs, u, t, q_at = admissible_rewrite_case(C3, n, m, rng)
        u_tilde, rs_tilde, q = cell_word_rewrite(t, w, rs, u, m)
        assert q <= q_at
        assert u_tilde.is_upper_unitriangular()
        order = ordered_negated_roots(w)
        assert fraction_valuation(rs_tilde[q], 3) == fraction_valuation(rs[q], 3)
        lhs = t * weyl_rep(C3, w)
        for k in range(len(order) - 1, q - 1, -1):
            lhs = mul_root_elem(lhs, order[k], rs[k])
        lhs = lhs * u
        rhs = u_tilde * t * weyl_rep(C3, w)
        for k in range(len(order) - 1, -1, -1):
            rhs = mul_root_elem(rhs, order[k], rs_tilde[k])
        assert lhs == rhs


def test_cell_word_rewrite_rejects_in_depth_word():
    n, m = 2, 1
    rng = random.Random(9)
    w = highest_root_reflection(n)
    order = ordered_negated_roots(w)
    rs = [Q(3) ** radical_coordinate_bound(g, m) for g in order]
    u = random_unipotent(C3, n, rng, depth=m)
    t = torus(C3, [Q(1), Q(1)])
    with pytest.raises(FactorizationError):
        cell_word_rewrite(t, w, rs, u, m)


def test_cell_word_rewrite_rejects_shallow_u():
    n, m = 2, 1
    w = highest_root_reflection(n)
    order = ordered_negated_roots(w)
    rs = [Q(3) ** (radical_coordinate_bound(g, m) - 1) for g in order]
    u = root_elem(C3, n, simple_roots(n)[0], Q(1, 3**5))
    t = torus(C3, [Q(1), Q(1)])
    with pytest.raises(MatrixError):
        cell_word_rewrite(t, w, rs, u, m)


# ------------------------------------------------------- cell collapsing

@pytest.mark.parametrize("n", [2, 3])
def test_cell_collapse_all_insertion_tails(n):
    rng = random.Random(140 + n)
    w0 = highest_root_reflection(n)
    mode2_seen = 0
    for w in full_weyl_group(n):
        if not bruhat_leq(w, w0) or w.is_identity():
            continue
        order = ordered_negated_roots(w)
        for q in range(len(order)):
            tail = sorted(order[q:], key=lambda g: g.height)
            bad_ls = [l for l in range(1, len(tail)) if is_bad_pair(tail[0], tail[l])]
            t = torus(C3, [Q(rng.choice([1, 2, 3, 5]))] + [Q(1)] * (n - 1))
            rs = [Q(rng.choice([1, 2, 5]), rng.choice([1, 3])) for _ in tail]
            if bad_ls:
                w_prime = cell_collapse_witness(t, w, tail, rs, bad_index=bad_ls[0])
                mode2_seen += 1
            else:
                w_prime = cell_collapse_witness(t, w, tail, rs)
            assert bruhat_leq(w_prime, w) and w_prime != w
    assert mode2_seen >= 1


def test_cell_collapse_validation():
    n = 2
    w0 = highest_root_reflection(n)
    minus = sorted(w0.negated_positive_roots(), key=lambda g: g.height)
    t = torus(C3, [Q(1), Q(1)])
    with pytest.raises(MatrixError):
        cell_collapse_witness(t, w0, list(reversed(minus)), [Q(1)] * 3)
    with pytest.raises(MatrixError):
        cell_collapse_witness(t, w0, minus, [Q(0), Q(1), Q(1)])
    with pytest.raises(MatrixError):
        cell_collapse_witness(t, w0, [Root(2, (0, 1))], [Q(1)])
    tail = minus[1:]
    assert is_bad_pair(tail[0], tail[1])
    with pytest.raises(MatrixError):
        cell_collapse_witness(t, w0, tail, [Q(1), Q(1)])


@pytest.mark.parametrize("n", [2, 3])
def test_cell_collapse_mode2_over_bad_triples(n):
    rng = random.Random(150 + n)
    for g1, g2, w in bad_triples(n):
        pair = [g1, g2]
        t = torus(C3, [Q(rng.choice([1, 2, 5]))] + [Q(1)] * (n - 1))
        rs = [Q(rng.choice([1, 2, 5]), rng.choice([1, 3])), Q(rng.choice([1, 2]), rng.choice([1, 3]))]
        w_prime = cell_collapse_witness(t, w, pair, rs, bad_index=1)
        assert bruhat_leq(w_prime, w) and w_prime != w
