"""Type C_n root combinatorics.

Roots are stored by their coefficients over the simple basis
a_1, ..., a_{n-1}, b where a_i = e_i - e_{i+1} and b = 2 e_n; the last
coefficient tells whether a positive root lives in the block-diagonal
Levi (0) or in the abelian unipotent radical (1).  Weyl elements are
signed permutations of the coordinate lines.  The module also carries
the combinatorics peculiar to the cell analysis: the "bad pair"
predicate, the height order on negated roots with its one adjustment,
and factorizations of those Weyl elements negating both members of a
bad pair.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction


class RootError(ValueError):
    pass


def _is_root_vector(vec) -> bool:
    nz = [(i, c) for i, c in enumerate(vec) if c]
    if len(nz) == 1:
        return abs(nz[0][1]) == 2
    if len(nz) == 2:
        return abs(nz[0][1]) == 1 and abs(nz[1][1]) == 1
    return False


@dataclass(frozen=True)
class Root:
    n: int
    coeffs: tuple

    def __post_init__(self):
        if len(self.coeffs) != self.n:
            raise RootError("coefficient vector has wrong length")
        if not _is_root_vector(self.euclid()):
            raise RootError(f"{self.coeffs} is not a root for n={self.n}")

    @classmethod
    def from_euclid(cls, n: int, vec) -> "Root":
        vec = tuple(vec)
        if len(vec) != n or not _is_root_vector(vec):
            raise RootError(f"{vec} is not a root vector")
        coeffs = []
        prev = 0
        for k in range(n - 1):
            c = vec[k] + prev
            coeffs.append(c)
            prev = c
        last = vec[n - 1] + prev
        if last % 2:
            raise RootError(f"{vec} is not in the root lattice")
        coeffs.append(last // 2)
        return cls(n, tuple(coeffs))

    def euclid(self) -> tuple:
        c = self.coeffs
        n = self.n
        vec = []
        for k in range(n):
            prev = c[k - 1] if k >= 1 else 0
            if k < n - 1:
                vec.append(c[k] - prev)
            else:
                vec.append(2 * c[n - 1] - prev)
        return tuple(vec)

    @property
    def height(self) -> int:
        return sum(self.coeffs)

    def is_positive(self) -> bool:
        return any(self.coeffs) and all(c >= 0 for c in self.coeffs)

    def is_negative(self) -> bool:
        return any(self.coeffs) and all(c <= 0 for c in self.coeffs)

    def __neg__(self) -> "Root":
        return Root(self.n, tuple(-c for c in self.coeffs))

    def is_long(self) -> bool:
        return any(abs(c) == 2 for c in self.euclid())

    def in_levi(self) -> bool:
        """Root space inside the block-diagonal GL_n."""
        return self.coeffs[-1] == 0

    def in_radical(self) -> bool:
        """Positive root whose space lies in the abelian radical."""
        return self.coeffs[-1] == 1

    def pairing(self, other: "Root") -> int:
        """<self, other_coroot> = 2 (self, other) / (other, other)."""
        u, v = self.euclid(), other.euclid()
        num = 2 * sum(a * b for a, b in zip(u, v))
        den = sum(b * b for b in v)
        if num % den:
            raise RootError("pairing is not integral")
        return num // den

    def reflect(self, other: "Root") -> "Root":
        """Image of other under the reflection in self."""
        k = other.pairing(self)
        vec = tuple(b - k * a for a, b in zip(self.euclid(), other.euclid()))
        return Root.from_euclid(self.n, vec)


def simple_roots(n: int):
    """a_1, ..., a_{n-1}, then the long simple root."""
    if n < 1:
        raise RootError("rank must be positive")
    out = []
    for i in range(1, n):
        out.append(Root(n, tuple(1 if k == i - 1 else 0 for k in range(n))))
    out.append(Root(n, tuple(1 if k == n - 1 else 0 for k in range(n))))
    return out


def positive_roots(n: int):
    """All positive roots, sorted by (height, coefficients)."""
    out = []
    for i in range(n):
        vec = [0] * n
        vec[i] = 2
        out.append(Root.from_euclid(n, vec))
        for j in range(i + 1, n):
            for sign in (1, -1):
                vec = [0] * n
                vec[i], vec[j] = 1, sign
                out.append(Root.from_euclid(n, vec))
    out.sort(key=lambda r: (r.height, r.coeffs))
    return out


def root_from_vector(n: int, vec):
    """The Root for vec, or None if vec is not a root."""
    return Root.from_euclid(n, vec) if _is_root_vector(tuple(vec)) else None


@dataclass(frozen=True)
class WeylElem:
    """Signed permutation: imgs[k] = +-(j+1) sends e_{k+1} to +-e_{j+1}."""

    n: int
    imgs: tuple

    def __post_init__(self):
        if sorted(abs(v) for v in self.imgs) != list(range(1, self.n + 1)):
            raise RootError(f"{self.imgs} is not a signed permutation")

    @classmethod
    def identity(cls, n: int) -> "WeylElem":
        return cls(n, tuple(range(1, n + 1)))

    @classmethod
    def simple(cls, n: int, k: int) -> "WeylElem":
        """Generators: k in 1..n-1 swaps lines k, k+1; k = n flips line n."""
        if not 1 <= k <= n:
            raise RootError(f"generator index {k} out of range")
        imgs = list(range(1, n + 1))
        if k < n:
            imgs[k - 1], imgs[k] = imgs[k], imgs[k - 1]
        else:
            imgs[n - 1] = -n
        return cls(n, tuple(imgs))

    @classmethod
    def from_word(cls, n: int, word) -> "WeylElem":
        w = cls.identity(n)
        for k in word:
            w = w * cls.simple(n, k)
        return w

    def apply_euclid(self, vec) -> tuple:
        out = [0] * self.n
        for k, c in enumerate(vec):
            if c:
                t = self.imgs[k]
                out[abs(t) - 1] += c if t > 0 else -c
        return tuple(out)

    def apply(self, root: Root) -> Root:
        return Root.from_euclid(self.n, self.apply_euclid(root.euclid()))

    def __mul__(self, other: "WeylElem") -> "WeylElem":
        if self.n != other.n:
            raise RootError("mixed ranks")
        imgs = []
        for k in range(self.n):
            t = other.imgs[k]
            s = self.imgs[abs(t) - 1]
            imgs.append(s if t > 0 else -s)
        return WeylElem(self.n, tuple(imgs))

    def inverse(self) -> "WeylElem":
        imgs = [0] * self.n
        for k in range(self.n):
            t = self.imgs[k]
            imgs[abs(t) - 1] = (k + 1) if t > 0 else -(k + 1)
        return WeylElem(self.n, tuple(imgs))

    def is_identity(self) -> bool:
        return self.imgs == tuple(range(1, self.n + 1))

    def in_levi(self) -> bool:
        """No sign flips: a word in the short generators only."""
        return all(v > 0 for v in self.imgs)

    def negated_positive_roots(self):
        """Sigma_w^-: positive roots sent negative, by (height, coeffs)."""
        return [g for g in positive_roots(self.n) if self.apply(g).is_negative()]

    def kept_positive_roots(self):
        return [g for g in positive_roots(self.n) if self.apply(g).is_positive()]

    def length(self) -> int:
        return len(self.negated_positive_roots())

    def right_descents(self):
        out = []
        for k, s in enumerate(simple_roots(self.n), start=1):
            if self.apply(s).is_negative():
                out.append(k)
        return out

    def reduced_word(self) -> tuple:
        w = self
        rev = []
        while True:
            ds = w.right_descents()
            if not ds:
                break
            k = ds[0]
            rev.append(k)
            w = w * WeylElem.simple(self.n, k)
        return tuple(reversed(rev))


def reflection(root: Root) -> WeylElem:
    n = root.n
    g = root.euclid()
    gg = sum(c * c for c in g)  # 2 for short roots, 4 for long
    imgs = []
    for k in range(n):
        assert (2 * g[k]) % gg == 0
        c = (2 * g[k]) // gg
        col = tuple((1 if t == k else 0) - c * g[t] for t in range(n))
        nz = [(i, v) for i, v in enumerate(col) if v]
        assert len(nz) == 1 and abs(nz[0][1]) == 1, (root, col)
        i, v = nz[0]
        imgs.append((i + 1) * (1 if v > 0 else -1))
    return WeylElem(n, tuple(imgs))


def highest_root_reflection(n: int) -> WeylElem:
    """Reflection in 2 e_1; flips the first coordinate line only."""
    return WeylElem(n, tuple([-1] + list(range(2, n + 1))))


def highest_root_reflection_word(n: int) -> tuple:
    """1, ..., n-1, n, n-1, ..., 1: a reduced word for the above."""
    return tuple(list(range(1, n)) + [n] + list(range(n - 1, 0, -1)))


def coordinate_rotation(n: int) -> WeylElem:
    """e_k to e_{k+1} for k < n, and e_n to e_1."""
    return WeylElem(n, tuple(list(range(2, n + 1)) + [1]))


_BRUHAT_CACHE: dict = {}


def bruhat_leq(w1: WeylElem, w2: WeylElem) -> bool:
    if w1.n != w2.n:
        raise RootError("mixed ranks")
    key = (w1.imgs, w2.imgs)
    hit = _BRUHAT_CACHE.get(key)
    if hit is not None:
        return hit
    if w1.is_identity():
        res = True
    elif w1.length() > w2.length():
        res = False
    elif w1 == w2:
        res = True
    else:
        # strip a left descent s of w2: w2^{-1}(alpha_s) < 0
        n = w1.n
        w2inv = w2.inverse()
        s = None
        for k, a in enumerate(simple_roots(n), start=1):
            if w2inv.apply(a).is_negative():
                s = WeylElem.simple(n, k)
                break
        assert s is not None
        sw2 = s * w2
        sw1 = s * w1
        if sw1.length() < w1.length():
            res = bruhat_leq(sw1, sw2)
        else:
            res = bruhat_leq(w1, sw2)
    _BRUHAT_CACHE[key] = res
    return res


def subword_products(n: int, word):
    """All distinct products of subwords of word (the lower Bruhat cone)."""
    seen = {}
    for mask in range(1 << len(word)):
        sub = [word[i] for i in range(len(word)) if mask >> i & 1]
        w = WeylElem.from_word(n, sub)
        seen.setdefault(w.imgs, w)
    return sorted(seen.values(), key=lambda w: (w.length(), w.imgs))


def weyl_below(w: WeylElem):
    return subword_products(w.n, w.reduced_word())


def full_weyl_group(n: int):
    out = []
    for perm in itertools.permutations(range(1, n + 1)):
        for signs in itertools.product((1, -1), repeat=n):
            out.append(WeylElem(n, tuple(s * t for s, t in zip(signs, perm))))
    return out


# ------------------------------------------------------------- bad pairs

def is_bad_pair(g1: Root, g2: Root) -> bool:
    """Both positive, distinct, ht(g2)/2 < ht(g1) <= ht(g2), <g2, g1vee> = 2."""
    if g1 == g2 or not (g1.is_positive() and g2.is_positive()):
        return False
    h1, h2 = g1.height, g2.height
    if not (2 * h1 > h2 and h1 <= h2):
        return False
    return g2.pairing(g1) == 2


def bad_pair_witness(g1: Root, g2: Root):
    """(i, j) with g2 = 2 e_i and g1 = e_i + e_j, i < j <= n, or None."""
    n = g1.n
    u, v = g1.euclid(), g2.euclid()
    two = [k for k, c in enumerate(v) if c == 2]
    if len(two) != 1 or any(c and abs(c) != 2 for c in v):
        return None
    i = two[0] + 1
    ones = [k for k, c in enumerate(u) if c == 1]
    if len(ones) != 2 or any(c not in (0, 1) for c in u):
        return None
    if ones[0] + 1 != i:
        return None
    j = ones[1] + 1
    return (i, j) if i < j <= n else None


def bad_pairs(n: int):
    """All bad pairs, via the predicate over positive root pairs."""
    pos = positive_roots(n)
    return [(g1, g2) for g2 in pos for g1 in pos if is_bad_pair(g1, g2)]


def ordered_negated_roots(w: WeylElem):
    """Sigma_w^- in height order, each bad-pair partner pulled adjacent.

    Base order is (height, coeffs).  For every bad pair (g1, g2) inside
    the set, taken by increasing height of g1, the taller member g2 is
    reinserted immediately before g1.  When one g2 serves several g1
    only the last relocation can hold; has_order_conflict reports this.
    """
    order = list(w.negated_positive_roots())
    inside = set(order)
    pairs = [(g1, g2) for (g1, g2) in bad_pairs(w.n) if g1 in inside and g2 in inside]
    pairs.sort(key=lambda pair: (pair[0].height, pair[0].coeffs))
    for g1, g2 in pairs:
        order.remove(g2)
        order.insert(order.index(g1), g2)
    return order


def has_order_conflict(w: WeylElem) -> bool:
    """True when one bad-pair partner g2 would need two different slots."""
    inside = set(w.negated_positive_roots())
    count: dict = {}
    for g1, g2 in bad_pairs(w.n):
        if g1 in inside and g2 in inside:
            count[g2] = count.get(g2, 0) + 1
    return any(c >= 2 for c in count.values())


def bad_triples(n: int):
    """(g1, g2, w) with (g1, g2) bad and w below the top reflection negating both."""
    w0 = highest_root_reflection(n)
    cone = weyl_below(w0)
    out = []
    for g1, g2 in bad_pairs(n):
        for w in cone:
            if w.apply(g1).is_negative() and w.apply(g2).is_negative():
                out.append((g1, g2, w))
    return out


def chain_word_sigma(n: int, i: int, j: int) -> tuple:
    """j-1, ..., n-1, n, n-1, ..., i: the middle factor for the pair (i, j)."""
    return tuple(list(range(j - 1, n)) + [n] + list(range(n - 1, i - 1, -1)))


def bad_pair_weyl_factorizations(g1: Root, g2: Root):
    """For each w below the top reflection negating g1 and g2, a factorization.

    Returns a list of (w, w1p, w2p) with w = w1p * sigma * w2p where
    sigma is the chain reflection word for the pair, w1p runs below the
    increasing chain 1..j-2 and w2p below the decreasing chain i-2..1.
    The witness pair is the lexicographically first one found.
    """
    ij = bad_pair_witness(g1, g2)
    if ij is None:
        raise RootError("not a bad pair in closed form")
    i, j = ij
    n = g1.n
    sigma = WeylElem.from_word(n, chain_word_sigma(n, i, j))
    left_chain = list(range(1, j - 1))
    right_chain = list(range(i - 2, 0, -1))
    lefts = subword_products(n, tuple(left_chain))
    rights = subword_products(n, tuple(right_chain))
    out = []
    for w in bad_triples_for_pair(g1, g2):
        witness = None
        for w1p in lefts:
            target = w1p.inverse() * w
            for w2p in rights:
                if target == sigma * w2p:
                    witness = (w1p, w2p)
                    break
            if witness:
                break
        out.append((w, witness))
    return out


def bad_triples_for_pair(g1: Root, g2: Root):
    n = g1.n
    w0 = highest_root_reflection(n)
    return [
        w
        for w in weyl_below(w0)
        if w.apply(g1).is_negative() and w.apply(g2).is_negative()
    ]


def _double_height(vec) -> int:
    """Twice the simple-coefficient sum of an integer coweight vector."""
    n = len(vec)
    total = 0
    run = 0
    for k in range(n - 1):
        run += vec[k]
        total += 2 * run
    return total + run + vec[-1]  # last coefficient is (run + v_n)/2


def root_decompositions(n: int, vec, max_parts: int = 8):
    """All multisets of positive roots summing to vec (euclid), by DFS.

    Heights are additive and every positive root has height >= 1, so the
    remaining double height strictly decreases; no extra bound needed.
    """
    pos = positive_roots(n)
    out = []

    def dfs(remaining, start, acc):
        if all(c == 0 for c in remaining):
            if acc:
                out.append(tuple(acc))
            return
        if len(acc) >= max_parts:
            return
        rh2 = _double_height(remaining)
        if rh2 < 2:
            return
        for idx in range(start, len(pos)):
            g = pos[idx]
            if 2 * g.height > rh2:
                continue
            nxt = tuple(r - c for r, c in zip(remaining, g.euclid()))
            dfs(nxt, idx, acc + [g])

    dfs(tuple(vec), 0, [])
    return out
