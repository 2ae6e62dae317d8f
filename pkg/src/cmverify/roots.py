"""Crystallographic root systems with exact rational coordinates."""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations, product
from math import factorial
from typing import Iterable, Sequence

__all__ = [
    "Root",
    "GroupElem",
    "RootSystem",
    "UnsupportedType",
    "CapExceeded",
    "build_root_system",
    "reflection",
    "dot",
    "coroot_pairing",
    "crystallographic_check",
    "axiom_check",
    "coxeter_order",
    "coxeter_order_by_matrix",
    "simple_system",
    "default_ordering_vector",
    "positive_decomposition",
    "weyl_group_enumerate",
    "weyl_group_order",
    "expected_root_count",
    "coxeter_sweep",
    "conjugation_check",
]

Root = tuple  # tuple[Fraction, ...]

WEYL_CAP = 200_000
COXETER_CAP = 12


class UnsupportedType(ValueError):
    pass


class CapExceeded(RuntimeError):
    pass


def _vec(xs: Iterable) -> Root:
    return tuple(Fraction(x) for x in xs)


def dot(a: Sequence, b: Sequence) -> Fraction:
    return sum((x * y for x, y in zip(a, b)), Fraction(0))


def coroot_pairing(beta: Sequence, alpha: Sequence) -> Fraction:
    """``<beta, alpha^vee> = 2 <beta, alpha> / <alpha, alpha>``."""
    return 2 * dot(beta, alpha) / dot(alpha, alpha)


def reflect(alpha: Sequence, v: Sequence) -> Root:
    c = coroot_pairing(v, alpha)
    if not c:
        return tuple(v)
    return tuple(x - c * a for x, a in zip(v, alpha))


# ---------------------------------------------------------------------------
# group elements
# ---------------------------------------------------------------------------


class GroupElem:
    """Exact orthogonal matrix; hashable by its entries."""

    __slots__ = ("matrix", "_hash")

    def __init__(self, matrix: Iterable[Iterable], check: bool = True):
        self.matrix = tuple(tuple(Fraction(x) for x in row) for row in matrix)
        self._hash = hash(self.matrix)
        if check and not self._is_orthogonal():
            raise ValueError("matrix is not orthogonal")

    @classmethod
    def _raw(cls, matrix) -> "GroupElem":
        obj = object.__new__(cls)
        obj.matrix = matrix
        obj._hash = hash(matrix)
        return obj

    @classmethod
    def identity(cls, d: int) -> "GroupElem":
        return cls._raw(tuple(tuple(Fraction(int(i == j)) for j in range(d)) for i in range(d)))

    @property
    def dim(self) -> int:
        return len(self.matrix)

    def _is_orthogonal(self) -> bool:
        m = self.matrix
        d = len(m)
        return all(dot(m[i], m[j]) == (1 if i == j else 0) for i in range(d) for j in range(d))

    def __matmul__(self, other: "GroupElem") -> "GroupElem":
        a, b = self.matrix, other.matrix
        cols = list(zip(*b))
        return GroupElem._raw(tuple(tuple(dot(row, col) for col in cols) for row in a))

    def apply(self, v: Sequence) -> Root:
        return tuple(dot(row, v) for row in self.matrix)

    def inverse(self) -> "GroupElem":
        return GroupElem._raw(tuple(zip(*self.matrix)))

    def is_identity(self) -> bool:
        return self == GroupElem.identity(self.dim)

    def __eq__(self, other):
        return isinstance(other, GroupElem) and self.matrix == other.matrix

    def __hash__(self):
        return self._hash

    def __repr__(self):
        rows = "; ".join(" ".join(str(x) for x in row) for row in self.matrix)
        return f"GroupElem([{rows}])"

    def to_json(self) -> list:
        return [[str(x) for x in row] for row in self.matrix]


def reflection(alpha: Sequence) -> GroupElem:
    """``sigma_alpha(v) = v - 2<v,alpha>/<alpha,alpha> alpha`` as a matrix."""
    alpha = _vec(alpha)
    n2 = dot(alpha, alpha)
    if not n2:
        raise ValueError("cannot reflect in the zero vector")
    d = len(alpha)
    return GroupElem._raw(
        tuple(
            tuple((Fraction(int(i == j)) - 2 * alpha[i] * alpha[j] / n2) for j in range(d))
            for i in range(d)
        )
    )


# ---------------------------------------------------------------------------
# root systems
# ---------------------------------------------------------------------------


@dataclass
class RootSystem:
    type_label: str
    rank: int
    ambient_dim: int
    roots: list[Root]
    positive: list[Root] = field(default_factory=list)
    simple: list[Root] = field(default_factory=list)
    orbit_multiplicity: dict[Fraction, str] = field(default_factory=dict)
    ordering_vector: Root = ()

    @property
    def normalized(self) -> bool:
        """True when every root has squared length 2."""
        return all(dot(a, a) == 2 for a in self.roots)

    @property
    def simply_laced(self) -> bool:
        return len({dot(a, a) for a in self.roots}) == 1

    def length_class(self, alpha: Sequence) -> Fraction:
        return dot(alpha, alpha)

    def multiplicity_name(self, alpha: Sequence) -> str:
        return self.orbit_multiplicity[dot(alpha, alpha)]

    def parameters(self) -> list[str]:
        return sorted(set(self.orbit_multiplicity.values()))

    def coxeter_matrix(self) -> list[list[int]]:
        return [[coxeter_order(a, b) for b in self.simple] for a in self.simple]

    def to_json(self) -> dict:
        return {
            "type": self.type_label,
            "rank": self.rank,
            "ambient_dim": self.ambient_dim,
            "num_roots": len(self.roots),
            "normalized": self.normalized,
            "ordering_vector": [str(x) for x in self.ordering_vector],
            "simple": [[str(x) for x in a] for a in self.simple],
            "positive": [[str(x) for x in a] for a in self.positive],
            "roots": [[str(x) for x in a] for a in self.roots],
            "coxeter_matrix": self.coxeter_matrix(),
            "multiplicities": {str(k): v for k, v in sorted(self.orbit_multiplicity.items())},
        }


def _unit(d: int, i: int, scale=1) -> Root:
    return tuple(Fraction(scale) if j == i else Fraction(0) for j in range(d))


def _pm_pairs(d: int, signs=((1, -1), (1, 1), (-1, 1), (-1, -1))) -> list[Root]:
    out = []
    for i, j in combinations(range(d), 2):
        for si, sj in signs:
            v = [Fraction(0)] * d
            v[i], v[j] = Fraction(si), Fraction(sj)
            out.append(tuple(v))
    return out


def _type_a(r: int) -> list[Root]:
    d = r + 1
    out = []
    for i, j in combinations(range(d), 2):
        v = [Fraction(0)] * d
        v[i], v[j] = Fraction(1), Fraction(-1)
        out.append(tuple(v))
        out.append(tuple(-x for x in v))
    return out


def _type_b(n: int) -> list[Root]:
    return _pm_pairs(n) + [_unit(n, i, s) for i in range(n) for s in (1, -1)]


def _type_c(n: int) -> list[Root]:
    return _pm_pairs(n) + [_unit(n, i, 2 * s) for i in range(n) for s in (1, -1)]


def _type_d(n: int) -> list[Root]:
    return _pm_pairs(n)


def _type_g2() -> list[Root]:
    out = _type_a(2)
    for i in range(3):
        v = [Fraction(-1)] * 3
        v[i] = Fraction(2)
        out.append(tuple(v))
        out.append(tuple(-x for x in v))
    return out


def _type_f4() -> list[Root]:
    half = Fraction(1, 2)
    out = _type_b(4)
    for signs in product((1, -1), repeat=4):
        out.append(tuple(half * s for s in signs))
    return out


def _type_e8() -> list[Root]:
    half = Fraction(1, 2)
    out = _pm_pairs(8)
    for signs in product((1, -1), repeat=8):
        if signs.count(-1) % 2 == 0:
            out.append(tuple(half * s for s in signs))
    return out


def _e8_simple() -> list[Root]:
    half = Fraction(1, 2)
    a1 = tuple(half * s for s in (1, -1, -1, -1, -1, -1, -1, 1))
    a2 = _vec([1, 1, 0, 0, 0, 0, 0, 0])
    rest = []
    for i in range(3, 9):
        v = [Fraction(0)] * 8
        v[i - 2], v[i - 3] = Fraction(1), Fraction(-1)
        rest.append(tuple(v))
    return [a1, a2] + rest


def _nullspace(rows: list[Root], d: int) -> list[Root]:
    """Exact basis of the orthogonal complement of ``rows``."""
    m = [list(r) for r in rows]
    pivots = []
    r = 0
    for c in range(d):
        piv = next((i for i in range(r, len(m)) if m[i][c] != 0), None)
        if piv is None:
            continue
        m[r], m[piv] = m[piv], m[r]
        inv = 1 / m[r][c]
        m[r] = [x * inv for x in m[r]]
        for i in range(len(m)):
            if i != r and m[i][c] != 0:
                f = m[i][c]
                m[i] = [x - f * y for x, y in zip(m[i], m[r])]
        pivots.append(c)
        r += 1
    free = [c for c in range(d) if c not in pivots]
    basis = []
    for fcol in free:
        v = [Fraction(0)] * d
        v[fcol] = Fraction(1)
        for i, pc in enumerate(pivots):
            v[pc] = -m[i][fcol]
        basis.append(tuple(v))
    return basis


def _type_e(r: int) -> list[Root]:
    e8 = _type_e8()
    if r == 8:
        return e8
    normals = _nullspace(_e8_simple()[:r], 8)
    return [a for a in e8 if all(dot(a, v) == 0 for v in normals)]


_LABEL = re.compile(r"^([A-Ga-g])_?(\d+)$")


def _parse_label(label: str) -> tuple[str, int]:
    m = _LABEL.match(label.strip())
    if not m:
        raise UnsupportedType(f"cannot parse root system label {label!r}")
    return m.group(1).upper(), int(m.group(2))


def weyl_group_order(label: str) -> int:
    kind, r = _parse_label(label)
    if kind == "A":
        return factorial(r + 1)
    if kind in "BC":
        return 2 ** r * factorial(r)
    if kind == "D":
        return 2 ** (r - 1) * factorial(r)
    return {("E", 6): 51840, ("E", 7): 2903040, ("E", 8): 696729600, ("F", 4): 1152, ("G", 2): 12}[(kind, r)]


def expected_root_count(label: str) -> int:
    """Closed-form root count, independent of the constructions above."""
    kind, r = _parse_label(label)
    if kind == "A":
        return r * (r + 1)
    if kind in "BC":
        return 2 * r * r
    if kind == "D":
        return 2 * r * (r - 1)
    return {("E", 6): 72, ("E", 7): 126, ("E", 8): 240, ("F", 4): 48, ("G", 2): 12}[(kind, r)]


def default_ordering_vector(label: str, d: int, n_base: int = 3) -> Root:
    """Generic vector with powers of ``n_base``.

    Classical, F and G types use decreasing weights (N^d, ..., N) so that
    e_i - e_{i+1} is positive; E types use increasing weights (N, ..., N^8)
    so that the simple roots come out as e_{i-1} - e_{i-2}, e_1 + e_2 and the
    half-integer root.
    """
    kind, _ = _parse_label(label)
    powers = [Fraction(n_base) ** (j + 1) for j in range(d)]
    if kind != "E":
        powers.reverse()
    return tuple(powers)


def build_root_system(type_label: str, ordering_vector: Sequence | None = None) -> RootSystem:
    kind, r = _parse_label(type_label)
    if kind == "A" and r >= 1:
        roots, d = _type_a(r), r + 1
    elif kind == "B" and r >= 2:
        roots, d = _type_b(r), r
    elif kind == "C" and r >= 2:
        roots, d = _type_c(r), r
    elif kind == "D" and r >= 4:
        roots, d = _type_d(r), r
    elif kind == "E" and 6 <= r <= 8:
        roots, d = _type_e(r), 8
    elif kind == "F" and r == 4:
        roots, d = _type_f4(), 4
    elif kind == "G" and r == 2:
        roots, d = _type_g2(), 3
    else:
        raise UnsupportedType(f"unsupported root system {type_label!r}")
    label = f"{kind}{r}"
    roots = sorted(set(roots), key=lambda v: tuple(-x for x in v))
    vec = _vec(ordering_vector) if ordering_vector is not None else default_ordering_vector(label, d)
    positive, simple = simple_system(roots, vec)
    lengths = sorted({dot(a, a) for a in roots})
    if len(lengths) == 1:
        mult = {lengths[0]: "c"}
    else:
        mult = {lengths[-1]: "c1", lengths[0]: "c2"}
    rs = RootSystem(label, r, d, roots, positive, simple, mult, vec)
    if len(simple) != r:
        raise AssertionError(f"{label}: found {len(simple)} simple roots, expected {r}")
    return rs


def simple_system(roots: Sequence[Root], ordering_vector: Sequence) -> tuple[list[Root], list[Root]]:
    """Positive roots (positive pairing) and the indecomposable ones among them."""
    vec = _vec(ordering_vector)
    pos = []
    for a in roots:
        s = dot(a, vec)
        if s == 0:
            raise ValueError(f"ordering vector is orthogonal to root {a}")
        if s > 0:
            pos.append(tuple(a))
    pos_set = set(pos)
    sums = set()
    for a, b in combinations(pos, 2):
        s = tuple(x + y for x, y in zip(a, b))
        if s in pos_set:
            sums.add(s)
    simple = [a for a in pos if a not in sums]
    simple.sort(key=lambda a: -dot(a, vec))
    return pos, simple


def positive_decomposition(rs: RootSystem, beta: Sequence) -> list[Fraction]:
    """Coefficients of ``beta`` over the simple roots (exact Gram solve)."""
    simple = rs.simple
    r = len(simple)
    gram = [[dot(a, b) for b in simple] + [dot(a, beta)] for a in simple]
    for c in range(r):
        piv = next(i for i in range(c, r) if gram[i][c] != 0)
        gram[c], gram[piv] = gram[piv], gram[c]
        inv = 1 / gram[c][c]
        gram[c] = [x * inv for x in gram[c]]
        for i in range(r):
            if i != c and gram[i][c] != 0:
                f = gram[i][c]
                gram[i] = [x - f * y for x, y in zip(gram[i], gram[c])]
    coeffs = [gram[i][r] for i in range(r)]
    recon = tuple(sum((c * a[j] for c, a in zip(coeffs, simple)), Fraction(0)) for j in range(rs.ambient_dim))
    if recon != tuple(beta):
        raise ValueError("vector is not in the span of the simple roots")
    return coeffs


# ---------------------------------------------------------------------------
# checks
# ---------------------------------------------------------------------------


def _scaled(roots: Sequence[Root]) -> tuple[list[tuple[int, ...]], int]:
    den = 1
    for a in roots:
        for x in a:
            den = den * x.denominator // _gcd(den, x.denominator)
    return [tuple(int(x * den) for x in a) for a in roots], den


def _gcd(a: int, b: int) -> int:
    while b:
        a, b = b, a % b
    return a


def crystallographic_check(roots: Sequence[Root]) -> list[tuple[Root, Root, Fraction]]:
    """All ordered pairs with non-integral ``<beta, alpha^vee>`` (empty when fine)."""
    ints, _ = _scaled(roots)
    norms = [sum(x * x for x in a) for a in ints]
    bad = []
    for ia, a in enumerate(ints):
        na = norms[ia]
        for ib, b in enumerate(ints):
            num = 2 * sum(x * y for x, y in zip(a, b))
            if num % na:
                bad.append((roots[ib], roots[ia], Fraction(num, na)))
    return bad


def axiom_check(roots: Sequence[Root]) -> list[str]:
    """Reflection closure and R cap R.alpha = {alpha, -alpha}; returns defects."""
    ints, _ = _scaled(roots)
    norms = [sum(x * x for x in a) for a in ints]
    pool = set(ints)
    defects = []
    if len(pool) != len(ints):
        defects.append("duplicate roots")
    for ia, a in enumerate(ints):
        if not any(a):
            defects.append("zero root")
            continue
        na = norms[ia]
        for b in ints:
            num = 2 * sum(x * y for x, y in zip(a, b))
            if num % na:
                # reflection leaves the lattice, so it cannot preserve R
                defects.append(f"reflection in {roots[ia]} moves {b} off the root set")
                continue
            c = num // na
            img = tuple(y - c * x for x, y in zip(a, b))
            if img not in pool:
                defects.append(f"reflection in {roots[ia]} maps {b} outside R")
    # proportional roots: only +-alpha allowed
    seen: dict = {}
    for a in ints:
        g = 0
        for x in a:
            g = _gcd(g, abs(x))
        direction = tuple(x // g for x in a)
        first = next(x for x in direction if x)
        if first < 0:
            direction = tuple(-x for x in direction)
        seen.setdefault(direction, []).append(a)
    for direction, group in seen.items():
        if len(group) != 2:
            defects.append(f"line through {direction} holds {len(group)} roots")
    return defects


def coxeter_order(alpha: Sequence, beta: Sequence, cap: int = COXETER_CAP) -> int:
    """Order of ``sigma_alpha sigma_beta`` by repeated exact multiplication.

    The product fixes the orthogonal complement of span(alpha, beta), so it is
    iterated on that plane using the integer matrix in the basis (alpha, beta).
    """
    a = coroot_pairing(beta, alpha)  # sigma_alpha(beta) = beta - a alpha
    b = coroot_pairing(alpha, beta)  # sigma_beta(alpha) = alpha - b beta
    dep = dot(alpha, alpha) * dot(beta, beta) == dot(alpha, beta) ** 2
    if dep:
        return 1
    # columns are images of alpha and beta; sigma_beta then sigma_alpha
    sb = ((Fraction(1), Fraction(0)), (-b, Fraction(-1)))  # rows: coords in (alpha, beta)
    sa = ((Fraction(-1), -a), (Fraction(0), Fraction(1)))
    w = _mat2(sa, sb)
    acc = w
    for m in range(1, cap + 1):
        if acc == ((1, 0), (0, 1)):
            return m
        acc = _mat2(acc, w)
    raise CapExceeded(f"order of sigma_alpha sigma_beta exceeds {cap}")


def _mat2(x, y):
    return (
        (x[0][0] * y[0][0] + x[0][1] * y[1][0], x[0][0] * y[0][1] + x[0][1] * y[1][1]),
        (x[1][0] * y[0][0] + x[1][1] * y[1][0], x[1][0] * y[0][1] + x[1][1] * y[1][1]),
    )


def coxeter_order_by_matrix(alpha: Sequence, beta: Sequence, cap: int = COXETER_CAP) -> int:
    """Same order, computed with full ambient matrices (slower cross-check)."""
    w = reflection(alpha) @ reflection(beta)
    acc = w
    for m in range(1, cap + 1):
        if acc.is_identity():
            return m
        acc = acc @ w
    raise CapExceeded(f"order of sigma_alpha sigma_beta exceeds {cap}")


# ---------------------------------------------------------------------------
# Weyl group
# ---------------------------------------------------------------------------


def coxeter_sweep(rs: "RootSystem", allowed=(2, 3, 4, 6)) -> tuple[dict[int, int], list[tuple[Root, Root, int]]]:
    """Orders of ``sigma_a sigma_b`` over all pairs of distinct positive roots.

    Negating a root leaves its reflection unchanged, so positive pairs cover
    every pair of non-proportional roots.  Returns a histogram and the pairs
    whose order is outside ``allowed``.
    """
    hist: dict[int, int] = {}
    bad = []
    pos = rs.positive
    for i in range(len(pos)):
        for j in range(i + 1, len(pos)):
            m = coxeter_order(pos[i], pos[j])
            hist[m] = hist.get(m, 0) + 1
            if m not in allowed:
                bad.append((pos[i], pos[j], m))
    return dict(sorted(hist.items())), bad


def weyl_group_enumerate(rs: RootSystem, cap: int = WEYL_CAP) -> list[GroupElem]:
    """All group elements, by closure of the simple reflections."""
    try:
        expected = weyl_group_order(rs.type_label)
    except KeyError:
        expected = None
    if expected is not None and expected > cap:
        raise CapExceeded(f"|W({rs.type_label})| = {expected} exceeds cap {cap}")
    gens = [reflection(a) for a in rs.simple]
    ident = GroupElem.identity(rs.ambient_dim)
    seen = {ident}
    order = [ident]
    frontier = [ident]
    while frontier:
        nxt = []
        for w in frontier:
            for s in gens:
                g = s @ w
                if g not in seen:
                    seen.add(g)
                    order.append(g)
                    nxt.append(g)
                    if len(seen) > cap:
                        raise CapExceeded(f"group exceeds cap {cap}")
        frontier = nxt
    return order


def conjugation_check(rs: RootSystem, elements: Iterable[GroupElem]) -> list[str]:
    """``w sigma_alpha w^-1 == sigma_{w alpha}`` for the given elements."""
    defects = []
    refl = {a: reflection(a) for a in rs.roots}
    for w in elements:
        winv = w.inverse()
        for a in rs.positive:
            lhs = w @ refl[a] @ winv
            wa = w.apply(a)
            if lhs != refl.get(wa, reflection(wa)):
                defects.append(f"conjugation fails for w={w}, alpha={a}")
    return defects
