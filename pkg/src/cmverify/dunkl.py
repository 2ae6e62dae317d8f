"""Rational Dunkl operators for a crystallographic root system.

Polynomials live in ``x1..xd`` (the ambient coordinates) with the
multiplicity parameters as extra polynomial variables, so every identity is
checked with symbolic multiplicities.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations, combinations_with_replacement
from typing import Iterable, Sequence

from .diffop import DiffOp, diffop_mul
from .report import CheckResult, run_check, witness
from .roots import GroupElem, RootSystem, dot, reflection, weyl_group_enumerate
from .scalar import GaussianRational, LinearForm, Poly, RatFunc, exact_divide, var_key

__all__ = [
    "MultiplicityAssignment",
    "DunklOperators",
    "DunklElem",
    "InputNotInvariant",
    "ambient_variables",
    "dunkl_apply",
    "dunkl_commute_check",
    "equivariance_check",
    "dihedral_cancellation_check",
    "restricted_square",
    "square_element",
    "rotation_fibers",
    "gauge_shift",
    "res_identity_check",
    "res_operator_check",
    "gauge_conjugation_check",
    "olshanetsky_perelomov",
    "invariant_generators",
    "monomials",
]


class InputNotInvariant(ValueError):
    pass


def ambient_variables(d: int, prefix: str = "x") -> tuple[str, ...]:
    return tuple(f"{prefix}{j}" for j in range(1, d + 1))


@dataclass(frozen=True)
class MultiplicityAssignment:
    """Value of the multiplicity per root-length class (constant on orbits)."""

    values: tuple[tuple[Fraction, Poly], ...]

    @classmethod
    def symbolic(cls, rs: RootSystem) -> "MultiplicityAssignment":
        return cls(tuple((length, Poly.var(name)) for length, name in sorted(rs.orbit_multiplicity.items())))

    @classmethod
    def constant(cls, rs: RootSystem, value) -> "MultiplicityAssignment":
        return cls(tuple((length, Poly.const(value)) for length in sorted(rs.orbit_multiplicity)))

    @classmethod
    def from_mapping(cls, rs: RootSystem, mapping: dict) -> "MultiplicityAssignment":
        """``mapping`` is keyed by parameter name (``c``, ``c1``, ``c2``)."""
        out = []
        for length, name in sorted(rs.orbit_multiplicity.items()):
            v = mapping[name]
            out.append((length, v if isinstance(v, Poly) else (Poly.var(v) if isinstance(v, str) else Poly.const(v))))
        return cls(tuple(out))

    def of(self, alpha: Sequence) -> Poly:
        length = dot(alpha, alpha)
        for key, value in self.values:
            if key == length:
                return value
        raise KeyError(f"no multiplicity for roots of squared length {length}")

    def parameters(self) -> tuple[str, ...]:
        names = set()
        for _, v in self.values:
            names.update(v.used_variables())
        return tuple(sorted(names, key=var_key))


def monomials(variables: Sequence[str], max_degree: int, universe: Sequence[str] | None = None) -> list[Poly]:
    universe = tuple(universe or variables)
    out = []
    for deg in range(max_degree + 1):
        for combo in combinations_with_replacement(variables, deg):
            p = Poly.const(1, universe)
            for v in combo:
                p = p * Poly.var(v, universe)
            out.append(p)
    return out


class DunklOperators:
    """``D_a = d_a - sum_{alpha>0} c_alpha <alpha,a>/<alpha,x> (1 - sigma_alpha)``.

    Holds per-monomial caches, so repeated application (commutator sweeps)
    is cheap.
    """

    def __init__(self, rs: RootSystem, c: MultiplicityAssignment | None = None, prefix: str = "x"):
        self.rs = rs
        self.c = c if c is not None else MultiplicityAssignment.symbolic(rs)
        self.xs = ambient_variables(rs.ambient_dim, prefix)
        self.universe = tuple(sorted(set(self.xs) | set(self.c.parameters()), key=var_key))
        self.roots = []
        for alpha in rs.positive:
            form, scale = LinearForm.from_vector(alpha, self.xs)
            self.roots.append((alpha, reflection(alpha), form, scale, self.c.of(alpha).embed(self.universe)))
        self._act_cache: dict = {}
        self._dd_cache: dict = {}
        self._d_cache: dict = {}

    # basic pieces -----------------------------------------------------------

    def poly(self, p) -> Poly:
        p = Poly.coerce(p)
        return p.embed(tuple(sorted(set(self.universe) | set(p.variables), key=var_key)))

    def _x_images(self, matrix) -> dict[str, Poly]:
        d = len(self.xs)
        return {
            self.xs[i]: sum(
                (Poly.var(self.xs[j], self.universe).scale(matrix[i][j]) for j in range(d) if matrix[i][j]),
                Poly.zero(self.universe),
            )
            for i in range(d)
        }

    def act(self, w: GroupElem, p) -> Poly:
        """``(w.p)(x) = p(w^-1 x)``."""
        p = self.poly(p)
        key = (w, p)
        hit = self._act_cache.get(key)
        if hit is None:
            hit = p.substitute(self._x_images(w.inverse().matrix)).embed(p.variables)
            self._act_cache[key] = hit
        return hit

    def divided_difference(self, idx: int, p: Poly) -> Poly:
        """``(p - sigma_alpha p) / <alpha, x>`` for the ``idx``-th positive root."""
        key = (idx, p)
        hit = self._dd_cache.get(key)
        if hit is None:
            alpha, sigma, form, scale, _ = self.roots[idx]
            diff = p - self.act(sigma, p)
            hit = exact_divide(diff, form).scale(GaussianRational(1 / scale)) if diff else diff
            self._dd_cache[key] = hit
        return hit

    def _x_split(self, p: Poly) -> dict[tuple[int, ...], Poly]:
        return p.coefficient_split(self.xs)

    def _x_monomial(self, exps: tuple[int, ...]) -> Poly:
        out = Poly.const(1, self.universe)
        for v, e in zip(self.xs, exps):
            if e:
                out = out * Poly.var(v, self.universe) ** e
        return out

    def _apply_monomial(self, a: tuple, exps: tuple[int, ...]) -> Poly:
        key = (a, exps)
        hit = self._d_cache.get(key)
        if hit is None:
            mono = self._x_monomial(exps)
            out = Poly.zero(self.universe)
            for j, aj in enumerate(a):
                if aj:
                    out = out + mono.derivative(self.xs[j]).scale(aj)
            for idx, (alpha, _, _, _, c_alpha) in enumerate(self.roots):
                pairing = dot(alpha, a)
                if pairing:
                    out = out - (c_alpha * self.divided_difference(idx, mono)).scale(pairing)
            hit = out
            self._d_cache[key] = hit
        return hit

    def apply(self, a: Sequence, p) -> Poly:
        """``D_a p`` for a direction vector ``a``."""
        a = tuple(Fraction(x) for x in a)
        p = self.poly(p)
        out = Poly.zero(p.variables)
        for exps, coeff in self._x_split(p).items():
            out = out + coeff * self._apply_monomial(a, exps)
        return out

    def basis(self, i: int) -> tuple[Fraction, ...]:
        return tuple(Fraction(int(j == i)) for j in range(len(self.xs)))

    # semidirect-product elements -------------------------------------------

    def element(self, a: Sequence) -> "DunklElem":
        """``D_a`` as an element of the group algebra over differential operators."""
        a = tuple(Fraction(x) for x in a)
        ident = GroupElem.identity(len(self.xs))
        comps = {ident: DiffOp.directional(a, self.xs)}
        for alpha, sigma, form, scale, c_alpha in self.roots:
            pairing = dot(alpha, a)
            if not pairing:
                continue
            coeff = RatFunc(c_alpha.scale(GaussianRational(pairing / scale)), [(form, 1)])
            op = DiffOp.scalar(coeff, self.xs)
            comps[ident] = comps[ident] - op
            comps[sigma] = comps.get(sigma, DiffOp.zero(self.xs)) + op
        return DunklElem(self.xs, comps)

    def laplacian(self) -> DiffOp:
        d = len(self.xs)
        return DiffOp(self.xs, {tuple(2 if i == j else 0 for i in range(d)): 1 for j in range(d)})

    def phi(self) -> list[RatFunc]:
        """Gradient of ``log prod <alpha,x>^{c_alpha}``: ``sum c_alpha alpha_j / <alpha,x>``."""
        out = []
        for j in range(len(self.xs)):
            acc = RatFunc.coerce(Poly.zero(self.universe))
            for alpha, _, form, scale, c_alpha in self.roots:
                if alpha[j]:
                    acc = acc + RatFunc(c_alpha.scale(GaussianRational(alpha[j] / scale)), [(form, 1)])
            out.append(acc)
        return out


def dunkl_apply(rs: RootSystem, c: MultiplicityAssignment | None, a: Sequence, p) -> Poly:
    return DunklOperators(rs, c).apply(a, p)


class DunklElem:
    """Finite sum ``sum_w A_w w`` with differential-operator coefficients."""

    __slots__ = ("positions", "components")

    def __init__(self, positions: tuple[str, ...], components: dict[GroupElem, DiffOp]):
        self.positions = tuple(positions)
        self.components = {w: op for w, op in components.items() if op}

    @classmethod
    def group(cls, w: GroupElem, positions: tuple[str, ...]) -> "DunklElem":
        return cls(positions, {w: DiffOp.scalar(1, positions)})

    def __add__(self, other: "DunklElem") -> "DunklElem":
        comps = dict(self.components)
        for w, op in other.components.items():
            comps[w] = comps[w] + op if w in comps else op
        return DunklElem(self.positions, comps)

    def __neg__(self):
        return DunklElem(self.positions, {w: -op for w, op in self.components.items()})

    def __sub__(self, other):
        return self + (-other)

    def __matmul__(self, other: "DunklElem") -> "DunklElem":
        """``(A u)(B v) = A (u B u^-1) (u v)``."""
        comps: dict = {}
        for u, A in self.components.items():
            uinv = u.inverse()
            for v, B in other.components.items():
                moved = B if u.is_identity() else B.transform(u.matrix, uinv.matrix)
                prod = diffop_mul(A, moved)
                uv = u @ v
                comps[uv] = comps[uv] + prod if uv in comps else prod
        return DunklElem(self.positions, comps)

    def res(self) -> DiffOp:
        """Drop the group labels and add the components."""
        out = DiffOp.zero(self.positions)
        for op in self.components.values():
            out = out + op
        return out

    def is_zero(self) -> bool:
        return not self.components

    def __bool__(self) -> bool:
        return bool(self.components)

    def __eq__(self, other):
        return isinstance(other, DunklElem) and (self - other).is_zero()

    def __str__(self):
        if not self.components:
            return "0"
        return " + ".join(f"[{op}]*{w!r}" for w, op in self.components.items())


# ---------------------------------------------------------------------------
# checks
# ---------------------------------------------------------------------------


def dunkl_commute_check(rs: RootSystem, c: MultiplicityAssignment | None = None, max_degree: int = 5, suite: str = "dunkl-commute") -> list[CheckResult]:
    """``[D_i, D_j]`` on every monomial of degree ``<= max_degree``."""
    if max_degree < 1:
        raise ValueError("max_degree must be at least 1")
    ops = DunklOperators(rs, c)
    monos = monomials(ops.xs, max_degree, ops.universe)
    results = []
    for i, j in combinations(range(len(ops.xs)), 2):
        ei, ej = ops.basis(i), ops.basis(j)

        def run(ei=ei, ej=ej):
            for m in monos:
                r = ops.apply(ei, ops.apply(ej, m)) - ops.apply(ej, ops.apply(ei, m))
                if r:
                    return f"monomial {m}: {r}"
            return None

        results.append(run_check(suite, f"{suite}.{rs.type_label}.deg{max_degree}.x{i + 1}x{j + 1}", run))
    return results


def equivariance_check(
    rs: RootSystem,
    c: MultiplicityAssignment | None = None,
    elements: Iterable[GroupElem] | None = None,
    max_degree: int = 4,
    suite: str = "dunkl-equivariance",
) -> list[CheckResult]:
    """``w(D_a p) = D_{wa}(w p)`` for sampled ``w``, basis ``a`` and monomials ``p``."""
    ops = DunklOperators(rs, c)
    if elements is None:
        elements = [reflection(a) for a in rs.simple]
    monos = monomials(ops.xs, max_degree, ops.universe)
    results = []
    for n, w in enumerate(elements):

        def run(w=w):
            for i in range(len(ops.xs)):
                a = ops.basis(i)
                wa = w.apply(a)
                for m in monos:
                    lhs = ops.act(w, ops.apply(a, m))
                    rhs = ops.apply(wa, ops.act(w, m))
                    if lhs != rhs:
                        return f"w={w!r}, a=e{i + 1}, p={m}: {lhs - rhs}"
            return None

        results.append(run_check(suite, f"{suite}.{rs.type_label}.w{n}", run))
    return results


def rotation_fibers(rs: RootSystem) -> dict[GroupElem, list[tuple[int, int]]]:
    """Pairs of distinct positive roots grouped by ``sigma_alpha sigma_beta``."""
    refl = [reflection(a) for a in rs.positive]
    fibers: dict = {}
    for i in range(len(refl)):
        for j in range(len(refl)):
            if i != j:
                fibers.setdefault(refl[i] @ refl[j], []).append((i, j))
    return fibers


def dihedral_cancellation_check(rs: RootSystem, c: MultiplicityAssignment | None = None, max_degree: int = 4, suite: str = "dunkl-dihedral") -> list[CheckResult]:
    """For each rotation ``w``: ``sum c_a c_b <a,b> Delta_a Delta_b`` kills monomials."""
    ops = DunklOperators(rs, c)
    monos = monomials(ops.xs, max_degree, ops.universe)
    results = []
    for n, (w, pairs) in enumerate(sorted(rotation_fibers(rs).items(), key=lambda kv: repr(kv[0]))):

        def run(pairs=pairs):
            for m in monos:
                acc = Poly.zero(ops.universe)
                for i, j in pairs:
                    a, _, _, _, ca = ops.roots[i]
                    b, _, _, _, cb = ops.roots[j]
                    inner = ops.divided_difference(j, m)
                    acc = acc + (ca * cb * ops.divided_difference(i, inner)).scale(dot(a, b))
                if acc:
                    return f"monomial {m}: {acc}"
            return None

        results.append(run_check(suite, f"{suite}.{rs.type_label}.rot{n}", run))
    return results


def restricted_square(rs: RootSystem, c: MultiplicityAssignment | None = None, ops: DunklOperators | None = None) -> DiffOp:
    """``Delta - sum_{alpha>0} c_alpha <alpha,alpha>/<alpha,x> d_{alpha^vee}``."""
    ops = ops or DunklOperators(rs, c)
    out = ops.laplacian()
    for alpha, _, form, scale, c_alpha in ops.roots:
        # c <a,a>/<a,x> * d_{a^vee} = 2c/<a,x> * d_a
        coeff = RatFunc(c_alpha.scale(GaussianRational(2 / scale)), [(form, 1)])
        out = out - DiffOp.directional(alpha, ops.xs).lmul(coeff)
    return out


def square_element(ops: DunklOperators) -> "DunklElem":
    total = None
    for i in range(len(ops.xs)):
        d = ops.element(ops.basis(i))
        sq = d @ d
        total = sq if total is None else total + sq
    return total


def res_operator_check(rs: RootSystem, c: MultiplicityAssignment | None = None, ops: DunklOperators | None = None) -> str | None:
    """``res(sum_j D_j^2)`` computed in the group algebra versus the restricted operator.

    Also requires every non-reflection label of ``sum_j D_j^2`` to cancel.
    """
    ops = ops or DunklOperators(rs, c)
    sq = square_element(ops)
    reflections = {sigma for _, sigma, _, _, _ in ops.roots}
    stray = [w for w in sq.components if not (w.is_identity() or w in reflections)]
    if stray:
        return f"non-reflection label survives: {stray[0]!r} -> {sq.components[stray[0]]}"
    return witness(sq.res() - restricted_square(rs, ops=ops))


def invariant_generators(rs: RootSystem, prefix: str = "x") -> list[Poly]:
    """Hardcoded basic invariants: power sums (A), even power sums (B, C)."""
    xs = ambient_variables(rs.ambient_dim, prefix)
    kind = rs.type_label[0]
    if kind == "A":
        degrees = range(2, min(rs.rank + 1, 4) + 1)
    elif kind in "BC":
        degrees = [2 * m for m in range(1, min(rs.rank, 3) + 1)]
    else:
        raise ValueError(f"no hardcoded invariants for {rs.type_label}")
    return [sum((Poly.var(v, xs) ** m for v in xs), Poly.zero(xs)) for m in degrees]


def res_identity_check(rs: RootSystem, invariant: Poly, c: MultiplicityAssignment | None = None, ops: DunklOperators | None = None) -> str | None:
    """Two-path check that ``sum_j D_j^2`` and the restricted operator agree on an invariant."""
    ops = ops or DunklOperators(rs, c)
    p = ops.poly(invariant)
    for alpha in rs.simple:
        if ops.act(reflection(alpha), p) != p:
            raise InputNotInvariant(f"{invariant} is not invariant under the reflection in {alpha}")
    path1 = Poly.zero(p.variables)
    for i in range(len(ops.xs)):
        e = ops.basis(i)
        path1 = path1 + ops.apply(e, ops.apply(e, p))
    path2 = restricted_square(rs, ops=ops).apply(RatFunc.coerce(p))
    if RatFunc.coerce(path1) != path2:
        return f"sum D_j^2 p = {path1}; restricted operator gives {path2}"
    return None


def olshanetsky_perelomov(rs: RootSystem, c: MultiplicityAssignment | None = None, ops: DunklOperators | None = None) -> DiffOp:
    """``Delta - sum_{alpha>0} c_alpha (c_alpha + 1) <alpha,alpha> / <alpha,x>^2``."""
    ops = ops or DunklOperators(rs, c)
    pot = RatFunc.coerce(Poly.zero(ops.universe))
    for alpha, _, form, scale, c_alpha in ops.roots:
        weight = c_alpha * (c_alpha + 1)
        pot = pot + RatFunc(weight.scale(GaussianRational(dot(alpha, alpha) / scale ** 2)), [(form, 2)])
    return ops.laplacian() - DiffOp.scalar(pot, ops.xs)


def gauge_shift(op: DiffOp, phi: Sequence[RatFunc]) -> DiffOp:
    """Replace every ``d_j`` by ``d_j + phi_j``."""
    pos = op.positions
    shifts = {j: DiffOp.partial(pos[j], pos) + DiffOp.scalar(phi[j], pos) for j in range(len(pos))}
    return op.substitute_partials(shifts)


def gauge_conjugation_check(
    rs: RootSystem,
    c: MultiplicityAssignment | None = None,
    test: Poly | None = None,
    suite: str = "dunkl-gauge",
) -> list[CheckResult]:
    ops = DunklOperators(rs, c)
    lbar = restricted_square(rs, ops=ops)
    shifted = gauge_shift(lbar, ops.phi())
    target = olshanetsky_perelomov(rs, ops=ops)
    label = rs.type_label
    results = [
        run_check(suite, f"{suite}.{label}.operator", lambda: witness(shifted - target)),
        run_check(
            suite,
            f"{suite}.{label}.no-first-order",
            lambda: "; ".join(f"{mu}: {cf}" for mu, cf in shifted.terms.items() if sum(mu) == 1) or None,
        ),
    ]
    if test is not None:
        p = RatFunc.coerce(ops.poly(test))
        results.append(
            run_check(suite, f"{suite}.{label}.on-test", lambda: witness(shifted.apply(p) - target.apply(p)))
        )
    return results
