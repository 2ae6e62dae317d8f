"""Classical Dunkl operators: group-algebra elements with phase-space
coefficients in ``x1..xd`` and momenta ``p1..pd``."""

from __future__ import annotations

import random
from fractions import Fraction
from itertools import combinations
from typing import Sequence

from .dunkl import MultiplicityAssignment, ambient_variables
from .poisson import poisson_bracket
from .report import CheckResult, run_check, witness
from .roots import GroupElem, RootSystem, dot, reflection
from .scalar import GaussianRational, LinearForm, Poly, RatFunc, var_key

__all__ = [
    "ClassicalDunklElem",
    "ClassicalDunkl",
    "classical_dunkl",
    "classical_poisson_involution_check",
    "classical_commutator_check",
    "classical_equivariance_check",
    "classical_restricted_square",
    "classical_res_check",
    "classical_op_hamiltonian",
    "theta",
    "theta_check",
    "theta_multiplicative_check",
]


class ClassicalDunklElem:
    """``sum_w f_w w`` with ``f_w`` a phase-space function."""

    __slots__ = ("xs", "ps", "components")

    def __init__(self, xs: tuple[str, ...], ps: tuple[str, ...], components: dict[GroupElem, RatFunc]):
        self.xs, self.ps = tuple(xs), tuple(ps)
        self.components = {w: f for w, f in components.items() if f}

    def _new(self, comps) -> "ClassicalDunklElem":
        return ClassicalDunklElem(self.xs, self.ps, comps)

    def act(self, w: GroupElem, f: RatFunc) -> RatFunc:
        """``(w.f)(x, p) = f(w^-1 x, w^-1 p)``."""
        if w.is_identity():
            return f
        inv = w.inverse().matrix
        return f.linear_transform(inv, self.xs).linear_transform(inv, self.ps)

    def __add__(self, other: "ClassicalDunklElem") -> "ClassicalDunklElem":
        comps = dict(self.components)
        for w, f in other.components.items():
            comps[w] = comps[w] + f if w in comps else f
        return self._new(comps)

    def __neg__(self):
        return self._new({w: -f for w, f in self.components.items()})

    def __sub__(self, other):
        return self + (-other)

    def __matmul__(self, other: "ClassicalDunklElem") -> "ClassicalDunklElem":
        """``(f u)(g v) = f (u.g) uv``."""
        comps: dict = {}
        for u, f in self.components.items():
            for v, g in other.components.items():
                term = f * self.act(u, g)
                uv = u @ v
                comps[uv] = comps[uv] + term if uv in comps else term
        return self._new(comps)

    def bracket(self, other: "ClassicalDunklElem") -> "ClassicalDunklElem":
        """``{f u, g v} = {f, g} uv`` with the labels treated as constants."""
        pairs = list(zip(self.ps, self.xs))
        comps: dict = {}
        for u, f in self.components.items():
            for v, g in other.components.items():
                term = poisson_bracket(f, g, pairs)
                uv = u @ v
                comps[uv] = comps[uv] + term if uv in comps else term
        return self._new(comps)

    def res(self) -> RatFunc:
        out = RatFunc.coerce(0)
        for f in self.components.values():
            out = out + f
        return out

    def is_zero(self) -> bool:
        return not self.components

    def __bool__(self) -> bool:
        return bool(self.components)

    def __eq__(self, other):
        return isinstance(other, ClassicalDunklElem) and (self - other).is_zero()

    def __str__(self):
        if not self.components:
            return "0"
        return " + ".join(f"[{f}]*{w!r}" for w, f in self.components.items())


class ClassicalDunkl:
    """Per-system data: positive roots, forms, multiplicities and ``phi``."""

    def __init__(self, rs: RootSystem, c: MultiplicityAssignment | None = None):
        self.rs = rs
        self.c = c if c is not None else MultiplicityAssignment.symbolic(rs)
        self.xs = ambient_variables(rs.ambient_dim, "x")
        self.ps = ambient_variables(rs.ambient_dim, "p")
        self.universe = tuple(sorted(set(self.xs) | set(self.ps) | set(self.c.parameters()), key=var_key))
        self.roots = []
        for alpha in rs.positive:
            form, scale = LinearForm.from_vector(alpha, self.xs)
            self.roots.append((alpha, reflection(alpha), form, scale, self.c.of(alpha).embed(self.universe)))

    def zero(self) -> RatFunc:
        return RatFunc.coerce(Poly.zero(self.universe))

    def momentum(self, a: Sequence) -> RatFunc:
        """``p_a = sum_j a_j p_j``."""
        out = Poly.zero(self.universe)
        for j, aj in enumerate(a):
            if aj:
                out = out + Poly.var(self.ps[j], self.universe).scale(GaussianRational(Fraction(aj)))
        return RatFunc.coerce(out)

    def _over(self, c_alpha: Poly, factor: Fraction, form: LinearForm, power: int = 1) -> RatFunc:
        return RatFunc(c_alpha.scale(GaussianRational(factor)), [(form, power)])

    def phi(self, a: Sequence) -> RatFunc:
        """``d_a log delta_c = sum c_alpha <alpha,a> / <alpha,x>``."""
        out = self.zero()
        for alpha, _, form, scale, c_alpha in self.roots:
            pairing = dot(alpha, a)
            if pairing:
                out = out + self._over(c_alpha, Fraction(pairing) / scale, form)
        return out

    def operator(self, a: Sequence) -> ClassicalDunklElem:
        a = tuple(Fraction(x) for x in a)
        ident = GroupElem.identity(len(self.xs))
        comps = {ident: self.momentum(a)}
        for alpha, sigma, form, scale, c_alpha in self.roots:
            pairing = dot(alpha, a)
            if not pairing:
                continue
            term = self._over(c_alpha, Fraction(pairing) / scale, form)
            comps[ident] = comps[ident] - term
            comps[sigma] = comps[sigma] + term if sigma in comps else term
        return ClassicalDunklElem(self.xs, self.ps, comps)

    def basis(self, i: int) -> tuple[Fraction, ...]:
        return tuple(Fraction(int(j == i)) for j in range(len(self.xs)))


def classical_dunkl(rs: RootSystem, c: MultiplicityAssignment | None, a: Sequence) -> ClassicalDunklElem:
    return ClassicalDunkl(rs, c).operator(a)


def classical_poisson_involution_check(rs: RootSystem, c: MultiplicityAssignment | None = None, suite: str = "dunkl-classical") -> list[CheckResult]:
    cd = ClassicalDunkl(rs, c)
    ops = [cd.operator(cd.basis(i)) for i in range(len(cd.xs))]
    return [
        run_check(suite, f"{suite}.{rs.type_label}.bracket.x{i + 1}x{j + 1}", lambda i=i, j=j: witness(ops[i].bracket(ops[j])))
        for i, j in combinations(range(len(ops)), 2)
    ]


def classical_commutator_check(rs: RootSystem, c: MultiplicityAssignment | None = None, suite: str = "dunkl-classical") -> list[CheckResult]:
    """The operators also commute in the group algebra product."""
    cd = ClassicalDunkl(rs, c)
    ops = [cd.operator(cd.basis(i)) for i in range(len(cd.xs))]
    return [
        run_check(
            suite,
            f"{suite}.{rs.type_label}.product.x{i + 1}x{j + 1}",
            lambda i=i, j=j: witness(ops[i] @ ops[j] - ops[j] @ ops[i]),
        )
        for i, j in combinations(range(len(ops)), 2)
    ]


def classical_equivariance_check(rs: RootSystem, c: MultiplicityAssignment | None = None, elements=None, suite: str = "dunkl-classical") -> list[CheckResult]:
    """``w D_a = D_{wa} w`` in the group algebra."""
    cd = ClassicalDunkl(rs, c)
    if elements is None:
        elements = [reflection(a) for a in rs.simple]
    results = []
    for n, w in enumerate(elements):
        wel = ClassicalDunklElem(cd.xs, cd.ps, {w: RatFunc.coerce(1)})

        def run(w=w, wel=wel):
            for i in range(len(cd.xs)):
                a = cd.basis(i)
                r = wel @ cd.operator(a) - cd.operator(w.apply(a)) @ wel
                if not r.is_zero():
                    return f"w={w!r}, a=e{i + 1}: {r}"
            return None

        results.append(run_check(suite, f"{suite}.{rs.type_label}.equivariance.w{n}", run))
    return results


def classical_restricted_square(rs: RootSystem, c: MultiplicityAssignment | None = None, cd: ClassicalDunkl | None = None) -> RatFunc:
    """``sum p_j^2 - sum_{alpha>0} c_alpha <alpha,alpha>/<alpha,x> p_{alpha^vee}``."""
    cd = cd or ClassicalDunkl(rs, c)
    out = cd.zero()
    for j in range(len(cd.ps)):
        out = out + cd.momentum(cd.basis(j)) ** 2
    for alpha, _, form, scale, c_alpha in cd.roots:
        # <a,a> p_{a^vee} = 2 p_a
        out = out - cd._over(c_alpha, Fraction(2) / scale, form) * cd.momentum(alpha)
    return out


def classical_op_hamiltonian(rs: RootSystem, c: MultiplicityAssignment | None = None, cd: ClassicalDunkl | None = None) -> RatFunc:
    """``sum p_j^2 - sum_{alpha>0} c_alpha^2 <alpha,alpha> / <alpha,x>^2``."""
    cd = cd or ClassicalDunkl(rs, c)
    out = cd.zero()
    for j in range(len(cd.ps)):
        out = out + cd.momentum(cd.basis(j)) ** 2
    for alpha, _, form, scale, c_alpha in cd.roots:
        out = out - cd._over(c_alpha * c_alpha, dot(alpha, alpha) / scale ** 2, form, 2)
    return out


def theta(f: RatFunc, cd: ClassicalDunkl) -> RatFunc:
    """Gauge substitution ``p_a -> p_a + d_a log delta_c``."""
    mapping = {cd.ps[j]: cd.momentum(cd.basis(j)) + cd.phi(cd.basis(j)) for j in range(len(cd.ps))}
    return RatFunc.coerce(f).substitute(mapping)


def classical_res_check(rs: RootSystem, c: MultiplicityAssignment | None = None) -> str | None:
    cd = ClassicalDunkl(rs, c)
    total = None
    for i in range(len(cd.xs)):
        d = cd.operator(cd.basis(i))
        total = d @ d if total is None else total + d @ d
    return witness(total.res() - classical_restricted_square(rs, cd=cd))


def theta_check(rs: RootSystem, c: MultiplicityAssignment | None = None, suite: str = "dunkl-classical") -> list[CheckResult]:
    cd = ClassicalDunkl(rs, c)
    label = rs.type_label
    image = theta(classical_restricted_square(rs, cd=cd), cd)

    def shape():
        deg = image.num.degree(cd.ps)
        split = image.num.coefficient_split(cd.ps)
        linear = [e for e in split if sum(e) == 1]
        if deg != 2 or linear:
            return f"momentum degree {deg}, linear terms {len(linear)}"
        return None

    return [
        run_check(suite, f"{suite}.{label}.res", lambda: classical_res_check(rs, cd.c)),
        run_check(suite, f"{suite}.{label}.theta", lambda: witness(image - classical_op_hamiltonian(rs, cd=cd))),
        run_check(suite, f"{suite}.{label}.theta-shape", shape),
    ]


def theta_multiplicative_check(rs: RootSystem, c: MultiplicityAssignment | None = None, samples: int = 10, seed: int = 0) -> str | None:
    """``theta(fg) = theta(f) theta(g)`` on random momentum polynomials."""
    cd = ClassicalDunkl(rs, c)
    rng = random.Random(seed)

    def sample():
        out = cd.zero()
        for _ in range(rng.randint(1, 3)):
            term = RatFunc.coerce(Poly.const(rng.randint(-4, 4), cd.universe))
            for _ in range(rng.randint(0, 2)):
                term = term * cd.momentum(cd.basis(rng.randrange(len(cd.ps))))
            out = out + term
        return out

    for _ in range(samples):
        f, g = sample(), sample()
        r = theta(f * g, cd) - theta(f, cd) * theta(g, cd)
        if r:
            return f"f={f}; g={g}: {r}"
    return None
