"""Normal-ordered differential operators with rational-function coefficients."""

from __future__ import annotations

from functools import lru_cache
from math import comb
from typing import Iterable, Mapping

from .scalar import I, GaussianRational, Poly, RatFunc

__all__ = ["DiffOp", "diffop_mul", "commutator"]


@lru_cache(maxsize=200_000)
def _deriv(f: RatFunc, positions: tuple[str, ...], lam: tuple[int, ...]) -> RatFunc:
    if not any(lam):
        return f
    j = next(i for i, e in enumerate(lam) if e)
    lower = lam[:j] + (lam[j] - 1,) + lam[j + 1:]
    return _deriv(f, positions, lower).derivative(positions[j])


def _sub_indices(mu: tuple[int, ...]):
    """All multi-indices lam <= mu with the multinomial weight prod C(mu, lam)."""
    out = [((), 1)]
    for m in mu:
        out = [(lam + (l,), w * comb(m, l)) for lam, w in out for l in range(m + 1)]
    return out


class DiffOp:
    """``sum_mu c_mu(x) d^mu`` with coefficients to the left of derivatives."""

    __slots__ = ("positions", "terms")

    def __init__(self, positions: Iterable[str], terms: Mapping[tuple[int, ...], object] | None = None):
        self.positions = tuple(positions)
        clean = {}
        for mu, c in (terms or {}).items():
            mu = tuple(mu)
            if len(mu) != len(self.positions):
                raise ValueError("multi-index length does not match positions")
            c = RatFunc.coerce(c)
            if c:
                clean[mu] = clean[mu] + c if mu in clean else c
                if not clean[mu]:
                    del clean[mu]
        self.terms = clean

    @classmethod
    def _raw(cls, positions, terms) -> "DiffOp":
        obj = object.__new__(cls)
        obj.positions = positions
        obj.terms = terms
        return obj

    # constructors -----------------------------------------------------------

    @classmethod
    def zero(cls, positions: Iterable[str]) -> "DiffOp":
        return cls._raw(tuple(positions), {})

    @classmethod
    def scalar(cls, f, positions: Iterable[str]) -> "DiffOp":
        """Multiplication by a function (or constant)."""
        positions = tuple(positions)
        f = RatFunc.coerce(f)
        if not f:
            return cls._raw(positions, {})
        return cls._raw(positions, {(0,) * len(positions): f})

    @classmethod
    def partial(cls, name: str, positions: Iterable[str], coeff=1) -> "DiffOp":
        positions = tuple(positions)
        mu = tuple(1 if v == name else 0 for v in positions)
        if not any(mu):
            raise ValueError(f"{name} is not a position variable")
        return cls._raw(positions, {mu: RatFunc.coerce(coeff)})

    @classmethod
    def momentum(cls, name: str, positions: Iterable[str]) -> "DiffOp":
        """Quantum momentum ``-i d/d(name)``."""
        return cls.partial(name, positions, RatFunc.coerce(-I))

    @classmethod
    def directional(cls, vector, positions: Iterable[str]) -> "DiffOp":
        positions = tuple(positions)
        terms = {}
        for j, a in enumerate(vector):
            if a:
                mu = tuple(1 if i == j else 0 for i in range(len(positions)))
                terms[mu] = RatFunc.coerce(GaussianRational.coerce(a))
        return cls._raw(positions, terms)

    # structure --------------------------------------------------------------

    def is_zero(self) -> bool:
        return not self.terms

    def __bool__(self):
        return bool(self.terms)

    def order(self) -> int:
        return max((sum(mu) for mu in self.terms), default=-1)

    def leading_symbol(self) -> dict[tuple[int, ...], RatFunc]:
        top = self.order()
        return {mu: c for mu, c in self.terms.items() if sum(mu) == top}

    def coefficient(self, mu: tuple[int, ...]) -> RatFunc:
        return self.terms.get(tuple(mu), RatFunc.coerce(0))

    def _check(self, other: "DiffOp"):
        if self.positions != other.positions:
            raise ValueError("operators act on different position variables")

    # arithmetic -------------------------------------------------------------

    def __add__(self, other):
        if not isinstance(other, DiffOp):
            other = DiffOp.scalar(other, self.positions)
        self._check(other)
        terms = dict(self.terms)
        for mu, c in other.terms.items():
            if mu in terms:
                s = terms[mu] + c
                if s:
                    terms[mu] = s
                else:
                    del terms[mu]
            else:
                terms[mu] = c
        return DiffOp._raw(self.positions, terms)

    __radd__ = __add__

    def __neg__(self):
        return DiffOp._raw(self.positions, {mu: -c for mu, c in self.terms.items()})

    def __sub__(self, other):
        if not isinstance(other, DiffOp):
            other = DiffOp.scalar(other, self.positions)
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def lmul(self, f) -> "DiffOp":
        """Left multiplication by a function ``f`` (no Leibniz terms)."""
        if isinstance(f, (RatFunc, Poly)):
            f = RatFunc.coerce(f)
            terms = {}
            for mu, c in self.terms.items():
                p = f * c
                if p:
                    terms[mu] = p
            return DiffOp._raw(self.positions, terms)
        c = GaussianRational.coerce(f)
        if not c:
            return DiffOp._raw(self.positions, {})
        return DiffOp._raw(self.positions, {mu: v * c for mu, v in self.terms.items()})

    def __mul__(self, other):
        if isinstance(other, DiffOp):
            return diffop_mul(self, other)
        return self.lmul(other)

    def __rmul__(self, other):
        return self.lmul(other)

    def __matmul__(self, other):
        return diffop_mul(self, other)

    def __pow__(self, n: int) -> "DiffOp":
        out = DiffOp.scalar(1, self.positions)
        for _ in range(n):
            out = diffop_mul(out, self)
        return out

    def apply(self, f) -> RatFunc:
        """Apply the operator to a function."""
        f = RatFunc.coerce(f)
        out = RatFunc.coerce(0)
        for mu, c in self.terms.items():
            out = out + c * _deriv(f, self.positions, mu)
        return out

    def transform(self, matrix, inverse) -> "DiffOp":
        """Conjugate by a linear change of variables ``w``.

        Returns ``w o self o w^-1`` where ``(w.f)(x) = f(w^-1 x)``; coefficients
        are pulled back along ``inverse`` and ``d_j`` becomes ``d_{w e_j}``.
        """
        pos = self.positions
        d = len(pos)
        images = [DiffOp.directional([matrix[i][j] for i in range(d)], pos) for j in range(d)]
        out = DiffOp.zero(pos)
        for mu, c in self.terms.items():
            op = DiffOp.scalar(c.linear_transform(inverse, pos), pos)
            for j, e in enumerate(mu):
                for _ in range(e):
                    op = diffop_mul(op, images[j])
            out = out + op
        return out

    def substitute_partials(self, shifts: Mapping[int, "DiffOp"]) -> "DiffOp":
        """Replace each ``d_j`` by the operator ``shifts[j]`` (in order)."""
        out = DiffOp.zero(self.positions)
        for mu, c in self.terms.items():
            op = DiffOp.scalar(c, self.positions)
            for j, e in enumerate(mu):
                for _ in range(e):
                    op = diffop_mul(op, shifts[j])
            out = out + op
        return out

    # comparison / rendering -------------------------------------------------

    def __eq__(self, other):
        if not isinstance(other, DiffOp):
            return NotImplemented
        return self.positions == other.positions and (self - other).is_zero()

    def __hash__(self):
        return hash((self.positions, frozenset(self.terms.items())))

    def sorted_terms(self):
        return sorted(self.terms.items(), key=lambda t: (sum(t[0]), t[0]), reverse=True)

    def __str__(self):
        if not self.terms:
            return "0"
        parts = []
        for mu, c in self.sorted_terms():
            der = " ".join(
                (f"d{v}" if e == 1 else f"d{v}^{e}") for v, e in zip(self.positions, mu) if e
            )
            cs = str(c)
            if " " in cs and not (cs.startswith("(") and cs.endswith(")")) and der:
                cs = f"({cs})"
            if not der:
                parts.append(cs)
            elif cs == "1":
                parts.append(der)
            elif cs == "-1":
                parts.append("-" + der)
            else:
                parts.append(f"{cs} {der}")
        out = parts[0]
        for s in parts[1:]:
            out += f" - {s[1:]}" if s.startswith("-") else f" + {s}"
        return out

    def __repr__(self):
        return f"DiffOp({self})"

    def to_json(self) -> dict:
        return {
            "positions": list(self.positions),
            "terms": [[list(mu), c.to_json()] for mu, c in self.sorted_terms()],
        }

    @classmethod
    def from_json(cls, data) -> "DiffOp":
        return cls(
            data["positions"],
            {tuple(mu): RatFunc.from_json(c) for mu, c in data["terms"]},
        )


def diffop_mul(a: DiffOp, b: DiffOp) -> DiffOp:
    """Normal-ordered composition ``a o b`` via the generalized Leibniz rule."""
    a._check(b)
    pos = a.positions
    acc: dict = {}
    for mu, f in a.terms.items():
        subs = _sub_indices(mu)
        for nu, g in b.terms.items():
            for lam, w in subs:
                dg = _deriv(g, pos, lam)
                if not dg:
                    continue
                coeff = f * dg
                if w != 1:
                    coeff = coeff * w
                key = tuple(m - l + n for m, l, n in zip(mu, lam, nu))
                acc.setdefault(key, []).append(coeff)
    terms = {}
    for key, parts in acc.items():
        s = parts[0]
        for p in parts[1:]:
            s = s + p
        if s:
            terms[key] = s
    return DiffOp._raw(pos, terms)


def commutator(a: DiffOp, b: DiffOp) -> DiffOp:
    return diffop_mul(a, b) - diffop_mul(b, a)
