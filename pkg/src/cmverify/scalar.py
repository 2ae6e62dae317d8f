"""Exact scalar layer: Gaussian rationals, sparse polynomials, linear forms and
rational functions whose denominators are products of linear forms.

Parameters such as ``k`` or ``c1`` are ordinary polynomial variables here; a
``ParamScalar`` is simply a :class:`Poly` whose variables are all parameters.
"""

from __future__ import annotations

import re
from fractions import Fraction
from functools import lru_cache
from math import gcd
from typing import Iterable, Mapping, Union

from gmpy2 import mpq

__all__ = [
    "GaussianRational",
    "Poly",
    "ParamScalar",
    "LinearForm",
    "RatFunc",
    "NotDivisible",
    "I",
    "poly_arith",
    "ratfunc_arith",
    "exact_divide",
    "partial_derivative",
    "var_key",
]

Rational = Union[int, Fraction, "mpq"]
_ZERO = mpq(0)
_ONE = mpq(1)


class NotDivisible(ArithmeticError):
    """Raised when an exact division leaves a nonzero remainder."""


# ---------------------------------------------------------------------------
# Gaussian rationals
# ---------------------------------------------------------------------------


def _q(x) -> mpq:
    if isinstance(x, str):
        return mpq(Fraction(x))
    return mpq(x)


class GaussianRational:
    """An element ``re + im*i`` of Q(i); both parts are exact rationals."""

    __slots__ = ("re", "im")

    def __init__(self, re=0, im=0):
        if isinstance(re, GaussianRational):
            self.re, self.im = re.re, re.im + _q(im)
            return
        self.re = _q(re)
        self.im = _q(im)

    @classmethod
    def _raw(cls, re: mpq, im: mpq) -> "GaussianRational":
        obj = object.__new__(cls)
        obj.re = re
        obj.im = im
        return obj

    @classmethod
    def coerce(cls, x) -> "GaussianRational":
        if isinstance(x, GaussianRational):
            return x
        if isinstance(x, complex):
            raise TypeError("floating complex values are not exact")
        if isinstance(x, float):
            raise TypeError("floating values are not exact")
        return cls._raw(_q(x), _ZERO)

    def is_zero(self) -> bool:
        return not self.re and not self.im

    def __bool__(self) -> bool:
        return bool(self.re) or bool(self.im)

    def is_real(self) -> bool:
        return not self.im

    def __add__(self, other):
        if not isinstance(other, GaussianRational):
            try:
                other = GaussianRational.coerce(other)
            except TypeError:
                return NotImplemented
        return GaussianRational._raw(self.re + other.re, self.im + other.im)

    __radd__ = __add__

    def __neg__(self):
        return GaussianRational._raw(-self.re, -self.im)

    def __sub__(self, other):
        if not isinstance(other, GaussianRational):
            try:
                other = GaussianRational.coerce(other)
            except TypeError:
                return NotImplemented
        return GaussianRational._raw(self.re - other.re, self.im - other.im)

    def __rsub__(self, other):
        return (-self).__add__(other)

    def __mul__(self, other):
        if not isinstance(other, GaussianRational):
            try:
                other = GaussianRational.coerce(other)
            except TypeError:
                return NotImplemented
        a, b, c, d = self.re, self.im, other.re, other.im
        if not b:
            if not d:
                return GaussianRational._raw(a * c, _ZERO)
            return GaussianRational._raw(a * c, a * d)
        if not d:
            return GaussianRational._raw(a * c, b * c)
        return GaussianRational._raw(a * c - b * d, a * d + b * c)

    __rmul__ = __mul__

    def conjugate(self) -> "GaussianRational":
        return GaussianRational._raw(self.re, -self.im)

    def __truediv__(self, other):
        other = GaussianRational.coerce(other)
        if other.is_zero():
            raise ZeroDivisionError("division by zero Gaussian rational")
        norm = other.re * other.re + other.im * other.im
        num = self * other.conjugate()
        return GaussianRational._raw(num.re / norm, num.im / norm)

    def __rtruediv__(self, other):
        return GaussianRational.coerce(other) / self

    def __pow__(self, n: int):
        if n < 0:
            return (GaussianRational._raw(_ONE, _ZERO) / self) ** (-n)
        out = GaussianRational._raw(_ONE, _ZERO)
        base = self
        while n:
            if n & 1:
                out = out * base
            base = base * base
            n >>= 1
        return out

    def __eq__(self, other):
        if isinstance(other, GaussianRational):
            return self.re == other.re and self.im == other.im
        if isinstance(other, (int, Fraction)) or type(other) is type(_ZERO):
            return not self.im and self.re == other
        return NotImplemented

    def __hash__(self):
        if not self.im:
            return hash(self.re)
        return hash((self.re, self.im))

    def __repr__(self):
        return f"GaussianRational({str(self.re)!r}, {str(self.im)!r})"

    def __str__(self):
        return _fmt_gauss(self)

    def to_json(self) -> list[str]:
        return [str(self.re), str(self.im)]

    @classmethod
    def from_json(cls, data) -> "GaussianRational":
        return cls(Fraction(data[0]), Fraction(data[1]))


I = GaussianRational(0, 1)


def _fmt_gauss(c: GaussianRational) -> str:
    if not c.im:
        return str(c.re)
    if not c.re:
        if c.im == 1:
            return "i"
        if c.im == -1:
            return "-i"
        return f"{c.im}*i"
    sign = "+" if c.im > 0 else "-"
    mag = abs(c.im)
    im = "i" if mag == 1 else f"{mag}*i"
    return f"({c.re} {sign} {im})"


# ---------------------------------------------------------------------------
# Polynomials
# ---------------------------------------------------------------------------
#
# A monomial is packed into one int: bit 0 is the exponent of i (0 or 1,
# reduced with i^2 = -1), bit 1 is a carry slot, and variable j occupies a
# _W-bit field starting at bit 2 + _W*j. Coefficients are plain rationals.

_NAME_RE = re.compile(r"^(.*?)(\d*)$")
_W = 16
_MASK = (1 << _W) - 1
_MAX_EXP = _MASK


@lru_cache(maxsize=None)
def var_key(name: str):
    """Global variable order: alphabetic prefix, then numeric suffix."""
    m = _NAME_RE.match(name)
    prefix, digits = m.group(1), m.group(2)
    return (prefix, int(digits) if digits else -1, name)


def _sorted_vars(names: Iterable[str]) -> tuple[str, ...]:
    return tuple(sorted(set(names), key=var_key))


def _sh(j: int) -> int:
    return 2 + _W * j


def _pack(exps, ibit: int = 0) -> int:
    m = ibit
    for j, e in enumerate(exps):
        if e:
            if e < 0 or e > _MAX_EXP:
                raise ValueError(f"exponent {e} out of range")
            m |= e << (2 + _W * j)
    return m


def _unpack(m: int, n: int) -> tuple[int, ...]:
    m >>= 2
    out = []
    for _ in range(n):
        out.append(m & _MASK)
        m >>= _W
    return tuple(out)


def _mdeg(m: int) -> int:
    m >>= 2
    d = 0
    while m:
        d += m & _MASK
        m >>= _W
    return d


def _times_i(t: dict) -> dict:
    out = {}
    for m, c in t.items():
        if m & 1:
            out[m - 1] = -c
        else:
            out[m + 1] = c
    return out


def _gauss_terms(c: GaussianRational, base: int = 0) -> dict:
    out = {}
    if c.re:
        out[base] = c.re
    if c.im:
        out[base | 1] = c.im
    return out


def _add_into(acc: dict, t: dict, sign: int = 1) -> None:
    get = acc.get
    for m, c in t.items():
        prev = get(m)
        if prev is None:
            acc[m] = c if sign > 0 else -c
        else:
            s = prev + c if sign > 0 else prev - c
            if s:
                acc[m] = s
            else:
                del acc[m]


class Poly:
    """Sparse polynomial with Gaussian-rational coefficients.

    Instances are immutable by convention. ``terms`` exposes the mapping from
    exponent tuples (aligned with ``variables``) to nonzero coefficients.
    """

    __slots__ = ("variables", "_t", "_hash")

    def __init__(self, variables: Iterable[str] = (), terms: Mapping | None = None):
        variables = tuple(variables)
        if len(set(variables)) != len(variables):
            raise ValueError("duplicate variable names")
        acc: dict = {}
        if terms:
            n = len(variables)
            for exps, c in terms.items():
                exps = tuple(int(e) for e in exps)
                if len(exps) != n or any(e < 0 for e in exps):
                    raise ValueError(f"bad exponent vector {exps}")
                c = GaussianRational.coerce(c)
                _add_into(acc, _gauss_terms(c, _pack(exps)))
        self.variables = variables
        self._t = acc
        self._hash = None

    @classmethod
    def _raw(cls, variables: tuple[str, ...], t: dict) -> "Poly":
        obj = object.__new__(cls)
        obj.variables = variables
        obj._t = t
        obj._hash = None
        return obj

    # constructors -----------------------------------------------------------

    @classmethod
    def zero(cls, variables: Iterable[str] = ()) -> "Poly":
        return cls._raw(tuple(variables), {})

    @classmethod
    def const(cls, c, variables: Iterable[str] = ()) -> "Poly":
        return cls._raw(tuple(variables), _gauss_terms(GaussianRational.coerce(c)))

    @classmethod
    def var(cls, name: str, variables: Iterable[str] | None = None) -> "Poly":
        variables = tuple(variables) if variables is not None else (name,)
        if name not in variables:
            variables = _sorted_vars(variables + (name,))
        return cls._raw(variables, {1 << _sh(variables.index(name)): _ONE})

    @classmethod
    def coerce(cls, x, variables: Iterable[str] = ()) -> "Poly":
        if isinstance(x, Poly):
            return x
        return cls.const(x, variables)

    # structure --------------------------------------------------------------

    @property
    def terms(self) -> dict[tuple[int, ...], GaussianRational]:
        n = len(self.variables)
        out: dict = {}
        for m, c in self._t.items():
            key = _unpack(m, n)
            re_, im_ = out.get(key, (_ZERO, _ZERO))
            if m & 1:
                im_ = c
            else:
                re_ = c
            out[key] = (re_, im_)
        return {k: GaussianRational._raw(r, i) for k, (r, i) in out.items()}

    def is_zero(self) -> bool:
        return not self._t

    def __bool__(self) -> bool:
        return bool(self._t)

    def __len__(self) -> int:
        return len(self.terms)

    def is_constant(self) -> bool:
        return all(m < 2 for m in self._t)

    def constant_value(self) -> GaussianRational:
        if not self.is_constant():
            raise ValueError("polynomial is not constant")
        return GaussianRational._raw(self._t.get(0, _ZERO), self._t.get(1, _ZERO))

    def used_variables(self) -> tuple[str, ...]:
        acc = 0
        for m in self._t:
            acc |= m
        acc >>= 2
        used = []
        for v in self.variables:
            if acc & _MASK:
                used.append(v)
            acc >>= _W
        return tuple(used)

    def degree(self, names: Iterable[str] | None = None) -> int:
        """Total degree, optionally restricted to a subset of variables."""
        if not self._t:
            return -1
        if names is None:
            return max(_mdeg(m) for m in self._t)
        names = set(names)
        shifts = [_sh(j) for j, v in enumerate(self.variables) if v in names]
        return max(sum((m >> s) & _MASK for s in shifts) for m in self._t)

    def extend(self, variables: Iterable[str]) -> "Poly":
        """Re-embed into a larger variable universe (canonically ordered)."""
        return self.embed(_sorted_vars(tuple(self.variables) + tuple(variables)))

    def embed(self, new_vars: tuple[str, ...]) -> "Poly":
        new_vars = tuple(new_vars)
        if new_vars == self.variables:
            return self
        missing = [v for v in self.used_variables() if v not in new_vars]
        if missing:
            raise ValueError(f"cannot drop variables in use: {missing}")
        moves = [
            (_sh(j), _sh(new_vars.index(v))) for j, v in enumerate(self.variables) if v in new_vars
        ]
        t = {}
        for m, c in self._t.items():
            nm = m & 1
            for src, dst in moves:
                e = (m >> src) & _MASK
                if e:
                    nm |= e << dst
            t[nm] = c
        return Poly._raw(new_vars, t)

    @staticmethod
    def unify(a: "Poly", b: "Poly") -> tuple["Poly", "Poly"]:
        if a.variables == b.variables:
            return a, b
        merged = _sorted_vars(a.variables + b.variables)
        return a.embed(merged), b.embed(merged)

    # arithmetic -------------------------------------------------------------

    def _other(self, other) -> "Poly | None":
        if isinstance(other, Poly):
            return other
        try:
            return Poly.const(other, self.variables)
        except TypeError:
            return None

    def __add__(self, other):
        other = self._other(other)
        if other is None:
            return NotImplemented
        a, b = Poly.unify(self, other)
        if len(a._t) < len(b._t):
            a, b = b, a
        t = dict(a._t)
        _add_into(t, b._t)
        return Poly._raw(a.variables, t)

    __radd__ = __add__

    def __neg__(self):
        return Poly._raw(self.variables, {m: -c for m, c in self._t.items()})

    def __sub__(self, other):
        other = self._other(other)
        if other is None:
            return NotImplemented
        a, b = Poly.unify(self, other)
        t = dict(a._t)
        _add_into(t, b._t, -1)
        return Poly._raw(a.variables, t)

    def __rsub__(self, other):
        return (-self) + other

    def scale(self, c) -> "Poly":
        c = GaussianRational.coerce(c)
        t = self._t
        out: dict = {}
        if c.re:
            r = c.re
            out = {m: v * r for m, v in t.items()}
        if c.im:
            _add_into(out, {m: v * c.im for m, v in _times_i(t).items()})
        return Poly._raw(self.variables, out)

    def __mul__(self, other):
        if not isinstance(other, Poly):
            try:
                return self.scale(other)
            except TypeError:
                return NotImplemented
        a, b = Poly.unify(self, other)
        A, B = a._t, b._t
        if not A or not B:
            return Poly._raw(a.variables, {})
        if len(A) < len(B):
            A, B = B, A
        acc: dict = {}
        get = acc.get
        for mb, cb in B.items():
            for ma, ca in A.items():
                m = ma + mb
                if m & 2:
                    m -= 2
                    c = -(ca * cb)
                else:
                    c = ca * cb
                prev = get(m)
                acc[m] = c if prev is None else prev + c
        return Poly._raw(a.variables, {m: c for m, c in acc.items() if c})

    __rmul__ = __mul__

    def __pow__(self, n: int) -> "Poly":
        if n < 0:
            raise ValueError("negative power of a polynomial")
        out = Poly.const(1, self.variables)
        base = self
        while n:
            if n & 1:
                out = out * base
            n >>= 1
            if n:
                base = base * base
        return out

    def derivative(self, name: str) -> "Poly":
        if name not in self.variables:
            return Poly._raw(self.variables, {})
        s = _sh(self.variables.index(name))
        one = 1 << s
        t = {}
        for m, c in self._t.items():
            e = (m >> s) & _MASK
            if e:
                t[m - one] = c * e
        return Poly._raw(self.variables, t)

    def substitute(self, mapping: Mapping[str, "Poly"]) -> "Poly":
        """Replace variables by polynomials; unmapped variables are kept."""
        mapping = {v: p for v, p in mapping.items() if v in self.variables}
        if not mapping:
            return self
        universe = set(self.variables)
        for p in mapping.values():
            universe.update(p.variables)
        new_vars = _sorted_vars(universe)
        base_self = self.embed(new_vars)
        mapped = [(_sh(new_vars.index(v)), p.embed(new_vars)) for v, p in mapping.items()]
        power_cache: dict = {}
        acc: dict = {}
        for m, c in base_self._t.items():
            rest = m
            factors = []
            for s, p in mapped:
                e = (m >> s) & _MASK
                if e:
                    rest -= e << s
                    key = (s, e)
                    if key not in power_cache:
                        power_cache[key] = p ** e
                    factors.append(power_cache[key])
            term = Poly._raw(new_vars, {rest: c})
            for f in factors:
                term = term * f
            _add_into(acc, term._t)
        return Poly._raw(new_vars, acc)

    def evaluate(self, values: Mapping[str, object]):
        """Numerical evaluation; coefficients become (complex) floats."""
        n = len(self.variables)
        total = 0
        for m, c in self._t.items():
            val = complex(0, float(c)) if m & 1 else float(c)
            for v, e in zip(self.variables, _unpack(m, n)):
                if e:
                    val = val * values[v] ** e
            total = total + val
        return total

    def coefficient_split(self, names: Iterable[str]) -> dict[tuple[int, ...], "Poly"]:
        """Group by exponents of ``names``; values are Polys in the rest."""
        names = tuple(names)
        sel = [(k, _sh(self.variables.index(v))) for k, v in enumerate(names) if v in self.variables]
        rest_vars = tuple(v for v in self.variables if v not in names)
        groups: dict = {}
        for m, c in self._t.items():
            key = [0] * len(names)
            rest = m
            for k, s in sel:
                e = (m >> s) & _MASK
                if e:
                    key[k] = e
                    rest -= e << s
            groups.setdefault(tuple(key), {})[rest] = c
        return {k: Poly._raw(self.variables, t).embed(rest_vars) for k, t in groups.items()}

    # comparison / rendering -------------------------------------------------

    def __eq__(self, other):
        if not isinstance(other, Poly):
            try:
                other = Poly.const(other, self.variables)
            except TypeError:
                return NotImplemented
        a, b = Poly.unify(self, other)
        return a._t == b._t

    def __hash__(self):
        if self._hash is None:
            used = self.used_variables()
            p = self.embed(used)
            self._hash = hash((used, frozenset(p._t.items())))
        return self._hash

    def sorted_terms(self) -> list[tuple[tuple[int, ...], GaussianRational]]:
        """Terms in graded-lex order, highest first."""
        return sorted(self.terms.items(), key=lambda t: (sum(t[0]), t[0]), reverse=True)

    def __str__(self):
        if not self._t:
            return "0"
        parts = []
        for exps, c in self.sorted_terms():
            mono = "*".join(
                (v if e == 1 else f"{v}^{e}") for v, e in zip(self.variables, exps) if e
            )
            if not mono:
                s = str(c)
            elif c == 1:
                s = mono
            elif c == -1:
                s = "-" + mono
            else:
                s = f"{c}*{mono}"
            parts.append(s)
        out = parts[0]
        for s in parts[1:]:
            out += f" - {s[1:]}" if s.startswith("-") else f" + {s}"
        return out

    def __repr__(self):
        return f"Poly({self})"

    def to_json(self) -> dict:
        return {
            "variables": list(self.variables),
            "terms": [[list(e), *c.to_json()] for e, c in self.sorted_terms()],
        }

    @classmethod
    def from_json(cls, data: Mapping) -> "Poly":
        variables = tuple(data["variables"])
        terms = {tuple(t[0]): GaussianRational(Fraction(t[1]), Fraction(t[2])) for t in data["terms"]}
        return cls(variables, terms)


ParamScalar = Poly
"""A polynomial in parameters only (k, c1, c2, ...)."""


def poly_arith(a: Poly, b: Poly, op: str) -> Poly:
    if op == "add":
        return a + b
    if op == "sub":
        return a - b
    if op == "mul":
        return a * b
    raise ValueError(f"unknown op {op!r}")


# ---------------------------------------------------------------------------
# Linear forms
# ---------------------------------------------------------------------------


class LinearForm:
    """Nonzero homogeneous linear form with canonical integer coefficients.

    Stored sparsely as ``((name, coeff), ...)`` in global variable order, with
    content 1 and first coefficient positive.
    """

    __slots__ = ("coeffs", "_hash")

    def __init__(self, coeffs: tuple[tuple[str, int], ...]):
        self.coeffs = coeffs
        self._hash = hash(coeffs)

    @staticmethod
    def canonical(coeffs: Mapping[str, object]) -> tuple["LinearForm", Fraction]:
        """Return ``(form, scale)`` with ``sum coeffs[v]*v == scale*form``."""
        items = [(v, Fraction(c)) for v, c in coeffs.items() if Fraction(c) != 0]
        if not items:
            raise ValueError("linear form must be nonzero")
        items.sort(key=lambda t: var_key(t[0]))
        den = 1
        for _, c in items:
            den = den * c.denominator // gcd(den, c.denominator)
        ints = [(v, int(c * den)) for v, c in items]
        g = 0
        for _, c in ints:
            g = gcd(g, c)
        if ints[0][1] < 0:
            g = -g
        form = LinearForm(tuple((v, c // g) for v, c in ints))
        return form, Fraction(g, den)

    @classmethod
    def from_vector(cls, vector: Iterable, variables: Iterable[str]) -> tuple["LinearForm", Fraction]:
        return cls.canonical(dict(zip(variables, vector)))

    def variables(self) -> tuple[str, ...]:
        return tuple(v for v, _ in self.coeffs)

    def coefficient(self, name: str) -> int:
        for v, c in self.coeffs:
            if v == name:
                return c
        return 0

    def to_poly(self, variables: tuple[str, ...] | None = None) -> Poly:
        return _form_poly(self, variables if variables is not None else self.variables())

    def __eq__(self, other):
        return isinstance(other, LinearForm) and self.coeffs == other.coeffs

    def __hash__(self):
        return self._hash

    def __lt__(self, other):
        return self.sort_key() < other.sort_key()

    def sort_key(self):
        return tuple((var_key(v), c) for v, c in self.coeffs)

    def __str__(self):
        return str(self.to_poly())

    def __repr__(self):
        return f"LinearForm({self})"

    def to_json(self) -> list:
        return [[v, c] for v, c in self.coeffs]

    @classmethod
    def from_json(cls, data) -> "LinearForm":
        form, scale = cls.canonical({v: c for v, c in data})
        if scale != 1:
            raise ValueError("linear form is not canonical")
        return form


@lru_cache(maxsize=None)
def _form_poly(form: LinearForm, variables: tuple[str, ...]) -> Poly:
    variables = tuple(variables)
    if any(v not in variables for v, _ in form.coeffs):
        variables = _sorted_vars(variables + form.variables())
    return Poly._raw(variables, {1 << _sh(variables.index(v)): mpq(c) for v, c in form.coeffs})


@lru_cache(maxsize=None)
def _form_power(form: LinearForm, variables: tuple[str, ...], e: int) -> Poly:
    return _form_poly(form, variables) ** e


def exact_divide(p: Poly, f: LinearForm) -> Poly:
    """Quotient of ``p`` by the linear form ``f``; raises NotDivisible."""
    if not p._t:
        return p
    if any(v not in p.variables for v in f.variables()):
        p = p.extend(f.variables())
    vs = p.variables
    lead, a = f.coeffs[0]
    s = _sh(vs.index(lead))
    rest = Poly._raw(vs, {1 << _sh(vs.index(v)): mpq(c) for v, c in f.coeffs[1:]})
    # split p by powers of the lead variable
    groups: dict[int, dict] = {}
    for m, c in p._t.items():
        e = (m >> s) & _MASK
        groups.setdefault(e, {})[m - (e << s)] = c
    top = max(groups)
    if top == 0:
        raise NotDivisible(f"{p} is not divisible by {f}")
    inv_a = mpq(1, a)
    quot: dict[int, Poly] = {}
    carry = Poly._raw(vs, {m: c * inv_a for m, c in groups[top].items()})
    quot[top - 1] = carry
    for d in range(top - 1, 0, -1):
        t = dict(groups.get(d, {}))
        if rest._t:
            _add_into(t, (rest * carry)._t, -1)
        carry = Poly._raw(vs, {m: c * inv_a for m, c in t.items()})
        quot[d - 1] = carry
    t = dict(groups.get(0, {}))
    if rest._t:
        _add_into(t, (rest * carry)._t, -1)
    if t:
        raise NotDivisible(f"{p} is not divisible by {f}")
    out = {}
    for d, q in quot.items():
        shift = d << s
        for m, c in q._t.items():
            out[m + shift] = c
    return Poly._raw(vs, out)


def _try_divide(p: Poly, f: LinearForm) -> Poly | None:
    try:
        return exact_divide(p, f)
    except NotDivisible:
        return None


# ---------------------------------------------------------------------------
# Rational functions
# ---------------------------------------------------------------------------


def _merge_den(*dens) -> tuple:
    acc: dict = {}
    for den in dens:
        for f, e in den:
            acc[f] = acc.get(f, 0) + e
    return tuple(sorted(((f, e) for f, e in acc.items() if e), key=lambda t: t[0].sort_key()))


class RatFunc:
    """``numerator / prod(form**power)`` kept in reduced form.

    Because the forms are irreducible and canonically oriented, the reduced
    representation is unique, so equality is structural.
    """

    __slots__ = ("num", "den", "_hash")

    def __init__(self, num, den: Iterable[tuple[LinearForm, int]] = ()):
        num = Poly.coerce(num)
        den = _merge_den(tuple(den))
        for f, e in den:
            if e <= 0:
                raise ValueError("denominator powers must be positive")
        need = [v for f, _ in den for v in f.variables() if v not in num.variables]
        if need:
            num = num.extend(need)
        self.num, self.den = _reduce(num, den)
        self._hash = None

    @classmethod
    def _raw(cls, num: Poly, den: tuple) -> "RatFunc":
        obj = object.__new__(cls)
        obj.num = num
        obj.den = den
        obj._hash = None
        return obj

    @classmethod
    def coerce(cls, x) -> "RatFunc":
        if isinstance(x, RatFunc):
            return x
        return cls._raw(Poly.coerce(x), ())

    @classmethod
    def inverse_form(cls, form: LinearForm, power: int = 1, variables: tuple[str, ...] = ()) -> "RatFunc":
        """``1 / form**power``."""
        num = Poly.const(1, _sorted_vars(tuple(variables) + form.variables()))
        return cls._raw(num, ((form, power),))

    @classmethod
    def from_linear(cls, coeffs: Mapping[str, object], power: int = -1, variables: tuple[str, ...] = ()) -> "RatFunc":
        """``(sum coeffs[v]*v) ** power`` for a signed integer power."""
        form, scale = LinearForm.canonical(coeffs)
        universe = _sorted_vars(tuple(variables) + form.variables())
        s = GaussianRational(scale)
        if power >= 0:
            return cls._raw(_form_poly(form, universe).scale(s) ** power, ())
        num = Poly.const(GaussianRational(1) / s ** (-power), universe)
        return cls._raw(num, ((form, -power),))

    @property
    def variables(self) -> tuple[str, ...]:
        return self.num.variables

    def is_zero(self) -> bool:
        return not self.num._t

    def __bool__(self) -> bool:
        return bool(self.num._t)

    def is_polynomial(self) -> bool:
        return not self.den

    def as_poly(self) -> Poly:
        if self.den:
            raise ValueError("rational function has a nontrivial denominator")
        return self.num

    def denominator_poly(self, variables: tuple[str, ...] | None = None) -> Poly:
        variables = variables or self.num.variables
        out = Poly.const(1, variables)
        for f, e in self.den:
            out = out * _form_power(f, variables, e)
        return out

    # arithmetic -------------------------------------------------------------

    def __add__(self, other):
        if not isinstance(other, RatFunc):
            try:
                other = RatFunc.coerce(other)
            except TypeError:
                return NotImplemented
        if not other.num._t:
            return self
        if not self.num._t:
            return other
        a, b = Poly.unify(self.num, other.num)
        if self.den == other.den:
            return RatFunc._raw(*_reduce(a + b, self.den))
        da = dict(self.den)
        db = dict(other.den)
        den = {}
        for f in set(da) | set(db):
            den[f] = max(da.get(f, 0), db.get(f, 0))
        vs = a.variables
        for f, e in den.items():
            ea, eb = e - da.get(f, 0), e - db.get(f, 0)
            if ea:
                a = a * _form_power(f, vs, ea)
            if eb:
                b = b * _form_power(f, vs, eb)
        return RatFunc._raw(*_reduce(a + b, _merge_den(tuple(den.items()))))

    __radd__ = __add__

    def __neg__(self):
        return RatFunc._raw(-self.num, self.den)

    def __sub__(self, other):
        if not isinstance(other, RatFunc):
            try:
                other = RatFunc.coerce(other)
            except TypeError:
                return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if not isinstance(other, RatFunc):
            if isinstance(other, Poly):
                other = RatFunc._raw(other, ())
            else:
                try:
                    c = GaussianRational.coerce(other)
                except TypeError:
                    return NotImplemented
                return RatFunc._raw(self.num.scale(c), self.den if c else ())
        if not self.num._t or not other.num._t:
            a, _ = Poly.unify(self.num, other.num)
            return RatFunc._raw(Poly._raw(a.variables, {}), ())
        num = self.num * other.num
        if not self.den and not other.den:
            return RatFunc._raw(num, ())
        if not self.den or not other.den:
            # only the side with no denominator can cancel against the other
            return RatFunc._raw(*_reduce(num, _merge_den(self.den, other.den)))
        return RatFunc._raw(*_reduce(num, _merge_den(self.den, other.den)))

    __rmul__ = __mul__

    def __pow__(self, n: int) -> "RatFunc":
        if n < 0:
            if self.num.degree() > 0:
                raise ValueError("only monomials in linear forms can be inverted")
        out = RatFunc.coerce(Poly.const(1, self.variables))
        for _ in range(n):
            out = out * self
        return out

    def divide_by_form(self, form: LinearForm, power: int = 1) -> "RatFunc":
        return self * RatFunc.inverse_form(form, power, self.variables)

    def derivative(self, name: str) -> "RatFunc":
        """Quotient-rule derivative with respect to ``name``."""
        n = self.num
        if name not in n.variables:
            return RatFunc._raw(Poly._raw(n.variables, {}), ())
        involved = [(f, e) for f, e in self.den if f.coefficient(name)]
        if not involved:
            return RatFunc._raw(*_reduce(n.derivative(name), self.den))
        vs = n.variables
        prod_all = Poly.const(1, vs)
        for f, _ in involved:
            prod_all = prod_all * _form_poly(f, vs)
        new_num = n.derivative(name) * prod_all
        for f, e in involved:
            others = Poly.const(e * f.coefficient(name), vs)
            for g, _ in involved:
                if g != f:
                    others = others * _form_poly(g, vs)
            new_num = new_num - n * others
        bump = tuple((f, 1) for f, _ in involved)
        return RatFunc._raw(*_reduce(new_num, _merge_den(self.den, bump)))

    def substitute(self, mapping: Mapping[str, "RatFunc"]) -> "RatFunc":
        """Substitute variables that do not occur in the denominator."""
        den_vars = {v for f, _ in self.den for v in f.variables()}
        if den_vars & set(mapping):
            raise ValueError("cannot substitute into denominator variables")
        names = [v for v in mapping if v in self.num.variables]
        if not names:
            return self
        split = self.num.coefficient_split(names)
        base_den = RatFunc._raw(Poly.const(1, self.num.variables), self.den)
        out = RatFunc.coerce(Poly.zero(self.num.variables))
        powers: dict = {}
        for exps, coeff in split.items():
            term = RatFunc._raw(coeff, ())
            for v, e in zip(names, exps):
                if e:
                    if (v, e) not in powers:
                        powers[(v, e)] = mapping[v] ** e
                    term = term * powers[(v, e)]
            out = out + term
        return out * base_den

    def linear_transform(self, matrix, variables: tuple[str, ...]) -> "RatFunc":
        """Return ``x -> f(A x)`` for an exact matrix ``A`` over ``variables``."""
        d = len(variables)
        vs = _sorted_vars(self.num.variables + tuple(variables))
        images = {
            variables[i]: Poly(
                vs,
                {
                    tuple(1 if w == variables[j] else 0 for w in vs): matrix[i][j]
                    for j in range(d)
                    if matrix[i][j] != 0
                },
            )
            for i in range(d)
        }
        num = self.num.substitute(images)
        den = []
        factor = GaussianRational(1)
        for f, e in self.den:
            coeffs: dict = {}
            for v, c in f.coeffs:
                if v in images:
                    i = variables.index(v)
                    for j in range(d):
                        if matrix[i][j] != 0:
                            coeffs[variables[j]] = coeffs.get(variables[j], 0) + c * Fraction(matrix[i][j])
                else:
                    coeffs[v] = coeffs.get(v, 0) + c
            g, s = LinearForm.canonical(coeffs)
            den.append((g, e))
            factor = factor * GaussianRational(s) ** e
        num = num.scale(GaussianRational(1) / factor)
        return RatFunc(num, den)

    # comparison / rendering -------------------------------------------------

    def __eq__(self, other):
        if not isinstance(other, RatFunc):
            try:
                other = RatFunc.coerce(other)
            except TypeError:
                return NotImplemented
        if self.den == other.den:
            return self.num == other.num
        # cross-multiplication fallback
        a, b = Poly.unify(self.num, other.num)
        vs = a.variables
        return a * RatFunc._raw(Poly.const(1, vs), other.den).denominator_poly(vs) == b * RatFunc._raw(
            Poly.const(1, vs), self.den
        ).denominator_poly(vs)

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.num, self.den))
        return self._hash

    def __str__(self):
        if not self.den:
            return str(self.num)
        den = "*".join(
            (f"({f})" if e == 1 else f"({f})^{e}") for f, e in self.den
        )
        num = str(self.num)
        if len(self.num.terms) > 1:
            num = f"({num})"
        return f"{num}/({den})"

    def __repr__(self):
        return f"RatFunc({self})"

    def to_json(self) -> dict:
        return {
            "numerator": self.num.to_json(),
            "denominator": [[f.to_json(), e] for f, e in self.den],
        }

    @classmethod
    def from_json(cls, data: Mapping) -> "RatFunc":
        num = Poly.from_json(data["numerator"])
        den = [(LinearForm.from_json(f), int(e)) for f, e in data["denominator"]]
        return cls(num, den)


def _reduce(num: Poly, den: tuple) -> tuple[Poly, tuple]:
    if not den:
        return num, den
    if not num._t:
        return Poly._raw(num.variables, {}), ()
    out = []
    for f, e in den:
        while e:
            q = _try_divide(num, f)
            if q is None:
                break
            num = q
            e -= 1
        if e:
            out.append((f, e))
    return num, tuple(out)


def ratfunc_arith(a: RatFunc, b: RatFunc, op: str) -> RatFunc:
    if op == "add":
        return a + b
    if op == "sub":
        return a - b
    if op == "mul":
        return a * b
    raise ValueError(f"unknown op {op!r}")


def partial_derivative(f: RatFunc | Poly, var: str) -> RatFunc:
    return RatFunc.coerce(f).derivative(var)
