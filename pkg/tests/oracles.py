"""Independent reference computations in sympy.

Nothing here calls the package's arithmetic; package objects are only read
through their public data (terms, denominators) and converted.
"""

from __future__ import annotations

import sympy as sp

from cmverify.diffop import DiffOp
from cmverify.scalar import GaussianRational, Poly, RatFunc


def sym(name: str) -> sp.Symbol:
    return sp.Symbol(name)


def gauss_to_sympy(c: GaussianRational) -> sp.Expr:
    return sp.Rational(int(c.re.numerator), int(c.re.denominator)) + sp.I * sp.Rational(
        int(c.im.numerator), int(c.im.denominator)
    )


def poly_to_sympy(p: Poly) -> sp.Expr:
    out = sp.Integer(0)
    for exps, c in p.terms.items():
        term = gauss_to_sympy(c)
        for v, e in zip(p.variables, exps):
            term *= sym(v) ** e
        out += term
    return out


def ratfunc_to_sympy(f) -> sp.Expr:
    f = RatFunc.coerce(f)
    den = sp.Integer(1)
    for form, e in f.den:
        den *= sum(c * sym(v) for v, c in form.coeffs) ** e
    return poly_to_sympy(f.num) / den


def is_zero(expr) -> bool:
    # cancel decides equality of rational functions completely
    return sp.cancel(sp.together(expr)) == 0


def apply_diffop(op: DiffOp, psi: sp.Expr) -> sp.Expr:
    """Apply a normal-ordered operator to a sympy expression."""
    out = sp.Integer(0)
    for mu, c in op.terms.items():
        d = psi
        for v, e in zip(op.positions, mu):
            if e:
                d = sp.diff(d, sym(v), e)
        out += ratfunc_to_sympy(c) * d
    return out


def generic_function(names):
    return sp.Function("psi")(*[sym(v) for v in names])


# ---------------------------------------------------------------------------
# hand-coded models of the physics, written directly in sympy
# ---------------------------------------------------------------------------


def classical_lax_residual_sympy(n: int):
    """``{H, L} - [L, M]`` built from scratch with sympy derivatives."""
    k = sym("k")
    q = [sym(f"q{j}") for j in range(1, n + 1)]
    p = [sym(f"p{j}") for j in range(1, n + 1)]
    H = sum(pi**2 for pi in p) / 2 + k**2 * sum(1 / (q[i] - q[j]) ** 2 for i in range(n) for j in range(i + 1, n))
    L = sp.Matrix(n, n, lambda r, s: p[r] if r == s else sp.I * k / (q[r] - q[s]))
    M = sp.Matrix(
        n,
        n,
        lambda r, s: sum(sp.I * k / (q[r] - q[t]) ** 2 for t in range(n) if t != r)
        if r == s
        else -sp.I * k / (q[r] - q[s]) ** 2,
    )

    def pb(f, g):
        return sum(sp.diff(f, p[j]) * sp.diff(g, q[j]) - sp.diff(f, q[j]) * sp.diff(g, p[j]) for j in range(n))

    lhs = L.applyfunc(lambda e: pb(H, e))
    return lhs - (L * M - M * L)


def quantum_lax_residual_sympy(n: int, g):
    """``i[H, L] - i[L, M]`` applied to a generic ``psi``, entrywise."""
    k = sym("k")
    q = [sym(f"q{j}") for j in range(1, n + 1)]
    psi = generic_function([f"q{j}" for j in range(1, n + 1)])

    def P(j):
        return lambda f: -sp.I * sp.diff(f, q[j])

    def mul(c):
        return lambda f: c * f

    def H(f):
        pot = g * sum(1 / (q[i] - q[j]) ** 2 for i in range(n) for j in range(i + 1, n))
        return -sum(sp.diff(f, qj, 2) for qj in q) / 2 + pot * f

    def L(r, s):
        return P(r) if r == s else mul(sp.I * k / (q[r] - q[s]))

    def M(r, s):
        if r == s:
            return mul(k * sum(1 / (q[r] - q[t]) ** 2 for t in range(n) if t != r))
        return mul(-k / (q[r] - q[s]) ** 2)

    out = sp.zeros(n, n)
    for r in range(n):
        for s in range(n):
            e = sp.I * (H(L(r, s)(psi)) - L(r, s)(H(psi)))
            for t in range(n):
                e -= sp.I * (L(r, t)(M(t, s)(psi)) - M(r, t)(L(t, s)(psi)))
            out[r, s] = sp.cancel(sp.together(sp.expand(e.doit())))
    return out


def dunkl_apply_sympy(positive_roots, c_of, a, p, xs):
    """``D_a p`` from the defining formula, with sympy ``cancel`` as divider."""
    x = sp.Matrix([sym(v) for v in xs])
    out = sum(ai * sp.diff(p, xi) for ai, xi in zip(a, x))
    for alpha in positive_roots:
        al = sp.Matrix([sp.Rational(int(t.numerator), int(t.denominator)) for t in alpha])
        pairing = (al.T * sp.Matrix(a))[0]
        if pairing == 0:
            continue
        refl = x - 2 * (al.T * x)[0] / (al.T * al)[0] * al
        sp_p = p.subs(dict(zip(list(x), list(refl))), simultaneous=True)
        out -= c_of(alpha) * pairing * sp.cancel((p - sp_p) / (al.T * x)[0])
    return sp.expand(out)
