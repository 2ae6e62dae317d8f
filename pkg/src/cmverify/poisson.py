"""Classical rational Calogero-Moser system: Poisson brackets, Lax pair,
power-trace integrals and their involution."""

from __future__ import annotations

import random
import re
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations

from .report import CheckResult, run_check, witness
from .scalar import I, GaussianRational, Poly, RatFunc, var_key

__all__ = [
    "PhaseFunction",
    "phase_variables",
    "poisson_bracket",
    "bracket_axiom_suite",
    "AxiomReport",
    "LaxPairClassical",
    "build_classical_lax",
    "classical_hamiltonian",
    "classical_lax_residual",
    "classical_integral",
    "classical_integrals",
    "involution_check",
]

PhaseFunction = RatFunc
"""A rational function of positions and momenta; momenta never in denominators."""

_MOMENTUM = re.compile(r"^p(\d+)$")


def _param(k) -> Poly:
    if isinstance(k, Poly):
        return k
    if isinstance(k, str):
        return Poly.var(k)
    return Poly.const(k)


def phase_variables(n: int) -> tuple[tuple[str, ...], tuple[str, ...]]:
    return tuple(f"q{j}" for j in range(1, n + 1)), tuple(f"p{j}" for j in range(1, n + 1))


def _infer_pairs(*fs: RatFunc) -> list[tuple[str, str]]:
    names = set()
    for f in fs:
        names.update(f.variables)
    pairs = []
    for v in sorted(names, key=var_key):
        m = _MOMENTUM.match(v)
        if m:
            j = m.group(1)
            partner = f"x{j}" if f"x{j}" in names and f"q{j}" not in names else f"q{j}"
            pairs.append((v, partner))
    return pairs


def poisson_bracket(f, g, pairs: list[tuple[str, str]] | None = None) -> RatFunc:
    """``{f, g} = sum_j (df/dp_j dg/dq_j - df/dq_j dg/dp_j)``.

    ``pairs`` lists (momentum, position) names; by default every ``p<j>`` is
    paired with ``q<j>`` (or ``x<j>`` when only that exists).
    """
    f, g = RatFunc.coerce(f), RatFunc.coerce(g)
    if pairs is None:
        pairs = _infer_pairs(f, g)
    out = RatFunc.coerce(0)
    for p, q in pairs:
        fp = f.derivative(p)
        gq = g.derivative(q) if fp else None
        if fp and gq:
            out = out + fp * gq
        fq = f.derivative(q)
        if fq:
            gp = g.derivative(p)
            if gp:
                out = out - fq * gp
    return out


# ---------------------------------------------------------------------------
# bracket axioms on random samples
# ---------------------------------------------------------------------------


@dataclass
class AxiomReport:
    samples: dict[str, int] = field(default_factory=dict)
    counterexamples: dict[str, list[str]] = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return not any(self.counterexamples.values())


def _random_phase_function(rng: random.Random, n: int, max_degree: int = 2) -> RatFunc:
    q, p = phase_variables(n)
    variables = tuple(sorted(q + p, key=var_key))
    terms = {}
    for _ in range(rng.randint(1, 4)):
        exps = [0] * len(variables)
        for _ in range(rng.randint(0, max_degree)):
            exps[rng.randrange(len(variables))] += 1
        terms[tuple(exps)] = GaussianRational(Fraction(rng.randint(-5, 5), rng.randint(1, 3)))
    f = RatFunc.coerce(Poly(variables, terms))
    if rng.random() < 0.5:
        r, s = rng.sample(range(n), 2)
        f = f + RatFunc.from_linear({q[r]: 1, q[s]: -1}, -rng.randint(1, 2), variables).__mul__(
            RatFunc.coerce(Poly.var(rng.choice(variables), variables))
        )
    return f


def bracket_axiom_suite(n: int = 2, pairs: int = 100, triples: int = 50, seed: int = 0) -> AxiomReport:
    """Linearity, anticommutativity, Leibniz and Jacobi on random samples."""
    rng = random.Random(seed)
    rep = AxiomReport()
    for name in ("linearity", "anticommutativity", "leibniz", "jacobi"):
        rep.counterexamples[name] = []
        rep.samples[name] = 0

    def sample():
        return _random_phase_function(rng, n)

    for _ in range(pairs):
        f, g, h = sample(), sample(), sample()
        a = GaussianRational(rng.randint(-3, 3), rng.randint(-2, 2))
        lin = poisson_bracket(f * a + g, h) - (poisson_bracket(f, h) * a + poisson_bracket(g, h))
        rep.samples["linearity"] += 1
        if lin:
            rep.counterexamples["linearity"].append(f"f={f}; g={g}; h={h}")
        anti = poisson_bracket(f, g) + poisson_bracket(g, f)
        rep.samples["anticommutativity"] += 1
        if anti:
            rep.counterexamples["anticommutativity"].append(f"f={f}; g={g}")
        leib = poisson_bracket(f, g * h) - poisson_bracket(f, g) * h - g * poisson_bracket(f, h)
        rep.samples["leibniz"] += 1
        if leib:
            rep.counterexamples["leibniz"].append(f"f={f}; g={g}; h={h}")
    for _ in range(triples):
        f, g, h = sample(), sample(), sample()
        jac = (
            poisson_bracket(f, poisson_bracket(g, h))
            + poisson_bracket(g, poisson_bracket(h, f))
            + poisson_bracket(h, poisson_bracket(f, g))
        )
        rep.samples["jacobi"] += 1
        if jac:
            rep.counterexamples["jacobi"].append(f"f={f}; g={g}; h={h}")
    return rep


# ---------------------------------------------------------------------------
# Lax pair
# ---------------------------------------------------------------------------


@dataclass
class LaxPairClassical:
    n: int
    k: Poly
    L: list[list[RatFunc]]
    M: list[list[RatFunc]]
    variables: tuple[str, ...]

    def sum_to_zero_defects(self) -> list[tuple[str, int, RatFunc]]:
        out = []
        for r in range(self.n):
            row = sum((self.M[r][s] for s in range(self.n)), RatFunc.coerce(0))
            col = sum((self.M[s][r] for s in range(self.n)), RatFunc.coerce(0))
            if row:
                out.append(("row", r, row))
            if col:
                out.append(("column", r, col))
        return out


def _inv(q, r, s, power, variables) -> RatFunc:
    return RatFunc.from_linear({q[r]: 1, q[s]: -1}, -power, variables)


def classical_hamiltonian(n: int, k="k") -> RatFunc:
    """``(1/2) sum p_j^2 + k^2 sum_{i<j} (q_i - q_j)^-2``."""
    q, p = phase_variables(n)
    kp = _param(k)
    variables = tuple(sorted(set(q + p + kp.variables), key=var_key))
    h = RatFunc.coerce(Poly.zero(variables))
    for name in p:
        h = h + RatFunc.coerce(Poly.var(name, variables) ** 2) * GaussianRational(Fraction(1, 2))
    pot = RatFunc.coerce(0)
    for r, s in combinations(range(n), 2):
        pot = pot + _inv(q, r, s, 2, variables)
    return h + pot * RatFunc.coerce(kp * kp)


def build_classical_lax(n: int, k="k", perturb: tuple[int, int] | None = None) -> LaxPairClassical:
    """``L_rs = p_r delta_rs + (1 - delta_rs) i k / q_rs``;
    ``M_rs = -i k (1 - delta_rs) / q_rs^2 + delta_rs sum_{t != r} i k / q_rt^2``.

    ``perturb=(r, s)`` flips the sign of ``M[r][s]`` (negative control).
    """
    if n < 2:
        raise ValueError("n must be at least 2")
    q, p = phase_variables(n)
    kp = _param(k)
    variables = tuple(sorted(set(q + p + kp.variables), key=var_key))
    ik = RatFunc.coerce(kp) * I
    zero = RatFunc.coerce(Poly.zero(variables))
    L = [[zero] * n for _ in range(n)]
    M = [[zero] * n for _ in range(n)]
    for r in range(n):
        L[r] = list(L[r])
        M[r] = list(M[r])
        L[r][r] = RatFunc.coerce(Poly.var(p[r], variables))
        diag = zero
        for s in range(n):
            if s != r:
                L[r][s] = ik * _inv(q, r, s, 1, variables)
                M[r][s] = -ik * _inv(q, r, s, 2, variables)
                diag = diag + ik * _inv(q, r, s, 2, variables)
        M[r][r] = diag
    if perturb is not None:
        r, s = perturb
        M[r][s] = -M[r][s]
    return LaxPairClassical(n, kp, L, M, variables)


def _matmul(A, B):
    n = len(A)
    out = []
    for r in range(n):
        row = []
        for s in range(n):
            acc = RatFunc.coerce(0)
            for t in range(n):
                if A[r][t] and B[t][s]:
                    acc = acc + A[r][t] * B[t][s]
            row.append(acc)
        out.append(row)
    return out


def classical_lax_residual(n: int | None = None, k="k", lax: LaxPairClassical | None = None) -> list[list[RatFunc]]:
    """``{H, L_rs} - [L, M]_rs``; identically zero for a genuine Lax pair."""
    if lax is None:
        lax = build_classical_lax(n, k)
    H = classical_hamiltonian(lax.n, lax.k)
    LM = _matmul(lax.L, lax.M)
    ML = _matmul(lax.M, lax.L)
    return [
        [poisson_bracket(H, lax.L[r][s]) - (LM[r][s] - ML[r][s]) for s in range(lax.n)]
        for r in range(lax.n)
    ]


def classical_integrals(lax: LaxPairClassical, m_max: int | None = None) -> list[RatFunc]:
    """``[I_1, ..., I_m_max]`` with ``I_m = (1/m) tr L^m``."""
    m_max = lax.n if m_max is None else m_max
    if not 1 <= m_max <= lax.n:
        raise ValueError("m out of range")
    out = []
    power = lax.L
    for m in range(1, m_max + 1):
        if m > 1:
            power = _matmul(power, lax.L)
        tr = RatFunc.coerce(0)
        for r in range(lax.n):
            tr = tr + power[r][r]
        out.append(tr * GaussianRational(Fraction(1, m)))
    return out


def classical_integral(lax: LaxPairClassical, m: int) -> RatFunc:
    if not 1 <= m <= lax.n:
        raise ValueError("m out of range")
    return classical_integrals(lax, m)[m - 1]


def involution_check(n: int, k="k", suite: str = "involution") -> list[CheckResult]:
    """One check per pair ``{I_i, I_j}``, ``1 <= i < j <= n``."""
    lax = build_classical_lax(n, k)
    integrals = classical_integrals(lax)
    results = []
    for i, j in combinations(range(n), 2):
        results.append(
            run_check(
                suite,
                f"{suite}.n{n}.I{i + 1}_I{j + 1}",
                lambda i=i, j=j: witness(poisson_bracket(integrals[i], integrals[j])),
            )
        )
    return results
