"""Quantum rational Calogero-Moser operators: Lax pair, integrals J_m and
their commutators, all in normal-ordered form."""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations

from .diffop import DiffOp, commutator, diffop_mul
from .scalar import I, GaussianRational, Poly, RatFunc, var_key

__all__ = [
    "LaxPairQuantum",
    "NotProportional",
    "as_param",
    "positions_for",
    "quantum_hamiltonian",
    "build_quantum_lax",
    "quantum_lax_residual",
    "quantum_integral",
    "quantum_integrals",
    "quantum_commute_residuals",
    "key_lemma_check",
    "recursion_constant",
    "lax_coupling",
    "stated_coupling",
]


class NotProportional(ValueError):
    """The commutator in the recursion is not a multiple of the lower integral."""


def as_param(value, name: str = "k") -> Poly:
    """Coerce a symbol name, number or Poly to a Poly."""
    if isinstance(value, Poly):
        return value
    if value is None:
        return Poly.var(name)
    if isinstance(value, str):
        return Poly.var(value)
    return Poly.const(value)


def positions_for(n: int) -> tuple[str, ...]:
    return tuple(f"q{j}" for j in range(1, n + 1))


def lax_coupling(k) -> Poly:
    """Coupling produced by the Lax pair below: g = k(k-1)."""
    k = as_param(k)
    return k * (k - 1)


def stated_coupling(k) -> Poly:
    """The alternative normalisation g = k(k+1)."""
    k = as_param(k)
    return k * (k + 1)


def _inv_diff(r: int, s: int, power: int, pos) -> RatFunc:
    """``(q_r - q_s) ** -power``."""
    return RatFunc.from_linear({pos[r]: 1, pos[s]: -1}, -power, pos)


def quantum_hamiltonian(n: int, g, positions=None) -> DiffOp:
    """``(1/2) sum p_j^2 + g sum_{r<s} (q_r - q_s)^-2`` with ``p = -i d``."""
    pos = positions or positions_for(n)
    g = RatFunc.coerce(as_param(g))
    h = DiffOp.zero(pos)
    for j in range(n):
        mu = tuple(2 if i == j else 0 for i in range(n))
        h = h + DiffOp(pos, {mu: GaussianRational(-1) / 2})
    pot = RatFunc.coerce(0)
    for r, s in combinations(range(n), 2):
        pot = pot + _inv_diff(r, s, 2, pos)
    return h + DiffOp.scalar(g * pot, pos)


@dataclass
class LaxPairQuantum:
    n: int
    k: Poly
    g: Poly
    L: list[list[DiffOp]]
    M: list[list[DiffOp]]
    H: DiffOp
    positions: tuple[str, ...] = field(default=())

    def sum_to_zero_defects(self) -> list[tuple[str, int, DiffOp]]:
        out = []
        for r in range(self.n):
            row = DiffOp.zero(self.positions)
            col = DiffOp.zero(self.positions)
            for s in range(self.n):
                row = row + self.M[r][s]
                col = col + self.M[s][r]
            if row:
                out.append(("row", r, row))
            if col:
                out.append(("column", r, col))
        return out


def build_quantum_lax(n: int, k="k", g=None, perturb: tuple[int, int] | None = None, validate: bool = True) -> LaxPairQuantum:
    """Operator Lax pair for ``n`` particles.

    ``L_rs = p_r delta_rs + (1 - delta_rs) i k / q_rs`` and
    ``M_rs = -k (1 - delta_rs) / q_rs^2 + k delta_rs sum_{t != r} 1 / q_rt^2``.
    ``perturb=(r, s)`` flips the sign of one entry of ``M`` (negative control).
    ``g`` defaults to the coupling the pair actually produces, ``k(k-1)``.
    """
    if n < 2:
        raise ValueError("n must be at least 2")
    pos = positions_for(n)
    kp = as_param(k)
    g = lax_coupling(kp) if g is None else as_param(g)
    kr = RatFunc.coerce(kp)
    L = [[DiffOp.zero(pos) for _ in range(n)] for _ in range(n)]
    M = [[DiffOp.zero(pos) for _ in range(n)] for _ in range(n)]
    for r in range(n):
        L[r][r] = DiffOp.momentum(pos[r], pos)
        diag = RatFunc.coerce(0)
        for s in range(n):
            if s == r:
                continue
            L[r][s] = DiffOp.scalar(kr * I * _inv_diff(r, s, 1, pos), pos)
            M[r][s] = DiffOp.scalar(-kr * _inv_diff(r, s, 2, pos), pos)
            diag = diag + _inv_diff(r, s, 2, pos)
        M[r][r] = DiffOp.scalar(kr * diag, pos)
    if perturb is not None:
        r, s = perturb
        M[r][s] = -M[r][s]
    lax = LaxPairQuantum(n, kp, g, L, M, quantum_hamiltonian(n, g, pos), pos)
    if validate:
        bad = lax.sum_to_zero_defects()
        if bad:
            kind, idx, op = bad[0]
            raise ValueError(f"M fails the sum-to-zero condition on {kind} {idx}: {op}")
    return lax


def _matmul(A, B, pos):
    n = len(A)
    out = [[DiffOp.zero(pos) for _ in range(n)] for _ in range(n)]
    for r in range(n):
        for s in range(n):
            acc = DiffOp.zero(pos)
            for t in range(n):
                if A[r][t] and B[t][s]:
                    acc = acc + diffop_mul(A[r][t], B[t][s])
            out[r][s] = acc
    return out


def quantum_lax_residual(n: int | None = None, k="k", g=None, lax: LaxPairQuantum | None = None) -> list[list[DiffOp]]:
    """Entrywise ``i[H, L] - i[L, M]``; the Lax equation holds iff all vanish."""
    if lax is None:
        lax = build_quantum_lax(n, k, g)
    n, pos = lax.n, lax.positions
    LM = _matmul(lax.L, lax.M, pos)
    ML = _matmul(lax.M, lax.L, pos)
    out = []
    for r in range(n):
        row = []
        for s in range(n):
            lhs = commutator(lax.H, lax.L[r][s])
            row.append((lhs - (LM[r][s] - ML[r][s])).lmul(I))
        out.append(row)
    return out


def quantum_integrals(lax: LaxPairQuantum, m_max: int | None = None) -> list[DiffOp]:
    """``[J_1, ..., J_m_max]`` with ``J_m = (1/m) sum_{jk} (L^m)_{jk}``."""
    m_max = lax.n if m_max is None else m_max
    if not 1 <= m_max <= lax.n:
        raise ValueError("m out of range")
    pos = lax.positions
    out = []
    # row vector of ones times L^m, built incrementally
    row = [DiffOp.scalar(1, pos) for _ in range(lax.n)]
    for m in range(1, m_max + 1):
        row = [
            sum((diffop_mul(row[t], lax.L[t][s]) for t in range(lax.n) if lax.L[t][s]), DiffOp.zero(pos))
            for s in range(lax.n)
        ]
        total = DiffOp.zero(pos)
        for op in row:
            total = total + op
        out.append(total.lmul(GaussianRational(1) / m))
    return out


def quantum_integral(lax: LaxPairQuantum, m: int) -> DiffOp:
    if not 1 <= m <= lax.n:
        raise ValueError("m out of range")
    return quantum_integrals(lax, m)[m - 1]


def quantum_commute_residuals(lax: LaxPairQuantum) -> dict[tuple[int, int], DiffOp]:
    J = quantum_integrals(lax)
    return {(i + 1, j + 1): commutator(J[i], J[j]) for i, j in combinations(range(lax.n), 2)}


def key_lemma_check(f, index: int, positions: tuple[str, ...]) -> DiffOp:
    """Residual ``[p_i, f] + i df/dq_i``; zero whenever the lemma holds."""
    f = RatFunc.coerce(f)
    bad = [v for v in f.variables if v not in positions and f.num.degree([v]) > 0 and v.startswith("p")]
    if bad:
        raise ValueError("f must depend on positions only")
    name = positions[index]
    comm = commutator(DiffOp.momentum(name, positions), DiffOp.scalar(f, positions))
    return comm + DiffOp.scalar(f.derivative(name) * I, positions)


def recursion_constant(n: int, m: int, k="k", g=None) -> Poly:
    """Scalar ``s`` with ``[sum_l q_l, J_m] = s J_{m-1}``."""
    if not 2 <= m <= n:
        raise ValueError("need 2 <= m <= n")
    lax = build_quantum_lax(n, k, g)
    J = quantum_integrals(lax, m)
    pos = lax.positions
    total_q = RatFunc.coerce(0)
    for v in pos:
        total_q = total_q + RatFunc.coerce(Poly.var(v, pos))
    comm = commutator(DiffOp.scalar(total_q, pos), J[m - 1])
    lower = J[m - 2]
    # leading coefficients of J_{m-1} are constants
    top = lower.leading_symbol()
    mu = max(top, key=lambda t: t)
    ref = lower.terms[mu]
    cand = comm.terms.get(mu)
    if cand is None or not ref.num.is_constant() or ref.den:
        raise NotProportional("commutator has no matching leading term")
    if cand.den or not cand.num.is_constant():
        raise NotProportional("leading ratio is not a scalar")
    ratio = cand.num.constant_value() / ref.num.constant_value()
    if comm - lower.lmul(ratio):
        raise NotProportional(f"[sum q, J_{m}] is not a multiple of J_{m - 1}")
    return Poly.const(ratio, ())
