import pytest
import sympy as sp

from cmverify import quantum
from cmverify.diffop import DiffOp, commutator, diffop_mul
from cmverify.scalar import I, GaussianRational, Poly, RatFunc

from oracles import apply_diffop, generic_function, is_zero, quantum_lax_residual_sympy, ratfunc_to_sympy, sym


def _zero(m):
    return all(not e for row in m for e in row)


def test_lax_construction_n3():
    lax = quantum.build_quantum_lax(3)
    pos = lax.positions
    assert lax.L[0][0] == DiffOp.momentum("q1", pos)
    assert lax.L[0][1] == DiffOp.scalar(RatFunc.from_linear({"q1": 1, "q2": -1}, -1, pos) * RatFunc.coerce(Poly.var("k")) * I, pos)
    assert lax.M[1][0] == DiffOp.scalar(-RatFunc.from_linear({"q2": 1, "q1": -1}, -2, pos) * RatFunc.coerce(Poly.var("k")), pos)
    assert not lax.sum_to_zero_defects()


def test_lax_k_zero_has_zero_m():
    lax = quantum.build_quantum_lax(3, 0)
    assert all(not e for row in lax.M for e in row)
    assert _zero(quantum.quantum_lax_residual(lax=lax))


def test_lax_rejects_small_n():
    with pytest.raises(ValueError):
        quantum.build_quantum_lax(1)


def test_perturbed_m_fails_validation():
    with pytest.raises(ValueError):
        quantum.build_quantum_lax(3, perturb=(0, 1))


@pytest.mark.parametrize("n", [2, 3])
def test_lax_residual_vanishes_with_lax_coupling(n):
    assert _zero(quantum.quantum_lax_residual(n, "k", quantum.lax_coupling("k")))


def test_lax_residual_n2_oracle():
    # independent sympy evaluation on a generic wavefunction
    k = sym("k")
    assert quantum_lax_residual_sympy(2, k * (k - 1)) == sp.zeros(2, 2)
    oracle = quantum_lax_residual_sympy(2, k * (k + 1))
    ours = quantum.quantum_lax_residual(2, "k", quantum.stated_coupling("k"))
    psi = generic_function(("q1", "q2"))
    for r in range(2):
        for s in range(2):
            assert is_zero(apply_diffop(ours[r][s], psi) - oracle[r, s])


def test_lax_residual_with_plus_coupling_is_nonzero():
    res = quantum.quantum_lax_residual(2, "k", quantum.stated_coupling("k"))
    q1, q2 = sym("q1"), sym("q2")
    k = sym("k")
    assert is_zero(ratfunc_to_sympy(res[0][0].coefficient((0, 0))) - 4 * k / (q1 - q2) ** 3)
    assert is_zero(ratfunc_to_sympy(res[1][1].coefficient((0, 0))) + 4 * k / (q1 - q2) ** 3)
    assert not res[0][1] and not res[1][0]


def test_hamiltonian_form():
    h = quantum.quantum_hamiltonian(2, "g")
    q1, q2, g = sym("q1"), sym("q2"), sym("g")
    psi = generic_function(("q1", "q2"))
    expected = -(sp.diff(psi, q1, 2) + sp.diff(psi, q2, 2)) / 2 + g / (q1 - q2) ** 2 * psi
    assert is_zero(apply_diffop(h, psi) - expected)


def test_integrals_n3():
    lax = quantum.build_quantum_lax(3)
    J = quantum.quantum_integrals(lax)
    pos = lax.positions
    assert J[0] == sum((DiffOp.momentum(v, pos) for v in pos), DiffOp.zero(pos))
    assert J[1] == lax.H
    assert all(not c for c in quantum.quantum_commute_residuals(lax).values())


def test_j3_symmetrized_form_with_lax_coupling():
    lax = quantum.build_quantum_lax(3)
    pos = lax.positions
    J3 = quantum.quantum_integral(lax, 3)
    g = RatFunc.coerce(lax.g)
    total = DiffOp.zero(pos)
    for r in range(3):
        p = DiffOp.momentum(pos[r], pos)
        total = total + diffop_mul(diffop_mul(p, p), p).lmul(GaussianRational(1) / 3)
        for s in range(3):
            if s == r:
                continue
            inv1 = DiffOp.scalar(RatFunc.from_linear({pos[r]: 1, pos[s]: -1}, -1, pos), pos)
            inv2 = DiffOp.scalar(RatFunc.from_linear({pos[r]: 1, pos[s]: -1}, -2, pos), pos)
            sym3 = diffop_mul(p, inv2) + diffop_mul(diffop_mul(inv1, p), inv1) + diffop_mul(inv2, p)
            total = total + sym3.lmul(g).lmul(GaussianRational(1) / 3)
    assert J3 == total


def test_integral_leading_symbols():
    lax = quantum.build_quantum_lax(3)
    J = quantum.quantum_integrals(lax)
    for m, Jm in enumerate(J, start=1):
        top = Jm.leading_symbol()
        assert Jm.order() == m
        assert set(top) == {tuple(m if i == r else 0 for i in range(3)) for r in range(3)}
        # (1/m) (-i)^m on each pure power
        coeff = (GaussianRational(0, -1) ** m) / m
        assert all(c == RatFunc.coerce(Poly.const(coeff)) for c in top.values())


def test_integral_index_range():
    lax = quantum.build_quantum_lax(2)
    with pytest.raises(ValueError):
        quantum.quantum_integral(lax, 3)
    with pytest.raises(ValueError):
        quantum.quantum_integral(lax, 0)


@pytest.mark.parametrize(
    "f",
    [
        RatFunc.coerce(Poly.var("q1") ** 2),
        RatFunc.coerce(Poly.const(4)),
        RatFunc.from_linear({"q1": 1, "q2": -1}, -1, ("q1", "q2", "q3")),
        RatFunc.from_linear({"q2": 1, "q3": -1}, -3, ("q1", "q2", "q3")) * RatFunc.coerce(Poly.var("q1")),
    ],
)
def test_key_lemma(f):
    pos = ("q1", "q2", "q3")
    for i in range(3):
        assert not quantum.key_lemma_check(f, i, pos)


def test_recursion_constants():
    # the computed constants; i for m=2 and 2i for m=3 at n=3
    assert quantum.recursion_constant(3, 2) == Poly.const(I)
    assert quantum.recursion_constant(3, 3) == Poly.const(I * 2)


def test_recursion_free_case():
    # k=0, n=2: [q1+q2, (p1^2+p2^2)/2] = i(p1+p2)
    pos = ("q1", "q2")
    lax = quantum.build_quantum_lax(2, 0)
    total_q = DiffOp.scalar(Poly.var("q1", pos) + Poly.var("q2", pos), pos)
    lhs = commutator(total_q, quantum.quantum_integral(lax, 2))
    rhs = (DiffOp.momentum("q1", pos) + DiffOp.momentum("q2", pos)).lmul(I)
    assert lhs == rhs
    assert quantum.recursion_constant(2, 2, 0) == Poly.const(I)


def test_recursion_range():
    with pytest.raises(ValueError):
        quantum.recursion_constant(3, 1)


@pytest.mark.slow
def test_lax_residual_n4():
    assert _zero(quantum.quantum_lax_residual(4, "k", quantum.lax_coupling("k")))


@pytest.mark.slow
def test_commute_n4():
    lax = quantum.build_quantum_lax(4)
    assert all(not c for c in quantum.quantum_commute_residuals(lax).values())
