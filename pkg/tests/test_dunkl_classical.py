import pytest

from cmverify import dunkl_classical as C
from cmverify.dunkl import MultiplicityAssignment
from cmverify.roots import build_root_system, reflection, weyl_group_enumerate

from oracles import is_zero, ratfunc_to_sympy, sym


def test_a1_components():
    rs = build_root_system("A1")
    cd = C.ClassicalDunkl(rs)
    op = cd.operator(cd.basis(0))
    s = reflection((1, -1))
    x1, x2, p1, c = sym("x1"), sym("x2"), sym("p1"), sym("c")
    ident = [w for w in op.components if w.is_identity()][0]
    assert is_zero(ratfunc_to_sympy(op.components[ident]) - (p1 - c / (x1 - x2)))
    assert is_zero(ratfunc_to_sympy(op.components[s]) - c / (x1 - x2))
    assert is_zero(ratfunc_to_sympy(op.res()) - p1)


def test_b2_has_two_multiplicities():
    rs = build_root_system("B2")
    cd = C.ClassicalDunkl(rs)
    assert cd.c.parameters() == ("c1", "c2")
    op = cd.operator(cd.basis(0))
    # identity, plus one reflection per root with nonzero pairing against e1
    assert len(op.components) == 4


@pytest.mark.parametrize("label", ["A1", "A2", "A3", "B2", "G2"])
def test_poisson_involution(label):
    results = C.classical_poisson_involution_check(build_root_system(label))
    assert results and all(r.passed for r in results)


@pytest.mark.parametrize("label", ["A2", "B2"])
def test_product_commutes(label):
    assert all(r.passed for r in C.classical_commutator_check(build_root_system(label)))


@pytest.mark.parametrize("label", ["A2", "B2"])
def test_equivariance(label):
    rs = build_root_system(label)
    assert all(r.passed for r in C.classical_equivariance_check(rs, elements=weyl_group_enumerate(rs)))


@pytest.mark.parametrize("label", ["A1", "A2", "B2", "G2"])
def test_theta_suite(label):
    results = C.theta_check(build_root_system(label))
    assert [r.check_id.rsplit(".", 1)[1] for r in results] == ["res", "theta", "theta-shape"]
    assert all(r.passed for r in results)


def test_a1_hamiltonian_form():
    # p1^2 + p2^2 - 2 c^2/(x1-x2)^2
    rs = build_root_system("A1")
    h = C.classical_op_hamiltonian(rs)
    x1, x2, p1, p2, c = (sym(v) for v in ("x1", "x2", "p1", "p2", "c"))
    assert is_zero(ratfunc_to_sympy(h) - (p1**2 + p2**2 - 2 * c**2 / (x1 - x2) ** 2))


def test_a1_theta_by_hand():
    rs = build_root_system("A1")
    cd = C.ClassicalDunkl(rs)
    x1, x2, p1, p2, c = (sym(v) for v in ("x1", "x2", "p1", "p2", "c"))
    res = p1**2 + p2**2 - 2 * c * (p1 - p2) / (x1 - x2)
    assert is_zero(ratfunc_to_sympy(C.classical_restricted_square(rs, cd=cd)) - res)
    phi = c / (x1 - x2)
    shifted = res.subs({p1: p1 + phi, p2: p2 - phi}, simultaneous=True)
    assert is_zero(ratfunc_to_sympy(C.theta(C.classical_restricted_square(rs, cd=cd), cd)) - shifted)


@pytest.mark.parametrize("label", ["A2", "B2"])
def test_theta_multiplicative(label):
    assert C.theta_multiplicative_check(build_root_system(label), samples=8, seed=3) is None


def test_numeric_multiplicity():
    rs = build_root_system("G2")
    c = MultiplicityAssignment.from_mapping(rs, {"c1": 2, "c2": -1})
    assert all(r.passed for r in C.classical_poisson_involution_check(rs, c))
    assert all(r.passed for r in C.theta_check(rs, c))
