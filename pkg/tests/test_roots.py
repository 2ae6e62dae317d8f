from fractions import Fraction

import pytest

from cmverify import roots as R

F = Fraction
LABELS = ["A1", "A2", "A3", "A4", "B2", "B3", "C2", "C3", "D4", "D5", "G2", "F4", "E6", "E7", "E8"]


def vec(*xs):
    return tuple(F(x) for x in xs)


@pytest.mark.parametrize("label", LABELS)
def test_root_counts_and_axioms(label):
    rs = R.build_root_system(label)
    assert len(rs.roots) == R.expected_root_count(label)
    assert len(rs.positive) * 2 == len(rs.roots)
    assert len(rs.simple) == rs.rank
    assert not R.axiom_check(rs.roots)
    assert not R.crystallographic_check(rs.roots)


def test_known_counts():
    # closed forms against literal numbers
    assert [R.expected_root_count(x) for x in ("A2", "B3", "D4", "G2", "F4", "E6", "E7", "E8")] == [
        6, 18, 24, 12, 48, 72, 126, 240,
    ]


def test_a2_explicit():
    rs = R.build_root_system("A2")
    expected = {vec(1, -1, 0), vec(1, 0, -1), vec(0, 1, -1)}
    expected |= {tuple(-x for x in a) for a in expected}
    assert set(rs.roots) == expected
    assert set(rs.simple) == {vec(1, -1, 0), vec(0, 1, -1)}
    assert rs.normalized and rs.simply_laced


def test_g2_long_roots_in_sum_zero_plane():
    rs = R.build_root_system("G2")
    assert all(sum(a) == 0 for a in rs.roots)
    lengths = sorted({R.dot(a, a) for a in rs.roots})
    assert lengths == [2, 6]
    assert rs.parameters() == ["c1", "c2"]
    assert not rs.normalized


def test_g2_simple_roots_match_dynkin_data():
    rs = R.build_root_system("G2")
    a, b = rs.simple
    assert {R.coroot_pairing(a, b), R.coroot_pairing(b, a)} == {F(-1), F(-3)}
    assert R.coxeter_order(a, b) == 6


def test_e6_from_e8_slice():
    rs = R.build_root_system("E6")
    assert len(rs.roots) == 72
    assert rs.ambient_dim == 8
    assert rs.normalized


def test_b2_two_lengths():
    rs = R.build_root_system("B2")
    assert rs.multiplicity_name(vec(1, 0)) == "c2"
    assert rs.multiplicity_name(vec(1, 1)) == "c1"


def test_unsupported_labels():
    for label in ("D3", "E9", "G3", "Z2", "A0", "B1", "nonsense"):
        with pytest.raises(R.UnsupportedType):
            R.build_root_system(label)


def test_ordering_vector_orthogonal_rejected():
    with pytest.raises(ValueError):
        R.build_root_system("A2", ordering_vector=(1, 1, 1))


def test_custom_ordering_vector_flips_positive_set():
    default = R.build_root_system("A2")
    flipped = R.build_root_system("A2", ordering_vector=(1, 3, 9))
    assert set(flipped.positive) == {tuple(-x for x in a) for a in default.positive}


@pytest.mark.parametrize(
    "label,matrix",
    [
        ("A2", [[1, 3], [3, 1]]),
        ("B2", [[1, 4], [4, 1]]),
        ("G2", [[1, 6], [6, 1]]),
        ("A3", [[1, 3, 2], [3, 1, 3], [2, 3, 1]]),
    ],
)
def test_coxeter_matrix(label, matrix):
    assert R.build_root_system(label).coxeter_matrix() == matrix


@pytest.mark.parametrize("label", ["A3", "B3", "G2", "F4"])
def test_coxeter_sweep_allowed_orders(label):
    rs = R.build_root_system(label)
    hist, bad = R.coxeter_sweep(rs)
    assert not bad
    n = len(rs.positive)
    assert sum(hist.values()) == n * (n - 1) // 2


def test_coxeter_order_agrees_with_matrix_method():
    rs = R.build_root_system("G2")
    for a in rs.positive:
        for b in rs.positive:
            if a != b:
                assert R.coxeter_order(a, b) == R.coxeter_order_by_matrix(a, b)


def test_coxeter_cap():
    # a non-crystallographic angle never closes within a small cap
    with pytest.raises(R.CapExceeded):
        R.coxeter_order((F(1), F(0)), (F(3), F(1)), cap=12)


@pytest.mark.parametrize("label,order", [("A2", 6), ("B2", 8), ("G2", 12), ("A3", 24), ("B3", 48)])
def test_weyl_orders(label, order):
    rs = R.build_root_system(label)
    assert len(R.weyl_group_enumerate(rs)) == order == R.weyl_group_order(label)


def test_weyl_cap_refuses_large_groups():
    with pytest.raises(R.CapExceeded):
        R.weyl_group_enumerate(R.build_root_system("E7"))


def test_weyl_permutes_roots_and_conjugates():
    rs = R.build_root_system("B2")
    group = R.weyl_group_enumerate(rs)
    roots = set(rs.roots)
    for w in group:
        assert {w.apply(a) for a in roots} == roots
    assert not R.conjugation_check(rs, group)


def test_reflection_properties():
    alpha = vec(1, -1, 0)
    s = R.reflection(alpha)
    assert s.apply(alpha) == vec(-1, 1, 0)
    assert (s @ s).is_identity()
    assert s.apply(vec(1, 1, 1)) == vec(1, 1, 1)
    with pytest.raises(ValueError):
        R.GroupElem([[1, 1], [0, 1]])


def test_positive_decomposition_integral_and_sign_consistent():
    rs = R.build_root_system("F4")
    for b in rs.positive:
        coeffs = R.positive_decomposition(rs, b)
        assert all(c.denominator == 1 and c >= 0 for c in coeffs)


def test_json_shape():
    doc = R.build_root_system("B2").to_json()
    assert doc["num_roots"] == 8
    assert doc["coxeter_matrix"] == [[1, 4], [4, 1]]
    assert set(doc["multiplicities"].values()) == {"c1", "c2"}


def test_e8_coxeter_sweep():
    hist, bad = R.coxeter_sweep(R.build_root_system("E8"))
    assert not bad and sum(hist.values()) == 7140
