import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from weakvalue.errors import StructuralError, UndefinedWeakValueError
from weakvalue.optics import two_path_selection
from weakvalue.prepost import (
    PrePostSelection,
    abl_probability,
    three_box_scenario,
    weak_value,
    weak_value_sum,
)
from weakvalue.qcore import Operator, basis_projector, basis_state, identity, ket, projector

LABELS = ("a", "b", "c")


def random_state(rng, dim=3):
    return ket(LABELS[:dim], rng.normal(size=dim) + 1j * rng.normal(size=dim))


def random_selection(rng, min_overlap=1e-6):
    while True:
        pre, post = random_state(rng), random_state(rng)
        try:
            pp = PrePostSelection.create(pre, post)
        except UndefinedWeakValueError:
            continue
        if abs(pp.overlap) > min_overlap:
            return pp


def random_orthogonal_projectors(rng, dim=3):
    """Complete set of rank-1 projectors from a random unitary."""
    z = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    q, _ = np.linalg.qr(z)
    return [projector(ket(LABELS[:dim], q[:, k])) for k in range(dim)]


def test_three_box_weak_values():
    pp, (pa, pb, pc) = three_box_scenario()
    assert weak_value(pp, pa).value == pytest.approx(1, abs=1e-12)
    assert weak_value(pp, pb).value == pytest.approx(1, abs=1e-12)
    assert weak_value(pp, pc).value == pytest.approx(-1, abs=1e-12)


def test_three_box_abl_and_overlap():
    pp, (pa, pb, _) = three_box_scenario()
    assert abl_probability(pp, pa) == pytest.approx(1, abs=1e-12)
    assert abl_probability(pp, pb) == pytest.approx(1, abs=1e-12)
    assert pp.overlap == pytest.approx(1 / 3, abs=1e-15)


def test_three_box_sum_rule():
    pp, projs = three_box_scenario()
    assert weak_value_sum(pp, projs) == pytest.approx(1, abs=1e-12)


def test_identity_weak_value(rng):
    pp = random_selection(rng)
    assert weak_value(pp, identity(LABELS)).value == pytest.approx(1, abs=1e-12)


@pytest.mark.parametrize("p", [-1.14, -1.0, -0.27, 0.0, 0.5, 1.0, 2.5])
def test_two_path_weak_value_equals_p(p):
    pp = two_path_selection(p)
    assert weak_value(pp, basis_projector("AB", "A")).value == pytest.approx(p, abs=1e-12)


def test_eigenstate_abl():
    a = basis_state(LABELS, "a")
    pp = PrePostSelection.create(a, a)
    assert abl_probability(pp, basis_projector(LABELS, "a")) == 1.0


@pytest.mark.parametrize("p, expected", [(-1.0, 0.2), (0.0, 0.0), (1.0, 1.0), (0.5, 0.5), (-0.87, 0.87**2 / (0.87**2 + 1.87**2))])
def test_two_path_abl(p, expected):
    pp = two_path_selection(p)
    assert abl_probability(pp, basis_projector("AB", "A")) == pytest.approx(expected, abs=1e-12)


def test_two_path_sum_p_minus_one():
    pp = two_path_selection(-1.0)
    wa = weak_value(pp, basis_projector("AB", "A")).value
    wb = weak_value(pp, basis_projector("AB", "B")).value
    assert (wa, wb) == (pytest.approx(-1, abs=1e-12), pytest.approx(2, abs=1e-12))
    assert weak_value_sum(pp, [basis_projector("AB", x) for x in "AB"]) == pytest.approx(1, abs=1e-12)


def test_orthogonal_selection_rejected():
    with pytest.raises(UndefinedWeakValueError):
        PrePostSelection.create(basis_state("AB", "A"), basis_state("AB", "B"))


def test_incomplete_projector_set_rejected():
    pp, (pa, pb, _) = three_box_scenario()
    with pytest.raises(StructuralError):
        weak_value_sum(pp, [pa, pb])


def test_abl_requires_projector():
    pp, _ = three_box_scenario()
    with pytest.raises(StructuralError):
        abl_probability(pp, 2 * identity(("A", "B", "C")))


def test_weak_value_keeps_imaginary_part():
    pre = ket("ab", [1, 1j])
    post = ket("ab", [1, 1])
    w = weak_value(PrePostSelection.create(pre, post), basis_projector("ab", "b")).value
    # <f|b><b|i>/<f|i> = i / (1 + i)
    assert w == pytest.approx(1j / (1 + 1j), abs=1e-12)
    assert w.imag != 0


def test_basis_mismatch_rejected():
    pp, _ = three_box_scenario()
    with pytest.raises(StructuralError):
        weak_value(pp, basis_projector("AB", "A"))


@settings(max_examples=100)
@given(st.integers(0, 2**32 - 1))
def test_linearity(seed):
    rng = np.random.default_rng(seed)
    pp = random_selection(rng)
    p, q = random_orthogonal_projectors(rng)[:2]
    alpha, beta = complex(*rng.normal(size=2)), complex(*rng.normal(size=2))
    combo = Operator(alpha * p.entries + beta * q.entries, LABELS, LABELS)
    lhs = weak_value(pp, combo).value
    rhs = alpha * weak_value(pp, p).value + beta * weak_value(pp, q).value
    assert lhs == pytest.approx(rhs, rel=1e-9, abs=1e-9)


@settings(max_examples=100)
@given(st.integers(0, 2**32 - 1))
def test_pre_equals_post_is_a_probability(seed):
    rng = np.random.default_rng(seed)
    s = random_state(rng)
    pp = PrePostSelection.create(s, s)
    p = random_orthogonal_projectors(rng)[0]
    w = weak_value(pp, p).value
    assert abs(w.imag) <= 1e-12
    assert -1e-12 <= w.real <= 1 + 1e-12
    # with pre = post the ABL rule reads w² / (w² + (1 - w)²), so it agrees
    # with the weak value only at w in {0, 1/2, 1}
    expected = w.real**2 / (w.real**2 + (1 - w.real) ** 2)
    assert abl_probability(pp, p) == pytest.approx(expected, abs=1e-9)


@pytest.mark.parametrize("amps", [[1, 0, 0], [0, 1, 0], [1, 1, 0]])
def test_pre_equals_post_abl_matches_weak_value_at_fixed_points(amps):
    s = ket(LABELS, amps)
    pp = PrePostSelection.create(s, s)
    p = basis_projector(LABELS, "a")
    assert abl_probability(pp, p) == pytest.approx(weak_value(pp, p).value.real, abs=1e-12)


@settings(max_examples=100)
@given(st.integers(0, 2**32 - 1))
def test_abl_complement_sums_to_one(seed):
    rng = np.random.default_rng(seed)
    pp = random_selection(rng)
    p = random_orthogonal_projectors(rng)[0]
    total = abl_probability(pp, p) + abl_probability(pp, identity(LABELS) - p)
    assert total == pytest.approx(1, abs=1e-12)


def test_sum_rule_over_random_selections(rng):
    for _ in range(1000):
        pp = random_selection(rng)
        projs = random_orthogonal_projectors(rng)
        assert weak_value_sum(pp, projs) == pytest.approx(1, abs=1e-9)
