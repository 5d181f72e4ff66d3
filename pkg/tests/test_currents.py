import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hpst.currents import CurrentSystem, field_from_currents, solve_currents_for_field
from hpst.errors import DomainError, NumericalError
from hpst.model import FieldProfile

# wires spread geometrically keep the linear system well conditioned
SPREAD_XIS = (1.5, 3.0, 6.0, 12.0, 24.0)


def test_zero_current():
    assert field_from_currents(CurrentSystem.single(0.0, 20.0, 10)).omegas == (0.0,) * 10


def test_ten_node_single_pair():
    omegas = field_from_currents(CurrentSystem.single(1.0, 20.0, 10)).omegas
    assert omegas[0] == pytest.approx(1 / 20 + 1 / 29, abs=1e-15)
    assert omegas[0] == pytest.approx(0.0844827586, abs=1e-10)
    assert omegas[4] == pytest.approx(1 / 24 + 1 / 25, abs=1e-15)


def test_singular_geometry_names_pair_and_node():
    with pytest.raises(DomainError, match="pair 1.*node 3"):
        CurrentSystem(((1.0, 20.0), (1.0, -2.0)), 10)


pairs = st.lists(st.tuples(st.floats(-1e4, 1e4), st.floats(0.5, 100)), min_size=1, max_size=4)


@given(pairs, st.integers(2, 30))
def test_field_is_mirror_symmetric(ps, n):
    assert field_from_currents(CurrentSystem(tuple(ps), n)).is_mirror_symmetric()


@given(st.lists(st.floats(-100, 100), min_size=3, max_size=3),
       st.lists(st.floats(-100, 100), min_size=3, max_size=3), st.floats(-5, 5))
def test_linear_in_strengths(b1, b2, alpha):
    xis = (2.0, 10.0, 25.0)

    def field(bs):
        return np.array(field_from_currents(CurrentSystem(tuple(zip(bs, xis)), 9)).omegas)

    combined = field([x + alpha * y for x, y in zip(b1, b2)])
    np.testing.assert_allclose(combined, field(b1) + alpha * field(b2), atol=1e-9)


@given(st.floats(0.01, 1e4), st.floats(0.5, 100), st.integers(2, 40))
def test_single_pair_decays_toward_centre(b, xi, n):
    omegas = field_from_currents(CurrentSystem.single(b, xi, n)).omegas
    half = omegas[: (n + 1) // 2]
    assert all(x > y for x, y in zip(half, half[1:]))


def test_solve_zero_target():
    b = solve_currents_for_field(FieldProfile.zeros(10), SPREAD_XIS)
    np.testing.assert_array_equal(b, np.zeros(5))


@settings(max_examples=50)
@given(st.lists(st.floats(-50, 50), min_size=5, max_size=5))
def test_solve_then_field_round_trip(outer):
    target = FieldProfile.symmetric(10, outer)
    b = solve_currents_for_field(target, SPREAD_XIS)
    produced = field_from_currents(CurrentSystem(tuple(zip(b, SPREAD_XIS)), 10))
    assert max(abs(p - t) for p, t in zip(produced.omegas, target.omegas)) < 1e-8


@settings(max_examples=50)
@given(st.lists(st.floats(-100, 100), min_size=5, max_size=5))
def test_field_then_solve_recovers_strengths(b):
    field = field_from_currents(CurrentSystem(tuple(zip(b, SPREAD_XIS)), 10))
    recovered = solve_currents_for_field(field, SPREAD_XIS)
    np.testing.assert_allclose(recovered, b, rtol=1e-8, atol=1e-8 * max(1.0, max(map(abs, b))))


def test_odd_chain_uses_middle_node():
    target = FieldProfile.symmetric(5, [1.0, -2.0, 0.5])
    b = solve_currents_for_field(target, (1.0, 4.0, 16.0))
    produced = field_from_currents(CurrentSystem(tuple(zip(b, (1.0, 4.0, 16.0))), 5))
    np.testing.assert_allclose(produced.omegas, target.omegas, atol=1e-10)


def test_distant_clustered_wires_are_rejected():
    # distances 20..40 for ten nodes: condition ~5e11, and b ~1e11 cannot
    # reproduce an O(1) field to 1e-8 in double precision
    target = FieldProfile.symmetric(10, [2.651])
    with pytest.raises(NumericalError, match="reproduce the field only"):
        solve_currents_for_field(target, (20.0, 25.0, 30.0, 35.0, 40.0))


def test_condition_gate():
    with pytest.raises(NumericalError, match="ill-conditioned"):
        solve_currents_for_field(FieldProfile.zeros(10), (100.0, 101.0, 102.0, 103.0, 104.0))


@pytest.mark.parametrize(
    "target, xis",
    [
        (FieldProfile((1.0, 0.0, 0.0)), (1.0, 2.0)),
        (FieldProfile.zeros(10), (1.0, 2.0)),
        (FieldProfile.zeros(4), (1.0, 1.0)),
        (FieldProfile.zeros(4), (1.0, -1.0)),
    ],
)
def test_solve_domain_errors(target, xis):
    with pytest.raises(DomainError):
        solve_currents_for_field(target, xis)


@settings(max_examples=40, deadline=None)
@given(st.lists(st.floats(15, 40), min_size=5, max_size=5, unique=True),
       st.lists(st.floats(-100, 100), min_size=5, max_size=5))
def test_distant_wires_either_reproduce_or_refuse(xis, b):
    field = field_from_currents(CurrentSystem(tuple(zip(b, xis)), 10))
    try:
        solved = solve_currents_for_field(field, xis)
    except NumericalError:
        return
    produced = field_from_currents(CurrentSystem(tuple(zip(solved, xis)), 10))
    assert max(abs(p - t) for p, t in zip(produced.omegas, field.omegas)) < 1e-8
