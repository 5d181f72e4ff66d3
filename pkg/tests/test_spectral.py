import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hpst.errors import NumericalError
from hpst.hamiltonian import build_sector_matrix
from hpst.model import ChainSpec, FieldProfile
from hpst.spectral import decompose, jacobi_eigh

from oracles import cubic_eigenvalues


def test_two_by_two():
    spec = decompose(np.array([[2.0, 1.0], [1.0, 2.0]]))
    np.testing.assert_allclose(spec.eigenvalues, [1.0, 3.0], atol=1e-14)
    r = 1 / np.sqrt(2)
    np.testing.assert_allclose(spec.eigenvectors, [[r, r], [-r, r]], atol=1e-14)


def test_diagonal_input_is_returned_sorted():
    spec = decompose(np.diag([3.0, -1.0, 2.0]))
    np.testing.assert_array_equal(spec.eigenvalues, [-1.0, 2.0, 3.0])
    np.testing.assert_array_equal(np.abs(spec.eigenvectors), [[0, 0, 1], [1, 0, 0], [0, 1, 0]])


def test_three_node_chain_against_cubic_roots():
    m = build_sector_matrix(ChainSpec(3), FieldProfile((1.063, 0.0, 1.063)))
    spec = decompose(m)
    np.testing.assert_allclose(spec.eigenvalues, cubic_eigenvalues(m.entries), atol=1e-10)


def test_outputs_are_read_only():
    spec = decompose(np.eye(2))
    with pytest.raises(ValueError):
        spec.eigenvalues[0] = 5.0


def test_non_convergence_is_reported():
    m = build_sector_matrix(ChainSpec(8), FieldProfile.zeros(8)).entries
    with pytest.raises(NumericalError, match="did not converge"):
        jacobi_eigh(m, max_sweeps=1)


def test_rejects_non_square():
    with pytest.raises(ValueError):
        jacobi_eigh(np.zeros((2, 3)))


chains = st.integers(2, 14).flatmap(
    lambda n: st.lists(st.floats(-30, 30), min_size=n, max_size=n).map(tuple)
)


@settings(max_examples=60, deadline=None)
@given(chains)
def test_decomposition_invariants(omegas):
    m = build_sector_matrix(ChainSpec(len(omegas)), FieldProfile(omegas)).entries
    spec = decompose(m)
    u, lam = spec.eigenvectors, spec.eigenvalues
    scale = np.linalg.norm(m)
    assert np.all(np.diff(lam) >= 0)
    assert lam.sum() == pytest.approx(np.trace(m), abs=1e-11 * scale)
    np.testing.assert_allclose(u.T @ u, np.eye(len(omegas)), atol=1e-11)
    np.testing.assert_allclose(u @ np.diag(lam) @ u.T, m, atol=1e-11 * scale)
    np.testing.assert_allclose(lam, np.linalg.eigvalsh(m), atol=1e-11 * scale)
    lead = np.argmax(np.abs(u), axis=0)
    assert np.all(u[lead, np.arange(len(lam))] > 0)


@settings(max_examples=40, deadline=None)
@given(st.integers(2, 12).flatmap(
    lambda n: st.lists(st.floats(-20, 20), min_size=(n + 1) // 2, max_size=(n + 1) // 2)
    .map(lambda v: (n, v))
))
def test_mirror_symmetric_chain_has_parity_eigenvectors(case):
    n, outer = case
    spec = decompose(build_sector_matrix(ChainSpec(n), FieldProfile.symmetric(n, outer)))
    u = spec.eigenvectors
    gaps = np.diff(spec.eigenvalues)
    for j in range(n):
        # only well-separated eigenvalues have a unique (parity-definite) vector
        neighbours = [gaps[j - 1] if j > 0 else np.inf, gaps[j] if j < n - 1 else np.inf]
        if min(neighbours) < 1e-6:
            continue
        flipped = u[::-1, j]
        assert min(np.abs(flipped - u[:, j]).max(), np.abs(flipped + u[:, j]).max()) < 1e-8


def test_deterministic_across_calls():
    m = build_sector_matrix(ChainSpec(10), FieldProfile.symmetric(10, [2.133, -12.435]))
    a, b = decompose(m), decompose(m)
    assert np.array_equal(a.eigenvalues, b.eigenvalues)
    assert np.array_equal(a.eigenvectors, b.eigenvectors)
