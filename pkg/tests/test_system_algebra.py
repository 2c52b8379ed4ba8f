import numpy as np
import pytest

from models.system import Observable
from modules.exceptions import (
    DimensionMismatchError,
    InvalidStateError,
    NonHermitianError,
    OrthogonalPostSelectionError,
    ZeroVectorError,
)
from modules.harness import random_observable, random_state
from modules.system_algebra import (
    eigendecompose,
    expectation,
    inner_product,
    make_observable,
    make_state,
    named_observable,
    weak_value,
)


class TestStatesAndObservables:

    def test_make_state_normalizes(self):
        psi = make_state([1, 1])
        assert np.allclose(psi.amplitudes, np.array([1, 1]) / np.sqrt(2))
        assert abs(np.linalg.norm(psi.amplitudes) - 1.0) <= 1e-12

    def test_make_state_keeps_unit_vector(self):
        assert np.array_equal(make_state([1, 0]).amplitudes, np.array([1, 0], dtype=complex))

    def test_zero_vector_rejected(self):
        with pytest.raises(ZeroVectorError):
            make_state([0, 0])

    def test_one_dimensional_state_rejected(self):
        with pytest.raises(InvalidStateError):
            make_state([1])

    def test_amplitudes_are_read_only(self):
        psi = make_state([1, 1j])
        with pytest.raises(ValueError):
            psi.amplitudes[0] = 0

    def test_non_hermitian_matrix_rejected(self):
        with pytest.raises(NonHermitianError):
            make_observable([[0, 1], [0, 0]])

    def test_unknown_name_rejected(self):
        with pytest.raises(InvalidStateError):
            named_observable("pauli-w")

    def test_identity_dimension(self):
        assert named_observable("identity", 3).dim == 3


class TestInnerProductAndExpectation:

    def test_conjugate_linear_in_first_slot(self, plus_state, plus_i_state):
        assert abs(inner_product(plus_i_state, plus_state) - (1 - 1j) / 2) <= 1e-15

    def test_basis_overlaps(self):
        zero, one = make_state([1, 0]), make_state([0, 1])
        assert inner_product(zero, zero) == 1
        assert inner_product(zero, one) == 0

    def test_dimension_mismatch(self):
        with pytest.raises(DimensionMismatchError):
            inner_product(make_state([1, 0]), make_state([1, 0, 0]))

    @pytest.mark.parametrize("name,amps,expected", [
        ("pauli-z", [1, 0], 1.0),
        ("pauli-z", [1, 1], 0.0),
        ("pauli-x", [1, 1], 1.0),
    ])
    def test_expectation_examples(self, name, amps, expected):
        assert expectation(named_observable(name), make_state(amps)) == pytest.approx(expected, abs=1e-12)

    def test_expectation_dimension_mismatch(self, pauli_z):
        with pytest.raises(DimensionMismatchError):
            expectation(pauli_z, make_state([1, 0, 0]))


class TestWeakValue:

    def test_eigenstate_gives_eigenvalue(self, pauli_z):
        zero = make_state([1, 0])
        w = weak_value(pauli_z, zero, zero)
        assert (w.a, w.b) == (1.0, 0.0)

    def test_imaginary_weak_value(self, pauli_z, plus_state, plus_i_state):
        w = weak_value(pauli_z, plus_state, plus_i_state)
        assert abs(w.value - 1j) <= 1e-12

    def test_weak_value_outside_spectrum(self):
        theta = np.pi / 3
        w = weak_value(named_observable("pauli-x"), make_state([1, 0]), make_state([np.cos(theta), np.sin(theta)]))
        assert w.a == pytest.approx(np.sqrt(3), abs=1e-12)
        assert w.b == pytest.approx(0.0, abs=1e-12)

    def test_orthogonal_post_selection(self, pauli_z):
        with pytest.raises(OrthogonalPostSelectionError):
            weak_value(pauli_z, make_state([1, 0]), make_state([0, 1]))

    def test_threshold_override(self, pauli_z):
        psi_i = make_state([1, 0])
        psi_f = make_state([1e-6, 1])
        with pytest.raises(OrthogonalPostSelectionError):
            weak_value(pauli_z, psi_i, psi_f, overlap_threshold=1e-3)
        assert weak_value(pauli_z, psi_i, psi_f).a == pytest.approx(1.0)

    def test_global_phase_invariance(self, rng):
        for _ in range(20):
            A = random_observable(rng, 3)
            psi_i, psi_f = random_state(rng, 3), random_state(rng, 3)
            theta, mu = rng.uniform(0, 2 * np.pi, 2)
            rotated_i = make_state(np.exp(1j * theta) * psi_i.amplitudes)
            rotated_f = make_state(np.exp(1j * mu) * psi_f.amplitudes)
            assert abs(weak_value(A, rotated_i, rotated_f).value - weak_value(A, psi_i, psi_f).value) <= 1e-12

    def test_linearity_in_observable(self, rng):
        for _ in range(20):
            A, B = random_observable(rng, 4), random_observable(rng, 4)
            psi_i, psi_f = random_state(rng, 4), random_state(rng, 4)
            combined = weak_value(A + B, psi_i, psi_f).value
            separate = weak_value(A, psi_i, psi_f).value + weak_value(B, psi_i, psi_f).value
            assert abs(combined - separate) <= 1e-12 * max(1.0, abs(combined))

    def test_equal_states_reduce_to_expectation(self, rng):
        for _ in range(20):
            A = random_observable(rng, 3)
            psi = random_state(rng, 3)
            w = weak_value(A, psi, psi)
            assert abs(w.b) <= 1e-12
            assert w.a == pytest.approx(expectation(A, psi), abs=1e-12)

    def test_eigenstate_collapse_for_any_post_selection(self, rng):
        A = random_observable(rng, 4)
        spectrum = eigendecompose(A)
        e = make_state(spectrum.eigenvectors[:, 2])
        for _ in range(10):
            w = weak_value(A, e, random_state(rng, 4))
            assert w.a == pytest.approx(spectrum.eigenvalues[2], abs=1e-10)
            assert w.b == pytest.approx(0.0, abs=1e-10)


class TestEigendecompose:

    def test_pauli_z(self, pauli_z):
        spectrum = eigendecompose(pauli_z)
        assert np.allclose(spectrum.eigenvalues, [-1, 1])
        assert np.allclose(spectrum.eigenvectors[:, 0], [0, 1])
        assert np.allclose(spectrum.eigenvectors[:, 1], [1, 0])

    def test_pauli_x(self):
        spectrum = eigendecompose(named_observable("pauli-x"))
        assert np.allclose(spectrum.eigenvalues, [-1, 1])
        assert np.allclose(spectrum.eigenvectors[:, 0], np.array([1, -1]) / np.sqrt(2))
        assert np.allclose(spectrum.eigenvectors[:, 1], np.array([1, 1]) / np.sqrt(2))

    def test_degenerate_identity(self):
        spectrum = eigendecompose(named_observable("identity", 3))
        assert np.allclose(spectrum.eigenvalues, 1.0)
        assert np.max(np.abs(spectrum.reconstruct() - np.eye(3))) <= 1e-10
        spaces = spectrum.eigenspaces()
        assert len(spaces) == 1
        assert np.allclose(spaces[0][1], np.eye(3))

    def test_random_reconstruction_and_orthonormality(self, rng):
        for _ in range(100):
            dim = int(rng.integers(2, 7))
            A = random_observable(rng, dim)
            spectrum = eigendecompose(A)
            v = spectrum.eigenvectors
            assert np.all(np.diff(spectrum.eigenvalues) >= 0)
            assert np.max(np.abs(spectrum.reconstruct() - A.matrix)) <= 1e-10
            assert np.max(np.abs(v.conj().T @ v - np.eye(dim))) <= 1e-12

    def test_reproducible_phases(self, rng):
        A = random_observable(rng, 4)
        first = eigendecompose(A).eigenvectors
        second = eigendecompose(Observable(matrix=A.matrix.copy())).eigenvectors
        assert np.array_equal(first, second)
        for column in first.T:
            leading = column[np.argmax(np.abs(column) > 1e-12)]
            assert abs(leading.imag) <= 1e-15 and leading.real > 0
