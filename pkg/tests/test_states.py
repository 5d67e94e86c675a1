import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from qrv.config import DEFAULT_POLICY
from qrv.errors import DimensionMismatch, ValidationError
from qrv.sampling import random_density_matrix, random_pure_state
from qrv.states import (
    DensityMatrix,
    PAULI_X,
    PureState,
    bloch_vector,
    density_from_bloch,
    fidelity,
    hermitian_eigensystem,
    matrix_sqrt_psd,
    project_to_density,
    pure_to_density,
    tensor_product,
    trace_distance,
)


class TestPureToDensity:
    def test_basis_state_projector(self):
        rho = pure_to_density(PureState([1, 0]))
        np.testing.assert_allclose(rho.matrix, [[1, 0], [0, 0]], atol=1e-12)

    def test_plus_state(self):
        rho = pure_to_density(PureState([1 / np.sqrt(2), 1 / np.sqrt(2)]))
        np.testing.assert_allclose(rho.matrix, 0.25 * np.full((2, 2), 2.0), atol=1e-12)

    def test_random_vector_is_rank_one(self, rng):
        rho = pure_to_density(random_pure_state(4, rng))
        w = rho.eigenvalues()
        np.testing.assert_allclose(np.trace(rho.matrix), 1.0, atol=1e-12)
        np.testing.assert_allclose(sorted(w), [0, 0, 0, 1], atol=1e-9)

    def test_rejects_unnormalized(self):
        with pytest.raises(ValidationError):
            PureState([1.0, 0.1])

    def test_small_norm_drift_renormalized(self):
        psi = PureState([1.0 + 5e-8, 0.0])
        assert abs(np.linalg.norm(psi.amplitudes) - 1.0) < 1e-12


class TestEigensystem:
    def test_identity(self):
        w, v = hermitian_eigensystem(np.eye(2))
        np.testing.assert_allclose(w, [1, 1])
        np.testing.assert_allclose(v.conj().T @ v, np.eye(2), atol=1e-12)

    def test_diagonal_ascending(self):
        w, v = hermitian_eigensystem(np.diag([0.7, 0.3]))
        np.testing.assert_allclose(w, [0.3, 0.7])
        np.testing.assert_allclose(np.abs(v), [[0, 1], [1, 0]], atol=1e-12)

    def test_pauli_x_spectrum(self):
        w, _ = hermitian_eigensystem(PAULI_X)
        np.testing.assert_allclose(w, [-1, 1], atol=1e-12)

    @pytest.mark.parametrize("dim", [2, 5, 8])
    def test_reconstruction_and_unitarity(self, rng, dim):
        g = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
        h = g + g.conj().T
        w, v = hermitian_eigensystem(h)
        np.testing.assert_allclose((v * w) @ v.conj().T, h, atol=1e-8)
        np.testing.assert_allclose(v.conj().T @ v, np.eye(dim), atol=1e-8)

    def test_rejects_non_hermitian(self):
        with pytest.raises(ValidationError):
            hermitian_eigensystem(np.array([[0, 1], [0, 0]], dtype=complex))


class TestMatrixSqrt:
    def test_diagonal(self):
        np.testing.assert_allclose(
            matrix_sqrt_psd(np.diag([4.0, 9.0])), np.diag([2.0, 3.0]), atol=1e-12
        )

    def test_identity(self):
        np.testing.assert_allclose(matrix_sqrt_psd(np.eye(3)), np.eye(3), atol=1e-12)

    def test_projector_is_own_root(self):
        p = 0.5 * np.ones((2, 2))
        np.testing.assert_allclose(matrix_sqrt_psd(p), p, atol=1e-12)

    @pytest.mark.parametrize("dim", [2, 3, 5, 8, 16])
    def test_square_reconstructs(self, rng, dim):
        rho = random_density_matrix(dim, rng)
        root = matrix_sqrt_psd(rho.matrix)
        np.testing.assert_allclose(root @ root, rho.matrix, atol=1e-7)

    def test_clamps_small_negative_eigenvalues(self):
        m = np.diag([1.0, -5e-7])
        root = matrix_sqrt_psd(m)
        np.testing.assert_allclose(root, np.diag([1.0, 0.0]), atol=1e-12)

    def test_rejects_indefinite(self):
        with pytest.raises(ValidationError):
            matrix_sqrt_psd(np.diag([1.0, -1e-3]))


class TestFidelity:
    def test_self_fidelity_is_one(self, rng):
        for dim in (2, 4):
            rho = random_density_matrix(dim, rng)
            assert fidelity(rho, rho) == pytest.approx(1.0, abs=1e-9)

    def test_orthogonal_states(self):
        zero = pure_to_density(PureState([1, 0]))
        one = pure_to_density(PureState([0, 1]))
        assert fidelity(zero, one) == pytest.approx(0.0, abs=1e-12)

    def test_pure_versus_maximally_mixed(self):
        zero = pure_to_density(PureState([1, 0]))
        mixed = DensityMatrix(np.eye(2) / 2)
        assert fidelity(zero, mixed) == pytest.approx(0.5, abs=1e-12)

    def test_symmetry(self, rng):
        for _ in range(20):
            a = random_density_matrix(3, rng)
            b = random_density_matrix(3, rng)
            assert fidelity(a, b) == pytest.approx(fidelity(b, a), abs=1e-8)

    def test_pure_states_reduce_to_overlap(self, rng):
        for _ in range(20):
            psi = random_pure_state(4, rng)
            phi = random_pure_state(4, rng)
            expected = abs(np.vdot(psi.amplitudes, phi.amplitudes)) ** 2
            got = fidelity(pure_to_density(psi), pure_to_density(phi))
            assert got == pytest.approx(expected, abs=1e-8)

    def test_dimension_mismatch(self, rng):
        with pytest.raises(DimensionMismatch):
            fidelity(random_density_matrix(2, rng), random_density_matrix(4, rng))


class TestTraceDistance:
    def test_zero_on_equal(self, rng):
        rho = random_density_matrix(3, rng)
        assert trace_distance(rho, rho) == pytest.approx(0.0, abs=1e-12)

    def test_orthogonal_pure_states(self):
        zero = pure_to_density(PureState([1, 0]))
        one = pure_to_density(PureState([0, 1]))
        assert trace_distance(zero, one) == pytest.approx(1.0, abs=1e-12)

    def test_pure_versus_maximally_mixed(self):
        zero = pure_to_density(PureState([1, 0]))
        mixed = DensityMatrix(np.eye(2) / 2)
        assert trace_distance(zero, mixed) == pytest.approx(0.5, abs=1e-12)


@settings(max_examples=40, deadline=None)
@given(seed=st.integers(min_value=0, max_value=10_000), dim=st.sampled_from([2, 3, 4]))
def test_fuchs_van_de_graaf(seed, dim):
    # 1 - sqrt(F) <= T <= sqrt(1 - F) for arbitrary state pairs.
    gen = np.random.default_rng(seed)
    rho = random_density_matrix(dim, gen)
    sigma = random_density_matrix(dim, gen, rank=gen.integers(1, dim + 1))
    f = fidelity(rho, sigma)
    t = trace_distance(rho, sigma)
    assert 1.0 - np.sqrt(f) <= t + 1e-7
    assert t <= np.sqrt(1.0 - f) + 1e-7


class TestTensorProduct:
    def test_identity_identity(self):
        np.testing.assert_allclose(tensor_product(np.eye(2), np.eye(2)), np.eye(4))

    def test_diagonal_case(self):
        out = tensor_product(np.diag([1.0, 0.0]), np.diag([0.0, 1.0]))
        np.testing.assert_allclose(out, np.diag([0.0, 1.0, 0.0, 0.0]))

    def test_double_bit_flip(self):
        xx = tensor_product(PAULI_X, PAULI_X)
        e00 = np.zeros(4)
        e00[0] = 1.0
        np.testing.assert_allclose(xx @ e00, [0, 0, 0, 1], atol=1e-12)


class TestDensityMatrixValidation:
    def test_rejects_non_hermitian(self):
        with pytest.raises(ValidationError):
            DensityMatrix(np.array([[0.5, 0.5], [0.0, 0.5]]))

    def test_rejects_wrong_trace(self):
        with pytest.raises(ValidationError):
            DensityMatrix(np.eye(2))

    def test_rejects_negative_eigenvalue(self):
        with pytest.raises(ValidationError):
            DensityMatrix(np.diag([1.5, -0.5]))

    def test_project_repairs_solver_drift(self):
        drifted = np.diag([1.0 + 2e-8, -1e-8])
        rho = project_to_density(drifted)
        assert rho.eigenvalues()[0] >= 0

    def test_dimension_cap(self, monkeypatch):
        monkeypatch.setenv("QRV_MAX_DIM", "2")
        with pytest.raises(ValidationError):
            DensityMatrix(np.eye(4) / 4)


class TestBloch:
    def test_round_trip(self, rng):
        for _ in range(10):
            r = rng.normal(size=3)
            r *= rng.uniform(0, 1) / np.linalg.norm(r)
            rho = density_from_bloch(r)
            np.testing.assert_allclose(bloch_vector(rho), r, atol=1e-12)

    def test_rejects_outside_ball(self):
        with pytest.raises(ValidationError):
            density_from_bloch([1.0, 1.0, 0.0])
