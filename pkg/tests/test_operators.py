import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from sysbath.operators import (
    HermEigen,
    expm_herm,
    fidelity,
    herm_eig,
    is_density_matrix,
    is_hermitian,
    is_unitary,
    kron,
    partial_trace_bath,
    trace_distance,
    trace_norm,
)

I2 = np.eye(2)
X = np.array([[0, 1], [1, 0]], dtype=complex)
Z = np.diag([1.0, -1.0]).astype(complex)


def random_hermitian(n, seed):
    rng = np.random.default_rng(seed)
    a = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    return (a + a.conj().T) / 2


def random_density(n, seed):
    rng = np.random.default_rng(seed)
    a = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    rho = a @ a.conj().T
    return rho / np.trace(rho)


class TestKron:
    def test_identity_pair(self):
        assert np.allclose(kron(I2, I2), np.eye(4))

    def test_diagonal_pauli(self):
        assert np.allclose(kron(Z, I2), np.diag([1, 1, -1, -1]))

    def test_x_with_projector(self):
        p0 = np.array([[1, 0], [0, 0]], dtype=complex)
        out = kron(X, p0)
        expected = np.zeros((4, 4))
        expected[2, 0] = expected[0, 2] = 1.0
        assert np.allclose(out, expected)


class TestPartialTraceBath:
    def test_product_state(self):
        rho = random_density(3, 0)
        for rho_env in (np.diag([1.0, 0.0]), np.diag([0.3, 0.7])):
            assert np.allclose(partial_trace_bath(np.kron(rho, rho_env), 3), rho)

    def test_bell_state(self):
        phi = np.array([1, 0, 0, 1], dtype=complex) / np.sqrt(2)
        assert np.allclose(partial_trace_bath(np.outer(phi, phi.conj()), 2), I2 / 2)

    def test_index_sum_oracle(self):
        joint = random_hermitian(4, 1)
        out = partial_trace_bath(joint, 2)
        oracle = np.zeros((2, 2), dtype=complex)
        for i in range(2):
            for j in range(2):
                for b in range(2):
                    oracle[i, j] += joint[2 * i + b, 2 * j + b]
        assert np.allclose(out, oracle)

    def test_dimension_mismatch(self):
        with pytest.raises(ValueError):
            partial_trace_bath(np.eye(6), 2)

    def test_trace_preserved(self):
        joint = random_hermitian(8, 2)
        assert abs(np.trace(partial_trace_bath(joint, 4)) - np.trace(joint)) < 1e-12


class TestHermEig:
    def test_pauli_z(self):
        eig = herm_eig(Z)
        assert np.allclose(eig.eigenvalues, [-1, 1])
        # lowest eigenvector is |1>
        assert abs(abs(eig.eigenvectors[1, 0]) - 1) < 1e-12

    def test_pauli_x(self):
        eig = herm_eig(X)
        assert np.allclose(eig.eigenvalues, [-1, 1])
        minus = np.array([1, -1]) / np.sqrt(2)
        assert abs(abs(minus @ eig.eigenvectors[:, 0])) > 1 - 1e-12

    def test_classical_two_site_spectrum(self):
        h = -np.kron(Z, Z)
        assert np.allclose(herm_eig(h).eigenvalues, [-1, -1, 1, 1])

    def test_rejects_non_hermitian(self):
        with pytest.raises(ValueError):
            herm_eig(np.array([[0, 1], [0, 0]], dtype=complex))

    def test_reconstruct(self):
        h = random_hermitian(6, 3)
        assert np.allclose(herm_eig(h).reconstruct(), h, atol=1e-12)


class TestExpmHerm:
    def test_zero_time(self):
        assert np.allclose(expm_herm(random_hermitian(4, 4), 0.0), np.eye(4))

    def test_diagonal_phase(self):
        u = expm_herm(Z, np.pi / 2)
        assert np.allclose(u, np.diag([np.exp(-1j * np.pi / 2), np.exp(1j * np.pi / 2)]))

    def test_taylor_series_oracle(self):
        h = random_hermitian(4, 5)
        h /= np.linalg.norm(h, 2)  # keep the truncated series well inside 1e-9
        t = 0.7
        term = np.eye(4, dtype=complex)
        series = np.eye(4, dtype=complex)
        for k in range(1, 13):
            term = term @ (-1j * t * h) / k
            series += term
        assert np.linalg.norm(expm_herm(h, t) - series, 2) < 1e-9

    def test_unitary(self):
        assert is_unitary(expm_herm(random_hermitian(8, 6), 2.3))

    @given(s=st.floats(-3, 3), t=st.floats(-3, 3))
    @settings(max_examples=25, deadline=None)
    def test_group_property(self, s, t):
        h = random_hermitian(3, 7)
        lhs = expm_herm(h, s) @ expm_herm(h, t)
        assert np.linalg.norm(lhs - expm_herm(h, s + t), 2) < 1e-9


class TestTraceNorm:
    def test_density_matrix(self):
        assert abs(trace_norm(random_density(5, 8)) - 1.0) < 1e-12

    def test_diag_plus_minus(self):
        assert abs(trace_norm(np.diag([1.0, -1.0])) - 2.0) < 1e-12

    def test_eigenvalue_oracle(self):
        h = random_hermitian(6, 9)
        assert abs(trace_norm(h) - np.abs(herm_eig(h).eigenvalues).sum()) < 1e-10

    @given(seed=st.integers(0, 10**6))
    @settings(max_examples=25, deadline=None)
    def test_triangle_inequality(self, seed):
        a = random_hermitian(4, seed)
        b = random_hermitian(4, seed + 1)
        assert trace_norm(a + b) <= trace_norm(a) + trace_norm(b) + 1e-10


class TestFidelity:
    def test_self_fidelity(self):
        rho = random_density(4, 10)
        assert abs(fidelity(rho, rho) - 1.0) < 1e-9

    def test_pure_state_overlap(self):
        rng = np.random.default_rng(11)
        psi = rng.normal(size=4) + 1j * rng.normal(size=4)
        phi = rng.normal(size=4) + 1j * rng.normal(size=4)
        psi /= np.linalg.norm(psi)
        phi /= np.linalg.norm(phi)
        f = fidelity(np.outer(psi, psi.conj()), np.outer(phi, phi.conj()))
        assert abs(f - abs(psi.conj() @ phi) ** 2) < 1e-7

    def test_diagonal_bhattacharyya(self):
        p = np.array([0.1, 0.2, 0.3, 0.4])
        q = np.array([0.4, 0.3, 0.2, 0.1])
        f = fidelity(np.diag(p).astype(complex), np.diag(q).astype(complex))
        assert abs(f - np.sqrt(p * q).sum() ** 2) < 1e-10

    def test_symmetric(self):
        rho, sig = random_density(4, 12), random_density(4, 13)
        assert abs(fidelity(rho, sig) - fidelity(sig, rho)) < 1e-9

    def test_range(self):
        f = fidelity(random_density(4, 14), random_density(4, 15))
        assert -1e-9 <= f <= 1 + 1e-9

    def test_rejects_non_state(self):
        with pytest.raises(ValueError):
            fidelity(np.diag([2.0, -1.0]).astype(complex), np.eye(2) / 2)

    def test_unity_iff_equal(self):
        rho = random_density(4, 16)
        sig = random_density(4, 17)
        assert fidelity(rho, sig) < 1 - 1e-6 or trace_norm(rho - sig) <= 1e-6
        near = rho + 1e-9 * (np.eye(4) / 4 - rho)
        assert fidelity(rho, near / np.trace(near)) > 1 - 1e-6


class TestPredicates:
    def test_hermitian_predicate(self):
        assert is_hermitian(random_hermitian(4, 18))
        assert not is_hermitian(np.array([[0, 1], [0, 0]], dtype=complex))

    def test_density_predicate(self):
        assert is_density_matrix(random_density(4, 19))
        assert not is_density_matrix(np.diag([1.5, -0.5]).astype(complex))

    def test_trace_distance_halves_trace_norm(self):
        a, b = random_density(4, 20), random_density(4, 21)
        assert abs(trace_distance(a, b) - 0.5 * trace_norm(a - b)) < 1e-12
