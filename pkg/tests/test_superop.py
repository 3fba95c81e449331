import math

import numpy as np
import pytest

from sysbath.channel import ChannelParams, apply_channel_exact
from sysbath.models import build_tfim, pauli_coupling_set, thermal_state
from sysbath.operators import expm_herm, trace_norm
from sysbath.superop import (
    SuperoperatorMatrix,
    build_superoperator,
    choi_matrix,
    spectral_report,
)

M2 = build_tfim(2)
CS2 = pauli_coupling_set(2)
P2 = ChannelParams(alpha=0.3, sigma=1.0, coupling=CS2, beta=1.0,
                   dt=1.0 / 50, omega_nodes=16)


def vec(rho):
    return np.asarray(rho).reshape(-1, order="F")


def random_density(n, seed):
    rng = np.random.default_rng(seed)
    a = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    rho = a @ a.conj().T
    return rho / np.trace(rho)


def depolarizing_superop(d, p):
    s = (1 - p) * np.eye(d * d, dtype=complex)
    s += p * np.outer(vec(np.eye(d) / d), vec(np.eye(d)).conj())
    return SuperoperatorMatrix(d=d, matrix=s, params=P2)


class TestBuildSuperoperator:
    def test_identity_channel(self):
        p = ChannelParams(alpha=0.0, sigma=1.0, coupling=CS2, T=0.0,
                          allow_short_T=True, dt=1.0 / 50, omega_nodes=4)
        s = build_superoperator(p, M2)
        assert np.allclose(s.matrix, np.eye(16), atol=1e-12)

    def test_unitary_channel_form(self):
        p = ChannelParams(alpha=0.0, sigma=1.0, coupling=CS2, dt=1.0 / 50,
                          omega_nodes=4)
        s = build_superoperator(p, M2)
        u = expm_herm(M2.matrix, 2 * p.T)
        assert np.allclose(s.matrix, np.kron(u.conj(), u), atol=1e-10)

    def test_matches_direct_application(self):
        s = build_superoperator(P2, M2)
        rho = thermal_state(M2, 1.0).matrix
        assert np.linalg.norm(s.apply(rho) - apply_channel_exact(rho, P2, M2)) < 1e-9

    def test_reconstruction_on_random_states(self):
        s = build_superoperator(P2, M2)
        for seed in range(10):
            rho = random_density(4, seed)
            assert np.allclose(s.matrix @ vec(rho),
                               vec(apply_channel_exact(rho, P2, M2)), atol=1e-9)

    def test_trace_functional_fixed(self):
        s = build_superoperator(P2, M2)
        left = vec(np.eye(4)).conj() @ s.matrix
        assert np.linalg.norm(left - vec(np.eye(4)).conj()) < 1e-8

    def test_spectral_radius(self):
        s = build_superoperator(P2, M2)
        assert np.abs(np.linalg.eigvals(s.matrix)).max() <= 1 + 1e-7

    def test_memory_guard(self):
        big = build_tfim(7)
        with pytest.raises(ValueError):
            build_superoperator(
                ChannelParams(alpha=0.1, sigma=1.0, coupling=pauli_coupling_set(7)),
                big)


class TestSpectralReport:
    def test_depolarizing(self):
        rep = spectral_report(depolarizing_superop(4, 0.25), thermal_state(M2, 1.0))
        assert abs(rep.gap - 0.25) < 1e-12
        assert np.allclose(rep.fixed_point, np.eye(4) / 4, atol=1e-10)
        assert abs(rep.mixing_estimate - math.log(2) / -math.log(0.75)) < 1e-9
        assert not rep.non_mixing

    def test_unitary_non_mixing(self):
        p = ChannelParams(alpha=0.0, sigma=1.0, coupling=CS2, dt=1.0 / 50,
                          omega_nodes=4)
        rep = spectral_report(build_superoperator(p, M2), thermal_state(M2, 1.0))
        assert rep.non_mixing
        assert abs(rep.gap) < 1e-9

    def test_full_channel_report(self):
        tgt = thermal_state(M2, 1.0)
        rep = spectral_report(build_superoperator(P2, M2), tgt)
        assert abs(abs(rep.eigenvalues[0]) - 1.0) < 1e-7
        assert rep.gap > 1e-4
        assert rep.residual <= 1e-7
        assert abs(np.trace(rep.fixed_point) - 1.0) < 1e-12
        assert np.linalg.eigvalsh(rep.fixed_point).min() >= -1e-7
        td, infid = rep.distance_to_target
        assert 0 <= td <= 1 and -1e-9 <= infid <= 1

    def test_eigenvalues_sorted(self):
        rep = spectral_report(build_superoperator(P2, M2), thermal_state(M2, 1.0))
        mods = np.abs(rep.eigenvalues)
        assert np.all(np.diff(mods) <= 1e-12)


class TestChoi:
    def test_identity_channel(self):
        p = ChannelParams(alpha=0.0, sigma=1.0, coupling=CS2, T=0.0,
                          allow_short_T=True, dt=1.0 / 50, omega_nodes=4)
        c = choi_matrix(p, M2)
        phi = np.zeros(16, dtype=complex)
        for i in range(4):
            phi[i * 4 + i] = 1.0
        assert np.allclose(c, np.outer(phi, phi.conj()), atol=1e-12)

    def test_unitary_rank_one(self):
        p = ChannelParams(alpha=0.0, sigma=1.0, coupling=CS2, dt=1.0 / 50,
                          omega_nodes=4)
        evals = np.linalg.eigvalsh(choi_matrix(p, M2))
        assert evals[-1] > 3.9  # single eigenvalue d = 4
        assert np.abs(evals[:-1]).max() < 1e-10

    def test_full_channel_positive(self):
        evals = np.linalg.eigvalsh(choi_matrix(P2, M2))
        assert evals.min() >= -1e-8

    def test_trace(self):
        # Tr C = d for a trace-preserving channel.
        assert abs(np.trace(choi_matrix(P2, M2)).real - 4.0) < 1e-10


class TestApply:
    def test_apply_shape_and_linearity(self):
        s = build_superoperator(P2, M2)
        rho = random_density(4, 3)
        out = s.apply(rho)
        assert out.shape == (4, 4)
        assert np.allclose(s.apply(2 * rho), 2 * out, atol=1e-12)
