import itertools
import math

import numpy as np
import pytest

from sysbath.models import (
    CouplingSet,
    X,
    Y,
    Z,
    build_annni,
    build_hubbard,
    build_tfim,
    fermionic_coupling_set,
    ground_state,
    jordan_wigner_annihilation,
    number_operator,
    pauli_coupling_set,
    thermal_state,
)
from sysbath.operators import is_hermitian


class TestTfim:
    def test_single_site(self):
        m = build_tfim(1, 1.0, 1.2)
        assert np.allclose(m.matrix, -1.2 * X)
        assert np.allclose(np.linalg.eigvalsh(m.matrix), [-1.2, 1.2])

    def test_classical_limit(self):
        m = build_tfim(2, 1.0, 0.0)
        assert np.allclose(np.linalg.eigvalsh(m.matrix), [-1, -1, 1, 1])

    def test_ground_energy_regression(self):
        m = build_tfim(4, 1.0, 1.2)
        assert abs(np.linalg.eigvalsh(m.matrix)[0] - (-5.431519582737495)) < 1e-12

    def test_open_boundary_bond_count(self):
        # With g=0 the diagonal is a sum of L-1 ZZ bonds: extremes are +-(L-1).
        m = build_tfim(3, 1.0, 0.0)
        diag = np.diag(m.matrix).real
        assert diag.min() == -2 and diag.max() == 2

    def test_rejects_empty_chain(self):
        with pytest.raises((ValueError, TypeError)):
            build_tfim(0)


class TestHubbard:
    def test_single_site_spectrum(self):
        m = build_hubbard(1, 1.0, -4.0)
        # diagonal over occupations (0,0),(0,1),(1,0),(1,1): U(n_up-1/2)(n_dn-1/2)
        assert np.allclose(np.sort(np.diag(m.matrix).real), [-1, -1, 1, 1])

    def test_anticommutators(self):
        n_modes = 4
        cs = [jordan_wigner_annihilation(m, n_modes) for m in range(n_modes)]
        for a, b in itertools.product(range(n_modes), repeat=2):
            acomm = cs[a] @ cs[b].conj().T + cs[b].conj().T @ cs[a]
            expected = np.eye(2**n_modes) if a == b else 0
            assert np.allclose(acomm, expected, atol=1e-12)
            assert np.allclose(cs[a] @ cs[b] + cs[b] @ cs[a], 0, atol=1e-12)

    def test_ground_energy_regression(self):
        m = build_hubbard(2, 1.0, -4.0)
        assert abs(np.linalg.eigvalsh(m.matrix)[0] - (-2.8284271247461907)) < 1e-12

    def test_number_conservation(self):
        m = build_hubbard(2, 1.0, -4.0)
        n = number_operator(2)
        assert np.linalg.norm(m.matrix @ n - n @ m.matrix, 2) < 1e-10

    def test_hermitian(self):
        assert is_hermitian(build_hubbard(2, 0.7, 1.3).matrix, 1e-12)


class TestAnnni:
    def test_two_site_form(self):
        m = build_annni(2, 2.0, 123.0, 0.4)
        expected = (2.0 / 4) * np.kron(Z, Z) - 0.2 * (np.kron(X, np.eye(2)) + np.kron(np.eye(2), X))
        assert np.allclose(m.matrix, expected)

    def test_classical_enumeration(self):
        L, J1, J2 = 4, 2.0, 0.6
        m = build_annni(L, J1, J2, 0.0)
        energies = []
        for bits in itertools.product([1, -1], repeat=L):
            e = (J1 / 4) * sum(bits[i] * bits[i + 1] for i in range(L - 1))
            e += (J2 / 4) * sum(bits[i] * bits[i + 2] for i in range(L - 2))
            energies.append(e)
        assert np.allclose(np.sort(np.diag(m.matrix).real), np.sort(energies))

    def test_ground_energy_regression(self):
        m = build_annni(4, 2.0, 0.6, 0.2)
        assert abs(np.linalg.eigvalsh(m.matrix)[0] - (-1.243863750520804)) < 1e-12


class TestCouplingSets:
    def test_pauli_single_site(self):
        cs = pauli_coupling_set(1)
        assert len(cs.members) == 6
        for target in (X, Y, Z, -X, -Y, -Z):
            assert any(np.allclose(a, target) for a in cs.members)

    def test_pauli_counts_and_norms(self):
        cs = pauli_coupling_set(3)
        assert len(cs.members) == 18
        for a in cs.members:
            assert abs(np.linalg.norm(a, 2) - 1.0) < 1e-12

    def test_closure_predicates(self):
        for cs in (pauli_coupling_set(2), fermionic_coupling_set(1)):
            assert cs.is_adjoint_closed()
            assert cs.is_negation_closed()

    def test_fermionic_count_and_nilpotency(self):
        cs = fermionic_coupling_set(1)
        assert len(cs.members) == 8
        for a in cs.members:
            assert np.allclose(a @ a, 0, atol=1e-12)
            assert abs(np.linalg.norm(a, 2) - 1.0) < 1e-12

    def test_rejects_unnormalized(self):
        with pytest.raises(ValueError):
            CouplingSet(members=(2 * X, -2 * X), label="bad")

    def test_rejects_unclosed(self):
        with pytest.raises(ValueError):
            CouplingSet(members=(X,), label="bad")

    def test_unsigned_representatives(self):
        cs = pauli_coupling_set(2)
        reps = cs.unsigned_representatives()
        assert len(reps) == 6


class TestThermalState:
    def test_infinite_temperature(self):
        m = build_tfim(2)
        s = thermal_state(m, 0.0)
        assert np.allclose(s.matrix, np.eye(4) / 4)

    def test_two_level_analytic(self):
        from sysbath.models import HamiltonianModel
        m = HamiltonianModel(matrix=Z.copy(), label="z", sites=1, qubits=1)
        s = thermal_state(m, 1.0)
        zden = math.exp(-1) + math.exp(1)
        assert np.allclose(s.matrix, np.diag([math.exp(-1), math.exp(1)]) / zden)

    def test_populations_oracle(self):
        m = build_tfim(4, 1.0, 1.2)
        s = thermal_state(m, 1.0)
        w, v = np.linalg.eigh(m.matrix)
        pops = np.exp(-(w - w[0]))
        pops /= pops.sum()
        assert np.allclose(np.real(np.diag(v.conj().T @ s.matrix @ v)), pops, atol=1e-12)

    def test_commutes_with_hamiltonian(self):
        for beta in (0.5, 1.0, 5.0):
            m = build_tfim(3)
            s = thermal_state(m, beta)
            assert np.linalg.norm(m.matrix @ s.matrix - s.matrix @ m.matrix, 2) < 1e-9

    def test_energy_field(self):
        m = build_tfim(2)
        s = thermal_state(m, 1.0)
        assert abs(s.energy - np.trace(m.matrix @ s.matrix).real) < 1e-12

    def test_infinite_beta_routes_to_ground(self):
        m = build_tfim(2, 1.0, 1.2)
        assert np.allclose(thermal_state(m, math.inf).matrix, ground_state(m).matrix)

    def test_rejects_negative_beta(self):
        with pytest.raises(ValueError):
            thermal_state(build_tfim(2), -1.0)


class TestGroundState:
    def test_two_level(self):
        from sysbath.models import HamiltonianModel
        m = HamiltonianModel(matrix=Z.copy(), label="z", sites=1, qubits=1)
        s = ground_state(m)
        assert np.allclose(s.matrix, np.diag([0.0, 1.0]))
        assert abs(s.energy - (-1.0)) < 1e-12

    def test_degenerate_classical_ising(self):
        with pytest.raises(ValueError):
            ground_state(build_tfim(2, 1.0, 0.0))

    def test_degenerate_single_site_hubbard(self):
        # Spectrum {-1,-1,1,1}: the two half-filling-symmetric occupations tie.
        with pytest.raises(ValueError):
            ground_state(build_hubbard(1, 1.0, -4.0))

    def test_projector(self):
        m = build_tfim(2, 1.0, 1.2)
        s = ground_state(m)
        assert np.allclose(s.matrix @ s.matrix, s.matrix, atol=1e-12)
        assert abs(np.trace(s.matrix) - 1.0) < 1e-12
        assert abs(s.energy - (-2.6)) < 1e-12
