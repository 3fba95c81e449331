"""Spin-chain and fermionic Hamiltonians with their coupling sets and targets.

Three families:

  TFIM     H = -J sum_i Z_i Z_{i+1} - g sum_i X_i                (open boundary)
  Hubbard  H = -t sum_{j,s} (c+_{j,s} c_{j+1,s} + h.c.)
               + U sum_j (n_{j,up} - 1/2)(n_{j,dn} - 1/2)        (Jordan-Wigner)
  ANNNI    H = (J1/4) sum Z_i Z_{i+1} + (J2/4) sum Z_i Z_{i+2}
               - (Gamma/2) sum X_i

Fermionic modes are ordered m = 2*(j-1) + (0 for up, 1 for down) and realized
as c_m = (prod_{k<m} Z_k) (x) |0><1|_m; any consistent ordering gives a
unitarily equivalent Hamiltonian, but fixing one keeps regression values stable.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .operators import herm_eig, is_hermitian

I2 = np.eye(2, dtype=complex)
X = np.array([[0, 1], [1, 0]], dtype=complex)
Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
Z = np.array([[1, 0], [0, -1]], dtype=complex)
SIGMA_MINUS = np.array([[0, 1], [0, 0]], dtype=complex)  # (X + iY)/2 = |0><1|


@dataclass(frozen=True)
class HamiltonianModel:
    matrix: np.ndarray
    label: str
    sites: int  # lattice sites L
    qubits: int  # L for spins, 2L for Hubbard

    def __post_init__(self):
        if self.matrix.shape[0] != 2**self.qubits:
            raise ValueError("matrix dimension does not match qubit count")
        if not is_hermitian(self.matrix, 1e-12):
            raise ValueError("model Hamiltonian must be Hermitian within 1e-12")

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]


@dataclass(frozen=True)
class CouplingSet:
    members: tuple
    label: str

    def __post_init__(self):
        for a in self.members:
            if np.linalg.norm(a, 2) > 1 + 1e-12:
                raise ValueError("coupling operator norm exceeds 1")
        if not self.is_adjoint_closed() or not self.is_negation_closed():
            raise ValueError("coupling set must be closed under adjoint and negation")

    def _contains(self, m) -> bool:
        return any(np.allclose(a, m, atol=1e-12) for a in self.members)

    def is_adjoint_closed(self) -> bool:
        return all(self._contains(a.conj().T) for a in self.members)

    def is_negation_closed(self) -> bool:
        return all(self._contains(-a) for a in self.members)

    def unsigned_representatives(self):
        """One member per {A, -A} pair (the induced channels coincide)."""
        reps = []
        for a in self.members:
            if not any(np.allclose(-a, r, atol=1e-12) for r in reps):
                reps.append(a)
        return reps


@dataclass(frozen=True)
class TargetState:
    matrix: np.ndarray
    beta: float  # inverse temperature, math.inf for ground state
    energy: float  # Tr(H rho)


def _embed(op: np.ndarray, site: int, qubits: int) -> np.ndarray:
    """Single-qubit operator acting on `site` (0-based) of a qubit register."""
    out = np.eye(1, dtype=complex)
    for k in range(qubits):
        out = np.kron(out, op if k == site else I2)
    return out


def _two_site(op_a, site_a, op_b, site_b, qubits) -> np.ndarray:
    out = np.eye(1, dtype=complex)
    for k in range(qubits):
        if k == site_a:
            out = np.kron(out, op_a)
        elif k == site_b:
            out = np.kron(out, op_b)
        else:
            out = np.kron(out, I2)
    return out


def build_tfim(L: int, J: float = 1.0, g: float = 1.2) -> HamiltonianModel:
    if L < 1:
        raise ValueError("L must be >= 1")
    h = np.zeros((2**L, 2**L), dtype=complex)
    for i in range(L - 1):
        h -= J * _two_site(Z, i, Z, i + 1, L)
    for i in range(L):
        h -= g * _embed(X, i, L)
    return HamiltonianModel(matrix=h, label=f"tfim-{L}", sites=L, qubits=L)


def jordan_wigner_annihilation(mode: int, n_modes: int) -> np.ndarray:
    """c_m = (prod_{k<m} Z_k) (x) |0><1|_m (x) I."""
    out = np.eye(1, dtype=complex)
    for k in range(n_modes):
        if k < mode:
            out = np.kron(out, Z)
        elif k == mode:
            out = np.kron(out, SIGMA_MINUS)
        else:
            out = np.kron(out, I2)
    return out


def _hubbard_mode(j: int, spin: int) -> int:
    # site j is 1-based; spin 0 = up, 1 = down
    return 2 * (j - 1) + spin


def build_hubbard(L: int, t: float = 1.0, U: float = -4.0) -> HamiltonianModel:
    if L < 1:
        raise ValueError("L must be >= 1")
    n_modes = 2 * L
    dim = 2**n_modes
    c = [jordan_wigner_annihilation(m, n_modes) for m in range(n_modes)]
    h = np.zeros((dim, dim), dtype=complex)
    for j in range(1, L):
        for spin in (0, 1):
            m, mp = _hubbard_mode(j, spin), _hubbard_mode(j + 1, spin)
            hop = c[m].conj().T @ c[mp]
            h -= t * (hop + hop.conj().T)
    half = np.eye(dim) / 2
    for j in range(1, L + 1):
        n_up = c[_hubbard_mode(j, 0)].conj().T @ c[_hubbard_mode(j, 0)]
        n_dn = c[_hubbard_mode(j, 1)].conj().T @ c[_hubbard_mode(j, 1)]
        h += U * (n_up - half) @ (n_dn - half)
    return HamiltonianModel(matrix=h, label=f"hubbard-{L}", sites=L, qubits=n_modes)


def build_annni(L: int, J1: float = 2.0, J2: float = 0.6, Gamma: float = 0.2) -> HamiltonianModel:
    if L < 1:
        raise ValueError("L must be >= 1")
    h = np.zeros((2**L, 2**L), dtype=complex)
    for i in range(L - 1):
        h += (J1 / 4) * _two_site(Z, i, Z, i + 1, L)
    for i in range(L - 2):
        h += (J2 / 4) * _two_site(Z, i, Z, i + 2, L)
    for i in range(L):
        h -= (Gamma / 2) * _embed(X, i, L)
    return HamiltonianModel(matrix=h, label=f"annni-{L}", sites=L, qubits=L)


def pauli_coupling_set(L: int) -> CouplingSet:
    """{+-X_i, +-Y_i, +-Z_i : i = 1..L}, 6L members of unit operator norm."""
    if L < 1:
        raise ValueError("L must be >= 1")
    members = []
    for i in range(L):
        for p in (X, Y, Z):
            op = _embed(p, i, L)
            members.extend([op, -op])
    return CouplingSet(members=tuple(members), label=f"pauli-{L}")


def fermionic_coupling_set(L: int) -> CouplingSet:
    """{+-c_{j,s}, +-c+_{j,s}}, 8L members (Jordan-Wigner strings have norm 1)."""
    if L < 1:
        raise ValueError("L must be >= 1")
    members = []
    for m in range(2 * L):
        c = jordan_wigner_annihilation(m, 2 * L)
        members.extend([c, -c, c.conj().T, -c.conj().T])
    return CouplingSet(members=tuple(members), label=f"fermionic-{L}")


def thermal_state(model: HamiltonianModel, beta: float) -> TargetState:
    """Gibbs state exp(-beta H)/Z, computed with a max-eigenvalue shift.

    beta = inf is routed to ground_state to avoid overflow paths.
    """
    if beta < 0:
        raise ValueError("beta must be >= 0")
    if math.isinf(beta):
        return ground_state(model)
    eig = herm_eig(model.matrix)
    w = np.exp(-beta * (eig.eigenvalues - eig.eigenvalues.min()))
    w /= w.sum()
    v = eig.eigenvectors
    rho = (v * w) @ v.conj().T
    energy = float(np.dot(w, eig.eigenvalues))
    return TargetState(matrix=rho, beta=beta, energy=energy)


def ground_state(model: HamiltonianModel, degeneracy_tol: float = 1e-10) -> TargetState:
    eig = herm_eig(model.matrix)
    if eig.eigenvalues[1] - eig.eigenvalues[0] < degeneracy_tol:
        raise ValueError(
            f"ground state of {model.label} is degenerate "
            f"(splitting {eig.eigenvalues[1] - eig.eigenvalues[0]:.3e})"
        )
    psi = eig.eigenvectors[:, 0]
    return TargetState(
        matrix=np.outer(psi, psi.conj()),
        beta=math.inf,
        energy=float(eig.eigenvalues[0]),
    )


def number_operator(L: int) -> np.ndarray:
    """Total particle number N = sum_{j,s} n_{j,s} for the Hubbard chain."""
    n_modes = 2 * L
    dim = 2**n_modes
    n = np.zeros((dim, dim), dtype=complex)
    for m in range(n_modes):
        c = jordan_wigner_annihilation(m, n_modes)
        n += c.conj().T @ c
    return n
