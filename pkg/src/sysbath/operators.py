"""Dense complex operator algebra.

Everything in this package lives in dense complex128 matrices of modest size
(joint dimension <= 2**10), so all linear algebra goes through numpy's dense
routines.  Hermitian exponentials and square roots are computed by
eigendecomposition, which keeps unitaries unitary to roundoff.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

HERM_TOL = 1e-10


def as_operator(a) -> np.ndarray:
    """Coerce input to a square complex matrix and validate finiteness."""
    a = np.asarray(a, dtype=complex)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError(f"operator must be square, got shape {a.shape}")
    if a.shape[0] < 1:
        raise ValueError("operator dimension must be >= 1")
    if not np.all(np.isfinite(a)):
        raise ValueError("operator contains NaN/Inf entries")
    return a


def is_hermitian(a, tol: float = HERM_TOL) -> bool:
    a = np.asarray(a)
    return bool(np.linalg.norm(a - a.conj().T, 2) <= tol * max(1.0, np.linalg.norm(a, 2)))


def is_unitary(a, tol: float = 1e-9) -> bool:
    a = np.asarray(a)
    return bool(np.linalg.norm(a.conj().T @ a - np.eye(a.shape[0]), 2) <= tol)


def is_density_matrix(a, tol: float = 1e-8) -> bool:
    a = np.asarray(a)
    if not is_hermitian(a, tol):
        return False
    if abs(np.trace(a).real - 1.0) > tol or abs(np.trace(a).imag) > tol:
        return False
    evals = np.linalg.eigvalsh((a + a.conj().T) / 2)
    return bool(evals.min() >= -tol)


def kron(a, b) -> np.ndarray:
    """Tensor product with (i,j)-block structure a[i,j] * b."""
    return np.kron(as_operator(a), as_operator(b))


def partial_trace_bath(joint, sys_dim: int) -> np.ndarray:
    """Trace out a single-qubit bath, ordering system (x) bath.

    Joint index is i*2 + b for system index i and bath index b; the result is
    sum_b joint[i*2+b, j*2+b].
    """
    joint = as_operator(joint)
    if joint.shape[0] != 2 * sys_dim:
        raise ValueError(
            f"joint dimension {joint.shape[0]} != 2 * sys_dim = {2 * sys_dim}"
        )
    return np.einsum("ibjb->ij", joint.reshape(sys_dim, 2, sys_dim, 2))


@dataclass(frozen=True)
class HermEigen:
    """Eigendecomposition of a Hermitian matrix, eigenvalues ascending."""

    eigenvalues: np.ndarray  # real, ascending
    eigenvectors: np.ndarray  # unitary, columns are eigenvectors

    def reconstruct(self) -> np.ndarray:
        v = self.eigenvectors
        return (v * self.eigenvalues) @ v.conj().T


def herm_eig(h) -> HermEigen:
    h = as_operator(h)
    if not is_hermitian(h):
        raise ValueError("herm_eig requires a Hermitian matrix (tol 1e-10)")
    evals, evecs = np.linalg.eigh(h)
    return HermEigen(eigenvalues=evals, eigenvectors=evecs)


def expm_herm(h, t: float) -> np.ndarray:
    """exp(-i t h) for Hermitian h, via eigendecomposition."""
    eig = herm_eig(h)
    v = eig.eigenvectors
    return (v * np.exp(-1j * t * eig.eigenvalues)) @ v.conj().T


def trace_norm(a) -> float:
    """Schatten 1-norm: sum of singular values."""
    return float(np.linalg.svd(as_operator(a), compute_uv=False).sum())


def _psd_sqrt(a: np.ndarray, clamp_tol: float = 1e-8) -> np.ndarray:
    """Square root of a PSD matrix; small negative eigenvalues are clamped.

    Iterated channel outputs accumulate eigenvalues of order -1e-12 or so;
    anything below -clamp_tol is a genuine positivity violation and an error.
    """
    evals, evecs = np.linalg.eigh(a)
    if evals.min() < -clamp_tol:
        raise ValueError(f"matrix not PSD: min eigenvalue {evals.min():.3e}")
    evals = np.clip(evals, 0.0, None)
    return (evecs * np.sqrt(evals)) @ evecs.conj().T


def fidelity(rho, sigma) -> float:
    """Uhlmann fidelity F(rho, sigma) = (Tr sqrt(sqrt(sigma) rho sqrt(sigma)))^2."""
    rho = as_operator(rho)
    sigma = as_operator(sigma)
    for name, m in (("rho", rho), ("sigma", sigma)):
        if not is_hermitian(m, 1e-8):
            raise ValueError(f"{name} is not Hermitian within 1e-8")
        if abs(np.trace(m) - 1.0) > 1e-8:
            raise ValueError(f"{name} does not have unit trace")
    sq = _psd_sqrt((sigma + sigma.conj().T) / 2)
    inner = _psd_sqrt(sq @ ((rho + rho.conj().T) / 2) @ sq)
    return float(np.trace(inner).real ** 2)


def trace_distance(rho, sigma) -> float:
    """(1/2) || rho - sigma ||_1."""
    return 0.5 * trace_norm(as_operator(rho) - as_operator(sigma))
