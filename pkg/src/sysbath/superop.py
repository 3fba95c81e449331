"""Superoperator form of the channel: spectrum, gap, fixed point, Choi matrix.

Vectorization is column-stacking: vec(rho) stacks columns, so a Kraus map
rho -> K rho K+ becomes conj(K) (x) K.  The spectral gap is 1 - |lambda_2|
with lambda_2 the second-largest-modulus eigenvalue, and the mixing estimate
is ln 2 / (-ln |lambda_2|), the iteration count that halves the distance to
the fixed point in the two-eigenvalue caricature.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .channel import ChannelParams, assemble_exact_channel
from .models import HamiltonianModel, TargetState
from .operators import fidelity, trace_distance, trace_norm

MAX_SUPEROP_DIM = 64
NON_MIXING_GAP = 1e-9


class NonUniqueFixedPointError(RuntimeError):
    """Eigenvalue 1 is degenerate: no unique fixed point to report."""


@dataclass
class SuperoperatorMatrix:
    d: int
    matrix: np.ndarray  # (d^2, d^2), column-stacking convention
    params: ChannelParams

    def apply(self, rho: np.ndarray) -> np.ndarray:
        vec = np.asarray(rho, dtype=complex).reshape(-1, order="F")
        return (self.matrix @ vec).reshape(self.d, self.d, order="F")


@dataclass
class SpectralReport:
    eigenvalues: np.ndarray  # sorted by descending modulus
    gap: float  # 1 - |lambda_2|
    fixed_point: np.ndarray
    residual: float  # ||Phi(rho_fix) - rho_fix||_1
    distance_to_target: tuple  # (trace distance, infidelity)
    mixing_estimate: float  # ln 2 / (-ln |lambda_2|)
    non_mixing: bool


def build_superoperator(params: ChannelParams, model: HamiltonianModel) -> SuperoperatorMatrix:
    if model.dim > MAX_SUPEROP_DIM:
        raise ValueError(
            f"superoperator for d={model.dim} exceeds the d<={MAX_SUPEROP_DIM} memory guard"
        )
    assembled = assemble_exact_channel(params, model)
    return SuperoperatorMatrix(d=model.dim, matrix=assembled.superoperator(), params=params)


def choi_matrix(params: ChannelParams, model: HamiltonianModel) -> np.ndarray:
    """Choi matrix sum_ij E_ij (x) Phi(E_ij); the channel is CP iff it is PSD."""
    return assemble_exact_channel(params, model).choi()


def spectral_report(s: SuperoperatorMatrix, target: TargetState) -> SpectralReport:
    evals, evecs = np.linalg.eig(s.matrix)
    order = np.argsort(-np.abs(evals))
    evals, evecs = evals[order], evecs[:, order]

    if abs(abs(evals[0]) - 1.0) > 1e-7:
        raise RuntimeError(f"leading eigenvalue modulus {abs(evals[0]):.2e} is not 1")
    lam2 = abs(evals[1])
    gap = 1.0 - lam2
    non_mixing = gap < NON_MIXING_GAP

    near_one = np.abs(evals - 1.0) < 1e-9
    if near_one.sum() > 1 and not non_mixing:
        raise NonUniqueFixedPointError(
            f"{int(near_one.sum())} eigenvalues within 1e-9 of 1"
        )

    # Fixed point: eigenvector nearest eigenvalue 1, Hermitized and normalized.
    k = int(np.argmin(np.abs(evals - 1.0)))
    mat = evecs[:, k].reshape(s.d, s.d, order="F")
    mat = (mat + mat.conj().T) / 2
    tr = np.trace(mat).real
    if abs(tr) < 1e-12:
        raise RuntimeError("fixed-point candidate is traceless")
    rho_fix = mat / tr
    residual = trace_norm(s.apply(rho_fix) - rho_fix)

    evals_fix = np.linalg.eigvalsh(rho_fix)
    if evals_fix.min() < -1e-7 and not non_mixing:
        raise RuntimeError(f"fixed point not PSD: min eigenvalue {evals_fix.min():.2e}")
    # Clamp negatives so the fidelity call accepts the state.  In the
    # non-mixing case the peripheral eigenspace is degenerate and the chosen
    # eigenvector is only a best-effort representative; project it to the
    # nearest state instead of erroring.
    if evals_fix.min() < 0:
        w, v = np.linalg.eigh(rho_fix)
        w = np.clip(w, 0, None)
        rho_fix = (v * (w / w.sum())) @ v.conj().T

    dist = (trace_distance(rho_fix, target.matrix),
            1.0 - fidelity(rho_fix, target.matrix))
    mixing = math.inf if lam2 >= 1.0 - 1e-15 else math.log(2) / (-math.log(lam2))
    return SpectralReport(
        eigenvalues=evals, gap=gap, fixed_point=rho_fix, residual=residual,
        distance_to_target=dist, mixing_estimate=mixing, non_mixing=non_mixing,
    )
