"""The discrete system-bath interaction channel.

One channel application jointly evolves the system with a freshly prepared
single-qubit bath over [-T, T] under

    H(t) = H (x) I  +  I (x) H_E  +  alpha f(t) (A (x) B_E + A+ (x) B_E+),

with H_E = -omega Z/2, B_E = |1><0|, and Gaussian profile
f(t) = (2 pi)^(-1/4) sigma^(-1/2) exp(-t^2 / (4 sigma^2)), then traces the
bath out and averages over the coupling operator A (uniform over the coupling
set) and the bath frequency omega (density g, uniform on an interval).

Exact evaluation never forms the averaged map by propagating density matrices:
for each (A, omega) branch the bath trace-out of U (rho (x) rho_E) U+ is a
four-operator Kraus map whose operators are the d x d blocks <b|U|e> of the
joint unitary.  The exact channel is the weighted Kraus sum over coupling
representatives and Gauss-Legendre omega nodes; superoperator and Choi
representations reuse the same assembly.  Branches for A and -A induce the
same map (U_{-A} = (I (x) Z) U_A (I (x) Z) flips Kraus-block signs only), so
only one representative per {A, -A} pair is propagated.
"""

from __future__ import annotations

import hashlib
import math
from dataclasses import dataclass

import numpy as np

from .models import CouplingSet, HamiltonianModel, TargetState, Z, thermal_state
from .operators import as_operator, fidelity

MAX_STEPS = 10**7

E0 = np.array([1.0, 0.0], dtype=complex)
B_ENV = np.array([[0, 0], [1, 0]], dtype=complex)  # |1><0|


def gaussian_profile(t, sigma: float):
    """f(t) = (2 pi)^(-1/4) sigma^(-1/2) exp(-t^2/(4 sigma^2))."""
    if sigma <= 0:
        raise ValueError("sigma must be positive")
    return (2 * np.pi) ** -0.25 * sigma**-0.5 * np.exp(-np.asarray(t) ** 2 / (4 * sigma**2))


def profile_integral(sigma: float) -> float:
    """Closed form of the full-line integral of f."""
    return 2**0.75 * np.pi**0.25 * sigma**0.5


@dataclass(frozen=True)
class ChannelParams:
    alpha: float
    sigma: float
    coupling: CouplingSet
    beta: float = 1.0
    T: float | None = None  # default 5 sigma
    omega_interval: tuple = (0.0, 5.0)
    dt: float | None = None  # default sigma / 100
    omega_nodes: int = 64
    bath_init: str | None = None  # "thermal" | "ground"; default by beta
    allow_short_T: bool = False

    def __post_init__(self):
        if self.alpha < 0 or self.sigma <= 0:
            raise ValueError("need alpha >= 0 and sigma > 0")
        if self.T is None:
            object.__setattr__(self, "T", 5.0 * self.sigma)
        if self.T < 5.0 * self.sigma and not self.allow_short_T:
            raise ValueError("T < 5 sigma; pass allow_short_T=True to override")
        if self.dt is None:
            object.__setattr__(self, "dt", self.sigma / 100.0)
        if self.dt > self.sigma / 50.0:
            raise ValueError("dt must be <= sigma/50")
        if self.omega_interval[1] <= self.omega_interval[0] or self.omega_interval[0] < 0:
            raise ValueError("omega interval must satisfy 0 <= a < b")
        if self.bath_init is None:
            init = "ground" if math.isinf(self.beta) else "thermal"
            object.__setattr__(self, "bath_init", init)
        if self.bath_init not in ("thermal", "ground"):
            raise ValueError("bath_init must be 'thermal' or 'ground'")
        if self.omega_nodes < 1:
            raise ValueError("omega_nodes must be >= 1")

    def n_steps(self) -> int:
        n = int(round(2 * self.T / self.dt))
        if n > MAX_STEPS:
            raise ValueError(f"step count {n} exceeds {MAX_STEPS}")
        return max(n, 1)


@dataclass(frozen=True)
class BathSpec:
    """Single-qubit bath at frequency omega: H_E = -omega Z/2, B_E = |1><0|."""

    omega: float
    beta: float = math.inf
    bath_init: str = "ground"

    @property
    def h_env(self) -> np.ndarray:
        return -self.omega * Z / 2

    @property
    def b_env(self) -> np.ndarray:
        return B_ENV

    @property
    def rho_env(self) -> np.ndarray:
        return np.diag(self.populations()).astype(complex)

    def populations(self) -> np.ndarray:
        """Occupations of |0> (energy -omega/2) and |1> (energy +omega/2)."""
        if self.bath_init == "ground":
            return np.array([1.0, 0.0])
        if math.isinf(self.beta):
            return np.array([1.0, 0.0]) if self.omega > 0 else np.array([0.5, 0.5])
        w = math.exp(-self.beta * self.omega)
        return np.array([1.0, w]) / (1.0 + w)


def joint_hamiltonian(model: HamiltonianModel, a, bath: BathSpec, t: float,
                      alpha: float, sigma: float) -> np.ndarray:
    a = as_operator(a)
    d = model.dim
    v = np.kron(a, bath.b_env) + np.kron(a.conj().T, bath.b_env.conj().T)
    h = np.kron(model.matrix, np.eye(2)) + np.kron(np.eye(d), bath.h_env)
    return h + alpha * float(gaussian_profile(t, sigma)) * v


def _midpoint_grid(params: ChannelParams):
    n = params.n_steps()
    dt = 2 * params.T / n
    t_mid = -params.T + (np.arange(n) + 0.5) * dt
    return t_mid, dt


def _propagate_batch(h0: np.ndarray, v: np.ndarray, coeffs: np.ndarray, dt: float) -> np.ndarray:
    """Midpoint-exponential stepping for a batch of branches.

    h0, v: (B, n, n) Hermitian stacks; coeffs: per-step interaction prefactor
    (shared across the batch).  Returns the stacked unitaries U(T).
    """
    b, n = h0.shape[0], h0.shape[1]
    u = np.broadcast_to(np.eye(n, dtype=complex), (b, n, n)).copy()
    for c in coeffs:
        w, vec = np.linalg.eigh(h0 + c * v)
        step = (vec * np.exp(-1j * dt * w)[:, None, :]) @ vec.conj().swapaxes(1, 2)
        u = step @ u
    return u


def propagate_joint(params: ChannelParams, model: HamiltonianModel, a,
                    bath: BathSpec) -> np.ndarray:
    """Joint unitary U(T) for one (A, omega) branch."""
    a = as_operator(a)
    d = model.dim
    h0 = np.kron(model.matrix, np.eye(2)) + np.kron(np.eye(d), bath.h_env)
    v = np.kron(a, bath.b_env) + np.kron(a.conj().T, bath.b_env.conj().T)
    t_mid, dt = _midpoint_grid(params)
    coeffs = params.alpha * gaussian_profile(t_mid, params.sigma)
    return _propagate_batch(h0[None], v[None], coeffs, dt)[0]


def _omega_rule(params: ChannelParams):
    """Gauss-Legendre nodes/weights for the uniform density g on [a, b]."""
    lo, hi = params.omega_interval
    x, w = np.polynomial.legendre.leggauss(params.omega_nodes)
    nodes = 0.5 * (hi - lo) * x + 0.5 * (hi + lo)
    weights = w * 0.5 * (hi - lo) / (hi - lo)  # GL weight times density 1/(b-a)
    return nodes, weights


def _kraus_blocks(u: np.ndarray, d: int) -> np.ndarray:
    """All four <b|U|e> blocks of a joint unitary, indexed [b, e]."""
    return u.reshape(d, 2, d, 2).transpose(1, 3, 0, 2)


@dataclass
class AssembledChannel:
    """Exact channel as a weighted Kraus sum; reused by superop and Choi."""

    kraus: np.ndarray  # (N, d, d)
    weights: np.ndarray  # (N,) nonnegative, sum 1 via sum_n w_n K+K = I
    params: ChannelParams
    model: HamiltonianModel

    @property
    def dim(self) -> int:
        return self.kraus.shape[1]

    def apply(self, rho: np.ndarray) -> np.ndarray:
        rho = as_operator(rho)
        return np.einsum("n,nij,jk,nlk->il", self.weights, self.kraus, rho,
                         self.kraus.conj(), optimize=True)

    def superoperator(self) -> np.ndarray:
        """Column-stacking representation: sum_n w_n conj(K_n) (x) K_n."""
        d = self.dim
        s = np.einsum("n,nkl,nij->kilj", self.weights, self.kraus.conj(), self.kraus,
                      optimize=True)
        return s.reshape(d * d, d * d)

    def choi(self) -> np.ndarray:
        """C = sum_ij E_ij (x) Phi(E_ij)."""
        d = self.dim
        c = np.einsum("n,nki,nlj->ikjl", self.weights, self.kraus, self.kraus.conj(),
                      optimize=True)
        return c.reshape(d * d, d * d)


_ASSEMBLY_CACHE: dict = {}


def _assembly_key(params: ChannelParams, model: HamiltonianModel) -> str:
    h = hashlib.sha1()
    h.update(model.matrix.tobytes())
    for a in params.coupling.members:
        h.update(np.asarray(a).tobytes())
    meta = (params.alpha, params.sigma, params.T, params.beta, params.omega_interval,
            params.dt, params.omega_nodes, params.bath_init)
    h.update(repr(meta).encode())
    return h.hexdigest()


def assemble_exact_channel(params: ChannelParams, model: HamiltonianModel) -> AssembledChannel:
    key = _assembly_key(params, model)
    cached = _ASSEMBLY_CACHE.get(key)
    if cached is not None:
        return cached

    d = model.dim
    reps = params.coupling.unsigned_representatives()
    rep_weight = 2.0 / len(params.coupling.members)  # each rep covers {A, -A}
    omegas, om_weights = _omega_rule(params)
    t_mid, dt = _midpoint_grid(params)
    coeffs = params.alpha * gaussian_profile(t_mid, params.sigma)

    h_sys = np.kron(model.matrix, np.eye(2))
    zz = np.kron(np.eye(d), Z)
    # Branch stack: all (representative, omega node) pairs at once.
    h0 = np.stack([h_sys - 0.5 * om * zz for _ in reps for om in omegas])
    v = np.stack([
        np.kron(a, B_ENV) + np.kron(np.asarray(a).conj().T, B_ENV.conj().T)
        for a in reps for _ in omegas
    ])
    u = _propagate_batch(h0, v, coeffs, dt)

    kraus, weights = [], []
    idx = 0
    for _ in reps:
        for om, ow in zip(omegas, om_weights):
            blocks = _kraus_blocks(u[idx], d)
            pops = BathSpec(om, params.beta, params.bath_init).populations()
            for e in (0, 1):
                if pops[e] == 0.0:
                    continue
                for b in (0, 1):
                    kraus.append(blocks[b, e])
                    weights.append(rep_weight * ow * pops[e])
            idx += 1
    assembled = AssembledChannel(
        kraus=np.array(kraus), weights=np.array(weights), params=params, model=model
    )
    _ASSEMBLY_CACHE[key] = assembled
    return assembled


def apply_channel_exact(rho, params: ChannelParams, model: HamiltonianModel) -> np.ndarray:
    """Full coupling-set average and omega quadrature of one channel step.

    The map is linear and is applied as such; inputs are not required to be
    density matrices (Hermiticity/positivity checks live in the callers that
    need them).
    """
    return assemble_exact_channel(params, model).apply(rho)


@dataclass(frozen=True)
class ChannelDraw:
    a_index: int  # index into the full signed coupling list
    omega: float


def _draw_branch(params: ChannelParams, rng: np.random.Generator) -> ChannelDraw:
    idx = int(rng.integers(len(params.coupling.members)))
    lo, hi = params.omega_interval
    return ChannelDraw(a_index=idx, omega=float(rng.uniform(lo, hi)))


def apply_channel_sampled(rho, params: ChannelParams, model: HamiltonianModel,
                          rng: np.random.Generator):
    """One channel step with a single (A, omega) draw; returns (rho', draw)."""
    rho = as_operator(rho)
    draw = _draw_branch(params, rng)
    a = params.coupling.members[draw.a_index]
    bath = BathSpec(draw.omega, params.beta, params.bath_init)
    u = propagate_joint(params, model, a, bath)
    blocks = _kraus_blocks(u, model.dim)
    pops = bath.populations()
    out = np.zeros_like(rho)
    for e in (0, 1):
        if pops[e] == 0.0:
            continue
        for b in (0, 1):
            k = blocks[b, e]
            out += pops[e] * k @ rho @ k.conj().T
    return out, draw


def trajectory_pure(psi, params: ChannelParams, model: HamiltonianModel,
                    rng: np.random.Generator):
    """One stochastic pure-state step: evolve psi (x) |0>, measure the bath
    qubit projectively, renormalize.  Requires bath_init = ground."""
    if params.bath_init != "ground":
        raise ValueError("pure trajectories require bath_init='ground'")
    psi = np.asarray(psi, dtype=complex)
    draw = _draw_branch(params, rng)
    a = params.coupling.members[draw.a_index]
    bath = BathSpec(draw.omega, params.beta, "ground")
    u = propagate_joint(params, model, a, bath)
    phi = (u @ np.kron(psi, E0)).reshape(model.dim, 2)
    p1 = float(np.linalg.norm(phi[:, 1]) ** 2)
    outcome = 1 if rng.random() < p1 else 0
    p = p1 if outcome == 1 else 1.0 - p1
    if p < 1e-14:
        raise RuntimeError("measurement branch probability below 1e-14")
    return phi[:, outcome] / math.sqrt(p), outcome, draw


def average_pure_trajectories(psi, params: ChannelParams, model: HamiltonianModel,
                              n_traj: int, rng: np.random.Generator,
                              batch: int = 512):
    """Mean post-step density matrix of n_traj one-step pure trajectories.

    Propagates sampled branches in stacked batches (the per-branch unitaries
    dominate the cost); draw-for-draw equivalent to looping trajectory_pure.
    """
    if params.bath_init != "ground":
        raise ValueError("pure trajectories require bath_init='ground'")
    psi = np.asarray(psi, dtype=complex)
    d = model.dim
    t_mid, dt = _midpoint_grid(params)
    coeffs = params.alpha * gaussian_profile(t_mid, params.sigma)
    h_sys = np.kron(model.matrix, np.eye(2))
    zz = np.kron(np.eye(d), Z)
    mean = np.zeros((d, d), dtype=complex)
    done = 0
    while done < n_traj:
        m = min(batch, n_traj - done)
        # Interleave draw/coin exactly as the single-trajectory loop would, so
        # a shared seed gives identical trajectories either way.
        draws, coins = [], []
        for _ in range(m):
            draws.append(_draw_branch(params, rng))
            coins.append(rng.random())
        coins = np.asarray(coins)
        h0 = np.stack([h_sys - 0.5 * dr.omega * zz for dr in draws])
        v = np.stack([
            np.kron(params.coupling.members[dr.a_index], B_ENV)
            + np.kron(np.asarray(params.coupling.members[dr.a_index]).conj().T,
                      B_ENV.conj().T)
            for dr in draws
        ])
        u = _propagate_batch(h0, v, coeffs, dt)
        phi = (u @ np.kron(psi, E0)).reshape(m, d, 2)
        p1 = np.linalg.norm(phi[:, :, 1], axis=1) ** 2
        for i in range(m):
            outcome = 1 if coins[i] < p1[i] else 0
            p = p1[i] if outcome == 1 else 1.0 - p1[i]
            if p < 1e-14:
                raise RuntimeError("measurement branch probability below 1e-14")
            vec = phi[i, :, outcome] / math.sqrt(p)
            mean += np.outer(vec, vec.conj())
        done += m
    return mean / n_traj


@dataclass
class TrajectoryRecord:
    """Per-iteration observables of a repeated-application run."""

    rows: list  # (iteration, fidelity, energy, trace, a_index, omega)
    mode: str
    seed: int | None
    params: ChannelParams

    def column(self, name: str) -> np.ndarray:
        idx = ["iteration", "fidelity", "energy", "trace", "a_index", "omega"].index(name)
        return np.array([r[idx] for r in self.rows])


def _observables(state, mode: str, model: HamiltonianModel, target: TargetState):
    if mode == "pure":
        psi = state
        fid = float(np.real(psi.conj() @ target.matrix @ psi))
        energy = float(np.real(psi.conj() @ model.matrix @ psi))
        tr = float(np.linalg.norm(psi) ** 2)
    else:
        fid = fidelity(state, target.matrix)
        energy = float(np.trace(model.matrix @ state).real)
        tr = float(np.trace(state).real)
    return fid, energy, tr


def run_iterations(initial, n_iter: int, mode: str, params: ChannelParams,
                   model: HamiltonianModel, seed: int | None = None,
                   target: TargetState | None = None) -> TrajectoryRecord:
    """Apply the channel n_iter times, recording fidelity/energy/trace.

    Row 0 holds the initial state's observables; sampled/pure rows record the
    drawn coupling index and omega of the step that produced them.
    """
    if n_iter < 0:
        raise ValueError("n_iter must be >= 0")
    if mode not in ("exact", "sampled", "pure"):
        raise ValueError(f"unknown mode {mode!r}")
    if target is None:
        target = thermal_state(model, params.beta)
    rng = np.random.default_rng(seed)
    state = np.asarray(initial, dtype=complex)
    if mode == "pure" and state.ndim != 1:
        raise ValueError("pure mode takes a state vector")
    if mode != "pure" and state.ndim != 2:
        raise ValueError("density-matrix modes take a square matrix")

    rows = []
    fid, energy, tr = _observables(state, mode, model, target)
    rows.append((0, fid, energy, tr, -1, math.nan))
    for it in range(1, n_iter + 1):
        if mode == "exact":
            state = apply_channel_exact(state, params, model)
            a_idx, om = -1, math.nan
        elif mode == "sampled":
            state, draw = apply_channel_sampled(state, params, model, rng)
            a_idx, om = draw.a_index, draw.omega
        else:
            state, _outcome, draw = trajectory_pure(state, params, model, rng)
            a_idx, om = draw.a_index, draw.omega
        fid, energy, tr = _observables(state, mode, model, target)
        if mode != "pure" and abs(tr - 1.0) > 1e-8:
            raise RuntimeError(f"trace drifted to {tr} at iteration {it}")
        rows.append((it, fid, energy, tr, a_idx, om))
    return TrajectoryRecord(rows=rows, mode=mode, seed=seed, params=params)


def clear_assembly_cache():
    _ASSEMBLY_CACHE.clear()
