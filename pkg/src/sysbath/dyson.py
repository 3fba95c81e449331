"""Dyson-series operators G_k / F_k and the identities built from them.

The k-th order coefficients of the channel's Dyson expansion after bath
trace-out are ordered-simplex integrals

  G_k(w) = int_{-T < t_1 <= ... <= t_k < T} A(t_1) A+(t_2) ... S_{(-1)^(k-1)}(t_k)
           e^{-i w sum_p (-1)^p t_p} f(t_1) ... f(t_k) dt,

  F_k(w) = same region, pattern A+(t_1) A(t_2) ... S_{(-1)^k}(t_k),
           phase e^{+i w sum_p (-1)^p t_p},

with S_{+1} = A, S_{-1} = A+ and S(t) the Heisenberg picture e^{iHt} S e^{-iHt}.

Quadrature: iterated Gauss-Legendre with nested upper limits on the ordered
region.  In the H-eigenbasis A(t) is an elementwise phase pattern on A, so the
product over a simplex node tuple needs no matrix exponentials; the
omega-dependence enters only through a scalar phase per tuple, which lets one
tuple tensor serve every omega node via a single matrix product.

T = infinity operators (written G~ in the source papers' notation) are
truncated at T = 12 sigma; the profile tail contributes ~e^{-T^2/(4 sigma^2)}.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .channel import ChannelParams, gaussian_profile, profile_integral
from .models import CouplingSet, HamiltonianModel, thermal_state
from .operators import as_operator, expm_herm, herm_eig

MAX_ORDER = 3
MIN_NODES = 8
TINF_FACTOR = 12.0  # cutoff for the T = infinity operators, in units of sigma


def heisenberg(a, model: HamiltonianModel, t: float) -> np.ndarray:
    """e^{iHt} A e^{-iHt}."""
    u = expm_herm(model.matrix, -t)  # e^{iHt}
    return u @ as_operator(a) @ u.conj().T


def _simplex_rule(k: int, nodes: int, lo: float, hi: float):
    """Gauss-Legendre product rule on the ordered region lo < t_1 <= ... <= t_k < hi.

    Returns (ts, w): ts has shape (M, k) with columns t_1 .. t_k ascending,
    w the combined quadrature weights (M,).
    """
    x, gw = np.polynomial.legendre.leggauss(nodes)
    # Outermost variable t_k on [lo, hi]; each inner one on [lo, t_{p+1}].
    ts = (0.5 * (hi - lo) * x + 0.5 * (hi + lo))[:, None]
    w = gw * 0.5 * (hi - lo)
    for _ in range(k - 1):
        upper = ts[:, -1]
        half = 0.5 * (upper - lo)
        new_t = lo + half[:, None] * (x + 1.0)[None, :]  # (M, nodes)
        new_w = w[:, None] * (gw[None, :] * half[:, None])
        m, n = new_t.shape
        ts = np.concatenate(
            [np.repeat(ts, n, axis=0), new_t.reshape(m * n, 1)], axis=1
        )
        w = new_w.reshape(m * n)
    return ts[:, ::-1], w  # reorder columns to t_1 .. t_k


@dataclass
class SimplexTensor:
    """Omega-independent part of a Dyson operator on a simplex rule.

    The operator at frequency omega is
        V (sum_m w_m e^{i s omega phi_m} P_m) V+
    with P in the H-eigenbasis, phi_m = sum_p (-1)^p t_p of tuple m, and
    s = -1 for G-type, +1 for F-type terms.
    """

    prods: np.ndarray  # (M, d, d), eigenbasis operator products
    phase_coef: np.ndarray  # (M,)
    weights: np.ndarray  # (M,), simplex weights times profile factors
    basis: np.ndarray  # (d, d) eigenvector matrix V
    phase_sign: float  # -1 for G, +1 for F

    def evaluate(self, omegas) -> np.ndarray:
        """Operators at each omega; shape (n_omega, d, d), original basis."""
        omegas = np.atleast_1d(np.asarray(omegas, dtype=float))
        d = self.prods.shape[1]
        ph = np.exp(1j * self.phase_sign * np.outer(omegas, self.phase_coef))
        summed = (ph * self.weights) @ self.prods.reshape(-1, d * d)
        ops = summed.reshape(-1, d, d)
        return np.einsum("ij,wjk,lk->wil", self.basis, ops, self.basis.conj(),
                         optimize=True)


def _dyson_tensor(k: int, a, model: HamiltonianModel, sigma: float, T: float,
                  nodes: int, kind: str) -> SimplexTensor:
    if not 1 <= k <= MAX_ORDER:
        raise ValueError(f"order k={k} outside 1..{MAX_ORDER}")
    if nodes < MIN_NODES:
        raise ValueError(f"need at least {MIN_NODES} quadrature nodes per dimension")
    if kind not in ("G", "F"):
        raise ValueError("kind must be 'G' or 'F'")
    a = as_operator(a)
    eig = herm_eig(model.matrix)
    lam, v = eig.eigenvalues, eig.eigenvectors
    a_tilde = v.conj().T @ a @ v
    adag_tilde = a_tilde.conj().T

    ts, w = _simplex_rule(k, nodes, -T, T)
    m = ts.shape[0]
    wf = w * np.prod(gaussian_profile(ts, sigma), axis=1)
    signs = np.array([(-1.0) ** p for p in range(1, k + 1)])
    phase_coef = ts @ signs

    # Heisenberg factors in the eigenbasis: A(t) = exp(i lam t) * A~ * exp(-i lam t).
    prods = None
    for p in range(1, k + 1):
        if kind == "G":
            base = a_tilde if p % 2 == 1 else adag_tilde
        else:
            base = adag_tilde if p % 2 == 1 else a_tilde
        lp = np.exp(1j * np.outer(ts[:, p - 1], lam))  # (M, d)
        factor = lp[:, :, None] * base[None, :, :] * lp.conj()[:, None, :]
        prods = factor if prods is None else prods @ factor
    return SimplexTensor(
        prods=prods, phase_coef=phase_coef, weights=wf, basis=v,
        phase_sign=-1.0 if kind == "G" else +1.0,
    )


@dataclass(frozen=True)
class DysonTerm:
    k: int
    omega: float
    operator: np.ndarray
    T_cutoff: float
    quadrature: int  # nodes per dimension


def dyson_norm_bound(k: int, sigma: float) -> float:
    """Upper bound (int_{-inf}^{inf} f)^k / k! on ||G_k|| and ||F_k||."""
    return profile_integral(sigma) ** k / math.factorial(k)


def compute_G(k: int, a, model: HamiltonianModel, omega: float, sigma: float,
              T: float, nodes: int = 48) -> DysonTerm:
    if k == 0:
        return DysonTerm(0, omega, np.eye(model.dim, dtype=complex), T, nodes)
    tensor = _dyson_tensor(k, a, model, sigma, T, nodes, "G")
    return DysonTerm(k, omega, tensor.evaluate(omega)[0], T, nodes)


def compute_F(k: int, a, model: HamiltonianModel, omega: float, sigma: float,
              T: float, nodes: int = 48) -> DysonTerm:
    if k == 0:
        return DysonTerm(0, omega, np.eye(model.dim, dtype=complex), T, nodes)
    tensor = _dyson_tensor(k, a, model, sigma, T, nodes, "F")
    return DysonTerm(k, omega, tensor.evaluate(omega)[0], T, nodes)


def _gamma_split_rule(beta: float, omega_interval, omega_nodes: int):
    """Quadrature for integrals against gamma(w) = (g(w)+g(-w))/(1+e^{beta w}).

    With g uniform on [a, b] (a >= 0), an integral over the whole line against
    gamma(w) X(w) becomes sum over positive nodes w of
    g-weight * [X(w)/(1+e^{beta w}) + X(-w)/(1+e^{-beta w})].  Returns the
    signed node list (+w then -w per positive node) and matching weights.
    """
    lo, hi = omega_interval
    x, gw = np.polynomial.legendre.leggauss(omega_nodes)
    om = 0.5 * (hi - lo) * x + 0.5 * (hi + lo)
    g_weight = gw * 0.5 * (hi - lo) / (hi - lo)
    if math.isinf(beta):
        plus = np.zeros_like(om)
        minus = np.ones_like(om)
    else:
        plus = 1.0 / (1.0 + np.exp(beta * om))
        minus = 1.0 / (1.0 + np.exp(-beta * om))
    omegas = np.concatenate([om, -om])
    weights = np.concatenate([g_weight * plus, g_weight * minus])
    return omegas, weights


_ORDER2_CACHE: dict = {}


def _order2_operators(params: ChannelParams, model: HamiltonianModel, nodes: int):
    """Per-representative gamma-weighted pieces of the order-alpha^2 correction."""
    import hashlib

    h = hashlib.sha1()
    h.update(model.matrix.tobytes())
    for a in params.coupling.members:
        h.update(np.asarray(a).tobytes())
    h.update(repr((params.sigma, params.T, params.beta, params.omega_interval,
                   params.omega_nodes, nodes)).encode())
    key = h.hexdigest()
    if key in _ORDER2_CACHE:
        return _ORDER2_CACHE[key]

    omegas, gamma_w = _gamma_split_rule(params.beta, params.omega_interval,
                                        params.omega_nodes)
    reps = params.coupling.unsigned_representatives()
    pieces = []
    for a in reps:
        g1 = _dyson_tensor(1, a, model, params.sigma, params.T, nodes, "G").evaluate(omegas)
        g2 = _dyson_tensor(2, a, model, params.sigma, params.T, nodes, "G").evaluate(omegas)
        # k = 0 and k = 2 terms collapse to fixed left/right factors.
        left = np.einsum("w,wij->ji", gamma_w, g2.conj())  # int gamma G2+(w) dw
        right = np.einsum("w,wij->ij", gamma_w, g2)  # int gamma G2(w) dw
        pieces.append((left, right, g1, gamma_w))
    _ORDER2_CACHE[key] = pieces
    return pieces


def dyson_channel_order2(rho, params: ChannelParams, model: HamiltonianModel,
                         nodes: int = 96) -> np.ndarray:
    """Order-alpha^2 truncation of the channel in three-step form.

    rho' = U_S(T) [rho_1 + alpha^2 E_A sum_k (-1)^(1+k)
                   int gamma(w) G+_{2-k} rho_1 G_k dw] U_S+(T),
    with rho_1 = U_S(T) rho U_S+(T) and the G_k on the same finite window
    [-T, T] as the exact channel, so the difference from the exact channel is
    the genuine O(alpha^4) Dyson remainder.
    """
    rho = as_operator(rho)
    u_half = expm_herm(model.matrix, params.T)  # U_S(T)
    rho1 = u_half @ rho @ u_half.conj().T
    corr = np.zeros_like(rho1)
    pieces = _order2_operators(params, model, nodes)
    for left, right, g1, gamma_w in pieces:
        # signs (-1)^(1+k): k=0 -> -, k=1 -> +, k=2 -> -.
        corr -= left @ rho1
        corr += np.einsum("w,wji,jk,wkl->il", gamma_w, g1.conj(), rho1, g1,
                          optimize=True)
        corr -= rho1 @ right
    corr /= len(pieces)
    out = rho1 + params.alpha**2 * corr
    return u_half @ out @ u_half.conj().T


def avoid_db_residual(model: HamiltonianModel, coupling: CouplingSet, beta: float,
                      sigma: float, nodes: int = 160, omega_interval=(0.0, 5.0),
                      omega_nodes: int = 64, corrupt_gamma: bool = False) -> float:
    """Spectral norm of the n = 1 coefficient of the trace-preservation identity

        E_A sum_{k=0}^{2} (-1)^k int gamma((-1)^k w) G~+_{2-k}(w) G~_k(w) dw,

    which vanishes exactly; the returned value is pure quadrature error.
    corrupt_gamma flips the sign of the odd-k term (negative control: the
    cancellation then fails by construction).
    """
    T = TINF_FACTOR * sigma
    omegas, gamma_w = _gamma_split_rule(beta, omega_interval, omega_nodes)
    # gamma(-w) weights: swap the thermal factors between +w and -w nodes.
    n = len(omegas) // 2
    gamma_w_neg = np.concatenate([gamma_w[n:], gamma_w[:n]])

    reps = coupling.unsigned_representatives()
    total = np.zeros((model.dim, model.dim), dtype=complex)
    for a in reps:
        g1 = _dyson_tensor(1, a, model, sigma, T, nodes, "G").evaluate(omegas)
        g2 = _dyson_tensor(2, a, model, sigma, T, nodes, "G").evaluate(omegas)
        term_even = (np.einsum("w,wij->ji", gamma_w, g2.conj())
                     + np.einsum("w,wij->ij", gamma_w, g2))  # k = 0 and k = 2
        term_odd = np.einsum("w,wji,wjl->il", gamma_w_neg, g1.conj(), g1)  # k = 1
        total += term_even + (term_odd if corrupt_gamma else -term_odd)
    total /= len(reps)
    return float(np.linalg.norm(total, 2))


def conjugation_identity_check(k: int, a, model: HamiltonianModel, omega: float,
                               beta: float, sigma: float, nodes: int = 144,
                               tau_max: float = 7.0) -> float:
    """Operator-norm discrepancy between the two sides of

        sigma_beta^{-1} G~_k+(w) sigma_beta
          = (2 sqrt(sigma))^k / (2 pi)^{k/4} *
            int_{tau_1 <= ... <= tau_k} [... A(2 sigma tau_2) A+(2 sigma tau_1)]
            exp(i 2 sigma w sum_p (-1)^p tau_p - w beta Lambda(k)
                - sum_p tau_p^2 + k beta^2/(4 sigma^2)
                - i (beta/sigma) sum_p tau_p) dtau,

    Lambda(k) = 0 for even k, -1 for odd k.  Both sides are evaluated by
    independent quadratures (time simplex on [-12 sigma, 12 sigma] vs. the
    Gaussian-weighted tau simplex).
    """
    if not 1 <= k <= 2:
        raise ValueError("conjugation check supports k in {1, 2}")
    a = as_operator(a)
    T = TINF_FACTOR * sigma

    sb = thermal_state(model, beta)
    w_pop = np.linalg.eigvalsh(sb.matrix)
    if w_pop.min() < 1e-14:
        raise ValueError("sigma_beta too ill-conditioned; use a more moderate beta")

    # Left side: direct triple product.
    gk = compute_G(k, a, model, omega, sigma, T, nodes).operator
    sb_inv = np.linalg.inv(sb.matrix)
    lhs = sb_inv @ gk.conj().T @ sb.matrix

    # Right side: shifted-variable integral.
    eig = herm_eig(model.matrix)
    lam, v = eig.eigenvalues, eig.eigenvectors
    a_tilde = v.conj().T @ a @ v
    adag_tilde = a_tilde.conj().T
    ts, wq = _simplex_rule(k, nodes, -tau_max, tau_max)
    signs = np.array([(-1.0) ** p for p in range(1, k + 1)])
    scalar = wq * np.exp(
        1j * 2 * sigma * omega * (ts @ signs)
        - omega * beta * (0.0 if k % 2 == 0 else -1.0)
        - np.sum(ts**2, axis=1)
        + k * beta**2 / (4 * sigma**2)
        - 1j * (beta / sigma) * np.sum(ts, axis=1)
    )
    # Operator pattern: position p carries S_{(-1)^p}(2 sigma tau_p) with the
    # p = k factor leftmost.
    prods = None
    for p in range(k, 0, -1):
        base = a_tilde if p % 2 == 0 else adag_tilde
        lp = np.exp(1j * 2 * sigma * np.outer(ts[:, p - 1], lam))
        factor = lp[:, :, None] * base[None, :, :] * lp.conj()[:, None, :]
        prods = factor if prods is None else prods @ factor
    d = model.dim
    summed = scalar @ prods.reshape(-1, d * d)
    pref = (2 * math.sqrt(sigma)) ** k / (2 * math.pi) ** (k / 4)
    rhs = pref * (v @ summed.reshape(d, d) @ v.conj().T)
    return float(np.linalg.norm(lhs - rhs, 2))


def multifourier_bound_check(n: int, alphas, sigma: float, nodes: int = 48,
                             span_factor: float = 10.0):
    """(lhs, rhs) of the ordered Fourier-integral bound

        |int_{s_n <= ... <= s_1} f(s_1)...f(s_n) e^{i sum alpha_k s_k} ds|
          <= (2 sigma sqrt(pi)/sqrt(n)) (2 sigma sqrt(n pi))^{n-1}/(n-1)!
             * exp(-sigma^2 (sum alpha_k)^2 / n).
    """
    alphas = np.asarray(alphas, dtype=float)
    if not 1 <= n <= MAX_ORDER:
        raise ValueError(f"n outside 1..{MAX_ORDER}")
    if alphas.shape != (n,):
        raise ValueError("alphas must have length n")
    span = span_factor * sigma
    ts, w = _simplex_rule(n, nodes, -span, span)
    # Columns are ascending u_1 <= ... <= u_n; the integrand indexes s_1 as
    # the outermost (largest) variable, so alpha_k pairs with column n - k.
    coeff = alphas[::-1]
    integrand = w * np.prod(gaussian_profile(ts, sigma), axis=1) * np.exp(
        1j * (ts @ coeff)
    )
    lhs = float(abs(integrand.sum()))
    rhs = float(
        (2 * sigma * math.sqrt(math.pi) / math.sqrt(n))
        * (2 * sigma * math.sqrt(n * math.pi)) ** (n - 1) / math.factorial(n - 1)
        * math.exp(-(sigma**2) * alphas.sum() ** 2 / n)
    )
    return lhs, rhs


def multifourier_n1_closed_form(alpha: float, sigma: float) -> float:
    """Exact |int f e^{i alpha s} ds| = 2^{3/4} pi^{1/4} sigma^{1/2} e^{-sigma^2 alpha^2}."""
    return 2**0.75 * math.pi**0.25 * math.sqrt(sigma) * math.exp(-(sigma * alpha) ** 2)


def thermal_residual_scaling(model: HamiltonianModel, beta: float, sigma_list,
                             c: float, coupling: CouplingSet,
                             omega_nodes: int = 64, dt_divisor: int = 100):
    """Fixed-point residual r = ||Phi(sigma_beta) - sigma_beta||_1 at
    alpha = c / sqrt(sigma) for each sigma; rows (sigma, alpha, r, r*sigma/alpha^2)."""
    from .channel import apply_channel_exact
    from .operators import trace_norm

    target = thermal_state(model, beta)
    rows = []
    for sigma in sigma_list:
        alpha = c / math.sqrt(sigma)
        params = ChannelParams(alpha=alpha, sigma=sigma, coupling=coupling,
                               beta=beta, omega_nodes=omega_nodes,
                               dt=sigma / dt_divisor)
        out = apply_channel_exact(target.matrix, params, model)
        r = trace_norm(out - target.matrix)
        scaled = r * sigma / alpha**2 if alpha > 0 else math.nan
        rows.append({"sigma": sigma, "alpha": alpha, "residual": r,
                     "scaled": scaled})
    return rows
