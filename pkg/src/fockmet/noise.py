"""Open-system dynamics and closed-form error models.

Dense fixed-step Lindblad integration, the first-order perturbative
correction, the analytic noisy parity probability, and the lambda1/lambda2
toy model predicting precision versus photon number.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from .composite import DeviceParams
from .errors import ModelBreakdownError, StepSizeError
from .fockspace import HilbertSpec, LinearOp, MixedState
from .metrology import laguerre, parity_curve_ideal, sql_baselines


@dataclass(frozen=True)
class LindbladSpec:
    """Hamiltonian, jump operators with rates, and integration window."""

    hamiltonian: LinearOp
    jumps: list[tuple[LinearOp, float]]
    duration: float
    dt: float

    def __post_init__(self):
        if any(rate < 0 for _, rate in self.jumps):
            raise ValueError("jump rates must be non-negative")
        if self.dt <= 0 or self.dt > self.duration:
            raise ValueError("need 0 < dt <= duration")


def _spectral_scale(spec: LindbladSpec) -> float:
    h_norm = float(np.linalg.norm(spec.hamiltonian.matrix, 2))
    max_rate = max((rate for _, rate in spec.jumps), default=0.0)
    return max(h_norm, max_rate)


def _lindblad_rhs(rho: np.ndarray, h: np.ndarray, jumps) -> np.ndarray:
    out = -1j * (h @ rho - rho @ h)
    for l_mat, l_dag, ldl, rate in jumps:
        out += rate * (l_mat @ rho @ l_dag - 0.5 * (ldl @ rho + rho @ ldl))
    return out


def lindblad_evolve(rho: MixedState, spec: LindbladSpec) -> MixedState:
    """Fixed-step RK4 integration of the Lindblad master equation.

    Hermiticity is enforced by symmetrization each step; raises
    StepSizeError when dt * max(rate, |H|) >= 0.1.
    """
    if spec.dt * _spectral_scale(spec) >= 0.1:
        raise StepSizeError(
            f"dt = {spec.dt:.3e} too large for spectral scale {_spectral_scale(spec):.3e}"
        )
    h = spec.hamiltonian.matrix
    jumps = []
    for op, rate in spec.jumps:
        l_mat = op.matrix
        l_dag = l_mat.conj().T
        jumps.append((l_mat, l_dag, l_dag @ l_mat, rate))

    steps = int(round(spec.duration / spec.dt))
    dt = spec.duration / steps
    state = rho.matrix.copy()
    for _ in range(steps):
        k1 = _lindblad_rhs(state, h, jumps)
        k2 = _lindblad_rhs(state + 0.5 * dt * k1, h, jumps)
        k3 = _lindblad_rhs(state + 0.5 * dt * k2, h, jumps)
        k4 = _lindblad_rhs(state + dt * k3, h, jumps)
        state = state + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        state = 0.5 * (state + state.conj().T)
    return MixedState(state, rho.spec)


def unitary_evolution(rho0: MixedState, hamiltonian: LinearOp):
    """Return t -> exp(-iHt) rho0 exp(iHt) using one eigendecomposition of H."""
    evals, vecs = np.linalg.eigh(hamiltonian.matrix)
    rho_eig = vecs.conj().T @ rho0.matrix @ vecs

    def rho_of_t(t: float) -> np.ndarray:
        phases = np.exp(-1j * evals * t)
        rotated = (phases[:, None] * rho_eig) * phases.conj()[None, :]
        return vecs @ rotated @ vecs.conj().T

    return rho_of_t


def perturbation_first_order(
    rho0_of_t,
    hamiltonian: LinearOp,
    jumps: list[tuple[LinearOp, float]],
    T: float,
    num_points: int = 2001,
) -> np.ndarray:
    """First-order correction rho1(T) by Simpson quadrature.

    rho1(T) = int_0^T dtau sum_m exp(-iH(T-tau)) L_m(rho0(tau)) exp(iH(T-tau)).
    ``rho0_of_t`` maps a time to the unperturbed density matrix.  Warns when
    any kappa_m * T exceeds 0.3.  Returns the traceless correction matrix.
    """
    for _, rate in jumps:
        if rate * T > 0.3:
            warnings.warn(
                f"kappa*T = {rate * T:.3g} > 0.3; first-order expansion unreliable",
                stacklevel=2,
            )
    if num_points < 5:
        raise ValueError("num_points too small for Simpson quadrature")
    if num_points % 2 == 0:
        num_points += 1

    evals, vecs = np.linalg.eigh(hamiltonian.matrix)
    prepared = []
    for op, rate in jumps:
        l_mat = op.matrix
        l_dag = l_mat.conj().T
        prepared.append((l_mat, l_dag, l_dag @ l_mat, rate))

    taus = np.linspace(0.0, T, num_points)
    h_step = taus[1] - taus[0]
    weights = np.ones(num_points)
    weights[1:-1:2] = 4.0
    weights[2:-2:2] = 2.0
    weights *= h_step / 3.0

    dim = hamiltonian.spec.dim
    acc = np.zeros((dim, dim), dtype=complex)
    for tau, w in zip(taus, weights):
        rho0 = rho0_of_t(tau)
        dissipator = np.zeros_like(acc)
        for l_mat, l_dag, ldl, rate in prepared:
            dissipator += rate * (
                l_mat @ rho0 @ l_dag - 0.5 * (ldl @ rho0 + rho0 @ ldl)
            )
        # propagate forward by (T - tau) in the eigenbasis of H
        phases = np.exp(-1j * evals * (T - tau))
        in_eig = vecs.conj().T @ dissipator @ vecs
        acc += w * (vecs @ ((phases[:, None] * in_eig) * phases.conj()[None, :]) @ vecs.conj().T)
    return acc


def parity_prob_noisy(N: int, beta: float, params: DeviceParams) -> float:
    """Measured ground probability of the parity protocol with first-order noise.

    P_g = P_g0 + P_g1 where P_g0 is the ideal displaced-parity curve and
    P_g1 the closed-form first-order correction in kappa1, kappa3, kappa4
    over the measurement window.  L_{-1} is taken as 0 for N = 0.
    """
    if N < 0:
        raise ValueError("N must be non-negative")
    x = 4.0 * beta * beta
    t = params.T_M
    k1, k3, k4 = params.kappa1, params.kappa3, params.kappa4
    sign = (-1.0) ** N
    env = math.exp(-2.0 * beta * beta)
    l_n = laguerre(N, x)
    l_np1 = laguerre(N + 1, x)
    l_nm1 = laguerre(N - 1, x) if N >= 1 else 0.0
    p_g1 = sign * env * (
        (-k1 * t * (N / 4.0 + beta * beta / 2.0 - 0.25) - 0.25 * (k3 + k4) * t) * l_n
        - k1 * t * (N + 1) / 4.0 * l_np1
        - 0.25 * k1 * t * l_nm1
    )
    return parity_curve_ideal(N, beta) + p_g1


def displacement_dephasing_bias(N: int, beta: float, params: DeviceParams) -> float:
    """Probability shift from cavity dephasing during the displacement pulse:
    (1/3) kappa2 T_D beta^2 N^3.  Valid for N kappa2 T_D << 1 and N beta^2 << 1."""
    if N * params.kappa2 * params.T_D > 0.1 or N * beta * beta > 0.1:
        warnings.warn("displacement-dephasing bias outside its validity domain", stacklevel=2)
    return params.kappa2 * params.T_D * beta * beta * N**3 / 3.0


@dataclass(frozen=True)
class ToyModelResult:
    lambda1: float
    lambda2: float
    fisher: float
    precision: float
    gain_db: float


def toy_model(N: int, params: DeviceParams) -> ToyModelResult:
    """Perturbative precision prediction for the displacement protocol.

    lambda1 collects offset errors, lambda2 slope errors; the Fisher
    information is (1 - lambda2)^2 * 8N and the gain compares the
    resulting precision to the coherent-state baseline of 1/2.
    """
    if N < 1:
        raise ValueError("N must be >= 1")
    k1, k2, k3, k4 = params.kappa1, params.kappa2, params.kappa3, params.kappa4
    t_i, t_m, t_d = params.T_i, params.T_M, params.T_D
    lambda1 = N * k1 * t_i + 0.5 * N * k1 * t_m + 0.25 * (k3 + k4) * t_m
    lambda2 = (
        2.0 * N * k1 * t_i
        + N * k1 * t_m
        + 0.5 * (k3 + k4) * t_m
        + k2 * t_d * N * N / 6.0
    )
    if lambda2 >= 1.0:
        raise ModelBreakdownError(f"lambda2 = {lambda2:.3g} >= 1 at N = {N}")
    fisher = (1.0 - lambda2) ** 2 * 8.0 * N
    precision = 1.0 / math.sqrt(fisher)
    sql_beta, _ = sql_baselines(max(N, 1))
    gain_db = 20.0 * math.log10(sql_beta / precision)
    return ToyModelResult(lambda1, lambda2, fisher, precision, gain_db)


def init_fidelity_model(N: int, params: DeviceParams) -> float:
    """Decay-limited fidelity of the initialized Fock state: 1 - N kappa1 T_i."""
    loss = N * params.kappa1 * params.T_i
    if loss >= 1.0:
        raise ModelBreakdownError(f"N kappa1 T_i = {loss:.3g} >= 1")
    return 1.0 - loss


def qubit_cavity_parity_setup(
    N: int, beta: float, params: DeviceParams, spec: HilbertSpec
) -> tuple[MixedState, LinearOp, list[tuple[LinearOp, float]]]:
    """Initial state, Hamiltonian and jump set of the parity-measurement stage.

    Cavity in the displaced Fock state D(beta)|N>, qubit in |+>, evolving
    under chi_sim * n |e><e| with cavity decay/dephasing and qubit
    decay/dephasing jumps.  chi_sim = pi / T_M so the conditional phase
    reaches exactly pi over the measurement window, matching the
    closed-form noisy parity probability.
    """
    from .fockspace import displacement, fock_state, ladder_ops

    dim = spec.dim
    cav = displacement(beta, spec).apply(fock_state(N, spec))
    plus = np.array([1.0, 1.0]) / math.sqrt(2.0)
    psi = np.kron(plus, cav)
    cspec = HilbertSpec(2 * dim, spec.guard)
    rho = MixedState(np.outer(psi, psi.conj()), cspec)

    chi_sim = math.pi / params.T_M
    n_diag = np.arange(dim)
    h = np.zeros((2 * dim, 2 * dim), dtype=complex)
    h[dim:, dim:] = np.diag(chi_sim * n_diag)
    hamiltonian = LinearOp(h, cspec)

    lower, _ = ladder_ops(spec)
    eye2 = np.eye(2)
    a_full = np.kron(eye2, lower.matrix)
    n_full = np.kron(eye2, np.diag(n_diag).astype(complex))
    sig_minus = np.zeros((2, 2)); sig_minus[0, 1] = 1.0
    proj_e = np.zeros((2, 2)); proj_e[1, 1] = 1.0
    eye_c = np.eye(dim)
    jumps = [
        (LinearOp(a_full, cspec), params.kappa1),
        (LinearOp(n_full, cspec), params.kappa2),
        (LinearOp(np.kron(sig_minus, eye_c).astype(complex), cspec), params.kappa3),
        (LinearOp(np.kron(proj_e, eye_c).astype(complex), cspec), params.kappa4),
    ]
    return rho, hamiltonian, jumps


def parity_readout_probability(rho: MixedState) -> float:
    """Ground probability after the closing -X/2 pulse: <+| rho_qubit |+>."""
    dim = rho.spec.dim // 2
    m = rho.matrix
    rho_gg = np.trace(m[:dim, :dim])
    rho_ee = np.trace(m[dim:, dim:])
    rho_ge = np.trace(m[:dim, dim:])
    return float(np.real(0.5 * (rho_gg + rho_ee + rho_ge + np.conj(rho_ge))))
