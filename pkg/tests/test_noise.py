"""Lindblad integrator, perturbative correction, and closed-form error models."""

import math

import numpy as np
import pytest
from scipy.linalg import expm

from fockmet import (
    DeviceParams,
    HilbertSpec,
    LindbladSpec,
    LinearOp,
    ModelBreakdownError,
    StepSizeError,
    coherent_state,
    default_spec,
    displacement_dephasing_bias,
    fock_state,
    init_fidelity_model,
    ladder_ops,
    lindblad_evolve,
    number_op,
    parity_prob_noisy,
    perturbation_first_order,
    toy_model,
)
from fockmet.metrology import parity_curve_ideal
from fockmet.noise import (
    parity_readout_probability,
    qubit_cavity_parity_setup,
    unitary_evolution,
)


def _scaled_params(scale: float) -> DeviceParams:
    base = DeviceParams()
    return DeviceParams(
        kappa1=base.kappa1 * scale,
        kappa2=base.kappa2 * scale,
        kappa3=base.kappa3 * scale,
        kappa4=base.kappa4 * scale,
    )


class TestLindbladEvolve:
    def test_amplitude_damping_of_coherent_state(self):
        spec = default_spec(1)
        rho = coherent_state(1.0, spec).to_mixed()
        zero_h = LinearOp(np.zeros((spec.dim, spec.dim)), spec)
        lower, _ = ladder_ops(spec)
        out = lindblad_evolve(
            rho, LindbladSpec(zero_h, [(lower, 1.0)], duration=0.5, dt=0.005)
        )
        nbar = float(np.real(np.trace(number_op(spec).matrix @ out.matrix)))
        assert nbar == pytest.approx(math.exp(-0.5), rel=1e-6)
        assert out.trace == pytest.approx(1.0, abs=1e-9)
        out.check_physical()

    def test_two_level_decay(self):
        spec = HilbertSpec(2)
        rho = fock_state(1, spec).to_mixed()
        zero_h = LinearOp(np.zeros((2, 2)), spec)
        lower, _ = ladder_ops(spec)
        out = lindblad_evolve(
            rho, LindbladSpec(zero_h, [(lower, 2.0)], duration=1.0, dt=0.01)
        )
        assert out.matrix[1, 1].real == pytest.approx(math.exp(-2.0), rel=1e-6)

    def test_dephasing_kills_coherences_only(self):
        spec = default_spec(1)
        rho = coherent_state(1.0, spec).to_mixed()
        zero_h = LinearOp(np.zeros((spec.dim, spec.dim)), spec)
        out = lindblad_evolve(
            rho, LindbladSpec(zero_h, [(number_op(spec), 1.0)], duration=0.4, dt=0.004)
        )
        assert np.allclose(np.diag(out.matrix), np.diag(rho.matrix), atol=1e-9)
        # |0><1| coherence decays as exp(-kappa t / 2)
        expected = rho.matrix[0, 1] * math.exp(-0.2)
        assert out.matrix[0, 1] == pytest.approx(expected, rel=1e-6)

    def test_step_size_guard(self):
        spec = HilbertSpec(2)
        zero_h = LinearOp(np.zeros((2, 2)), spec)
        lower, _ = ladder_ops(spec)
        with pytest.raises(StepSizeError):
            lindblad_evolve(
                fock_state(1, spec).to_mixed(),
                LindbladSpec(zero_h, [(lower, 100.0)], duration=1.0, dt=0.01),
            )

    def test_spec_validation(self):
        spec = HilbertSpec(2)
        zero_h = LinearOp(np.zeros((2, 2)), spec)
        lower, _ = ladder_ops(spec)
        with pytest.raises(ValueError):
            LindbladSpec(zero_h, [(lower, -1.0)], duration=1.0, dt=0.1)
        with pytest.raises(ValueError):
            LindbladSpec(zero_h, [(lower, 1.0)], duration=1.0, dt=0.0)


class TestUnitaryEvolution:
    def test_matches_expm(self):
        spec = HilbertSpec(8)
        h = number_op(spec)
        rho0 = coherent_state(1.0, default_spec(1)).to_mixed()
        # rebuild on the small spec
        amp = coherent_state(1.0, default_spec(1)).amplitudes[:8]
        amp = amp / np.linalg.norm(amp)
        rho0 = np.outer(amp, amp.conj())
        from fockmet import MixedState

        rho_of_t = unitary_evolution(MixedState(rho0, spec), h)
        t = 0.37
        u = expm(-1j * h.matrix * t)
        assert np.max(np.abs(rho_of_t(t) - u @ rho0 @ u.conj().T)) < 1e-12


class TestPerturbationFirstOrder:
    def test_correction_is_traceless_and_small(self):
        params = _scaled_params(0.02)
        spec = HilbertSpec(12, 0)
        rho, h, jumps = qubit_cavity_parity_setup(2, 0.2, params, spec)
        rho0_of_t = unitary_evolution(rho, h)
        rho1 = perturbation_first_order(rho0_of_t, h, jumps, params.T_M, num_points=501)
        assert abs(np.trace(rho1)) < 1e-10
        assert np.max(np.abs(rho1)) < 0.05

    def test_matches_integrator_at_small_rates(self):
        params = _scaled_params(0.02)
        spec = HilbertSpec(12, 0)
        rho, h, jumps = qubit_cavity_parity_setup(2, 0.2, params, spec)
        rho0_of_t = unitary_evolution(rho, h)
        rho1 = perturbation_first_order(rho0_of_t, h, jumps, params.T_M, num_points=501)
        evolved = lindblad_evolve(
            rho, LindbladSpec(h, jumps, duration=params.T_M, dt=params.T_M / 2000)
        )
        approx = rho0_of_t(params.T_M) + rho1
        assert np.max(np.abs(evolved.matrix - approx)) < 1e-5

    def test_warns_outside_validity(self):
        spec = HilbertSpec(4, 0)
        rho, h, jumps = qubit_cavity_parity_setup(1, 0.1, DeviceParams(), spec)
        strong = [(op, 1e6) for op, _ in jumps[:1]]
        rho0_of_t = unitary_evolution(rho, h)
        with pytest.warns(UserWarning):
            perturbation_first_order(rho0_of_t, h, strong, 1e-6, num_points=11)


class TestNoisyParity:
    def test_reduces_to_ideal_without_noise(self):
        params = DeviceParams(kappa1=0.0, kappa3=0.0, kappa4=0.0)
        for n, beta in ((0, 0.0), (3, 0.4), (8, 1.0)):
            assert parity_prob_noisy(n, beta, params) == pytest.approx(
                parity_curve_ideal(n, beta), abs=1e-14
            )

    def test_matches_full_simulation(self):
        params = _scaled_params(0.1)
        spec = HilbertSpec(16, 0)
        rho, h, jumps = qubit_cavity_parity_setup(4, 0.2, params, spec)
        evolved = lindblad_evolve(
            rho, LindbladSpec(h, jumps, duration=params.T_M, dt=params.T_M / 4000)
        )
        p_sim = parity_readout_probability(evolved)
        p_model = parity_prob_noisy(4, 0.2, params)
        assert abs(p_sim - p_model) < 5e-4


class TestClosedFormModels:
    def test_displacement_dephasing_bias_value(self):
        params = DeviceParams()
        n, beta = 4, 0.1
        expected = params.kappa2 * params.T_D * beta**2 * n**3 / 3.0
        assert displacement_dephasing_bias(n, beta, params) == pytest.approx(expected)

    def test_displacement_dephasing_bias_warns(self):
        params = DeviceParams()
        with pytest.warns(UserWarning):
            displacement_dephasing_bias(50, 0.5, params)

    def test_toy_model_lambdas(self):
        p = DeviceParams()
        r = toy_model(10, p)
        l1 = 10 * p.kappa1 * p.T_i + 5 * p.kappa1 * p.T_M + 0.25 * (p.kappa3 + p.kappa4) * p.T_M
        assert r.lambda1 == pytest.approx(l1)
        assert r.fisher == pytest.approx((1 - r.lambda2) ** 2 * 80)
        assert r.precision == pytest.approx(1 / math.sqrt(r.fisher))

    def test_toy_model_breakdown(self):
        with pytest.raises(ModelBreakdownError):
            toy_model(400, DeviceParams())
        with pytest.raises(ValueError):
            toy_model(0, DeviceParams())

    def test_init_fidelity(self):
        p = DeviceParams()
        assert init_fidelity_model(10, p) == pytest.approx(1 - 10 * p.kappa1 * p.T_i)
        with pytest.raises(ModelBreakdownError):
            init_fidelity_model(10**6, p)
