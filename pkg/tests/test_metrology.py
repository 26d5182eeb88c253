"""Sensing curves, Fisher information and precision reporting."""

import math

import numpy as np
import pytest
from scipy.special import eval_genlaguerre, eval_laguerre

from fockmet import (
    Parameter,
    cfi_of_curve,
    coherent_state,
    default_spec,
    displacement_generator,
    fock_state,
    optimal_phase_displacement,
    parity_curve_ideal,
    phase_curve_ideal,
    phase_generator,
    precision_report,
    qfi_pure,
    sql_baselines,
    weighted_fisher,
)
from fockmet.metrology import (
    gain_db_from_fisher,
    gain_db_from_precision,
    laguerre,
    laguerre_deriv,
    maximize_fisher,
    parity_curve_deriv,
)


class TestLaguerre:
    def test_matches_scipy(self):
        for n in (0, 1, 2, 5, 20, 100):
            for x in (0.0, 0.3, 1.7, 10.0):
                assert laguerre(n, x) == pytest.approx(eval_laguerre(n, x), rel=1e-10, abs=1e-10)

    def test_deriv_matches_scipy(self):
        for n in (0, 1, 2, 5, 20):
            for x in (0.0, 0.3, 1.7, 10.0):
                expected = 0.0 if n == 0 else -eval_genlaguerre(n - 1, 1, x)
                assert laguerre_deriv(n, x) == pytest.approx(expected, rel=1e-10, abs=1e-10)

    def test_rejects_negative_order(self):
        with pytest.raises(ValueError):
            laguerre(-1, 0.0)


class TestParityCurve:
    def test_origin_value_alternates(self):
        for n in range(8):
            assert parity_curve_ideal(n, 0.0) == pytest.approx(1.0 if n % 2 == 0 else 0.0)

    def test_bounded(self):
        for n in (0, 3, 10, 41):
            for b in np.linspace(0, 2, 40):
                assert 0.0 <= parity_curve_ideal(n, float(b)) <= 1.0

    def test_deriv_matches_central_difference(self):
        h = 1e-6
        for n in (1, 4, 12):
            for b in (0.05, 0.3, 0.8):
                numeric = (parity_curve_ideal(n, b + h) - parity_curve_ideal(n, b - h)) / (2 * h)
                assert parity_curve_deriv(n, b) == pytest.approx(numeric, rel=1e-6, abs=1e-8)

    def test_phase_curve_is_rescaled_parity(self):
        assert phase_curve_ideal(5, 3.0, 0.1) == pytest.approx(parity_curve_ideal(5, 0.3))


class TestFisher:
    def test_cfi_degenerate_point_is_zero(self):
        # even-N curve saturates at P = 1 when beta = 0
        assert cfi_of_curve(lambda b: parity_curve_ideal(4, b), 0.0) == 0.0

    def test_cfi_numeric_matches_analytic_derivative(self):
        n, b = 3, 0.25
        analytic = cfi_of_curve(
            lambda x: parity_curve_ideal(n, x), b, lambda x: parity_curve_deriv(n, x)
        )
        numeric = cfi_of_curve(lambda x: parity_curve_ideal(n, x), b)
        assert numeric == pytest.approx(analytic, rel=1e-5)

    def test_qfi_coherent_displacement(self):
        spec = default_spec(4)
        st = coherent_state(1.5, spec)
        assert qfi_pure(displacement_generator(spec), st) == pytest.approx(4.0, abs=1e-9)

    def test_qfi_fock_displacement(self):
        spec = default_spec(12)
        st = fock_state(12, spec)
        assert qfi_pure(displacement_generator(spec), st) == pytest.approx(4 * 25, rel=1e-12)

    def test_qfi_fock_phase_is_zero(self):
        spec = default_spec(5)
        assert qfi_pure(phase_generator(spec), fock_state(5, spec)) == pytest.approx(0.0, abs=1e-9)

    def test_weighted_fisher_identity(self):
        pops = [(0, 0.2), (1, 0.3), (2, 0.5)]
        nbar = sum(n * p for n, p in pops)
        got = weighted_fisher(pops, lambda n: 4.0 * (2 * n + 1))
        assert got == pytest.approx(4 * (2 * nbar + 1))

    def test_weighted_fisher_requires_normalized(self):
        with pytest.raises(ValueError):
            weighted_fisher([(0, 0.5)], lambda n: 1.0)


class TestBaselinesAndGain:
    def test_sql_values(self):
        db, dphi = sql_baselines(25.0)
        assert db == 0.5
        assert dphi == pytest.approx(0.1)
        with pytest.raises(ValueError):
            sql_baselines(0.0)

    def test_gain_conventions_agree(self):
        # 20 log10 on precision equals 10 log10 on Fisher for matched quantities
        f, f_sql = 360.0, 4.0
        assert gain_db_from_fisher(f, f_sql) == pytest.approx(
            gain_db_from_precision(1 / math.sqrt(f_sql), 1 / math.sqrt(f))
        )

    def test_optimal_phase_displacement(self):
        assert optimal_phase_displacement(10) == pytest.approx(10.5)
        with pytest.raises(ValueError):
            optimal_phase_displacement(-1)


class TestMaximization:
    def test_finds_small_beta_plateau(self):
        n = 1
        f, arg = maximize_fisher(
            lambda b: parity_curve_ideal(n, b),
            1e-3,
            1.0,
            lambda b: parity_curve_deriv(n, b),
        )
        assert f == pytest.approx(4 * (2 * n + 1), rel=1e-2)
        assert arg < 0.1

    def test_precision_report_consistency(self):
        n = 2
        rep = precision_report(
            Parameter.BETA,
            lambda b: parity_curve_ideal(n, b),
            1e-3,
            1.0,
            sql_precision=0.5,
            dP=lambda b: parity_curve_deriv(n, b),
        )
        assert rep.precision == pytest.approx(1 / math.sqrt(rep.fisher_max))
        assert rep.gain_db == pytest.approx(20 * math.log10(0.5 / rep.precision))
