"""Closed-form sensing curves, Fisher information and precision reports.

Binary-outcome classical Fisher information, pure-state quantum Fisher
information, standard-quantum-limit baselines, metrological gain, and the
weighted Fisher information of the photon-number-resolved scheme.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .fockspace import HilbertSpec, LinearOp, PureState, ladder_ops, number_op

CLAMP_EPS = 1e-12
CENTRAL_DIFF_H = 1e-6


def laguerre(n: int, x: float) -> float:
    """Laguerre polynomial L_n(x) by the stable three-term recurrence."""
    if n < 0:
        raise ValueError("n must be non-negative")
    if n == 0:
        return 1.0
    prev, cur = 1.0, 1.0 - x
    for k in range(1, n):
        prev, cur = cur, ((2 * k + 1 - x) * cur - k * prev) / (k + 1)
    return cur


def laguerre_deriv(n: int, x: float) -> float:
    """d/dx L_n(x) = -L_{n-1}^{(1)}(x) via the associated-Laguerre recurrence."""
    if n == 0:
        return 0.0
    # L_k^{(1)} recurrence: (k+1) L_{k+1} = (2k+2-x) L_k - (k+1) L_{k-1}
    prev, cur = 1.0, 2.0 - x
    if n == 1:
        return -prev
    for k in range(1, n - 1):
        prev, cur = cur, ((2 * k + 2 - x) * cur - (k + 1) * prev) / (k + 1)
    return -cur


class GeneratorKind(enum.Enum):
    DISPLACEMENT_AMPLITUDE = "displacement_amplitude"
    PHASE_ROTATION = "phase_rotation"


@dataclass(frozen=True)
class Generator:
    """Hermitian interrogation generator: i(a^dag - a) or a^dag a."""

    kind: GeneratorKind
    operator: LinearOp


def displacement_generator(spec: HilbertSpec) -> Generator:
    lower, upper = ladder_ops(spec)
    return Generator(
        GeneratorKind.DISPLACEMENT_AMPLITUDE,
        LinearOp(1j * (upper.matrix - lower.matrix), spec),
    )


def phase_generator(spec: HilbertSpec) -> Generator:
    return Generator(GeneratorKind.PHASE_ROTATION, number_op(spec))


def parity_curve_ideal(N: int, beta: float) -> float:
    """Ideal parity-readout probability for a displaced Fock state:
    1/2 + 1/2 (-1)^N L_N(4 beta^2) exp(-2 beta^2)."""
    if N < 0:
        raise ValueError("N must be non-negative")
    x = 4.0 * beta * beta
    return 0.5 + 0.5 * (-1.0) ** N * laguerre(N, x) * math.exp(-2.0 * beta * beta)


def parity_curve_deriv(N: int, beta: float) -> float:
    """Analytic d/dbeta of the ideal parity curve."""
    x = 4.0 * beta * beta
    env = math.exp(-2.0 * beta * beta)
    return 0.5 * (-1.0) ** N * env * (
        laguerre_deriv(N, x) * 8.0 * beta - 4.0 * beta * laguerre(N, x)
    )


def phase_curve_ideal(N: int, gamma: float, phi: float) -> float:
    """Ideal phase-sensing curve: the parity curve at effective amplitude |phi*gamma|.

    Valid in the small-rotation regime where the phase acts as a
    displacement of the probe.
    """
    return parity_curve_ideal(N, abs(phi * gamma))


def cfi_of_curve(
    P: Callable[[float], float],
    lam: float,
    dP: Callable[[float], float] | None = None,
) -> float:
    """Binary-outcome classical Fisher information (dP/dlam)^2 / (P (1-P)).

    The derivative is central-difference with h = 1e-6 when not supplied.
    Returns 0 at degenerate points where P is clamped to (eps, 1-eps).
    """
    p = P(lam)
    if p <= CLAMP_EPS or p >= 1.0 - CLAMP_EPS:
        return 0.0
    if dP is None:
        slope = (P(lam + CENTRAL_DIFF_H) - P(lam - CENTRAL_DIFF_H)) / (2.0 * CENTRAL_DIFF_H)
    else:
        slope = dP(lam)
    return slope * slope / (p * (1.0 - p))


def qfi_pure(generator: Generator, state: PureState) -> float:
    """4 (<h^2> - <h>^2) for a pure probe state."""
    h_psi = generator.operator.matrix @ state.amplitudes
    mean = np.real(np.vdot(state.amplitudes, h_psi))
    second = np.real(np.vdot(h_psi, h_psi))
    return float(4.0 * (second - mean * mean))


def sql_baselines(n_mean: float) -> tuple[float, float]:
    """(delta_beta_SQL, delta_phi_SQL) = (1/2, 1/(2 sqrt(n_mean)))."""
    if n_mean <= 0:
        raise ValueError("n_mean must be positive")
    return 0.5, 0.5 / math.sqrt(n_mean)


def gain_db_from_precision(sql_precision: float, precision: float) -> float:
    return 20.0 * math.log10(sql_precision / precision)


def gain_db_from_fisher(fisher: float, fisher_sql: float) -> float:
    return 10.0 * math.log10(fisher / fisher_sql)


def weighted_fisher(
    populations: Sequence[tuple[int, float]],
    per_n_fisher: Callable[[int], float],
) -> float:
    """Population-weighted Fisher information sum_n p_n F(n)."""
    total_p = sum(p for _, p in populations)
    if abs(total_p - 1.0) > 1e-6:
        raise ValueError(f"populations sum to {total_p}, expected 1")
    return sum(p * per_n_fisher(n) for n, p in populations)


def optimal_phase_displacement(n_mean_fock: float) -> float:
    """Displacement power gamma^2 = N + 1/2 maximizing phase QFI at fixed mean photons."""
    if n_mean_fock < 0:
        raise ValueError("n_mean_fock must be non-negative")
    return n_mean_fock + 0.5


class Parameter(enum.Enum):
    BETA = "beta"
    PHI = "phi"


@dataclass(frozen=True)
class PrecisionReport:
    """Maximized Fisher information and the resulting precision and gain."""

    parameter: Parameter
    fisher_max: float
    precision: float
    sql_precision: float
    gain_db: float
    argmax_location: float


def maximize_fisher(
    P: Callable[[float], float],
    lo: float,
    hi: float,
    dP: Callable[[float], float] | None = None,
    grid_points: int = 401,
    tol: float = 1e-4,
) -> tuple[float, float]:
    """(F_max, argmax) via a dense grid followed by golden-section refinement."""
    grid = np.linspace(lo, hi, grid_points)
    values = np.array([cfi_of_curve(P, float(x), dP) for x in grid])
    k = int(np.argmax(values))
    a = grid[max(k - 1, 0)]
    b = grid[min(k + 1, grid_points - 1)]
    inv_phi = (math.sqrt(5.0) - 1.0) / 2.0
    c = b - inv_phi * (b - a)
    d = a + inv_phi * (b - a)
    fc = cfi_of_curve(P, c, dP)
    fd = cfi_of_curve(P, d, dP)
    while b - a > tol:
        if fc > fd:
            b, d, fd = d, c, fc
            c = b - inv_phi * (b - a)
            fc = cfi_of_curve(P, c, dP)
        else:
            a, c, fc = c, d, fd
            d = a + inv_phi * (b - a)
            fd = cfi_of_curve(P, d, dP)
    x_star = (a + b) / 2.0
    f_star = cfi_of_curve(P, x_star, dP)
    # The refinement assumes local unimodality; never do worse than the grid.
    if f_star < values[k]:
        return float(values[k]), float(grid[k])
    return f_star, x_star


def precision_report(
    parameter: Parameter,
    P: Callable[[float], float],
    lo: float,
    hi: float,
    sql_precision: float,
    dP: Callable[[float], float] | None = None,
) -> PrecisionReport:
    fisher_max, argmax = maximize_fisher(P, lo, hi, dP)
    precision = 1.0 / math.sqrt(fisher_max)
    return PrecisionReport(
        parameter=parameter,
        fisher_max=fisher_max,
        precision=precision,
        sql_precision=sql_precision,
        gain_db=gain_db_from_precision(sql_precision, precision),
        argmax_location=argmax,
    )
