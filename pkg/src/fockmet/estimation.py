"""Statistical back-end: model fits, population reconstruction, bootstrap.

All fitted models are linear in their amplitude/background parameters, so
the solvers are direct least squares; the spectroscopy fit nests a linear
solve inside a one-dimensional width search.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import optimize

from .metrology import (
    Parameter,
    laguerre,
    laguerre_deriv,
    maximize_fisher,
)

DEGENERATE_AMPLITUDE = 1e-8
# Fitted probability models can slightly overshoot [0, 1]; near the
# crossing the binary Fisher information diverges spuriously.  Points where
# the model is within this margin of saturation are excluded from the
# precision maximization.
SATURATION_MARGIN = 1e-3


@dataclass(frozen=True)
class FitResult:
    parameters: dict[str, float]
    covariance: np.ndarray
    residual_norm: float
    converged: bool
    iterations: int
    degenerate: bool = False


def _linear_fit(design: np.ndarray, y: np.ndarray, names: list[str]) -> FitResult:
    coef, _, rank, _ = np.linalg.lstsq(design, y, rcond=None)
    residuals = y - design @ coef
    residual_norm = float(np.linalg.norm(residuals))
    dof = max(len(y) - design.shape[1], 1)
    sigma2 = residual_norm**2 / dof
    gram = design.T @ design
    try:
        cov = sigma2 * np.linalg.inv(gram)
    except np.linalg.LinAlgError:
        cov = np.full((design.shape[1], design.shape[1]), np.nan)
    converged = rank == design.shape[1]
    return FitResult(
        parameters=dict(zip(names, (float(c) for c in coef))),
        covariance=cov,
        residual_norm=residual_norm,
        converged=converged,
        iterations=1,
    )


def displacement_model_shape(beta: np.ndarray, N: int) -> np.ndarray:
    """exp(-2 beta^2) L_N(4 beta^2), the beta-dependent factor of the parity fit."""
    beta = np.asarray(beta, dtype=float)
    return np.array([laguerre(N, 4.0 * b * b) * math.exp(-2.0 * b * b) for b in beta])


def displacement_model_shape_deriv(beta: np.ndarray, N: int) -> np.ndarray:
    beta = np.asarray(beta, dtype=float)
    out = np.empty_like(beta)
    for i, b in enumerate(beta):
        x = 4.0 * b * b
        env = math.exp(-2.0 * b * b)
        out[i] = env * (laguerre_deriv(N, x) * 8.0 * b - 4.0 * b * laguerre(N, x))
    return out


def phase_model_shape(phi: np.ndarray, N: int) -> np.ndarray:
    """exp(-2N phi^2) L_N(4N phi^2): the phase-sensing fit shape with gamma^2 = N."""
    phi = np.asarray(phi, dtype=float)
    return np.array(
        [laguerre(N, 4.0 * N * p * p) * math.exp(-2.0 * N * p * p) for p in phi]
    )


def phase_model_shape_deriv(phi: np.ndarray, N: int) -> np.ndarray:
    phi = np.asarray(phi, dtype=float)
    out = np.empty_like(phi)
    for i, p in enumerate(phi):
        x = 4.0 * N * p * p
        env = math.exp(-2.0 * N * p * p)
        out[i] = env * (
            laguerre_deriv(N, x) * 8.0 * N * p - 4.0 * N * p * laguerre(N, x)
        )
    return out


def _curve_fit(grid, samples, N, shape_fn) -> FitResult:
    grid = np.asarray(grid, dtype=float)
    samples = np.asarray(samples, dtype=float)
    if grid.size < 8:
        raise ValueError("need at least 8 grid points")
    if np.any((samples < -1e-9) | (samples > 1.0 + 1e-9)):
        raise ValueError("probabilities must lie in [0, 1]")
    design = np.column_stack([shape_fn(grid, N), np.ones_like(grid)])
    result = _linear_fit(design, samples, ["A", "B"])
    span = float(np.max(np.abs(design[:, 0])) - np.min(np.abs(design[:, 0])))
    degenerate = abs(result.parameters["A"]) * max(span, 1.0) < DEGENERATE_AMPLITUDE
    if degenerate:
        result = FitResult(
            parameters=result.parameters,
            covariance=result.covariance,
            residual_norm=result.residual_norm,
            converged=result.converged,
            iterations=result.iterations,
            degenerate=True,
        )
    return result


def fit_displacement_curve(beta_grid, pg_samples, N: int) -> FitResult:
    """Fit P_g = A exp(-2 beta^2) L_N(4 beta^2) + B."""
    return _curve_fit(beta_grid, pg_samples, N, displacement_model_shape)


def fit_phase_curve(phi_grid, pg_samples, N: int) -> FitResult:
    """Fit P_g = A exp(-2N phi^2) L_N(4N phi^2) + B."""
    return _curve_fit(phi_grid, pg_samples, N, phase_model_shape)


def fit_multi_gaussian(
    f_grid, signal, f_centers, sigma_bounds: tuple[float, float] | None = None
) -> tuple[np.ndarray, FitResult]:
    """Reconstruct photon populations from a multi-Gaussian spectroscopy signal.

    Shared width sigma_f and background B as constrained parameters; the
    per-center amplitudes solve a linear system nested inside a 1-D search
    over sigma_f.  Negative amplitudes are clamped to zero before
    normalization.  Returns (populations, fit).
    """
    f_grid = np.asarray(f_grid, dtype=float)
    signal = np.asarray(signal, dtype=float)
    f_centers = np.asarray(f_centers, dtype=float)
    spacing = np.min(np.abs(np.diff(np.sort(f_centers)))) if f_centers.size > 1 else np.ptp(f_grid)

    def design_for(sigma_f: float) -> np.ndarray:
        cols = [np.exp(-((f_grid - fc) ** 2) / (2.0 * sigma_f**2)) for fc in f_centers]
        cols.append(np.ones_like(f_grid))
        return np.column_stack(cols)

    def residual(sigma_f: float) -> float:
        design = design_for(sigma_f)
        coef, _, _, _ = np.linalg.lstsq(design, signal, rcond=None)
        return float(np.linalg.norm(signal - design @ coef))

    if sigma_bounds is None:
        lo = max(np.ptp(f_grid) / (4.0 * f_grid.size), spacing / 50.0)
        hi = max(spacing * 2.0, lo * 10.0)
        sigma_bounds = (lo, hi)
    search = optimize.minimize_scalar(residual, bounds=sigma_bounds, method="bounded")
    sigma_f = float(search.x)
    if f_centers.size > 1 and spacing < sigma_f / 10.0:
        raise ValueError(
            f"centers closer than sigma_f/10 ({spacing:.3g} < {sigma_f / 10.0:.3g}): singular design"
        )
    design = design_for(sigma_f)
    names = [f"A{k}" for k in range(f_centers.size)] + ["B"]
    fit = _linear_fit(design, signal, names)
    amps = np.array([fit.parameters[f"A{k}"] for k in range(f_centers.size)])
    amps = np.clip(amps, 0.0, None)
    total = amps.sum()
    if total <= 0:
        raise ValueError("all fitted amplitudes non-positive")
    populations = amps / total
    fit = FitResult(
        parameters={**fit.parameters, "sigma_f": sigma_f},
        covariance=fit.covariance,
        residual_norm=fit.residual_norm,
        converged=fit.converged and search.success,
        iterations=int(search.nfev),
    )
    return populations, fit


def fit_ramsey_frequency(theta_grid, pg_trace) -> float:
    """Dominant oscillation frequency of a Ramsey trace, in cycles per 2pi of theta.

    Spectrum peak first, then local refinement with a single-component
    sinusoid.  For a Fock-|n> trace the result is n.
    """
    theta = np.asarray(theta_grid, dtype=float)
    trace = np.asarray(pg_trace, dtype=float)
    if theta.size < 8:
        raise ValueError("trace too short")
    span = theta[-1] - theta[0]
    centered = trace - trace.mean()
    spectrum = np.abs(np.fft.rfft(centered))
    noise_floor = 3.0 * np.median(spectrum) + 1e-12
    k = int(np.argmax(spectrum))
    if k == 0 or spectrum[k] < noise_floor:
        raise ValueError("no dominant spectral peak above the noise floor")
    freq0 = 2.0 * math.pi * k / span

    def model(params):
        a, b, f, phase = params
        return a + b * np.cos(f * theta + phase) - trace

    guess = [trace.mean(), np.ptp(trace) / 2.0, freq0, 0.0]
    sol = optimize.least_squares(model, guess)
    return float(abs(sol.x[2]))


@dataclass(frozen=True)
class ShotRecord:
    """Per-grid-point binary counts of a sensing sweep.

    ``shots=None`` marks the infinite-shot limit: ``pg`` holds exact
    probabilities and resampling reproduces them verbatim.
    """

    grid: np.ndarray
    pg: np.ndarray
    shots: int | None
    model: Parameter
    N: int


def _fisher_precision_from_fit(record: ShotRecord, pg: np.ndarray) -> float:
    if record.model is Parameter.BETA:
        fit = fit_displacement_curve(record.grid, np.clip(pg, 0.0, 1.0), record.N)
        shape, dshape = displacement_model_shape, displacement_model_shape_deriv
    else:
        fit = fit_phase_curve(record.grid, np.clip(pg, 0.0, 1.0), record.N)
        shape, dshape = phase_model_shape, phase_model_shape_deriv
    a, b = fit.parameters["A"], fit.parameters["B"]

    def p_of(lam: float) -> float:
        p = a * float(shape(np.array([lam]), record.N)[0]) + b
        if p < SATURATION_MARGIN or p > 1.0 - SATURATION_MARGIN:
            return 0.0
        return p

    def dp_of(lam: float) -> float:
        return a * float(dshape(np.array([lam]), record.N)[0])

    lo, hi = float(record.grid.min()), float(record.grid.max())
    if lo <= 0.0:
        lo = (hi - lo) * 1e-4
    fisher_max, _ = maximize_fisher(p_of, lo, hi, dp_of)
    if fisher_max <= 0:
        raise ValueError("fitted model carries no Fisher information")
    return 1.0 / math.sqrt(fisher_max)


def bootstrap_precision(
    record: ShotRecord, resamples: int = 500, seed: int = 0
) -> tuple[float, float]:
    """Bootstrap the extracted precision: resample counts, refit, re-maximize.

    Returns (mean precision, standard error).  Deterministic for a fixed
    seed; raises if more than 5% of the resample fits fail.
    """
    if resamples < 200:
        raise ValueError("resamples must be >= 200")
    streams = np.random.SeedSequence(seed).spawn(resamples)
    values = []
    failures = 0
    for stream in streams:
        rng = np.random.default_rng(stream)
        if record.shots is None:
            pg = record.pg
        else:
            pg = rng.binomial(record.shots, np.clip(record.pg, 0.0, 1.0)) / record.shots
        try:
            values.append(_fisher_precision_from_fit(record, pg))
        except (ValueError, np.linalg.LinAlgError):
            failures += 1
    if failures > 0.05 * resamples:
        raise RuntimeError(f"{failures}/{resamples} bootstrap refits failed")
    arr = np.array(values)
    return float(arr.mean()), float(arr.std(ddof=1) if arr.size > 1 else 0.0)


def fit_scaling_exponent(x, y) -> tuple[float, float]:
    """Ordinary least squares on (log10 x, log10 y): returns (exponent, intercept)."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if x.size < 3:
        raise ValueError("need at least 3 points")
    if np.any(x <= 0) or np.any(y <= 0):
        raise ValueError("all values must be positive")
    slope, intercept = np.polyfit(np.log10(x), np.log10(y), 1)
    return float(slope), float(intercept)
