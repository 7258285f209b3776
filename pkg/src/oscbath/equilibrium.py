"""Thermal equilibrium of the full system and of the main oscillator.

The equilibrium density matrix is the propagator continued to imaginary
time ``t = -i hbar beta``.  All block functions become ``i`` times real
hyperbolic analogs (see :class:`~oscbath.matfun.HyperbolicBlocks`), so the
observables below are computed in real arithmetic:

    <y0^2> = i hbar / (2 (a - b - eta))   ->  hbar / (2 (a_h - b_h - eta_h))
    <p0^2> = -i hbar (a + b) / 2          ->  hbar (a_h + b_h) / 2
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import SingularBlock
from .gaussian import GaussianState
from .matfun import _log_sinh, imaginary_time_blocks
from .model import Spectrum


@dataclass(frozen=True)
class ThermalReport:
    beta: float
    logZ: float
    eta: float
    mean_sq_y: float
    mean_sq_p: float
    hbar: float = 1.0

    @property
    def purity(self) -> float:
        return 0.5 * self.hbar / np.sqrt(self.mean_sq_y * self.mean_sq_p)


def partition_function(spectrum: Spectrum, beta: float) -> float:
    """log Z = -sum_alpha log(2 sinh(beta hbar z_alpha / 2))."""
    if not beta > 0:
        raise ValueError("beta must be > 0, got %r" % beta)
    x = 0.5 * beta * spectrum.hbar * spectrum.z
    return float(-np.sum(np.log(2.0) + _log_sinh(x)))


def _eta(hb) -> float:
    v = hb.B_minus_C
    if not v.size:
        return 0.0
    try:
        sol = np.linalg.solve(hb.A_minus_D, v)
    except np.linalg.LinAlgError as exc:
        raise SingularBlock("A - D is singular at imaginary time") from exc
    if not np.all(np.isfinite(sol)):
        raise SingularBlock("A - D is singular at imaginary time")
    return float(v @ sol)


def eta(spectrum: Spectrum, beta: float) -> float:
    """Real analog of (B - C).(A - D)^-1.(B - C) at t = -i hbar beta (zero for N = 0)."""
    return _eta(imaginary_time_blocks(spectrum, beta))


def equilibrium_moments(spectrum: Spectrum, beta: float):
    """Return ``(<y0^2>, <p0^2>)`` of the main oscillator at equilibrium."""
    hb = imaginary_time_blocks(spectrum, beta)
    h = spectrum.hbar
    y2 = float(0.5 * h / (hb.a_minus_b - _eta(hb)))
    p2 = float(0.5 * h * hb.a_plus_b)
    return y2, p2


def equilibrium_rho(spectrum: Spectrum, beta: float, grid) -> np.ndarray:
    """Equilibrium reduced density matrix on ``grid``; real and symmetric."""
    y2, p2 = equilibrium_moments(spectrum, beta)
    h = spectrum.hbar
    y = np.asarray(grid, dtype=float)
    diff = y[:, None] - y[None, :]
    summ = y[:, None] + y[None, :]
    return np.exp(-p2 / (2 * h**2) * diff**2 - summ**2 / (8 * y2)) / np.sqrt(2 * np.pi * y2)


def thermal_report(spectrum: Spectrum, beta: float) -> ThermalReport:
    hb = imaginary_time_blocks(spectrum, beta)
    e = _eta(hb)
    h = spectrum.hbar
    return ThermalReport(
        beta=float(beta),
        logZ=partition_function(spectrum, beta),
        eta=e,
        mean_sq_y=float(0.5 * h / (hb.a_minus_b - e)),
        mean_sq_p=float(0.5 * h * hb.a_plus_b),
        hbar=h,
    )


def gibbs_state(spectrum: Spectrum, beta: float) -> GaussianState:
    """Full-system Gibbs state assembled mode by mode from the normal modes."""
    z, h = spectrum.z, spectrum.hbar
    coth = 1.0 / np.tanh(0.5 * beta * h * z)
    n = spectrum.n_dof
    cov = np.zeros((2 * n, 2 * n))
    cov[:n, :n] = spectrum.mode_matrix(0.5 * h / z * coth)
    cov[n:, n:] = spectrum.mode_matrix(0.5 * h * z * coth)
    return GaussianState(mean=np.zeros(2 * n), cov=cov, hbar=h)
