"""Brute-force reference computations.

Nothing here goes through the spectral machinery of :mod:`oscbath.matfun`
or :mod:`oscbath.propagator`; the routines integrate ODEs, sum series,
evaluate single-oscillator closed forms or do quadrature, so that agreement
with the library is a genuine check.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np
from scipy.integrate import simpson

from .errors import CausticError, DimensionMismatch, StepTooLarge

# the ODE step must resolve the fastest mode this finely
_STEPS_PER_PERIOD = 1000


@dataclass(frozen=True, eq=False)
class OdeSolution:
    times: np.ndarray
    F_samples: np.ndarray
    Fdot_samples: np.ndarray


def integrate_F_ode(B, t_end: float, h: float) -> OdeSolution:
    """Integrate ``Fddot = -B F`` from ``F = 0, Fdot = I`` with classical RK4.

    The step is shrunk uniformly so the grid ends exactly at ``t_end``.

    Raises
    ------
    StepTooLarge
        If ``h > 2 pi / (1000 z_max)``.
    """
    B = np.asarray(B, dtype=float)
    z_max = math.sqrt(max(np.linalg.eigvalsh(B).max(), 0.0))
    if z_max > 0 and h > 2 * math.pi / (_STEPS_PER_PERIOD * z_max):
        raise StepTooLarge(
            "h=%g exceeds 1e-3 of the shortest period 2pi/%g" % (h, z_max)
        )
    n_steps = max(1, int(math.ceil(t_end / h - 1e-12)))
    dt = t_end / n_steps
    n = B.shape[0]
    F = np.zeros((n, n))
    V = np.eye(n)
    Fs = np.empty((n_steps + 1, n, n))
    Vs = np.empty((n_steps + 1, n, n))
    Fs[0], Vs[0] = F, V
    for i in range(n_steps):
        k1f, k1v = V, -B @ F
        k2f, k2v = V + 0.5 * dt * k1v, -B @ (F + 0.5 * dt * k1f)
        k3f, k3v = V + 0.5 * dt * k2v, -B @ (F + 0.5 * dt * k2f)
        k4f, k4v = V + dt * k3v, -B @ (F + dt * k3f)
        F = F + dt / 6.0 * (k1f + 2 * k2f + 2 * k3f + k4f)
        V = V + dt / 6.0 * (k1v + 2 * k2v + 2 * k3v + k4v)
        Fs[i + 1], Vs[i + 1] = F, V
    return OdeSolution(times=np.linspace(0.0, t_end, n_steps + 1), F_samples=Fs, Fdot_samples=Vs)


def series_F(B, t: float, terms: int = 80):
    """``F`` and ``Fdot`` from their power series in ``B t^2``.

    ``F = sum_n (-B)^n t^(2n+1)/(2n+1)!`` and ``Fdot = sum_n (-B)^n t^(2n)/(2n)!``.
    Accurate while ``||B|| t^2`` stays moderate (say below 50).
    """
    B = np.asarray(B, dtype=float)
    n = B.shape[0]
    term_c = np.eye(n)  # (-B t^2)^k / (2k)!
    term_s = t * np.eye(n)  # (-B t^2)^k t / (2k+1)!
    F = term_s.copy()
    Fdot = term_c.copy()
    M = -B * t * t
    for k in range(1, terms):
        term_c = term_c @ M / ((2 * k - 1) * (2 * k))
        term_s = term_s @ M / ((2 * k) * (2 * k + 1))
        F += term_s
        Fdot += term_c
    return F, Fdot


def mehler_1d(omega: float, hbar: float, t: float, y, yprime, eps: float = 1e-8):
    """Single-oscillator propagator ``<y| exp(-i H t/hbar) |y'>``.

    ``sqrt(omega/(2 pi i hbar sin(omega t))) exp{(i omega/(2 hbar sin(omega t)))
    [(y^2 + y'^2) cos(omega t) - 2 y y']}``; the square root loses a quarter
    turn each time ``omega |t|`` passes a multiple of pi.  ``y`` may be complex.
    """
    s = math.sin(omega * t)
    if abs(s) < eps:
        raise CausticError(t, 0, s)
    crossings = math.floor(omega * abs(t) / math.pi)
    # i sin(wt) = |sin| exp(i pi/2 sgn(sin)); choose the branch continuous in t
    phase = -(math.pi / 4.0 + crossings * math.pi / 2.0)
    if t < 0:
        phase = -phase
    amp = math.sqrt(omega / (2.0 * math.pi * hbar * abs(s))) * cmath.exp(1j * phase)
    y = np.asarray(y, dtype=complex)
    yp = np.asarray(yprime, dtype=complex)
    c = math.cos(omega * t)
    return amp * np.exp(1j * omega / (2.0 * hbar * s) * ((y**2 + yp**2) * c - 2.0 * y * yp))


def quad_nd(f: Callable, box: Sequence, points) -> complex:
    """Composite Simpson rule on a tensor grid in one or two dimensions.

    Parameters
    ----------
    f : callable
        Vectorized integrand; called as ``f(x)`` in 1D and ``f(x, y)`` with
        broadcast mesh arrays in 2D.
    box : sequence of (lo, hi)
    points : int or sequence of int
        Nodes per axis (odd counts give the classical Simpson rule).
    """
    box = [tuple(map(float, b)) for b in box]
    if not 1 <= len(box) <= 2:
        raise DimensionMismatch("quad_nd supports 1 or 2 dimensions, got %d" % len(box))
    pts = [int(points)] * len(box) if np.isscalar(points) else [int(p) for p in points]
    axes = [np.linspace(lo, hi, p) for (lo, hi), p in zip(box, pts)]
    if len(axes) == 1:
        return complex(simpson(f(axes[0]), x=axes[0]))
    X, Y = np.meshgrid(axes[0], axes[1], indexing="ij")
    inner = simpson(f(X, Y), x=axes[1], axis=1)
    return complex(simpson(inner, x=axes[0]))


def normal_mode_thermal(spectrum, beta: float):
    """Thermal ``<y0^2>, <p0^2>`` as a sum over independent normal modes."""
    z, X, hbar = np.asarray(spectrum.z), np.asarray(spectrum.X), spectrum.hbar
    w = X[0, :] ** 2 / np.tanh(0.5 * beta * hbar * z)
    return float(np.sum(w * hbar / (2.0 * z))), float(np.sum(w * hbar * z / 2.0))


def compose_1d(omega, hbar, t1, t2, y, yprime, half_width=12.0, points=4001) -> complex:
    """``int dy'' K(y, t2; y'') K(y'', t1; y')`` for a single oscillator.

    The intermediate contour is rotated by ``e^{+-i pi/4}`` through the
    saddle so the oscillatory Gaussian becomes a decaying one.
    """
    a = omega / math.tan(omega * t1) + omega / math.tan(omega * t2)
    # exp(i a y''^2 / 2hbar) decays along y'' = e^{i pi/4 sgn(a)} s
    rot = cmath.exp(1j * math.copysign(math.pi / 4.0, a))
    lin = omega * (yprime / math.sin(omega * t1) + y / math.sin(omega * t2))
    centre = lin / a
    width = math.sqrt(hbar / abs(a))

    def integrand(s):
        ypp = centre + rot * width * s
        return mehler_1d(omega, hbar, t2, y, ypp) * mehler_1d(omega, hbar, t1, ypp, yprime)

    return rot * width * quad_nd(integrand, [(-half_width, half_width)], points)


def split_operator_1d(omega, hbar, force: Callable, t: float, psi0, grid, n_steps: int):
    """Strang-split evolution under ``p^2/2 + omega^2 y^2/2 + f(t) y`` on a periodic grid."""
    grid = np.asarray(grid, dtype=float)
    dy = grid[1] - grid[0]
    k = 2.0 * np.pi * np.fft.fftfreq(grid.size, d=dy)
    dt = t / n_steps
    kinetic = np.exp(-0.5j * dt * hbar * k**2 / 2.0)
    psi = np.asarray(psi0, dtype=complex).copy()
    for n in range(n_steps):
        psi = np.fft.ifft(kinetic * np.fft.fft(psi))
        tm = (n + 0.5) * dt
        V = 0.5 * omega**2 * grid**2 + force(tm) * grid
        psi = np.exp(-1j * dt * V / hbar) * psi
        psi = np.fft.ifft(kinetic * np.fft.fft(psi))
    return psi


def dirichlet_green_fd(omega: float, t: float, n: int = 2000):
    """Green function of ``-d^2/ds^2 - omega^2`` on ``(0, t)`` with zero boundary values.

    Returns the interior grid and the matrix ``G[i, j] ~ G(s_i, s_j)`` from a
    second-order finite-difference inverse.
    """
    h = t / (n + 1)
    s = h * np.arange(1, n + 1)
    L = (np.diag(np.full(n, 2.0)) - np.eye(n, k=1) - np.eye(n, k=-1)) / h**2 - omega**2 * np.eye(n)
    return s, np.linalg.inv(L) / h
