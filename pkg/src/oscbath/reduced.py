"""Reduced density matrix of the main oscillator.

Two routes are provided.  The moment route marginalizes an evolved
:class:`~oscbath.gaussian.GaussianState`.  The kernel route builds the
reduced propagator ``J(y0, y0'; t | y01, y02)`` by integrating the bath out
of ``K rho(0) K*`` in closed form, with the bath initially thermal.  In sum
and difference coordinates ``X = (y0+y0')/2, xi = y0-y0'`` (and ``X0, xi0``
for the initial pair) it reads

    J = |b3|/(2 pi) exp{i b1 X xi + i b2 X0 xi - i b3 X xi0 - i b4 X0 xi0
                        - a11 xi^2 - a12 xi xi0 - a22 xi0^2}.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.integrate import simpson

from .errors import GridTooCoarse, NonPhysicalState, NumericalError
from .gaussian import GaussianForm, GaussianState
from .matfun import CAUSTIC_EPS, _coth_csch, _log_sinh, f_inverse, finv_fdot, matfun_at
from .model import Spectrum
from .propagator import mode_prefactors

# (y, y') = _SUM_DIFF @ (X, xi); the one place the coordinate convention lives
_SUM_DIFF = np.array([[1.0, 0.5], [1.0, -0.5]])
_MIN_GRID_POINTS = 200


@dataclass(frozen=True)
class ReducedGaussian:
    """Single-mode Gaussian state (means, variances, symmetrized covariance)."""

    mean_y: float
    mean_p: float
    var_y: float
    var_p: float
    cov_yp: float = 0.0
    hbar: float = 1.0

    @property
    def det(self) -> float:
        return self.var_y * self.var_p - self.cov_yp**2

    @property
    def purity(self) -> float:
        return 0.5 * self.hbar / np.sqrt(self.det)

    def is_physical(self, tol: float = 1e-10) -> bool:
        return self.var_y > 0 and self.var_p > 0 and self.det >= 0.25 * self.hbar**2 - tol

    def as_array(self) -> np.ndarray:
        return np.array([self.mean_y, self.mean_p, self.var_y, self.var_p, self.cov_yp])


def reduce_to_main(state: GaussianState) -> ReducedGaussian:
    n = state.n_dof
    return ReducedGaussian(
        mean_y=float(state.mean[0]),
        mean_p=float(state.mean[n]),
        var_y=float(state.cov[0, 0]),
        var_p=float(state.cov[n, n]),
        cov_yp=float(state.cov[0, n]),
        hbar=state.hbar,
    )


def density_form(red: ReducedGaussian) -> GaussianForm:
    """rho(y, y') of a single-mode Gaussian as a :class:`GaussianForm` in (y, y').

    In ``Y = (y+y')/2, xi = y-y'`` the log-density is

        -(Y-m)^2/(2 vy) - k xi^2/(2 hbar^2) + (i/hbar) xi (mp + r (Y-m)),

    with ``r = cov_yp/vy`` and ``k = vp - cov_yp^2/vy``.
    """
    hb = red.hbar
    vy, m, mp = red.var_y, red.mean_y, red.mean_p
    r = red.cov_yp / vy
    k = red.var_p - red.cov_yp**2 / vy
    P = np.array([[1.0 / vy, -1j * r / hb], [-1j * r / hb, k / hb**2]])
    q = np.array([m / vy, 1j / hb * (mp - r * m)])
    c = -0.5 * m**2 / vy - 0.5 * np.log(2 * np.pi * vy)
    T = np.linalg.inv(_SUM_DIFF)
    return GaussianForm(P, q, c).change_variables(T)


def gaussian_from_form(form: GaussianForm, hbar: float = 1.0) -> ReducedGaussian:
    """Inverse of :func:`density_form`: read the five moments off a form in (y, y')."""
    w = form.change_variables(_SUM_DIFF)
    P, q = w.Q, w.l
    vy = 1.0 / P[0, 0].real
    r = (1j * hbar * P[0, 1]).real
    k = (hbar**2 * P[1, 1]).real
    m = (vy * q[0]).real
    mp = (r * m - 1j * hbar * q[1]).real
    cov_yp = r * vy
    return ReducedGaussian(
        mean_y=m, mean_p=mp, var_y=vy, var_p=k + cov_yp**2 / vy, cov_yp=cov_yp, hbar=hbar
    )


def rho_red_grid(red: ReducedGaussian, grid) -> np.ndarray:
    """Complex matrix ``rho[i, j] = rho(grid[i], grid[j])``."""
    if not red.is_physical():
        raise NonPhysicalState(
            "var_y var_p - cov_yp^2 = %.6g < hbar^2/4 = %.6g" % (red.det, 0.25 * red.hbar**2)
        )
    grid = np.asarray(grid, dtype=float)
    if grid.ndim != 1 or np.any(np.diff(grid) <= 0):
        raise ValueError("grid must be strictly increasing")
    hb = red.hbar
    Y = 0.5 * (grid[:, None] + grid[None, :])
    xi = grid[:, None] - grid[None, :]
    vy = red.var_y
    r = red.cov_yp / vy
    k = red.var_p - red.cov_yp**2 / vy
    d = Y - red.mean_y
    expo = -d**2 / (2 * vy) - k * xi**2 / (2 * hb**2) + 1j / hb * xi * (red.mean_p + r * d)
    return np.exp(expo) / np.sqrt(2 * np.pi * vy)


# ---------------------------------------------------------------------------
# reduced kernel


@dataclass(frozen=True)
class ReducedKernel:
    b1: float
    b2: float
    b3: float
    b4: float
    a11: float
    a12: float
    a22: float
    t: float
    beta: float
    hbar: float = 1.0
    norm: complex = 0.0  # prefactor produced by the bath integration

    def as_array(self) -> np.ndarray:
        return np.array([self.b1, self.b2, self.b3, self.b4, self.a11, self.a12, self.a22])

    def form(self) -> GaussianForm:
        """J as a :class:`GaussianForm` in (y0, y0', y01, y02)."""
        # w = (X, xi, X0, xi0); exponent = -w.Q.w/2
        Q = np.zeros((4, 4), dtype=complex)
        Q[0, 1] = Q[1, 0] = -1j * self.b1
        Q[2, 1] = Q[1, 2] = -1j * self.b2
        Q[0, 3] = Q[3, 0] = 1j * self.b3
        Q[2, 3] = Q[3, 2] = 1j * self.b4
        Q[1, 1] = 2 * self.a11
        Q[1, 3] = Q[3, 1] = self.a12
        Q[3, 3] = 2 * self.a22
        c = np.log(abs(self.b3) / (2 * np.pi))
        T = np.zeros((4, 4))
        T[:2, :2] = T[2:, 2:] = np.linalg.inv(_SUM_DIFF)
        return GaussianForm(Q, np.zeros(4), c).change_variables(T)


def _thermal_bath_form(omegas, beta, hbar):
    """Normalized thermal bath density matrix, mode by mode.

    ``rho_B = exp(logn - sum_k [c_k cosh_k (y1k^2 + y2k^2) - 2 c_k y1k y2k])``;
    returns ``(c, c*cosh, logn)`` with ``c = omega/(2 hbar sinh x)``.  The
    kernel is the imaginary-time Mehler kernel divided by the bath partition
    function.
    """
    x = beta * hbar * omegas
    coth, csch = _coth_csch(x)
    c = 0.5 * omegas / hbar * csch
    logn = np.sum(
        0.5 * np.log(omegas / (2 * np.pi * hbar)) - 0.5 * _log_sinh(x) + np.log(2.0) + _log_sinh(x / 2)
    )
    return c, 0.5 * omegas / hbar * coth, logn


def kernel_J_coeffs(
    spectrum: Spectrum, beta: float, t: float, eps: float = CAUSTIC_EPS
) -> ReducedKernel:
    """Coefficients of the reduced kernel with a thermal bath at ``beta``.

    The bath coordinates of ``K(y, t; y1) rho_B(y1_bath, y2_bath) K*(y', t; y2)``
    are integrated in closed form in the order initial-left, initial-right,
    final (traced) coordinates.  The result is rewritten in sum/difference
    coordinates and the coefficients are read off.

    Raises
    ------
    NumericalError
        If the integrated form has terms outside the expected structure.
    """
    if not beta > 0:
        raise ValueError("beta must be > 0, got %r" % beta)
    hb = spectrum.hbar
    n_b = spectrum.n_dof - 1
    mf = matfun_at(spectrum, t)
    M = finv_fdot(mf, eps)
    Finv = f_inverse(mf, eps)
    log_norm = np.log(np.abs(np.prod(mode_prefactors(spectrum, t, eps))) ** 2)

    # variables: y0, y0', y01, y02, ybar (n_b), y1 (n_b), y2 (n_b)
    dim = 4 + 3 * n_b
    bar = 4 + np.arange(n_b)
    one = bar + n_b
    two = bar + 2 * n_b

    def select(main_idx, bath_idx):
        E = np.zeros((n_b + 1, dim))
        E[0, main_idx] = 1.0
        E[np.arange(1, n_b + 1), bath_idx] = 1.0
        return E

    Ey, Eyp, E1, E2 = select(0, bar), select(1, bar), select(2, one), select(3, two)
    # exponent = z.C.z, C complex symmetric
    C = 0.5j / hb * (Ey.T @ M @ Ey + E1.T @ M @ E1 - E1.T @ Finv @ Ey - Ey.T @ Finv @ E1)
    C -= 0.5j / hb * (Eyp.T @ M @ Eyp + E2.T @ M @ E2 - E2.T @ Finv @ Eyp - Eyp.T @ Finv @ E2)
    if n_b:
        c, c_cosh, logn = _thermal_bath_form(spectrum.bath_omegas, beta, hb)
        C[one, one] -= c_cosh
        C[two, two] -= c_cosh
        C[one, two] += c
        C[two, one] += c
        log_norm += logn

    form = GaussianForm(-2.0 * C, np.zeros(dim), log_norm)
    if n_b:
        # after each step the remaining variables close up, so the initial-right
        # block moves into the slot the initial-left block occupied
        form = form.integrate(one)
        form = form.integrate(one)
        form = form.integrate(bar)
    T = np.zeros((4, 4))
    T[:2, :2] = T[2:, 2:] = _SUM_DIFF
    return _read_coefficients(form.change_variables(T), t, beta, hb)


def _read_coefficients(w: GaussianForm, t, beta, hbar) -> ReducedKernel:
    Q = w.Q
    # w = (X, xi, X0, xi0); exponent -w.Q.w/2
    b1 = (1j * Q[0, 1])
    b2 = (1j * Q[2, 1])
    b3 = (-1j * Q[0, 3])
    b4 = (-1j * Q[2, 3])
    a11 = 0.5 * Q[1, 1]
    a12 = Q[1, 3]
    a22 = 0.5 * Q[3, 3]
    coeffs = np.array([b1, b2, b3, b4, a11, a12, a22])
    scale = max(np.max(np.abs(Q)), 1.0)
    stray = np.abs([Q[0, 0], Q[2, 2], Q[0, 2]]).max()
    if stray > 1e-8 * scale or np.max(np.abs(coeffs.imag)) > 1e-8 * scale or np.max(np.abs(w.l)) > 0:
        raise NumericalError(
            "reduced kernel does not have the expected structure (stray terms %.3e)" % stray
        )
    re = coeffs.real
    return ReducedKernel(*re, t=float(t), beta=float(beta), hbar=hbar, norm=np.exp(w.c))


def evolve_reduced_gaussian(kernel: ReducedKernel, red0: ReducedGaussian) -> ReducedGaussian:
    """Propagate a Gaussian initial state through J by exact Gaussian integration."""
    form = kernel.form() * _embed_initial(density_form(red0))
    return gaussian_from_form(form.integrate([2, 3]), hbar=kernel.hbar)


def _embed_initial(rho0: GaussianForm) -> GaussianForm:
    Q = np.zeros((4, 4), dtype=complex)
    Q[2:, 2:] = rho0.Q
    l = np.zeros(4, dtype=complex)
    l[2:] = rho0.l
    return GaussianForm(Q, l, rho0.c)


def evolve_rho_via_kernel(kernel: ReducedKernel, rho0_grid, grid) -> np.ndarray:
    """rho(y0, y0'; t) = int dy01 dy02 J rho(y01, y02; 0) by 2D Simpson quadrature.

    ``grid`` is used both for the initial and the evolved density matrix, so
    it must resolve both.

    Raises
    ------
    GridTooCoarse
        Fewer than 200 points, or the initial state is not negligible at the
        grid edges.
    """
    grid = np.asarray(grid, dtype=float)
    rho0 = np.asarray(rho0_grid, dtype=complex)
    n = grid.size
    if n < _MIN_GRID_POINTS:
        raise GridTooCoarse("need at least %d grid points, got %d" % (_MIN_GRID_POINTS, n))
    if rho0.shape != (n, n):
        raise ValueError("rho0_grid must be %d x %d" % (n, n))
    edge = max(np.abs(rho0[[0, -1], :]).max(), np.abs(rho0[:, [0, -1]]).max())
    if edge > 1e-8 * np.abs(rho0).max():
        raise GridTooCoarse("initial state is not contained in the grid window")

    Q = kernel.form().Q  # over (y0, y0', y01, y02)
    c = np.log(abs(kernel.b3) / (2 * np.pi))
    wts = simpson(np.eye(n), x=grid, axis=0)
    y = grid
    # pure-input and pure-output parts of the exponent
    e_in = -0.5 * (Q[2, 2] * y[:, None] ** 2 + 2 * Q[2, 3] * np.outer(y, y) + Q[3, 3] * y[None, :] ** 2)
    e_out = -0.5 * (Q[0, 0] * y[:, None] ** 2 + 2 * Q[0, 1] * np.outer(y, y) + Q[1, 1] * y[None, :] ** 2)
    g = wts[:, None] * wts[None, :] * rho0 * np.exp(e_in)
    E02 = np.exp(-Q[0, 2] * np.outer(y, y))  # [y0, y01]
    E03 = np.exp(-Q[0, 3] * np.outer(y, y))  # [y0, y02]
    E12 = np.exp(-Q[1, 2] * np.outer(y, y))  # [y0', y01]
    E13 = np.exp(-Q[1, 3] * np.outer(y, y))  # [y0', y02]
    out = np.empty((n, n), dtype=complex)
    for i in range(n):
        H = (E13 * E03[i]) @ g.T  # [y0', y01]
        out[i] = np.sum(E02[i][None, :] * E12 * H, axis=1)
    return np.exp(c + e_out) * out
