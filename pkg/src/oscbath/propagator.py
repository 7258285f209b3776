"""Exact propagator of the oscillator-bath system, undriven and driven.

The undriven kernel is

    K(y, t; y', 0) = P(t) exp{(i/2hbar) [y.M.y + y'.M.y' - 2 y'.F^-1.y]},

with ``M = F^-1 Fdot`` and ``P`` the product over normal modes of the
single-oscillator prefactors ``sqrt(z/(2 pi i hbar sin(z t)))``.  A classical
force ``f_mu(t)`` coupling as ``+f.Y`` in the Hamiltonian adds linear terms
built from the drive displacements and a phase ``-zeta(t)``.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Callable, NamedTuple

import numpy as np

from .errors import CausticError, DimensionMismatch, GridTooCoarse
from .matfun import CAUSTIC_EPS, f_inverse, finv_fdot, matfun_at
from .model import Spectrum

# Gauss-Legendre order per force-grid cell; the force is linear on a cell and
# the kernels are smooth, so this is exact to rounding for z*h up to ~1
_GL_ORDER = 8
_GL_X, _GL_W = np.polynomial.legendre.leggauss(_GL_ORDER)
_GL_X = 0.5 * (_GL_X + 1.0)
_GL_W = 0.5 * _GL_W


@dataclass(frozen=True, eq=False)
class PropagatorForm:
    """Complex Gaussian parameterization of K(y, t; y', 0).

    ``K = prefactor * exp{(i/2hbar)[y.Myy.y + y'.Mpp.y' + y'.Mcross.y]
    + linear_y.y + linear_yprime.y' + phase0}``.
    """

    t: float
    hbar: float
    prefactor: complex
    Myy: np.ndarray
    Mpp: np.ndarray
    Mcross: np.ndarray
    linear_y: np.ndarray
    linear_yprime: np.ndarray
    phase0: complex = 0.0

    @property
    def n_dof(self) -> int:
        return self.Myy.shape[0]


def mode_prefactors(spectrum: Spectrum, t: float, eps: float = CAUSTIC_EPS) -> np.ndarray:
    """Per-mode factors sqrt(z/(2 pi i hbar sin(z t))) on the Maslov branch.

    Each crossing of a focal time ``z t = n pi`` adds a phase ``-pi/2``.
    Negative times are the complex conjugate of ``|t|`` (time reversal).
    """
    z, hb = spectrum.z, spectrum.hbar
    tau = abs(float(t))
    s = np.sin(z * tau)
    bad = np.flatnonzero(np.abs(s) < eps)
    if bad.size:
        raise CausticError(t, int(bad[0]), s[bad[0]])
    crossings = np.floor(z * tau / np.pi)
    amp = np.sqrt(z / (2 * np.pi * hb * np.abs(s)))
    out = amp * np.exp(-1j * (np.pi / 4 + crossings * np.pi / 2))
    return np.conj(out) if t < 0 else out


def propagator_form(spectrum: Spectrum, t: float, eps: float = CAUSTIC_EPS) -> PropagatorForm:
    mf = matfun_at(spectrum, t)
    M = finv_fdot(mf, eps)
    Finv = f_inverse(mf, eps)
    n = spectrum.n_dof
    return PropagatorForm(
        t=float(t),
        hbar=spectrum.hbar,
        prefactor=complex(np.prod(mode_prefactors(spectrum, t, eps))),
        Myy=M,
        Mpp=M.copy(),
        Mcross=-2.0 * Finv,
        linear_y=np.zeros(n, dtype=complex),
        linear_yprime=np.zeros(n, dtype=complex),
    )


def evaluate_K(form: PropagatorForm, y, yprime):
    """Evaluate the kernel; ``y`` and ``yprime`` broadcast over leading axes.

    Complex positions are accepted (analytic continuation, e.g. for rotated
    integration contours).
    """
    y = np.asarray(y)
    yp = np.asarray(yprime)
    y = y if np.iscomplexobj(y) else y.astype(float)
    yp = yp if np.iscomplexobj(yp) else yp.astype(float)
    n = form.n_dof
    if y.shape[-1:] != (n,) or yp.shape[-1:] != (n,):
        raise DimensionMismatch("position vectors must have length %d" % n)
    quad = (
        np.einsum("...i,ij,...j->...", y, form.Myy, y)
        + np.einsum("...i,ij,...j->...", yp, form.Mpp, yp)
        + np.einsum("...i,ij,...j->...", yp, form.Mcross, y)
    )
    expo = 0.5j / form.hbar * quad + y @ form.linear_y + yp @ form.linear_yprime + form.phase0
    out = form.prefactor * np.exp(expo)
    return complex(out) if np.ndim(out) == 0 else out


# ---------------------------------------------------------------------------
# classical drives


@dataclass(frozen=True, eq=False)
class ForceProfile:
    """Forces ``f_mu(t)`` sampled uniformly from t=0 with spacing ``step``.

    Between samples the force is linear.  ``values`` has shape
    ``(n_samples, N+1)``.
    """

    values: np.ndarray
    step: float

    def __post_init__(self):
        v = np.asarray(self.values, dtype=float)
        if v.ndim != 2:
            raise DimensionMismatch("force values must be (n_samples, n_dof), got %s" % (v.shape,))
        if v.shape[0] < 2:
            raise GridTooCoarse("force profile needs at least 2 samples")
        if not self.step > 0:
            raise ValueError("force step must be > 0")
        object.__setattr__(self, "values", v)
        object.__setattr__(self, "step", float(self.step))

    @property
    def n_dof(self) -> int:
        return self.values.shape[1]

    @property
    def n_samples(self) -> int:
        return self.values.shape[0]

    @property
    def t_end(self) -> float:
        return (self.n_samples - 1) * self.step

    @property
    def times(self) -> np.ndarray:
        return np.arange(self.n_samples) * self.step

    def __call__(self, t):
        t = np.asarray(t, dtype=float)
        cols = [np.interp(t, self.times, self.values[:, k]) for k in range(self.n_dof)]
        return np.stack(cols, axis=-1)

    def __add__(self, other: "ForceProfile") -> "ForceProfile":
        if other.values.shape != self.values.shape or other.step != self.step:
            raise DimensionMismatch("force profiles live on different grids")
        return ForceProfile(self.values + other.values, self.step)

    def __mul__(self, c: float) -> "ForceProfile":
        return ForceProfile(c * self.values, self.step)

    __rmul__ = __mul__

    @staticmethod
    def n_samples_for(t_end: float, step: float) -> int:
        return int(np.ceil(t_end / step - 1e-9)) + 1

    @classmethod
    def zeros(cls, n_dof: int, t_end: float, step: float) -> "ForceProfile":
        return cls(np.zeros((cls.n_samples_for(t_end, step), n_dof)), step)

    @classmethod
    def sample(
        cls, func: Callable, n_dof: int, t_end: float, step: float, index: int | None = 0
    ) -> "ForceProfile":
        """Sample ``func(t)`` on the grid.

        With ``index`` set, ``func`` returns a scalar force on that coordinate;
        with ``index=None`` it returns the full length-``n_dof`` vector.
        """
        times = np.arange(cls.n_samples_for(t_end, step)) * step
        values = np.zeros((len(times), n_dof))
        if index is None:
            values[:] = [np.asarray(func(s), dtype=float) for s in times]
        else:
            values[:, index] = [float(func(s)) for s in times]
        return cls(values, step)


class Displacements(NamedTuple):
    R: np.ndarray
    Rdot: np.ndarray
    Rcheck: np.ndarray


def _cells(force: ForceProfile, t: float):
    """Integration cells on [0, t] aligned with the force grid.

    Returns cell starts, lengths and force values at both ends; the force is
    linear inside every cell.
    """
    h = force.step
    if t < 0 or t > force.t_end * (1 + 1e-12) + 1e-12:
        raise ValueError("t=%r outside the force profile [0, %r]" % (t, force.t_end))
    k_full = min(int(np.floor(t / h)), force.n_samples - 1)
    starts = np.arange(k_full) * h
    ends = starts + h
    if t - k_full * h > 0:
        starts = np.append(starts, k_full * h)
        ends = np.append(ends, t)
    fa = force(starts)
    fb = force(ends)
    return starts, ends - starts, fa.reshape(-1, force.n_dof), fb.reshape(-1, force.n_dof)


def _check_force(spectrum: Spectrum, force: ForceProfile):
    if force.n_samples < 3:
        raise GridTooCoarse("force profile needs at least 3 samples, got %d" % force.n_samples)
    if force.n_dof != spectrum.n_dof:
        raise DimensionMismatch(
            "force has %d components, system %d" % (force.n_dof, spectrum.n_dof)
        )


def drive_displacements(spectrum: Spectrum, force: ForceProfile, t: float) -> Displacements:
    """Drive displacements at time ``t``.

    ``R(t) = int_0^t F(t-s) f(s) ds``, ``Rdot(t) = int_0^t Fdot(t-s) f(s) ds``
    and ``Rcheck(t) = int_0^t F(s) f(s) ds``.
    """
    _check_force(spectrum, force)
    z, X = spectrum.z, spectrum.X
    a, L, fa, fb = _cells(force, t)
    s = a[:, None] + L[:, None] * _GL_X  # (cells, m)
    w = L[:, None] * _GL_W
    fm = (fa @ X)[:, None, :] + ((fb - fa) @ X)[:, None, :] * _GL_X[None, :, None]
    wf = w[..., None] * fm  # (cells, m, modes)
    zs = z * s[..., None]
    zts = z * (t - s)[..., None]
    R = np.sum(wf * np.sin(zts), axis=(0, 1)) / z
    Rdot = np.sum(wf * np.cos(zts), axis=(0, 1))
    Rcheck = np.sum(wf * np.sin(zs), axis=(0, 1)) / z
    return Displacements(X @ R, X @ Rdot, X @ Rcheck)


def zeta(spectrum: Spectrum, force: ForceProfile, t: float, eps: float = CAUSTIC_EPS) -> float:
    """Drive phase

        zeta(t) = (1/hbar) int_0^t ds int_0^s du f(s).W(s, u).f(u),
        W(s, u) = X diag(sin(z u) sin(z (t-s)) / (z sin(z t))) X^T.

    Evaluated mode by mode with nested Gauss-Legendre rules on every force
    cell; the inner integral is accumulated across cells.
    """
    _check_force(spectrum, force)
    z, X, hb = spectrum.z, spectrum.X, spectrum.hbar
    szt = np.sin(z * t)
    bad = np.flatnonzero(np.abs(szt) < eps)
    if bad.size:
        raise CausticError(t, int(bad[0]), szt[bad[0]])
    a, L, fa, fb = _cells(force, t)
    if not len(a):
        return 0.0
    fa_m, df_m = fa @ X, (fb - fa) @ X  # (cells, modes)

    # outer nodes
    xi = _GL_X
    s = a[:, None] + L[:, None] * xi  # (c, i)
    w = L[:, None] * _GL_W
    f_out = fa_m[:, None, :] + df_m[:, None, :] * xi[None, :, None]  # (c, i, modes)
    g_integrand = w[..., None] * f_out * np.sin(z * s[..., None])
    cell_tot = g_integrand.sum(axis=1)  # (c, modes)
    g_start = np.cumsum(cell_tot, axis=0) - cell_tot

    # inner nodes on [a_c, s_ci]: u = a + L*xi_i*xi_j
    frac = xi[:, None] * xi[None, :]  # (i, j)
    u = a[:, None, None] + L[:, None, None] * frac
    wu = L[:, None, None] * xi[:, None] * _GL_W[None, :]
    f_in = fa_m[:, None, None, :] + df_m[:, None, None, :] * frac[None, :, :, None]
    g_partial = np.sum(wu[..., None] * f_in * np.sin(z * u[..., None]), axis=2)  # (c, i, modes)
    G = g_start[:, None, :] + g_partial

    outer = np.sum(w[..., None] * f_out * np.sin(z * (t - s)[..., None]) * G, axis=(0, 1))
    return float(np.sum(outer / (z * szt)) / hb)


def forced_form(
    spectrum: Spectrum, force: ForceProfile, t: float, eps: float = CAUSTIC_EPS
) -> PropagatorForm:
    """Propagator form including the linear and phase terms of the drive."""
    base = propagator_form(spectrum, t, eps)
    Finv = -0.5 * base.Mcross
    disp = drive_displacements(spectrum, force, t)
    k = -1j / spectrum.hbar
    return replace(
        base,
        linear_y=k * (Finv @ disp.Rcheck),
        linear_yprime=k * (Finv @ disp.R),
        phase0=-1j * zeta(spectrum, force, t, eps),
    )


def evaluate_K_forced(spectrum: Spectrum, force: ForceProfile, t: float, y, yprime):
    return evaluate_K(forced_form(spectrum, force, t), y, yprime)
