"""Gaussian states and complex Gaussian integrals.

Phase-space vectors are ordered ``(y_0, ..., y_N, p_0, ..., p_N)``.
Covariances are symmetrized, ``cov_ij = <{dx_i, dx_j}>/2``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DimensionMismatch, NonConvergentGaussian
from .matfun import MatFun


def symplectic_form(n_dof: int) -> np.ndarray:
    eye = np.eye(n_dof)
    zero = np.zeros((n_dof, n_dof))
    return np.block([[zero, eye], [-eye, zero]])


@dataclass(frozen=True, eq=False)
class GaussianState:
    mean: np.ndarray
    cov: np.ndarray
    hbar: float = 1.0

    def __post_init__(self):
        mean = np.asarray(self.mean, dtype=float)
        cov = np.asarray(self.cov, dtype=float)
        if mean.ndim != 1 or mean.size % 2 or cov.shape != (mean.size, mean.size):
            raise DimensionMismatch(
                "mean of length 2(N+1) and matching square cov required, got %s and %s"
                % (mean.shape, cov.shape)
            )
        object.__setattr__(self, "mean", mean)
        object.__setattr__(self, "cov", cov)

    @property
    def n_dof(self) -> int:
        return self.mean.size // 2

    def uncertainty_eigenvalues(self) -> np.ndarray:
        """Eigenvalues of cov + (i hbar/2) J; all >= 0 for a physical state."""
        J = symplectic_form(self.n_dof)
        return np.linalg.eigvalsh(self.cov + 0.5j * self.hbar * J)

    def is_physical(self, tol: float = 1e-10) -> bool:
        sym = np.max(np.abs(self.cov - self.cov.T), initial=0.0) <= 1e-12 * max(
            1.0, np.max(np.abs(self.cov))
        )
        return bool(sym and self.uncertainty_eigenvalues().min() >= -tol)


def _thermal_variances(omega, beta, hbar):
    coth = 1.0 / np.tanh(0.5 * beta * hbar * omega)
    return 0.5 * hbar / omega * coth, 0.5 * hbar * omega * coth


def thermal_bath_state(model, beta: float, main_state=None) -> GaussianState:
    """Product of a main-oscillator Gaussian and a thermal bath.

    Parameters
    ----------
    model : Model
    beta : float
        Inverse bath temperature.
    main_state : object with ``mean_y, mean_p, var_y, var_p, cov_yp``, optional
        Initial single-mode state of the main oscillator.  Defaults to the
        ground state of the bare main oscillator.
    """
    if not beta > 0:
        raise ValueError("beta must be > 0, got %r" % beta)
    n = model.n_dof
    hb = model.hbar
    mean = np.zeros(2 * n)
    cov = np.zeros((2 * n, 2 * n))
    if main_state is None:
        mean_y = mean_p = cov_yp = 0.0
        var_y, var_p = 0.5 * hb / model.omega0, 0.5 * hb * model.omega0
    else:
        mean_y, mean_p = main_state.mean_y, main_state.mean_p
        var_y, var_p, cov_yp = main_state.var_y, main_state.var_p, main_state.cov_yp
    mean[0], mean[n] = mean_y, mean_p
    cov[0, 0], cov[n, n] = var_y, var_p
    cov[0, n] = cov[n, 0] = cov_yp
    if n > 1:
        vy, vp = _thermal_variances(model.omegas, beta, hb)
        idx = np.arange(1, n)
        cov[idx, idx] = vy
        cov[idx + n, idx + n] = vp
    return GaussianState(mean=mean, cov=cov, hbar=hb)


def symplectic_map(mf: MatFun) -> np.ndarray:
    """Linear phase-space flow ``[[Fdot, F], [-B F, Fdot]]``."""
    return np.block([[mf.Fdot, mf.F], [mf.Fddot, mf.Fdot]])


def evolve_state(state: GaussianState, mf: MatFun, displacements=None) -> GaussianState:
    """Heisenberg evolution of first and second moments to time ``mf.t``.

    ``displacements`` is the ``(R, Rdot, Rcheck)`` triple of a drive; the
    means are shifted by ``-(R, Rdot)``.
    """
    if state.n_dof != mf.spectrum.n_dof:
        raise DimensionMismatch(
            "state has %d degrees of freedom, propagator %d" % (state.n_dof, mf.spectrum.n_dof)
        )
    S = symplectic_map(mf)
    mean = S @ state.mean
    if displacements is not None:
        mean = mean - np.concatenate([displacements[0], displacements[1]])
    cov = S @ state.cov @ S.T
    return GaussianState(mean=mean, cov=0.5 * (cov + cov.T), hbar=state.hbar)


# ---------------------------------------------------------------------------
# complex Gaussian integrals


def _check_convergent(Gamma):
    re = np.real(Gamma)
    lam = np.linalg.eigvalsh(0.5 * (re + re.T))
    if lam.size and lam.min() < 1e-12:
        raise NonConvergentGaussian(
            "real part of the quadratic form is not positive definite (min eigenvalue %.3e)"
            % lam.min()
        )


def log_det_inv_sqrt(Gamma) -> complex:
    """log det(Gamma)^(-1/2) on the branch continuous from real positive Gamma.

    With Re Gamma positive definite every eigenvalue has positive real part,
    so each principal square root is continuous in Gamma.
    """
    lam = np.linalg.eigvals(np.asarray(Gamma, dtype=complex))
    return complex(-0.5 * np.sum(np.log(lam)))


def gaussian_integral(Gamma, j) -> complex:
    """int d^n x exp(-x.Gamma.x/2 + j.x) = (2 pi)^(n/2) det(Gamma)^(-1/2) exp(j.Gamma^-1.j/2)."""
    Gamma = np.atleast_2d(np.asarray(Gamma, dtype=complex))
    j = np.atleast_1d(np.asarray(j, dtype=complex))
    n = Gamma.shape[0]
    if Gamma.shape != (n, n) or j.shape != (n,):
        raise DimensionMismatch("Gamma must be n x n and j length n")
    _check_convergent(Gamma)
    sol = np.linalg.solve(Gamma, j)
    return np.exp(0.5 * n * np.log(2 * np.pi) + log_det_inv_sqrt(Gamma) + 0.5 * j @ sol)


@dataclass(frozen=True, eq=False)
class GaussianForm:
    """The function ``exp(-x.Q.x/2 + l.x + c)`` of complex-symmetric ``Q``."""

    Q: np.ndarray
    l: np.ndarray
    c: complex = 0.0

    def __post_init__(self):
        Q = np.asarray(self.Q, dtype=complex)
        object.__setattr__(self, "Q", 0.5 * (Q + Q.T))
        object.__setattr__(self, "l", np.asarray(self.l, dtype=complex))
        object.__setattr__(self, "c", complex(self.c))

    @property
    def dim(self) -> int:
        return self.Q.shape[0]

    def __call__(self, x):
        x = np.asarray(x)
        quad = np.einsum("...i,ij,...j->...", x, self.Q, x)
        return np.exp(-0.5 * quad + x @ self.l + self.c)

    def __mul__(self, other: "GaussianForm") -> "GaussianForm":
        return GaussianForm(self.Q + other.Q, self.l + other.l, self.c + other.c)

    def change_variables(self, T) -> "GaussianForm":
        """Substitute ``x = T w``; returns the form in ``w``."""
        T = np.asarray(T)
        return GaussianForm(T.T @ self.Q @ T, T.T @ self.l, self.c)

    def integrate(self, drop) -> "GaussianForm":
        """Integrate out the variables listed in ``drop`` over the real line."""
        drop = np.asarray(drop, dtype=int)
        keep = np.setdiff1d(np.arange(self.dim), drop)
        G = self.Q[np.ix_(drop, drop)]
        _check_convergent(G)
        Qkd = self.Q[np.ix_(keep, drop)]
        ld = self.l[drop]
        # solve once for both the coupling block and the linear term
        sol = np.linalg.solve(G, np.column_stack([Qkd.T, ld]))
        GinvQdk, Ginvl = sol[:, :-1], sol[:, -1]
        Q = self.Q[np.ix_(keep, keep)] - Qkd @ GinvQdk
        l = self.l[keep] - Qkd @ Ginvl
        c = self.c + 0.5 * len(drop) * np.log(2 * np.pi) + log_det_inv_sqrt(G) + 0.5 * ld @ Ginvl
        return GaussianForm(Q, l, c)

    def total(self) -> complex:
        """Integral over all variables."""
        return np.exp(self.integrate(np.arange(self.dim)).c)
