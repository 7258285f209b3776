"""Oscillator-bath system definition and its Langevin-level quantities.

The main oscillator (index 0) with frequency ``omega0`` couples linearly to
``N`` bath oscillators.  All dynamics is generated by the symmetric arrowhead
matrix

    B = [[omega0^2, -g_1, ..., -g_N],
         [-g_1,  omega_1^2,        ],
         [ ...            ...      ],
         [-g_N,         omega_N^2 ]]
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping

import numpy as np

from .errors import (
    AtPole,
    EigenFailure,
    NonPositiveEigenvalue,
    NonPositiveFrequency,
    PoleInput,
    UnstableModel,
)

# sign convention threshold: entries below this count as zero when fixing
# eigenvector orientation
_SIGN_TOL = 1e-13


@dataclass(frozen=True)
class Model:
    """Main oscillator plus a discrete harmonic bath.

    Parameters
    ----------
    omega0 : float
        Bare frequency of the main oscillator.
    baths : sequence of (omega_k, g_k) pairs
        Bath frequencies and couplings (coupling has units frequency^2).
    hbar : float, optional
        Action scale, default 1.

    Instances are validated on construction; an indefinite ``B`` raises
    :class:`UnstableModel`.
    """

    omega0: float
    baths: tuple = ()
    hbar: float = 1.0

    def __post_init__(self):
        baths = tuple((float(w), float(g)) for w, g in self.baths)
        object.__setattr__(self, "baths", baths)
        object.__setattr__(self, "omega0", float(self.omega0))
        object.__setattr__(self, "hbar", float(self.hbar))

        values = [self.omega0, self.hbar] + [v for pair in baths for v in pair]
        if not all(np.isfinite(values)):
            raise NonPositiveFrequency("model fields must be finite numbers")
        if self.omega0 <= 0:
            raise NonPositiveFrequency("omega0 must be > 0, got %r" % self.omega0)
        if self.hbar <= 0:
            raise NonPositiveFrequency("hbar must be > 0, got %r" % self.hbar)
        for k, (w, _) in enumerate(baths, start=1):
            if w <= 0:
                raise NonPositiveFrequency("bath %d: omega must be > 0, got %r" % (k, w))
        schur = self.schur_complement
        if not schur > 0:
            raise UnstableModel(schur)

    @property
    def n_baths(self) -> int:
        return len(self.baths)

    @property
    def n_dof(self) -> int:
        return len(self.baths) + 1

    @property
    def omegas(self) -> np.ndarray:
        return np.array([w for w, _ in self.baths], dtype=float)

    @property
    def couplings(self) -> np.ndarray:
        return np.array([g for _, g in self.baths], dtype=float)

    @property
    def schur_complement(self) -> float:
        """omega0^2 - sum_k g_k^2 / omega_k^2; positive iff B is positive definite."""
        w, g = self.omegas, self.couplings
        return self.omega0**2 - float(np.sum(g**2 / w**2)) if len(w) else self.omega0**2


def validate_model(spec: Mapping) -> Model:
    """Build a :class:`Model` from raw config fields.

    Accepts ``{"omega0": ..., "hbar": ..., "baths": [{"omega": ..., "g": ...}, ...]}``;
    bath entries may also be ``(omega, g)`` pairs.
    """
    baths = []
    for entry in spec.get("baths", ()) or ():
        if isinstance(entry, Mapping):
            baths.append((entry["omega"], entry["g"]))
        else:
            w, g = entry
            baths.append((w, g))
    return Model(omega0=spec["omega0"], baths=tuple(baths), hbar=spec.get("hbar", 1.0))


def build_B(model: Model) -> np.ndarray:
    n = model.n_dof
    B = np.zeros((n, n))
    B[0, 0] = model.omega0**2
    if n > 1:
        idx = np.arange(1, n)
        B[idx, idx] = model.omegas**2
        B[0, 1:] = -model.couplings
        B[1:, 0] = -model.couplings
    return B


@dataclass(frozen=True, eq=False)
class Spectrum:
    """Normal modes of ``B``.

    Attributes
    ----------
    z : ndarray (N+1,)
        Normal-mode frequencies, ascending.
    X : ndarray (N+1, N+1)
        Orthogonal matrix, column ``alpha`` is the eigenvector of ``z[alpha]**2``.
    B : ndarray (N+1, N+1)
        The matrix that was diagonalized.
    hbar : float
    """

    z: np.ndarray
    X: np.ndarray
    B: np.ndarray
    hbar: float = 1.0

    @property
    def n_dof(self) -> int:
        return len(self.z)

    @property
    def bath_omegas(self) -> np.ndarray:
        return np.sqrt(np.diag(self.B)[1:])

    def mode_matrix(self, values) -> np.ndarray:
        """X diag(values) X^T, symmetrized."""
        M = (self.X * np.asarray(values)) @ self.X.T
        return 0.5 * (M + M.T)


def spectrum(B, hbar: float | None = None) -> Spectrum:
    """Diagonalize ``B`` (or the ``B`` of a :class:`Model`).

    Eigenvector columns are oriented so that ``X[0, alpha] >= 0``; when that
    entry vanishes the first nonzero entry is made positive.
    """
    if isinstance(B, Model):
        hbar = B.hbar if hbar is None else hbar
        B = build_B(B)
    hbar = 1.0 if hbar is None else float(hbar)
    B = np.asarray(B, dtype=float)
    try:
        z2, X = np.linalg.eigh(B)
    except np.linalg.LinAlgError as exc:
        raise EigenFailure(str(exc)) from exc
    if not (np.all(np.isfinite(z2)) and np.all(np.isfinite(X))):
        raise EigenFailure("eigensolver returned non-finite values")
    if np.any(z2 <= 0):
        raise NonPositiveEigenvalue("B has eigenvalue %.17g <= 0" % z2.min())
    for a in range(X.shape[1]):
        col = X[:, a]
        nz = np.flatnonzero(np.abs(col) > _SIGN_TOL)
        if nz.size and col[nz[0]] < 0:
            X[:, a] = -col
    return Spectrum(z=np.sqrt(z2), X=X, B=B, hbar=hbar)


def char_g(model: Model, z2: float) -> float:
    """Characteristic function z^2 - omega0^2 - sum_k g_k^2/(z^2 - omega_k^2).

    Its zeros are the normal-mode frequencies squared.
    """
    w2 = model.omegas**2
    g2 = model.couplings**2
    if len(w2) and np.any(np.abs(z2 - w2) <= 1e-12 * np.maximum(np.abs(w2), 1.0)):
        raise PoleInput("z^2=%.17g coincides with a bath frequency squared" % z2)
    return float(z2 - model.omega0**2 - np.sum(g2 / (z2 - w2)))


def susceptibility(model: Model, t):
    """chi(t) = sum_k g_k^2 sin(omega_k t)/omega_k; vectorized over ``t``."""
    t = np.asarray(t, dtype=float)
    w, g = model.omegas, model.couplings
    out = np.sum(g**2 * np.sin(np.multiply.outer(t, w)) / w, axis=-1)
    return float(out) if out.ndim == 0 else out


def susceptibility_laplace(model: Model, s: float) -> float:
    w, g = model.omegas, model.couplings
    return float(np.sum(g**2 / (s**2 + w**2)))


def green(model: Model, *, s: float | None = None, omega: float | None = None) -> float:
    """Green function of the main oscillator.

    Exactly one of ``s`` (Laplace variable) or ``omega`` (real frequency)
    must be given.  The frequency-domain value is ``-1/char_g(omega^2)``,
    i.e. the Laplace form evaluated at ``s = i omega``.
    """
    if (s is None) == (omega is None):
        raise TypeError("pass exactly one of s= or omega=")
    if s is not None:
        denom = s**2 + model.omega0**2 - susceptibility_laplace(model, s)
        if abs(denom) < 1e-14 * max(model.omega0**2, s**2):
            raise AtPole("Laplace-domain Green function has a pole at s=%.17g" % s)
        return 1.0 / denom
    g = char_g(model, omega**2)
    if abs(g) < 1e-14 * max(model.omega0**2, omega**2):
        raise AtPole("omega=%.17g is a normal-mode frequency" % omega)
    return -1.0 / g


def noise_coefficients(model: Model, t: float):
    """Coefficients of Y_k(0) and P_k(0) in the noise operator at time ``t``.

    Returns
    -------
    c, s : ndarray (N,)
        ``c_k = g_k cos(omega_k t)``, ``s_k = g_k sin(omega_k t)/omega_k``.
    """
    w, g = model.omegas, model.couplings
    return g * np.cos(w * t), g * np.sin(w * t) / w


def noise_correlation(model: Model, beta: float, t: float, tp: float) -> float:
    """Symmetrized thermal noise correlation of an initially thermal bath."""
    w, g = model.omegas, model.couplings
    hb = model.hbar
    return float(np.sum(g**2 * hb / (2 * w) / np.tanh(beta * hb * w / 2) * np.cos(w * (t - tp))))
