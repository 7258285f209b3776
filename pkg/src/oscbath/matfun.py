"""Matrix functions of B: F(t) = sin(sqrt(B) t)/sqrt(B), Fdot(t) = cos(sqrt(B) t).

Everything is evaluated through the eigendecomposition held in a
:class:`~oscbath.model.Spectrum`, so results are exact for any ``t``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import CausticError
from .model import Spectrum

CAUSTIC_EPS = 1e-8
# beyond this hbar*beta*z the bare cosh/sinh matrices are not formed
_HYPERBOLIC_CUTOFF = 700.0


@dataclass(frozen=True, eq=False)
class MatFun:
    """F, its first two time derivatives and det F at a single time."""

    t: float
    F: np.ndarray
    Fdot: np.ndarray
    Fddot: np.ndarray
    detF: float
    caustic_flags: np.ndarray
    spectrum: Spectrum
    sin_zt: np.ndarray
    cos_zt: np.ndarray


@dataclass(frozen=True, eq=False)
class Blocks:
    """Partition of F^-1 Fdot = [[a, B^T], [B, A]] and F^-1 = [[b, C^T], [C, D]]."""

    a: float
    b: float
    Bvec: np.ndarray
    Cvec: np.ndarray
    A: np.ndarray
    D: np.ndarray

    def assemble(self):
        """Return the full ``(F^-1 Fdot, F^-1)`` matrices."""
        return _join(self.a, self.Bvec, self.A), _join(self.b, self.Cvec, self.D)


def _join(corner, vec, block):
    n = len(vec) + 1
    M = np.empty((n, n))
    M[0, 0] = corner
    M[0, 1:] = vec
    M[1:, 0] = vec
    M[1:, 1:] = block
    return M


def _split(M):
    return M[0, 0], M[1:, 0].copy(), M[1:, 1:].copy()


def matfun_at(spectrum: Spectrum, t: float, eps: float = CAUSTIC_EPS) -> MatFun:
    t = float(t)
    z = spectrum.z
    s = np.sin(z * t)
    c = np.cos(z * t)
    F = spectrum.mode_matrix(s / z)
    Fdot = spectrum.mode_matrix(c)
    Fddot = spectrum.mode_matrix(-z * s)
    return MatFun(
        t=t,
        F=F,
        Fdot=Fdot,
        Fddot=Fddot,
        detF=float(np.prod(s / z)),
        caustic_flags=np.abs(s) < eps,
        spectrum=spectrum,
        sin_zt=s,
        cos_zt=c,
    )


def _check_caustic(mf: MatFun, eps: float):
    bad = np.flatnonzero(np.abs(mf.sin_zt) < eps)
    if bad.size:
        a = int(bad[0])
        raise CausticError(mf.t, a, mf.sin_zt[a])


def f_inverse(mf: MatFun, eps: float = CAUSTIC_EPS) -> np.ndarray:
    """F(t)^-1 = X diag(z/sin(z t)) X^T.

    Raises
    ------
    CausticError
        If any ``|sin(z_alpha t)| < eps``.
    """
    _check_caustic(mf, eps)
    return mf.spectrum.mode_matrix(mf.spectrum.z / mf.sin_zt)


def finv_fdot(mf: MatFun, eps: float = CAUSTIC_EPS) -> np.ndarray:
    """F(t)^-1 Fdot(t) = X diag(z cot(z t)) X^T."""
    _check_caustic(mf, eps)
    return mf.spectrum.mode_matrix(mf.spectrum.z * mf.cos_zt / mf.sin_zt)


def blocks_at(mf: MatFun, eps: float = CAUSTIC_EPS) -> Blocks:
    a, Bvec, A = _split(finv_fdot(mf, eps))
    b, Cvec, D = _split(f_inverse(mf, eps))
    return Blocks(a=a, b=b, Bvec=Bvec, Cvec=Cvec, A=A, D=D)


def _coth_csch(x):
    # exp(-2x) form is overflow free for all x > 0
    e2 = np.exp(-2.0 * x)
    coth = (1.0 + e2) / -np.expm1(-2.0 * x)
    csch = 2.0 * np.exp(-x) / -np.expm1(-2.0 * x)
    return coth, csch


@dataclass(frozen=True, eq=False)
class HyperbolicBlocks:
    """Real analogs of the block functions at imaginary time t = -i hbar beta.

    With ``x_alpha = z_alpha hbar beta`` the continuation gives
    ``F = -i Fh``, ``Fdot = Fdoth`` and hence ``F^-1 Fdot = i Mh``,
    ``F^-1 = i Nh`` with the real symmetric matrices

        Mh = X diag(z coth x) X^T,   Nh = X diag(z / sinh x) X^T.

    ``a, Bvec, A`` partition ``Mh`` and ``b, Cvec, D`` partition ``Nh``; each
    complex-time quantity equals ``i`` times its analog here.  The differences that
    enter the equilibrium state are computed from
    ``Mh - Nh = X diag(z tanh(x/2)) X^T`` directly to avoid cancellation.
    """

    beta: float
    x: np.ndarray
    spectrum: Spectrum
    a: float
    b: float
    Bvec: np.ndarray
    Cvec: np.ndarray
    A: np.ndarray
    D: np.ndarray
    a_minus_b: float
    B_minus_C: np.ndarray
    A_minus_D: np.ndarray
    a_plus_b: float

    @property
    def Fh(self) -> np.ndarray:
        """X diag(sinh(x)/z) X^T; not representable past the overflow guard."""
        return self.spectrum.mode_matrix(_big_hyperbolic(self.x, -1.0) / self.spectrum.z)

    @property
    def Fdoth(self) -> np.ndarray:
        """X diag(cosh x) X^T; not representable past the overflow guard.

        Use :attr:`log_det_Fdoth_minus_I` and the block analogs for large beta.
        """
        return self.spectrum.mode_matrix(_big_hyperbolic(self.x, 1.0))

    @property
    def log_det_Fdoth_minus_I(self) -> float:
        # cosh x - 1 = 2 sinh^2(x/2)
        return float(np.sum(np.log(2.0) + 2.0 * _log_sinh(self.x / 2.0)))


def _log_sinh(x):
    return x + np.log(-np.expm1(-2.0 * x)) - np.log(2.0)


def _big_hyperbolic(x, sign):
    # cosh (sign=+1) or sinh (sign=-1)
    if np.any(x > _HYPERBOLIC_CUTOFF):
        raise FloatingPointError(
            "cosh/sinh of %.6g overflows; use the logarithmic or block forms" % x.max()
        )
    return 0.5 * (np.exp(x) + sign * np.exp(-x))


def imaginary_time_blocks(spectrum: Spectrum, beta: float) -> HyperbolicBlocks:
    if not beta > 0:
        raise ValueError("beta must be > 0, got %r" % beta)
    z = spectrum.z
    x = z * spectrum.hbar * beta
    coth, csch = _coth_csch(x)
    Mh = spectrum.mode_matrix(z * coth)
    Nh = spectrum.mode_matrix(z * csch)
    diff = spectrum.mode_matrix(z * np.tanh(x / 2.0))
    summ = spectrum.mode_matrix(z / np.tanh(x / 2.0))
    a, Bvec, A = _split(Mh)
    b, Cvec, D = _split(Nh)
    amb, BmC, AmD = _split(diff)
    return HyperbolicBlocks(
        beta=float(beta),
        x=x,
        spectrum=spectrum,
        a=a,
        b=b,
        Bvec=Bvec,
        Cvec=Cvec,
        A=A,
        D=D,
        a_minus_b=amb,
        B_minus_C=BmC,
        A_minus_D=AmD,
        a_plus_b=float(summ[0, 0]),
    )
