"""Time-ordered position correlators from the driven propagator.

The driven kernel ``K[f]`` is a generating functional: with the force
entering the Hamiltonian as ``+f.Y``,

    <y,t| T[Y_mu1(t1) ... Y_mun(tn)] |y',0> / K
        = (i hbar)^n  (1/K) delta^n K[f] / delta f_mu1(t1) ... delta f_mun(tn)  at f = 0.

``log K[f]`` is quadratic in ``f``, so one- and two-point functions have
closed forms; :func:`n_point_fd` evaluates any order by finite differences
of :func:`~oscbath.propagator.evaluate_K_forced` and serves as their check.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from .errors import DimensionMismatch, StepCollision, TimeOutOfRange
from .matfun import CAUSTIC_EPS, f_inverse, matfun_at
from .model import Spectrum
from .propagator import ForceProfile, evaluate_K_forced

# factor turning a functional derivative of log K into one position insertion
INSERTION_FACTOR = 1j


@dataclass(frozen=True)
class Endpoint:
    """Matrix element ``<y, t| ... |y', 0>``; ``y`` and ``yprime`` have length N+1."""

    y: tuple
    yprime: tuple
    t: float

    def __post_init__(self):
        y = tuple(float(v) for v in np.atleast_1d(self.y))
        yp = tuple(float(v) for v in np.atleast_1d(self.yprime))
        if len(y) != len(yp):
            raise DimensionMismatch("y and yprime lengths differ: %d vs %d" % (len(y), len(yp)))
        if not self.t > 0:
            raise TimeOutOfRange("endpoint time must be > 0, got %r" % self.t)
        object.__setattr__(self, "y", y)
        object.__setattr__(self, "yprime", yp)
        object.__setattr__(self, "t", float(self.t))


@dataclass(frozen=True)
class CorrelatorRequest:
    times: tuple
    indices: tuple
    endpoint: Endpoint
    fd_step: float = 1e-4
    grid_step: float = 1e-3

    def __post_init__(self):
        object.__setattr__(self, "times", tuple(float(s) for s in self.times))
        object.__setattr__(self, "indices", tuple(int(i) for i in self.indices))
        if len(self.times) != len(self.indices):
            raise DimensionMismatch("times and indices must have equal length")
        if not self.times:
            raise DimensionMismatch("at least one insertion is required")
        if not (self.fd_step > 0 and self.grid_step > 0):
            raise ValueError("fd_step and grid_step must be > 0")


def _check_times(spectrum: Spectrum, endpoint: Endpoint, pairs):
    n = spectrum.n_dof
    if len(endpoint.y) != n:
        raise DimensionMismatch("endpoint has %d coordinates, system %d" % (len(endpoint.y), n))
    for s, mu in pairs:
        if not 0.0 < s < endpoint.t:
            raise TimeOutOfRange("insertion time %r outside (0, %r)" % (s, endpoint.t))
        if not 0 <= mu < n:
            raise DimensionMismatch("coordinate index %d outside [0, %d]" % (mu, n - 1))


def _linear_terms(spectrum, endpoint, t1, eps):
    """Classical path ``y_cl(t1) = F(t1) F^-1(t) y + F(t - t1) F^-1(t) y'``.

    This is ``i hbar`` times the first derivative of log K (all components).
    """
    t = endpoint.t
    Finv = f_inverse(matfun_at(spectrum, t), eps)
    y = np.asarray(endpoint.y)
    yp = np.asarray(endpoint.yprime)
    F1 = matfun_at(spectrum, t1).F
    F2 = matfun_at(spectrum, t - t1).F
    return F1 @ (Finv @ y) + F2 @ (Finv @ yp)


def one_point(spectrum: Spectrum, endpoint: Endpoint, t1: float, mu: int, eps=CAUSTIC_EPS) -> complex:
    """``<y,t| Y_mu(t1) |y',0> / K``; real, equal to the classical path at ``t1``."""
    _check_times(spectrum, endpoint, [(t1, mu)])
    return complex(_linear_terms(spectrum, endpoint, t1, eps)[mu])


def connected_kernel(spectrum: Spectrum, t: float, s: float, u: float, eps=CAUSTIC_EPS) -> np.ndarray:
    """``W(s, u) = X diag(sin(z u) sin(z (t-s)) / (z sin(z t))) X^T`` for ``u <= s``."""
    z = spectrum.z
    mf = matfun_at(spectrum, t)
    f_inverse(mf, eps)  # caustic check
    return spectrum.mode_matrix(np.sin(z * u) * np.sin(z * (t - s)) / (z * mf.sin_zt))


def two_point(
    spectrum: Spectrum, endpoint: Endpoint, t1: float, mu: int, t2: float, nu: int, eps=CAUSTIC_EPS
) -> complex:
    """``<y,t| T[Y_mu(t1) Y_nu(t2)] |y',0> / K``.

    Product of the classical paths plus the connected part
    ``(i hbar)^2 * (-i/hbar) W = i hbar W(t_>, t_<)``.
    """
    _check_times(spectrum, endpoint, [(t1, mu), (t2, nu)])
    y1 = _linear_terms(spectrum, endpoint, t1, eps)[mu]
    y2 = _linear_terms(spectrum, endpoint, t2, eps)[nu]
    late, early = max(t1, t2), min(t1, t2)
    W = connected_kernel(spectrum, endpoint.t, late, early, eps)
    return complex(y1 * y2 + INSERTION_FACTOR * spectrum.hbar * W[mu, nu])


def _spike_force(spectrum, request):
    """Unit-area hat for every insertion, split linearly over neighbouring nodes."""
    h = request.grid_step
    t = request.endpoint.t
    n_samples = max(ForceProfile.n_samples_for(t, h), 3)
    spikes = []
    for s, mu in zip(request.times, request.indices):
        k = int(np.floor(s / h))
        theta = s / h - k
        v = np.zeros((n_samples, spectrum.n_dof))
        v[k, mu] += (1.0 - theta) / h
        if theta > 0:
            v[k + 1, mu] += theta / h
        spikes.append(v)
    return spikes, n_samples


def _nested_difference(spectrum, request, spikes, n_samples, amp):
    ep = request.endpoint
    y, yp = np.asarray(ep.y), np.asarray(ep.yprime)
    zero = ForceProfile(np.zeros((n_samples, spectrum.n_dof)), request.grid_step)
    K0 = evaluate_K_forced(spectrum, zero, ep.t, y, yp)
    total = 0.0j
    for signs in itertools.product((1.0, -1.0), repeat=len(spikes)):
        v = sum(sg * amp * sp for sg, sp in zip(signs, spikes))
        K = evaluate_K_forced(spectrum, ForceProfile(v, request.grid_step), ep.t, y, yp)
        total += np.prod(signs) * K
    return total / ((2.0 * amp) ** len(spikes) * K0)


def n_point_fd(spectrum: Spectrum, request: CorrelatorRequest) -> complex:
    """Time-ordered correlator of any order by finite functional differences.

    Each functional derivative is a hat spike of unit area on the force grid;
    the nested central difference over spike amplitudes ``+-fd_step`` is
    combined with the half-step result by one Richardson step.  For orders
    above two the amplitude is raised to ``eps_mach^(1/(n+2))`` if larger.
    """
    ep = request.endpoint
    _check_times(spectrum, ep, zip(request.times, request.indices))
    order = np.sort(np.asarray(request.times))
    if order.size > 1 and np.min(np.diff(order)) < 2.0 * request.grid_step:
        raise StepCollision(
            "insertion times closer than 2*grid_step=%g" % (2.0 * request.grid_step)
        )
    spikes, n_samples = _spike_force(spectrum, request)
    # roundoff in an n-th difference grows like eps/amp^n; log K is exactly
    # quadratic in the amplitudes, so a larger step costs no truncation error
    amp = max(request.fd_step, np.finfo(float).eps ** (1.0 / (len(spikes) + 2)))
    d1 = _nested_difference(spectrum, request, spikes, n_samples, amp)
    d2 = _nested_difference(spectrum, request, spikes, n_samples, 0.5 * amp)
    deriv = (4.0 * d2 - d1) / 3.0
    return complex((INSERTION_FACTOR * spectrum.hbar) ** len(spikes) * deriv)
