import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oscbath.errors import DimensionMismatch, NonConvergentGaussian
from oscbath.gaussian import (
    GaussianForm,
    GaussianState,
    evolve_state,
    gaussian_integral,
    log_det_inv_sqrt,
    symplectic_form,
    symplectic_map,
    thermal_bath_state,
)
from oscbath.matfun import matfun_at
from oscbath.model import Model, build_B, spectrum
from oscbath.oracle import quad_nd
from oscbath.propagator import ForceProfile, drive_displacements
from oscbath.reduced import ReducedGaussian, rho_red_grid

from conftest import stable_models


def test_thermal_bath_state_ground_limit(model2):
    st_ = thermal_bath_state(model2, 200.0)
    w = model2.omegas
    np.testing.assert_allclose(np.diag(st_.cov)[1:3], 0.5 / w, rtol=1e-14)
    np.testing.assert_allclose(np.diag(st_.cov)[4:6], 0.5 * w, rtol=1e-14)
    assert st_.cov[0, 0] == 0.5 and st_.cov[3, 3] == 0.5
    np.testing.assert_array_equal(st_.mean, 0.0)


@pytest.mark.parametrize("beta", [0.1, 1.0, 10.0])
def test_thermal_bath_state_physical(model2, beta):
    st_ = thermal_bath_state(model2, beta)
    assert st_.is_physical()
    assert st_.uncertainty_eigenvalues().min() >= -1e-10


def test_thermal_bath_state_main_moments(model1):
    main = ReducedGaussian(0.3, -0.1, 0.7, 0.6, 0.2)
    st_ = thermal_bath_state(model1, 1.0, main)
    assert st_.mean[0] == 0.3 and st_.mean[2] == -0.1
    assert st_.cov[0, 2] == st_.cov[2, 0] == 0.2
    with pytest.raises(ValueError):
        thermal_bath_state(model1, 0.0)


def test_thermal_position_kernel_coefficients():
    # exponent of the position-space bath density against the closed form
    w, beta, hb = 1.0, 1.0, 1.0
    st_ = thermal_bath_state(Model(2.0, ((w, 0.3),)), beta)
    red = ReducedGaussian(0.0, 0.0, st_.cov[1, 1], st_.cov[3, 3], 0.0, hb)
    grid = np.linspace(-2, 2, 9)
    rho = rho_red_grid(red, grid).real
    y1, y2 = np.meshgrid(grid, grid, indexing="ij")
    x = beta * hb * w
    expo = -w / (2 * hb * np.sinh(x)) * ((y1**2 + y2**2) * np.cosh(x) - 2 * y1 * y2)
    np.testing.assert_allclose(np.log(rho) - np.log(rho[4, 4]), expo, atol=1e-10)
    # the unnormalized closed-form prefactor differs by the factor 2 sinh(x/2)
    pref = np.sqrt(w / (2 * np.pi * hb * np.sinh(x)))
    assert rho[4, 4] == pytest.approx(pref * 2 * np.sinh(x / 2), rel=1e-12)


def test_symplectic_map_basics(spec2):
    np.testing.assert_allclose(symplectic_map(matfun_at(spec2, 0.0)), np.eye(6), atol=1e-15)
    S = symplectic_map(matfun_at(spec2, 1.3))
    J = symplectic_form(3)
    np.testing.assert_allclose(S @ J @ S.T, J, atol=1e-10)
    w, t = 1.4, 0.9
    S1 = symplectic_map(matfun_at(spectrum(Model(w)), t))
    ref = [[np.cos(w * t), np.sin(w * t) / w], [-w * np.sin(w * t), np.cos(w * t)]]
    np.testing.assert_allclose(S1, ref, atol=1e-15)


@given(stable_models(), st.floats(-3, 3), st.floats(-3, 3))
@settings(max_examples=40, deadline=None)
def test_symplectic_group_property(model, t1, t2):
    s = spectrum(model)
    S12 = symplectic_map(matfun_at(s, t1 + t2))
    S = symplectic_map(matfun_at(s, t2)) @ symplectic_map(matfun_at(s, t1))
    np.testing.assert_allclose(S12, S, atol=1e-9)


def test_decoupled_thermal_stationary():
    m = Model(1.3, ((0.8, 0.0), (2.1, 0.0)))
    s = spectrum(m)
    w = np.array([1.3, 0.8, 2.1])
    beta = 0.9
    coth = 1 / np.tanh(beta * w / 2)
    cov = np.diag(np.concatenate([0.5 / w * coth, 0.5 * w * coth]))
    st0 = GaussianState(np.zeros(6), cov)
    for t in np.linspace(0, 10, 11):
        np.testing.assert_allclose(evolve_state(st0, matfun_at(s, t)).cov, cov, atol=1e-10)


@given(stable_models(), st.floats(0, 5))
@settings(max_examples=30, deadline=None)
def test_evolution_preserves_det_and_uncertainty(model, t):
    st0 = thermal_bath_state(model, 0.7, ReducedGaussian(0.2, 0.1, 0.8, 0.5, 0.1))
    st1 = evolve_state(st0, matfun_at(spectrum(model), t))
    assert np.linalg.det(st1.cov) == pytest.approx(np.linalg.det(st0.cov), rel=1e-9)
    assert st1.is_physical()


def _rk4_classical(B, f, y0, p0, t_end, h):
    n = int(round(t_end / h))
    y, p = y0.copy(), p0.copy()
    acc = lambda s, yy: -B @ yy - f(s)
    for k in range(n):
        s = k * h
        k1y, k1p = p, acc(s, y)
        k2y, k2p = p + 0.5 * h * k1p, acc(s + h / 2, y + 0.5 * h * k1y)
        k3y, k3p = p + 0.5 * h * k2p, acc(s + h / 2, y + 0.5 * h * k2y)
        k4y, k4p = p + h * k3p, acc(s + h, y + h * k3y)
        y = y + h / 6 * (k1y + 2 * k2y + 2 * k3y + k4y)
        p = p + h / 6 * (k1p + 2 * k2p + 2 * k3p + k4p)
    return y, p


def test_driven_mean_trajectory_vs_ode(model1):
    s = spectrum(model1)
    t = 2.5
    fun = lambda u: np.array([0.4 * np.sin(1.2 * u), 0.0])
    force = ForceProfile.sample(fun, 2, t, 1e-3, index=None)
    st0 = GaussianState(np.array([0.3, -0.1, 0.2, 0.05]), np.eye(4))
    st1 = evolve_state(st0, matfun_at(s, t), drive_displacements(s, force, t))
    y, p = _rk4_classical(build_B(model1), fun, st0.mean[:2], st0.mean[2:], t, 1e-3)
    np.testing.assert_allclose(st1.mean, np.concatenate([y, p]), atol=1e-6)


def test_evolve_dimension_mismatch(spec2):
    with pytest.raises(DimensionMismatch):
        evolve_state(GaussianState(np.zeros(2), np.eye(2)), matfun_at(spec2, 1.0))
    with pytest.raises(DimensionMismatch):
        GaussianState(np.zeros(3), np.eye(3))


def test_gaussian_integral_scalar_cases():
    assert gaussian_integral([[2.0]], [0.0]) == pytest.approx(np.sqrt(np.pi), rel=1e-15)
    assert gaussian_integral(np.eye(2), [1.0, 1.0]) == pytest.approx(2 * np.pi * np.e, rel=1e-15)


def test_gaussian_integral_vs_quadrature():
    G = np.array([[2.0, 1j], [1j, 3.0]])
    j = np.array([0.5, -0.2j])

    def f(x, y):
        q = G[0, 0] * x * x + 2 * G[0, 1] * x * y + G[1, 1] * y * y
        return np.exp(-0.5 * q + j[0] * x + j[1] * y)

    ref = quad_nd(f, [(-12, 12), (-12, 12)], 801)
    assert abs(gaussian_integral(G, j) - ref) < 1e-6 * abs(ref)


def test_gaussian_integral_branch_continuity():
    # Gamma = 1 - i a for growing a: det^-1/2 must follow the principal branch
    a = np.linspace(0, 50, 200)
    vals = [np.exp(log_det_inv_sqrt(np.diag([1 - 1j * x] * 3))) for x in a]
    # (1 - i a)^(-3/2) has phase 1.5 arctan(a), which crosses pi/2 without a jump
    np.testing.assert_allclose(np.angle(vals), 1.5 * np.arctan(a), atol=1e-12)


def test_non_convergent():
    with pytest.raises(NonConvergentGaussian):
        gaussian_integral([[1j]], [0.0])
    with pytest.raises(NonConvergentGaussian):
        gaussian_integral([[1.0, 0.0], [0.0, -1.0]], [0.0, 0.0])


@st.composite
def convergent_problems(draw):
    n = draw(st.integers(1, 4))
    rng = np.random.default_rng(draw(st.integers(0, 2**31)))
    A = rng.normal(size=(n, n))
    C = rng.normal(size=(n, n))
    G = A @ A.T + n * np.eye(n) + 1j * (C + C.T)
    j = rng.normal(size=n) + 1j * rng.normal(size=n)
    return G, j, rng.permutation(n)


@given(convergent_problems())
@settings(max_examples=40, deadline=None)
def test_gaussian_integral_permutation_symmetry(problem):
    G, j, perm = problem
    a = gaussian_integral(G, j)
    b = gaussian_integral(G[np.ix_(perm, perm)], j[perm])
    assert b == pytest.approx(a, rel=1e-10)


@given(convergent_problems())
@settings(max_examples=40, deadline=None)
def test_form_integration_matches_closed_form(problem):
    G, j, perm = problem
    form = GaussianForm(G, j, 0.3)
    assert form.total() == pytest.approx(np.exp(0.3) * gaussian_integral(G, j), rel=1e-10)
    if len(j) > 1:
        # integrating in two stages equals integrating at once
        step = form.integrate(perm[:1]).integrate(np.arange(len(j) - 1))
        assert np.exp(step.c) == pytest.approx(form.total(), rel=1e-10)
