import numpy as np
import pytest
from hypothesis import given, settings
from scipy.integrate import quad

from oscbath.errors import AtPole, NonPositiveFrequency, PoleInput, UnstableModel
from oscbath.model import (
    Model,
    build_B,
    char_g,
    green,
    noise_coefficients,
    noise_correlation,
    spectrum,
    susceptibility,
    susceptibility_laplace,
    validate_model,
)

from conftest import stable_models


def test_validate_no_baths():
    m = validate_model({"omega0": 1.0})
    assert m.n_baths == 0 and m.n_dof == 1 and m.hbar == 1.0


def test_validate_unstable_reports_schur():
    with pytest.raises(UnstableModel) as exc:
        validate_model({"omega0": 1.0, "baths": [{"omega": 1.0, "g": 2.0}]})
    assert exc.value.schur == pytest.approx(-3.0)
    assert "-3" in str(exc.value)


def test_validate_stable_pair_form():
    m = validate_model({"omega0": 2.0, "baths": [(1.0, 1.0)]})
    assert m.schur_complement == pytest.approx(3.0)


@pytest.mark.parametrize(
    "kwargs",
    [dict(omega0=0.0), dict(omega0=-1.0), dict(omega0=1.0, baths=((0.0, 0.1),)), dict(omega0=1.0, hbar=0.0)],
)
def test_non_positive_frequency(kwargs):
    with pytest.raises(NonPositiveFrequency):
        Model(**kwargs)


def test_build_B_decoupled_and_arrowhead():
    np.testing.assert_array_equal(build_B(Model(1.0, ((2.0, 0.0),))), np.diag([1.0, 4.0]))
    np.testing.assert_array_equal(build_B(Model(1.0, ((2.0, 0.5),))), [[1.0, -0.5], [-0.5, 4.0]])


def test_degenerate_bath_frequencies_allowed():
    B = build_B(Model(1.0, ((1.5, 0.2), (1.5, 0.3))))
    assert B[1, 1] == B[2, 2] == 2.25


@given(stable_models())
@settings(max_examples=50, deadline=None)
def test_B_symmetric_and_spectrum_invariants(model):
    B = build_B(model)
    np.testing.assert_array_equal(B, B.T)
    s = spectrum(model)
    assert len(s.z) == model.n_dof
    assert np.all(np.diff(s.z) >= 0) and np.all(s.z > 0)
    np.testing.assert_allclose(s.X.T @ s.X, np.eye(model.n_dof), atol=1e-12)
    D = s.X.T @ B @ s.X
    scale = np.max(s.z**2)
    np.testing.assert_allclose(D, np.diag(s.z**2), atol=1e-10 * scale)
    assert np.all(s.X[0] >= -1e-13)


@given(stable_models(min_baths=1))
@settings(max_examples=50, deadline=None)
def test_interlacing(model):
    w2 = np.sort(model.omegas**2)
    if np.any(np.diff(w2) < 1e-6) or np.any(np.abs(model.couplings) < 1e-6):
        return
    z2 = spectrum(model).z ** 2
    for k, w in enumerate(w2):
        assert z2[k] < w < z2[k + 1]


def test_spectrum_decoupled_identity():
    s = spectrum(Model(1.0, ((2.0, 0.0),)))
    np.testing.assert_allclose(s.z, [1.0, 2.0])
    np.testing.assert_array_equal(s.X, np.eye(2))


def test_spectrum_quadratic_roots():
    s = spectrum(Model(1.0, ((2.0, 0.5),)))
    # z^4 - 5 z^2 + 3.75 = 0
    disc = np.sqrt(25.0 - 4 * 3.75)
    np.testing.assert_allclose(s.z**2, [(5 - disc) / 2, (5 + disc) / 2], rtol=1e-14)


def test_char_g_decoupled_root():
    m = Model(1.3, ((2.0, 0.0),))
    assert char_g(m, 1.3**2) == 0.0


@given(stable_models(min_baths=1))
@settings(max_examples=50, deadline=None)
def test_char_g_vanishes_on_spectrum(model):
    s = spectrum(model)
    w2 = model.omegas**2
    scale = max(np.max(s.z**2), model.omega0**2)
    for z2 in s.z**2:
        if np.min(np.abs(z2 - w2)) < 1e-6 * scale:
            continue  # weakly coupled mode sitting next to a pole
        # the residual is bounded by the eigenvalue error times |g'(z^2)|
        slope = 1.0 + np.sum(model.couplings**2 / (z2 - w2) ** 2)
        assert abs(char_g(model, z2)) < 1e-8 * scale * slope


def test_char_g_pole():
    m = Model(1.0, ((2.0, 0.5),))
    with pytest.raises(PoleInput):
        char_g(m, 4.0)
    # approaching the pole from above the sum term drives g to -inf
    assert char_g(m, 4.0 + 1e-6) < -1e4
    assert char_g(m, 4.0 - 1e-6) > 1e4


def test_susceptibility_single_bath_and_parity():
    m = Model(1.0, ((1.5, 0.4),))
    t = np.linspace(-3, 3, 13)
    np.testing.assert_allclose(susceptibility(m, t), 0.16 * np.sin(1.5 * t) / 1.5, rtol=1e-15)
    assert susceptibility(m, 0.0) == 0.0
    np.testing.assert_array_equal(susceptibility(m, -t), -susceptibility(m, t))


def test_susceptibility_laplace_quadrature(model2):
    s = 1.0
    val, _ = quad(lambda t: np.exp(-s * t) * susceptibility(model2, t), 0.0, 60.0, limit=400, epsabs=1e-13)
    exact = susceptibility_laplace(model2, s)
    assert abs(val - exact) / exact < 1e-4


def test_green_decoupled_laplace():
    m = Model(1.3, ((2.0, 0.0),))
    assert green(m, s=0.7) == pytest.approx(1.0 / (0.49 + 1.69), rel=1e-15)


def test_green_frequency_identity(model1, model2):
    for w in np.linspace(0.05, 3.0, 20) + 0.0123:
        assert green(model2, omega=w) == -1.0 / char_g(model2, w * w)
    assert green(model1, omega=0.7) == -1.0 / char_g(model1, 0.7**2)


def test_green_diverges_at_modes(model2):
    s = spectrum(model2)
    for z in s.z:
        vals = [abs(green(model2, omega=z * (1 + d))) for d in (1e-2, 1e-4, 1e-6)]
        assert vals[0] < vals[1] < vals[2]
    with pytest.raises(TypeError):
        green(model2)


def test_green_frequency_at_pole():
    m = Model(1.0)
    with pytest.raises(AtPole):
        green(m, omega=1.0)


def test_noise_coefficients(model2):
    c, s = noise_coefficients(model2, 0.0)
    np.testing.assert_array_equal(c, model2.couplings)
    np.testing.assert_array_equal(s, 0.0)
    t, h = 0.83, 1e-5
    ds = (noise_coefficients(model2, t + h)[1] - noise_coefficients(model2, t - h)[1]) / (2 * h)
    np.testing.assert_allclose(ds, noise_coefficients(model2, t)[0], atol=1e-8)


def test_noise_correlation_from_covariances():
    from oscbath.gaussian import thermal_bath_state

    m = Model(1.0, ((1.5, 0.4),))
    beta, t, tp = 0.8, 1.1, 0.35
    cov = thermal_bath_state(m, beta).cov
    # xi(t) = c(t) Y1(0) + s(t) P1(0); indices: Y1 -> 1, P1 -> 3
    c1, s1 = noise_coefficients(m, t)
    c2, s2 = noise_coefficients(m, tp)
    v1 = np.array([c1[0], s1[0]])
    v2 = np.array([c2[0], s2[0]])
    sub = cov[np.ix_([1, 3], [1, 3])]
    assert abs(v1 @ sub @ v2 - noise_correlation(m, beta, t, tp)) < 1e-10
