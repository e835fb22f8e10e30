import numpy as np
import pytest

from ratpencil import (
    InvalidInputError,
    NumericalFailure,
    PencilSpec,
    RationalFunction,
    eigenvalue_shifts,
    first_order_prediction,
    hankel_perturbation,
    rational_sensitivity_report,
    structured_sensitivities,
    unstructured_sensitivities,
    vandermonde,
)
from ratpencil.sensitivity import first_order_shift, pencil_eigvectors, pencil_matrices

from conftest import four_pole, random_pencil_spec, two_pole


def test_eigvectors_small():
    np.testing.assert_array_equal(pencil_eigvectors([0.5]), [[1]])
    np.testing.assert_allclose(pencil_eigvectors([0, 1]), [[1, 0], [-1, 1]], atol=1e-15)


def test_eigvectors_defining_property():
    rng = np.random.default_rng(3)
    z = rng.standard_normal(5) + 1j * rng.standard_normal(5)
    P = pencil_eigvectors(z)
    Vt = vandermonde(z, 5).T
    assert np.abs(Vt @ P - np.eye(5)).max() <= 1e-12


def test_eigvectors_coincident():
    with pytest.raises(NumericalFailure):
        pencil_eigvectors([0.3, 0.3])


def test_pencil_matrices_are_hankel_of_exponential_sum():
    spec = PencilSpec.generic([0.3, -0.7j, 1.2], [1, 2, 0.5j])
    H0, H1 = pencil_matrices(spec)
    f = (spec.coeffs * spec.nodes ** np.arange(6)[:, None]).sum(axis=1)
    i = np.add.outer(np.arange(3), np.arange(3))
    np.testing.assert_allclose(H0, f[i], atol=1e-14)
    np.testing.assert_allclose(H1, f[i + 1], atol=1e-14)


def test_two_pole_values():
    rep = rational_sensitivity_report(two_pole())
    assert rep["inside"].unstructured.rho[0] == pytest.approx(0.2, rel=1e-12)
    assert rep["outside"].unstructured.rho[0] == pytest.approx(2 / 2.1, rel=1e-12)
    np.testing.assert_allclose(rep["inside"].structured.eta_per_measurement[0], [0.2, 2.0], rtol=1e-12)
    np.testing.assert_allclose(rep["outside"].structured.eta_per_measurement[0], [4.2, 8.82], rtol=1e-12)
    np.testing.assert_array_equal(rep["inside"].structured.measurements, [-1, -2])
    np.testing.assert_array_equal(rep["outside"].structured.measurements, [1, 2])


def test_single_node_closed_forms():
    z, g = -0.1, 0.5
    S = structured_sensitivities(PencilSpec.inside([z], [g])).S[0]
    np.testing.assert_allclose(S, [-z / g, 1 / g], rtol=1e-15)
    z = -2.1
    S = structured_sensitivities(PencilSpec.outside([z], [g])).S[0]
    np.testing.assert_allclose(S, [z / g, -z * z / g], rtol=1e-14)


@pytest.mark.parametrize("z", [0.3, -0.8j, 0.5 + 0.5j])
def test_single_pole_rho_closed_form(z):
    u = unstructured_sensitivities(PencilSpec.inside([z], [1.7]))
    assert u.rho[0] == pytest.approx(2 * abs(z), rel=1e-12)
    assert u.bound[0] == pytest.approx(u.rho[0], rel=1e-12)
    zo = 1 / z
    u = unstructured_sensitivities(PencilSpec.outside([zo], [1.7]))
    assert u.rho[0] == pytest.approx(2 / abs(zo), rel=1e-12)


def test_four_pole_inside_eta_vector():
    rep = rational_sensitivity_report(four_pole())["inside"]
    j = int(np.argmin(np.abs(rep.poles - 0.2)))
    np.testing.assert_allclose(rep.structured.eta_per_measurement[j], [0.555, 4.999, 13.333, 11.111], rtol=2e-3)


def test_four_pole_outside_pole_fifty():
    rep = rational_sensitivity_report(four_pole())["outside"]
    j = int(np.argmin(np.abs(rep.poles - 50)))
    assert rep.unstructured.rho[j] == pytest.approx(2.204e3, rel=1e-2)
    assert rep.unstructured.bound[j] == pytest.approx(6.477e3, rel=1e-2)
    assert rep.structured.eta[j] == pytest.approx(1.577e4, rel=1e-2)


def test_four_pole_norms():
    rep = rational_sensitivity_report(four_pole())
    assert rep["inside"].unstructured.l2_norm_rho == pytest.approx(28.6, rel=1e-2)
    assert rep["inside"].unstructured.l2_bound == pytest.approx(68.66, rel=1e-2)
    assert rep["outside"].unstructured.l1_norm_rho == pytest.approx(2209, rel=1e-2)
    assert rep["outside"].unstructured.l1_bound == pytest.approx(6802, rel=1e-2)


def test_only_inside_poles_gives_empty_outside():
    rep = rational_sensitivity_report(RationalFunction([0.2, -0.4], [1, 1]))
    out = rep["outside"]
    assert out.unstructured.rho.size == 0
    assert out.structured.S.shape == (0, 0)


def test_report_invariants_random():
    rng = np.random.default_rng(7)
    for _ in range(200):
        spec = random_pencil_spec(rng)
        u = unstructured_sensitivities(spec)
        s = structured_sensitivities(spec)
        assert np.all(u.rho <= u.bound)
        assert u.l2_norm_rho <= u.l2_bound
        assert u.l1_norm_rho <= u.l1_bound
        np.testing.assert_allclose(s.eta**2, (s.eta_per_measurement**2).sum(axis=1), rtol=1e-12)


def test_prediction_examples():
    rep = structured_sensitivities(PencilSpec.inside([-0.1], [0.5]))
    assert np.all(first_order_prediction(rep, np.zeros(2)) == 0)
    eps = 1e-7
    assert first_order_prediction(rep, [eps, 0])[0] == pytest.approx(0.2 * eps)
    with pytest.raises(InvalidInputError):
        first_order_prediction(rep, np.zeros(3))


def test_generic_shift_agrees_with_structured():
    rng = np.random.default_rng(11)
    spec = random_pencil_spec(rng, max_order=4)
    d = rng.standard_normal(2 * spec.order)
    np.testing.assert_allclose(
        first_order_shift(spec, *hankel_perturbation(d)),
        first_order_prediction(structured_sensitivities(spec), d),
        rtol=1e-10,
        atol=1e-12,
    )


def test_first_order_remainder_is_quadratic():
    rng = np.random.default_rng(2024)
    for _ in range(20):
        spec = random_pencil_spec(rng)
        S = structured_sensitivities(spec)
        d = rng.standard_normal(2 * spec.order) + 1j * rng.standard_normal(2 * spec.order)
        d /= np.linalg.norm(d)
        ratios = []
        for h in (1e-4, 1e-5, 1e-6):
            shift = eigenvalue_shifts(spec, *hankel_perturbation(h * d))
            ratios.append(np.linalg.norm(shift - first_order_prediction(S, h * d)) / h**2)
        assert max(ratios) <= 10 * min(ratios)


def test_remainder_constant_fitted_over_random_directions():
    rng = np.random.default_rng(5)
    spec = PencilSpec.generic([0.4, -0.5 + 0.3j, 0.8j], [1, -0.7, 1.3j])
    S = structured_sensitivities(spec)
    cs = []
    for h in (1e-6, 1e-7):
        for _ in range(50):
            d = rng.standard_normal(6)
            d *= h / np.linalg.norm(d)
            cs.append(np.abs(eigenvalue_shifts(spec, *hankel_perturbation(d)) - first_order_prediction(S, d)).max() / h**2)
    # one constant covers both scales
    assert max(cs) < 1e3
    assert max(cs[50:]) <= 10 * max(cs[:50])


def test_unstructured_bound_on_shifts():
    rng = np.random.default_rng(9)
    eps = 1e-8
    for _ in range(50):
        spec = random_pencil_spec(rng)
        u = unstructured_sensitivities(spec)
        H0, H1 = pencil_matrices(spec)
        M = spec.order
        E0 = rng.standard_normal((M, M)) + 1j * rng.standard_normal((M, M))
        E1 = rng.standard_normal((M, M)) + 1j * rng.standard_normal((M, M))
        E0 *= eps * np.linalg.norm(H0, 2) / np.linalg.norm(E0, 2)
        E1 *= eps * np.linalg.norm(H1, 2) / np.linalg.norm(E1, 2)
        shift = first_order_shift(spec, E0, E1)
        assert np.all(np.abs(shift) <= eps * u.rho * (1 + 1e-2))


def test_mpmath_shift_single_node():
    spec = PencilSpec.generic([0.5], [2.0])
    dH0 = np.array([[1e-3]])
    dH1 = np.array([[0.0]])
    expected = 1.0 / (2.0 + 1e-3) - 0.5
    assert eigenvalue_shifts(spec, dH0, dH1)[0] == pytest.approx(expected, rel=1e-12)


def test_spec_validation():
    with pytest.raises(InvalidInputError):
        PencilSpec.generic([0.1, 0.2], [1, 0])
    with pytest.raises(InvalidInputError):
        PencilSpec.generic([0.1], [1, 2])
