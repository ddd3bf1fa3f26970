import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from cfslab import dirac, kernels
from cfslab.errors import InvalidArgument
from cfslab.regularization import cutoff_l1_norms, gaussian_cutoff, sharp_cutoff, sharp_norms_closed_form

# 30-digit quadrature of the three radial integrals for g = exp(-(0.3 k)^2 / 2),
# xi = (0.4, 0, 0, 0.7), negative energy, squared cutoff
J0 = 36.1478477174109648189539344253 + 44.5074318840568084956480255315j
J0W = 16.1040742707555336358777828945 + 19.1914362845854566530709834619j
K1 = 10.5585418027668475696133633688 + 55.2195535778311267570377525373j


def test_kernel_against_independent_quadrature():
    K = kernels.kernel([0.4, 0, 0, 0.7], gaussian_cutoff(0.3), -1).value
    c = kernels.PREFACTOR
    expected = -c * (J0 * dirac.GAMMA0 - J0W * np.eye(4) + 1j * K1 * dirac.GAMMA[3])
    np.testing.assert_allclose(K, expected, rtol=0, atol=1e-12 * np.abs(K).max())


def test_sharp_diagonal_eigenvalues():
    K = kernels.kernel(np.zeros(4), sharp_cutoff(0.1), -1).value
    ev = np.linalg.eigvalsh(K)
    np.testing.assert_allclose(ev, [-1.14728007, -1.14728007, 1.54034780, 1.54034780], atol=1e-8)


@pytest.mark.parametrize("eps", [1.0, 0.3, 0.1])
def test_diagonal_matches_closed_form(eps):
    g = sharp_cutoff(eps)
    K = kernels.kernel(np.zeros(4), g, -1).value
    closed = kernels.diagonal_closed_form(g, -1, norms=sharp_norms_closed_form(eps))
    np.testing.assert_allclose(K, closed, rtol=1e-10, atol=1e-12 * np.abs(closed).max())
    lp, lm = kernels.diagonal_spectrum(g)
    assert lm < 0 < lp


def test_leading_order_approaches_exact():
    eps = 1e-3
    exact = np.array(kernels.diagonal_spectrum(sharp_cutoff(eps), norms=sharp_norms_closed_form(eps)))
    lead = np.array(kernels.sharp_leading_order(eps))
    np.testing.assert_allclose(lead, exact, rtol=5e-3)


def test_positive_energy_diagonal():
    g = gaussian_cutoff(0.2)
    K = kernels.kernel(np.zeros(4), g, +1).value
    np.testing.assert_allclose(K, kernels.diagonal_closed_form(g, +1), rtol=1e-10, atol=1e-14)


@given(st.floats(-2, 2), st.floats(-2, 2), st.floats(-2, 2), st.floats(-2, 2))
def test_conjugation_symmetry(t, x, y, z):
    g = gaussian_cutoff(0.5)
    xi = np.array([t, x, y, z])
    a = kernels.kernel(xi, g, -1).value
    b = kernels.kernel(-xi, g, -1).value
    np.testing.assert_allclose(b, dirac.GAMMA0 @ a.conj().T @ dirac.GAMMA0, atol=1e-12 * np.abs(a).max())


def test_single_power_equals_double_for_sharp():
    g = sharp_cutoff(0.4)
    xi = [0.1, 0.2, 0.0, 0.3]
    np.testing.assert_allclose(kernels.kernel(xi, g, -1, "single").value, kernels.kernel(xi, g, -1).value)


def test_kernel_satisfies_dirac_equation():
    g = gaussian_cutoff(0.5)
    xi = np.array([0.3, 0.2, -0.4, 0.1])
    h = 1e-4
    grad = [
        (kernels.kernel(xi + h * e, g, -1).value - kernels.kernel(xi - h * e, g, -1).value) / (2 * h) for e in np.eye(4)
    ]
    lhs = 1j * sum(dirac.GAMMA[mu] @ grad[mu] for mu in range(4)) - kernels.kernel(xi, g, -1).value
    assert np.abs(lhs).max() < 1e-7 * np.abs(grad).max()


def test_lattice_sum_converges_monotonically():
    rows = kernels.lattice_convergence(sharp_cutoff(0.3), (16, 32, 64))
    errs = [r["relative_error"] for r in rows]
    assert errs[0] > errs[1] > errs[2]
    assert errs[2] < 1e-2


def test_lattice_sum_off_diagonal():
    g = gaussian_cutoff(0.3)
    x = np.array([0.3, 0.5, -0.2, 0.4])
    approx = kernels.kernel_from_lattice_sum(x, np.zeros(4), kernels.lattice_for(g, 48), g, -1).value
    exact = kernels.kernel(x, g, -1).value
    assert np.linalg.norm(approx - exact, 2) < 1e-4 * np.linalg.norm(exact, 2)


def test_lattice_modes_shape():
    lat = kernels.MomentumLattice(4, 2.0)
    k, spins, spinors, w = kernels.lattice_modes(lat, None, -1)
    assert k.shape == (128, 3) and spinors.shape == (128, 4) and len(spins) == 128
    np.testing.assert_allclose(np.linalg.norm(spinors, axis=1), 1)
    assert lat.spacing == 1.0


def test_perturbation_bauer_fike(rng):
    g = sharp_cutoff(0.2)
    norms = cutoff_l1_norms(g)
    states = 0.05 * (rng.normal(size=(3, 4)) + 1j * rng.normal(size=(3, 4)))
    pd = kernels.perturbed_diagonal(g, states, [1, -1, 1], norms=norms)
    assert pd.holds
    assert np.all(pd.distances <= pd.bauer_fike_bound + 1e-15)


def test_no_states_leaves_spectrum():
    g = sharp_cutoff(0.2)
    pd = kernels.perturbed_diagonal(g, np.zeros((0, 4)), [])
    np.testing.assert_allclose(pd.distances, 0, atol=1e-14)
    assert pd.bauer_fike_bound == 0


def test_delta_kernel_signs():
    v = np.array([[1.0, 0, 0, 0]])
    np.testing.assert_allclose(kernels.delta_kernel(v, [1]), -kernels.delta_kernel(v, [-1]))
    with pytest.raises(InvalidArgument):
        kernels.delta_kernel(v, [1, -1])


def test_invalid_kernel_inputs():
    g = sharp_cutoff(0.5)
    with pytest.raises(InvalidArgument):
        kernels.kernel([0, 0, 0], g, -1)
    with pytest.raises(InvalidArgument):
        kernels.kernel([0, 0, 0, np.inf], g, -1)
    with pytest.raises(InvalidArgument):
        kernels.kernel([0, 0, 0, 0], g, -1, power="triple")
