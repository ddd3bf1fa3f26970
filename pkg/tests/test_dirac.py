import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from cfslab import dirac
from cfslab.errors import InvalidArgument

momenta = arrays(np.float64, 3, elements=st.floats(-50, 50, allow_nan=False))
masses = st.floats(0.05, 20)


def test_clifford_relations():
    for mu in range(4):
        for nu in range(4):
            anti = dirac.GAMMA[mu] @ dirac.GAMMA[nu] + dirac.GAMMA[nu] @ dirac.GAMMA[mu]
            np.testing.assert_allclose(anti, 2 * dirac.METRIC[mu, nu] * np.eye(4), atol=1e-15)


def test_gamma0_hermitian_and_spatial_antihermitian():
    np.testing.assert_array_equal(dirac.GAMMA0, np.diag([1, 1, -1, -1]))
    for j in (1, 2, 3):
        np.testing.assert_array_equal(dirac.GAMMA[j].conj().T, -dirac.GAMMA[j])


def test_gamma_table_is_read_only():
    with pytest.raises(ValueError):
        dirac.GAMMA[0, 0, 0] = 2


@given(momenta, masses)
def test_projector_identities(k, m):
    pp = dirac.energy_projector(k, +1, m)
    pm = dirac.energy_projector(k, -1, m)
    np.testing.assert_allclose(pp, pp.conj().T, atol=1e-12)
    np.testing.assert_allclose(pp @ pp, pp, atol=1e-12)
    np.testing.assert_allclose(pm @ pm, pm, atol=1e-12)
    np.testing.assert_allclose(pp @ pm, 0, atol=1e-12)
    np.testing.assert_allclose(pp + pm, np.eye(4), atol=1e-12)


@given(momenta, masses, st.sampled_from([1, -1]), st.sampled_from(["up", "down"]))
def test_spinor_is_energy_eigenvector(k, m, sign, spin):
    chi = dirac.fundamental_spinor(k, sign, spin, m)
    w = dirac.omega(k, m)
    np.testing.assert_allclose(dirac.hamiltonian_symbol(k, m) @ chi, sign * w * chi, rtol=1e-12, atol=1e-12 * w)
    np.testing.assert_allclose(np.vdot(chi, chi).real, 2 * w / (w + m), rtol=1e-12)
    np.testing.assert_allclose(dirac.energy_projector(k, sign, m) @ chi, chi, atol=1e-12)


@given(momenta, masses)
def test_projector_gamma0_form(k, m):
    for s in (1, -1):
        np.testing.assert_allclose(
            dirac.projector_gamma0(k, s, m), dirac.energy_projector(k, s, m) @ dirac.GAMMA0, atol=1e-12
        )


def test_spins_are_orthogonal():
    k = np.array([0.3, -1.2, 0.7])
    up = dirac.normalized_spinor(k, -1, "up")
    down = dirac.normalized_spinor(k, -1, "down")
    assert abs(np.vdot(up, down)) < 1e-15
    assert abs(np.vdot(up, dirac.normalized_spinor(k, +1, "up"))) < 1e-15


def test_broadcasting_over_leading_axes(rng):
    k = rng.normal(size=(5, 7, 3))
    chi = dirac.fundamental_spinor(k, -1, "down")
    assert chi.shape == (5, 7, 4)
    np.testing.assert_allclose(chi[2, 3], dirac.fundamental_spinor(k[2, 3], -1, "down"))


def test_spin_product_is_dirac_adjoint_contraction():
    a = np.array([1, 2j, 0, 1])
    b = np.array([0, 1, 1, 1j])
    assert dirac.spin_product(a, b) == pytest.approx(np.conj(a) @ dirac.GAMMA0 @ b)


def test_rest_frame_spinors():
    np.testing.assert_allclose(dirac.fundamental_spinor([0, 0, 0], 1, "up"), [1, 0, 0, 0])
    np.testing.assert_allclose(dirac.fundamental_spinor([0, 0, 0], -1, "down"), [0, 0, 0, 1])


@pytest.mark.parametrize("bad", [0, 2, "x", None])
def test_invalid_sign(bad):
    with pytest.raises(InvalidArgument):
        dirac.check_sign(bad)


def test_invalid_inputs():
    with pytest.raises(InvalidArgument):
        dirac.check_spin("sideways")
    with pytest.raises(InvalidArgument):
        dirac.check_mass(-1.0)
    with pytest.raises(InvalidArgument):
        dirac.omega([np.nan, 0, 0])
