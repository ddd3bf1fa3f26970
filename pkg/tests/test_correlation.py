import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from cfslab import correlation as corr
from cfslab import kernels
from cfslab import packets as pk
from cfslab.errors import InvalidArgument
from cfslab.regularization import gaussian_cutoff, mollifier_cutoff, sharp_cutoff


@pytest.fixture(scope="module")
def vacuum():
    return pk.orthonormalize_family(pk.SolutionFamily.from_packets(pk.special_family(1.0)))


@pytest.fixture(scope="module")
def sea():
    g = sharp_cutoff(0.3)
    return corr.LatticeSea(kernels.lattice_for(g, 24), g)


@pytest.mark.parametrize("eps", [1e-2, 1e-1])
@pytest.mark.parametrize("cutoff", [gaussian_cutoff, mollifier_cutoff])
def test_vacuum_family_is_regular(vacuum, eps, cutoff):
    rep = corr.spin_space_report(corr.correlation_matrix(vacuum, np.zeros(4), cutoff(eps)))
    assert rep.rank == 4 and rep.signature == (2, 2) and rep.regular


def test_isometry_relation(vacuum):
    assert corr.isometry_check(vacuum, [0.2, 0.1, -0.3, 0.5], gaussian_cutoff(0.1)) < 1e-14


def test_compressed_spectrum_matches_full(vacuum):
    x = np.array([0.1, 0.4, 0.0, -0.2])
    g = gaussian_cutoff(0.1)
    M = corr.correlation_matrix(vacuum, x, g)
    full = np.linalg.eigvalsh(M)
    small = corr.compressed_spectrum(vacuum.values(x, g).T)
    np.testing.assert_allclose(np.sort(full), small, atol=1e-13)


def test_rank_deficient_family():
    fam = pk.orthonormalize_family(pk.SolutionFamily.from_packets(pk.special_family(1.0)[:2]))
    rep = corr.spin_space_report(corr.correlation_matrix(fam, np.zeros(4), gaussian_cutoff(0.1)))
    # two negative-energy a-packets at their centre give values e_2, e_3 with negative spin norm
    assert rep.rank == 2 and rep.signature == (2, 0)
    assert corr.image_dimension(fam, np.zeros(4), gaussian_cutoff(0.1)) == 2


def test_empty_report():
    rep = corr.spin_space_report(np.zeros((0, 0)))
    assert rep.rank == 0 and not rep.regular


@given(arrays(np.float64, 4, elements=st.floats(-1.5, 1.5)))
def test_translation_covariance(vacuum, a):
    r = corr.translation_covariance_check(vacuum, np.array([0.1, 0.2, 0.0, -0.1]), a, gaussian_cutoff(0.2))
    assert r["deviation"] <= 1e-10 * max(r["scale"], 1.0)


def test_current_density_is_trace(vacuum):
    x = np.array([0.3, 0.1, 0.2, 0.0])
    g = gaussian_cutoff(0.2)
    V = vacuum.values(x, g)
    for mu in range(4):
        assert corr.current_density(vacuum, x, mu, g) == pytest.approx(corr.current_from_values(V, mu))
    # J^0 = sum |R w_i|^2 is positive
    assert corr.current_density(vacuum, x, 0, g) > 0


def test_lattice_eigenbasis(sea):
    e = corr.eigenbasis_at_point(sea, np.zeros(4))
    assert np.max(e["residuals"]) < 1e-12
    np.testing.assert_allclose(e["eigenvalues"], 2 * np.pi * np.diag(e["lattice_diagonal"]).real, rtol=1e-12)
    lp, lm = kernels.diagonal_spectrum(sea.g)
    np.testing.assert_allclose(e["eigenvalues"], 2 * np.pi * np.array([lm, lm, lp, lp]), rtol=5e-2)


@given(arrays(np.float64, 4, elements=st.floats(-2, 2)))
def test_lattice_translation_moves_eigenbasis_backwards(sea, a):
    # U_a e_{x, mu} = e_{x - a, mu} for U_a u = u(. + a)
    modes = sea.modes()
    x = np.array([0.2, -0.1, 0.3, 0.0])
    c_x = corr.eigenbasis_at_point(sea, x, modes)["coefficients"]
    c_shift = corr.eigenbasis_at_point(sea, x - a, modes)["coefficients"]
    np.testing.assert_allclose(corr.translate_lattice_coefficients(sea, c_x, a, modes), c_shift, atol=1e-12)


def test_lattice_current_difference(sea):
    modes = sea.modes()
    added = [np.array([0.01, 0.02j, 0.0, 0.01])]
    for mu in range(4):
        r = corr.lattice_current_difference(sea, np.zeros(4), mu, added=added, removed=[0, 5, 9], modes=modes)
        assert r["lhs"] == pytest.approx(r["rhs"], abs=1e-12)


def test_injectivity_good_family():
    fam = pk.SolutionFamily.from_packets(
        [pk.delta_packet(p, 0.4, spin=s) for p, s in [((0, 0, 0), "up"), ((0.5, 0, 0), "down"), ((0, 0.5, 0), "up"), ((0, 0, 0.5), "down")]]
    )
    pts = [[0, 0, 0, 0], [0, 1, 0, 0], [0, 0, 1, 0], [0, 0, 0, 1], [1, 0, 0, 0]]
    r = corr.injectivity_probe(fam, pts, gaussian_cutoff(0.3))
    assert r["separated"] and r["min_distance"] > r["threshold"]


def test_injectivity_degenerate_family_flagged():
    # momentum distributions concentrated at k = 0: F(x) is constant up to O(s^2 |x|^2)
    fam = pk.SolutionFamily.from_packets([pk.delta_packet((0, 0, 0), 1e-5, spin=s) for s in ("up", "down")])
    pts = [[0, 0, 0, 0], [0, 1, 0, 0], [0, 0, 1, 0], [0, 0, 0, 1], [1, 0, 0, 0]]
    r = corr.injectivity_probe(fam, pts, gaussian_cutoff(0.3))
    assert not r["separated"] and r["non_separated_pairs"]


def test_injectivity_needs_two_points(vacuum):
    with pytest.raises(InvalidArgument):
        corr.injectivity_probe(vacuum, [[0, 0, 0, 0]])
