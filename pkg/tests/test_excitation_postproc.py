"""Plane-wave excitation, far fields, cuts, error metrics and pattern files."""

import numpy as np
import pytest

from momscat.excitation import Z0, PlaneWave, assemble_rhs, assemble_rhs_magnetic, _tested
from momscat.postproc import (
    FarFieldPattern,
    SolutionCoefficients,
    cut_directions,
    error_metric,
    far_field,
    far_field_components,
    pattern_error_db,
    read_pattern_csv,
    rcs,
    write_pattern_csv,
)
from momscat.quadrature import physical_points, triangle_rule

from conftest import K0_UNIT


def test_plane_wave_geometry():
    wave = PlaneWave(k0=K0_UNIT)  # arrives from theta = 180: travels along +z
    np.testing.assert_allclose(wave.k_hat, [0.0, 0.0, 1.0], atol=1e-15)
    np.testing.assert_allclose(wave.e_hat, [1.0, 0.0, 0.0], atol=1e-15)
    assert abs(wave.k_hat @ wave.e_hat) < 1e-12

    oblique = PlaneWave(k0=2.0, theta_deg=60.0, phi_deg=30.0, polarization="theta")
    assert abs(oblique.k_hat @ oblique.e_hat) < 1e-12
    assert np.linalg.norm(oblique.k_hat) == pytest.approx(1.0)

    # fields: |H| = |E| / Z0 and E x H along the propagation direction
    pts = np.array([[0.3, -0.2, 0.5]])
    e = oblique.e_field(pts)[0]
    h = oblique.h_field(pts)[0]
    assert np.linalg.norm(h) == pytest.approx(np.linalg.norm(e) / Z0, rel=1e-12)
    poynting = np.cross(e, np.conj(h)).real
    np.testing.assert_allclose(poynting / np.linalg.norm(poynting),
                               oblique.k_hat, atol=1e-12)

    # phase advances opposite to arrival: unit amplitude at the origin
    assert oblique.e_field(np.zeros(3)) @ oblique.e_hat == pytest.approx(1.0)
    shift = oblique.e_field(oblique.k_hat * 0.25 * 2.0 * np.pi / 2.0)
    assert shift @ oblique.e_hat == pytest.approx(np.exp(-0.5j * np.pi), abs=1e-12)


def test_plane_wave_validation():
    with pytest.raises(ValueError, match="k0"):
        PlaneWave(k0=0.0)
    with pytest.raises(ValueError, match="polarization"):
        PlaneWave(k0=1.0, polarization="z")
    # arrival along +x makes a cartesian x polarization longitudinal
    with pytest.raises(ValueError, match="transverse"):
        PlaneWave(k0=1.0, theta_deg=90.0, phi_deg=0.0, polarization="x")
    PlaneWave(k0=1.0, theta_deg=90.0, phi_deg=0.0, polarization="theta")


def test_rhs_linear_in_amplitude(coarse_sphere_space):
    w1 = PlaneWave(k0=K0_UNIT, amplitude=1.0)
    w2 = PlaneWave(k0=K0_UNIT, amplitude=2.0)
    np.testing.assert_allclose(assemble_rhs(coarse_sphere_space, w2),
                               2.0 * assemble_rhs(coarse_sphere_space, w1),
                               rtol=1e-14)
    np.testing.assert_allclose(assemble_rhs_magnetic(coarse_sphere_space, w2),
                               2.0 * assemble_rhs_magnetic(coarse_sphere_space, w1),
                               rtol=1e-14)


def test_equivalence_currents_extinguish_exterior_field(coarse_sphere_space):
    # surface currents J = -(n x H_inc), M = +(n x E_inc) on a closed
    # surface radiate a null exterior field; their Gram projections onto
    # the basis must radiate far below the single-current level.  This
    # pins the relative sign and scaling of the two radiation integrals.
    from momscat.assembly import assemble_gram_Aprime

    space = coarse_sphere_space
    wave = PlaneWave(k0=K0_UNIT)
    gram = assemble_gram_Aprime(space)
    rule = triangle_rule(3)
    pts = physical_points(rule, space.mesh.corners())

    t_j = -assemble_rhs_magnetic(space, wave)
    n_cross_e = np.cross(space.mesh.normals()[:, None, :], wave.e_field(pts))
    t_m = _tested(space, n_cross_e, rule, space.mesh.areas())
    j = np.linalg.solve(gram, t_j)
    m = np.linalg.solve(gram, t_m)

    theta, phi, _ = cut_directions("phi=0", 5.0)
    both = far_field(space, K0_UNIT, SolutionCoefficients(j, m), theta, phi)
    alone = far_field(space, K0_UNIT, SolutionCoefficients(j, np.zeros_like(m)),
                      theta, phi)

    def level(p):
        return max(np.max(np.abs(p.e_theta)), np.max(np.abs(p.e_phi)))

    assert 20.0 * np.log10(level(both) / level(alone)) < -50.0
    # the opposite magnetic sign must not cancel anything
    flipped = far_field(space, K0_UNIT, SolutionCoefficients(j, -m), theta, phi)
    assert level(flipped) > level(alone)


def test_cut_directions_theta_cut():
    theta, phi, sweep = cut_directions("theta=90", 1.0)
    assert len(sweep) == 361
    np.testing.assert_array_equal(theta, np.full(361, 90.0))
    np.testing.assert_array_equal(phi, sweep)
    np.testing.assert_array_equal(sweep, np.arange(361.0))


def test_cut_directions_phi_cut_wraps_to_far_halfplane():
    theta, phi, sweep = cut_directions("phi=0", 1.0)
    assert theta.max() <= 180.0
    # front half-plane: theta equals the sweep parameter
    assert theta[45] == 45.0 and phi[45] == 0.0
    # beyond 180 the cut continues at phi + 180 with theta folding back
    assert theta[190] == 170.0 and phi[190] == 180.0
    assert theta[350] == 10.0 and phi[350] == 180.0
    assert theta[360] == 0.0


def test_cut_directions_validation():
    with pytest.raises(ValueError, match="cut"):
        cut_directions("equator")
    with pytest.raises(ValueError, match="axis"):
        cut_directions("psi=10")
    with pytest.raises(ValueError, match="divide"):
        cut_directions("phi=0", 7.0)


def _toy_pattern(scale=1.0, n=19):
    theta = np.linspace(0.0, 180.0, n)
    phi = np.zeros(n)
    e_theta = scale * (np.cos(np.radians(theta)) + 0.3j)
    e_phi = scale * 0.1 * np.sin(np.radians(theta))
    return FarFieldPattern(theta, phi, e_theta, e_phi)


def test_error_metric_self_is_floor():
    ref = _toy_pattern()
    eps_t, eps_p = error_metric(ref, ref)
    assert np.max(eps_t) == 0.0 and np.max(eps_p) == 0.0
    db = pattern_error_db(ref, ref)
    np.testing.assert_array_equal(db, np.full(db.shape, -300.0))


def test_error_metric_normalisation():
    ref = _toy_pattern()
    # zero out the candidate at the global maximum of the reference:
    # the error there is exactly one, i.e. 0 dB
    norm = max(np.max(np.abs(ref.e_theta)), np.max(np.abs(ref.e_phi)))
    k = int(np.argmax(np.abs(ref.e_theta)))
    e_theta = ref.e_theta.copy()
    e_theta[k] = 0.0
    cand = FarFieldPattern(ref.theta_deg, ref.phi_deg, e_theta, ref.e_phi)
    eps_t, _ = error_metric(ref, cand)
    assert eps_t[k] == pytest.approx(np.abs(ref.e_theta[k]) / norm, rel=1e-15)
    assert np.abs(ref.e_theta[k]) == pytest.approx(norm, rel=1e-15)
    assert pattern_error_db(ref, cand)[k] == pytest.approx(0.0, abs=1e-12)


def test_error_metric_validation():
    ref = _toy_pattern()
    short = _toy_pattern(n=7)
    with pytest.raises(ValueError, match="angles"):
        error_metric(ref, short)
    zero = FarFieldPattern(ref.theta_deg, ref.phi_deg,
                           np.zeros_like(ref.e_theta), np.zeros_like(ref.e_phi))
    with pytest.raises(ValueError, match="zero"):
        error_metric(zero, ref)


def test_pattern_csv_round_trip(tmp_path):
    pat = _toy_pattern()
    path = tmp_path / "pattern.csv"
    write_pattern_csv(path, pat)
    back = read_pattern_csv(path)
    # 17 significant digits reproduce doubles exactly
    np.testing.assert_array_equal(back.theta_deg, pat.theta_deg)
    np.testing.assert_array_equal(back.phi_deg, pat.phi_deg)
    np.testing.assert_array_equal(back.e_theta, pat.e_theta)
    np.testing.assert_array_equal(back.e_phi, pat.e_phi)
    lines = path.read_text().splitlines()
    assert lines[0] == "theta_deg,phi_deg,sigma_dbsm,etheta_re,etheta_im,ephi_re,ephi_im"
    assert len(lines) == 1 + len(pat.theta_deg)


def test_pattern_csv_header_check(tmp_path):
    path = tmp_path / "bad.csv"
    path.write_text("a,b,c\n1,2,3\n")
    with pytest.raises(ValueError, match="header"):
        read_pattern_csv(path)


def test_far_field_linearity(coarse_sphere_space):
    rng = np.random.default_rng(5)
    n = coarse_sphere_space.n_functions
    j = rng.normal(size=n) + 1j * rng.normal(size=n)
    theta = np.array([30.0, 90.0, 150.0])
    phi = np.array([0.0, 45.0, 90.0])
    et1, ep1 = far_field_components(coarse_sphere_space, K0_UNIT, j, None, theta, phi)
    et2, ep2 = far_field_components(coarse_sphere_space, K0_UNIT, 2.0 * j, None,
                                    theta, phi)
    np.testing.assert_allclose(et2, 2.0 * et1, rtol=1e-13)
    np.testing.assert_allclose(ep2, 2.0 * ep1, rtol=1e-13)
    sigma1 = rcs(et1, ep1)
    sigma2 = rcs(et2, ep2)
    np.testing.assert_allclose(sigma2, 4.0 * sigma1, rtol=1e-12)
    # doubling the stated incident amplitude cancels the quadrupling
    np.testing.assert_allclose(rcs(et2, ep2, amplitude=2.0), sigma1, rtol=1e-12)


def test_rcs_dbsm_floor():
    n = 5
    pat = FarFieldPattern(np.linspace(0, 180, n), np.zeros(n),
                          np.zeros(n, complex), np.zeros(n, complex))
    np.testing.assert_array_equal(pat.rcs(), np.zeros(n))
    np.testing.assert_array_equal(pat.rcs_dbsm(), np.full(n, -300.0))


def test_solution_coefficients_validation():
    with pytest.raises(ValueError, match="length"):
        SolutionCoefficients(np.zeros(3, complex), np.zeros(4, complex))
