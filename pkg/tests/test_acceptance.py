"""End-to-end acceptance checks.

Each test exercises one headline capability of the package on the
committed meshes and prints a single PASS line with the measured
numbers.  Direct dense solves are used wherever an iterative solver
could mask the effect under test (see the resonance test); everything
else runs through the same GMRES path the command line uses.
"""

import time

import numpy as np
import pytest

from momscat import (
    SolverConfig,
    build_space,
    build_system,
    gmres_solve,
    load_mesh,
    mie_far_field,
    mie_rcs,
    sphere_cavity_resonance,
)
from momscat.assembly import assemble_blocks
from momscat.excitation import PlaneWave
from momscat.kernels import KernelEvaluator
from momscat.postproc import (
    FarFieldPattern,
    cut_directions,
    error_metric,
    far_field,
    pattern_error_db,
)

from conftest import K0_UNIT, MESHES, ROOT


def _direct(system):
    """Dense solve of an assembled system; no Krylov projection effects."""
    return np.linalg.solve(system.matrix, system.rhs)


def _max_error_db(reference, pattern):
    return float(pattern_error_db(reference, pattern).max())


def _rms_error_db(reference, pattern):
    eps_t, eps_p = error_metric(reference, pattern)
    eps = np.maximum(eps_t, eps_p)
    return float(20.0 * np.log10(np.sqrt(np.mean(eps**2))))


def _mie_pattern(k0, radius, theta, phi):
    e_theta, e_phi = mie_far_field(k0, radius, theta, phi)
    return FarFieldPattern(theta_deg=np.asarray(theta, float),
                           phi_deg=np.asarray(phi, float),
                           e_theta=e_theta, e_phi=e_phi)


def test_sphere_rcs_matches_series_oracle():
    # ka = 1 sphere at a tenth-wavelength mesh: EFIE and the combined
    # source system must both land within 1 dB RMS of the series
    # solution on the E-plane RCS cut, in under a minute end to end
    t0 = time.perf_counter()
    k0 = K0_UNIT
    radius = 1.0 / (2.0 * np.pi)
    space = build_space(load_mesh(MESHES / "sphere_ka1.off"))
    evaluator = KernelEvaluator(k0)
    blocks = assemble_blocks(space, evaluator)
    wave = PlaneWave(k0)
    theta, phi, _ = cut_directions("phi=0", 1.0)
    ref_db = 10.0 * np.log10(mie_rcs(k0, radius, theta, phi))

    rms = {}
    for form in ("efie", "csie"):
        system = build_system(space, evaluator, form,
                              blocks=blocks).attach_excitation(wave)
        x, report = gmres_solve(system, SolverConfig(tol=1e-4))
        assert report.converged, form
        pattern = far_field(space, k0, system.currents(x), theta, phi)
        diff = ref_db - pattern.rcs_dbsm()
        rms[form] = float(np.sqrt(np.mean(diff**2)))
        assert rms[form] <= 1.0, f"{form}: {rms[form]:.3f} dB RMS"
    elapsed = time.perf_counter() - t0
    assert elapsed < 60.0
    print(f"PASS: sphere ka=1 RCS vs series oracle: EFIE {rms['efie']:.3f} dB RMS, "
          f"CSIE {rms['csie']:.3f} dB RMS (limit 1.0), {elapsed:.1f} s")


def test_wedge_magnetic_weighted_sources_beat_low_weight_cfie():
    # sharp wedge, 60 unknowns per current: with EFIE as the reference,
    # the alpha = 9 combined-source solution must sit at least 10 dB
    # below the beta = 0.1 CFIE on the max field-error metric
    k0 = K0_UNIT
    space = build_space(load_mesh(MESHES / "wedge.off"))
    assert space.n_functions == 60
    evaluator = KernelEvaluator(k0)
    blocks = assemble_blocks(space, evaluator, quad_obs=5, quad_src=7)
    wave = PlaneWave(k0)
    theta, phi, _ = cut_directions("theta=90", 1.0)

    def run(form, **kw):
        system = build_system(space, evaluator, form, blocks=blocks,
                              **kw).attach_excitation(wave)
        return far_field(space, k0, system.currents(_direct(system)), theta, phi)

    reference = run("efie")
    err_mcsie = _max_error_db(reference, run("csie", alpha=9.0))
    err_cfie01 = _max_error_db(reference, run("cfie", cfie_beta=0.1))
    gap = err_cfie01 - err_mcsie
    assert gap >= 10.0, f"gap {gap:.2f} dB"
    print(f"PASS: wedge max error vs EFIE: alpha=9 source condition "
          f"{err_mcsie:.2f} dB, 0.1-CFIE {err_cfie01:.2f} dB, gap {gap:.2f} dB "
          f"(limit 10)")


def test_pyramid_formulation_error_ordering():
    # pyramid, 36 unknowns: error ordering MFIE > CFIE > CSIE against
    # the EFIE reference, gaps of at least 8 dB, and the combined-source
    # solution at least 10 dB below the CFIE
    k0 = K0_UNIT
    space = build_space(load_mesh(MESHES / "pyramid.off"))
    assert space.n_functions == 36
    evaluator = KernelEvaluator(k0)
    blocks = assemble_blocks(space, evaluator)
    wave = PlaneWave(k0)
    theta, phi, _ = cut_directions("phi=90", 1.0)

    def run(form, **kw):
        system = build_system(space, evaluator, form, blocks=blocks,
                              **kw).attach_excitation(wave)
        return far_field(space, k0, system.currents(_direct(system)), theta, phi)

    reference = run("efie")
    err = {
        "mfie": _max_error_db(reference, run("mfie")),
        "cfie": _max_error_db(reference, run("cfie", cfie_beta=0.5)),
        "csie": _max_error_db(reference, run("csie", alpha=1.0)),
    }
    assert err["mfie"] > err["cfie"] > err["csie"]
    assert err["mfie"] - err["cfie"] >= 8.0
    assert err["cfie"] - err["csie"] >= 10.0
    print(f"PASS: pyramid max error vs EFIE: MFIE {err['mfie']:.2f} dB > "
          f"CFIE {err['cfie']:.2f} dB > CSIE {err['csie']:.2f} dB "
          f"(gaps >= 8, CSIE >= 10 below CFIE)")


def test_interior_resonance_immunity():
    # sphere scaled so its discrete fundamental cavity mode sits at the
    # analytic resonant ka: at that frequency the EFIE loses uniqueness
    # and its far field collapses, while the combined-source system is
    # immune.  Direct solves are essential here: the plane-wave right
    # hand side is reciprocity-orthogonal to the resonant null current
    # (the null current radiates no exterior field), so a Krylov method
    # built from the right-hand side never excites the bad direction
    # and would hide the failure.
    ka_res = sphere_cavity_resonance()
    mesh = load_mesh(MESHES / "sphere_resonant.off")
    space = build_space(mesh)
    radius = float(np.linalg.norm(mesh.vertices, axis=1).mean())
    theta, phi, _ = cut_directions("phi=0", 1.0)

    errors = {}
    for tag, k0 in (("off", 0.9 * K0_UNIT), ("res", K0_UNIT)):
        evaluator = KernelEvaluator(k0)
        blocks = assemble_blocks(space, evaluator)
        wave = PlaneWave(k0)
        oracle = _mie_pattern(k0, radius, theta, phi)
        for form in ("efie", "csie"):
            system = build_system(space, evaluator, form,
                                  blocks=blocks).attach_excitation(wave)
            pattern = far_field(space, k0, system.currents(_direct(system)),
                                theta, phi)
            errors[(form, tag)] = _rms_error_db(oracle, pattern)

    efie_jump = errors[("efie", "res")] - errors[("efie", "off")]
    csie_jump = abs(errors[("csie", "res")] - errors[("csie", "off")])
    assert efie_jump > 10.0, f"EFIE degradation only {efie_jump:.2f} dB"
    assert csie_jump < 3.0, f"CSIE moved {csie_jump:.2f} dB"
    print(f"PASS: interior resonance at ka={ka_res:.4f}: EFIE error "
          f"{errors[('efie', 'off')]:.2f} -> {errors[('efie', 'res')]:.2f} dB "
          f"(degrades {efie_jump:.2f} dB > 10), CSIE "
          f"{errors[('csie', 'off')]:.2f} -> {errors[('csie', 'res')]:.2f} dB "
          f"(moves {csie_jump:.2f} dB < 3)")


def test_solver_iteration_ordering():
    # on a dense ka = 1 sphere mesh the iteration counts at tol 1e-4
    # order as CFIE <= CSIE < EFIE; the EFIE count grows with mesh
    # density while the other two stay bounded
    k0 = K0_UNIT
    space = build_space(load_mesh(MESHES / "sphere_ka1_dense.off"))
    evaluator = KernelEvaluator(k0)
    blocks = assemble_blocks(space, evaluator)
    wave = PlaneWave(k0)

    counts = {}
    for form in ("cfie", "csie", "efie"):
        system = build_system(space, evaluator, form,
                              blocks=blocks).attach_excitation(wave)
        _, report = gmres_solve(system, SolverConfig(tol=1e-4))
        assert report.converged, form
        counts[form] = report.iterations
    assert counts["cfie"] <= counts["csie"] < counts["efie"], counts
    print(f"PASS: GMRES iterations at tol 1e-4, N={space.n_functions}: "
          f"CFIE {counts['cfie']} <= CSIE {counts['csie']} < EFIE {counts['efie']}")


def test_matrix_property_suite(cube_space, coarse_sphere_space, coarse_sphere_blocks):
    # structural identities of the assembled operators on two geometries
    t0 = time.perf_counter()
    evaluator = KernelEvaluator(K0_UNIT)
    cube_blocks = assemble_blocks(cube_space, evaluator)
    worst = {"asym": 0.0, "eig": np.inf, "sym": 0.0, "matvec": 0.0}
    rng = np.random.default_rng(2)

    for space, blocks in ((cube_space, cube_blocks),
                          (coarse_sphere_space, coarse_sphere_blocks)):
        A = blocks.A
        worst["asym"] = max(worst["asym"],
                            np.max(np.abs(A + A.T)) / np.max(np.abs(A)))
        worst["eig"] = min(worst["eig"], np.linalg.eigvalsh(blocks.Aprime).min())
        for M in (blocks.B, blocks.C):
            scale = np.max(np.abs(M))
            worst["sym"] = max(worst["sym"], np.max(np.abs(M - M.T)) / scale)
        system = build_system(space, evaluator, "csie", blocks=blocks)
        x = rng.normal(size=system.size) + 1j * rng.normal(size=system.size)
        y_block = system.matvec(x)
        y_mono = system.matrix @ x
        worst["matvec"] = max(worst["matvec"],
                              np.max(np.abs(y_block - y_mono)) / np.max(np.abs(y_mono)))

    elapsed = time.perf_counter() - t0
    assert worst["asym"] < 1e-12
    assert worst["eig"] > 0.0
    assert worst["sym"] < 1e-9
    assert worst["matvec"] < 1e-14
    assert elapsed < 10.0
    print(f"PASS: matrix properties on cube and sphere: A asymmetry "
          f"{worst['asym']:.1e} < 1e-12, Gram min eig {worst['eig']:.2e} > 0, "
          f"B/C asymmetry {worst['sym']:.1e} < 1e-9, blockwise matvec "
          f"{worst['matvec']:.1e} < 1e-14, {elapsed:.1f} s")


def test_vanishing_alpha_recovers_single_current_solution(sphere750_space,
                                                          sphere750_blocks):
    # as the source-condition weight vanishes the combined-source
    # electric current must collapse onto the EFIE current; the bound is
    # ten times the documented solver tolerance
    evaluator = KernelEvaluator(K0_UNIT)
    wave = PlaneWave(K0_UNIT)
    efie = build_system(sphere750_space, evaluator, "efie",
                        blocks=sphere750_blocks).attach_excitation(wave)
    i_efie = _direct(efie)
    csie = build_system(sphere750_space, evaluator, "csie", alpha=1e-8,
                        blocks=sphere750_blocks).attach_excitation(wave)
    i_csie = csie.currents(_direct(csie)).electric
    rel = float(np.linalg.norm(i_csie - i_efie) / np.linalg.norm(i_efie))
    bound = 10.0 * SolverConfig().tol
    assert rel <= bound
    print(f"PASS: alpha=1e-8 electric current matches EFIE to {rel:.2e} "
          f"relative (limit {bound:.0e})")


def test_production_scale_declared_out_of_scope():
    # stealth-airframe benchmark meshes run to roughly 8e4 edge
    # unknowns; the dense two-current system at that size needs
    # hundreds of GiB, far beyond this package's dense-matrix design.
    # The small-body suite above is the declared substitute coverage,
    # and the README must say so.
    n = 79_000
    bytes_needed = (2 * n) ** 2 * 16  # complex128 monolithic matrix
    gib = bytes_needed / 2**30
    assert gib > 300.0
    readme = (ROOT / "README.md").read_text()
    assert "out of scope" in readme
    print(f"PASS: production-scale dense system (~{n} unknowns, {gib:.0f} GiB) "
          f"declared out of scope; small-body suite substitutes")
