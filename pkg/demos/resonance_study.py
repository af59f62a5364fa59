"""Interior-resonance study: EFIE failure and CSIE immunity.

The committed resonant sphere mesh is calibrated so that its discrete
cavity eigenvalue coincides with the analytic lowest resonant ka of a
PEC spherical cavity (see regenerate_meshes.py).  At that wavenumber
the EFIE matrix is nearly singular and its exact solution carries a
large spurious cavity current; ten percent below it the same mesh is
perfectly well behaved.  Direct solves are used on purpose: the plane
wave couples to the resonant current only through discretization
error, so a Krylov solver never excites it and would mask the failure.
"""

import sys
from pathlib import Path

import numpy as np

sys.path.insert(0, str(Path(__file__).resolve().parent.parent / "src"))

from momscat import (
    FarFieldPattern, KernelEvaluator, PlaneWave, Z0, assemble_blocks,
    build_space, build_system, cut_directions, direct_solve, error_metric,
    far_field, load_mesh, mie_far_field, sphere_cavity_resonance,
)

ROOT = Path(__file__).resolve().parent.parent


def main():
    ka = sphere_cavity_resonance()
    k0_resonant = 2.0 * np.pi          # mesh radius is ka / (2 pi) by construction
    mesh = load_mesh(ROOT / "data" / "meshes" / "sphere_resonant.off")
    space = build_space(mesh)
    radius = float(np.linalg.norm(mesh.vertices, axis=1).mean())
    print(f"lowest cavity-resonant ka = {ka:.9f}")
    print(f"mesh: {space.n_functions} basis functions, vertex radius {radius:.6f}")

    theta, phi, sweep = cut_directions("phi=0", 1.0)
    for factor in (0.9, 1.0):
        k0 = factor * k0_resonant
        evaluator = KernelEvaluator(k0)
        blocks = assemble_blocks(space, evaluator)
        efie = (1j * k0 * Z0) * blocks.B + (1j * Z0 / k0) * blocks.C
        sigma_min = np.linalg.svd(efie, compute_uv=False)[-1]

        wave = PlaneWave(k0, 180.0, 0.0, "x")
        e_theta, e_phi = mie_far_field(k0, radius, theta, phi)
        reference = FarFieldPattern(theta, phi, e_theta, e_phi)
        errors = {}
        for name, kw in (("efie", {}), ("csie", {"alpha": 1.0})):
            system = build_system(space, evaluator, name, blocks=blocks, **kw)
            system.attach_excitation(wave)
            x = direct_solve(system.matrix, system.rhs)
            pattern = far_field(space, k0, system.currents(x), theta, phi)
            eps_theta, eps_phi = error_metric(reference, pattern)
            rms = np.sqrt(np.mean(np.maximum(eps_theta, eps_phi) ** 2))
            errors[name] = 20.0 * np.log10(rms)
        print(f"k/k_resonant = {factor:3.1f}:  sigma_min(EFIE) = {sigma_min:8.2e}   "
              f"EFIE error {errors['efie']:7.2f} dB   CSIE error {errors['csie']:7.2f} dB")


if __name__ == "__main__":
    main()
