"""Method-of-moments solver for scattering from closed conducting bodies.

Surface integral equations over RWG functions on triangle meshes: the
electric- and magnetic-field equations, their combination, and a
combined-source formulation that carries both current types and closes
the system with a weak side condition linking them.  Includes an
analytic sphere reference, a restarted GMRES solver, far-field/RCS
post-processing and a command-line driver.
"""

from .assembly import (
    LinearSystem,
    SystemBlocks,
    assemble_blocks,
    assemble_D_block,
    assemble_efie_blocks,
    assemble_gram_A,
    assemble_gram_Aprime,
    assemble_mfie,
    build_system,
)
from .excitation import Z0, PlaneWave, assemble_rhs, assemble_rhs_magnetic
from .geometry import cube, icosphere, open_plate, pyramid, wedge
from .kernels import (
    KernelEvaluator,
    grad_green,
    grad_green_smooth,
    green,
    green_smooth,
    singular_static_potential,
    static_potentials,
)
from .mesh import MeshReport, TriangleMesh, edge_table, load_mesh
from .mie import mie_far_field, mie_rcs, sphere_cavity_resonance
from .postproc import (
    FarFieldPattern,
    SolutionCoefficients,
    cut_directions,
    error_metric,
    far_field,
    far_field_components,
    pattern_error_db,
    rcs,
    read_pattern_csv,
    write_pattern_csv,
)
from .quadrature import TriangleRule, physical_points, triangle_rule
from .rwg import RwgSpace, build_space, rwg_eval
from .solver import SolveReport, SolverConfig, direct_solve, gmres, gmres_solve

__version__ = "0.1.0"

__all__ = [
    "LinearSystem",
    "SystemBlocks",
    "assemble_blocks",
    "assemble_D_block",
    "assemble_efie_blocks",
    "assemble_gram_A",
    "assemble_gram_Aprime",
    "assemble_mfie",
    "build_system",
    "Z0",
    "PlaneWave",
    "assemble_rhs",
    "assemble_rhs_magnetic",
    "cube",
    "icosphere",
    "open_plate",
    "pyramid",
    "wedge",
    "KernelEvaluator",
    "grad_green",
    "grad_green_smooth",
    "green",
    "green_smooth",
    "singular_static_potential",
    "static_potentials",
    "MeshReport",
    "TriangleMesh",
    "edge_table",
    "load_mesh",
    "mie_far_field",
    "mie_rcs",
    "sphere_cavity_resonance",
    "FarFieldPattern",
    "SolutionCoefficients",
    "cut_directions",
    "error_metric",
    "far_field",
    "far_field_components",
    "pattern_error_db",
    "rcs",
    "read_pattern_csv",
    "write_pattern_csv",
    "TriangleRule",
    "physical_points",
    "triangle_rule",
    "RwgSpace",
    "build_space",
    "rwg_eval",
    "SolveReport",
    "SolverConfig",
    "direct_solve",
    "gmres",
    "gmres_solve",
    "__version__",
]
