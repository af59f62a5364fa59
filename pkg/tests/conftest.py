"""Shared fixtures: committed meshes and expensive assembled operators."""

from pathlib import Path

import numpy as np
import pytest

from momscat import KernelEvaluator, assemble_blocks, build_space, load_mesh

ROOT = Path(__file__).resolve().parent.parent
MESHES = ROOT / "data" / "meshes"
CONFIGS = ROOT / "data" / "configs"

K0_UNIT = 2.0 * np.pi  # unit-wavelength convention


@pytest.fixture(scope="session")
def cube_space():
    return build_space(load_mesh(MESHES / "cube.off"))


@pytest.fixture(scope="session")
def coarse_sphere_space():
    # 120 unknowns; radius 1/(2 pi) so ka = 1 at the unit wavelength
    return build_space(load_mesh(MESHES / "sphere_ka1_coarse.off"))


@pytest.fixture(scope="session")
def coarse_sphere_blocks(coarse_sphere_space):
    return assemble_blocks(coarse_sphere_space, KernelEvaluator(K0_UNIT))


@pytest.fixture(scope="session")
def sphere750_space():
    return build_space(load_mesh(MESHES / "sphere_ka1.off"))


@pytest.fixture(scope="session")
def sphere750_blocks(sphere750_space):
    return assemble_blocks(sphere750_space, KernelEvaluator(K0_UNIT))
