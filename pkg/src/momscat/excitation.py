"""Plane-wave excitation and tested right-hand sides.

The incidence direction follows the radar convention: (theta_inc,
phi_inc) is the direction the wave arrives from, so the propagation
vector is k_hat = -r_hat(theta_inc, phi_inc) and the fields are

    E(r) = E0 e_hat exp(-j k0 k_hat . r),   H = (k_hat x E) / Z0.

Polarisations "theta" and "phi" are the spherical unit vectors of the
arrival direction; "x" and "y" are accepted when they are transverse to
the propagation direction (axial incidence), which covers the common
case of a wave arriving from -z with the electric field along x.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.constants import epsilon_0, mu_0

from .quadrature import physical_points, triangle_rule
from .rwg import RwgSpace

Z0 = float(np.sqrt(mu_0 / epsilon_0))

__all__ = ["Z0", "PlaneWave", "assemble_rhs", "assemble_rhs_magnetic"]


def _unit_vectors(theta_deg: float, phi_deg: float):
    th = np.radians(theta_deg)
    ph = np.radians(phi_deg)
    r_hat = np.array([np.sin(th) * np.cos(ph), np.sin(th) * np.sin(ph), np.cos(th)])
    t_hat = np.array([np.cos(th) * np.cos(ph), np.cos(th) * np.sin(ph), -np.sin(th)])
    p_hat = np.array([-np.sin(ph), np.cos(ph), 0.0])
    return r_hat, t_hat, p_hat


@dataclass(frozen=True)
class PlaneWave:
    """Linearly polarised plane wave.

    Attributes
    ----------
    k0 : float
        Free-space wavenumber.
    theta_deg, phi_deg : float
        Arrival direction in degrees.
    polarization : str
        "theta", "phi", "x" or "y".
    amplitude : float
        Electric field amplitude E0.
    """

    k0: float
    theta_deg: float = 180.0
    phi_deg: float = 0.0
    polarization: str = "x"
    amplitude: float = 1.0

    def __post_init__(self):
        if self.k0 <= 0.0:
            raise ValueError("k0 must be positive")
        if self.polarization not in ("theta", "phi", "x", "y"):
            raise ValueError(f"unknown polarization {self.polarization!r}")
        k_hat, e_hat = self._vectors()
        if abs(k_hat @ e_hat) > 1e-12:
            raise ValueError(
                f"polarization {self.polarization!r} is not transverse to the "
                f"propagation direction; use 'theta' or 'phi'"
            )

    def _vectors(self):
        r_hat, t_hat, p_hat = _unit_vectors(self.theta_deg, self.phi_deg)
        k_hat = -r_hat
        e_hat = {
            "theta": t_hat,
            "phi": p_hat,
            "x": np.array([1.0, 0.0, 0.0]),
            "y": np.array([0.0, 1.0, 0.0]),
        }[self.polarization]
        return k_hat, e_hat

    @property
    def k_hat(self) -> np.ndarray:
        return self._vectors()[0]

    @property
    def e_hat(self) -> np.ndarray:
        return self._vectors()[1]

    def e_field(self, points: np.ndarray) -> np.ndarray:
        """Incident electric field at points, shape (..., 3)."""
        k_hat, e_hat = self._vectors()
        phase = np.exp(-1j * self.k0 * (np.asarray(points) @ k_hat))
        return self.amplitude * phase[..., None] * e_hat

    def h_field(self, points: np.ndarray) -> np.ndarray:
        """Incident magnetic field (k_hat x E) / Z0."""
        k_hat, _ = self._vectors()
        return np.cross(k_hat, self.e_field(points)) / Z0


def _tested(space: RwgSpace, values: np.ndarray, rule, areas) -> np.ndarray:
    """Galerkin test of a field sampled at quadrature points (F, Q, 3)."""
    mesh = space.mesh
    pts = physical_points(rule, mesh.corners())
    coeff, _ = space.coefficients()  # (F, 3)
    free = mesh.vertices[space.tri_free]  # (F, 3, 3)
    # beta on slot (f, s) at point q: coeff[f, s] * (pts[f, q] - free[f, s])
    disp = pts[:, None, :, :] - free[:, :, None, :]  # (F, 3, Q, 3)
    wq = rule.weights[None, None, :] * areas[:, None, None]  # (F, 1, Q)
    slot = np.einsum("fsq,fsqx,fqx->fs", wq * coeff[:, :, None], disp, values)
    tested = np.zeros(space.n_functions, dtype=complex)
    np.add.at(tested, space.tri_edges, slot)
    return tested


def assemble_rhs(space: RwgSpace, wave: PlaneWave, quad_order: int = 3) -> np.ndarray:
    """Tested incident electric field, integral of beta_m . E_inc ds.

    Equals the test against the tangential part alone since beta_m is
    tangential; this is the electric-field equation's right-hand side.
    """
    mesh = space.mesh
    rule = triangle_rule(quad_order)
    pts = physical_points(rule, mesh.corners())  # (F, Q, 3)
    return _tested(space, wave.e_field(pts), rule, mesh.areas())


def assemble_rhs_magnetic(space: RwgSpace, wave: PlaneWave,
                          quad_order: int = 3) -> np.ndarray:
    """Tested rotated incident magnetic field, beta_m . (n x H_inc) ds."""
    mesh = space.mesh
    rule = triangle_rule(quad_order)
    pts = physical_points(rule, mesh.corners())
    n_cross_h = np.cross(mesh.normals()[:, None, :], wave.h_field(pts))
    return _tested(space, n_cross_h, rule, mesh.areas())
