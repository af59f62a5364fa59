"""Far-field evaluation, radar cross section and pattern comparison.

The scattered far field is reported as r*E with the spherical spreading
factor exp(-j k0 r)/r removed:

    rE(u) = -(j k0 / 4 pi) [ Z0 (F_J - (F_J.u) u) - u x F_M ],

where F_X(u) is the radiation integral of surface current X with phase
exp(+j k0 u.r').  Patterns are stored on angular cuts and written to CSV
with a fixed column layout so runs are byte-for-byte reproducible.
"""

from __future__ import annotations

import io
from dataclasses import dataclass

import numpy as np

from .excitation import Z0
from .quadrature import physical_points, triangle_rule
from .rwg import RwgSpace

__all__ = [
    "SolutionCoefficients",
    "FarFieldPattern",
    "cut_directions",
    "far_field",
    "far_field_components",
    "rcs",
    "error_metric",
    "pattern_error_db",
    "write_pattern_csv",
    "read_pattern_csv",
]

PATTERN_HEADER = "theta_deg,phi_deg,sigma_dbsm,etheta_re,etheta_im,ephi_re,ephi_im"

# Floor applied to error curves and to RCS values in dB, so that exact
# nulls stay finite in reports and files.
DB_FLOOR = -300.0


def _spherical_basis(theta_deg, phi_deg):
    th = np.radians(np.asarray(theta_deg, dtype=float))
    ph = np.radians(np.asarray(phi_deg, dtype=float))
    st, ct = np.sin(th), np.cos(th)
    sp, cp = np.sin(ph), np.cos(ph)
    r_hat = np.stack([st * cp, st * sp, ct], axis=-1)
    t_hat = np.stack([ct * cp, ct * sp, -st], axis=-1)
    p_hat = np.stack([-sp, cp, np.zeros_like(sp)], axis=-1)
    return r_hat, t_hat, p_hat


def cut_directions(cut: str, step_deg: float = 1.0):
    """Angles of a full 360-degree great-circle cut.

    Parameters
    ----------
    cut : str
        "theta=<value>" sweeps phi in [0, 360] at fixed theta.
        "phi=<value>" sweeps the polar angle around a great circle at
        fixed phi; sweep positions past 180 degrees map to the opposite
        half-plane (theta = 360 - psi, phi + 180).
    step_deg : float
        Angular step; must divide 360.

    Returns
    -------
    theta_deg, phi_deg : ndarray
        Physical spherical angles of each sample, theta in [0, 180].
    sweep_deg : ndarray
        The monotone cut parameter in [0, 360], useful for plotting.
    """
    try:
        name, _, value = cut.partition("=")
        fixed = float(value)
    except ValueError:
        raise ValueError(f"cannot parse cut {cut!r}; expected e.g. 'phi=0'") from None
    name = name.strip().lower()
    nstep = round(360.0 / step_deg)
    if abs(nstep * step_deg - 360.0) > 1e-9:
        raise ValueError(f"step {step_deg} does not divide 360")
    sweep = np.arange(nstep + 1) * step_deg

    if name == "theta":
        theta = np.full_like(sweep, fixed)
        phi = sweep.copy()
    elif name == "phi":
        back = sweep > 180.0
        theta = np.where(back, 360.0 - sweep, sweep)
        phi = np.where(back, fixed + 180.0, fixed)
    else:
        raise ValueError(f"unknown cut axis {name!r}; expected 'theta' or 'phi'")
    return theta, phi, sweep


def _radiation_integral(space: RwgSpace, k0: float, coeffs_n: np.ndarray,
                        r_hat: np.ndarray, quad_order: int) -> np.ndarray:
    """F(u) = integral of X(r') exp(+j k0 u.r') ds' for X = sum c_n beta_n."""
    mesh = space.mesh
    rule = triangle_rule(quad_order)
    pts = physical_points(rule, mesh.corners())  # (F, Q, 3)
    areas = mesh.areas()

    coeff, _ = space.coefficients()  # (F, 3)
    free = mesh.vertices[space.tri_free]  # (F, 3, 3)
    c_slot = coeffs_n[space.tri_edges] * coeff  # (F, 3)
    # current density at quadrature points: sum over slots
    disp = pts[:, None, :, :] - free[:, :, None, :]  # (F, 3, Q, 3)
    density = np.einsum("fs,fsqx->fqx", c_slot, disp)  # (F, Q, 3)

    wq = rule.weights[None, :] * areas[:, None]  # (F, Q)
    src = pts.reshape(-1, 3)
    weighted = (wq[..., None] * density).reshape(-1, 3)  # (F*Q, 3)
    phase = np.exp(1j * k0 * (r_hat @ src.T))  # (S, F*Q)
    return phase @ weighted  # (S, 3)


@dataclass(frozen=True)
class SolutionCoefficients:
    """Expansion coefficients of the surface currents.

    electric holds the coefficients of J (amperes); magnetic those of M
    (volts), all-zero for formulations without magnetic unknowns.
    """

    electric: np.ndarray
    magnetic: np.ndarray

    def __post_init__(self):
        if self.electric.shape != self.magnetic.shape:
            raise ValueError("coefficient vectors differ in length")


def far_field_components(space: RwgSpace, k0: float, electric: np.ndarray,
                         magnetic: np.ndarray | None, theta_deg, phi_deg,
                         quad_order: int = 5):
    """Scattered far field r*E on the given directions.

    Parameters
    ----------
    electric : ndarray, shape (N,)
        Electric current coefficients.
    magnetic : ndarray or None, shape (N,)
        Magnetic current coefficients, or None when the formulation
        carries no magnetic unknown.

    Returns
    -------
    e_theta, e_phi : ndarray, complex
        Components of r*E along the spherical unit vectors.
    """
    theta_deg = np.atleast_1d(np.asarray(theta_deg, dtype=float))
    phi_deg = np.atleast_1d(np.asarray(phi_deg, dtype=float))
    r_hat, t_hat, p_hat = _spherical_basis(theta_deg, phi_deg)

    f_j = _radiation_integral(space, k0, np.asarray(electric, dtype=complex),
                              r_hat, quad_order)
    field = Z0 * (f_j - np.sum(f_j * r_hat, axis=-1, keepdims=True) * r_hat)
    if magnetic is not None and np.any(magnetic):
        f_m = _radiation_integral(space, k0, np.asarray(magnetic, dtype=complex),
                                  r_hat, quad_order)
        field = field - np.cross(r_hat, f_m)
    field = -(1j * k0 / (4.0 * np.pi)) * field

    e_theta = np.sum(field * t_hat, axis=-1)
    e_phi = np.sum(field * p_hat, axis=-1)
    return e_theta, e_phi


def far_field(space: RwgSpace, k0: float, solution: SolutionCoefficients,
              theta_deg, phi_deg, quad_order: int = 5) -> "FarFieldPattern":
    """Far-field pattern of a solved current pair on the given angles."""
    theta_deg = np.atleast_1d(np.asarray(theta_deg, dtype=float))
    phi_deg = np.atleast_1d(np.asarray(phi_deg, dtype=float))
    e_theta, e_phi = far_field_components(space, k0, solution.electric,
                                          solution.magnetic, theta_deg,
                                          phi_deg, quad_order)
    return FarFieldPattern(theta_deg=theta_deg, phi_deg=phi_deg,
                           e_theta=e_theta, e_phi=e_phi)


@dataclass(frozen=True)
class FarFieldPattern:
    """Far-field samples along a cut.

    theta_deg/phi_deg are the physical spherical angles of each sample;
    e_theta/e_phi hold r*E components for a unit-amplitude excitation.
    """

    theta_deg: np.ndarray
    phi_deg: np.ndarray
    e_theta: np.ndarray
    e_phi: np.ndarray

    def rcs(self) -> np.ndarray:
        """Bistatic radar cross section, m^2, for E0 = 1 V/m."""
        return 4.0 * np.pi * (np.abs(self.e_theta) ** 2 + np.abs(self.e_phi) ** 2)

    def rcs_dbsm(self) -> np.ndarray:
        return 10.0 * np.log10(np.maximum(self.rcs(), 10.0 ** (DB_FLOOR / 10.0)))


def rcs(e_theta: np.ndarray, e_phi: np.ndarray, amplitude: float = 1.0) -> np.ndarray:
    """sigma = 4 pi |rE|^2 / |E0|^2."""
    return 4.0 * np.pi * (np.abs(e_theta) ** 2 + np.abs(e_phi) ** 2) / amplitude ** 2


def error_metric(reference: FarFieldPattern, pattern: FarFieldPattern):
    """Per-angle, per-component field error against a reference.

    Both components are normalised by the largest reference component
    magnitude over the whole cut:

        eps_i(angle) = |E_i,ref(angle) - E_i(angle)| / max_cut |E_ref|

    Returns
    -------
    eps_theta, eps_phi : ndarray
        Linear error curves; convert with 20 log10 for dB.
    """
    if reference.theta_deg.shape != pattern.theta_deg.shape:
        raise ValueError("patterns sample different numbers of angles")
    norm = max(np.max(np.abs(reference.e_theta)), np.max(np.abs(reference.e_phi)))
    if norm == 0.0:
        raise ValueError("reference pattern is identically zero")
    eps_theta = np.abs(reference.e_theta - pattern.e_theta) / norm
    eps_phi = np.abs(reference.e_phi - pattern.e_phi) / norm
    return eps_theta, eps_phi


def pattern_error_db(reference: FarFieldPattern, pattern: FarFieldPattern) -> np.ndarray:
    """Worse-component error curve in dB, floored at -300 dB."""
    eps_theta, eps_phi = error_metric(reference, pattern)
    eps = np.maximum(eps_theta, eps_phi)
    with np.errstate(divide="ignore"):
        return np.maximum(20.0 * np.log10(eps), DB_FLOOR)


def write_pattern_csv(path, pattern: FarFieldPattern) -> None:
    """Write a pattern as CSV with a fixed header and 17-digit floats."""
    buf = io.StringIO()
    buf.write(PATTERN_HEADER + "\n")
    sigma_db = pattern.rcs_dbsm()
    for i in range(pattern.theta_deg.size):
        row = (pattern.theta_deg[i], pattern.phi_deg[i], sigma_db[i],
               pattern.e_theta[i].real, pattern.e_theta[i].imag,
               pattern.e_phi[i].real, pattern.e_phi[i].imag)
        buf.write(",".join(f"{v:.17g}" for v in row) + "\n")
    with open(path, "w", newline="\n") as handle:
        handle.write(buf.getvalue())


def read_pattern_csv(path) -> FarFieldPattern:
    with open(path) as handle:
        header = handle.readline().strip()
        if header != PATTERN_HEADER:
            raise ValueError(f"unexpected pattern header {header!r}")
        data = np.loadtxt(handle, delimiter=",", ndmin=2)
    return FarFieldPattern(
        theta_deg=data[:, 0],
        phi_deg=data[:, 1],
        e_theta=data[:, 3] + 1j * data[:, 4],
        e_phi=data[:, 5] + 1j * data[:, 6],
    )
