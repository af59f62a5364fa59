"""Series reference solution for scattering from a perfectly conducting sphere.

Convention: time factor exp(+j w t), incident plane wave travelling along
+z with unit x polarisation,

    E_inc = x_hat exp(-j k0 z).

Outgoing waves then use spherical Hankel functions of the second kind.
The far field is reported with the factor exp(-j k0 r) / r removed, so
``e_theta`` and ``e_phi`` carry units of volts (field times distance) and
the bistatic radar cross-section is 4 pi (|e_theta|^2 + |e_phi|^2).

Also provides the interior cavity resonance frequencies of the sphere,
where boundary integral formulations of the exterior problem degrade:
transverse-electric modes at zeros of j_n(ka), transverse-magnetic modes
at zeros of d/dx [x j_n(x)].
"""

from __future__ import annotations

import logging

import numpy as np
from scipy.optimize import brentq
from scipy.special import spherical_jn, spherical_yn

logger = logging.getLogger(__name__)

__all__ = ["mie_far_field", "mie_rcs", "sphere_cavity_resonance"]


def _coefficients(x: float, nmax: int):
    """Scattering coefficients a_n (TM) and b_n (TE) for a PEC sphere.

    Derived from vanishing total tangential E at r = a; with the second
    kind Hankel convention a_n = psi_n'(x) / xi_n'(x) and
    b_n = psi_n(x) / xi_n(x), xi_n(x) = x h2_n(x).
    """
    n = np.arange(1, nmax + 1)
    jn = spherical_jn(n, x)
    jnp = spherical_jn(n, x, derivative=True)
    yn = spherical_yn(n, x)
    ynp = spherical_yn(n, x, derivative=True)
    h2 = jn - 1j * yn
    h2p = jnp - 1j * ynp
    psi = x * jn
    psi_p = jn + x * jnp
    xi = x * h2
    xi_p = h2 + x * h2p
    a = psi_p / xi_p
    b = psi / xi
    return a, b


def _angular_functions(cos_theta: np.ndarray, nmax: int):
    """pi_n and tau_n by upward recurrence; shapes (S, nmax)."""
    mu = np.asarray(cos_theta, dtype=float)
    S = mu.shape[0]
    pi_n = np.zeros((S, nmax + 1))
    tau_n = np.zeros((S, nmax + 1))
    if nmax >= 1:
        pi_n[:, 1] = 1.0
        tau_n[:, 1] = mu
    for n in range(2, nmax + 1):
        pi_n[:, n] = ((2 * n - 1) * mu * pi_n[:, n - 1] - n * pi_n[:, n - 2]) / (n - 1)
        tau_n[:, n] = n * mu * pi_n[:, n] - (n + 1) * pi_n[:, n - 1]
    return pi_n[:, 1:], tau_n[:, 1:]


def truncation_order(ka: float) -> int:
    """Series length: ceil(ka) + 10 terms."""
    return int(np.ceil(ka)) + 10


def mie_far_field(k0: float, radius: float, theta_deg, phi_deg, nmax: int | None = None):
    """Far-field components of the scattered wave.

    Parameters
    ----------
    k0 : float
        Free-space wavenumber.
    radius : float
        Sphere radius; the sphere is centred at the origin.
    theta_deg, phi_deg : array_like
        Observation directions in degrees (broadcast together).
    nmax : int, optional
        Series truncation; default ceil(ka) + 10.

    Returns
    -------
    e_theta, e_phi : ndarray of complex
        Far-field components with exp(-j k0 r) / r removed, for a unit
        amplitude incident wave.
    """
    ka = k0 * radius
    if ka <= 0.0:
        raise ValueError("k0 * radius must be positive")
    if nmax is None:
        nmax = truncation_order(ka)
    theta = np.radians(np.asarray(theta_deg, dtype=float).ravel())
    phi = np.radians(np.asarray(phi_deg, dtype=float).ravel())
    theta, phi = np.broadcast_arrays(theta, phi)

    a, b = _coefficients(ka, nmax)
    n = np.arange(1, nmax + 1)
    cn = (2 * n + 1) / (n * (n + 1))
    pi_n, tau_n = _angular_functions(np.cos(theta), nmax)

    s1 = (cn * (a * pi_n + b * tau_n)).sum(axis=1)
    s2 = (cn * (a * tau_n + b * pi_n)).sum(axis=1)

    e_theta = np.cos(phi) * s2 / (1j * k0)
    e_phi = -np.sin(phi) * s1 / (1j * k0)
    return e_theta, e_phi


def mie_rcs(k0: float, radius: float, theta_deg, phi_deg, nmax: int | None = None) -> np.ndarray:
    """Bistatic radar cross-section, absolute units (area)."""
    e_theta, e_phi = mie_far_field(k0, radius, theta_deg, phi_deg, nmax)
    return 4.0 * np.pi * (np.abs(e_theta) ** 2 + np.abs(e_phi) ** 2)


def _mode_condition(family: str, n: int):
    if family == "te":
        return lambda x: spherical_jn(n, x)
    if family == "tm":
        return lambda x: spherical_jn(n, x) + x * spherical_jn(n, x, derivative=True)
    raise ValueError(f"unknown mode family {family!r}; use 'te' or 'tm'")


def sphere_cavity_resonance(mode: str = "lowest", n: int = 1, index: int = 1) -> float:
    """Interior resonance ka of a PEC spherical cavity.

    Parameters
    ----------
    mode : {"lowest", "tm", "te"}
        "tm": index-th root of d/dx [x j_n(x)]; "te": index-th root of
        j_n(x); "lowest" is the overall fundamental, the first TM root at
        ka ~= 2.7437 (the first TE root, the first zero of j_1, lies
        higher at ka ~= 4.4934).
    n : int
        Spherical harmonic order (>= 1).
    index : int
        Which root of the condition, 1-based.

    Returns
    -------
    float
        The resonant ka; the mode condition vanishes there to ~1e-12.
    """
    if mode == "lowest":
        mode, n, index = "tm", 1, 1
    if n < 1 or index < 1:
        raise ValueError("n and index must be >= 1")
    condition = _mode_condition(mode, n)

    # Bracket sign changes on a uniform scan; roots of the spherical
    # Bessel conditions are separated by more than 0.5 for small n.
    found = 0
    x0 = 0.25
    step = 0.05
    f0 = condition(x0)
    x = x0
    while x < 200.0:
        x1 = x + step
        f1 = condition(x1)
        if f0 == 0.0:
            root = x
            found += 1
        elif f0 * f1 < 0.0:
            root = brentq(condition, x, x1, xtol=1e-14, rtol=8.9e-16)
            found += 1
        if found == index:
            logger.info("cavity mode %s n=%d index=%d: ka=%.12f", mode, n, index, root)
            return float(root)
        x, f0 = x1, f1
    raise RuntimeError("failed to bracket the requested cavity resonance")
