"""Free-space kernel and singular static integrals over triangles.

Time convention exp(+j w t): the scalar kernel is

    G(r, r') = exp(-j k R) / (4 pi R),  R = |r - r'|,

so outgoing waves carry exp(-j k R).  ``grad_green`` differentiates with
respect to the observation point r.

Near and coincident source triangles are handled by splitting the kernel
into the static part 1 / (4 pi R), integrated in closed form over the
triangle, and a bounded remainder left to regular quadrature.  The closed
forms are the classical per-edge expressions: with the observation point
projected into the triangle plane at height d, each edge contributes a
log term ln((R+ + l+) / (R- + l-)) and an arctangent pair that sums to
the subtended solid angle.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = [
    "KernelEvaluator",
    "green",
    "grad_green",
    "green_smooth",
    "grad_green_smooth",
    "StaticPotentials",
    "static_potentials",
    "singular_static_potential",
]

_FOUR_PI = 4.0 * np.pi


def _displacement(r: np.ndarray, rp: np.ndarray):
    rvec = np.asarray(r, dtype=float) - np.asarray(rp, dtype=float)
    dist = np.linalg.norm(rvec, axis=-1)
    return rvec, dist


def green(k0: float, r: np.ndarray, rp: np.ndarray) -> np.ndarray:
    """Scalar kernel exp(-j k R) / (4 pi R); r and rp broadcast."""
    _, dist = _displacement(r, rp)
    return np.exp(-1j * k0 * dist) / (_FOUR_PI * dist)


def grad_green(k0: float, r: np.ndarray, rp: np.ndarray) -> np.ndarray:
    """Gradient of the kernel with respect to r.

    Equals -(1 + j k R) exp(-j k R) / (4 pi R^2) along the unit vector
    from rp to r.
    """
    rvec, dist = _displacement(r, rp)
    factor = -(1.0 + 1j * k0 * dist) * np.exp(-1j * k0 * dist) / (_FOUR_PI * dist**3)
    return rvec * factor[..., None]


def green_smooth(k0: float, r: np.ndarray, rp: np.ndarray) -> np.ndarray:
    """Kernel minus its static part, bounded as R -> 0.

    (exp(-j k R) - 1) / (4 pi R) written via half-angle identities to stay
    accurate for small k R; the removable limit at R = 0 is -j k / (4 pi).
    """
    _, dist = _displacement(r, rp)
    kr = k0 * dist
    num = -2.0 * np.sin(0.5 * kr) ** 2 - 1j * np.sin(kr)
    with np.errstate(divide="ignore", invalid="ignore"):
        val = num / (_FOUR_PI * dist)
    return np.where(dist > 0.0, val, -1j * k0 / _FOUR_PI)


def grad_green_smooth(k0: float, r: np.ndarray, rp: np.ndarray) -> np.ndarray:
    """Gradient of the kernel minus the static gradient.

    The radial profile [1 - (1 + j k R) exp(-j k R)] / (4 pi R^3) is
    O(1/R) relative to the full gradient's 1/R^2 and stays bounded; the
    direction is undefined at R = 0 where the principal value is zero.
    """
    rvec, dist = _displacement(r, rp)
    kr = k0 * dist
    re = 2.0 * np.sin(0.5 * kr) ** 2 - kr * np.sin(kr)
    im = np.sin(kr) - kr * np.cos(kr)
    with np.errstate(divide="ignore", invalid="ignore"):
        profile = (re + 1j * im) / (_FOUR_PI * dist**3)
    profile = np.where(dist > 0.0, profile, 0.0)
    return rvec * profile[..., None]


@dataclass(frozen=True)
class StaticPotentials:
    """Closed-form static integrals over triangles.

    Attributes
    ----------
    zero : ndarray, shape (...)
        integral of 1 / (4 pi R) ds'.
    first : ndarray, shape (..., 3)
        integral of r' / (4 pi R) ds'.
    grad : ndarray or None, shape (..., 3)
        Gradient of ``zero`` with respect to the observation point.
    """

    zero: np.ndarray
    first: np.ndarray
    grad: np.ndarray | None = None


def static_potentials(tri: np.ndarray, obs: np.ndarray, gradient: bool = False) -> StaticPotentials:
    """Evaluate the static triangle integrals in closed form.

    Parameters
    ----------
    tri : ndarray, shape (..., 3, 3)
        Triangle corner coordinates.
    obs : ndarray, shape (..., 3)
        Observation points; leading dimensions broadcast against ``tri``.
    gradient : bool
        Also return the observation-point gradient of the scalar integral.

    Returns
    -------
    StaticPotentials

    Notes
    -----
    Valid for observation points anywhere, including on the triangle
    itself (the integrals are weakly singular and finite).  The gradient
    at points strictly inside the source triangle is a principal value
    and its normal part is reported as zero there.
    """
    tri = np.asarray(tri, dtype=float)
    obs = np.asarray(obs, dtype=float)
    a = tri  # (..., 3 edges, 3); edge i from vertex i to vertex i+1
    b = np.roll(tri, -1, axis=-2)

    e01 = tri[..., 1, :] - tri[..., 0, :]
    e02 = tri[..., 2, :] - tri[..., 0, :]
    nvec = np.cross(e01, e02)
    nnorm = np.linalg.norm(nvec, axis=-1, keepdims=True)
    nhat = nvec / nnorm

    scale = np.linalg.norm(e01, axis=-1) + np.linalg.norm(e02, axis=-1)
    tol = 1e-10 * scale  # (...)

    d = np.einsum("...x,...x->...", obs - tri[..., 0, :], nhat)  # (...)
    rho = obs - d[..., None] * nhat

    tvec = b - a  # (..., 3, 3)
    length = np.linalg.norm(tvec, axis=-1, keepdims=True)
    that = tvec / length
    mhat = np.cross(that, nhat[..., None, :])  # outward in-plane edge normals

    to_a = a - obs[..., None, :]
    to_b = b - obs[..., None, :]
    l_lo = np.einsum("...ex,...ex->...e", to_a, that)  # (..., 3)
    l_hi = np.einsum("...ex,...ex->...e", to_b, that)
    p0 = np.einsum("...ex,...ex->...e", a - rho[..., None, :], mhat)
    r_lo = np.linalg.norm(to_a, axis=-1)
    r_hi = np.linalg.norm(to_b, axis=-1)
    r0sq = p0**2 + d[..., None] ** 2

    # Stable log term: pick the branch free of cancellation; when the
    # observation point sits on the edge line (r0 -> 0) the log blows up
    # but every use multiplies it by p0 or r0sq, so zero is the limit.
    with np.errstate(divide="ignore", invalid="ignore"):
        num = np.where(l_hi >= 0.0, r_hi + l_hi, r0sq / (r_hi - l_hi))
        den = np.where(l_lo >= 0.0, r_lo + l_lo, r0sq / (r_lo - l_lo))
        f2 = np.log(num) - np.log(den)
    on_line = r0sq <= (tol[..., None]) ** 2
    f2 = np.where(on_line, 0.0, f2)

    absd = np.abs(d)[..., None]
    with np.errstate(divide="ignore", invalid="ignore"):
        den_hi = r0sq + absd * r_hi
        den_lo = r0sq + absd * r_lo
        t_hi = np.where(den_hi > 0.0, np.arctan(p0 * l_hi / np.where(den_hi > 0.0, den_hi, 1.0)), 0.0)
        t_lo = np.where(den_lo > 0.0, np.arctan(p0 * l_lo / np.where(den_lo > 0.0, den_lo, 1.0)), 0.0)
    beta = t_hi - t_lo  # (..., 3); sums to the subtended in-plane angle

    i_zero = (p0 * f2).sum(axis=-1) - np.abs(d) * beta.sum(axis=-1)

    bracket = r0sq * f2 + l_hi * r_hi - l_lo * r_lo
    i_rho = 0.5 * (mhat * bracket[..., None]).sum(axis=-2)  # (..., 3)
    i_first = (i_rho + rho * i_zero[..., None]) / _FOUR_PI

    grad = None
    if gradient:
        g = -(mhat * f2[..., None]).sum(axis=-2)
        g = g - nhat * (np.sign(d) * beta.sum(axis=-1))[..., None]
        grad = g / _FOUR_PI
    return StaticPotentials(zero=i_zero / _FOUR_PI, first=i_first, grad=grad)


def singular_static_potential(tri: np.ndarray, obs: np.ndarray) -> np.ndarray:
    """Closed-form value of the static integral 1 / (4 pi R) over a triangle.

    Valid for any observation point, including on the triangle; see
    :func:`static_potentials` for the vector companion integrals.
    """
    return static_potentials(tri, obs).zero


@dataclass(frozen=True)
class KernelEvaluator:
    """Wavenumber bundle with guarded point-pair kernel evaluation.

    The guarded methods refuse coincident points; assembly routes those
    through the extraction path instead.  k0 = 0 is allowed for static
    test kernels only; driven systems require k0 > 0.
    """

    k0: float

    def __post_init__(self):
        if self.k0 < 0.0 or not np.isfinite(self.k0):
            raise ValueError("k0 must be finite and non-negative")

    def _check(self, r, rp):
        _, dist = _displacement(r, rp)
        if np.any(dist < 1e-15):
            raise ValueError("coincident points; use the singular path")

    def green(self, r: np.ndarray, rp: np.ndarray) -> np.ndarray:
        self._check(r, rp)
        return green(self.k0, r, rp)

    def grad_green(self, r: np.ndarray, rp: np.ndarray) -> np.ndarray:
        self._check(r, rp)
        return grad_green(self.k0, r, rp)

    def green_smooth(self, r: np.ndarray, rp: np.ndarray) -> np.ndarray:
        return green_smooth(self.k0, r, rp)

    def grad_green_smooth(self, r: np.ndarray, rp: np.ndarray) -> np.ndarray:
        return grad_green_smooth(self.k0, r, rp)
