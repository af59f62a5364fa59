"""Symmetric quadrature rules on triangles.

Rules are stored in barycentric coordinates with weights normalised to sum
to one, so integrating a function f over a physical triangle T reads

    integral = area(T) * sum_q w_q * f(x_q),   x_q = sum_i lambda_qi * v_i.

The built-in rules are classical symmetric Gauss rules with strictly
positive weights and points strictly inside the triangle.  The degree-7
rule is a collapsed tensor Gauss rule averaged over the cyclic vertex
permutations, which keeps positivity and interior points at the cost of a
few more evaluations; it is only used where high accuracy is requested.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = ["TriangleRule", "triangle_rule", "physical_points"]


@dataclass(frozen=True)
class TriangleRule:
    """Quadrature rule on the reference triangle.

    Attributes
    ----------
    degree : int
        Largest total polynomial degree integrated exactly.
    points : ndarray, shape (Q, 3)
        Barycentric coordinates of the nodes.
    weights : ndarray, shape (Q,)
        Weights, normalised so that ``weights.sum() == 1``.
    """

    degree: int
    points: np.ndarray
    weights: np.ndarray


def _orbit1() -> np.ndarray:
    return np.array([[1.0, 1.0, 1.0]]) / 3.0


def _orbit3(a: float) -> np.ndarray:
    # permutations of (1 - 2a, a, a)
    b = 1.0 - 2.0 * a
    return np.array([[b, a, a], [a, b, a], [a, a, b]])


def _rule_degree1() -> TriangleRule:
    return TriangleRule(1, _orbit1(), np.array([1.0]))


def _rule_degree2() -> TriangleRule:
    return TriangleRule(2, _orbit3(1.0 / 6.0), np.full(3, 1.0 / 3.0))


def _rule_degree4() -> TriangleRule:
    # 6-point rule, two symmetric orbits, all weights positive.
    a1, w1 = 0.445948490915965, 0.223381589678011
    a2, w2 = 0.091576213509771, 0.109951743655322
    pts = np.vstack([_orbit3(a1), _orbit3(a2)])
    wts = np.concatenate([np.full(3, w1), np.full(3, w2)])
    return TriangleRule(4, pts, wts)


def _rule_degree5() -> TriangleRule:
    # 7-point rule: centroid plus two orbits.
    s15 = np.sqrt(15.0)
    a1 = (6.0 + s15) / 21.0
    a2 = (6.0 - s15) / 21.0
    w1 = (155.0 + s15) / 1200.0
    w2 = (155.0 - s15) / 1200.0
    pts = np.vstack([_orbit1(), _orbit3(a1), _orbit3(a2)])
    wts = np.concatenate([[9.0 / 40.0], np.full(3, w1), np.full(3, w2)])
    return TriangleRule(5, pts, wts)


def _rule_degree7() -> TriangleRule:
    # Collapsed tensor Gauss rule on the square mapped onto the triangle
    #   (l1, l2, l3) = (1 - u, u (1 - v), u v),  jacobian factor u.
    # A monomial of total degree 7 needs the u rule exact to degree 8 and
    # the v rule exact to degree 7.  Averaging over the cyclic rotations of
    # the barycentric coordinates restores symmetry.
    xu, wu = np.polynomial.legendre.leggauss(5)
    xv, wv = np.polynomial.legendre.leggauss(4)
    u = 0.5 * (xu + 1.0)
    v = 0.5 * (xv + 1.0)
    wu = 0.5 * wu
    wv = 0.5 * wv

    uu, vv = np.meshgrid(u, v, indexing="ij")
    ww = (wu[:, None] * wv[None, :] * uu * 2.0).ravel()  # weights sum to 1
    lam = np.stack([1.0 - uu, uu * (1.0 - vv), uu * vv], axis=-1).reshape(-1, 3)

    pts = np.vstack([lam, lam[:, [2, 0, 1]], lam[:, [1, 2, 0]]])
    wts = np.concatenate([ww, ww, ww]) / 3.0
    return TriangleRule(7, pts, wts)


_BUILDERS = {
    1: _rule_degree1,
    2: _rule_degree2,
    4: _rule_degree4,
    5: _rule_degree5,
    7: _rule_degree7,
}
_DEGREES = sorted(_BUILDERS)


def triangle_rule(order: int) -> TriangleRule:
    """Return the smallest built-in rule exact to at least ``order``.

    Parameters
    ----------
    order : int
        Requested polynomial exactness, between 1 and 7.

    Returns
    -------
    TriangleRule
        Rule with ``degree >= order``, positive weights, interior points.
    """
    if not 1 <= order <= _DEGREES[-1]:
        raise ValueError(f"no triangle rule of order {order}; supported range 1..{_DEGREES[-1]}")
    degree = next(d for d in _DEGREES if d >= order)
    return _BUILDERS[degree]()


def physical_points(rule: TriangleRule, vertices: np.ndarray) -> np.ndarray:
    """Map rule nodes onto physical triangles.

    Parameters
    ----------
    rule : TriangleRule
    vertices : ndarray, shape (..., 3, 3)
        Triangle corner coordinates.

    Returns
    -------
    ndarray, shape (..., Q, 3)
    """
    return np.einsum("qi,...ix->...qx", rule.points, vertices)
