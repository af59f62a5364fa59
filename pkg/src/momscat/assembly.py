"""Galerkin assembly of boundary operators and system composition.

Six matrices over the RWG space describe everything the formulations
need (beta_m are the basis functions, G the free-space kernel, n the
outward normal, primes mark source-side quantities):

    A_mn      = int (n x beta_m) . beta_n ds              (antisymmetric)
    Aprime_mn = int beta_m . beta_n ds                    (Gram, SPD)
    B_mn      = int int beta_m . beta_n' G ds' ds         (symmetric)
    C_mn      = -int int (div beta_m)(div' beta_n') G ds' ds
    D_mn      = PV int int beta_m . (grad G x beta_n') ds' ds
    K_mfie_mn = PV int int (n x beta_m) . (grad G x beta_n') ds' ds

D and K_mfie integrate the same curl kernel against tangential and
rotated test functions respectively: D couples magnetic currents into
the electric-field equation, K_mfie is the magnetic-field operator.
Double integrals use fixed-order quadrature with singularity extraction
on near pairs (static 1/R parts in closed form, smooth remainder by the
same rule); coincident-triangle contributions to D and K_mfie vanish on
flat facets and are excluded.

The observation-triangle loop is chunked and vectorised over all source
triangles; chunk results fold into the edge-indexed matrices through
the fixed two-slots-per-edge incidence, so assembly is deterministic.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np

from .excitation import Z0, PlaneWave, assemble_rhs, assemble_rhs_magnetic
from .kernels import KernelEvaluator, green_smooth, grad_green_smooth, static_potentials
from .postproc import SolutionCoefficients
from .quadrature import physical_points, triangle_rule
from .rwg import RwgSpace

logger = logging.getLogger(__name__)

__all__ = [
    "SystemBlocks",
    "LinearSystem",
    "assemble_gram_A",
    "assemble_gram_Aprime",
    "assemble_efie_blocks",
    "assemble_D_block",
    "assemble_mfie",
    "assemble_blocks",
    "build_system",
]

_FOUR_PI = 4.0 * np.pi

FORMULATIONS = ("efie", "mfie", "cfie", "csie")


@dataclass(frozen=True)
class SystemBlocks:
    """Assembled operator matrices for one space and wavenumber."""

    k0: float
    space: RwgSpace
    A: np.ndarray
    Aprime: np.ndarray
    B: np.ndarray
    C: np.ndarray
    D: np.ndarray
    K_mfie: np.ndarray


def _edge_slot_pairs(space: RwgSpace) -> np.ndarray:
    """Flat (triangle*3 + slot) indices of each edge's two incidences."""
    flat = space.tri_edges.ravel()
    order = np.argsort(flat, kind="stable")
    srt = flat[order]
    n = space.n_functions
    if srt.size != 2 * n or not np.array_equal(srt[0::2], srt[1::2]) \
            or not np.array_equal(srt[0::2], np.arange(n)):
        raise ValueError("every basis edge must appear in exactly two triangles")
    return order.reshape(n, 2)


def _local_matrix(space: RwgSpace, rotate: bool) -> np.ndarray:
    """Single-surface Galerkin matrix, exact for the quadratic integrand."""
    mesh = space.mesh
    rule = triangle_rule(2)
    pts = physical_points(rule, mesh.corners())  # (F, Q, 3)
    coeff, _ = space.coefficients()
    free = mesh.vertices[space.tri_free]  # (F, 3, 3)
    disp = pts[:, None, :, :] - free[:, :, None, :]  # (F, 3, Q, 3)
    w = rule.weights[None, :] * mesh.areas()[:, None]  # (F, Q)
    test = disp
    if rotate:
        test = np.cross(mesh.normals()[:, None, None, :], disp)
    loc = np.einsum("fq,faqx,fbqx->fab", w, test, disp)
    loc *= coeff[:, :, None] * coeff[:, None, :]
    mat = np.zeros((space.n_functions, space.n_functions))
    np.add.at(mat, (space.tri_edges[:, :, None], space.tri_edges[:, None, :]), loc)
    return mat


def assemble_gram_A(space: RwgSpace) -> np.ndarray:
    """A_mn = int (n x beta_m) . beta_n ds; antisymmetric, zero diagonal."""
    return _local_matrix(space, rotate=True)


def assemble_gram_Aprime(space: RwgSpace) -> np.ndarray:
    """Gram matrix Aprime_mn = int beta_m . beta_n ds; SPD."""
    return _local_matrix(space, rotate=False)


def _fold(mat: np.ndarray, row_edges: np.ndarray, pair: np.ndarray,
          edge_slots: np.ndarray) -> None:
    """Scatter a (T, 3, F, 3) slot-pair block into the edge-indexed matrix."""
    t, _, f, _ = pair.shape
    flat = pair.reshape(t * 3, f * 3)
    cols = flat[:, edge_slots[:, 0]] + flat[:, edge_slots[:, 1]]  # (T*3, N)
    np.add.at(mat, row_edges, cols)


def _assemble_kernel_blocks(space: RwgSpace, k0: float, quad_obs: int,
                            quad_src: int, near_factor: float,
                            want_bc: bool, want_d: bool, want_k: bool,
                            chunk_elements: int = 2_000_000) -> dict:
    mesh = space.mesh
    n_tri = mesh.n_triangles
    n = space.n_functions
    rule_o = triangle_rule(quad_obs)
    rule_s = triangle_rule(quad_src)
    q_obs = rule_o.weights.size
    q_src = rule_s.weights.size

    corners = mesh.corners()
    obs_pts = physical_points(rule_o, corners)  # (F, Qo, 3)
    src_pts = physical_points(rule_s, corners)  # (F, Qs, 3)
    areas = mesh.areas()
    normals = mesh.normals()
    cents = mesh.centroids()
    diam = mesh.diameters()
    w_src = rule_s.weights[None, :] * areas[:, None]  # (F, Qs)
    w_obs = rule_o.weights[None, :] * areas[:, None]  # (F, Qo)
    coeff, div = space.coefficients()
    free = mesh.vertices[space.tri_free]  # (F, 3, 3)
    edge_slots = _edge_slot_pairs(space)

    need_g = want_d or want_k
    out = {}
    if want_bc:
        out["B"] = np.zeros((n, n), dtype=complex)
        out["C"] = np.zeros((n, n), dtype=complex)
    if want_d:
        out["D"] = np.zeros((n, n), dtype=complex)
    if want_k:
        out["K"] = np.zeros((n, n), dtype=complex)

    chunk = max(1, chunk_elements // max(1, q_obs * n_tri * q_src))
    for t0 in range(0, n_tri, chunk):
        t1 = min(t0 + chunk, n_tri)
        tn = t1 - t0
        op = obs_pts[t0:t1]  # (T, Qo, 3)

        diff = op[:, :, None, None, :] - src_pts[None, None, :, :, :]  # (T, Qo, F, Qs, 3)
        dist = np.linalg.norm(diff, axis=-1)
        # full kernel; singular entries land only on near pairs and are
        # replaced below before any slot contraction uses them
        with np.errstate(divide="ignore", invalid="ignore"):
            gv = np.exp(-1j * k0 * dist) / (_FOUR_PI * dist)
            prof = -(1.0 + 1j * k0 * dist) * gv / dist**2

        m0 = np.einsum("tofq,fq->tof", gv, w_src)
        m1 = g0 = g1 = None
        if want_bc:
            m1 = np.einsum("tofq,fq,fqx->tofx", gv, w_src, src_pts)
        if need_g:
            g0 = np.einsum("tofq,fq,tofqx->tofx", prof, w_src, diff)
            cr = np.cross(diff, src_pts[None, None, :, :, :])
            g1 = np.einsum("tofq,fq,tofqx->tofx", prof, w_src, cr)
            del cr
        del diff, dist, gv, prof

        # near pairs: redo the inner integrals with the bounded smooth
        # remainder plus closed-form static parts
        cdist = np.linalg.norm(cents[t0:t1, None, :] - cents[None, :, :], axis=-1)
        thresh = near_factor * np.maximum(diam[t0:t1, None], diam[None, :])
        ti, si = np.nonzero(cdist < thresh)
        if ti.size:
            obs_n = op[ti]  # (K, Qo, 3)
            srcp = src_pts[si]  # (K, Qs, 3)
            w_n = w_src[si]  # (K, Qs)
            r_pairs = obs_n[:, :, None, :]
            s_pairs = srcp[:, None, :, :]
            gs = green_smooth(k0, r_pairs, s_pairs)  # (K, Qo, Qs)
            stat = static_potentials(corners[si][:, None, :, :], obs_n,
                                     gradient=need_g)
            m0[ti, :, si] = np.einsum("koq,kq->ko", gs, w_n) + stat.zero
            if want_bc:
                m1[ti, :, si] = (np.einsum("koq,kq,kqx->kox", gs, w_n, srcp)
                                 + stat.first)
            if need_g:
                ggs = grad_green_smooth(k0, r_pairs, s_pairs)  # (K, Qo, Qs, 3)
                g0n = np.einsum("koqx,kq->kox", ggs, w_n) + stat.grad
                g1n = (np.einsum("koqx,kq->kox", np.cross(ggs, s_pairs), w_n)
                       + np.cross(stat.grad, obs_n))
                # coincident pair: grad G is normal to the facet there, so
                # both curl couplings vanish identically on flat triangles
                self_pair = (ti + t0) == si
                g0n[self_pair] = 0.0
                g1n[self_pair] = 0.0
                g0[ti, :, si] = g0n
                g1[ti, :, si] = g1n

        # contract inner moments with the observation-side slot functions
        disp_o = op[:, None, :, :] - free[t0:t1, :, None, :]  # (T, 3, Qo, 3)
        wd = w_obs[t0:t1, None, :, None] * disp_o
        row_edges = space.tri_edges[t0:t1].ravel()
        cc = coeff[t0:t1, :, None, None] * coeff[None, None, :, :]  # (T, 3, F, 3)

        if want_bc:
            tb = np.einsum("taox,tofx->taf", wd, m1)
            tbx = np.einsum("taox,tof->tafx", wd, m0)
            bpair = (tb[..., None] - np.einsum("tafx,fbx->tafb", tbx, free)) * cc
            _fold(out["B"], row_edges, bpair, edge_slots)
            s0 = np.einsum("to,tof->tf", w_obs[t0:t1], m0)
            cpair = -(div[t0:t1, :, None, None] * div[None, None, :, :]) \
                * s0[:, None, :, None]
            _fold(out["C"], row_edges, cpair, edge_slots)

        if want_d or want_k:
            rwd = np.cross(normals[t0:t1, None, None, :], wd) if want_k else None
            for label, test in (("D", wd), ("K", rwd)):
                if test is None or label not in out:
                    continue
                v1 = np.einsum("taox,tofx->taf", test, g1)
                w2 = np.zeros((tn, 3, n_tri, 3), dtype=complex)
                for q in range(q_obs):
                    w2 += np.cross(test[:, :, q, None, :], g0[:, q, None, :, :])
                pair = (v1[..., None] - np.einsum("tafx,fbx->tafb", w2, free)) * cc
                _fold(out[label], row_edges, pair, edge_slots)

    if want_bc:
        # Galerkin symmetry holds exactly only with identical test/source
        # treatment; unequal quadrature orders leave an asymmetry at the
        # quadrature-error level, removed by explicit symmetrisation
        out["B"] = 0.5 * (out["B"] + out["B"].T)
        out["C"] = 0.5 * (out["C"] + out["C"].T)
    if want_d:
        # the tangential principal-value operator is complex symmetric as
        # well; the rotated (K) pairing is not and must stay untouched
        out["D"] = 0.5 * (out["D"] + out["D"].T)
    return out


def assemble_efie_blocks(space: RwgSpace, evaluator: KernelEvaluator,
                         quad_obs: int = 3, quad_src: int = 5,
                         near_factor: float = 2.0):
    """Vector- and scalar-potential matrices (B, C).

    The tested electric-field operator acting on an electric current is
    j k0 Z0 (B + C / k0^2).
    """
    out = _assemble_kernel_blocks(space, evaluator.k0, quad_obs, quad_src,
                                  near_factor, True, False, False)
    return out["B"], out["C"]


def assemble_D_block(space: RwgSpace, evaluator: KernelEvaluator,
                     quad_obs: int = 3, quad_src: int = 5,
                     near_factor: float = 2.0) -> np.ndarray:
    """Principal-value curl coupling tested tangentially.

    D_mn = PV int int beta_m . (grad G x beta_n') ds' ds, the block through
    which magnetic currents enter the electric-field equation.
    """
    out = _assemble_kernel_blocks(space, evaluator.k0, quad_obs, quad_src,
                                  near_factor, False, True, False)
    return out["D"]


def assemble_mfie(space: RwgSpace, evaluator: KernelEvaluator,
                  quad_obs: int = 3, quad_src: int = 5,
                  near_factor: float = 2.0):
    """Rotated curl coupling K_mfie and the full MFIE matrix.

    Returns
    -------
    k_mfie : ndarray
        PV int int (n x beta_m) . (grad G x beta_n') ds' ds.
    mfie : ndarray
        (1/2) Gram + K_mfie; the system mfie @ I = tested (n x H_inc).
    """
    out = _assemble_kernel_blocks(space, evaluator.k0, quad_obs, quad_src,
                                  near_factor, False, False, True)
    mfie = 0.5 * assemble_gram_Aprime(space) + out["K"]
    return out["K"], mfie


def assemble_blocks(space: RwgSpace, evaluator: KernelEvaluator,
                    quad_obs: int = 3, quad_src: int = 5,
                    near_factor: float = 2.0) -> SystemBlocks:
    """All six operator blocks in one pass over triangle pairs."""
    logger.info("assembling blocks: N=%d, F=%d, k0=%.6g",
                space.n_functions, space.mesh.n_triangles, evaluator.k0)
    out = _assemble_kernel_blocks(space, evaluator.k0, quad_obs, quad_src,
                                  near_factor, True, True, True)
    return SystemBlocks(k0=evaluator.k0, space=space,
                        A=assemble_gram_A(space),
                        Aprime=assemble_gram_Aprime(space),
                        B=out["B"], C=out["C"], D=out["D"], K_mfie=out["K"])


@dataclass
class LinearSystem:
    """Composed discrete system with blockwise and monolithic application.

    Unknown layout: EFIE/MFIE/CFIE solve for the N electric coefficients;
    the 2N combined-source system stacks (I, V/Z0), scaling the magnetic
    unknowns by 1/Z0 so both halves carry comparable magnitudes.
    """

    formulation: str
    k0: float
    space: RwgSpace
    parts: dict = field(repr=False)  # {(block_row, block_col): (N, N) matrix}
    nblocks: int
    alpha: float | None = None
    cfie_beta: float | None = None
    rhs: np.ndarray | None = field(default=None, repr=False)

    @property
    def n(self) -> int:
        return self.space.n_functions

    @property
    def size(self) -> int:
        return self.nblocks * self.n

    @property
    def matrix(self) -> np.ndarray:
        """Monolithic dense matrix."""
        if self.nblocks == 1:
            return self.parts[(0, 0)]
        n = self.n
        full = np.zeros((self.size, self.size), dtype=complex)
        for (i, j), block in self.parts.items():
            full[i * n:(i + 1) * n, j * n:(j + 1) * n] = block
        return full

    def matvec(self, x: np.ndarray) -> np.ndarray:
        """Blockwise product, summed in fixed block order."""
        x = np.asarray(x)
        if x.shape != (self.size,):
            raise ValueError(f"expected vector of length {self.size}, got {x.shape}")
        n = self.n
        y = np.zeros(self.size, dtype=complex)
        for (i, j) in sorted(self.parts):
            y[i * n:(i + 1) * n] += self.parts[(i, j)] @ x[j * n:(j + 1) * n]
        return y

    def diagonal(self) -> np.ndarray:
        d = np.zeros(self.size, dtype=complex)
        n = self.n
        for i in range(self.nblocks):
            d[i * n:(i + 1) * n] = np.diagonal(self.parts[(i, i)])
        return d

    def attach_excitation(self, wave: PlaneWave, quad_order: int = 3) -> "LinearSystem":
        """Assemble and store the right-hand side for a plane wave."""
        e = assemble_rhs(self.space, wave, quad_order)
        if self.formulation == "efie":
            self.rhs = e
        elif self.formulation == "mfie":
            self.rhs = assemble_rhs_magnetic(self.space, wave, quad_order)
        elif self.formulation == "cfie":
            h = assemble_rhs_magnetic(self.space, wave, quad_order)
            self.rhs = self.cfie_beta * e + (1.0 - self.cfie_beta) * Z0 * h
        else:
            self.rhs = np.concatenate([e, np.zeros(self.n, dtype=complex)])
        return self

    def currents(self, x: np.ndarray) -> SolutionCoefficients:
        """Physical current coefficients from a solution vector."""
        x = np.asarray(x, dtype=complex)
        n = self.n
        if self.formulation == "csie":
            return SolutionCoefficients(electric=x[:n], magnetic=Z0 * x[n:])
        return SolutionCoefficients(electric=x, magnetic=np.zeros(n, dtype=complex))


def build_system(space: RwgSpace, evaluator: KernelEvaluator, formulation: str,
                 alpha: float = 1.0, cfie_beta: float = 0.5,
                 blocks: SystemBlocks | None = None, quad_obs: int = 3,
                 quad_src: int = 5, near_factor: float = 2.0) -> LinearSystem:
    """Compose the discrete system for one formulation.

    Rows tested with beta_m, unknowns (I, V/Z0) where applicable:

        efie:  j k0 Z0 (B + C/k0^2) I = tested E_inc
        mfie:  ((1/2) Aprime + K_mfie) I = tested (n x H_inc)
        cfie:  beta * efie + (1 - beta) * Z0 * mfie
        csie:  [[j k0 Z0 (B + C/k0^2),  Z0 ((1/2) A + D)],
                [alpha Z0 A,            Z0 Aprime       ]]

    The lower CSIE row is the weak combined-source condition
    M = alpha Z0 (n x J); its right-hand side is exactly zero.  alpha
    must be positive: the suppression of interior resonances relies on
    the combined sources radiating outward.

    Parameters
    ----------
    blocks : SystemBlocks, optional
        Reuse previously assembled matrices (they depend only on space
        and k0, not on the formulation).
    """
    formulation = formulation.lower()
    if formulation not in FORMULATIONS:
        raise ValueError(f"unknown formulation {formulation!r}")
    if evaluator.k0 <= 0.0:
        raise ValueError("driven systems need k0 > 0")
    if formulation == "csie" and alpha <= 0.0:
        raise ValueError("csie needs alpha > 0; inward-radiating sources "
                         "do not suppress interior resonances")
    if formulation == "cfie" and not 0.0 <= cfie_beta <= 1.0:
        raise ValueError("cfie_beta must lie in [0, 1]")

    if blocks is None:
        blocks = assemble_blocks(space, evaluator, quad_obs, quad_src, near_factor)
    k0 = evaluator.k0

    efie_mat = (1j * k0 * Z0) * blocks.B + (1j * Z0 / k0) * blocks.C
    if formulation == "efie":
        return LinearSystem("efie", k0, space, {(0, 0): efie_mat}, 1)
    if formulation == "mfie":
        mfie_mat = 0.5 * blocks.Aprime + blocks.K_mfie
        return LinearSystem("mfie", k0, space, {(0, 0): mfie_mat}, 1)
    if formulation == "cfie":
        if cfie_beta == 1.0:
            mat = efie_mat.copy()
        else:
            mfie_mat = 0.5 * blocks.Aprime + blocks.K_mfie
            mat = cfie_beta * efie_mat + (1.0 - cfie_beta) * Z0 * mfie_mat
        return LinearSystem("cfie", k0, space, {(0, 0): mat}, 1,
                            cfie_beta=cfie_beta)
    parts = {
        (0, 0): efie_mat,
        (0, 1): Z0 * (0.5 * blocks.A + blocks.D),
        (1, 0): (alpha * Z0) * blocks.A,
        (1, 1): Z0 * blocks.Aprime.astype(complex),
    }
    return LinearSystem("csie", k0, space, parts, 2, alpha=alpha)
