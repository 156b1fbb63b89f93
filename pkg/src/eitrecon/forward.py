"""Piecewise-linear finite element solver for the Neumann conductivity problem.

Solves ``-div(sigma grad u) = 0`` with current density ``f`` applied on
the measurement boundary Gamma and zero flux elsewhere, for piecewise
constant sigma given per pixel.  Extreme pixels are handled exactly:

* insulating pixels (sigma = 0) are deleted from the PDE domain — their
  triangles are never assembled and vertices used only by them carry no
  degree of freedom;
* perfectly conducting pixels (sigma = inf) are collapsed — all vertices
  of a connected conducting region share a single degree of freedom, and
  the region's elements are skipped (the potential is constant there).

Uniqueness is fixed by a zero-mean constraint on the Gamma trace,
enforced through a Lagrange multiplier appended to the stiffness system.
The bordered factorization is computed once per system and reused for
any number of right-hand sides.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np
import scipy.sparse as sp
import scipy.sparse.csgraph as csgraph
import scipy.sparse.linalg as spla

from .errors import ModelError

INSULATING = 0.0
CONDUCTING = np.inf


def _format_value(v):
    if v == INSULATING:
        return "0"
    if np.isinf(v):
        return "inf"
    return f"{v:.12g}"


@dataclass(frozen=True)
class ConductivityField:
    """Per-pixel conductivity: a positive finite value, 0, or inf.

    The values 0 and ``inf`` mean perfectly insulating and perfectly
    conducting pixels; everything else must be strictly positive and
    finite.
    """

    values: np.ndarray

    def __post_init__(self):
        vals = np.asarray(self.values, dtype=np.float64).copy()
        if vals.ndim != 1 or vals.size == 0:
            raise ModelError("conductivity must be a nonempty 1-D array of per-pixel values")
        finite = np.isfinite(vals) & (vals != INSULATING)
        if np.any(vals < 0.0) or np.any(np.isnan(vals)) or np.any(finite & (vals <= 0.0)):
            raise ModelError("finite conductivity values must be strictly positive")
        vals.setflags(write=False)
        object.__setattr__(self, "values", vals)

    @classmethod
    def uniform(cls, n_pixels, value):
        return cls(np.full(n_pixels, float(value)))

    @property
    def n_pixels(self):
        return self.values.size

    def is_insulating(self, p):
        return self.values[p] == INSULATING

    def is_conducting(self, p):
        return np.isinf(self.values[p])

    def describe(self):
        return "pixels=(" + ",".join(_format_value(v) for v in self.values) + ")"


@dataclass(frozen=True)
class NeumannSolution:
    """One Neumann solve: nodal potentials, Gamma trace, pixel energies.

    ``potentials`` holds one value per active degree of freedom;
    ``gamma_trace`` the coefficients of ``u|_Gamma`` in the boundary
    basis; ``energy_by_pixel`` the Dirichlet energy ``int |grad u|^2``
    per pixel with the conductivity factored out (zero on extreme
    pixels).
    """

    potentials: np.ndarray
    gamma_trace: np.ndarray
    energy_by_pixel: np.ndarray


def pixel_energy(solution, pixel):
    """Dirichlet energy of the solution restricted to one pixel."""
    return float(solution.energy_by_pixel[pixel])


class NeumannSystem:
    """Assembled stiffness system for one conductivity field.

    Immutable once built; the factorization may be shared across
    concurrent solves with distinct right-hand sides.
    """

    def __init__(self, mesh, partition, sigma, *, allow_dead_gamma=False):
        if sigma.n_pixels != partition.pixel_count:
            raise ModelError(
                f"conductivity has {sigma.n_pixels} pixels, partition has {partition.pixel_count}"
            )
        self.mesh = mesh
        self.partition = partition
        self.sigma = sigma

        tri_sigma = sigma.values[partition.element_pixel]
        finite = np.isfinite(tri_sigma) & (tri_sigma > 0.0)
        conducting = np.isinf(tri_sigma)
        if not finite.any():
            raise ModelError("no finite-conductivity region to solve on")
        self._finite_tris = np.flatnonzero(finite)
        self._tri_sigma = tri_sigma

        self.dof_of_vertex, self.n_dofs = self._build_dofs(finite, conducting)
        self._assemble(finite)
        self._classify_boundary(allow_dead_gamma)
        self._check_connected()
        self._lu = None

    # -- construction ----------------------------------------------------
    def _build_dofs(self, finite, conducting):
        mesh = self.mesh
        nv = mesh.n_vertices
        glue_label = np.full(nv, -1, dtype=np.intp)
        if conducting.any():
            ctris = mesh.triangles[conducting]
            rows = ctris[:, [0, 1, 2]].ravel()
            cols = ctris[:, [1, 2, 0]].ravel()
            g = sp.coo_matrix(
                (np.ones(rows.size), (rows, cols)), shape=(nv, nv)
            ).tocsr()
            ncomp, labels = csgraph.connected_components(g + g.T, directed=False)
            cverts = np.unique(ctris)
            mask = np.zeros(nv, dtype=bool)
            mask[cverts] = True
            # renumber conducting components by smallest member vertex
            comp_ids = {}
            for v in cverts:
                comp_ids.setdefault(labels[v], len(comp_ids))
            for v in cverts:
                glue_label[v] = comp_ids[labels[v]]

        used = np.zeros(nv, dtype=bool)
        used[np.unique(mesh.triangles[finite])] = True
        used[glue_label >= 0] = True

        dof = np.full(nv, -1, dtype=np.intp)
        glue_dof = {}
        next_dof = 0
        for v in range(nv):
            if not used[v]:
                continue
            g = glue_label[v]
            if g >= 0:
                if g not in glue_dof:
                    glue_dof[g] = next_dof
                    next_dof += 1
                dof[v] = glue_dof[g]
            else:
                dof[v] = next_dof
                next_dof += 1
        return dof, next_dof

    def _assemble(self, finite):
        mesh, dof = self.mesh, self.dof_of_vertex
        tris = mesh.triangles[self._finite_tris]
        p = mesh.vertices
        x = p[tris, 0]
        y = p[tris, 1]
        # gradients of the barycentric hats: grad phi_i = (b_i, c_i) / (2A)
        b = np.stack([y[:, 1] - y[:, 2], y[:, 2] - y[:, 0], y[:, 0] - y[:, 1]], axis=1)
        c = np.stack([x[:, 2] - x[:, 1], x[:, 0] - x[:, 2], x[:, 1] - x[:, 0]], axis=1)
        area2 = x[:, 0] * b[:, 0] + x[:, 1] * b[:, 1] + x[:, 2] * b[:, 2]
        sig = self._tri_sigma[self._finite_tris]
        coef = sig / (2.0 * area2)
        local = coef[:, None, None] * (
            b[:, :, None] * b[:, None, :] + c[:, :, None] * c[:, None, :]
        )
        gdof = dof[tris]
        rows = np.repeat(gdof, 3, axis=1).ravel()
        cols = np.tile(gdof, (1, 3)).ravel()
        K = sp.coo_matrix(
            (local.ravel(), (rows, cols)), shape=(self.n_dofs, self.n_dofs)
        ).tocsr()
        K.sum_duplicates()
        self.stiffness = K
        self._grad_b = b
        self._grad_c = c
        self._area2 = area2

    def _classify_boundary(self, allow_dead_gamma):
        mesh = self.mesh
        owner_sigma = self._tri_sigma[mesh.boundary_edge_owner]
        alive = owner_sigma != INSULATING
        gamma = mesh.boundary_is_gamma
        self.alive_gamma = gamma & alive
        if not self.alive_gamma.any():
            raise ModelError("the active domain carries no Gamma edge")
        if not allow_dead_gamma and np.any(gamma & ~alive):
            raise ModelError(
                "an insulating pixel covers part of the measurement boundary; "
                "currents cannot be applied there"
            )
        # lumped Gamma arc-length per dof, used as the zero-mean gauge
        w = np.zeros(self.n_dofs)
        idx = np.flatnonzero(self.alive_gamma)
        lengths = mesh.boundary_edge_lengths[idx]
        ev = mesh.boundary_edges[idx]
        np.add.at(w, self.dof_of_vertex[ev[:, 0]], 0.5 * lengths)
        np.add.at(w, self.dof_of_vertex[ev[:, 1]], 0.5 * lengths)
        self.gauge = w

    def _check_connected(self):
        ncomp, labels = csgraph.connected_components(self.stiffness, directed=False)
        # dofs with no stiffness coupling at all (isolated glued regions)
        coupled = np.diff(self.stiffness.indptr) > 0
        if ncomp > 1 or not coupled.all():
            raise ModelError(
                "active domain is disconnected (finite part not connected to Gamma)"
            )
        gdofs = np.flatnonzero(self.gauge > 0.0)
        if gdofs.size == 0 or len(set(labels[gdofs])) != 1:
            raise ModelError("active domain is disconnected from Gamma")

    # -- solving ----------------------------------------------------------
    @cached_property
    def _bordered_lu(self):
        n = self.n_dofs
        w = sp.csr_matrix(self.gauge[None, :])
        A = sp.bmat([[self.stiffness, w.T], [w, None]], format="csc")
        return spla.splu(A)

    def solve_columns(self, loads):
        """Solve for one or many load vectors (n_dofs or n_dofs-by-k)."""
        loads = np.asarray(loads, dtype=np.float64)
        single = loads.ndim == 1
        if single:
            loads = loads[:, None]
        rhs = np.vstack([loads, np.zeros((1, loads.shape[1]))])
        try:
            x = self._bordered_lu.solve(rhs)
        except RuntimeError as exc:  # SuperLU reports singularity this way
            raise ModelError(f"singular forward system: {exc}") from exc
        u = x[:-1, :]
        return u[:, 0] if single else u

    def trace_matrix(self, basis, m=None):
        """Rows ``i`` give the functionals u -> <u|_Gamma, g_i> on dofs.

        The same matrix maps basis coefficients to Neumann load vectors
        (transpose), which keeps the discrete ND matrix symmetric.  Only
        edges of the active domain contribute.
        """
        return basis.trace_matrix(self.mesh, self.dof_of_vertex, self.n_dofs,
                                  self.alive_gamma, m)

    def energies(self, u):
        """Per-pixel Dirichlet energy of nodal potentials ``u`` (sigma factored out)."""
        tris = self.mesh.triangles[self._finite_tris]
        uv = u[self.dof_of_vertex[tris]]
        gx = np.sum(uv * self._grad_b, axis=1)
        gy = np.sum(uv * self._grad_c, axis=1)
        per_tri = (gx * gx + gy * gy) / (2.0 * self._area2)
        pix = self.partition.element_pixel[self._finite_tris]
        return np.bincount(pix, weights=per_tri, minlength=self.partition.pixel_count)


def assemble_system(mesh, partition, sigma, *, allow_dead_gamma=False):
    """Assemble the stiffness system for a conductivity field.

    Raises
    ------
    ModelError
        The finite part is disconnected from Gamma, or an insulating
        pixel covers Gamma edges while ``allow_dead_gamma`` is False.
    """
    return NeumannSystem(mesh, partition, sigma, allow_dead_gamma=allow_dead_gamma)


def solve_neumann(system, f_coeffs, basis):
    """Solve the Neumann problem for a current given in the boundary basis.

    Parameters
    ----------
    system : NeumannSystem
    f_coeffs : (k,) array
        Coefficients of the applied current in the first k basis
        functions (k <= basis order).
    basis : BoundaryBasis

    Returns
    -------
    NeumannSolution
        With the Gamma trace expanded in all ``basis.m_max`` functions.
    """
    f_coeffs = np.asarray(f_coeffs, dtype=np.float64)
    T = system.trace_matrix(basis)
    load = T[: f_coeffs.size].T @ f_coeffs
    u = system.solve_columns(load)
    return NeumannSolution(
        potentials=u,
        gamma_trace=T @ u,
        energy_by_pixel=system.energies(u),
    )
