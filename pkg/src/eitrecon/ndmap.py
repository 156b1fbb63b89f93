"""Boundary current basis and Galerkin Neumann-to-Dirichlet matrices.

The measurement operator maps an applied current density on Gamma to the
resulting boundary voltage.  Compressed onto the span of the first M
basis functions it becomes the symmetric M-by-M matrix assembled here,
with entries ``A[i, j] = <Lambda g_j, g_i>``.

The basis is the mean-free cosine system in the arc length s of Gamma:
``g_k(s) = sqrt(2/L) cos(k pi s / L)`` for ``k = 1..m_max`` on total
length L, which is orthonormal in L^2(Gamma) and has zero mean.  A
multi-arc Gamma is parametrized by concatenated arc length, chain by
chain.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from .errors import BasisError, DataError


@dataclass(frozen=True)
class Provenance:
    """Where an ND matrix came from (echoed into data files)."""

    sigma: str = ""
    refinement: int = 0
    noise_level: float = 0.0
    seed: int = 0


@dataclass(frozen=True)
class NDMatrix:
    """Symmetric Galerkin matrix of an ND map in the boundary basis."""

    m: int
    entries: np.ndarray
    provenance: Provenance = Provenance()

    def __post_init__(self):
        a = np.asarray(self.entries, dtype=np.float64)
        if a.shape != (self.m, self.m):
            raise DataError(f"ND matrix entries must be {self.m}x{self.m}, got {a.shape}")
        a = a.copy()
        a.setflags(write=False)
        object.__setattr__(self, "entries", a)


def _chain_gamma_edges(mesh):
    """Order the Gamma edges into arc-length chains.

    Open chains start at their smallest endpoint vertex; a fully closed
    Gamma loop starts at its smallest vertex.  Chains are emitted sorted
    by start vertex, each as a list of (edge_index, v_from, v_to).
    """
    gidx = mesh.gamma_edges()
    incident = {}
    for e in gidx:
        a, b = (int(v) for v in mesh.boundary_edges[e])
        incident.setdefault(a, []).append((int(e), b))
        incident.setdefault(b, []).append((int(e), a))
    for v, lst in incident.items():
        if len(lst) > 2:
            raise BasisError(f"Gamma is not a 1-manifold at vertex {v}")

    unused = set(int(e) for e in gidx)
    endpoints = sorted(v for v, lst in incident.items() if len(lst) == 1)
    chains = []
    while unused:
        start = None
        for v in endpoints:
            if any(e in unused for e, _ in incident[v]):
                start = v
                break
        if start is None:  # only closed loops remain
            start = min(v for v, lst in incident.items() if any(e in unused for e, _ in lst))
        chain = []
        cur = start
        while True:
            step = next(((e, w) for e, w in incident[cur] if e in unused), None)
            if step is None:
                break
            e, w = step
            unused.discard(e)
            chain.append((e, cur, w))
            cur = w
        chains.append(chain)
    return chains


def _gauss01(n):
    x, w = np.polynomial.legendre.leggauss(n)
    return 0.5 * (x + 1.0), 0.5 * w


@dataclass(frozen=True)
class BoundaryBasis:
    """Mean-free cosine basis on Gamma with per-edge quadrature.

    ``edge_index`` lists the Gamma edges in chain order; ``edge_s0`` and
    ``edge_len`` give each edge's arc-length offset and length;
    ``edge_vertices`` the chain-oriented endpoint vertices.  ``blocks``
    holds the precomputed integrals ``int_edge g_i * hat`` for the two
    endpoint hat functions, shape (n_edges, 2, m_max).
    """

    gamma_arclength: float
    m_max: int
    edge_index: np.ndarray
    edge_s0: np.ndarray
    edge_len: np.ndarray
    edge_vertices: np.ndarray
    blocks: np.ndarray
    quad_points: int

    def functions(self, s):
        """Evaluate g_1..g_mmax at arc-length positions (rows = functions)."""
        s = np.asarray(s, dtype=np.float64)
        k = np.arange(1, self.m_max + 1)[:, None]
        L = self.gamma_arclength
        return np.sqrt(2.0 / L) * np.cos(k * np.pi * s[None, :] / L)

    def trace_matrix(self, mesh, dof_of_vertex, n_dofs, alive_edges, m=None):
        """Map nodal potentials to basis coefficients of the Gamma trace.

        Edges whose owning triangle was deleted (``alive_edges`` False)
        contribute nothing.  Rows double as Neumann load functionals.
        """
        m = self.m_max if m is None else m
        if m > self.m_max:
            raise BasisError(f"requested {m} basis functions, basis holds {self.m_max}")
        T = np.zeros((m, n_dofs))
        for r in range(self.edge_index.size):
            e = self.edge_index[r]
            if not alive_edges[e]:
                continue
            va, vb = self.edge_vertices[r]
            da, db = dof_of_vertex[va], dof_of_vertex[vb]
            T[:, da] += self.blocks[r, 0, :m]
            T[:, db] += self.blocks[r, 1, :m]
        return T


def build_basis(mesh, m_max):
    """Build the cosine boundary basis on the mesh's Gamma edges.

    Raises
    ------
    BasisError
        ``m_max`` exceeds what the boundary mesh resolves (fewer than 4
        boundary vertices per period of the top frequency).
    """
    if m_max < 1:
        raise BasisError("m_max must be at least 1")
    chains = _chain_gamma_edges(mesh)
    edge_rows = [step for chain in chains for step in chain]
    n_edges = len(edge_rows)
    cap = n_edges // 2
    if m_max > cap:
        raise BasisError(
            f"m_max={m_max} is unresolvable on {n_edges} Gamma edges "
            f"(fewer than 4 boundary vertices per period); maximum is {cap}"
        )

    edge_index = np.array([e for e, _, _ in edge_rows], dtype=np.intp)
    edge_vertices = np.array([(a, b) for _, a, b in edge_rows], dtype=np.intp)
    lengths = mesh.boundary_edge_lengths[edge_index]
    s0 = np.concatenate([[0.0], np.cumsum(lengths)[:-1]])
    total = float(np.sum(lengths))

    # enough Gauss points that products of basis functions with P1 hats
    # integrate to ~1e-14 even at the frequency cap
    phase = np.pi * m_max * float(lengths.max()) / total
    qpts = max(4, int(np.ceil(2.0 * phase)) + 4)
    xi, w = _gauss01(qpts)

    k = np.arange(1, m_max + 1)
    blocks = np.empty((n_edges, 2, m_max))
    for r in range(n_edges):
        s = s0[r] + xi * lengths[r]
        g = np.sqrt(2.0 / total) * np.cos(np.outer(k, np.pi * s / total))
        blocks[r, 0] = lengths[r] * (g * (w * (1.0 - xi))).sum(axis=1)
        blocks[r, 1] = lengths[r] * (g * (w * xi)).sum(axis=1)

    return BoundaryBasis(
        gamma_arclength=total,
        m_max=m_max,
        edge_index=edge_index,
        edge_s0=s0,
        edge_len=lengths,
        edge_vertices=edge_vertices,
        blocks=blocks,
        quad_points=qpts,
    )


def basis_gram(basis):
    """Quadrature Gram matrix <g_i, g_j> plus the means <g_i, 1> (diagnostic)."""
    qpts = basis.quad_points
    xi, w = _gauss01(qpts)
    m = basis.m_max
    G = np.zeros((m, m))
    means = np.zeros(m)
    for r in range(basis.edge_index.size):
        s = basis.edge_s0[r] + xi * basis.edge_len[r]
        g = basis.functions(s)
        G += basis.edge_len[r] * (g * w) @ g.T
        means += basis.edge_len[r] * (g * w).sum(axis=1)
    return G, means


def assemble_nd(system, basis, m):
    """Assemble the order-m ND matrix of a forward system.

    Column j holds the Gamma-trace coefficients of the solve with
    current g_j; the result is symmetrized.  This Galerkin compression
    is exactly the matrix of the projected operator P_M Lambda P_M on
    its range.
    """
    T = system.trace_matrix(basis, m)
    U = system.solve_columns(T.T)
    A = T @ U
    A = 0.5 * (A + A.T)
    prov = Provenance(
        sigma=system.sigma.describe(),
        refinement=system.mesh.refinement_level,
    )
    return NDMatrix(m, A, prov)


def add_noise(nd, level, seed):
    """Symmetric Gaussian perturbation with exact relative Frobenius size.

    Returns ``A + level * ||A||_F * (E + E^T) / ||E + E^T||_F`` with E
    drawn from the seeded generator; deterministic given the seed, and
    the identity for level 0.
    """
    if level < 0:
        raise DataError("noise level must be nonnegative")
    if level == 0.0:
        return replace(nd, provenance=replace(nd.provenance, noise_level=0.0, seed=seed))
    rng = np.random.default_rng(seed)
    e = rng.standard_normal((nd.m, nd.m))
    s = e + e.T
    s *= level * np.linalg.norm(nd.entries) / np.linalg.norm(s)
    return NDMatrix(
        nd.m,
        nd.entries + s,
        replace(nd.provenance, noise_level=float(level), seed=int(seed)),
    )


# ---------------------------------------------------------------------------
# plain-text matrix format
#
#   ndmatrix <M> <noise_level> <seed>
#   # optional provenance comments
#   <M rows of M entries, 17 significant digits>


def write_ndmatrix(path, nd):
    """Write an ND matrix in the measured-data interchange format."""
    with open(path, "w") as f:
        f.write(f"ndmatrix {nd.m} {nd.provenance.noise_level:.17g} {nd.provenance.seed}\n")
        if nd.provenance.sigma:
            f.write(f"# sigma: {nd.provenance.sigma}\n")
        f.write(f"# refinement: {nd.provenance.refinement}\n")
        for row in nd.entries:
            f.write(" ".join(f"{v:.17g}" for v in row) + "\n")


def read_ndmatrix(path):
    """Read a matrix written by :func:`write_ndmatrix` (round-trip exact)."""
    sigma = ""
    refinement = 0
    rows = []
    with open(path) as f:
        header = f.readline().split()
        if len(header) != 4 or header[0] != "ndmatrix":
            raise DataError(f"{path}: missing 'ndmatrix' header")
        try:
            m = int(header[1])
            noise = float(header[2])
            seed = int(header[3])
        except ValueError as exc:
            raise DataError(f"{path}: malformed header") from exc
        for line in f:
            line = line.strip()
            if not line:
                continue
            if line.startswith("#"):
                if line.startswith("# sigma:"):
                    sigma = line[len("# sigma:"):].strip()
                elif line.startswith("# refinement:"):
                    refinement = int(line[len("# refinement:"):].strip())
                continue
            rows.append([float(tok) for tok in line.split()])
    if len(rows) != m or any(len(r) != m for r in rows):
        raise DataError(f"{path}: expected {m}x{m} entries")
    a = np.array(rows)
    scale = np.abs(a).max()
    if scale > 0 and np.abs(a - a.T).max() > 1e-8 * scale:
        raise DataError(f"{path}: matrix is not symmetric")
    return NDMatrix(m, 0.5 * (a + a.T), Provenance(sigma, refinement, noise, seed))
