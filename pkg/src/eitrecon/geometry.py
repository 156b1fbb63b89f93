"""Triangle meshes, pixel partitions, and reconstruction orderings.

The domain model is a conforming triangulation of a 2D polygon whose
boundary edges are tagged as measurement boundary (``Gamma``) or
insulated (``Insulated``), together with a partition of the triangles
into "pixels" on which the conductivity is constant.  The built-in
generator covers the unit square with axis-aligned rectangular pixels;
arbitrary conforming partitions can be loaded through the plain-text
mesh format (see :func:`read_mesh`).

A reconstruction ordering is a sequence of pixel indices whose prefix
unions stay edge-connected and whose first pixel touches the
measurement boundary.  :func:`validate_ordering` checks these
constraints, :func:`layer_order` produces a canonical valid ordering,
and :func:`roi_order` produces a partial ordering that reaches a region
of interest through a shortest pixel path.

All indices (vertices, triangles, pixels) are 0-based, in memory and on
disk.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from functools import cached_property

import numpy as np

from .errors import ConfigError, GeometryError, MeshError

SIDES = ("bottom", "right", "top", "left")

TAG_GAMMA = "G"
TAG_INSULATED = "I"


def _as_readonly(arr, dtype):
    out = np.ascontiguousarray(arr, dtype=dtype)
    out.setflags(write=False)
    return out


@dataclass(frozen=True)
class Mesh:
    """Conforming triangulation with tagged boundary edges.

    Parameters
    ----------
    vertices : (nv, 2) float array
        Vertex coordinates in dimensionless domain units.
    triangles : (nt, 3) int array
        Vertex indices, counterclockwise.
    boundary_edges : (nb, 2) int array
        Vertex-index pairs covering the topological boundary exactly.
    boundary_is_gamma : (nb,) bool array
        True where the edge belongs to the measurement boundary.
    refinement_level : int
        Number of uniform refinements applied since construction.
    """

    vertices: np.ndarray
    triangles: np.ndarray
    boundary_edges: np.ndarray
    boundary_is_gamma: np.ndarray
    refinement_level: int = 0

    def __post_init__(self):
        object.__setattr__(self, "vertices", _as_readonly(self.vertices, np.float64))
        object.__setattr__(self, "triangles", _as_readonly(self.triangles, np.intp))
        object.__setattr__(self, "boundary_edges", _as_readonly(self.boundary_edges, np.intp))
        object.__setattr__(self, "boundary_is_gamma", _as_readonly(self.boundary_is_gamma, bool))
        self._validate()

    # -- basic sizes ----------------------------------------------------
    @property
    def n_vertices(self):
        return self.vertices.shape[0]

    @property
    def n_triangles(self):
        return self.triangles.shape[0]

    # -- derived topology (immutable, computed once) --------------------
    @cached_property
    def signed_areas(self):
        p = self.vertices
        t = self.triangles
        d1 = p[t[:, 1]] - p[t[:, 0]]
        d2 = p[t[:, 2]] - p[t[:, 0]]
        return 0.5 * (d1[:, 0] * d2[:, 1] - d1[:, 1] * d2[:, 0])

    @cached_property
    def _edge_data(self):
        # unique undirected edges; inverse maps the 3*nt local edges
        e = np.sort(self.triangles[:, [[0, 1], [1, 2], [2, 0]]].reshape(-1, 2), axis=1)
        uniq, inv, counts = np.unique(e, axis=0, return_inverse=True, return_counts=True)
        return uniq, inv.ravel(), counts

    @cached_property
    def triangle_adjacency(self):
        """Pairs (t1, t2) of triangles sharing an edge, t1 < t2."""
        uniq, inv, counts = self._edge_data
        order = np.argsort(inv, kind="stable")
        offsets = np.cumsum(counts) - counts
        two = np.flatnonzero(counts == 2)
        t1 = order[offsets[two]] // 3
        t2 = order[offsets[two] + 1] // 3
        lo = np.minimum(t1, t2)
        hi = np.maximum(t1, t2)
        return np.column_stack([lo, hi])

    @cached_property
    def boundary_edge_owner(self):
        """Index of the unique triangle owning each boundary edge."""
        uniq, inv, counts = self._edge_data
        first = np.full(len(uniq), 3 * self.n_triangles)
        np.minimum.at(first, inv, np.arange(3 * self.n_triangles))
        key = uniq[:, 0] * self.n_vertices + uniq[:, 1]
        be = np.sort(self.boundary_edges, axis=1)
        bkey = be[:, 0] * self.n_vertices + be[:, 1]
        pos = np.searchsorted(key, bkey)
        return first[pos] // 3

    @cached_property
    def boundary_edge_lengths(self):
        p = self.vertices
        d = p[self.boundary_edges[:, 1]] - p[self.boundary_edges[:, 0]]
        return np.hypot(d[:, 0], d[:, 1])

    def gamma_edges(self):
        """Indices into ``boundary_edges`` of the Gamma-tagged edges."""
        return np.flatnonzero(self.boundary_is_gamma)

    # -- validation ------------------------------------------------------
    def _validate(self):
        if self.vertices.ndim != 2 or self.vertices.shape[1] != 2:
            raise MeshError("vertices must be an (nv, 2) array")
        if self.triangles.ndim != 2 or self.triangles.shape[1] != 3:
            raise MeshError("triangles must be an (nt, 3) array")
        if self.n_triangles == 0:
            raise MeshError("mesh has no triangles")
        if self.triangles.min() < 0 or self.triangles.max() >= self.n_vertices:
            raise MeshError("triangle vertex index out of range")
        if np.any(self.signed_areas <= 0.0):
            bad = int(np.flatnonzero(self.signed_areas <= 0.0)[0])
            raise MeshError(f"triangle {bad} is degenerate or clockwise")
        used = np.zeros(self.n_vertices, dtype=bool)
        used[self.triangles.ravel()] = True
        if not used.all():
            raise MeshError(f"vertex {int(np.flatnonzero(~used)[0])} belongs to no triangle")

        uniq, _, counts = self._edge_data
        if counts.max(initial=0) > 2:
            raise MeshError("non-manifold edge: shared by more than two triangles")
        topo = uniq[counts == 1]
        if self.boundary_edges.shape[0] != topo.shape[0]:
            raise MeshError(
                f"boundary edge list has {self.boundary_edges.shape[0]} edges, "
                f"topological boundary has {topo.shape[0]}"
            )
        be = np.sort(self.boundary_edges, axis=1)
        key = lambda a: a[:, 0] * self.n_vertices + a[:, 1]  # noqa: E731
        if not np.array_equal(np.sort(key(be)), np.sort(key(topo))):
            raise MeshError("boundary edges do not match the topological boundary")
        if np.unique(key(be)).size != be.shape[0]:
            raise MeshError("duplicate boundary edge")
        if self.boundary_is_gamma.shape != (self.boundary_edges.shape[0],):
            raise MeshError("boundary tag array shape mismatch")
        if not self.boundary_is_gamma.any():
            raise MeshError("no boundary edge is tagged Gamma")


@dataclass(frozen=True)
class Partition:
    """Assignment of triangles to pixels plus a reconstruction order.

    ``order`` is a permutation of ``range(pixel_count)``; the identity by
    default.  Orderings are validated against a mesh by
    :func:`validate_ordering`, not here.
    """

    element_pixel: np.ndarray
    pixel_count: int
    order: np.ndarray = None

    def __post_init__(self):
        object.__setattr__(self, "element_pixel", _as_readonly(self.element_pixel, np.intp))
        if self.order is None:
            object.__setattr__(self, "order", np.arange(self.pixel_count))
        object.__setattr__(self, "order", _as_readonly(self.order, np.intp))
        n = self.pixel_count
        if n < 1:
            raise GeometryError("pixel_count must be positive")
        if self.element_pixel.min(initial=0) < 0 or self.element_pixel.max(initial=-1) >= n:
            raise GeometryError("pixel index out of range in element_pixel")
        owned = np.bincount(self.element_pixel, minlength=n)
        if np.any(owned == 0):
            raise GeometryError(f"pixel {int(np.flatnonzero(owned == 0)[0])} owns no triangle")
        if not np.array_equal(np.sort(self.order), np.arange(n)):
            raise GeometryError("order is not a permutation of range(pixel_count)")

    def triangles_of(self, pixel):
        return np.flatnonzero(self.element_pixel == pixel)


@dataclass(frozen=True)
class ValidityReport:
    """Outcome of :func:`validate_ordering` for one ordering."""

    order: tuple
    gamma_contact: bool
    prefix_connected: tuple
    valid: bool
    failures: tuple = ()

    def describe(self):
        lines = [f"ordering: {','.join(str(p) for p in self.order)}"]
        lines.append(f"pixel {self.order[0]} touches Gamma: {'yes' if self.gamma_contact else 'NO'}")
        for m, ok in enumerate(self.prefix_connected, start=1):
            lines.append(f"Q_{m} edge-connected: {'yes' if ok else 'NO'}")
        lines.append("VALID" if self.valid else "INVALID: " + "; ".join(self.failures))
        return "\n".join(lines)


# ---------------------------------------------------------------------------
# structured generator


def build_structured_mesh(rows, cols, h, gamma_sides):
    """Mesh the unit square with a rows-by-cols pixel grid.

    Every pixel boundary coincides with mesh edges; each grid cell is cut
    into two right triangles.  Pixel ``p`` is the rectangle at
    ``(row, col) = (p // cols, p % cols)`` counted from the bottom-left
    corner.

    Parameters
    ----------
    rows, cols : int
        Pixel grid shape, both at least 1.
    h : float
        Target edge length; must not exceed the pixel side lengths.
    gamma_sides : iterable of str
        Nonempty subset of ``{"bottom", "right", "top", "left"}``
        selecting the sides that carry measurements.

    Returns
    -------
    (Mesh, Partition)

    Raises
    ------
    ConfigError
        Empty or unknown ``gamma_sides``.
    MeshError
        ``h`` too large for the pixel size (fewer than two triangles per
        pixel).
    """
    gamma = tuple(dict.fromkeys(gamma_sides))
    if not gamma:
        raise ConfigError("gamma_sides must name at least one side of the square")
    unknown = [s for s in gamma if s not in SIDES]
    if unknown:
        raise ConfigError(f"unknown side name(s) {unknown}; expected subset of {SIDES}")
    if rows < 1 or cols < 1:
        raise ConfigError("rows and cols must be at least 1")
    if not (h > 0.0):
        raise MeshError("h must be positive")
    side_x, side_y = 1.0 / cols, 1.0 / rows
    if h > min(side_x, side_y) * (1.0 + 1e-12):
        raise MeshError(
            f"h={h} exceeds the pixel side length {min(side_x, side_y)}: "
            "fewer than 2 triangles per pixel"
        )
    kx = max(1, round(side_x / h))
    ky = max(1, round(side_y / h))
    nx, ny = cols * kx, rows * ky

    xs = np.arange(nx + 1) / nx
    ys = np.arange(ny + 1) / ny
    X, Y = np.meshgrid(xs, ys)
    vertices = np.column_stack([X.ravel(), Y.ravel()])

    ix, iy = np.meshgrid(np.arange(nx), np.arange(ny))
    ix, iy = ix.ravel(), iy.ravel()
    a = iy * (nx + 1) + ix
    b = a + 1
    c = b + (nx + 1)
    d = a + (nx + 1)
    # cell split along the a-c diagonal, both children counterclockwise
    triangles = np.empty((2 * nx * ny, 3), dtype=np.intp)
    triangles[0::2] = np.column_stack([a, b, c])
    triangles[1::2] = np.column_stack([a, c, d])

    cent = vertices[triangles].mean(axis=1)
    pc = np.clip((cent[:, 0] * cols).astype(int), 0, cols - 1)
    pr = np.clip((cent[:, 1] * rows).astype(int), 0, rows - 1)
    element_pixel = pr * cols + pc

    def vid(i, j):
        return j * (nx + 1) + i

    edges, tags = [], []
    for i in range(nx):  # bottom, left to right
        edges.append((vid(i, 0), vid(i + 1, 0)))
        tags.append("bottom")
    for j in range(ny):  # right, upward
        edges.append((vid(nx, j), vid(nx, j + 1)))
        tags.append("right")
    for i in range(nx, 0, -1):  # top, right to left
        edges.append((vid(i, ny), vid(i - 1, ny)))
        tags.append("top")
    for j in range(ny, 0, -1):  # left, downward
        edges.append((vid(0, j), vid(0, j - 1)))
        tags.append("left")
    boundary_edges = np.array(edges, dtype=np.intp)
    is_gamma = np.array([t in gamma for t in tags])

    mesh = Mesh(vertices, triangles, boundary_edges, is_gamma)
    part = Partition(element_pixel, rows * cols)
    return mesh, part


def refine_mesh(mesh, partition):
    """Uniform red refinement: each triangle into four similar children.

    Children inherit the parent's pixel; boundary edges split in two and
    keep their tag; the refinement level is incremented.
    """
    nv = mesh.n_vertices
    uniq, inv, _ = mesh._edge_data
    mid = 0.5 * (mesh.vertices[uniq[:, 0]] + mesh.vertices[uniq[:, 1]])
    vertices = np.vstack([mesh.vertices, mid])

    t = mesh.triangles
    eid = inv.reshape(-1, 3)  # local edges (0-1, 1-2, 2-0)
    m01 = nv + eid[:, 0]
    m12 = nv + eid[:, 1]
    m02 = nv + eid[:, 2]
    children = np.empty((4 * mesh.n_triangles, 3), dtype=np.intp)
    children[0::4] = np.column_stack([t[:, 0], m01, m02])
    children[1::4] = np.column_stack([t[:, 1], m12, m01])
    children[2::4] = np.column_stack([t[:, 2], m02, m12])
    children[3::4] = np.column_stack([m01, m12, m02])

    element_pixel = np.repeat(partition.element_pixel, 4)

    be = mesh.boundary_edges
    bkey = np.sort(be, axis=1)
    pos = np.searchsorted(uniq[:, 0] * nv + uniq[:, 1], bkey[:, 0] * nv + bkey[:, 1])
    bmid = nv + pos
    nb = be.shape[0]
    new_edges = np.empty((2 * nb, 2), dtype=np.intp)
    new_edges[0::2] = np.column_stack([be[:, 0], bmid])
    new_edges[1::2] = np.column_stack([bmid, be[:, 1]])
    new_gamma = np.repeat(mesh.boundary_is_gamma, 2)

    fine = Mesh(vertices, children, new_edges, new_gamma, mesh.refinement_level + 1)
    part = Partition(element_pixel, partition.pixel_count, partition.order.copy())
    return fine, part


# ---------------------------------------------------------------------------
# pixel graph helpers


def pixel_adjacency(mesh, partition):
    """Adjacency sets of the pixel graph (shared mesh edges only)."""
    adj = [set() for _ in range(partition.pixel_count)]
    ep = partition.element_pixel
    pairs = mesh.triangle_adjacency
    p1, p2 = ep[pairs[:, 0]], ep[pairs[:, 1]]
    for a, b in zip(p1, p2):
        if a != b:
            adj[a].add(int(b))
            adj[b].add(int(a))
    return adj


def pixels_touching_gamma(mesh, partition):
    """Sorted pixel indices owning at least one Gamma boundary edge."""
    owners = mesh.boundary_edge_owner[mesh.boundary_is_gamma]
    return sorted(set(int(p) for p in partition.element_pixel[owners]))


def check_partition(mesh, partition):
    """Raise GeometryError unless every pixel's interior is edge-connected."""
    if partition.element_pixel.shape[0] != mesh.n_triangles:
        raise GeometryError("partition does not cover this mesh")
    ep = partition.element_pixel
    pairs = mesh.triangle_adjacency
    same = ep[pairs[:, 0]] == ep[pairs[:, 1]]
    dsu = _DSU(mesh.n_triangles)
    for a, b in pairs[same]:
        dsu.union(int(a), int(b))
    roots = {}
    for t in range(mesh.n_triangles):
        roots.setdefault(int(ep[t]), set()).add(dsu.find(t))
    for p, r in roots.items():
        if len(r) > 1:
            raise GeometryError(f"pixel {p} has a disconnected interior")


class _DSU:
    __slots__ = ("parent",)

    def __init__(self, n):
        self.parent = list(range(n))

    def find(self, a):
        p = self.parent
        while p[a] != a:
            p[a] = p[p[a]]
            a = p[a]
        return a

    def union(self, a, b):
        ra, rb = self.find(a), self.find(b)
        if ra == rb:
            return False
        self.parent[rb] = ra
        return True


# ---------------------------------------------------------------------------
# orderings


def validate_ordering(partition, mesh, order=None):
    """Check an ordering against the prefix-connectivity constraints.

    ``order`` may be a partial sequence of distinct pixels (an ROI
    ordering); it defaults to ``partition.order``.  The report lists, for
    each prefix length m, whether the union of the first m pixels is
    edge-connected, and whether the first pixel touches Gamma.  Invalid
    orderings are reported, never raised.
    """
    if order is None:
        order = partition.order
    order = [int(p) for p in order]
    if len(order) == 0:
        raise GeometryError("empty ordering")
    if len(set(order)) != len(order):
        raise GeometryError("ordering repeats a pixel")
    if min(order) < 0 or max(order) >= partition.pixel_count:
        raise GeometryError("ordering names an unknown pixel")

    step = {p: i for i, p in enumerate(order)}
    ep = partition.element_pixel
    pairs = mesh.triangle_adjacency
    inf = len(order)
    ps1 = np.array([step.get(int(p), inf) for p in ep[pairs[:, 0]]])
    ps2 = np.array([step.get(int(p), inf) for p in ep[pairs[:, 1]]])
    pair_step = np.maximum(ps1, ps2)
    by_step = np.argsort(pair_step, kind="stable")

    dsu = _DSU(mesh.n_triangles)
    tri_lists = [partition.triangles_of(p) for p in order]
    connected = []
    components = 0
    k = 0
    for m, tris in enumerate(tri_lists):
        components += len(tris)
        while k < len(by_step) and pair_step[by_step[k]] == m:
            a, b = pairs[by_step[k]]
            if dsu.union(int(a), int(b)):
                components -= 1
            k += 1
        connected.append(components == 1)

    gamma_ok = order[0] in set(pixels_touching_gamma(mesh, partition))
    failures = []
    if not gamma_ok:
        failures.append(f"pixel {order[0]} does not touch Gamma")
    for m, ok in enumerate(connected, start=1):
        if not ok:
            failures.append(f"Q_{m} is not edge-connected")
    return ValidityReport(
        order=tuple(order),
        gamma_contact=gamma_ok,
        prefix_connected=tuple(connected),
        valid=gamma_ok and all(connected),
        failures=tuple(failures),
    )


def _bfs_distances(adj, sources, n):
    dist = [None] * n
    frontier = sorted(sources)
    for p in frontier:
        dist[p] = 0
    d = 0
    while frontier:
        nxt = []
        for p in frontier:
            for q in sorted(adj[p]):
                if dist[q] is None:
                    dist[q] = d + 1
                    nxt.append(q)
        frontier = sorted(set(nxt))
        d += 1
    return dist


def _backtrack(adj, dist, target):
    # shortest path ending at target, smallest-index tie-break per hop
    path = [target]
    cur = target
    while dist[cur] > 0:
        cur = min(q for q in adj[cur] if dist[q] == dist[cur] - 1)
        path.append(cur)
    path.reverse()
    return path


def layer_order(partition, mesh):
    """Canonical full ordering: greedy sweep by distance from Gamma.

    Starts at the smallest-index Gamma-touching pixel and repeatedly
    appends the pixel adjacent to the current prefix that is nearest to
    Gamma (smallest index on ties).  Every prefix is edge-connected by
    construction.
    """
    n = partition.pixel_count
    adj = pixel_adjacency(mesh, partition)
    gamma = pixels_touching_gamma(mesh, partition)
    if not gamma:
        raise GeometryError("no pixel touches Gamma")
    dist = _bfs_distances(adj, gamma, n)
    if any(d is None for d in dist):
        raise GeometryError("pixel graph is disconnected from Gamma")
    order = [gamma[0]]
    chosen = {gamma[0]}
    while len(order) < n:
        frontier = {q for p in order for q in adj[p]} - chosen
        if not frontier:
            raise GeometryError("pixel graph is disconnected")
        nxt = min(frontier, key=lambda q: (dist[q], q))
        order.append(nxt)
        chosen.add(nxt)
    return tuple(order)


def roi_order(partition, mesh, roi):
    """Partial ordering reaching a region of interest from Gamma.

    The prefix is a shortest pixel path (edge adjacency, smallest-index
    tie-break) from a Gamma-touching pixel to the ROI, followed by the
    remaining ROI pixels in a connectivity-preserving greedy order.  When
    part of the ROI cannot be attached to the prefix directly, the
    shortest connector path through outside pixels is spliced in, so the
    returned ordering is always valid.

    Raises
    ------
    GeometryError
        The ROI is empty or unreachable from Gamma.
    """
    roi = sorted({int(p) for p in roi})
    if not roi:
        raise GeometryError("empty ROI")
    if roi[0] < 0 or roi[-1] >= partition.pixel_count:
        raise GeometryError("ROI names an unknown pixel")
    n = partition.pixel_count
    adj = pixel_adjacency(mesh, partition)
    gamma = pixels_touching_gamma(mesh, partition)
    if not gamma:
        raise GeometryError("no pixel touches Gamma")
    dist = _bfs_distances(adj, gamma, n)
    reachable = [p for p in roi if dist[p] is not None]
    if not reachable:
        raise GeometryError("ROI is unreachable from Gamma through the pixel graph")
    target = min(reachable, key=lambda p: (dist[p], p))
    order = _backtrack(adj, dist, target)
    chosen = set(order)

    remaining = [p for p in roi if p not in chosen]
    while remaining:
        attachable = [p for p in remaining if adj[p] & chosen]
        if attachable:
            nxt = min(attachable)
            order.append(nxt)
            chosen.add(nxt)
            remaining.remove(nxt)
            continue
        # splice the shortest connector from the current prefix
        dist_q = _bfs_distances(adj, chosen, n)
        cand = [p for p in remaining if dist_q[p] is not None]
        if not cand:
            raise GeometryError("ROI is unreachable from Gamma through the pixel graph")
        goal = min(cand, key=lambda p: (dist_q[p], p))
        connector = _backtrack(adj, dist_q, goal)
        for p in connector:
            if p not in chosen:
                order.append(p)
                chosen.add(p)
        remaining.remove(goal)
    return tuple(order)


# ---------------------------------------------------------------------------
# submesh extraction (insulating regions are deleted from the PDE domain)


def submesh(mesh, keep_triangles):
    """Restrict the mesh to a triangle subset.

    Vertices are renumbered in ascending original order.  Surviving
    original boundary edges keep their tag; edges exposed by the cut are
    tagged Insulated (zero-flux interface).

    Returns
    -------
    (Mesh, vertex_map, tri_index)
        ``vertex_map`` maps old vertex index to new (-1 if dropped);
        ``tri_index`` lists the kept original triangle indices in order.
    """
    keep = np.asarray(keep_triangles)
    if keep.dtype == bool:
        tri_index = np.flatnonzero(keep)
    else:
        tri_index = np.asarray(sorted(set(int(t) for t in keep)), dtype=np.intp)
    if tri_index.size == 0:
        raise MeshError("submesh would contain no triangles")
    tris = mesh.triangles[tri_index]
    kept_vertices = np.unique(tris)
    vertex_map = np.full(mesh.n_vertices, -1, dtype=np.intp)
    vertex_map[kept_vertices] = np.arange(kept_vertices.size)
    new_tris = vertex_map[tris]

    # topological boundary of the subset, tags inherited where they exist
    e = np.sort(new_tris[:, [[0, 1], [1, 2], [2, 0]]].reshape(-1, 2), axis=1)
    uniq, counts = np.unique(e, axis=0, return_counts=True)
    bnd = uniq[counts == 1]

    old_tags = {}
    be = np.sort(mesh.boundary_edges, axis=1)
    for k in range(be.shape[0]):
        old_tags[(int(be[k, 0]), int(be[k, 1]))] = bool(mesh.boundary_is_gamma[k])
    back = kept_vertices  # new index -> old index
    is_gamma = np.zeros(bnd.shape[0], dtype=bool)
    for k in range(bnd.shape[0]):
        key = (int(back[bnd[k, 0]]), int(back[bnd[k, 1]]))
        key = (min(key), max(key))
        is_gamma[k] = old_tags.get(key, False)

    if not is_gamma.any():
        raise MeshError("submesh has no Gamma boundary edge")
    sub = Mesh(
        mesh.vertices[kept_vertices],
        new_tris,
        bnd,
        is_gamma,
        mesh.refinement_level,
    )
    return sub, vertex_map, tri_index


# ---------------------------------------------------------------------------
# plain-text mesh format
#
#   mesh <n_vertices> <n_triangles> <n_boundary_edges>
#   v <x> <y>
#   t <i> <j> <k> <pixel>
#   b <i> <j> <G|I>


def write_mesh(path, mesh, partition):
    """Write the mesh/partition pair in the text interchange format."""
    with open(path, "w") as f:
        f.write(f"mesh {mesh.n_vertices} {mesh.n_triangles} {mesh.boundary_edges.shape[0]}\n")
        for x, y in mesh.vertices:
            f.write(f"v {x:.17g} {y:.17g}\n")
        for (i, j, k), p in zip(mesh.triangles, partition.element_pixel):
            f.write(f"t {i} {j} {k} {p}\n")
        for (i, j), g in zip(mesh.boundary_edges, mesh.boundary_is_gamma):
            f.write(f"b {i} {j} {TAG_GAMMA if g else TAG_INSULATED}\n")


def read_mesh(path):
    """Read a mesh/partition pair written by :func:`write_mesh`.

    Validates all mesh and partition invariants, including per-pixel
    interior connectivity.
    """
    with open(path) as f:
        lines = [ln.strip() for ln in f if ln.strip() and not ln.startswith("#")]
    if not lines or not lines[0].startswith("mesh "):
        raise MeshError(f"{path}: missing 'mesh' header line")
    try:
        nv, nt, nb = (int(tok) for tok in lines[0].split()[1:4])
    except (ValueError, IndexError) as exc:
        raise MeshError(f"{path}: malformed header: {lines[0]!r}") from exc
    if len(lines) != 1 + nv + nt + nb:
        raise MeshError(f"{path}: expected {1 + nv + nt + nb} lines, found {len(lines)}")

    verts = np.empty((nv, 2))
    tris = np.empty((nt, 3), dtype=np.intp)
    pix = np.empty(nt, dtype=np.intp)
    edges = np.empty((nb, 2), dtype=np.intp)
    gam = np.empty(nb, dtype=bool)
    try:
        for r in range(nv):
            tok = lines[1 + r].split()
            if tok[0] != "v":
                raise MeshError(f"{path}: expected vertex line, got {lines[1 + r]!r}")
            verts[r] = float(tok[1]), float(tok[2])
        for r in range(nt):
            tok = lines[1 + nv + r].split()
            if tok[0] != "t":
                raise MeshError(f"{path}: expected triangle line, got {lines[1 + nv + r]!r}")
            tris[r] = int(tok[1]), int(tok[2]), int(tok[3])
            pix[r] = int(tok[4])
        for r in range(nb):
            tok = lines[1 + nv + nt + r].split()
            if tok[0] != "b" or tok[3] not in (TAG_GAMMA, TAG_INSULATED):
                raise MeshError(f"{path}: expected boundary line, got {lines[1 + nv + nt + r]!r}")
            edges[r] = int(tok[1]), int(tok[2])
            gam[r] = tok[3] == TAG_GAMMA
    except (ValueError, IndexError) as exc:
        raise MeshError(f"{path}: malformed record: {exc}") from exc

    mesh = Mesh(verts, tris, edges, gam)
    partition = Partition(pix, int(pix.max()) + 1)
    check_partition(mesh, partition)
    return mesh, partition
