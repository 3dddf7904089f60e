"""Polygonal domains and conforming triangle meshes.

A domain is a simple polygon with one arc label per boundary segment; a mesh
is a conforming triangulation of it whose boundary edges remember which
labelled segment they came from (and where on it they sit, as a normalized
arc-length interval).  Meshing is ear clipping of the polygon followed by
uniform red refinement, so the mesh size h halves exactly from level to level.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .errors import (
    DegenerateEdge,
    EmptyRegion,
    LabelCountMismatch,
    MeshFailure,
    SelfIntersection,
)

MAX_REFINEMENTS = 30


class BoundaryEdge(NamedTuple):
    """One boundary edge: node pair, arc label, outward unit normal.

    ``segment`` is the index of the polygon segment (or, for meshes read from
    file, the reconstructed boundary chain) the edge lies on, and ``(t0, t1)``
    its normalized arc-length sub-interval of that segment.
    """

    n1: int
    n2: int
    label: str
    normal: np.ndarray
    segment: int
    t0: float
    t1: float


@dataclass(frozen=True)
class PolygonalDomain:
    """Simple polygon, counterclockwise, with one label per boundary segment."""

    vertices: np.ndarray
    arc_labels: tuple[str, ...]

    @property
    def n_segments(self) -> int:
        return len(self.vertices)

    @property
    def area(self) -> float:
        return _signed_area(self.vertices)

    def segment(self, i):
        """Endpoints (p, q) of boundary segment i (from vertex i to i+1)."""
        v = self.vertices
        return v[i], v[(i + 1) % len(v)]


@dataclass(frozen=True)
class BoundaryRegion:
    """A set of boundary edges of one mesh, addressed by edge index."""

    edge_ids: tuple[int, ...]
    total_length: float


@dataclass(frozen=True)
class TriangleMesh:
    """Conforming triangle mesh: nodes, CCW triangles, labelled boundary."""

    nodes: np.ndarray
    triangles: np.ndarray
    boundary_edges: tuple[BoundaryEdge, ...]
    h: float

    @property
    def n_nodes(self) -> int:
        return len(self.nodes)

    @property
    def boundary_nodes(self) -> np.ndarray:
        """Sorted array of node indices lying on the boundary."""
        ids = {e.n1 for e in self.boundary_edges} | {e.n2 for e in self.boundary_edges}
        return np.array(sorted(ids), dtype=int)

    def triangle_areas(self) -> np.ndarray:
        p = self.nodes[self.triangles]
        return 0.5 * np.abs(
            (p[:, 1, 0] - p[:, 0, 0]) * (p[:, 2, 1] - p[:, 0, 1])
            - (p[:, 1, 1] - p[:, 0, 1]) * (p[:, 2, 0] - p[:, 0, 0])
        )

    def edge_length(self, edge: BoundaryEdge) -> float:
        d = self.nodes[edge.n2] - self.nodes[edge.n1]
        return float(math.hypot(d[0], d[1]))


# -- polygon construction ----------------------------------------------------


def _signed_area(pts) -> float:
    x, y = pts[:, 0], pts[:, 1]
    return 0.5 * float(np.sum(x * np.roll(y, -1) - np.roll(x, -1) * y))


def _orient(a, b, c) -> float:
    """Twice the signed area of triangle (a, b, c); > 0 means CCW."""
    return (b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0])


def _on_segment(a, b, c, eps) -> bool:
    """Whether c (assumed nearly collinear with a-b) lies within the a-b box."""
    return (
        min(a[0], b[0]) - eps <= c[0] <= max(a[0], b[0]) + eps
        and min(a[1], b[1]) - eps <= c[1] <= max(a[1], b[1]) + eps
    )


def _segments_intersect(p1, p2, q1, q2, eps2) -> bool:
    """Closed-segment intersection test with area tolerance eps2."""
    d1 = _orient(q1, q2, p1)
    d2 = _orient(q1, q2, p2)
    d3 = _orient(p1, p2, q1)
    d4 = _orient(p1, p2, q2)
    if ((d1 > eps2 and d2 < -eps2) or (d1 < -eps2 and d2 > eps2)) and (
        (d3 > eps2 and d4 < -eps2) or (d3 < -eps2 and d4 > eps2)
    ):
        return True
    eps = math.sqrt(eps2)
    if abs(d1) <= eps2 and _on_segment(q1, q2, p1, eps):
        return True
    if abs(d2) <= eps2 and _on_segment(q1, q2, p2, eps):
        return True
    if abs(d3) <= eps2 and _on_segment(p1, p2, q1, eps):
        return True
    if abs(d4) <= eps2 and _on_segment(p1, p2, q2, eps):
        return True
    return False


def build_polygon(vertices, arc_labels) -> PolygonalDomain:
    """Validate and normalize a polygon to counterclockwise orientation.

    Raises SelfIntersection, DegenerateEdge or LabelCountMismatch.  If the
    input is clockwise, both the vertex order and the label order are
    reversed so labels keep naming the same geometric segments.
    """
    pts = np.array(vertices, dtype=float)
    if pts.ndim != 2 or pts.shape[1] != 2 or len(pts) < 3:
        raise ValueError("vertices must be an (n, 2) array with n >= 3")
    if not np.all(np.isfinite(pts)):
        raise ValueError("vertices must be finite")
    labels = tuple(str(s) for s in arc_labels)
    n = len(pts)
    if len(labels) != n:
        raise LabelCountMismatch(
            f"{len(labels)} labels for {n} boundary segments"
        )

    bbox = pts.max(axis=0) - pts.min(axis=0)
    scale = float(math.hypot(bbox[0], bbox[1]))
    if scale == 0.0:
        raise DegenerateEdge("all vertices coincide")
    seg = np.roll(pts, -1, axis=0) - pts
    lengths = np.hypot(seg[:, 0], seg[:, 1])
    if np.any(lengths <= 1e-14 * scale):
        i = int(np.argmin(lengths))
        raise DegenerateEdge(f"segment {i} has zero length")

    if _signed_area(pts) < 0:
        pts = np.vstack([pts[:1], pts[:0:-1]])
        labels = tuple(reversed(labels))

    # Simplicity: non-adjacent segments must be disjoint, adjacent ones must
    # meet only at their shared vertex (no doubled-back spikes).
    eps2 = (1e-12 * scale) ** 2
    for i in range(n):
        p1, p2 = pts[i], pts[(i + 1) % n]
        for j in range(i + 1, n):
            q1, q2 = pts[j], pts[(j + 1) % n]
            adjacent = j == i + 1 or (i == 0 and j == n - 1)
            if adjacent:
                # shared endpoint aside, directions must not fold back onto
                # each other (zero angle means overlapping segments)
                u = p2 - p1
                v = q2 - q1
                cross = u[0] * v[1] - u[1] * v[0]
                dot = u[0] * v[0] + u[1] * v[1]
                if abs(cross) <= eps2 and dot < 0:
                    raise SelfIntersection(
                        f"segments {i} and {j} fold back onto each other"
                    )
                continue
            if _segments_intersect(p1, p2, q1, q2, eps2):
                raise SelfIntersection(f"segments {i} and {j} intersect")

    return PolygonalDomain(vertices=_frozen(pts), arc_labels=labels)


def _frozen(arr: np.ndarray) -> np.ndarray:
    arr = np.ascontiguousarray(arr)
    arr.setflags(write=False)
    return arr


# -- triangulation -----------------------------------------------------------


def _point_in_triangle(p, a, b, c, eps2) -> bool:
    """Whether p lies inside or on triangle (a, b, c) (CCW), with tolerance."""
    return (
        _orient(a, b, p) >= -eps2
        and _orient(b, c, p) >= -eps2
        and _orient(c, a, p) >= -eps2
    )


def _ear_clip(pts: np.ndarray) -> list[tuple[int, int, int]]:
    """Triangulate a simple CCW polygon by ear clipping (deterministic)."""
    n = len(pts)
    idx = list(range(n))
    bbox = pts.max(axis=0) - pts.min(axis=0)
    eps2 = 1e-14 * float(bbox[0] * bbox[0] + bbox[1] * bbox[1])
    tris: list[tuple[int, int, int]] = []
    while len(idx) > 3:
        m = len(idx)
        for k in range(m):
            ia, ib, ic = idx[(k - 1) % m], idx[k], idx[(k + 1) % m]
            a, b, c = pts[ia], pts[ib], pts[ic]
            if _orient(a, b, c) <= eps2:  # reflex or flat corner
                continue
            blocked = False
            for j in idx:
                if j in (ia, ib, ic):
                    continue
                if _point_in_triangle(pts[j], a, b, c, eps2):
                    blocked = True
                    break
            if not blocked:
                tris.append((ia, ib, ic))
                idx.pop(k)
                break
        else:
            raise MeshFailure("ear clipping found no ear (degenerate polygon)")
    a, b, c = (pts[i] for i in idx)
    if _orient(a, b, c) <= eps2:
        raise MeshFailure("final triangle is degenerate")
    tris.append((idx[0], idx[1], idx[2]))
    return tris


def _segment_normal(p, q) -> np.ndarray:
    """Outward unit normal of boundary segment p -> q of a CCW polygon."""
    d = q - p
    length = math.hypot(d[0], d[1])
    return _frozen(np.array([d[1], -d[0]]) / length)


def _mesh_h(nodes, triangles) -> float:
    p = nodes[triangles]
    sides = np.stack(
        [
            p[:, 1] - p[:, 0],
            p[:, 2] - p[:, 1],
            p[:, 0] - p[:, 2],
        ]
    )
    return float(np.max(np.hypot(sides[..., 0], sides[..., 1])))


def _make_mesh(nodes, triangles, bedges, *, check=True) -> TriangleMesh:
    """Assemble a TriangleMesh and verify its structural invariants."""
    nodes = _frozen(np.asarray(nodes, dtype=float))
    triangles = np.ascontiguousarray(np.asarray(triangles, dtype=int))
    triangles.setflags(write=False)
    mesh = TriangleMesh(
        nodes=nodes,
        triangles=triangles,
        boundary_edges=tuple(bedges),
        h=_mesh_h(nodes, triangles),
    )
    if check:
        _validate_mesh(mesh)
    return mesh


def _validate_mesh(mesh: TriangleMesh) -> None:
    areas = mesh.triangle_areas()
    total = float(np.sum(areas))
    p = mesh.nodes[mesh.triangles]
    signed = 0.5 * (
        (p[:, 1, 0] - p[:, 0, 0]) * (p[:, 2, 1] - p[:, 0, 1])
        - (p[:, 1, 1] - p[:, 0, 1]) * (p[:, 2, 0] - p[:, 0, 0])
    )
    if np.any(signed <= 0):
        raise MeshFailure("triangle with non-positive orientation")
    if np.any(areas <= 1e-14 * total):
        raise MeshFailure("degenerate triangle (area below 1e-14 of domain)")

    # conformity: every edge shared by exactly two triangles or on the boundary
    counts: dict[tuple[int, int], int] = {}
    opposite: dict[tuple[int, int], int] = {}
    for a, b, c in mesh.triangles:
        for u, v, w in ((a, b, c), (b, c, a), (c, a, b)):
            key = (u, v) if u < v else (v, u)
            counts[key] = counts.get(key, 0) + 1
            opposite[key] = w
    boundary_keys = set()
    for e in mesh.boundary_edges:
        key = (e.n1, e.n2) if e.n1 < e.n2 else (e.n2, e.n1)
        if key in boundary_keys:
            raise MeshFailure("duplicate boundary edge")
        boundary_keys.add(key)
    for key, cnt in counts.items():
        if cnt == 2:
            if key in boundary_keys:
                raise MeshFailure("interior edge marked as boundary")
        elif cnt == 1:
            if key not in boundary_keys:
                raise MeshFailure("unlabelled boundary edge")
        else:
            raise MeshFailure("edge shared by more than two triangles")
    if len(boundary_keys) != sum(1 for c in counts.values() if c == 1):
        raise MeshFailure("boundary edge not present in any triangle")

    # outward normals: positive component along (edge midpoint - opposite vertex)
    for e in mesh.boundary_edges:
        key = (e.n1, e.n2) if e.n1 < e.n2 else (e.n2, e.n1)
        if key not in opposite:
            raise MeshFailure("boundary edge not present in any triangle")
        mid = 0.5 * (mesh.nodes[e.n1] + mesh.nodes[e.n2])
        away = mid - mesh.nodes[opposite[key]]
        if float(np.dot(e.normal, away)) <= 0:
            raise MeshFailure("boundary normal points inward")
        if abs(float(np.hypot(e.normal[0], e.normal[1])) - 1.0) > 1e-12:
            raise MeshFailure("boundary normal not unit length")


def mesh_uniform(domain: PolygonalDomain, h_target: float) -> TriangleMesh:
    """Triangulate the polygon and refine uniformly until h <= h_target."""
    if not (h_target > 0):
        raise MeshFailure("h_target must be positive")
    tris = _ear_clip(domain.vertices)
    n = domain.n_segments
    bedges = []
    for i in range(n):
        p, q = domain.segment(i)
        bedges.append(
            BoundaryEdge(
                n1=i,
                n2=(i + 1) % n,
                label=domain.arc_labels[i],
                normal=_segment_normal(p, q),
                segment=i,
                t0=0.0,
                t1=1.0,
            )
        )
    mesh = _make_mesh(domain.vertices, tris, bedges)
    # h halves exactly under red refinement, so the level count is known now.
    if mesh.h > h_target:
        needed = int(np.ceil(np.log2(mesh.h / h_target)))
        if needed > MAX_REFINEMENTS:
            raise MeshFailure(
                f"h_target={h_target:g} needs {needed} refinements "
                f"(limit {MAX_REFINEMENTS})"
            )
    while mesh.h > h_target:
        mesh = refine(mesh)
    return mesh


def refine(mesh: TriangleMesh) -> TriangleMesh:
    """Red refinement: each triangle splits into four congruent children.

    Boundary edges split in two and inherit label, normal and the halves of
    their parameter interval; h halves (up to roundoff in the recomputed
    node coordinates).
    """
    nodes = mesh.nodes
    new_pts: list[np.ndarray] = []
    mid: dict[tuple[int, int], int] = {}

    def midpoint(a: int, b: int) -> int:
        key = (a, b) if a < b else (b, a)
        idx = mid.get(key)
        if idx is None:
            idx = len(nodes) + len(new_pts)
            mid[key] = idx
            new_pts.append(0.5 * (nodes[a] + nodes[b]))
        return idx

    children = np.empty((4 * len(mesh.triangles), 3), dtype=int)
    for t, (a, b, c) in enumerate(mesh.triangles):
        ab, bc, ca = midpoint(a, b), midpoint(b, c), midpoint(c, a)
        children[4 * t + 0] = (a, ab, ca)
        children[4 * t + 1] = (ab, b, bc)
        children[4 * t + 2] = (ca, bc, c)
        children[4 * t + 3] = (ab, bc, ca)

    all_nodes = np.vstack([nodes, np.array(new_pts)])
    bedges = []
    for e in mesh.boundary_edges:
        key = (e.n1, e.n2) if e.n1 < e.n2 else (e.n2, e.n1)
        m = mid[key]
        tm = 0.5 * (e.t0 + e.t1)
        bedges.append(BoundaryEdge(e.n1, m, e.label, e.normal, e.segment, e.t0, tm))
        bedges.append(BoundaryEdge(m, e.n2, e.label, e.normal, e.segment, tm, e.t1))
    return _make_mesh(all_nodes, children, bedges)


def boundary_region(mesh: TriangleMesh, labels) -> BoundaryRegion:
    """Collect the boundary edges whose arc label is in ``labels``."""
    if isinstance(labels, str):
        labels = [labels]
    wanted = {str(s) for s in labels}
    if not wanted:
        raise EmptyRegion("no labels given")
    ids = tuple(
        i for i, e in enumerate(mesh.boundary_edges) if e.label in wanted
    )
    if not ids:
        raise EmptyRegion(f"no boundary edge carries a label in {sorted(wanted)}")
    total = sum(mesh.edge_length(mesh.boundary_edges[i]) for i in ids)
    return BoundaryRegion(edge_ids=ids, total_length=total)


# -- mesh text format --------------------------------------------------------


def write_mesh(mesh: TriangleMesh, path) -> None:
    """Write the mesh in the plain-text format (17 significant digits)."""
    lines = ["mesh 2d"]
    for i, (x, y) in enumerate(mesh.nodes):
        lines.append(f"node {i} {x:.17g} {y:.17g}")
    for i, (a, b, c) in enumerate(mesh.triangles):
        lines.append(f"tri {i} {a} {b} {c}")
    for i, e in enumerate(mesh.boundary_edges):
        lines.append(f"bedge {i} {e.n1} {e.n2} {e.label}")
    text = "\n".join(lines) + "\n"
    if hasattr(path, "write"):
        path.write(text)
    else:
        with open(path, "w") as f:
            f.write(text)


def read_mesh(path) -> TriangleMesh:
    """Read a mesh written by write_mesh and rebuild derived boundary data.

    Outward normals are recomputed from the adjacent triangles; arc-length
    parameters are reconstructed per maximal chain of consecutive same-label
    boundary edges (for meshes produced by mesh_uniform/refine this recovers
    the original per-segment parameterization).
    """
    if hasattr(path, "read"):
        text = path.read()
    else:
        with open(path) as f:
            text = f.read()
    lines = text.splitlines()
    if not lines or lines[0].strip() != "mesh 2d":
        raise MeshFailure("mesh file must start with 'mesh 2d'")
    nodes: dict[int, tuple[float, float]] = {}
    tris: dict[int, tuple[int, int, int]] = {}
    raw_bedges: list[tuple[int, int, str]] = []
    for ln, line in enumerate(lines[1:], start=2):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split()
        try:
            kind = parts[0]
            if kind == "node":
                nodes[int(parts[1])] = (float(parts[2]), float(parts[3]))
            elif kind == "tri":
                tris[int(parts[1])] = (int(parts[2]), int(parts[3]), int(parts[4]))
            elif kind == "bedge":
                raw_bedges.append((int(parts[2]), int(parts[3]), parts[4]))
            else:
                raise MeshFailure(f"line {ln}: unknown record '{kind}'")
        except (IndexError, ValueError) as exc:
            raise MeshFailure(f"line {ln}: malformed record ({exc})") from exc
    if not nodes or not tris:
        raise MeshFailure("mesh file has no nodes or no triangles")
    n_nodes = max(nodes) + 1
    if sorted(nodes) != list(range(n_nodes)):
        raise MeshFailure("node ids must be contiguous from 0")
    coords = np.array([nodes[i] for i in range(n_nodes)])
    triangles = np.array([tris[i] for i in sorted(tris)], dtype=int)
    if triangles.min() < 0 or triangles.max() >= n_nodes:
        raise MeshFailure("triangle references a node id outside the file")
    for n1, n2, _ in raw_bedges:
        if not (0 <= n1 < n_nodes and 0 <= n2 < n_nodes):
            raise MeshFailure("boundary edge references a node id outside the file")

    # normals from adjacent triangles, oriented away from the opposite vertex
    opposite: dict[tuple[int, int], int] = {}
    for a, b, c in triangles:
        for u, v, w in ((a, b, c), (b, c, a), (c, a, b)):
            key = (u, v) if u < v else (v, u)
            opposite[key] = w

    # chains of consecutive connected same-label edges -> arc-length params
    chains: list[list[int]] = []
    for i, (n1, n2, label) in enumerate(raw_bedges):
        if chains and raw_bedges[chains[-1][-1]][1] == n1 and raw_bedges[chains[-1][-1]][2] == label:
            chains[-1].append(i)
        else:
            chains.append([i])

    bedges: list[BoundaryEdge | None] = [None] * len(raw_bedges)
    for seg_id, chain in enumerate(chains):
        lengths = []
        for i in chain:
            n1, n2, _ = raw_bedges[i]
            d = coords[n2] - coords[n1]
            lengths.append(math.hypot(d[0], d[1]))
        total = sum(lengths)
        if total == 0:
            raise MeshFailure("zero-length boundary chain")
        acc = 0.0
        for i, L in zip(chain, lengths):
            n1, n2, label = raw_bedges[i]
            key = (n1, n2) if n1 < n2 else (n2, n1)
            if key not in opposite:
                raise MeshFailure("boundary edge not present in any triangle")
            d = coords[n2] - coords[n1]
            nrm = np.array([d[1], -d[0]]) / math.hypot(d[0], d[1])
            mid = 0.5 * (coords[n1] + coords[n2])
            if float(np.dot(nrm, mid - coords[opposite[key]])) < 0:
                nrm = -nrm
            t0 = acc / total
            acc += L
            t1 = acc / total
            bedges[i] = BoundaryEdge(n1, n2, label, _frozen(nrm), seg_id, t0, t1)
    return _make_mesh(coords, triangles, bedges)
