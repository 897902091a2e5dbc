"""Flag-glued closed-surface triangulations.

A triangulation is stored as ``F`` abstract triangles whose sides are glued in
pairs.  Side ``i`` of a face is opposite corner ``i`` and runs from corner
``(i+1) % 3`` to corner ``(i+2) % 3``; a gluing identifies the start corner of
one side with the end corner of the other (head to tail), so faces carry
coherent orientations.  Everything downstream (vertex orbits, edge stars,
Euler characteristic) is derived from that single involution.

Gluings are encoded on flags ``3*face + side``.  Multi-edges and same-face
gluings across distinct sides are allowed; they are required to express small
negative-Euler-characteristic complexes.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DuplicateSide, SelfGluedSide, UnknownVertex, UnmatchedSide

Side = tuple[int, int]


def _flag(face: int, side: int) -> int:
    return 3 * face + side


class TopologicalTriangulation:
    """Closed-surface triangulation given by a fixed-point-free side involution.

    Attributes
    ----------
    face_count : number of triangles F
    mate : int array of length 3F, the gluing involution on flags
    edges : list of flag pairs (lo, hi), sorted by lo; index = edge id
    edge_of_flag : edge id per flag
    vertex_of_corner : vertex id per corner flag (corner c of face f = 3f+c)
    vertex_count : number of corner orbits V
    """

    def __init__(self, face_count: int, mate: np.ndarray):
        self.face_count = int(face_count)
        self.mate = np.asarray(mate, dtype=np.int64)
        self._derive()

    # -- construction ---------------------------------------------------------

    def _derive(self) -> None:
        n = 3 * self.face_count
        mate = self.mate
        self.edges: list[tuple[int, int]] = [
            (f, int(mate[f])) for f in range(n) if f < mate[f]
        ]
        self.edge_count = len(self.edges)
        self.edge_of_flag = np.empty(n, dtype=np.int64)
        for e, (a, b) in enumerate(self.edges):
            self.edge_of_flag[a] = e
            self.edge_of_flag[b] = e

        # corner orbits under head-to-tail identification
        parent = np.arange(n, dtype=np.int64)

        def find(x: int) -> int:
            while parent[x] != x:
                parent[x] = parent[parent[x]]
                x = parent[x]
            return x

        def union(x: int, y: int) -> None:
            rx, ry = find(x), find(y)
            if rx != ry:
                parent[max(rx, ry)] = min(rx, ry)

        for a, b in self.edges:
            fa, sa = divmod(a, 3)
            fb, sb = divmod(b, 3)
            union(_flag(fa, (sa + 1) % 3), _flag(fb, (sb + 2) % 3))
            union(_flag(fa, (sa + 2) % 3), _flag(fb, (sb + 1) % 3))

        roots = np.array([find(i) for i in range(n)], dtype=np.int64)
        order = {r: i for i, r in enumerate(sorted(set(roots.tolist())))}
        self.vertex_of_corner = np.array([order[r] for r in roots], dtype=np.int64)
        self.vertex_count = len(order)
        self.corners_of_vertex: list[list[int]] = [[] for _ in range(self.vertex_count)]
        for c in range(n):
            self.corners_of_vertex[self.vertex_of_corner[c]].append(c)

        # edge endpoints as vertex ids (order: start corner of the lower flag, then end)
        self.edge_endpoints = np.empty((self.edge_count, 2), dtype=np.int64)
        for e, (a, _) in enumerate(self.edges):
            fa, sa = divmod(a, 3)
            self.edge_endpoints[e, 0] = self.vertex_of_corner[_flag(fa, (sa + 1) % 3)]
            self.edge_endpoints[e, 1] = self.vertex_of_corner[_flag(fa, (sa + 2) % 3)]

    @property
    def chi(self) -> int:
        return self.vertex_count - self.edge_count + self.face_count

    def vertex_degree(self, v: int) -> int:
        """Number of edge endpoints at v (loop edges count twice)."""
        return int(np.sum(self.edge_endpoints == v))

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, TopologicalTriangulation)
            and self.face_count == other.face_count
            and np.array_equal(self.mate, other.mate)
        )

    def __hash__(self):
        return hash((self.face_count, self.mate.tobytes()))

    def __repr__(self) -> str:
        return (
            f"TopologicalTriangulation(F={self.face_count}, E={self.edge_count}, "
            f"V={self.vertex_count}, chi={self.chi})"
        )

    # -- serialization ---------------------------------------------------------

    def to_dict(self) -> dict:
        return {
            "faces": self.face_count,
            "gluing": [
                [[int(a // 3), int(a % 3)], [int(b // 3), int(b % 3)]]
                for a, b in self.edges
            ],
        }

    @classmethod
    def from_dict(cls, data: dict) -> "TopologicalTriangulation":
        pairs = [
            ((int(p[0][0]), int(p[0][1])), (int(p[1][0]), int(p[1][1])))
            for p in data["gluing"]
        ]
        return build_complex(int(data["faces"]), pairs)


def build_complex(
    face_count: int, gluing_pairs: list[tuple[Side, Side]]
) -> TopologicalTriangulation:
    """Validate a side pairing and build the triangulation.

    ``gluing_pairs`` must cover every one of the 3F sides exactly once and may
    not pair a side with itself.  Violations raise ``UnmatchedSide``,
    ``DuplicateSide`` or ``SelfGluedSide`` naming the offending side.
    """
    n = 3 * face_count
    mate = np.full(n, -1, dtype=np.int64)
    for (f1, s1), (f2, s2) in gluing_pairs:
        for f, s in ((f1, s1), (f2, s2)):
            if not (0 <= f < face_count and 0 <= s < 3):
                raise UnmatchedSide(f"side (face {f}, side {s}) is outside the complex")
        a, b = _flag(f1, s1), _flag(f2, s2)
        if a == b:
            raise SelfGluedSide(f"side (face {f1}, side {s1}) glued to itself")
        for x, (f, s) in ((a, (f1, s1)), (b, (f2, s2))):
            if mate[x] != -1:
                raise DuplicateSide(f"side (face {f}, side {s}) appears in two pairs")
        mate[a] = b
        mate[b] = a
    missing = np.nonzero(mate < 0)[0]
    if missing.size:
        f, s = divmod(int(missing[0]), 3)
        raise UnmatchedSide(f"side (face {f}, side {s}) is not glued")
    return TopologicalTriangulation(face_count, mate)


def euler_characteristic(T: TopologicalTriangulation) -> int:
    """V - E + F of the complex."""
    return T.chi


def vertex_edge_incidence(T: TopologicalTriangulation, v: int) -> list[int]:
    """Edges at vertex v, one entry per endpoint incidence.

    A loop edge (both endpoints at v) is listed twice; summed over all
    vertices this gives exactly 2E entries.
    """
    if not (0 <= v < T.vertex_count):
        raise UnknownVertex(f"vertex {v} not in complex with V={T.vertex_count}")
    out: list[int] = []
    for e in range(T.edge_count):
        for end in T.edge_endpoints[e]:
            if end == v:
                out.append(e)
    return out


def from_vertex_triples(triples: list[tuple[int, int, int]]) -> TopologicalTriangulation:
    """Import a triangulation given by vertex triples.

    Each unordered vertex pair must occur on exactly two face sides.  Faces
    are re-oriented by breadth-first propagation so that shared sides are
    traversed oppositely; non-orientable or ambiguous input fails loudly.
    This importer cannot express complexes with multi-edges or loops, which
    is why the side-gluing form is primary.
    """
    faces = [tuple(int(v) for v in t) for t in triples]
    F = len(faces)
    for t in faces:
        if len(set(t)) != 3:
            raise ValueError(f"face {t} repeats a vertex; use side gluings instead")

    def side_pairs(tri):
        # side i runs from corner (i+1) to corner (i+2)
        return [(tri[(i + 1) % 3], tri[(i + 2) % 3]) for i in range(3)]

    # orient faces coherently
    by_pair: dict[frozenset, list[int]] = {}
    for f, tri in enumerate(faces):
        for u, w in side_pairs(tri):
            by_pair.setdefault(frozenset((u, w)), []).append(f)
    for key, fs in by_pair.items():
        if len(fs) != 2:
            raise ValueError(
                f"vertex pair {sorted(key)} lies on {len(fs)} sides; gluing is ambiguous"
            )

    oriented: list[tuple[int, int, int] | None] = [None] * F
    oriented[0] = faces[0]
    queue = [0]
    while queue:
        f = queue.pop()
        for u, w in side_pairs(oriented[f]):
            for g in by_pair[frozenset((u, w))]:
                if g == f:
                    continue
                tri = oriented[g] if oriented[g] is not None else faces[g]
                directed = (u, w) in side_pairs(tri)
                if oriented[g] is None:
                    # shared side must be traversed oppositely in g
                    oriented[g] = (tri[0], tri[2], tri[1]) if directed else tri
                    queue.append(g)
                elif directed:
                    raise ValueError(
                        "triangulation is not orientable; provide side gluings directly"
                    )
    if any(t is None for t in oriented):
        raise ValueError("triangulation is not connected")

    flag_of_directed: dict[tuple[int, int], int] = {}
    for f, tri in enumerate(oriented):
        for i, (u, w) in enumerate(side_pairs(tri)):
            if (u, w) in flag_of_directed:
                raise ValueError(f"directed side {(u, w)} occurs twice after orienting")
            flag_of_directed[(u, w)] = _flag(f, i)

    pairs = []
    for (u, w), a in flag_of_directed.items():
        b = flag_of_directed[(w, u)]
        if a < b:
            pairs.append(((a // 3, a % 3), (b // 3, b % 3)))
    return build_complex(F, pairs)


# -- midpoint subdivision ------------------------------------------------------


@dataclass(frozen=True)
class SubdividedComplex:
    """1-to-4 midpoint subdivision together with edge provenance.

    ``parent_edge[e]`` is the original edge an edge of the refined complex
    came from: the two halves of an original edge, and the medial cut
    parallel to it inside each incident face, all map to that edge.
    ``is_medial[e]`` distinguishes the parallel cuts from the halves.
    """

    complex: TopologicalTriangulation
    parent_edge: np.ndarray
    is_medial: np.ndarray


def subdivide(T: TopologicalTriangulation) -> SubdividedComplex:
    """Split every face into four (corner triangles plus the medial one)."""
    pairs: list[tuple[Side, Side]] = []
    provenance: dict[int, tuple[int, bool]] = {}  # lower flag -> (orig edge, medial?)

    def corner_face(t: int, j: int) -> int:
        return 4 * t + j

    def central_face(t: int) -> int:
        return 4 * t + 3

    for t in range(T.face_count):
        for j in range(3):
            a = (corner_face(t, j), 0)
            b = (central_face(t), j)
            pairs.append((a, b))
            provenance[_flag(*a)] = (int(T.edge_of_flag[_flag(t, j)]), True)
            provenance[_flag(*b)] = (int(T.edge_of_flag[_flag(t, j)]), True)
    for a_flag, b_flag in T.edges:
        t, i = divmod(a_flag, 3)
        s, ip = divmod(b_flag, 3)
        e = int(T.edge_of_flag[a_flag])
        first = ((corner_face(t, (i + 1) % 3), 2), (corner_face(s, (ip + 2) % 3), 1))
        second = ((corner_face(t, (i + 2) % 3), 1), (corner_face(s, (ip + 1) % 3), 2))
        for pa, pb in (first, second):
            pairs.append((pa, pb))
            provenance[_flag(*pa)] = (e, False)
            provenance[_flag(*pb)] = (e, False)

    sub = build_complex(4 * T.face_count, pairs)
    parent = np.empty(sub.edge_count, dtype=np.int64)
    medial = np.zeros(sub.edge_count, dtype=bool)
    for e, (lo, _) in enumerate(sub.edges):
        parent[e], medial[e] = provenance[lo]
    return SubdividedComplex(sub, parent, medial)


# -- stock complexes -------------------------------------------------------------


def tetrahedron() -> TopologicalTriangulation:
    """Boundary of the 3-simplex: V=4, E=6, F=4, chi=2."""
    return from_vertex_triples([(1, 2, 3), (0, 3, 2), (0, 1, 3), (0, 2, 1)])


def pillow() -> TopologicalTriangulation:
    """Two triangles glued along all three sides (doubled triangle, chi=2)."""
    return build_complex(2, [((0, 0), (1, 0)), ((0, 1), (1, 2)), ((0, 2), (1, 1))])


def two_triangle_torus() -> TopologicalTriangulation:
    """Two triangles glued side-for-side: one vertex, chi=0."""
    return build_complex(2, [((0, 0), (1, 0)), ((0, 1), (1, 1)), ((0, 2), (1, 2))])


def csaszar_torus() -> TopologicalTriangulation:
    """The 7-vertex torus triangulation (complete graph on 7 vertices)."""
    triples = []
    for i in range(7):
        triples.append((i, (i + 1) % 7, (i + 3) % 7))
        triples.append((i, (i + 2) % 7, (i + 3) % 7))
    return from_vertex_triples(triples)


def genus2_octagon() -> TopologicalTriangulation:
    """Fan triangulation of the identified octagon: F=6, E=9, V=1, chi=-2.

    The octagon boundary carries the surface word a b a' b' c d c' d'; the
    fan uses five interior diagonals from one polygon corner.
    """
    pairs: list[tuple[Side, Side]] = [
        ((0, 2), (1, 0)),  # a
        ((0, 0), (2, 0)),  # b
        ((3, 0), (5, 0)),  # c
        ((4, 0), (5, 1)),  # d
    ]
    for t in range(5):  # fan diagonals
        pairs.append(((t, 1), (t + 1, 2)))
    return build_complex(6, pairs)


def octagon_cone() -> TopologicalTriangulation:
    """Cone over the identified octagon: F=8, E=12, V=2, chi=-2.

    All eight apex corners lie at one vertex and all boundary corners at the
    other, so equal-shaped faces give a metric with equal curvature at both
    vertices.
    """
    pairs: list[tuple[Side, Side]] = [
        ((0, 0), (2, 0)),  # a
        ((1, 0), (3, 0)),  # b
        ((4, 0), (6, 0)),  # c
        ((5, 0), (7, 0)),  # d
    ]
    for i in range(8):  # spokes
        pairs.append((((i - 1) % 8, 1), (i, 2)))
    return build_complex(8, pairs)
