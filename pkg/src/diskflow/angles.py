"""Partial-angle coordinates on a triangulation.

A point assigns one partial angle per (face, side) flag.  The corner angle
opposite side ``i`` of a face is the sum of the other two partials, so corner
angles are linear in the coordinates; the per-edge sum of the two incident
partials is the quantity preserved by a conformal change.  All predicates
here are report-style: they return the margins rather than raising.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.optimize import linprog

from .complexes import TopologicalTriangulation
from .errors import ComplexMismatch, Infeasible, TooLarge

CHECK_TOL = 1e-9     # absolute tolerance for linear constraint checks
CLASS_TOL = 1e-12    # tolerance for class equality
MARGIN_FLOOR = 1e-6  # minimum interior margin accepted as feasible


@dataclass(frozen=True)
class AngleSystem:
    """A partial-angle vector over the flags of a triangulation."""

    complex: TopologicalTriangulation
    psi: np.ndarray

    def __post_init__(self):
        psi = np.asarray(self.psi, dtype=float)
        if psi.shape != (3 * self.complex.face_count,):
            raise ValueError(
                f"expected {3 * self.complex.face_count} partials, got {psi.shape}"
            )
        object.__setattr__(self, "psi", psi)

    def face_partials(self, t: int) -> np.ndarray:
        return self.psi[3 * t : 3 * t + 3]


@dataclass(frozen=True)
class ConformalClassSpec:
    """Per-edge target intersection data defining a conformal class."""

    complex: TopologicalTriangulation
    psi_edge: np.ndarray

    def __post_init__(self):
        pe = np.asarray(self.psi_edge, dtype=float)
        if pe.shape != (self.complex.edge_count,):
            raise ValueError(
                f"expected {self.complex.edge_count} edge values, got {pe.shape}"
            )
        object.__setattr__(self, "psi_edge", pe)


# -- the linear angle algebra ----------------------------------------------------


def corner_angles(x: AngleSystem, t: int) -> tuple[float, float, float]:
    """Corner angles of face t; entry i sits opposite side i."""
    p = x.face_partials(t)
    return (p[1] + p[2], p[0] + p[2], p[0] + p[1])


def all_corner_angles(x: AngleSystem) -> np.ndarray:
    """(F, 3) array of corner angles, corner i opposite side i."""
    p = x.psi.reshape(-1, 3)
    return p.sum(axis=1, keepdims=True) - p


def partials_from_angles(
    T: TopologicalTriangulation, angles: np.ndarray
) -> AngleSystem:
    """Invert the corner-angle map: side i gets half of (A_j + A_k - A_i)."""
    a = np.asarray(angles, dtype=float).reshape(T.face_count, 3)
    psi = (a.sum(axis=1, keepdims=True) - 2 * a) / 2.0
    return AngleSystem(T, psi.reshape(-1))


def informal_intersection_angle(x: AngleSystem, e: int) -> float:
    """Sum of the two partials across edge e."""
    a, b = x.complex.edges[e]
    return float(x.psi[a] + x.psi[b])


def edge_psi(x: AngleSystem) -> np.ndarray:
    """All per-edge intersection data as a vector in canonical edge order."""
    flags = np.asarray(x.complex.edges, dtype=np.int64)
    return x.psi[flags[:, 0]] + x.psi[flags[:, 1]]


def vertex_angle_sums(x: AngleSystem) -> np.ndarray:
    """Sum of corner angles around each vertex."""
    A = all_corner_angles(x).reshape(-1)
    sums = np.zeros(x.complex.vertex_count)
    np.add.at(sums, x.complex.vertex_of_corner, A)
    return sums


# -- predicates -------------------------------------------------------------------


@dataclass(frozen=True)
class AngleSystemReport:
    ok: bool
    corner_violations: list[tuple[int, int, float]]  # (face, corner, angle)
    vertex_violations: list[tuple[int, float]]       # (vertex, sum - 2pi)

    def __bool__(self) -> bool:
        return self.ok


def is_angle_system(x: AngleSystem, tol: float = CHECK_TOL) -> AngleSystemReport:
    """Check corner angles in (0, pi) and vertex sums equal to 2 pi."""
    A = all_corner_angles(x)
    corners = [
        (t, c, float(A[t, c]))
        for t in range(x.complex.face_count)
        for c in range(3)
        if not (tol < A[t, c] < np.pi - tol)
    ]
    sums = vertex_angle_sums(x)
    verts = [
        (v, float(sums[v] - 2 * np.pi))
        for v in range(x.complex.vertex_count)
        if abs(sums[v] - 2 * np.pi) > tol
    ]
    return AngleSystemReport(not corners and not verts, corners, verts)


@dataclass(frozen=True)
class DelaunayReport:
    ok: bool
    violations: list[tuple[int, float]]  # (edge, value)
    min_margin: float

    def __bool__(self) -> bool:
        return self.ok


def is_delaunay(x: AngleSystem, tol: float = CHECK_TOL) -> DelaunayReport:
    """Check every per-edge value lies strictly inside (0, pi)."""
    pe = edge_psi(x)
    bad = [
        (e, float(pe[e]))
        for e in range(pe.size)
        if not (tol < pe[e] < np.pi - tol)
    ]
    margin = float(np.min(np.minimum(pe, np.pi - pe))) if pe.size else np.inf
    return DelaunayReport(not bad, bad, margin)


def face_curvature(x: AngleSystem, t: int) -> float:
    """Angle sum of face t minus pi."""
    return float(sum(corner_angles(x, t)) - np.pi)


def face_curvatures(x: AngleSystem) -> np.ndarray:
    return all_corner_angles(x).sum(axis=1) - np.pi


@dataclass(frozen=True)
class CurvatureReport:
    ok: bool
    violations: list[tuple[int, float]]  # (face, curvature)
    max_curvature: float

    def __bool__(self) -> bool:
        return self.ok


def is_negatively_curved(x: AngleSystem, tol: float = CHECK_TOL) -> CurvatureReport:
    k = face_curvatures(x)
    bad = [(t, float(k[t])) for t in range(k.size) if k[t] > -tol]
    return CurvatureReport(not bad, bad, float(k.max()) if k.size else -np.inf)


# -- conformal classes -------------------------------------------------------------


def conformal_class_of(x: AngleSystem) -> ConformalClassSpec:
    return ConformalClassSpec(x.complex, edge_psi(x))


def same_class(x: AngleSystem, y: AngleSystem, tol: float = CLASS_TOL) -> bool:
    if x.complex != y.complex:
        raise ComplexMismatch("angle systems live on different complexes")
    return bool(np.max(np.abs(edge_psi(x) - edge_psi(y))) <= tol)


def class_basis(T: TopologicalTriangulation) -> np.ndarray:
    """(E, 3F) matrix of tangent directions to a conformal class.

    Row e carries +1 on the lower flag of edge e and -1 on its mate; moving
    along any combination changes no per-edge sum and no vertex sum.
    """
    B = np.zeros((T.edge_count, 3 * T.face_count))
    for e, (a, b) in enumerate(T.edges):
        B[e, a] = 1.0
        B[e, b] = -1.0
    return B


# -- teleportability ---------------------------------------------------------------


@dataclass(frozen=True)
class TeleportReport:
    ok: bool
    violating_set: tuple[int, ...] | None
    lhs: float
    rhs: float
    min_slack: float  # min over face sets of (slack sum - pi |S|); 0 is a tie

    def __bool__(self) -> bool:
        return self.ok


def _psi_edge_of(obj) -> tuple[TopologicalTriangulation, np.ndarray]:
    if isinstance(obj, AngleSystem):
        return obj.complex, edge_psi(obj)
    if isinstance(obj, ConformalClassSpec):
        return obj.complex, obj.psi_edge
    raise TypeError(f"expected AngleSystem or ConformalClassSpec, got {type(obj)}")


def is_teleportable_bruteforce(x, max_faces: int = 20) -> TeleportReport:
    """Check the subset inequalities by full enumeration of face sets.

    For every nonempty set S of faces the slack sum over the edges incident
    to S (each counted once) must exceed pi |S|.  Returns the tightest set
    and the minimal slack; a minimal slack within rounding of zero marks a
    boundary tie (on a complex with zero Euler characteristic the full set
    ties exactly), where strict comparison is not meaningful.  Enumeration
    is 2^F, capped at ``max_faces``.
    """
    T, pe = _psi_edge_of(x)
    F = T.face_count
    if F > max_faces:
        raise TooLarge(f"brute force enumeration limited to F <= {max_faces}, got {F}")
    face_mask = np.zeros(F, dtype=np.int64)
    for t in range(F):
        m = 0
        for s in range(3):
            m |= 1 << int(T.edge_of_flag[3 * t + s])
        face_mask[t] = m
    slack = np.pi - pe  # per edge

    subset_mask = np.zeros(1 << F, dtype=np.int64)
    edge_bits = [1 << e for e in range(T.edge_count)]
    slack_of_mask: dict[int, float] = {}
    worst = (np.inf, None, 0.0, 0.0)  # (min slack, set, lhs, rhs)
    for sub in range(1, 1 << F):
        low = (sub & -sub).bit_length() - 1
        m = int(subset_mask[sub ^ (1 << low)] | face_mask[low])
        subset_mask[sub] = m
        total = slack_of_mask.get(m)
        if total is None:
            total = float(sum(slack[e] for e in range(T.edge_count) if m & edge_bits[e]))
            slack_of_mask[m] = total
        rhs = np.pi * bin(sub).count("1")
        if total - rhs < worst[0]:
            faces = tuple(t for t in range(F) if sub & (1 << t))
            worst = (total - rhs, faces, total, rhs)
    ok = worst[0] > 0.0
    return TeleportReport(
        ok, None if ok else worst[1], worst[2], worst[3], worst[0]
    )


def find_negative_delaunay(
    spec: ConformalClassSpec, floor: float = MARGIN_FLOOR
) -> AngleSystem:
    """Produce a strictly interior negatively curved Delaunay representative.

    Solves the margin-maximizing linear program over partials p:

        max eps  s.t.  p_a + p_b = psi_e              for every edge,
                       corner angles >= eps,
                       face angle sums <= pi - eps.

    Corner angles below pi and vertex sums of 2 pi are implied.  Raises
    ``Infeasible`` with the certificate margin when the maximum is below the
    feasibility floor.
    """
    T = spec.complex
    n = 3 * T.face_count
    pe = spec.psi_edge

    # equality rows: one per edge
    A_eq = np.zeros((T.edge_count, n + 1))
    for e, (a, b) in enumerate(T.edges):
        A_eq[e, a] = 1.0
        A_eq[e, b] = 1.0
    b_eq = pe.copy()

    # inequality rows in `A_ub z <= b_ub` form, z = (p, eps)
    rows = []
    rhs = []
    for t in range(T.face_count):
        base = 3 * t
        for c in range(3):
            row = np.zeros(n + 1)
            row[base + (c + 1) % 3] = -1.0
            row[base + (c + 2) % 3] = -1.0
            row[n] = 1.0  # eps - angle <= 0
            rows.append(row)
            rhs.append(0.0)
        row = np.zeros(n + 1)
        row[base : base + 3] = 2.0  # angle sum = 2 * sum of partials
        row[n] = 1.0
        rows.append(row)
        rhs.append(np.pi)
    A_ub = np.array(rows)
    b_ub = np.array(rhs)

    c = np.zeros(n + 1)
    c[n] = -1.0  # maximize eps
    res = linprog(
        c,
        A_ub=A_ub,
        b_ub=b_ub,
        A_eq=A_eq,
        b_eq=b_eq,
        bounds=[(None, None)] * n + [(None, np.pi)],
        method="highs",
    )
    if not res.success:
        raise Infeasible(f"margin LP failed: {res.message}", margin=None)
    eps = float(res.x[n])
    if eps < floor:
        raise Infeasible(
            f"no interior representative: maximal margin {eps:.3e} below floor {floor:.0e}",
            margin=eps,
        )
    return AngleSystem(T, res.x[:n])
