"""Geodesic Delaunay triangulations by the empty-disk criterion.

Sphere: the convex hull of points on the unit sphere is exactly the Delaunay
triangulation; each hull facet's outward normal is the center of its empty
cap.  Torus: the sample is tiled 3x3, a planar Delaunay triangulation of the
tiling is computed, and the triangles whose circumcenter falls in the central
fundamental domain are kept, each periodic triangle having exactly one such
representative while every circumradius stays below min(a, b)/2.

Construction always cross-checks itself: the Euler count must match the
surface and every kept circumdisk must be verifiably empty and unambiguous
at tolerance 1e-10; violations raise ``DegenerateSample`` so that Monte
Carlo drivers can resample (the probability of needing to decays faster than
any power of the intensity).
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations

import numpy as np
from scipy.spatial import ConvexHull, Delaunay as PlanarDelaunay

from .errors import DegenerateSample, DegenerateTriple
from .surfaces import PointSample, _planar_circumcenter, circumdisk

GENERIC_TOL = 1e-10


@dataclass(frozen=True)
class DelaunayComplex:
    """Geodesic Delaunay triangulation with per-face circumdisk data."""

    sample: PointSample
    faces: np.ndarray        # (F, 3) indices into the sample
    face_points: np.ndarray  # (F, 3, d) coordinates as used geometrically
    centers: np.ndarray      # (F, d) circumdisk centers, in the fundamental domain
    radii: np.ndarray        # (F,) geodesic circumradii
    disk_areas: np.ndarray   # (F,)

    @property
    def face_count(self) -> int:
        return int(self.faces.shape[0])

    @property
    def vertex_count(self) -> int:
        return self.sample.count

    @property
    def edge_count(self) -> int:
        return 3 * self.face_count // 2

    @property
    def chi(self) -> int:
        return self.vertex_count - self.edge_count + self.face_count


def delaunay(sample: PointSample, tol: float = GENERIC_TOL) -> DelaunayComplex:
    """Build the Delaunay triangulation of a sample (>= 4 points)."""
    if sample.count < 4:
        raise DegenerateSample(f"need at least 4 points, got {sample.count}")
    if sample.surface.kind == "sphere":
        dc = _sphere_delaunay(sample)
    else:
        dc = _torus_delaunay(sample)
    _check_generic(dc, tol)
    return dc


def _sphere_delaunay(sample: PointSample) -> DelaunayComplex:
    pts = sample.points
    n = pts.shape[0]
    try:
        hull = ConvexHull(pts)
    except Exception as exc:  # qhull errors on coincident/degenerate input
        raise DegenerateSample(f"convex hull failed: {exc}") from exc
    if hull.vertices.size != n:
        raise DegenerateSample("not all points are hull vertices")
    faces = hull.simplices
    if faces.shape[0] != 2 * n - 4:
        raise DegenerateSample(
            f"hull has {faces.shape[0]} facets, expected {2 * n - 4}"
        )
    normals = hull.equations[:, :3]
    normals = normals / np.linalg.norm(normals, axis=1, keepdims=True)
    cosr = np.clip((normals * pts[faces[:, 0]]).sum(axis=1), -1.0, 1.0)
    radii = np.arccos(cosr)
    return DelaunayComplex(
        sample=sample,
        faces=faces,
        face_points=pts[faces],
        centers=normals,
        radii=radii,
        disk_areas=2.0 * np.pi * (1.0 - cosr),
    )


def _planar_circumcenters(coords: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Vectorized circumcenters/radii for (S, 3, 2) triangle coordinates."""
    a, b, c = coords[:, 0], coords[:, 1], coords[:, 2]
    d = 2.0 * ((b[:, 0] - a[:, 0]) * (c[:, 1] - a[:, 1])
               - (b[:, 1] - a[:, 1]) * (c[:, 0] - a[:, 0]))
    b2 = ((b - a) ** 2).sum(axis=1)
    c2 = ((c - a) ** 2).sum(axis=1)
    with np.errstate(divide="ignore", invalid="ignore"):
        ux = ((c[:, 1] - a[:, 1]) * b2 - (b[:, 1] - a[:, 1]) * c2) / d
        uy = ((b[:, 0] - a[:, 0]) * c2 - (c[:, 0] - a[:, 0]) * b2) / d
    centers = a + np.column_stack([ux, uy])
    radii = np.linalg.norm(centers - a, axis=1)
    return centers, radii


def _torus_delaunay(sample: PointSample) -> DelaunayComplex:
    surf = sample.surface
    pts = sample.points
    n = pts.shape[0]
    a, b = surf.width, surf.height
    offsets = [
        np.array([dx, dy])
        for dx in (-a, 0.0, a)
        for dy in (-b, 0.0, b)
    ]
    big = np.vstack([pts + off for off in offsets])
    try:
        tri = PlanarDelaunay(big)
    except Exception as exc:
        raise DegenerateSample(f"planar triangulation failed: {exc}") from exc

    coords = big[tri.simplices]
    centers, radii = _planar_circumcenters(coords)
    keep = (
        np.isfinite(radii)
        & (centers[:, 0] >= 0.0) & (centers[:, 0] < a)
        & (centers[:, 1] >= 0.0) & (centers[:, 1] < b)
    )
    if np.any(radii[keep] >= min(a, b) / 2.0):
        raise DegenerateSample(
            "a circumradius reaches min(a,b)/2; the 3x3 tiling is not faithful"
        )
    faces = tri.simplices[keep] % n
    if faces.shape[0] != 2 * n:
        raise DegenerateSample(f"kept {faces.shape[0]} faces, expected {2 * n}")
    return DelaunayComplex(
        sample=sample,
        faces=faces,
        face_points=coords[keep],
        centers=centers[keep],
        radii=radii[keep],
        disk_areas=np.pi * radii[keep] ** 2,
    )


def _emptiness_flags(dc: DelaunayComplex, tol: float) -> tuple[np.ndarray, np.ndarray]:
    """(F, n) boolean masks: strictly inside a circumdisk, and on its boundary.

    On the sphere the comparison runs on dot products (cos is monotone on
    [0, pi]) so no inverse trig touches the F x n matrix.
    """
    surf = dc.sample.surface
    pts = dc.sample.points
    if surf.kind == "sphere":
        dots = dc.centers @ pts.T
        hi = np.cos(np.maximum(dc.radii - tol, 0.0))[:, None]
        lo = np.cos(np.minimum(dc.radii + tol, np.pi))[:, None]
        inside = dots > hi
        on_circle = (dots <= hi) & (dots >= lo)
    else:
        d = np.abs(dc.centers[:, None, :] - pts[None, :, :])
        d[..., 0] = np.minimum(d[..., 0], surf.width - d[..., 0])
        d[..., 1] = np.minimum(d[..., 1], surf.height - d[..., 1])
        dist = np.sqrt((d**2).sum(axis=-1))
        inside = dist < dc.radii[:, None] - tol
        on_circle = np.abs(dist - dc.radii[:, None]) <= tol
    return inside, on_circle


def verify_empty_disks(dc: DelaunayComplex, tol: float = GENERIC_TOL) -> bool:
    """True when no sample point lies strictly inside any face circumdisk."""
    inside, _ = _emptiness_flags(dc, tol)
    # the face's own vertices sit on the boundary, never strictly inside
    return not bool(inside.any())


def _check_generic(dc: DelaunayComplex, tol: float) -> None:
    inside, on_circle = _emptiness_flags(dc, tol)
    member = np.zeros_like(inside, dtype=bool)
    rows = np.repeat(np.arange(dc.face_count), 3)
    member[rows, dc.faces.reshape(-1)] = True
    if (inside & ~member).any():
        raise DegenerateSample("a sample point lies inside a circumdisk")
    if (on_circle & ~member).any():
        raise DegenerateSample("four points are cocircular within tolerance")


@dataclass(frozen=True)
class DensityReport:
    ok: bool
    covering_ok: bool
    generic_ok: bool
    max_circumradius: float
    delta: float
    detail: str = ""

    def __bool__(self) -> bool:
        return self.ok


def _exhaustive_cocircular(sample: PointSample, delta: float, tol: float) -> bool:
    """True when some 4 points lie on a common circle of radius < delta.

    Quartic in the sample size, so only used below a small size cap.
    """
    surf = sample.surface
    pts = sample.points
    n = pts.shape[0]
    for i, j, k in combinations(range(n), 3):
        try:
            cd = circumdisk(surf, pts[[i, j, k]])
        except DegenerateTriple:
            continue
        if cd.radius >= delta:
            continue
        others = np.delete(np.arange(n), [i, j, k])
        if surf.kind == "sphere":
            d = np.arccos(np.clip(pts[others] @ cd.center, -1.0, 1.0))
        else:
            diff = np.abs(pts[others] - cd.center)
            diff[:, 0] = np.minimum(diff[:, 0], surf.width - diff[:, 0])
            diff[:, 1] = np.minimum(diff[:, 1], surf.height - diff[:, 1])
            d = np.sqrt((diff**2).sum(axis=1))
        if np.any(np.abs(d - cd.radius) <= tol):
            return True
    return False


def is_generically_delta_dense(
    sample: PointSample,
    delta: float,
    tol: float = GENERIC_TOL,
    exhaustive_limit: int = 60,
) -> DensityReport:
    """Covering and genericity check at decision radius ``delta``.

    Covering holds when the largest empty disk (the largest Delaunay
    circumradius) stays below delta.  Genericity means no four points are
    cocircular within tolerance at radius below delta: samples up to
    ``exhaustive_limit`` points are checked over every triple; larger ones
    through the empty circumdisks realized by the triangulation (a Poisson
    sample violates either check with probability zero).
    """
    if sample.count <= exhaustive_limit and sample.count >= 4:
        if _exhaustive_cocircular(sample, delta, tol):
            return DensityReport(
                ok=False,
                covering_ok=False,
                generic_ok=False,
                max_circumradius=np.inf,
                delta=delta,
                detail="four points lie on a common circle of radius below delta",
            )
    if sample.count < 4:
        return DensityReport(
            ok=False,
            covering_ok=False,
            generic_ok=True,
            max_circumradius=np.inf,
            delta=delta,
            detail="too few points to triangulate, so some delta ball is empty",
        )
    try:
        dc = delaunay(sample, tol=tol)
    except DegenerateSample as exc:
        return DensityReport(
            ok=False,
            covering_ok=False,
            generic_ok=False,
            max_circumradius=np.inf,
            delta=delta,
            detail=str(exc),
        )
    rmax = float(dc.radii.max())
    covering = rmax < delta
    return DensityReport(
        ok=covering,
        covering_ok=covering,
        generic_ok=True,
        max_circumradius=rmax,
        delta=delta,
    )
