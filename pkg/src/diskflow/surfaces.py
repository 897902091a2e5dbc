"""Constant-curvature ambient surfaces and Poisson sampling.

Two surfaces are supported: the unit sphere (points as unit 3-vectors) and a
flat rectangular torus (points in the fundamental domain [0,a) x [0,b)).
Both have exactly computable geodesic circumdisks, which is what the empty
disk constructions downstream rely on.

Randomness is counter based: every sample is drawn from a Philox generator
keyed by a seed sequence, so a (seed, trial) pair names its stream
independently of execution order.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DegenerateTriple


@dataclass(frozen=True)
class SurfaceModel:
    """Unit sphere or flat torus of width a and height b."""

    kind: str                 # "sphere" | "torus"
    width: float = 1.0        # torus only
    height: float = 1.0       # torus only

    def __post_init__(self):
        if self.kind not in ("sphere", "torus"):
            raise ValueError(f"unknown surface kind {self.kind!r}")
        if self.kind == "torus" and (self.width <= 0 or self.height <= 0):
            raise ValueError("torus dimensions must be positive")

    @classmethod
    def sphere(cls) -> "SurfaceModel":
        return cls("sphere")

    @classmethod
    def torus(cls, width: float = 1.0, height: float = 1.0) -> "SurfaceModel":
        return cls("torus", float(width), float(height))

    @property
    def area(self) -> float:
        if self.kind == "sphere":
            return 4.0 * np.pi
        return self.width * self.height

    @property
    def gauss_curvature(self) -> float:
        return 1.0 if self.kind == "sphere" else 0.0

    @property
    def injectivity_radius(self) -> float:
        if self.kind == "sphere":
            return np.pi
        return min(self.width, self.height) / 2.0

    @property
    def convexity_radius(self) -> float:
        # strong convexity: half the injectivity radius on the sphere would be
        # pi/2; on the flat torus geodesic balls are convex below min(a,b)/4
        if self.kind == "sphere":
            return np.pi / 2.0
        return min(self.width, self.height) / 4.0

    @property
    def delta_max(self) -> float:
        """Largest admissible decision radius, min(i/6, convexity radius)."""
        return min(self.injectivity_radius / 6.0, self.convexity_radius)

    def disk_area(self, r) -> np.ndarray | float:
        """Area of a geodesic disk of radius r."""
        if self.kind == "sphere":
            return 2.0 * np.pi * (1.0 - np.cos(r))
        return np.pi * np.asarray(r) ** 2


@dataclass(frozen=True)
class PointSample:
    """A realization of the Poisson process on a surface."""

    surface: SurfaceModel
    points: np.ndarray      # (n, 3) unit vectors or (n, 2) fundamental-domain coords
    intensity: float
    seed: object

    @property
    def count(self) -> int:
        return self.points.shape[0]


def _generator(seed) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(np.random.SeedSequence(seed)))


def sample_poisson(surface: SurfaceModel, intensity: float, seed) -> PointSample:
    """Poisson(intensity * area) many points, i.i.d. uniform for the area.

    ``seed`` may be an int or a sequence of ints; equal seeds reproduce the
    sample exactly.
    """
    if intensity <= 0:
        raise ValueError("intensity must be positive")
    rng = _generator(seed)
    n = int(rng.poisson(intensity * surface.area))
    if surface.kind == "sphere":
        z = rng.uniform(-1.0, 1.0, size=n)
        phi = rng.uniform(0.0, 2.0 * np.pi, size=n)
        s = np.sqrt(np.maximum(0.0, 1.0 - z * z))
        pts = np.column_stack([s * np.cos(phi), s * np.sin(phi), z])
    else:
        pts = rng.uniform([0.0, 0.0], [surface.width, surface.height], size=(n, 2))
    return PointSample(surface, pts, float(intensity), seed)


def sample_fixed_count(surface: SurfaceModel, n: int, seed) -> PointSample:
    """Exactly n i.i.d. area-uniform points.

    Hook for the fixed-count sampling variant: the result plugs into the
    same triangulation and estimator machinery as the Poisson sample (the
    recorded intensity is the matching n / area).
    """
    rng = _generator(seed)
    if surface.kind == "sphere":
        z = rng.uniform(-1.0, 1.0, size=n)
        phi = rng.uniform(0.0, 2.0 * np.pi, size=n)
        s = np.sqrt(np.maximum(0.0, 1.0 - z * z))
        pts = np.column_stack([s * np.cos(phi), s * np.sin(phi), z])
    else:
        pts = rng.uniform([0.0, 0.0], [surface.width, surface.height], size=(n, 2))
    return PointSample(surface, pts, n / surface.area, seed)


def geodesic_distance(surface: SurfaceModel, p: np.ndarray, q: np.ndarray) -> np.ndarray:
    """Pairwise-broadcast geodesic distance between points."""
    p = np.asarray(p, dtype=float)
    q = np.asarray(q, dtype=float)
    if surface.kind == "sphere":
        dots = np.clip((p * q).sum(axis=-1), -1.0, 1.0)
        return np.arccos(dots)
    d = np.abs(p - q)
    d[..., 0] = np.minimum(d[..., 0], surface.width - d[..., 0])
    d[..., 1] = np.minimum(d[..., 1], surface.height - d[..., 1])
    return np.sqrt((d**2).sum(axis=-1))


@dataclass(frozen=True)
class Circumdisk:
    center: np.ndarray
    radius: float
    area: float


def _planar_circumcenter(tri: np.ndarray) -> tuple[np.ndarray, float]:
    """Circumcenter and radius of a planar triangle (rows of ``tri``)."""
    a, b, c = tri
    d = 2.0 * ((b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0]))
    if abs(d) < 1e-14 * max(1.0, np.abs(tri).max() ** 2):
        raise DegenerateTriple("collinear triple has no circumdisk")
    b2 = ((b - a) ** 2).sum()
    c2 = ((c - a) ** 2).sum()
    ux = (c[1] - a[1]) * b2 - (b[1] - a[1]) * c2
    uy = (b[0] - a[0]) * c2 - (c[0] - a[0]) * b2
    center = a + np.array([ux, uy]) / d
    return center, float(np.linalg.norm(center - a))


def circumdisk(surface: SurfaceModel, triple: np.ndarray) -> Circumdisk:
    """Geodesic circumdisk of three points.

    On the sphere the two caps bounded by the circumscribed circle are both
    candidates; the smaller one is returned.  On the torus the triple is
    unwrapped to the nearest representatives of its first point, which is
    faithful while the circumradius stays below the injectivity radius.
    """
    tri = np.asarray(triple, dtype=float)
    if tri.shape[0] != 3:
        raise DegenerateTriple(f"need exactly 3 points, got {tri.shape[0]}")
    if surface.kind == "sphere":
        n = np.cross(tri[1] - tri[0], tri[2] - tri[0])
        norm = np.linalg.norm(n)
        if norm < 1e-14:
            raise DegenerateTriple("degenerate spherical triple")
        c = n / norm
        if float(c @ tri[0]) < 0.0:
            c = -c
        r = float(np.arccos(np.clip(c @ tri[0], -1.0, 1.0)))
        return Circumdisk(c, r, float(surface.disk_area(r)))
    # torus: unwrap relative to the first point
    tri = tri.copy()
    dims = np.array([surface.width, surface.height])
    for i in (1, 2):
        delta = tri[i] - tri[0]
        tri[i] -= dims * np.round(delta / dims)
    center, r = _planar_circumcenter(tri)
    center = np.mod(center, dims)
    return Circumdisk(center, r, float(np.pi * r * r))
