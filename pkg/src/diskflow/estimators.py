"""Euler characteristic and curvature-defect estimators over random Delaunay
triangulations, plus the direct quadrature of the expected face count.

The per-trial estimator is A*lambda - F/2: the expected vertex count of a
Poisson sample is exactly A*lambda, and on a closed triangulated surface
F - E + V collapses to V - F/2, so in the limit of dense samples the mean
recovers the Euler characteristic.  Each trial draws from its own stream
keyed by (seed, trial, retry); degenerate draws are resampled and counted.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.integrate import dblquad, quad

from .delaunay import delaunay
from .errors import BadDelta, DegenerateSample
from .surfaces import SurfaceModel, sample_poisson


@dataclass(frozen=True)
class TrialRecord:
    trial: int
    n: int
    faces: int
    estimator: float


@dataclass(frozen=True)
class ChiEstimate:
    mean: float
    std_error: float
    records: list[TrialRecord]
    resampled: int
    surface: SurfaceModel
    intensity: float
    seed: object


def _run_trial(surface: SurfaceModel, intensity: float, seed, trial: int,
               max_retries: int = 100):
    """Sample and triangulate one trial, resampling degenerate draws."""
    for retry in range(max_retries):
        sample = sample_poisson(surface, intensity, seed=[seed, trial, retry])
        try:
            return sample, delaunay(sample), retry
        except DegenerateSample:
            continue
    raise DegenerateSample(
        f"trial {trial} failed {max_retries} consecutive resamples"
    )


def _chi_trial_worker(args) -> tuple[int, int, int, int]:
    surface, intensity, seed, trial = args
    sample, dc, retries = _run_trial(surface, intensity, seed, trial)
    return trial, sample.count, dc.face_count, retries


def _map_trials(worker, args, jobs: int):
    """Run trials possibly in parallel; per-trial streams make order moot."""
    if jobs <= 1:
        return [worker(a) for a in args]
    from concurrent.futures import ProcessPoolExecutor

    with ProcessPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(worker, args))


def chi_estimator(
    surface: SurfaceModel, intensity: float, trials: int, seed: int, jobs: int = 1
) -> ChiEstimate:
    """Monte Carlo estimate of the Euler characteristic, A*lambda - F/2."""
    area = surface.area
    results = _map_trials(
        _chi_trial_worker,
        [(surface, intensity, seed, t) for t in range(trials)],
        jobs,
    )
    records = []
    resampled = 0
    for trial, n, faces, retries in sorted(results):
        resampled += retries
        est = area * intensity - faces / 2.0
        records.append(TrialRecord(trial, n, faces, est))
    vals = np.array([r.estimator for r in records])
    se = float(vals.std(ddof=1) / np.sqrt(trials)) if trials > 1 else np.inf
    return ChiEstimate(
        mean=float(vals.mean()),
        std_error=se,
        records=records,
        resampled=resampled,
        surface=surface,
        intensity=intensity,
        seed=seed,
    )


# -- local curvature defect ------------------------------------------------------


@dataclass(frozen=True)
class CapRegion:
    """Spherical cap around the north pole, named by its area."""

    area: float

    def contains(self, centers: np.ndarray) -> np.ndarray:
        cos_r = 1.0 - self.area / (2.0 * np.pi)
        return centers[:, 2] >= cos_r


@dataclass(frozen=True)
class RectRegion:
    """Axis-aligned sub-rectangle of the torus fundamental domain."""

    x0: float
    y0: float
    x1: float
    y1: float

    @property
    def area(self) -> float:
        return (self.x1 - self.x0) * (self.y1 - self.y0)

    def contains(self, centers: np.ndarray) -> np.ndarray:
        return (
            (centers[:, 0] >= self.x0)
            & (centers[:, 0] < self.x1)
            & (centers[:, 1] >= self.y0)
            & (centers[:, 1] < self.y1)
        )


@dataclass(frozen=True)
class DefectEstimate:
    estimate: float
    std_error: float
    counts: np.ndarray
    region_area: float
    trials: int


def _defect_trial_worker(args) -> tuple[int, int]:
    surface, intensity, seed, trial, region = args
    _, dc, _ = _run_trial(surface, intensity, seed, trial)
    return trial, int(region.contains(dc.centers).sum())


def face_defect_in_region(
    surface: SurfaceModel,
    intensity: float,
    trials: int,
    region,
    seed: int,
    jobs: int = 1,
) -> DefectEstimate:
    """Estimate the curvature integral over a region from face counts.

    Faces are attributed to the region by circumcenter.  The estimate
    2 lambda area(region) - mean(count) converges to (1/pi) times the
    integral of the Gauss curvature over the region.
    """
    results = _map_trials(
        _defect_trial_worker,
        [(surface, intensity, seed, t, region) for t in range(trials)],
        jobs,
    )
    counts = np.array([c for _, c in sorted(results)], dtype=float)
    est = 2.0 * intensity * region.area - counts.mean()
    se = float(counts.std(ddof=1) / np.sqrt(trials)) if trials > 1 else np.inf
    return DefectEstimate(
        estimate=float(est),
        std_error=se,
        counts=counts,
        region_area=float(region.area),
        trials=trials,
    )


# -- direct quadrature of the expected face count -----------------------------------


def _inscribed_triangle_area(t2: float, t3: float) -> float:
    # area of the triangle with vertices at angles (0, t2, t3) on the unit circle
    return 0.5 * abs(np.sin(t2) + np.sin(t3 - t2) - np.sin(t3))


@lru_cache(maxsize=1)
def triangle_angle_integral() -> float:
    """Integral of the inscribed-triangle area over all three vertex angles.

    Computed once by quadrature; equals (2 pi)^3 times the mean area of a
    triangle inscribed by three uniform points on the unit circle, 3/(2 pi).
    """
    val, _ = dblquad(
        _inscribed_triangle_area, 0.0, 2.0 * np.pi, 0.0, 2.0 * np.pi,
        epsabs=1e-11, epsrel=1e-11,
    )
    return 2.0 * np.pi * val


def inscribed_triangle_mean_area() -> float:
    """Mean area of the triangle spanned by 3 uniform points on the unit circle."""
    return triangle_angle_integral() / (2.0 * np.pi) ** 3


def expected_faces_quadrature(
    surface: SurfaceModel, intensity: float, delta: float
) -> float:
    """Expected number of Delaunay faces with circumradius below delta.

    Integrates the face-creation density over (cap radius, three boundary
    angles, center): empty-cap probability e^(-lambda a(r)) times the volume
    factor 2 (sin r)^3 nu per unit center area, where nu is the inscribed
    Euclidean triangle area and sin r the circle's direction-speed; the
    factor 2 is the Jacobian of the (center, radius, angles) chart.  Ordered
    triples are compensated by 1/6.
    """
    if surface.kind != "sphere":
        raise BadDelta("quadrature route is defined on the unit sphere")
    if not (0.0 < delta <= surface.delta_max):
        raise BadDelta(
            f"delta {delta!r} outside (0, {surface.delta_max!r}]"
        )
    lam = float(intensity)
    N = triangle_angle_integral()

    def integrand(r):
        return np.exp(-lam * 2.0 * np.pi * (1.0 - np.cos(r))) * np.sin(r) ** 3

    val, _ = quad(integrand, 0.0, delta, epsabs=1e-13, epsrel=1e-13, limit=200)
    return (lam**3 / 6.0) * surface.area * 2.0 * N * val
