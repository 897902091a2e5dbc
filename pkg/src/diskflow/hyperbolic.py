"""Hyperbolic triangle solver and the prism-volume objective.

A triple of angles with sum below pi determines a hyperbolic triangle; the
per-side quantity log((cosh l - 1)/2) drives everything here.  It is never
formed by subtracting 1 from a cosh: with s the half angle sum and partials
psi_i = s - A_i,

    (cosh l_i - 1)/2 = cos(s) cos(psi_i) / (sin A_j sin A_k),

which is exact and stable arbitrarily close to the degenerate boundary.

The volume of the ideal prism over a triangle (the convex hull of the
triangle and the three complete geodesics through its vertices perpendicular
to its plane) is, as a function of the three partial angles psi_i = s - A_i,
the potential of the exact one-form

    dV = sum_i log((cosh l_i - 1)/2) d psi_i,

so the volume grows in a partial angle exactly while the opposite side is
longer than arccosh(3).  In closed form

    V = L(pi/2 - s) + sum_i L(pi/2 - psi_i) + sum_i L(A_i)

with L the Lobachevsky function; the test suite pins this against two
independent routes (the straight-segment path integral of the one-form, and
an ideal-tetrahedron decomposition of the prism).  The exported volume is
anchored to 0 at the equilateral pi/6 triple; only differences and
derivatives are meaningful to callers.  V is strictly concave along the
directions that preserve every per-edge partial-angle sum, which is what
makes maximizing the total volume over a conformal class well posed.
"""

from __future__ import annotations

import numpy as np
from scipy.integrate import quad
from scipy.special import zeta

from .angles import AngleSystem, all_corner_angles, class_basis
from .errors import DegenerateAngle, NotHyperbolic, NotInDomain

ANGLE_GUARD = 1e-9  # reject angles or defects closer than this to the boundary

_SERIES_ZETA = zeta(2 * np.arange(1, 61))
_SERIES_M = np.arange(1, 61)


def lobachevsky(theta):
    """The Lobachevsky function, minus the integral of log|2 sin| from 0.

    Odd and pi-periodic.  Evaluated through the power series
    t - t log(2t) + sum_m zeta(2m) t^(2m+1) / (m (2m+1) pi^(2m)) after range
    reduction to [0, pi/2]; the series remainder is below 1e-15 there.
    Accepts scalars or arrays.
    """
    t = np.asarray(theta, dtype=float)
    scalar = t.ndim == 0
    t = np.atleast_1d(t).copy()
    # reduce mod pi into (-pi/2, pi/2], then use oddness
    t -= np.pi * np.round(t / np.pi)
    sign = np.sign(t)
    t = np.abs(t)
    out = np.zeros_like(t)
    nz = t > 0
    tn = t[nz]
    powers = tn[:, None] ** (2 * _SERIES_M + 1)
    series = (powers * (_SERIES_ZETA / (_SERIES_M * (2 * _SERIES_M + 1)))) / (
        np.pi ** (2 * _SERIES_M)
    )
    out[nz] = tn - tn * np.log(2 * tn) + series.sum(axis=1)
    out *= sign
    return float(out[0]) if scalar else out


def _validate_triple(A: float, B: float, C: float) -> None:
    for name, val in (("A", A), ("B", B), ("C", C)):
        if not (ANGLE_GUARD < val < np.pi - ANGLE_GUARD):
            raise DegenerateAngle(f"angle {name}={val!r} outside ({ANGLE_GUARD}, pi)")
    if np.pi - (A + B + C) < ANGLE_GUARD:
        raise NotHyperbolic(f"angle sum {A + B + C!r} is not below pi")


def edge_lengths(A: float, B: float, C: float) -> tuple[float, float, float]:
    """Side lengths (a, b, c) opposite (A, B, C) by the dual law of cosines."""
    _validate_triple(A, B, C)
    angs = np.array([A, B, C])
    cos, sin = np.cos(angs), np.sin(angs)
    out = []
    for i in range(3):
        j, k = (i + 1) % 3, (i + 2) % 3
        out.append(float(np.arccosh((cos[i] + cos[j] * cos[k]) / (sin[j] * sin[k]))))
    return tuple(out)


def angles_from_lengths(a: float, b: float, c: float) -> tuple[float, float, float]:
    """Angles opposite (a, b, c) by the hyperbolic law of cosines."""
    ls = np.array([a, b, c])
    ch, sh = np.cosh(ls), np.sinh(ls)
    out = []
    for i in range(3):
        j, k = (i + 1) % 3, (i + 2) % 3
        out.append(float(np.arccos((ch[j] * ch[k] - ch[i]) / (sh[j] * sh[k]))))
    return tuple(out)


def _partials(angles: np.ndarray) -> np.ndarray:
    return angles.sum(axis=-1, keepdims=True) / 2.0 - angles


def log_half_cosh_minus_one(angles: np.ndarray) -> np.ndarray:
    """log((cosh l_i - 1)/2) per side, from the stable product identity.

    ``angles`` is (..., 3); side i is opposite angle i.
    """
    angles = np.asarray(angles, dtype=float)
    s = angles.sum(axis=-1, keepdims=True) / 2.0
    psi = s - angles
    logsin = np.log(np.sin(angles))
    # for side i drop log sin A_i from the total of the three
    return (
        np.log(np.cos(s))
        + np.log(np.cos(psi))
        - (logsin.sum(axis=-1, keepdims=True) - logsin)
    )


_ANCHOR = None


def _anchor() -> float:
    global _ANCHOR
    if _ANCHOR is None:
        _ANCHOR = (
            lobachevsky(np.pi / 4)
            + 3 * lobachevsky(5 * np.pi / 12)
            + 3 * lobachevsky(np.pi / 6)
        )
    return _ANCHOR


def prism_volume(A: float, B: float, C: float) -> float:
    """Volume of the triangle's ideal perpendicular prism, anchored.

    The unanchored closed form L(pi/2 - s) + sum_i L(pi/2 - psi_i)
    + sum_i L(A_i) is the actual hyperbolic volume; the exported value
    subtracts its value at the equilateral pi/6 triple (2.5157576984766887)
    so that only differences and derivatives carry meaning.
    """
    _validate_triple(A, B, C)
    angs = np.array([A, B, C])
    s = angs.sum() / 2.0
    psi = s - angs
    return float(
        lobachevsky(np.pi / 2 - s)
        + lobachevsky(np.pi / 2 - psi).sum()
        + lobachevsky(angs).sum()
        - _anchor()
    )


_REF_ANGLES = np.array([np.pi / 6] * 3)
_REF_PARTIALS = _partials(_REF_ANGLES)


def prism_volume_path(
    A: float,
    B: float,
    C: float,
    via: tuple[float, float, float] | None = None,
    epsabs: float = 1e-10,
) -> float:
    """Prism volume by integrating the exact one-form from the anchor triple.

    Integration runs along straight segments in partial-angle coordinates;
    ``via`` inserts an intermediate angle triple, giving a second route for
    path-independence checks.  Segments are subdivided once near the domain
    boundary where the integrand's logarithm steepens.
    """
    _validate_triple(A, B, C)
    waypoints = [_REF_PARTIALS]
    if via is not None:
        _validate_triple(*via)
        waypoints.append(_partials(np.asarray(via, dtype=float)))
    waypoints.append(_partials(np.array([A, B, C])))

    total = 0.0
    for start, stop in zip(waypoints[:-1], waypoints[1:]):
        d = stop - start

        def integrand(t):
            p = start + t * d
            angles = p.sum() - p
            return float(np.dot(log_half_cosh_minus_one(angles), d))

        # defect at the endpoints decides whether to split the segment
        defects = [np.pi - 2 * q.sum() for q in (start, stop)]
        pieces = [(0.0, 1.0)] if min(defects) > 1e-3 else [(0.0, 0.5), (0.5, 1.0)]
        for lo, hi in pieces:
            val, _ = quad(integrand, lo, hi, epsabs=epsabs, epsrel=0.0, limit=200)
            total += val
    return total


def prism_gradient(A: float, B: float, C: float) -> np.ndarray:
    """Derivative of the prism volume in the three partial angles."""
    _validate_triple(A, B, C)
    return log_half_cosh_minus_one(np.array([A, B, C]))


# -- the objective over an angle system ---------------------------------------------


def _face_angles_checked(x: AngleSystem) -> np.ndarray:
    A = all_corner_angles(x)
    bad_angle = ~((A > ANGLE_GUARD) & (A < np.pi - ANGLE_GUARD))
    bad_sum = np.pi - A.sum(axis=1) < ANGLE_GUARD
    if bad_angle.any() or bad_sum.any():
        t = int(np.argmax(bad_angle.any(axis=1) | bad_sum))
        raise NotInDomain(
            f"face {t} is not a valid hyperbolic triangle: angles {A[t].tolist()}"
        )
    return A


def objective_H(x: AngleSystem) -> float:
    """Total prism volume over all faces."""
    A = _face_angles_checked(x)
    s = A.sum(axis=1) / 2.0
    psi = s[:, None] - A
    vals = (
        lobachevsky(np.pi / 2 - s)
        + lobachevsky(np.pi / 2 - psi).sum(axis=1)
        + lobachevsky(A).sum(axis=1)
        - _anchor()
    )
    return float(vals.sum())


def flag_log_terms(x: AngleSystem) -> np.ndarray:
    """log((cosh l - 1)/2) per flag, sides in flag order."""
    A = _face_angles_checked(x)
    return log_half_cosh_minus_one(A).reshape(-1)


def flag_edge_lengths(x: AngleSystem) -> np.ndarray:
    """Hyperbolic length of each side, per flag."""
    logs = flag_log_terms(x)
    return np.arccosh(2.0 * np.exp(logs) + 1.0)


def grad_H(x: AngleSystem) -> np.ndarray:
    """Gradient of the objective in the 3F partial coordinates."""
    return flag_log_terms(x)


def class_grad(x: AngleSystem) -> np.ndarray:
    """Gradient restricted to the conformal class, one entry per edge.

    Entry e is the log term of the lower flag minus that of its mate,
    matching the +/- orientation of ``class_basis``; it vanishes exactly
    when the two incident faces assign the edge the same length.
    """
    logs = flag_log_terms(x)
    flags = np.asarray(x.complex.edges, dtype=np.int64)
    return logs[flags[:, 0]] - logs[flags[:, 1]]


def face_hessian(angles: np.ndarray) -> np.ndarray:
    """3x3 Hessian of one face's prism volume in its partial angles.

    Off-diagonal (i, j): -(tan s + cot A_k); the diagonal adds -tan psi_i
    and the second cotangent.  Symmetric by construction.
    """
    angles = np.asarray(angles, dtype=float)
    s = angles.sum() / 2.0
    psi = s - angles
    ts = np.tan(s)
    cotA = 1.0 / np.tan(angles)
    H = np.full((3, 3), -ts)
    for i in range(3):
        j, k = (i + 1) % 3, (i + 2) % 3
        H[i, i] -= np.tan(psi[i]) + cotA[j] + cotA[k]
        H[i, j] -= cotA[k]
        H[j, i] = H[i, j]
    return H


def full_hessian(x: AngleSystem) -> np.ndarray:
    """Block-diagonal (3F, 3F) Hessian of the objective in partials."""
    A = _face_angles_checked(x)
    n = 3 * x.complex.face_count
    H = np.zeros((n, n))
    for t in range(x.complex.face_count):
        H[3 * t : 3 * t + 3, 3 * t : 3 * t + 3] = face_hessian(A[t])
    return H


def class_hessian(x: AngleSystem) -> np.ndarray:
    """(E, E) Hessian of the objective along the conformal class."""
    B = class_basis(x.complex)
    return B @ full_hessian(x) @ B.T


def class_hessian_fd(x: AngleSystem, step: float = 1e-6) -> np.ndarray:
    """Finite-difference fallback for the class Hessian (central differences)."""
    B = class_basis(x.complex)
    E = x.complex.edge_count
    H = np.empty((E, E))
    for e in range(E):
        plus = AngleSystem(x.complex, x.psi + step * B[e])
        minus = AngleSystem(x.complex, x.psi - step * B[e])
        H[e] = (class_grad(plus) - class_grad(minus)) / (2 * step)
    return 0.5 * (H + H.T)
