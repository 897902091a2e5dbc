"""Concave maximization of the prism-volume objective over a conformal class.

The optimization variable is the per-edge class coordinate: iterates move only
along the class basis, so every per-edge partial-angle sum and every vertex
sum is preserved to floating accumulation.  Damped Newton steps (dense solve,
gradient-ascent fallback) are backtracked until the iterate stays strictly
inside the open polytope of valid hyperbolic faces and the objective does not
decrease.  At the maximizer the two faces meeting along each edge assign it
the same hyperbolic length, so the triangles assemble into an actual
hyperbolic surface whose circumscribing disks form the empty pattern.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .angles import (
    AngleSystem,
    ConformalClassSpec,
    all_corner_angles,
    class_basis,
    edge_psi,
    find_negative_delaunay,
)
from .complexes import TopologicalTriangulation
from .errors import ComplexMismatch, LengthMismatch, NoConvergence
from .hyperbolic import (
    class_grad,
    class_hessian,
    flag_edge_lengths,
    objective_H,
)


@dataclass(frozen=True)
class UniformizeOptions:
    tol: float = 1e-10          # sup-norm gradient target
    max_iter: int = 200
    interior_margin: float = 1e-9  # backtracking keeps angles this far inside
    armijo: float = 1e-4


@dataclass(frozen=True)
class TraceRecord:
    iteration: int
    objective: float
    grad_inf: float
    step: float
    worst_length_mismatch: float


@dataclass(frozen=True)
class HyperbolicStructure:
    """Uniform hyperbolic structure with its empty disk pattern."""

    complex: TopologicalTriangulation
    edge_lengths: np.ndarray          # per edge, the two sides averaged
    face_angles: np.ndarray           # (F, 3), corner i opposite side i
    circumradii: np.ndarray           # per face
    intersection_angles: np.ndarray   # per edge, pi - psi^e
    psi_edge: np.ndarray              # per edge partial-angle sums

    @property
    def total_area(self) -> float:
        return float((np.pi - self.face_angles.sum(axis=1)).sum())


def _interior_margin(x: AngleSystem) -> float:
    """Distance of the corner angles and face defects from the boundary."""
    A = all_corner_angles(x)
    return float(min(A.min(), (np.pi - A.sum(axis=1)).min()))


def _length_mismatch(x: AngleSystem) -> float:
    lengths = flag_edge_lengths(x)
    flags = np.asarray(x.complex.edges, dtype=np.int64)
    return float(np.max(np.abs(lengths[flags[:, 0]] - lengths[flags[:, 1]])))


def uniformize(
    spec: ConformalClassSpec,
    opts: UniformizeOptions | None = None,
    start: AngleSystem | None = None,
) -> tuple[AngleSystem, HyperbolicStructure, list[TraceRecord]]:
    """Find the uniform angle system in the class of ``spec``.

    The start point defaults to the margin-maximizing LP representative
    (raising ``Infeasible`` when the class has no negatively curved Delaunay
    member).  Returns the maximizer, its assembled structure, and the
    per-iteration trace.  ``NoConvergence`` carries the best iterate and
    trace when the iteration cap is reached.
    """
    opts = opts or UniformizeOptions()
    if start is None:
        x = find_negative_delaunay(spec)
    else:
        if start.complex != spec.complex:
            raise ComplexMismatch("start point lives on a different complex")
        if np.max(np.abs(edge_psi(start) - spec.psi_edge)) > 1e-9:
            raise ValueError("start point does not lie in the requested class")
        x = start
    B = class_basis(spec.complex)

    trace: list[TraceRecord] = []
    H = objective_H(x)
    for it in range(opts.max_iter):
        g = class_grad(x)
        ginf = float(np.max(np.abs(g)))
        trace.append(TraceRecord(it, H, ginf, 0.0, _length_mismatch(x)))
        if ginf < opts.tol:
            structure = assemble_structure(x, tol=10 * opts.tol)
            return x, structure, trace

        M = class_hessian(x)
        try:
            d = np.linalg.solve(M, -g)
        except np.linalg.LinAlgError:
            d = g.copy()
        slope = float(g @ d)
        if not np.isfinite(slope) or slope <= 0.0:
            d = g.copy()
            slope = float(g @ g)

        # near the maximum the true gain drops below float resolution of H;
        # the Armijo test is slackened by that resolution so the final
        # quadratic Newton steps are not rejected as non-improving
        flat = 1e-14 * (1.0 + abs(H))
        step = 1.0
        moved = False
        while step > 1e-18:
            cand = AngleSystem(spec.complex, x.psi + step * (B.T @ d))
            if _interior_margin(cand) > opts.interior_margin:
                H_cand = objective_H(cand)
                if H_cand >= H + opts.armijo * step * slope - flat:
                    x, H = cand, H_cand
                    trace[-1] = TraceRecord(it, H, ginf, step, _length_mismatch(x))
                    moved = True
                    break
            step *= 0.5
        if not moved:
            raise NoConvergence(
                f"line search stalled at iteration {it} (grad_inf={ginf:.3e})",
                best=x,
                trace=trace,
            )

    raise NoConvergence(
        f"no convergence in {opts.max_iter} iterations "
        f"(grad_inf={float(np.max(np.abs(class_grad(x)))):.3e})",
        best=x,
        trace=trace,
    )


def assemble_structure(y: AngleSystem, tol: float = 1e-7) -> HyperbolicStructure:
    """Fuse the per-face triangles of a (near-)uniform system into a surface.

    The two lengths computed for each edge must agree within ``tol`` (worst
    edge reported otherwise); the circumradius of each face is recovered from
    tanh(l/2) = tanh(R) cos(psi) on all three sides, which must also agree.
    The partial angle may be negative (circumcenter beyond the edge); the
    relation holds with the signed value since only its cosine enters.
    """
    T = y.complex
    lengths = flag_edge_lengths(y)
    flags = np.asarray(T.edges, dtype=np.int64)
    mismatch = np.abs(lengths[flags[:, 0]] - lengths[flags[:, 1]])
    worst = int(np.argmax(mismatch))
    if mismatch[worst] > tol:
        a = T.edges[worst]
        raise LengthMismatch(
            f"edge {worst} (flags {a}) length mismatch {mismatch[worst]:.3e} > {tol:.1e}"
        )
    edge_lengths = 0.5 * (lengths[flags[:, 0]] + lengths[flags[:, 1]])

    # circumradius per face; all three sides must give the same value
    A = all_corner_angles(y)
    s = A.sum(axis=1, keepdims=True) / 2.0
    psi = s - A
    half = np.tanh(lengths.reshape(-1, 3) / 2.0)
    ratio = half / np.cos(psi)
    if np.any(ratio >= 1.0):
        t = int(np.argmax(np.any(ratio >= 1.0, axis=1)))
        raise LengthMismatch(
            f"face {t} admits no circumscribing disk (tanh(l/2) >= cos(psi))"
        )
    radii = np.arctanh(ratio)
    spread = radii.max(axis=1) - radii.min(axis=1)
    worst_t = int(np.argmax(spread))
    if spread[worst_t] > tol:
        raise LengthMismatch(
            f"face {worst_t} circumradius inconsistent across sides "
            f"(spread {spread[worst_t]:.3e} > {tol:.1e})"
        )

    pe = edge_psi(y)
    return HyperbolicStructure(
        complex=T,
        edge_lengths=edge_lengths,
        face_angles=A,
        circumradii=radii.mean(axis=1),
        intersection_angles=np.pi - pe,
        psi_edge=pe,
    )


@dataclass(frozen=True)
class PatternReport:
    ok: bool
    total_area: float
    area_target: float
    area_error: float
    intersection_angles: np.ndarray
    circumradii: np.ndarray
    angle_range: tuple[float, float]

    def __bool__(self) -> bool:
        return self.ok


def pattern_report(structure: HyperbolicStructure, tol: float = 1e-9) -> PatternReport:
    """Summarize the empty disk pattern and check its area identity.

    The total area (sum of face angle defects) must equal -2 pi chi, and
    every disk intersection angle must lie strictly inside (0, pi).
    """
    area = structure.total_area
    target = -2.0 * np.pi * structure.complex.chi
    angles = structure.intersection_angles
    lo, hi = float(angles.min()), float(angles.max())
    ok = abs(area - target) < tol and lo > 0.0 and hi < np.pi
    return PatternReport(
        ok=ok,
        total_area=area,
        area_target=target,
        area_error=abs(area - target),
        intersection_angles=angles,
        circumradii=structure.circumradii,
        angle_range=(lo, hi),
    )
