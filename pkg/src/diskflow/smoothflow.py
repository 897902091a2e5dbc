"""Conformal deformation of discrete background metrics to constant curvature.

The background metric is a per-edge length assignment on a chi < 0 complex,
discretized the classical way: cotangent stiffness form S, lumped vertex
masses m (a third of the incident face areas), and angle-defect curvature
k_v = (2 pi - angle sum)/m_v.  These choices make the structure exact rather
than approximate: sum m_v k_v = 2 pi chi on the nose, S annihilates
constants, and summation by parts psi' S f = -sum m (Lap psi) f holds to
rounding, so the variational identities below are algebraic facts of the
discrete model.

A conformal factor is a per-vertex field phi, with curvature
k_h = e^(-2 phi) (-Lap phi + k).  The objective

    I(phi) = -[ phi' S phi + sum m u log u + sum m k log|k| ],   u = Lap phi - k

is defined where u > 0 and k < 0, vanishes at phi = 0 and at constants, has
gradient S log|k_h|, and is strictly concave in mean-zero directions with
second variation -[2 psi' S psi + sum m (Lap psi)^2 / u].  Its ascent flow
drives log|k_h| to a constant; critical points are exactly the constant
curvature factors, unique up to the additive constant.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .complexes import TopologicalTriangulation
from .errors import (
    NoConvergence,
    OutOfDomain,
    SolveFailure,
    ZeroCurvatureVertex,
)


class MeshMetric:
    """Background discrete metric: complex, edge lengths, derived operators.

    Attributes: ``corner_angles`` (F, 3) Euclidean angles (corner i opposite
    side i), ``face_areas``, ``masses`` m_v, ``stiffness`` S (dense V x V),
    ``curvature`` k_v, ``area`` total.
    """

    def __init__(self, complex: TopologicalTriangulation, lengths: np.ndarray):
        if complex.chi >= 0:
            raise ValueError(f"mesh metrics require chi < 0, got chi={complex.chi}")
        lengths = np.asarray(lengths, dtype=float)
        if lengths.shape != (complex.edge_count,):
            raise ValueError(
                f"expected {complex.edge_count} edge lengths, got {lengths.shape}"
            )
        if np.any(lengths <= 0):
            raise ValueError("edge lengths must be positive")
        self.complex = complex
        self.lengths = lengths

        F = complex.face_count
        V = complex.vertex_count
        side_len = lengths[complex.edge_of_flag].reshape(F, 3)
        for t in range(F):
            a, b, c = side_len[t]
            if a >= b + c or b >= a + c or c >= a + b:
                raise ValueError(f"face {t} violates the triangle inequality")

        l2 = side_len**2
        cos = np.empty((F, 3))
        for i in range(3):
            j, k = (i + 1) % 3, (i + 2) % 3
            cos[:, i] = (l2[:, j] + l2[:, k] - l2[:, i]) / (
                2.0 * side_len[:, j] * side_len[:, k]
            )
        self.corner_angles = np.arccos(np.clip(cos, -1.0, 1.0))
        self.face_areas = 0.5 * side_len[:, 1] * side_len[:, 2] * np.sin(
            self.corner_angles[:, 0]
        )

        corner_vertex = complex.vertex_of_corner.reshape(F, 3)
        self.masses = np.zeros(V)
        np.add.at(
            self.masses,
            corner_vertex.reshape(-1),
            np.repeat(self.face_areas / 3.0, 3),
        )

        S = np.zeros((V, V))
        cot = 1.0 / np.tan(self.corner_angles)
        for t in range(F):
            for i in range(3):
                u, w = corner_vertex[t, (i + 1) % 3], corner_vertex[t, (i + 2) % 3]
                if u == w:
                    continue
                c = 0.5 * cot[t, i]
                S[u, u] += c
                S[w, w] += c
                S[u, w] -= c
                S[w, u] -= c
        self.stiffness = S

        angle_sums = np.zeros(V)
        np.add.at(angle_sums, corner_vertex.reshape(-1), self.corner_angles.reshape(-1))
        self.curvature = (2.0 * np.pi - angle_sums) / self.masses
        self.area = float(self.masses.sum())

    @property
    def vertex_count(self) -> int:
        return self.complex.vertex_count

    def laplacian(self, phi: np.ndarray) -> np.ndarray:
        """Discrete Laplace operator, -M^-1 S phi (negative semidefinite)."""
        return -(self.stiffness @ phi) / self.masses


def mean_zero(mesh: MeshMetric, phi: np.ndarray) -> np.ndarray:
    """Project out the mass-weighted mean."""
    return phi - float(mesh.masses @ phi) / mesh.area


def curvature_h(mesh: MeshMetric, phi: np.ndarray) -> np.ndarray:
    """Curvature of the conformally changed metric, e^(-2 phi)(-Lap phi + k)."""
    phi = np.asarray(phi, dtype=float)
    return np.exp(-2.0 * phi) * (-mesh.laplacian(phi) + mesh.curvature)


def teleport(mesh: MeshMetric) -> np.ndarray:
    """Mean-zero factor whose conformal curvature is negative everywhere.

    Solves S phi = M (c - k) with c = 2 pi chi / A; the right side is
    mass-orthogonal to constants, so the system is consistent, and the
    result has k_h = e^(-2 phi) c < 0 at every vertex.
    """
    c = 2.0 * np.pi * mesh.complex.chi / mesh.area
    rhs = mesh.masses * (c - mesh.curvature)
    phi, residual, *_ = np.linalg.lstsq(mesh.stiffness, rhs, rcond=None)
    if not np.all(np.isfinite(phi)):
        raise SolveFailure("stiffness solve produced non-finite factor")
    if np.max(np.abs(mesh.stiffness @ phi - rhs)) > 1e-8 * max(1.0, np.abs(rhs).max()):
        raise SolveFailure("stiffness solve did not reach the required residual")
    return mean_zero(mesh, phi)


def _domain_u(mesh: MeshMetric, phi: np.ndarray) -> np.ndarray:
    phi = np.asarray(phi, dtype=float)
    u = mesh.laplacian(phi) - mesh.curvature
    if np.any(mesh.curvature >= 0):
        v = int(np.argmax(mesh.curvature))
        raise OutOfDomain(
            f"background curvature is not negative at vertex {v}", vertex=v
        )
    if np.any(u <= 0):
        v = int(np.argmin(u))
        raise OutOfDomain(
            f"Lap phi - k is not positive at vertex {v} ({u[v]:.3e})", vertex=v
        )
    return u


def evaluate_Ig(mesh: MeshMetric, phi: np.ndarray) -> float:
    """The averaged objective; zero at phi = 0 and at constants."""
    phi = np.asarray(phi, dtype=float)
    u = _domain_u(mesh, phi)
    k = mesh.curvature
    return -float(
        phi @ (mesh.stiffness @ phi)
        + mesh.masses @ (u * np.log(u))
        + mesh.masses @ (k * np.log(np.abs(k)))
    )


def gradient_Ig(mesh: MeshMetric, phi: np.ndarray) -> np.ndarray:
    """Gradient vector S log|k_h|; entries sum to zero exactly."""
    phi = np.asarray(phi, dtype=float)
    u = _domain_u(mesh, phi)
    log_kh = -2.0 * phi + np.log(u)
    return mesh.stiffness @ log_kh


def hessian_Ig(mesh: MeshMetric, phi: np.ndarray, psi: np.ndarray) -> float:
    """Second variation of the objective at phi in direction psi.

    Equal to -[2 psi' S psi + sum m (Lap psi)^2 / u]; strictly negative for
    nonzero mean-zero psi and zero on constants.
    """
    phi = np.asarray(phi, dtype=float)
    psi = np.asarray(psi, dtype=float)
    u = _domain_u(mesh, phi)
    lap_psi = mesh.laplacian(psi)
    return -float(2.0 * psi @ (mesh.stiffness @ psi) + mesh.masses @ (lap_psi**2 / u))


def hessian_matrix(mesh: MeshMetric, phi: np.ndarray) -> np.ndarray:
    """Dense matrix of the second variation (singular on constants)."""
    u = _domain_u(mesh, np.asarray(phi, dtype=float))
    S = mesh.stiffness
    return -(2.0 * S + S @ np.diag(1.0 / (mesh.masses * u)) @ S)


def curvature_spread(mesh: MeshMetric, phi: np.ndarray) -> float:
    """Area-weighted relative standard deviation of the conformal curvature."""
    phi = np.asarray(phi, dtype=float)
    kh = curvature_h(mesh, phi)
    w = mesh.masses * np.exp(2.0 * phi)
    mean = float(w @ kh / w.sum())
    sd = float(np.sqrt(w @ (kh - mean) ** 2 / w.sum()))
    return sd / abs(mean)


def entropy(mesh: MeshMetric, phi: np.ndarray) -> float:
    """Uniformization entropy -sum m e^(2 phi) k_h log|k_h| of the new metric."""
    phi = np.asarray(phi, dtype=float)
    kh = curvature_h(mesh, phi)
    if np.any(kh == 0.0):
        raise ZeroCurvatureVertex("conformal curvature vanishes at a vertex")
    w = mesh.masses * np.exp(2.0 * phi)
    return -float(w @ (kh * np.log(np.abs(kh))))


@dataclass(frozen=True)
class FlowOptions:
    tol: float = 1e-6             # curvature_spread target
    max_iter: int = 5000
    newton_threshold: float = 1e-3  # sup-norm gradient below which Newton engages
    u_floor: float = 1e-12
    armijo: float = 1e-4
    shrink: float = 0.5


@dataclass(frozen=True)
class FlowStep:
    iteration: int
    objective: float
    grad_inf: float
    spread: float
    step: float
    newton: bool


@dataclass(frozen=True)
class FlowReport:
    converged: bool
    iterations: int
    steps: list[FlowStep]
    final_spread: float
    final_curvature_mean: float
    final_objective: float


def _in_domain(mesh: MeshMetric, phi: np.ndarray, floor: float) -> bool:
    u = mesh.laplacian(phi) - mesh.curvature
    return bool(np.all(u > floor))


def log_ricci_flow(
    mesh: MeshMetric,
    phi0: np.ndarray | None = None,
    opts: FlowOptions | None = None,
) -> tuple[np.ndarray, FlowReport]:
    """Ascend the objective until the conformal curvature is constant.

    The drift direction is the mean-zero projection of -Lap log|k_h| (the
    mass-preconditioned gradient); damped Newton steps take over once the
    gradient is small.  Steps are backtracked to keep Lap phi - k positive
    and the objective nondecreasing.  Starts from the teleported factor by
    default.  Raises ``NoConvergence`` with the best iterate and report
    attached if the iteration cap is reached.
    """
    opts = opts or FlowOptions()
    phi = np.asarray(phi0, dtype=float).copy() if phi0 is not None else teleport(mesh)
    _domain_u(mesh, phi)

    steps: list[FlowStep] = []
    I = evaluate_Ig(mesh, phi)
    converged = False
    it = 0
    for it in range(opts.max_iter + 1):
        G = gradient_Ig(mesh, phi)
        ginf = float(np.max(np.abs(G)))
        spread = curvature_spread(mesh, phi)
        if spread < opts.tol:
            converged = True
            steps.append(FlowStep(it, I, ginf, spread, 0.0, False))
            break
        if it == opts.max_iter:
            break

        newton = ginf < opts.newton_threshold
        d = None
        if newton:
            try:
                d, *_ = np.linalg.lstsq(hessian_matrix(mesh, phi), -G, rcond=None)
                d = mean_zero(mesh, d)
                if not np.isfinite(d).all() or float(G @ d) <= 0.0:
                    d = None
            except np.linalg.LinAlgError:
                d = None
        if d is None:
            newton = False
            d = mean_zero(mesh, G / mesh.masses)
        slope = float(G @ d)

        flat = 1e-14 * (1.0 + abs(I))
        s = 1.0
        moved = False
        while s > 1e-18:
            cand = phi + s * d
            if _in_domain(mesh, cand, opts.u_floor):
                I_cand = evaluate_Ig(mesh, cand)
                if I_cand >= I + opts.armijo * s * slope - flat:
                    phi, I = cand, I_cand
                    steps.append(FlowStep(it, I, ginf, spread, s, newton))
                    moved = True
                    break
            s *= opts.shrink
        if not moved:
            report = _report(mesh, phi, steps, False, I)
            raise NoConvergence(
                f"flow line search stalled at iteration {it}", best=phi, trace=report
            )

    phi = mean_zero(mesh, phi)
    report = _report(mesh, phi, steps, converged, evaluate_Ig(mesh, phi))
    if not converged:
        raise NoConvergence(
            f"flow did not converge in {opts.max_iter} iterations",
            best=phi,
            trace=report,
        )
    return phi, report


def _report(mesh, phi, steps, converged, I) -> FlowReport:
    kh = curvature_h(mesh, phi)
    w = mesh.masses * np.exp(2.0 * phi)
    return FlowReport(
        converged=converged,
        iterations=steps[-1].iteration if steps else 0,
        steps=steps,
        final_spread=curvature_spread(mesh, phi),
        final_curvature_mean=float(w @ kh / w.sum()),
        final_objective=I,
    )
