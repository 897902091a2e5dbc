"""File formats: canonical JSON (sorted keys, 17-significant-digit floats)
and plain CSV series.  Identical inputs serialize to identical bytes, which
is what makes seeded runs reproducible at the byte level.
"""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from .angles import AngleSystem, ConformalClassSpec
from .complexes import TopologicalTriangulation
from .smoothflow import MeshMetric
from .uniformize import HyperbolicStructure, TraceRecord


def fmt_float(x: float) -> str:
    return format(float(x), ".17g")


def dumps_canonical(obj) -> str:
    """Deterministic JSON text: sorted keys, floats at 17 significant digits."""

    def render(o) -> str:
        if isinstance(o, dict):
            items = sorted(o.items())
            inner = ",".join(f"{json.dumps(str(k))}:{render(v)}" for k, v in items)
            return "{" + inner + "}"
        if isinstance(o, (list, tuple, np.ndarray)):
            seq = o.tolist() if isinstance(o, np.ndarray) else o
            return "[" + ",".join(render(v) for v in seq) + "]"
        if isinstance(o, bool) or o is None:
            return json.dumps(o)
        if isinstance(o, (int, np.integer)):
            return str(int(o))
        if isinstance(o, (float, np.floating)):
            return fmt_float(o)
        if isinstance(o, str):
            return json.dumps(o)
        raise TypeError(f"cannot serialize {type(o)}")

    return render(obj)


def write_json(path, obj) -> None:
    Path(path).write_text(dumps_canonical(obj) + "\n", encoding="utf-8")


def read_json(path) -> dict:
    return json.loads(Path(path).read_text(encoding="utf-8"))


# -- typed payloads -----------------------------------------------------------------


def angle_system_to_dict(x: AngleSystem) -> dict:
    return {"complex": x.complex.to_dict(), "psi": x.psi}


def angle_system_from_dict(data: dict) -> AngleSystem:
    T = TopologicalTriangulation.from_dict(data["complex"])
    return AngleSystem(T, np.asarray(data["psi"], dtype=float))


def class_spec_to_dict(spec: ConformalClassSpec) -> dict:
    return {
        "complex": spec.complex.to_dict(),
        "psi_edge": {str(e): spec.psi_edge[e] for e in range(spec.psi_edge.size)},
    }


def class_spec_from_dict(data: dict) -> ConformalClassSpec:
    T = TopologicalTriangulation.from_dict(data["complex"])
    raw = data["psi_edge"]
    pe = np.empty(T.edge_count)
    for e in range(T.edge_count):
        pe[e] = float(raw[str(e)])
    return ConformalClassSpec(T, pe)


def mesh_to_dict(mesh: MeshMetric) -> dict:
    return {"complex": mesh.complex.to_dict(), "lengths": mesh.lengths}


def mesh_from_dict(data: dict) -> MeshMetric:
    T = TopologicalTriangulation.from_dict(data["complex"])
    return MeshMetric(T, np.asarray(data["lengths"], dtype=float))


def structure_to_dict(st: HyperbolicStructure) -> dict:
    return {
        "complex": st.complex.to_dict(),
        "edge_lengths": st.edge_lengths,
        "face_angles": st.face_angles,
        "circumradii": st.circumradii,
        "intersection_angles": st.intersection_angles,
        "psi_edge": st.psi_edge,
    }


def structure_from_dict(data: dict) -> HyperbolicStructure:
    T = TopologicalTriangulation.from_dict(data["complex"])
    return HyperbolicStructure(
        complex=T,
        edge_lengths=np.asarray(data["edge_lengths"], dtype=float),
        face_angles=np.asarray(data["face_angles"], dtype=float),
        circumradii=np.asarray(data["circumradii"], dtype=float),
        intersection_angles=np.asarray(data["intersection_angles"], dtype=float),
        psi_edge=np.asarray(data["psi_edge"], dtype=float),
    )


# -- CSV series ----------------------------------------------------------------------


def trials_csv(records) -> str:
    lines = ["trial,n,F,estimator"]
    for r in records:
        lines.append(f"{r.trial},{r.n},{r.faces},{fmt_float(r.estimator)}")
    return "\n".join(lines) + "\n"


def trace_csv(trace: list[TraceRecord]) -> str:
    lines = ["iteration,H,grad_inf,step,worst_length_mismatch"]
    for r in trace:
        lines.append(
            f"{r.iteration},{fmt_float(r.objective)},{fmt_float(r.grad_inf)},"
            f"{fmt_float(r.step)},{fmt_float(r.worst_length_mismatch)}"
        )
    return "\n".join(lines) + "\n"


def counts_csv(counts) -> str:
    lines = ["trial,count"]
    for i, c in enumerate(counts):
        lines.append(f"{i},{fmt_float(c)}")
    return "\n".join(lines) + "\n"
