"""Command-line front end.

Every run echoes a reproducibility header (version, config hash, seed) on
stdout; series go to CSV, structured results to canonical JSON, so repeated
runs with identical flags produce identical bytes.  Exit codes: 0 success,
1 I/O or parse failure, 2 domain error (infeasible class, factor outside the
curvature domain, bad parameters), 3 convergence failure.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .complexes import TopologicalTriangulation
from .errors import (
    BadDelta,
    DiskflowError,
    DuplicateSide,
    NoConvergence,
    SelfGluedSide,
    UnknownVertex,
    UnmatchedSide,
)
from .estimators import (
    CapRegion,
    RectRegion,
    chi_estimator,
    expected_faces_quadrature,
    face_defect_in_region,
)
from .serialization import (
    angle_system_to_dict,
    class_spec_from_dict,
    counts_csv,
    dumps_canonical,
    fmt_float,
    mesh_from_dict,
    read_json,
    structure_from_dict,
    structure_to_dict,
    trace_csv,
    trials_csv,
    write_json,
)
from .smoothflow import FlowOptions, curvature_h, log_ricci_flow, teleport
from .surfaces import SurfaceModel
from .uniformize import UniformizeOptions, pattern_report, uniformize

EXIT_OK = 0
EXIT_IO = 1
EXIT_DOMAIN = 2
EXIT_NO_CONVERGENCE = 3


def _echo_header(args: argparse.Namespace) -> None:
    config = {k: v for k, v in sorted(vars(args).items()) if k != "func"}
    digest = hashlib.sha256(dumps_canonical(config).encode()).hexdigest()[:16]
    seed = config.get("seed", "-")
    print(f"# diskflow {__version__}")
    print(f"# config {digest}")
    print(f"# seed {seed}")


def _surface_from_args(args) -> SurfaceModel:
    if args.surface == "sphere":
        return SurfaceModel.sphere()
    return SurfaceModel.torus(args.torus_width, args.torus_height)


# -- subcommands -------------------------------------------------------------------


def _cmd_validate(args) -> int:
    T = TopologicalTriangulation.from_dict(read_json(args.complex))
    print(f"F={T.face_count} E={T.edge_count} V={T.vertex_count} chi={T.chi}")
    return EXIT_OK


def _cmd_pattern(args) -> int:
    st = structure_from_dict(read_json(args.structure))
    rep = pattern_report(st)
    print(
        f"faces={st.face_angles.shape[0]} edges={st.edge_lengths.size} "
        f"area={fmt_float(rep.total_area)} target={fmt_float(rep.area_target)} "
        f"area_error={fmt_float(rep.area_error)}"
    )
    print(
        f"intersection_angles in [{fmt_float(rep.angle_range[0])}, "
        f"{fmt_float(rep.angle_range[1])}] ok={rep.ok}"
    )
    if args.out:
        write_json(
            args.out,
            {
                "ok": rep.ok,
                "total_area": rep.total_area,
                "area_target": rep.area_target,
                "area_error": rep.area_error,
                "intersection_angles": rep.intersection_angles,
                "circumradii": rep.circumradii,
            },
        )
    return EXIT_OK if rep.ok else EXIT_DOMAIN


def _cmd_uniformize(args) -> int:
    spec = class_spec_from_dict(read_json(args.spec))
    opts = UniformizeOptions(tol=args.tol, max_iter=args.max_iter)
    try:
        y, st, trace = uniformize(spec, opts)
    except NoConvergence as exc:
        if args.trace and exc.trace is not None:
            Path(args.trace).write_text(trace_csv(exc.trace), encoding="utf-8")
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NO_CONVERGENCE
    if args.out:
        write_json(args.out, structure_to_dict(st))
    if args.trace:
        Path(args.trace).write_text(trace_csv(trace), encoding="utf-8")
    if args.angles_out:
        write_json(args.angles_out, angle_system_to_dict(y))
    rep = pattern_report(st)
    print(
        f"converged in {len(trace)} iterations; grad_inf={fmt_float(trace[-1].grad_inf)} "
        f"area_error={fmt_float(rep.area_error)}"
    )
    return EXIT_OK


def _cmd_gauss_bonnet(args) -> int:
    surface = _surface_from_args(args)
    est = chi_estimator(surface, args.intensity, args.trials, args.seed, jobs=args.jobs)
    if args.out:
        Path(args.out).write_text(trials_csv(est.records), encoding="utf-8")
    print(
        f"mean={fmt_float(est.mean)} std_error={fmt_float(est.std_error)} "
        f"trials={args.trials} resampled={est.resampled}"
    )
    return EXIT_OK


def _cmd_quadrature(args) -> int:
    surface = SurfaceModel.sphere()
    ef = expected_faces_quadrature(surface, args.intensity, args.delta)
    estimate = surface.area * args.intensity - ef / 2.0
    print(f"expected_faces={fmt_float(ef)} estimator={fmt_float(estimate)}")
    if args.out:
        write_json(args.out, {"expected_faces": ef, "estimator": estimate})
    return EXIT_OK


def _cmd_defect(args) -> int:
    surface = _surface_from_args(args)
    if args.cap_area is not None:
        if surface.kind != "sphere":
            raise BadDelta("--cap-area applies to the sphere")
        region = CapRegion(args.cap_area)
        target = args.cap_area / np.pi
    elif args.rect is not None:
        if surface.kind != "torus":
            raise BadDelta("--rect applies to the torus")
        region = RectRegion(*args.rect)
        target = 0.0
    else:
        raise BadDelta("one of --cap-area or --rect is required")
    est = face_defect_in_region(
        surface, args.intensity, args.trials, region, args.seed, jobs=args.jobs
    )
    if args.out:
        Path(args.out).write_text(counts_csv(est.counts), encoding="utf-8")
    print(
        f"estimate={fmt_float(est.estimate)} std_error={fmt_float(est.std_error)} "
        f"target={fmt_float(target)}"
    )
    return EXIT_OK


def _cmd_teleport(args) -> int:
    mesh = mesh_from_dict(read_json(args.mesh))
    phi = teleport(mesh)
    kh = curvature_h(mesh, phi)
    print(
        f"max_k_h={fmt_float(kh.max())} "
        f"target_mean={fmt_float(2 * np.pi * mesh.complex.chi / mesh.area)}"
    )
    if args.out:
        write_json(args.out, {"phi": phi})
    return EXIT_OK


def _cmd_flow(args) -> int:
    mesh = mesh_from_dict(read_json(args.mesh))
    phi0 = None
    if args.phi0:
        phi0 = np.asarray(read_json(args.phi0)["phi"], dtype=float)
    opts = FlowOptions(tol=args.tol, max_iter=args.max_iter)
    try:
        phi, report = log_ricci_flow(mesh, phi0, opts)
    except NoConvergence as exc:
        if args.out and exc.trace is not None and exc.best is not None:
            rep = exc.trace
            write_json(
                args.out,
                {
                    "converged": False,
                    "iterations": rep.iterations,
                    "final_spread": rep.final_spread,
                    "final_curvature_mean": rep.final_curvature_mean,
                    "final_objective": rep.final_objective,
                    "phi": exc.best,
                    "objective": [s.objective for s in rep.steps],
                    "grad_inf": [s.grad_inf for s in rep.steps],
                },
            )
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NO_CONVERGENCE
    payload = {
        "converged": report.converged,
        "iterations": report.iterations,
        "final_spread": report.final_spread,
        "final_curvature_mean": report.final_curvature_mean,
        "final_objective": report.final_objective,
        "phi": phi,
        "objective": [s.objective for s in report.steps],
        "grad_inf": [s.grad_inf for s in report.steps],
    }
    if args.out:
        write_json(args.out, payload)
    print(
        f"converged in {report.iterations} iterations; "
        f"spread={fmt_float(report.final_spread)} "
        f"k_h={fmt_float(report.final_curvature_mean)}"
    )
    return EXIT_OK


# -- parser -------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="diskflow",
        description="Disk patterns, uniform hyperbolic structures, random "
        "Delaunay estimators, and conformal curvature flow.",
    )
    sub = p.add_subparsers(dest="command", required=True)

    v = sub.add_parser("validate", help="check a complex file and print its counts")
    v.add_argument("complex")
    v.set_defaults(func=_cmd_validate)

    pt = sub.add_parser("pattern", help="report the disk pattern of a structure file")
    pt.add_argument("structure")
    pt.add_argument("--out", default=None, help="write the report as JSON")
    pt.set_defaults(func=_cmd_pattern)

    u = sub.add_parser("uniformize", help="maximize prism volume over a class")
    u.add_argument("spec", help="conformal class JSON")
    u.add_argument("--tol", type=float, default=1e-10)
    u.add_argument("--max-iter", type=int, default=200)
    u.add_argument("--out", default=None, help="structure JSON output")
    u.add_argument("--trace", default=None, help="iteration trace CSV")
    u.add_argument("--angles-out", default=None, help="maximizing angle system JSON")
    u.set_defaults(func=_cmd_uniformize)

    def add_surface(sp, torus_default=False):
        sp.add_argument(
            "--surface", choices=["sphere", "torus"],
            default="torus" if torus_default else "sphere",
        )
        sp.add_argument("--torus-width", type=float, default=1.0)
        sp.add_argument("--torus-height", type=float, default=1.0)

    g = sub.add_parser("gauss-bonnet", help="Monte Carlo Euler characteristic")
    add_surface(g)
    g.add_argument("--lambda", dest="intensity", type=float, required=True)
    g.add_argument("--trials", type=int, required=True)
    g.add_argument("--seed", type=int, required=True)
    g.add_argument("--jobs", type=int, default=1)
    g.add_argument("--out", default=None, help="per-trial CSV output")
    g.set_defaults(func=_cmd_gauss_bonnet)

    q = sub.add_parser("quadrature", help="expected face count by quadrature")
    q.add_argument("--lambda", dest="intensity", type=float, required=True)
    q.add_argument("--delta", type=float, required=True)
    q.add_argument("--out", default=None)
    q.set_defaults(func=_cmd_quadrature)

    d = sub.add_parser("defect", help="curvature defect of a region")
    add_surface(d)
    d.add_argument("--lambda", dest="intensity", type=float, required=True)
    d.add_argument("--trials", type=int, required=True)
    d.add_argument("--seed", type=int, required=True)
    d.add_argument("--jobs", type=int, default=1)
    d.add_argument("--cap-area", type=float, default=None)
    d.add_argument("--rect", type=float, nargs=4, default=None,
                   metavar=("X0", "Y0", "X1", "Y1"))
    d.add_argument("--out", default=None, help="per-trial counts CSV")
    d.set_defaults(func=_cmd_defect)

    t = sub.add_parser("teleport", help="negative-curvature conformal factor")
    t.add_argument("mesh")
    t.add_argument("--out", default=None)
    t.set_defaults(func=_cmd_teleport)

    f = sub.add_parser("flow", help="run the curvature flow to constancy")
    f.add_argument("mesh")
    f.add_argument("--phi0", default=None, help="JSON file with a phi field")
    f.add_argument("--tol", type=float, default=1e-6)
    f.add_argument("--max-iter", type=int, default=5000)
    f.add_argument("--out", default=None, help="flow report JSON")
    f.set_defaults(func=_cmd_flow)

    return p


def run(argv: list[str]) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_IO if exc.code not in (0, None) else EXIT_OK
    _echo_header(args)
    try:
        return args.func(args)
    except NoConvergence as exc:
        print(f"error: NoConvergence: {exc}", file=sys.stderr)
        return EXIT_NO_CONVERGENCE
    except (UnmatchedSide, SelfGluedSide, DuplicateSide, UnknownVertex) as exc:
        # a structurally invalid input file is a parse failure
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_IO
    except (OSError, KeyError, TypeError, json.JSONDecodeError) as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_IO
    except (DiskflowError, ValueError) as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_DOMAIN


def main() -> None:
    sys.exit(run(sys.argv[1:]))


if __name__ == "__main__":
    main()
