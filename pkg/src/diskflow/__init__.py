"""diskflow: disk patterns and uniform hyperbolic structures from angle data,
random-Delaunay Euler characteristic estimators, and conformal curvature flow
on discrete metrics.
"""

__version__ = "0.1.0"

from .angles import (
    AngleSystem,
    ConformalClassSpec,
    class_basis,
    conformal_class_of,
    corner_angles,
    edge_psi,
    face_curvature,
    face_curvatures,
    find_negative_delaunay,
    informal_intersection_angle,
    is_angle_system,
    is_delaunay,
    is_negatively_curved,
    is_teleportable_bruteforce,
    partials_from_angles,
    same_class,
)
from .complexes import (
    TopologicalTriangulation,
    build_complex,
    csaszar_torus,
    euler_characteristic,
    from_vertex_triples,
    genus2_octagon,
    octagon_cone,
    pillow,
    subdivide,
    tetrahedron,
    vertex_edge_incidence,
)
from .delaunay import (
    DelaunayComplex,
    delaunay,
    is_generically_delta_dense,
    verify_empty_disks,
)
from .estimators import (
    CapRegion,
    RectRegion,
    chi_estimator,
    expected_faces_quadrature,
    face_defect_in_region,
    inscribed_triangle_mean_area,
)
from .hyperbolic import (
    angles_from_lengths,
    class_grad,
    class_hessian,
    edge_lengths,
    grad_H,
    lobachevsky,
    objective_H,
    prism_gradient,
    prism_volume,
    prism_volume_path,
)
from .smoothflow import (
    FlowOptions,
    MeshMetric,
    curvature_h,
    curvature_spread,
    entropy,
    evaluate_Ig,
    gradient_Ig,
    hessian_Ig,
    log_ricci_flow,
    teleport,
)
from .surfaces import PointSample, SurfaceModel, circumdisk, sample_poisson
from .uniformize import (
    HyperbolicStructure,
    UniformizeOptions,
    assemble_structure,
    pattern_report,
    uniformize,
)
