import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from diskflow.angles import AngleSystem, conformal_class_of, partials_from_angles
from diskflow.complexes import genus2_octagon, octagon_cone, subdivide
from diskflow.smoothflow import MeshMetric

settings.register_profile(
    "ci", derandomize=True, suppress_health_check=[HealthCheck.too_slow]
)
settings.load_profile("ci")

# subdivided octagon-cone edge-length classes solved so that the discrete
# curvature is the same at all 14 vertices (residual below 1e-13); the cone
# itself has apex angle 5 pi / 12 and base angle 7 pi / 24 for the same reason
CONE_SPOKE = 1.0
CONE_BASE = float(np.sin(5 * np.pi / 12) / np.sin(7 * np.pi / 24))
CONE14_HALF_SPOKE = 0.5
CONE14_HALF_BASE = 0.6225998340422428
CONE14_MEDIAL_SPOKE = 0.3146895322633252
CONE14_MEDIAL_BASE = 0.4615456193361699


@pytest.fixture(scope="session")
def genus2():
    return genus2_octagon()


@pytest.fixture(scope="session")
def genus2_sub():
    return subdivide(genus2_octagon())


@pytest.fixture(scope="session")
def symmetric_g2_system(genus2):
    # the single vertex has 18 corners, so equal corner angles of 2 pi / 18
    return AngleSystem(genus2, np.full(18, np.pi / 18))


@pytest.fixture(scope="session")
def canonical24_system(genus2_sub):
    T = genus2_sub.complex
    deg = np.array([len(c) for c in T.corners_of_vertex])
    corner_angle = 2 * np.pi / deg[T.vertex_of_corner]
    return partials_from_angles(T, corner_angle.reshape(-1, 3))


@pytest.fixture(scope="session")
def canonical24_spec(canonical24_system):
    return conformal_class_of(canonical24_system)


def _cone_lengths(T):
    out = np.empty(T.edge_count)
    for e, (a, _) in enumerate(T.edges):
        out[e] = CONE_BASE if a % 3 == 0 else CONE_SPOKE
    return out


@pytest.fixture(scope="session")
def cone_mesh():
    T = octagon_cone()
    return MeshMetric(T, _cone_lengths(T))


def cone14_lengths(sub):
    base_parent = np.array([(a % 3) == 0 for a, _ in octagon_cone().edges])
    table = np.array(
        [CONE14_HALF_SPOKE, CONE14_HALF_BASE, CONE14_MEDIAL_SPOKE, CONE14_MEDIAL_BASE]
    )
    cls = np.array(
        [
            (1 if base_parent[sub.parent_edge[e]] else 0)
            + (2 if sub.is_medial[e] else 0)
            for e in range(sub.complex.edge_count)
        ]
    )
    return table[cls]


@pytest.fixture(scope="session")
def cone14_mesh():
    sub = subdivide(octagon_cone())
    return MeshMetric(sub.complex, cone14_lengths(sub))


@pytest.fixture(scope="session")
def cone14_unit(cone14_mesh):
    """Same mesh rescaled so the constant curvature equals -1."""
    c = 2 * np.pi * cone14_mesh.complex.chi / cone14_mesh.area
    scale = np.sqrt(-c)
    return MeshMetric(cone14_mesh.complex, cone14_mesh.lengths * scale)
