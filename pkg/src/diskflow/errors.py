"""Exception hierarchy shared by all diskflow modules."""

from __future__ import annotations


class DiskflowError(Exception):
    """Base class for every error raised by this package."""


# -- combinatorics ------------------------------------------------------------

class UnmatchedSide(DiskflowError):
    """A face side is missing from the gluing."""


class SelfGluedSide(DiskflowError):
    """A side is paired with itself."""


class DuplicateSide(DiskflowError):
    """A side appears in more than one gluing pair."""


class UnknownVertex(DiskflowError):
    """Vertex index outside the complex."""


class ComplexMismatch(DiskflowError):
    """Two objects refer to different triangulations."""


# -- angle systems ------------------------------------------------------------

class TooLarge(DiskflowError):
    """Instance exceeds the brute-force enumeration limit."""


class Infeasible(DiskflowError):
    """No negatively curved Delaunay representative exists.

    Carries the certificate margin (the maximized interior margin, <= 0 or
    below the feasibility floor) as ``margin``.
    """

    def __init__(self, message: str, margin: float | None = None):
        super().__init__(message)
        self.margin = margin


# -- hyperbolic triangles -----------------------------------------------------

class NotHyperbolic(DiskflowError):
    """Angle sum is not strictly below pi."""


class DegenerateAngle(DiskflowError):
    """An angle is outside (0, pi) or too close to the boundary."""


class NotInDomain(DiskflowError):
    """Some face of the angle system is not a valid hyperbolic triangle."""


# -- uniformization -----------------------------------------------------------

class LengthMismatch(DiskflowError):
    """Edge lengths computed from the two incident faces disagree."""


class NoConvergence(DiskflowError):
    """Iteration hit its cap before reaching tolerance.

    ``best`` holds the last iterate, ``trace`` the per-iteration records.
    """

    def __init__(self, message: str, best=None, trace=None):
        super().__init__(message)
        self.best = best
        self.trace = trace


# -- stochastic geometry ------------------------------------------------------

class DegenerateSample(DiskflowError):
    """Sample contains a (near-)cocircular quadruple or coincident points."""


class DegenerateTriple(DiskflowError):
    """Three points do not determine a circumdisk."""


class BadDelta(DiskflowError):
    """Decision radius outside the admissible range."""


# -- mesh metrics and the flow -------------------------------------------------

class SolveFailure(DiskflowError):
    """Linear solve for the conformal factor failed."""


class OutOfDomain(DiskflowError):
    """Conformal factor leaves the negative-curvature domain.

    ``vertex`` names the worst offender.
    """

    def __init__(self, message: str, vertex: int | None = None):
        super().__init__(message)
        self.vertex = vertex


class ZeroCurvatureVertex(DiskflowError):
    """Entropy is undefined where the conformal curvature vanishes."""
