"""Gromov-hyperbolic geometry over an abstract isometric action.

Everything in this module sees a group action on a metric space only through
an :class:`ActionOracle`: opaque group elements with identity, composition
and inversion, a basepoint ``x``, and the displacement ``d(x, g.x)``.  All
pairwise orbit distances derive from ``d(g.x, h.x) = d(x, (g^-1 h).x)``.

Concrete models (the free-group tree, the degree metric on plane Cremona
maps, monomial maps) plug in by subclassing the oracle; exact models override
the budgeted estimators with closed forms.
"""

from __future__ import annotations

import math
from abc import ABC, abstractmethod
from dataclasses import dataclass
from enum import Enum

from .errors import InputError

TOLERANCE = 1e-9

#: Budgeted translation-length estimates at or above this value are classified
#: loxodromic.  Every loxodromic element appearing in the concrete models has
#: translation length >= log((1+sqrt(5))/2) ~ 0.48, so the margin is wide.
LOXODROMIC_THRESHOLD = 0.05


class IsometryClass(Enum):
    ELLIPTIC = "elliptic"
    PARABOLIC = "parabolic"
    LOXODROMIC = "loxodromic"
    UNDETERMINED = "undetermined"


class ActionOracle(ABC):
    """A group acting by isometries, seen from the orbit of one basepoint."""

    @abstractmethod
    def identity(self): ...

    @abstractmethod
    def multiply(self, g, h): ...

    @abstractmethod
    def inverse(self, g): ...

    @abstractmethod
    def displacement(self, g) -> float:
        """d(x, g.x) for the fixed basepoint x."""

    def pairwise_distance(self, g, h) -> float:
        return self.displacement(self.multiply(self.inverse(g), h))

    def translation_length_estimate(self, g, budget: int) -> float:
        """min over 1 <= m <= budget of d(x, g^m.x)/m.

        The displacement sequence is subadditive, so by Fekete's lemma the
        running minimum decreases to the true translation length; the error
        is at most d(x, g.x)/budget.  Exact models override.
        """
        if budget < 1:
            raise InputError("budget must be >= 1")
        best = math.inf
        p = g
        for m in range(1, budget + 1):
            best = min(best, self.displacement(p) / m)
            if m < budget:
                p = self.multiply(p, g)
        return best

    def classify(self, g, budget: int) -> IsometryClass:
        """Heuristic trichotomy from the growth of d(x, g^m.x).

        Bounded displacement -> elliptic, unbounded with estimate below the
        loxodromic threshold -> parabolic, estimate at or above it ->
        loxodromic.  Budget exhaustion in the ambiguous band returns
        UNDETERMINED; exact models never do.
        """
        if budget < 4:
            raise InputError("classification budget must be >= 4")
        track = []
        p = g
        for _ in range(budget):
            track.append(self.displacement(p))
            p = self.multiply(p, g)
        estimate = min(d / (m + 1) for m, d in enumerate(track))
        if estimate >= LOXODROMIC_THRESHOLD:
            return IsometryClass.LOXODROMIC
        half = budget // 2
        growing = max(track[half:]) > max(track[:half]) + TOLERANCE
        if not growing:
            return IsometryClass.ELLIPTIC
        if estimate < LOXODROMIC_THRESHOLD / 2:
            return IsometryClass.PARABOLIC
        return IsometryClass.UNDETERMINED


def gromov_product(d_xy: float, d_xz: float, d_yz: float) -> float:
    """(d(x,y) + d(x,z) - d(y,z)) / 2 from the three pairwise distances.

    Inputs must be nonnegative and satisfy the triangle inequality up to the
    floating tolerance; a violation means the distance oracle is broken.
    """
    for d in (d_xy, d_xz, d_yz):
        if d < -TOLERANCE:
            raise InputError(f"negative distance {d}")
    if (
        d_yz > d_xy + d_xz + TOLERANCE
        or d_xy > d_xz + d_yz + TOLERANCE
        or d_xz > d_xy + d_yz + TOLERANCE
    ):
        raise InputError(
            f"triangle inequality violated: ({d_xy}, {d_xz}, {d_yz})"
        )
    value = (d_xy + d_xz - d_yz) / 2.0
    return 0.0 if value < 0.0 else value


def orbit_gromov_product(oracle: ActionOracle, g, h) -> float:
    """Gromov product <g.x, h.x>_x."""
    return gromov_product(
        oracle.displacement(g),
        oracle.displacement(h),
        oracle.pairwise_distance(g, h),
    )


@dataclass(frozen=True)
class Shadow:
    """S_source(target, slack): orbit points whose Gromov product with the
    target, seen from the source, is at least d(source, target) - slack.

    The distance parameter ``d(source, target) - slack`` may be negative, in
    which case the shadow is everything.
    """

    source: object
    target: object
    slack: float

    def __post_init__(self):
        if self.slack < 0:
            raise InputError("shadow slack must be >= 0")


def shadow_distance_parameter(oracle: ActionOracle, shadow: Shadow) -> float:
    return oracle.pairwise_distance(shadow.source, shadow.target) - shadow.slack


def shadow_contains(oracle: ActionOracle, shadow: Shadow, z) -> bool:
    """Membership test <z, target>_source >= d(source, target) - slack."""
    d_st = oracle.pairwise_distance(shadow.source, shadow.target)
    d_sz = oracle.pairwise_distance(shadow.source, z)
    d_tz = oracle.pairwise_distance(shadow.target, z)
    product = gromov_product(d_st, d_sz, d_tz)
    return product >= d_st - shadow.slack - TOLERANCE


def translation_length_estimate(oracle: ActionOracle, g, budget: int) -> float:
    return oracle.translation_length_estimate(g, budget)


def classify_isometry(oracle: ActionOracle, g, budget: int) -> IsometryClass:
    return oracle.classify(g, budget)


def four_point_delta(oracle: ActionOracle, quadruples) -> float:
    """Empirical lower bound for the hyperbolicity constant.

    For each quadruple of orbit points, the two largest of the three pair-sum
    combinations differ by at most 2*delta; the defect (largest - second
    largest)/2 is therefore a certified lower bound for delta.  Trees give 0.
    """
    quadruples = list(quadruples)
    if not quadruples:
        raise InputError("empty quadruple sample")
    worst = 0.0
    for quad in quadruples:
        if len(quad) != 4:
            raise InputError("each sample must contain four orbit elements")
        g0, g1, g2, g3 = quad
        s01 = oracle.pairwise_distance(g0, g1) + oracle.pairwise_distance(g2, g3)
        s02 = oracle.pairwise_distance(g0, g2) + oracle.pairwise_distance(g1, g3)
        s03 = oracle.pairwise_distance(g0, g3) + oracle.pairwise_distance(g1, g2)
        a, b, _ = sorted((s01, s02, s03), reverse=True)
        worst = max(worst, (a - b) / 2.0)
    return worst


def translation_residual(oracle: ActionOracle, g, budget: int = 8) -> float:
    """Diagnostic residual d(x,gx) - 2<gx, g^-1 x>_x - tau(g).

    In a delta-hyperbolic space the residual is O(delta); it is reported,
    never asserted, since the implied constant is not pinned down.
    """
    tau = oracle.translation_length_estimate(g, budget)
    product = orbit_gromov_product(oracle, g, oracle.inverse(g))
    return oracle.displacement(g) - 2.0 * product - tau
