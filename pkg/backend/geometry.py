"""
Asymptotic geometry of the edge-triangle region

Extreme points v_k of the hull of the region R, critical directions o_k,
facet slopes a_k, the Razborov and Kruskal-Katona boundary curves, and the
classifier assigning a direction to its normal cone.
"""
import logging
import math
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from numbers import Rational, Real
from typing import Dict, List, Optional, Tuple, Union

import numpy as np

from errors import DomainError
from graph_core import DensityPoint

logger = logging.getLogger(__name__)

Number = Union[int, float, Fraction]

NEAR_CRITICAL_TOL = 1e-12


def _is_exact(*values: Number) -> bool:
    return all(isinstance(v, Rational) for v in values)


def _exact(value: Number) -> Fraction:
    # Fraction(float) is the exact binary value of the float
    return Fraction(value)


@dataclass(frozen=True)
class Direction:
    """A nonzero vector in the parameter plane"""
    x: Number
    y: Number

    def __post_init__(self):
        if self.x == 0 and self.y == 0:
            raise DomainError("direction must be nonzero")
        for value in (self.x, self.y):
            if not isinstance(value, Real) or not math.isfinite(value):
                raise DomainError(f"direction components must be finite reals, got {value!r}")

    @property
    def exact(self) -> bool:
        return _is_exact(self.x, self.y)

    def scaled(self, c: Number) -> "Direction":
        return Direction(self.x * c, self.y * c)

    def dot(self, point: Tuple[Number, Number]) -> Number:
        return self.x * point[0] + self.y * point[1]

    def as_floats(self) -> Tuple[float, float]:
        return float(self.x), float(self.y)


@dataclass(frozen=True)
class ExtremePoint:
    """v_k for finite k, or the limit point (1,1) when k is None"""
    k: Optional[int]
    point: DensityPoint

    @property
    def label(self) -> str:
        return "(1,1)" if self.k is None else f"v_{self.k}"


class RayKind(str, Enum):
    INTERIOR_CONE = "InteriorCone"
    INTERIOR_CONE_AT_ONE = "InteriorConeAtOne"
    CRITICAL_RAY = "CriticalRay"


@dataclass(frozen=True)
class RayClassification:
    """
    Which normal cone of the hull contains a direction

    near_critical marks float inputs whose two best extreme points tie up to
    relative tolerance; those are reported as InteriorCone of the better one.
    """
    kind: RayKind
    k: Optional[int] = None
    near_critical: bool = False

    def label(self) -> str:
        if self.kind == RayKind.INTERIOR_CONE_AT_ONE:
            return self.kind.value
        return f"{self.kind.value}({self.k})"

    def to_dict(self) -> Dict:
        return {"variant": self.kind.value, "k": self.k, "near_critical": self.near_critical}


def _check_k(k: int, lowest: int = 0) -> None:
    if not isinstance(k, int) or k < lowest:
        raise DomainError(f"index k must be an integer >= {lowest}, got {k!r}")


def v_k(k: int) -> DensityPoint:
    """Densities of the Turan graphon with k classes: (k/(k+1), k(k-1)/(k+1)^2)"""
    _check_k(k)
    return DensityPoint(Fraction(k, k + 1), Fraction(k * (k - 1), (k + 1) ** 2))


def extreme_point(k: Optional[int]) -> ExtremePoint:
    if k is None:
        return ExtremePoint(None, DensityPoint(Fraction(1), Fraction(1)))
    return ExtremePoint(k, v_k(k))


def facet_slope(k: int) -> Fraction:
    """k(3k+5)/((k+1)(k+2)), the slope of the segment from v_k to v_{k+1}"""
    _check_k(k)
    return Fraction(k * (3 * k + 5), (k + 1) * (k + 2))


def a_k(k: int) -> Fraction:
    return -facet_slope(k)


def o_k(k: int) -> Direction:
    """Outer normal exposing the segment [v_k, v_{k+1}] ((1,1) - v_0 for k = -1)"""
    _check_k(k, lowest=-1)
    if k == -1:
        return Direction(Fraction(-1), Fraction(1))
    if k == 0:
        return Direction(Fraction(0), Fraction(-1))
    return Direction(Fraction(1), -1 / facet_slope(k))


def o_minus_one_n(n: int) -> Direction:
    """Finite-n direction exposing the segment between the empty and complete graph"""
    if n < 3:
        raise DomainError(f"o_(-1,n) needs n >= 3, got {n}")
    return Direction(Fraction(-1), Fraction(n, n - 2))


def l_k(k: int) -> Direction:
    """Unit vector along (1, k(3k+5)/((k+1)(k+2))), orthogonal to o_k"""
    _check_k(k, lowest=1)
    slope = float(facet_slope(k))
    norm = math.hypot(1.0, slope)
    return Direction(1.0 / norm, slope / norm)


def hyperplane_side(k: int, beta: Tuple[Number, Number]) -> int:
    """
    Sign of <l_k, beta> as +1, 0 or -1

    Computed exactly on (1, slope_k), a positive multiple of l_k; float
    inputs are taken at their exact binary value.
    """
    _check_k(k, lowest=1)
    value = _exact(beta[0]) + facet_slope(k) * _exact(beta[1])
    return (value > 0) - (value < 0)


def reduced_parameter(k: int, beta: Tuple[Number, Number]) -> Fraction:
    """<(1, slope_k), beta> exactly: the only coordinate of beta the two-point family sees"""
    _check_k(k, lowest=1)
    return _exact(beta[0]) + facet_slope(k) * _exact(beta[1])


def _perfect_sqrt(value: Fraction) -> Optional[Fraction]:
    if value < 0:
        return None
    num, den = value.numerator, value.denominator
    rn, rd = math.isqrt(num), math.isqrt(den)
    if rn * rn == num and rd * rd == den:
        return Fraction(rn, rd)
    return None


def _check_unit(e: Number) -> None:
    if not (0 <= e <= 1):
        raise DomainError(f"edge density must lie in [0, 1], got {e!r}")


def razborov_segment_index(e: Number) -> int:
    """Segment k >= 2 with e in [(k-1)/k, k/(k+1)] (left segment at shared endpoints); 1 for e <= 1/2"""
    _check_unit(e)
    if e <= Fraction(1, 2):
        return 1
    if e == 1:
        raise DomainError("e = 1 is the limit point and lies on no segment")
    ratio = _exact(e) / (1 - _exact(e))
    return max(2, math.ceil(ratio))


def razborov_segment(e: Number, k: int) -> Number:
    """
    The k-th segment formula of the Razborov lower boundary evaluated at e

    Exact Fraction when e is rational and the radical is a perfect square,
    float otherwise.
    """
    if k < 2:
        return Fraction(0) if _is_exact(e) else 0.0
    if _is_exact(e):
        radicand = k * (k - _exact(e) * (k + 1))
        root = _perfect_sqrt(radicand)
        if root is not None:
            return (k - 1) * (k - 2 * root) * (k + root) ** 2 / Fraction(k * k * (k + 1) ** 2)
        e = float(e)
    radicand = k * (k - e * (k + 1))
    root = math.sqrt(max(radicand, 0.0))
    return (k - 1) * (k - 2 * root) * (k + root) ** 2 / (k * k * (k + 1) ** 2)


def razborov_lower(e: Number) -> Number:
    """Minimal triangle density at edge density e"""
    _check_unit(e)
    if e == 1:
        return Fraction(1) if _is_exact(e) else 1.0
    return razborov_segment(e, razborov_segment_index(e))


def razborov_slope(e: Number) -> float:
    """Derivative of the lower boundary inside its segment (0 below 1/2)"""
    k = razborov_segment_index(e)
    if k < 2:
        return 0.0
    root = math.sqrt(max(k * (k - float(e) * (k + 1)), 0.0))
    return 3 * (k - 1) / (k * (k + 1)) * (k + root)


def razborov_lower_array(e: np.ndarray) -> np.ndarray:
    """Vectorised razborov_lower for dense grids of floats in [0, 1)"""
    e = np.asarray(e, dtype=float)
    if np.any((e < 0) | (e > 1)):
        raise DomainError("edge densities must lie in [0, 1]")
    out = np.zeros_like(e)
    upper = e > 0.5
    interior = upper & (e < 1.0)
    ei = e[interior]
    k = np.maximum(2.0, np.ceil(ei / (1.0 - ei)))
    root = np.sqrt(np.maximum(k * (k - ei * (k + 1)), 0.0))
    out[interior] = (k - 1) * (k - 2 * root) * (k + root) ** 2 / (k * k * (k + 1) ** 2)
    out[e >= 1.0] = 1.0
    return out


def kk_upper(e: Number) -> Number:
    """Kruskal-Katona upper bound e^(3/2), exact when e is a rational square"""
    _check_unit(e)
    if _is_exact(e):
        root = _perfect_sqrt(_exact(e))
        if root is not None:
            return root ** 3
    return float(e) ** 1.5


def _score(x: Fraction, y: Fraction, k: int) -> Fraction:
    v = v_k(k)
    return x * v.e + y * v.t


def _classify_exact(x: Fraction, y: Fraction) -> Tuple[RayKind, Optional[int], Tuple[Fraction, Fraction]]:
    """
    Argmax of <o, .> over {v_k} and (1,1)

    With s = 1/(k+1), <o, v_k> = (x+y) - (x+3y)s + 2y s^2 and (1,1) sits at s = 0.
    Returns the kind, index and the two best scores (best, runner-up).
    """
    at_one = x + y
    if y > 0 or (y == 0 and x != 0):
        # convex (or linear) in s: the optimum is an endpoint s = 0 or s = 1
        if at_one > 0:
            return RayKind.INTERIOR_CONE_AT_ONE, None, (at_one, Fraction(0))
        if at_one < 0:
            return RayKind.INTERIOR_CONE, 0, (Fraction(0), at_one)
        return RayKind.CRITICAL_RAY, -1, (Fraction(0), Fraction(0))
    # y < 0: concave in s
    if x + 3 * y >= 0:
        return RayKind.INTERIOR_CONE_AT_ONE, None, (at_one, at_one)
    s_star = (x + 3 * y) / (4 * y)
    k_low = max(0, math.floor(1 / s_star - 1))
    low, high = _score(x, y, k_low), _score(x, y, k_low + 1)
    if low == high:
        return RayKind.CRITICAL_RAY, k_low, (low, high)
    if low > high:
        return RayKind.INTERIOR_CONE, k_low, (low, high)
    return RayKind.INTERIOR_CONE, k_low + 1, (high, low)


def classify_direction(o: Direction) -> RayClassification:
    """
    Normal cone of the hull P containing the direction o

    Exact for rational inputs. Float inputs are classified exactly at their
    binary value; a runner-up within relative 1e-12 of the best extreme point
    is flagged as near critical.
    """
    x, y = _exact(o.x), _exact(o.y)
    kind, k, (best, second) = _classify_exact(x, y)
    if kind == RayKind.CRITICAL_RAY or o.exact:
        return RayClassification(kind, k)
    if kind == RayKind.INTERIOR_CONE_AT_ONE and y < 0:
        # supremum approached by v_k as k grows; no finite competitor
        return RayClassification(kind, k)
    scale = max(abs(best), abs(second), Fraction(abs(x) + abs(y)))
    if abs(best - second) <= Fraction(NEAR_CRITICAL_TOL) * scale:
        logger.warning("direction (%r, %r) is within tolerance of a critical ray", o.x, o.y)
        return RayClassification(kind, k, near_critical=True)
    return RayClassification(kind, k)


def argmax_extreme_points(o: Direction) -> List[ExtremePoint]:
    """Extreme points maximising <o, .>; two on a critical ray, (1,1) for the cone at one"""
    c = classify_direction(o)
    if c.kind == RayKind.INTERIOR_CONE_AT_ONE:
        return [extreme_point(None)]
    if c.kind == RayKind.INTERIOR_CONE:
        return [extreme_point(c.k)]
    if c.k == -1:
        return [extreme_point(0), extreme_point(None)]
    return [extreme_point(c.k), extreme_point(c.k + 1)]


@dataclass(frozen=True)
class BoundaryRow:
    e: Fraction
    lower: Number
    upper: Number
    connection_k: Optional[int] = None


def _connection_index(e: Fraction) -> Optional[int]:
    # e = k/(k+1) iff 1/(1-e) is an integer
    if e == 1:
        return None
    inv = 1 / (1 - e)
    if inv.denominator == 1:
        return inv.numerator - 1
    return None


def boundary_samples(resolution: int) -> List[BoundaryRow]:
    """
    Evenly spaced samples of both boundary curves of R

    Args:
        resolution: number of e values, including both ends

    Returns:
        rows with exact e; rows at e = k/(k+1) carry connection_k = k
    """
    if resolution < 2:
        raise DomainError(f"resolution must be >= 2, got {resolution}")
    rows = []
    for i in range(resolution):
        e = Fraction(i, resolution - 1)
        rows.append(BoundaryRow(e, razborov_lower(e), kk_upper(e), _connection_index(e)))
    return rows


def cone_complex(k_max: int) -> List[Dict]:
    """
    Normal cones C_k of the hull for k = 0..k_max as JSON-ready records

    Cone C_k has apex v_k and is generated by o_{k-1} and o_k.
    """
    _check_k(k_max)
    records = []
    for k in range(k_max + 1):
        apex = v_k(k)
        records.append({
            "k": k,
            "apex": [float(apex.e), float(apex.t)],
            "apex_exact": [str(apex.e), str(apex.t)],
            "generators": [list(o_k(j).as_floats()) for j in (k - 1, k)],
            "generators_exact": [[str(o_k(j).x), str(o_k(j).y)] for j in (k - 1, k)],
        })
    return records
