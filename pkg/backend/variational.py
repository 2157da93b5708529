"""
Reduced scalar variational problem and the asymptotic classification of
parameter lines beta_1 = a * beta_2 + b as |beta_2| grows.
"""
import logging
import math
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from numbers import Rational
from typing import Dict, List, Optional, Tuple, Union

import numpy as np
from scipy.optimize import brentq
from scipy.special import expit, xlogy

from errors import DomainError
from geometry import (
    Direction,
    RayClassification,
    RayKind,
    a_k,
    classify_direction,
    hyperplane_side,
)

logger = logging.getLogger(__name__)

Number = Union[int, float, Fraction]

CRITICAL_TOL = 1e-12
OBJECTIVE_TIE_TOL = 1e-10
DEDUP_TOL = 1e-8


def entropy(u: Number) -> float:
    """I(u) = (u ln u + (1-u) ln(1-u)) / 2 with 0 ln 0 = 0"""
    if not (0 <= u <= 1):
        raise DomainError(f"u must lie in [0, 1], got {u!r}")
    u = float(u)
    return 0.5 * float(xlogy(u, u) + xlogy(1.0 - u, 1.0 - u))


def objective(u: float, beta1: float, beta2: float) -> float:
    return beta1 * u + beta2 * u ** 3 - entropy(u)


def _entropy_array(u: np.ndarray) -> np.ndarray:
    return 0.5 * (xlogy(u, u) + xlogy(1.0 - u, 1.0 - u))


@dataclass(frozen=True)
class ScalarSolution:
    """Global maximizers of beta1*u + beta2*u^3 - I(u) on [0, 1]"""
    maximizers: Tuple[float, ...]
    value: float
    stationary_points: int


def solve_scalar(beta1: float, beta2: float, subintervals: int = 10_000) -> ScalarSolution:
    """
    All global maximizers of the reduced edge-triangle objective

    Stationary points are found in logit coordinates x = ln(u/(1-u)), where
    the condition beta1 + 3*beta2*u^2 = x/2 has every root inside a bracket
    of width 6|beta2|; the bracket is cut into subintervals, refined near
    x = 0 where the sigmoid bends, and sign changes are polished with brentq.
    """
    beta1, beta2 = float(beta1), float(beta2)
    if not (math.isfinite(beta1) and math.isfinite(beta2)):
        raise DomainError("solve_scalar needs finite parameters")

    def stationarity(x: float) -> float:
        return beta1 + 3.0 * beta2 * float(expit(x)) ** 2 - 0.5 * x

    lo = 2.0 * (beta1 + min(0.0, 3.0 * beta2)) - 1.0
    hi = 2.0 * (beta1 + max(0.0, 3.0 * beta2)) + 1.0
    grid = np.union1d(np.linspace(lo, hi, subintervals + 1), np.linspace(-40.0, 40.0, 2001))
    grid = grid[(grid >= lo) & (grid <= hi)]
    values = beta1 + 3.0 * beta2 * expit(grid) ** 2 - 0.5 * grid

    roots = []
    for i in np.flatnonzero(values == 0.0):
        roots.append(float(grid[i]))
    for i in np.flatnonzero(np.sign(values[:-1]) * np.sign(values[1:]) < 0):
        roots.append(brentq(stationarity, grid[i], grid[i + 1], xtol=1e-14, rtol=4 * np.finfo(float).eps))

    candidates = [0.0, 1.0] + [float(expit(x)) for x in roots]
    scores = [objective(u, beta1, beta2) for u in candidates]
    best = max(scores)
    winners = sorted(u for u, s in zip(candidates, scores) if best - s <= OBJECTIVE_TIE_TOL)
    unique = []
    for u in winners:
        if not unique or u - unique[-1] > DEDUP_TOL:
            unique.append(u)
    return ScalarSolution(maximizers=tuple(unique), value=best, stationary_points=len(roots))


def grid_maximizer(beta1: float, beta2: float, points: int = 10 ** 6) -> Tuple[float, float]:
    """Brute-force (u, value) of the best grid point; an oracle for solve_scalar"""
    u = np.linspace(0.0, 1.0, points)
    values = beta1 * u + beta2 * u ** 3 - _entropy_array(u)
    i = int(np.argmax(values))
    return float(u[i]), float(values[i])


class ClassKind(str, Enum):
    EMPTY = "Empty"
    COMPLETE = "Complete"
    EMPTY_OR_COMPLETE = "EmptyOrComplete"
    TURAN = "TuranClass"
    TURAN_PAIR = "TuranPair"
    DILUTED_BIPARTITE = "DilutedBipartite"


@dataclass(frozen=True)
class ExtremalClass:
    """Predicted limiting structure of a typical graph"""
    kind: ClassKind
    r: Optional[int] = None
    p: Optional[float] = None

    def __post_init__(self):
        if self.kind == ClassKind.TURAN and (self.r is None or self.r < 2):
            raise DomainError(f"TuranClass needs r >= 2, got {self.r}")
        if self.kind == ClassKind.DILUTED_BIPARTITE and not (self.p is not None and 0 < self.p < 1):
            raise DomainError(f"DilutedBipartite needs p in (0, 1), got {self.p}")

    @property
    def class_counts(self) -> Tuple[int, ...]:
        """Turan class counts compatible with this prediction (1 = empty graph)"""
        if self.kind == ClassKind.TURAN:
            return (self.r,)
        if self.kind == ClassKind.TURAN_PAIR:
            return (self.r, self.r + 1)
        if self.kind == ClassKind.EMPTY:
            return (1,)
        if self.kind == ClassKind.DILUTED_BIPARTITE:
            return (2,)
        return ()

    def label(self) -> str:
        if self.kind == ClassKind.TURAN:
            return f"TuranClass({self.r})"
        if self.kind == ClassKind.TURAN_PAIR:
            return f"TuranPair({self.r},{self.r + 1})"
        if self.kind == ClassKind.DILUTED_BIPARTITE:
            return f"DilutedBipartite({self.p:.12g})"
        return self.kind.value

    def parameters(self) -> Dict:
        if self.kind == ClassKind.TURAN:
            return {"r": self.r}
        if self.kind == ClassKind.TURAN_PAIR:
            return {"r": [self.r, self.r + 1]}
        if self.kind == ClassKind.DILUTED_BIPARTITE:
            return {"p": self.p}
        return {}


def turan_class(r: int) -> ExtremalClass:
    return ExtremalClass(ClassKind.TURAN, r=r)


def retention_probability(beta1: Number) -> float:
    """e^(2 beta1) / (1 + e^(2 beta1)), the independent-edge probability"""
    return float(expit(2.0 * float(beta1)))


@dataclass(frozen=True)
class Line:
    """beta_1 = a * beta_2 + b with beta_2 -> limit * infinity"""
    a: Number
    b: Number
    limit: int

    def __post_init__(self):
        if self.limit not in (1, -1):
            raise DomainError(f"limit must be +1 or -1, got {self.limit!r}")
        if not (math.isfinite(self.a) and math.isfinite(self.b)):
            raise DomainError("line slope and intercept must be finite")

    @property
    def exact(self) -> bool:
        return isinstance(self.a, Rational) and isinstance(self.b, Rational)


def _sign(value: Number) -> int:
    return (value > 0) - (value < 0)


def _slope_bracket(a: Fraction) -> int:
    """Largest k >= 0 with a_k >= a, for -3 < a <= 0"""
    lo, hi = 0, 1
    while a_k(hi) >= a:
        hi *= 2
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if a_k(mid) >= a:
            lo = mid
        else:
            hi = mid
    return lo


def nearest_critical_slope(a: Number) -> Tuple[int, float]:
    """
    Index and distance of the critical slope a_k closest to a

    Args:
        a: slope in (-3, 0]

    Returns:
        (k, |a - a_k|)
    """
    exact_a = Fraction(a)
    if not (-3 < exact_a <= 0):
        raise DomainError(f"critical slopes lie in (-3, 0], got a={a!r}")
    k = _slope_bracket(exact_a)
    left, right = exact_a - a_k(k + 1), a_k(k) - exact_a
    if right <= left:
        return k, float(right)
    return k + 1, float(left)


def _critical_index(a: Number, exact: bool) -> Tuple[int, bool]:
    """(k, is_critical) for a in (-3, 0): either a == a_k or a_k > a > a_{k+1}"""
    k_near, distance = nearest_critical_slope(a)
    if exact:
        if a_k(k_near) == Fraction(a):
            return k_near, True
    elif distance < CRITICAL_TOL:
        return k_near, True
    return _slope_bracket(Fraction(a)), False


def classify_line(line: Line) -> ExtremalClass:
    """
    Limiting structure along beta_1 = a*beta_2 + b

    beta_2 -> +inf decides between empty and complete at the slope a = -1;
    beta_2 -> -inf walks the Turan classes through the critical slopes a_k.
    Float slopes within 1e-12 of a critical value are treated as critical.
    """
    a, b = line.a, line.b
    exact = line.exact
    b_sign = _sign(b)

    if line.limit > 0:
        gap = Fraction(a) + 1
        if not exact and abs(gap) < CRITICAL_TOL:
            gap = Fraction(0)
        if gap > 0 or (gap == 0 and b_sign > 0):
            return ExtremalClass(ClassKind.COMPLETE)
        if gap < 0 or b_sign < 0:
            return ExtremalClass(ClassKind.EMPTY)
        return ExtremalClass(ClassKind.EMPTY_OR_COMPLETE)

    zero_slope = a == 0 or (not exact and abs(a) < CRITICAL_TOL)
    if zero_slope:
        return ExtremalClass(ClassKind.DILUTED_BIPARTITE, p=retention_probability(b))
    if a > 0:
        return ExtremalClass(ClassKind.EMPTY)
    if a <= -3:
        return ExtremalClass(ClassKind.COMPLETE)

    k, critical = _critical_index(a, exact)
    if not critical:
        return turan_class(k + 2)
    if b_sign > 0:
        return turan_class(k + 2)
    if b_sign < 0:
        return turan_class(k + 1)
    return ExtremalClass(ClassKind.TURAN_PAIR, r=k + 1)


def classify_horizontal(limit: int) -> ExtremalClass:
    """beta_2 fixed and beta_1 -> limit * infinity"""
    if limit not in (1, -1):
        raise DomainError(f"limit must be +1 or -1, got {limit!r}")
    return ExtremalClass(ClassKind.COMPLETE if limit > 0 else ClassKind.EMPTY)


def razborov_minimizer(a: Number) -> Tuple[Fraction, ...]:
    """
    Edge densities minimising a*e + razborov_lower(e)

    The minimum sits at connection points e_k = k/(k+1): e_{k+1} when
    a_k > a > a_{k+1}, both e_k and e_{k+1} when a = a_k, and the limit
    e = 1 when a <= -3.
    """
    if a >= 0:
        raise DomainError(f"razborov_minimizer needs a < 0, got a={a!r}")
    if a <= -3:
        return (Fraction(1),)
    k, critical = _critical_index(a, isinstance(a, Rational))
    if critical:
        return Fraction(k, k + 1), Fraction(k + 1, k + 2)
    return (Fraction(k + 1, k + 2),)


def line_report(line: Line) -> Dict:
    """JSON-ready classification of a line, including the distance to the nearest a_k"""
    result = classify_line(line)
    report = {
        "input": {"a": _json_number(line.a), "b": _json_number(line.b), "limit": "+inf" if line.limit > 0 else "-inf"},
        "class": result.label(),
        "parameters": result.parameters(),
    }
    if -3 < line.a <= 0:
        k, distance = nearest_critical_slope(line.a)
        report["nearest_critical"] = {"k": k, "a_k": str(a_k(k)), "distance": distance}
    return report


def _json_number(value: Number):
    if isinstance(value, Fraction) and value.denominator != 1:
        return str(value)
    return float(value) if not isinstance(value, int) else value


@dataclass(frozen=True)
class DirectionPrediction:
    """Classification of a direction ray plus the structure it predicts"""
    classification: RayClassification
    extremal: ExtremalClass
    side: Optional[int] = None

    def to_dict(self) -> Dict:
        out = {"classification": self.classification.label(), "ray": self.classification.to_dict()}
        if self.side is not None:
            out["side"] = {1: "+", 0: "0", -1: "-"}[self.side]
        out["class"] = self.extremal.label()
        out["parameters"] = self.extremal.parameters()
        return out


def predict_direction(o: Direction, beta: Optional[Tuple[Number, Number]] = None) -> DirectionPrediction:
    """
    Structure of a typical graph along beta + r*o as r grows

    Interior cones give a single Turan class; critical rays need beta to
    resolve between the two structures of the exposed facet.
    """
    ray = classify_direction(o)
    if ray.kind == RayKind.INTERIOR_CONE_AT_ONE:
        return DirectionPrediction(ray, ExtremalClass(ClassKind.COMPLETE))
    if ray.kind == RayKind.INTERIOR_CONE:
        if ray.k == 0:
            return DirectionPrediction(ray, ExtremalClass(ClassKind.EMPTY))
        return DirectionPrediction(ray, turan_class(ray.k + 1))

    k = ray.k
    if k == -1:
        if beta is None:
            return DirectionPrediction(ray, ExtremalClass(ClassKind.EMPTY_OR_COMPLETE))
        # the exponent is beta1*n(n-1) + beta2*(n-1)(n-2); on beta1 + beta2 = 0 it reduces to 2*beta1*(n-1)
        s = _sign(Fraction(beta[0]) + Fraction(beta[1])) or _sign(Fraction(beta[0]))
        kind = {1: ClassKind.COMPLETE, -1: ClassKind.EMPTY, 0: ClassKind.EMPTY_OR_COMPLETE}[s]
        return DirectionPrediction(ray, ExtremalClass(kind), side=s)
    if k == 0:
        beta1 = 0.0 if beta is None else beta[0]
        return DirectionPrediction(ray, ExtremalClass(ClassKind.DILUTED_BIPARTITE, p=retention_probability(beta1)))
    if beta is None:
        return DirectionPrediction(ray, ExtremalClass(ClassKind.TURAN_PAIR, r=k + 1))
    side = hyperplane_side(k, beta)
    r = k + 1 if side < 0 else k + 2
    return DirectionPrediction(ray, turan_class(r), side=side)


def critical_slope_table(k_max: int) -> List[Dict]:
    return [{"k": k, "a_k": str(a_k(k)), "value": float(a_k(k))} for k in range(k_max + 1)]
