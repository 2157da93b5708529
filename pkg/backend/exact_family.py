"""
Finite-n exponential family of the edge-triangle model

Exact (E, T) histograms for small n by Gray-code enumeration, closed-form
Turan counts for any n, the closure families reached along critical
directions, and total-variation convergence checks.
"""
import logging
import math
from collections import Counter
from concurrent.futures import ProcessPoolExecutor, as_completed
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations
from typing import Dict, Iterable, List, Mapping, Optional, Sequence, Tuple, Union

import numpy as np
from scipy.special import expit, gammaln, logsumexp

from config import get_settings
from errors import DomainError, FeasibilityError
from geometry import (
    Direction,
    RayKind,
    classify_direction,
    o_k,
    reduced_parameter,
)
from graph_core import DensityPoint, Graph, density_from_counts, turan_class_sizes, turan_counts

logger = logging.getLogger(__name__)

Key = Tuple[int, int]
Beta = Tuple[float, float]
Distribution = Mapping[Key, float]

HARD_CAP = 8


@dataclass(frozen=True)
class SupportTable:
    """
    Histogram of labeled graphs on n nodes by (edge count, triangle count)

    counts maps (E, T) to the exact number of graphs; density points are
    derived on demand as (2E/n^2, 6T/n^3).
    """
    n: int
    counts: Dict[Key, int]

    def point(self, key: Key) -> DensityPoint:
        return density_from_counts(self.n, key[0], key[1])

    def entries(self) -> Dict[DensityPoint, int]:
        return {self.point(key): count for key, count in sorted(self.counts.items())}

    def total(self) -> int:
        return sum(self.counts.values())

    def keys(self) -> List[Key]:
        return sorted(self.counts)

    def count_at(self, point: DensityPoint) -> int:
        e_count = point.e * self.n * self.n / 2
        t_count = point.t * self.n ** 3 / 6
        if e_count.denominator != 1 or t_count.denominator != 1:
            return 0
        return self.counts.get((int(e_count), int(t_count)), 0)

    def restrict(self, keys: Iterable[Key]) -> "SupportTable":
        keys = set(keys)
        return SupportTable(self.n, {key: c for key, c in self.counts.items() if key in keys})


def _check_enumerable(n: int, allow_long: bool, cap: int) -> None:
    if n < 2 or n > HARD_CAP:
        raise FeasibilityError(f"exact enumeration supports 2 <= n <= {HARD_CAP}, got n={n}")
    if n > cap and not (n == HARD_CAP and allow_long):
        raise FeasibilityError(
            f"n={n} exceeds the enumeration cap n<={cap}; n={HARD_CAP} needs allow_long=True "
            f"(--allow-long), other values need TURAN_ENUM_CAP"
        )


def _enumerate_block(n: int, prefix: int, free_bits: int) -> Dict[int, int]:
    """
    Histogram over all graphs whose top edge bits equal prefix

    The free edges are walked in Gray-code order, so each step flips one
    edge and updates (E, T) from the common neighbourhood of its ends.
    Keys are packed as E * stride + T.
    """
    pairs = list(combinations(range(n), 2))
    g = Graph(n)
    for bit in range(free_bits, len(pairs)):
        if (prefix >> (bit - free_bits)) & 1:
            i, j = pairs[bit]
            g.rows[i] |= 1 << j
            g.rows[j] |= 1 << i
    rows = g.rows
    edges, triangles = g.edge_count(), g.triangle_count()
    stride = math.comb(n, 3) + 1
    counts = {edges * stride + triangles: 1}
    get = counts.get
    for step in range(1, 1 << free_bits):
        i, j = pairs[(step & -step).bit_length() - 1]
        c = (rows[i] & rows[j]).bit_count()
        bit_j = 1 << j
        if rows[i] & bit_j:
            edges -= 1
            triangles -= c
        else:
            edges += 1
            triangles += c
        rows[i] ^= bit_j
        rows[j] ^= 1 << i
        key = edges * stride + triangles
        counts[key] = get(key, 0) + 1
    return counts


def enumerate_support(n: int, allow_long: bool = False, workers: Optional[int] = None,
                      cap: Optional[int] = None) -> SupportTable:
    """
    Exact (E, T) histogram over all 2^C(n,2) labeled graphs on n nodes

    Args:
        n: node count, at most the configured cap (7 by default)
        allow_long: opt in to n = 8
        workers: processes for range splitting (defaults to TURAN_ENUM_WORKERS)
        cap: override of the configured cap

    Raises:
        FeasibilityError: if n is outside the enumerable range
    """
    settings = get_settings()
    cap = settings.enum_cap if cap is None else cap
    _check_enumerable(n, allow_long, cap)
    workers = settings.enum_workers if workers is None else workers

    m = math.comb(n, 2)
    stride = math.comb(n, 3) + 1
    split_bits = 0 if (workers <= 1 or n < 7) else min(m, 3 + n - 7)
    free_bits = m - split_bits
    blocks = 1 << split_bits

    partials: Dict[int, Dict[int, int]] = {}
    if blocks == 1:
        partials[0] = _enumerate_block(n, 0, free_bits)
    else:
        logger.info("Enumerating n=%d over %d blocks with %d workers", n, blocks, workers)
        with ProcessPoolExecutor(max_workers=workers) as executor:
            future_to_prefix = {
                executor.submit(_enumerate_block, n, prefix, free_bits): prefix
                for prefix in range(blocks)
            }
            for i, future in enumerate(as_completed(future_to_prefix), 1):
                prefix = future_to_prefix[future]
                partials[prefix] = future.result()
                logger.info("[%d/%d] Completed block %d", i, blocks, prefix)

    merged: Counter = Counter()
    for prefix in sorted(partials):
        merged.update(partials[prefix])
    counts = {divmod(key, stride): count for key, count in sorted(merged.items())}
    table = SupportTable(n, counts)
    if table.total() != 1 << m:
        raise RuntimeError(f"enumeration lost graphs: {table.total()} != 2^{m}")
    return table


def _cross(o: DensityPoint, a: DensityPoint, b: DensityPoint) -> Fraction:
    return (a.e - o.e) * (b.t - o.t) - (a.t - o.t) * (b.e - o.e)


def convex_hull(points: Iterable[DensityPoint]) -> List[DensityPoint]:
    """Exact monotone-chain hull, counterclockwise from the lowest-leftmost point, collinear points dropped"""
    pts = sorted(set(points), key=lambda p: (p.e, p.t))
    if len(pts) <= 2:
        return pts
    lower: List[DensityPoint] = []
    for p in pts:
        while len(lower) >= 2 and _cross(lower[-2], lower[-1], p) <= 0:
            lower.pop()
        lower.append(p)
    upper: List[DensityPoint] = []
    for p in reversed(pts):
        while len(upper) >= 2 and _cross(upper[-2], upper[-1], p) <= 0:
            upper.pop()
        upper.append(p)
    return lower[:-1] + upper[:-1]


def convex_support(table: SupportTable) -> List[DensityPoint]:
    """Vertices of P_n, the convex hull of the support, counterclockwise"""
    return convex_hull(table.entries())


def hull_contains_strictly(hull: Sequence[DensityPoint], point: Tuple[float, float]) -> bool:
    """Whether a float point lies strictly inside a counterclockwise hull"""
    x, y = point
    for a, b in zip(hull, list(hull[1:]) + [hull[0]]):
        ax, ay = float(a.e), float(a.t)
        bx, by = float(b.e), float(b.t)
        if (bx - ax) * (y - ay) - (by - ay) * (x - ax) <= 0:
            return False
    return True


def turan_vertices(n: int) -> List[DensityPoint]:
    """Points v_{k,n} = t(T(n, k+1)) spanning P_n: k < ceil(n/2) and k = n-1"""
    ks = list(range(math.ceil(n / 2)))
    if n - 1 not in ks:
        ks.append(n - 1)
    return [density_from_counts(n, *turan_counts(n, k + 1)) for k in ks]


def support_on_segment(table: SupportTable, p: DensityPoint, q: DensityPoint) -> List[DensityPoint]:
    """Support points on the closed segment [p, q]"""
    lo_e, hi_e = min(p.e, q.e), max(p.e, q.e)
    lo_t, hi_t = min(p.t, q.t), max(p.t, q.t)
    found = []
    for key in table.keys():
        x = table.point(key)
        if _cross(p, q, x) == 0 and lo_e <= x.e <= hi_e and lo_t <= x.t <= hi_t:
            found.append(x)
    return found


def log_weight_counts(n: int, beta: Beta, edges: int, triangles: int) -> float:
    """n^2 <beta, t(G)> = 2*beta1*E + 6*beta2*T/n"""
    return 2.0 * float(beta[0]) * edges + 6.0 * float(beta[1]) * triangles / n


@dataclass(frozen=True)
class FiniteFamily:
    """P_{n,beta} on a support table; log_normalizer is n^2 psi_n(beta)"""
    support: SupportTable
    beta: Beta
    log_normalizer: float
    log_probs: Dict[Key, float]

    @property
    def n(self) -> int:
        return self.support.n

    @property
    def psi(self) -> float:
        return self.log_normalizer / self.n ** 2

    def prob(self, key: Union[Key, DensityPoint]) -> float:
        if isinstance(key, DensityPoint):
            e_count = key.e * self.n * self.n / 2
            t_count = key.t * self.n ** 3 / 6
            if e_count.denominator != 1 or t_count.denominator != 1:
                return 0.0
            key = (int(e_count), int(t_count))
        if key not in self.log_probs:
            return 0.0
        return math.exp(self.log_probs[key])

    def distribution(self) -> Dict[Key, float]:
        return {key: math.exp(lp) for key, lp in self.log_probs.items()}

    def mean(self) -> Tuple[float, float]:
        """Mean value parameter E_beta[(e, t)]"""
        n = self.n
        e_mean = t_mean = 0.0
        for (edges, triangles), p in self.distribution().items():
            e_mean += p * 2 * edges / n ** 2
            t_mean += p * 6 * triangles / n ** 3
        return e_mean, t_mean

    def to_records(self) -> List[Dict]:
        return [
            {"point": list(self.support.point(key).as_floats()), "E": key[0], "T": key[1], "prob": p}
            for key, p in sorted(self.distribution().items())
        ]


def exact_family(table: SupportTable, beta: Beta) -> FiniteFamily:
    """Exponential family on the support with a max-shifted log-sum-exp normalizer"""
    keys = table.keys()
    if not keys:
        raise DomainError("support table is empty")
    log_terms = np.array([
        log_weight_counts(table.n, beta, e, t) + math.log(table.counts[(e, t)]) for e, t in keys
    ])
    log_z = float(logsumexp(log_terms))
    log_probs = {key: float(lt - log_z) for key, lt in zip(keys, log_terms)}
    return FiniteFamily(table, (float(beta[0]), float(beta[1])), log_z, log_probs)


def log_partition(table: SupportTable, beta: Beta) -> float:
    return exact_family(table, beta).log_normalizer


def psi_n(table: SupportTable, beta: Beta) -> float:
    return log_partition(table, beta) / table.n ** 2


def nu_turan(n: int, r: int) -> int:
    """Labeled graphs isomorphic to T(n, r): n! / (prod size! * prod multiplicity!)"""
    sizes = turan_class_sizes(n, r)
    denominator = 1
    for s in sizes:
        denominator *= math.factorial(s)
    for multiplicity in Counter(sizes).values():
        denominator *= math.factorial(multiplicity)
    return math.factorial(n) // denominator


def log_nu_turan(n: int, r: int) -> float:
    sizes = turan_class_sizes(n, r)
    value = gammaln(n + 1) - sum(gammaln(s + 1) for s in sizes)
    value -= sum(gammaln(m + 1) for m in Counter(sizes).values())
    return float(value)


@dataclass(frozen=True)
class PointDistribution:
    """A distribution on finitely many (E, T) points of S_n"""
    n: int
    probs: Dict[Key, float]

    def distribution(self) -> Dict[Key, float]:
        return dict(self.probs)

    def points(self) -> List[DensityPoint]:
        return [density_from_counts(self.n, *key) for key in sorted(self.probs)]

    def to_records(self) -> List[Dict]:
        return [
            {"point": list(density_from_counts(self.n, *key).as_floats()), "prob": p}
            for key, p in sorted(self.probs.items())
        ]


@dataclass(frozen=True)
class TwoPointFamily:
    """
    Closure family on the facet points v_k, v_{k+1}

    reduced is <(1, slope_k), beta>, a positive multiple of <l_k, beta>; the
    family depends on beta only through it.
    """
    n: int
    k: int
    beta: Tuple
    counts: Tuple[int, int]
    reduced: Fraction
    log_ratio: float
    probs: Tuple[float, float]

    @property
    def keys(self) -> Tuple[Key, Key]:
        return turan_counts(self.n, self.k + 1), turan_counts(self.n, self.k + 2)

    def points(self) -> Tuple[DensityPoint, DensityPoint]:
        low, high = self.keys
        return density_from_counts(self.n, *low), density_from_counts(self.n, *high)

    def distribution(self) -> Dict[Key, float]:
        low, high = self.keys
        return {low: self.probs[0], high: self.probs[1]}

    def to_records(self) -> List[Dict]:
        return [
            {"point": list(p.as_floats()), "count": c, "prob": q}
            for p, c, q in zip(self.points(), self.counts, self.probs)
        ]


def _check_qualifying(n: int, k: int) -> None:
    if not isinstance(k, int) or k < 1:
        raise DomainError(f"closure families need k >= 1, got {k!r}")
    if n % ((k + 1) * (k + 2)):
        raise DomainError(
            f"n={n} is not a multiple of (k+1)(k+2)={(k + 1) * (k + 2)}: only then is v_(k,n) = v_k "
            f"and the facet L_(k,n) meets S_n exactly in v_k and v_(k+1)"
        )


def _facet_exponent(n: int, k: int, beta) -> Fraction:
    """n^2 <beta, v_{k+1} - v_k>, exact; v_{k+1} - v_k = (1, slope_k) / ((k+1)(k+2))"""
    return Fraction(n * n, (k + 1) * (k + 2)) * reduced_parameter(k, beta)


def closure_two_point(n: int, k: int, beta, table: Optional[SupportTable] = None) -> TwoPointFamily:
    """
    Limit of P_{n, beta + r o_k} as r -> infinity

    Args:
        n: node count, a multiple of (k+1)(k+2)
        k: facet index >= 1
        beta: base parameter; rationals give an exact reduced parameter
        table: when given, the statistic counts nu_n(v_k), nu_n(v_{k+1}) of
            the enumeration replace the Turan-isomorphic counts

    Raises:
        DomainError: when the divisibility condition fails
    """
    _check_qualifying(n, k)
    if table is not None:
        if table.n != n:
            raise DomainError(f"support table is for n={table.n}, not n={n}")
        counts = (table.counts.get(turan_counts(n, k + 1), 0), table.counts.get(turan_counts(n, k + 2), 0))
    else:
        counts = (nu_turan(n, k + 1), nu_turan(n, k + 2))
    reduced = reduced_parameter(k, beta)
    log_ratio = float(_facet_exponent(n, k, beta)) + math.log(counts[1]) - math.log(counts[0])
    probs = (float(expit(-log_ratio)), float(expit(log_ratio)))
    return TwoPointFamily(n, k, tuple(beta), counts, reduced, log_ratio, probs)


def edge_complete_family(n: int, beta: Beta) -> PointDistribution:
    """Limit along o_{-1,n}: the empty and the complete graph only"""
    if n < 2:
        raise DomainError(f"n must be >= 2, got {n}")
    exponent = float(beta[0]) * n * (n - 1) + float(beta[1]) * (n - 1) * (n - 2)
    complete = (math.comb(n, 2), math.comb(n, 3))
    return PointDistribution(n, {(0, 0): float(expit(-exponent)), complete: float(expit(exponent))})


def triangle_free_family(table_or_n: Union[int, SupportTable], beta1: float) -> FiniteFamily:
    """
    Q_{n,beta1}: the family restricted to triangle-free graphs

    Args:
        table_or_n: a support table, or n to enumerate (subject to the cap)
        beta1: edge parameter
    """
    table = table_or_n if isinstance(table_or_n, SupportTable) else enumerate_support(table_or_n)
    return exact_family(table.restrict(key for key in table.counts if key[1] == 0), (beta1, 0.0))


def tv_distance(p: Distribution, q: Distribution) -> float:
    keys = set(p) | set(q)
    return 0.5 * math.fsum(abs(p.get(key, 0.0) - q.get(key, 0.0)) for key in keys)


def exposed_face(table: SupportTable, o: Direction) -> List[Key]:
    """Support points maximising <x, o>, exactly"""
    ox, oy = Fraction(o.x), Fraction(o.y)
    n = table.n
    scores = {key: ox * Fraction(2 * key[0], n * n) + oy * Fraction(6 * key[1], n ** 3) for key in table.counts}
    best = max(scores.values())
    return sorted(key for key, s in scores.items() if s == best)


def face_family(table: SupportTable, o: Direction, beta: Beta) -> FiniteFamily:
    """Total-variation limit of P_{n, beta + r o} as r -> infinity"""
    return exact_family(table.restrict(exposed_face(table, o)), beta)


def expected_face(n: int, o: Direction) -> List[Key]:
    """Face predicted by the asymptotic normal cone of o, at this n"""
    ray = classify_direction(o)
    complete = (math.comb(n, 2), math.comb(n, 3))
    if ray.kind == RayKind.INTERIOR_CONE_AT_ONE:
        return [complete]
    if ray.kind == RayKind.INTERIOR_CONE:
        return [turan_counts(n, min(ray.k + 1, n))]
    if ray.k == -1:
        return [(0, 0), complete]
    return sorted({turan_counts(n, min(ray.k + 1, n)), turan_counts(n, min(ray.k + 2, n))})


@dataclass
class ClosureCheck:
    """TV distances from P_{n, beta + r o} to its limit along a ray"""
    n: int
    k: int
    direction: Tuple[float, float]
    r_schedule: List[float]
    tv: List[float]
    face: List[Key]
    expected_face: List[Key]
    limit: Dict[Key, float]
    statistic_counts: Dict[Key, int] = field(default_factory=dict)
    turan_counts: Dict[Key, int] = field(default_factory=dict)

    @property
    def limit_kind(self) -> str:
        return {1: "point_mass", 2: "two_point"}.get(len(self.face), "face")

    @property
    def matches_expected(self) -> bool:
        return self.face == self.expected_face

    @property
    def strictly_decreasing(self) -> bool:
        return all(b < a for a, b in zip(self.tv, self.tv[1:]))

    def to_dict(self) -> Dict:
        return {
            "n": self.n,
            "k": self.k,
            "direction": list(self.direction),
            "limit_kind": self.limit_kind,
            "face": [list(key) for key in self.face],
            "expected_face": [list(key) for key in self.expected_face],
            "matches_expected": self.matches_expected,
            "r": list(self.r_schedule),
            "tv": list(self.tv),
            "statistic_counts": {f"{e},{t}": c for (e, t), c in self.statistic_counts.items()},
            "turan_counts": {f"{e},{t}": c for (e, t), c in self.turan_counts.items()},
        }


def closure_convergence_check(table: SupportTable, k: int, beta: Beta, o: Optional[Direction] = None,
                              r_schedule: Sequence[float] = (5, 10, 20, 40)) -> ClosureCheck:
    """
    TV(P_{n, beta + r o}, limit) along a ray, for each r in the schedule

    The limit is the family restricted to the face of conv(S_n) exposed by
    o: the two-point family for o = o_k at qualifying n, a point mass for
    a direction generic at this n. The face actually reached is compared
    with the asymptotic prediction and a mismatch is logged.
    """
    o = o_k(k) if o is None else o
    n = table.n
    face = exposed_face(table, o)
    expected = expected_face(n, o)
    if face != expected:
        logger.warning("n=%d: direction %s exposes %s, asymptotic prediction is %s", n, o.as_floats(), face, expected)
    limit = exact_family(table.restrict(face), beta).distribution()

    turan = {}
    for r in range(1, n + 1):
        key = turan_counts(n, r)
        if key in face:
            turan[key] = turan.get(key, 0) + nu_turan(n, r)
    stats = {key: table.counts[key] for key in face}
    for key in turan:
        if turan[key] != stats.get(key):
            logger.info("n=%d: statistic count at %s is %s, Turan-isomorphic count is %s", n, key, stats.get(key), turan[key])

    ox, oy = float(o.x), float(o.y)
    tvs = []
    for r in r_schedule:
        shifted = (float(beta[0]) + r * ox, float(beta[1]) + r * oy)
        tvs.append(tv_distance(exact_family(table, shifted).distribution(), limit))
    return ClosureCheck(n, k, (ox, oy), list(r_schedule), tvs, face, expected, limit, stats, turan)


def stirling_log_constant(k: int) -> float:
    """log C with nu(n,k+2)/nu(n,k+1) ~ C n^(-1/2) ((k+2)/(k+1))^n"""
    return (-math.log(k + 2) - 0.5 * math.log(2 * math.pi)
            + (k + 2) / 2 * math.log(k + 2) - (k + 1) / 2 * math.log(k + 1))


@dataclass(frozen=True)
class RatioPoint:
    n: int
    log_ratio: float
    stirling_log_ratio: float
    exact_ratio: Optional[Fraction] = None

    @property
    def ratio(self) -> float:
        return math.exp(self.log_ratio) if self.log_ratio < 700 else math.inf


def stirling_log_ratio(k: int, n: int, exponent: float = 0.0) -> float:
    return stirling_log_constant(k) - 0.5 * math.log(n) + n * math.log((k + 2) / (k + 1)) + exponent


def ratio_trend(k: int, beta, n_list: Iterable[int]) -> List[RatioPoint]:
    """
    P_{n,k,beta}(v_{k+1}) / P_{n,k,beta}(v_k) over a list of qualifying n

    The exact value uses big-integer Turan counts; the Stirling column is
    log C - log(n)/2 + n log((k+2)/(k+1)) + n^2 <beta, v_{k+1} - v_k>.
    """
    points = []
    for n in n_list:
        _check_qualifying(n, k)
        exponent = _facet_exponent(n, k, beta)
        low, high = nu_turan(n, k + 1), nu_turan(n, k + 2)
        log_ratio = float(exponent) + math.log(high) - math.log(low)
        exact = Fraction(high, low) if exponent == 0 else None
        points.append(RatioPoint(n, log_ratio, stirling_log_ratio(k, n, float(exponent)), exact))
    return points


def _balanced_bipartite(rows: List[int], n: int) -> bool:
    """Whether the graph is a subgraph of T(n, 2): 2-colourable with sides floor(n/2), ceil(n/2)"""
    colour = [-1] * n
    sides = []
    for start in range(n):
        if colour[start] >= 0:
            continue
        colour[start] = 0
        stack, counts = [start], [1, 0]
        while stack:
            v = stack.pop()
            nbrs = rows[v]
            while nbrs:
                low = nbrs & -nbrs
                u = low.bit_length() - 1
                nbrs ^= low
                if colour[u] < 0:
                    colour[u] = 1 - colour[v]
                    counts[colour[u]] += 1
                    stack.append(u)
                elif colour[u] == colour[v]:
                    return False
        sides.append(counts)
    reachable = 1
    for a, b in sides:
        reachable = (reachable << a) | (reachable << b)
    return bool((reachable >> (n // 2)) & 1)


@dataclass(frozen=True)
class TriangleFreeCensus:
    """Per edge count: (triangle-free graphs, those that are subgraphs of some T(n,2))"""
    n: int
    by_edges: Dict[int, Tuple[int, int]]


def triangle_free_census(n: int) -> TriangleFreeCensus:
    """Classify every triangle-free graph on n <= 7 nodes by whether it fits inside a T(n, 2)"""
    _check_enumerable(n, allow_long=False, cap=min(7, get_settings().enum_cap))
    pairs = list(combinations(range(n), 2))
    rows = [0] * n
    edges = triangles = 0
    totals: Counter = Counter()
    inside: Counter = Counter()
    totals[0] += 1
    inside[0] += 1
    for step in range(1, 1 << len(pairs)):
        i, j = pairs[(step & -step).bit_length() - 1]
        c = (rows[i] & rows[j]).bit_count()
        if (rows[i] >> j) & 1:
            edges, triangles = edges - 1, triangles - c
        else:
            edges, triangles = edges + 1, triangles + c
        rows[i] ^= 1 << j
        rows[j] ^= 1 << i
        if triangles == 0:
            totals[edges] += 1
            if _balanced_bipartite(rows, n):
                inside[edges] += 1
    return TriangleFreeCensus(n, {e: (totals[e], inside[e]) for e in sorted(totals)})


def non_turan_mass(census: TriangleFreeCensus, beta1: float) -> float:
    """Q_{n,beta1}-mass of triangle-free graphs that are not subgraphs of any T(n, 2)"""
    log_all, log_out = [], []
    for e, (total, fits) in census.by_edges.items():
        log_all.append(2.0 * beta1 * e + math.log(total))
        if total > fits:
            log_out.append(2.0 * beta1 * e + math.log(total - fits))
    if not log_out:
        return 0.0
    return float(math.exp(logsumexp(log_out) - logsumexp(log_all)))
