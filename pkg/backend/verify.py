"""
Verification suites: numerical checks of the geometry, the variational
classification, the exact families and the sampler, reported as JSON.
"""
import logging
import math
import time
from dataclasses import asdict, dataclass
from fractions import Fraction
from itertools import combinations
from typing import Callable, Dict, List, Optional, Tuple

import numpy as np
from scipy.special import xlogy

from errors import ConfigError
from exact_family import (
    closure_convergence_check,
    convex_support,
    edge_complete_family,
    enumerate_support,
    exact_family,
    nu_turan,
    ratio_trend,
    support_on_segment,
    tv_distance,
)
from geometry import (
    Direction,
    RayKind,
    a_k,
    classify_direction,
    o_k,
    razborov_lower,
    razborov_lower_array,
    razborov_segment,
    razborov_slope,
    v_k,
)
from graph_core import Graph, turan_class_sizes, turan_densities
from mcmc import FIGURE_PRESETS, chain_seeds, make_config, run, turan_mode_check
from variational import ClassKind, Line, classify_line, razborov_minimizer, solve_scalar

logger = logging.getLogger(__name__)

SUITES = ("geometry", "variational", "exact", "closure", "mcmc")


@dataclass
class CheckResult:
    suite: str
    name: str
    passed: bool
    detail: str
    seconds: float


@dataclass
class VerifyReport:
    suite: str
    checks: List[CheckResult]

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def to_dict(self) -> Dict:
        return {
            "suite": self.suite,
            "passed": self.passed,
            "checks": [asdict(c) for c in self.checks],
        }


def check_orthogonality(o_func: Callable[[int], Direction] = o_k, k_max: int = 200) -> Tuple[bool, str]:
    one = (Fraction(1), Fraction(1))
    v0 = v_k(0)
    o = o_func(-1)
    if Fraction(o.x) * (one[0] - v0.e) + Fraction(o.y) * (one[1] - v0.t) != 0:
        return False, "o_-1 is not orthogonal to (1,1) - v_0"
    for k in range(k_max + 1):
        a, b = v_k(k), v_k(k + 1)
        o = o_func(k)
        if Fraction(o.x) * (b.e - a.e) + Fraction(o.y) * (b.t - a.t) != 0:
            return False, f"o_{k} is not orthogonal to v_{k + 1} - v_{k}"
    return True, f"exact orthogonality for k = -1..{k_max}"


def check_slopes(k_max: int = 200) -> Tuple[bool, str]:
    values = [a_k(k) for k in range(k_max + 1)]
    decreasing = all(b < a for a, b in zip(values, values[1:]))
    last = values[-1]
    ok = decreasing and -3 < last < Fraction(-297, 100)
    return ok, f"a_{k_max} = {float(last):.6f}, strictly decreasing: {decreasing}"


def check_razborov_endpoints(k_max: int = 50) -> Tuple[bool, str]:
    for k in range(1, k_max + 1):
        if razborov_lower(Fraction(k, k + 1)) != v_k(k).t:
            return False, f"razborov_lower(e_{k}) differs from t(v_{k})"
    return True, f"exact at e_k for k = 1..{k_max}"


def check_razborov_continuity(k_max: int = 50) -> Tuple[bool, str]:
    worst = 0.0
    for k in range(2, k_max + 1):
        e = k / (k + 1)
        worst = max(worst, abs(float(razborov_segment(e, k)) - float(razborov_segment(e, k + 1))))
    return worst < 1e-12, f"largest gap between adjacent segments {worst:.3e}"


def check_razborov_concavity(k_max: int = 20, samples: int = 1000) -> Tuple[bool, str]:
    worst = worst_slope = -math.inf
    for k in range(2, k_max + 1):
        e = np.linspace((k - 1) / k, k / (k + 1), samples)
        t = np.array([razborov_segment(float(x), k) for x in e])
        worst = max(worst, float(np.max(np.diff(t, 2))))
        # endpoints are shared with the neighbouring segments
        slopes = np.array([razborov_slope(float(x)) for x in e[1:-1]])
        worst_slope = max(worst_slope, float(np.max(np.diff(slopes))))
    ok = worst <= 1e-12 and worst_slope <= 1e-12
    return ok, f"largest second difference {worst:.3e}, largest slope increase {worst_slope:.3e}"


def _brute_force_direction(x: float, y: float, k_max: int = 10 ** 5) -> Tuple[np.ndarray, float]:
    k = np.arange(k_max + 1, dtype=float)
    scores = x * k / (k + 1) + y * k * (k - 1) / (k + 1) ** 2
    return scores, x + y


def check_direction_brute_force(count: int = 10 ** 4, seed: int = 7) -> Tuple[bool, str]:
    rng = np.random.default_rng(seed)
    checked = 0
    for angle in rng.uniform(0.0, 2.0 * math.pi, count):
        x, y = math.cos(angle), math.sin(angle)
        c = classify_direction(Direction(x, y))
        if c.kind == RayKind.INTERIOR_CONE and c.k > 5 * 10 ** 4:
            continue
        scores, at_one = _brute_force_direction(x, y)
        best = max(float(scores.max()), at_one)
        if c.kind == RayKind.INTERIOR_CONE_AT_ONE or c.k < 0:
            mine = at_one
        else:
            mine = float(scores[c.k])
        if mine < best - 1e-12:
            return False, f"direction ({x}, {y}) classified {c.label()} but brute force scores higher"
        checked += 1
    return True, f"{checked} random directions agree with brute force over k <= 10^5"


def _grid_oracle(grid_e: np.ndarray, grid_t: np.ndarray, a: float) -> Fraction:
    e = float(grid_e[int(np.argmin(a * grid_e + grid_t))])
    # nearest connection point k/(k+1), or 1
    k = max(0, round(1.0 / (1.0 - e)) - 1) if e < 1.0 else None
    return Fraction(1) if k is None else Fraction(k, k + 1)


def check_line_vs_grid(count: int = 1000, seed: int = 11, points: int = 10 ** 6) -> Tuple[bool, str]:
    rng = np.random.default_rng(seed)
    grid_e = np.linspace(0.0, 1.0, points)
    grid_t = razborov_lower_array(grid_e)
    checked = 0
    for a in rng.uniform(-2.9, -1e-3, count):
        k_near = min(range(0, 60), key=lambda k: abs(float(a_k(k)) - a))
        if abs(float(a_k(k_near)) - a) < 1e-3:
            continue
        cls = classify_line(Line(float(a), 0.0, -1))
        minimizer = razborov_minimizer(float(a))
        oracle = _grid_oracle(grid_e, grid_t, float(a))
        if cls.kind != ClassKind.TURAN or minimizer != (oracle,) or cls.r != oracle.denominator:
            return False, f"a={a}: class {cls.label()}, minimizer {minimizer}, grid oracle {oracle}"
        checked += 1
    return True, f"{checked} slopes agree with the dense-grid minimiser"


def check_attractive_regime(beta2: float = 1e4) -> Tuple[bool, str]:
    for a, b, target in ((-0.5, 0.0, 1.0), (-1.0, 1.0, 1.0), (-2.0, 0.0, 0.0), (-1.0, -1.0, 0.0)):
        sol = solve_scalar(a * beta2 + b, beta2)
        if len(sol.maximizers) != 1 or abs(sol.maximizers[0] - target) > 1e-3:
            return False, f"(a,b)=({a},{b}): maximizers {sol.maximizers}, expected {target}"
    sol = solve_scalar(-beta2, beta2)
    if len(sol.maximizers) != 2:
        return False, f"(a,b)=(-1,0): expected two maximizers, got {sol.maximizers}"
    return True, "attractive-regime maximizers at 0/1 and the two-point tie on a = -1"


def check_scalar_vs_grid(count: int = 1000, seed: int = 3) -> Tuple[bool, str]:
    rng = np.random.default_rng(seed)
    u = np.linspace(0.0, 1.0, 10 ** 4)
    entropy_grid = 0.5 * (xlogy(u, u) + xlogy(1.0 - u, 1.0 - u))
    for beta1, beta2 in rng.uniform(-50, 50, size=(count, 2)):
        sol = solve_scalar(beta1, beta2)
        grid_best = float(np.max(beta1 * u + beta2 * u ** 3 - entropy_grid))
        if sol.value < grid_best - 1e-9:
            return False, f"beta=({beta1},{beta2}): solver value {sol.value} < grid {grid_best}"
    return True, f"{count} random parameters dominate a 10^4-point grid"


def turan_isomorphic_counts(n: int) -> Dict[int, int]:
    """Labeled graphs isomorphic to T(n, r), by brute force over all graphs (n <= 6)"""
    full = (1 << n) - 1
    pairs = list(combinations(range(n), 2))
    found: Dict[int, int] = {}
    for code in range(1 << len(pairs)):
        g = Graph.from_edge_code(n, code)
        classes = [full & ~g.rows[v] for v in range(n)]
        if any(classes[u] != classes[v] for v in range(n) for u in range(n) if (classes[v] >> u) & 1):
            continue
        sizes = sorted({c: c.bit_count() for c in classes}.values(), reverse=True)
        if sizes == turan_class_sizes(n, len(sizes)):
            found[len(sizes)] = found.get(len(sizes), 0) + 1
    return found


def check_enumeration_n6() -> Tuple[bool, str]:
    table = enumerate_support(6)
    problems = []
    if table.total() != 2 ** 15:
        problems.append("total mass is not 2^15")
    hull = set(convex_support(table))
    for r in (1, 2, 3, 6):
        if turan_densities(6, r) not in hull:
            problems.append(f"t(T(6,{r})) is not a hull vertex")
    if (table.count_at(v_k(1)), table.count_at(v_k(2))) != (nu_turan(6, 2), nu_turan(6, 3)):
        problems.append("statistic counts at v_1, v_2 differ from Turan counts")
    on_facet = support_on_segment(table, v_k(1), v_k(2))
    if on_facet != [v_k(1), v_k(2)]:
        problems.append(f"support on L_1 is {on_facet}")
    return not problems, "; ".join(problems) or "n=6 support, hull, counts and facet L_1 as expected"


def check_nu_turan_oracle(n_max: int = 6) -> Tuple[bool, str]:
    for n in range(2, n_max + 1):
        brute = turan_isomorphic_counts(n)
        for r in range(1, n + 1):
            if brute.get(r, 0) != nu_turan(n, r):
                return False, f"nu_turan({n},{r}) = {nu_turan(n, r)}, brute force {brute.get(r, 0)}"
    return True, f"nu_turan matches brute force for n <= {n_max}"


def check_edge_complete() -> Tuple[bool, str]:
    half = edge_complete_family(6, (0, 0)).probs
    if set(half.values()) != {0.5}:
        return False, f"beta=0 gives {half}"
    p = edge_complete_family(6, (1, -1)).probs[(15, 20)]
    target = math.exp(10) / (1 + math.exp(10))
    return abs(p - target) < 1e-15, f"P(complete) = {p!r}, closed form {target!r}"


def check_closure_convergence() -> Tuple[bool, str]:
    check = closure_convergence_check(enumerate_support(6), 1, (1, 1))
    ok = check.strictly_decreasing and check.tv[-1] < 1e-6 and check.limit_kind == "two_point"
    return ok, f"TV at r={check.r_schedule}: {[f'{x:.3e}' for x in check.tv]}"


def check_ratio_trends() -> Tuple[bool, str]:
    ns = list(range(6, 61, 6))
    plus = ratio_trend(1, (10, -6), ns)
    minus = ratio_trend(1, (20, -80), ns)
    flat = ratio_trend(1, (0, 0), ns)
    problems = []
    if not all(b.log_ratio > a.log_ratio for a, b in zip(plus, plus[1:])):
        problems.append("H_1+ ratios not increasing")
    if minus[-1].log_ratio > -1000:
        problems.append(f"H_1- log-ratio at n=60 is {minus[-1].log_ratio}")
    if flat[0].exact_ratio != Fraction(3, 2):
        problems.append(f"H_1 ratio at n=6 is {flat[0].exact_ratio}")
    last = flat[-1]
    if abs(last.log_ratio - last.stirling_log_ratio) > 0.05 * abs(last.log_ratio):
        problems.append("exact and Stirling log-ratios differ by more than 5% at n=60")
    return not problems, "; ".join(problems) or "ratio trends match the three half-space regimes"


def check_mode_presets() -> Tuple[bool, str]:
    expected = {"fig4": 4, "fig2": 2, "fig3_1": 3, "fig3_2": 3}
    got = {name: turan_mode_check(p.n, p.beta).r_star for name, p in FIGURE_PRESETS.items()}
    return got == expected, f"r* per preset: {got}"


def check_independent_edges(steps: int = 10 ** 6, seed: int = 5) -> Tuple[bool, str]:
    details = []
    ok = True
    for beta1, s in zip((-1.0, 0.0, 1.0), chain_seeds(seed, 3)):
        traj = run(make_config(n=20, beta=(beta1, 0.0), steps=steps, seed=s, thin=100))
        burn = len(traj.steps) // 10
        mean = float(np.mean(traj.edge_fractions()[burn:]))
        target = math.exp(2 * beta1) / (1 + math.exp(2 * beta1))
        ok &= abs(mean - target) < 0.01
        details.append(f"beta1={beta1}: {mean:.4f} vs {target:.4f}")
    return ok, "; ".join(details)


def empirical_law_tv(n: int, beta, steps: int, seed: int) -> float:
    """TV between a chain's empirical graph law and the exact P_{n,beta}"""
    traj = run(make_config(n=n, beta=beta, steps=steps, seed=seed, record_graphs=True))
    counts: Dict[int, int] = {}
    for code in traj.codes:
        counts[code] = counts.get(code, 0) + 1
    total = len(traj.codes)
    family = exact_family(enumerate_support(n), beta)
    exact = {}
    for code in range(1 << (n * (n - 1) // 2)):
        g = Graph.from_edge_code(n, code)
        key = (g.edge_count(), g.triangle_count())
        exact[code] = family.prob(key) / family.support.counts[key]
    empirical = {code: c / total for code, c in counts.items()}
    return tv_distance(empirical, exact)


def check_small_law(steps: int = 10 ** 6, seed: int = 9) -> Tuple[bool, str]:
    tv = empirical_law_tv(4, (0.3, -0.2), steps, seed)
    return tv < 0.02, f"TV over the 64 graphs on 4 nodes: {tv:.4f}"


def check_mode_stability(steps: int = 10 ** 6, seed: int = 13, radius: float = 0.05) -> Tuple[bool, str]:
    details = []
    ok = True
    for (name, preset), s in zip(FIGURE_PRESETS.items(), chain_seeds(seed, len(FIGURE_PRESETS))):
        r = preset.predicted_r
        # the chain starts at T(n, r), so its excursion is the distance to v_(r-1,n) at every step
        traj = run(make_config(n=preset.n, beta=preset.beta, steps=steps, seed=s, init=f"turan:{r}", thin=1000))
        excursion = traj.max_excursion
        ok &= excursion < radius
        details.append(f"{name}: max distance to v_({r - 1},{preset.n}) {excursion:.4f}")
    return ok, "; ".join(details)


def _suite_checks(suite: str, o_func: Callable, mcmc_steps: int) -> List[Tuple[str, Callable[[], Tuple[bool, str]]]]:
    if suite == "geometry":
        return [
            ("orthogonality", lambda: check_orthogonality(o_func)),
            ("critical_slopes", check_slopes),
            ("razborov_endpoints", check_razborov_endpoints),
            ("razborov_continuity", check_razborov_continuity),
            ("razborov_concavity", check_razborov_concavity),
            ("direction_brute_force", check_direction_brute_force),
        ]
    if suite == "variational":
        return [
            ("line_vs_grid_minimizer", check_line_vs_grid),
            ("attractive_regime", check_attractive_regime),
            ("scalar_vs_grid", check_scalar_vs_grid),
        ]
    if suite == "exact":
        return [
            ("enumeration_n6", check_enumeration_n6),
            ("nu_turan_oracle", check_nu_turan_oracle),
            ("edge_complete_family", check_edge_complete),
        ]
    if suite == "closure":
        return [
            ("closure_convergence", check_closure_convergence),
            ("ratio_trends", check_ratio_trends),
        ]
    if suite == "mcmc":
        return [
            ("mode_presets", check_mode_presets),
            ("independent_edges", lambda: check_independent_edges(mcmc_steps)),
            ("small_graph_law", lambda: check_small_law(mcmc_steps)),
            ("mode_stability", lambda: check_mode_stability(mcmc_steps)),
        ]
    raise ConfigError(f"unknown suite {suite!r}")


def verify(suite: str = "all", o_func: Optional[Callable[[int], Direction]] = None,
           mcmc_steps: int = 10 ** 6) -> VerifyReport:
    """
    Run one suite (or all of them)

    Args:
        suite: geometry, variational, exact, closure, mcmc or all
        o_func: replacement for o_k, used to check that the orthogonality check can fail
        mcmc_steps: chain length for the sampler checks
    """
    names = SUITES if suite == "all" else (suite,)
    o_func = o_func or o_k
    results = []
    for name in names:
        checks = _suite_checks(name, o_func, mcmc_steps)
        for i, (check_name, check) in enumerate(checks, 1):
            start = time.perf_counter()
            try:
                passed, detail = check()
            except Exception as exc:  # a crashing check is a failed check
                passed, detail = False, f"{type(exc).__name__}: {exc}"
            elapsed = time.perf_counter() - start
            results.append(CheckResult(name, check_name, bool(passed), detail, round(elapsed, 3)))
            logger.info("[%d/%d] %s/%s %s (%.2fs)", i, len(checks), name, check_name,
                        "passed" if passed else "FAILED", elapsed)
    return VerifyReport(suite, results)
