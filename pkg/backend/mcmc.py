"""
Metropolis sampler for the edge-triangle model, the deterministic Turan
mode check, and the harness reproducing the n=30 simulation figures.
"""
import logging
import math
from concurrent.futures import ProcessPoolExecutor, as_completed
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations
from typing import Dict, List, Literal, Optional, Sequence, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, ValidationError, model_validator

from config import get_settings
from errors import ConfigError, DomainError
from exact_family import log_nu_turan
from geometry import Direction, o_k
from graph_core import (
    DensityPoint,
    Graph,
    density_from_counts,
    partition_recovery,
    turan_counts,
    turan_densities,
    turan_graph,
)
from variational import DirectionPrediction, predict_direction

logger = logging.getLogger(__name__)

TIE_TOL = 1e-9


class InitState(BaseModel):
    """Starting graph of a chain: empty, complete, turan:<r> or random:<p>"""
    model_config = ConfigDict(frozen=True)

    kind: Literal["empty", "complete", "turan", "random"]
    r: Optional[int] = None
    p: Optional[float] = None

    @model_validator(mode="after")
    def _check_params(self):
        if self.kind == "turan" and (self.r is None or self.r < 1):
            raise ValueError("turan init needs a class count r >= 1")
        if self.kind == "random" and (self.p is None or not 0.0 <= self.p <= 1.0):
            raise ValueError("random init needs 0 <= p <= 1")
        return self

    @classmethod
    def parse(cls, text: str) -> "InitState":
        kind, _, arg = text.strip().lower().partition(":")
        if kind == "turan":
            return cls(kind=kind, r=int(arg) if arg else None)
        if kind == "random":
            return cls(kind=kind, p=float(arg) if arg else None)
        return cls(kind=kind)

    def label(self) -> str:
        if self.kind == "turan":
            return f"Turan({self.r})"
        if self.kind == "random":
            return f"Random({self.p})"
        return self.kind.capitalize()


class SamplerConfig(BaseModel):
    """Validated sampler settings; the RNG stream algorithm is pinned as metadata"""
    model_config = ConfigDict(frozen=True)

    n: int = Field(ge=2)
    beta: Tuple[float, float]
    steps: int = Field(ge=1)
    seed: int = Field(ge=0, lt=2 ** 64)
    init: InitState = InitState(kind="empty")
    thin: int = Field(default=1, ge=1)
    record_graphs: bool = False
    batch: int = Field(default=1 << 16, ge=1)
    rng_algorithm: Literal["PCG64"] = "PCG64"

    @model_validator(mode="after")
    def _check_init(self):
        if self.init.kind == "turan" and self.init.r > self.n:
            raise ValueError(f"turan init needs r <= n, got r={self.init.r}, n={self.n}")
        return self


def make_config(**kwargs) -> SamplerConfig:
    """
    Build a SamplerConfig, accepting init as a string such as "turan:4"

    Raises:
        ConfigError: for any invalid field
    """
    try:
        if isinstance(kwargs.get("init"), str):
            kwargs["init"] = InitState.parse(kwargs["init"])
        return SamplerConfig(**kwargs)
    except (ValidationError, ValueError) as exc:
        raise ConfigError(f"invalid sampler configuration: {exc}") from exc


def log_weight(g: Graph, beta) -> float:
    """n^2 (beta1 t(K2, g) + beta2 t(K3, g)) = 2 beta1 E + 6 beta2 T / n"""
    return 2.0 * float(beta[0]) * g.edge_count() + 6.0 * float(beta[1]) * g.triangle_count() / g.n


def proposal_log_ratio(g: Graph, beta, i: int, j: int) -> float:
    """Change in log weight if edge {i, j} were toggled"""
    if i == j:
        raise DomainError(f"node pair must be distinct, got ({i}, {j})")
    c = (g.rows[i] & g.rows[j]).bit_count()
    sign = -1 if (g.rows[i] >> j) & 1 else 1
    return sign * (2.0 * float(beta[0]) + 6.0 * float(beta[1]) * c / g.n)


@dataclass(frozen=True)
class StepOutcome:
    accepted: bool
    pair: Tuple[int, int]
    log_ratio: float


def metropolis_step(g: Graph, beta, rng: np.random.Generator) -> StepOutcome:
    """One single-edge Metropolis update of g in place"""
    m = g.n * (g.n - 1) // 2
    index = int(rng.integers(0, m))
    u = float(rng.random())
    i, j = _pair_from_index(g.n, index)
    delta = proposal_log_ratio(g, beta, i, j)
    accepted = delta >= 0 or u < math.exp(delta)
    if accepted:
        g.rows[i] ^= 1 << j
        g.rows[j] ^= 1 << i
    return StepOutcome(accepted, (i, j), delta)


def _pair_from_index(n: int, index: int) -> Tuple[int, int]:
    # lexicographic (i<j) order, matching Graph.edge_code
    i = 0
    while index >= n - 1 - i:
        index -= n - 1 - i
        i += 1
    return i, i + 1 + index


def initial_graph(init: InitState, n: int, rng: np.random.Generator) -> Graph:
    if init.kind == "empty":
        return Graph.empty(n)
    if init.kind == "complete":
        return Graph.complete(n)
    if init.kind == "turan":
        return turan_graph(n, init.r)
    pairs = list(combinations(range(n), 2))
    keep = rng.random(len(pairs)) < init.p
    return Graph.from_edges(n, (pair for pair, k in zip(pairs, keep) if k))


@dataclass
class Trajectory:
    """Recorded chain states every thin steps, step 0 included"""
    n: int
    steps: List[int]
    edges: List[int]
    triangles: List[int]
    accepted_frac: List[float]
    acceptance_rate: float
    final_graph: Graph
    codes: Optional[List[int]] = None
    metadata: Dict = field(default_factory=dict)
    # largest (e, t) distance from the initial graph over every step, recorded or not
    max_excursion: float = 0.0

    def points(self) -> List[DensityPoint]:
        return [density_from_counts(self.n, e, t) for e, t in zip(self.edges, self.triangles)]

    def densities(self) -> np.ndarray:
        """(len, 2) float array of (e, t)"""
        e = np.asarray(self.edges, dtype=float) * 2.0 / self.n ** 2
        t = np.asarray(self.triangles, dtype=float) * 6.0 / self.n ** 3
        return np.column_stack([e, t])

    def edge_fractions(self) -> np.ndarray:
        return np.asarray(self.edges, dtype=float) / math.comb(self.n, 2)


def run(config: SamplerConfig) -> Trajectory:
    """
    Run a single chain

    Proposal pairs and acceptance uniforms are drawn in batches from a PCG64
    generator seeded by config.seed, so trajectories are reproducible.
    """
    n = config.n
    rng = np.random.Generator(np.random.PCG64(config.seed))
    g = initial_graph(config.init, n, rng)
    rows = g.rows
    pairs = list(combinations(range(n), 2))
    m = len(pairs)
    edge_term = 2.0 * config.beta[0]
    triangle_term = 6.0 * config.beta[1] / n
    edges, triangles = g.edge_count(), g.triangle_count()
    e_scale, t_scale = 2.0 / n ** 2, 6.0 / n ** 3
    e0, t0 = edges * e_scale, triangles * t_scale
    max_excursion = 0.0
    hypot = math.hypot

    rec_steps, rec_edges, rec_triangles, rec_frac = [0], [edges], [triangles], [0.0]
    codes = [g.edge_code()] if config.record_graphs else None
    accepted = 0
    step = 0
    exp = math.exp
    while step < config.steps:
        size = min(config.batch, config.steps - step)
        proposals = rng.integers(0, m, size=size).tolist()
        uniforms = rng.random(size).tolist()
        for index, u in zip(proposals, uniforms):
            i, j = pairs[index]
            c = (rows[i] & rows[j]).bit_count()
            present = (rows[i] >> j) & 1
            delta = edge_term + triangle_term * c
            if present:
                delta = -delta
            if delta >= 0 or u < exp(delta):
                rows[i] ^= 1 << j
                rows[j] ^= 1 << i
                if present:
                    edges -= 1
                    triangles -= c
                else:
                    edges += 1
                    triangles += c
                accepted += 1
                distance = hypot(edges * e_scale - e0, triangles * t_scale - t0)
                if distance > max_excursion:
                    max_excursion = distance
            step += 1
            if step % config.thin == 0:
                rec_steps.append(step)
                rec_edges.append(edges)
                rec_triangles.append(triangles)
                rec_frac.append(accepted / step)
                if codes is not None:
                    codes.append(g.edge_code())

    metadata = {"rng": config.rng_algorithm, "seed": config.seed, "init": config.init.label()}
    return Trajectory(n, rec_steps, rec_edges, rec_triangles, rec_frac, accepted / config.steps, g, codes, metadata,
                      max_excursion)


@dataclass(frozen=True)
class ModeScore:
    r: int
    edges: int
    triangles: int
    log_weight: float
    log_count: float

    @property
    def score(self) -> float:
        return self.log_weight + self.log_count


@dataclass
class ModeCheck:
    """Turan class scores log_weight(T(n,r)) + log nu(n,r) for r = 1..n"""
    n: int
    beta: Tuple[float, float]
    r_star: int
    scores: List[ModeScore]
    ties: List[int]
    weight_ties: List[int]

    def to_dict(self) -> Dict:
        return {
            "n": self.n,
            "beta": list(self.beta),
            "r_star": self.r_star,
            "ties": self.ties,
            "weight_ties": self.weight_ties,
            "table": [
                {"r": s.r, "E": s.edges, "T": s.triangles, "log_weight": s.log_weight,
                 "log_count": s.log_count, "score": s.score}
                for s in self.scores
            ],
        }


def _near(a: float, b: float) -> bool:
    return abs(a - b) <= TIE_TOL * max(1.0, abs(a), abs(b))


def turan_mode_check(n: int, beta) -> ModeCheck:
    """
    Which Turan graph carries the most mass at (n, beta)

    ties lists every r whose total score is within 1e-9 of the best;
    weight_ties does the same for the weight term alone, where the count
    term is what separates the classes on a critical hyperplane.
    """
    if n < 2:
        raise DomainError(f"n must be >= 2, got {n}")
    beta = (float(beta[0]), float(beta[1]))
    scores = []
    for r in range(1, n + 1):
        edges, triangles = turan_counts(n, r)
        weight = 2.0 * beta[0] * edges + 6.0 * beta[1] * triangles / n
        scores.append(ModeScore(r, edges, triangles, weight, log_nu_turan(n, r)))
    best = max(scores, key=lambda s: s.score)
    best_weight = max(s.log_weight for s in scores)
    ties = [s.r for s in scores if _near(s.score, best.score)]
    weight_ties = [s.r for s in scores if _near(s.log_weight, best_weight)]
    return ModeCheck(n, beta, best.r, scores, ties, weight_ties if len(weight_ties) > 1 else [])


@dataclass(frozen=True)
class FigurePreset:
    """A simulated-figure setting: parameter base + r * direction on n nodes"""
    name: str
    n: int
    base_beta: Tuple[Fraction, Fraction]
    direction: Direction
    r: int
    description: str

    @property
    def beta(self) -> Tuple[float, float]:
        return (float(self.base_beta[0] + self.r * Fraction(self.direction.x)),
                float(self.base_beta[1] + self.r * Fraction(self.direction.y)))

    def prediction(self) -> DirectionPrediction:
        return predict_direction(self.direction, self.base_beta)

    @property
    def predicted_r(self) -> int:
        return self.prediction().extremal.class_counts[0]


FIGURE_PRESETS: Dict[str, FigurePreset] = {
    "fig4": FigurePreset("fig4", 30, (Fraction(0), Fraction(0)), Direction(Fraction(1), Fraction(-1, 2)), 80,
                         "generic direction (1,-1/2) inside the normal cone of v_3"),
    "fig2": FigurePreset("fig2", 30, (Fraction(20), Fraction(-80)), o_k(1), 40,
                         "critical direction o_1 from beta=(20,-80) on the negative side of H_1"),
    "fig3_1": FigurePreset("fig3_1", 30, (Fraction(0), Fraction(0)), o_k(1), 40,
                           "critical direction o_1 from beta=(0,0) on H_1"),
    "fig3_2": FigurePreset("fig3_2", 30, (Fraction(10), Fraction(-6)), o_k(1), 40,
                           "critical direction o_1 from beta=(10,-6) on the positive side of H_1"),
}

CHAIN_INITS: Tuple[str, ...] = ("empty", "complete", "turan:2", "turan:3", "turan:4", "turan:5", "turan:6")


def get_preset(name: str) -> FigurePreset:
    try:
        return FIGURE_PRESETS[name]
    except KeyError:
        raise ConfigError(f"unknown preset {name!r}; choose from {', '.join(FIGURE_PRESETS)}") from None


@dataclass
class ChainReport:
    init: str
    seed: int
    terminal: Tuple[float, float]
    distances: Dict[int, float]
    nearest_j: int
    max_excursion: float
    acceptance_rate: float
    num_classes: int
    misfit: float
    final_hex: str

    def to_dict(self) -> Dict:
        return {
            "init": self.init,
            "seed": self.seed,
            "terminal": list(self.terminal),
            "nearest_j": self.nearest_j,
            "distances": {str(j): d for j, d in self.distances.items()},
            "max_excursion": self.max_excursion,
            "acceptance_rate": self.acceptance_rate,
            "partition": {"classes": self.num_classes, "misfit": self.misfit},
        }


def chain_report(config: SamplerConfig) -> ChainReport:
    """Run one chain and summarise where it ends up relative to the points v_{j,n}"""
    trajectory = run(config)
    path = trajectory.densities()
    end = path[-1]
    n = config.n
    targets = {j: np.asarray(turan_densities(n, j + 1).as_floats()) for j in range(n)}
    distances = {j: float(np.linalg.norm(end - v)) for j, v in targets.items()}
    partition = partition_recovery(trajectory.final_graph)
    return ChainReport(
        init=config.init.label(),
        seed=config.seed,
        terminal=(float(end[0]), float(end[1])),
        distances=distances,
        nearest_j=min(distances, key=distances.get),
        max_excursion=trajectory.max_excursion,
        acceptance_rate=trajectory.acceptance_rate,
        num_classes=partition.num_classes,
        misfit=float(partition.misfit),
        final_hex=trajectory.final_graph.to_hex(),
    )


def chain_seeds(seed: int, count: int) -> List[int]:
    """Independent per-chain seeds derived from one root seed"""
    return [int(s) for s in np.random.SeedSequence(seed).generate_state(count, dtype=np.uint64)]


def run_chains(configs: Sequence[SamplerConfig], workers: int = 1) -> List[ChainReport]:
    """Run chains, in parallel when workers > 1; reports come back in input order"""
    if workers <= 1:
        reports = []
        for i, config in enumerate(configs, 1):
            reports.append(chain_report(config))
            logger.info("[%d/%d] Completed chain %s", i, len(configs), config.init.label())
        return reports
    results: Dict[int, ChainReport] = {}
    with ProcessPoolExecutor(max_workers=workers) as executor:
        future_to_index = {executor.submit(chain_report, config): i for i, config in enumerate(configs)}
        for done, future in enumerate(as_completed(future_to_index), 1):
            index = future_to_index[future]
            results[index] = future.result()
            logger.info("[%d/%d] Completed chain %s", done, len(configs), configs[index].init.label())
    return [results[i] for i in range(len(configs))]


@dataclass
class FigureReport:
    preset: FigurePreset
    mode: ModeCheck
    chains: List[ChainReport]
    steps: int

    @property
    def predicted_j(self) -> int:
        return self.preset.predicted_r - 1

    def stable_chain(self) -> Optional[ChainReport]:
        label = f"Turan({self.preset.predicted_r})"
        return next((c for c in self.chains if c.init == label), None)

    def to_dict(self) -> Dict:
        prediction = self.preset.prediction()
        return {
            "preset": self.preset.name,
            "description": self.preset.description,
            "n": self.preset.n,
            "beta": list(self.preset.beta),
            "steps": self.steps,
            "prediction": prediction.to_dict(),
            "predicted_r": self.preset.predicted_r,
            "mode_check": self.mode.to_dict(),
            "chains": [c.to_dict() for c in self.chains],
        }


def figure_harness(preset_name: str, steps: int = 10 ** 6, seed: Optional[int] = None,
                   workers: Optional[int] = None, thin: int = 1000) -> FigureReport:
    """
    Mode check plus multi-start chains (empty, complete, Turan(2..6)) for a figure preset

    Args:
        preset_name: one of fig4, fig2, fig3_1, fig3_2
        steps: Metropolis steps per chain
        seed: root seed; per-chain seeds are derived from it
        workers: chain processes (defaults to TURAN_CHAIN_WORKERS)
        thin: recording interval
    """
    preset = get_preset(preset_name)
    settings = get_settings()
    seed = settings.seed if seed is None else seed
    workers = settings.chain_workers if workers is None else workers

    mode = turan_mode_check(preset.n, preset.beta)
    logger.info("%s: mode check r*=%d, predicted %d classes", preset.name, mode.r_star, preset.predicted_r)
    configs = [
        make_config(n=preset.n, beta=preset.beta, steps=steps, seed=s, init=init, thin=thin)
        for init, s in zip(CHAIN_INITS, chain_seeds(seed, len(CHAIN_INITS)))
    ]
    return FigureReport(preset, mode, run_chains(configs, workers), steps)
