"""
Labeled simple graphs with exact edge/triangle statistics
Adjacency rows are Python ints used as bitmasks, so neighbourhood
intersections are a single AND plus popcount.
"""
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations
from math import comb
from typing import Iterable, List, Tuple

import networkx as nx

from errors import DomainError, FormatError


@dataclass(frozen=True)
class DensityPoint:
    """Edge and triangle homomorphism densities (e, t), kept as exact rationals"""
    e: Fraction
    t: Fraction

    def as_floats(self) -> Tuple[float, float]:
        return float(self.e), float(self.t)

    def __iter__(self):
        yield self.e
        yield self.t


def density_from_counts(n: int, edges: int, triangles: int) -> DensityPoint:
    """(2E/n^2, 6T/n^3) for exact edge and triangle counts"""
    return DensityPoint(Fraction(2 * edges, n * n), Fraction(6 * triangles, n ** 3))


@dataclass
class Graph:
    """
    Simple undirected graph on nodes 0..n-1

    rows[i] has bit j set iff {i, j} is an edge; the diagonal is always clear.
    """
    n: int
    rows: List[int] = field(default_factory=list)

    def __post_init__(self):
        if self.n < 2:
            raise DomainError(f"a graph needs at least 2 nodes, got n={self.n}")
        if not self.rows:
            self.rows = [0] * self.n
        if len(self.rows) != self.n:
            raise DomainError(f"expected {self.n} adjacency rows, got {len(self.rows)}")

    @classmethod
    def empty(cls, n: int) -> "Graph":
        return cls(n)

    @classmethod
    def complete(cls, n: int) -> "Graph":
        full = (1 << n) - 1
        return cls(n, [full ^ (1 << i) for i in range(n)])

    @classmethod
    def from_edges(cls, n: int, edges: Iterable[Tuple[int, int]]) -> "Graph":
        g = cls(n)
        for i, j in edges:
            g._check_pair(i, j)
            g.rows[i] |= 1 << j
            g.rows[j] |= 1 << i
        return g

    def copy(self) -> "Graph":
        return Graph(self.n, list(self.rows))

    def _check_pair(self, i: int, j: int) -> None:
        if i == j:
            raise DomainError(f"node pair must be distinct, got ({i}, {j})")
        if not (0 <= i < self.n and 0 <= j < self.n):
            raise DomainError(f"node pair ({i}, {j}) out of range for n={self.n}")

    def has_edge(self, i: int, j: int) -> bool:
        return bool((self.rows[i] >> j) & 1)

    def degree(self, i: int) -> int:
        return self.rows[i].bit_count()

    def edges(self) -> List[Tuple[int, int]]:
        return [(i, j) for i in range(self.n) for j in range(i + 1, self.n) if (self.rows[i] >> j) & 1]

    def edge_count(self) -> int:
        return sum(row.bit_count() for row in self.rows) // 2

    def triangle_count(self) -> int:
        # each triangle i<j<k is counted once, at its two smallest nodes
        total = 0
        for i in range(self.n):
            row_i = self.rows[i]
            higher = row_i >> (i + 1)
            j = i + 1
            while higher:
                if higher & 1:
                    total += ((row_i & self.rows[j]) >> (j + 1)).bit_count()
                higher >>= 1
                j += 1
        return total

    def edge_code(self) -> int:
        """Bitmask over pairs (i<j) in lexicographic order; identifies a labeled graph"""
        code = 0
        for bit, (i, j) in enumerate(combinations(range(self.n), 2)):
            if (self.rows[i] >> j) & 1:
                code |= 1 << bit
        return code

    @classmethod
    def from_edge_code(cls, n: int, code: int) -> "Graph":
        pairs = combinations(range(n), 2)
        return cls.from_edges(n, (pair for bit, pair in enumerate(pairs) if (code >> bit) & 1))

    def to_networkx(self) -> nx.Graph:
        g = nx.Graph()
        g.add_nodes_from(range(self.n))
        g.add_edges_from(self.edges())
        return g

    def to_edge_list(self) -> str:
        lines = [f"n {self.n}"]
        lines.extend(f"{i} {j}" for i, j in self.edges())
        return "\n".join(lines) + "\n"

    @classmethod
    def from_edge_list(cls, text: str) -> "Graph":
        n, body = _read_header(text)
        edges = []
        for line in body:
            parts = line.split()
            if len(parts) != 2:
                raise FormatError(f"expected 'i j', got {line!r}")
            edges.append((int(parts[0]), int(parts[1])))
        return cls.from_edges(n, edges)

    def to_hex(self) -> str:
        width = max(1, (self.n + 3) // 4)
        lines = [f"n {self.n}"]
        lines.extend(format(row, f"0{width}x") for row in self.rows)
        return "\n".join(lines) + "\n"

    @classmethod
    def from_hex(cls, text: str) -> "Graph":
        n, body = _read_header(text)
        try:
            rows = [int(line, 16) for line in body]
        except ValueError as exc:
            raise FormatError(f"bad hex row: {exc}") from exc
        g = cls(n, rows)
        for i, row in enumerate(rows):
            if row >> n or (row >> i) & 1:
                raise FormatError(f"row {i} has bits outside the node range or on the diagonal")
            for j in range(n):
                if (row >> j) & 1 and not (rows[j] >> i) & 1:
                    raise FormatError(f"adjacency is not symmetric at ({i}, {j})")
        return g


def _read_header(text: str) -> Tuple[int, List[str]]:
    lines = [line.strip() for line in text.splitlines() if line.strip()]
    if not lines or not lines[0].startswith("n "):
        raise FormatError("missing 'n <count>' header line")
    try:
        n = int(lines[0].split()[1])
    except (IndexError, ValueError) as exc:
        raise FormatError(f"bad header {lines[0]!r}") from exc
    return n, lines[1:]


def densities(g: Graph) -> DensityPoint:
    return density_from_counts(g.n, g.edge_count(), g.triangle_count())


def edge_fraction(g: Graph) -> float:
    """E / C(n,2): the fraction of possible edges present"""
    return g.edge_count() / comb(g.n, 2)


def _check_classes(n: int, r: int) -> None:
    if not 1 <= r <= n:
        raise DomainError(f"class count r must satisfy 1 <= r <= n, got r={r}, n={n}")


def turan_class_sizes(n: int, r: int) -> List[int]:
    """Class sizes of T(n, r), larger classes first"""
    _check_classes(n, r)
    q, extra = divmod(n, r)
    return [q + 1] * extra + [q] * (r - extra)


def turan_graph(n: int, r: int) -> Graph:
    """Complete r-partite graph on n nodes; node i belongs to class i mod r"""
    _check_classes(n, r)
    masks = [0] * r
    for i in range(n):
        masks[i % r] |= 1 << i
    full = (1 << n) - 1
    return Graph(n, [full & ~masks[i % r] for i in range(n)])


def turan_counts(n: int, r: int) -> Tuple[int, int]:
    """Exact (E, T) of T(n, r) from its class sizes"""
    sizes = turan_class_sizes(n, r)
    # elementary symmetric polynomials e1, e2, e3 of the class sizes
    e1 = e2 = e3 = 0
    for s in sizes:
        e3 += e2 * s
        e2 += e1 * s
        e1 += s
    return e2, e3


def turan_densities(n: int, r: int) -> DensityPoint:
    edges, triangles = turan_counts(n, r)
    return density_from_counts(n, edges, triangles)


def common_neighbors(g: Graph, i: int, j: int) -> int:
    g._check_pair(i, j)
    return (g.rows[i] & g.rows[j]).bit_count()


def flip_edge(g: Graph, i: int, j: int) -> Tuple[int, int]:
    """
    Toggle edge {i, j} in place

    Returns:
        (dE, dT): +1 and +c when the edge is added, -1 and -c when removed,
        where c is the number of common neighbours of i and j
    """
    c = common_neighbors(g, i, j)
    sign = -1 if (g.rows[i] >> j) & 1 else 1
    g.rows[i] ^= 1 << j
    g.rows[j] ^= 1 << i
    return sign, sign * c


@dataclass
class PartitionReport:
    """Recovered multipartite structure of a graph"""
    classes: List[List[int]]
    violations: int
    misfit: Fraction

    @property
    def num_classes(self) -> int:
        return len(self.classes)


def _violations(g: Graph, label: List[int]) -> int:
    bad = 0
    for i, j in combinations(range(g.n), 2):
        adjacent = bool((g.rows[i] >> j) & 1)
        if adjacent == (label[i] == label[j]):
            bad += 1
    return bad


def partition_recovery(g: Graph, max_sweeps: int = 50) -> PartitionReport:
    """
    Fit a complete multipartite structure to g

    Classes start as the colour classes of a greedy colouring of g (largest
    first), then single nodes move to whichever class (or a fresh singleton)
    minimises the pairs that break the multipartite pattern: an edge inside
    a class or a non-edge across classes. Every move strictly lowers the
    violation count, so the sweeps terminate.

    Returns:
        PartitionReport with classes sorted by smallest member and the
        misfit fraction violations / C(n, 2)
    """
    coloring = nx.greedy_color(g.to_networkx(), strategy="largest_first")
    label = [coloring[i] for i in range(g.n)]

    for _ in range(max_sweeps):
        moved = False
        for v in range(g.n):
            members = {}
            for u in range(g.n):
                if u != v:
                    members.setdefault(label[u], []).append(u)
            row = g.rows[v]

            # violations involving v, up to a constant: 2|N(v) & C| - |C|
            def cost(cls_members: List[int]) -> int:
                inside = sum(1 for u in cls_members if (row >> u) & 1)
                return 2 * inside - len(cls_members)

            current = cost(members.get(label[v], []))
            best_label, best_cost = label[v], current
            for lab, cls_members in members.items():
                c = cost(cls_members)
                if c < best_cost:
                    best_label, best_cost = lab, c
            if 0 < best_cost:
                best_label, best_cost = max(label) + 1, 0
            if best_cost < current:
                label[v] = best_label
                moved = True
        if not moved:
            break

    groups = {}
    for v in range(g.n):
        groups.setdefault(label[v], []).append(v)
    classes = sorted(groups.values(), key=lambda members: members[0])
    bad = _violations(g, label)
    return PartitionReport(classes=classes, violations=bad, misfit=Fraction(bad, comb(g.n, 2)))
