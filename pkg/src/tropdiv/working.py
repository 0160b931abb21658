"""Uniform subdivision of a metric graph into unit segments.

Every algorithm runs on a :class:`WorkingGraph`: base vertices plus the grid
points at spacing ``1/N`` along each edge, where ``N`` is always even so loop
midpoints are grid points and the result is loopless.
"""

from __future__ import annotations

import threading
from collections import deque
from fractions import Fraction
from functools import lru_cache
from typing import Iterable

from .errors import RefinementError
from .graph import MetricGraph, Point, format_rational, lcm_all


class WorkingGraph:
    def __init__(self, base: MetricGraph, refinement: int):
        if refinement <= 0 or refinement % 2:
            raise ValueError("refinement must be a positive even integer")
        self.base = base
        self.scale = lcm_all(base.length_denominators)
        self.refinement = refinement
        if refinement % self.scale:
            raise ValueError("refinement must be a multiple of every length denominator")
        points: list[Point] = [Point.at(v) for v in base.vertex_ids]
        index = {p: i for i, p in enumerate(points)}
        edges: list[tuple[int, int]] = []
        edge_labels: list[str] = []
        segments: dict[str, list[int]] = {}
        for e in base.edges:
            m = int(e.length * refinement)
            chain = [index[Point.at(e.tail)]]
            for j in range(1, m):
                p = Point.on(e.id, Fraction(j, refinement))
                index[p] = len(points)
                points.append(p)
                chain.append(index[p])
            chain.append(index[Point.at(e.head)])
            segments[e.id] = chain
            for k in range(m):
                edges.append((chain[k], chain[k + 1]))
                edge_labels.append(f"{e.id}#{k}")
        self.points = tuple(points)
        self.index = index
        self.edges = tuple(edges)
        self.edge_labels = tuple(edge_labels)
        self.segments = segments
        self.n = len(points)
        adj: list[list[int]] = [[] for _ in range(self.n)]
        for a, b in edges:
            if a == b:
                raise AssertionError("working graph must be loopless")
            adj[a].append(b)
            adj[b].append(a)
        self.adj = tuple(tuple(sorted(x)) for x in adj)
        self.valence = tuple(len(x) for x in self.adj)
        self.n_base = len(base.vertex_ids)
        # rank memo: reduced vector at the default base -> (known lower, known upper)
        self._rank_memo: dict = {}
        self._lock = threading.Lock()
        self._layers: dict[int, tuple] = {}

    # -- point maps ---------------------------------------------------------

    def vertex_of(self, p) -> int:
        p = self.base.point(p)
        i = self.index.get(p)
        if i is None:
            raise RefinementError(
                f"point {p.label} is not on the 1/{self.refinement} grid of this working graph"
            )
        return i

    def point_of(self, i: int) -> Point:
        return self.points[i]

    def label(self, i: int) -> str:
        return self.points[i].label

    @property
    def genus(self) -> int:
        return len(self.edges) - self.n + 1

    @property
    def default_base(self) -> int:
        # base vertices come first, in id order
        return 0

    def layers(self, q: int) -> tuple[tuple[int, ...], tuple[tuple[int, ...], ...]]:
        """BFS distances from ``q`` and the vertices of each distance layer."""
        got = self._layers.get(q)
        if got is not None:
            return got
        dist = [-1] * self.n
        dist[q] = 0
        order = deque([q])
        while order:
            x = order.popleft()
            for y in self.adj[x]:
                if dist[y] < 0:
                    dist[y] = dist[x] + 1
                    order.append(y)
        depth = max(dist)
        layers = [[] for _ in range(depth + 1)]
        for v, d in enumerate(dist):
            layers[d].append(v)
        got = (tuple(dist), tuple(tuple(x) for x in layers))
        self._layers[q] = got
        return got

    def laplacian(self) -> list[list[int]]:
        L = [[0] * self.n for _ in range(self.n)]
        for a, b in self.edges:
            L[a][a] += 1
            L[b][b] += 1
            L[a][b] -= 1
            L[b][a] -= 1
        return L

    def __repr__(self) -> str:
        return f"WorkingGraph(n={self.n}, edges={len(self.edges)}, N={self.refinement})"


def point_denominator(p: Point) -> int:
    return 1 if p.vertex is not None else p.offset.denominator


def grid_refinement(g: MetricGraph, denominators: Iterable[int] = ()) -> int:
    return 2 * lcm_all(set(denominators) | set(g.length_denominators))


@lru_cache(maxsize=256)
def _cached(g: MetricGraph, refinement: int) -> WorkingGraph:
    return WorkingGraph(g, refinement)


def working_graph(g: MetricGraph, denominators: Iterable[int] = (1,)) -> WorkingGraph:
    """Working graph whose grid contains every offset with a denominator in ``denominators``."""
    return _cached(g, grid_refinement(g, denominators))


def working_graph_for(g: MetricGraph, points: Iterable[Point], extra: Iterable[int] = ()) -> WorkingGraph:
    dens = {point_denominator(g.point(p)) for p in points} | set(extra) | {1}
    return working_graph(g, dens)


def format_offset(x: Fraction) -> str:
    return format_rational(x)
