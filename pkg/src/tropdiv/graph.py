"""Vertex-weighted metric graphs and their structural operations.

Lengths and offsets are exact :class:`fractions.Fraction` values. Ids are
opaque strings; everything iterates in id order so results are reproducible.
"""

from __future__ import annotations

import math
import re
from collections import defaultdict, deque
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from typing import Callable, Iterable, NamedTuple

from .errors import PreconditionError, UnsupportedShapeError, ValidationError

_RATIONAL_RE = re.compile(r"^\s*([+-]?\d+)\s*(?:/\s*(\d+)\s*)?$")


def parse_rational(value) -> Fraction:
    """Parse ``"p/q"``, ``"n"`` or an int. Floats and decimals are rejected."""
    if isinstance(value, bool):
        raise ValidationError(f"not a rational: {value!r}")
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, Fraction):
        return value
    if not isinstance(value, str):
        raise ValidationError(f"rationals must be strings 'p/q' or 'n', got {value!r}")
    m = _RATIONAL_RE.match(value)
    if not m:
        raise ValidationError(f"not a rational: {value!r}")
    den = int(m.group(2)) if m.group(2) is not None else 1
    if den == 0:
        raise ValidationError(f"zero denominator in {value!r}")
    return Fraction(int(m.group(1)), den)


def format_rational(x: Fraction) -> str:
    x = Fraction(x)
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


@dataclass(frozen=True)
class Edge:
    id: str
    tail: str
    head: str
    length: Fraction

    @property
    def is_loop(self) -> bool:
        return self.tail == self.head

    def other_end(self, v: str) -> str:
        return self.head if v == self.tail else self.tail


@dataclass(frozen=True)
class Point:
    """A vertex, or a point strictly inside an edge at ``offset`` from its tail."""

    vertex: str | None = None
    edge: str | None = None
    offset: Fraction | None = None

    @classmethod
    def at(cls, vertex: str) -> "Point":
        return cls(vertex=vertex)

    @classmethod
    def on(cls, edge: str, offset) -> "Point":
        return cls(edge=edge, offset=Fraction(offset))

    @property
    def is_vertex(self) -> bool:
        return self.vertex is not None

    def sort_key(self):
        if self.vertex is not None:
            return (0, self.vertex, Fraction(0))
        return (1, self.edge, self.offset)

    def __lt__(self, other: "Point") -> bool:
        return self.sort_key() < other.sort_key()

    @property
    def label(self) -> str:
        if self.vertex is not None:
            return self.vertex
        return f"{self.edge}@{format_rational(self.offset)}"

    def to_json(self):
        if self.vertex is not None:
            return self.vertex
        return {"edge": self.edge, "offset": format_rational(self.offset)}

    @classmethod
    def from_json(cls, obj) -> "Point":
        if isinstance(obj, str):
            return cls.at(obj)
        if isinstance(obj, dict) and set(obj) == {"edge", "offset"}:
            return cls.on(str(obj["edge"]), parse_rational(obj["offset"]))
        raise ValidationError(f"bad point: {obj!r}")

    def __repr__(self) -> str:
        return f"Point({self.label})"


class Genus(NamedTuple):
    weighted: int
    unweighted: int


@dataclass(frozen=True)
class MetricGraph:
    """Connected multigraph with positive rational edge lengths and vertex weights.

    ``vertices`` is a tuple of ``(id, weight)`` pairs and ``edges`` a tuple of
    :class:`Edge`, both sorted by id. Loops and parallel edges are allowed.
    """

    vertices: tuple[tuple[str, int], ...]
    edges: tuple[Edge, ...] = ()

    def __post_init__(self):
        verts = tuple(sorted((str(v), int(w)) for v, w in self.vertices))
        edges = tuple(
            sorted(
                (Edge(str(e.id), str(e.tail), str(e.head), Fraction(e.length)) for e in self.edges),
                key=lambda e: e.id,
            )
        )
        object.__setattr__(self, "vertices", verts)
        object.__setattr__(self, "edges", edges)
        ids = [v for v, _ in verts]
        if not ids:
            raise ValidationError("graph has no vertices")
        if len(set(ids)) != len(ids):
            raise ValidationError("duplicate vertex id")
        if any(w < 0 for _, w in verts):
            raise ValidationError("vertex weights must be nonnegative")
        eids = [e.id for e in edges]
        if len(set(eids)) != len(eids):
            raise ValidationError("duplicate edge id")
        known = set(ids)
        for e in edges:
            if e.tail not in known or e.head not in known:
                raise ValidationError(f"edge {e.id} references an unknown vertex")
            if e.length <= 0:
                raise ValidationError(f"edge {e.id} has non-positive length")
        if not self._connected(known, edges):
            raise ValidationError("graph is not connected")

    @staticmethod
    def _connected(verts: set[str], edges: Iterable[Edge]) -> bool:
        adj = defaultdict(list)
        for e in edges:
            adj[e.tail].append(e.head)
            adj[e.head].append(e.tail)
        start = min(verts)
        seen = {start}
        todo = [start]
        while todo:
            x = todo.pop()
            for y in adj[x]:
                if y not in seen:
                    seen.add(y)
                    todo.append(y)
        return seen == verts

    # -- construction helpers ------------------------------------------------

    @classmethod
    def build(cls, vertices, edges) -> "MetricGraph":
        """``vertices``: ids or ``(id, weight)``; ``edges``: ``(id, tail, head[, length])``."""
        vs = [(v, 0) if isinstance(v, str) else (v[0], v[1]) for v in vertices]
        es = []
        for e in edges:
            length = e[3] if len(e) > 3 else 1
            es.append(Edge(e[0], e[1], e[2], parse_rational(length)))
        return cls(tuple(vs), tuple(es))

    @classmethod
    def from_json(cls, obj) -> "MetricGraph":
        try:
            vs = [(str(v["id"]), int(v.get("weight", 0))) for v in obj["vertices"]]
            es = []
            for e in obj.get("edges", []):
                ends = e["ends"]
                if len(ends) != 2:
                    raise ValidationError(f"edge {e.get('id')} must have two ends")
                es.append(Edge(str(e["id"]), str(ends[0]), str(ends[1]), parse_rational(e.get("length", "1"))))
        except (KeyError, TypeError) as exc:
            raise ValidationError(f"malformed graph JSON: {exc}") from exc
        return cls(tuple(vs), tuple(es))

    def to_json(self) -> dict:
        return {
            "vertices": [{"id": v, "weight": w} for v, w in self.vertices],
            "edges": [
                {"id": e.id, "ends": [e.tail, e.head], "length": format_rational(e.length)} for e in self.edges
            ],
        }

    def to_dot(self) -> str:
        lines = ["graph G {"]
        for v, w in self.vertices:
            lines.append(f'  "{v}" [label="{v}' + (f" ({w})" if w else "") + '"];')
        for e in self.edges:
            lines.append(f'  "{e.tail}" -- "{e.head}" [label="{e.id}:{format_rational(e.length)}"];')
        lines.append("}")
        return "\n".join(lines) + "\n"

    # -- lookups -------------------------------------------------------------

    @cached_property
    def vertex_ids(self) -> tuple[str, ...]:
        return tuple(v for v, _ in self.vertices)

    @cached_property
    def weights(self) -> dict[str, int]:
        return dict(self.vertices)

    @cached_property
    def edge_map(self) -> dict[str, Edge]:
        return {e.id: e for e in self.edges}

    @cached_property
    def incident(self) -> dict[str, list[Edge]]:
        """Edges at each vertex; a loop appears twice."""
        inc = {v: [] for v in self.vertex_ids}
        for e in self.edges:
            inc[e.tail].append(e)
            inc[e.head].append(e)
        return inc

    def valence(self, v: str) -> int:
        return len(self.incident[v])

    @property
    def has_weights(self) -> bool:
        return any(w for _, w in self.vertices)

    @cached_property
    def total_length(self) -> Fraction:
        return sum((e.length for e in self.edges), Fraction(0))

    @cached_property
    def length_denominators(self) -> frozenset[int]:
        return frozenset(e.length.denominator for e in self.edges) | {1}

    def point(self, obj) -> Point:
        """Validate and normalise a point (offsets at 0 or the full length become vertices).

        Accepts a :class:`Point`, point JSON, or a label ``"edge@offset"``.
        """
        if isinstance(obj, str) and "@" in obj and obj not in self.weights:
            edge, _, off = obj.partition("@")
            obj = {"edge": edge, "offset": off}
        p = obj if isinstance(obj, Point) else Point.from_json(obj)
        if p.vertex is not None:
            if p.vertex not in self.weights:
                raise ValidationError(f"unknown vertex {p.vertex}")
            return p
        e = self.edge_map.get(p.edge)
        if e is None:
            raise ValidationError(f"unknown edge {p.edge}")
        if p.offset == 0:
            return Point.at(e.tail)
        if p.offset == e.length:
            return Point.at(e.head)
        if not 0 < p.offset < e.length:
            raise ValidationError(f"offset {format_rational(p.offset)} outside edge {e.id}")
        return p

    def scaled(self, factor) -> "MetricGraph":
        factor = Fraction(factor)
        return MetricGraph(self.vertices, tuple(Edge(e.id, e.tail, e.head, e.length * factor) for e in self.edges))

    def with_weights(self, weights: dict[str, int]) -> "MetricGraph":
        return MetricGraph(tuple((v, weights.get(v, w)) for v, w in self.vertices), self.edges)


def genus(g: MetricGraph) -> Genus:
    """Weighted genus ``|E| - |V| + 1 + sum(weights)`` and the plain first Betti number."""
    b1 = len(g.edges) - len(g.vertices) + 1
    return Genus(b1 + sum(w for _, w in g.vertices), b1)


def virtual_loop_id(v: str, i: int) -> str:
    return f"{v}~loop{i}"


def virtual_weightless(g: MetricGraph) -> MetricGraph:
    """Replace each weight ``w`` by ``w`` unit loops at the vertex."""
    if not g.has_weights:
        return g
    taken = set(g.edge_map)
    loops = []
    for v, w in g.vertices:
        for i in range(w):
            eid = virtual_loop_id(v, i)
            while eid in taken:
                eid += "'"
            taken.add(eid)
            loops.append(Edge(eid, v, v, Fraction(1)))
    return MetricGraph(tuple((v, 0) for v, _ in g.vertices), g.edges + tuple(loops))


# -- contraction ---------------------------------------------------------------


@dataclass(frozen=True)
class Retraction:
    """Point map from a graph onto a contraction of some of its bridges."""

    source: MetricGraph
    target: MetricGraph
    vertex_rep: dict
    contracted: frozenset[str]

    def __call__(self, p: Point) -> Point:
        p = self.source.point(p)
        if p.vertex is not None:
            return Point.at(self.vertex_rep[p.vertex])
        if p.edge in self.contracted:
            return Point.at(self.vertex_rep[self.source.edge_map[p.edge].tail])
        return p

    def __hash__(self):
        return hash((self.source, self.target, self.contracted))

    def then(self, other: "Retraction") -> "Retraction":
        rep = {v: other.vertex_rep[self.vertex_rep[v]] for v in self.source.vertex_ids}
        return Retraction(self.source, other.target, rep, self.contracted | other.contracted)


def identity_retraction(g: MetricGraph) -> Retraction:
    return Retraction(g, g, {v: v for v in g.vertex_ids}, frozenset())


def is_bridge(g: MetricGraph, eid: str) -> bool:
    e = g.edge_map[eid]
    if e.is_loop:
        return False
    rest = [f for f in g.edges if f.id != eid]
    return not MetricGraph._connected(set(g.vertex_ids), rest)


def bridges(g: MetricGraph) -> list[str]:
    return [e.id for e in g.edges if is_bridge(g, e.id)]


def _contract(g: MetricGraph, edges: set[str], pick: Callable[[list[str]], str]) -> Retraction:
    parent = {v: v for v in g.vertex_ids}

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for eid in edges:
        e = g.edge_map[eid]
        a, b = find(e.tail), find(e.head)
        if a != b:
            parent[a] = b
    groups = defaultdict(list)
    for v in g.vertex_ids:
        groups[find(v)].append(v)
    rep = {}
    new_vertices = []
    for members in groups.values():
        r = pick(sorted(members))
        new_vertices.append((r, sum(g.weights[m] for m in members)))
        for m in members:
            rep[m] = r
    new_edges = tuple(
        Edge(e.id, rep[e.tail], rep[e.head], e.length) for e in g.edges if e.id not in edges
    )
    target = MetricGraph(tuple(new_vertices), new_edges)
    return Retraction(g, target, rep, frozenset(edges))


def contract_edges(g: MetricGraph, edges: Iterable[str]) -> tuple[MetricGraph, Retraction]:
    """Contract a set of bridges; merged vertices keep the smallest id and add weights."""
    edges = set(edges)
    for eid in edges:
        if eid not in g.edge_map:
            raise ValidationError(f"unknown edge {eid}")
        if not is_bridge(g, eid):
            raise PreconditionError(f"edge {eid} is not a bridge")
    ret = _contract(g, edges, lambda members: members[0])
    return ret.target, ret


def contract_zero_weight_leaf_edges(g: MetricGraph) -> tuple[MetricGraph, Retraction]:
    """Repeatedly contract leaf edges whose leaf end has weight 0.

    The surviving end keeps its id, so the result embeds in ``g`` unchanged.
    """
    ret = identity_retraction(g)
    cur = g
    while True:
        leaf = None
        for v in cur.vertex_ids:
            inc = cur.incident[v]
            if len(inc) == 1 and cur.weights[v] == 0 and len(cur.vertices) > 1:
                leaf = (v, inc[0])
                break
        if leaf is None:
            return cur, ret
        v, e = leaf
        keep = e.other_end(v)
        step = _contract(cur, {e.id}, lambda members, keep=keep: keep if keep in members else members[0])
        ret = ret.then(step)
        cur = step.target


def canonical_model(g: MetricGraph, weighted: bool = False) -> MetricGraph:
    """Suppress valence-2 vertices (only weight-0 ones when ``weighted``).

    Merged edges keep the smaller id and sum their lengths. Weights of
    suppressed vertices are dropped in the unweighted variant.
    """
    cur = g
    while True:
        target = None
        for v in cur.vertex_ids:
            inc = cur.incident[v]
            if len(inc) != 2 or (weighted and cur.weights[v] > 0):
                continue
            if inc[0].id == inc[1].id:
                raise UnsupportedShapeError("the metric graph is a circle and has no canonical model")
            target = v
            break
        if target is None:
            return cur
        e1, e2 = sorted(cur.incident[target], key=lambda e: e.id)
        a = e1.other_end(target)
        b = e2.other_end(target)
        # orient so the surviving id keeps a sensible tail
        merged = Edge(e1.id, a, b, e1.length + e2.length)
        edges = tuple(e for e in cur.edges if e.id not in (e1.id, e2.id)) + (merged,)
        vertices = tuple((v, w) for v, w in cur.vertices if v != target)
        cur = MetricGraph(vertices, edges)


# -- bridges and condition (i) -------------------------------------------------


@dataclass(frozen=True)
class BridgeInfo:
    edge: str
    side_genera: tuple[int, int]
    positive_type: bool


@dataclass(frozen=True)
class BridgeReport:
    bridges: tuple[BridgeInfo, ...]
    counts: dict

    @property
    def positive_type(self) -> list[str]:
        return [b.edge for b in self.bridges if b.positive_type]

    def to_json(self) -> dict:
        return {
            "bridges": [
                {"edge": b.edge, "side_genera": list(b.side_genera), "positive_type": b.positive_type}
                for b in self.bridges
            ],
            "counts": dict(sorted(self.counts.items())),
        }


def _side(g: MetricGraph, start: str, removed: str) -> set[str]:
    seen = {start}
    todo = deque([start])
    while todo:
        x = todo.popleft()
        for e in g.incident[x]:
            if e.id == removed:
                continue
            y = e.other_end(x)
            if y not in seen:
                seen.add(y)
                todo.append(y)
    return seen


def _weighted_genus_of(g: MetricGraph, verts: set[str]) -> int:
    n_edges = sum(1 for e in g.edges if e.tail in verts and e.head in verts)
    return n_edges - len(verts) + 1 + sum(g.weights[v] for v in verts)


def bridge_report(g: MetricGraph) -> BridgeReport:
    infos = []
    counts = {v: 0 for v in g.vertex_ids}
    for eid in bridges(g):
        e = g.edge_map[eid]
        side_t = _side(g, e.tail, eid)
        side_h = set(g.vertex_ids) - side_t
        gen = (_weighted_genus_of(g, side_t), _weighted_genus_of(g, side_h))
        pos = gen[0] >= 1 and gen[1] >= 1
        infos.append(BridgeInfo(eid, gen, pos))
        if pos:
            counts[e.tail] += 1
            counts[e.head] += 1
    return BridgeReport(tuple(infos), counts)


@dataclass(frozen=True)
class ConditionReport:
    holds: bool
    vertex: str | None = None
    count: int | None = None
    bound: int | None = None

    def to_json(self) -> dict:
        out = {"holds": self.holds}
        if not self.holds:
            out["witness"] = {"vertex": self.vertex, "count": self.count, "bound": self.bound}
        return out


def check_condition_i(g: MetricGraph) -> ConditionReport:
    """At most ``2*w(v) + 2`` positive-type bridges at every vertex ``v``."""
    report = bridge_report(g)
    for v in g.vertex_ids:
        bound = 2 * g.weights[v] + 2
        if report.counts[v] > bound:
            return ConditionReport(False, v, report.counts[v], bound)
    return ConditionReport(True)


def lcm_all(values: Iterable[int]) -> int:
    out = 1
    for x in values:
        out = math.lcm(out, int(x))
    return out
