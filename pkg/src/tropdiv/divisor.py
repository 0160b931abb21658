"""Divisors on metric graphs and firing scripts on working graphs."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Mapping

from .errors import BindingError, ValidationError
from .graph import MetricGraph, Point, Retraction
from .working import WorkingGraph, point_denominator, working_graph


def _as_point(graph: MetricGraph, key) -> Point:
    return graph.point(key)


class Divisor:
    """Finitely supported integer function on the points of ``graph``.

    Build from a mapping ``{point: coeff}`` whose keys are :class:`Point`
    objects, vertex ids, or labels like ``"e1@1/2"``.
    """

    __slots__ = ("graph", "_entries", "_hash")

    def __init__(self, graph: MetricGraph, entries: Mapping | Iterable = ()):
        self.graph = graph
        items = entries.items() if isinstance(entries, Mapping) else entries
        acc: dict[Point, int] = {}
        for key, c in items:
            if isinstance(c, bool) or not isinstance(c, int):
                raise ValidationError(f"coefficient must be an integer, got {c!r}")
            p = _as_point(graph, key)
            acc[p] = acc.get(p, 0) + c
        self._entries = {p: acc[p] for p in sorted(acc) if acc[p]}
        self._hash = None

    # -- JSON ------------------------------------------------------------------

    @classmethod
    def from_json(cls, graph: MetricGraph, obj) -> "Divisor":
        if not isinstance(obj, list):
            raise ValidationError("divisor JSON must be a list of {at, coeff}")
        try:
            return cls(graph, [(Point.from_json(x["at"]), x["coeff"]) for x in obj])
        except (KeyError, TypeError) as exc:
            raise ValidationError(f"malformed divisor entry: {exc}") from exc

    def to_json(self) -> list:
        return [{"at": p.to_json(), "coeff": c} for p, c in self._entries.items()]

    # -- group structure -------------------------------------------------------

    def _check(self, other: "Divisor"):
        if not isinstance(other, Divisor):
            return NotImplemented
        if other.graph != self.graph:
            raise BindingError("divisors live on different graphs")

    def __add__(self, other: "Divisor") -> "Divisor":
        self._check(other)
        return Divisor(self.graph, list(self._entries.items()) + list(other._entries.items()))

    def __neg__(self) -> "Divisor":
        return Divisor(self.graph, {p: -c for p, c in self._entries.items()})

    def __sub__(self, other: "Divisor") -> "Divisor":
        return self + (-other)

    def __mul__(self, k: int) -> "Divisor":
        return Divisor(self.graph, {p: k * c for p, c in self._entries.items()})

    __rmul__ = __mul__

    def __eq__(self, other) -> bool:
        return isinstance(other, Divisor) and self.graph == other.graph and self._entries == other._entries

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash((self.graph, tuple(self._entries.items())))
        return self._hash

    def __getitem__(self, key) -> int:
        return self._entries.get(_as_point(self.graph, key), 0)

    def items(self):
        return self._entries.items()

    @property
    def degree(self) -> int:
        return sum(self._entries.values())

    @property
    def support(self) -> list[Point]:
        return list(self._entries)

    @property
    def is_effective(self) -> bool:
        return all(c >= 0 for c in self._entries.values())

    @property
    def denominators(self) -> set[int]:
        return {point_denominator(p) for p in self._entries} | {1}

    def __le__(self, other: "Divisor") -> bool:
        self._check(other)
        return (other - self).is_effective

    def __repr__(self) -> str:
        body = " + ".join(f"{c}[{p.label}]" for p, c in self._entries.items()) or "0"
        return f"Divisor({body})"

    # -- transport ---------------------------------------------------------------

    def to_vector(self, wg: WorkingGraph) -> list[int]:
        if wg.base != self.graph:
            raise BindingError("working graph is built on a different graph")
        vec = [0] * wg.n
        for p, c in self._entries.items():
            vec[wg.vertex_of(p)] += c
        return vec

    @classmethod
    def from_vector(cls, wg: WorkingGraph, vec) -> "Divisor":
        return cls(wg.base, [(wg.points[i], c) for i, c in enumerate(vec) if c])

    def working(self, *extra_points) -> WorkingGraph:
        dens = self.denominators | {point_denominator(self.graph.point(p)) for p in extra_points}
        return working_graph(self.graph, dens)

    def push(self, ret: Retraction) -> "Divisor":
        if ret.source != self.graph:
            raise BindingError("retraction starts on a different graph")
        return Divisor(ret.target, [(ret(p), c) for p, c in self._entries.items()])

    def embed(self, graph: MetricGraph) -> "Divisor":
        """Same points viewed on a graph containing this one (e.g. its virtual weightless graph)."""
        return Divisor(graph, list(self._entries.items()))


def point_divisor(graph: MetricGraph, *points) -> Divisor:
    return Divisor(graph, [(p, 1) for p in points])


def zero(graph: MetricGraph) -> Divisor:
    return Divisor(graph)


@dataclass(frozen=True)
class FiringScript:
    """Integer labels on working vertices; a piecewise-linear function with integer slopes."""

    wg: WorkingGraph
    values: tuple[int, ...]

    @classmethod
    def from_mapping(cls, wg: WorkingGraph, mapping: Mapping) -> "FiringScript":
        vals = [0] * wg.n
        for k, c in mapping.items():
            i = k if isinstance(k, int) else wg.vertex_of(_as_point(wg.base, k))
            vals[i] = c
        return cls(wg, tuple(vals))

    def div_vector(self) -> list[int]:
        """Sum of outgoing slopes at each vertex: ``sum_w (s(w) - s(v))``."""
        s = self.values
        return [sum(s[w] for w in self.wg.adj[v]) - len(self.wg.adj[v]) * s[v] for v in range(self.wg.n)]

    def div(self) -> Divisor:
        return Divisor.from_vector(self.wg, self.div_vector())

    def __sub__(self, other: "FiringScript") -> "FiringScript":
        return FiringScript(self.wg, tuple(a - b for a, b in zip(self.values, other.values)))

    def to_json(self) -> dict:
        return {self.wg.label(i): v for i, v in enumerate(self.values) if v}


def apply_script(d: Divisor, s: FiringScript) -> Divisor:
    """``d - div(s)``; ``d`` must sit on the script's grid."""
    vec = d.to_vector(s.wg)
    dv = s.div_vector()
    return Divisor.from_vector(s.wg, [a - b for a, b in zip(vec, dv)])
