"""Moderators from acyclic orders, and growing reduced divisors one chip at a time.

A total order on the working vertices orients every edge from its larger end
to its smaller end. The moderator of that orientation is
``K+ = sum (val+(v) - 1)[v]`` where ``val+(v)`` counts edges leaving ``v``,
i.e. edges to smaller neighbours.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass

from .divisor import Divisor
from .errors import PreconditionError
from .graph import Point
from .reduction import is_reduced_vector, peel_vector
from .working import WorkingGraph, working_graph_for


@dataclass(frozen=True)
class AcyclicOrder:
    wg: WorkingGraph
    order: tuple[int, ...]  # working vertices, smallest first

    def __post_init__(self):
        if sorted(self.order) != list(range(self.wg.n)):
            raise ValueError("an acyclic order must list every working vertex exactly once")

    @property
    def position(self) -> list[int]:
        pos = [0] * self.wg.n
        for i, v in enumerate(self.order):
            pos[v] = i
        return pos

    def oriented_edges(self) -> list[tuple[int, int]]:
        """Edges as ``(tail, head)`` with the head the smaller end."""
        pos = self.position
        return [(a, b) if pos[a] > pos[b] else (b, a) for a, b in self.wg.edges]

    def val_plus(self) -> list[int]:
        out = [0] * self.wg.n
        for t, _ in self.oriented_edges():
            out[t] += 1
        return out

    def is_acyclic(self) -> bool:
        """Kahn's algorithm on the induced orientation."""
        indeg = [0] * self.wg.n
        succ = [[] for _ in range(self.wg.n)]
        for t, h in self.oriented_edges():
            succ[t].append(h)
            indeg[h] += 1
        todo = deque(v for v in range(self.wg.n) if indeg[v] == 0)
        seen = 0
        while todo:
            x = todo.popleft()
            seen += 1
            for y in succ[x]:
                indeg[y] -= 1
                if indeg[y] == 0:
                    todo.append(y)
        return seen == self.wg.n

    def to_dot(self) -> str:
        lines = ["digraph K {"]
        for t, h in self.oriented_edges():
            lines.append(f'  "{self.wg.label(t)}" -> "{self.wg.label(h)}";')
        lines.append("}")
        return "\n".join(lines) + "\n"


@dataclass(frozen=True)
class Moderator:
    order: AcyclicOrder
    vector: tuple[int, ...]

    @property
    def divisor(self) -> Divisor:
        return Divisor.from_vector(self.order.wg, self.vector)

    def to_json(self) -> dict:
        wg = self.order.wg
        return {
            "order": [wg.label(v) for v in self.order.order],
            "K": {wg.label(v): c for v, c in enumerate(self.vector) if c},
        }


def moderator_from_order(o: AcyclicOrder) -> Moderator:
    return Moderator(o, tuple(x - 1 for x in o.val_plus()))


def _bfs_order(wg: WorkingGraph, q: int, blocked: set[int]) -> list[int]:
    seen = [False] * wg.n
    seen[q] = True
    out = [q]
    todo = deque([q])
    while todo:
        x = todo.popleft()
        for y in wg.adj[x]:
            if not seen[y] and y not in blocked:
                seen[y] = True
                out.append(y)
                todo.append(y)
    return out


def dominating_order(wg: WorkingGraph, vec, q: int) -> list[int]:
    """The order used to build a moderator dominating the reduced ``vec``.

    ``q`` comes first. The support of ``vec`` away from ``q`` is peeled into
    ``a_1, ..., a_k``. Before each ``a_i`` come the not yet placed vertices of
    valence at least 2 in the region around ``q`` that avoids
    ``a_i, ..., a_k``, in BFS discovery order; then the remaining such
    vertices; the valence-1 vertices close the order.
    """
    vec = list(vec)
    vec[q] = 0
    seq, stuck = peel_vector(wg, vec, q)
    if seq is None:
        raise PreconditionError("divisor is not reduced at the base point")
    support = set(seq)
    leaves = [v for v in range(wg.n) if wg.valence[v] == 1 and v != q]
    placed = {q} | support | set(leaves)
    order = [q]
    for i, a in enumerate(seq):
        blocked = set(seq[i:])
        for b in _bfs_order(wg, q, blocked):
            if b not in placed:
                placed.add(b)
                order.append(b)
        order.append(a)
    for b in _bfs_order(wg, q, set()):
        if b not in placed:
            placed.add(b)
            order.append(b)
    order.extend(sorted(leaves))
    return order


def _reduced_with_negative_base(d: Divisor, v0) -> tuple[WorkingGraph, int, list[int], Point]:
    v0 = d.graph.point(v0)
    wg = working_graph_for(d.graph, d.support + [v0])
    q = wg.vertex_of(v0)
    vec = d.to_vector(wg)
    if not is_reduced_vector(wg, vec, q):
        raise PreconditionError(f"divisor is not reduced at {v0.label}")
    return wg, q, vec, v0


def dominating_moderator(d: Divisor, v0) -> Moderator:
    """A moderator ``K+`` that is reduced at ``v0``, has ``K+(v0) = -1`` and dominates ``d``.

    ``d`` must be reduced at ``v0`` with a negative coefficient there.
    """
    wg, q, vec, v0 = _reduced_with_negative_base(d, v0)
    if vec[q] >= 0:
        raise PreconditionError("the coefficient at the base point must be negative")
    return moderator_from_order(AcyclicOrder(wg, tuple(dominating_order(wg, vec, q))))


@dataclass(frozen=True)
class Extension:
    point: Point
    extended: Divisor
    moderator: Moderator

    def to_json(self) -> dict:
        return {
            "w": self.point.to_json(),
            "extended": self.extended.to_json(),
            "moderator": self.moderator.to_json(),
        }


def extend_reduced(d: Divisor, v0) -> Extension:
    """Find ``w != v0`` such that ``d + [w]`` stays reduced at ``v0``.

    Needs ``deg(d) - d(v0) <= g - 1``. The chip goes to the first working
    vertex (in point order) where the moderator dominating
    ``d - (d(v0) + 1)[v0]`` has room.
    """
    wg, q, vec, v0 = _reduced_with_negative_base(d, v0)
    g = wg.genus
    if d.degree - vec[q] > g - 1:
        raise PreconditionError(f"deg(D) - D(v0) = {d.degree - vec[q]} exceeds g - 1 = {g - 1}")
    shifted = list(vec)
    shifted[q] = -1
    mod = moderator_from_order(AcyclicOrder(wg, tuple(dominating_order(wg, shifted, q))))
    for w in range(wg.n):
        if w != q and shifted[w] < mod.vector[w]:
            p = wg.points[w]
            return Extension(p, d + Divisor(d.graph, {p: 1}), mod)
    raise AssertionError("moderator has no room; degree bound should have prevented this")
