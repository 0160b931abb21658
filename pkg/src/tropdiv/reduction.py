"""Dhar burning, reduced divisors and linear equivalence.

The vector-level helpers (``burn``, ``reduce_vector``) work on coefficient
lists indexed by working-graph vertices and are what the rank engine and the
moderator construction call in their inner loops.
"""

from __future__ import annotations

from dataclasses import dataclass

from .divisor import Divisor, FiringScript
from .errors import PreconditionError
from .graph import Point
from .working import WorkingGraph, working_graph_for


def burn(wg: WorkingGraph, vec, q: int) -> list[bool]:
    """Fire spreads from ``q``; ``v`` ignites once more than ``vec[v]`` of its edges burn."""
    adj = wg.adj
    burnt = [False] * wg.n
    burnt[q] = True
    hits = [0] * wg.n
    stack = [q]
    while stack:
        x = stack.pop()
        for y in adj[x]:
            if not burnt[y]:
                hits[y] += 1
                if hits[y] > vec[y]:
                    burnt[y] = True
                    stack.append(y)
    return burnt


def _layer_plan(wg: WorkingGraph, q: int):
    key = ("plan", q)
    plan = wg._layers.get(key)
    if plan is not None:
        return plan
    dist, layers = wg.layers(q)
    plan = []
    for k in range(len(layers) - 1, 0, -1):
        gain = []
        for v in layers[k]:
            c = sum(1 for w in wg.adj[v] if dist[w] == k - 1)
            gain.append((v, c))
        loss = []
        for u in layers[k - 1]:
            c = sum(1 for w in wg.adj[u] if dist[w] == k)
            if c:
                loss.append((u, c))
        plan.append((k, tuple(gain), tuple(loss)))
    plan = (dist, tuple(plan))
    wg._layers[key] = plan
    return plan


def reduce_vector(wg: WorkingGraph, vec, q: int, want_script: bool = False):
    """Return the ``q``-reduced vector equivalent to ``vec`` (and the firing counts).

    Stage 1 makes the divisor effective away from ``q`` by firing BFS balls
    around ``q``; stage 2 fires the unburnt set of Dhar's algorithm, as many
    times as stays legal, until everything burns. Firing counts ``c`` satisfy
    ``reduced = vec + div(c)``.
    """
    vec = list(vec)
    n = wg.n
    dist, plan = _layer_plan(wg, q)
    shots = {}
    for k, gain, loss in plan:
        t = 0
        for v, c in gain:
            if vec[v] < 0:
                need = (-vec[v] + c - 1) // c
                if need > t:
                    t = need
        if t:
            for v, c in gain:
                vec[v] += t * c
            for u, c in loss:
                vec[u] -= t * c
            shots[k] = t
    counts = None
    if want_script:
        counts = [0] * n
        if shots:
            acc = {}
            running = 0
            for k in range(max(dist) + 1, 0, -1):
                running += shots.get(k, 0)
                acc[k - 1] = running
            counts = [acc.get(dist[v], 0) for v in range(n)]
    adj = wg.adj
    while True:
        burnt = burn(wg, vec, q)
        unburnt = [v for v in range(n) if not burnt[v]]
        if not unburnt:
            break
        outs = []
        t = None
        for v in unburnt:
            o = sum(1 for w in adj[v] if burnt[w])
            outs.append(o)
            if o:
                m = vec[v] // o
                if t is None or m < t:
                    t = m
        for v, o in zip(unburnt, outs):
            if o:
                vec[v] -= t * o
                for w in adj[v]:
                    if burnt[w]:
                        vec[w] += t
        if counts is not None:
            for v in unburnt:
                counts[v] += t
    return vec, counts


def is_reduced_vector(wg: WorkingGraph, vec, q: int) -> bool:
    if any(c < 0 for i, c in enumerate(vec) if i != q):
        return False
    return all(burn(wg, vec, q))


# -- divisor-level API ----------------------------------------------------------


@dataclass(frozen=True)
class ReductionResult:
    reduced: Divisor
    witness: FiringScript
    base: Point

    def to_json(self) -> dict:
        return {"reduced": self.reduced.to_json(), "witness": self.witness.to_json(), "base": self.base.to_json()}


def _base_index(d: Divisor, v0) -> tuple[WorkingGraph, int, Point]:
    v0 = d.graph.point(v0)
    wg = d.working(v0)
    return wg, wg.vertex_of(v0), v0


def dhar_burn(d: Divisor, v0) -> tuple[set[Point], set[Point]]:
    wg, q, _ = _base_index(d, v0)
    vec = d.to_vector(wg)
    if any(c < 0 for i, c in enumerate(vec) if i != q):
        raise PreconditionError("burning needs a divisor effective away from the base point")
    burnt = burn(wg, vec, q)
    return (
        {wg.points[i] for i in range(wg.n) if burnt[i]},
        {wg.points[i] for i in range(wg.n) if not burnt[i]},
    )


def reduce(d: Divisor, v0) -> ReductionResult:
    wg, q, v0 = _base_index(d, v0)
    vec, counts = reduce_vector(wg, d.to_vector(wg), q, want_script=True)
    witness = FiringScript(wg, tuple(-c for c in counts))
    return ReductionResult(Divisor.from_vector(wg, vec), witness, v0)


def is_reduced(d: Divisor, v0) -> bool:
    wg, q, _ = _base_index(d, v0)
    return is_reduced_vector(wg, d.to_vector(wg), q)


@dataclass(frozen=True)
class PeelResult:
    """Either a peeling order of the support or a stuck set with every boundary point saturated."""

    sequence: tuple[Point, ...] | None
    stuck: frozenset[Point] | None = None

    @property
    def ok(self) -> bool:
        return self.sequence is not None


def _reachable_avoiding(wg: WorkingGraph, q: int, blocked: set[int]) -> list[bool]:
    seen = [False] * wg.n
    seen[q] = True
    stack = [q]
    while stack:
        x = stack.pop()
        for y in wg.adj[x]:
            if not seen[y] and y not in blocked:
                seen[y] = True
                stack.append(y)
    return seen


def peel_vector(wg: WorkingGraph, vec, q: int) -> tuple[list[int] | None, set[int] | None]:
    """Greedy construction of a peeling sequence for an effective ``vec`` with ``vec[q] == 0``.

    At each step the region reachable from ``q`` avoiding the remaining
    support is computed, and a remaining support point with fewer chips than
    edges into that region is appended. Returns ``(sequence, None)`` or
    ``(None, stuck_set)``.
    """
    remaining = {i for i, c in enumerate(vec) if c and i != q}
    seq = []
    while remaining:
        region = _reachable_avoiding(wg, q, remaining)
        pick = None
        for b in sorted(remaining):
            outdeg = sum(1 for w in wg.adj[b] if region[w])
            if vec[b] < outdeg:
                pick = b
                break
        if pick is None:
            return None, {i for i in range(wg.n) if not region[i]}
        seq.append(pick)
        remaining.discard(pick)
    return seq, None


def peel_sequence(d: Divisor, v0) -> PeelResult:
    wg, q, _ = _base_index(d, v0)
    vec = d.to_vector(wg)
    if any(c < 0 for c in vec) or vec[q] != 0:
        raise PreconditionError("peeling needs an effective divisor vanishing at the base point")
    seq, stuck = peel_vector(wg, vec, q)
    if seq is None:
        return PeelResult(None, frozenset(wg.points[i] for i in stuck))
    return PeelResult(tuple(wg.points[i] for i in seq))


@dataclass(frozen=True)
class Equivalence:
    equivalent: bool
    witness: FiringScript | None = None

    def __bool__(self) -> bool:
        return self.equivalent


def linearly_equivalent(d1: Divisor, d2: Divisor, v0=None) -> Equivalence:
    """Compare reduced representatives; the witness ``s`` satisfies ``d1 - div(s) = d2``."""
    d1._check(d2)
    if d1.degree != d2.degree:
        return Equivalence(False)
    extra = [d1.graph.point(v0)] if v0 is not None else []
    wg = working_graph_for(d1.graph, d1.support + d2.support + extra)
    q = wg.vertex_of(extra[0]) if extra else wg.default_base
    r1, c1 = reduce_vector(wg, d1.to_vector(wg), q, want_script=True)
    r2, c2 = reduce_vector(wg, d2.to_vector(wg), q, want_script=True)
    if r1 != r2:
        return Equivalence(False)
    # r = d1 + div(c1) = d2 + div(c2)  =>  d1 - div(c2 - c1) = d2
    return Equivalence(True, FiringScript(wg, tuple(b - a for a, b in zip(c1, c2))))
