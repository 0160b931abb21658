"""Random graphs and divisors shared by the test modules."""

from __future__ import annotations

import random
from fractions import Fraction

from hypothesis import strategies as st

from tropdiv.divisor import Divisor, FiringScript
from tropdiv.graph import MetricGraph, Point, genus
from tropdiv.working import working_graph

LENGTHS = (Fraction(1), Fraction(2), Fraction(1, 2), Fraction(3, 2))


def random_graph(
    rng: random.Random,
    max_vertices: int = 6,
    max_extra: int = 3,
    rational: bool = False,
    weights: bool = False,
    loops: bool = True,
) -> MetricGraph:
    n = rng.randint(1, max_vertices)
    ids = [f"v{i}" for i in range(n)]
    edges = []

    def length():
        return rng.choice(LENGTHS) if rational else Fraction(1)

    for i in range(1, n):
        edges.append((f"e{len(edges)}", ids[rng.randrange(i)], ids[i], length()))
    for _ in range(rng.randint(0, max_extra)):
        a, b = rng.choice(ids), rng.choice(ids)
        if a == b and not loops:
            continue
        edges.append((f"e{len(edges)}", a, b, length()))
    verts = [(v, rng.choice((0, 0, 0, 1)) if weights else 0) for v in ids]
    return MetricGraph.build(verts, edges)


def random_divisor(rng: random.Random, g: MetricGraph, degree: int | None = None, lo=-2, hi=3, on_working=False):
    if on_working:
        wg = working_graph(g)
        pts = list(wg.points)
    else:
        pts = [g.point(v) for v in g.vertex_ids]
    entries = {p: rng.randint(lo, hi) for p in rng.sample(pts, min(len(pts), rng.randint(1, 4)))}
    d = Divisor(g, entries)
    if degree is not None:
        d = d + Divisor(g, {pts[0]: degree - d.degree})
    return d


def random_effective(rng: random.Random, g: MetricGraph, degree: int, on_working=False) -> Divisor:
    pts = list(working_graph(g).points) if on_working else [g.point(v) for v in g.vertex_ids]
    return Divisor(g, [(rng.choice(pts), 1) for _ in range(degree)])


def random_script(rng: random.Random, wg, spread: int = 3) -> FiringScript:
    return FiringScript(wg, tuple(rng.randint(-spread, spread) for _ in range(wg.n)))


@st.composite
def graphs(draw, max_vertices=5, max_extra=3, rational=False, weights=False):
    seed = draw(st.integers(0, 2**32 - 1))
    return random_graph(random.Random(seed), max_vertices, max_extra, rational, weights)


def seeds():
    return st.integers(0, 2**32 - 1)


def random_hyperelliptic(rng: random.Random, max_vertices: int = 5, weights: bool = False) -> MetricGraph:
    """A tree whose edges are randomly doubled, with random loops; genus at least 2.

    Swapping each doubled pair and reversing each loop is an involution with a
    tree quotient.
    """
    while True:
        n = rng.randint(1, max_vertices)
        ids = [f"v{i}" for i in range(n)]
        edges = []
        for i in range(1, n):
            a, ln = ids[rng.randrange(i)], rng.choice((1, 1, 2))
            copies = rng.choice((1, 2, 2))
            edges += [(f"e{len(edges) + k}", a, ids[i], ln) for k in range(copies)]
        for _ in range(rng.randint(0, 2)):
            v = rng.choice(ids)
            edges.append((f"e{len(edges)}", v, v, rng.choice((1, 2))))
        verts = [(v, rng.choice((0, 0, 1)) if weights else 0) for v in ids]
        g = MetricGraph.build(verts, edges)
        if genus(g).weighted >= 2:
            return g


@st.composite
def hyperelliptic_graphs(draw, max_vertices=5, weights=False):
    seed = draw(st.integers(0, 2**32 - 1))
    return random_hyperelliptic(random.Random(seed), max_vertices, weights)


def scale_divisor(d: Divisor, factor) -> Divisor:
    """The image of ``d`` on ``d.graph`` with every length multiplied by ``factor``."""
    factor = Fraction(factor)
    h = d.graph.scaled(factor)
    moved = [(p if p.edge is None else Point.on(p.edge, p.offset * factor), c) for p, c in d.items()]
    return Divisor(h, moved)
