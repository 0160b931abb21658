"""Independent checks for the chip-firing engine.

Equivalence is decided by membership in the image of the working-graph
Laplacian, using its Smith normal form ``U L V = S``: ``x`` is in the image
iff ``(U x)_i`` is divisible by ``s_i`` for every ``i`` (and zero where
``s_i = 0``). Nothing here calls the reduction or rank code.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from itertools import combinations_with_replacement
from math import comb

from sympy import ZZ, Matrix
from sympy.matrices.normalforms import smith_normal_decomp

from .divisor import Divisor
from .errors import BindingError, ResourceError
from .working import WorkingGraph, working_graph_for


@dataclass(frozen=True)
class Caps:
    """Resource limits for the brute-force rank."""

    max_vertices: int = 64
    max_subsets: int = 200_000  # multisets of one degree walked by the explicit method
    max_classes: int = 2_000_000  # (classes per degree) x (degrees) held by the class method


class LaplacianLattice:
    def __init__(self, wg: WorkingGraph):
        self.wg = wg
        self.laplacian = wg.laplacian()
        S, U, V = smith_normal_decomp(Matrix(self.laplacian), domain=ZZ)
        n = wg.n
        self.U = [[int(U[i, j]) for j in range(n)] for i in range(n)]
        self.V = [[int(V[i, j]) for j in range(n)] for i in range(n)]
        self.diag = tuple(abs(int(S[i, i])) for i in range(n))
        # coordinates that carry information: torsion factors > 1 and the free part
        self._coords = tuple(i for i, s in enumerate(self.diag) if s != 1)
        self._layers: list[set] = []

    @property
    def group_order(self) -> int:
        out = 1
        for s in self.diag:
            if s > 1:
                out *= s
        return out

    def _ux(self, x) -> list[int]:
        return [sum(u * v for u, v in zip(row, x) if v) for row in self.U]

    def contains(self, x) -> bool:
        for s, y in zip(self.diag, self._ux(x)):
            if s == 0:
                if y:
                    return False
            elif y % s:
                return False
        return True

    def class_of(self, x) -> tuple[int, ...]:
        """Complete invariant of ``x`` modulo the image of the Laplacian."""
        ux = self._ux(x)
        return tuple(ux[i] % self.diag[i] if self.diag[i] else ux[i] for i in self._coords)

    def unit_classes(self) -> list[tuple[int, ...]]:
        n = self.wg.n
        return [self.class_of([1 if j == i else 0 for j in range(n)]) for i in range(n)]

    def add(self, a, b) -> tuple[int, ...]:
        return tuple(
            (x + y) % self.diag[i] if self.diag[i] else x + y for i, x, y in zip(self._coords, a, b)
        )

    def sub(self, a, b) -> tuple[int, ...]:
        return tuple(
            (x - y) % self.diag[i] if self.diag[i] else x - y for i, x, y in zip(self._coords, a, b)
        )


@lru_cache(maxsize=64)
def lattice(wg: WorkingGraph) -> LaplacianLattice:
    return LaplacianLattice(wg)


def _common(d1: Divisor, d2: Divisor) -> WorkingGraph:
    if d1.graph != d2.graph:
        raise BindingError("divisors live on different graphs")
    return working_graph_for(d1.graph, d1.support + d2.support)


def oracle_equivalent(d1: Divisor, d2: Divisor) -> bool:
    if d1.degree != d2.degree:
        return False
    wg = _common(d1, d2)
    x = [a - b for a, b in zip(d1.to_vector(wg), d2.to_vector(wg))]
    return lattice(wg).contains(x)


def _multisets(n: int, m: int):
    return combinations_with_replacement(range(n), m)


def _guard(lat: LaplacianLattice, m: int, caps: Caps, method: str):
    n = lat.wg.n
    if n > caps.max_vertices:
        raise ResourceError(f"working graph has {n} vertices, cap is {caps.max_vertices}")
    if method == "explicit" and comb(n + m - 1, m) > caps.max_subsets:
        raise ResourceError(f"{comb(n + m - 1, m)} effective divisors of degree {m} exceed the cap")
    if method == "classes" and lat.group_order * (m + 1) > caps.max_classes:
        raise ResourceError(f"{lat.group_order} classes per degree exceed the cap")


def _effective_classes(lat: LaplacianLattice, top: int) -> list[set]:
    """``S[m]`` = classes of effective divisors of degree ``m``, for ``m <= top``."""
    layers = lat._layers
    if not layers:
        layers.append({tuple(0 for _ in lat._coords)})
    units = set(lat.unit_classes())
    while len(layers) <= top:
        layers.append({lat.add(c, u) for c in layers[-1] for u in units})
    return layers


def oracle_rank(d: Divisor, caps: Caps | None = None, method: str = "classes") -> int:
    """Rank straight from the definition.

    ``method="classes"`` compares the sets of effective classes of each
    degree; ``method="explicit"`` walks every pair ``(E, F)`` of effective
    divisors and tests ``d - E - F`` for membership in the lattice.
    """
    caps = caps or Caps()
    deg = d.degree
    if deg < 0:
        return -1
    wg = working_graph_for(d.graph, d.support)
    if wg.n > caps.max_vertices:
        raise ResourceError(f"working graph has {wg.n} vertices, cap is {caps.max_vertices}")
    lat = lattice(wg)
    vec = d.to_vector(wg)
    _guard(lat, deg, caps, method)
    if method == "classes":
        return _rank_classes(lat, vec, deg)
    if method == "explicit":
        return _rank_explicit(lat, vec, deg)
    raise ValueError(f"unknown method {method!r}")


def _rank_classes(lat: LaplacianLattice, vec, deg: int) -> int:
    layers = _effective_classes(lat, deg)
    cd = lat.class_of(vec)
    r = -1
    for s in range(deg + 1):
        if all(lat.sub(cd, c) in layers[deg - s] for c in layers[s]):
            r = s
        else:
            break
    return r


def _rank_explicit(lat: LaplacianLattice, vec, deg: int) -> int:
    n = lat.wg.n

    def has_effective(x, m) -> bool:
        for f in _multisets(n, m):
            y = list(x)
            for i in f:
                y[i] -= 1
            if lat.contains(y):
                return True
        return False

    r = -1
    for s in range(deg + 1):
        ok = True
        for e in _multisets(n, s):
            x = list(vec)
            for i in e:
                x[i] -= 1
            if not has_effective(x, deg - s):
                ok = False
                break
        if not ok:
            break
        r = s
    return r


def vertex_class_representatives(g, degree: int, points=None) -> list[Divisor]:
    """One divisor per class among divisors of the given degree supported on ``points``.

    ``points`` defaults to the vertices of ``g``. Classes are told apart by
    their lattice coordinates, so this walks the subgroup generated by the
    differences ``[v] - [v0]``.
    """
    points = [g.point(p) for p in (points or g.vertex_ids)]
    wg = working_graph_for(g, points)
    lat = lattice(wg)
    n = wg.n
    idx = [wg.vertex_of(p) for p in points]
    unit = lat.unit_classes()
    steps = [(lat.sub(unit[i], unit[idx[0]]), i) for i in idx[1:]]
    start = {idx[0]: degree} if degree else {}
    start_vec = [0] * n
    for i, c in start.items():
        start_vec[i] = c
    seen = {lat.class_of(start_vec): start}
    frontier = list(seen.items())
    while frontier:
        nxt = []
        for cls, rep in frontier:
            for step, i in steps:
                for sign in (1, -1):
                    c = lat.add(cls, step) if sign > 0 else lat.sub(cls, step)
                    if c in seen:
                        continue
                    new = dict(rep)
                    new[i] = new.get(i, 0) + sign
                    new[idx[0]] = new.get(idx[0], 0) - sign
                    seen[c] = new
                    nxt.append((c, new))
        frontier = nxt
    return [Divisor(g, [(wg.points[i], c) for i, c in rep.items() if c]) for rep in seen.values()]
