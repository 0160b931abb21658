"""Hyperelliptic structure: detection, the involution, ``p`` and the closed-form rank.

Detection is a search over degree-2 divisors ``[u] + [v]`` on the vertices,
using the rank engine. The involution is found independently: build the
virtual weightless graph, contract its zero-weight leaf edges (giving the
graph called ``leafless`` below), contract its bridges (giving the ``core``),
enumerate order-2 symmetries of the core's branch structure and keep the one
whose quotient is a tree. That symmetry is then lifted back to the working
graph of ``leafless``, fixing every bridge pointwise.
"""

from __future__ import annotations

import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from itertools import combinations_with_replacement
from math import comb

from .divisor import Divisor
from .errors import ConsistencyError, PreconditionError, ResourceError, ValidationError
from .graph import (
    MetricGraph,
    Point,
    Retraction,
    bridges,
    contract_edges,
    contract_zero_weight_leaf_edges,
    genus,
    virtual_weightless,
)
from .rank import rank_vector, rank_weighted
from .reduction import linearly_equivalent, reduce_vector
from .working import WorkingGraph, working_graph, working_graph_for

# -- branch structure of a bridgeless core -------------------------------------


@dataclass(frozen=True)
class _Chain:
    """Maximal path through valence-2 vertices between two branch vertices."""

    tail: str
    head: str
    length: Fraction
    steps: tuple[tuple[str, bool], ...]  # (edge id, traversed tail->head)

    @property
    def is_loop(self) -> bool:
        return self.tail == self.head


def _chains(core: MetricGraph) -> tuple[list[str], list[_Chain]]:
    branch = [v for v in core.vertex_ids if core.valence(v) != 2]
    if not branch:
        raise PreconditionError("a circle has no branch vertices")
    is_branch = set(branch)
    used: set[str] = set()
    out = []
    for v in branch:
        for e in core.incident[v]:
            if e.id in used:
                continue
            steps = []
            cur, edge = v, e
            length = Fraction(0)
            while True:
                used.add(edge.id)
                fwd = edge.tail == cur
                steps.append((edge.id, fwd))
                length += edge.length
                nxt = edge.other_end(cur) if not edge.is_loop else cur
                if nxt in is_branch:
                    break
                edge = next(f for f in core.incident[nxt] if f.id != edge.id)
                cur = nxt
            out.append(_Chain(v, nxt, length, tuple(steps)))
    return branch, out


@dataclass(frozen=True)
class _Symmetry:
    sigma: dict  # branch vertex -> branch vertex
    cmap: tuple[tuple[int, bool], ...]  # chain index -> (image chain, reversed)

    def quotient_genus(self, n_branch: int) -> int:
        orbits_v = sum(1 for v, w in self.sigma.items() if v <= w)
        folded = sum(1 for i, (j, flip) in enumerate(self.cmap) if i == j and flip)
        orbits_e = sum(1 for i, (j, _) in enumerate(self.cmap) if i <= j)
        return orbits_e - (orbits_v + folded) + 1


def _symmetries(core: MetricGraph, branch: list[str], chains: list[_Chain]):
    """All order-at-most-2 symmetries of the branch structure."""
    signature = {}
    between: dict[tuple[str, str], list[Fraction]] = {}
    for c in chains:
        for end in {c.tail, c.head}:
            signature.setdefault(end, []).append((c.length, c.is_loop))
        key = tuple(sorted((c.tail, c.head)))
        between.setdefault(key, []).append(c.length)
    sig = {v: (core.valence(v), core.weights[v], tuple(sorted(signature.get(v, [])))) for v in branch}
    pair_lengths = {k: sorted(x) for k, x in between.items()}

    def lengths(a, b):
        return pair_lengths.get(tuple(sorted((a, b))), [])

    def sigmas(i, sigma):
        if i == len(branch):
            yield dict(sigma)
            return
        v = branch[i]
        if v in sigma:
            yield from sigmas(i + 1, sigma)
            return
        for w in branch:
            if sig[w] != sig[v]:
                continue
            if w != v and w in sigma:
                continue
            sigma[v] = w
            sigma[w] = v
            ok = all(lengths(v, x) == lengths(w, sigma[x]) for x in sigma)
            if ok:
                yield from sigmas(i + 1, sigma)
            del sigma[v]
            if w != v:
                del sigma[w]

    n = len(chains)

    def matchings(sigma, i, cmap):
        if i == n:
            yield tuple(cmap)
            return
        if cmap[i] is not None:
            yield from matchings(sigma, i + 1, cmap)
            return
        c = chains[i]
        st, sh = sigma[c.tail], sigma[c.head]
        for j in range(i, n):
            if cmap[j] is not None:
                continue
            f = chains[j]
            if f.length != c.length:
                continue
            for flip in (False, True):
                ends = (f.head, f.tail) if flip else (f.tail, f.head)
                if ends != (st, sh):
                    continue
                cmap[i] = (j, flip)
                cmap[j] = (i, flip)
                yield from matchings(sigma, i + 1, cmap)
                cmap[i] = None
                cmap[j] = None

    for sigma in sigmas(0, {}):
        for cmap in matchings(sigma, 0, [None] * n):
            yield _Symmetry(sigma, cmap)


# -- involutions on working graphs ---------------------------------------------


@dataclass(frozen=True)
class Involution:
    """Order-2 isometry acting on the vertices and edges of a working graph."""

    wg: WorkingGraph
    vmap: tuple[int, ...]
    emap: tuple[int, ...]

    @property
    def graph(self) -> MetricGraph:
        return self.wg.base

    def fixed(self) -> list[int]:
        return [v for v, w in enumerate(self.vmap) if v == w]

    @property
    def fixed_points(self) -> list[Point]:
        return [self.wg.points[v] for v in self.fixed()]

    def image(self, p) -> Point:
        return self.wg.points[self.vmap[self.wg.vertex_of(p)]]

    def pointwise_fixed_edges(self) -> list[str]:
        """Edges of the underlying graph on which every working vertex is fixed."""
        label_index = {lab: i for i, lab in enumerate(self.wg.edge_labels)}
        out = []
        for e, seg in sorted(self.wg.segments.items()):
            # a unit loop has both working vertices fixed but may still be reflected
            parts = [label_index[f"{e}#{k}"] for k in range(len(seg) - 1)]
            if all(self.vmap[v] == v for v in seg) and all(self.emap[i] == i for i in parts):
                out.append(e)
        return out

    def check(self):
        wg = self.wg
        for v, w in enumerate(self.vmap):
            if self.vmap[w] != v:
                raise ConsistencyError("vertex map is not an involution")
        for i, j in enumerate(self.emap):
            if self.emap[j] != i:
                raise ConsistencyError("edge map is not an involution")
            a, b = wg.edges[i]
            if {self.vmap[a], self.vmap[b]} != set(wg.edges[j]):
                raise ConsistencyError("edge map does not follow the vertex map")

    def to_json(self) -> dict:
        wg = self.wg
        return {
            "vertex_map": {wg.label(v): wg.label(w) for v, w in enumerate(self.vmap)},
            "edge_map": {wg.edge_labels[i]: wg.edge_labels[j] for i, j in enumerate(self.emap)},
            "fixed_vertices": [wg.label(v) for v in self.fixed()],
            "quotient_genus": quotient_genus(wg, self),
        }


def quotient_genus(wg: WorkingGraph, inv: Involution) -> int:
    """Genus of the quotient graph.

    Orbits of vertices and of edges give the quotient; an edge sent to itself
    with its ends swapped folds at its midpoint, adding one vertex.
    """
    if inv.wg is not wg:
        raise ValidationError("involution lives on a different working graph")
    vertices = sum(1 for v, w in enumerate(inv.vmap) if v <= w)
    edges = 0
    for i, j in enumerate(inv.emap):
        if i < j:
            edges += 1
        elif i == j:
            edges += 1
            a, b = wg.edges[i]
            if inv.vmap[a] == b and a != b:
                vertices += 1
    return edges - vertices + 1


def _lift(wg: WorkingGraph, chains: list[_Chain], sym: _Symmetry) -> Involution:
    label_index = {lab: i for i, lab in enumerate(wg.edge_labels)}
    vertex_runs, edge_runs = [], []
    for c in chains:
        verts, edges = [], []
        for eid, fwd in c.steps:
            seg = wg.segments[eid]
            idx = [label_index[f"{eid}#{k}"] for k in range(len(seg) - 1)]
            if not fwd:
                seg, idx = seg[::-1], idx[::-1]
            verts.extend(seg if not verts else seg[1:])
            edges.extend(idx)
        vertex_runs.append(verts)
        edge_runs.append(edges)
    vmap = list(range(wg.n))
    emap = list(range(len(wg.edges)))
    assigned = {}
    for i, (j, flip) in enumerate(sym.cmap):
        src_v, dst_v = vertex_runs[i], vertex_runs[j]
        src_e, dst_e = edge_runs[i], edge_runs[j]
        if flip:
            dst_v, dst_e = dst_v[::-1], dst_e[::-1]
        for a, b in zip(src_v, dst_v):
            if assigned.setdefault(a, b) != b:
                raise ConsistencyError("symmetry does not lift consistently to the working graph")
            vmap[a] = b
        for a, b in zip(src_e, dst_e):
            emap[a] = b
    inv = Involution(wg, tuple(vmap), tuple(emap))
    inv.check()
    return inv


@dataclass(frozen=True)
class InvolutionSearch:
    involution: Involution | None
    examined: int
    tree_quotients: int

    def to_json(self) -> dict:
        out = {"involution": self.involution.to_json() if self.involution else None}
        out["examined"] = self.examined
        return out


@dataclass(frozen=True)
class _Structure:
    weightless: MetricGraph
    leafless: MetricGraph
    to_leafless: Retraction
    core: MetricGraph
    search: InvolutionSearch


@lru_cache(maxsize=128)
def _structure(g: MetricGraph) -> _Structure:
    if genus(g).weighted < 2:
        raise PreconditionError(f"genus {genus(g).weighted} < 2: no hyperelliptic involution to look for")
    gw = virtual_weightless(g)
    leafless, ret = contract_zero_weight_leaf_edges(gw)
    core, _ = contract_edges(leafless, bridges(leafless))
    branch, chains = _chains(core)
    found = []
    examined = 0
    for sym in _symmetries(core, branch, chains):
        examined += 1
        if sym.quotient_genus(len(branch)) == 0:
            found.append(sym)
    if len(found) > 1:
        raise ConsistencyError(f"{len(found)} involutions with tree quotient; expected at most one")
    inv = None
    if found:
        inv = _lift(working_graph(leafless), chains, found[0])
        if quotient_genus(inv.wg, inv) != 0:
            raise ConsistencyError("lifted involution does not have a tree quotient")
    return _Structure(gw, leafless, ret, core, InvolutionSearch(inv, examined, len(found)))


def find_involution(g: MetricGraph) -> InvolutionSearch:
    """The hyperelliptic involution of ``(Γ, ω)`` acting on its leafless virtual graph."""
    return _structure(g).search


def _require(g: MetricGraph) -> tuple[_Structure, Involution]:
    st = _structure(g)
    if st.search.involution is None:
        raise PreconditionError("graph is not hyperelliptic")
    return st, st.search.involution


def _to_leafless(d: Divisor, st: _Structure) -> Divisor:
    return d.embed(st.weightless).push(st.to_leafless)


# -- detection -------------------------------------------------------------------


@dataclass(frozen=True)
class HyperellipticCert:
    verdict: bool
    genus: int
    pair: tuple[str, str] | None = None
    divisor: Divisor | None = None
    involution: Involution | None = None
    refutation: str | None = None

    def __bool__(self) -> bool:
        return self.verdict

    def to_json(self) -> dict:
        out = {"hyperelliptic": self.verdict, "genus": self.genus}
        if self.verdict:
            out["divisor"] = self.divisor.to_json()
            out["involution"] = self.involution.to_json()
        else:
            out["refutation"] = self.refutation
        return out


def is_hyperelliptic(g: MetricGraph) -> HyperellipticCert:
    """Search vertex pairs for a rank-1 degree-2 divisor, then cross-check with the involution."""
    gw = genus(g).weighted
    if gw < 2:
        return HyperellipticCert(False, gw, refutation=f"genus {gw} < 2")
    ids = g.vertex_ids
    pair = None
    for i, u in enumerate(ids):
        for v in ids[i:]:
            if rank_weighted(Divisor(g, {u: 1}) + Divisor(g, {v: 1}), g) == 1:
                pair = (u, v)
                break
        if pair:
            break
    search = find_involution(g)
    if pair is None:
        if search.involution is not None:
            raise ConsistencyError("an involution with tree quotient exists but no vertex pair has rank 1")
        return HyperellipticCert(False, gw, refutation="no pair of vertices gives a divisor of rank 1")
    if search.involution is None:
        raise ConsistencyError(f"[{pair[0]}] + [{pair[1]}] has rank 1 but no involution was found")
    st = _structure(g)
    d = Divisor(g, {pair[0]: 1}) + Divisor(g, {pair[1]: 1})
    w = st.leafless.vertex_ids[0]
    orbit = Divisor(st.leafless, {w: 1}) + Divisor(st.leafless, {search.involution.image(w): 1})
    if not linearly_equivalent(_to_leafless(d, st), orbit):
        raise ConsistencyError("pair divisor is not equivalent to [w] + [i(w)]")
    return HyperellipticCert(True, gw, pair, d, search.involution)


# -- p and the closed-form rank -------------------------------------------------


def p_value(d: Divisor, g: MetricGraph | None = None, fixed_point=None) -> int:
    """Largest ``r`` with ``d - 2r[v0]`` equivalent to an effective divisor, ``v0`` fixed by the involution.

    Computed as half the coefficient at ``v0`` of the ``v0``-reduced form,
    rounded down. ``fixed_point`` picks ``v0``; the default is the first fixed
    working vertex.
    """
    g = d.graph if g is None else g
    st, inv = _require(g)
    if not d.is_effective:
        raise PreconditionError("p is defined here for effective divisors")
    if fixed_point is None:
        v0 = inv.fixed_points[0]
    else:
        v0 = st.leafless.point(fixed_point)
        if inv.image(v0) != v0:
            raise PreconditionError(f"{v0.label} is not fixed by the involution")
    dd = _to_leafless(d, st)
    wg = working_graph_for(st.leafless, dd.support + [v0])
    q = wg.vertex_of(v0)
    red, _ = reduce_vector(wg, dd.to_vector(wg), q)
    return red[q] // 2


def hyp_rank(d: Divisor, g: MetricGraph | None = None) -> int:
    """Rank from ``p``: ``p`` while ``deg - p <= g``, and ``deg - g`` beyond that."""
    g = d.graph if g is None else g
    p = p_value(d, g)
    gw = genus(g).weighted
    return p if d.degree - p <= gw else d.degree - gw


def g12_class(g: MetricGraph) -> Divisor:
    """``[v] + [i(v)]`` for the first vertex ``v`` of the leafless graph whose image lies on ``g``."""
    st, inv = _require(g)
    for v in st.leafless.vertex_ids:
        img = inv.image(v)
        if img.vertex is not None or img.edge in g.edge_map:
            return Divisor(g, {v: 1}) + Divisor(g, {img: 1})
    raise ConsistencyError("no vertex has its image on the original graph")


# -- W^r_d on a finite grid ------------------------------------------------------


@dataclass(frozen=True)
class WdrResult:
    denominator: int
    divisors: tuple[Divisor, ...]

    def to_json(self) -> dict:
        return {
            "denominator": self.denominator,
            "complete_for_grid": True,
            "divisors": [d.to_json() for d in self.divisors],
        }


def grid_points(g: MetricGraph, denominator: int) -> list[Point]:
    pts = [Point.at(v) for v in g.vertex_ids]
    for e in g.edges:
        steps = e.length * denominator
        if steps.denominator != 1:
            raise ValidationError(f"edge {e.id} has length {e.length}, not a multiple of 1/{denominator}")
        pts.extend(Point.on(e.id, Fraction(k, denominator)) for k in range(1, int(steps)))
    return pts


def _rank_job(args) -> int:
    graph, denominator, vec_items = args
    wg = working_graph(graph, {denominator})
    vec = [0] * wg.n
    for p, c in vec_items:
        vec[wg.vertex_of(p)] += c
    return rank_vector(wg, vec)


def wdr_enumerate(
    g: MetricGraph,
    d: int,
    r: int,
    denominator: int = 1,
    max_candidates: int = 200_000,
    jobs: int = 1,
) -> WdrResult:
    """Classes of degree ``d`` and rank at least ``r`` among effective divisors on the ``1/denominator`` grid.

    Each class is reported by its reduced form at the first vertex of ``g``
    (computed on the virtual weightless graph).
    """
    if d < 0 or r < 0 or denominator < 1:
        raise ValidationError("need d >= 0, r >= 0 and denominator >= 1")
    pts = grid_points(g, denominator)
    total = comb(len(pts) + d - 1, d) if d else 1
    if total > max_candidates:
        raise ResourceError(f"{total} effective divisors on the grid exceed the cap {max_candidates}")
    gw = virtual_weightless(g)
    wg = working_graph(gw, {denominator})
    base = 0
    idx = [wg.vertex_of(p) for p in pts]
    classes: dict[tuple[int, ...], None] = {}
    for combo in combinations_with_replacement(range(len(pts)), d):
        vec = [0] * wg.n
        for i in combo:
            vec[idx[i]] += 1
        red, _ = reduce_vector(wg, vec, base)
        classes.setdefault(tuple(red), None)
    keys = list(classes)
    if jobs > 1 and len(keys) > 1:
        payload = [(gw, denominator, [(wg.points[i], c) for i, c in enumerate(k) if c]) for k in keys]
        with ProcessPoolExecutor(max_workers=min(jobs, os.cpu_count() or 1)) as pool:
            ranks = list(pool.map(_rank_job, payload, chunksize=8))
    else:
        ranks = [rank_vector(wg, list(k)) for k in keys]
    out = []
    for k, rk in zip(keys, ranks):
        if rk < r:
            continue
        entries = [(wg.points[i], c) for i, c in enumerate(k) if c]
        if any(p.edge is not None and p.edge not in g.edge_map for p, _ in entries):
            raise ConsistencyError("reduced representative left the original graph")
        out.append(Divisor(g, entries))
    out.sort(key=lambda x: [(p.sort_key(), c) for p, c in x.items()])
    return WdrResult(denominator, tuple(out))


def extend_to_genus(d: Divisor, g: MetricGraph | None = None) -> tuple[Divisor, Point]:
    """Grow an effective ``d`` with ``p = 0`` to degree ``genus`` keeping ``p = 0``.

    Works on the leafless virtual graph at the first fixed point ``v0`` of the
    involution: the reduced form of ``d`` (with one chip at ``v0`` set aside if
    present) gains chips one at a time, each staying reduced at ``v0``.
    Returns the extended divisor (on the leafless graph) and ``v0``.
    """
    from .moderator import extend_reduced

    g = d.graph if g is None else g
    st, inv = _require(g)
    gw = genus(g).weighted
    if d.degree > gw:
        raise PreconditionError("degree already exceeds the genus")
    v0 = inv.fixed_points[0]
    dd = _to_leafless(d, st)
    wg = working_graph_for(st.leafless, dd.support + [v0])
    q = wg.vertex_of(v0)
    red, _ = reduce_vector(wg, dd.to_vector(wg), q)
    if red[q] >= 2 or any(c < 0 for c in red):
        raise PreconditionError("need an effective divisor with p = 0")
    held = red[q]
    red[q] = 0
    cur = Divisor.from_vector(wg, red)
    while cur.degree + held < gw:
        cur = extend_reduced(cur, v0).extended
    return cur + Divisor(st.leafless, {v0: held}), v0
