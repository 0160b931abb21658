"""Baker–Norine rank, canonical divisors and the Riemann–Roch check.

Rank is computed straight from the definition on the working graph:
``r(D) >= k`` iff ``r(D - [v]) >= k - 1`` for every working vertex ``v``.
Each class is represented by its reduced vector at working vertex 0 and the
search keeps, per class, an interval ``lo <= r <= hi`` that only narrows. It
starts from Riemann's inequality ``deg - g <= r`` and ``r <= D_q(q)``.
The memo lives on the (shared, immutable) working graph, so repeated queries
on one graph get cheaper over time.
"""

from __future__ import annotations

from dataclasses import dataclass

from .divisor import Divisor
from .errors import ConsistencyError
from .graph import MetricGraph, genus, virtual_weightless
from .reduction import reduce_vector
from .working import WorkingGraph

_BASE = 0


def _order(wg: WorkingGraph) -> tuple[int, ...]:
    """Subtraction order: the base first (it fails fastest), then by valence."""
    got = wg._layers.get("rank-order")
    if got is None:
        rest = sorted(range(1, wg.n), key=lambda v: (-wg.valence[v], v))
        got = (_BASE, *rest)
        wg._layers["rank-order"] = got
    return got


def _entry(wg: WorkingGraph, key: tuple[int, ...]) -> list[int]:
    memo = wg._rank_memo
    got = memo.get(key)
    if got is None:
        # r <= D_q(q) because D - (D_q(q) + 1)[q] is reduced with a negative entry at q;
        # r >= deg - g since every class of degree >= g contains an effective divisor
        deg = sum(key)
        hi = min(key[_BASE], deg)
        lo = max(0, deg - wg.genus)
        if lo > hi:
            raise ConsistencyError(f"rank bounds {lo} > {hi}: reduction is broken")
        got = [lo, hi]
        with wg._lock:
            got = memo.setdefault(key, got)
    return got


def _canon(wg: WorkingGraph, vec) -> tuple[int, ...]:
    red, _ = reduce_vector(wg, vec, _BASE)
    return tuple(red)


def _at_least(wg: WorkingGraph, key: tuple[int, ...], k: int) -> bool:
    """Is ``r(key) >= k``? ``key`` is reduced with a nonnegative base entry."""
    if k <= 0:
        return True
    bounds = _entry(wg, key)
    if k <= bounds[0]:
        return True
    if k > bounds[1]:
        return False
    vec = list(key)
    ok = True
    for v in _order(wg):
        vec[v] -= 1
        sub = _canon(wg, vec)
        vec[v] += 1
        if sub[_BASE] < 0 or not _at_least(wg, sub, k - 1):
            ok = False
            break
    with wg._lock:
        if ok:
            bounds[0] = max(bounds[0], k)
        else:
            bounds[1] = min(bounds[1], k - 1)
    return ok


def rank_vector(wg: WorkingGraph, vec) -> int:
    key = _canon(wg, vec)
    if key[_BASE] < 0:
        return -1
    r = 0
    while _at_least(wg, key, r + 1):
        r += 1
    return r


def rank(d: Divisor) -> int:
    """Rank on the underlying weightless metric graph (vertex weights are ignored)."""
    wg = d.working()
    return rank_vector(wg, d.to_vector(wg))


def rank_weighted(d: Divisor, g: MetricGraph | None = None) -> int:
    """Rank on ``(Γ, ω)``: the rank of the same divisor on the virtual weightless graph."""
    g = d.graph if g is None else g
    if d.graph != g:
        d = Divisor(g, list(d.items()))
    return rank(d.embed(virtual_weightless(g)))


def canonical_divisor(g: MetricGraph, weighted: bool = False) -> Divisor:
    """``sum (val(v) - 2)[v]``; the weighted version adds ``2 w(v)`` at each vertex."""
    entries = {}
    for v in g.vertex_ids:
        c = g.valence(v) - 2 + (2 * g.weights[v] if weighted else 0)
        if c:
            entries[v] = c
    return Divisor(g, entries)


@dataclass(frozen=True)
class RRCheck:
    rank_d: int
    rank_k_minus_d: int
    lhs: int
    rhs: int

    @property
    def equal(self) -> bool:
        return self.lhs == self.rhs

    def to_json(self) -> dict:
        return {
            "rank_D": self.rank_d,
            "rank_K_minus_D": self.rank_k_minus_d,
            "lhs": self.lhs,
            "rhs": self.rhs,
            "equal": self.equal,
        }


def rr_check(d: Divisor, weighted: bool | None = None) -> RRCheck:
    """Evaluate both sides of Riemann–Roch with the rank engine.

    On a weighted graph the check runs on ``(Γ, ω)`` unless ``weighted=False``.
    """
    g = d.graph
    if weighted is None:
        weighted = g.has_weights
    k = canonical_divisor(g, weighted)
    rk = rank_weighted if weighted else (lambda x: rank(x))
    gen = genus(g).weighted if weighted else genus(g).unweighted
    a = rk(d)
    b = rk(k - d)
    return RRCheck(a, b, a - b, d.degree + 1 - gen)
