import random

import pytest
from hypothesis import given

from helpers import graphs, random_effective, seeds
from tropdiv import corpus
from tropdiv.divisor import Divisor
from tropdiv.errors import PreconditionError
from tropdiv.moderator import AcyclicOrder, dominating_moderator, extend_reduced, moderator_from_order
from tropdiv.rank import canonical_divisor
from tropdiv.reduction import is_reduced, reduce
from tropdiv.working import working_graph


def reduced_with_hole(rng, g):
    """A divisor reduced at a random working vertex ``v0`` with coefficient -1 there."""
    wg = working_graph(g)
    v0 = rng.choice(wg.points)
    d = random_effective(rng, g, rng.randint(0, wg.genus + 1), on_working=True)
    red = reduce(d, v0).reduced
    return red - Divisor(g, {v0: red[v0] + 1}), v0


class TestOrders:
    def test_any_order_is_acyclic(self):
        wg = working_graph(corpus.ladder4())
        rng = random.Random(1)
        order = list(range(wg.n))
        rng.shuffle(order)
        o = AcyclicOrder(wg, tuple(order))
        assert o.is_acyclic()
        assert len(o.oriented_edges()) == len(wg.edges)

    def test_moderator_degree(self):
        for g in (corpus.theta(), corpus.ladder4(), corpus.three_petal()):
            wg = working_graph(g)
            m = moderator_from_order(AcyclicOrder(wg, tuple(range(wg.n))))
            assert m.divisor.degree == wg.genus - 1
            assert m.vector[0] == -1

    def test_reverse_orders_sum_to_canonical(self):
        for g in (corpus.banana(3), corpus.ladder4()):
            wg = working_graph(g)
            fwd = moderator_from_order(AcyclicOrder(wg, tuple(range(wg.n))))
            bwd = moderator_from_order(AcyclicOrder(wg, tuple(reversed(range(wg.n)))))
            assert fwd.divisor + bwd.divisor == canonical_divisor(g)

    def test_dot(self):
        wg = working_graph(corpus.theta())
        dot = AcyclicOrder(wg, tuple(range(wg.n))).to_dot()
        assert dot.startswith("digraph") and "->" in dot


class TestDominating:
    def test_theta_example(self):
        g = corpus.theta()
        m = dominating_moderator(Divisor(g, {"u": -1}), "u")
        assert m.vector[0] == -1 and is_reduced(m.divisor, "u")

    def test_requires_negative_base(self):
        g = corpus.theta()
        with pytest.raises(PreconditionError):
            dominating_moderator(Divisor(g), "u")

    def test_requires_reduced(self):
        g = corpus.banana(3)
        with pytest.raises(PreconditionError):
            dominating_moderator(Divisor(g, {"v1": 4, "v2": -1}), "v2")

    @given(graphs(max_extra=3), seeds())
    def test_properties(self, g, seed):
        rng = random.Random(seed)
        d, v0 = reduced_with_hole(rng, g)
        m = dominating_moderator(d, v0)
        k = m.divisor
        assert m.order.is_acyclic()
        assert k[v0] == -1
        assert k.degree == m.order.wg.genus - 1
        assert is_reduced(k, v0)
        assert (k - d).is_effective


class TestExtend:
    def test_json(self):
        g = corpus.ladder4()
        ext = extend_reduced(Divisor(g, {"v1": 1}), "v1")
        doc = ext.to_json()
        assert set(doc) == {"w", "extended", "moderator"}
        assert is_reduced(ext.extended, "v1")

    def test_degree_bound(self):
        g = corpus.theta()
        with pytest.raises(PreconditionError):
            extend_reduced(Divisor(g, {"e1@1/2": 2}), "u")

    @given(graphs(max_extra=3), seeds())
    def test_stays_reduced(self, g, seed):
        rng = random.Random(seed)
        wg = working_graph(g)
        if wg.genus == 0:
            return
        v0 = rng.choice(wg.points)
        d = reduce(random_effective(rng, g, rng.randint(0, wg.genus - 1), on_working=True), v0).reduced
        if d.degree - d[v0] > wg.genus - 1:
            return
        ext = extend_reduced(d, v0)
        assert ext.point != v0
        assert ext.extended.degree == d.degree + 1
        assert is_reduced(ext.extended, v0)

    def test_fills_to_genus(self):
        g = corpus.ladder4()
        d = Divisor(g)
        while d.degree < 4:
            d = extend_reduced(d, "w2").extended
        assert d.degree == 4 and is_reduced(d, "w2") and d["w2"] == 0
