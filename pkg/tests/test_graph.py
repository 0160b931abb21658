import random
from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from helpers import graphs, random_graph
from tropdiv import corpus
from tropdiv.errors import PreconditionError, RefinementError, UnsupportedShapeError, ValidationError
from tropdiv.graph import (
    MetricGraph,
    Point,
    bridge_report,
    bridges,
    canonical_model,
    check_condition_i,
    contract_edges,
    contract_zero_weight_leaf_edges,
    genus,
    parse_rational,
    virtual_weightless,
)
from tropdiv.working import working_graph


class TestParsing:
    def test_rationals(self):
        assert parse_rational("3/2") == Fraction(3, 2)
        assert parse_rational("4") == 4
        assert parse_rational("6/4") == Fraction(3, 2)

    @pytest.mark.parametrize("bad", ["1.5", "1e3", "x", "1/0", 1.5, None, True])
    def test_rejects_non_rationals(self, bad):
        with pytest.raises(ValidationError):
            parse_rational(bad)

    def test_json_round_trip(self):
        for name, g in corpus.builders().items():
            assert MetricGraph.from_json(g.to_json()) == g, name

    def test_disconnected(self):
        with pytest.raises(ValidationError):
            MetricGraph.build(["a", "b"], [])

    def test_bad_edges(self):
        with pytest.raises(ValidationError):
            MetricGraph.build(["a"], [("e", "a", "b")])
        with pytest.raises(ValidationError):
            MetricGraph.build(["a", "b"], [("e", "a", "b", "0")])

    def test_points_normalise(self):
        g = MetricGraph.build(["a", "b"], [("e", "a", "b", "2")])
        assert g.point({"edge": "e", "offset": "0"}) == Point.at("a")
        assert g.point({"edge": "e", "offset": "2"}) == Point.at("b")
        assert g.point({"edge": "e", "offset": "1/3"}).label == "e@1/3"
        with pytest.raises(ValidationError):
            g.point({"edge": "e", "offset": "3"})


class TestGenus:
    def test_three_petal(self):
        g = corpus.three_petal()
        assert len(g.vertices) == 7 and len(g.edges) == 9
        assert genus(g).weighted == 3

    def test_single_vertex(self):
        assert genus(MetricGraph.build(["v"], [])) == (0, 0)

    def test_banana(self):
        assert genus(corpus.banana(3)).weighted == 3

    def test_weighted(self):
        g = corpus.three_petal(1)
        assert genus(g) == (4, 3)


class TestVirtualWeightless:
    def test_two_loops(self):
        g = virtual_weightless(corpus.weighted_point(2))
        assert len(g.edges) == 2 and all(e.is_loop and e.length == 1 for e in g.edges)
        assert not g.has_weights

    def test_identity_without_weights(self):
        g = corpus.ladder4()
        assert virtual_weightless(g) is g
        assert genus(g).weighted == 4

    @given(graphs(weights=True))
    def test_preserves_weighted_genus(self, g):
        h = virtual_weightless(g)
        assert genus(h).weighted == genus(h).unweighted == genus(g).weighted


class TestWorkingGraph:
    def test_theta(self):
        wg = working_graph(corpus.theta())
        assert wg.refinement == 2 and wg.n == 5 and len(wg.edges) == 6

    def test_loop_gets_midpoint(self):
        wg = working_graph(corpus.cycle(1))
        assert wg.n == 2 and all(a != b for a, b in wg.edges)

    def test_three_petal(self):
        wg = working_graph(corpus.three_petal())
        assert wg.n == 16 and wg.genus == 3

    def test_rational_lengths(self):
        g = MetricGraph.build(["a", "b"], [("e", "a", "b", "3/2"), ("f", "a", "b", "1/2")])
        wg = working_graph(g, {3})
        assert wg.refinement == 12
        assert wg.vertex_of({"edge": "e", "offset": "1/3"}) >= 2

    def test_off_grid(self):
        wg = working_graph(corpus.theta())
        with pytest.raises(RefinementError):
            wg.vertex_of({"edge": "e1", "offset": "1/3"})

    @given(graphs(rational=True))
    def test_invariants(self, g):
        wg = working_graph(g)
        assert wg.genus == genus(g).unweighted
        assert all(a != b for a, b in wg.edges)
        for i, p in enumerate(wg.points):
            assert wg.vertex_of(p) == i
        for i in range(wg.n_base, wg.n):
            assert wg.valence[i] == 2


class TestContraction:
    def test_three_petal_bridges(self):
        g = corpus.three_petal()
        h, ret = contract_edges(g, bridges(g))
        assert len(h.vertices) == 4 and genus(h).unweighted == 3
        assert ret(Point.on("e2", "1/2")) == ret(Point.at("v0"))

    def test_nothing(self):
        g = corpus.three_petal()
        h, ret = contract_edges(g, [])
        assert h == g and ret(Point.on("p1x", "1/2")) == Point.on("p1x", "1/2")

    def test_path(self):
        h, ret = contract_edges(corpus.path(2), ["s0", "s1"])
        assert len(h.vertices) == 1 and not h.edges
        assert {ret(Point.at(v)) for v in ("p0", "p1", "p2")} == {Point.at("p0")}

    def test_non_bridge(self):
        with pytest.raises(PreconditionError):
            contract_edges(corpus.theta(), ["e1"])

    def test_leaf_contraction(self):
        h, _ = contract_zero_weight_leaf_edges(corpus.star(3))
        assert len(h.vertices) == 1
        g = corpus.three_petal()
        assert contract_zero_weight_leaf_edges(g)[0] == g
        seg = MetricGraph.build(["a", ("b", 1)], [("e", "a", "b")])
        h, _ = contract_zero_weight_leaf_edges(seg)
        assert h.vertices == (("b", 1),)

    @given(graphs(weights=True))
    def test_bridge_contraction_keeps_genus(self, g):
        h, _ = contract_edges(g, bridges(g))
        assert genus(h) == genus(g)
        assert not bridges(h)


class TestCanonicalModel:
    def test_path(self):
        m = canonical_model(corpus.path(3))
        assert len(m.edges) == 1 and m.edges[0].length == 3

    def test_ladder(self):
        m = canonical_model(corpus.ladder4())
        assert set(m.vertex_ids) == {"w1", "v1", "w3", "v2", "b2", "b3"}
        assert sorted(e.length for e in m.edges) == [1] * 4 + [2] * 5

    def test_weighted_keeps_vertex(self):
        g = MetricGraph.build(["a", ("m", 1), "b"], [("e", "a", "m"), ("f", "m", "b")])
        assert "m" in canonical_model(g, weighted=True).vertex_ids
        assert "m" not in canonical_model(g).vertex_ids

    def test_circle(self):
        with pytest.raises(UnsupportedShapeError):
            canonical_model(corpus.cycle(3))

    @given(graphs())
    def test_preserves_length_and_genus(self, g):
        try:
            m = canonical_model(g)
        except UnsupportedShapeError:
            return
        assert m.total_length == g.total_length
        assert genus(m).unweighted == genus(g).unweighted


class TestBridges:
    def test_three_petal(self):
        rep = bridge_report(corpus.three_petal())
        assert len(rep.bridges) == 3 and all(b.positive_type for b in rep.bridges)
        assert rep.counts["v0"] == 3

    def test_banana(self):
        assert not bridge_report(corpus.banana(3)).bridges

    def test_segment(self):
        rep = bridge_report(corpus.path(1))
        assert [(b.side_genera, b.positive_type) for b in rep.bridges] == [((0, 0), False)]

    @given(graphs(max_vertices=7, weights=True))
    def test_count_parity(self, g):
        rep = bridge_report(g)
        assert sum(rep.counts.values()) == 2 * len(rep.positive_type)


class TestConditionI:
    def test_three_petal_fails(self):
        rep = check_condition_i(corpus.three_petal())
        assert (rep.holds, rep.vertex, rep.count, rep.bound) == (False, "v0", 3, 2)

    def test_ladder_holds(self):
        assert check_condition_i(corpus.ladder4()).holds

    def test_weighted_centre(self):
        assert check_condition_i(corpus.three_petal(1)).holds


def test_random_graph_helper_is_connected():
    rng = random.Random(0)
    for _ in range(50):
        random_graph(rng, 8, 4, rational=True, weights=True)
