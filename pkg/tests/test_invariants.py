import json

import pytest

from depthstab.errors import PreconditionError
from depthstab.graphs import Graph, broom, complete_graph, cycle_graph, enumerate_connected_graphs, path_graph, star_graph
from depthstab.ideals import edge_ideal, parse_ideal
from depthstab.invariants import (
    CHECK_IDS,
    TheoremReport,
    analytic_spread,
    analytic_spread_ideal,
    associated_primes,
    astab,
    depth_sequence,
    depth_upper_bound,
    dstab_from_depths,
    linear_relation_graph,
    morey_lower_bound,
    socle_witness_check,
    spread_lower_bound,
    verify_many,
    verify_paper,
)

P4 = path_graph(4)
C3 = cycle_graph(3)
K13 = star_graph(3)


def test_relation_graph_triangle():
    st = linear_relation_graph(edge_ideal(C3))
    assert (st.r, st.s) == (3, 1)
    assert st.gamma.edges == ((1, 2), (1, 3), (2, 3))


def test_relation_graph_p4():
    st = linear_relation_graph(edge_ideal(P4))
    assert (st.r, st.s) == (4, 2)
    assert st.gamma.edges == ((1, 3), (2, 4))


def test_relation_graph_star():
    st = linear_relation_graph(edge_ideal(K13))
    assert set(st.gamma.edges) == {(2, 3), (2, 4), (3, 4)}
    assert (st.r, st.s) == (3, 1)


def test_relation_graph_needs_single_degree():
    with pytest.raises(PreconditionError):
        linear_relation_graph(parse_ideal("(x1^2, x2)"))


def test_spread_examples():
    assert analytic_spread(P4) == 3
    assert analytic_spread(C3) == 3
    assert analytic_spread(Graph(2, ((1, 2),))) == 1
    assert analytic_spread_ideal(edge_ideal(complete_graph(4))) == 4


@pytest.mark.parametrize("n", range(2, 6))
def test_spread_closed_form(n):
    for g in enumerate_connected_graphs(n):
        assert analytic_spread(g, check=True) == analytic_spread_ideal(edge_ideal(g))


def test_bounds():
    I = edge_ideal(C3)
    assert depth_upper_bound(I, 2) == 0
    assert spread_lower_bound(I) == 3
    assert depth_upper_bound(edge_ideal(P4), 2) == 1
    with pytest.raises(PreconditionError):
        depth_upper_bound(I, 3)
    with pytest.raises(PreconditionError):
        depth_upper_bound(I, 0)


def test_dstab_from_depths():
    assert dstab_from_depths([1]) == 1
    assert dstab_from_depths([2, 1]) == 2
    assert dstab_from_depths([3, 3, 2, 2, 2, 1]) == 6
    assert dstab_from_depths([1, 0, 0]) == 2


def test_depth_sequence_examples():
    p = depth_sequence(K13)
    assert p.depths == [1, 1] and p.dstab == 1 and p.limit_matches
    p = depth_sequence(P4)
    assert p.depths == [2, 1] and p.dstab == 2 and p.spread == 3
    p = depth_sequence(C3)
    assert p.depths == [1, 0] and p.dstab == 2 and p.expected_limit == 0


def test_depth_sequence_single_edge():
    p = depth_sequence(Graph(2, ((1, 2),)), overshoot=2)
    assert p.depths == [1] and p.dstab == 1
    assert p.extra_depths == {2: 1, 3: 1}


def test_depth_sequence_overshoot_stays_at_limit():
    p = depth_sequence(cycle_graph(5), overshoot=1)
    assert p.depths[-1] == 0 and p.depth_at(p.horizon + 1) == 0


def test_depth_sequence_rejects_disconnected():
    with pytest.raises(PreconditionError, match="connected"):
        depth_sequence(Graph(4, ((1, 2), (3, 4))))
    with pytest.raises(PreconditionError, match="no edges"):
        depth_sequence(Graph(3, ()))


def test_associated_primes_examples():
    assert associated_primes(parse_ideal("(x1*x2)")) == [frozenset({1}), frozenset({2})]
    covers = [frozenset({1, 2}), frozenset({1, 3}), frozenset({2, 3})]
    assert associated_primes(edge_ideal(C3)) == covers
    sq = associated_primes(parse_ideal("(x1^2*x2^2, x1^2*x2*x3, x1*x2^2*x3, x1^2*x3^2, x1*x2*x3^2, x2^2*x3^2)"))
    assert sq == covers + [frozenset({1, 2, 3})]


def test_associated_primes_minimal_are_vertex_covers():
    # for edge ideals Ass(I) is the set of minimal vertex covers
    g = path_graph(5)
    assert associated_primes(edge_ideal(g)) == sorted(
        [frozenset(s) for s in ({2, 4}, {1, 3, 4}, {2, 3, 5}, {1, 3, 5})],
        key=lambda a: (len(a), sorted(a)),
    )


def test_astab_examples():
    assert astab(P4, verify=True).astab == 1
    assert astab(P4, verify=True).verified
    assert astab(C3).astab == 2
    assert astab(cycle_graph(5)).astab == 3


def test_morey_examples():
    assert morey_lower_bound(path_graph(6), 1) == 2
    assert morey_lower_bound(P4, 3) == 1
    assert morey_lower_bound(K13, 1) == 1
    assert morey_lower_bound(path_graph(6), 1, reading="min") == 1
    with pytest.raises(PreconditionError):
        morey_lower_bound(C3, 1)
    with pytest.raises(PreconditionError):
        morey_lower_bound(P4, 0)


def test_socle_witness_check_p4():
    wr = socle_witness_check(P4)
    assert wr.passed and wr.power == 2
    assert wr.witness == "x1*x2*x3"


@pytest.mark.parametrize("g", [K13, broom(2, 4), path_graph(6), broom(3, 5)], ids=["K13", "B24", "P6", "B35"])
def test_socle_witness_check_passes(g):
    wr = socle_witness_check(g)
    assert wr.count_ok and wr.not_member and wr.socle_ok


def test_verify_paper_path():
    rep = verify_paper(path_graph(5))
    assert list(rep.checks) == list(CHECK_IDS)
    assert rep.violations == []
    assert rep.depths == [2, 2, 1] and rep.dstab == 3 and rep.spread == 4
    assert rep.checks["thm_2_1b"].status == "pass"
    assert rep.checks["cor_2_2"].status == "pass"


def test_verify_paper_triangle():
    rep = verify_paper(C3)
    assert rep.violations == []
    assert rep.checks["thm_2_1a"].status == "skipped"
    assert rep.checks["remark_1_3"].witness["first_power_with_max_ideal"] == 2
    assert rep.astab == 2


def test_verify_paper_star_lemma_hypothesis():
    rep = verify_paper(K13)
    assert rep.checks["lemma_1_1"].status == "skipped"
    assert rep.checks["cor_2_2"].witness["a"] == 1


def test_verify_paper_resource_skip():
    rep = verify_paper(path_graph(7), gen_cap=5)
    assert rep.violations == []
    assert rep.resource_skips


def test_report_json_roundtrip():
    rep = verify_paper(broom(2, 4), overshoot=1)
    blob = json.dumps(rep.to_dict())
    back = TheoremReport.from_dict(json.loads(blob))
    assert back == rep


def test_verify_many_preserves_order():
    graphs = [path_graph(4), C3, star_graph(4), cycle_graph(4)]
    out = list(verify_many(graphs, workers=2))
    assert [g for g, _, _ in out] == graphs
    serial = list(verify_many(graphs, workers=1))
    assert [r.to_dict() for _, r, _ in out] == [r.to_dict() for _, r, _ in serial]
