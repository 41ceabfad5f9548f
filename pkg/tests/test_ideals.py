import itertools

import pytest
from hypothesis import given, settings, strategies as st

from depthstab.errors import PreconditionError, ResourceLimitError, ValidationError
from depthstab.graphs import Graph, cycle_graph, enumerate_connected_graphs, incidence_matrix, path_graph
from depthstab.ideals import (
    MonomialIdeal,
    divides,
    edge_ideal,
    exponent_matrix,
    format_monomial,
    lcm,
    lcm_lattice,
    localize,
    minimalize,
    parse_ideal,
    parse_monomial,
    power,
    power_by_products,
    powers,
    substitute,
    substitute_monomial,
)

P4 = edge_ideal(path_graph(4))
C3 = edge_ideal(cycle_graph(3))


def mono(text, n):
    return parse_monomial(text, n)


def test_edge_ideal_p4():
    assert P4.gens == ((0, 0, 1, 1), (0, 1, 1, 0), (1, 1, 0, 0))
    assert str(P4) == "(x3*x4, x2*x3, x1*x2)"


def test_edge_ideal_needs_edges():
    with pytest.raises(PreconditionError):
        edge_ideal(Graph(3, ()))


def test_minimalize_drops_multiples():
    I = minimalize([(2, 1), (1, 0), (0, 3), (1, 0)], 2)
    assert I.gens == ((1, 0), (0, 3))


def test_minimalize_rejects_empty_and_bad_width():
    with pytest.raises(ValidationError):
        minimalize([], 3)
    with pytest.raises(ValidationError):
        minimalize([(1, 0)], 3)


monomials3 = st.lists(st.tuples(*[st.integers(0, 3)] * 3), min_size=1, max_size=12)


@settings(max_examples=150, deadline=None)
@given(monomials3, st.randoms())
def test_minimalize_idempotent_and_order_free(gens, rnd):
    I = minimalize(gens, 3)
    assert minimalize(I.gens, 3) == I
    shuffled = list(gens)
    rnd.shuffle(shuffled)
    assert minimalize(shuffled, 3) == I
    # every input lies in the ideal and no minimal generator divides another
    assert all(g in I for g in gens)
    for a, b in itertools.permutations(I.gens, 2):
        assert not divides(a, b)


@settings(max_examples=60, deadline=None)
@given(st.lists(st.tuples(*[st.integers(0, 2)] * 4), min_size=64, max_size=120))
def test_minimalize_numpy_path_matches_pairwise(gens):
    I = minimalize(gens, 4)
    uniq = set(gens)
    expected = {g for g in uniq if not any(h != g and divides(h, g) for h in uniq)}
    assert set(I.gens) == expected


def _brute_power_members(ideal, k, bound):
    """Monomials in the box [0, bound]^n lying in ideal^k, by checking products."""
    prods = set()
    for combo in itertools.combinations_with_replacement(ideal.gens, k):
        prods.add(tuple(map(sum, zip(*combo))))
    box = itertools.product(range(bound + 1), repeat=ideal.n)
    return {a for a in box if any(divides(p, a) for p in prods)}


def test_p4_square():
    sq = power(P4, 2)
    expected = {mono(t, 4) for t in ["x1^2*x2^2", "x1*x2^2*x3", "x1*x2*x3*x4",
                                     "x2^2*x3^2", "x2*x3^2*x4", "x3^2*x4^2"]}
    assert set(sq.gens) == expected
    box = itertools.product(range(3), repeat=4)
    assert {a for a in box if a in sq} == _brute_power_members(P4, 2, 2)


def test_triangle_square():
    sq = power(C3, 2)
    assert len(sq) == 6
    box = itertools.product(range(3), repeat=3)
    assert {a for a in box if a in sq} == _brute_power_members(C3, 2, 2)


@pytest.mark.parametrize("k", [1, 2, 3, 4])
def test_power_routes_agree(k):
    assert power(P4, k) == power_by_products(P4, k)
    assert power(C3, k) == power_by_products(C3, k)


def test_powers_stream():
    got = dict(powers(C3, 3))
    assert got[1] == C3 and got[3] == power(C3, 3)


def test_power_rejects_zero_exponent():
    with pytest.raises(PreconditionError):
        power(P4, 0)


def test_power_cap():
    with pytest.raises(ResourceLimitError):
        power(edge_ideal(path_graph(8)), 6, cap=100)


def test_substitute_example():
    J = substitute(P4, 2, 1)
    assert set(J.gens) == {mono("x1^2", 4), mono("x1*x3", 4), mono("x3*x4", 4)}
    assert substitute_monomial(mono("x1*x2^2*x3", 4), 2, 1) == mono("x1^3*x3", 4)
    with pytest.raises(PreconditionError):
        substitute(P4, 2, 2)


@pytest.mark.parametrize("k", [1, 2, 3])
def test_substitute_commutes_with_power(k):
    assert substitute(power(P4, k), 2, 1) == power(substitute(P4, 2, 1), k)


def test_localize():
    J, kept = localize(P4, [1, 2, 3])
    assert kept == [1, 2, 3] and J == minimalize([(1, 1, 0), (0, 1, 1), (0, 0, 1)], 3)
    J, _ = localize(P4, [1, 3])
    assert J == minimalize([(1, 0), (0, 1)], 2)
    J, _ = localize(P4, [2])
    assert J is None


def _lcm_closure_oracle(ideal):
    out = set()
    for r in range(1, len(ideal.gens) + 1):
        for combo in itertools.combinations(ideal.gens, r):
            acc = combo[0]
            for g in combo[1:]:
                acc = lcm(acc, g)
            out.add(acc)
    return out


def test_lcm_lattice_p4():
    L = lcm_lattice(P4)
    assert set(L.elements) == _lcm_closure_oracle(P4)
    assert L.top == (1, 1, 1, 1)
    assert len(L) == 6
    assert set(L.below(mono("x1*x2*x3", 4))) == {mono("x1*x2", 4), mono("x2*x3", 4)}


def test_lcm_lattice_triangle():
    L = lcm_lattice(C3)
    assert set(L.elements) == set(C3.gens) | {(1, 1, 1)}


@settings(max_examples=60, deadline=None)
@given(monomials3)
def test_lcm_lattice_matches_subset_oracle(gens):
    I = minimalize(gens, 3)
    if I.is_unit_ideal() or len(I) > 8:
        return
    assert set(lcm_lattice(I).elements) == _lcm_closure_oracle(I)


def test_lcm_lattice_cap():
    with pytest.raises(ResourceLimitError):
        lcm_lattice(power(edge_ideal(path_graph(6)), 2), cap=10)


@pytest.mark.parametrize("n", range(2, 6))
def test_exponent_matrix_is_incidence_transpose(n):
    for g in enumerate_connected_graphs(n):
        A = exponent_matrix(edge_ideal(g))
        B = incidence_matrix(g)
        assert sorted(A.entries) == sorted(B.transpose().entries)
        assert A.rank() == B.rank()


def test_parse_and_format():
    I = parse_ideal("(x1*x2, x2^2*x3, x1*x2*x3)")
    assert I.n == 3 and I.gens == ((1, 1, 0), (0, 2, 1))
    assert parse_ideal(str(I)) == I
    assert parse_ideal("(x1)", n=3).n == 3
    assert format_monomial((0, 0)) == "1" and parse_monomial("1", 2) == (0, 0)
    with pytest.raises(ValueError):
        parse_ideal("(x4)", n=3)
    with pytest.raises(ValueError):
        parse_monomial("y1")


def test_monomial_ideal_validation():
    with pytest.raises(ValidationError):
        MonomialIdeal(2, ((1, -1),))
    with pytest.raises(OverflowError):
        MonomialIdeal(1, ((2**41,),))
