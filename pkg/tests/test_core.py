import itertools

import pytest
from hypothesis import given, settings, strategies as st

from tpack.core import (
    Digraph,
    DomainError,
    Graph,
    InvariantViolation,
    Tournament,
    all_tournaments,
    at_least,
    bits,
    canonical_tournament_key,
    ceil_frac,
    digraph_to_text,
    k3_minus_pattern,
    load_digraph_text,
    mask_of,
    min_semidegree,
    parse_tournament_name,
    spans_copy,
    total_min_degree,
)


def random_digraph(rng_bits: int, n: int) -> Digraph:
    pairs = [(u, v) for u in range(n) for v in range(n) if u != v]
    rows = [0] * n
    for i, (u, v) in enumerate(pairs):
        if (rng_bits >> i) & 1:
            rows[u] |= 1 << v
    return Digraph(n, rows)


digraphs = st.integers(min_value=3, max_value=6).flatmap(
    lambda n: st.tuples(st.just(n), st.integers(min_value=0, max_value=(1 << (n * (n - 1))) - 1))
).map(lambda t: random_digraph(t[1], t[0]))


def test_ceil_frac():
    assert ceil_frac(7, 3) == 3
    assert ceil_frac(6, 3) == 2
    assert ceil_frac(0, 5) == 0
    assert ceil_frac(1, 1) == 1
    # exact integer arithmetic at the values the thresholds use
    assert ceil_frac(2 * 9, 3) == 6
    assert ceil_frac(3 * 6 - 3, 2) == 8
    assert ceil_frac(3 * 9 - 3, 2) == 12


def test_bits_and_masks():
    assert list(bits(0b10110)) == [1, 2, 4]
    assert mask_of([0, 3]) == 0b1001
    assert mask_of([1, 1]) == 0b10  # duplicates collapse


def test_digraph_construction_rejects_loops_and_range():
    with pytest.raises(DomainError):
        Digraph(2, [0b01, 0])  # loop at 0
    with pytest.raises(DomainError):
        Digraph(2, [0b100, 0])  # out of range
    with pytest.raises(DomainError):
        Digraph.from_arcs(3, [(0, 3)])


def test_complete_digraph_degrees():
    g = Digraph.complete(5)
    assert g.num_arcs == 20
    assert min_semidegree(g) == 4
    assert total_min_degree(g) == 8
    assert all(g.arc(u, v) for u in range(5) for v in range(5) if u != v)


@given(digraphs)
@settings(max_examples=60, deadline=None)
def test_degree_sum_identity(g):
    assert sum(g.d_out(v) for v in range(g.n)) == g.num_arcs
    assert sum(g.d_in(v) for v in range(g.n)) == g.num_arcs


@given(digraphs)
@settings(max_examples=60, deadline=None)
def test_in_rows_transpose(g):
    for u in range(g.n):
        for v in range(g.n):
            if u != v:
                assert g.arc(u, v) == bool(g.in_mask(v) >> u & 1)


@given(digraphs)
@settings(max_examples=40, deadline=None)
def test_underlying_graph_edge_count(g):
    under = g.underlying()
    expect = sum(
        1
        for u in range(g.n)
        for v in range(u + 1, g.n)
        if g.arc(u, v) or g.arc(v, u)
    )
    assert under.num_edges == expect


def test_induced_subdigraph():
    g = Digraph.from_arcs(5, [(0, 1), (1, 2), (2, 0), (3, 4), (0, 4)])
    sub, old = g.induced([0, 1, 2])
    assert old == (0, 1, 2)
    assert sub.n == 3
    assert sub.arc(0, 1) and sub.arc(1, 2) and sub.arc(2, 0)
    assert sub.num_arcs == 3


def test_tournament_validation():
    assert Tournament.transitive(3).num_arcs == 3
    with pytest.raises(DomainError):
        Tournament.from_digraph(Digraph.complete(3))
    c3 = Tournament.cyclic_triangle()
    assert c3.arc(0, 1) and c3.arc(1, 2) and c3.arc(2, 0)


def test_all_tournaments_counts():
    # numbers of tournaments up to isomorphism on 1..4 vertices
    assert [len(all_tournaments(r)) for r in (1, 2, 3, 4)] == [1, 1, 2, 4]
    labeled = all_tournaments(3, up_to_iso=False)
    assert len(labeled) == 8


def test_canonical_key_iso_invariance():
    t = Tournament.transitive(4)
    # relabel by a permutation and compare canonical keys
    perm = (2, 0, 3, 1)
    rows = [0] * 4
    for u in range(4):
        for v in range(4):
            if u != v and t.arc(u, v):
                rows[perm[u]] |= 1 << perm[v]
    relabeled = Digraph(4, rows)
    assert canonical_tournament_key(t) == canonical_tournament_key(relabeled)
    assert canonical_tournament_key(t) != canonical_tournament_key(
        Tournament.cyclic_triangle()
    )


def brute_spans(g, xs, pattern):
    r = pattern.n
    for perm in itertools.permutations(xs):
        if all(
            g.arc(perm[a], perm[b])
            for a in range(r)
            for b in range(r)
            if a != b and pattern.arc(a, b)
        ):
            return True
    return False


@given(digraphs, st.integers(min_value=0, max_value=7))
@settings(max_examples=80, deadline=None)
def test_spans_copy_matches_brute_force(g, pick):
    xs = tuple(sorted({(pick + i * 2) % g.n for i in range(3)}))
    if len(xs) != 3:
        return
    for pattern in all_tournaments(3):
        emb = spans_copy(g, xs, pattern)
        assert (emb is not None) == brute_spans(g, xs, pattern)
        if emb is not None:
            assert tuple(sorted(emb.image)) == xs
            for a in range(3):
                for b in range(3):
                    if a != b and pattern.arc(a, b):
                        assert g.arc(emb.image[a], emb.image[b])


def test_spans_copy_monotone_under_arc_addition():
    g = Digraph.from_arcs(3, [(0, 1), (1, 2)])
    t3 = Tournament.transitive(3)
    assert spans_copy(g, (0, 1, 2), t3) is None
    g2 = Digraph.from_arcs(3, [(0, 1), (1, 2), (0, 2)])
    assert spans_copy(g2, (0, 1, 2), t3) is not None


def test_k3_minus_pattern_shape():
    p = k3_minus_pattern()
    assert p.n == 3
    assert p.num_arcs == 5


def test_text_round_trip():
    g = Digraph.from_arcs(4, [(0, 1), (2, 3), (3, 0)])
    text = digraph_to_text(g)
    back = load_digraph_text(text)
    assert back.n == g.n
    assert sorted(back.arcs()) == sorted(g.arcs())
    assert digraph_to_text(back) == text


def test_load_rejects_garbage():
    with pytest.raises(DomainError):
        load_digraph_text("3\n0 0\n")
    with pytest.raises(DomainError):
        load_digraph_text("2\n0 5\n")


def test_parse_tournament_name():
    assert parse_tournament_name("t4").n == 4
    assert parse_tournament_name("c3") == Tournament.cyclic_triangle()
    with pytest.raises(DomainError):
        parse_tournament_name("q7")


def test_at_least_float_guard():
    # threshold comparisons tolerate float noise just below the bound
    assert at_least(6, 6.000000000001)
    assert not at_least(5, 6.0)


def test_graph_counting_helpers():
    gr = Graph.from_edges(4, [(0, 1), (1, 2), (2, 3), (0, 3)])
    assert gr.edges_inside(0b0111) == 2
    assert gr.edges_between(0b0011, 0b1100) == 2
    with pytest.raises(DomainError):
        gr.edges_between(0b0011, 0b0110)
