import json

import pytest
from hypothesis import given, strategies as st

from galkan.errors import NotConnected, NotEtale, NotNormalCover, SchemaError
from galkan.graphcover import (
    Graph,
    GraphRegistry,
    bouquet,
    cover_from_permutations,
    cycle_graph,
    deck_group,
    delta_connecting,
    double_cover_of_figure_eight,
    exact_sequence_check,
    graph_from_edges,
    graph_from_json,
    graph_galois_group,
    graph_pi1,
    identity_cover,
    isomorphic_over_base,
    lift_path,
    mk_cover,
    monodromy,
    pi0,
    reconstruct,
    reduce_word,
    word_of_path,
    word_paths,
)

FIXTURES = ("c6_to_c3", "figure_eight_double", "irregular3", "c3_c3_to_c3",
            "id_figure_eight", "id_c3")


@pytest.fixture(scope="module")
def graphs():
    return GraphRegistry()


def test_graph_validation():
    with pytest.raises(SchemaError):
        Graph(1, [0, 0], [0, 1])
    with pytest.raises(SchemaError):
        Graph(1, [0, 0], [1])
    with pytest.raises(SchemaError):
        Graph(1, [0, 1], [1, 0])
    with pytest.raises(SchemaError):
        graph_from_json({"vertices": 1, "darts": [{"id": 1, "source": 0, "reverse": 0}]})


def test_json_round_trip():
    G = bouquet(2, "figure_eight")
    H = graph_from_json(json.loads(json.dumps(G.to_json())))
    assert H.n == 1 and H.labels == ("a", "A", "b", "B")
    assert (H.source == G.source).all() and (H.reverse == G.reverse).all()


def test_collapsing_two_darts_is_not_etale():
    # the two edges of a 2-cycle both sent onto one loop: vertex 0 sees dart 0 twice
    G = Graph(2, [0, 0, 1, 1], [2, 3, 0, 1])
    loop = bouquet(1)
    with pytest.raises(NotEtale) as info:
        mk_cover(G, loop, [0, 0], [0, 0, 1, 1])
    assert info.value.vertex == 0
    assert info.value.star == [0, 0]


def _star_oracle(total, base, vmap, dmap):
    """None if not a graph map; otherwise whether every star maps bijectively."""
    for d in range(total.darts):
        if vmap[int(total.source[d])] != int(base.source[dmap[d]]):
            return None
        if dmap[int(total.reverse[d])] != int(base.reverse[dmap[d]]):
            return None
    if vmap[total.basepoint] != base.basepoint:
        return None
    for v in range(total.n):
        mine = sorted(dmap[d] for d in range(total.darts) if total.source[d] == v)
        theirs = sorted(d for d in range(base.darts) if base.source[d] == vmap[v])
        if mine != theirs:
            return False
    return True


def _graph_map(total, base, forward):
    """Dart map choosing ``forward[k]`` for dart 2k and its reverse for dart 2k+1."""
    dmap = []
    for b in forward:
        dmap += [b, int(base.reverse[b])]
    return dmap


def _check_against_oracle(total, base, vmap, dmap):
    verdict = _star_oracle(total, base, vmap, dmap)
    if verdict is None:
        with pytest.raises(SchemaError):
            mk_cover(total, base, vmap, dmap)
    elif verdict:
        assert mk_cover(total, base, vmap, dmap).sheets == total.n // base.n
    else:
        with pytest.raises(NotEtale):
            mk_cover(total, base, vmap, dmap)
    return verdict


@given(st.lists(st.integers(0, 3), min_size=4, max_size=4))
def test_star_validation_accepts_exactly_the_etale_maps(forward):
    base = bouquet(2, "figure_eight")
    total = double_cover_of_figure_eight().total
    dmap = _graph_map(total, base, forward)
    _check_against_oracle(total, base, [0, 0], dmap)


@given(st.lists(st.integers(0, 1), min_size=6, max_size=6))
def test_star_validation_hexagon_onto_a_loop(forward):
    base, total = bouquet(1), cycle_graph(6)
    verdict = _check_against_oracle(total, base, [0] * 6, _graph_map(total, base, forward))
    # vertex i sees forward[i] and the reverse of forward[i-1]; bijective iff they differ,
    # i.e. iff consecutive edges wrap the loop the same way
    assert verdict == all(forward[i] == forward[i - 1] for i in range(6))


@given(st.lists(st.integers(0, 7), min_size=8, max_size=8))
def test_star_validation_rejects_non_maps(dmap):
    base = bouquet(2, "figure_eight")
    total = double_cover_of_figure_eight().total
    if max(dmap) < 4:
        _check_against_oracle(total, base, [0, 0], dmap)
    else:
        with pytest.raises(SchemaError):
            mk_cover(total, base, [0, 0], dmap)


def test_pi0_and_rank(graphs):
    assert pi0(cycle_graph(4)).count == 1
    assert pi0(graphs.graph("c3_c3")).count == 2
    fiber_of_hexagon = Graph(2, [], [])
    assert pi0(fiber_of_hexagon).count == 2
    assert graph_pi1(graph_from_edges(4, [(0, 1), (1, 2), (1, 3)])).rank == 0
    assert graph_pi1(graphs.graph("figure_eight_double")).rank == 3
    assert graph_pi1(bouquet(2)).rank == 2
    assert graph_pi1(cycle_graph(5)).rank == 1
    assert graph_pi1(graphs.graph("irregular3_total")).rank == 4
    with pytest.raises(NotConnected):
        graph_pi1(graphs.graph("c3_c3"))


def test_lifts_on_the_hexagon(graphs):
    c = graphs.cover("c6_to_c3")
    x = c.total.basepoint
    other = next(int(v) for v in c.fiber if v != x)
    assert delta_connecting(c, (1,)) == other
    assert delta_connecting(c, (1, 1)) == x
    assert delta_connecting(c, (-1,)) == other
    assert lift_path(c, (1,), other) == x
    assert lift_path(c, (), other) == other
    for k in range(6):
        assert delta_connecting(c, (1,) * k) == (x if k % 2 == 0 else other)
    with pytest.raises(ValueError):
        lift_path(c, (1,), 1)
    assert monodromy(c) == {1: [1, 0]}


def test_figure_eight_double_cover(graphs):
    c = graphs.cover("figure_eight_double")
    assert c.sheets == 2
    assert delta_connecting(c, (1,)) == 1 and delta_connecting(c, (2,)) == 0
    assert monodromy(c) == {1: [1, 0], 2: [0, 1]}


def test_identity_and_trivial_covers():
    c = identity_cover(bouquet(2))
    assert delta_connecting(c, (1, 2, -1)) == 0
    trivial = cover_from_permutations(bouquet(2), [[0, 1, 2], [0, 1, 2]])
    assert pi0(trivial.total).count == 3
    assert monodromy(trivial) == {1: [0, 1, 2], 2: [0, 1, 2]}


def test_disconnected_total_sequence(graphs):
    rep = exact_sequence_check(graphs.cover("c3_c3_to_c3"), 8)
    assert rep.ok
    assert rep.positions[1].detail.startswith("1 fiber point")
    assert rep.positions[3].detail == "2 components"


def test_monodromy_of_irregular_cover(graphs):
    c = graphs.cover("irregular3")
    assert monodromy(c) == {1: [1, 0, 2], 2: [0, 2, 1]}
    d = deck_group(c)
    assert d.group.order == 1 and not d.is_regular


@pytest.mark.parametrize("name", FIXTURES)
def test_reconstruction_from_monodromy(graphs, name):
    c = graphs.cover(name)
    assert isomorphic_over_base(c, reconstruct(c))


def test_non_isomorphic_covers(graphs):
    a = graphs.cover("c6_to_c3")
    b = graphs.cover("c3_c3_to_c3")
    assert not isomorphic_over_base(a, b)


@pytest.mark.parametrize("name,order", [("c6_to_c3", 2), ("figure_eight_double", 2),
                                        ("id_c3", 1), ("id_figure_eight", 1), ("c3_c3_to_c3", 1)])
def test_galois_group_of_fixtures(graphs, name, order):
    r = graph_galois_group(graphs.cover(name))
    assert r.order == order == r.deck_order


def test_identity_cover():
    c = identity_cover(cycle_graph(4))
    assert c.sheets == 1 and deck_group(c).is_regular


@pytest.mark.parametrize("name", FIXTURES)
def test_exact_sequence_at_small_length(graphs, name):
    rep = exact_sequence_check(graphs.cover(name), 5)
    assert rep.ok, rep.to_json()
    scopes = [p.to_json()["scope"] for p in rep.positions]
    assert scopes == ["verified up to L", "exact", "exact", "exact", "verified up to L"]


# -- random covers of the figure eight ------------------------------------------------


perms = st.integers(1, 4).flatmap(
    lambda n: st.tuples(st.permutations(range(n)), st.permutations(range(n))))
words = st.lists(st.sampled_from([1, -1, 2, -2]), max_size=8)


def _cover(pair):
    return cover_from_permutations(bouquet(2, "figure_eight"), [list(p) for p in pair])


@given(words)
def test_word_path_round_trip(w):
    G = bouquet(2)
    P = graph_pi1(G)
    assert word_of_path(G, P, word_paths(G, P, w)) == reduce_word(w)


@given(words)
def test_word_path_round_trip_on_a_tree_heavy_graph(w):
    G = Graph(3, [0, 1, 1, 2, 2, 0, 0, 0], [1, 0, 3, 2, 5, 4, 7, 6])
    P = graph_pi1(G)
    assert word_of_path(G, P, word_paths(G, P, w)) == reduce_word(w)


@given(perms, words, words)
def test_delta_composition_law(pair, u, v):
    c = _cover(pair)
    assert delta_connecting(c, u + v) == lift_path(c, v, delta_connecting(c, u))
    assert delta_connecting(c, reduce_word(u)) == delta_connecting(c, u)


@given(perms)
def test_monodromy_recovers_the_permutations(pair):
    c = _cover(pair)
    assert monodromy(c) == {1: list(pair[0]), 2: list(pair[1])}


@given(perms)
def test_nielsen_schreier_and_deck(pair):
    c = _cover(pair)
    if pi0(c.total).count != 1:
        return
    assert graph_pi1(c.total).rank == c.sheets * (2 - 1) + 1
    d = deck_group(c)
    assert c.sheets % d.group.order == 0
    if d.is_regular:
        assert graph_galois_group(c).order == c.sheets
    else:
        with pytest.raises(NotNormalCover):
            graph_galois_group(c)


@given(perms)
def test_exact_sequence_on_random_covers(pair):
    rep = exact_sequence_check(_cover(pair), 4)
    assert rep.ok, rep.to_json()
