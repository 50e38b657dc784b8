import math

import numpy as np
import pytest

import bruteforce as bf
from graphgen import connected_graphs, net_from_edges, random_digraph, undirected_net
from netstylo.errors import CliqueBudgetExceeded
from netstylo.graphmetrics import (METRIC_NAMES, avg_betweenness, avg_clustering,
                                   avg_degree, avg_intermittency, avg_load,
                                   avg_shortest_path, compute_all,
                                   compute_graph_metrics, count_cliques, diameter,
                                   radius, transitivity)
from netstylo.netbuild import build_network, partition_stream
from test_netbuild import stream_of

TRIANGLE = undirected_net(3, [(0, 1), (1, 2), (0, 2)])
PATH3 = undirected_net(3, [(0, 1), (1, 2)])
PATH5 = undirected_net(5, [(0, 1), (1, 2), (2, 3), (3, 4)])
K4 = undirected_net(4, [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)])
K4_MINUS_EDGE = undirected_net(4, [(0, 2), (0, 3), (1, 2), (1, 3), (2, 3)])
STAR3 = undirected_net(4, [(0, 1), (0, 2), (0, 3)])
STAR4 = undirected_net(5, [(0, 1), (0, 2), (0, 3), (0, 4)])
SINGLE = net_from_edges(1, {})
TWO_EDGES = undirected_net(4, [(0, 1), (2, 3)])


def test_clustering_triangle():
    assert avg_clustering(TRIANGLE) == 1.0


def test_clustering_path():
    assert avg_clustering(PATH3) == 0.0


def test_clustering_diamond_matches_bruteforce():
    # two degree-2 nodes contribute 1, the two degree-3 nodes 2/3 each
    val = avg_clustering(K4_MINUS_EDGE)
    assert val == pytest.approx(bf.bf_clustering(*bf.undirected(K4_MINUS_EDGE)[:2]))
    assert val == pytest.approx(5.0 / 6.0)


def test_diameter_radius_path5():
    assert diameter(PATH5) == 4.0
    assert radius(PATH5) == 2.0


def test_diameter_radius_triangle():
    assert diameter(TRIANGLE) == 1.0
    assert radius(TRIANGLE) == 1.0


def test_single_node_distances():
    assert diameter(SINGLE) == 0.0
    assert radius(SINGLE) == 0.0
    assert avg_shortest_path(SINGLE) == 0.0


def test_cliques():
    assert count_cliques(K4) == 1
    assert count_cliques(PATH3) == 2
    assert count_cliques(net_from_edges(3, {})) == 3


def test_clique_budget():
    with pytest.raises(CliqueBudgetExceeded):
        count_cliques(K4, cap=0)


def test_transitivity():
    assert transitivity(TRIANGLE) == 1.0
    assert transitivity(STAR3) == 0.0
    assert transitivity(K4_MINUS_EDGE) == pytest.approx(0.75)


def test_betweenness_path3():
    assert avg_betweenness(PATH3) == pytest.approx(1.0 / 3.0)


def test_betweenness_triangle():
    assert avg_betweenness(TRIANGLE) == 0.0


def test_betweenness_star4():
    assert avg_betweenness(STAR4) == pytest.approx(0.2)


def test_load_reduces_to_betweenness_on_equal_weights():
    for net in (PATH3, K4, STAR4, K4_MINUS_EDGE):
        assert avg_load(net) == pytest.approx(avg_betweenness(net), abs=1e-12)
    heavy = undirected_net(3, [(0, 1), (1, 2)], weight=5)
    assert avg_load(heavy) == pytest.approx(1.0 / 3.0)


def test_load_weighted_triangle():
    # heavy edges a-b and b-c make the two-hop route shorter than the direct one
    net = net_from_edges(3, {(0, 1): 10, (1, 2): 10, (0, 2): 1})
    assert avg_load(net) == pytest.approx(1.0 / 3.0)
    assert avg_betweenness(net) == 0.0


def test_avg_shortest_path():
    assert avg_shortest_path(PATH3) == pytest.approx(4.0 / 3.0)
    assert avg_shortest_path(TRIANGLE) == 1.0
    assert avg_shortest_path(TWO_EDGES) == 1.0  # largest component only


def test_degree():
    net = build_network(partition_stream(stream_of(["a", "b", "a", "b", "c"]), 5)[0])
    assert avg_degree(net) == 2.0
    assert avg_degree(SINGLE) == 0.0
    cycle4 = net_from_edges(4, {(0, 1): 1, (1, 2): 1, (2, 3): 1, (3, 0): 1})
    assert avg_degree(cycle4) == 2.0


def test_intermittency_periodic():
    p = partition_stream(stream_of(["x", "a", "x", "b", "x", "c"]), 6)[0]
    # "a", "b", "c" occur once; "x" at 0, 2, 4 with equal gaps
    assert avg_intermittency(p) == 0.0


def test_intermittency_hand_value():
    # one repeated lemma at positions 0, 1, 5: gaps (1, 4), mean 2.5, pstd 1.5
    p = partition_stream(stream_of(["r", "r", "b", "c", "d", "r"]), 6)[0]
    assert avg_intermittency(p) == pytest.approx(0.6)


def test_intermittency_all_distinct():
    p = partition_stream(stream_of([f"w{i}" for i in range(10)]), 10)[0]
    assert avg_intermittency(p) == 0.0


def test_compute_all_chain_closed_form():
    w = 30
    p = partition_stream(stream_of([f"w{i}" for i in range(w)]), w)[0]
    m = compute_all(build_network(p), p)
    assert m.clustering == 0.0
    assert m.transitivity == 0.0
    assert m.nodes == w
    assert m.edges == w - 1
    assert m.degree == pytest.approx(2.0 * (w - 1) / w)
    assert m.diameter == w - 1


def test_compute_all_matches_individual_ops():
    p = partition_stream(stream_of(["a", "b", "a", "b", "c"]), 5)[0]
    net = build_network(p)
    m = compute_all(net, p)
    assert m.nodes == 3 and m.edges == 3
    assert m.clustering == avg_clustering(net)
    assert m.betweenness == avg_betweenness(net)
    assert m.load == avg_load(net)
    assert m.shortest_path == avg_shortest_path(net)
    assert m.cliques == count_cliques(net)
    assert m.intermittency == avg_intermittency(p)
    assert m.as_row()[:4] == [m.clustering, m.diameter, m.radius, float(m.cliques)]


def _assert_matches_bruteforce(net, tol=1e-9):
    mine = compute_graph_metrics(net)
    theirs = bf.bf_graph_metrics(net)
    for key in mine:
        assert mine[key] == pytest.approx(theirs[key], abs=tol), \
            f"metric {key} differs: {mine[key]} vs {theirs[key]}"


def test_small_connected_graphs_match_bruteforce():
    for net in connected_graphs(4):
        _assert_matches_bruteforce(net)


def test_random_digraphs_match_bruteforce():
    rng = np.random.default_rng(31)
    for _ in range(30):
        _assert_matches_bruteforce(random_digraph(rng, max_nodes=12))


def test_distance_invariants_on_random_graphs():
    # radius <= avg path does NOT hold in general (any graph where every node
    # has eccentricity 2 but most pairs are adjacent breaks it), so only the
    # diameter bounds are asserted
    rng = np.random.default_rng(5)
    for _ in range(25):
        net = random_digraph(rng, max_nodes=15)
        d = diameter(net)
        r = radius(net)
        s = avg_shortest_path(net)
        assert r <= d + 1e-12
        assert s <= d + 1e-12


def test_complete_and_triangle_free():
    assert avg_clustering(K4) == 1.0
    assert transitivity(K4) == 1.0
    bipartite = undirected_net(4, [(0, 2), (0, 3), (1, 2), (1, 3)])
    assert avg_clustering(bipartite) == 0.0
    assert transitivity(bipartite) == 0.0


def test_metrics_csv_roundtrip(tmp_path):
    from netstylo.graphmetrics import read_metrics_csv, write_metrics_csv
    p = partition_stream(stream_of(["a", "b", "a", "b", "c", "d"]), 6)[0]
    rows = [compute_all(build_network(p), p)]
    path = tmp_path / "m.csv"
    write_metrics_csv(rows, path)
    back = read_metrics_csv(path)
    assert back == rows
    header = path.read_text(encoding="utf-8").splitlines()[0]
    assert header == "partition," + ",".join(METRIC_NAMES)
