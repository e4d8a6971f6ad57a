import random
from collections import deque

import pytest

from cayleyvf.treedecomp import (Partition, is_tree, moore_bound, r_graph, strong_tree_decomposition,
                                 uniform_spanning_tree, width_check)
from conftest import ball
from oracles import zn2_dist


def union_find_is_tree(n, edges):
    parent = list(range(n))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for a, b in edges:
        ra, rb = find(a), find(b)
        if ra == rb:
            return False
        parent[ra] = rb
    return len(edges) == n - 1


def test_is_tree_examples():
    assert is_tree([(1,), (0, 2), (1,)]).status == "OK"
    assert is_tree([()]).status == "OK"
    tri = is_tree([(1, 2), (0, 2), (0, 1)])
    assert tri.status == "CYCLE" and sorted(tri.witness) == [0, 1, 2]
    assert is_tree([(), ()]).status == "DISCONNECTED"
    assert is_tree([(1, 1), (0, 0)]).status == "CYCLE"
    assert is_tree([(0,)]).status == "CYCLE"


def test_is_tree_random_against_union_find():
    rng = random.Random(11)
    for _ in range(400):
        n = rng.randint(1, 9)
        pairs = [(a, b) for a in range(n) for b in range(a + 1, n)]
        edges = rng.sample(pairs, rng.randint(0, min(len(pairs), n + 1)))
        adj = [[] for _ in range(n)]
        for a, b in edges:
            adj[a].append(b)
            adj[b].append(a)
        check = is_tree(adj)
        assert check.ok == union_find_is_tree(n, edges)
        if check.status == "CYCLE":
            w = check.witness
            assert len(w) >= 3 and len(set(w)) == len(w)
            for a, b in zip(w, w[1:] + w[:1]):
                assert b in adj[a]


def test_partition_validation():
    with pytest.raises(ValueError):
        Partition([(0, 1), (1, 2)])
    with pytest.raises(ValueError):
        Partition([()])
    p = Partition([(3, 2), (0,), (1,)])
    assert p.parts == [(0,), (1,), (2, 3)]
    assert p.owner(3) == 2 and p.covers(range(4))


def test_r_graph_singletons_match_l1():
    b = ball("zn:2", 3)
    part = Partition([(v,) for v in range(len(b))])
    for r in (1, 2, 3):
        g = r_graph(b, part, r)
        expected = {(u, v) for u in range(len(b)) for v in range(u + 1, len(b))
                    if zn2_dist(b.keys[u], b.keys[v]) <= r}
        assert set(g.edges()) == expected
    assert r_graph(b, part, 1, strict=True).edges() == []
    assert set(r_graph(b, part, 2, strict=True).edges()) == set(r_graph(b, part, 1).edges())


def test_r_graph_whole_and_star():
    b = ball("free:2", 2)
    whole = r_graph(b, Partition([tuple(range(len(b)))]), 5)
    assert whole.edges() == []
    star = Partition([(0,), tuple(v for v in range(1, len(b)))])
    assert r_graph(b, star, 1).edges() == [(0, 1)]
    assert r_graph(b, star, 1).to_dot().count(" -- ") == 1


def test_std_free_is_the_cayley_tree():
    b = ball("free:2", 9)
    std = strong_tree_decomposition(b)
    assert len(std.partition) == len(b)
    assert std.k_diam == 0 and std.k_width == 1
    assert len(std.one_graph.edges()) == len(b) - 1


def test_std_zn2_parts_are_spheres():
    b = ball("zn:2", 9)
    std = strong_tree_decomposition(b)
    # the outermost sphere has no edges inside the ball, so its component splits into points
    assert [len(p) for p in std.partition.parts] == [1] + [4 * n for n in range(1, 9)] + [1] * 36
    assert std.level_diameters() == {0: 0, 1: 2, 2: 4, 3: 6}
    assert std.truncated_levels() == list(range(4, 10))
    assert std.k_diam == 6 and std.k_width == 12
    assert std.tree_check.ok


@pytest.mark.parametrize("spec,R,center", [
    ("zn:2", 9, ""), ("zn:2", 9, "x"), ("free:2", 6, "a b"), ("freeprod:2,3", 9, ""),
    ("freeprod:2,3", 9, "b a"), ("lamplighter", 8, ""), ("lamplighter", 8, "t"),
    ("prod(zn:1;cyclic:3)", 6, ""),
])
def test_std_structure(spec, R, center):
    b = ball(spec, R)
    c = b.vertex(center)
    std = strong_tree_decomposition(b, c)
    assert std.partition.covers(range(len(b)))
    dist = b.bfs_array(c)
    lev = [std.info[std.partition.owner(v)].level for v in range(len(b))]
    assert lev == dist
    # 1-graph edges join consecutive levels only
    for i, j in std.one_graph.edges():
        assert abs(std.info[i].level - std.info[j].level) == 1
    for p, info in zip(std.partition.parts, std.info):
        assert info.truncated == (b.labels[c] + info.level > b.certified_radius)


def test_moore_bound():
    assert [moore_bound(4, K) for K in range(4)] == [1, 5, 17, 53]
    assert moore_bound(2, 5) == 11
    assert moore_bound(1, 3) == 2


@pytest.mark.parametrize("spec,R", [("zn:2", 9), ("lamplighter", 9), ("freeprod:2,3", 9)])
def test_width(spec, R):
    std = strong_tree_decomposition(ball(spec, R))
    rep = width_check(std)
    assert rep.k_width <= rep.bound
    assert rep.bound == moore_bound(rep.degree_bound, rep.k_diam)
    d = rep.to_dict()
    assert d["slack"] == d["bound"] - d["K_width"]


def test_width_zn2_frozen():
    rep = width_check(strong_tree_decomposition(ball("zn:2", 9)))
    assert (rep.k_diam, rep.k_width, rep.bound, rep.power_bound) == (6, 12, 1 + 4 * (1 + 3 + 9 + 27 + 81 + 243), 4 ** 6)


def bfs_tree_distance(adj, u, v):
    dist = {u: 0}
    q = deque([u])
    while q:
        x = q.popleft()
        for y in adj[x]:
            if y not in dist:
                dist[y] = dist[x] + 1
                q.append(y)
    return dist[v]


@pytest.mark.parametrize("spec,R,center", [
    ("free:2", 9, ""), ("zn:2", 9, ""), ("zn:2", 12, "x"), ("freeprod:2,3", 9, ""),
    ("lamplighter", 9, ""), ("lamplighter", 12, "a"),
])
def test_uniform_spanning_tree(spec, R, center):
    b = ball(spec, R)
    std = strong_tree_decomposition(b, b.vertex(center))
    ust = uniform_spanning_tree(b, std)
    assert len(ust.edges()) == len(b) - 1
    assert ust.violations == []
    assert ust.pairs > 0
    rng = random.Random(5)
    for _ in range(60):
        u, v = rng.randrange(len(b)), rng.randrange(len(b))
        assert ust.tree_distance(u, v) == bfs_tree_distance(ust.adj, u, v)


def test_uniform_spanning_tree_free_is_isometric():
    b = ball("free:2", 9)
    ust = uniform_spanning_tree(b, strong_tree_decomposition(b))
    assert ust.max_tree_over_graph == 1 and ust.max_graph_over_tree == 1


def test_exports_deterministic():
    b = ball("zn:2", 6)
    s1, s2 = strong_tree_decomposition(b), strong_tree_decomposition(b)
    assert s1.to_json() == s2.to_json()
    assert s1.to_dot() == s2.to_dot()
    u = uniform_spanning_tree(b, s1)
    assert u.to_json() == uniform_spanning_tree(b, s2).to_json()
    assert u.to_dot().count(" -- ") == len(b) - 1
