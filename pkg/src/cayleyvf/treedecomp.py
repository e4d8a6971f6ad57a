"""Partition r-graphs, strong tree decompositions and uniform spanning trees.

The decomposition around a center c takes, for every level n >= 0, the
boundaries of the components of the complement of the n-ball around c. The
boundary of such a component is exactly its part of the sphere of radius n+1,
so the parts are the pieces of each sphere cut out by those components and,
together with {c}, they partition the ball. Distances to c are in-ball BFS
distances; every statement below is about that finite connected graph.

A part at level j is *truncated* when ``|c| + j`` exceeds the certified
radius: its vertices are then too close to the surface for its diameter or its
component to be read off the ball faithfully.
"""

from __future__ import annotations

import json
from collections import deque
from dataclasses import dataclass, field
from fractions import Fraction

from .cayley import CayleyBall
from .coarse import complement_components, center_distances, set_diameter
from .errors import StructuralError


@dataclass
class Partition:
    parts: list  # tuples of vertex indices, each sorted

    def __post_init__(self):
        if any(len(p) == 0 for p in self.parts):
            raise ValueError("empty part")
        self.parts = sorted((tuple(sorted(p)) for p in self.parts), key=lambda p: p[0])
        self._owner = {}
        for i, p in enumerate(self.parts):
            for v in p:
                if v in self._owner:
                    raise ValueError(f"vertex {v} lies in two parts")
                self._owner[v] = i

    def __len__(self):
        return len(self.parts)

    def owner(self, v: int) -> int:
        return self._owner[v]

    def domain(self) -> set:
        return set(self._owner)

    def covers(self, vertices) -> bool:
        return self.domain() == set(vertices)


@dataclass
class RGraph:
    partition: Partition
    r: int
    strict: bool
    adj: list  # adj[i] = sorted tuple of neighbouring part ids

    def edges(self) -> list:
        return [(i, j) for i, row in enumerate(self.adj) for j in row if i < j]

    def to_dot(self, name: str = "rgraph") -> str:
        lines = [f"graph {name} {{"]
        for i, p in enumerate(self.partition.parts):
            lines.append(f'  p{i} [label="{i}", size={len(p)}];')
        for i, j in self.edges():
            lines.append(f"  p{i} -- p{j};")
        lines.append("}")
        return "\n".join(lines) + "\n"


def r_graph(ball: CayleyBall, partition: Partition, r: int, strict: bool = False) -> RGraph:
    """Parts are joined when some pair of their vertices is at in-ball distance <= r (< r if strict).

    With ``strict=True`` and r=1, disjoint parts are never joined.
    """
    reach = r - 1 if strict else r
    adj = [set() for _ in partition.parts]
    if reach >= 1:
        for i, part in enumerate(partition.parts):
            dist = ball.bfs(part, max_depth=reach)
            for v in dist:
                j = partition._owner.get(v)
                if j is not None and j != i:
                    adj[i].add(j)
                    adj[j].add(i)
    return RGraph(partition, r, strict, [tuple(sorted(a)) for a in adj])


@dataclass
class TreeCheck:
    status: str  # "OK", "CYCLE" or "DISCONNECTED"
    witness: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return self.status == "OK"


def is_tree(adj) -> TreeCheck:
    """Tree test for an undirected graph given as adjacency lists over 0..n-1.

    A CYCLE witness is the vertex list of a cycle; a DISCONNECTED witness is a
    pair of vertices in different components.
    """
    n = len(adj)
    if n == 0:
        return TreeCheck("DISCONNECTED", [])
    parent = [-2] * n
    depth = [0] * n
    parent[0] = -1
    stack = [0]
    while stack:
        x = stack.pop()
        for y in adj[x]:
            if y == x:
                return TreeCheck("CYCLE", [x])
            if parent[y] == -2:
                parent[y] = x
                depth[y] = depth[x] + 1
                stack.append(y)
            elif y != parent[x]:
                # non-tree edge x-y closes a cycle through their common ancestor
                a, b = x, y
                left, right = [a], [b]
                while a != b:
                    if depth[a] >= depth[b]:
                        a = parent[a]
                        left.append(a)
                    else:
                        b = parent[b]
                        right.append(b)
                return TreeCheck("CYCLE", left + right[-2::-1])
        # a repeated edge x-parent[x] also closes a (2-)cycle
        if parent[x] >= 0 and list(adj[x]).count(parent[x]) > 1:
            return TreeCheck("CYCLE", [x, parent[x]])
    missing = [v for v in range(n) if parent[v] == -2]
    if missing:
        return TreeCheck("DISCONNECTED", [0, missing[0]])
    return TreeCheck("OK")


@dataclass
class PartInfo:
    level: int
    diameter: int | None
    truncated: bool


@dataclass
class StrongTreeDecomposition:
    ball: CayleyBall
    center: int
    partition: Partition
    info: list            # PartInfo per part
    one_graph: RGraph
    tree_check: TreeCheck

    @property
    def k_diam(self) -> int:
        return max((p.diameter for p in self.info if not p.truncated), default=0)

    @property
    def k_width(self) -> int:
        return max((len(s) for s, p in zip(self.partition.parts, self.info) if not p.truncated), default=1)

    def levels(self) -> list:
        return sorted({p.level for p in self.info})

    def truncated_levels(self) -> list:
        return sorted({p.level for p in self.info if p.truncated})

    def level_diameters(self) -> dict:
        """Max part diameter per non-truncated level."""
        out = {}
        for p in self.info:
            if not p.truncated:
                out[p.level] = max(out.get(p.level, 0), p.diameter)
        return out

    def to_dict(self) -> dict:
        return {"center": self.ball.key_str(self.center), "levels": self.levels(), "K_diam": self.k_diam,
                "K_width": self.k_width, "isTree": self.tree_check.ok, "truncatedLevels": self.truncated_levels(),
                "parts": len(self.partition), "levelDiameters": {str(k): v for k, v in self.level_diameters().items()}}

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)

    def to_dot(self) -> str:
        return self.one_graph.to_dot("one_graph")


def strong_tree_decomposition(ball: CayleyBall, center: int = 0) -> StrongTreeDecomposition:
    dist = center_distances(ball, center)
    top = max(dist)
    parts = [(center,)]
    levels = {center: 0}
    for n in range(top):
        for comp in complement_components(ball, center, n, dist):
            bd = tuple(v for v in comp if dist[v] == n + 1)
            parts.append(bd)
            levels[bd[0]] = n + 1
    partition = Partition(parts)
    if not partition.covers(range(len(ball))):
        raise StructuralError("level boundaries do not cover the ball")
    cr = ball.certified_radius
    base = ball.labels[center]
    info = []
    for p in partition.parts:
        lev = levels[p[0]]
        trunc = base + lev > cr
        info.append(PartInfo(lev, None if trunc else set_diameter(ball, p), trunc))
    g1 = r_graph(ball, partition, 1)
    check = is_tree(g1.adj)
    if not check.ok:
        raise StructuralError(f"1-graph is not a tree: {check.status} {check.witness}")
    return StrongTreeDecomposition(ball, center, partition, info, g1, check)


def moore_bound(k1: int, K: int) -> int:
    """Largest possible number of vertices within distance K of a vertex when degrees are <= k1."""
    total, layer = 1, k1
    for _ in range(K):
        total += layer
        layer *= max(k1 - 1, 0)
    return total


@dataclass
class WidthReport:
    degree_bound: int
    k_diam: int
    k_width: int
    bound: int           # Moore bound, the one enforced
    power_bound: int     # k1 ** K_diam, reported for comparison
    power_bound_holds: bool

    @property
    def slack(self) -> int:
        return self.bound - self.k_width

    def to_dict(self) -> dict:
        return {"degreeBound": self.degree_bound, "K_diam": self.k_diam, "K_width": self.k_width,
                "bound": self.bound, "powerBound": self.power_bound,
                "powerBoundHolds": self.power_bound_holds, "slack": self.slack}


def width_check(std: StrongTreeDecomposition, degree_bound: int | None = None) -> WidthReport:
    """Every non-truncated part of diameter d has at most moore_bound(k1, d) vertices.

    A part of diameter d sits inside the d-ball around any of its vertices,
    which is what the bound counts.
    """
    k1 = std.ball.degree_bound() if degree_bound is None else degree_bound
    for part, info in zip(std.partition.parts, std.info):
        if not info.truncated and len(part) > moore_bound(k1, info.diameter):
            raise StructuralError(f"part of size {len(part)} and diameter {info.diameter} exceeds the degree bound")
    K = std.k_diam
    W = std.k_width
    return WidthReport(k1, K, W, moore_bound(k1, K), k1 ** K, W <= k1 ** K)


@dataclass
class UniformSpanningTree:
    std: StrongTreeDecomposition
    representatives: list
    adj: list
    parent: list
    depth: list
    pairs: int
    max_tree_over_graph: Fraction
    max_graph_over_tree: Fraction
    violations: list

    def tree_distance(self, u: int, v: int) -> int:
        d = 0
        par, dep = self.parent, self.depth
        while u != v:
            if dep[u] >= dep[v]:
                u = par[u]
            else:
                v = par[v]
            d += 1
        return d

    def edges(self) -> list:
        return [(i, j) for i, row in enumerate(self.adj) for j in row if i < j]

    def to_dict(self) -> dict:
        return {"vertices": len(self.adj), "edges": len(self.edges()), "K_diam": self.std.k_diam,
                "pairs": self.pairs, "maxTreeOverGraph": str(self.max_tree_over_graph),
                "maxGraphOverTree": str(self.max_graph_over_tree), "violations": len(self.violations)}

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)

    def to_dot(self) -> str:
        ball = self.std.ball
        lines = ["graph spanning_tree {"]
        for v in range(len(self.adj)):
            lines.append(f'  n{v} [label="{ball.key_str(v)}"];')
        for i, j in self.edges():
            lines.append(f"  n{i} -- n{j};")
        lines.append("}")
        return "\n".join(lines) + "\n"


def uniform_spanning_tree(ball: CayleyBall, std: StrongTreeDecomposition) -> UniformSpanningTree:
    """Star every part at its least vertex and join representatives of 1-graph-adjacent parts.

    Distortion is measured over all pairs at distance at most
    ``certifiedRadius - |center|`` from the center. Their parts are not
    truncated and their geodesics stay inside the ball.
    """
    if not std.tree_check.ok:
        raise StructuralError("decomposition 1-graph is not a tree")
    parts = std.partition.parts
    reps = [p[0] for p in parts]
    adj = [[] for _ in range(len(ball))]
    for p in parts:
        for v in p[1:]:
            adj[p[0]].append(v)
            adj[v].append(p[0])
    for i, j in std.one_graph.edges():
        adj[reps[i]].append(reps[j])
        adj[reps[j]].append(reps[i])
    adj = [tuple(sorted(a)) for a in adj]
    check = is_tree(adj)
    if not check.ok:
        raise StructuralError(f"spanning structure is not a tree: {check.status} {check.witness}")
    root = std.center
    depth_c = center_distances(ball, root)
    parent = [-1] * len(ball)
    depth = [-1] * len(ball)
    depth[root] = 0
    queue = deque([root])
    while queue:
        x = queue.popleft()
        for y in adj[x]:
            if depth[y] < 0:
                depth[y] = depth[x] + 1
                parent[y] = x
                queue.append(y)
    ust = UniformSpanningTree(std, reps, adj, parent, depth, 0, Fraction(0), Fraction(0), [])
    K = std.k_diam
    reach = ball.certified_radius - ball.labels[root]
    region = [v for v in range(len(ball)) if 0 <= depth_c[v] <= reach]
    worst_t, worst_g = Fraction(0), Fraction(0)
    for i, u in enumerate(region):
        for v in region[i + 1:]:
            dg = ball.exact_distance(u, v)
            dt = ust.tree_distance(u, v)
            ust.pairs += 1
            worst_t = max(worst_t, Fraction(dt, dg))
            worst_g = max(worst_g, Fraction(dg, dt))
            if dt > 3 * dg or dg > (2 * K + 1) * dt:
                ust.violations.append((u, v, dg, dt))
    ust.max_tree_over_graph = worst_t
    ust.max_graph_over_tree = worst_g
    return ust
