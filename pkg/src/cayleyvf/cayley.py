"""Finite balls of Cayley graphs.

Vertices are numbered densely in BFS discovery order (index 0 is the
identity), with generators visited in declared order and inverses after
positives, so every report built on a ball is reproducible.

Metric certification
--------------------
The word metric is left-invariant: ``dist(u, v) = |u^-1 v|``. The ball holds
every element of norm at most R together with its exact norm, so whenever
``u^-1 v`` is found in the ball its label *is* the distance in the infinite
graph. When it is not found the true distance exceeds R and only the in-ball
BFS distance (an upper bound) is available; such results are flagged
uncertified.

In particular every pair with ``|u|, |v| <= floor(R/3)`` is certified: a
geodesic between them has length at most ``|u| + |v|`` and stays inside
radius ``|u| + dist(u, v) <= 3 * floor(R/3) <= R``.
"""

from __future__ import annotations

import json
import math
from collections import deque
from dataclasses import dataclass

from .errors import BudgetExceeded
from .groups import GroupOracle, Word

DEFAULT_VERTEX_BUDGET = 2_000_000
INF = math.inf


@dataclass(frozen=True)
class Distance:
    value: float  # int, or math.inf when unreachable inside the ball
    certified: bool

    def __int__(self):
        return int(self.value)


class CayleyBall:
    """Radius-R ball of the Cayley graph of ``oracle``. Immutable after construction."""

    def __init__(self, oracle, radius, keys, labels, nbr, parent, parent_sym):
        self.oracle = oracle
        self.radius = radius
        self.keys = keys
        self.labels = labels
        self.nbr = nbr  # nbr[v][s] = index of v * symbols[s], or -1 outside the ball
        self.parent = parent
        self.parent_sym = parent_sym
        self._index = {k: i for i, k in enumerate(keys)}
        self._adj_cache = None

    def __len__(self):
        return len(self.keys)

    def __repr__(self):
        return f"<CayleyBall {self.oracle.spec.text} R={self.radius} |V|={len(self)}>"

    @property
    def certified_radius(self) -> int:
        return self.radius // 3

    @property
    def symbols(self):
        return self.oracle.symbols

    def index(self, key) -> int | None:
        return self._index.get(key)

    def vertex(self, word_or_text) -> int:
        """Index of the element spelled by a word (or word text); KeyError if outside the ball."""
        if isinstance(word_or_text, str):
            word_or_text = self.oracle.parse(word_or_text)
        key = self.oracle.evaluate(word_or_text)
        i = self._index.get(key)
        if i is None:
            raise KeyError(f"{self.oracle.key_str(key)} lies outside the radius-{self.radius} ball")
        return i

    def norm_of_key(self, key) -> int | None:
        i = self._index.get(key)
        return None if i is None else self.labels[i]

    def neighbors(self, v: int) -> tuple:
        """Distinct in-ball neighbours of v in ascending index order."""
        if self._adj_cache is None:
            self._adj_cache = [tuple(sorted({w for w in row if w >= 0})) for row in self.nbr]
        return self._adj_cache[v]

    def adjacency(self) -> list:
        self.neighbors(0)
        return self._adj_cache

    def is_complete(self, v: int) -> bool:
        return min(self.nbr[v]) >= 0

    def word(self, v: int) -> Word:
        """The BFS-tree word (a geodesic word) spelling vertex v."""
        out = []
        while v:
            out.append(self.symbols[self.parent_sym[v]])
            v = self.parent[v]
        return tuple(reversed(out))

    def key_str(self, v: int) -> str:
        return self.oracle.key_str(self.keys[v])

    def degree_bound(self) -> int:
        return max(len(self.neighbors(v)) for v in range(len(self)) if self.is_complete(v))

    # -- metric --------------------------------------------------------------

    def exact_distance(self, u: int, v: int) -> int | None:
        """True distance in the infinite graph if it is at most R, else None."""
        if u == v:
            return 0
        j = self._index.get(self.oracle.divide(self.keys[u], self.keys[v]))
        return None if j is None else self.labels[j]

    def distance(self, u: int, v: int) -> Distance:
        d = self.exact_distance(u, v)
        if d is not None:
            return Distance(d, True)
        return Distance(self.ball_distance(u, v), False)

    def bfs(self, source, max_depth: int | None = None, allowed=None) -> dict:
        """In-ball BFS distances from a vertex or an iterable of vertices."""
        sources = [source] if isinstance(source, int) else list(source)
        dist = {s: 0 for s in sources}
        queue = deque(sources)
        adj = self.adjacency()
        while queue:
            x = queue.popleft()
            dx = dist[x]
            if max_depth is not None and dx >= max_depth:
                continue
            for y in adj[x]:
                if y not in dist and (allowed is None or y in allowed):
                    dist[y] = dx + 1
                    queue.append(y)
        return dist

    def bfs_array(self, source: int) -> list:
        """Full in-ball BFS distance list from one vertex (-1 for unreachable)."""
        dist = [-1] * len(self)
        dist[source] = 0
        queue = deque([source])
        adj = self.adjacency()
        while queue:
            x = queue.popleft()
            for y in adj[x]:
                if dist[y] < 0:
                    dist[y] = dist[x] + 1
                    queue.append(y)
        return dist

    def ball_distance(self, u: int, v: int) -> float:
        if u == v:
            return 0
        d = self.bfs(u)
        return d.get(v, INF)

    def sphere_sizes(self) -> list:
        sizes = [0] * (self.radius + 1)
        for lab in self.labels:
            sizes[lab] += 1
        return sizes

    # -- export --------------------------------------------------------------

    def summary(self) -> dict:
        return {"spec": self.oracle.spec.text, "R": self.radius, "vertexCount": len(self),
                "sphereSizes": self.sphere_sizes(), "certifiedRadius": self.certified_radius}

    def to_json(self) -> str:
        return json.dumps(self.summary(), sort_keys=True)

    def to_dot(self) -> str:
        lines = ["graph cayley {"]
        for v in range(len(self)):
            lines.append(f'  n{v} [label="{self.key_str(v)}", radius={self.labels[v]}];')
        seen = set()
        ngen = len(self.oracle.generators)
        for v in range(len(self)):
            for s in range(ngen):
                w = self.nbr[v][s]
                if w < 0:
                    continue
                e = (min(v, w), max(v, w), s)
                if e in seen:
                    continue
                seen.add(e)
                lines.append(f'  n{v} -- n{w} [label="{self.oracle.generator_names[s]}"];')
        lines.append("}")
        return "\n".join(lines) + "\n"


def build_ball(oracle: GroupOracle, radius: int, budget: int = DEFAULT_VERTEX_BUDGET) -> CayleyBall:
    if radius < 0:
        raise ValueError("radius must be >= 0")
    syms = oracle.symbols
    rm = oracle.right_multiply
    keys = [oracle.identity]
    index = {oracle.identity: 0}
    labels = [0]
    parent = [-1]
    parent_sym = [-1]
    nbr = []
    i = 0
    while i < len(keys):
        k = keys[i]
        lab = labels[i]
        row = []
        for s, sym in enumerate(syms):
            nk = rm(k, sym)
            j = index.get(nk)
            if j is None:
                if lab < radius:
                    j = len(keys)
                    if j >= budget:
                        raise BudgetExceeded("build_ball", j + 1, budget)
                    index[nk] = j
                    keys.append(nk)
                    labels.append(lab + 1)
                    parent.append(i)
                    parent_sym.append(s)
                else:
                    j = -1
            row.append(j)
        nbr.append(tuple(row))
        i += 1
    return CayleyBall(oracle, radius, keys, labels, nbr, parent, parent_sym)


def distance(ball: CayleyBall, u: int, v: int) -> Distance:
    return ball.distance(u, v)


def geodesic(ball: CayleyBall, u: int, v: int) -> list:
    """In-ball geodesic from u to v; each step back from v takes the lowest-index predecessor."""
    dist = ball.bfs(u)
    if v not in dist:
        raise ValueError(f"{ball.key_str(v)} is unreachable from {ball.key_str(u)} inside the ball")
    path = [v]
    x = v
    while x != u:
        x = min(y for y in ball.neighbors(x) if dist.get(y) == dist[x] - 1)
        path.append(x)
    return path[::-1]


@dataclass(frozen=True)
class Boundary:
    exact: frozenset    # vertices of S with an in-ball neighbour outside S
    flagged: frozenset  # further surface vertices of S whose missing neighbours lie outside the ball

    @property
    def vertices(self) -> frozenset:
        return self.exact | self.flagged


def boundary(ball: CayleyBall, S) -> Boundary:
    S = set(S)
    exact = set()
    flagged = set()
    for v in S:
        row = ball.nbr[v]
        if any(w >= 0 and w not in S for w in row):
            exact.add(v)
        elif min(row) < 0:
            flagged.add(v)
    return Boundary(frozenset(exact), frozenset(flagged))
