"""Asymptotic-dimension-one witnesses: corona colorings, z/r forms, almost-invariant maps.

Coronas around the identity are the annuli ``A(n) = {v : n*m <= |v| < (n+1)*m}``.
For n >= -1 every connected component K of ``A(n) u A(n+1)`` contributes the
part ``K n A(n+1)``; parts in annulus j get color ``j mod 2``. On a tree two
parts of one color in the same annulus are at least 2m + 2 apart, and parts
in annuli j and j + 2 are at least m + 1 apart (a vertex of norm (j+1)m - 1
and one of norm (j+2)m on a common ray), so same-color parts are always more
than m apart.
"""

from __future__ import annotations

import json
from collections import deque
from dataclasses import dataclass, field

from .cayley import CayleyBall
from .coarse import complement_components, set_diameter
from .errors import SpecError


@dataclass
class CoronaColoring:
    m: int
    parts: list            # sorted vertex tuples, ordered by least vertex
    colors: list           # color per part
    annulus: list          # annulus index per part
    diameters: list        # diameter per part
    truncated: list        # part's annulus reaches beyond the ball
    min_same_color_distance: float | None = None
    min_same_annulus_distance: float | None = None

    @property
    def max_part_diameter(self) -> int:
        # parts wider than the ball radius (possible off trees) have diameter None
        return max((d for d in self.diameters if d is not None), default=0)

    def owner_array(self, n: int) -> list:
        own = [-1] * n
        for i, p in enumerate(self.parts):
            for v in p:
                own[v] = i
        return own

    def to_dict(self) -> dict:
        return {"m": self.m, "minSameColorDistance": self.min_same_color_distance,
                "minSameAnnulusDistance": self.min_same_annulus_distance,
                "maxPartDiameter": self.max_part_diameter, "colors": sorted(set(self.colors)),
                "parts": [{"id": i, "color": c, "size": len(p), "diameter": d, "truncated": t}
                          for i, (p, c, d, t) in enumerate(zip(self.parts, self.colors, self.diameters, self.truncated))]}

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)


def _tree_set_diameter(ball: CayleyBall, part) -> int:
    # double sweep; valid because a tree metric is 0-hyperbolic.
    # Free-group keys are reduced words, so |a^-1 v| is a key length.
    keys = ball.keys
    div = ball.oracle.divide

    def far(a):
        best, arg = -1, a
        for v in part:
            d = len(div(keys[a], keys[v]))
            if d > best:
                best, arg = d, v
        return best, arg
    _, b = far(part[0])
    return far(b)[0]


def corona_partition(ball: CayleyBall, m: int) -> CoronaColoring:
    """Corona parts and parity colors for any ball (distances to the identity are norms)."""
    if m < 1:
        raise ValueError("m must be >= 1")
    labels = ball.labels
    nbr = ball.nbr
    ann = [lab // m for lab in labels]
    assigned = [False] * len(ball)
    parts, colors, anns = [], [], []
    seen = [-2] * len(ball)  # last n whose component search visited v; n starts at -1
    for v0 in range(len(ball)):
        if assigned[v0]:
            continue
        j = ann[v0]
        n = j - 1
        comp_part = []
        seen[v0] = n
        queue = deque([v0])
        while queue:
            x = queue.popleft()
            if ann[x] == j:
                comp_part.append(x)
                assigned[x] = True
            for y in nbr[x]:
                if y >= 0 and seen[y] != n and n <= ann[y] <= n + 1:
                    seen[y] = n
                    queue.append(y)
        parts.append(tuple(sorted(comp_part)))
        colors.append(j % 2)
        anns.append(j)
    tree = ball.oracle.is_free
    diams = [_tree_set_diameter(ball, p) if tree else set_diameter(ball, p) for p in parts]
    trunc = [(j + 1) * m - 1 > ball.radius for j in anns]
    order = sorted(range(len(parts)), key=lambda i: parts[i][0])
    return CoronaColoring(m, [parts[i] for i in order], [colors[i] for i in order], [anns[i] for i in order],
                          [diams[i] for i in order], [trunc[i] for i in order])


def corona_coloring(ball: CayleyBall, m: int) -> CoronaColoring:
    """Corona 2-coloring of a free-group ball, with the observed same-color separation."""
    if not ball.oracle.is_free:
        raise SpecError(f"corona_coloring needs a tree Cayley graph; {ball.oracle.spec.text} is not free")
    if ball.radius < 3 * m:
        raise ValueError(f"radius {ball.radius} < 3m = {3 * m}")
    col = corona_partition(ball, m)
    col.min_same_color_distance = min_same_color_distance(ball, col.parts, col.colors)
    # separations inside one annulus (at least 2m + 2 on a tree); across annuli j and j+2 only m + 1
    col.min_same_annulus_distance = min_same_color_distance(ball, col.parts, col.annulus)
    return col


def min_same_color_distance(ball: CayleyBall, parts, colors) -> float:
    """Least in-ball distance between two distinct parts of one color (inf if none).

    One multi-source BFS per color; the closest pair shows up on an edge where
    ownership changes.
    """
    n = len(ball)
    nbr = ball.nbr
    best = float("inf")
    for c in sorted(set(colors)):
        own = [-1] * n
        dist = [-1] * n
        queue = deque()
        for i, p in enumerate(parts):
            if colors[i] != c:
                continue
            for v in p:
                own[v] = i
                dist[v] = 0
                queue.append(v)
        while queue:
            x = queue.popleft()
            for y in nbr[x]:
                if y < 0:
                    continue
                if dist[y] < 0:
                    dist[y] = dist[x] + 1
                    own[y] = own[x]
                    queue.append(y)
                elif own[y] != own[x]:
                    best = min(best, dist[x] + dist[y] + 1)
    return best


@dataclass
class WitnessCheck:
    ok: bool
    violations: list = field(default_factory=list)  # (kind, detail)

    def to_dict(self) -> dict:
        return {"ok": self.ok, "violations": [[k, d] for k, d in self.violations]}


def verify_asdim_witness(ball: CayleyBall, parts, colors, m: int, diameter_bound: int | None = None,
                         domain=None, limit: int = 50) -> WitnessCheck:
    """Check that ``parts`` partition the domain, have bounded diameter, and same-color parts are > m apart.

    Separation uses in-ball distances, which equal group distances on tree balls.
    Violating pairs are listed up to ``limit``.
    """
    out = []
    n = len(ball)
    dom = set(range(n)) if domain is None else set(domain)
    own = {}
    for i, p in enumerate(parts):
        for v in p:
            if v in own:
                out.append(("overlap", [v, own[v], i]))
            own[v] = i
    if set(own) != dom:
        out.append(("cover", sorted(dom.symmetric_difference(own))[:limit]))
    if diameter_bound is not None:
        for i, p in enumerate(parts):
            d = set_diameter(ball, p) if not ball.oracle.is_free else _tree_set_diameter(ball, list(p))
            if d is None or d > diameter_bound:
                out.append(("diameter", [i, d]))
    if min_same_color_distance(ball, parts, colors) <= m:
        for i, p in enumerate(parts):
            near = ball.bfs(p, max_depth=m)
            for v in near:
                j = own.get(v)
                if j is not None and j > i and colors[j] == colors[i]:
                    out.append(("separation", [i, j]))
                    if len(out) >= limit:
                        return WitnessCheck(False, out)
    return WitnessCheck(not out, out)


@dataclass
class ZRDecomposition:
    z: list        # representative vertex per vertex
    r: list        # offset key per vertex
    color_on_z: dict
    distinct_r: int
    max_r_norm: int
    failures: list

    def to_dict(self) -> dict:
        return {"vertices": len(self.z), "distinctR": self.distinct_r, "maxRNorm": self.max_r_norm,
                "failures": len(self.failures)}


def zr_decomposition(ball: CayleyBall, coloring: CoronaColoring) -> ZRDecomposition:
    """z(g) is the least vertex of g's part and r(g) = z(g)^-1 g; checks g = z(g) r(g)."""
    oracle = ball.oracle
    n = len(ball)
    z = [-1] * n
    r = [None] * n
    color_on_z = {}
    fails = []
    max_norm = 0
    bound = coloring.max_part_diameter
    for p, c in zip(coloring.parts, coloring.colors):
        rep = p[0]
        color_on_z[rep] = c
        zk = ball.keys[rep]
        for g in p:
            rk = oracle.divide(zk, ball.keys[g])
            z[g] = rep
            r[g] = rk
            norm = ball.norm_of_key(rk)
            if oracle.multiply(zk, rk) != ball.keys[g] or norm is None or norm > bound:
                fails.append(g)
            elif norm > max_norm:
                max_norm = norm
    return ZRDecomposition(z, r, color_on_z, len(set(r)), max_norm, fails)


@dataclass
class AlmostInvariantMap:
    m: int
    alpha: list          # label per vertex: -1 for the m-ball, else component id
    sizes: dict
    pairs: int
    violations: list
    witnesses: dict      # g key string -> witness dict or None

    @property
    def labels(self) -> list:
        return sorted(self.sizes)

    def to_dict(self) -> dict:
        return {"m": self.m, "labels": [_label_name(x) for x in self.labels],
                "perLabelSizes": {_label_name(k): v for k, v in sorted(self.sizes.items())},
                "invarianceChecked": {"pairs": self.pairs, "violations": len(self.violations)},
                "witnesses": self.witnesses}

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)


def _label_name(x: int) -> str:
    return "ball" if x < 0 else f"C{x}"


def almost_invariant_map(ball: CayleyBall, m: int, g_max: int = 2, h_max: int | None = None,
                         witness_powers: int = 8) -> AlmostInvariantMap:
    """Label vertices by their component of the complement of the m-ball and test right-invariance.

    For every g with |g| <= g_max and h with ``|g| + m < |h| <= h_max - |g|``
    (``h_max`` defaults to the certified radius) the labels of h and hg must
    agree. For each nonidentity g a witness against g stabilizing the map is
    sought: a power g^k and a prefix h of a geodesic word for it such that
    h^-1 and h^-1 g^k get different component labels.
    """
    if h_max is None:
        h_max = ball.certified_radius
    if h_max < m + 2:
        raise ValueError(f"radius too small: need a certified radius of at least {m + 2}")
    oracle = ball.oracle
    labels = ball.labels
    alpha = [-1] * len(ball)
    sizes = {-1: sum(1 for lab in labels if lab <= m)}
    for cid, comp in enumerate(complement_components(ball, 0, m)):
        sizes[cid] = len(comp)
        for v in comp:
            alpha[v] = cid
    pairs = 0
    viol = []
    gs = [v for v in range(len(ball)) if labels[v] <= g_max]
    hs = [v for v in range(len(ball)) if labels[v] <= h_max]
    for g in gs:
        gk = ball.keys[g]
        lg = labels[g]
        for h in hs:
            if not (lg + m < labels[h] <= h_max - lg):
                continue
            hg = ball.index(oracle.multiply(ball.keys[h], gk))
            pairs += 1
            if alpha[hg] != alpha[h]:
                viol.append((ball.key_str(h), ball.key_str(g)))
    witnesses = {}
    for g in gs:
        if g != 0:
            witnesses[ball.key_str(g)] = _stabilizer_witness(ball, alpha, g, witness_powers)
    return AlmostInvariantMap(m, alpha, sizes, pairs, viol, witnesses)


def _stabilizer_witness(ball: CayleyBall, alpha, g: int, max_power: int):
    oracle = ball.oracle
    gk = oracle.identity
    for k in range(1, max_power + 1):
        gk = oracle.multiply(gk, ball.keys[g])
        v = ball.index(gk)
        if v is None:
            return None
        word = ball.word(v)
        for i in range(1, len(word)):
            h = oracle.evaluate(word[:i])
            a = ball.index(oracle.inverse(h))
            b = ball.index(oracle.divide(h, gk))
            if alpha[a] >= 0 and alpha[b] >= 0 and alpha[a] != alpha[b]:
                return {"k": k, "h": oracle.key_str(h), "alphaHInv": _label_name(alpha[a]),
                        "alphaHInvGk": _label_name(alpha[b])}
    return None
