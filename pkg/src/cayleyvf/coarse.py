"""Gromov products, path inequalities and boundary-diameter profiles."""

from __future__ import annotations

import csv
import io
import json
import random
from dataclasses import dataclass, field
from fractions import Fraction

from .cayley import CayleyBall
from .errors import UncertifiedDistance


def gromov_product(ball: CayleyBall, x: int, y: int, z: int) -> Fraction:
    """(x|y)_z = (d(z,x) + d(z,y) - d(x,y)) / 2, exactly."""
    ds = [ball.exact_distance(z, x), ball.exact_distance(z, y), ball.exact_distance(x, y)]
    if None in ds:
        raise UncertifiedDistance("Gromov product needs distances beyond the ball radius")
    return Fraction(ds[0] + ds[1] - ds[2], 2)


def center_distances(ball: CayleyBall, center: int) -> list:
    if center == 0:
        return list(ball.labels)
    return ball.bfs_array(center)


def complement_components(ball: CayleyBall, center: int, n: int, dist=None) -> list:
    """Connected components (inside the ball) of the vertices farther than n from center.

    Components are sorted tuples, listed by least vertex index.
    """
    if dist is None:
        dist = center_distances(ball, center)
    adj = ball.adjacency()
    seen = set()
    comps = []
    for v in range(len(ball)):
        if dist[v] <= n or v in seen:
            continue
        comp = [v]
        seen.add(v)
        stack = [v]
        while stack:
            x = stack.pop()
            for y in adj[x]:
                if y not in seen and dist[y] > n:
                    seen.add(y)
                    comp.append(y)
                    stack.append(y)
        comps.append(tuple(sorted(comp)))
    return comps


def set_diameter(ball: CayleyBall, S):
    """Diameter of a vertex set in the true metric; None if some pair is beyond the ball radius."""
    S = list(S)
    best = 0
    for i, u in enumerate(S):
        for v in S[i + 1:]:
            d = ball.exact_distance(u, v)
            if d is None:
                return None
            if d > best:
                best = d
    return best


@dataclass
class ComponentRow:
    id: int
    size: int
    boundary_size: int
    diameter: int | None
    truncated: bool
    touches_surface: bool

    def to_dict(self):
        return {"id": self.id, "size": self.size, "boundarySize": self.boundary_size,
                "diameter": self.diameter, "truncated": self.truncated, "touchesSurface": self.touches_surface}


@dataclass
class BoundaryProfile:
    center: int
    center_key: str
    rows: list = field(default_factory=list)  # (n, [ComponentRow])

    def max_diameter(self, n: int, flag_free: bool = True):
        vals = [c.diameter for m, comps in self.rows if m == n for c in comps
                if c.diameter is not None and not (flag_free and c.truncated)]
        return max(vals, default=None)

    def levels(self) -> list:
        return [n for n, _ in self.rows]

    def to_dict(self) -> dict:
        return {"center": self.center_key,
                "rows": [{"n": n, "components": [c.to_dict() for c in comps]} for n, comps in self.rows]}

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["n", "maxDiameter", "truncated"])
        for n, comps in self.rows:
            diam = [c.diameter for c in comps if c.diameter is not None]
            w.writerow([n, max(diam) if diam else "", int(any(c.truncated for c in comps))])
        return buf.getvalue()


def boundary_profile(ball: CayleyBall, center: int = 0, n_range=None) -> BoundaryProfile:
    """Diameters of the boundaries of the components of the ball-complement around ``center``.

    A component's boundary is the set of its vertices adjacent to the removed
    ball, measured with the true metric. A row is flagged truncated when the
    removed ball is not well inside the certified region
    (``|center| + n + 1 > certifiedRadius``) or a boundary pair is beyond the
    ball radius. ``touches_surface`` only records contact with radius R, which
    every component of an infinite group makes.
    """
    dist = center_distances(ball, center)
    if n_range is None:
        n_range = range(0, max(dist))
    adj = ball.adjacency()
    R = ball.radius
    prof = BoundaryProfile(center, ball.key_str(center))
    for n in n_range:
        comps = complement_components(ball, center, n, dist)
        rows = []
        deep = ball.labels[center] + n + 1 > ball.certified_radius
        for cid, comp in enumerate(comps):
            bd = [v for v in comp if any(dist[y] <= n for y in adj[v])]
            diam = set_diameter(ball, bd)
            rows.append(ComponentRow(cid, len(comp), len(bd), diam, deep or diam is None,
                                     any(ball.labels[v] == R for v in comp)))
        prof.rows.append((n, rows))
    return prof


# ---------------------------------------------------------------------------
# path inequalities

def dist_to_path(ball: CayleyBall, z: int, path) -> int:
    ds = [ball.exact_distance(z, p) for p in path]
    if None in ds:
        raise UncertifiedDistance("path vertex beyond the ball radius from z")
    return min(ds)


@dataclass
class PathInequalityReport:
    max_path_len: int
    start_radius: int
    excess: Fraction          # max of dist(z, path) - (u|v)_z
    m_B5: Fraction            # least m with excess <= 3m/2
    m_B9: int                 # max of dist(z, path) over z on a geodesic from u to v
    witness_B5: dict
    witness_B9: dict
    exhaustive: bool
    nodes: int

    def to_dict(self):
        return {"maxPathLen": self.max_path_len, "startRadius": self.start_radius,
                "excess": str(self.excess), "m_B5": str(self.m_B5), "m_B9": self.m_B9,
                "witnessB5": self.witness_B5, "witnessB9": self.witness_B9,
                "exhaustive": self.exhaustive, "nodes": self.nodes}


def path_inequality_scan(ball: CayleyBall, max_path_len: int, sample_limit: int = 10_000_000,
                         seed: int = 0, start_radius: int | None = None) -> PathInequalityReport:
    """Exact maxima of the two path inequalities over all configurations up to translation.

    By left-invariance z is placed at the identity. u ranges over
    ``|u| <= start_radius`` (default ``R - max_path_len``) and the path over
    every walk of length <= max_path_len from u, so every distance involved is
    at most R and read off exactly from the ball.

    Only the endpoint v and the closest approach ``min |p|`` along the walk
    matter, so for each u a layered bottleneck DP gives, for every v, the
    largest closest approach over walks of length <= k; the layer at which v
    first appears is d(u, v). If the DP would touch more than ``sample_limit``
    (vertex, layer) entries the scan falls back to seeded random walks and
    reports ``exhaustive=False``.
    """
    R = ball.radius
    L = max_path_len
    if start_radius is None:
        start_radius = R - L
    if start_radius < 0 or start_radius + L > R:
        raise ValueError(f"need start_radius + max_path_len <= R (= {R})")
    labels = ball.labels
    nbr = ball.nbr
    syms = ball.symbols
    starts = sorted((v for v in range(len(ball)) if labels[v] <= start_radius), key=lambda v: (-labels[v], v))
    zero = {"u": ball.key_str(0), "path": "", "z": ball.key_str(0), "distToPath": 0}
    best5, best9 = Fraction(0), 0
    wit5, wit9 = dict(zero, gromov="0"), dict(zero)
    nodes = 0
    exhaustive = True

    def path_text(layers, u, v, val):
        # walk back through the layers to recover one optimal walk
        out = []
        k = len(layers) - 1
        while k > 0:
            if layers[k - 1].get(v, -1) == val:
                k -= 1
                continue
            for w in nbr[v]:
                if w >= 0 and min(layers[k - 1].get(w, -1), labels[v]) == val:
                    back = nbr[w].index(v)
                    out.append(str(syms[back]))
                    v = w
                    break
            k -= 1
        return " ".join(reversed(out))

    for u in starts:
        du = labels[u]
        cur = {u: du}
        first = {u: 0}
        layers = [cur]
        for k in range(1, L + 1):
            nxt = dict(cur)
            for w, val in cur.items():
                for y in nbr[w]:
                    if y < 0:
                        continue
                    c = val if val < labels[y] else labels[y]
                    if c > nxt.get(y, -1):
                        nxt[y] = c
                        if y not in first:
                            first[y] = k
            nodes += len(nxt)
            if nodes > sample_limit:
                exhaustive = False
                break
            layers.append(nxt)
            cur = nxt
        if not exhaustive:
            break
        for v, near in cur.items():
            dv, duv = labels[v], first[v]
            ex = Fraction(2 * near - du - dv + duv, 2)
            if ex > best5:
                best5 = ex
                wit5 = {"u": ball.key_str(u), "path": path_text(layers, u, v, near), "z": ball.key_str(0),
                        "distToPath": near, "gromov": str(Fraction(du + dv - duv, 2))}
            if du + dv == duv and near > best9:
                best9 = near
                wit9 = {"u": ball.key_str(u), "path": path_text(layers, u, v, near), "z": ball.key_str(0),
                        "distToPath": near}

    if not exhaustive:
        rng = random.Random(seed)
        best5, best9 = Fraction(0), 0
        wit5, wit9 = dict(zero, gromov="0"), dict(zero)
        nsym = len(syms)
        for _ in range(sample_limit):
            u = rng.choice(starts)
            p, q, near = u, 0, labels[u]
            word = []
            for _ in range(rng.randint(0, L)):
                s = rng.randrange(nsym)
                word.append(str(syms[s]))
                p, q = nbr[p][s], nbr[q][s]
                near = min(near, labels[p])
            du, dv, duv = labels[u], labels[p], labels[q]
            ex = Fraction(2 * near - du - dv + duv, 2)
            if ex > best5:
                best5 = ex
                wit5 = {"u": ball.key_str(u), "path": " ".join(word), "z": ball.key_str(0),
                        "distToPath": near, "gromov": str(Fraction(du + dv - duv, 2))}
            if du + dv == duv and near > best9:
                best9 = near
                wit9 = {"u": ball.key_str(u), "path": " ".join(word), "z": ball.key_str(0), "distToPath": near}
    return PathInequalityReport(L, start_radius, best5, best5 * Fraction(2, 3), best9,
                                wit5, wit9, exhaustive, nodes)
