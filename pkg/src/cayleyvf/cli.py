"""Command-line front end.

Every command prints a deterministic report (JSON with sorted keys unless
--csv or --dot is chosen). Exit codes: 0 success, 1 error, 2 inconclusive
(budget exhausted or truncated data).
"""

from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction

from . import asdim, coarse, langtools, treedecomp, triangulate
from .cayley import build_ball, DEFAULT_VERTEX_BUDGET
from .errors import BudgetExceeded, SpecError, StructuralError, UncertifiedDistance, UnknownSymbol
from .groups import make_oracle

CONSISTENT = "consistent-with-virtually-free"
INCONSISTENT = "inconsistent"
INCONCLUSIVE = "inconclusive"


class Report:
    def __init__(self, data: dict, csv: str | None = None, dot: str | None = None, inconclusive: bool = False):
        self.data = data
        self.csv = csv
        self.dot = dot
        self.inconclusive = inconclusive

    def render(self, fmt: str) -> str:
        if fmt == "json":
            return json.dumps(self.data, sort_keys=True, indent=2) + "\n"
        text = self.csv if fmt == "csv" else self.dot
        if text is None:
            raise ValueError(f"--{fmt} is not available for this command")
        return text


# ---------------------------------------------------------------------------
# helpers

def _ball(args, radius=None):
    R = args.radius if args.radius is not None else (radius if radius is not None else 9)
    return build_ball(make_oracle(args.group), R, args.budget)


def _vertex(ball, text):
    if text is None:
        return 0
    return ball.vertex("" if text in ("e", "1") else text)


def _sequence(ball, args):
    if args.square is not None:
        return triangulate.square_perimeter(ball, args.square)
    if args.word is None:
        raise ValueError("give --word or --square")
    return triangulate.cycle_word(ball, args.word)


def trend(values) -> str:
    """Plateau -> consistent; sustained growth over the last three points -> inconsistent."""
    if len(values) < 3 or any(v is None for v in values):
        return INCONCLUSIVE
    if values[-1] <= max(values[:-1]):
        return CONSISTENT
    if values[-3] < values[-2] < values[-1]:
        return INCONSISTENT
    return INCONCLUSIVE


# ---------------------------------------------------------------------------
# commands

def cmd_ball(args):
    ball = _ball(args, 4)
    return Report(ball.summary(), dot=ball.to_dot())


def cmd_triangulate(args):
    ball = _ball(args)
    seq = _sequence(ball, args)
    m = args.m if args.m is not None else 1
    if args.tree:
        res = triangulate.tree_triangulate(ball, seq, m)
        ok = triangulate.validate_trace(ball, res.trace)
        return Report({"verdict": "TRIANGULABLE", "fallbackSteps": res.fallback_steps, "valid": ok,
                       "trace": res.trace.to_dict(ball)})
    res = triangulate.triangulate(ball, seq, m, budget=args.search_budget)
    data = {"verdict": res.verdict.value, "visited": res.visited, "m": m, "length": seq.length}
    if res.trace is not None:
        data["trace"] = res.trace.to_dict(ball)
    return Report(data, inconclusive=res.verdict == triangulate.Verdict.BUDGET_EXCEEDED)


def cmd_survey(args):
    ball = _ball(args)
    m = args.m if args.m is not None else 1
    rep = triangulate.survey_closed_paths(ball, args.L, m, budget=args.search_budget, use_tree=args.tree)
    return Report(rep.to_dict(), inconclusive=rep.budget_exceeded > 0)


def cmd_minimal_m(args):
    ball = _ball(args)
    seq = _sequence(ball, args)
    m = triangulate.minimal_m(ball, seq, args.m_max, budget=args.search_budget)
    return Report({"minimalM": m, "length": seq.length}, inconclusive=m is None)


def cmd_gromov(args):
    ball = _ball(args)
    x, y, z = (_vertex(ball, w) for w in (args.x, args.y, args.z))
    g = coarse.gromov_product(ball, x, y, z)
    return Report({"x": ball.key_str(x), "y": ball.key_str(y), "z": ball.key_str(z), "gromov": str(g)})


def cmd_path_scan(args):
    ball = _ball(args)
    L = args.max_path_len if args.max_path_len is not None else ball.radius // 2
    rep = coarse.path_inequality_scan(ball, L, args.sample_limit, seed=args.seed)
    return Report(rep.to_dict(), inconclusive=not rep.exhaustive)


def _n_range(ball, center, args):
    hi = args.n_max if args.n_max is not None else ball.certified_radius - 1 - ball.labels[center]
    return range(0, max(hi, -1) + 1)


def cmd_boundary_profile(args):
    ball = _ball(args)
    c = _vertex(ball, args.center)
    prof = coarse.boundary_profile(ball, c, _n_range(ball, c, args))
    trunc = any(r.truncated for _, comps in prof.rows for r in comps)
    return Report(prof.to_dict(), csv=prof.to_csv(), inconclusive=trunc)


def cmd_tree_decompose(args):
    ball = _ball(args)
    std = treedecomp.strong_tree_decomposition(ball, _vertex(ball, args.center))
    data = std.to_dict()
    data["width"] = treedecomp.width_check(std).to_dict()
    return Report(data, dot=std.to_dot())


def cmd_spanning_tree(args):
    ball = _ball(args)
    std = treedecomp.strong_tree_decomposition(ball, _vertex(ball, args.center))
    ust = treedecomp.uniform_spanning_tree(ball, std)
    return Report(ust.to_dict(), dot=ust.to_dot())


def cmd_asdim(args):
    ball = _ball(args)
    m = args.m if args.m is not None else 2
    col = asdim.corona_coloring(ball, m)
    check = asdim.verify_asdim_witness(ball, col.parts, col.colors, m, col.max_part_diameter)
    zr = asdim.zr_decomposition(ball, col)
    data = col.to_dict()
    if not args.full:
        data.pop("parts")
        data["partCount"] = len(col.parts)
    data["witness"] = check.to_dict()
    data["zr"] = zr.to_dict()
    return Report(data)


def cmd_almost_invariant(args):
    ball = _ball(args)
    m = args.m if args.m is not None else 1
    aim = asdim.almost_invariant_map(ball, m, g_max=args.g_max)
    return Report(aim.to_dict())


def cmd_geodesic_survey(args):
    oracle = make_oracle(args.group)
    rep = langtools.local_geodesic_survey(oracle, args.k, args.L)
    return Report(rep.to_dict(), inconclusive=not rep.complete)


def cmd_pda(args):
    oracle = make_oracle(args.group)
    pda = langtools.free_wp_pda(len(oracle.generators)) if oracle.is_free else langtools.finite_wp_pda(oracle)
    if args.word is None:
        return Report(pda.to_dict())
    run = langtools.pda_run(pda, oracle.parse(args.word))
    return Report(run.to_dict())


# ---------------------------------------------------------------------------
# verdict matrix

def _row(condition, statistic, values, flag=None):
    vals = [str(v) if isinstance(v, Fraction) else v for v in values]
    return {"condition": condition, "statistic": statistic, "values": vals,
            "flag": flag if flag is not None else trend(values)}


def verdict_matrix(spec: str, radius: int = 9, budget: int = DEFAULT_VERTEX_BUDGET,
                   search_budget: int = 200_000, geodesic_len: int = 8) -> dict:
    """Heuristic table: each characterization's finite shadow measured at growing scales."""
    ball = build_ball(make_oracle(spec), radius, budget)
    R, cr = ball.radius, ball.certified_radius
    rows = []

    # B4: least m triangulating every closed path of length L
    worst = []
    for L in (4, 6, 8, 10):
        if L > 2 * R:
            break
        m, found = 1, None
        while m <= min(R, L // 2 + 1):
            rep = triangulate.survey_closed_paths(ball, L, m, budget=search_budget, use_tree=ball.oracle.is_free)
            if rep.budget_exceeded:
                break
            if rep.failed == 0:
                found = m
                break
            m += 1
        worst.append(found)
    rows.append(_row("B4", "least m triangulating all closed paths, L = 4, 6, 8, 10", worst))

    # B5: path-inequality excess for growing path length
    exc = []
    for L in sorted({max(1, R // 3), max(1, R // 2), max(1, 2 * R // 3)}):
        rep = coarse.path_inequality_scan(ball, L)
        exc.append(rep.excess if rep.exhaustive else None)
    rows.append(_row("B5", "max dist(z, path) - (u|v)_z by path length", exc))

    # B6: boundary diameters around the identity
    prof = coarse.boundary_profile(ball, 0, range(0, cr))
    rows.append(_row("B6", "max boundary diameter by level", [prof.max_diameter(n) for n in range(cr)]))

    # B7: part diameters of the strong tree decomposition
    std = treedecomp.strong_tree_decomposition(ball, 0)
    ld = std.level_diameters()
    rows.append(_row("B7", "max part diameter by level", [ld.get(j) for j in range(1, cr + 1)]))

    # B1: spanning-tree distortion inside growing radii
    ust = treedecomp.uniform_spanning_tree(ball, std)
    dist = []
    for r in range(1, cr + 1):
        region = [v for v in range(len(ball)) if ball.labels[v] <= r]
        w = Fraction(1)
        for i, x in enumerate(region):
            for y in region[i + 1:]:
                w = max(w, Fraction(ball.exact_distance(x, y), ust.tree_distance(x, y)))
        dist.append(w)
    rows.append(_row("B1", "max d_graph / d_tree within radius r", dist))

    # asdim: corona parts for m = 1 in each certified annulus
    col = asdim.corona_partition(ball, 1)
    ad = {}
    for j, d in zip(col.annulus, col.diameters):
        if 1 <= j <= cr:
            ad[j] = None if d is None or ad.get(j, 0) is None else max(ad.get(j, 0), d)
    rows.append(_row("asdim", "max corona part diameter by annulus (m = 1)", [ad.get(j) for j in range(1, cr + 1)]))

    # (7): k-locally geodesic words that are not geodesic
    counts, complete = [], True
    for k in range(1, geodesic_len // 4 + 1):
        rep = langtools.local_geodesic_survey(ball.oracle, k, geodesic_len)
        complete &= rep.complete
        counts.append(len(rep.counterexamples))
    if not complete:
        flag = INCONCLUSIVE
    elif all(c > 0 for c in counts):
        flag = INCONSISTENT
    else:
        flag = CONSISTENT
    rows.append(_row("(7)", f"counterexamples of length <= {geodesic_len} for k = 1..{geodesic_len // 4}",
                     counts, flag))
    return {"group": ball.oracle.spec.text, "radius": R, "heuristic": True, "rows": rows}


def cmd_verdict(args):
    data = verdict_matrix(args.group, args.radius if args.radius is not None else 9, args.budget,
                          args.search_budget)
    return Report(data, inconclusive=any(r["flag"] == INCONCLUSIVE for r in data["rows"]))


# ---------------------------------------------------------------------------

COMMANDS = {
    "ball": (cmd_ball, "materialize a ball and summarize it"),
    "triangulate": (cmd_triangulate, "decide m-triangulability of one closed path"),
    "triangulate-survey": (cmd_survey, "triangulate every closed path up to a length"),
    "minimal-m": (cmd_minimal_m, "least m for which a closed path is m-triangulable"),
    "gromov": (cmd_gromov, "Gromov product (x|y)_z"),
    "path-scan": (cmd_path_scan, "exact path-inequality maxima"),
    "boundary-profile": (cmd_boundary_profile, "boundary diameters of complement components"),
    "tree-decompose": (cmd_tree_decompose, "strong tree decomposition and width bound"),
    "spanning-tree": (cmd_spanning_tree, "uniform spanning tree and its distortion"),
    "asdim-color": (cmd_asdim, "corona 2-coloring witness (free groups)"),
    "almost-invariant": (cmd_almost_invariant, "almost-invariant component map"),
    "geodesic-survey": (cmd_geodesic_survey, "k-locally geodesic words that are not geodesic"),
    "pda": (cmd_pda, "word-problem pushdown automaton, or its run on --word"),
    "verdict": (cmd_verdict, "heuristic table of all characterizations"),
}


class _Parser(argparse.ArgumentParser):
    """Usage errors exit with 1; 2 means inconclusive."""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--group", required=True, help="group spec, e.g. free:2, zn:2, freeprod:2,3")
    common.add_argument("--radius", type=int, default=None, help="ball radius (default 9; 4 for ball)")
    common.add_argument("--budget", type=int, default=DEFAULT_VERTEX_BUDGET, help="vertex budget for balls")
    common.add_argument("--search-budget", type=int, default=200_000, help="node budget for searches")
    common.add_argument("--seed", type=int, default=0)
    fmt = common.add_mutually_exclusive_group()
    fmt.add_argument("--json", dest="fmt", action="store_const", const="json")
    fmt.add_argument("--csv", dest="fmt", action="store_const", const="csv")
    fmt.add_argument("--dot", dest="fmt", action="store_const", const="dot")
    common.add_argument("--out", default=None, help="write the report here instead of stdout")
    common.set_defaults(fmt="json")

    parser = _Parser(prog="cayleyvf", description="Desk-scale checks of virtual freeness on Cayley-graph balls.")
    sub = parser.add_subparsers(dest="command", required=True)
    ps = {}
    for name, (fn, help_text) in COMMANDS.items():
        p = sub.add_parser(name, parents=[common], help=help_text)
        p.set_defaults(func=fn)
        ps[name] = p
    for name in ("triangulate", "minimal-m"):
        ps[name].add_argument("--word", help="closed path from the identity, e.g. 'a b a^-1 b^-1'")
        ps[name].add_argument("--square", type=int, help="perimeter of the n x n square (zn:2)")
    for name in ("triangulate", "triangulate-survey", "asdim-color", "almost-invariant"):
        ps[name].add_argument("--m", type=int, default=None)
    for name in ("triangulate", "triangulate-survey"):
        ps[name].add_argument("--tree", action="store_true", help="use the tree triangulation (free groups)")
    ps["minimal-m"].add_argument("--m-max", type=int, default=8)
    ps["triangulate-survey"].add_argument("--L", type=int, required=True)
    for v in ("x", "y", "z"):
        ps["gromov"].add_argument(f"--{v}", default=None, help="vertex as a word (default identity)")
    ps["path-scan"].add_argument("--max-path-len", type=int, default=None)
    ps["path-scan"].add_argument("--sample-limit", type=int, default=2_000_000)
    for name in ("boundary-profile", "tree-decompose", "spanning-tree"):
        ps[name].add_argument("--center", default=None, help="center vertex as a word (default identity)")
    ps["boundary-profile"].add_argument("--n-max", type=int, default=None)
    ps["asdim-color"].add_argument("--full", action="store_true", help="list every part")
    ps["almost-invariant"].add_argument("--g-max", type=int, default=2)
    ps["geodesic-survey"].add_argument("--k", type=int, required=True)
    ps["geodesic-survey"].add_argument("--L", type=int, required=True)
    ps["pda"].add_argument("--word", default=None)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        report = args.func(args)
        text = report.render(args.fmt)
    except BudgetExceeded as exc:
        print(f"inconclusive: {exc}", file=sys.stderr)
        return 2
    except (SpecError, UnknownSymbol, UncertifiedDistance, StructuralError, ValueError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    if args.out:
        with open(args.out, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return 2 if report.inconclusive else 0


if __name__ == "__main__":
    sys.exit(main())
