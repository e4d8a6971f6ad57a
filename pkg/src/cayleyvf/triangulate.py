"""m-sequences, m-reductions and triangulation search.

A closed sequence ``v_0 .. v_n`` (``v_n == v_0``) of ball vertices is an
m-sequence when consecutive vertices are at distance <= m. Deleting an
interior ``v_i`` (``1 <= i <= n-1``) whose neighbours are within m of each
other is an m-reduction; the sequence is m-triangulable when reductions can
bring it down to length <= 3.
"""

from __future__ import annotations

import enum
import json
import sys
from dataclasses import dataclass, field

from .cayley import CayleyBall
from .errors import BudgetExceeded, NotATree, StructuralError, UncertifiedDistance

DEFAULT_SEARCH_BUDGET = 200_000


@dataclass(frozen=True)
class MSequence:
    vertices: tuple
    m: int

    @property
    def length(self) -> int:
        return len(self.vertices) - 1


@dataclass(frozen=True)
class ReductionStep:
    index: int  # position in the current sequence, 1 <= index <= n-1
    chord: int


@dataclass
class TriangulationTrace:
    initial: MSequence
    m: int
    steps: list = field(default_factory=list)

    def to_dict(self, ball: CayleyBall) -> dict:
        return {"initial": [ball.key_str(v) for v in self.initial.vertices], "m": self.m,
                "steps": [{"i": s.index, "chord": s.chord} for s in self.steps]}

    def to_json(self, ball: CayleyBall) -> str:
        return json.dumps(self.to_dict(ball), sort_keys=True)


class Verdict(enum.Enum):
    TRIANGULABLE = "triangulable"
    NOT_TRIANGULABLE = "not-triangulable"
    BUDGET_EXCEEDED = "budget-exceeded"


@dataclass
class TriangulationResult:
    verdict: Verdict
    trace: TriangulationTrace | None = None
    visited: int = 0

    def __bool__(self):
        return self.verdict is Verdict.TRIANGULABLE


def _within(ball: CayleyBall, u: int, v: int, m: int):
    """Distance between u and v if it is <= m, else None. Raises when the ball cannot decide."""
    d = ball.exact_distance(u, v)
    if d is not None:
        return d if d <= m else None
    # u^-1 v is outside the ball, so the true distance exceeds the radius
    if m <= ball.radius:
        return None
    raise UncertifiedDistance(f"cannot decide dist({ball.key_str(u)}, {ball.key_str(v)}) <= {m} "
                              f"in a radius-{ball.radius} ball")


def msequence(ball: CayleyBall, vertices, m: int | None = None) -> MSequence:
    """Validate a closed vertex sequence; m defaults to its largest step."""
    vertices = tuple(vertices)
    if not vertices or vertices[0] != vertices[-1]:
        raise ValueError("an m-sequence must be closed (first vertex == last vertex)")
    steps = []
    for a, b in zip(vertices, vertices[1:]):
        d = ball.exact_distance(a, b)
        if d is None:
            raise UncertifiedDistance(f"step {ball.key_str(a)} -> {ball.key_str(b)} is uncertified")
        steps.append(d)
    top = max(steps, default=0)
    if m is None:
        m = top
    elif top > m:
        raise ValueError(f"not an {m}-sequence: a step has length {top}")
    return MSequence(vertices, m)


def path_sequence(ball: CayleyBall, word, start: int = 0) -> tuple:
    """Vertex sequence of the path spelled by ``word`` from ``start``."""
    if isinstance(word, str):
        word = ball.oracle.parse(word)
    out = [start]
    for x in word:
        nxt = ball.nbr[out[-1]][ball.symbols.index(x)]
        if nxt < 0:
            raise ValueError("path leaves the ball")
        out.append(nxt)
    return tuple(out)


def find_reductions(ball: CayleyBall, seq, m: int) -> list:
    verts = seq.vertices if isinstance(seq, MSequence) else tuple(seq)
    out = []
    for i in range(1, len(verts) - 1):
        c = _within(ball, verts[i - 1], verts[i + 1], m)
        if c is not None:
            out.append(ReductionStep(i, c))
    return out


def replay(ball: CayleyBall, trace: TriangulationTrace, m: int | None = None) -> list:
    """Replay a trace, checking every step is a genuine m-reduction.

    Returns the list of successive vertex sequences. Raises ValueError on the
    first invalid step or if the final length exceeds 3.
    """
    m = trace.m if m is None else m
    cur = list(trace.initial.vertices)
    for a, b in zip(cur, cur[1:]):
        if _within(ball, a, b, m) is None:
            raise ValueError(f"initial sequence is not an {m}-sequence")
    history = [tuple(cur)]
    for step in trace.steps:
        i = step.index
        if not 1 <= i <= len(cur) - 2:
            raise ValueError(f"reduction index {i} out of range for length {len(cur) - 1}")
        c = _within(ball, cur[i - 1], cur[i + 1], m)
        if c is None:
            raise ValueError(f"step removing index {i}: chord exceeds {m}")
        if c != step.chord:
            raise ValueError(f"step removing index {i}: recorded chord {step.chord}, actual {c}")
        del cur[i]
        history.append(tuple(cur))
    if len(cur) - 1 > 3:
        raise ValueError(f"trace ends at length {len(cur) - 1} > 3")
    return history


def validate_trace(ball: CayleyBall, trace: TriangulationTrace, m: int | None = None) -> bool:
    try:
        replay(ball, trace, m)
    except ValueError:
        return False
    return True


class _OutOfBudget(Exception):
    pass


def triangulate(ball: CayleyBall, seq: MSequence, m: int | None = None,
                budget: int = DEFAULT_SEARCH_BUDGET, greedy_only: bool = False) -> TriangulationResult:
    """Exhaustive backtracking search for an m-triangulation.

    Duplicate neighbours are removed eagerly (always safe). Remaining choices
    are explored smallest chord first; states are memoised by the tuple of
    surviving original positions, and ``budget`` caps the number of distinct
    states expanded. With ``greedy_only`` the search never backtracks, which
    is only used to measure how often greedy choice suffices.
    """
    m = seq.m if m is None else m
    verts = seq.vertices
    if len(verts) - 1 <= 3:
        return TriangulationResult(Verdict.TRIANGULABLE, TriangulationTrace(seq, m, []), 0)
    for a, b in zip(verts, verts[1:]):
        if _within(ball, a, b, m) is None:
            return TriangulationResult(Verdict.NOT_TRIANGULABLE, None, 0)

    chords = {}

    def chord(p, q):
        key = (p, q)
        if key not in chords:
            chords[key] = _within(ball, verts[p], verts[q], m)
        return chords[key]

    alive = list(range(len(verts)))
    prefix = []
    changed = True
    while changed and len(alive) > 4:
        changed = False
        for j in range(1, len(alive) - 1):
            if verts[alive[j]] in (verts[alive[j - 1]], verts[alive[j + 1]]):
                prefix.append(ReductionStep(j, chord(alive[j - 1], alive[j + 1])))
                del alive[j]
                changed = True
                break

    failed = set()
    visited = 0

    def search(state):
        nonlocal visited
        if len(state) <= 4:
            return []
        if state in failed:
            return None
        visited += 1
        if visited > budget:
            raise _OutOfBudget
        cands = []
        for j in range(1, len(state) - 1):
            c = chord(state[j - 1], state[j + 1])
            if c is not None:
                cands.append((c, j))
        cands.sort()
        if greedy_only:
            cands = cands[:1]
        for c, j in cands:
            rest = search(state[:j] + state[j + 1:])
            if rest is not None:
                return [ReductionStep(j, c)] + rest
        failed.add(state)
        return None

    limit = sys.getrecursionlimit()
    sys.setrecursionlimit(max(limit, 4 * len(verts) + 100))
    try:
        steps = search(tuple(alive))
    except _OutOfBudget:
        return TriangulationResult(Verdict.BUDGET_EXCEEDED, None, visited)
    finally:
        sys.setrecursionlimit(limit)
    if steps is None:
        return TriangulationResult(Verdict.NOT_TRIANGULABLE, None, visited)
    return TriangulationResult(Verdict.TRIANGULABLE, TriangulationTrace(seq, m, prefix + steps), visited)


# ---------------------------------------------------------------------------
# constructive triangulation in a tree (Nielsen prefix cancellation)

def _wlen_mul(x, y):
    """Length of the freely reduced product of two reduced words (signed-int letters)."""
    i = 0
    n = min(len(x), len(y))
    while i < n and x[-1 - i] == -y[i]:
        i += 1
    return len(x) + len(y) - 2 * i


def _common_prefix(x, y) -> int:
    i = 0
    n = min(len(x), len(y))
    while i < n and x[i] == y[i]:
        i += 1
    return i


@dataclass
class NielsenState:
    """Per-index data of the prefix-cancellation argument for one polygon.

    ``w[i]`` is the reduced word from vertex i-1 to vertex i (cyclically),
    ``a[i]`` the length of the maximal common prefix of ``w[i]`` and
    ``w[i-1]^-1``, and ``c[i] = a[i+1]`` the length of the suffix of ``w[i]``
    cancelled against ``w[i+1]``. ``b[i]`` is the remaining core length when
    ``a[i] + c[i] <= |w[i]|``, else None.
    """
    w: list
    a: list
    b: list
    c: list

    @classmethod
    def of(cls, keys) -> "NielsenState":
        k = len(keys)
        w = []
        for i in range(k):
            x, y = keys[i - 1], keys[i]
            j = _common_prefix(x, y)
            w.append(tuple(-c for c in reversed(x[j:])) + y[j:])
        a = []
        for i in range(k):
            prev_inv = tuple(-c for c in reversed(w[i - 1]))
            a.append(_common_prefix(w[i], prev_inv))
        c = [a[(i + 1) % k] for i in range(k)]
        b = [len(w[i]) - a[i] - c[i] if a[i] + c[i] <= len(w[i]) else None for i in range(k)]
        return cls(w, a, b, c)


@dataclass
class TreeTriangulation:
    trace: TriangulationTrace
    ears: list            # (left, tip, right, chord) in original positions, in removal order
    fallback_steps: int   # removals not produced by the case analysis; nonzero would be a bug signal


def _nielsen_pick(state: NielsenState, m: int):
    """Choose an ear tip following the case analysis; returns (tip, chord, used_case_analysis)."""
    w, a, c = state.w, state.a, state.c
    k = len(w)

    def chord_at(t):  # chord created by deleting polygon vertex t
        return _wlen_mul(w[t], w[(t + 1) % k])

    for i in range(k):
        if a[i] + c[i] > len(w[i]):
            t = (i - 1) % k if 2 * a[i] > len(w[i]) else i
            ch = chord_at(t)
            if ch <= m:
                return t, ch, True
    for j in range(k):
        ch = chord_at(j)
        if ch <= m:
            return j, ch, True
        if 2 * a[j] > m:
            t = (j - 1) % k
        elif 2 * c[(j + 1) % k] > m:
            t = (j + 1) % k
        else:
            continue
        ch = chord_at(t)
        if ch <= m:
            return t, ch, True
    for t in range(k):
        ch = chord_at(t)
        if ch <= m:
            return t, ch, False
    return None


def tree_triangulate(ball: CayleyBall, seq: MSequence, m: int | None = None) -> TreeTriangulation:
    """Constructive m-triangulation of an m-sequence in a free group's Cayley tree.

    Works on the closed polygon (the base vertex is not special), removing
    ears chosen by the prefix-cancellation case analysis, with distances
    computed directly from reduced words. The resulting triangulation is then
    re-ordered so that the base vertex is never removed.
    """
    if not ball.oracle.is_free:
        raise NotATree(f"tree_triangulate needs a free group on a free basis, got {ball.oracle.spec.text}")
    m = seq.m if m is None else m
    verts = seq.vertices
    n = len(verts) - 1
    if n <= 3:
        return TreeTriangulation(TriangulationTrace(seq, m, []), [], 0)
    keys = [ball.keys[v] for v in verts[:-1]]
    poly = list(range(n))
    ears = []
    fallback = 0
    while len(poly) > 3:
        state = NielsenState.of([keys[p] for p in poly])
        picked = _nielsen_pick(state, m)
        if picked is None:
            raise StructuralError("no m-reduction exists in a tree m-sequence; "
                                  "the input is not an m-sequence or the algorithm is broken")
        t, ch, by_cases = picked
        fallback += not by_cases
        k = len(poly)
        ears.append((poly[t - 1], poly[t], poly[(t + 1) % k], ch))
        del poly[t]

    diagonals = {frozenset((l, r)): ch for l, _, r, ch in ears}
    steps = []
    cur = list(range(n))
    while len(cur) > 3:
        k = len(cur)
        for j in range(1, k):
            left, right = cur[j - 1], cur[(j + 1) % k]
            ch = diagonals.get(frozenset((left, right)))
            if ch is not None:
                steps.append(ReductionStep(j, ch))
                del cur[j]
                break
        else:
            raise StructuralError("triangulation has no ear away from the base vertex")
    return TreeTriangulation(TriangulationTrace(seq, m, steps), ears, fallback)


# ---------------------------------------------------------------------------
# surveys

def _symbol_classes(ball: CayleyBall) -> list:
    """Map each symbol to the least-index symbol denoting the same group element."""
    o = ball.oracle
    first = {}
    out = []
    for s, sym in enumerate(ball.symbols):
        out.append(first.setdefault(o.symbol_key(sym), s))
    return out


def _canonical_cycle(word: tuple, classes: list, inverse_of: list) -> tuple:
    w = tuple(classes[s] for s in word)
    inv = tuple(classes[inverse_of[s]] for s in reversed(word))
    n = len(w)
    return min(min(w[i:] + w[:i] for i in range(n)), min(inv[i:] + inv[:i] for i in range(n)))


def closed_path_words(ball: CayleyBall, max_len: int) -> list:
    """All closed paths at the identity of length 1..max_len as symbol-index words,
    one representative per class under rotation and reversal, in length-lex order."""
    classes = _symbol_classes(ball)
    syms = ball.symbols
    inverse_of = [syms.index(x.inverse()) for x in syms]
    labels = ball.labels
    nbr = ball.nbr
    found = set()
    ordered = []
    word = []

    def dfs(v, depth):
        if depth and v == 0:
            canon = _canonical_cycle(tuple(word), classes, inverse_of)
            if canon not in found:
                found.add(canon)
                ordered.append(canon)
        if depth == max_len:
            return
        for s in range(len(syms)):
            if classes[s] != s:
                continue
            w = nbr[v][s]
            if w < 0 or labels[w] > max_len - depth - 1:
                continue
            word.append(s)
            dfs(w, depth + 1)
            word.pop()

    dfs(0, 0)
    ordered.sort(key=lambda w: (len(w), w))
    return ordered


@dataclass
class SurveyReport:
    L: int
    m: int
    total: int = 0
    triangulable: int = 0
    failed: int = 0
    budget_exceeded: int = 0
    greedy_failures: int = 0
    worst_case: dict | None = None
    failures: list = field(default_factory=list)

    def to_dict(self) -> dict:
        return {"L": self.L, "m": self.m, "total": self.total, "triangulable": self.triangulable,
                "failed": self.failed, "budgetExceeded": self.budget_exceeded,
                "greedyFailures": self.greedy_failures, "worstCase": self.worst_case}


def survey_closed_paths(ball: CayleyBall, L: int, m: int, budget: int = DEFAULT_SEARCH_BUDGET,
                        use_tree: bool = False, keep_failures: int = 20) -> SurveyReport:
    """Triangulate every closed path at the identity of length <= L (up to rotation/reversal).

    Closed paths never repeat a vertex consecutively, so they already are
    path sequences. ``greedy_failures`` counts paths the exhaustive search
    triangulates but a single greedy descent does not.
    """
    # closed paths of length L stay within radius L/2; chord decisions are exact for m <= R
    if L > 2 * ball.radius or m > ball.radius:
        raise ValueError(f"L={L}, m={m} need a ball of radius >= {max((L + 1) // 2, m)}")
    rep = SurveyReport(L, m)
    syms = ball.symbols
    worst_len = -1
    for word in closed_path_words(ball, L):
        seq = MSequence(path_sequence(ball, tuple(syms[s] for s in word)), 1)
        rep.total += 1
        text = " ".join(str(syms[s]) for s in word)
        if use_tree:
            tt = tree_triangulate(ball, seq, m)
            if not validate_trace(ball, tt.trace, m):
                raise StructuralError(f"tree triangulation of {text!r} does not replay")
            verdict = Verdict.TRIANGULABLE
        else:
            res = triangulate(ball, seq, m, budget)
            verdict = res.verdict
            if verdict is Verdict.TRIANGULABLE and not triangulate(ball, seq, m, budget, greedy_only=True):
                rep.greedy_failures += 1
        if verdict is Verdict.TRIANGULABLE:
            rep.triangulable += 1
            if rep.failed == 0 and rep.budget_exceeded == 0 and len(word) > worst_len:
                worst_len = len(word)
                rep.worst_case = {"word": text, "verdict": verdict.value}
        elif verdict is Verdict.NOT_TRIANGULABLE:
            rep.failed += 1
            if rep.failed == 1:
                rep.worst_case = {"word": text, "verdict": verdict.value}
            if len(rep.failures) < keep_failures:
                rep.failures.append(text)
        else:
            rep.budget_exceeded += 1
            if rep.failed == 0 and rep.budget_exceeded == 1:
                rep.worst_case = {"word": text, "verdict": verdict.value}
    return rep


def minimal_m(ball: CayleyBall, seq: MSequence, m_max: int, budget: int = DEFAULT_SEARCH_BUDGET):
    """Least m <= m_max at which ``seq`` is m-triangulable, or None.

    Below the sequence's largest step it is not an m-sequence at all, so the
    scan starts there. A budget overrun before any success raises
    BudgetExceeded, since the minimum can then not be concluded.
    """
    if seq.length <= 3:
        return 0
    top = max(ball.exact_distance(a, b) for a, b in zip(seq.vertices, seq.vertices[1:]))
    for m in range(top, m_max + 1):
        res = triangulate(ball, seq, m, budget)
        if res.verdict is Verdict.TRIANGULABLE:
            return m
        if res.verdict is Verdict.BUDGET_EXCEEDED:
            raise BudgetExceeded(f"minimal_m at m={m}", res.visited, budget)
    return None


def square_perimeter(ball: CayleyBall, n: int) -> MSequence:
    """Perimeter of the n-by-n square at the origin in a rank-2 free abelian ball, as a 1-sequence."""
    x, y = ball.oracle.generators[:2]
    word = (x,) * n + (y,) * n + (x.inverse(),) * n + (y.inverse(),) * n
    return MSequence(path_sequence(ball, word), 1)


def cycle_word(ball: CayleyBall, text: str) -> MSequence:
    """1-sequence of the closed path spelled by ``text`` from the identity."""
    verts = path_sequence(ball, text)
    if verts[-1] != verts[0]:
        raise ValueError(f"word {text!r} does not close up")
    return MSequence(verts, 1)


__all__ = [
    "MSequence", "ReductionStep", "TriangulationTrace", "TriangulationResult", "Verdict",
    "NielsenState", "TreeTriangulation", "SurveyReport",
    "msequence", "path_sequence", "find_reductions", "replay", "validate_trace", "triangulate",
    "tree_triangulate", "closed_path_words", "survey_closed_paths", "minimal_m",
    "square_perimeter", "cycle_word",
]
