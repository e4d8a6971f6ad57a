"""Word-problem languages: membership, geodesics, local geodesics and pushdown recognizers."""

from __future__ import annotations

import json
from dataclasses import dataclass, field

from .cayley import build_ball, CayleyBall
from .errors import BudgetExceeded
from .groups import GeneratorSymbol, GroupOracle, Word, format_word


def _check_alphabet(oracle: GroupOracle, w: Word) -> None:
    for s in w:
        oracle.symbol_key(s)  # raises UnknownSymbol


def wp_member(oracle: GroupOracle, w: Word) -> bool:
    """Is w in the word-problem language, i.e. does it spell the identity?"""
    _check_alphabet(oracle, w)
    return oracle.evaluate(w) == oracle.identity


class NormCache:
    """Keeps the largest ball built so far for one oracle and reads norms from it."""

    def __init__(self, oracle: GroupOracle, budget: int = 2_000_000):
        self.oracle = oracle
        self.budget = budget
        self.ball: CayleyBall | None = None

    def ensure(self, radius: int) -> CayleyBall:
        if self.ball is None or self.ball.radius < radius:
            self.ball = build_ball(self.oracle, radius, self.budget)
        return self.ball

    def norm(self, key, bound: int) -> int:
        # |g| <= bound is guaranteed by the caller (g is spelled by a word of that length)
        return self.ensure(bound).norm_of_key(key)


_caches: dict = {}


def _cache_for(oracle: GroupOracle) -> NormCache:
    c = _caches.get(id(oracle))
    if c is None or c.oracle is not oracle:
        c = _caches[id(oracle)] = NormCache(oracle)
    return c


def is_geodesic(oracle: GroupOracle, w: Word, cache: NormCache | None = None) -> bool:
    """True iff |w| equals the group norm of the element it spells."""
    _check_alphabet(oracle, w)
    if len(w) <= 1:
        return True
    cache = cache or _cache_for(oracle)
    return cache.norm(oracle.evaluate(w), len(w)) == len(w)


def is_locally_geodesic(oracle: GroupOracle, w: Word, k: int, cache: NormCache | None = None) -> bool:
    """Every factor of length k is geodesic; a word shorter than k must be geodesic itself."""
    if len(w) <= k:
        return is_geodesic(oracle, w, cache)
    return all(is_geodesic(oracle, w[i:i + k], cache) for i in range(len(w) - k + 1))


@dataclass
class GeodesicReport:
    k: int
    L: int
    counterexamples: list     # words, length-lex order
    visited: int
    complete: bool

    def to_dict(self) -> dict:
        return {"k": self.k, "L": self.L, "counterexamples": [format_word(w) for w in self.counterexamples],
                "visited": self.visited, "complete": self.complete}

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)


def local_geodesic_survey(oracle: GroupOracle, k: int, L: int, budget: int = 5_000_000) -> GeodesicReport:
    """All words of length <= L that are k-locally geodesic but not geodesic.

    Words grow letter by letter; a prefix is dropped as soon as its last
    factor of length min(k, |w|) is not geodesic, which is sound because
    factors of geodesics are geodesic. Stops (complete=False) after
    ``budget`` prefixes.
    """
    if k < 1:
        raise ValueError("k must be >= 1")
    ball = build_ball(oracle, L)
    syms = oracle.symbols
    nsym = len(syms)
    nbr = ball.nbr
    labels = ball.labels
    idx: list = []   # symbol indices of the current word
    verts: list = [0]  # vertex of each prefix, starting at the identity
    out = []
    visited = 0

    def suffix_geodesic() -> bool:
        n = len(idx)
        j = max(0, n - k)
        if j == 0:
            return labels[verts[n]] == n
        key = ball.oracle.divide(ball.keys[verts[j]], ball.keys[verts[n]])
        return ball.norm_of_key(key) == n - j

    def dfs():
        nonlocal visited
        visited += 1
        if visited > budget:
            raise BudgetExceeded("local_geodesic_survey", visited, budget)
        n = len(idx)
        if n > k and labels[verts[n]] < n:
            out.append(tuple(syms[s] for s in idx))
        if n == L:
            return
        for s in range(nsym):
            idx.append(s)
            verts.append(nbr[verts[-1]][s])
            if suffix_geodesic():
                dfs()
            idx.pop()
            verts.pop()

    complete = True
    try:
        dfs()
    except BudgetExceeded:
        complete = False
    out.sort(key=lambda w: (len(w), [syms.index(s) for s in w]))
    return GeodesicReport(k, L, out, visited, complete)


def staircase_word(oracle: GroupOracle, k: int, first: str = "x", second: str = "y") -> Word:
    """x^k y^k x^-k y^-k."""
    x, y = GeneratorSymbol(first), GeneratorSymbol(second)
    return (x,) * k + (y,) * k + (x.inverse(),) * k + (y.inverse(),) * k


# ---------------------------------------------------------------------------
# pushdown automata

@dataclass
class PushdownAutomaton:
    """(states, initial, transitions, accepting, stack alphabet, bottom symbol).

    ``transitions[(state, letter, top)] = (next_state, action)`` where action
    is ``("push", symbol)``, ``("pop",)`` or ``("keep",)``. Acceptance is by
    final state.
    """
    states: tuple
    initial: str
    transitions: dict
    accepting: frozenset
    stack_alphabet: tuple
    bottom: str
    alphabet: tuple = ()

    def to_dict(self) -> dict:
        rows = []
        for (st, letter, top), (nxt, action) in sorted(self.transitions.items()):
            rows.append({"state": st, "letter": letter, "top": top, "next": nxt, "action": list(action)})
        return {"states": list(self.states), "initial": self.initial, "accepting": sorted(self.accepting),
                "stackAlphabet": list(self.stack_alphabet), "bottom": self.bottom,
                "alphabet": list(self.alphabet), "transitions": rows}

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)


def _hat(s: str) -> str:
    return "^" + s


def free_wp_pda(k: int) -> PushdownAutomaton:
    """Deterministic recognizer of the word problem of the free group on a, b, ...

    The stack holds the free reduction of the input read so far. The symbol
    sitting directly on the bottom marker is stored hatted, so a pop that
    empties the stack is visible when it happens and the state can record it:
    state ``e`` means the reduction is empty, ``n`` that it is not.
    """
    if k < 1:
        raise ValueError("rank must be >= 1")
    from .groups import _letters
    letters = []
    for name in _letters(k):
        letters.append(str(GeneratorSymbol(name)))
    letters += [str(GeneratorSymbol(name, -1)) for name in _letters(k)]
    inv = {}
    for name in _letters(k):
        inv[name] = name + "^-1"
        inv[name + "^-1"] = name
    bottom = "$"
    trans = {}
    for x in letters:
        trans[("e", x, bottom)] = ("n", ("push", _hat(x)))
        for top in letters:
            for hatted in (False, True):
                t = _hat(top) if hatted else top
                if x == inv[top]:
                    trans[("n", x, t)] = ("e" if hatted else "n", ("pop",))
                else:
                    trans[("n", x, t)] = ("n", ("push", x))
    stack = (bottom,) + tuple(letters) + tuple(_hat(x) for x in letters)
    return PushdownAutomaton(("e", "n"), "e", trans, frozenset({"e"}), stack, bottom, tuple(letters))


def finite_wp_pda(oracle: GroupOracle, max_radius: int = 64) -> PushdownAutomaton:
    """Recognizer of the word problem of a finite group that never touches its stack.

    States are the group elements (as key strings); raises ValueError if the
    group does not close up within ``max_radius``.
    """
    for R in range(1, max_radius + 1):
        ball = build_ball(oracle, R)
        if all(ball.is_complete(v) for v in range(len(ball))):
            break
    else:
        raise ValueError(f"{oracle.spec.text} is not finite within radius {max_radius}")
    letters = tuple(str(s) for s in oracle.symbols)
    names = [ball.key_str(v) for v in range(len(ball))]
    bottom = "$"
    trans = {}
    for v in range(len(ball)):
        for s, x in enumerate(letters):
            trans[(names[v], x, bottom)] = (names[ball.nbr[v][s]], ("keep",))
    return PushdownAutomaton(tuple(names), names[0], trans, frozenset({names[0]}), (bottom,), bottom, letters)


@dataclass
class PdaRun:
    accepted: bool
    trace: list = field(default_factory=list)  # (state, stack height above the bottom) after each step
    max_height: int = 0
    error_position: int | None = None

    def to_dict(self) -> dict:
        return {"accepted": self.accepted, "trace": [list(t) for t in self.trace],
                "maxHeight": self.max_height, "errorPosition": self.error_position}


def pda_run(pda: PushdownAutomaton, w, keep_trace: bool = True) -> PdaRun:
    """Simulate a deterministic PDA on a word (symbols or their string forms)."""
    state = pda.initial
    stack = [pda.bottom]
    run = PdaRun(False)
    if keep_trace:
        run.trace.append((state, 0))
    for pos, letter in enumerate(w):
        rule = pda.transitions.get((state, str(letter), stack[-1]))
        if rule is None:
            run.error_position = pos
            return run
        state, action = rule
        if action[0] == "push":
            stack.append(action[1])
        elif action[0] == "pop":
            stack.pop()
        h = len(stack) - 1
        if h > run.max_height:
            run.max_height = h
        if keep_trace:
            run.trace.append((state, h))
    run.accepted = state in pda.accepting
    return run
