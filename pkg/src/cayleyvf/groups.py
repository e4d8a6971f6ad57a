"""Words over generator alphabets and effective group oracles.

A group enters the system only through a :class:`GroupOracle`: an ordered
list of generators plus arithmetic on canonical keys. Keys are hashable
normal forms, so equality of keys is equality in the group.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Hashable, Iterable, Sequence

from .errors import SpecError, UnknownSymbol

Key = Hashable


@dataclass(frozen=True, order=True)
class GeneratorSymbol:
    name: str
    exponent: int = 1

    def __post_init__(self):
        if not self.name:
            raise ValueError("generator name must be nonempty")
        if self.exponent not in (1, -1):
            raise ValueError(f"exponent must be +1 or -1, got {self.exponent}")

    def inverse(self) -> "GeneratorSymbol":
        return GeneratorSymbol(self.name, -self.exponent)

    def __str__(self):
        return self.name if self.exponent == 1 else f"{self.name}^-1"


Word = tuple  # tuple[GeneratorSymbol, ...]


def parse_word(text: str) -> Word:
    """Parse ``"a b^-1 a"`` into a word. The empty string (or ``"1"``/``"e"``) is the empty word."""
    letters = []
    for tok in text.split():
        if tok in ("1", "e") and len(text.split()) == 1:
            break
        if tok.endswith("^-1"):
            letters.append(GeneratorSymbol(tok[:-3], -1))
        elif tok.endswith("^1"):
            letters.append(GeneratorSymbol(tok[:-2], 1))
        else:
            letters.append(GeneratorSymbol(tok, 1))
    return tuple(letters)


def format_word(word: Iterable[GeneratorSymbol]) -> str:
    return " ".join(str(x) for x in word)


def inverse_word(word: Sequence[GeneratorSymbol]) -> Word:
    return tuple(x.inverse() for x in reversed(word))


def free_reduce(word: Sequence[GeneratorSymbol]) -> Word:
    out: list[GeneratorSymbol] = []
    for x in word:
        if out and out[-1] == x.inverse():
            out.pop()
        else:
            out.append(x)
    return tuple(out)


# ---------------------------------------------------------------------------
# group specs

@dataclass(frozen=True)
class GroupSpec:
    family: str
    params: tuple = ()
    factors: tuple = ()

    @property
    def text(self) -> str:
        if self.family == "lamplighter":
            return "lamplighter"
        if self.family == "prod":
            return f"prod({self.factors[0].text};{self.factors[1].text})"
        return f"{self.family}:{','.join(str(p) for p in self.params)}"

    def __str__(self):
        return self.text


_SIMPLE = re.compile(r"^(free|zn|cyclic|freeprod):([0-9]+(?:,[0-9]+)*)$")


def parse_spec(text: str) -> GroupSpec:
    s = text.strip().replace(" ", "")
    if s == "lamplighter":
        return GroupSpec("lamplighter")
    if s.startswith("prod(") and s.endswith(")"):
        inner = s[5:-1]
        depth = 0
        split_at = None
        for i, ch in enumerate(inner):
            if ch == "(":
                depth += 1
            elif ch == ")":
                depth -= 1
            elif ch == ";" and depth == 0:
                if split_at is not None:
                    raise SpecError(f"prod takes exactly two factors: {text!r}")
                split_at = i
        if split_at is None:
            raise SpecError(f"prod needs two factors separated by ';': {text!r}")
        spec = GroupSpec("prod", factors=(parse_spec(inner[:split_at]), parse_spec(inner[split_at + 1:])))
        generator_names(spec)  # collision check
        return spec
    mt = _SIMPLE.match(s)
    if not mt:
        raise SpecError(f"unrecognised group spec {text!r}; expected free:<k> | zn:<k> | cyclic:<n> | "
                        "freeprod:<n1>,<n2>[,...] | lamplighter | prod(<spec>;<spec>)")
    family, nums = mt.group(1), tuple(int(x) for x in mt.group(2).split(","))
    if family in ("free", "zn", "cyclic") and len(nums) != 1:
        raise SpecError(f"{family} takes one parameter: {text!r}")
    if family in ("free", "zn") and nums[0] < 1:
        raise SpecError(f"{family} rank must be >= 1: {text!r}")
    if family in ("cyclic", "freeprod") and min(nums) < 2:
        raise SpecError(f"cyclic orders must be >= 2: {text!r}")
    return GroupSpec(family, nums)


def _letters(k: int) -> list[str]:
    if k <= 20:
        return [chr(ord("a") + i) for i in range(k)]
    return [f"g{i + 1}" for i in range(k)]


def generator_names(spec: GroupSpec) -> list[str]:
    if spec.family in ("free", "freeprod"):
        k = spec.params[0] if spec.family == "free" else len(spec.params)
        return _letters(k)
    if spec.family == "zn":
        k = spec.params[0]
        return ["x", "y", "z"][:k] if k <= 3 else [f"x{i + 1}" for i in range(k)]
    if spec.family == "cyclic":
        return ["a"]
    if spec.family == "lamplighter":
        return ["a", "t"]
    if spec.family == "prod":
        left, right = (generator_names(f) for f in spec.factors)
        clash = set(left) & set(right)
        if clash:
            raise SpecError(f"direct product factors share generator names {sorted(clash)}; "
                            f"choose factors with distinct default names")
        return left + right
    raise SpecError(f"unknown family {spec.family!r}")


# ---------------------------------------------------------------------------
# oracles

class GroupOracle:
    """Arithmetic on canonical keys for one concrete group.

    Subclasses supply ``identity``, ``multiply``, ``inverse`` and the key of
    each generator. Symbols are ordered positives first, then inverses.
    """

    family = "abstract"

    def __init__(self, spec: GroupSpec, names: list[str], gen_keys: list[Key]):
        self.spec = spec
        self.generator_names = list(names)
        self.generators = [GeneratorSymbol(n, 1) for n in names]
        self.symbols = self.generators + [g.inverse() for g in self.generators]
        self._sym_key = {}
        for g, k in zip(self.generators, gen_keys):
            self._sym_key[g] = k
            self._sym_key[g.inverse()] = self.inverse(k)

    # to be provided by subclasses
    identity: Key

    def multiply(self, a: Key, b: Key) -> Key:
        raise NotImplementedError

    def inverse(self, a: Key) -> Key:
        raise NotImplementedError

    def key_str(self, a: Key) -> str:
        return str(a)

    # shared surface
    @property
    def identity_key(self) -> Key:
        return self.identity

    @property
    def is_free(self) -> bool:
        """True when the Cayley graph on these generators is a tree."""
        return False

    def symbol_key(self, sym: GeneratorSymbol) -> Key:
        try:
            return self._sym_key[sym]
        except KeyError:
            raise UnknownSymbol(str(sym)) from None

    def right_multiply(self, a: Key, sym: GeneratorSymbol) -> Key:
        return self.multiply(a, self.symbol_key(sym))

    def divide(self, a: Key, b: Key) -> Key:
        """Key of a^-1 b, so that dist(a, b) = |divide(a, b)|."""
        return self.multiply(self.inverse(a), b)

    def evaluate(self, word: Iterable[GeneratorSymbol], start: Key | None = None) -> Key:
        k = self.identity if start is None else start
        for x in word:
            k = self.right_multiply(k, x)
        return k

    def parse(self, text: str) -> Word:
        w = parse_word(text)
        for x in w:
            self.symbol_key(x)
        return w

    def __repr__(self):
        return f"<{type(self).__name__} {self.spec.text}>"


def evaluate(oracle: GroupOracle, word: Iterable[GeneratorSymbol]) -> Key:
    return oracle.evaluate(word)


class FreeOracle(GroupOracle):
    """Free group; keys are freely reduced words encoded as signed generator indices (+i+1 / -i-1)."""

    family = "free"

    def __init__(self, spec, names):
        self.identity = ()
        super().__init__(spec, names, [(i + 1,) for i in range(len(names))])

    @property
    def is_free(self):
        return True

    def multiply(self, a, b):
        out = list(a)
        for c in b:
            if out and out[-1] == -c:
                out.pop()
            else:
                out.append(c)
        return tuple(out)

    def inverse(self, a):
        return tuple(-c for c in reversed(a))

    def right_multiply(self, a, sym):
        c = self.symbol_key(sym)[0]
        if a and a[-1] == -c:
            return a[:-1]
        return a + (c,)

    def divide(self, a, b):
        i = 0
        n = min(len(a), len(b))
        while i < n and a[i] == b[i]:
            i += 1
        return tuple(-c for c in reversed(a[i:])) + b[i:]

    def key_word(self, a) -> Word:
        return tuple(GeneratorSymbol(self.generator_names[abs(c) - 1], 1 if c > 0 else -1) for c in a)

    def key_str(self, a):
        return format_word(self.key_word(a)) or "e"


class FreeAbelianOracle(GroupOracle):
    family = "zn"

    def __init__(self, spec, names):
        k = len(names)
        self.identity = (0,) * k
        super().__init__(spec, names, [tuple(int(i == j) for j in range(k)) for i in range(k)])

    def multiply(self, a, b):
        return tuple(x + y for x, y in zip(a, b))

    def inverse(self, a):
        return tuple(-x for x in a)

    def key_str(self, a):
        return "(" + ",".join(str(x) for x in a) + ")"


class CyclicOracle(GroupOracle):
    family = "cyclic"

    def __init__(self, spec, names, n):
        self.n = n
        self.identity = 0
        super().__init__(spec, names, [1 % n])

    def multiply(self, a, b):
        return (a + b) % self.n

    def inverse(self, a):
        return (-a) % self.n

    def key_str(self, a):
        return str(a)


class FreeProductOracle(GroupOracle):
    """Free product of cyclic groups; keys are alternating syllable tuples ((factor, exponent), ...)."""

    family = "freeprod"

    def __init__(self, spec, names, orders):
        self.orders = tuple(orders)
        self.identity = ()
        super().__init__(spec, names, [((i, 1),) for i in range(len(orders))])

    def multiply(self, a, b):
        out = list(a)
        for f, e in b:
            if out and out[-1][0] == f:
                s = (out.pop()[1] + e) % self.orders[f]
                if s:
                    out.append((f, s))
            else:
                out.append((f, e))
        return tuple(out)

    def inverse(self, a):
        return tuple((f, (-e) % self.orders[f]) for f, e in reversed(a))

    def key_str(self, a):
        if not a:
            return "e"
        return " ".join(self.generator_names[f] + ("" if e == 1 else f"^{e}") for f, e in a)


class LamplighterOracle(GroupOracle):
    """C2 wreath Z. Keys are (sorted lit-lamp positions, marker position); ``a`` toggles the lamp
    under the marker, ``t`` moves the marker one step right."""

    family = "lamplighter"

    def __init__(self, spec, names):
        self.identity = ((), 0)
        super().__init__(spec, names, [((0,), 0), ((), 1)])

    def multiply(self, a, b):
        lamps, p = a
        other, q = b
        if other:
            lamps = tuple(sorted(set(lamps).symmetric_difference(x + p for x in other)))
        return (lamps, p + q)

    def inverse(self, a):
        lamps, p = a
        return (tuple(x - p for x in lamps), -p)

    def key_str(self, a):
        lamps, p = a
        return "{" + ",".join(str(x) for x in lamps) + "}@" + str(p)


class DirectProductOracle(GroupOracle):
    family = "prod"

    def __init__(self, spec, left: GroupOracle, right: GroupOracle):
        self.left, self.right = left, right
        self.identity = (left.identity, right.identity)
        keys = [(left.symbol_key(g), right.identity) for g in left.generators]
        keys += [(left.identity, right.symbol_key(g)) for g in right.generators]
        super().__init__(spec, left.generator_names + right.generator_names, keys)

    def multiply(self, a, b):
        return (self.left.multiply(a[0], b[0]), self.right.multiply(a[1], b[1]))

    def inverse(self, a):
        return (self.left.inverse(a[0]), self.right.inverse(a[1]))

    def key_str(self, a):
        return f"({self.left.key_str(a[0])}; {self.right.key_str(a[1])})"


def make_oracle(spec: GroupSpec | str) -> GroupOracle:
    if isinstance(spec, str):
        spec = parse_spec(spec)
    names = generator_names(spec)
    if spec.family == "free":
        return FreeOracle(spec, names)
    if spec.family == "zn":
        return FreeAbelianOracle(spec, names)
    if spec.family == "cyclic":
        return CyclicOracle(spec, names, spec.params[0])
    if spec.family == "freeprod":
        return FreeProductOracle(spec, names, spec.params)
    if spec.family == "lamplighter":
        return LamplighterOracle(spec, names)
    if spec.family == "prod":
        return DirectProductOracle(spec, make_oracle(spec.factors[0]), make_oracle(spec.factors[1]))
    raise SpecError(f"unknown family {spec.family!r}")
