"""Commutator words: nested-bracket witnesses over generator indices."""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping, Sequence

__all__ = [
    "CommutatorWord",
    "Leaf",
    "Bracket",
    "Combo",
    "word_expand",
    "word_depth",
    "word_size",
    "word_to_json",
    "word_from_json",
    "bracket",
    "combo",
    "WordIndexError",
]


class WordIndexError(IndexError):
    """A leaf refers to a generator index that does not exist."""


class CommutatorWord:
    """Base class; words compare by identity (subtrees are shared)."""

    __slots__ = ()


@dataclass(frozen=True, eq=False)
class Leaf(CommutatorWord):
    index: int

    def __repr__(self):
        return f"g{self.index}"


@dataclass(frozen=True, eq=False)
class Bracket(CommutatorWord):
    left: CommutatorWord
    right: CommutatorWord

    def __repr__(self):
        return f"[{self.left!r}, {self.right!r}]"


@dataclass(frozen=True, eq=False)
class Combo(CommutatorWord):
    terms: tuple  # tuple[tuple[scalar, CommutatorWord], ...]

    def __repr__(self):
        return "(" + " + ".join(f"{c}*{w!r}" for c, w in self.terms) + ")"


def bracket(a: CommutatorWord, b: CommutatorWord) -> Bracket:
    return Bracket(a, b)


def combo(*terms) -> CommutatorWord:
    """Linear combination from ``(scalar, word)`` pairs; zero scalars are dropped."""
    kept = tuple((c, w) for c, w in terms if c != 0)
    if len(kept) == 1 and kept[0][0] == 1:
        return kept[0][1]
    return Combo(kept)


def word_expand(word: CommutatorWord, generators: Sequence, memo: dict | None = None):
    """Evaluate a word with the generators' own bracket."""
    if not generators:
        raise ValueError("word expansion needs at least one generator")
    memo = {} if memo is None else memo
    zero = generators[0] * 0

    def ev(w):
        key = id(w)
        hit = memo.get(key)
        if hit is not None and hit[0] is w:
            return hit[1]
        if isinstance(w, Leaf):
            if not 0 <= w.index < len(generators):
                raise WordIndexError(f"leaf index {w.index} out of range for {len(generators)} generators")
            val = generators[w.index]
        elif isinstance(w, Bracket):
            val = ev(w.left).bracket(ev(w.right))
        elif isinstance(w, Combo):
            val = zero
            for c, sub in w.terms:
                val = val + ev(sub) * c
        else:
            raise TypeError(f"not a commutator word: {w!r}")
        memo[key] = (w, val)
        return val

    return ev(word)


def word_depth(word: CommutatorWord, memo: dict | None = None) -> int:
    """Bracket nesting depth (combinations do not add depth)."""
    memo = {} if memo is None else memo
    key = id(word)
    if key in memo:
        return memo[key]
    if isinstance(word, Leaf):
        out = 0
    elif isinstance(word, Bracket):
        out = 1 + max(word_depth(word.left, memo), word_depth(word.right, memo))
    else:
        out = max((word_depth(w, memo) for _, w in word.terms), default=0)
    memo[key] = out
    return out


def word_size(word: CommutatorWord) -> int:
    """Number of leaves of the fully unfolded tree."""
    if isinstance(word, Leaf):
        return 1
    if isinstance(word, Bracket):
        return word_size(word.left) + word_size(word.right)
    return sum(word_size(w) for _, w in word.terms)


def _scalar_json(c):
    if isinstance(c, Fraction):
        return str(c) if c.denominator != 1 else int(c.numerator)
    if isinstance(c, int):
        return c
    return float(c)


def _scalar_from_json(c):
    if isinstance(c, str):
        return Fraction(c)
    if isinstance(c, int):
        return Fraction(c)
    return float(c)


def word_to_json(word: CommutatorWord, refs: Mapping[int, int] | None = None, top: bool = True):
    """Nested JSON; subtrees listed in ``refs`` (``id(word) -> k``) become ``{"ref": k}``."""
    if refs and not top and id(word) in refs:
        return {"ref": refs[id(word)]}
    if isinstance(word, Leaf):
        return {"leaf": word.index}
    if isinstance(word, Bracket):
        return {"bracket": [word_to_json(word.left, refs, False), word_to_json(word.right, refs, False)]}
    return {"combo": [[_scalar_json(c), word_to_json(w, refs, False)] for c, w in word.terms]}


def word_from_json(obj, refs: Sequence[CommutatorWord] | None = None) -> CommutatorWord:
    if "leaf" in obj:
        return Leaf(int(obj["leaf"]))
    if "bracket" in obj:
        a, b = obj["bracket"]
        return Bracket(word_from_json(a, refs), word_from_json(b, refs))
    if "combo" in obj:
        return Combo(tuple((_scalar_from_json(c), word_from_json(w, refs)) for c, w in obj["combo"]))
    if "ref" in obj:
        if refs is None:
            raise ValueError("word contains a reference but no reference table was given")
        return refs[int(obj["ref"])]
    raise ValueError(f"malformed word JSON: {obj!r}")
