"""Word-level combinatorics of cylinder targets.

A target is a finite union of equal-length cylinders, stored as a set of
words. Overlap questions (``U ∩ T^-k U`` nonempty) are answered in the full
sequence space, i.e. purely from the words.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Sequence

from mixret.errors import InputError

Word = tuple[str, ...]


def _split_word(word, separator: str | None) -> Word:
    if isinstance(word, str):
        if separator:
            return tuple(word.split(separator))
        return tuple(word)
    return tuple(str(s) for s in word)


@dataclass(frozen=True)
class TargetSet:
    """Deduplicated set of equal-length words ``[w]``, ``w`` in ``A^n``."""

    words: tuple[Word, ...]

    def __post_init__(self):
        words = tuple(sorted(set(tuple(w) for w in self.words)))
        if not words:
            raise InputError("target set must contain at least one word")
        lengths = {len(w) for w in words}
        if len(lengths) != 1:
            raise InputError(f"target words must have equal length, got lengths {sorted(lengths)}")
        if lengths.pop() < 1:
            raise InputError("target words must be nonempty")
        object.__setattr__(self, "words", words)

    @classmethod
    def parse(cls, words: str | Iterable, separator: str | None = None) -> "TargetSet":
        """Build from strings; a single string is one word.

        Without ``separator`` each character is a symbol.
        """
        if isinstance(words, str):
            words = [words]
        return cls(tuple(_split_word(w, separator) for w in words))

    @classmethod
    def prefix(cls, sequence: Sequence[str], n: int) -> "TargetSet":
        if n > len(sequence):
            raise InputError(f"sequence of length {len(sequence)} has no prefix of length {n}")
        return cls((tuple(sequence[:n]),))

    @property
    def length(self) -> int:
        return len(self.words[0])

    def format(self, separator: str = "") -> list[str]:
        return [separator.join(w) for w in self.words]

    def __len__(self) -> int:
        return len(self.words)


class _FullSpace:
    """``T^n U`` for ``U`` in F_{0,n-1}: the whole sequence space."""

    length = 0
    words = ((),)

    def __repr__(self):
        return "FULL_SPACE"

    def __reduce__(self):
        return "FULL_SPACE"


FULL_SPACE = _FullSpace()


@dataclass(frozen=True)
class ReturnFloors:
    pi_V: int
    pi_W: int
    pi_VW: int
    kappa: int


def _prefixes(target: TargetSet) -> dict[int, set[Word]]:
    return {L: {w[:L] for w in target.words} for L in range(1, target.length + 1)}


def _meets_after_shift(a: TargetSet, b_prefixes: dict[int, set[Word]], b_len: int, k: int) -> bool:
    """Is ``a ∩ T^-k b`` nonempty?"""
    n = a.length
    if k >= n:
        return True
    overlap = min(n - k, b_len)
    pref = b_prefixes[overlap]
    return any(w[k:k + overlap] in pref for w in a.words)


def border_length(word: Sequence) -> int:
    """Longest proper border of ``word`` (KMP failure function at the end)."""
    fail = [0] * (len(word) + 1)
    fail[0] = -1
    for i in range(1, len(word) + 1):
        j = fail[i - 1]
        while j != -1 and word[j] != word[i - 1]:
            j = fail[j]
        fail[i] = j + 1
    return fail[len(word)]


def self_overlap_pi(U: TargetSet) -> int:
    """Smallest k >= 1 with ``U ∩ T^-k U`` nonempty; at most ``U.length``."""
    if len(U.words) == 1:
        w = U.words[0]
        return len(w) - border_length(w)
    pref = _prefixes(U)
    for k in range(1, U.length):
        if _meets_after_shift(U, pref, U.length, k):
            return k
    return U.length


def _cross_pi(V: TargetSet, W: TargetSet) -> int:
    pv, pw = _prefixes(V), _prefixes(W)
    for k in range(1, min(V.length, W.length)):
        if _meets_after_shift(V, pw, W.length, k) or _meets_after_shift(W, pv, V.length, k):
            return k
    return min(V.length, W.length)


def return_floors(V: TargetSet, W: TargetSet) -> ReturnFloors:
    pi_v = self_overlap_pi(V)
    pi_w = self_overlap_pi(W)
    pi_vw = _cross_pi(V, W)
    return ReturnFloors(pi_v, pi_w, pi_vw, min(pi_vw, pi_v, pi_w))


def shift_target(U: TargetSet, s: int):
    """``T^s U``: the set of length ``n - s`` suffixes, or FULL_SPACE when ``s == n``."""
    n = U.length
    if not 0 <= s <= n:
        raise InputError(f"shift {s} outside [0, {n}]")
    if s == n:
        return FULL_SPACE
    if s == 0:
        return U
    return TargetSet(tuple(w[s:] for w in U.words))


def are_disjoint(V: TargetSet, W: TargetSet) -> bool:
    if V.length > W.length:
        V, W = W, V
    n = V.length
    vs = set(V.words)
    return not any(w[:n] in vs for w in W.words)


def aperiodicity_gap(V: TargetSet, W: TargetSet, upsilon: float) -> dict:
    n, m = V.length, W.length
    if n < 2 or m < 2:
        raise InputError("aperiodicity gap needs target lengths >= 2")
    if upsilon <= 0:
        raise InputError("upsilon must be positive")
    kappa = return_floors(V, W).kappa
    lo, hi = min(n, m), max(n, m)
    return {
        "kappa": kappa,
        "gap14": lo + kappa - hi,
        "gap15": 2 * lo - hi - 3 * upsilon * math.log(lo),
    }


def thue_morse(n: int, symbols: Sequence[str] = ("0", "1")) -> tuple[str, ...]:
    """First ``n`` terms of the Thue–Morse sequence (parity of the binary digit sum)."""
    return tuple(symbols[bin(i).count("1") & 1] for i in range(n))


def periodic(pattern: Sequence[str], n: int) -> tuple[str, ...]:
    pattern = tuple(pattern)
    if not pattern:
        raise InputError("periodic pattern must be nonempty")
    return tuple(pattern[i % len(pattern)] for i in range(n))
