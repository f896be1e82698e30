"""Brute-force additive-power detection and backtracking searches.

These routines know nothing about the morphism; they work on words over any
finite alphabet of non-negative integers.
"""

from __future__ import annotations

import time
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np


@dataclass(frozen=True)
class IntAlphabet:
    letters: tuple[int, ...]

    def __post_init__(self):
        if not self.letters:
            raise ValueError("alphabet must be non-empty")
        if any(a < 0 for a in self.letters):
            raise ValueError("letters must be non-negative integers")
        if len(set(self.letters)) != len(self.letters):
            raise ValueError("letters must be distinct")
        object.__setattr__(self, "letters", tuple(sorted(self.letters)))

    @classmethod
    def parse(cls, text: str) -> "IntAlphabet":
        """Parse ``"0,1,2"``, ``"{0,1,2}"`` or ``"012"``."""
        s = text.strip().strip("{}[]() ")
        if not s:
            raise ValueError("empty alphabet")
        parts = s.split(",") if "," in s else list(s)
        return cls(tuple(int(p) for p in parts))

    def __iter__(self):
        return iter(self.letters)


@dataclass(frozen=True)
class PowerWitness:
    start: int
    block_len: int
    k: int

    def blocks(self, word: Sequence[int]) -> list[Sequence[int]]:
        s, n = self.start, self.block_len
        return [word[s + i * n: s + (i + 1) * n] for i in range(self.k)]


def parse_word(text: str) -> list[int]:
    """Digit string (one letter per character) or comma-separated integers."""
    s = "".join(text.split())
    if not s:
        return []
    if "," in s:
        return [int(p) for p in s.split(",") if p != ""]
    if not s.isdigit():
        raise ValueError(f"not a digit string: {s[:20]!r}")
    return [int(ch) for ch in s]


def format_word(word: Iterable[int]) -> str:
    word = list(word)
    if all(0 <= a <= 9 for a in word):
        return "".join(map(str, word))
    return ",".join(map(str, word))


def _as_ints(x) -> list[int]:
    return parse_word(x) if isinstance(x, str) else list(x)


def find_additive_power(x, k: int) -> PowerWitness | None:
    """Least (start, block_len) additive k-th power in x, or None.

    Prefix sums make each comparison O(1); every block length is scanned as a
    vectorized pass over all start positions.
    """
    if k < 2:
        raise ValueError("k must be >= 2")
    w = _as_ints(x)
    n = len(w)
    prefix = np.zeros(n + 1, dtype=np.int64)
    np.cumsum(np.asarray(w, dtype=np.int64), out=prefix[1:])
    best: PowerWitness | None = None
    for length in range(1, n // k + 1):
        starts = n - k * length + 1
        if best is not None and best.start == 0:
            break
        sums = prefix[length:] - prefix[:-length]
        ok = np.ones(starts, dtype=bool)
        s0 = sums[:starts]
        for j in range(1, k):
            ok &= sums[j * length: j * length + starts] == s0
        hit = np.flatnonzero(ok)
        if hit.size and (best is None or hit[0] < best.start):
            best = PowerWitness(int(hit[0]), length, k)
    return best


def naive_additive_power(x, k: int) -> PowerWitness | None:
    """Reference scan recomputing every block sum from scratch."""
    w = _as_ints(x)
    n = len(w)
    for start in range(n):
        for length in range(1, (n - start) // k + 1):
            sums = {sum(w[start + i * length: start + (i + 1) * length]) for i in range(k)}
            if len(sums) == 1:
                return PowerWitness(start, length, k)
    return None


def naive_abelian_power(x, k: int) -> PowerWitness | None:
    w = _as_ints(x)
    n = len(w)
    for start in range(n):
        for length in range(1, (n - start) // k + 1):
            blocks = {tuple(sorted(w[start + i * length: start + (i + 1) * length])) for i in range(k)}
            if len(blocks) == 1:
                return PowerWitness(start, length, k)
    return None


def _suffix_free(prefix: list[int], k: int) -> bool:
    """No additive k-th power ends at the last position."""
    n = len(prefix) - 1
    top = prefix[n]
    for length in range(1, n // k + 1):
        s = top - prefix[n - length]
        j = 2
        while j <= k and prefix[n - (j - 1) * length] - prefix[n - j * length] == s:
            j += 1
        if j > k:
            return False
    return True


@dataclass
class SearchResult:
    word: list[int]
    nodes: int
    exhausted: bool
    elapsed: float

    def __len__(self):
        return len(self.word)


def dfs_longest(
    alphabet: IntAlphabet | Sequence[int],
    k: int,
    max_len: int = 10**6,
    budget: float = 60.0,
    seed: Sequence[int] = (),
) -> SearchResult:
    """Backtracking search for a long additive-k-power-free word.

    Letters are tried in ascending order; only powers ending at the new
    position are checked.  ``seed`` is a fixed prefix the search extends and
    never backtracks into.  Stops at ``max_len``, on exhaustion, or when the
    wall-clock ``budget`` (seconds) runs out; returns the longest word seen.
    """
    if k < 2:
        raise ValueError("k must be >= 2")
    if budget <= 0:
        raise ValueError("budget must be positive")
    letters = tuple(alphabet.letters if isinstance(alphabet, IntAlphabet) else sorted(alphabet))
    t0 = time.perf_counter()
    deadline = t0 + budget
    word: list[int] = []
    prefix = [0]
    for a in seed:
        word.append(a)
        prefix.append(prefix[-1] + a)
        if not _suffix_free(prefix, k):
            raise ValueError(f"seed contains an additive {k}-th power ending at {len(word) - 1}")
    floor = len(word)
    best = list(word)
    choice: list[int] = []
    nodes = 0
    i = 0
    exhausted = False
    while len(word) < max_len:
        if (nodes & 1023) == 0 and time.perf_counter() > deadline:
            break
        if i < len(letters):
            a = letters[i]
            word.append(a)
            prefix.append(prefix[-1] + a)
            nodes += 1
            if _suffix_free(prefix, k):
                if len(word) > len(best):
                    best = list(word)
                choice.append(i)
                i = 0
                continue
            word.pop()
            prefix.pop()
            i += 1
        else:
            if len(word) == floor:
                exhausted = True
                break
            word.pop()
            prefix.pop()
            i = choice.pop() + 1
    return SearchResult(best, nodes, exhausted, time.perf_counter() - t0)


class DepthCeilingExceeded(RuntimeError):
    pass


@dataclass
class ExhaustiveResult:
    max_len: int
    witness_count: int
    witness: list[int]
    nodes: int


def exhaustive_max_length(alphabet: IntAlphabet | Sequence[int], k: int, ceiling: int = 10_000) -> ExhaustiveResult:
    """Exact maximum length of an additive-k-power-free word and how many attain it.

    Walks the whole search tree; raises DepthCeilingExceeded if a word longer
    than ``ceiling`` is found (the tree may be infinite).
    """
    if k < 2:
        raise ValueError("k must be >= 2")
    letters = tuple(alphabet.letters if isinstance(alphabet, IntAlphabet) else sorted(alphabet))
    word: list[int] = []
    prefix = [0]
    choice: list[int] = []
    best_len, count, witness, nodes = 0, 0, [], 0
    i = 0
    while True:
        if i < len(letters):
            a = letters[i]
            word.append(a)
            prefix.append(prefix[-1] + a)
            nodes += 1
            if _suffix_free(prefix, k):
                n = len(word)
                if n > ceiling:
                    raise DepthCeilingExceeded(f"word of length {n} exceeds ceiling {ceiling}")
                if n > best_len:
                    best_len, count, witness = n, 1, list(word)
                elif n == best_len:
                    count += 1
                choice.append(i)
                i = 0
                continue
            word.pop()
            prefix.pop()
            i += 1
        else:
            if not word:
                break
            word.pop()
            prefix.pop()
            i = choice.pop() + 1
    return ExhaustiveResult(best_len, count, witness, nodes)
