"""The morphism engine.

Words over the alphabet {0, 1, 3, 4} are plain ``str`` objects made of the
digit characters.  Parikh vectors are ``(n0, n1, n3, n4)`` integer tuples.
Positions are 0-indexed.
"""

from __future__ import annotations

import bisect
from typing import Tuple

ALPHABET = "0134"
LETTER_INDEX = {a: i for i, a in enumerate(ALPHABET)}
LETTER_VALUE = {a: int(a) for a in ALPHABET}

MORPHISM = {"0": "03", "1": "43", "3": "1", "4": "01"}

Vec4 = Tuple[int, int, int, int]

ZERO: Vec4 = (0, 0, 0, 0)


def _incidence_matrix() -> tuple[Vec4, ...]:
    cols = [parikh(MORPHISM[a]) for a in ALPHABET]
    return tuple(tuple(cols[j][i] for j in range(4)) for i in range(4))  # type: ignore[return-value]


def validate_word(x: str) -> None:
    bad = set(x) - set(ALPHABET)
    if bad:
        raise ValueError(f"letters outside {{0,1,3,4}}: {sorted(bad)}")


def apply_morphism(x: str) -> str:
    validate_word(x)
    return "".join(MORPHISM[a] for a in x)


def parikh(x: str) -> Vec4:
    return (x.count("0"), x.count("1"), x.count("3"), x.count("4"))


def word_sum(x: str) -> int:
    return sum(LETTER_VALUE[a] for a in x)


def mat_vec(m, x) -> Vec4:
    return tuple(sum(r * c for r, c in zip(row, x)) for row in m)  # type: ignore[return-value]


def vadd(x, y) -> Vec4:
    return tuple(a + b for a, b in zip(x, y))  # type: ignore[return-value]


def vsub(x, y) -> Vec4:
    return tuple(a - b for a, b in zip(x, y))  # type: ignore[return-value]


def vscale(k: int, x) -> Vec4:
    return tuple(k * a for a in x)  # type: ignore[return-value]


INCIDENCE = _incidence_matrix()


class FixedPoint:
    """Restartable stream over the fixed point w of the morphism.

    The buffer is grown by block substitution: a read cursor walks the
    already-emitted letters and appends the image of each consumed letter.
    ``eta`` and the prefix Parikh counts are cached alongside.
    """

    def __init__(self):
        self._buf = ["0", "3"]
        # eta[p] = |phi(w[0, p))| for p <= cursor
        self._eta = [0, 2]
        self._counts = [ZERO]

    def _grow_letters(self, n: int) -> None:
        buf, eta = self._buf, self._eta
        while len(buf) < n:
            p = len(eta) - 1
            img = MORPHISM[buf[p]]
            buf.extend(img)
            eta.append(eta[-1] + len(img))

    def _grow_eta(self, p: int) -> None:
        # need eta[p+1] cached; the cursor may not pass the buffer end
        while len(self._eta) <= p + 1:
            self._grow_letters(len(self._buf) + 1)

    def prefix(self, n: int) -> str:
        if n < 0:
            raise ValueError("n must be >= 0")
        self._grow_letters(n)
        return "".join(self._buf[:n])

    def letter(self, p: int) -> str:
        self._grow_letters(p + 1)
        return self._buf[p]

    def eta(self, p: int) -> int:
        if p < 0:
            raise ValueError("position must be >= 0")
        self._grow_eta(p)
        return self._eta[p]

    def parent(self, p: int) -> int:
        if p < 0:
            raise ValueError("position must be >= 0")
        # eta[t] > p for t = p + 1 whenever p > 0; p = 0 is the root loop
        self._grow_eta(p + 1)
        return bisect.bisect_right(self._eta, p) - 1

    def sigma(self, p: int) -> Vec4:
        if p < 0:
            raise ValueError("position must be >= 0")
        counts = self._counts
        if len(counts) <= p:
            self._grow_letters(p)
            c = list(counts[-1])
            buf = self._buf
            for i in range(len(counts) - 1, p):
                c[LETTER_INDEX[buf[i]]] += 1
                counts.append(tuple(c))  # type: ignore[arg-type]
        return counts[p]


_W = FixedPoint()


def fixed_point_prefix(n: int) -> str:
    return _W.prefix(n)


def letter_at(p: int) -> str:
    return _W.letter(p)


def eta(p: int) -> int:
    return _W.eta(p)


def parent(p: int) -> int:
    return _W.parent(p)


def sigma(p: int) -> Vec4:
    return _W.sigma(p)


def _h_power_len_at_least(seed: str, n: int) -> str:
    x = seed
    while len(x) < n:
        x = apply_morphism(apply_morphism(x))
    return x


def two_sided_window(n: int) -> tuple[str, int]:
    """Return ``(window, origin)`` of the two-sided word ``...h(4)43.031...``.

    With ``h = phi^2`` the left half is the left-infinite limit of h^k(3)
    (``h(3) = 43`` ends in 3) and the right half is h^omega(0) = w.  The window
    holds the last n left letters followed by the first n right letters, so
    ``origin == n`` is the index of the first right-side letter.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    left = _h_power_len_at_least("3", n)[-n:]
    return left + fixed_point_prefix(n), n


def format_two_sided(window: str, origin: int) -> str:
    return window[:origin] + "." + window[origin:]
