"""Midpoint-radius ball arithmetic and certified spectral data of the
incidence matrix.

Every ball operation returns an enclosure of all exact results over the input
balls.  Rounding is handled by computing the midpoint in round-to-nearest and
adding one ulp of the result to the radius; radius arithmetic itself is
rounded upward with ``math.nextafter``.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Sequence

import numpy as np

from .core_word import INCIDENCE

INF = math.inf

# X^4 - X^3 - 2X^2 + 2X - 1, highest degree first
CHAR_POLY = (1, -1, -2, 2, -1)


class PrecisionError(ArithmeticError):
    """A comparison or certification could not be decided at double precision."""


class Ordering(enum.Enum):
    LESS = -1
    UNDECIDED = 0
    GREATER = 1


def _up(x: float) -> float:
    return math.nextafter(x, INF)


def _down(x: float) -> float:
    return math.nextafter(x, -INF)


def _err(x: float) -> float:
    # bound for |fl(op) - op| under round-to-nearest, including subnormals
    return math.ulp(x)


class Ball:
    __slots__ = ("mid", "rad")

    def __init__(self, mid: float, rad: float = 0.0):
        if not rad >= 0.0:
            raise ValueError(f"negative or NaN radius {rad!r}")
        if not math.isfinite(mid):
            raise ValueError(f"non-finite midpoint {mid!r}")
        self.mid = float(mid)
        self.rad = float(rad)

    @classmethod
    def exact(cls, q) -> "Ball":
        """Enclose a rational (int, Fraction, decimal string) exactly."""
        if isinstance(q, Ball):
            return q
        if isinstance(q, int) and abs(q) <= 2**53:
            return cls(float(q))
        q = Fraction(q)
        m = float(q)
        r = abs(Fraction(m) - q)
        return cls(m, _up(float(r)) if r else 0.0)

    @property
    def lo(self) -> float:
        return _down(self.mid - self.rad) if self.rad else self.mid

    @property
    def hi(self) -> float:
        return _up(self.mid + self.rad) if self.rad else self.mid

    def contains(self, q) -> bool:
        q = Fraction(q)
        return abs(Fraction(self.mid) - q) <= Fraction(self.rad)

    def contains_zero(self) -> bool:
        return abs(self.mid) <= self.rad

    def __add__(self, other):
        other = _as_ball(other)
        if other is NotImplemented:
            return other
        m = self.mid + other.mid
        return Ball(m, _up(_up(self.rad + other.rad) + _err(m)))

    __radd__ = __add__

    def __neg__(self):
        return Ball(-self.mid, self.rad)

    def __sub__(self, other):
        other = _as_ball(other)
        if other is NotImplemented:
            return other
        m = self.mid - other.mid
        return Ball(m, _up(_up(self.rad + other.rad) + _err(m)))

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        other = _as_ball(other)
        if other is NotImplemented:
            return other
        a, b = self, other
        m = a.mid * b.mid
        r = _up(abs(a.mid) * b.rad)
        r = _up(r + _up(abs(b.mid) * a.rad))
        r = _up(r + _up(a.rad * b.rad))
        return Ball(m, _up(r + _err(m)))

    __rmul__ = __mul__

    def inverse(self) -> "Ball":
        if self.contains_zero():
            raise PrecisionError(f"division by a ball containing zero: {self!r}")
        am = abs(self.mid)
        m = 1.0 / self.mid
        if self.rad:
            gap = _down(am - self.rad)
            r = _up(self.rad / _down(am * gap))
        else:
            r = 0.0
        return Ball(m, _up(r + _err(m)))

    def __truediv__(self, other):
        other = _as_ball(other)
        if other is NotImplemented:
            return other
        return self * other.inverse()

    def __rtruediv__(self, other):
        return _as_ball(other) * self.inverse()

    def __abs__(self):
        if not self.contains_zero():
            return Ball(abs(self.mid), self.rad)
        top = _up(abs(self.mid) + self.rad)
        half = top / 2
        return Ball(half, _up(half + _err(half)))

    def sqr(self) -> "Ball":
        a = abs(self)
        return a * a

    def sqrt(self) -> "Ball":
        if self.hi < 0:
            raise PrecisionError(f"sqrt of a negative ball {self!r}")
        lo = max(self.lo, 0.0)
        s_lo = _down(math.sqrt(lo)) if lo > 0 else 0.0
        s_hi = _up(math.sqrt(self.hi))
        m = s_lo + (s_hi - s_lo) / 2
        return Ball(m, _up(max(_up(s_hi - m), _up(m - s_lo))))

    def compare(self, other) -> Ordering:
        other = _as_ball(other)
        if self.hi < other.lo:
            return Ordering.LESS
        if self.lo > other.hi:
            return Ordering.GREATER
        return Ordering.UNDECIDED

    def __pow__(self, n: int) -> "Ball":
        if not isinstance(n, int) or n < 0:
            return NotImplemented
        out = Ball(1.0)
        base = self
        while n:
            if n & 1:
                out = out * base
            base = base * base
            n >>= 1
        return out

    def __repr__(self):
        return f"Ball({self.mid!r}, {self.rad!r})"

    def __str__(self):
        return f"{self.mid:.12g} ± {self.rad:.2g}"

    def to_json(self) -> dict:
        return {"mid": repr(self.mid), "rad": repr(self.rad)}


def _as_ball(x):
    if isinstance(x, Ball):
        return x
    if isinstance(x, (int, Fraction)):
        return Ball.exact(x)
    if isinstance(x, float):
        return Ball(x)
    return NotImplemented


def compare(a, b) -> Ordering:
    return _as_ball(a).compare(b)


def decide_less(a, b, what: str = "") -> bool:
    """True if a < b, False if a > b; raise on overlap."""
    o = compare(a, b)
    if o is Ordering.UNDECIDED:
        raise PrecisionError(f"undecided comparison {what}: {a!r} vs {b!r}")
    return o is Ordering.LESS


def ball_max(balls: Sequence[Ball]) -> Ball:
    """Enclosure of max(x_i) for x_i in the balls."""
    lo = max(b.lo for b in balls)
    hi = max(b.hi for b in balls)
    m = lo + (hi - lo) / 2
    return Ball(m, _up(max(_up(hi - m), _up(m - lo))))


def ball_floor(x: Ball, what: str = "") -> int:
    """Integer floor of every member of x; raise if x straddles an integer."""
    f = math.floor(x.lo)
    if math.floor(x.hi) != f:
        raise PrecisionError(f"floor undecided {what}: {x!r}")
    return f


class CBall:
    """Complex rectangle ``re + i*im`` with ball components."""

    __slots__ = ("re", "im")

    def __init__(self, re, im=0):
        self.re = _as_ball(re)
        self.im = _as_ball(im)

    def __add__(self, other):
        other = _as_cball(other)
        return CBall(self.re + other.re, self.im + other.im)

    __radd__ = __add__

    def __neg__(self):
        return CBall(-self.re, -self.im)

    def __sub__(self, other):
        other = _as_cball(other)
        return CBall(self.re - other.re, self.im - other.im)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, (int, Fraction, float, Ball)):
            return CBall(self.re * other, self.im * other)
        other = _as_cball(other)
        a, b, c, d = self.re, self.im, other.re, other.im
        return CBall(a * c - b * d, a * d + b * c)

    __rmul__ = __mul__

    def conj(self) -> "CBall":
        return CBall(self.re, -self.im)

    def abs2(self) -> Ball:
        return self.re.sqr() + self.im.sqr()

    def __abs__(self) -> Ball:
        return self.abs2().sqrt()

    def inverse(self) -> "CBall":
        n = self.abs2()
        if n.contains_zero():
            raise PrecisionError(f"division by a complex ball containing zero: {self!r}")
        inv = n.inverse()
        return CBall(self.re * inv, -(self.im * inv))

    def __truediv__(self, other):
        if isinstance(other, (int, Fraction, float, Ball)):
            inv = _as_ball(other).inverse()
            return CBall(self.re * inv, self.im * inv)
        return self * _as_cball(other).inverse()

    def contains(self, z) -> bool:
        z = complex(z) if not isinstance(z, tuple) else z
        if isinstance(z, tuple):
            return self.re.contains(z[0]) and self.im.contains(z[1])
        return self.re.contains(z.real) and self.im.contains(z.imag)

    def subset_interior(self, other: "CBall") -> bool:
        return (
            other.re.lo < self.re.lo and self.re.hi < other.re.hi
            and other.im.lo < self.im.lo and self.im.hi < other.im.hi
        )

    @property
    def rad(self) -> float:
        return max(self.re.rad, self.im.rad)

    @property
    def mid(self) -> complex:
        return complex(self.re.mid, self.im.mid)

    def __repr__(self):
        return f"CBall({self.re!r}, {self.im!r})"

    def __str__(self):
        return f"({self.re}) + ({self.im})i"

    def to_json(self) -> dict:
        return {"re": self.re.to_json(), "im": self.im.to_json()}


def _as_cball(x) -> CBall:
    if isinstance(x, CBall):
        return x
    if isinstance(x, complex):
        return CBall(Ball(x.real), Ball(x.imag))
    return CBall(x, 0)


def cdot(row: Sequence[CBall], x: Sequence[int]) -> CBall:
    acc = CBall(0, 0)
    for r, xi in zip(row, x):
        if xi:
            acc = acc + r * xi
    return acc


# --- characteristic polynomial roots -------------------------------------


def _horner(coeffs, z):
    acc = coeffs[0] + 0 * z
    for c in coeffs[1:]:
        acc = acc * z + c
    return acc


def _deriv(coeffs):
    n = len(coeffs) - 1
    return tuple(c * (n - i) for i, c in enumerate(coeffs[:-1]))


def _newton_polish(z: complex, steps: int = 60) -> complex:
    dp = _deriv(CHAR_POLY)
    for _ in range(steps):
        step = _horner(CHAR_POLY, z) / _horner(dp, z)
        z -= step
        if abs(step) <= 1e-17 * max(1.0, abs(z)):
            break
    return z


def _certify_root(z: complex, real: bool, radius: float = 1e-12) -> CBall:
    """Interval Newton: N(Z) = z - p(z)/p'(Z) inside Z proves a unique root in Z."""
    dp = _deriv(CHAR_POLY)
    if real:
        x = Ball(z.real)
        box = Ball(z.real, radius)
        n = x - _horner(CHAR_POLY, x) / _horner(dp, box)
        if not (box.lo < n.lo and n.hi < box.hi):
            raise PrecisionError(f"interval Newton failed to contract at {z!r}")
        # a unique root of a real polynomial in a real-symmetric box is real
        return CBall(n, Ball(0.0))
    zc = CBall(Ball(z.real), Ball(z.imag))
    box = CBall(Ball(z.real, radius), Ball(z.imag, radius))
    n = zc - _horner(CHAR_POLY, zc) / _horner(dp, box)
    if not n.subset_interior(box):
        raise PrecisionError(f"interval Newton failed to contract at {z!r}")
    return n


@lru_cache(maxsize=None)
def certified_eigenvalues() -> tuple[CBall, CBall, CBall, CBall]:
    """Enclosures of the four eigenvalues of M.

    Order: real > 1, real < -1, upper half plane, its conjugate.
    """
    approx = [_newton_polish(complex(r)) for r in np.roots(CHAR_POLY)]
    reals = sorted((z for z in approx if abs(z.imag) < 1e-9), key=lambda z: -z.real)
    cplx = [z for z in approx if abs(z.imag) >= 1e-9]
    if len(reals) != 2 or len(cplx) != 2:
        raise PrecisionError(f"unexpected root pattern {approx!r}")
    upper = max(cplx, key=lambda z: z.imag)
    l1 = _certify_root(complex(reals[0].real, 0), real=True)
    l2 = _certify_root(complex(reals[1].real, 0), real=True)
    l3 = _certify_root(upper, real=False)
    lams = (l1, l2, l3, l3.conj())
    for lam in lams:
        if lam.rad > 1e-10:
            raise PrecisionError(f"eigenvalue radius too large: {lam!r}")
    if not (decide_less(1, l1.re) and decide_less(l2.re, -1)):
        raise PrecisionError("real eigenvalues not separated from +-1")
    return lams


# --- eigenvectors and tau ------------------------------------------------


def _right_eigvec(lam: CBall) -> list[CBall]:
    # from M x = lam x with x_4 = 1: x = (lam^3 - 2 lam, lam, lam^2 - 1, 1)
    l2 = lam * lam
    return [l2 * lam - lam * 2, lam, l2 - 1, CBall(1, 0)]


def _left_eigvec(lam: CBall) -> list[CBall]:
    # from M^T y = lam y with y_0 = 1: y = (1, lam(lam-1), lam-1, (lam-1)(lam^2-1))
    lm1 = lam - 1
    return [CBall(1, 0), lam * lm1, lm1, lm1 * (lam * lam - 1)]


def _normalize_column(x: list[CBall]) -> list[CBall]:
    """Unit Euclidean norm, phase chosen so the first component is real positive."""
    norm = abs(sum((c.abs2() for c in x[1:]), x[0].abs2()).sqrt())
    x0 = x[0]
    phase = x0.conj() / abs(x0)
    return [c * phase / norm for c in x]


@dataclass(frozen=True)
class SpectralData:
    lambdas: tuple[CBall, CBall, CBall, CBall]
    q_columns: tuple[tuple[CBall, ...], ...]
    tau_rows: tuple[tuple[CBall, ...], ...]
    mu_min: Ball

    def tau(self, j: int, x: Sequence[int]) -> CBall:
        if j not in (1, 2, 3, 4):
            raise ValueError("j must be in 1..4")
        return cdot(self.tau_rows[j - 1], x)

    def tau_abs(self, j: int, x: Sequence[int]) -> Ball:
        return abs(self.tau(j, x))


def _bilinear(a: Sequence[CBall], b: Sequence[CBall]) -> CBall:
    acc = CBall(0, 0)
    for x, y in zip(a, b):
        acc = acc + x * y
    return acc


def _tau_functionals(lams) -> tuple[tuple, tuple]:
    cols, rows = [], []
    for lam in lams:
        q = _normalize_column(_right_eigvec(lam))
        y = _left_eigvec(lam)
        s = _bilinear(y, q)
        cols.append(tuple(q))
        rows.append(tuple(c / s for c in y))
    return tuple(cols), tuple(rows)


def _check_residuals(lams, cols, rows, tol: float = 1e-8) -> None:
    # tau_j(M e_i) - lam_j tau_j(e_i), and Q^{-1} Q - I
    for j, (lam, row) in enumerate(zip(lams, rows)):
        for i in range(4):
            m_col = [INCIDENCE[r][i] for r in range(4)]
            res = cdot(row, m_col) - lam * row[i]
            if not (res.re.contains_zero() and res.im.contains_zero()) or res.rad >= tol:
                raise PrecisionError(f"eigen residual for tau_{j + 1}, e_{i}: {res!r}")
        for k, col in enumerate(cols):
            res = _bilinear(row, col) - (1 if j == k else 0)
            if not (res.re.contains_zero() and res.im.contains_zero()) or res.rad >= tol:
                raise PrecisionError(f"Q^-1 Q residual at ({j}, {k}): {res!r}")


def gram_matrix(rows) -> list[list[CBall]]:
    """tau* tau: entry (i, k) = sum_j conj(tau_j[i]) tau_j[k]."""
    return [
        [sum((r[i].conj() * r[k] for r in rows[1:]), rows[0][i].conj() * rows[0][k]) for k in range(4)]
        for i in range(4)
    ]


def inertia_below(h: list[list[CBall]], shift: float) -> int:
    """Number of eigenvalues of the Hermitian matrix h below ``shift``.

    LDL* of h - shift*I in ball arithmetic; Sylvester's law of inertia gives
    the count from the pivot signs, each of which must be decided.
    """
    n = len(h)
    a = [[h[i][k] - (shift if i == k else 0) for k in range(n)] for i in range(n)]
    d: list[Ball] = []
    lower = [[CBall(0, 0)] * n for _ in range(n)]
    for k in range(n):
        s = a[k][k].re
        for j in range(k):
            s = s - lower[k][j].abs2() * d[j]
        if s.contains_zero():
            raise PrecisionError(f"LDL pivot {k} undecided at shift {shift}: {s!r}")
        d.append(s)
        for i in range(k + 1, n):
            t = a[i][k]
            for j in range(k):
                t = t - lower[i][j] * lower[k][j].conj() * d[j]
            lower[i][k] = t / s
    return sum(1 for p in d if p.mid < 0)


def _certify_mu_min(rows, width: float = 1e-9) -> Ball:
    h = gram_matrix(rows)
    approx = np.array([[complex(c.re.mid, c.im.mid) for c in r] for r in h])
    mu = float(np.linalg.eigvalsh(approx)[0])
    lo, hi = mu - width, mu + width
    if inertia_below(h, lo) != 0 or inertia_below(h, hi) < 1:
        raise PrecisionError(f"could not bracket the least eigenvalue near {mu}")
    if lo <= 0:
        raise PrecisionError("least eigenvalue of tau* tau not certified positive")
    return Ball(mu, _up(width + _err(mu)))


@lru_cache(maxsize=None)
def spectral_data() -> SpectralData:
    lams = certified_eigenvalues()
    cols, rows = _tau_functionals(lams)
    _check_residuals(lams, cols, rows)
    return SpectralData(lams, cols, rows, _certify_mu_min(rows))


def tau_functionals() -> tuple[tuple[CBall, ...], ...]:
    return spectral_data().tau_rows


def tau(j: int, x: Sequence[int]) -> CBall:
    return spectral_data().tau(j, x)


def mu_min_tau() -> Ball:
    return spectral_data().mu_min
