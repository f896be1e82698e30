"""Eigencoordinate bounds on block-difference vectors and the finite set U.

Pipeline: walk vectors D_9 of the prefix graph -> bound C3 on the complex
eigencoordinates -> lattice of equal-length/equal-sum differences ->
constants alpha, beta and the initial difference candidates -> bounds C1, C2
-> norm budget -> enumeration of U.
"""

from __future__ import annotations

import hashlib
import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Iterable

import numpy as np

from .core_word import ALPHABET, INCIDENCE, MORPHISM, ZERO, Vec4, mat_vec, parikh, vadd, vsub
from .numerics import Ball, Ordering, PrecisionError, ball_floor, decide_less, spectral_data

BASIS_M: Vec4 = (1, -2, 2, -1)
BASIS_N: Vec4 = (1, -1, -1, 1)
LENGTH_FORM: Vec4 = (1, 1, 1, 1)
SUM_FORM: Vec4 = (0, 1, 3, 4)

# proper prefixes of letter images
PROPER_PREFIXES = ("", "0", "4")

# bounds used for membership in U: the exact constants rounded up to two
# decimals (sound, since they dominate the constants decisively)
PUBLISHED_BOUNDS = ("1.91", "2.99", "2.18", "2.18")


def q_edges() -> list[tuple[str, str, str]]:
    """Edges (c, d, label) with label + d a prefix of phi(c)."""
    return [(c, img[k], img[:k]) for c in ALPHABET for img in [MORPHISM[c]] for k in range(len(img))]


def _dot(a, b) -> int:
    return sum(x * y for x, y in zip(a, b))


@dataclass(frozen=True)
class WalkVectorSet:
    ell: int
    vectors: frozenset


def _walks(ell: int) -> Iterable[tuple[str, ...]]:
    """All label sequences of directed walks of length ell in Q."""
    out = {c: [(d, lab) for (cc, d, lab) in q_edges() if cc == c] for c in ALPHABET}

    def rec(c, k):
        if k == 0:
            yield ()
            return
        for d, lab in out[c]:
            for rest in rec(d, k - 1):
                yield (lab,) + rest

    for c in ALPHABET:
        yield from rec(c, ell)


def enumerate_walk_vectors(ell: int) -> WalkVectorSet:
    """D_ell by listing every walk; edge i of the walk (1-based) gets M^(ell-i)."""
    if ell < 0:
        raise ValueError("ell must be >= 0")
    vecs = set()
    for labels in _walks(ell):
        acc = ZERO
        # Horner: acc <- M acc + psi(a_i), in walk order
        for lab in labels:
            acc = vadd(mat_vec(INCIDENCE, acc), parikh(lab))
        vecs.add(acc)
    return WalkVectorSet(ell, frozenset(vecs))


def walk_vectors_dp(ell: int) -> frozenset:
    """D_ell via per-end-vertex sets of partial sums."""
    cur = {c: {ZERO} for c in ALPHABET}
    for _ in range(ell):
        nxt = {c: set() for c in ALPHABET}
        for c, d, lab in q_edges():
            p = parikh(lab)
            for v in cur[c]:
                nxt[d].add(vadd(mat_vec(INCIDENCE, v), p))
        cur = nxt
    return frozenset().union(*cur.values())


def _decisive_argmax(items: list, what: str):
    """(key, ball) with the decisively largest ball among (key, ball) pairs."""
    best_k, best_b = items[0]
    for k, b in items[1:]:
        if decide_less(best_b, b, what):
            best_k, best_b = k, b
    # the winner must beat every other candidate decisively
    for k, b in items:
        if k != best_k:
            decide_less(b, best_b, what)
    return best_k, best_b


def _sign_canonical(v: Vec4) -> Vec4:
    neg = tuple(-a for a in v)
    return max(v, neg)  # type: ignore[return-value]


@dataclass(frozen=True)
class C3Bound:
    max_pair: Ball
    argmax: tuple[Vec4, Vec4]
    letter_bound: Ball
    letter_argmax: Vec4
    tail: Ball
    c3: Ball


def letter_differences() -> list[Vec4]:
    ds = {vsub(parikh(s), parikh(t)) for s in PROPER_PREFIXES for t in PROPER_PREFIXES}
    return sorted(ds)


def max_letter_difference(j: int) -> tuple[Vec4, Ball]:
    """Max over s, t in {eps, 0, 4} of |tau_j(psi(s) - psi(t))|, attained up to sign."""
    sd = spectral_data()
    cands = {}
    for d in letter_differences():
        if d != ZERO:
            cands[_sign_canonical(d)] = sd.tau_abs(j, d)
    return _decisive_argmax(sorted(cands.items()), f"letter bound tau_{j}")


@lru_cache(maxsize=None)
def d9() -> frozenset:
    return enumerate_walk_vectors(9).vectors


# pairs whose float |tau3(u - v)| is this far below the float maximum are
# discarded without a ball evaluation; the margin dwarfs every float error
_PAIR_MARGIN = 1e-6


@lru_cache(maxsize=None)
def c3_bound() -> C3Bound:
    sd = spectral_data()
    vs = sorted(d9())
    # tau3 is linear: tau3(u - v) = tau3(u) - tau3(v)
    balls = [sd.tau(3, v) for v in vs]
    rad = max(b.rad for b in balls)
    z = np.array([b.mid for b in balls])
    mags = np.abs(z[:, None] - z[None, :])
    top = float(mags.max())
    # |float |z_u - z_v| - |tau3(u - v)|| <= 2*sqrt(2)*rad + a few ulps of top
    err = 4 * rad + 8 * math.ulp(top)
    if err >= _PAIR_MARGIN / 4:
        raise PrecisionError(f"tau3 enclosures too wide for the pair prefilter: {rad}")
    near = np.argwhere(mags >= top - _PAIR_MARGIN)
    diffs: dict[Vec4, tuple[Vec4, Vec4]] = {}
    for i, k in near.tolist():
        u, v = vs[i], vs[k]
        d = _sign_canonical(vsub(u, v))
        diffs.setdefault(d, (u, v) if d == vsub(u, v) else (v, u))
    # compare squared moduli; one square root for the winner
    items = sorted((d, sd.tau(3, d).abs2()) for d in diffs)
    dmax, _ = _decisive_argmax(items, "max pair over D9")
    pair_ball = sd.tau_abs(3, dmax)
    # every discarded pair lies below the winner
    decide_less(Ball(top - _PAIR_MARGIN + err), pair_ball, "pair prefilter margin")
    ld, lb = max_letter_difference(3)
    lam3 = abs(sd.lambdas[2])
    tail = lb * lam3 ** 9 / (1 - lam3)
    c3 = (pair_ball + tail) * 2
    return C3Bound(pair_ball, diffs[dmax], lb, ld, tail, c3)


def lattice_contains(v) -> bool:
    return _dot(LENGTH_FORM, v) == 0 and _dot(SUM_FORM, v) == 0


def lattice_point(m: int, n: int) -> Vec4:
    return tuple(m * a + n * b for a, b in zip(BASIS_M, BASIS_N))  # type: ignore[return-value]


@lru_cache(maxsize=None)
def alpha_beta() -> tuple[Ball, Ball]:
    sd = spectral_data()
    tm, tn = sd.tau(3, BASIS_M), sd.tau(3, BASIS_N)
    alpha = abs(tn) * abs((tm / tn).im)
    beta = abs(tm) * abs((tn / tm).im)
    return alpha, beta


def coefficient_ranges() -> tuple[int, int]:
    """Decisive integer bounds on |m| and |n| for lattice vectors with |tau3| <= C3."""
    c3 = c3_bound().c3
    alpha, beta = alpha_beta()
    return ball_floor(c3 / alpha, "C3/alpha"), ball_floor(c3 / beta, "C3/beta")


@dataclass(frozen=True)
class TableRow:
    v: Vec4
    m: int
    n: int
    tau_abs: tuple[Ball, Ball, Ball]


@lru_cache(maxsize=None)
def lattice_table() -> tuple[TableRow, ...]:
    """Short lattice vectors with |m|, |n| in range, ordered by |tau3|."""
    sd = spectral_data()
    mr, nr = coefficient_ranges()
    rows = []
    for m in range(-mr, mr + 1):
        for n in range(-nr, nr + 1):
            v = lattice_point(m, n)
            rows.append(TableRow(v, m, n, tuple(sd.tau_abs(j, v) for j in (1, 2, 3))))
    rows.sort(key=lambda r: (round(r.tau_abs[2].mid, 9), -r.v[0], r.v))
    return tuple(rows)


@lru_cache(maxsize=None)
def initial_difference_candidates() -> frozenset:
    c3 = c3_bound().c3
    return frozenset(r.v for r in lattice_table() if decide_less(r.tau_abs[2], c3, f"|tau3{r.v}| vs C3"))


@dataclass(frozen=True)
class C12Bounds:
    c1: Ball
    c2: Ball
    letter1: tuple[Vec4, Ball]
    letter2: tuple[Vec4, Ball]


@lru_cache(maxsize=None)
def c1_c2_bounds() -> C12Bounds:
    sd = spectral_data()
    d1, b1 = max_letter_difference(1)
    d2, b2 = max_letter_difference(2)
    if _sign_canonical(d1) != (0, 0, 0, 1) or _sign_canonical(d2) != (1, 0, 0, -1):
        raise PrecisionError(f"unexpected letter-bound maximisers {d1}, {d2}")
    c1 = b1 * 2 / (abs(sd.lambdas[0].re) - 1)
    c2 = b2 * 2 / (abs(sd.lambdas[1].re) - 1)
    # induction base: every initial candidate satisfies both bounds
    for v in initial_difference_candidates():
        if v == ZERO:
            continue
        if not (decide_less(sd.tau_abs(1, v), c1, "base tau1") and decide_less(sd.tau_abs(2, v), c2, "base tau2")):
            raise PrecisionError(f"induction base fails for {v}")
    return C12Bounds(c1, c2, (d1, b1), (d2, b2))


def constants() -> tuple[Ball, Ball, Ball, Ball]:
    b = c1_c2_bounds()
    c3 = c3_bound().c3
    return b.c1, b.c2, c3, c3


# left eigenvector y(lam) of M as integer polynomials in lam (low degree first);
# tau_j is y(lam_j) up to a nonzero scalar shared by all arguments
_LEFT_EIGVEC = ((1,), (0, -1, 1), (-1, 1), (1, -1, -1, 1))
# monic X^4 - X^3 - 2X^2 + 2X - 1, irreducible over Q
_CHAR_LOW = (-1, 2, -2, -1, 1)


def _pmul(a, b):
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        for k, y in enumerate(b):
            out[i + k] += x * y
    return out


def _psub(a, b):
    n = max(len(a), len(b))
    return [(a[i] if i < len(a) else 0) - (b[i] if i < len(b) else 0) for i in range(n)]


def _pmod(a):
    a = list(a)
    d = len(_CHAR_LOW) - 1
    for top in range(len(a) - 1, d - 1, -1):
        c = a[top]
        if c:
            for i, pc in enumerate(_CHAR_LOW):
                a[top - d + i] -= c * pc
    return a[:d]


def _lin(x):
    acc = [0]
    for xi, y in zip(x, _LEFT_EIGVEC):
        acc = _psub(acc, _pmul([-xi], y))
    return acc


def on_real_bound_exactly(j: int, x) -> bool:
    """Exact test |tau_j(x)| == C_j for the real eigencoordinates j = 1, 2.

    C_1 = 2|tau_1(e_4)|/(lam_1 - 1) and C_2 = 2|tau_2(1,0,0,-1)|/(-lam_2 - 1),
    so equality holds iff (A*(lam -+ 1))^2 - (2B)^2 vanishes at lam_j, i.e. is
    divisible by the (irreducible) characteristic polynomial.
    """
    if j == 1:
        b, f = (0, 0, 0, 1), (-1, 1)
    elif j == 2:
        b, f = (1, 0, 0, -1), (1, 1)
    else:
        raise ValueError("exact tie test only for j = 1, 2")
    lhs = _pmul(_lin(x), f)
    rhs = _pmul([2], _lin(b))
    return not any(_pmod(_psub(_pmul(lhs, lhs), _pmul(rhs, rhs))))


class UndecidedMembership(PrecisionError):
    def __init__(self, vector, j):
        super().__init__(f"membership of {vector} undecided at tau_{j}")
        self.vector = vector
        self.j = j


@dataclass(frozen=True)
class BoundSet:
    constants: tuple[Ball, Ball, Ball, Ball]
    bounds: tuple[Ball, Ball, Ball, Ball]
    norm_budget: Ball
    effective_budget: Ball
    radius_sq: int
    members: tuple[Vec4, ...]
    index: dict = field(compare=False, repr=False, hash=False)

    def __contains__(self, x) -> bool:
        return tuple(x) in self.index

    def __len__(self) -> int:
        return len(self.members)

    def __iter__(self):
        return iter(self.members)

    def digest(self) -> str:
        return hashlib.sha256(vectors_csv(self.members).encode()).hexdigest()


def vectors_csv(vectors) -> str:
    return "".join(",".join(map(str, v)) + "\n" for v in vectors)


def _budget(bounds: Iterable[Ball], mu: Ball) -> Ball:
    s = Ball(0.0)
    for c in bounds:
        s = s + c.sqr()
    return s / mu


def norm_budget() -> Ball:
    """(C1^2 + C2^2 + C3^2 + C4^2) / mu_min, a bound on |x|^2 for x in U."""
    return _budget(constants(), spectral_data().mu_min)


def enumerate_U(rounded: bool = True) -> BoundSet:
    """All integer x with |tau_j(x)| <= bound_j for j = 1..4.

    With ``rounded`` (default) the bounds are the constants rounded up to two
    decimals, certified to dominate the exact constants; otherwise the exact
    constant balls are used and exact ties on the real bounds are resolved
    algebraically.
    """
    return _enumerate_U(rounded)


@lru_cache(maxsize=None)
def _enumerate_U(rounded: bool) -> BoundSet:
    sd = spectral_data()
    consts = constants()
    if rounded:
        bounds = tuple(Ball.exact(Fraction(s)) for s in PUBLISHED_BOUNDS)
        for c, b in zip(consts, bounds):
            if not decide_less(c, b, "constant vs rounded bound"):
                raise PrecisionError(f"rounded bound {b} does not dominate {c}")
    else:
        bounds = consts
    mu = sd.mu_min
    budget = norm_budget()
    eff = _budget(bounds, mu)
    r2 = ball_floor(eff, "norm budget")
    k = 0
    while (k + 1) ** 2 <= r2:
        k += 1
    members = []
    for x in itertools.product(range(-k, k + 1), repeat=4):
        if sum(a * a for a in x) > r2:
            continue
        ok = True
        for j in (1, 2, 3, 4):
            t = sd.tau_abs(j, x)
            o = t.compare(bounds[j - 1])
            if o is Ordering.UNDECIDED:
                if not rounded and j in (1, 2) and on_real_bound_exactly(j, x):
                    continue
                raise UndecidedMembership(x, j)
            if o is Ordering.GREATER:
                ok = False
                break
        if ok:
            members.append(x)
    members.sort()
    return BoundSet(consts, bounds, budget, eff, r2, tuple(members), {v: i for i, v in enumerate(members)})


def clear_caches() -> None:
    """Drop every memoised result, including the spectral data."""
    from . import numerics

    for f in (d9, c3_bound, alpha_beta, lattice_table, initial_difference_candidates, c1_c2_bounds, _enumerate_U):
        f.cache_clear()
    numerics.spectral_data.cache_clear()
    numerics.certified_eigenvalues.cache_clear()
