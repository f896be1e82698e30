"""One PASS/FAIL line per acceptance criterion, tolerances pinned."""

import random
import subprocess
import sys
import time
from fractions import Fraction

import pytest

from addcube import core_word as cw
from addcube import cube_graph as cg
from addcube import numerics as nm
from addcube import oracle as oc
from addcube import spectral_bounds as sb
from addcube.numerics import Ball, Ordering

W66 = "031430110343430310110110314303434303434303143011031011011031011011"
ETA_PARENT = [
    (0, 0), (2, 0), (3, 1), (5, 2), (7, 2), (8, 3), (10, 3), (12, 4),
    (14, 5), (16, 5), (17, 6), (19, 6), (20, 7), (22, 7), (23, 8), (25, 8),
]
TABLE = {
    (0, 0, 0, 0): (0, 0, 0),
    (1, -2, 2, -1): (0.63278, 1.51365, 1.5425),
    (-1, 2, -2, 1): (0.63278, 1.51365, 1.5425),
    (1, -1, -1, 1): (0.21770, 0.62031, 2.23992),
    (-1, 1, 1, -1): (0.21770, 0.62031, 2.23992),
    (2, -3, 1, 0): (0.41508, 2.13396, 2.37327),
    (-2, 3, -1, 0): (0.41508, 2.13396, 2.37327),
    (0, 1, -3, 2): (0.85048, 0.89334, 3.02667),
    (0, -1, 3, -2): (0.85048, 0.89334, 3.02667),
}
SEAM_LEFT, SEAM_RIGHT = "03143034343034343", "03143011034343031011011"


@pytest.fixture
def verdict(capsys):
    def emit(n, name, checks):
        bad = [k for k, ok in checks.items() if not ok]
        with capsys.disabled():
            print(f"\n[{'PASS' if not bad else 'FAIL'}] criterion {n}: {name}" + (f"  failed: {bad}" if bad else ""))
        assert not bad, bad
    return emit


def _near(ball, want, tol):
    # midpoint within tol and radius itself below tol
    return abs(ball.mid - want) <= tol and ball.rad < tol


def test_criterion_1_word_generation(verdict):
    best = float("inf")
    for _ in range(5):
        t0 = time.perf_counter()
        fp = cw.FixedPoint()
        prefix = fp.prefix(66)
        pairs = [(fp.eta(p), fp.parent(p)) for p in range(16)]
        best = min(best, time.perf_counter() - t0)
    verdict(1, "word generation", {
        "prefix66": prefix == W66,
        "eta/parent table": pairs == ETA_PARENT,
        "runtime < 1 ms": best < 1e-3,
    })


def test_criterion_2_spectral_constants(verdict):
    sb.clear_caches()
    t0 = time.perf_counter()
    sd = nm.spectral_data()
    c3b = sb.c3_bound()
    alpha, beta = sb.alpha_beta()
    c12 = sb.c1_c2_bounds()
    budget = sb.norm_budget()
    elapsed = time.perf_counter() - t0
    lam1 = sd.lambdas[0]
    verdict(2, "spectral constants", {
        "lambda1": _near(lam1.re, 1.690284494616614, 1e-9) and lam1.im.contains_zero(),
        "C3": _near(c3b.c3, 2.1758, 2e-4),
        "max pair": _near(c3b.max_pair, 1.05517, 1e-4),
        "max pair args": set(c3b.argmax) == {(24, 30, 24, 12), (17, 25, 13, 5)},
        "tail": _near(c3b.tail, 0.032736, 1e-5),
        "alpha": _near(alpha, 1.4914, 1e-3),
        "beta": _near(beta, 2.1657, 1e-3),
        "C1": _near(c12.c1, 1.9032, 1e-3),
        "C2": _near(c12.c2, 2.9818, 1e-3),
        "mu_min": _near(sd.mu_min, 0.55713, 1e-4),
        "norm budget": _near(budget, 39.455, 1e-2),
        "runtime < 1 s": elapsed < 1.0,
    })


def test_criterion_3_set_cardinalities(verdict):
    sb.clear_caches()
    t0 = time.perf_counter()
    d9 = sb.d9()
    u = sb.enumerate_U()
    rows = sb.lattice_table()
    cands = sb.initial_difference_candidates()
    elapsed = time.perf_counter() - t0
    table_ok = len(rows) == 9 and {r.v for r in rows} == set(TABLE) and all(
        abs(b.mid - want) < 1e-4 and b.rad < 1e-4 for r in rows for b, want in zip(r.tau_abs, TABLE[r.v])
    )
    verdict(3, "set cardinalities", {
        "|D9| = 301": len(d9) == 301,
        "|U| = 503": len(u) == 503,
        "table": table_ok,
        "initial candidates": cands == {(0, 0, 0, 0), (1, -2, 2, -1), (-1, 2, -2, 1)},
        "runtime < 5 s": elapsed < 5.0,
    })


def test_criterion_4_main_proof(verdict, uset):
    t0 = time.perf_counter()
    single = cg.bfs_verify(uset, threads=1)
    elapsed = time.perf_counter() - t0
    multi = cg.bfs_verify(uset, threads=4)
    proc = subprocess.run([sys.executable, "-m", "addcube", "prove", "--threads", "2"], capture_output=True, text=True)
    verdict(4, "main proof", {
        "|A| = 9": single.start_count == 9,
        "reachable = 135572": single.reachable_count == 135572,
        "target hits = 0": single.target_hits == [] and multi.target_hits == [],
        "exit code 0": proc.returncode == 0,
        "same hash threads 1/4": single.set_hash == multi.set_hash,
        "runtime < 60 s": elapsed < 60.0,
    })


def test_criterion_5_oracle_cross_check(verdict):
    t0 = time.perf_counter()
    none = oc.find_additive_power(cw.fixed_point_prefix(20000), 3) is None
    rng = random.Random(5)
    agree = 0
    for _ in range(1000):
        w = [rng.choice((0, 1, 3, 4)) for _ in range(rng.randint(0, 200))]
        agree += oc.find_additive_power(w, 3) == oc.naive_additive_power(w, 3)
    elapsed = time.perf_counter() - t0
    verdict(5, "oracle cross-check", {
        "prefix(20000) none": none,
        "1000/1000 agree": agree == 1000,
        "runtime < 30 s": elapsed < 30.0,
    })


def test_criterion_6_search_experiments(verdict):
    # stop early once the reference length is matched; the budget is the cap
    res = oc.dfs_longest(oc.IntAlphabet((0, 1, 2)), 3, max_len=1288, budget=60.0)
    ex = oc.exhaustive_max_length(oc.IntAlphabet((0, 1, 2, 3)), 2)
    note = f"dfs length {len(res.word)} in {res.elapsed:.1f} s; exhaustive maxLen {ex.max_len}"
    verdict(6, f"search experiments ({note})", {
        "dfs length >= 500": len(res.word) >= 500,
        "dfs word validated": oc.find_additive_power(res.word, 3) is None,
        "exhaustive maxLen <= 60": ex.max_len <= 60,
    })


def test_criterion_7_two_sided_word(verdict):
    window, origin = cw.two_sided_window(23)
    # 40 letters: 17 left of the seam, 23 right
    seam40 = window[origin - len(SEAM_LEFT):origin + len(SEAM_RIGHT)]
    shown = cw.format_two_sided(window, origin)
    big, _ = cw.two_sided_window(5000)
    verdict(7, "two-sided word", {
        "40-letter window around seam": len(seam40) == 40 and seam40 == SEAM_LEFT + SEAM_RIGHT,
        "seam aligned in display": f"{SEAM_LEFT}.{SEAM_RIGHT}" in shown,
        "10^4-letter window cube-free": len(big) == 10**4 and oc.find_additive_power(big, 3) is None,
    })


def _containment(rng):
    for _ in range(10**4):
        p = Fraction(rng.randint(-10**6, 10**6), rng.randint(1, 10**4))
        q = Fraction(rng.randint(-10**6, 10**6), rng.randint(1, 10**4))
        a, b = Ball.exact(p), Ball.exact(q)
        if not ((a + b).contains(p + q) and (a - b).contains(p - q) and (a * b).contains(p * q) and abs(a).contains(abs(p))):
            return False
    return True


def test_criterion_8_property_suites(verdict, uset, report):
    rng = random.Random(8)
    neg_closed = all(tuple(-a for a in x) in uset for x in uset)
    fixed_point = set(report.graph.expand(report.keys)) <= report.keys
    w = cw.fixed_point_prefix(20000)
    commute = True
    for _ in range(1000):
        i = rng.randrange(len(w))
        x = w[i:i + rng.randint(0, 300)]
        commute &= cw.parikh(cw.apply_morphism(x)) == cw.mat_vec(cw.INCIDENCE, cw.parikh(x))
    wl = cw.fixed_point_prefix(cw.eta(10**4 + 2))
    recon = True
    for q in range(10**4 + 1):
        p = cw.parent(q)
        a = wl[cw.eta(p):q]
        recon &= (
            a in ("", "0", "4") and cw.MORPHISM[wl[p]].startswith(a) and a != cw.MORPHISM[wl[p]]
            and cw.sigma(q) == cw.vadd(cw.mat_vec(cw.INCIDENCE, cw.sigma(p)), cw.parikh(a))
        )
    verdict(8, "property suites", {
        "ball containment 10^4": _containment(rng),
        "U negation closure": neg_closed,
        "BFS fixed point": fixed_point,
        "phi/M commutation 10^3": commute,
        "prefix reconstruction q <= 10^4": recon,
    })
