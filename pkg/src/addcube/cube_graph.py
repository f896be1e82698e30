"""Template graph over triple blocks and the reachability proof.

A template vertex ``(c, u, v)`` holds the four delimiting letters of a
triple block b1 b2 b3 together with ``u = psi(b2) - psi(b1)`` and
``v = psi(b3) - psi(b2)``.  Edges follow the 4-fold product of the prefix
graph Q with the consistency equations

    u' = M u + psi(a3) - 2 psi(a2) + psi(a1)
    v' = M v + psi(a4) - 2 psi(a3) + psi(a2).

The search universe H keeps vertices with u, v in U (and, with
``require_sum``, also u + v in U).  Targets are vertices with u, v in the
lattice of equal-length/equal-sum differences.
"""

from __future__ import annotations

import hashlib
import itertools
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

from . import core_word as cw
from .core_word import INCIDENCE, Vec4, mat_vec, parikh, vadd, vscale, vsub
from .spectral_bounds import LENGTH_FORM, SUM_FORM, BoundSet, enumerate_U, lattice_contains, q_edges

LETTERS = (0, 1, 3, 4)
_LETTER_CODE = {a: i for i, a in enumerate(LETTERS)}

# delimiting positions of the nine nonempty triple blocks with an empty parent
X_POSITIONS = (
    (0, 0, 0, 1), (0, 0, 1, 1), (0, 1, 1, 1),
    (3, 3, 3, 4), (3, 3, 4, 4), (3, 4, 4, 4),
    (5, 5, 5, 6), (5, 5, 6, 6), (5, 6, 6, 6),
)


class TemplateVertex(NamedTuple):
    c: tuple[int, int, int, int]
    u: Vec4
    v: Vec4

    def text(self) -> str:
        return "".join(map(str, self.c)) + "|" + ",".join(map(str, self.u)) + "|" + ",".join(map(str, self.v))


Q_EDGES: tuple[tuple[int, int, str], ...] = tuple((int(c), int(d), lab) for c, d, lab in q_edges())
Q_OUT = {a: tuple((d, lab) for c, d, lab in Q_EDGES if c == a) for a in LETTERS}


class MemoryBudgetExceeded(RuntimeError):
    def __init__(self, visited: int, frontier: int):
        super().__init__(f"visited set reached {visited} vertices (frontier {frontier})")
        self.visited = visited
        self.frontier = frontier


def second_difference(s1, s2, s3) -> Vec4:
    return vadd(vsub(s3, vscale(2, s2)), s1)


def template(q) -> TemplateVertex:
    """g(q) for positions q1 <= q2 <= q3 <= q4, via prefix Parikh vectors."""
    s = [cw.sigma(p) for p in q]
    c = tuple(int(cw.letter_at(p)) for p in q)
    return TemplateVertex(c, second_difference(s[0], s[1], s[2]), second_difference(s[1], s[2], s[3]))  # type: ignore[arg-type]


def in_H(t: TemplateVertex, uset: BoundSet, require_sum: bool = False) -> bool:
    if t.u not in uset or t.v not in uset:
        return False
    return not require_sum or vadd(t.u, t.v) in uset


def start_set_A(uset: BoundSet | None = None, require_sum: bool = False) -> list[TemplateVertex]:
    uset = uset if uset is not None else enumerate_U()
    a = []
    for p in X_POSITIONS:
        t = template(p)
        if not in_H(t, uset, require_sum):
            raise AssertionError(f"start vertex g{p} = {t} is outside H")
        a.append(t)
    if len(set(a)) != len(a):
        raise AssertionError("start set has repeated templates")
    return a


def candidate_successors(t: TemplateVertex) -> list[tuple[tuple[str, ...], TemplateVertex]]:
    """All (labels, vertex) successors in the unrestricted template graph."""
    mu, mv = mat_vec(INCIDENCE, t.u), mat_vec(INCIDENCE, t.v)
    out = []
    for edges in itertools.product(*(Q_OUT[ci] for ci in t.c)):
        c2 = tuple(d for d, _ in edges)
        labels = tuple(lab for _, lab in edges)
        a1, a2, a3, a4 = (parikh(lab) for lab in labels)
        u2 = vadd(mu, second_difference(a1, a2, a3))
        v2 = vadd(mv, second_difference(a2, a3, a4))
        out.append((labels, TemplateVertex(c2, u2, v2)))  # type: ignore[arg-type]
    return out


def successors(t: TemplateVertex, uset: BoundSet | None = None, require_sum: bool = False) -> list[TemplateVertex]:
    uset = uset if uset is not None else enumerate_U()
    return [s for _, s in candidate_successors(t) if in_H(s, uset, require_sum)]


def is_target(t: TemplateVertex) -> bool:
    return lattice_contains(t.u) and lattice_contains(t.v)


class TemplateGraph:
    """Table-driven induced subgraph on H.

    A vertex is packed into an int: 2 bits per letter of c (8 bits), then the
    indices of u and v in the sorted U table (9 bits each for |U| <= 512).
    """

    def __init__(self, uset: BoundSet, require_sum: bool = False):
        self.uset = uset
        self.require_sum = require_sum
        members = uset.members
        self.ubits = max(1, (len(members) - 1).bit_length())
        index = uset.index
        # distinct second differences of edge labels
        lab_vecs = {lab: parikh(lab) for _, _, lab in Q_EDGES}
        deltas: dict[Vec4, int] = {}
        for a1, a2, a3 in itertools.product(lab_vecs.values(), repeat=3):
            deltas.setdefault(second_difference(a1, a2, a3), len(deltas))
        self._nxt = []
        for x in members:
            mx = mat_vec(INCIDENCE, x)
            row = [-1] * len(deltas)
            for d, k in deltas.items():
                row[k] = index.get(vadd(mx, d), -1)
            self._nxt.append(row)
        self._sum_ok = None
        if require_sum:
            n = len(members)
            ok = bytearray(n * n)
            for i, x in enumerate(members):
                for k, y in enumerate(members):
                    if vadd(x, y) in index:
                        ok[i * n + k] = 1
            self._sum_ok = ok
        # per packed c: list of (packed c', du, dv)
        self._trans = {}
        for c in itertools.product(LETTERS, repeat=4):
            moves = []
            for edges in itertools.product(*(Q_OUT[ci] for ci in c)):
                a1, a2, a3, a4 = (lab_vecs[lab] for _, lab in edges)
                c2 = tuple(d for d, _ in edges)
                moves.append((self._pack_c(c2), deltas[second_difference(a1, a2, a3)], deltas[second_difference(a2, a3, a4)]))
            self._trans[self._pack_c(c)] = tuple(moves)

    @staticmethod
    def _pack_c(c) -> int:
        k = 0
        for a in c:
            k = (k << 2) | _LETTER_CODE[a]
        return k

    def encode(self, t: TemplateVertex) -> int:
        idx = self.uset.index
        b = self.ubits
        return (((self._pack_c(t.c) << b) | idx[t.u]) << b) | idx[t.v]

    def decode(self, key: int) -> TemplateVertex:
        b = self.ubits
        mask = (1 << b) - 1
        vi, ui, ck = key & mask, (key >> b) & mask, key >> (2 * b)
        c = tuple(LETTERS[(ck >> s) & 3] for s in (6, 4, 2, 0))
        m = self.uset.members
        return TemplateVertex(c, m[ui], m[vi])  # type: ignore[arg-type]

    def expand(self, keys, reverse: bool = False) -> list[int]:
        b = self.ubits
        mask = (1 << b) - 1
        nxt, trans, sum_ok = self._nxt, self._trans, self._sum_ok
        n = len(self.uset.members)
        out = []
        for key in keys:
            vi, ui, ck = key & mask, (key >> b) & mask, key >> (2 * b)
            nu_row, nv_row = nxt[ui], nxt[vi]
            moves = trans[ck]
            if reverse:
                moves = moves[::-1]
            for c2, du, dv in moves:
                nu = nu_row[du]
                if nu < 0:
                    continue
                nv = nv_row[dv]
                if nv < 0:
                    continue
                if sum_ok is not None and not sum_ok[nu * n + nv]:
                    continue
                out.append((((c2 << b) | nu) << b) | nv)
        return out


def canonical_hash(vertices) -> str:
    h = hashlib.sha256()
    for t in sorted(vertices):
        h.update(t.text().encode())
        h.update(b"\n")
    return h.hexdigest()


@dataclass
class ReachabilityReport:
    start_vertices: list[TemplateVertex]
    reachable_count: int
    target_hits: list[TemplateVertex]
    levels: list[int]
    set_hash: str
    u_set_hash: str
    u_count: int
    require_sum: bool
    threads: int
    wall_time: float
    keys: frozenset = field(repr=False, default=frozenset())
    graph: TemplateGraph | None = field(repr=False, default=None)

    @property
    def start_count(self) -> int:
        return len(self.start_vertices)

    def vertices(self) -> list[TemplateVertex]:
        return [self.graph.decode(k) for k in self.keys]

    def to_json(self) -> dict:
        return {
            "uSetHash": self.u_set_hash,
            "uCount": self.u_count,
            "requireSum": self.require_sum,
            "startVertices": [t.text() for t in self.start_vertices],
            "reachableCount": self.reachable_count,
            "levels": self.levels,
            "targetHits": [t.text() for t in self.target_hits],
            "setHash": self.set_hash,
            "wallTime": round(self.wall_time, 3),
        }


def bfs_verify(
    uset: BoundSet | None = None,
    require_sum: bool = False,
    threads: int = 1,
    reverse: bool = False,
    max_vertices: int | None = None,
    chunk: int = 4096,
) -> ReachabilityReport:
    """Level-synchronous BFS from the start set within H.

    With ``threads > 1`` each level's frontier is expanded in chunks on a
    thread pool; insertion into the visited set stays on the calling thread,
    so the reachable set does not depend on the schedule.
    """
    t0 = time.perf_counter()
    uset = uset if uset is not None else enumerate_U()
    graph = TemplateGraph(uset, require_sum)
    start = start_set_A(uset, require_sum)
    frontier = sorted({graph.encode(t) for t in start}, reverse=reverse)
    visited = set(frontier)
    levels = [len(frontier)]
    pool = ThreadPoolExecutor(threads) if threads > 1 else None
    try:
        while frontier:
            if pool is None:
                batches = [graph.expand(frontier, reverse)]
            else:
                parts = [frontier[i:i + chunk] for i in range(0, len(frontier), chunk)]
                batches = list(pool.map(lambda p: graph.expand(p, reverse), parts))
            new = []
            for batch in batches:
                for k in batch:
                    if k not in visited:
                        visited.add(k)
                        new.append(k)
            if max_vertices is not None and len(visited) > max_vertices:
                raise MemoryBudgetExceeded(len(visited), len(new))
            if new:
                levels.append(len(new))
            frontier = new
    finally:
        if pool is not None:
            pool.shutdown()
    verts = [graph.decode(k) for k in visited]
    hits = sorted(t for t in verts if is_target(t))
    return ReachabilityReport(
        start_vertices=start,
        reachable_count=len(visited),
        target_hits=hits,
        levels=levels,
        set_hash=canonical_hash(verts),
        u_set_hash=uset.digest(),
        u_count=len(uset),
        require_sum=require_sum,
        threads=threads,
        wall_time=time.perf_counter() - t0,
        keys=frozenset(visited),
        graph=graph,
    )


def _parents(q) -> tuple[int, ...]:
    return tuple(cw.parent(p) for p in q)


def ancestral_templates(q) -> list[TemplateVertex]:
    """Templates from the empty-parent ancestor of q (in X) down to g(q)."""
    path = [tuple(q)]
    while True:
        par = _parents(path[-1])
        if len(set(par)) == 1:
            break
        path.append(par)
    return [template(p) for p in reversed(path)]


@dataclass
class CrossCheckResult:
    agrees: bool
    cube: tuple[int, int] | None
    triples: int
    in_h_paths: int
    missing_from_r: list = field(default_factory=list)


def cross_check_prefix(n: int, report: ReachabilityReport | None = None, detail: bool = False):
    """Compare the template proof with direct inspection of w[0, n).

    Every equal-length triple block of the prefix is examined.  A block whose
    whole ancestral template walk lies in H must end at a reachable vertex;
    a block whose template is a target is an additive cube.  Returns True iff
    there is no additive cube and no reachable-set inconsistency.
    """
    if n < 4:
        raise ValueError("n must be >= 4")
    from .oracle import find_additive_power

    if report is None:
        report = bfs_verify()
    graph = report.graph
    uset, rs = graph.uset, graph.require_sum
    keys = report.keys
    memo: dict[tuple, bool] = {}

    def walk_in_h(q) -> bool:
        # True iff g of q and of every ancestor down to X lies in H
        got = memo.get(q)
        if got is not None:
            return got
        t = template(q)
        ok = in_H(t, uset, rs)
        if ok:
            par = _parents(q)
            if len(set(par)) != 1:
                ok = walk_in_h(par)
        memo[q] = ok
        return ok

    # prefix Parikh vectors and U membership as numpy lookups
    word = cw.fixed_point_prefix(n)
    sig = np.zeros((n + 1, 4), dtype=np.int64)
    np.cumsum(np.eye(4, dtype=np.int64)[[cw.LETTER_INDEX[ch] for ch in word]], axis=0, out=sig[1:])
    lo = min(min(x) for x in uset.members)
    span = max(max(x) for x in uset.members) - lo + 1
    weights = span ** np.arange(3, -1, -1)
    ukeys = np.array(sorted(int(np.dot(np.asarray(x) - lo, weights)) for x in uset.members))

    def in_u(d):
        ok = ((d >= lo) & (d < lo + span)).all(axis=1)
        k = (d - lo) @ weights
        return ok & np.isin(k, ukeys)

    length_form = np.array(LENGTH_FORM)
    sum_form = np.array(SUM_FORM)
    cube = None
    triples = paths = 0
    missing = []
    for length in range(1, n // 3 + 1):
        m = n - 3 * length + 1
        s0, s1, s2, s3 = (sig[j * length: j * length + m] for j in range(4))
        u = s2 - 2 * s1 + s0
        v = s3 - 2 * s2 + s1
        triples += m
        tgt = ((u @ length_form == 0) & (u @ sum_form == 0) & (v @ length_form == 0) & (v @ sum_form == 0))
        hit = np.flatnonzero(tgt)
        if hit.size and cube is None:
            cube = (int(hit[0]), length)
        cand = in_u(u) & in_u(v)
        if rs:
            cand &= in_u(u + v)
        for i in np.flatnonzero(cand).tolist():
            q = (i, i + length, i + 2 * length, i + 3 * length)
            if walk_in_h(q):
                paths += 1
                if graph.encode(template(q)) not in keys:
                    missing.append(q)
    oracle_none = find_additive_power(cw.fixed_point_prefix(n), 3) is None
    agrees = cube is None and oracle_none and not missing
    res = CrossCheckResult(agrees, cube, triples, paths, missing)
    return res if detail else agrees
