"""JSON/CSV renderings of computed constants, vector sets and certificates."""

from __future__ import annotations

import io
import json

from . import cube_graph, spectral_bounds as sb
from .numerics import spectral_data


def dumps(doc) -> str:
    return json.dumps(doc, indent=2, sort_keys=True) + "\n"


def constants_document() -> dict:
    sd = spectral_data()
    c3 = sb.c3_bound()
    c12 = sb.c1_c2_bounds()
    alpha, beta = sb.alpha_beta()
    uset = sb.enumerate_U()
    mr, nr = sb.coefficient_ranges()
    doc = {
        "lambda": [lam.to_json() for lam in sd.lambdas],
        "C1": c12.c1.to_json(),
        "C2": c12.c2.to_json(),
        "C3": c3.c3.to_json(),
        "C4": c3.c3.to_json(),
        "maxPair": c3.max_pair.to_json(),
        "maxPairArgs": [list(v) for v in c3.argmax],
        "letterBoundTau3": c3.letter_bound.to_json(),
        "tail": c3.tail.to_json(),
        "letterBoundTau1": c12.letter1[1].to_json(),
        "letterBoundTau2": c12.letter2[1].to_json(),
        "alpha": alpha.to_json(),
        "beta": beta.to_json(),
        "mBound": mr,
        "nBound": nr,
        "muMin": sd.mu_min.to_json(),
        "normBudget": uset.norm_budget.to_json(),
        "enumerationBounds": [b.to_json() for b in uset.bounds],
        "enumerationBudget": uset.effective_budget.to_json(),
        "radiusSquared": uset.radius_sq,
        "tauRows": [[c.to_json() for c in row] for row in sd.tau_rows],
        "latticeTable": [
            {"v": list(r.v), "m": r.m, "n": r.n, "tauAbs": [b.to_json() for b in r.tau_abs]}
            for r in sb.lattice_table()
        ],
        "initialCandidates": sorted(list(v) for v in sb.initial_difference_candidates()),
    }
    return doc


def constants_text() -> str:
    sd = spectral_data()
    c3 = sb.c3_bound()
    c12 = sb.c1_c2_bounds()
    alpha, beta = sb.alpha_beta()
    uset = sb.enumerate_U()
    lines = [f"lambda{j} = {lam}" for j, lam in enumerate(sd.lambdas, 1)]
    lines += [
        f"max pair over D9 = {c3.max_pair}  at {c3.argmax[0]}, {c3.argmax[1]}",
        f"tail = {c3.tail}",
        f"C3 = C4 = {c3.c3}",
        f"alpha = {alpha}",
        f"beta = {beta}",
        f"C1 = {c12.c1}",
        f"C2 = {c12.c2}",
        f"muMin = {sd.mu_min}",
        f"norm budget = {uset.norm_budget}",
        "",
        "v                  m  n  |tau1|    |tau2|    |tau3|",
    ]
    for r in sb.lattice_table():
        mags = "  ".join(f"{b.mid:.5f}" for b in r.tau_abs)
        lines.append(f"{str(r.v):18s} {r.m:2d} {r.n:2d}  {mags}")
    return "\n".join(lines) + "\n"


def vectors_csv(vectors, header: dict | None = None) -> str:
    out = io.StringIO()
    for k, v in (header or {}).items():
        out.write(f"# {k},{v}\n")
    out.write("n0,n1,n3,n4\n")
    out.write(sb.vectors_csv(sorted(vectors)))
    return out.getvalue()


def _ball_header(name, b) -> tuple[str, str]:
    return name, f"{b.mid!r},{b.rad!r}"


def uset_header(uset) -> dict:
    h = dict(_ball_header(f"C{j}", c) for j, c in enumerate(uset.constants, 1))
    h.update(_ball_header(f"bound{j}", b) for j, b in enumerate(uset.bounds, 1))
    h.update([_ball_header("normBudget", uset.norm_budget), ("radiusSquared", uset.radius_sq)])
    h.update(count=len(uset), sha256=uset.digest())
    return h


def uset_document(uset) -> dict:
    return {
        "constants": [c.to_json() for c in uset.constants],
        "bounds": [b.to_json() for b in uset.bounds],
        "normBudget": uset.norm_budget.to_json(),
        "radiusSquared": uset.radius_sq,
        "count": len(uset),
        "sha256": uset.digest(),
        "vectors": [list(v) for v in uset.members],
    }


def certificate(report: cube_graph.ReachabilityReport, d9_count: int) -> dict:
    doc = report.to_json()
    c3 = sb.c3_bound()
    c12 = sb.c1_c2_bounds()
    doc.update(
        d9Count=d9_count,
        startCount=report.start_count,
        initialCandidates=sorted(list(v) for v in sb.initial_difference_candidates()),
        constants={"C1": c12.c1.to_json(), "C2": c12.c2.to_json(), "C3": c3.c3.to_json()},
        proofHolds=not report.target_hits,
    )
    return doc
