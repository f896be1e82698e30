"""Command-line entry point.

Exit codes: 0 success / proof holds, 1 pipeline mismatch, 2 precision
failure, 3 usage error.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

from . import core_word as cw
from . import cube_graph, export, oracle
from . import spectral_bounds as sb
from .numerics import PrecisionError

log = logging.getLogger("addcube")

EXIT_OK, EXIT_MISMATCH, EXIT_PRECISION, EXIT_USAGE = 0, 1, 2, 3

# reference cardinalities the prove pipeline must reproduce
EXPECTED = {"d9Count": 301, "uCount": 503, "startCount": 9, "reachableCount": 135572}


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _positive(kind):
    def conv(s):
        v = kind(s)
        if v <= 0:
            raise argparse.ArgumentTypeError(f"must be > 0: {s}")
        return v
    return conv


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="addcube", description=__doc__.splitlines()[0])
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(sp, formats=("json", "text")):
        sp.add_argument("--format", choices=formats, default=formats[0])
        sp.add_argument("--out", type=Path, help="write output here instead of stdout")

    g = sub.add_parser("generate", help="print a prefix of w or a two-sided window")
    g.add_argument("n", type=_positive(int))
    g.add_argument("--two-sided", action="store_true", help="print 2n letters around the seam, marked with '.'")
    g.add_argument("--out", type=Path)

    common(sub.add_parser("constants", help="certified constants as JSON"))
    common(sub.add_parser("d9", help="the walk-vector set D_9"), ("csv", "json", "text"))
    u = sub.add_parser("uset", help="the bounded difference set U")
    common(u, ("csv", "json", "text"))
    u.add_argument("--exact", action="store_true", help="use exact constants instead of the two-decimal bounds")

    pr = sub.add_parser("prove", help="run the full pipeline and emit a certificate")
    common(pr)
    pr.add_argument("--threads", type=_positive(int), default=1)
    pr.add_argument("--require-sum", action="store_true", help="also require u+v in U for vertices of H")

    c = sub.add_parser("check", help="first additive k-th power in a word file, or 'none'")
    c.add_argument("file", help="word file, '-' for stdin")
    c.add_argument("-k", type=int, default=3)

    s = sub.add_parser("search", help="backtracking search for additive-power-free words")
    s.add_argument("alphabet", help="e.g. 0,1,2")
    s.add_argument("-k", type=int, default=3)
    s.add_argument("--budget", type=_positive(float), default=60.0, help="seconds")
    s.add_argument("--max-len", type=_positive(int), default=10**6)
    s.add_argument("--exhaustive", action="store_true", help="walk the whole tree and report the exact maximum")
    s.add_argument("--out", type=Path)

    x = sub.add_parser("crosscheck", help="compare the reachable set with a prefix of w")
    x.add_argument("n", type=int, nargs="?", default=2000)
    x.add_argument("--threads", type=_positive(int), default=1)
    return p


def _emit(text: str, out: Path | None) -> None:
    if out is None:
        sys.stdout.write(text)
    else:
        out.write_text(text)


def cmd_generate(args) -> int:
    if args.two_sided:
        window, origin = cw.two_sided_window(args.n)
        text = cw.format_two_sided(window, origin)
    else:
        text = cw.fixed_point_prefix(args.n)
    _emit(text + "\n", args.out)
    return EXIT_OK


def cmd_constants(args) -> int:
    text = export.dumps(export.constants_document()) if args.format == "json" else export.constants_text()
    _emit(text, args.out)
    return EXIT_OK


def cmd_d9(args) -> int:
    vecs = sorted(sb.d9())
    if args.format == "json":
        text = export.dumps({"ell": 9, "count": len(vecs), "vectors": [list(v) for v in vecs]})
    elif args.format == "csv":
        text = export.vectors_csv(vecs, {"ell": 9, "count": len(vecs)})
    else:
        text = "".join(f"{v}\n" for v in vecs) + f"{len(vecs)} vectors\n"
    _emit(text, args.out)
    return EXIT_OK


def cmd_uset(args) -> int:
    uset = sb.enumerate_U(rounded=not args.exact)
    if args.format == "json":
        text = export.dumps(export.uset_document(uset))
    elif args.format == "csv":
        text = export.vectors_csv(uset.members, export.uset_header(uset))
    else:
        text = "".join(f"{v}\n" for v in uset.members) + f"{len(uset)} vectors\n"
    _emit(text, args.out)
    return EXIT_OK


def cmd_prove(args) -> int:
    d9_count = len(sb.d9())
    uset = sb.enumerate_U()
    report = cube_graph.bfs_verify(uset, require_sum=args.require_sum, threads=args.threads)
    cert = export.certificate(report, d9_count)
    if args.format == "json":
        text = export.dumps(cert)
    else:
        text = "".join(f"{k}: {cert[k]}\n" for k in ("d9Count", "uCount", "startCount", "reachableCount", "targetHits", "setHash", "proofHolds"))
    _emit(text, args.out)
    if report.target_hits:
        log.error("target vertices reached: %s", report.target_hits[:5])
        return EXIT_MISMATCH
    expected = dict(EXPECTED)
    if args.require_sum:
        expected.pop("reachableCount")
    for key, want in expected.items():
        if cert[key] != want:
            log.error("pipeline mismatch: %s = %s, expected %s", key, cert[key], want)
            return EXIT_MISMATCH
    return EXIT_OK


def _read_word(path: str) -> list[int]:
    text = sys.stdin.read() if path == "-" else Path(path).read_text()
    try:
        return oracle.parse_word(text)
    except ValueError as e:
        raise UsageError(str(e)) from e


def cmd_check(args) -> int:
    if args.k < 2:
        raise UsageError("k must be >= 2")
    wit = oracle.find_additive_power(_read_word(args.file), args.k)
    print("none" if wit is None else f"start={wit.start} blockLen={wit.block_len} k={wit.k}")
    return EXIT_OK


def cmd_search(args) -> int:
    if args.k < 2:
        raise UsageError("k must be >= 2")
    try:
        alphabet = oracle.IntAlphabet.parse(args.alphabet)
    except ValueError as e:
        raise UsageError(f"bad alphabet {args.alphabet!r}: {e}") from e
    if args.exhaustive:
        res = oracle.exhaustive_max_length(alphabet, args.k)
        word = res.witness
        lines = [f"maxLen {res.max_len}", f"witnessCount {res.witness_count}", f"nodes {res.nodes}"]
    else:
        res = oracle.dfs_longest(alphabet, args.k, args.max_len, args.budget)
        word = res.word
        status = "exhausted" if res.exhausted else ("maxLen reached" if len(word) >= args.max_len else "budget exhausted")
        lines = [f"length {len(word)}", f"nodes {res.nodes}", f"stopped {status}"]
    valid = oracle.find_additive_power(word, args.k) is None
    lines.append(f"validated {'yes' if valid else 'NO'}")
    lines.append(f"word {oracle.format_word(word)}")
    _emit("\n".join(lines) + "\n", args.out)
    return EXIT_OK if valid else EXIT_MISMATCH


def cmd_crosscheck(args) -> int:
    if args.n < 4:
        raise UsageError("n must be >= 4")
    report = cube_graph.bfs_verify(threads=args.threads)
    res = cube_graph.cross_check_prefix(args.n, report, detail=True)
    print(json.dumps({
        "n": args.n, "agrees": res.agrees, "cube": res.cube, "triples": res.triples,
        "walksInH": res.in_h_paths, "missingFromR": [list(q) for q in res.missing_from_r[:10]],
    }, sort_keys=True))
    return EXIT_OK if res.agrees else EXIT_MISMATCH


COMMANDS = {
    "generate": cmd_generate, "constants": cmd_constants, "d9": cmd_d9, "uset": cmd_uset,
    "prove": cmd_prove, "check": cmd_check, "search": cmd_search, "crosscheck": cmd_crosscheck,
}


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
    except SystemExit as e:
        # --help exits 0, parse errors exit EXIT_USAGE
        return e.code if isinstance(e.code, int) else EXIT_USAGE
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    try:
        return COMMANDS[args.command](args)
    except PrecisionError as e:
        log.error("precision failure: %s", e)
        return EXIT_PRECISION
    except (UsageError, FileNotFoundError) as e:
        log.error("%s", e)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
