import json

import pytest

from addcube import cli, core_word as cw


def run(capsys, *argv):
    code = cli.main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_generate(capsys):
    assert run(capsys, "generate", "15")[:2] == (0, "031430110343430\n")
    assert run(capsys, "generate", "1")[1] == "0\n"


def test_generate_two_sided(capsys):
    code, out, _ = run(capsys, "generate", "--two-sided", "17")
    assert code == 0 and "034343.031430" in out
    left, right = out.strip().split(".")
    assert len(left) == len(right) == 17


def test_generate_out_file(tmp_path, capsys):
    f = tmp_path / "w.txt"
    assert run(capsys, "generate", "100", "--out", str(f))[0] == 0
    assert f.read_text().strip() == cw.fixed_point_prefix(100)


def test_usage_errors(capsys):
    assert run(capsys, "generate", "0")[0] == 3
    assert run(capsys, "frobnicate")[0] == 3
    assert run(capsys, "search", "0,0", "-k", "2")[0] == 3
    assert run(capsys, "check", "/nonexistent/file")[0] == 3


def test_constants_json(capsys):
    code, out, _ = run(capsys, "constants")
    doc = json.loads(out)
    assert code == 0
    assert abs(float(doc["C3"]["mid"]) - 2.1758) < 2e-4
    assert abs(float(doc["alpha"]["mid"]) - 1.4914) < 1e-3
    assert abs(float(doc["muMin"]["mid"]) - 0.55713) < 1e-4
    assert doc["C3"] == doc["C4"]
    assert all(isinstance(doc["C1"][k], str) for k in ("mid", "rad"))


def test_constants_text(capsys):
    code, out, _ = run(capsys, "constants", "--format", "text")
    assert code == 0 and "C3 = C4" in out and "(1, -2, 2, -1)" in out


def test_d9_and_uset(capsys):
    code, out, _ = run(capsys, "d9", "--format", "json")
    assert code == 0 and json.loads(out)["count"] == 301
    code, out, _ = run(capsys, "uset")
    lines = out.splitlines()
    assert code == 0 and "# count,503" in lines
    body = [ln for ln in lines if not ln.startswith("#")]
    assert body[0] == "n0,n1,n3,n4" and len(body) == 504
    code, out, _ = run(capsys, "uset", "--exact", "--format", "json")
    assert json.loads(out)["count"] == 497


def test_check(tmp_path, capsys):
    f = tmp_path / "w.txt"
    f.write_text(cw.fixed_point_prefix(20000))
    assert run(capsys, "check", str(f))[1] == "none\n"
    f.write_text("0314333")
    assert run(capsys, "check", str(f))[1] == "start=4 blockLen=1 k=3\n"
    assert run(capsys, "check", str(f), "-k", "2")[1].startswith("start=")


def test_check_stdin(monkeypatch, capsys):
    import io
    monkeypatch.setattr("sys.stdin", io.StringIO("1,2,0,3\n"))
    assert run(capsys, "check", "-", "-k", "2")[1] == "start=0 blockLen=2 k=2\n"


def test_search(capsys):
    code, out, _ = run(capsys, "search", "0,1,2", "-k", "3", "--max-len", "200", "--budget", "20")
    assert code == 0
    assert "length 200" in out and "validated yes" in out and "stopped maxLen reached" in out


def test_search_exhaustive(capsys):
    code, out, _ = run(capsys, "search", "{0,1}", "-k", "2", "--exhaustive")
    assert code == 0 and "maxLen 3" in out and "witnessCount 2" in out


def test_prove(capsys):
    code, out, _ = run(capsys, "prove", "--threads", "2")
    cert = json.loads(out)
    assert code == 0
    assert cert["d9Count"] == 301 and cert["uCount"] == 503 and cert["startCount"] == 9
    assert cert["reachableCount"] == 135572 and cert["targetHits"] == [] and cert["proofHolds"]
    assert len(cert["uSetHash"]) == 64


def test_prove_reproducible(capsys):
    def strip(doc):
        doc = json.loads(doc)
        doc.pop("wallTime")
        return doc
    assert strip(run(capsys, "prove")[1]) == strip(run(capsys, "prove")[1])


def test_crosscheck(capsys):
    code, out, _ = run(capsys, "crosscheck", "300")
    doc = json.loads(out)
    assert code == 0 and doc["agrees"] and doc["cube"] is None


def test_crosscheck_usage(capsys):
    assert run(capsys, "crosscheck", "2")[0] == 3


def test_precision_failure_exit(monkeypatch, capsys):
    from addcube.numerics import PrecisionError

    def boom(args):
        raise PrecisionError("forced")
    monkeypatch.setitem(cli.COMMANDS, "constants", boom)
    assert run(capsys, "constants")[0] == 2


def test_mismatch_exit(monkeypatch, capsys):
    monkeypatch.setitem(cli.EXPECTED, "reachableCount", 1)
    assert run(capsys, "prove")[0] == 1
