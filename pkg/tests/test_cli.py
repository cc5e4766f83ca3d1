import json
import subprocess
import sys

import pytest

from polysum.harness.cli import main
from polysum.harness.fixtures import fix1, fix1_summands, fix3
from polysum.harness.io import instance_to_json, save_json, system_to_json


@pytest.fixture
def fix1_file(tmp_path):
    path = tmp_path / "FIX-1.json"
    save_json(instance_to_json(fix1()), path)
    return path


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    return code, capsys.readouterr()


def test_verify_fix1_all_checks(capsys, fix1_file):
    code, out = run(capsys, "verify", fix1_file, "--checks", "all")
    assert code == 0 and "FAIL" not in out.out


def test_verify_report_is_json_lines(capsys, fix1_file, tmp_path):
    report = tmp_path / "r.jsonl"
    code, _ = run(capsys, "verify", fix1_file, "--checks", "band_criterion,walk_validity",
                  "--report", report)
    lines = [json.loads(line) for line in report.read_text().splitlines()]
    assert code == 0 and [r["check"] for r in lines] == ["band_criterion", "walk_validity"]


def test_theorem_walk_replays_through_verify(capsys, tmp_path):
    inst = tmp_path / "t.json"
    walk = tmp_path / "w.json"
    assert run(capsys, "gen", "--kind", "two_sum", "--seed", 7, "-o", inst)[0] == 0
    assert run(capsys, "walk", inst, "--from", 0, "--to", 3, "--method", "theorem", "-o", walk)[0] == 0
    code, out = run(capsys, "verify", inst, "--walk", walk)
    assert code == 0 and "PASS walk_validity" in out.out


def test_gen_is_byte_identical(capsys, tmp_path):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    run(capsys, "gen", "--kind", "two_sum", "--seed", 7, "-o", a)
    run(capsys, "gen", "--kind", "two_sum", "--seed", 7, "-o", b)
    assert a.read_bytes() == b.read_bytes()


def test_vertices_and_diameter(capsys, fix1_file):
    code, out = run(capsys, "--json", "vertices", fix1_file)
    doc = json.loads(out.out)
    assert code == 0 and doc["vertices"] == [["0", "1", "1", "1"], ["1", "0", "0", "2"]]
    assert doc["edges"] == [[0, 1]]
    code, out = run(capsys, "diameter", fix1_file, "--json")
    assert json.loads(out.out) == {"diameter": 1}


def test_quiet_suppresses_output(capsys, fix1_file):
    code, out = run(capsys, "--quiet", "diameter", fix1_file)
    assert code == 0 and out.out == ""


def test_band(capsys, fix1_file):
    code, out = run(capsys, "--json", "band", fix1_file, "--vertex", 0)
    doc = json.loads(out.out)
    assert code == 0 and (doc["lo"], doc["hi"]) == ("-1", "1")


def test_twosum_and_decompose(capsys, tmp_path):
    P, Q = fix1_summands()
    pf, qf, out_f = tmp_path / "P.json", tmp_path / "Q.json", tmp_path / "S.json"
    save_json(system_to_json(P), pf)
    save_json(system_to_json(Q), qf)
    assert run(capsys, "twosum", pf, qf, "-o", out_f)[0] == 0
    assert json.loads(out_f.read_text())["a_row"] == ["1", "0"]
    assert run(capsys, "decompose", out_f, "-o", tmp_path / "parts")[0] == 0
    assert json.loads((tmp_path / "parts.P.json").read_text()) == system_to_json(P)


def test_threesum(capsys, tmp_path):
    P, Q = fix3().sources
    pf, qf, out_f = tmp_path / "P.json", tmp_path / "Q.json", tmp_path / "S.json"
    save_json(system_to_json(P), pf)
    save_json(system_to_json(Q), qf)
    assert run(capsys, "threesum", pf, qf, "-o", out_f)[0] == 0
    assert json.loads(out_f.read_text())["kind"] == "three_sum"


def test_walk_oracle_method(capsys, fix1_file):
    code, out = run(capsys, "walk", fix1_file, "--from", 0, "--to", 1, "--method", "oracle")
    assert code == 0 and "length 1" in out.out


def test_small_campaign(capsys, tmp_path):
    report = tmp_path / "c.jsonl"
    code, _ = run(capsys, "campaign", "--seed", 1, "--two-sum", 1, "--unit-column", 1,
                  "--three-sum", 1, "--product", 1, "--report", report, "--csv", tmp_path / "c.csv")
    assert code == 0 and report.read_text()


def test_malformed_file_exits_2_with_location(capsys, tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text('{"A": [["1/0"]], "b": ["1"]}')
    code, out = run(capsys, "vertices", bad)
    assert code == 2 and "bad.json" in out.err and "A[0]" in out.err
    bad.write_text("{not json")
    code, out = run(capsys, "diameter", bad)
    assert code == 2 and "bad.json:1:" in out.err


def test_bad_vertex_index_exits_2(capsys, fix1_file):
    code, out = run(capsys, "walk", fix1_file, "--from", 0, "--to", 9)
    assert code == 2 and "out of range" in out.err


def test_usage_error_exits_2():
    with pytest.raises(SystemExit) as exc:
        main(["walk"])
    assert exc.value.code == 2


def test_module_entry_point(fix1_file):
    res = subprocess.run([sys.executable, "-m", "polysum", "diameter", str(fix1_file)],
                         capture_output=True, text=True)
    assert res.returncode == 0 and res.stdout.strip() == "1"
