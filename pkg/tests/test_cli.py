import json
import subprocess
import sys

import pytest

from reconkit.cli import SCHEMA, dispatch, main


def run(*argv):
    report, code = dispatch(list(argv))
    assert report["schema"] == SCHEMA
    return report, code


def test_group_info_and_subgroups():
    r, code = run("group", "info", "sym:4")
    assert code == 0 and r["result"]["order"] == 24
    r, code = run("group", "subgroups", "sym:3")
    assert code == 0 and sorted(s["order"] for s in r["result"]["subgroups"]) == [1, 2, 2, 2, 3, 6]


def test_group_iso():
    r, code = run("group", "iso", "S3", "D3")
    assert code == 0 and r["result"]["isomorphic"] and len(r["result"]["map"]) == 6
    r, _ = run("group", "iso", "Z4", "V4")
    assert r["result"]["isomorphic"] is False


def test_struct_commands():
    r, code = run("struct", "aut", "rook3")
    assert code == 0 and r["result"]["order"] == 72
    r, _ = run("struct", "homogeneous", "path:3")
    assert r["result"]["homogeneous"] is False
    r, _ = run("struct", "closure", "c5", "--set", "0,1")
    assert r["result"]["closure"] == [0, 1, 2, 3, 4]


def test_struct_from_file(tmp_path):
    f = tmp_path / "p3.txt"
    f.write_text("graph 3\n0 1\n1 2\n")
    r, code = run("struct", "aut", str(f))
    assert code == 0 and r["result"]["order"] == 2


def test_class_commands():
    r, code = run("class", "check", "kn_free:3", "--bound", "3")
    assert code == 0 and r["status"] == "exact-pass"
    r, code = run("class", "symmetry", "colored_graph:3")
    assert code == 0 and r["result"]["order"] == 6
    r, code = run("class", "build", "graphs", "--k", "2", "--seed", "1")
    assert code == 0 and r["result"]["complete"]


def test_exaut_verify_statuses():
    r, code = run("exaut", "verify", "--playground", "pureset:5", "--bound", "2", "--conj", "(0 1 2)")
    assert code == 0
    names = {c["check"]: c["status"] for c in r["checks"]}
    assert names["injectivity"] == "exact-pass"
    assert names["order_converse"].startswith("empirical")
    r, code = run("exaut", "verify", "--playground", "pureset:4", "--bound", "2")
    assert code == 1 and r["status"] == "exact-fail"


def test_frucht_and_outpipe():
    r, code = run("frucht", "--group", "Z3")
    assert code == 0 and r["result"]["vertices"] == 18
    r, code = run("outpipe", "--group", "V4")
    assert code == 0


def test_reconstruct_modes(tmp_path):
    r, code = run("reconstruct", "demo", "--m", "pureset:5", "--seed", "3")
    assert code == 0 and r["result"]["sigma_in_coset"]
    r, code = run("reconstruct", "s6")
    assert code == 0 and r["result"]["outcome"] == "NoMinimalStabilizerMatch"
    iso = tmp_path / "iso.txt"
    # conjugation by (0 1 2 3 4) on the automorphism group of C5
    iso.write_text("degree 5\n(0 1 2 3 4) -> (0 1 2 3 4)\n(1 4)(2 3) -> (0 2)(3 4)\n")
    r, code = run("reconstruct", "--m", "c5", "--n", "c5", "--iso", str(iso))
    assert code == 0 and r["result"]["f"] is not None


def test_errors_become_reports():
    r, code = run("struct", "aut", "no-such-playground")
    assert code == 1 and r["status"] == "error" and "error" in r
    r, code = run("reconstruct")
    assert code == 1 and r["status"] == "error"


def test_explain_and_json_output(capsys):
    assert main(["frucht", "--group", "Z2", "--json", "--explain"]) == 0
    out = json.loads(capsys.readouterr().out)
    assert out["schema"] == SCHEMA and out["explain"]
    assert main(["frucht", "--group", "Z2"]) == 0
    assert capsys.readouterr().out.startswith("frucht: exact-pass")


def test_console_entry_point():
    proc = subprocess.run([sys.executable, "-m", "reconkit.cli", "group", "info", "cyclic:5", "--json"], capture_output=True, text=True)
    assert proc.returncode == 0
    assert json.loads(proc.stdout)["result"]["order"] == 5


def test_unknown_command_exits():
    with pytest.raises(SystemExit):
        dispatch(["nonsense"])
