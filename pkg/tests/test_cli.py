import json
import subprocess
import sys

import pytest

from localmean.cli import main
from localmean.tree import generate, parse_tree


def run(argv, capsys):
    code = main(argv)
    out, err = capsys.readouterr()
    return code, out, err


@pytest.fixture
def fig10_file(tmp_path):
    p = tmp_path / "f10.txt"
    p.write_text(generate("two-stars", [2, 2]).serialize())
    return str(p)


def test_stats_local_density(fig10_file, capsys):
    code, out, _ = run(["stats", fig10_file, "--subtree", "2,0", "--json"], capsys)
    d = json.loads(out)
    assert code == 0
    assert set(d) == {"tree", "command", "results", "violations"}
    assert d["results"]["density"] == "21/40"
    assert d["results"]["subtree"] == [0, 2]


def test_stats_global_and_text(tmp_path, capsys):
    p = tmp_path / "p2.txt"
    p.write_text("2\n0 1\n")
    code, out, _ = run(["stats", str(p), "--json"], capsys)
    assert code == 0 and json.loads(out)["results"]["mean"] == "4/3"
    code, out, _ = run(["stats", str(p)], capsys)
    assert code == 0 and "4/3" in out


def test_star_centre_count(tmp_path, capsys):
    p = tmp_path / "s.txt"
    p.write_text(generate("star", [5]).serialize())
    code, out, _ = run(["stats", str(p), "--subtree", "0", "--json"], capsys)
    assert json.loads(out)["results"]["N"] == 16


def test_no_floats_in_json(fig10_file, capsys):
    for argv in (["stats", fig10_file], ["density-max", fig10_file], ["extremal", fig10_file, "--k", "2"],
                 ["core", fig10_file]):
        code, out, _ = run(argv + ["--json"], capsys)
        assert code == 0
        json.loads(out, parse_float=lambda s: pytest.fail(f"float {s} in output"))


def test_exit_codes(tmp_path, fig10_file, capsys):
    bad = tmp_path / "bad.txt"
    bad.write_text("4\n0 1\n2 3\n")
    assert run(["stats", str(bad)], capsys)[0] == 2
    # an unreadable path is a bad argument, not a parse failure
    assert run(["stats", str(tmp_path / "missing.txt")], capsys)[0] == 3
    assert run(["stats", fig10_file, "--subtree", "2,3"], capsys)[0] == 3
    assert run(["stats", fig10_file, "--subtree", "2,x"], capsys)[0] == 3
    assert run(["extremal", fig10_file, "--k", "9"], capsys)[0] == 3
    assert run(["verify", "--theorem", "bogus"], capsys)[0] == 3
    assert run(["verify"], capsys)[0] == 3
    assert run(["nonsense"], capsys)[0] == 3
    assert run(["gen", "--family", "nope"], capsys)[0] == 3


def test_extremal_report(fig10_file, capsys):
    code, out, _ = run(["extremal", fig10_file, "--k", "1", "--min", "--json"], capsys)
    d = json.loads(out)
    assert d["results"]["direction"] == "min"
    assert [o["subtree"] for o in d["results"]["optima"]] == [[0], [1]]


def test_core_and_density_max(fig10_file, capsys):
    d = json.loads(run(["core", fig10_file, "--json"], capsys)[1])
    assert d["results"]["core"] == [0, 1]
    d = json.loads(run(["density-max", fig10_file, "--json"], capsys)[1])
    assert d["results"]["value"] == "31/55"
    assert [o["subtree"] for o in d["results"]["optima"]] == [[2], [3], [4], [5]]


def test_reports_are_deterministic(fig10_file, capsys):
    a = run(["extremal", fig10_file, "--k", "2", "--json"], capsys)[1]
    b = run(["extremal", fig10_file, "--k", "2", "--json"], capsys)[1]
    assert a == b
    a = run(["verify", "--theorem", "table1", "--max-n", "5", "--json"], capsys)[1]
    b = run(["verify", "--theorem", "table1", "--max-n", "5", "--json"], capsys)[1]
    assert a == b


def test_verify_density_bound(capsys):
    code, out, _ = run(["verify", "--theorem", "density-bound", "--max-n", "7"], capsys)
    assert code == 0
    assert "density-bound" in out


def test_verify_comma_list_json(capsys):
    code, out, _ = run(["verify", "--theorem", "mainthm,two-star-forms", "--max-n", "5", "--json"], capsys)
    d = json.loads(out)
    assert code == 0 and set(d["results"]) == {"mainthm", "two-star-forms"}
    assert d["violations"] == []
    assert d["command"]["params"]["seed"] == 0


def test_gen_round_trip(tmp_path, capsys):
    out = tmp_path / "t.txt"
    assert run(["gen", "--family", "caterpillar", "--params", "1,0,2", "-o", str(out)], capsys)[0] == 0
    assert parse_tree(out.read_text()) == generate("caterpillar", [1, 0, 2])
    code, text, _ = run(["gen", "--family", "ib-example"], capsys)
    assert parse_tree(text) == generate("ib-example")


def test_console_script_reads_stdin():
    tree = generate("path", [3]).serialize()
    proc = subprocess.run([sys.executable, "-m", "localmean.cli", "stats", "-", "--json"], input=tree,
                          capture_output=True, text=True, check=False)
    assert proc.returncode == 0
    assert json.loads(proc.stdout)["results"]["mean"] == "5/3"
