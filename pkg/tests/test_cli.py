import json
import subprocess
import sys

import pytest

from zsf.cli import main


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_verify_thm41(capsys):
    code, out, _ = run(capsys, "verify", "--group", "dihedral:3", "--statement", "thm4.1", "--format", "json")
    assert code == 0
    report = json.loads(out)
    assert report["equal"] is True and report["missing"] == [] and report["extra"] == []


def test_davenport_q8(capsys):
    code, out, _ = run(capsys, "davenport", "--group", "dicyclic:2", "--large")
    assert code == 0 and out.strip() == "6"


def test_small_davenport(capsys):
    code, out, _ = run(capsys, "davenport", "--group", "dihedral:3", "--small")
    assert code == 0 and out.strip() == "3"


def test_pi(capsys):
    code, out, _ = run(capsys, "pi", "--group", "dihedral:3", "--seq", "t (a t)")
    assert code == 0 and out.strip() == "{a, a^2}"


def test_subsequence_products(capsys):
    code, out, _ = run(capsys, "pi", "-g", "dihedral:3", "-s", "t (a t)", "--subsequences", "--format", "json")
    assert set(json.loads(out)["elements"]) == {"t", "a t", "a", "a^2"}


def test_classify_and_atom(capsys):
    code, out, _ = run(capsys, "classify", "-g", "cyclic:5", "-s", "1^[4]", "--format", "json")
    data = json.loads(out)
    assert data["product_one_free"] and data["smooth"]["m"] == 4
    code, out, _ = run(capsys, "atom", "-g", "dihedral:3", "-s", "t^[4]", "--format", "json")
    assert json.loads(out)["split"] == ["t^[2]", "t^[2]"]


def test_lengths_and_unions(capsys):
    code, out, _ = run(capsys, "lengths", "-g", "cyclic:3", "-s", "1^[3] 2^[3]")
    assert out.strip() == "{2, 3}"
    code, out, _ = run(capsys, "unions", "-g", "cyclic:3", "--k", "2", "--max-len", "6", "--format", "json")
    assert json.loads(out)["lengths"] == [2, 3]


def test_rho_csv(capsys):
    code, out, _ = run(capsys, "rho", "-g", "dihedral:3", "--k-max", "3", "--format", "csv")
    lines = out.strip().splitlines()
    assert lines[0] == "k,lambda_lower,lambda_exact,rho_lower,rho_exact,rho_upper,witness"
    assert lines[3].startswith("3,2,2,9,9,9,")


def test_lambda_text(capsys):
    code, out, _ = run(capsys, "lambda", "-g", "dihedral:3", "--k", "10")
    assert code == 0 and out.startswith("k=10: lambda=4")


def test_census_outputs(capsys):
    code, out, _ = run(capsys, "census", "-g", "dihedral:3", "--format", "json", "--expand-orbits")
    rows = [json.loads(line) for line in out.splitlines()]
    assert sum(r["orbit_size"] for r in rows) == 9
    assert all("verdict_time_ms" not in r for r in rows)
    code, out, _ = run(capsys, "census", "-g", "dihedral:3", "--format", "json", "--timings")
    assert all("verdict_time_ms" in json.loads(line) for line in out.splitlines())


def test_census_reflections(capsys):
    code, out, _ = run(capsys, "census", "-g", "dihedral:4", "--length", "4", "--reflections", "--format", "csv")
    assert code == 0 and out.splitlines()[0] == "sequence,orbit_size"


def test_group_json_round_trip(capsys, tmp_path):
    code, out, _ = run(capsys, "group", "-g", "dicyclic:2", "--format", "json")
    path = tmp_path / "g.json"
    path.write_text(out)
    code, out2, _ = run(capsys, "davenport", "-g", f"@{path}")
    assert out2.strip() == "6"


def test_sequence_json_accepted(capsys):
    seq = json.dumps({"group": {"kind": "dihedral", "n": 3}, "terms": ["a^[4]", "t^[2]"]})
    code, out, _ = run(capsys, "atom", "-g", "dihedral:3", "-s", seq, "--format", "json")
    assert json.loads(out)["atom"] is True


def test_exit_codes(capsys):
    assert run(capsys, "pi", "-g", "nonsense", "-s", "a")[0] == 2
    assert run(capsys, "pi", "-g", "dihedral:3", "-s", "zz")[0] == 2
    assert run(capsys, "davenport", "-g", "cyclic:70")[0] == 3
    assert run(capsys, "verify", "-g", "dihedral:3", "--statement", "thm4.3")[0] == 2
    with pytest.raises(SystemExit) as exc:
        main(["pi"])
    assert exc.value.code == 2


def test_verify_abelian_statements(capsys):
    assert run(capsys, "verify", "-g", "cyclic:8", "--statement", "smooth-structure")[0] == 0
    assert run(capsys, "verify", "-g", "cyclic:2", "--statement", "nsum-bound", "--draws", "200")[0] == 0


@pytest.mark.parametrize("argv", [
    ["census", "-g", "dicyclic:2", "--format", "json", "--expand-orbits"],
    ["verify", "-g", "dihedral:4", "--statement", "prop3.2", "--format", "json"],
])
def test_byte_identical_across_jobs(argv):
    outs = []
    for jobs in ("1", "3"):
        proc = subprocess.run([sys.executable, "-m", "zsf.cli", *argv, "--jobs", jobs],
                              capture_output=True, check=True)
        outs.append(proc.stdout)
    assert outs[0] == outs[1]
