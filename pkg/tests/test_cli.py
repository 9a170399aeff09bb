import csv
import io
import pathlib
import subprocess
import sys

import pytest

from sandwich_forms import interval_laplacian, spectrum
from sandwich_forms.cli import main
from sandwich_forms.problemfile import ParseError, parse_text

PROBLEMS = pathlib.Path(__file__).resolve().parents[1] / "problems"


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    out, err = capsys.readouterr()
    return code, out, err


def rows(text):
    body = [line for line in text.splitlines() if not line.startswith("#")]
    return list(csv.DictReader(io.StringIO("\n".join(body))))


def test_decompose_killing(capsys):
    code, out, _ = run(capsys, "decompose", PROBLEMS / "p3_killing.toml")
    assert code == 0
    killing = {r["row"]: float(r["value"]) for r in rows(out) if r["table"] == "killing"}
    assert killing == {"1": 0.0, "2": 5.0, "3": 0.0}


def test_decompose_flags_zero_killing(capsys):
    code, out, _ = run(capsys, "decompose", PROBLEMS / "p3.toml")
    assert code == 0
    assert "status,killing_part,,zero" in out


def test_parse_error_has_line(tmp_path, capsys):
    bad = tmp_path / "bad.toml"
    bad.write_text('[form]\ntype = "graph"\nedges = [[1, 2\n')
    code, _, err = run(capsys, "decompose", bad)
    assert code == 65
    assert "line " in err


def test_parse_error_object():
    with pytest.raises(ParseError) as info:
        parse_text("[space]\nnodes = ['a']\n\n[form]\ntype = = 1\n")
    assert info.value.line == 5


def test_semantic_parse_errors(tmp_path, capsys):
    path = tmp_path / "s.toml"
    path.write_text('[form]\ntype = "interval"\n')
    assert run(capsys, "spectrum", path)[0] == 65
    path.write_text('[form]\ntype = "blob"\n')
    assert run(capsys, "spectrum", path)[0] == 65


def test_missing_file(capsys):
    assert run(capsys, "spectrum", "/nonexistent/path.toml")[0] == 66


def test_dominate_exit_codes(capsys):
    code, out, _ = run(capsys, "dominate", PROBLEMS / "interval_dn.toml")
    assert code == 0
    code, out, _ = run(capsys, "dominate", PROBLEMS / "interval_nd.toml")
    assert code == 1
    witness = {r["criterion"]: r["witness"] for r in rows(out)}
    assert witness["semigroup"] and witness["form"]


def test_empty_times_is_usage_error(capsys):
    assert run(capsys, "dominate", PROBLEMS / "interval_dn.toml", "--times", "")[0] == 64


def test_bad_flag_is_usage_error(capsys):
    with pytest.raises(SystemExit) as info:
        main(["dominate", str(PROBLEMS / "interval_dn.toml"), "--bogus"])
    assert info.value.code == 64


def test_sandwich_robin_pair(capsys):
    code, out, _ = run(capsys, "sandwich", PROBLEMS / "robin.toml")
    assert code == 0
    pair = {r["key"]: (r["value"], float(r["detail"])) for r in rows(out) if r["table"] == "pair"}
    assert pair["x0"] == ("true", 2.0)
    assert all(mu == 0.0 for name, (_, mu) in pair.items() if name != "x0")


def test_sandwich_main_part_has_zero_measure(tmp_path, capsys):
    path = tmp_path / "m.toml"
    path.write_text('[form]\ntype = "interval"\nn = 5\n\n[form2]\ntype = "main_part"\n')
    code, out, _ = run(capsys, "sandwich", path)
    assert code == 0
    mus = [float(r["detail"]) for r in rows(out) if r["table"] == "pair"]
    assert len(mus) == 7 and not any(mus)


def test_sandwich_failure_names_clause(tmp_path, capsys):
    path = tmp_path / "m.toml"
    path.write_text('[form]\ntype = "interval"\nn = 5\n\n[pair]\nO = "all"\nmu = { x3 = 1.0 }\n\n'
                    '[form2]\ntype = "restricted"\n')
    code, out, _ = run(capsys, "sandwich", path)
    assert code == 1
    failing = [r for r in rows(out) if r["key"] == "failing_clause"]
    assert failing[0]["value"] == "c"


def test_sandwich_killing_mode(capsys):
    code, out, _ = run(capsys, "sandwich", PROBLEMS / "p3_killing.toml", "--mode", "killing")
    assert code == 0
    assert "pair,2,true,2.5" in out


def test_capacity_table(capsys):
    code, out, _ = run(capsys, "capacity", PROBLEMS / "p3.toml")
    assert code == 0
    caps = {r["set"]: float(r["capacity"]) for r in rows(out) if not r["node"]}
    assert caps["1"] == pytest.approx(1.6, abs=1e-10)


def test_sweep_zero_matches_neumann(tmp_path, capsys):
    path = tmp_path / "s.toml"
    path.write_text('[form]\ntype = "interval"\nn = 9\nkind = "robin"\n\n[run]\nbetas = [0.0]\n')
    code, out, _ = run(capsys, "sweep", path, "--modes", "11")
    assert code == 0
    row = rows(out)[0]
    lam = [float(row[f"lambda_{k}"]) for k in range(1, 12)]
    assert lam == [float(x) for x in spectrum(interval_laplacian(9, "neumann"))]


def test_sweep_monotone(capsys):
    code, out, _ = run(capsys, "sweep", PROBLEMS / "sweep.toml")
    assert code == 0
    table = rows(out)
    assert len(table) == 20
    lam1 = [float(r["lambda_1"]) for r in table]
    assert all(a <= b for a, b in zip(lam1, lam1[1:]))
    assert all(float(r["violation_dirichlet"]) <= 1e-12 for r in table)
    assert all(float(r["violation_neumann"]) <= 1e-12 for r in table)


def test_reports_are_deterministic(tmp_path, monkeypatch):
    outs = []
    for threads in ("1", "4"):
        monkeypatch.setenv("SANDWICH_FORMS_THREADS", threads)
        path = tmp_path / f"out{threads}.csv"
        assert main(["sweep", str(PROBLEMS / "sweep.toml"), "-o", str(path)]) == 0
        outs.append(path.read_bytes())
    assert outs[0] == outs[1]
    assert b"problem-sha256" in outs[0]


def test_help_documents_exit_codes():
    proc = subprocess.run([sys.executable, "-m", "sandwich_forms", "--help"],
                          capture_output=True, text=True, check=True)
    for code in ("64", "65", "66", "70", "73"):
        assert f"  {code}  " in proc.stdout


def test_math_error_exit(tmp_path, capsys):
    path = tmp_path / "x.toml"
    path.write_text('[space]\nnodes = ["a", "b"]\n\n[form]\ntype = "explicit"\n'
                    'coeff = [[1.0, 0.5], [0.5, 1.0]]\n')
    assert run(capsys, "decompose", path)[0] == 3


def test_unwritable_output(capsys):
    code = main(["spectrum", str(PROBLEMS / "p3.toml"), "-o", "/nonexistent/dir/out.csv"])
    assert code == 73
