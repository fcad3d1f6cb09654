import csv
import io
import json
import subprocess
import sys
from fractions import Fraction as F

import pytest

from steinpairs import __version__
from steinpairs.cli import main, parse_rational, random_p_lists
from steinpairs.cli import UsageError
from steinpairs.serialize import exact_string


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def csv_rows(text):
    body = "\n".join(line for line in text.splitlines() if not line.startswith("#"))
    return list(csv.DictReader(io.StringIO(body)))


def test_parse_rational():
    assert parse_rational("3/4") == F(3, 4)
    assert parse_rational(" -2 ") == -2
    for bad in ("0.5", "1e3", "", "1/0", "abc"):
        with pytest.raises(UsageError):
            parse_rational(bad)


def test_narayana_csv_rows(capsys):
    code, out, _ = run(capsys, "narayana-verify", "--n-range", "2:50", "--format", "csv")
    assert code == 0
    rows = csv_rows(out)
    assert len(rows) == 49
    assert all(r["ok"] == "True" for r in rows)
    assert rows[1]["tv"] == "0.1" and rows[1]["tv_exact"] == "1/10"


def test_narayana_json_single(capsys):
    code, out, _ = run(capsys, "narayana-verify", "--n-range", "3:3", "--format", "json")
    assert code == 0
    doc = json.loads(out)
    (row,) = doc["rows"]
    assert row["tv"] == "0.1"
    assert row["exact"]["tv"] == "1/10"
    assert isinstance(row["kolmogorov"], float)


def test_empty_range_is_usage_error(capsys):
    code, _, err = run(capsys, "narayana-verify", "--n-range", "5:4")
    assert code == 2 and "empty range" in err


def test_header_fields(capsys):
    code, out, _ = run(capsys, "narayana-verify", "--n-range", "4:5", "--format", "json",
                       "--seed", "13", "--precision", "float64")
    header = json.loads(out)["header"]
    assert header["version"] == __version__
    assert header["seed"] == 13
    assert header["precision"] == "float64"
    assert header["grid"] == {"n_range": [4, 5]}
    code, out, _ = run(capsys, "hyp-verify", "--N", "4", "--n", "2", "--m", "2",
                       "--format", "csv", "--seed", "5")
    assert "# seed: 5" in out and "# version:" in out and "# grid:" in out


def test_float64_precision(capsys):
    _, out, _ = run(capsys, "narayana-verify", "--n-range", "3:3", "--format", "json",
                    "--precision", "float64")
    row = json.loads(out)["rows"][0]
    assert row["tv"] == 0.1 and row["exact"]["tv"] == "1/10"


def test_table_format(capsys):
    code, out, _ = run(capsys, "narayana-verify", "--n-range", "2:4")
    assert code == 0
    lines = [l for l in out.splitlines() if not l.startswith("#")]
    assert len(lines) == 4 and lines[0].split()[0] == "n"


def test_pb_inline(capsys):
    code, out, _ = run(capsys, "pb-verify", "--p", "1/2,1/2", "--format", "json")
    assert code == 0
    row = json.loads(out)["rows"][0]
    assert row["tv"] == "0" and row["better"] == "6"


@pytest.mark.parametrize("p", ["2/1", "0.5", "1/2,x"])
def test_pb_bad_input(capsys, p):
    code, _, err = run(capsys, "pb-verify", "--p", p)
    assert code == 2 and err


def test_pb_needs_source(capsys):
    assert run(capsys, "pb-verify")[0] == 2


def test_pb_degenerate_row(capsys):
    code, out, _ = run(capsys, "pb-verify", "--p", "0,1", "--format", "json")
    assert code == 0
    assert json.loads(out)["rows"][0]["degenerate"] is True


def test_pb_file_200_random_lists(capsys, tmp_path):
    lists = random_p_lists(200, seed=99)
    path = tmp_path / "probs.json"
    path.write_text(json.dumps([[exact_string(x) for x in ps] for ps in lists]))
    code, out, _ = run(capsys, "pb-verify", "--p-file", str(path), "--format", "csv")
    assert code == 0
    rows = csv_rows(out)
    assert len(rows) == 200 and all(r["ok"] == "True" for r in rows)


def test_pb_file_errors(capsys, tmp_path):
    assert run(capsys, "pb-verify", "--p-file", str(tmp_path / "missing.json"))[0] == 2
    bad = tmp_path / "bad.json"
    bad.write_text("[[]]")
    assert run(capsys, "pb-verify", "--p-file", str(bad))[0] == 2


def test_hyp_single(capsys):
    code, out, _ = run(capsys, "hyp-verify", "--N", "4", "--n", "2", "--m", "2",
                       "--format", "json")
    assert code == 0
    row = json.loads(out)["rows"][0]
    assert row["exact"]["tv"] == "1/6" and row["ok"]


def test_hyp_small_n_rejected(capsys):
    code, _, err = run(capsys, "hyp-verify", "--N", "3", "--n", "1", "--m", "1")
    assert code == 2 and "N < 4" in err


def test_hyp_sweep_small(capsys):
    code, out, _ = run(capsys, "hyp-verify", "--sweep", "--N-max", "10", "--format", "csv")
    assert code == 0
    assert len(csv_rows(out)) == sum((N - 1) ** 2 for N in range(4, 11))


@pytest.mark.slow
def test_hyp_sweep_default(capsys):
    code, out, _ = run(capsys, "hyp-verify", "--sweep", "--N-max", "25", "--format", "csv",
                       "--workers", "4")
    assert code == 0
    assert len(csv_rows(out)) == sum((N - 1) ** 2 for N in range(4, 26))


def test_stein_check_zero(capsys):
    code, out, _ = run(capsys, "stein-check", "--mu", "2", "--sigma2", "2/5", "--trials", "50",
                       "--seed", "7", "--format", "json")
    assert code == 0
    row = json.loads(out)["rows"][0]
    assert row["max_residual"] == "0" and row["functions"] == 57


def test_stein_check_sigma2_zero(capsys):
    assert run(capsys, "stein-check", "--mu", "1", "--sigma2", "0")[0] == 2


def test_stein_check_perturb(capsys):
    code, out, _ = run(capsys, "stein-check", "--mu", "2", "--sigma2", "2/5", "--perturb",
                       "--format", "json")
    assert code == 0
    row = json.loads(out)["rows"][0]
    assert row["max_residual"] != "0" and row["expected"] == "nonzero"


def test_stein_check_narayana(capsys):
    code, out, _ = run(capsys, "stein-check", "--mu", "1", "--sigma2", "3", "--narayana-n", "12",
                       "--format", "json")
    assert code == 0
    rows = json.loads(out)["rows"]
    assert len(rows) == 2 and rows[1]["max_residual"] == "0"


def test_unknown_command_and_bad_option(capsys):
    assert run(capsys, "frobnicate")[0] == 2
    assert run(capsys, "narayana-verify", "--format", "xml")[0] == 2


def test_deterministic_across_workers(capsys):
    args = ["pb-verify", "--random", "12", "--seed", "3", "--format", "csv"]
    _, one, _ = run(capsys, *args, "--workers", "1")
    _, three, _ = run(capsys, *args, "--workers", "3")
    assert one == three
    args = ["narayana-verify", "--n-range", "2:20", "--format", "json"]
    assert run(capsys, *args, "--workers", "1")[1] == run(capsys, *args, "--workers", "2")[1]


def test_env_override(capsys, monkeypatch):
    monkeypatch.setenv("STEINPAIRS_FORMAT", "json")
    monkeypatch.setenv("STEINPAIRS_SEED", "21")
    _, out, _ = run(capsys, "narayana-verify", "--n-range", "2:2")
    assert json.loads(out)["header"]["seed"] == 21


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "steinpairs", "narayana-verify",
                           "--n-range", "2:3", "--format", "csv"],
                          capture_output=True, text=True)
    assert proc.returncode == 0
    assert len(csv_rows(proc.stdout)) == 2
