import csv
import io
import json
import subprocess
import sys

import pytest

from levinson.cli import main, parse_config, read_config_file, UsageError


def _run(capsys, argv):
    code = main(argv)
    out = capsys.readouterr()
    return code, out.out, out.err


def _rows(text):
    return list(csv.DictReader(io.StringIO(text)))


def test_mainterm_csv(capsys):
    code, out, err = _run(capsys, ["mainterm", "--seed", "11"])
    assert code == 0
    (row,) = _rows(out)
    assert float(row["c_closed"]) == 2.350067776118448
    assert row["seed"] == "11"
    assert "boundary" in row["warnings"] and "boundary" in err
    assert float(row["residual_quadrature"]) < 1e-12


def test_config_file_and_flag_precedence(tmp_path, capsys):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("# preset\nR = 1.0   # shift\ntheta = 0.4\nP = 0,2,-1\n")
    code, out, _ = _run(capsys, ["mainterm", "--config", str(cfg), "--R", "1.2"])
    assert code == 0
    (row,) = _rows(out)
    assert row["R"] == "1.2" and row["theta"] == "0.4" and row["P"] == "0.0,2.0,-1.0"


def test_unknown_config_key(tmp_path, capsys):
    cfg = tmp_path / "bad.cfg"
    cfg.write_text("R = 1.0\nbogus_key = 3\n")
    code, _, err = _run(capsys, ["mainterm", "--config", str(cfg)])
    assert code == 2 and "bogus_key" in err


def test_usage_errors(capsys):
    assert _run(capsys, ["mainterm", "--P", "1,1"])[0] == 2
    assert _run(capsys, ["mainterm", "--theta", "0.7"])[0] == 2
    assert _run(capsys, ["mainterm", "--R", "abc"])[0] == 2
    assert _run(capsys, ["nosuchcommand"])[0] == 2
    assert _run(capsys, ["moment", "--mode", "wild"])[0] == 2
    assert _run(capsys, ["verify-afe", "--alpha", "0.6"])[0] == 2


def test_read_config_file_errors(tmp_path):
    f = tmp_path / "x.cfg"
    f.write_text("no equals sign\n")
    with pytest.raises(UsageError):
        read_config_file(f)


def test_moment_defaults():
    cfg = parse_config(["moment", "--T", "1e4"])
    assert cfg.parameters["M"] == 100


def test_moment_csv_and_panels(tmp_path, capsys):
    panels = tmp_path / "panels.csv"
    code, out, _ = _run(capsys, ["moment", "--T", "2000", "--dump-panels", str(panels)])
    assert code == 0
    (row,) = _rows(out)
    assert list(row) == ["T", "M", "sigma0", "moment", "main_term", "ratio", "runtime_seconds"]
    assert row["M"] == "45"
    dumped = _rows(panels.read_text())
    assert abs(sum(float(r["contribution"]) for r in dumped) - float(row["moment"])) < 1e-9


def test_output_env_dir(tmp_path, monkeypatch, capsys):
    monkeypatch.setenv("LEVINSON_OUTPUT_DIR", str(tmp_path))
    code, out, _ = _run(capsys, ["verify-arith", "--cap", "500"])
    assert code == 0 and out == ""
    (row,) = _rows((tmp_path / "verify-arith.csv").read_text())
    assert row["value"] == "1.0" and row["nonzero_blocks"] == "0"


def test_output_flag_and_byte_identical(tmp_path, capsys):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    assert main(["mainterm", "--output", str(a)]) == 0
    assert main(["mainterm", "--output", str(b)]) == 0
    assert a.read_bytes() == b.read_bytes()


def test_verify_afe(capsys):
    code, out, _ = _run(capsys, ["verify-afe", "--alpha", "0.18", "--beta", "0.18", "--truncation", "20000"])
    assert code == 0
    (row,) = _rows(out)
    assert float(row["residual"]) < 1e-2


def test_optimize_csv(capsys):
    code, out, _ = _run(capsys, ["optimize", "--grid-points", "10"])
    assert code == 0
    rows = _rows(out)
    final = rows[-1]
    assert final["kind"] == "final" and float(final["kappa"]) >= 0.34
    assert all(r["kind"] == "trace" for r in rows[:-1])


def test_reproduce_json(capsys):
    code, out, _ = _run(capsys, ["reproduce", "--json", "--seed", "3"])
    assert code == 0
    rep = json.loads(out)
    assert list(rep) == sorted(rep)
    assert rep["c_ok"] and rep["kappa_ok"] and rep["seed"] == 3 and rep["warnings"]
    code2, out2, _ = _run(capsys, ["reproduce", "--json", "--seed", "3"])
    assert out2 == out


def test_reproduce_subprocess():
    proc = subprocess.run(
        [sys.executable, "-m", "levinson", "reproduce", "--check-identities"],
        capture_output=True, text=True, timeout=120,
    )
    assert proc.returncode == 0, proc.stderr
    assert "identities ok" in proc.stdout


def test_threads_flag(capsys):
    code, _, _ = _run(capsys, ["verify-arith", "--cap", "10", "--threads", "1"])
    assert code == 0
