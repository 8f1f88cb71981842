import csv
import io
import json
import math

import pytest

from bosonlab.cli import main


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def _rows(text):
    body = [l for l in text.splitlines() if not l.startswith("#")]
    return list(csv.DictReader(io.StringIO("\n".join(body))))


def test_capacity_privacy_column(capsys):
    code, out, _ = run(capsys, "capacity", "--eta", "0.6", "--nbar", "10", "--nnoise", "0", "--no-timestamp")
    assert code == 0
    assert out.startswith("# schema_version: 1\n")
    assert "# note: privacy is a conjectured capacity" in out
    row = _rows(out)[0]
    assert row["shannon"] == "div"
    assert abs(float(row["privacy"]) - 0.368802110328) <= 1e-12
    assert list(row) == [
        "eta", "n_bar", "n_noise", "shannon", "homodyne", "heterodyne",
        "pure_loss", "thermal_lower", "privacy", "privacy_asymptote",
    ]


def test_capacity_bits(capsys):
    _, nats, _ = run(capsys, "capacity", "--eta", "0.6", "--nbar", "10", "--no-timestamp")
    _, bits, _ = run(capsys, "capacity", "--eta", "0.6", "--nbar", "10", "--no-timestamp", "--unit", "bits")
    a, b = _rows(nats)[0], _rows(bits)[0]
    assert abs(float(b["pure_loss"]) - float(a["pure_loss"]) / math.log(2)) <= 1e-10
    assert a["eta"] == b["eta"]


def test_capacity_output_is_byte_stable(capsys, tmp_path):
    argv = ["capacity", "--eta", "0.3,0.8", "--nbar", "1,10", "--nnoise", "0,1", "--no-timestamp"]
    _, a, _ = run(capsys, *argv)
    _, b, _ = run(capsys, *argv)
    assert a == b
    _, stamped, _ = run(capsys, *argv[:-1])
    assert stamped.startswith("# generated_at:")
    doc = json.loads(run(capsys, *argv, "--format", "json")[1])
    assert doc["schema_version"] == 1 and len(doc["rows"]) == 8


def test_capacity_empty_grid(capsys):
    code, _, err = run(capsys, "capacity", "--eta", "", "--nbar", "1")
    assert code == 2 and "error" in err


def test_config_file(capsys, tmp_path):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("eta = 0.6\nnbar = 10  # budget\nno_timestamp = true\n")
    code, out, _ = run(capsys, "capacity", "--config", str(cfg))
    assert code == 0
    assert _rows(out)[0]["n_bar"] == "10"
    _, out, _ = run(capsys, "capacity", "--config", str(cfg), "--nbar", "1")
    assert _rows(out)[0]["n_bar"] == "1"


def test_stress_default_epni(capsys, tmp_path):
    csv_path = tmp_path / "trials.csv"
    code, out, _ = run(
        capsys, "stress", "--trials", "20", "--no-timestamp", "--trials-csv", str(csv_path)
    )
    assert code == 0
    doc = json.loads(out)
    assert doc["schema_version"] == 1
    assert doc["violations"] == []
    assert len(_rows(csv_path.read_text())) == 20


def test_stress_under_truncated(capsys):
    code, out, _ = run(
        capsys, "stress", "--conjecture", "moe1", "--families", "vacuum", "--cutoff", "12",
        "--trials", "4", "--eta", "0.5", "--thermal-tail-tol", "1", "--no-timestamp",
    )
    assert code == 0
    doc = json.loads(out)
    assert doc["truncation_artifacts"] and not doc["violations"]


def test_stress_bad_config(capsys):
    code, _, err = run(capsys, "stress", "--conjecture", "moe2", "--cutoff", "4", "--K", "3")
    assert code == 2 and "error" in err
    assert run(capsys, "stress", "--conjecture", "bogus")[0] == 2


def test_degraded_check(capsys):
    code, out, _ = run(capsys, "degraded-check", "--families", "coherent", "--no-timestamp")
    assert code == 0
    doc = json.loads(out)
    assert doc["passed"] and doc["max_trace_distance"] <= 1e-6
    code, _, err = run(capsys, "degraded-check", "--eta", "0.4,0.6")
    assert code == 2 and "eta" in err
    assert run(capsys, "degraded-check", "--families", "")[0] == 2


def test_waterfill(capsys):
    code, out, _ = run(capsys, "waterfill", "--eta", "0.9,0.4", "--nbar", "2", "--objective", "privacy", "--no-timestamp")
    assert code == 0
    doc = json.loads(out)
    assert doc["allocation"][1] == 0.0 and doc["schema_version"] == 1
    code, out, _ = run(capsys, "waterfill", "--eta", "0.7,0.7", "--nbar", "3", "--format", "csv", "--no-timestamp")
    assert [float(r["allocation"]) for r in _rows(out)] == pytest.approx([1.5, 1.5])
    assert run(capsys, "waterfill", "--nbar", "3")[0] == 2


def test_epi_demo(capsys):
    code, out, _ = run(capsys, "epi-demo", "--eta", "0.5", "--convention", "standard", "--no-timestamp")
    assert code == 0
    row = _rows(out)[0]
    assert abs(float(row["slack_convex"]) - 0.111571775657) <= 1e-11


def test_usage_errors(capsys):
    assert run(capsys)[0] == 2
    assert run(capsys, "capacity", "--format", "xml")[0] == 2
