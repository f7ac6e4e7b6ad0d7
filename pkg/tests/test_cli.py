import csv
import io
import json
import subprocess
import sys

import pytest

from ghzbell import cli
from ghzbell.schemes import ps_ewert, ps_grice, ps_this_work


def run(argv, capsys):
    code = cli.dispatch(argv)
    out = capsys.readouterr()
    return code, out.out, out.err


def rows(text):
    return list(csv.DictReader(io.StringIO(text)))


def test_bs_table(capsys):
    code, out, _ = run(["bs-table"], capsys)
    assert code == 0
    table = {r["input"]: r for r in rows(out)}
    assert list(table["Phi-"]) == ["input", "success_phi_minus", "success_psi_minus", "ambiguous", "click_deficit"]
    assert float(table["Phi-"]["success_phi_minus"]) == 1.0
    assert float(table["Psi-"]["success_psi_minus"]) == 1.0
    assert float(table["Phi+"]["ambiguous"]) == float(table["Psi+"]["ambiguous"]) == 1.0


def test_logical_bm_json(capsys):
    code, out, _ = run(["logical-bm", "--n", "2", "--samples", "20000"], capsys)
    data = json.loads(out)
    assert code == 0
    assert {"n", "samples", "successes", "estimate", "stderr", "analytic"} <= set(data)
    assert data["analytic"] == 0.75
    assert abs(data["estimate"] - 0.75) < 4 * data["stderr"]
    assert data["config_echo"]["seed"] == 42


def test_teleport_json(capsys):
    code, out, _ = run(["teleport", "--n", "3", "--samples", "5000", "--eta", "0.1"], capsys)
    data = json.loads(out)
    assert code == 0 and data["analytic"] == pytest.approx(1 - 0.55**3)


def test_curves_round_trip(tmp_path, capsys):
    path = tmp_path / "curves.csv"
    assert run(["curves", "--max-nbar", "20", "--step", "2", "--out", str(path)], capsys)[0] == 0
    parsed = rows(path.read_text())
    fns = {"ThisWork": ps_this_work, "Grice": ps_grice, "EwertVanLoock": ps_ewert}
    for r in parsed:
        assert set(r) == {"scheme", "nbar", "ps", "physical"}
        assert r["physical"] in ("0", "1")
        if r["scheme"] in fns:
            assert r["ps"] == f"{fns[r['scheme']](float(r['nbar'])):.10g}"
    zaidi = [r for r in parsed if r["scheme"] == "ZaidiVanLoock"]
    assert [(r["nbar"], r["ps"]) for r in zaidi] == [("6.00029", "0.643")]


def test_curves_json(capsys):
    code, out, _ = run(["curves", "--max-nbar", "6", "--step", "2", "--format", "json"], capsys)
    assert code == 0 and json.loads(out)["rows"][0]["scheme"] == "ThisWork"


def test_threshold_json(capsys):
    code, out, _ = run(["threshold", "--n", "4", "--samples", "2000", "--replicas", "2"], capsys)
    data = json.loads(out)
    assert code == 0
    assert data["ci_low"] <= data["eta_threshold"] <= data["ci_high"]
    assert data["levels"] == 3 and data["samples"] == 2000


def test_threshold_table_csv(capsys):
    code, out, _ = run(["threshold-table", "--n-min", "3", "--n-max", "4", "--samples", "2000", "--replicas", "2"], capsys)
    parsed = rows(out)
    assert code == 0 and [r["n"] for r in parsed] == ["3", "4"]
    assert "e-0" in parsed[0]["eta_threshold"]


@pytest.mark.parametrize(
    "argv",
    [
        ["nonsense"],
        ["logical-bm"],
        ["logical-bm", "--n", "0"],
        ["teleport", "--n", "2", "--eta", "1.5"],
        ["threshold", "--n", "4", "--samples", "10"],
        ["threshold", "--n", "4", "--levels", "9"],
        ["curves", "--step", "0"],
        ["threshold-table", "--n-min", "5", "--n-max", "3"],
        ["bs-table", "--bogus"],
    ],
)
def test_validation_exit_code(argv, capsys):
    assert run(argv, capsys)[0] == 2


def test_no_threshold_exit_code(capsys):
    argv = ["threshold", "--n", "1", "--samples", "1000", "--replicas", "1", "--memory-steps", "1000000"]
    assert run(argv, capsys)[0] == 4


def test_invariant_exit_code(monkeypatch, capsys):
    from ghzbell.ghz import ImpossibleOutcome

    def boom(*a, **k):
        raise ImpossibleOutcome("mixed families")

    monkeypatch.setattr(cli, "logical_bm_counts", boom)
    assert run(["logical-bm", "--n", "2"], capsys)[0] == 3


def test_verify_fails_with_corrupted_corrections(monkeypatch, capsys):
    from ghzbell import verify
    from ghzbell.bell_device import BellKind
    from ghzbell.ghz import CORRECTIONS

    bad = {**CORRECTIONS, BellKind.PSI_PLUS: ""}
    monkeypatch.setattr(cli, "run_checks", lambda: verify.run_checks(bad))
    code, _, err = run(["verify"], capsys)
    assert code == 3
    assert "FAIL  teleportation fidelity" in err


def test_config_file_overrides(tmp_path, capsys):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"n": 3, "samples": 5000}))
    code, out, _ = run(["logical-bm", "--n", "2", "--config", str(cfg)], capsys)
    data = json.loads(out)
    assert code == 0 and data["n"] == 3 and data["samples"] == 5000


def test_config_unknown_key(tmp_path, capsys):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"colour": "blue"}))
    assert run(["bs-table", "--config", str(cfg)], capsys)[0] == 2


def test_output_dir_env(tmp_path, monkeypatch, capsys):
    monkeypatch.setenv(cli.OUT_DIR_ENV, str(tmp_path))
    assert run(["bs-table"], capsys)[0] == 0
    assert (tmp_path / "bs-table.csv").read_text().startswith("input,")


@pytest.mark.parametrize(
    "argv",
    [
        ["logical-bm", "--n", "3", "--samples", "12000"],
        ["teleport", "--n", "2", "--samples", "9000", "--eta", "0.1"],
        ["threshold", "--n", "4", "--samples", "2000", "--replicas", "2"],
    ],
)
def test_byte_identical_across_workers(tmp_path, argv, capsys):
    outputs = []
    for workers in (1, 3):
        path = tmp_path / f"w{workers}.json"
        assert run(argv + ["--workers", str(workers), "--out", str(path)], capsys)[0] == 0
        outputs.append(path.read_bytes())
    assert outputs[0] == outputs[1]


def test_module_entry_point():
    res = subprocess.run([sys.executable, "-m", "ghzbell", "bs-table"], capture_output=True, text=True, check=False)
    assert res.returncode == 0 and res.stdout.startswith("input,")
