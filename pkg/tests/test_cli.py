"""Command-line surface: artifacts, exit codes, config embedding.

Everything runs in-process through main(argv) with a small
configuration, so the whole file stays fast.
"""

import json
import math
from pathlib import Path

import pytest

from logchaos.cli import main
from logchaos.laplace import heat_factor_exact
from logchaos.potential import boundary_threshold, pd_threshold

SMALL_CFG = """\
model.d = 1
model.gamma = 1.0
model.T = 0.5
grid.cellsPerAxis = 16
mc.N = 2000
mc.bankId = 77
"""


@pytest.fixture()
def cfg_path(tmp_path):
    p = tmp_path / "small.cfg"
    p.write_text(SMALL_CFG)
    return str(p)


def read_artifact(out_dir, name):
    with open(Path(out_dir) / f"{name}.json") as fh:
        return json.load(fh)


def test_thresholds_artifact(tmp_path, cfg_path):
    out = tmp_path / "out"
    rc = main(["--config", cfg_path, "--out", str(out), "thresholds", "--dmin", "1", "--dmax", "3"])
    assert rc == 0
    art = read_artifact(out, "thresholds")
    assert art["formatVersion"] == 1
    assert art["kind"] == "thresholds"
    assert art["config"]["mc.N"] == 2000
    rows = art["data"]
    assert [r["d"] for r in rows] == [1, 2, 3]
    assert rows[0]["T"] == pytest.approx(pd_threshold(1))
    assert rows[2]["TStar"] == pytest.approx(boundary_threshold(3), rel=1e-9)


def test_thresholds_csv(tmp_path, cfg_path):
    out = tmp_path / "out"
    rc = main(["--config", cfg_path, "--out", str(out), "--format", "csv",
               "thresholds", "--dmin", "1", "--dmax", "2"])
    assert rc == 0
    text = (out / "thresholds.csv").read_text()
    assert text.startswith("#")  # config echoed as comment header
    assert "# model.T = 0.5" in text
    lines = [l for l in text.splitlines() if not l.startswith("#")]
    assert lines[0].split(",")[0] == "d"
    assert len(lines) == 3


def test_pd_check_passes_at_reference(tmp_path, cfg_path):
    out = tmp_path / "out"
    rc = main(["--config", cfg_path, "--out", str(out), "pd-check", "--cells", "32"])
    assert rc == 0
    art = read_artifact(out, "pd_report")
    assert art["data"]["minEigenvalue"] > 0.0


def test_bank_create_and_info(tmp_path, cfg_path, capsys):
    out = tmp_path / "out"
    rc = main(["--config", cfg_path, "--out", str(out), "bank", "create"])
    assert rc == 0
    bank_file = out / "bank-77.bank"
    assert bank_file.exists()
    rc = main(["bank", "info", str(bank_file)])
    assert rc == 0
    info = capsys.readouterr().out
    assert '"bankId": 77' in info
    assert "mean" in info


def test_laplace_from_saved_bank(tmp_path, cfg_path):
    out = tmp_path / "out"
    main(["--config", cfg_path, "--out", str(out), "bank", "create"])
    rc = main(["--config", cfg_path, "--out", str(out), "laplace",
               "--bank", str(out / "bank-77.bank"),
               "--r", "0.5", "--xmin", "1.0", "--xmax", "2.0", "--points", "4"])
    assert rc == 0
    art = read_artifact(out, "laplace_curve")
    rows = art["data"]
    assert len(rows) == 4
    ests = [r["estimate"] for r in rows]
    assert all(a > b for a, b in zip(ests, ests[1:]))
    assert all(r["stdError"] > 0.0 for r in rows)


def test_kappa_degenerate_matches_library(tmp_path, cfg_path):
    out = tmp_path / "out"
    rc = main(["--config", cfg_path, "--out", str(out), "kappa",
               "--mode", "degenerate", "--s", "0.5,1.0", "--z", "6.0,7.0"])
    assert rc == 0
    art = read_artifact(out, "kappa_points")
    rows = art["data"]
    assert len(rows) == 4
    b = 1.5  # from the configured model
    for r in rows:
        want = heat_factor_exact(r["s"], r["z"], b).value
        assert r["value"] == pytest.approx(want, rel=1e-8)


def test_kappa_mc_builds_config_bank_when_missing(tmp_path, cfg_path):
    # no --bank: the command falls back to simulating the configured model
    out = tmp_path / "out"
    rc = main(["--config", cfg_path, "--out", str(out), "kappa",
               "--mode", "mc", "--s", "1.0", "--z", "6.0"])
    assert rc == 0
    art = read_artifact(out, "kappa_points")
    rows = art["data"]
    assert len(rows) == 1
    assert rows[0]["mode"] == "monte-carlo"
    assert rows[0]["value"] > 0.0
    assert rows[0]["stdError"] > 0.0


def test_smalldev_artifact(tmp_path, cfg_path):
    out = tmp_path / "out"
    main(["--config", cfg_path, "--out", str(out), "bank", "create"])
    rc = main(["--config", cfg_path, "--out", str(out), "smalldev",
               "--bank", str(out / "bank-77.bank"),
               "--dmin", "0.05", "--dmax", "1.0", "--points", "8"])
    assert rc == 0
    art = read_artifact(out, "smalldev")
    assert len(art["data"]["curve"]) == 8
    assert "fit" in art["data"]


def test_bounds_artifact(tmp_path, cfg_path):
    out = tmp_path / "out"
    rc = main(["--config", cfg_path, "--out", str(out), "bounds", "--r", "0.5"])
    assert rc == 0
    art = read_artifact(out, "bounds_report")
    assert art["data"]["crLower"] < art["data"]["crUpper"]


def test_global_flags_accepted_after_subcommand(tmp_path, cfg_path):
    out = tmp_path / "out"
    rc = main(["thresholds", "--config", cfg_path, "--out", str(out), "--dmax", "2"])
    assert rc == 0
    assert (out / "thresholds.json").exists()


def test_seed_bank_override_changes_artifact_config(tmp_path, cfg_path):
    out = tmp_path / "out"
    main(["--config", cfg_path, "--out", str(out), "--seed-bank", "99", "bank", "create"])
    assert (out / "bank-99.bank").exists()


def test_missing_config_exits_two(tmp_path):
    rc = main(["--config", str(tmp_path / "absent.cfg"), "thresholds"])
    assert rc == 2


def test_invalid_model_exits_two(tmp_path):
    p = tmp_path / "bad.cfg"
    p.write_text("model.gamma = 9.0\n")
    # pd-check instantiates the model parameters and must refuse them
    rc = main(["--config", str(p), "--out", str(tmp_path / "o"), "pd-check"])
    assert rc == 2


def test_verify_subset_runs_and_writes_payload(tmp_path, cfg_path, capsys):
    out = tmp_path / "out"
    rc = main(["--config", cfg_path, "--out", str(out), "verify",
               "--criteria", "1,2"])
    assert rc == 0
    printed = capsys.readouterr().out
    assert "criterion 01 thresholds: PASS" in printed
    assert "criterion 02 ordering: PASS" in printed
    payload = json.loads((out / "verify.json").read_text())
    assert payload["allPass"]
    assert [c["id"] for c in payload["criteria"]] == [1, 2]
