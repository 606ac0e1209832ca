"""Acceptance gate.

Runs the shipped verification suite once at the default configuration
scale (the scale the numbers in the criteria are quoted at) and asserts
each criterion on its own line, so `pytest -v` reads as a checklist.
Criteria that carry their own wall-clock budget get a separate timed
re-run of just that criterion (none of them depend on the shared
sample banks, so the re-runs are cheap).
"""

import dataclasses
import json
import subprocess
import sys
import time
from pathlib import Path

import pytest

from logchaos.config import RunConfig
from logchaos.verify import payload_bytes, run_acceptance

WORKERS = 4


@pytest.fixture(scope="module")
def gate():
    t0 = time.perf_counter()
    payload = run_acceptance(RunConfig(), workers=WORKERS)
    elapsed = time.perf_counter() - t0
    return payload, elapsed


def _crit(payload, cid):
    crit = payload["criteria"][cid - 1]
    assert crit["id"] == cid
    return crit


def _timed_rerun(cid, budget_s):
    t0 = time.perf_counter()
    payload = run_acceptance(RunConfig(), workers=WORKERS, only=[str(cid)])
    elapsed = time.perf_counter() - t0
    assert payload["allPass"], payload["criteria"]
    assert elapsed < budget_s, f"criterion {cid} took {elapsed:.1f}s of {budget_s}s"


def test_criterion_01_thresholds(gate):
    crit = _crit(gate[0], 1)
    assert crit["passed"], crit["measured"]
    _timed_rerun(1, 10.0)


def test_criterion_02_threshold_ordering(gate):
    crit = _crit(gate[0], 2)
    assert crit["passed"], crit["measured"]
    _timed_rerun(2, 30.0)


def test_criterion_03_pd_certification(gate):
    crit = _crit(gate[0], 3)
    assert crit["passed"], crit["measured"]
    m = crit["measured"]
    assert m["minEig_d1_T05"] >= -1e-8
    assert m["minEig_d3_2T"] >= -1e-8
    assert m["minEig_d1_T02"] < 0.0
    _timed_rerun(3, 60.0)


def test_criterion_04_first_moment(gate):
    payload, elapsed = gate
    crit = _crit(payload, 4)
    assert crit["passed"], crit["measured"]
    # the budget is five minutes per bank; the whole gate (which builds
    # both criterion banks and everything else) finishing inside one
    # budget bounds each build from above
    assert elapsed < 300.0, f"gate run took {elapsed:.1f}s"


def test_criterion_05_scaling_law(gate):
    crit = _crit(gate[0], 5)
    assert crit["passed"], crit["measured"]
    m = crit["measured"]
    assert m["ksBase"] < 0.01 + m["gate"]
    assert m["excessFine"] <= m["excessBase"]


def test_criterion_06_mixture_identity(gate):
    crit = _crit(gate[0], 6)
    assert crit["passed"], crit["measured"]


def test_criterion_07_heat_factor_representations(gate):
    crit = _crit(gate[0], 7)
    assert crit["passed"], crit["measured"]


def test_criterion_08_heat_pde(gate):
    crit = _crit(gate[0], 8)
    assert crit["passed"], crit["measured"]


def test_criterion_09_envelope_band(gate):
    crit = _crit(gate[0], 9)
    assert crit["passed"], crit["measured"]
    assert 0.0 < crit["measured"]["envelopeConstant"] < 1.0


def test_criterion_10_synthetic_transfer(gate):
    crit = _crit(gate[0], 10)
    assert crit["passed"], crit["measured"]
    _timed_rerun(10, 60.0)


def test_criterion_11_bounds_coherence(gate):
    crit = _crit(gate[0], 11)
    assert crit["passed"], crit["measured"]
    m = crit["measured"]
    assert m["bracketLow"] <= m["bracketHigh"]


def test_criterion_12_determinism(gate, tmp_path):
    crit = _crit(gate[0], 12)
    assert crit["passed"], crit["measured"]

    # byte-identity of the whole payload across re-runs and worker
    # counts, at a scale small enough to run three times here
    small = dataclasses.replace(RunConfig(), mc_n=4000, grid_cells_per_axis=16)
    first = payload_bytes(run_acceptance(small, workers=1))
    again = payload_bytes(run_acceptance(small, workers=1))
    wide = payload_bytes(run_acceptance(small, workers=4))
    assert first == again
    assert first == wide

    # and through the command line, config file and all: two runs into
    # the same directory must leave byte-identical verify.json behind
    cfg_file = tmp_path / "small.cfg"
    cfg_file.write_text("mc.N = 4000\ngrid.cellsPerAxis = 16\n")
    out = tmp_path / "out"
    blobs = []
    for _ in range(2):
        proc = subprocess.run(
            [sys.executable, "-m", "logchaos",
             "--config", str(cfg_file), "--out", str(out),
             "--workers", "1", "verify"],
            capture_output=True, text=True, timeout=600,
        )
        assert proc.returncode == 0, proc.stderr
        blobs.append((out / "verify.json").read_bytes())
    assert blobs[0] == blobs[1]
    assert json.loads(blobs[0])["allPass"]
