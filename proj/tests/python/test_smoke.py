import json
import math
import os
from pathlib import Path

import numpy as np
import pytest

import segwise

SCENARIOS = Path(os.environ.get("SEGWISE_SCENARIO_DIR", Path(__file__).resolve().parents[2] / "scenarios"))


def step(n=200, jump=3.0, seed=0):
    rng = np.random.default_rng(seed)
    x = np.where(np.arange(n) < n // 2, 0.0, jump)
    return x + rng.normal(size=n)


def test_segment_stats():
    assert segwise.segment_mean([1.0, 2.0, 3.0, 4.0], 0, 4) == [2.5]
    assert segwise.sse_cost([1.0, 2.0, 3.0, 4.0], 0, 4) == pytest.approx(5.0)
    assert segwise.cusum([0, 0, 0, 1, 1, 1], 0, 6, 3) == pytest.approx(math.sqrt(1.5))
    assert segwise.segmentation_cost([0, 0, 5, 5], [2]) == 0.0


def test_detectors():
    assert segwise.dp_exact([0, 0, 5, 5], 1, min_seg=1) == [2]
    assert segwise.pelt([0, 0, 5, 5], 1.0, min_seg=1) == [2]
    x = step()
    assert segwise.detect(x, 1, detector="wbs") == [100]
    ranked = segwise.wbs_rank(x, seed=3)
    assert ranked[0][0] == 100
    assert all(a[1] >= b[1] for a, b in zip(ranked, ranked[1:]))
    with pytest.raises(segwise.CapacityError):
        segwise.dp_exact([1, 2, 3], 2)


def test_critical_value():
    assert segwise.critical_value([float(i) for i in range(1, 11)], 0.2) == 8.0


def test_multivariate_input():
    x = np.column_stack([step(seed=1), step(seed=2)])
    assert segwise.detect(x, 1, detector="dp") == [100]


def test_uq_report():
    rep = segwise.uq(step(seed=5), B=200, seed=4)
    assert rep["u"] == rep["k_cv"] - rep["k_min"]
    assert rep["k_min"] >= 1
    assert len(rep["trace"]) == rep["k_min"] + 1
    assert len(rep["change_points_at_k_cv"]) == rep["k_cv"]
    assert rep == segwise.uq(step(seed=5), B=200, seed=4, workers=3)
    curve = segwise.cv_curve(step(seed=5), 4)
    assert len(curve) == 5
    assert rep["mode"] == "split"


def test_errors_map_to_python():
    with pytest.raises(ValueError):
        segwise.uq(step(), alpha=1.5)
    with pytest.raises(ValueError):
        segwise.uq(step(), detector="nope")
    with pytest.raises(ValueError):
        segwise.simulate("bogus = 1\n")


def test_cost_path():
    rows = segwise.cost_path([0, 0, 5, 5], p_n=1)
    assert rows[0] == (0, 25.0)
    assert rows[1] == (1, 0.0)


def test_simulate_smoke():
    summary, records = segwise.simulate((SCENARIOS / "smoke.toml").read_text())
    data = json.loads(summary)
    assert data["completed"] == 1
    assert len(records.strip().splitlines()) == 2
