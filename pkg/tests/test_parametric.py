import numpy as np
import pytest
from hypothesis import assume, given
from hypothesis import strategies as st

from rdcann.data import NormalizationSpec, generate_synthetic
from rdcann.model import FlowModel
from rdcann.network import Network
from rdcann.parametric import (
    DECREASING,
    INCREASING,
    NON_MONOTONE,
    SweepSpec,
    monotonicity_report,
    scatter_csv,
    scatter_export,
    sweep,
)

SPEC = NormalizationSpec((1.0, 60.0, 60.0, 10.0, 3.0), (3.0, 110.0, 110.0, 60.0, 12.0))
BASE = {"sf_ratio": 2.0, "feed_temp": 85.0, "solvent_temp": 85.0, "rotation": 35.0}


def constant_model():
    return FlowModel(Network(np.zeros((3, 4)), np.zeros(3), np.zeros((1, 3)), [0.5]), SPEC)


def sf_only_model():
    """Flow rises with sf_ratio and ignores the other inputs."""
    return FlowModel(Network([[0.1, 0, 0, 0]], [0.0], [[1.0]], [0.0]), SPEC)


def test_constant_model_is_flat_increasing():
    result = sweep(constant_model(), SweepSpec("sf_ratio", np.linspace(1, 3, 9), BASE))
    assert len(set(result.predicted_flow)) == 1
    assert result.trend.direction == INCREASING
    assert result.trend.violation_count == 0


def test_rows_follow_grid_and_monotone_model():
    result = sweep(sf_only_model(), SweepSpec("sf_ratio", [1.0, 1.5, 2.0, 2.5], BASE))
    assert result.values == (1.0, 1.5, 2.0, 2.5)
    assert np.all(np.diff(result.predicted_flow) > 0)
    assert result.trend.direction == INCREASING
    flat = sweep(sf_only_model(), SweepSpec("rotation", [10.0, 20.0, 30.0], BASE))
    assert flat.trend.direction == INCREASING and flat.trend.violation_count == 0


def test_extrapolation_flagged():
    result = sweep(constant_model(), SweepSpec("rotation", [0.0, 30.0, 70.0], BASE))
    assert result.extrapolated == (True, False, True)


def test_baseline_key_order_irrelevant():
    reordered = dict(reversed(list(BASE.items())))
    a = sweep(sf_only_model(), SweepSpec("feed_temp", [60.0, 80.0], BASE))
    b = sweep(sf_only_model(), SweepSpec("feed_temp", [60.0, 80.0], reordered))
    assert a == b


@pytest.mark.parametrize("kwargs", [
    {"variable": "pressure", "grid": [1, 2]},
    {"variable": "sf_ratio", "grid": [1.0]},
    {"variable": "sf_ratio", "grid": []},
    {"variable": "sf_ratio", "grid": [2.0, 1.0]},
    {"variable": "sf_ratio", "grid": [1.0, 1.0]},
])
def test_sweep_spec_validation(kwargs):
    with pytest.raises(ValueError):
        SweepSpec(baseline=BASE, **kwargs)


def test_sweep_spec_requires_full_baseline():
    with pytest.raises(ValueError, match="rotation"):
        SweepSpec("sf_ratio", [1, 2], {"feed_temp": 80.0, "solvent_temp": 80.0})


def test_report_strictly_increasing():
    assert monotonicity_report([1.0, 2.0, 3.0]) == monotonicity_report([1, 1.5, 9])
    r = monotonicity_report([1.0, 2.0, 3.0])
    assert (r.direction, r.violation_count) == (INCREASING, 0)


def test_report_single_violation():
    r = monotonicity_report([1.0, 2.0, 1.5, 3.0])
    assert r.direction == NON_MONOTONE
    assert r.violations == ((2, 0.5),)
    assert r.max_violation == 0.5


def test_report_flat():
    r = monotonicity_report([4.0, 4.0, 4.0 + 1e-12])
    assert r.direction == INCREASING and r.violation_count == 0
    assert monotonicity_report([4.0, 4.0, 4.0 - 1e-12]).violation_count == 0


def test_report_decreasing():
    assert monotonicity_report([3.0, 2.0, 2.0, 1.0]).direction == DECREASING


def test_report_empty_rejected():
    with pytest.raises(ValueError):
        monotonicity_report([])


@given(st.lists(st.floats(-100, 100), min_size=2, max_size=20))
def test_reversal_flips_direction(flows):
    diffs = np.diff(flows)
    assume(np.any(np.abs(diffs) > 1e-9))
    fwd, rev = monotonicity_report(flows), monotonicity_report(flows[::-1])
    flip = {INCREASING: DECREASING, DECREASING: INCREASING, NON_MONOTONE: NON_MONOTONE}
    assert rev.direction == flip[fwd.direction]
    assert rev.violation_count == fwd.violation_count


def test_sweep_csv_format():
    result = sweep(constant_model(), SweepSpec("rotation", [10.0, 20.0], BASE))
    lines = result.to_csv().splitlines()
    assert lines[0] == "rotation,predicted_flow_m3hr"
    assert len(lines) == 4
    assert lines[-1] == "# trend: increasing, violations: 0"


def test_scatter_export_counts_and_order():
    ds = generate_synthetic(80, seed=4)
    pairs = scatter_export(constant_model(), ds)
    assert len(pairs) == 80
    assert [a for a, _ in pairs] == list(ds.targets)
    text = scatter_csv(pairs).splitlines()
    assert text[0] == "actual,predicted" and len(text) == 81


def test_scatter_perfect_model_on_diagonal():
    ds = generate_synthetic(5, seed=1)
    model = constant_model()
    flow = float(model.predict(ds.inputs[0]))
    fixed = type(ds).from_arrays(ds.inputs, np.full(5, flow))
    assert all(a == p for a, p in scatter_export(model, fixed))
