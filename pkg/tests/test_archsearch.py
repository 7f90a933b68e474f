import math

import pytest

from rdcann.archsearch import CSV_COLUMNS, CandidateResult, search
from rdcann.data import generate_synthetic
from rdcann.training import TrainConfig

# validation MSE / %Error per hidden size; the H=7 row carries the published optimum 0.034 / 2.854
PUBLISHED_LIKE = {5: (0.08, 4.1), 6: (0.05, 3.3), 7: (0.034, 2.854), 8: (0.041, 3.0)}


def mock_trainer(table):
    def trainer(h, seed, train_set, validation, config):
        if table[h] is None:
            return CandidateResult(h, math.inf, math.inf, math.inf, seed, failed=True)
        val_mse, pct = table[h]
        return CandidateResult(h, val_mse * 0.9, val_mse, pct, seed)
    return trainer


@pytest.fixture(scope="module")
def small_ds():
    return generate_synthetic(60, seed=2, noise_sd=0.01)


def test_mock_selects_seven(small_ds):
    report = search(small_ds, PUBLISHED_LIKE, TrainConfig(), trainer=mock_trainer(PUBLISHED_LIKE))
    assert report.selected == 7
    assert [r.hidden_nodes for r in report.rows] == [5, 6, 7, 8]
    assert report.selected_row.validation_mse == 0.034


def test_parsimony_tie_break(small_ds):
    table = {6: (0.05, 3.0), 9: (0.05, 3.0), 4: (0.07, 2.0)}
    assert search(small_ds, table, trainer=mock_trainer(table)).selected == 6


def test_percent_error_breaks_mse_tie(small_ds):
    table = {6: (0.05, 3.0), 9: (0.05, 2.5)}
    assert search(small_ds, table, trainer=mock_trainer(table)).selected == 9


def test_failed_rows_rank_last(small_ds):
    table = {3: None, 4: (0.2, 9.0)}
    report = search(small_ds, table, trainer=mock_trainer(table))
    assert report.selected == 4
    assert report.rows[0].failed and math.isinf(report.rows[0].validation_mse)


def test_order_independent(small_ds):
    forward = search(small_ds, [5, 6, 7, 8], trainer=mock_trainer(PUBLISHED_LIKE))
    backward = search(small_ds, [8, 7, 6, 5], trainer=mock_trainer(PUBLISHED_LIKE))
    assert forward == backward


def test_per_candidate_seed_and_shared_split(small_ds):
    seen = []

    def trainer(h, seed, train_set, validation, config):
        seen.append((h, seed, train_set.samples, validation.samples))
        return CandidateResult(h, 0.1, 0.1, 1.0, seed)

    search(small_ds, [2, 3], TrainConfig(seed=10), split_seed=4, trainer=trainer)
    assert [(h, s) for h, s, *_ in seen] == [(2, 12), (3, 13)]
    assert seen[0][2:] == seen[1][2:]
    assert len(seen[0][2]) == 48 and len(seen[0][3]) == 12


def test_single_real_candidate(small_ds):
    report = search(small_ds, [7], TrainConfig(iterations=50, seed=1), split_seed=1)
    assert report.selected == 7
    assert len(report.rows) == 1
    row = report.rows[0]
    assert not row.failed and row.train_mse > 0 and row.validation_percent_error > 0


def test_real_search_parallel_matches_serial(small_ds):
    cfg = TrainConfig(iterations=40, seed=3)
    serial = search(small_ds, range(2, 6), cfg, split_seed=3)
    parallel = search(small_ds, range(2, 6), cfg, split_seed=3, n_jobs=4)
    assert serial.to_csv() == parallel.to_csv()
    best = min(r.validation_mse for r in serial.rows)
    assert serial.selected_row.validation_mse == best


def test_divergence_recorded_not_raised(small_ds):
    report = search(small_ds, [2, 3], TrainConfig(learning_rate=500.0, iterations=20), split_seed=0)
    assert all(r.failed for r in report.rows)
    assert report.selected == 2


def test_exports(small_ds):
    report = search(small_ds, PUBLISHED_LIKE, trainer=mock_trainer(PUBLISHED_LIKE))
    lines = report.to_csv().splitlines()
    assert lines[0] == ",".join(CSV_COLUMNS) == "hidden_nodes,train_mse,val_mse,val_pct_error"
    assert lines[3].startswith("7,") and lines[3].endswith(",0.034,2.854")
    table = report.to_table()
    assert "<- selected" in table.splitlines()[4]


def test_rejects_empty_or_invalid_candidates(small_ds):
    with pytest.raises(ValueError):
        search(small_ds, [])
    with pytest.raises(ValueError):
        search(small_ds, [0, 3])
