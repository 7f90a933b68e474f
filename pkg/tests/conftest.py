import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from rdcann.data import generate_synthetic, split  # noqa: E402
from rdcann.estimator import fit_flow_model  # noqa: E402
from rdcann.training import TrainConfig  # noqa: E402

PROTOCOL_EPOCHS = 5000


@pytest.fixture(scope="session")
def protocol_split():
    ds = generate_synthetic(400, seed=1, noise_sd=0.01)
    return ds, *split(ds, 0.8, seed=1)


@pytest.fixture(scope="session")
def protocol_model(protocol_split):
    _, train_set, _ = protocol_split
    model, _ = fit_flow_model(train_set, 7, TrainConfig(iterations=PROTOCOL_EPOCHS, seed=1))
    return model


ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
