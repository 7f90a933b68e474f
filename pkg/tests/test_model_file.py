import numpy as np
import pytest

from rdcann.data import NormalizationSpec, generate_synthetic
from rdcann.model import FlowModel, ModelFormatError
from rdcann.network import Network, init_network


def make_model(hidden=7, seed=0):
    spec = NormalizationSpec((1.0, 60.0, 60.0, 10.0, 3.5), (3.0, 110.0, 110.0, 60.0, 11.75))
    return FlowModel(init_network(4, hidden, 1, seed), spec, {"sf_ratio": 2.0, "feed_temp": 85.0,
                                                              "solvent_temp": 85.0, "rotation": 35.0})


def test_round_trip_is_exact(tmp_path):
    model = make_model()
    path = tmp_path / "m.txt"
    model.save(path)
    loaded = FlowModel.load(path)
    assert loaded.network.equals(model.network)
    assert loaded.network.n_parameters == 43
    assert loaded.normalizer == model.normalizer
    assert loaded.baseline == model.baseline
    assert loaded.to_text() == model.to_text()


def test_round_trip_awkward_floats():
    net = Network([[0.1, 1 / 3, -2.5e-300, 1e300]], [np.nextafter(0.5, 1)], [[-0.0]], [5e-324])
    spec = NormalizationSpec((0.1, 1 / 7, 0.3, 0.4, 1e-7), (0.7, 0.2, 1e5, 2.0, 1 / 3))
    loaded = FlowModel.from_text(FlowModel(net, spec).to_text())
    assert loaded.network.equals(net)
    assert loaded.normalizer == spec


def test_layout():
    lines = make_model(hidden=3).to_text().splitlines()
    assert lines[:4] == ["rdcann-model v1", "dims 4 3 1", "activation hidden=sigmoid output=linear", "hidden_weights"]
    assert lines[7] == "hidden_biases"
    assert lines[9] == "output_weights"
    assert lines[11] == "output_biases"
    assert lines[13] == "norm_range 0.10000000000000001 0.90000000000000002"
    assert lines[14].startswith("norm sf_ratio ")
    assert lines[18].startswith("norm product_flow_m3hr ")
    assert lines[19].startswith("baseline sf_ratio ")
    assert all(len(v.replace("-", "").replace(".", "").split("e")[0]) >= 17
               for v in lines[4].split())


def test_baseline_section_is_optional():
    text = make_model().to_text()
    stripped = "\n".join(l for l in text.splitlines() if not l.startswith("baseline"))
    assert FlowModel.from_text(stripped).baseline == {}


@pytest.mark.parametrize("mutate", [
    lambda t: t.replace("rdcann-model v1", "rdcann-model v2"),
    lambda t: t.replace("dims 4 7 1", "dims 4 7"),
    lambda t: t.replace("output=linear", "output=sigmoid"),
    lambda t: t.replace("hidden_biases", "hidden_bias"),
    lambda t: t.replace("norm feed_temp_c", "norm feed_temp"),
    lambda t: t.split("norm product_flow_m3hr")[0],
    lambda t: t + "extra line\n",
    lambda t: t.replace("dims 4 7 1", "dims 3 7 1"),
])
def test_malformed_files_rejected(mutate):
    with pytest.raises(ModelFormatError):
        FlowModel.from_text(mutate(make_model().to_text()))


def test_non_numeric_weight_rejected():
    lines = make_model().to_text().splitlines()
    lines[4] = "a b c d"
    with pytest.raises(ModelFormatError, match="non-numeric"):
        FlowModel.from_text("\n".join(lines))


def test_dimension_mismatch_with_schema_rejected():
    spec = NormalizationSpec((0,) * 5, (1,) * 5)
    with pytest.raises(ModelFormatError):
        FlowModel(init_network(3, 4, 1, 0), spec)


def test_predict_single_and_batch_agree():
    model = make_model()
    X = generate_synthetic(5, seed=0).inputs
    batch = model.predict(X)
    assert batch.shape == (5,)
    for row, value in zip(X, batch):
        assert model.predict(row) == pytest.approx(value, rel=1e-14)
