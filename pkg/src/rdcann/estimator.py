from __future__ import annotations

from sklearn.base import BaseEstimator, RegressorMixin
from sklearn.utils.validation import check_array, check_is_fitted, check_X_y

from .data import INPUT_FIELDS, Dataset, fit_normalizer, normalize
from .model import FlowModel
from .network import init_network
from .training import TrainConfig, TrainHistory, train


def fit_flow_model(train_set: Dataset, hidden_dim: int, config: TrainConfig) -> tuple[FlowModel, TrainHistory]:
    """Fit the normalizer on ``train_set``, initialize a 4-H-1 network from ``config.seed`` and train it."""
    spec = fit_normalizer(train_set)
    data = normalize(train_set, spec)
    net = init_network(len(INPUT_FIELDS), hidden_dim, 1, config.seed)
    net, history = train(net, data.inputs, data.targets, config)
    return FlowModel(net, spec, train_set.column_means()), history


class RDCFlowRegressor(RegressorMixin, BaseEstimator):
    """Product-flow regressor: one sigmoid hidden layer, linear output, min-max scaled I/O.

    ``X`` columns are (sf_ratio, feed_temp, solvent_temp, rotation) in raw units and
    ``y`` is product flow in m3/hr (strictly positive). Predictions come back in m3/hr.

    Fitted attributes: ``model_`` (:class:`FlowModel`), ``network_``,
    ``normalizer_``, ``history_``, ``n_features_in_``.
    """

    def __init__(self, hidden_dim=7, learning_rate=0.05, momentum=0.9, iterations=100_000,
                 seed=0, shuffle_each_epoch=True, record_every=100):
        self.hidden_dim = hidden_dim
        self.learning_rate = learning_rate
        self.momentum = momentum
        self.iterations = iterations
        self.seed = seed
        self.shuffle_each_epoch = shuffle_each_epoch
        self.record_every = record_every

    def _config(self) -> TrainConfig:
        return TrainConfig(
            learning_rate=self.learning_rate,
            momentum=self.momentum,
            iterations=self.iterations,
            seed=self.seed,
            shuffle_each_epoch=self.shuffle_each_epoch,
            record_every=self.record_every,
        )

    def fit(self, X, y):
        X, y = check_X_y(X, y, y_numeric=True, dtype="float64")
        if X.shape[1] != len(INPUT_FIELDS):
            raise ValueError(f"expected {len(INPUT_FIELDS)} input columns {INPUT_FIELDS}, got {X.shape[1]}")
        self.model_, self.history_ = fit_flow_model(Dataset.from_arrays(X, y, "fit"), self.hidden_dim, self._config())
        self.network_ = self.model_.network
        self.normalizer_ = self.model_.normalizer
        self.n_features_in_ = X.shape[1]
        return self

    def predict(self, X):
        check_is_fitted(self, "model_")
        X = check_array(X, dtype="float64")
        if X.shape[1] != self.n_features_in_:
            raise ValueError(f"X has {X.shape[1]} features, but this estimator expects {self.n_features_in_}")
        return self.model_.predict(X)

    @classmethod
    def from_model(cls, model: FlowModel) -> "RDCFlowRegressor":
        """Wrap an already trained (e.g. loaded-from-file) model."""
        est = cls(hidden_dim=model.network.hidden_dim)
        est.model_ = model
        est.network_ = model.network
        est.normalizer_ = model.normalizer
        est.history_ = None
        est.n_features_in_ = model.network.input_dim
        return est
