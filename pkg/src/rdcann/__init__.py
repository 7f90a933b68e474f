"""Feed-forward perceptron surrogate for product flow from a rotating disc contactor."""
from .archsearch import ArchSearchReport, search
from .data import Dataset, NormalizationSpec, Sample, generate_synthetic, load_csv, split
from .estimator import RDCFlowRegressor, fit_flow_model
from .metrics import mse, percent_error, relative_errors
from .model import FlowModel
from .network import Network, forward, init_network, sigmoid
from .parametric import SweepSpec, monotonicity_report, sweep
from .training import TrainConfig, backprop_gradients, gradient_check, train

__version__ = "0.1.0"
