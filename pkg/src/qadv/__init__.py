"""Variational quantum classifiers, adversarial attacks and defenses on a dense state-vector simulator."""

from .attacks import AttackConfig, AttackReport, evaluate_attack, fidelity
from .classifier import (
    CircuitModel,
    TrainConfig,
    amplitude_encode,
    forward,
    load_model,
    predict,
    save_model,
    train,
)
from .dataset import Dataset
from .errors import (
    ConfigurationError,
    DegenerateParameterError,
    FormatError,
    InputError,
    QadvError,
    TrainingError,
)

__version__ = "0.1.0"

__all__ = [
    "AttackConfig", "AttackReport", "CircuitModel", "ConfigurationError", "Dataset",
    "DegenerateParameterError", "FormatError", "InputError", "QadvError", "TrainConfig",
    "TrainingError", "amplitude_encode", "evaluate_attack", "fidelity", "forward",
    "load_model", "predict", "save_model", "train",
]
