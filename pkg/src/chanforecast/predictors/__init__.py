"""Channel predictors: sample-and-hold, AR, LSTM, LPCNet and JLPCNet."""

from .baselines import ar_predict, sh_predict
from .beamforming import zf_beamform
from .lpcnet import (
    KINDS,
    NEURAL_KINDS,
    LpcnetConfig,
    config_for_kind,
    init_model,
    jlpcnet_forward,
    lpcnet_forward,
    lstm_baseline_forward,
    parameter_count_formula,
    predict,
)
from .model_io import load_model, save_model
from .training import TrainingError, TrainResult, evaluate_loss, train

__all__ = [
    "ar_predict",
    "sh_predict",
    "zf_beamform",
    "KINDS",
    "NEURAL_KINDS",
    "LpcnetConfig",
    "config_for_kind",
    "init_model",
    "jlpcnet_forward",
    "lpcnet_forward",
    "lstm_baseline_forward",
    "parameter_count_formula",
    "predict",
    "load_model",
    "save_model",
    "TrainingError",
    "TrainResult",
    "evaluate_loss",
    "train",
]
