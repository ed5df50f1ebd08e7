"""From-scratch differentiable building blocks with hand-written backward passes."""

from .adam import AdamState, adam_update
from .checkpoint import load_params, read_params, save_params, write_params
from .layers import (
    LstmState,
    lstm_sequence_backward,
    lstm_sequence_forward,
    lstm_step,
    mlp2_backward,
    mlp2_forward,
    relu,
    sigmoid,
)
from .params import ParamSpec, ParamStore, init_params

__all__ = [
    "AdamState",
    "adam_update",
    "load_params",
    "read_params",
    "save_params",
    "write_params",
    "LstmState",
    "lstm_step",
    "lstm_sequence_forward",
    "lstm_sequence_backward",
    "mlp2_forward",
    "mlp2_backward",
    "relu",
    "sigmoid",
    "ParamSpec",
    "ParamStore",
    "init_params",
]
