"""Named parameter store and initialization."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Iterator

import numpy as np

# roles understood by init_params
WEIGHT = "weight"
BIAS = "bias"
ADJUST_WEIGHT = "adjust_weight"
ADJUST_BIAS = "adjust_bias"
_ROLES = (WEIGHT, BIAS, ADJUST_WEIGHT, ADJUST_BIAS)

ADJUST_WEIGHT_SCALE = 0.01


@dataclass(frozen=True)
class ParamSpec:
    name: str
    shape: tuple[int, ...]
    role: str = WEIGHT

    def __post_init__(self):
        if self.role not in _ROLES:
            raise ValueError(f"unknown parameter role {self.role!r}")
        if any(int(d) < 1 for d in self.shape):
            raise ValueError(f"{self.name}: all dimensions must be >= 1, got {self.shape}")


class ParamStore:
    """Ordered mapping of parameter name to a real array, plus gradient buffers.

    Shapes are fixed at construction. Assigning a value of a different shape
    raises, which keeps checkpoints and optimizer state aligned.
    """

    def __init__(self, arrays: dict[str, np.ndarray] | Iterable[tuple[str, np.ndarray]] = ()):
        items = arrays.items() if isinstance(arrays, dict) else arrays
        self._values: dict[str, np.ndarray] = {}
        for name, value in items:
            if name in self._values:
                raise ValueError(f"duplicate parameter name {name!r}")
            value = np.asarray(value)
            dtype = np.float32 if value.dtype == np.float32 else np.float64
            self._values[name] = np.array(value, dtype=dtype)
        self.grads: dict[str, np.ndarray] = {k: np.zeros_like(v) for k, v in self._values.items()}

    def __getitem__(self, name: str) -> np.ndarray:
        return self._values[name]

    def __setitem__(self, name: str, value: np.ndarray) -> None:
        value = np.asarray(value, dtype=self._values[name].dtype)
        if value.shape != self._values[name].shape:
            raise ValueError(f"{name}: shape {value.shape} != {self._values[name].shape}")
        self._values[name][...] = value

    def __contains__(self, name: str) -> bool:
        return name in self._values

    def __iter__(self) -> Iterator[str]:
        return iter(self._values)

    def __len__(self) -> int:
        return len(self._values)

    def items(self):
        return self._values.items()

    def names(self) -> list[str]:
        return list(self._values)

    def shapes(self) -> dict[str, tuple[int, ...]]:
        return {k: v.shape for k, v in self._values.items()}

    @property
    def total_count(self) -> int:
        return int(sum(v.size for v in self._values.values()))

    @property
    def dtype(self):
        for v in self._values.values():
            return v.dtype
        return np.dtype(np.float64)

    def astype(self, dtype) -> "ParamStore":
        return ParamStore({k: v.astype(dtype) for k, v in self._values.items()})

    def copy(self) -> "ParamStore":
        return ParamStore({k: v.copy() for k, v in self._values.items()})

    def zero_grad(self) -> None:
        for g in self.grads.values():
            g[...] = 0.0

    def flat(self) -> np.ndarray:
        if not self._values:
            return np.zeros(0)
        return np.concatenate([v.ravel() for v in self._values.values()])

    def flat_grad(self) -> np.ndarray:
        if not self.grads:
            return np.zeros(0)
        return np.concatenate([g.ravel() for g in self.grads.values()])

    def set_flat(self, vec: np.ndarray) -> None:
        vec = np.asarray(vec)
        if vec.size != self.total_count:
            raise ValueError(f"flat vector has {vec.size} entries, store has {self.total_count}")
        pos = 0
        for v in self._values.values():
            v[...] = vec[pos:pos + v.size].reshape(v.shape)
            pos += v.size

    def norm(self) -> float:
        return float(np.sqrt(sum(float(np.sum(v.astype(np.float64) ** 2)) for v in self._values.values())))

    def __repr__(self) -> str:
        return f"ParamStore({len(self)} tensors, {self.total_count} values)"


def init_params(specs: Iterable[ParamSpec], rng: np.random.Generator, dtype=np.float64) -> ParamStore:
    """Build a store from layer specs.

    Weights are uniform in +-1/sqrt(fan_in) with fan_in the last dimension.
    Plain biases start at zero. Output layers of the adjuster MLPs get their
    weights shrunk by ``ADJUST_WEIGHT_SCALE`` and biases set to one, so the
    Hadamard adjustments start close to the identity.
    """
    arrays = []
    for spec in specs:
        shape = tuple(int(d) for d in spec.shape)
        if spec.role in (WEIGHT, ADJUST_WEIGHT):
            bound = 1.0 / np.sqrt(shape[-1])
            w = rng.uniform(-bound, bound, size=shape)
            if spec.role == ADJUST_WEIGHT:
                w *= ADJUST_WEIGHT_SCALE
        elif spec.role == ADJUST_BIAS:
            w = np.ones(shape)
        else:
            w = np.zeros(shape)
        arrays.append((spec.name, w.astype(dtype)))
    return ParamStore(arrays)
