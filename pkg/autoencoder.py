#!/usr/bin/env python3
# -*- coding: utf-8 -*-

"""
numpy 로 직접 짠 fully connected autoencoder.

  layer sizes : [p, h1, h2, m, h2', h1', p]   (hidden 5층)
  activation  : relu, relu, linear(bottleneck), relu, relu, sigmoid(output)
  weight      : (fan_out x fan_in),  batch 는 (feature x batch) column 배치
  loss        : (1/b) * sum_i ||s~_i - s_i||^2
  optimizer   : mini-batch gradient descent, 고정 learning rate
"""

import logging
import struct
from dataclasses import dataclass
from pathlib import Path
from typing import List, Sequence, Tuple, Union

import numpy as np
from scipy.special import expit
from tqdm import tqdm

from errors import DataFormatError, DivergenceError, ParameterError

logger = logging.getLogger(__name__)

N_LAYER_SIZES = 7
BOTTLENECK = 3  # layer_sizes 에서 bottleneck 위치
ACTIVATIONS = ("relu", "relu", "linear", "relu", "relu", "sigmoid")
TOY_HIDDEN = (64, 32, 2, 32, 64)

CHECKPOINT_MAGIC = b"LAEN"
CHECKPOINT_VERSION = 1


@dataclass(frozen=True)
class TrainConfig:
    batch_size: int = 32
    epochs: int = 10
    learning_rate: float = 0.05
    seed: int = 0
    shuffle: bool = True
    progress: bool = False

    def validate(self) -> None:
        if self.batch_size < 1:
            raise ParameterError(f"batch_size must be >= 1, got {self.batch_size}")
        if self.epochs < 1:
            raise ParameterError(f"epochs must be >= 1, got {self.epochs}")
        if not (np.isfinite(self.learning_rate) and self.learning_rate >= 0):
            raise ParameterError(f"learning_rate must be finite and >= 0, got {self.learning_rate}")


@dataclass(frozen=True)
class NetworkParams:
    layer_sizes: Tuple[int, ...]
    weights: Tuple[np.ndarray, ...]
    biases: Tuple[np.ndarray, ...]
    activations: Tuple[str, ...] = ACTIVATIONS

    def __post_init__(self):
        sizes = tuple(int(s) for s in self.layer_sizes)
        if len(sizes) != N_LAYER_SIZES or any(s < 1 for s in sizes):
            raise ParameterError(f"need {N_LAYER_SIZES} positive layer sizes (input + 5 hidden + output), got {sizes}")
        if sizes[0] != sizes[-1]:
            raise ParameterError(f"input size {sizes[0]} != output size {sizes[-1]}")
        if tuple(self.activations) != ACTIVATIONS:
            raise ParameterError(f"activations must be {ACTIVATIONS}, got {self.activations}")
        if len(self.weights) != N_LAYER_SIZES - 1 or len(self.biases) != N_LAYER_SIZES - 1:
            raise ParameterError("need one weight matrix and bias vector per layer")

        for i, (w, b) in enumerate(zip(self.weights, self.biases)):
            if w.shape != (sizes[i + 1], sizes[i]) or b.shape != (sizes[i + 1],):
                raise ParameterError(f"layer {i}: weight {w.shape} / bias {b.shape} do not match sizes {sizes}")
            if not (np.all(np.isfinite(w)) and np.all(np.isfinite(b))):
                raise ParameterError(f"layer {i} has non-finite parameters")

        object.__setattr__(self, "layer_sizes", sizes)
        object.__setattr__(self, "weights", tuple(self.weights))
        object.__setattr__(self, "biases", tuple(self.biases))
        object.__setattr__(self, "activations", tuple(self.activations))

    @property
    def input_size(self) -> int:
        return self.layer_sizes[0]

    @property
    def latent_size(self) -> int:
        return self.layer_sizes[BOTTLENECK]


@dataclass(frozen=True)
class ForwardCache:
    # activations[0] = 입력, activations[i+1] = f(pre[i])
    activations: Tuple[np.ndarray, ...]
    pre: Tuple[np.ndarray, ...]

    @property
    def bottleneck(self) -> np.ndarray:
        return self.activations[BOTTLENECK]


@dataclass(frozen=True)
class Gradients:
    weights: Tuple[np.ndarray, ...]
    biases: Tuple[np.ndarray, ...]
    loss: float


@dataclass(frozen=True)
class Embedding:
    z: np.ndarray


# -----------------------
# 1) 구조 / 초기화
# -----------------------
def layer_sizes_for(p: int, hidden: Sequence[int]) -> Tuple[int, ...]:
    hidden = tuple(int(h) for h in hidden)
    if len(hidden) != 5:
        raise ParameterError(f"need 5 hidden sizes, got {hidden}")
    return (int(p),) + hidden + (int(p),)


def auto_architecture(p: int, k: int) -> Tuple[int, ...]:
    """
    hidden 은 p 수준으로: [min(512,2p), min(256,p), max(2,k), min(256,p), min(512,2p)]
    """
    outer, inner = min(512, 2 * p), min(256, p)
    return (outer, inner, max(2, k), inner, outer)


def init_network(layer_sizes: Sequence[int], seed: int = 0) -> NetworkParams:
    sizes = tuple(int(s) for s in layer_sizes)
    if len(sizes) != N_LAYER_SIZES:
        raise ParameterError(f"need {N_LAYER_SIZES} layer sizes, got {len(sizes)}: {sizes}")

    rng = np.random.default_rng(seed)
    weights, biases = [], []
    for fan_in, fan_out in zip(sizes[:-1], sizes[1:]):
        limit = np.sqrt(6.0 / (fan_in + fan_out))
        weights.append(rng.uniform(-limit, limit, size=(fan_out, fan_in)))
        biases.append(np.zeros(fan_out))
    return NetworkParams(layer_sizes=sizes, weights=tuple(weights), biases=tuple(biases))


# -----------------------
# 2) forward / loss / backward
# -----------------------
def _activate(kind: str, z: np.ndarray) -> np.ndarray:
    if kind == "relu":
        return np.maximum(z, 0.0)
    if kind == "sigmoid":
        return expit(z)
    return z


def _derivative(kind: str, z: np.ndarray, a: np.ndarray) -> np.ndarray:
    if kind == "relu":
        # z == 0 에서는 0
        return (z > 0).astype(z.dtype)
    if kind == "sigmoid":
        return a * (1.0 - a)
    return np.ones_like(z)


def _as_batch(params: NetworkParams, batch) -> np.ndarray:
    x = np.asarray(getattr(batch, "s", batch), dtype=np.float64)
    if x.ndim == 1:
        x = x[:, None]
    if x.ndim != 2 or x.shape[0] != params.input_size:
        raise ParameterError(f"batch must have {params.input_size} rows, got shape {x.shape}")
    return x


def _forward(params: NetworkParams, x: np.ndarray, upto: int) -> ForwardCache:
    acts, pre = [x], []
    for i in range(upto):
        z = params.weights[i] @ acts[-1] + params.biases[i][:, None]
        pre.append(z)
        acts.append(_activate(params.activations[i], z))
    return ForwardCache(activations=tuple(acts), pre=tuple(pre))


def forward(params: NetworkParams, batch) -> Tuple[np.ndarray, ForwardCache]:
    x = _as_batch(params, batch)
    cache = _forward(params, x, len(params.weights))
    return cache.activations[-1], cache


def reconstruction_loss(reconstruction, target) -> float:
    r = np.asarray(reconstruction, dtype=np.float64)
    t = np.asarray(getattr(target, "s", target), dtype=np.float64)
    if r.shape != t.shape:
        raise ParameterError(f"shape mismatch: reconstruction {r.shape} vs target {t.shape}")
    if r.ndim == 1:
        r, t = r[:, None], t[:, None]
    return float(np.sum((r - t) ** 2) / r.shape[1])


def backward(params: NetworkParams, batch, target) -> Gradients:
    """
    reconstruction_loss 의 정확한 gradient (reverse accumulation).
    """
    x = _as_batch(params, batch)
    t = _as_batch(params, target)
    if t.shape != x.shape:
        raise ParameterError(f"shape mismatch: batch {x.shape} vs target {t.shape}")

    cache = _forward(params, x, len(params.weights))
    out = cache.activations[-1]
    b = x.shape[1]
    loss = float(np.sum((out - t) ** 2) / b)

    n_layers = len(params.weights)
    gw: List[np.ndarray] = [None] * n_layers
    gb: List[np.ndarray] = [None] * n_layers

    grad_a = 2.0 * (out - t) / b
    for i in reversed(range(n_layers)):
        delta = grad_a * _derivative(params.activations[i], cache.pre[i], cache.activations[i + 1])
        gw[i] = delta @ cache.activations[i].T
        gb[i] = delta.sum(axis=1)
        if i > 0:
            grad_a = params.weights[i].T @ delta

    return Gradients(weights=tuple(gw), biases=tuple(gb), loss=loss)


# -----------------------
# 3) 학습 / 인코딩
# -----------------------
def train(params: NetworkParams, s, config: TrainConfig) -> Tuple[NetworkParams, List[float]]:
    """
    epochs x ceil(n / batch_size) 번 gradient step.
    returns: (학습된 params, epoch 평균 loss 리스트)
    """
    config.validate()
    x = _as_batch(params, s)
    n = x.shape[1]
    if config.batch_size > n:
        raise ParameterError(f"batch_size={config.batch_size} exceeds the {n} columns of S")

    rng = np.random.default_rng(config.seed)
    # work 는 weights/biases 배열을 그대로 참조하고, 배열은 제자리 갱신
    weights = [w.copy() for w in params.weights]
    biases = [b.copy() for b in params.biases]
    work = NetworkParams(layer_sizes=params.layer_sizes, weights=tuple(weights), biases=tuple(biases))
    lr = config.learning_rate
    history: List[float] = []
    step = 0

    epochs = tqdm(range(1, config.epochs + 1), desc="train", unit="epoch", disable=not config.progress)
    for epoch in epochs:
        order = rng.permutation(n) if config.shuffle else np.arange(n)
        total = 0.0
        for step, start in enumerate(range(0, n, config.batch_size), start=1):
            cols = order[start:start + config.batch_size]
            batch = x[:, cols]
            grads = backward(work, batch, batch)
            if not np.isfinite(grads.loss):
                raise DivergenceError(epoch, step, grads.loss)
            total += grads.loss * cols.size

            for i in range(len(weights)):
                weights[i] -= lr * grads.weights[i]
                biases[i] -= lr * grads.biases[i]

        history.append(total / n)
        epochs.set_postfix(loss=f"{history[-1]:.5g}")
        logger.debug("[TRAIN] epoch %d loss=%.6g", epoch, history[-1])

    try:
        trained = NetworkParams(
            layer_sizes=params.layer_sizes,
            weights=tuple(w.copy() for w in weights),
            biases=tuple(b.copy() for b in biases),
        )
    except ParameterError:
        raise DivergenceError(config.epochs, step, float("nan"))
    return trained, history


def encode(params: NetworkParams, s) -> Embedding:
    """
    bottleneck(linear) 까지만 forward. (m x n)
    """
    x = _as_batch(params, s)
    cache = _forward(params, x, BOTTLENECK)
    return Embedding(z=cache.activations[-1])


# -----------------------
# 4) 체크포인트
#   "LAEN", u32 version, u32 count, u32 sizes[count],
#   이후 layer 별 weight(fan_out x fan_in), bias  (float64 LE, row-major)
# -----------------------
def save_checkpoint(params: NetworkParams, path: Union[str, Path]) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    sizes = params.layer_sizes
    with path.open("wb") as f:
        f.write(struct.pack("<4sII", CHECKPOINT_MAGIC, CHECKPOINT_VERSION, len(sizes)))
        f.write(struct.pack(f"<{len(sizes)}I", *sizes))
        for w, b in zip(params.weights, params.biases):
            f.write(np.ascontiguousarray(w, dtype="<f8").tobytes())
            f.write(np.ascontiguousarray(b, dtype="<f8").tobytes())
    logger.info("[SAVE] %s", path)
    return path


def load_checkpoint(path: Union[str, Path]) -> NetworkParams:
    path = Path(path)
    buf = path.read_bytes()
    if len(buf) < 12:
        raise DataFormatError(f"{path}: truncated header")
    magic, version, count = struct.unpack_from("<4sII", buf)
    if magic != CHECKPOINT_MAGIC:
        raise DataFormatError(f"{path}: bad magic {magic!r}, expected {CHECKPOINT_MAGIC!r}")
    if version != CHECKPOINT_VERSION:
        raise DataFormatError(f"{path}: unsupported version {version}")
    if count != N_LAYER_SIZES or len(buf) < 12 + 4 * count:
        raise DataFormatError(f"{path}: bad layer count {count}")
    sizes = struct.unpack_from(f"<{count}I", buf, 12)

    offset = 12 + 4 * count
    expected = offset + 8 * sum(o * i + o for i, o in zip(sizes[:-1], sizes[1:]))
    if len(buf) != expected:
        raise DataFormatError(f"{path}: expected {expected} bytes, got {len(buf)}")

    weights, biases = [], []
    for fan_in, fan_out in zip(sizes[:-1], sizes[1:]):
        w = np.frombuffer(buf, dtype="<f8", count=fan_out * fan_in, offset=offset).reshape(fan_out, fan_in)
        offset += 8 * fan_out * fan_in
        b = np.frombuffer(buf, dtype="<f8", count=fan_out, offset=offset)
        offset += 8 * fan_out
        weights.append(w.astype(np.float64))
        biases.append(b.astype(np.float64))
    return NetworkParams(layer_sizes=tuple(sizes), weights=tuple(weights), biases=tuple(biases))
