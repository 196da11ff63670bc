"""Auxiliary processes for the wild bootstrap.

The process is a discretised Ornstein-Uhlenbeck chain

    W_t = exp(-1/l) W_{t-1} + sqrt(1 - exp(-2/l)) eps_t,

started from its stationary N(0, 1) law, so every row of the triangular
array is exactly stationary with autocorrelation ``exp(-|r|/l)``.

Random streams are keyed by ``(seed, replicate_index, purpose)`` through
:class:`numpy.random.SeedSequence` spawn keys; replicates never share
generator state and can be produced in any order.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import IntEnum

import numpy as np
from scipy.signal import lfilter

DEFAULT_BLOCK_LENGTH = 20.0
DEFAULT_REPLICATES = 300


class Purpose(IntEnum):
    """Stream tags so that distinct uses of one seed never collide."""

    W = 0
    W_X = 1
    W_Y = 2
    PERMUTATION = 3
    SHIFT = 4
    DATA = 5
    DATA_X = 6
    DATA_Y = 7


def stream(seed: int, *key: int) -> np.random.Generator:
    """Independent generator for the given integer key path."""
    ss = np.random.SeedSequence(entropy=int(seed) & (2**64 - 1), spawn_key=tuple(int(k) for k in key))
    return np.random.default_rng(ss)


@dataclass(frozen=True)
class BootstrapConfig:
    block_length: float = DEFAULT_BLOCK_LENGTH
    num_replicates: int = DEFAULT_REPLICATES
    variant: str = "vb2"
    seed: int = 0

    def __post_init__(self):
        if not self.block_length >= 1:
            raise ValueError(f"block_length must be >= 1, got {self.block_length}")
        if int(self.num_replicates) < 1:
            raise ValueError(f"num_replicates must be >= 1, got {self.num_replicates}")
        if self.variant not in ("vb1", "vb2"):
            raise ValueError(f"variant must be 'vb1' or 'vb2', got {self.variant!r}")


def ar_coefficient(block_length: float) -> float:
    return float(np.exp(-1.0 / block_length))


def _ou_filter(eps: np.ndarray, w0: np.ndarray, block_length: float) -> np.ndarray:
    a = ar_coefficient(block_length)
    b = np.sqrt(-np.expm1(-2.0 / block_length))
    # y_t = a y_{t-1} + b eps_t with y_0 = w0, along axis 0
    zi = a * np.reshape(w0, (1,) + eps.shape[1:])
    return lfilter([b], [1.0, -a], eps, axis=0, zi=zi)[0]


def generate_w(n: int, config: BootstrapConfig, replicate_index: int,
               purpose: int = Purpose.W) -> np.ndarray:
    """One raw (uncentered) bootstrap series of length ``n``."""
    if n < 1:
        raise ValueError("n must be >= 1")
    rng = stream(config.seed, purpose, replicate_index)
    w0 = rng.standard_normal(1)
    eps = rng.standard_normal(n)
    return _ou_filter(eps, w0, config.block_length)


def generate_w_matrix(n: int, config: BootstrapConfig, purpose: int = Purpose.W) -> np.ndarray:
    """All replicates as columns of an ``(n, B)`` array.

    Column ``b`` is bit-identical to ``generate_w(n, config, b, purpose)``.
    """
    B = int(config.num_replicates)
    w0 = np.empty(B)
    eps = np.empty((n, B))
    for b in range(B):
        rng = stream(config.seed, purpose, b)
        w0[b] = rng.standard_normal()
        eps[:, b] = rng.standard_normal(n)
    return _ou_filter(eps, w0, config.block_length)


def center_w(W) -> np.ndarray:
    """Subtract the empirical mean (per column for 2-D input)."""
    W = np.asarray(W, dtype=float)
    return W - W.mean(axis=0, keepdims=True)
