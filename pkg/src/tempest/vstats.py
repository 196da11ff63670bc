"""Naive V-statistics over all n^m index tuples.

These are deliberately O(n^m) and exist as ground truth for the fast
quadratic-form implementations in :mod:`tempest.mmd` and :mod:`tempest.hsic`.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Callable, Optional, Sequence

import numpy as np

from .wild_bootstrap import center_w

# maximum number of core evaluations a naive sum may perform
NAIVE_BUDGET = 32**4


@dataclass(frozen=True)
class Core:
    """Symmetric function of ``arity`` observations."""

    arity: int
    eval: Callable[..., float]
    # optional: maps the whole sample to the full n^m array of core values
    tensor: Optional[Callable[[Sequence], np.ndarray]] = None

    def __post_init__(self):
        if self.arity < 2:
            raise ValueError("core arity must be >= 2")

    def __call__(self, *z) -> float:
        return self.eval(*z)


@dataclass(frozen=True)
class VStatValue:
    value: float
    n: int

    @property
    def normalized(self) -> float:
        return self.n * self.value


def _check_budget(n: int, m: int):
    if n < 1:
        raise ValueError("need at least one observation")
    if n**m > NAIVE_BUDGET:
        raise ValueError(f"naive V-statistic with n={n}, m={m} exceeds budget of {NAIVE_BUDGET} terms")


def _weighted_sum(h: Core, Z: Sequence, weights) -> float:
    n = len(Z)
    _check_budget(n, h.arity)
    if h.tensor is not None:
        T = np.asarray(h.tensor(Z), dtype=float)
        if T.shape != (n,) * h.arity:
            raise ValueError(f"core tensor has shape {T.shape}, expected {(n,) * h.arity}")
        if weights is not None:
            w = np.asarray(weights, dtype=float)
            T = T * np.multiply.outer(w, w).reshape((n, n) + (1,) * (h.arity - 2))
        return float(T.sum()) / n**h.arity
    total = 0.0
    for idx in itertools.product(range(n), repeat=h.arity):
        w = 1.0 if weights is None else weights[idx[0]] * weights[idx[1]]
        if w == 0.0:
            continue
        total += w * h(*(Z[i] for i in idx))
    return total / n**h.arity


def v_naive(h: Core, Z: Sequence) -> VStatValue:
    return VStatValue(_weighted_sum(h, Z, None), len(Z))


def vb1_naive(h: Core, Z: Sequence, W) -> VStatValue:
    W = np.asarray(W, dtype=float)
    if len(W) != len(Z):
        raise ValueError(f"length mismatch: {len(W)} weights for {len(Z)} observations")
    return VStatValue(_weighted_sum(h, Z, W), len(Z))


def vb2_naive(h: Core, Z: Sequence, W) -> VStatValue:
    W = np.asarray(W, dtype=float)
    if len(W) != len(Z):
        raise ValueError(f"length mismatch: {len(W)} weights for {len(Z)} observations")
    return VStatValue(_weighted_sum(h, Z, center_w(W)), len(Z))


def check_symmetry(h: Core, args: Sequence, rng: np.random.Generator, trials: int = 10,
                   rtol: float = 1e-12) -> bool:
    """Spot-check that ``h`` is invariant under random argument permutations."""
    ref = h(*args)
    for _ in range(trials):
        perm = rng.permutation(h.arity)
        val = h(*(args[p] for p in perm))
        if not np.isclose(val, ref, rtol=rtol, atol=rtol * max(1.0, abs(ref))):
            return False
    return True
