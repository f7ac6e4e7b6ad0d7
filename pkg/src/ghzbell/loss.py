"""Photon loss on N-photon GHZ qubits.

Each photon is lost independently with probability ``eta``. Tracing out a
lost photon dephases the logical qubit: measuring the lost photon's
environment in the H/V basis unravels the channel into "nothing" or a
logical Z, each with probability 1/2. One fair coin per lost photon, XORed,
reproduces this for any number of losses short of the whole qubit, and
composes across stages. Once every photon is gone there is nothing left to
dephase; the branch engine treats that qubit as traced out.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import TYPE_CHECKING

import numpy as np

if TYPE_CHECKING:
    from .ghz import LogicalQubit


def _check_eta(eta: float) -> float:
    eta = float(eta)
    if not 0.0 <= eta <= 1.0:
        raise ValueError(f"loss rate must lie in [0, 1], got {eta}")
    return eta


@dataclass(frozen=True)
class LossChannel:
    eta: float

    def __post_init__(self):
        _check_eta(self.eta)

    @classmethod
    def from_decay(cls, gamma: float, t: float) -> "LossChannel":
        return cls(1.0 - math.exp(-gamma * t))


@dataclass(frozen=True)
class LossEvent:
    mask: tuple[bool, ...]
    z_flip: bool = False

    @property
    def k(self) -> int:
        return sum(self.mask)


def sample_loss(n: int, eta: float, rng: np.random.Generator) -> LossEvent:
    eta = _check_eta(eta)
    mask = rng.random(n) < eta
    coins = rng.random(n) < 0.5
    z = bool(np.logical_xor.reduce(coins & mask)) if n else False
    return LossEvent(tuple(bool(m) for m in mask), z)


def sample_loss_batch(trials: int, n: int, eta: float, rng: np.random.Generator) -> tuple[np.ndarray, np.ndarray]:
    """Vectorized :func:`sample_loss`: boolean masks ``(trials, n)`` and Z flips ``(trials,)``."""
    eta = _check_eta(eta)
    mask = rng.random((trials, n)) < eta
    coins = rng.random((trials, n)) < 0.5
    z = np.logical_xor.reduce(coins & mask, axis=1) if n else np.zeros(trials, bool)
    return mask, z


def apply_loss(q: "LogicalQubit", ev: LossEvent) -> "LogicalQubit":
    if len(ev.mask) != q.photons_present:
        raise ValueError(f"loss mask covers {len(ev.mask)} photons, qubit has {q.photons_present}")
    if ev.k == 0:
        return q
    b = -q.amp_minus if ev.z_flip else q.amp_minus
    return replace(q, amp_minus=b, photons_present=q.photons_present - ev.k, z_flag=q.z_flag ^ ev.z_flip)


def bm_failure_prob(n: int, eta: float) -> float:
    """Failure probability of the N-pair logical Bell measurement, ((1+eta)/2)^N."""
    eta = _check_eta(eta)
    if n < 1:
        raise ValueError("n must be >= 1")
    return ((1.0 + eta) / 2.0) ** n


def bm_failure_prob_binomial(n: int, eta: float) -> float:
    """Same quantity summed over the number of lost photons k.

    With k photons lost the remaining N - k pairs each fail with probability 1/2.
    """
    eta = _check_eta(eta)
    return math.fsum(math.comb(n, k) * (1 - eta) ** (n - k) * eta**k * 0.5 ** (n - k) for k in range(n + 1))


def qubit_loss_prob(n: int, eta: float) -> float:
    """Probability that an N-photon qubit loses at least one photon."""
    eta = _check_eta(eta)
    if n < 1:
        raise ValueError("n must be >= 1")
    return 1.0 - (1.0 - eta) ** n
