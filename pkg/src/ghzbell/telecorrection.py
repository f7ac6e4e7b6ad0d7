"""Concatenated Steane telecorrection under photon loss, and threshold search.

Level-0 locations are N-photon GHZ qubits. A Bell measurement (for
telecorrection itself, or inside a teleported CZ/Hadamard) fails with the
lossy logical-BM failure probability; failures are heralded and leave the
qubit depolarized. Every loss exposure outside a Bell measurement (memory,
gates, the offline channel) dephases the qubit with probability 1/2.

One telecorrection round acts on a 7-qubit block. Per position:

* erased (heralded) with probability 1 - (1 - p_fail)^(1 + gate_ops) at
  level 0, where each physical Bell measurement of the round can fail, and
  p_fail above level 0, where a failed logical round is already a single
  heralded location; erased positions get independent X and Z flips of
  probability 1/2,
* otherwise flipped by unlocated Z / X errors with probability p_z / p_x.

The X and Z outcome words are decoded with the erasure locations. The block
fails (heralded) if either sector is ambiguous; otherwise a residual logical
flip is an unlocated error at the next level. The next level reuses the same
round with the output rates.

The accounting knobs (gate_ops, memory_steps, offline_loss) are not fixed by
the physics; the defaults are a baseline circuit depth, see README.
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, replace
from functools import partial

import numpy as np
from scipy import stats

from . import mc
from .loss import bm_failure_prob, qubit_loss_prob
from .steane import N_QUBITS, POPCOUNT, SYNDROME_OF_MASK, decode_table

ETA_BRACKET = (1e-5, 1e-1)
BRACKET_RTOL = 0.05


class NoThresholdFound(RuntimeError):
    """Rates do not contract even at the bottom of the search bracket."""


@dataclass(frozen=True)
class ErrorRates:
    """Per-location heralded failure rate and per-position unlocated flip rates at one level."""

    p_fail: float
    p_z: float
    p_x: float = 0.0
    level: int = 0

    def __post_init__(self):
        for name in ("p_fail", "p_z", "p_x"):
            v = getattr(self, name)
            if not 0.0 <= v <= 1.0:
                raise ValueError(f"{name} = {v} outside [0, 1]")

    @property
    def worst(self) -> float:
        return max(self.p_fail, self.p_z, self.p_x)


@dataclass(frozen=True)
class TelecorrectionConfig:
    n_photons: int = 4
    eta: float = 0.0
    samples: int = 10_000
    levels: int = 3
    memory_steps: int = 14
    gate_ops: int = 2
    offline_loss: bool = True
    seed: int = 42
    replicas: int = 5

    def __post_init__(self):
        if self.n_photons < 1:
            raise ValueError("n_photons must be >= 1")
        if not 0.0 <= self.eta <= 1.0:
            raise ValueError("eta must lie in [0, 1]")
        if self.samples < 1000:
            raise ValueError("samples must be >= 1000")
        if not 1 <= self.levels <= 5:
            raise ValueError("levels must lie in 1..5")
        if self.memory_steps < 0 or self.gate_ops < 0:
            raise ValueError("memory_steps and gate_ops must be non-negative")
        if self.replicas < 1:
            raise ValueError("replicas must be >= 1")

    @property
    def loss_exposures(self) -> int:
        return self.memory_steps + self.gate_ops + int(self.offline_loss)


def physical_rates(
    n_photons: int,
    eta: float,
    memory_steps: int = 1,
    gate_ops: int = 0,
    offline_loss: bool = False,
) -> ErrorRates:
    """Level-0 rates of an N-photon GHZ qubit.

    Each of the ``memory_steps + gate_ops + offline_loss`` loss exposures
    flips the logical phase with probability P/2, P = 1 - (1 - eta)^N; the
    flips compose as an XOR.
    """
    exposures = memory_steps + gate_ops + int(offline_loss)
    p_loss = qubit_loss_prob(n_photons, eta)
    p_z = (1.0 - (1.0 - p_loss) ** exposures) / 2.0
    return ErrorRates(bm_failure_prob(n_photons, eta), p_z, 0.0, level=0)


def erasure_prob(rates: ErrorRates, gate_ops: int) -> float:
    if rates.level > 0:
        return rates.p_fail
    return 1.0 - (1.0 - rates.p_fail) ** (1 + gate_ops)


def _round_tally(rng: np.random.Generator, count: int, p_erase: float, p_z: float, p_x: float) -> np.ndarray:
    """Tally ``[failures, ok, ok_with_logical_z, ok_with_logical_x]`` over ``count`` rounds."""
    u = rng.random((5, count, N_QUBITS))
    erased = u[0] < p_erase
    zw = np.where(erased, u[3] < 0.5, u[1] < p_z)
    xw = np.where(erased, u[4] < 0.5, u[2] < p_x)
    weights = 1 << np.arange(N_QUBITS)
    em, zm, xm = ((a * weights).sum(axis=1) for a in (erased, zw, xw))
    table = decode_table()
    cz = table[SYNDROME_OF_MASK[zm], em]
    cx = table[SYNDROME_OF_MASK[xm], em]
    fail = (cz < 0) | (cx < 0)
    ok = ~fail
    lz = ok & (POPCOUNT[np.where(ok, zm ^ cz, 0)] % 2 == 1)
    lx = ok & (POPCOUNT[np.where(ok, xm ^ cx, 0)] % 2 == 1)
    return np.array([fail.sum(), ok.sum(), lz.sum(), lx.sum()], dtype=np.int64)


def _rates_from_tally(tally: np.ndarray, level: int) -> ErrorRates:
    fail, ok, lz, lx = (int(v) for v in tally)
    total = fail + ok
    if ok == 0:
        return ErrorRates(1.0, 0.5, 0.5, level)
    return ErrorRates(fail / total, lz / ok, lx / ok, level)


def simulate_level(rates_in: ErrorRates, config: TelecorrectionConfig, rng: np.random.Generator) -> ErrorRates:
    """Monte Carlo estimate of the next-level rates from one telecorrection round."""
    p_erase = erasure_prob(rates_in, config.gate_ops)
    tally = _round_tally(rng, config.samples, p_erase, rates_in.p_z, rates_in.p_x)
    return _rates_from_tally(tally, rates_in.level + 1)


def level_sequence(eta: float, config: TelecorrectionConfig, replica: int = 0, workers: int = 1) -> list[ErrorRates]:
    """Rates at levels 0..config.levels.

    Level ``l`` of replica ``r`` always draws from stream ``(seed, 3, N, r, l)``,
    so sweeps over eta use common random numbers.
    """
    rates = [physical_rates(config.n_photons, eta, config.memory_steps, config.gate_ops, config.offline_loss)]
    for level in range(1, config.levels + 1):
        prev = rates[-1]
        kernel = partial(_round_tally, p_erase=erasure_prob(prev, config.gate_ops), p_z=prev.p_z, p_x=prev.p_x)
        tally = mc.run_blocks(kernel, config.samples, config.seed, path=(3, config.n_photons, replica, level), workers=workers)
        rates.append(_rates_from_tally(tally, level))
    return rates


def is_contracting(rates: list[ErrorRates]) -> bool:
    """Worst rate at the last level strictly below the level before (or both zero)."""
    last, before = rates[-1].worst, rates[-2].worst
    return last < before or (last == 0.0 and before == 0.0)


def _bisect_replica(config: TelecorrectionConfig, replica: int) -> float:
    lo, hi = ETA_BRACKET
    if not is_contracting(level_sequence(lo, config, replica)):
        raise NoThresholdFound(f"N={config.n_photons}: rates do not contract at eta={lo:g}")
    if is_contracting(level_sequence(hi, config, replica)):
        return hi
    while hi / lo > 1.0 + BRACKET_RTOL:
        mid = math.sqrt(lo * hi)
        if is_contracting(level_sequence(mid, config, replica)):
            lo = mid
        else:
            hi = mid
    return math.sqrt(lo * hi)


@dataclass(frozen=True)
class ThresholdResult:
    n_photons: int
    eta_threshold: float
    ci_low: float
    ci_high: float
    levels_used: int
    replica_thresholds: tuple[float, ...] = ()

    def to_dict(self) -> dict:
        return asdict(self)


def _summarize(n: int, levels: int, values: list[float]) -> ThresholdResult:
    logs = np.log(values)
    centre = float(np.exp(logs.mean()))
    if len(values) > 1 and logs.std(ddof=1) > 0:
        half = stats.t.ppf(0.975, len(values) - 1) * logs.std(ddof=1) / math.sqrt(len(values))
        lo, hi = float(np.exp(logs.mean() - half)), float(np.exp(logs.mean() + half))
    else:
        lo = hi = centre
    return ThresholdResult(n, centre, min(lo, centre), max(hi, centre), levels, tuple(values))


def find_threshold(n_photons: int, config: TelecorrectionConfig | None = None, workers: int = 1) -> ThresholdResult:
    """Bisect on eta for the contraction boundary, independently per replica.

    The estimate is the geometric mean over replicas and the interval a 95%
    Student-t interval on log(eta).
    """
    config = replace(config or TelecorrectionConfig(), n_photons=n_photons)
    if config.levels < 2:
        raise ValueError("threshold search needs at least two levels")
    replicas = range(config.replicas)
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            values = list(pool.map(partial(_bisect_replica, config), replicas))
    else:
        values = [_bisect_replica(config, r) for r in replicas]
    return _summarize(n_photons, config.levels, values)


def threshold_table(n_min: int, n_max: int, config: TelecorrectionConfig | None = None, workers: int = 1) -> list[ThresholdResult]:
    config = config or TelecorrectionConfig()
    jobs = [(replace(config, n_photons=n), r) for n in range(n_min, n_max + 1) for r in range(config.replicas)]
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            values = list(pool.map(_bisect_replica, *zip(*jobs)))
    else:
        values = [_bisect_replica(c, r) for c, r in jobs]
    out = []
    for i, n in enumerate(range(n_min, n_max + 1)):
        chunk = values[i * config.replicas : (i + 1) * config.replicas]
        out.append(_summarize(n, config.levels, chunk))
    return out
