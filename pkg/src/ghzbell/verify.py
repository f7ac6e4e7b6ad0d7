"""Invariant self-test suite at reduced sample counts.

Each check is a small function returning ``(passed, detail)``. ``run_checks``
runs them all and reports one line per check; a check that raises counts as
failed. ``corrections`` lets a caller substitute a (possibly corrupted)
teleportation correction table.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from functools import partial
from typing import Callable, Mapping

import numpy as np

from . import mc
from .bell_device import BellKind, OutcomeKind, classify_clicks, exact_outcome_table
from .ghz import (
    CORRECTIONS,
    BranchState,
    LogicalQubit,
    classify_logical,
    exact_success_probability,
    expand_logical_bell,
    logical_bm_counts,
    measure_logical_bell,
    success_probability,
    teleport,
)
from .loss import bm_failure_prob, bm_failure_prob_binomial
from .optics import ClickPattern
from .schemes import SchemeId, emit_curves, ps_ewert, ps_grice, ps_this_work, zaidi_nbar
from .steane import POPCOUNT, STEANE, SYNDROME_OF_MASK, decode_table
from .telecorrection import ErrorRates, TelecorrectionConfig, find_threshold, simulate_level

Check = Callable[[], tuple[bool, str]]


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    detail: str

    def line(self) -> str:
        return f"{'PASS' if self.passed else 'FAIL'}  {self.name}: {self.detail}"


def _bs_table() -> tuple[bool, str]:
    want = {
        BellKind.PHI_MINUS: OutcomeKind.SUCCESS_PHI_MINUS,
        BellKind.PSI_MINUS: OutcomeKind.SUCCESS_PSI_MINUS,
        BellKind.PHI_PLUS: OutcomeKind.AMBIGUOUS,
        BellKind.PSI_PLUS: OutcomeKind.AMBIGUOUS,
    }
    worst = 0.0
    for kind, outcome in want.items():
        table = exact_outcome_table(kind)
        worst = max(worst, abs(table[outcome] - 1.0), abs(sum(table.values()) - 1.0))
    return worst < 1e-10, f"max deviation {worst:.1e}"


def _port_swap() -> tuple[bool, str]:
    swap = {0: 2, 1: 3, 2: 0, 3: 1}
    for a, b in itertools.combinations(range(4), 2):
        p = ClickPattern.of(a, b)
        q = ClickPattern.of(swap[a], swap[b])
        try:
            if classify_clicks(p).kind is not classify_clicks(q).kind:
                return False, f"{p} vs {q}"
        except ValueError:
            continue
    return True, "labels invariant under port swap"


def _expansion() -> tuple[bool, str]:
    for n in range(1, 11):
        for kind in BellKind:
            terms = expand_logical_bell(kind, n)
            if abs(sum(a * a for a in terms.values()) - 1.0) > 1e-12:
                return False, f"norm at {kind.label}, N={n}"
            odd = kind.sign.value == "-"
            minus = {BellKind.PHI_MINUS, BellKind.PSI_MINUS}
            if any((sum(k in minus for k in seq) % 2 == 1) != odd for seq in terms):
                return False, f"parity at {kind.label}, N={n}"
    return True, "norm and parity law for N <= 10"


def _exact_bm() -> tuple[bool, str]:
    worst = 0.0
    for n in range(1, 5):
        mean = np.mean([exact_success_probability(BranchState.logical_bell(k, n)) for k in BellKind])
        worst = max(worst, abs(mean - success_probability(n)))
    return worst < 1e-12, f"max deviation {worst:.1e} for N <= 4"


def _mc_bm(samples: int = 20_000, seed: int = 42) -> tuple[bool, str]:
    worst = 0.0
    for n in range(1, 9):
        succ = int(logical_bm_counts(n, samples, seed)[0])
        p = success_probability(n)
        sigma = math.sqrt(p * (1 - p) / samples)
        worst = max(worst, abs(succ / samples - p) / sigma)
    return worst < 3.0, f"max |z| = {worst:.2f} over N = 1..8"


def _classify_permutation() -> tuple[bool, str]:
    rng = np.random.default_rng(0)
    for n in range(1, 6):
        for kind in BellKind:
            outs = list(measure_logical_bell(kind, rng, n=n).outcomes)
            for perm in itertools.islice(itertools.permutations(outs), 24):
                if classify_logical(perm) != classify_logical(outs):
                    return False, f"order dependence at N={n}"
    return True, "classification is order-free"


def _teleport_fidelity(corrections: Mapping[BellKind, str] = CORRECTIONS, seed: int = 42) -> tuple[bool, str]:
    bad = checked = 0
    for n in range(1, 7):
        rng = mc.stream(seed, 90, n)
        for _ in range(100):
            q = LogicalQubit.random(n, rng)
            rec = teleport(q, 0.0, rng, corrections=corrections)
            if rec.success:
                checked += 1
                bad += abs(rec.fidelity - 1.0) > 1e-10
    return bad == 0, f"{bad} of {checked} successful teleportations below fidelity 1"


def _loss_identity() -> tuple[bool, str]:
    worst = max(
        abs(bm_failure_prob(n, eta) - bm_failure_prob_binomial(n, eta))
        for n in range(1, 11)
        for eta in np.linspace(0, 1, 21)
    )
    return worst < 1e-12, f"max deviation {worst:.1e}"


def _loss_mc(samples: int = 20_000, seed: int = 42) -> tuple[bool, str]:
    worst = 0.0
    for n in (1, 3, 6):
        for eta in (0.05, 0.5):
            fail = samples - int(logical_bm_counts(n, samples, seed, eta=eta)[0])
            p = bm_failure_prob(n, eta)
            worst = max(worst, abs(fail / samples - p) / math.sqrt(p * (1 - p) / samples))
    return worst < 3.0, f"max |z| = {worst:.2f}"


def _curves() -> tuple[bool, str]:
    ok = ps_this_work(8) > ps_grice(8) > ps_ewert(8)
    ok &= ps_this_work(4) == ps_grice(4) == 0.75
    ok &= all(ps_this_work(2 * n) == success_probability(n) for n in range(1, 12))
    ok &= abs(zaidi_nbar(0.6585) - 6.00029) < 1e-3 and zaidi_nbar(0) == 2.0
    zaidi = [p for p in emit_curves(20, 2) if p.scheme is SchemeId.ZAIDI_VAN_LOOCK]
    ok &= len(zaidi) == 1 and (zaidi[0].nbar, zaidi[0].ps) == (6.00029, 0.643)
    return bool(ok), "dominance, crossing at 4, Zaidi point"


def _brute_force_decode(s: int, em: int) -> int:
    cost = POPCOUNT[np.arange(128) & ~em & 127]
    cand = np.nonzero(SYNDROME_OF_MASK == s)[0]
    best = cost[cand].min()
    top = cand[cost[cand] == best]
    return -1 if len(set(POPCOUNT[top] % 2)) > 1 else int(top.min())


def _steane() -> tuple[bool, str]:
    g = STEANE.generator()
    if ((STEANE.parity_check.astype(int) @ g.T.astype(int)) % 2).any():
        return False, "H G^T != 0"
    logical_weights = [POPCOUNT[m] for m in range(1, 128) if SYNDROME_OF_MASK[m] == 0 and POPCOUNT[m] % 2]
    if min(logical_weights) != 3:
        return False, "logical coset minimum weight is not 3"
    table = decode_table()
    for s in range(8):
        for em in range(128):
            if POPCOUNT[em] <= 3 and table[s, em] != _brute_force_decode(s, em):
                return False, f"decoder mismatch at syndrome {s}, erasures {em:07b}"
    return True, "code structure and decoder vs brute force"


def _simulate_level(seed: int = 42) -> tuple[bool, str]:
    cfg = TelecorrectionConfig(samples=5000)
    zero = simulate_level(ErrorRates(0.0, 0.0, 0.0), cfg, mc.stream(seed, 91))
    full = simulate_level(ErrorRates(1.0, 0.0, 0.0, level=1), cfg, mc.stream(seed, 91))
    if zero.worst != 0.0 or full.p_fail != 1.0:
        return False, "noiseless or fully erased limit wrong"
    outs = [simulate_level(ErrorRates(f, 0.01, 0.0, level=1), cfg, mc.stream(seed, 92)).p_fail for f in (0.0, 0.05, 0.1, 0.2, 0.4)]
    return all(a <= b for a, b in zip(outs, outs[1:])), "limits and monotone p_fail"


def _threshold_repro() -> tuple[bool, str]:
    cfg = TelecorrectionConfig(samples=2000, replicas=2)
    a, b = find_threshold(4, cfg), find_threshold(4, cfg)
    return a == b, f"eta_th = {a.eta_threshold:.3e}, repeated run identical"


def checks(corrections: Mapping[BellKind, str] = CORRECTIONS) -> dict[str, Check]:
    return {
        "bs-table exact": _bs_table,
        "bs port-swap covariance": _port_swap,
        "logical Bell expansion": _expansion,
        "logical BM exact enumeration": _exact_bm,
        "logical BM Monte Carlo": _mc_bm,
        "classification order": _classify_permutation,
        "teleportation fidelity": partial(_teleport_fidelity, corrections),
        "loss binomial identity": _loss_identity,
        "loss law Monte Carlo": _loss_mc,
        "curves": _curves,
        "steane decoder": _steane,
        "telecorrection round": _simulate_level,
        "threshold reproducibility": _threshold_repro,
    }


def run_checks(corrections: Mapping[BellKind, str] = CORRECTIONS) -> list[CheckResult]:
    results = []
    for name, fn in checks(corrections).items():
        try:
            passed, detail = fn()
        except Exception as exc:  # a crash is a failed invariant
            passed, detail = False, f"{type(exc).__name__}: {exc}"
        results.append(CheckResult(name, bool(passed), detail))
    return results
