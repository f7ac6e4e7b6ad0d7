"""Teleporting a GHZ-encoded qubit, with and without photon loss.

Without loss every successful run returns the input exactly once the Pauli
correction is applied. Loss on the input photons has two effects: failed
pairs become more likely, ((1+eta)/2)^N per measurement, and each lost photon
may leave a phase flip behind.
"""

import numpy as np

from ghzbell.ghz import LogicalQubit, teleport, teleport_counts
from ghzbell.loss import bm_failure_prob

rng = np.random.default_rng(3)
q = LogicalQubit(3, 0.6, 0.8j)
for _ in range(5):
    rec = teleport(q, 0.0, rng)
    label = rec.result.label if rec.result else "-"
    print(f"{rec.status:8s} result {label:5s} correction {rec.correction or 'I':3s} fidelity {rec.fidelity:.12f}")

print("\n N   eta    success   predicted   unit-fidelity share")
for n in (2, 4, 6):
    for eta in (0.0, 0.05, 0.2):
        succ, perfect = teleport_counts(n, 40_000, seed=42, eta=eta)
        print(f"{n:2d}  {eta:4.2f}   {succ / 4e4:.4f}    {1 - bm_failure_prob(n, eta):.4f}      {perfect / succ:.3f}")
