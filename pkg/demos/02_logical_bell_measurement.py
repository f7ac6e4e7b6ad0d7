"""Bell measurement on GHZ-encoded qubits.

Each logical qubit is a|+>^N + b|->^N. Measuring the N photon pairs one by
one, a single identified pair is enough: the family (Phi or Psi) is read off
directly and the sign from the parity of identified minus states. Failure
needs every pair to fail, so the success probability is 1 - 2^-N for a
random Bell input.
"""

import numpy as np

from ghzbell.bell_device import BellKind
from ghzbell.ghz import BranchState, exact_success_probability, logical_bm_counts, measure_logical_bell, success_probability

rng = np.random.default_rng(1)
rec = measure_logical_bell(BellKind.PSI_MINUS, rng, n=4)
print("one run on Psi-, N=4:", [o.kind.value for o in rec.outcomes], "->", rec.result.label)

print("\n N   exact(Phi+)  exact(Phi-)  uniform   1-2^-N")
for n in range(1, 5):
    plus = exact_success_probability(BranchState.logical_bell(BellKind.PHI_PLUS, n))
    minus = exact_success_probability(BranchState.logical_bell(BellKind.PHI_MINUS, n))
    print(f"{n:2d}   {plus:.6f}     {minus:.6f}     {(plus + minus) / 2:.6f}  {success_probability(n):.6f}")

print("\n N   Monte Carlo (10^5)   1-2^-N")
for n in range(1, 9):
    succ = logical_bm_counts(n, 100_000, seed=42)[0]
    print(f"{n:2d}   {succ / 1e5:.5f}             {success_probability(n):.5f}")
