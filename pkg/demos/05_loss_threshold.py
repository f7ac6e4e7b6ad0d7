"""Loss thresholds for Steane-code telecorrection on GHZ qubits.

Each level of concatenation feeds its heralded-failure and flip rates into
the next. Below threshold the worst rate shrinks from level to level. We
show one contracting and one diverging trajectory, then bisect for the
threshold at each N.
"""

from ghzbell.telecorrection import TelecorrectionConfig, find_threshold, level_sequence

cfg = TelecorrectionConfig(n_photons=4, samples=20_000)
for eta in (1e-3, 4e-3):
    print(f"eta = {eta:g}")
    for r in level_sequence(eta, cfg):
        print(f"  level {r.level}: p_fail {r.p_fail:.3e}  p_z {r.p_z:.3e}  p_x {r.p_x:.3e}")

print("\n N   threshold   95% interval")
for n in range(3, 9):
    res = find_threshold(n, TelecorrectionConfig(samples=10_000, replicas=5))
    print(f"{n:2d}   {res.eta_threshold:.2e}    [{res.ci_low:.2e}, {res.ci_high:.2e}]")
