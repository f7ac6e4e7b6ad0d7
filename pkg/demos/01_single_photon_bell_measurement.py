"""Single-photon Bell measurement with a beam splitter and four on-off detectors.

Two photons meet on a balanced beam splitter; each output port ends in a
polarizing splitter, so there is one detector per (port, polarization). We
propagate each diagonal-basis Bell state through the Fock engine and look at
where the clicks land.
"""

import math

from ghzbell.bell_device import BellKind, bell_input, build_bs_device, classify_clicks, exact_outcome_table
from ghzbell.optics import PureOpticalState, apply_transform, build_beamsplitter, click_distribution

# Hong-Ou-Mandel first: |1,1> never leaves one photon in each port.
bs = build_beamsplitter(math.pi / 4, (0, 1), 2)
hom = apply_transform(PureOpticalState.fock((1, 1)), bs)
print("HOM output amplitudes:", {k: round(v.real, 4) for k, v in hom.amplitudes.items()})

device = build_bs_device()
for kind in BellKind:
    out = apply_transform(bell_input(kind), device.transform)
    patterns = click_distribution(out, device.detector_modes)
    print(f"\n{kind.label}")
    for pattern, p in patterns.items():
        print(f"  clicks {str(pattern):12s} p = {p:.3f}  -> {classify_clicks(pattern).kind.value}")

# Equal mixture of the four inputs: half the time we learn which state it was.
success = sum(t[o] for t in map(exact_outcome_table, BellKind) for o in t if o.is_success) / 4
print(f"\nsuccess probability for a random Bell input: {success:.3f}")
