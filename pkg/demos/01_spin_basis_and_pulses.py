"""
Spin basis and global pulses
============================

Product states, the sigma^z magnetization and what an imperfect
pi pulse does to a five-site Neel state.
"""

import math

import numpy as np

from dtcchain import global_pulse_operator, magnetization, product_state

# Site 1 is the most significant bit and "up" is bit 0, so UDUDU is 0b01010.
psi = product_state("UDUDU")
print("basis index:", int(np.flatnonzero(psi.amplitudes)[0]))
print("m =", magnetization(psi))

# A perfect pi pulse maps the pattern onto its mirror image.
flipped = global_pulse_operator(math.pi, psi.space).matrix @ psi.amplitudes
print("m after pi pulse =", magnetization(flipped))

# With theta = pi - eps the flip probability is cos(eps/2)^(2N).
for eps in (0.0, 0.1 * math.pi, 0.3):
    out = global_pulse_operator(math.pi - eps, psi.space).matrix @ psi.amplitudes
    p = abs(np.vdot(product_state("DUDUD").amplitudes, out)) ** 2
    print(f"eps={eps:.3f}  P(flip)={p:.6f}  cos(eps/2)^10={math.cos(eps / 2) ** 10:.6f}")
