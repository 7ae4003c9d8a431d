"""
The fermionic limit as a permutation Hamiltonian
================================================

At kappa = inf the XXZ couplings collapse onto -sum (alpha_i/g)(1 - P_i,i+1),
with P the nearest-neighbour swap.
"""

import numpy as np

from dtcchain import HARMONIC_ALPHA_N5, build_xxz, fermionic_couplings, permutation_hamiltonian

for g in (10.0, 100.0):
    a = build_xxz(fermionic_couplings(g, HARMONIC_ALPHA_N5)).matrix
    b = permutation_hamiltonian(g, HARMONIC_ALPHA_N5).matrix
    print(f"g={g:g}  max entry difference = {np.max(np.abs(a - b)):.2e}")

# The swap form makes the spectrum easy to read: ferromagnetic states sit at 0.
w = np.linalg.eigvalsh(permutation_hamiltonian(10.0, HARMONIC_ALPHA_N5).matrix)
print("lowest levels:", np.round(w[:4], 5))
print("highest level:", round(w[-1], 12), "(fully symmetric multiplet)")
