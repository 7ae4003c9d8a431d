"""Few-body discrete time crystals in driven spin chains.

Cold-atom and superconducting-circuit realizations of a periodically
spin-flipped XXZ chain, with exact, time-dependent and Lindblad evolution
and subharmonic spectral diagnostics.
"""

__version__ = "0.1.0"

from .spin import (HilbertSpace, StateVector, DensityMatrix, SpinOperator, pauli, embed_single,
                   embed_pair, product_state, neel_state, expectation, total_sz, site_reversal)
from .models import (CouplingSet, ColdAtomParams, CircuitParams, build_xxz, cold_atom_couplings,
                     fermionic_couplings, permutation_hamiltonian, circuit_couplings, ghz, mhz,
                     HARMONIC_ALPHA_N5)
from .drive import (PulseSpec, PulseSchedule, global_pulse_operator, drive_hamiltonian,
                    rwa_pulse_hamiltonian, make_schedule, inhomogeneous_scale)
from .evolve import (Propagator, NoiseSpec, Trajectory, propagator, evolve_closed, evolve_lindblad,
                     evolve_timedep)
from .observables import (TimeSeries, Spectrum, PeakReport, magnetization, magnetization_raw, overlap,
                          spectral_density, subharmonic_metrics, magnetization_series, overlap_series)
from .runner import (RunConfig, RunResult, SweepConfig, ConfigError, get_preset, list_presets, simulate, run,
                     sweep, run_sweep)
