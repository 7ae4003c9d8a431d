"""Coupling sets and Hamiltonians for the inhomogeneous XXZ chain.

Two concrete realizations are provided: the strongly interacting two-component
gas in a harmonic trap (oscillator units, hbar = m = omega = 1) and the
five-island superconducting circuit (angular frequencies in rad/ns, time in ns).
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .spin import HilbertSpace, SpinOperator, embed_pair, embed_single, pauli

TWO_PI = 2.0 * math.pi

# Harmonic-trap exchange coefficients for N = 5.
HARMONIC_ALPHA_N5 = (2.16612, 3.17738, 3.17738, 2.16612)

# Circuit spin-model parameters for sites 1..3 (frequencies / 2pi).
CIRCUIT_OMEGA_GHZ = (17.0, 35.6, 43.361)
CIRCUIT_OMEGA_GHZ_UNCERTAINTY = (0.048, 0.21, 0.048)
CIRCUIT_JZ_MHZ = (168.9, -29.07)
CIRCUIT_JZ_MHZ_UNCERTAINTY = (1.1, 0.18)

STRONG_COUPLING_WARN_G = 5.0


def ghz(f) -> np.ndarray:
    """Convert frequencies in GHz to angular frequency in rad/ns."""
    return TWO_PI * np.asarray(f, dtype=float)


def mhz(f) -> np.ndarray:
    """Convert frequencies in MHz to angular frequency in rad/ns."""
    return TWO_PI * 1e-3 * np.asarray(f, dtype=float)


def mirror_complete(first_half: Sequence[float], length: int) -> tuple:
    """Extend ``first_half`` to ``length`` entries by reflection about the centre."""
    half = list(first_half)
    need = (length + 1) // 2
    if len(half) < need:
        raise ValueError(f"need at least {need} values to mirror to length {length}")
    half = half[:need]
    return tuple(half + half[: length - need][::-1])


def _vec(x, n: int, name: str) -> np.ndarray:
    a = np.array(x, dtype=float).reshape(-1)
    if a.shape != (n,):
        raise ValueError(f"{name} must have length {n}, got {a.shape[0]}")
    if not np.all(np.isfinite(a)):
        raise ValueError(f"{name} contains non-finite entries")
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class CouplingSet:
    """Bond coefficients eta^0, eta^x, eta^y, eta^z (length N-1) and fields Omega (length N)."""

    eta0: np.ndarray
    etax: np.ndarray
    etay: np.ndarray
    etaz: np.ndarray
    omega: np.ndarray

    def __post_init__(self):
        n_bonds = len(np.atleast_1d(self.etax))
        for name in ("eta0", "etax", "etay", "etaz"):
            object.__setattr__(self, name, _vec(getattr(self, name), n_bonds, name))
        object.__setattr__(self, "omega", _vec(self.omega, n_bonds + 1, "omega"))

    @property
    def n_sites(self) -> int:
        return len(self.omega)

    def __eq__(self, other):
        if not isinstance(other, CouplingSet):
            return NotImplemented
        return all(np.array_equal(getattr(self, k), getattr(other, k))
                   for k in ("eta0", "etax", "etay", "etaz", "omega"))


def build_xxz(couplings: CouplingSet, space: Optional[HilbertSpace] = None) -> SpinOperator:
    """Assemble the inhomogeneous XXZ Hamiltonian with longitudinal fields.

    H = sum_i (eta0_i + etax_i XX + etay_i YY + etaz_i ZZ)_{i,i+1} - 1/2 sum_i Omega_i Z_i
    """
    if space is None:
        space = HilbertSpace(couplings.n_sites)
    if space.n_sites != couplings.n_sites:
        raise ValueError(f"couplings describe {couplings.n_sites} sites, space has {space.n_sites}")
    n, d = space.n_sites, space.dim
    x, y, z = pauli("x"), pauli("y"), pauli("z")
    h = np.zeros((d, d), dtype=complex)
    for b in range(n - 1):
        i = b + 1
        h += couplings.eta0[b] * np.eye(d)
        if couplings.etax[b]:
            h += couplings.etax[b] * embed_pair(x, x, i, i + 1, space).matrix
        if couplings.etay[b]:
            h += couplings.etay[b] * embed_pair(y, y, i, i + 1, space).matrix
        if couplings.etaz[b]:
            h += couplings.etaz[b] * embed_pair(z, z, i, i + 1, space).matrix
    for k in range(n):
        if couplings.omega[k]:
            h -= 0.5 * couplings.omega[k] * embed_single(z, k + 1, space).matrix
    # Remove rounding asymmetry from the complex YY products.
    h = 0.5 * (h + h.conj().T)
    return SpinOperator(space, h, True)


@dataclass(frozen=True, eq=False)
class ColdAtomParams:
    """Strongly interacting two-component gas mapped to a spin chain.

    ``kappa`` is the intra- to inter-species interaction ratio; ``math.inf``
    selects the fermionic limit exactly.
    """

    n_sites: int = 5
    g: float = 10.0
    kappa: float = math.inf
    alpha: Optional[Sequence[float]] = None

    def __post_init__(self):
        if self.g <= 0 or not math.isfinite(self.g):
            raise ValueError(f"g must be positive and finite, got {self.g}")
        if not self.kappa > 0:
            raise ValueError(f"kappa must be positive, got {self.kappa}")
        alpha = self.alpha
        if alpha is None:
            if self.n_sites != 5:
                raise ValueError("default alpha is tabulated only for n_sites=5")
            alpha = HARMONIC_ALPHA_N5
        object.__setattr__(self, "alpha", tuple(float(a) for a in _vec(alpha, self.n_sites - 1, "alpha")))
        if self.g < STRONG_COUPLING_WARN_G:
            warnings.warn(f"g={self.g} is outside the strong-coupling regime the spin-chain mapping assumes",
                          stacklevel=2)

    def __eq__(self, other):
        if not isinstance(other, ColdAtomParams):
            return NotImplemented
        return (self.n_sites, self.g, self.kappa, self.alpha) == (other.n_sites, other.g, other.kappa, other.alpha)


def _inverse_kappa(kappa: float) -> float:
    return 0.0 if math.isinf(kappa) else 1.0 / kappa


def cold_atom_couplings(p: ColdAtomParams) -> CouplingSet:
    a = np.asarray(p.alpha) / p.g
    ik = _inverse_kappa(p.kappa)
    return CouplingSet(
        eta0=-0.5 * a * (1.0 + 2.0 * ik),
        etax=0.5 * a,
        etay=0.5 * a,
        etaz=0.5 * a * (1.0 - 2.0 * ik),
        omega=np.zeros(len(a) + 1),
    )


def fermionic_couplings(g: float, alpha: Sequence[float]) -> CouplingSet:
    """Couplings of the kappa -> infinity limit (isotropic Heisenberg exchange)."""
    alpha = list(alpha)
    return cold_atom_couplings(ColdAtomParams(n_sites=len(alpha) + 1, g=g, kappa=math.inf, alpha=alpha))


def permutation_hamiltonian(g: float, alpha: Sequence[float],
                            space: Optional[HilbertSpace] = None) -> SpinOperator:
    """H = -sum_i (alpha_i/g) (1 - P_{i,i+1}) built from explicit swap matrices."""
    if g <= 0:
        raise ValueError(f"g must be positive, got {g}")
    alpha = np.asarray(alpha, dtype=float)
    if space is None:
        space = HilbertSpace(len(alpha) + 1)
    if len(alpha) != space.n_sites - 1:
        raise ValueError("alpha must have one entry per bond")
    d, n = space.dim, space.n_sites
    idx = np.arange(d)
    h = np.zeros((d, d), dtype=complex)
    for b, a in enumerate(alpha):
        # bit positions of sites b+1 and b+2 (site 1 is the most significant bit)
        s1, s2 = n - 1 - b, n - 2 - b
        b1, b2 = (idx >> s1) & 1, (idx >> s2) & 1
        swapped = idx ^ ((b1 ^ b2) << s1) ^ ((b1 ^ b2) << s2)
        perm = np.zeros((d, d))
        perm[swapped, idx] = 1.0
        h -= (a / g) * (np.eye(d) - perm)
    return SpinOperator(space, h, True)


@dataclass(frozen=True, eq=False)
class CircuitParams:
    """Rotating-wave Ising model of the driven qubit chain; all rates in rad/ns."""

    omega_q: np.ndarray
    jz: np.ndarray
    amplitude: float
    epsilon: float = 0.0
    zeta: float = 0.0
    symmetric: bool = False
    uncertainties: Optional[dict] = field(default=None, compare=False)

    def __post_init__(self):
        omega_q = _vec(self.omega_q, len(np.atleast_1d(self.omega_q)), "omega_q")
        n = len(omega_q)
        jz = _vec(self.jz, n - 1, "jz")
        object.__setattr__(self, "omega_q", omega_q)
        object.__setattr__(self, "jz", jz)
        if not self.amplitude > 0:
            raise ValueError(f"drive amplitude must be positive, got {self.amplitude}")
        if not 0.0 <= self.epsilon < math.pi:
            raise ValueError(f"epsilon must lie in [0, pi), got {self.epsilon}")
        if not self.zeta >= 0:
            raise ValueError(f"zeta must be non-negative, got {self.zeta}")
        if self.symmetric and not (np.array_equal(omega_q, omega_q[::-1]) and np.array_equal(jz, jz[::-1])):
            raise ValueError("symmetric flag set but parameters are not mirror symmetric")

    @property
    def n_sites(self) -> int:
        return len(self.omega_q)

    @property
    def pulse_duration(self) -> float:
        return (math.pi - self.epsilon) / self.amplitude

    @classmethod
    def reference(cls, interacting: bool = True, amplitude: Optional[float] = None,
                  epsilon: float = 0.0, zeta: float = 0.0, amplitude_factor: float = 100.0) -> "CircuitParams":
        """Tabulated five-qubit parameters, mirror-completed to sites 4 and 5.

        By default the amplitude is ``amplitude_factor * max|J|`` of the tabulated
        couplings, also for the non-interacting variant.
        """
        omega = ghz(mirror_complete(CIRCUIT_OMEGA_GHZ, 5))
        jz_table = mhz(mirror_complete(CIRCUIT_JZ_MHZ, 4))
        if amplitude is None:
            amplitude = amplitude_factor * float(np.max(np.abs(jz_table)))
        jz = jz_table if interacting else np.zeros(4)
        unc = {
            "omega_ghz": mirror_complete(CIRCUIT_OMEGA_GHZ_UNCERTAINTY, 5),
            "jz_mhz": mirror_complete(CIRCUIT_JZ_MHZ_UNCERTAINTY, 4),
        }
        return cls(omega, jz, amplitude, epsilon, zeta, symmetric=True, uncertainties=unc)


def circuit_couplings(p: CircuitParams, frame: str = "rotating") -> CouplingSet:
    """Ising-only couplings; the lab frame additionally carries the qubit fields."""
    n = p.n_sites
    zeros = np.zeros(n - 1)
    if frame == "rotating":
        omega = np.zeros(n)
    elif frame == "lab":
        omega = p.omega_q
    else:
        raise ValueError(f"frame must be 'rotating' or 'lab', got {frame!r}")
    return CouplingSet(eta0=zeros, etax=zeros, etay=zeros, etaz=p.jz, omega=omega)


def ising_norm_bound(couplings: CouplingSet) -> float:
    """Upper bound on the operator norm of the interaction and field terms."""
    return float(np.sum(np.abs(couplings.eta0)) + np.sum(np.abs(couplings.etax))
                 + np.sum(np.abs(couplings.etay)) + np.sum(np.abs(couplings.etaz))
                 + 0.5 * np.sum(np.abs(couplings.omega)))
