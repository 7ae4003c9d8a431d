"""Spin-flip pulses and periodic pulse schedules."""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import reduce
from typing import Optional, Sequence, Union

import numpy as np

from .models import CircuitParams
from .spin import HilbertSpace, SpinOperator, embed_single, pauli

PULSE_KINDS = ("instantaneous", "finite_rwa", "finite_lab")
DEFAULT_SAMPLE_RATE = 32
DEFAULT_INHOMOGENEITY = 0.1
PERIOD_TOL = 1e-9


def inhomogeneous_scale(n_sites: int, delta: float = DEFAULT_INHOMOGENEITY) -> np.ndarray:
    """Linear per-site drive-strength gradient 1 + delta*(i - (N+1)/2)/N, centred on 1."""
    i = np.arange(1, n_sites + 1)
    return 1.0 + delta * (i - (n_sites + 1) / 2.0) / n_sites


def _site_vector(values, n_sites: int) -> np.ndarray:
    if values is None:
        return np.ones(n_sites)
    s = np.array(values, dtype=float).reshape(-1)
    if s.shape != (n_sites,):
        raise ValueError(f"expected one value per site ({n_sites}), got {s.shape[0]}")
    return s


@dataclass(frozen=True, eq=False)
class PulseSpec:
    """A global rotation by ``theta`` (scaled per site).

    Finite kinds last ``theta / amplitude``.  ``carrier`` holds the drive
    frequencies omega_i (rad per time unit) and is required for ``finite_lab``.
    """

    theta: float
    kind: str = "instantaneous"
    amplitude: Optional[float] = None
    per_site_scale: Optional[Sequence[float]] = None
    carrier: Optional[Sequence[float]] = None

    def __post_init__(self):
        if self.kind not in PULSE_KINDS:
            raise ValueError(f"pulse kind must be one of {PULSE_KINDS}, got {self.kind!r}")
        if not 0.0 < self.theta <= math.pi:
            raise ValueError(f"theta must lie in (0, pi], got {self.theta}")
        if self.kind != "instantaneous" and not (self.amplitude and self.amplitude > 0):
            raise ValueError("finite pulses need a positive amplitude")
        if self.kind == "finite_lab" and self.carrier is None:
            raise ValueError("finite_lab pulses need carrier frequencies")
        if self.per_site_scale is not None:
            s = tuple(float(v) for v in self.per_site_scale)
            if min(s) <= 0:
                raise ValueError("per_site_scale entries must be positive")
            object.__setattr__(self, "per_site_scale", s)
        if self.carrier is not None:
            object.__setattr__(self, "carrier", tuple(float(v) for v in self.carrier))

    @classmethod
    def imperfect(cls, epsilon: float, **kw) -> "PulseSpec":
        return cls(theta=math.pi - epsilon, **kw)

    @property
    def duration(self) -> float:
        if self.kind == "instantaneous":
            return 0.0
        return self.theta / self.amplitude

    def scale(self, n_sites: int) -> np.ndarray:
        return _site_vector(self.per_site_scale, n_sites)


def rotation_2x2(theta: float, axis: str = "x") -> np.ndarray:
    """exp(-i theta/2 sigma^axis)."""
    return math.cos(theta / 2) * np.eye(2) - 1j * math.sin(theta / 2) * pauli(axis)


def global_pulse_operator(theta: float, space: HilbertSpace, per_site_scale=None,
                          axis: str = "x") -> SpinOperator:
    """Product of single-site rotations exp(-i theta s_i sigma_i^axis / 2)."""
    if not math.isfinite(theta):
        raise ValueError("theta must be finite")
    s = _site_vector(per_site_scale, space.n_sites)
    u = reduce(np.kron, [rotation_2x2(theta * si, axis) for si in s])
    return SpinOperator(space, u, False)


def drive_hamiltonian(t: float, p: CircuitParams, space: Optional[HilbertSpace] = None,
                      site_phases=None, per_site_scale=None, drive_frequencies=None) -> SpinOperator:
    """Driving term i A sum_i cos(w_i t + phi_i) (s^+_i e^{i Om_i t} - s^-_i e^{-i Om_i t}).

    Drive frequencies default to the qubit frequencies (resonance).
    """
    if space is None:
        space = HilbertSpace(p.n_sites)
    return SpinOperator(space, _drive_matrix(t, p.amplitude, p.omega_q, space, site_phases,
                                             per_site_scale, drive_frequencies), True)


def _ladder_ops(space: HilbertSpace):
    sp, sm = pauli("plus"), pauli("minus")
    return ([embed_single(sp, i, space).matrix for i in range(1, space.n_sites + 1)],
            [embed_single(sm, i, space).matrix for i in range(1, space.n_sites + 1)])


class LabDrive:
    """Callable returning the full (non-RWA) drive matrix at time t.

    Ladder matrices are built once; calling is a cheap weighted sum.
    """

    def __init__(self, amplitude: float, qubit_freqs, space: HilbertSpace, site_phases=None,
                 per_site_scale=None, drive_frequencies=None):
        n = space.n_sites
        self.space = space
        self.amplitude = float(amplitude)
        self.qubit_freqs = _site_vector(qubit_freqs, n)
        self.drive_freqs = self.qubit_freqs if drive_frequencies is None else _site_vector(drive_frequencies, n)
        self.phases = np.zeros(n) if site_phases is None else _site_vector(site_phases, n)
        self.scale = _site_vector(per_site_scale, n)
        sp, sm = _ladder_ops(space)
        self._sp = np.array(sp)
        self._sm = np.array(sm)

    def __call__(self, t: float) -> np.ndarray:
        c = 1j * self.amplitude * self.scale * np.cos(self.drive_freqs * t + self.phases)
        ep = c * np.exp(1j * self.qubit_freqs * t)
        em = -c * np.exp(-1j * self.qubit_freqs * t)
        return np.tensordot(ep, self._sp, axes=1) + np.tensordot(em, self._sm, axes=1)


def _drive_matrix(t, amplitude, qubit_freqs, space, site_phases, per_site_scale, drive_frequencies):
    return LabDrive(amplitude, qubit_freqs, space, site_phases, per_site_scale, drive_frequencies)(t)


def rwa_pulse_hamiltonian(amplitude: float, space: HilbertSpace, per_site_scale=None) -> SpinOperator:
    """Resonant time average of the drive: -(A/2) sum_i s_i sigma_i^y."""
    s = _site_vector(per_site_scale, space.n_sites)
    y = pauli("y")
    h = sum(-0.5 * amplitude * s[i] * embed_single(y, i + 1, space).matrix for i in range(space.n_sites))
    return SpinOperator(space, h, True)


@dataclass(frozen=True)
class Free:
    duration: float


@dataclass(frozen=True)
class Pulse:
    spec: PulseSpec

    @property
    def duration(self) -> float:
        return self.spec.duration


Segment = Union[Free, Pulse]


@dataclass(frozen=True, eq=False)
class PulseSchedule:
    period: float
    n_periods: int
    segments: tuple
    sample_rate: int = DEFAULT_SAMPLE_RATE

    def __post_init__(self):
        if any(seg.duration < 0 for seg in self.segments):
            raise ValueError("segment durations must be non-negative")
        if abs(self.total_duration - self.n_periods * self.period) > PERIOD_TOL:
            raise ValueError("segments do not add up to n_periods * period")

    @property
    def total_duration(self) -> float:
        return float(sum(seg.duration for seg in self.segments))

    @property
    def sample_interval(self) -> float:
        return self.period / self.sample_rate

    def sample_times(self) -> np.ndarray:
        """Uniform grid k*T_D/sample_rate including both endpoints."""
        k = np.arange(self.n_periods * self.sample_rate + 1)
        return k * self.sample_interval

    @property
    def pulse(self) -> Optional[PulseSpec]:
        for seg in self.segments:
            if isinstance(seg, Pulse):
                return seg.spec
        return None


def make_schedule(period: float, n_periods: int, pulse: Optional[PulseSpec],
                  sample_rate: int = DEFAULT_SAMPLE_RATE) -> PulseSchedule:
    """Periods of free evolution each closed by a pulse ending at t = n*T_D.

    ``pulse=None`` gives undriven evolution on the same grid.
    """
    if period <= 0 or n_periods < 1 or sample_rate < 1:
        raise ValueError("period, n_periods and sample_rate must be positive")
    if pulse is None:
        return PulseSchedule(period, n_periods, tuple(Free(period) for _ in range(n_periods)), sample_rate)
    dt = pulse.duration
    if dt >= period:
        raise ValueError(f"pulse of duration {dt} does not fit in period {period}")
    segs = []
    for _ in range(n_periods):
        segs.append(Free(period - dt))
        segs.append(Pulse(pulse))
    return PulseSchedule(period, n_periods, tuple(segs), sample_rate)
