"""Magnetization, return probability and subharmonic spectral diagnostics."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Union

import numpy as np

from .evolve import Trajectory
from .spin import DensityMatrix, HilbertSpace, StateVector, sz_diagonal

MIN_SAMPLES = 16
UNIFORM_TOL = 1e-9
RESAMPLE_RATE = 32
# Peak criteria, in units of the driving frequency.
SUBHARMONIC_HALF_WIDTH = 1.0 / 40
SPLIT_MIN_SEPARATION = 1.0 / 20
SPLIT_HEIGHT_RATIO = 5.0
SPLIT_WINDOW = (0.3, 0.7)


@dataclass(frozen=True, eq=False)
class TimeSeries:
    times: np.ndarray
    values: np.ndarray
    driving_period: float

    def __post_init__(self):
        t = np.asarray(self.times, dtype=float)
        v = np.asarray(self.values, dtype=float)
        if t.shape != v.shape:
            raise ValueError("times and values differ in length")
        if np.any(np.diff(t) <= 0):
            raise ValueError("times must be strictly increasing")
        object.__setattr__(self, "times", t)
        object.__setattr__(self, "values", v)


@dataclass(frozen=True, eq=False)
class Spectrum:
    """One-sided S(f) = |integral dt e^{-2 pi i f t} m(t)|^2 on f >= 0 (absolute units)."""

    frequencies: np.ndarray
    density: np.ndarray
    driving_frequency: float

    @property
    def relative_frequencies(self) -> np.ndarray:
        return self.frequencies / self.driving_frequency

    @property
    def bin_width(self) -> float:
        return float(self.frequencies[1] - self.frequencies[0])


@dataclass(frozen=True)
class PeakReport:
    peak_frequency: float
    peak_height: float
    subharmonic_weight: float
    split_detected: bool
    split_separation: Optional[float] = None

    def to_dict(self) -> dict:
        return {
            "peak_frequency": self.peak_frequency,
            "peak_height": self.peak_height,
            "subharmonic_weight": self.subharmonic_weight,
            "split_detected": self.split_detected,
            "split_separation": self.split_separation,
        }


def _populations(state: Union[StateVector, DensityMatrix, np.ndarray]) -> np.ndarray:
    if isinstance(state, StateVector):
        return np.abs(state.amplitudes) ** 2
    if isinstance(state, DensityMatrix):
        return np.real(np.diag(state.matrix))
    a = np.asarray(state)
    return np.abs(a) ** 2 if a.ndim == 1 else np.real(np.diag(a))


def magnetization_raw(state) -> float:
    """<sum_i sigma_i^z>."""
    p = _populations(state)
    n = int(round(np.log2(len(p))))
    return float(p @ sz_diagonal(HilbertSpace(n)))


def magnetization(state) -> float:
    """Half the summed sigma^z expectation, so |up down up down up> reads +0.5."""
    return 0.5 * magnetization_raw(state)


def overlap(psi0: StateVector, state: Union[StateVector, DensityMatrix]) -> float:
    """|<psi0|psi>|^2, or <psi0|rho|psi0> for a mixed state."""
    if psi0.space.dim != state.space.dim:
        raise ValueError("overlap between states of different dimension")
    a = psi0.amplitudes
    if isinstance(state, DensityMatrix):
        return float(np.real(np.vdot(a, state.matrix @ a)))
    return float(abs(np.vdot(a, state.amplitudes)) ** 2)


def magnetization_series(traj: Trajectory, normalized: bool = True) -> np.ndarray:
    sz = sz_diagonal(traj.space)
    if traj.mixed:
        pops = np.real(np.einsum("kii->ki", traj.data))
    else:
        pops = np.abs(traj.data) ** 2
    m = pops @ sz
    return 0.5 * m if normalized else m


def overlap_series(traj: Trajectory, psi0: StateVector) -> np.ndarray:
    a = psi0.amplitudes
    if traj.mixed:
        return np.real(np.einsum("i,kij,j->k", a.conj(), traj.data, a))
    return np.abs(traj.data @ a.conj()) ** 2


def stroboscopic(series: TimeSeries, traj: Trajectory) -> TimeSeries:
    idx = traj.stroboscopic_indices
    return TimeSeries(series.times[idx], series.values[idx], series.driving_period)


def _is_uniform(t: np.ndarray) -> bool:
    d = np.diff(t)
    return bool(np.max(np.abs(d - d[0])) <= UNIFORM_TOL * max(1.0, abs(d[0])))


def _next_pow2(n: int) -> int:
    return 1 << (n - 1).bit_length()


def _analysis_window(series: TimeSeries):
    """Uniform samples covering whole driving periods, resampled if needed."""
    t, v, period = series.times, series.values, series.driving_period
    if len(t) < MIN_SAMPLES:
        raise ValueError(f"need at least {MIN_SAMPLES} samples, got {len(t)}")
    if not _is_uniform(t):
        dt = period / RESAMPLE_RATE
        grid = t[0] + dt * np.arange(int(np.floor((t[-1] - t[0]) / dt + 1e-9)) + 1)
        v = np.interp(grid, t, v)
        t = grid
    dt = t[1] - t[0]
    n_periods = int(np.floor((t[-1] - t[0]) / period + 1e-9))
    if n_periods >= 1:
        n_keep = int(round(n_periods * period / dt))
        if n_keep >= MIN_SAMPLES:
            t, v = t[:n_keep], v[:n_keep]
    return t, v, dt


def spectral_density(series: TimeSeries) -> Spectrum:
    """Rectangular-window DFT estimate of S(f), zero-padded to the next power of two."""
    t, v, dt = _analysis_window(series)
    n_fft = _next_pow2(len(v))
    # phase factor e^{-2 pi i f t0} drops out of the modulus
    spectrum = np.fft.rfft(v, n=n_fft) * dt
    freqs = np.fft.rfftfreq(n_fft, d=dt)
    return Spectrum(freqs, np.abs(spectrum) ** 2, 1.0 / series.driving_period)


def parseval_mean_square(spec: Spectrum, duration: float) -> float:
    """Mean square of the series implied by the one-sided spectrum."""
    w = np.full(len(spec.density), 2.0)
    w[0] = 1.0
    n_fft = 2 * (len(spec.density) - 1)
    if n_fft % 2 == 0:
        w[-1] = 1.0
    return float(np.sum(w * spec.density) * spec.bin_width / duration)


def _height_at(spec: Spectrum, f: float) -> float:
    return float(np.interp(f, spec.frequencies, spec.density))


def subharmonic_metrics(spec: Spectrum, f_drive: Optional[float] = None) -> PeakReport:
    """Peak location and rigidity metrics within the band (0, f_D].

    ``peak_frequency`` and ``split_separation`` are reported in units of f_D.
    """
    fd = spec.driving_frequency if f_drive is None else f_drive
    f, s = spec.frequencies, spec.density
    if f[-1] < fd * (1 - 1e-12):
        raise ValueError("spectrum does not reach the driving frequency")
    rel = f / fd
    band = (rel > 0) & (rel <= 1 + 1e-12)
    total = float(np.sum(s[band]))
    in_window = band & (np.abs(rel - 0.5) <= SUBHARMONIC_HALF_WIDTH + 1e-12)
    weight = float(np.sum(s[in_window]) / total) if total > 0 else 0.0
    band_idx = np.flatnonzero(band)
    peak = band_idx[np.argmax(s[band_idx])]

    lo, hi = SPLIT_WINDOW
    cand = np.flatnonzero((rel > lo) & (rel < hi))
    cand = cand[(cand > 0) & (cand < len(s) - 1)]
    maxima = [k for k in cand if s[k] >= s[k - 1] and s[k] > s[k + 1]]
    maxima.sort(key=lambda k: -s[k])
    split, sep = False, None
    if len(maxima) >= 2:
        a, b = maxima[0], maxima[1]
        sep = float(abs(rel[a] - rel[b]))
        ref = _height_at(spec, 0.5 * fd)
        split = sep > SPLIT_MIN_SEPARATION and min(s[a], s[b]) > SPLIT_HEIGHT_RATIO * ref
    return PeakReport(
        peak_frequency=float(rel[peak]),
        peak_height=float(s[peak]),
        subharmonic_weight=min(max(weight, 0.0), 1.0),
        split_detected=bool(split),
        split_separation=sep if split else None,
    )
