"""Time evolution through a pulse schedule.

Closed dynamics use exact eigendecomposition propagators between grid points,
time-dependent drives use a fourth-order commutator-free Magnus integrator,
and open dynamics use fixed-step RK4 on the Lindblad equation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence, Union

import numpy as np

from .drive import (Free, LabDrive, Pulse, PulseSchedule, PulseSpec, global_pulse_operator,
                    rwa_pulse_hamiltonian)
from .spin import (DensityMatrix, HilbertSpace, SpinOperator, StateVector, embed_single, pauli)

UNITARY_TOL = 1e-10
TRACE_TOL = 1e-6
POSITIVITY_TOL = -1e-6
MAX_STEPS = 50_000_000

# Lindblad step: dt = min(T_D/256, 0.02/zeta, SPECTRAL_STEP/spread(H))
LINDBLAD_STEPS_PER_PERIOD = 256
LINDBLAD_RATE_STEP = 0.02
SPECTRAL_STEP = 0.05
# Magnus steps per cycle of the fastest drive component
LAB_STEPS_PER_CYCLE = 12

_GRID_TOL = 1e-9

# Fourth-order commutator-free Magnus nodes and weights.
_CF4_C = (0.5 - math.sqrt(3) / 6, 0.5 + math.sqrt(3) / 6)
_CF4_A = ((3 - 2 * math.sqrt(3)) / 12, (3 + 2 * math.sqrt(3)) / 12)


class IntegrationError(RuntimeError):
    pass


@dataclass(frozen=True, eq=False)
class Propagator:
    unitary: np.ndarray
    duration: float

    def __post_init__(self):
        u = self.unitary
        err = np.max(np.abs(u.conj().T @ u - np.eye(u.shape[0])))
        if err > UNITARY_TOL:
            raise ValueError(f"propagator not unitary (deviation {err:.2e})")


def _expm_hermitian(h: np.ndarray, dt: float) -> np.ndarray:
    w, v = np.linalg.eigh(h)
    return (v * np.exp(-1j * w * dt)) @ v.conj().T


def propagator(h: SpinOperator, dt: float) -> Propagator:
    """exp(-i H dt) for a Hermitian H."""
    if not h.hermitian_flag:
        raise ValueError("propagator needs a Hermitian operator")
    return Propagator(_expm_hermitian(h.matrix, dt), float(dt))


@dataclass(frozen=True)
class NoiseSpec:
    """Markovian noise of strength ``zeta`` on every site.

    Relaxation uses L = sqrt(zeta) sigma^-, dephasing L = sqrt(zeta/2) sigma^z.
    With ``per_site=False`` a single collective operator summed over sites is
    used per channel instead.
    """

    zeta: float = 0.0
    channels: frozenset = frozenset({"relaxation"})
    per_site: bool = True

    def __post_init__(self):
        if not (math.isfinite(self.zeta) and self.zeta >= 0):
            raise ValueError(f"zeta must be finite and non-negative, got {self.zeta}")
        ch = frozenset(self.channels)
        unknown = ch - {"relaxation", "dephasing"}
        if unknown:
            raise ValueError(f"unknown noise channels {sorted(unknown)}")
        object.__setattr__(self, "channels", ch)

    def collapse_operators(self, space: HilbertSpace) -> list[np.ndarray]:
        if self.zeta == 0:
            return []
        ops = []
        for name, amp, single in (("relaxation", math.sqrt(self.zeta), pauli("minus")),
                                  ("dephasing", math.sqrt(self.zeta / 2), pauli("z"))):
            if name not in self.channels:
                continue
            site_ops = [amp * embed_single(single, i, space).matrix for i in range(1, space.n_sites + 1)]
            ops.extend(site_ops if self.per_site else [sum(site_ops)])
        return ops


@dataclass(eq=False)
class Trajectory:
    """Sampled evolution. ``data`` is (n_samples, dim) for pure states and
    (n_samples, dim, dim) for density matrices."""

    space: HilbertSpace
    times: np.ndarray
    data: np.ndarray
    stroboscopic_indices: np.ndarray = field(default_factory=lambda: np.zeros(0, dtype=int))

    def __post_init__(self):
        if len(self.times) != len(self.data):
            raise ValueError("snapshot count differs from number of times")
        if np.any(np.diff(self.times) <= 0):
            raise ValueError("trajectory times must be strictly increasing")

    @property
    def mixed(self) -> bool:
        return self.data.ndim == 3

    @property
    def states(self) -> list:
        if self.mixed:
            return [DensityMatrix(self.space, r) for r in self.data]
        return [StateVector(self.space, v) for v in self.data]

    def __len__(self) -> int:
        return len(self.times)


def _duration_key(d: float) -> float:
    return round(d, 12)


def _walk(schedule: PulseSchedule, state, advance, apply_instant):
    """Drive ``state`` across the schedule, yielding it at every grid time.

    Grid points in [start, end) of each segment are recorded before any jump
    at ``end``, so the sample at t = n*T_D always follows the n-th pulse.
    """
    grid = schedule.sample_times()
    tol = _GRID_TOL * schedule.period
    snaps = []
    gi = 0
    t = 0.0
    for seg in schedule.segments:
        t_end = t + seg.duration
        pos = t
        while gi < len(grid) and grid[gi] < t_end - tol:
            tg = grid[gi]
            if tg > pos + tol:
                state = advance(seg, state, pos, tg)
                pos = tg
            snaps.append(state)
            gi += 1
        if t_end > pos + tol:
            state = advance(seg, state, pos, t_end)
        elif isinstance(seg, Pulse) and seg.spec.kind == "instantaneous":
            state = apply_instant(seg.spec, state)
        t = t_end
    while gi < len(grid):
        snaps.append(state)
        gi += 1
    strobe = np.arange(0, len(grid), schedule.sample_rate)
    return grid, snaps, strobe


def _pulse_unitary(spec: PulseSpec, space: HilbertSpace) -> np.ndarray:
    return global_pulse_operator(spec.theta, space, spec.per_site_scale).matrix


def _lab_drive(spec: PulseSpec, space: HilbertSpace) -> LabDrive:
    return LabDrive(spec.amplitude, spec.carrier, space, per_site_scale=spec.per_site_scale)


def _lab_step(spec: PulseSpec) -> float:
    fastest = 2.0 * max(abs(w) for w in spec.carrier)
    h = 2 * math.pi / fastest / LAB_STEPS_PER_CYCLE if fastest > 0 else math.inf
    return min(h, 0.1 / spec.amplitude)


def _cf4_step(h_of_t: Callable[[float], np.ndarray], t: float, h: float) -> np.ndarray:
    h1 = h_of_t(t + _CF4_C[0] * h)
    h2 = h_of_t(t + _CF4_C[1] * h)
    a1, a2 = _CF4_A
    first = _expm_hermitian(a2 * h1 + a1 * h2, h)
    second = _expm_hermitian(a1 * h1 + a2 * h2, h)
    return second @ first


def _cf4_evolve(psi: np.ndarray, h_of_t, t0: float, t1: float, dt_max: float) -> np.ndarray:
    if not dt_max > 0:
        raise IntegrationError(f"step size underflow (dt_max={dt_max})")
    n = max(1, math.ceil((t1 - t0) / dt_max - 1e-9))
    if n > MAX_STEPS:
        raise IntegrationError(f"{n} steps needed; step size too small for span {t1 - t0}")
    h = (t1 - t0) / n
    for k in range(n):
        psi = _cf4_step(h_of_t, t0 + k * h, h) @ psi
    return psi


def evolve_closed(psi0: StateVector, h: SpinOperator, schedule: PulseSchedule) -> Trajectory:
    """Unitary evolution of a pure state through ``schedule``."""
    space = psi0.space
    if h.space.dim != space.dim:
        raise ValueError("Hamiltonian and state live on different spaces")
    if not h.hermitian_flag:
        raise ValueError("Hamiltonian must be Hermitian")
    hm = h.matrix
    cache: dict = {}
    pulse_h: dict = {}
    drives: dict = {}

    def unitary(key_h, matrix, d):
        k = (key_h, _duration_key(d))
        if k not in cache:
            cache[k] = _expm_hermitian(matrix, d)
        return cache[k]

    def advance(seg, psi, ta, tb):
        if isinstance(seg, Free):
            return unitary("free", hm, tb - ta) @ psi
        spec = seg.spec
        if spec.kind == "finite_rwa":
            if id(spec) not in pulse_h:
                pulse_h[id(spec)] = hm + rwa_pulse_hamiltonian(spec.amplitude, space, spec.per_site_scale).matrix
            return unitary(("rwa", id(spec)), pulse_h[id(spec)], tb - ta) @ psi
        if id(spec) not in drives:
            drives[id(spec)] = _lab_drive(spec, space)
        drive = drives[id(spec)]
        return _cf4_evolve(psi, lambda t: hm + drive(t), ta, tb, _lab_step(spec))

    def instant(spec, psi):
        k = ("instant", id(spec))
        if k not in cache:
            cache[k] = _pulse_unitary(spec, space)
        return cache[k] @ psi

    times, snaps, strobe = _walk(schedule, psi0.amplitudes.copy(), advance, instant)
    return Trajectory(space, times, np.array(snaps), strobe)


def evolve_timedep(psi0: StateVector, h_static: SpinOperator,
                   h_t: Optional[Callable[[float], np.ndarray]], t_span: Sequence[float],
                   dt_max: float, sample_times: Optional[Sequence[float]] = None) -> Trajectory:
    """Integrate i d psi/dt = (H_static + H_t(t)) psi with fourth-order Magnus steps.

    ``h_t`` returns a Hermitian matrix (or ``None`` for no drive). Samples are
    taken at ``sample_times`` (default: the two ends of ``t_span``).
    """
    space = psi0.space
    t0, t1 = float(t_span[0]), float(t_span[1])
    if t1 <= t0:
        raise ValueError("t_span must be increasing")
    times = np.array([t0, t1] if sample_times is None else sample_times, dtype=float)
    if times[0] < t0 - _GRID_TOL or times[-1] > t1 + _GRID_TOL:
        raise ValueError("sample times outside t_span")
    hs = h_static.matrix

    if h_t is None:
        def h_of_t(t):
            return hs
    else:
        def h_of_t(t):
            return hs + h_t(t)

    psi = psi0.amplitudes.copy()
    pos = t0
    snaps = []
    for ts in times:
        if ts > pos:
            psi = _cf4_evolve(psi, h_of_t, pos, ts, dt_max)
            pos = ts
        snaps.append(psi)
    return Trajectory(space, times, np.array(snaps))


def _spectral_spread(h: np.ndarray) -> float:
    w = np.linalg.eigvalsh(h)
    return float(w[-1] - w[0])


class _LindbladRHS:
    """d rho/dt = -i (Heff rho - rho Heff^+) + sum_k L_k rho L_k^+."""

    def __init__(self, collapse: list[np.ndarray], dim: int):
        self.dim = dim
        self.ls = np.array(collapse) if collapse else np.zeros((0, dim, dim), dtype=complex)
        self.lds = np.conj(np.transpose(self.ls, (0, 2, 1)))
        self.damp = -0.5j * np.einsum("kij,kjl->il", self.lds, self.ls)

    def heff(self, h: np.ndarray) -> np.ndarray:
        return h + self.damp

    def __call__(self, heff: np.ndarray, rho: np.ndarray) -> np.ndarray:
        out = -1j * (heff @ rho - rho @ heff.conj().T)
        if len(self.ls):
            out += np.sum(self.ls @ rho @ self.lds, axis=0)
        return out

    def superoperator(self, heff: np.ndarray) -> np.ndarray:
        """Generator acting on row-major vec(rho): vec(A rho B) = (A kron B^T) vec(rho)."""
        eye = np.eye(self.dim)
        sup = -1j * (np.kron(heff, eye) - np.kron(eye, heff.conj()))
        for l in self.ls:
            sup += np.kron(l, l.conj())
        return sup


# Largest dimension for which RK4 steps are applied as a precomputed superoperator.
SUPEROPERATOR_MAX_DIM = 64


class _StaticRK4:
    """RK4 for a time-independent generator.

    For small systems the step map I + hS + ... + (hS)^4/24 is formed once and
    powered per interval; otherwise the stages are evaluated directly.
    """

    def __init__(self, rhs: _LindbladRHS, heff: np.ndarray):
        self.rhs = rhs
        self.heff = heff
        self.sup = rhs.superoperator(heff) if rhs.dim <= SUPEROPERATOR_MAX_DIM else None
        self._maps: dict = {}

    def _map(self, n: int, h: float) -> np.ndarray:
        key = (n, _duration_key(h))
        if key not in self._maps:
            a = h * self.sup
            step = np.eye(len(a), dtype=complex)
            term = np.eye(len(a), dtype=complex)
            for k in range(1, 5):
                term = term @ a / k
                step = step + term
            self._maps[key] = np.linalg.matrix_power(step, n)
        return self._maps[key]

    def evolve(self, rho: np.ndarray, t0: float, t1: float, h_max: float) -> np.ndarray:
        n, h = _step_count(t0, t1, h_max)
        if self.sup is not None:
            return (self._map(n, h) @ rho.reshape(-1)).reshape(rho.shape)
        rhs, he = self.rhs, self.heff
        for _ in range(n):
            k1 = rhs(he, rho)
            k2 = rhs(he, rho + 0.5 * h * k1)
            k3 = rhs(he, rho + 0.5 * h * k2)
            k4 = rhs(he, rho + h * k3)
            rho = rho + (h / 6.0) * (k1 + 2 * k2 + 2 * k3 + k4)
        return rho


def _step_count(t0: float, t1: float, h_max: float):
    if not h_max > 0:
        raise IntegrationError(f"step size underflow (h_max={h_max})")
    n = max(1, math.ceil((t1 - t0) / h_max - 1e-9))
    if n > MAX_STEPS:
        raise IntegrationError(f"{n} RK4 steps needed for span {t1 - t0}")
    return n, (t1 - t0) / n


def _rk4_timedep(rhs: _LindbladRHS, heff_of_t, rho: np.ndarray, t0: float, t1: float,
                 h_max: float) -> np.ndarray:
    n, h = _step_count(t0, t1, h_max)
    for k in range(n):
        t = t0 + k * h
        hm = heff_of_t(t + 0.5 * h)
        k1 = rhs(heff_of_t(t), rho)
        k2 = rhs(hm, rho + 0.5 * h * k1)
        k3 = rhs(hm, rho + 0.5 * h * k2)
        k4 = rhs(heff_of_t(t + h), rho + h * k3)
        rho = rho + (h / 6.0) * (k1 + 2 * k2 + 2 * k3 + k4)
    return rho


def lindblad_step_size(schedule: PulseSchedule, noise: NoiseSpec, h: SpinOperator) -> float:
    """Free-segment RK4 step used by :func:`evolve_lindblad`."""
    dt = schedule.period / LINDBLAD_STEPS_PER_PERIOD
    if noise.zeta > 0:
        dt = min(dt, LINDBLAD_RATE_STEP / noise.zeta)
    spread = _spectral_spread(h.matrix)
    if spread > 0:
        dt = min(dt, SPECTRAL_STEP / spread)
    return dt


def evolve_lindblad(rho0: Union[DensityMatrix, StateVector], h: SpinOperator, noise: NoiseSpec,
                    schedule: PulseSchedule) -> Trajectory:
    """Master-equation evolution through ``schedule``; noise acts during pulses too."""
    if isinstance(rho0, StateVector):
        rho0 = rho0.to_density()
    space = rho0.space
    if h.space.dim != space.dim:
        raise ValueError("Hamiltonian and state live on different spaces")
    rhs = _LindbladRHS(noise.collapse_operators(space), space.dim)
    dt_free = lindblad_step_size(schedule, noise, h)
    free = _StaticRK4(rhs, rhs.heff(h.matrix))
    prepared: dict = {}

    def prepare(spec):
        if id(spec) in prepared:
            return prepared[id(spec)]
        if spec.kind == "finite_rwa":
            hp = h.matrix + rwa_pulse_hamiltonian(spec.amplitude, space, spec.per_site_scale).matrix
            step = min(dt_free, SPECTRAL_STEP / max(_spectral_spread(hp), 1e-300))
            entry = (_StaticRK4(rhs, rhs.heff(hp)), step)
        elif spec.kind == "finite_lab":
            drive = _lab_drive(spec, space)
            hm = rhs.heff(h.matrix)
            bound = _spectral_spread(h.matrix) + 2 * spec.amplitude * float(np.sum(spec.scale(space.n_sites)))
            step = min(dt_free, _lab_step(spec), SPECTRAL_STEP / bound)
            entry = (lambda t, d=drive, hm=hm: hm + d(t), step)
        else:
            entry = (_pulse_unitary(spec, space), None)
        prepared[id(spec)] = entry
        return entry

    def advance(seg, rho, ta, tb):
        if isinstance(seg, Free):
            return free.evolve(rho, ta, tb, dt_free)
        gen, step = prepare(seg.spec)
        if isinstance(gen, _StaticRK4):
            return gen.evolve(rho, ta, tb, step)
        return _rk4_timedep(rhs, gen, rho, ta, tb, step)

    def instant(spec, rho):
        u, _ = prepare(spec)
        return u @ rho @ u.conj().T

    times, snaps, strobe = _walk(schedule, rho0.matrix.copy(), advance, instant)
    data = np.array(snaps)
    traces = np.einsum("kii->k", data).real
    if np.max(np.abs(traces - 1.0)) > TRACE_TOL:
        raise IntegrationError(f"trace drifted to {traces[np.argmax(np.abs(traces - 1))]!r}")
    final = 0.5 * (data[-1] + data[-1].conj().T)
    lo = np.linalg.eigvalsh(final).min()
    if lo < POSITIVITY_TOL:
        raise IntegrationError(f"final density matrix lost positivity (min eigenvalue {lo:.2e})")
    return Trajectory(space, times, data, strobe)
