"""Run configurations, figure presets, single runs and parameter sweeps.

A configuration is a JSON document::

    {"name": ..., "model": "cold_atom" | "circuit",
     "cold_atom": {"n_sites", "g", "kappa", "alpha"},
     "circuit": {"omega_q_ghz", "jz_mhz", "interacting", "amplitude", "amplitude_factor"},
     "schedule": {"period", "n_periods", "pulse_kind", "epsilon", "delta", "sample_rate"},
     "noise": {"zeta", "channels", "per_site"},
     "initial_state": "UDUDU", "outputs": [...], "seed": 0}

``kappa`` may be the string ``"inf"``; a ``null`` circuit amplitude means
``amplitude_factor * max|J|`` of the tabulated couplings.
"""

from __future__ import annotations

import copy
import csv
import io
import json
import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field, fields
from itertools import product
from pathlib import Path
from typing import Any, Optional

import numpy as np

from . import __version__
from .drive import PulseSpec, inhomogeneous_scale, make_schedule
from .evolve import NoiseSpec, evolve_closed, evolve_lindblad, lindblad_step_size
from .models import (HARMONIC_ALPHA_N5, CIRCUIT_JZ_MHZ, CIRCUIT_OMEGA_GHZ, CircuitParams, ColdAtomParams,
                     build_xxz, circuit_couplings, cold_atom_couplings, ghz, mhz, mirror_complete)
from .observables import (TimeSeries, magnetization_series, overlap_series, spectral_density,
                          subharmonic_metrics)
from .spin import HilbertSpace, product_state

OUT_DIR_ENV = "DTCCHAIN_OUT_DIR"
OUTPUT_KINDS = ("magnetization", "overlap", "spectrum", "peaks")
SWEEP_AXES = {
    "g": ("cold_atom", "g"),
    "kappa": ("cold_atom", "kappa"),
    "epsilon": ("schedule", "epsilon"),
    "zeta": ("noise", "zeta"),
    "delta": ("schedule", "delta"),
}
SWEEP_METRICS = ("peak_frequency", "peak_height", "subharmonic_weight", "split_detected", "split_separation")
MAX_GRID = 10_000
MIN_SPECTRUM_PERIODS = 8


class ConfigError(ValueError):
    """Invalid configuration; ``path`` names the offending field."""

    def __init__(self, path: str, message: str):
        super().__init__(f"{path}: {message}" if path else message)
        self.path = path


def _num(value, path: str, *, positive=False, nonneg=False, allow_inf=False) -> float:
    if isinstance(value, str) and allow_inf and value.strip().lower() in ("inf", "infinity"):
        return math.inf
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigError(path, f"expected a number, got {value!r}")
    v = float(value)
    if math.isnan(v) or (math.isinf(v) and not allow_inf):
        raise ConfigError(path, f"expected a finite number, got {value!r}")
    if positive and not v > 0:
        raise ConfigError(path, f"must be positive, got {value!r}")
    if nonneg and v < 0:
        raise ConfigError(path, f"must be non-negative, got {value!r}")
    return v


def _int(value, path: str, minimum: int = 1) -> int:
    if isinstance(value, bool) or not isinstance(value, int) and not (isinstance(value, float) and value.is_integer()):
        raise ConfigError(path, f"expected an integer, got {value!r}")
    v = int(value)
    if v < minimum:
        raise ConfigError(path, f"must be at least {minimum}, got {v}")
    return v


def _numlist(value, path: str, length: Optional[int] = None) -> tuple:
    if not isinstance(value, (list, tuple)):
        raise ConfigError(path, f"expected a list of numbers, got {value!r}")
    out = tuple(_num(v, f"{path}[{i}]") for i, v in enumerate(value))
    if length is not None and len(out) != length:
        raise ConfigError(path, f"expected {length} entries, got {len(out)}")
    return out


def _check_keys(d: dict, allowed, path: str) -> None:
    if not isinstance(d, dict):
        raise ConfigError(path, f"expected an object, got {type(d).__name__}")
    extra = sorted(set(d) - set(allowed))
    if extra:
        raise ConfigError(f"{path}.{extra[0]}" if path else extra[0], "unknown field")


@dataclass(frozen=True)
class ColdAtomSection:
    n_sites: int = 5
    g: float = 10.0
    kappa: float = math.inf
    alpha: tuple = HARMONIC_ALPHA_N5

    @classmethod
    def from_dict(cls, d: dict, path="cold_atom") -> "ColdAtomSection":
        _check_keys(d, [f.name for f in fields(cls)], path)
        n = _int(d.get("n_sites", 5), f"{path}.n_sites", 2)
        alpha = d.get("alpha")
        if alpha is None:
            if n != 5:
                raise ConfigError(f"{path}.alpha", "required unless n_sites is 5")
            alpha = HARMONIC_ALPHA_N5
        return cls(
            n_sites=n,
            g=_num(d.get("g", 10.0), f"{path}.g", positive=True),
            kappa=_num(d.get("kappa", math.inf), f"{path}.kappa", positive=True, allow_inf=True),
            alpha=_numlist(alpha, f"{path}.alpha", n - 1),
        )

    def to_dict(self) -> dict:
        return {"n_sites": self.n_sites, "g": self.g,
                "kappa": "inf" if math.isinf(self.kappa) else self.kappa, "alpha": list(self.alpha)}


@dataclass(frozen=True)
class CircuitSection:
    omega_q_ghz: tuple = mirror_complete(CIRCUIT_OMEGA_GHZ, 5)
    jz_mhz: tuple = mirror_complete(CIRCUIT_JZ_MHZ, 4)
    interacting: bool = True
    amplitude: Optional[float] = None
    amplitude_factor: float = 100.0

    @classmethod
    def from_dict(cls, d: dict, path="circuit") -> "CircuitSection":
        _check_keys(d, [f.name for f in fields(cls)], path)
        omega = _numlist(d.get("omega_q_ghz", cls.omega_q_ghz), f"{path}.omega_q_ghz")
        jz = _numlist(d.get("jz_mhz", cls.jz_mhz), f"{path}.jz_mhz", len(omega) - 1)
        inter = d.get("interacting", True)
        if not isinstance(inter, bool):
            raise ConfigError(f"{path}.interacting", f"expected true/false, got {inter!r}")
        amp = d.get("amplitude")
        return cls(
            omega_q_ghz=omega, jz_mhz=jz, interacting=inter,
            amplitude=None if amp is None else _num(amp, f"{path}.amplitude", positive=True),
            amplitude_factor=_num(d.get("amplitude_factor", 100.0), f"{path}.amplitude_factor", positive=True),
        )

    def to_dict(self) -> dict:
        return {"omega_q_ghz": list(self.omega_q_ghz), "jz_mhz": list(self.jz_mhz),
                "interacting": self.interacting, "amplitude": self.amplitude,
                "amplitude_factor": self.amplitude_factor}

    def resolved_amplitude(self) -> float:
        if self.amplitude is not None:
            return self.amplitude
        jmax = float(np.max(np.abs(mhz(self.jz_mhz))))
        if jmax == 0:
            raise ConfigError("circuit.amplitude", "cannot derive amplitude from all-zero couplings")
        return self.amplitude_factor * jmax

    def params(self, epsilon: float, zeta: float) -> CircuitParams:
        omega = ghz(self.omega_q_ghz)
        jz = mhz(self.jz_mhz) if self.interacting else np.zeros(len(self.jz_mhz))
        sym = bool(np.array_equal(omega, omega[::-1]) and np.array_equal(jz, jz[::-1]))
        return CircuitParams(omega, jz, self.resolved_amplitude(), epsilon, zeta, symmetric=sym)


@dataclass(frozen=True)
class ScheduleSection:
    period: float = 1.0
    n_periods: int = 64
    pulse_kind: str = "instantaneous"
    epsilon: float = 0.0
    delta: float = 0.0
    sample_rate: int = 32

    @classmethod
    def from_dict(cls, d: dict, path="schedule") -> "ScheduleSection":
        _check_keys(d, [f.name for f in fields(cls)], path)
        kind = d.get("pulse_kind", "instantaneous")
        if kind not in ("instantaneous", "finite_rwa", "finite_lab"):
            raise ConfigError(f"{path}.pulse_kind", f"unknown pulse kind {kind!r}")
        eps = _num(d.get("epsilon", 0.0), f"{path}.epsilon", nonneg=True)
        if eps >= math.pi:
            raise ConfigError(f"{path}.epsilon", "must be below pi")
        return cls(
            period=_num(d.get("period", 1.0), f"{path}.period", positive=True),
            n_periods=_int(d.get("n_periods", 64), f"{path}.n_periods"),
            pulse_kind=kind,
            epsilon=eps,
            delta=_num(d.get("delta", 0.0), f"{path}.delta"),
            sample_rate=_int(d.get("sample_rate", 32), f"{path}.sample_rate"),
        )

    def to_dict(self) -> dict:
        return asdict(self)


@dataclass(frozen=True)
class NoiseSection:
    zeta: float = 0.0
    channels: tuple = ("relaxation",)
    per_site: bool = True

    @classmethod
    def from_dict(cls, d: dict, path="noise") -> "NoiseSection":
        _check_keys(d, [f.name for f in fields(cls)], path)
        ch = d.get("channels", ["relaxation"])
        if not isinstance(ch, (list, tuple)) or any(c not in ("relaxation", "dephasing") for c in ch):
            raise ConfigError(f"{path}.channels", f"expected a subset of [relaxation, dephasing], got {ch!r}")
        per_site = d.get("per_site", True)
        if not isinstance(per_site, bool):
            raise ConfigError(f"{path}.per_site", "expected true/false")
        return cls(zeta=_num(d.get("zeta", 0.0), f"{path}.zeta", nonneg=True),
                   channels=tuple(sorted(set(ch))), per_site=per_site)

    def to_dict(self) -> dict:
        return {"zeta": self.zeta, "channels": list(self.channels), "per_site": self.per_site}

    def spec(self) -> NoiseSpec:
        return NoiseSpec(self.zeta, frozenset(self.channels), self.per_site)


@dataclass(frozen=True)
class RunConfig:
    model: str
    cold_atom: Optional[ColdAtomSection] = None
    circuit: Optional[CircuitSection] = None
    schedule: ScheduleSection = field(default_factory=ScheduleSection)
    noise: NoiseSection = field(default_factory=NoiseSection)
    initial_state: str = ""
    outputs: tuple = OUTPUT_KINDS
    seed: int = 0
    name: str = ""

    def __post_init__(self):
        if self.model not in ("cold_atom", "circuit"):
            raise ConfigError("model", f"expected 'cold_atom' or 'circuit', got {self.model!r}")
        present = {"cold_atom": self.cold_atom is not None, "circuit": self.circuit is not None}
        if not present[self.model] or sum(present.values()) != 1:
            raise ConfigError(self.model, "exactly the section matching 'model' must be present")
        if "spectrum" in self.outputs or "peaks" in self.outputs:
            if self.schedule.n_periods < MIN_SPECTRUM_PERIODS:
                raise ConfigError("schedule.n_periods",
                                  f"spectra need at least {MIN_SPECTRUM_PERIODS} periods")
        if self.initial_state and len(self.initial_state) != self.n_sites:
            raise ConfigError("initial_state", f"expected {self.n_sites} sites, got {len(self.initial_state)}")
        if self.model == "cold_atom" and self.schedule.pulse_kind != "instantaneous":
            raise ConfigError("schedule.pulse_kind", "the cold-atom model uses instantaneous pulses")

    @property
    def n_sites(self) -> int:
        if self.model == "cold_atom":
            return self.cold_atom.n_sites
        return len(self.circuit.omega_q_ghz)

    @classmethod
    def from_dict(cls, d: dict) -> "RunConfig":
        _check_keys(d, [f.name for f in fields(cls)], "")
        model = d.get("model")
        if model not in ("cold_atom", "circuit"):
            raise ConfigError("model", f"expected 'cold_atom' or 'circuit', got {model!r}")
        outputs = d.get("outputs", list(OUTPUT_KINDS))
        if not isinstance(outputs, (list, tuple)) or any(o not in OUTPUT_KINDS for o in outputs):
            raise ConfigError("outputs", f"expected a subset of {list(OUTPUT_KINDS)}, got {outputs!r}")
        init = d.get("initial_state", "")
        if not isinstance(init, str) or any(c not in "UD" for c in init):
            raise ConfigError("initial_state", "expected a string of U and D characters")
        return cls(
            model=model,
            cold_atom=ColdAtomSection.from_dict(d["cold_atom"]) if d.get("cold_atom") is not None else None,
            circuit=CircuitSection.from_dict(d["circuit"]) if d.get("circuit") is not None else None,
            schedule=ScheduleSection.from_dict(d.get("schedule", {})),
            noise=NoiseSection.from_dict(d.get("noise", {})),
            initial_state=init,
            outputs=tuple(o for o in OUTPUT_KINDS if o in outputs),
            seed=_int(d.get("seed", 0), "seed", 0),
            name=str(d.get("name", "")),
        )

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "model": self.model,
            "cold_atom": self.cold_atom.to_dict() if self.cold_atom else None,
            "circuit": self.circuit.to_dict() if self.circuit else None,
            "schedule": self.schedule.to_dict(),
            "noise": self.noise.to_dict(),
            "initial_state": self.initial_state,
            "outputs": list(self.outputs),
            "seed": self.seed,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)


def parse_config(text: str) -> RunConfig:
    """Parse JSON text; syntax errors report line and column."""
    try:
        d = json.loads(text)
    except json.JSONDecodeError as e:
        raise ConfigError(f"line {e.lineno} column {e.colno}", e.msg) from None
    return RunConfig.from_dict(d)


def _coerce(text: str):
    try:
        return json.loads(text)
    except json.JSONDecodeError:
        return text


def apply_overrides(d: dict, assignments) -> dict:
    """Apply ``key.sub=value`` overrides (values parsed as JSON when possible)."""
    d = copy.deepcopy(d)
    for item in assignments:
        if "=" not in item:
            raise ConfigError(item, "override must look like key=value")
        key, raw = item.split("=", 1)
        parts = key.strip().split(".")
        node = d
        for p in parts[:-1]:
            if not isinstance(node.get(p), dict):
                raise ConfigError(key, f"no section {p!r}")
            node = node[p]
        node[parts[-1]] = _coerce(raw)
    return d


# --- presets -----------------------------------------------------------------

IMPERFECT_EPS = 0.1 * math.pi


def _cold(name, kappa, eps):
    return RunConfig(model="cold_atom", cold_atom=ColdAtomSection(g=10.0, kappa=kappa),
                     schedule=ScheduleSection(period=1.0, n_periods=64, epsilon=eps), name=name)


def _circ(name, interacting, inhomogeneous, noisy, eps=IMPERFECT_EPS):
    return RunConfig(
        model="circuit",
        circuit=CircuitSection(interacting=interacting),
        schedule=ScheduleSection(period=10.0, n_periods=64, pulse_kind="finite_rwa", epsilon=eps,
                                 delta=0.1 if inhomogeneous else 0.0),
        noise=NoiseSection(zeta=0.05 if noisy else 0.0),
        name=name,
    )


def _build_presets() -> dict:
    p = {
        "fig2-perfect": ("fermions (kappa=inf), g=10, perfect pi pulses",
                         _cold("fig2-perfect", math.inf, 0.0)),
        "fig2-fermion-imperfect": ("fermions, g=10, eps=0.1pi (beating, split peak)",
                                   _cold("fig2-fermion-imperfect", math.inf, IMPERFECT_EPS)),
        "fig2-boson-imperfect": ("bosons kappa=0.1, g=10, eps=0.1pi (locked f_D/2 peak)",
                                 _cold("fig2-boson-imperfect", 0.1, IMPERFECT_EPS)),
    }
    for inter in (False, True):
        tag = "interacting" if inter else "noninteracting"
        for inhom in (False, True):
            drv = "inhomogeneous" if inhom else "ideal"
            for noisy in (False, True):
                loss = "noisy" if noisy else "lossless"
                name = f"fig4-{tag}-{drv}-{loss}"
                desc = (f"{'Ising-coupled' if inter else 'J=0'} circuit, {drv} finite RWA pulses, "
                        f"eps=0.1pi, {'zeta=0.05 relaxation' if noisy else 'no losses'}")
                p[name] = (desc, _circ(name, inter, inhom, noisy))
    aliases = {
        "fig2-boson": "fig2-boson-imperfect",
        "fig4-noninteracting": "fig4-noninteracting-ideal-lossless",
        "fig4-interacting": "fig4-interacting-ideal-lossless",
        "fig4-interacting-noisy": "fig4-interacting-ideal-noisy",
    }
    for alias, target in aliases.items():
        desc, cfg = p[target]
        p[alias] = (f"alias of {target}", RunConfig.from_dict({**cfg.to_dict(), "name": alias}))
    return p


PRESETS = _build_presets()


def get_preset(name: str) -> RunConfig:
    try:
        return PRESETS[name][1]
    except KeyError:
        raise ConfigError("preset", f"unknown preset {name!r}; see list-presets") from None


def list_presets() -> list[tuple[str, str]]:
    return [(name, desc) for name, (desc, _) in PRESETS.items()]


# --- running -----------------------------------------------------------------


@dataclass
class RunResult:
    config: RunConfig
    times: np.ndarray
    m_normalized: np.ndarray
    m_raw: np.ndarray
    overlap: np.ndarray
    stroboscopic_indices: np.ndarray
    spectrum: Any = None
    peaks: Any = None
    metadata: dict = field(default_factory=dict)
    paths: dict = field(default_factory=dict)

    def summary(self) -> dict:
        out = {"name": self.config.name, "n_samples": len(self.times)}
        if self.peaks is not None:
            out.update(self.peaks.to_dict())
        out.update({k: str(v) for k, v in self.paths.items()})
        return out


def build_problem(cfg: RunConfig):
    """Hamiltonian, initial state, schedule, noise and unit metadata for ``cfg``."""
    space = HilbertSpace(cfg.n_sites)
    sch = cfg.schedule
    scale = inhomogeneous_scale(space.n_sites, sch.delta) if sch.delta else None
    units = {}
    if cfg.model == "cold_atom":
        ca = cfg.cold_atom
        params = ColdAtomParams(ca.n_sites, ca.g, ca.kappa, ca.alpha)
        h = build_xxz(cold_atom_couplings(params), space)
        pulse = PulseSpec.imperfect(sch.epsilon, per_site_scale=scale)
        units = {"time": "harmonic-oscillator units (hbar = m = omega = 1)", "energy": "hbar*omega"}
    else:
        cp = cfg.circuit.params(sch.epsilon, cfg.noise.zeta)
        h = build_xxz(circuit_couplings(cp, "rotating"), space)
        carrier = cp.omega_q if sch.pulse_kind == "finite_lab" else None
        if sch.pulse_kind == "instantaneous":
            pulse = PulseSpec.imperfect(sch.epsilon, per_site_scale=scale)
        else:
            pulse = PulseSpec.imperfect(sch.epsilon, kind=sch.pulse_kind, amplitude=cp.amplitude,
                                        per_site_scale=scale, carrier=carrier)
        units = {"time": "ns", "angular_frequency": "rad/ns", "frame": "rotating (qubit frame)",
                 "zeta": "rate in 1/ns (assumed; zeta carries no units in the model definition)"}
    schedule = make_schedule(sch.period, sch.n_periods, pulse, sch.sample_rate)
    init = cfg.initial_state or "".join("UD"[k % 2] for k in range(space.n_sites))
    psi0 = product_state(init, space)
    return h, psi0, schedule, cfg.noise.spec(), units


def simulate(cfg: RunConfig) -> RunResult:
    h, psi0, schedule, noise, units = build_problem(cfg)
    if noise.zeta > 0:
        traj = evolve_lindblad(psi0, h, noise, schedule)
    else:
        traj = evolve_closed(psi0, h, schedule)
    m_raw = magnetization_series(traj, normalized=False)
    res = RunResult(cfg, traj.times, 0.5 * m_raw, m_raw, overlap_series(traj, psi0), traj.stroboscopic_indices)
    if "spectrum" in cfg.outputs or "peaks" in cfg.outputs:
        res.spectrum = spectral_density(TimeSeries(traj.times, res.m_normalized, schedule.period))
        res.peaks = subharmonic_metrics(res.spectrum)
    pulse = schedule.pulse
    meta = {
        "code_version": __version__,
        "config": cfg.to_dict(),
        "units": units,
        "magnetization_normalization": "m_normalized = 0.5 * <sum_i sigma_i^z>; m_raw = <sum_i sigma_i^z>",
        "resolved": {
            "n_sites": cfg.n_sites,
            "initial_state": cfg.initial_state or "".join("UD"[k % 2] for k in range(cfg.n_sites)),
            "theta": pulse.theta,
            "pulse_kind": pulse.kind,
            "pulse_duration": pulse.duration,
            "pulse_amplitude": pulse.amplitude,
            "per_site_scale": list(pulse.scale(cfg.n_sites)),
            "sample_rate": schedule.sample_rate,
            "sample_interval": schedule.sample_interval,
            "total_time": schedule.total_duration,
            "noise_channels": sorted(noise.channels) if noise.zeta > 0 else [],
            "noise_rate": noise.zeta,
            "integrator": "lindblad-rk4" if noise.zeta > 0 else "exact-propagator",
            "lindblad_step": lindblad_step_size(schedule, noise, h) if noise.zeta > 0 else None,
            "spectrum": {"window": "rectangular", "padding": "next power of two",
                         "band": "(0, f_D]", "subharmonic_half_width": 1 / 40,
                         "split_separation": 1 / 20, "split_height_ratio": 5.0},
        },
    }
    if cfg.model == "circuit":
        cp = cfg.circuit.params(cfg.schedule.epsilon, cfg.noise.zeta)
        meta["resolved"]["omega_q_rad_per_ns"] = list(cp.omega_q)
        meta["resolved"]["jz_rad_per_ns"] = list(cp.jz)
    else:
        ca = cfg.cold_atom
        c = cold_atom_couplings(ColdAtomParams(ca.n_sites, ca.g, ca.kappa, ca.alpha))
        meta["resolved"]["couplings"] = {k: list(getattr(c, k)) for k in ("eta0", "etax", "etay", "etaz", "omega")}
    res.metadata = meta
    return res


def _fmt(x) -> str:
    return format(float(x), ".17g")


def timeseries_csv(res: RunResult) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["t", "t_over_TD", "m_normalized", "m_raw", "F"])
    period = res.config.schedule.period
    for t, mn, mr, f in zip(res.times, res.m_normalized, res.m_raw, res.overlap):
        w.writerow([_fmt(t), _fmt(t / period), _fmt(mn), _fmt(mr), _fmt(f)])
    return buf.getvalue()


def spectrum_csv(res: RunResult) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["f_over_fD", "S"])
    for f, s in zip(res.spectrum.relative_frequencies, res.spectrum.density):
        w.writerow([_fmt(f), _fmt(s)])
    return buf.getvalue()


def _json(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True, default=float) + "\n"


def resolve_out_dir(out_dir=None) -> Path:
    return Path(out_dir or os.environ.get(OUT_DIR_ENV) or "dtc_output")


def run(cfg: RunConfig, out_dir=None) -> RunResult:
    """Simulate ``cfg`` and write its output files into ``out_dir``."""
    res = simulate(cfg)
    out = resolve_out_dir(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    stem = cfg.name or "run"
    files = {}
    if "magnetization" in cfg.outputs or "overlap" in cfg.outputs:
        files["timeseries"] = (out / f"{stem}_timeseries.csv", timeseries_csv(res))
    if "spectrum" in cfg.outputs:
        files["spectrum"] = (out / f"{stem}_spectrum.csv", spectrum_csv(res))
    if "peaks" in cfg.outputs:
        files["peaks"] = (out / f"{stem}_peaks.json", _json(res.peaks.to_dict()))
    files["metadata"] = (out / f"{stem}_metadata.json", _json(res.metadata))
    for key, (path, text) in files.items():
        path.write_text(text)
        res.paths[key] = path
    return res


# --- sweeps ------------------------------------------------------------------


@dataclass(frozen=True)
class SweepConfig:
    base: RunConfig
    axes: tuple  # ((name, (values...)), ...)
    reduce: tuple = ("subharmonic_weight",)

    def __post_init__(self):
        if not 1 <= len(self.axes) <= 2:
            raise ConfigError("axes", "a sweep needs one or two axes")
        for name, values in self.axes:
            if name not in SWEEP_AXES:
                raise ConfigError(f"axes.{name}", f"unknown axis; choose from {sorted(SWEEP_AXES)}")
            if not values:
                raise ConfigError(f"axes.{name}", "value list is empty")
            section, _ = SWEEP_AXES[name]
            if section == "cold_atom" and self.base.model != "cold_atom":
                raise ConfigError(f"axes.{name}", "only valid for the cold-atom model")
        for m in self.reduce:
            if m not in SWEEP_METRICS:
                raise ConfigError(f"reduce.{m}", f"unknown metric; choose from {list(SWEEP_METRICS)}")
        size = math.prod(len(v) for _, v in self.axes)
        if size > MAX_GRID:
            raise ConfigError("axes", f"grid of {size} points exceeds {MAX_GRID}")

    @classmethod
    def from_dict(cls, d: dict) -> "SweepConfig":
        _check_keys(d, ["base", "preset", "axes", "reduce", "workers"], "")
        if "preset" in d:
            base = get_preset(d["preset"])
            if "base" in d:
                base = RunConfig.from_dict(apply_overrides(base.to_dict(), [f"{k}={json.dumps(v)}" for k, v in
                                                                              _flatten(d["base"])]))
        elif "base" in d:
            base = RunConfig.from_dict(d["base"])
        else:
            raise ConfigError("base", "a sweep needs a base config or a preset")
        axes_in = d.get("axes")
        if isinstance(axes_in, dict):
            axes_in = list(axes_in.items())
        if not isinstance(axes_in, list):
            raise ConfigError("axes", "expected an object or list of [name, values] pairs")
        axes = []
        for item in axes_in:
            if not (isinstance(item, (list, tuple)) and len(item) == 2):
                raise ConfigError("axes", f"malformed axis entry {item!r}")
            name, values = item
            allow_inf = name == "kappa"
            vals = tuple(_num(v, f"axes.{name}", allow_inf=allow_inf) for v in values) \
                if isinstance(values, list) else None
            if vals is None:
                raise ConfigError(f"axes.{name}", "expected a list of values")
            axes.append((name, vals))
        red = d.get("reduce", ["subharmonic_weight"])
        if not isinstance(red, list):
            raise ConfigError("reduce", "expected a list of metric names")
        return cls(base, tuple(axes), tuple(red))


def _flatten(d: dict, prefix=""):
    for k, v in d.items():
        key = f"{prefix}{k}"
        if isinstance(v, dict):
            yield from _flatten(v, key + ".")
        else:
            yield key, v


def point_config(base: RunConfig, assignment: dict) -> RunConfig:
    d = base.to_dict()
    for name, value in assignment.items():
        section, key = SWEEP_AXES[name]
        d[section][key] = "inf" if isinstance(value, float) and math.isinf(value) else value
    d["outputs"] = ["peaks"]
    return RunConfig.from_dict(d)


def _point_metrics(args):
    cfg, reduce = args
    peaks = simulate(cfg).peaks.to_dict()
    return [peaks[m] for m in reduce]


def sweep(cfg: SweepConfig, workers: int = 1) -> list[dict]:
    """Evaluate every grid point (row-major over the axes as listed)."""
    names = [n for n, _ in cfg.axes]
    points = [dict(zip(names, combo)) for combo in product(*(v for _, v in cfg.axes))]
    jobs = [(point_config(cfg.base, p), cfg.reduce) for p in points]
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as ex:
            results = list(ex.map(_point_metrics, jobs))
    else:
        results = [_point_metrics(j) for j in jobs]
    return [{**p, **dict(zip(cfg.reduce, r))} for p, r in zip(points, results)]


def sweep_csv(cfg: SweepConfig, rows: list[dict]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    cols = [n for n, _ in cfg.axes] + list(cfg.reduce)
    w.writerow(cols)
    for row in rows:
        out = []
        for c in cols:
            v = row[c]
            if v is None:
                out.append("")
            elif isinstance(v, bool):
                out.append(str(v).lower())
            else:
                out.append(_fmt(v))
        w.writerow(out)
    return buf.getvalue()


def run_sweep(cfg: SweepConfig, out_dir=None, workers: int = 1) -> Path:
    rows = sweep(cfg, workers)
    out = resolve_out_dir(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    path = out / f"{cfg.base.name or 'sweep'}_sweep.csv"
    path.write_text(sweep_csv(cfg, rows))
    return path
