import csv
import json
import math

import numpy as np
import pytest

from dtcchain.cli import main
from dtcchain.runner import (MAX_GRID, OUT_DIR_ENV, PRESETS, ConfigError, RunConfig, SweepConfig,
                             apply_overrides, get_preset, parse_config, run, simulate, sweep, sweep_csv)


def _small(name="fig2-boson-imperfect", **over):
    d = get_preset(name).to_dict()
    d["schedule"]["n_periods"] = 16
    for k, v in over.items():
        d = apply_overrides(d, [f"{k}={json.dumps(v)}"])
    return RunConfig.from_dict(d)


class TestConfig:
    @pytest.mark.parametrize("name", sorted(PRESETS))
    def test_round_trip(self, name):
        cfg = get_preset(name)
        again = parse_config(cfg.to_json())
        assert again == cfg
        assert again.to_json() == cfg.to_json()

    def test_infinite_kappa_serialized(self):
        d = json.loads(get_preset("fig2-perfect").to_json())
        assert d["cold_atom"]["kappa"] == "inf"
        assert math.isinf(parse_config(json.dumps(d)).cold_atom.kappa)

    def test_overrides(self):
        d = apply_overrides(get_preset("fig2-perfect").to_dict(), ["schedule.epsilon=0.2", "cold_atom.g=20"])
        cfg = RunConfig.from_dict(d)
        assert cfg.schedule.epsilon == 0.2 and cfg.cold_atom.g == 20

    def test_override_unknown_section(self):
        with pytest.raises(ConfigError):
            apply_overrides({"schedule": {}}, ["nowhere.x=1"])

    @pytest.mark.parametrize("path, value, field", [
        ("cold_atom.g", -1, "cold_atom.g"),
        ("cold_atom.kappa", 0, "cold_atom.kappa"),
        ("schedule.epsilon", 4.0, "schedule.epsilon"),
        ("schedule.pulse_kind", "smooth", "schedule.pulse_kind"),
        ("noise.zeta", -0.1, "noise.zeta"),
        ("noise.channels", ["amplitude"], "noise.channels"),
        ("cold_atom.bogus", 1, "cold_atom.bogus"),
    ])
    def test_error_names_field(self, path, value, field):
        d = apply_overrides(get_preset("fig2-perfect").to_dict(), [f"{path}={json.dumps(value)}"])
        with pytest.raises(ConfigError) as e:
            RunConfig.from_dict(d)
        assert e.value.path == field

    def test_syntax_error_position(self):
        with pytest.raises(ConfigError) as e:
            parse_config('{\n  "model": "cold_atom",\n  oops\n}')
        assert "line 3" in str(e.value)

    def test_wrong_section(self):
        with pytest.raises(ConfigError):
            RunConfig.from_dict({"model": "circuit", "cold_atom": {}})

    def test_cold_atom_pulses_instantaneous(self):
        with pytest.raises(ConfigError):
            _small(**{"schedule.pulse_kind": "finite_rwa"})

    def test_spectrum_needs_periods(self):
        with pytest.raises(ConfigError):
            _small(**{"schedule.n_periods": 4})

    def test_initial_state_length(self):
        with pytest.raises(ConfigError):
            _small(initial_state="UDU")

    def test_unknown_preset(self):
        with pytest.raises(ConfigError):
            get_preset("fig9")


class TestRun:
    def test_files_and_columns(self, tmp_path):
        res = run(_small(), tmp_path)
        ts = list(csv.reader(open(res.paths["timeseries"])))
        assert ts[0] == ["t", "t_over_TD", "m_normalized", "m_raw", "F"]
        assert len(ts) == 1 + 16 * 32 + 1
        row = [float(x) for x in ts[1]]
        assert row == [0.0, 0.0, 0.5, 1.0, 1.0]
        spec = list(csv.reader(open(res.paths["spectrum"])))
        assert spec[0] == ["f_over_fD", "S"]
        peaks = json.loads(res.paths["peaks"].read_text())
        assert peaks["peak_frequency"] == pytest.approx(0.5)
        meta = json.loads(res.paths["metadata"].read_text())
        assert meta["config"] == res.config.to_dict()
        assert meta["units"]["time"].startswith("harmonic")

    def test_byte_identical(self, tmp_path):
        cfg = _small()
        a, b = run(cfg, tmp_path / "a"), run(cfg, tmp_path / "b")
        for key in a.paths:
            assert a.paths[key].read_bytes() == b.paths[key].read_bytes()

    def test_env_out_dir(self, tmp_path, monkeypatch):
        monkeypatch.setenv(OUT_DIR_ENV, str(tmp_path / "env"))
        res = run(_small())
        assert res.paths["metadata"].parent == tmp_path / "env"

    def test_outputs_subset(self, tmp_path):
        res = run(_small(outputs=["magnetization"]), tmp_path)
        assert set(res.paths) == {"timeseries", "metadata"}

    def test_circuit_metadata(self):
        res = simulate(_small("fig4-interacting-ideal-lossless"))
        r = res.metadata["resolved"]
        assert r["pulse_kind"] == "finite_rwa"
        assert r["pulse_duration"] == pytest.approx(0.9 * math.pi / r["pulse_amplitude"])
        assert res.metadata["units"]["time"] == "ns"
        assert r["jz_rad_per_ns"][0] == pytest.approx(2 * math.pi * 0.1689)


class TestCLI:
    def test_list_presets(self, capsys):
        assert main(["list-presets"]) == 0
        out = capsys.readouterr().out
        for name in PRESETS:
            assert name in out

    def test_run_preset(self, tmp_path, capsys):
        code = main(["run", "--preset", "fig2-boson", "--out-dir", str(tmp_path),
                     "--set", "schedule.n_periods=16"])
        assert code == 0
        summary = json.loads(capsys.readouterr().out)
        assert summary["peak_frequency"] == pytest.approx(0.5)
        assert (tmp_path / "fig2-boson_timeseries.csv").exists()

    def test_dump_config(self, capsys):
        assert main(["run", "--preset", "fig2-perfect", "--dump-config"]) == 0
        assert parse_config(capsys.readouterr().out) == get_preset("fig2-perfect")

    def test_config_file(self, tmp_path, capsys):
        path = tmp_path / "c.json"
        path.write_text(_small().to_json())
        assert main(["run", "--config", str(path), "--out-dir", str(tmp_path)]) == 0

    def test_bad_config_exit_code(self, tmp_path, capsys):
        path = tmp_path / "c.json"
        path.write_text('{"model": "cold_atom", "cold_atom": {"g": -2}}')
        assert main(["run", "--config", str(path)]) == 2
        assert "cold_atom.g" in capsys.readouterr().err

    def test_missing_file_exit_code(self, tmp_path, capsys):
        assert main(["run", "--config", str(tmp_path / "none.json")]) == 3

    def test_sweep(self, tmp_path, capsys):
        path = tmp_path / "s.json"
        path.write_text(json.dumps({"preset": "fig2-boson", "base": {"schedule": {"n_periods": 16}},
                                    "axes": {"epsilon": [0.0, 0.3]}}))
        assert main(["sweep", "--config", str(path), "--out-dir", str(tmp_path)]) == 0
        rows = list(csv.reader(open(capsys.readouterr().out.strip())))
        assert rows[0] == ["epsilon", "subharmonic_weight"] and len(rows) == 3


class TestSweep:
    def test_single_point_matches_run(self):
        base = _small()
        cfg = SweepConfig(base, (("epsilon", (base.schedule.epsilon,)),), ("subharmonic_weight", "peak_frequency"))
        row = sweep(cfg)[0]
        peaks = simulate(base).peaks
        assert row["subharmonic_weight"] == peaks.subharmonic_weight
        assert row["peak_frequency"] == peaks.peak_frequency

    def test_perfect_pulses_locked(self):
        cfg = SweepConfig(_small(), (("epsilon", (0.0,)),))
        assert sweep(cfg)[0]["subharmonic_weight"] > 0.9

    def test_kappa_axis(self):
        cfg = SweepConfig(get_preset("fig2-boson"), (("kappa", (0.1, 0.5, 2.0, 100.0, math.inf)),))
        rows = sweep(cfg)
        w = [r["subharmonic_weight"] for r in rows]
        assert int(np.argmax(w)) == 0
        assert w[0] > 10 * w[-1]
        assert sweep_csv(cfg, rows).splitlines()[-1].startswith("inf,")

    def test_two_axes_row_major(self):
        cfg = SweepConfig(_small(), (("epsilon", (0.0, 0.2)), ("g", (10.0, 20.0))))
        rows = sweep(cfg)
        assert [(r["epsilon"], r["g"]) for r in rows] == [(0.0, 10.0), (0.0, 20.0), (0.2, 10.0), (0.2, 20.0)]

    def test_parallel_matches_serial(self):
        cfg = SweepConfig(_small(), (("epsilon", (0.0, 0.2, 0.4)),))
        assert sweep(cfg, workers=2) == sweep(cfg)

    def test_oversized_grid(self):
        n = int(math.isqrt(MAX_GRID)) + 1
        vals = tuple(0.01 * (k + 1) for k in range(n))
        with pytest.raises(ConfigError):
            SweepConfig(_small(), (("epsilon", vals), ("g", tuple(10.0 + v for v in vals))))

    def test_unknown_axis(self):
        with pytest.raises(ConfigError):
            SweepConfig(_small(), (("temperature", (1.0,)),))

    def test_cold_atom_axis_on_circuit(self):
        with pytest.raises(ConfigError):
            SweepConfig(get_preset("fig4-interacting"), (("kappa", (1.0,)),))

    def test_from_dict(self):
        cfg = SweepConfig.from_dict({"preset": "fig2-boson", "axes": [["zeta", [0.0]]], "reduce": ["peak_height"]})
        assert cfg.axes == (("zeta", (0.0,)),) and cfg.reduce == ("peak_height",)
        with pytest.raises(ConfigError):
            SweepConfig.from_dict({"axes": {"epsilon": [0.1]}})
