import csv
import io
import json
import math
import subprocess
import sys
from pathlib import Path

import numpy as np
import pytest

from oscbath.cli import HEADERS, main
from oscbath.config import discretize_ohmic, load_config
from oscbath.equilibrium import equilibrium_moments
from oscbath.errors import ConfigError, UnstableDiscretization
from oscbath.model import Model, spectrum

FIXTURES = Path(__file__).parent / "fixtures"
COMMANDS = ["spectrum", "evolve", "equilibrium", "kernel", "propagate", "correlate"]


def _run(tmp_path, command, config, *extra, name="out"):
    if isinstance(config, dict):
        path = tmp_path / ("%s.json" % name)
        path.write_text(json.dumps(config))
    else:
        path = config
    out = tmp_path / ("%s.%s" % (name, command))
    code = main([command, "--config", str(path), "--out", str(out), *extra])
    return code, (out.read_text() if out.exists() else None)


def _csv(text):
    rows = list(csv.reader(io.StringIO(text)))
    return rows[0], np.array(rows[1:], dtype=float)


@pytest.mark.parametrize("command", COMMANDS)
def test_fixture_runs_and_is_deterministic(tmp_path, command):
    cfg = FIXTURES / ("%s.json" % command)
    code1, a = _run(tmp_path, command, cfg, name="a")
    code2, b = _run(tmp_path, command, cfg, name="b")
    assert code1 == code2 == 0
    assert a == b and a


@pytest.mark.parametrize("command", [c for c in COMMANDS if c != "correlate"])
def test_csv_header_names(tmp_path, command):
    _, text = _run(tmp_path, command, FIXTURES / ("%s.json" % command))
    header, rows = _csv(text)
    assert header == HEADERS[command]
    assert rows.shape[1] == len(header) and rows.shape[0] >= 1


def test_spectrum_decoupled(tmp_path):
    cfg = {"model": {"omega0": 1.1, "baths": [{"omega": 0.6, "g": 0.0}, {"omega": 2.3, "g": 0.0}]}}
    code, text = _run(tmp_path, "spectrum", cfg)
    assert code == 0
    _, rows = _csv(text)
    np.testing.assert_allclose(np.sort(rows[:, 1]), [0.6, 1.1, 2.3], rtol=1e-12)
    main_row = rows[np.argmin(np.abs(rows[:, 1] - 1.1))]
    assert main_row[2] == pytest.approx(1.0)


def test_spectrum_residuals_vanish(tmp_path):
    _, text = _run(tmp_path, "spectrum", FIXTURES / "spectrum.json")
    _, rows = _csv(text)
    assert np.all(np.abs(rows[:, 3]) < 1e-10)


def test_evolve_decoupled_thermal_is_stationary(tmp_path):
    w, beta = 1.2, 0.8
    c = 1.0 / math.tanh(0.5 * beta * w)
    cfg = {
        "model": {"omega0": w, "baths": [{"omega": 0.9, "g": 0.0}]},
        "beta": beta,
        "time_grid": {"t_end": 6.0, "steps": 12},
        "initial": {"var_y": 0.5 * c / w, "var_p": 0.5 * c * w},
    }
    code, text = _run(tmp_path, "evolve", cfg)
    assert code == 0
    _, rows = _csv(text)
    np.testing.assert_allclose(rows[:, 3], 0.5 * c / w, rtol=1e-12)
    np.testing.assert_allclose(rows[:, 4], 0.5 * c * w, rtol=1e-12)
    np.testing.assert_allclose(rows[:, 5], 0.0, atol=1e-12)


def test_equilibrium_monotone_column(tmp_path):
    _, text = _run(tmp_path, "equilibrium", FIXTURES / "equilibrium.json")
    _, rows = _csv(text)
    assert np.all(np.diff(rows[:, 0]) > 0)
    assert np.all(np.diff(rows[:, 3]) < 0)


def test_json_output(tmp_path):
    code, text = _run(tmp_path, "kernel", FIXTURES / "kernel.json", "--format", "json")
    assert code == 0
    data = json.loads(text)
    assert data["command"] == "kernel" and data["columns"] == HEADERS["kernel"]
    assert len(data["rows"]) == 20


def test_correlate_default_json(tmp_path):
    code, text = _run(tmp_path, "correlate", FIXTURES / "correlate.json")
    assert code == 0
    assert set(json.loads(text)) == {"re", "im"}


def test_correlate_methods_agree(tmp_path):
    cfg = json.loads((FIXTURES / "correlate.json").read_text())
    _, closed = _run(tmp_path, "correlate", cfg, name="closed")
    cfg["correlate"]["method"] = "fd"
    _, fd = _run(tmp_path, "correlate", cfg, name="fd")
    a, b = json.loads(closed), json.loads(fd)
    za, zb = complex(a["re"], a["im"]), complex(b["re"], b["im"])
    assert abs(za - zb) < 1e-3 * abs(za)


def test_exit_code_config(tmp_path, capsys):
    bad = tmp_path / "bad.json"
    bad.write_text('{"model": {"omega0": 1.0,}}')
    assert main(["spectrum", "--config", str(bad)]) == 2
    assert "bad.json:1:" in capsys.readouterr().err
    code, _ = _run(tmp_path, "spectrum", {"model": {"omega0": "one"}})
    assert code == 2
    assert "model.omega0" in capsys.readouterr().err
    code, _ = _run(tmp_path, "kernel", {"model": {"omega0": 1.0}, "time_grid": {"t_end": 1.0, "steps": 2}})
    assert code == 2
    assert main(["spectrum", "--config", str(tmp_path / "missing.json")]) == 2


def test_exit_code_unstable(tmp_path):
    code, _ = _run(tmp_path, "spectrum", {"model": {"omega0": 1.0, "baths": [{"omega": 1.0, "g": 1.5}]}})
    assert code == 3
    ohmic = {"omega0": 1.0, "ohmic": {"eta": 50.0, "cutoff": 5.0, "n_modes": 10, "omega_max": 10.0}}
    code, _ = _run(tmp_path, "spectrum", {"model": ohmic})
    assert code == 3


def test_exit_code_caustic(tmp_path):
    cfg = {"model": {"omega0": 1.0}, "propagate": {"t": math.pi, "y": [0, 1, 2], "yprime": [0, 1, 2]}}
    code, _ = _run(tmp_path, "propagate", cfg)
    assert code == 4


def test_command_mismatch():
    with pytest.raises(ConfigError, match="command"):
        load_config('{"command": "kernel", "model": {"omega0": 1.0}}', "spectrum")


def test_discretize_single_mode():
    eta, cutoff, wmax = 0.05, 3.0, 2.0
    ((w, g),) = discretize_ohmic(eta, cutoff, 1, wmax)
    J = eta * w * math.exp(-w / cutoff)
    assert w == wmax
    assert g**2 == pytest.approx(2 / math.pi * J * w * wmax, rel=1e-14)


def test_discretize_zero_coupling():
    assert all(g == 0.0 for _, g in discretize_ohmic(0.0, 5.0, 7, 10.0))


def test_discretize_convergence():
    def y2(n):
        m = Model(1.0, tuple(discretize_ohmic(0.1, 5.0, n, 10.0, omega0=1.0)))
        return equilibrium_moments(spectrum(m), 1.0)[0]

    a, b = y2(20), y2(40)
    assert abs(a - b) < 0.01 * abs(a)


def test_discretize_unstable_suggests_eta():
    with pytest.raises(UnstableDiscretization, match="use eta <"):
        discretize_ohmic(50.0, 5.0, 10, 10.0, omega0=1.0)


def test_module_entry_point():
    res = subprocess.run(
        [sys.executable, "-m", "oscbath", "spectrum", "--config", str(FIXTURES / "spectrum.json")],
        capture_output=True,
        text=True,
        check=False,
    )
    assert res.returncode == 0
    assert res.stdout.splitlines()[0] == ",".join(HEADERS["spectrum"])
