"""Run configuration: JSON parsing, validation and Ohmic bath discretization."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Mapping

import numpy as np

from .errors import ConfigError, UnstableDiscretization
from .model import Model

COMMANDS = ("spectrum", "evolve", "equilibrium", "kernel", "propagate", "correlate")
FORMATS = ("csv", "json")


def discretize_ohmic(eta, cutoff, n_modes, omega_max, omega0=None):
    """Linear discretization of the spectral density ``J(w) = eta w exp(-w/cutoff)``.

    ``omega_k = k dw`` with ``dw = omega_max/n_modes`` and
    ``g_k^2 = (2/pi) J(omega_k) omega_k dw``.

    Parameters
    ----------
    omega0 : float, optional
        Main-oscillator frequency.  When given, stability of the resulting
        model is checked and a violation raises
        :class:`UnstableDiscretization` naming the largest admissible ``eta``.

    Returns
    -------
    list of (omega_k, g_k)
    """
    n_modes = int(n_modes)
    if n_modes < 1:
        raise ValueError("n_modes must be >= 1, got %r" % n_modes)
    if not omega_max > 0 or not cutoff > 0:
        raise ValueError("omega_max and cutoff must be > 0")
    if eta < 0:
        raise ValueError("eta must be >= 0, got %r" % eta)
    dw = omega_max / n_modes
    w = dw * np.arange(1, n_modes + 1)
    weight = (2.0 / math.pi) * np.exp(-w / cutoff) * dw  # g_k^2 / (eta omega_k^2)
    if omega0 is not None:
        # Schur complement: omega0^2 - eta * sum(weight) must stay positive
        eta_max = omega0**2 / float(np.sum(weight))
        if eta >= eta_max:
            raise UnstableDiscretization(
                "Ohmic bath with eta=%g destabilizes omega0=%g; use eta < %.6g"
                % (eta, omega0, eta_max)
            )
    g = np.sqrt(eta * weight) * w
    return [(float(a), float(b)) for a, b in zip(w, g)]


@dataclass(frozen=True)
class RunConfig:
    command: str
    model: Model
    time_grid: tuple | None = None
    beta: float | None = None
    betas: tuple = ()
    force: Mapping | None = None
    initial: Mapping | None = None
    propagate: Mapping | None = None
    correlate: Mapping | None = None
    out_path: str | None = None
    out_format: str = "csv"
    raw: Mapping = field(default_factory=dict, compare=False, repr=False)

    def times(self) -> np.ndarray:
        t0, t1, steps = self.time_grid
        return np.linspace(t0, t1, steps + 1)


def _get(d: Mapping, key: str, path: str, kind=float, required=True, default=None):
    if key not in d:
        if required:
            raise ConfigError("field '%s%s' is required" % (path, key))
        return default
    value = d[key]
    try:
        if kind is float:
            if isinstance(value, bool) or not isinstance(value, (int, float)):
                raise TypeError
            return float(value)
        if kind is int:
            if isinstance(value, bool) or not isinstance(value, int):
                raise TypeError
            return int(value)
        if kind is dict:
            if not isinstance(value, Mapping):
                raise TypeError
            return value
        if kind is list:
            if not isinstance(value, list):
                raise TypeError
            return value
        if kind is str:
            if not isinstance(value, str):
                raise TypeError
            return value
    except TypeError:
        raise ConfigError(
            "field '%s%s': expected %s, got %s" % (path, key, kind.__name__, json.dumps(value))
        ) from None
    raise AssertionError(kind)


def _float_list(d, key, path, required=True, length=None):
    items = _get(d, key, path, list, required)
    if items is None:
        return None
    out = []
    for i, v in enumerate(items):
        if isinstance(v, bool) or not isinstance(v, (int, float)):
            raise ConfigError("field '%s%s[%d]': expected float, got %s" % (path, key, i, json.dumps(v)))
        out.append(float(v))
    if length is not None and len(out) != length:
        raise ConfigError("field '%s%s': expected %d numbers, got %d" % (path, key, length, len(out)))
    return out


def _parse_model(d: Mapping) -> Model:
    path = "model."
    omega0 = _get(d, "omega0", path)
    hbar = _get(d, "hbar", path, required=False, default=1.0)
    if "ohmic" in d and "baths" in d:
        raise ConfigError("field 'model': give either 'baths' or 'ohmic', not both")
    if "ohmic" in d:
        o = _get(d, "ohmic", path, dict)
        p = path + "ohmic."
        n_modes = _get(o, "n_modes", p, int)
        if n_modes < 1:
            raise ConfigError("field '%sn_modes': must be >= 1" % p)
        try:
            baths = discretize_ohmic(
                _get(o, "eta", p),
                _get(o, "cutoff", p),
                n_modes,
                _get(o, "omega_max", p),
                omega0=omega0,
            )
        except UnstableDiscretization:
            # a ValueError too, but it must keep its own exit code
            raise
        except ValueError as exc:
            raise ConfigError("field '%s': %s" % (p[:-1], exc)) from None
    else:
        baths = []
        for i, entry in enumerate(_get(d, "baths", path, list, required=False, default=[])):
            p = "%sbaths[%d]." % (path, i)
            if not isinstance(entry, Mapping):
                raise ConfigError("field '%s': expected object with 'omega' and 'g'" % p[:-1])
            baths.append((_get(entry, "omega", p), _get(entry, "g", p)))
    return Model(omega0=omega0, baths=tuple(baths), hbar=hbar)


def _parse_time_grid(d: Mapping):
    p = "time_grid."
    t0 = _get(d, "t_start", p, required=False, default=0.0)
    t1 = _get(d, "t_end", p)
    steps = _get(d, "steps", p, int)
    if steps < 1:
        raise ConfigError("field 'time_grid.steps': must be >= 1, got %d" % steps)
    if not (t1 > t0 >= 0):
        raise ConfigError("field 'time_grid': need t_end > t_start >= 0")
    return (t0, t1, steps)


_FORCE_TYPES = ("constant", "sinusoid", "sampled")


def _check_force(d: Mapping):
    p = "force."
    kind = _get(d, "type", p, str)
    if kind not in _FORCE_TYPES:
        raise ConfigError("field 'force.type': expected one of %s, got %r" % (_FORCE_TYPES, kind))
    if kind == "constant":
        _get(d, "value", p)
    elif kind == "sinusoid":
        _get(d, "amplitude", p)
        _get(d, "frequency", p)
        _get(d, "phase", p, required=False)
    else:
        values = _get(d, "values", p, list)
        if len(values) < 3:
            raise ConfigError("field 'force.values': need at least 3 samples")
        for i, row in enumerate(values):
            if not isinstance(row, list):
                raise ConfigError("field 'force.values[%d]': expected a list of numbers" % i)
        _get(d, "step", p)
    if kind != "sampled":
        _get(d, "index", p, int, required=False)
        step = _get(d, "step", p, required=False, default=1e-3)
        if not step > 0:
            raise ConfigError("field 'force.step': must be > 0")
    return d


def load_config(text: str, command: str, source: str = "<config>") -> RunConfig:
    """Parse and validate a JSON run configuration for ``command``."""
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError("%s:%d:%d: %s" % (source, exc.lineno, exc.colno, exc.msg)) from None
    if not isinstance(raw, Mapping):
        raise ConfigError("%s: top level must be a JSON object" % source)
    if command not in COMMANDS:
        raise ConfigError("unknown command %r; expected one of %s" % (command, ", ".join(COMMANDS)))
    if "command" in raw and raw["command"] != command:
        raise ConfigError(
            "field 'command': config is for %r but %r was requested" % (raw["command"], command)
        )
    model = _parse_model(_get(raw, "model", "", dict))

    out = _get(raw, "output", "", dict, required=False, default={})
    fmt = _get(out, "format", "output.", str, required=False, default="csv")
    if fmt not in FORMATS:
        raise ConfigError("field 'output.format': expected csv or json, got %r" % fmt)
    out_path = _get(out, "path", "output.", str, required=False)

    beta = _get(raw, "beta", "", required=False)
    if beta is not None and not beta > 0:
        raise ConfigError("field 'beta': must be > 0")
    betas = tuple(_float_list(raw, "betas", "", required=False) or ())
    if any(not b > 0 for b in betas):
        raise ConfigError("field 'betas': all entries must be > 0")

    time_grid = None
    if "time_grid" in raw or command in ("evolve", "kernel"):
        time_grid = _parse_time_grid(_get(raw, "time_grid", "", dict))
    if command in ("evolve", "kernel") and beta is None:
        raise ConfigError("field 'beta' is required for %s" % command)
    if command == "equilibrium" and not betas:
        if beta is None:
            raise ConfigError("field 'betas' (or 'beta') is required for equilibrium")
        betas = (beta,)

    force = _check_force(_get(raw, "force", "", dict)) if "force" in raw else None
    initial = _get(raw, "initial", "", dict, required=False)
    if initial is not None:
        for key in ("mean_y", "mean_p", "var_y", "var_p", "cov_yp"):
            _get(initial, key, "initial.", required=False)

    propagate = correlate = None
    if command == "propagate":
        propagate = _get(raw, "propagate", "", dict)
        p = "propagate."
        t = _get(propagate, "t", p)
        if not t > 0:
            raise ConfigError("field 'propagate.t': must be > 0")
        _float_list(propagate, "y", p, length=3)
        _float_list(propagate, "yprime", p, length=3)
        for key in ("y_bath", "yprime_bath"):
            _float_list(propagate, key, p, required=False, length=model.n_baths)
    if command == "correlate":
        correlate = _get(raw, "correlate", "", dict)
        p = "correlate."
        _get(correlate, "t", p)
        _float_list(correlate, "times", p)
        _get(correlate, "indices", p, list)
        _float_list(correlate, "y", p, length=model.n_dof)
        _float_list(correlate, "yprime", p, length=model.n_dof)
        method = _get(correlate, "method", p, str, required=False, default="closed")
        if method not in ("closed", "fd"):
            raise ConfigError("field 'correlate.method': expected 'closed' or 'fd'")

    return RunConfig(
        command=command,
        model=model,
        time_grid=time_grid,
        beta=beta,
        betas=betas,
        force=force,
        initial=initial,
        propagate=propagate,
        correlate=correlate,
        out_path=out_path,
        out_format=fmt,
        raw=raw,
    )
