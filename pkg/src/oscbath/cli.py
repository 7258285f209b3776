"""Command-line front end.

Usage::

    oscbath <command> --config <file> [--out <path>] [--format csv|json] [-v]

Exit codes: 0 success, 2 configuration error, 3 unstable or invalid model,
4 caustic, 5 numerical failure.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import math
import sys
from types import SimpleNamespace

import numpy as np

from .config import COMMANDS, FORMATS, RunConfig, load_config
from .correlators import CorrelatorRequest, Endpoint, n_point_fd, one_point, two_point
from .equilibrium import thermal_report
from .errors import ConfigError, OscBathError, PoleInput
from .gaussian import evolve_state, thermal_bath_state
from .matfun import matfun_at
from .model import char_g, spectrum
from .propagator import ForceProfile, drive_displacements, evaluate_K_forced
from .reduced import kernel_J_coeffs, reduce_to_main

log = logging.getLogger("oscbath")

HEADERS = {
    "spectrum": ["alpha", "z", "X0", "char_g_residual"],
    "evolve": ["t", "mean_y", "mean_p", "var_y", "var_p", "cov_yp", "purity"],
    "equilibrium": ["beta", "logZ", "eta", "y2", "p2", "purity"],
    "kernel": ["t", "b1", "b2", "b3", "b4", "a11", "a12", "a22"],
    "propagate": ["y", "yprime", "re", "im"],
    "correlate": ["re", "im"],
}


def build_force(spec, n_dof: int, t_end: float) -> ForceProfile:
    """Sample a configured force on a grid covering ``[0, t_end]``."""
    kind = spec["type"]
    if kind == "sampled":
        values = np.asarray(spec["values"], dtype=float)
        if values.ndim != 2 or values.shape[1] != n_dof:
            raise ConfigError("field 'force.values': rows must have %d entries" % n_dof)
        force = ForceProfile(values, spec["step"])
        if force.t_end < t_end * (1 - 1e-12):
            raise ConfigError(
                "field 'force.values': samples cover [0, %g] but t=%g is requested"
                % (force.t_end, t_end)
            )
        return force
    index = int(spec.get("index", 0))
    if not 0 <= index < n_dof:
        raise ConfigError("field 'force.index': must be in [0, %d]" % (n_dof - 1))
    step = float(spec.get("step", 1e-3))
    t_end = max(t_end, 2 * step)
    if kind == "constant":
        value = float(spec["value"])
        return ForceProfile.sample(lambda s: value, n_dof, t_end, step, index)
    amp, freq = float(spec["amplitude"]), float(spec["frequency"])
    phase = float(spec.get("phase", 0.0))
    return ForceProfile.sample(lambda s: amp * math.sin(freq * s + phase), n_dof, t_end, step, index)


def _run_spectrum(cfg: RunConfig):
    spec = spectrum(cfg.model)
    rows = []
    for a, (z, x0) in enumerate(zip(spec.z, spec.X[0])):
        try:
            res = char_g(cfg.model, z * z)
        except PoleInput:
            # the mode coincides with an uncoupled bath frequency
            res = float("nan")
        rows.append([a, z, x0, res])
    return rows


def _run_evolve(cfg: RunConfig):
    spec = spectrum(cfg.model)
    init = cfg.initial or {}
    hb = cfg.model.hbar
    w0 = cfg.model.omega0
    main = SimpleNamespace(
        mean_y=float(init.get("mean_y", 0.0)),
        mean_p=float(init.get("mean_p", 0.0)),
        var_y=float(init.get("var_y", 0.5 * hb / w0)),
        var_p=float(init.get("var_p", 0.5 * hb * w0)),
        cov_yp=float(init.get("cov_yp", 0.0)),
    )
    state0 = thermal_bath_state(cfg.model, cfg.beta, main)
    times = cfg.times()
    force = build_force(cfg.force, spec.n_dof, times[-1]) if cfg.force else None
    rows = []
    for t in times:
        disp = drive_displacements(spec, force, t) if force is not None and t > 0 else None
        red = reduce_to_main(evolve_state(state0, matfun_at(spec, t), disp))
        rows.append([t, red.mean_y, red.mean_p, red.var_y, red.var_p, red.cov_yp, red.purity])
        log.info("evolve t=%g purity=%.6g", t, red.purity)
    return rows


def _run_equilibrium(cfg: RunConfig):
    spec = spectrum(cfg.model)
    rows = []
    for beta in cfg.betas:
        r = thermal_report(spec, beta)
        rows.append([beta, r.logZ, r.eta, r.mean_sq_y, r.mean_sq_p, r.purity])
    return rows


def _run_kernel(cfg: RunConfig):
    spec = spectrum(cfg.model)
    rows = []
    for t in cfg.times():
        k = kernel_J_coeffs(spec, cfg.beta, t)
        rows.append([t, k.b1, k.b2, k.b3, k.b4, k.a11, k.a12, k.a22])
    return rows


def _axis(values, name):
    lo, hi, n = values
    if n < 1 or n != int(n):
        raise ConfigError("field 'propagate.%s': point count must be a positive integer" % name)
    return np.linspace(lo, hi, int(n))


def _run_propagate(cfg: RunConfig):
    p = cfg.propagate
    spec = spectrum(cfg.model)
    t = float(p["t"])
    ys, yps = _axis(p["y"], "y"), _axis(p["yprime"], "yprime")
    nb = cfg.model.n_baths
    yb = np.asarray(p.get("y_bath", [0.0] * nb), dtype=float)
    ypb = np.asarray(p.get("yprime_bath", [0.0] * nb), dtype=float)
    if cfg.force:
        force = build_force(cfg.force, spec.n_dof, t)
    else:
        force = ForceProfile.zeros(spec.n_dof, t, t / 2)
    Y = np.empty((len(ys), len(yps), spec.n_dof))
    YP = np.empty_like(Y)
    Y[..., 0] = ys[:, None]
    YP[..., 0] = yps[None, :]
    Y[..., 1:] = yb
    YP[..., 1:] = ypb
    K = evaluate_K_forced(spec, force, t, Y, YP)
    rows = []
    for i, y in enumerate(ys):
        for j, yp in enumerate(yps):
            rows.append([y, yp, K[i, j].real, K[i, j].imag])
    return rows


def _run_correlate(cfg: RunConfig):
    c = cfg.correlate
    spec = spectrum(cfg.model)
    ep = Endpoint(c["y"], c["yprime"], float(c["t"]))
    times = [float(s) for s in c["times"]]
    try:
        indices = [int(i) for i in c["indices"]]
    except (TypeError, ValueError):
        raise ConfigError("field 'correlate.indices': expected integers") from None
    if len(indices) != len(times):
        raise ConfigError("field 'correlate.indices': length must match 'times'")
    method = c.get("method", "closed")
    if method == "fd" or len(times) > 2:
        req = CorrelatorRequest(
            times,
            indices,
            ep,
            fd_step=float(c.get("fd_step", 1e-4)),
            grid_step=float(c.get("grid_step", 1e-3)),
        )
        value = n_point_fd(spec, req)
    elif len(times) == 1:
        value = one_point(spec, ep, times[0], indices[0])
    else:
        value = two_point(spec, ep, times[0], indices[0], times[1], indices[1])
    return [[value.real, value.imag]]


_RUNNERS = {
    "spectrum": _run_spectrum,
    "evolve": _run_evolve,
    "equilibrium": _run_equilibrium,
    "kernel": _run_kernel,
    "propagate": _run_propagate,
    "correlate": _run_correlate,
}


def run(cfg: RunConfig):
    """Execute a parsed configuration; returns ``(header, rows)``."""
    return HEADERS[cfg.command], _RUNNERS[cfg.command](cfg)


def _fmt(v):
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    return "%.17g" % v


def format_output(command, header, rows, fmt: str) -> str:
    if fmt == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow([_fmt(v) for v in row])
        return buf.getvalue()
    if command == "correlate":
        re, im = rows[0]
        return json.dumps({"re": float(re), "im": float(im)}) + "\n"
    data = [
        {k: (int(v) if isinstance(v, (int, np.integer)) else _json_float(v)) for k, v in zip(header, row)}
        for row in rows
    ]
    return json.dumps({"command": command, "columns": header, "rows": data}, indent=1) + "\n"


def _json_float(v):
    v = float(v)
    # strict JSON has no NaN literal
    return v if math.isfinite(v) else None


def _parser():
    p = argparse.ArgumentParser(prog="oscbath", description=__doc__.split("\n")[0])
    p.add_argument("command", choices=COMMANDS)
    p.add_argument("--config", required=True, help="JSON run configuration")
    p.add_argument("--out", help="output path (default: config output.path or stdout)")
    p.add_argument("--format", choices=FORMATS, help="output format (default csv)")
    p.add_argument("-v", "--verbose", action="store_true")
    return p


def main(argv=None) -> int:
    args = _parser().parse_args(argv)
    logging.basicConfig(
        level=logging.INFO if args.verbose else logging.WARNING,
        format="%(name)s: %(message)s",
        stream=sys.stderr,
    )
    try:
        try:
            with open(args.config, encoding="utf-8") as fh:
                text = fh.read()
        except OSError as exc:
            raise ConfigError("cannot read config %s: %s" % (args.config, exc.strerror)) from None
        cfg = load_config(text, args.command, source=args.config)
        fmt = args.format or cfg.out_format
        if args.command == "correlate" and args.format is None and "format" not in cfg.raw.get("output", {}):
            # correlators default to a JSON object
            fmt = "json"
        log.info("running %s on a model with %d bath modes", cfg.command, cfg.model.n_baths)
        header, rows = run(cfg)
        text = format_output(cfg.command, header, rows, fmt)
        out = args.out or cfg.out_path
        if out:
            with open(out, "w", encoding="utf-8", newline="") as fh:
                fh.write(text)
        else:
            sys.stdout.write(text)
    except OscBathError as exc:
        print("oscbath: error: %s" % exc, file=sys.stderr)
        return exc.exit_code
    except (np.linalg.LinAlgError, FloatingPointError) as exc:
        print("oscbath: numerical failure: %s" % exc, file=sys.stderr)
        return 5
    return 0


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
