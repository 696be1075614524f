"""Command-line front end.

Every run is described by one flat JSON document (``--config``); any key
may also be given as a flag, which overrides the file.  Exit codes: 0 ok,
2 configuration/usage, 3 physics (no modes, zero coupling), 4 internal.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .cmt import CMTSystem, propagate, switching_curve, transfer_metrics
from .coupling import coupling_coefficients
from .device import DEVICE_KEYS, build_spec
from .errors import ConfigError, PhysicsError
from .modes import evaluate_profile, modes_for
from .quadrature import quadrature_overlap
from .sweep import OK, SweepGrid, fit_exponential, sweep_grid

EXIT_OK, EXIT_CONFIG, EXIT_PHYSICS, EXIT_INTERNAL = 0, 2, 3, 4


@dataclass(frozen=True)
class Key:
    name: str
    kind: str          # float | int | bool | str | axis
    default: object
    help: str


KEYS = (
    Key("well_width_nm", "float", 200.0, "source well width d (nm)"),
    Key("drain_width_nm", "float", None, "drain well width (nm); unset = source width"),
    Key("separation_nm", "float", 50.0, "barrier thickness D between the wells (nm)"),
    Key("barrier_meV", "float", 500.0, "Schottky barrier potential V0 (meV)"),
    Key("source_gate_meV", "float", 450.0, "source channel potential V1 (meV)"),
    Key("drain_gate_meV", "float", None, "drain channel potential V2 (meV); unset = V1"),
    Key("mass_ratio", "float", 0.067, "barrier effective mass / electron mass"),
    Key("energy_meV", "float", None, "electron energy E (meV); overrides k1d_over_pi"),
    Key("k1d_over_pi", "float", 4.96, "source k1*d/pi used to set E when energy_meV is unset"),
    Key("mode_m", "int", 1, "source mode index (1-based)"),
    Key("mode_n", "int", 1, "drain mode index (1-based)"),
    Key("y_max_nm", "float", 30000.0, "propagation length (nm)"),
    Key("dy_nm", "float", 2.0, "RK4 step (nm)"),
    Key("override_coupling", "float", None, "replace C12 = C21 by this value (nm^-1)"),
    Key("sweep_d_nm", "axis", None, "well widths: list, 'a,b,c' or 'start:stop:step'; unset = well_width_nm"),
    Key("sweep_D_nm", "axis", None, "separations, same syntax; unset = separation_nm"),
    Key("fixed_energy", "bool", False, "sweep at fixed E instead of fixed k1*d"),
    Key("gate_offsets_meV", "axis", "-0.4:0.4:0.05", "drain gate offsets for `switching` (meV)"),
    Key("profile_points", "int", 0, "`modes`: samples of u(x) to dump (0 = none)"),
    Key("profile_out", "str", None, "`modes`: CSV path for the profile dump"),
    Key("format", "str", "csv", "output format: csv or json"),
)
KEY_BY_NAME = {k.name: k for k in KEYS}


def parse_axis(value) -> list[float]:
    if value is None:
        return None
    if isinstance(value, (int, float)):
        return [float(value)]
    if isinstance(value, (list, tuple)):
        return [float(v) for v in value]
    text = str(value).strip()
    if ":" in text:
        parts = [float(p) for p in text.split(":")]
        if len(parts) != 3 or parts[2] <= 0:
            raise ConfigError(f"range must be start:stop:step with step > 0, got {value!r}")
        start, stop, step = parts
        count = int(math.floor((stop - start) / step + 1e-9)) + 1
        if count < 1:
            raise ConfigError(f"empty range {value!r}")
        return [round(start + i * step, 12) for i in range(count)]
    return [float(p) for p in text.split(",") if p.strip()]


def _coerce(key: Key, value):
    if value is None:
        return None
    try:
        if key.kind == "float":
            return float(value)
        if key.kind == "int":
            if isinstance(value, float) and not value.is_integer():
                raise ValueError
            return int(value)
        if key.kind == "bool":
            if isinstance(value, str):
                text = value.strip().lower()
                if text not in ("1", "true", "yes", "on", "0", "false", "no", "off"):
                    raise ValueError
                return text in ("1", "true", "yes", "on")
            return bool(value)
        if key.kind == "axis":
            return parse_axis(value)
        return str(value)
    except (TypeError, ValueError):
        raise ConfigError(f"bad value for {key.name!r}: {value!r}") from None


def load_config(path, overrides: dict) -> dict:
    """Defaults <- config file <- command-line overrides, strictly validated."""
    merged = {k.name: k.default for k in KEYS}
    explicit = set()
    if path:
        try:
            data = json.loads(Path(path).read_text())
        except OSError as exc:
            raise ConfigError(f"cannot read config {path}: {exc}") from None
        except json.JSONDecodeError as exc:
            raise ConfigError(f"config {path} is not valid JSON: {exc}") from None
        if not isinstance(data, dict):
            raise ConfigError("config document must be a flat object")
        unknown = sorted(set(data) - set(KEY_BY_NAME))
        if unknown:
            raise ConfigError(f"unknown config keys: {unknown}")
        merged.update(data)
        explicit.update(data)
    for name, value in overrides.items():
        if value is not None:
            merged[name] = value
            explicit.add(name)
    if "energy_meV" in explicit and merged["energy_meV"] is not None and "k1d_over_pi" not in explicit:
        merged["k1d_over_pi"] = None
    cfg = {name: _coerce(KEY_BY_NAME[name], value) for name, value in merged.items()}
    if cfg["format"] not in ("csv", "json"):
        raise ConfigError(f"format must be csv or json, got {cfg['format']!r}")
    return cfg


def spec_from_config(cfg: dict):
    return build_spec({k: cfg[k] for k in DEVICE_KEYS if cfg.get(k) is not None})


def _fmt(value) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return "" if math.isnan(value) else f"{float(value):.16e}"
    return str(value)


def render(columns, rows, comments=(), fmt="csv") -> str:
    if fmt == "json":
        def clean(v):
            if isinstance(v, (float, np.floating)):
                return None if math.isnan(v) else float(v)
            if isinstance(v, np.integer):
                return int(v)
            return v
        doc = {"columns": list(columns),
               "rows": [dict(zip(columns, map(clean, r))) for r in rows],
               "meta": dict(comments)}
        return json.dumps(doc, indent=2) + "\n"
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(columns)
    for row in rows:
        writer.writerow([_fmt(v) for v in row])
    for key, value in comments:
        buf.write(f"# {key}={_fmt(value)}\n")
    return buf.getvalue()


def emit(text: str, out):
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def cmd_modes(cfg, args):
    spec = spec_from_config(cfg)
    rows = []
    found = {}
    for which in ("source", "drain"):
        found[which] = modes_for(spec, which)
        for m in found[which]:
            rows.append((which, m.mode_index_m, m.parity.value, m.kx_d, m.beta, m.kappa, m.theta_deg))
    columns = ("well", "index", "parity", "kx_d", "beta_nm", "kappa_nm", "theta_deg")
    npts = cfg["profile_points"]
    if npts > 0:
        if not cfg["profile_out"]:
            raise ConfigError("profile_points needs profile_out")
        geom = spec.geometry()
        reach = 5.0 / min(m.kappa for ms in found.values() for m in ms)
        x = np.linspace(geom.well1_interval[0] - reach, geom.well2_interval[1] + reach, npts)
        cols = ["x_nm"] + [f"{w}_{m.mode_index_m}" for w in found for m in found[w]]
        data = [x] + [evaluate_profile(m, geom, w, x) for w in found for m in found[w]]
        Path(cfg["profile_out"]).write_text(render(cols, list(zip(*data)), fmt="csv"))
    return render(columns, rows, fmt=cfg["format"])


def _system(cfg, result):
    system = CMTSystem.from_coupling(result)
    if cfg["override_coupling"] is not None:
        c = cfg["override_coupling"]
        system = CMTSystem(c, c, system.delta)
    return system


def _metrics(system):
    """Transfer metrics, via the symmetrized system when C12 != C21."""
    if system.hermitian:
        return transfer_metrics(system), None
    return transfer_metrics(system.symmetrized()), "symmetrized"


def cmd_couple(cfg, args):
    spec = spec_from_config(cfg)
    result = coupling_coefficients(spec, cfg["mode_m"], cfg["mode_n"])
    system = _system(cfg, result)
    metrics, approx = _metrics(system)
    check = quadrature_overlap(result.source_mode, result.drain_mode, spec.geometry())
    columns = ("m", "n", "C12_nm", "C21_nm", "overlap", "overlap_quadrature", "Ec_meV",
               "delta_nm", "hermitian", "L_nm", "fT_hz", "max_transfer")
    row = (cfg["mode_m"], cfg["mode_n"], system.C12, system.C21, result.overlap, check,
           result.coupling_energy_meV, system.delta, system.hermitian,
           metrics.transfer_length_L, metrics.transition_frequency_fT, metrics.max_transfer)
    comments = [("approximation", approx)] if approx else []
    return render(columns, [row], comments, fmt=cfg["format"])


def cmd_propagate(cfg, args):
    spec = spec_from_config(cfg)
    result = coupling_coefficients(spec, cfg["mode_m"], cfg["mode_n"])
    system = _system(cfg, result)
    metrics, approx = _metrics(system)
    trace = propagate(system, (1.0, 0.0), cfg["y_max_nm"], cfg["dy_nm"])
    columns = ("y_nm", "p1", "p2", "re_a1", "im_a1", "re_a2", "im_a2")
    rows = zip(trace.y_samples, trace.p1, trace.p2, trace.a1.real, trace.a1.imag,
               trace.a2.real, trace.a2.imag)
    summary = [("L_nm", metrics.transfer_length_L), ("fT_hz", metrics.transition_frequency_fT)]
    if approx:
        summary.append(("approximation", approx))
    if cfg["format"] == "json":
        return render(columns, list(rows), summary, fmt="json")
    line = " ".join(f"{k}={_fmt(v)}" for k, v in summary)
    return render(columns, list(rows)) + f"# {line}\n"


def cmd_switching(cfg, args):
    spec = spec_from_config(cfg)
    offsets = cfg["gate_offsets_meV"]
    if not offsets:
        raise ConfigError("gate_offsets_meV is empty")
    points = switching_curve(spec, (cfg["mode_m"], cfg["mode_n"]), offsets)
    columns = ("delta_V_meV", "max_transfer", "L_nm", "C12_nm", "C21_nm", "delta_nm")
    rows = [(p.gate_offset, p.max_transfer, p.transfer_length_L, p.C12, p.C21, p.delta) for p in points]
    return render(columns, rows, [("approximation", "symmetrized")], fmt=cfg["format"])


def sweep_table(result):
    """Rows of a sweep plus the distance fit when the grid has a single width."""
    rows = [(c.d, c.D, c.fT, c.L, c.coupling_energy_meV, c.status) for c in result.cells]
    fit = None
    if len(result.grid.d_values) == 1:
        good = [c for c in result.cells if c.status == OK]
        if len(good) >= 3:
            fit = fit_exponential([c.D for c in good], [c.fT for c in good])
    return ("d_nm", "D_nm", "fT_hz", "L_nm", "Ec_meV", "status"), rows, fit


def cmd_sweep(cfg, args):
    spec = spec_from_config(cfg)
    d_axis = cfg["sweep_d_nm"] or [spec.source.width_d]
    D_axis = cfg["sweep_D_nm"] or [spec.separation_D]
    grid = SweepGrid(d_axis, D_axis, spec, (cfg["mode_m"], cfg["mode_n"]), cfg["fixed_energy"])
    result = sweep_grid(grid, workers=args.threads)
    columns, rows, fit = sweep_table(result)
    meta = [] if fit is None else [("omega0_nm", fit.omega0), ("gamma_nm", fit.gamma), ("r2", fit.r_squared)]
    if cfg["format"] == "json":
        return render(columns, rows, meta, fmt="json")
    text = render(columns, rows)
    if meta:
        text += "# " + " ".join(f"{k}={_fmt(v)}" for k, v in meta) + "\n"
    return text


def read_sweep_csv(path) -> list[dict]:
    try:
        lines = [ln for ln in Path(path).read_text().splitlines() if ln and not ln.startswith("#")]
    except OSError as exc:
        raise ConfigError(f"cannot read {path}: {exc}") from None
    reader = csv.DictReader(lines)
    needed = {"d_nm", "D_nm", "fT_hz", "status"}
    if reader.fieldnames is None or not needed <= set(reader.fieldnames):
        raise ConfigError(f"{path} lacks sweep columns {sorted(needed)}")
    return list(reader)


def cmd_fit(cfg, args):
    if not args.input:
        raise ConfigError("fit needs --input <sweep csv>")
    records = [r for r in read_sweep_csv(args.input) if r["status"] == OK]
    by_d = {}
    for r in records:
        by_d.setdefault(float(r["d_nm"]), []).append((float(r["D_nm"]), float(r["fT_hz"])))
    rows = []
    for d in sorted(by_d):
        pts = sorted(by_d[d])
        fit = fit_exponential([p[0] for p in pts], [p[1] for p in pts])
        rows.append((d, fit.omega0, fit.gamma, fit.r_squared, len(pts)))
    if not rows:
        raise ConfigError("no usable rows in input")
    return render(("d_nm", "omega0_nm", "gamma_nm", "r2", "n_points"), rows, fmt=cfg["format"])


COMMANDS = {
    "modes": (cmd_modes, "guided modes of both wells"),
    "couple": (cmd_couple, "coupling coefficients for one mode pair"),
    "propagate": (cmd_propagate, "RK4 amplitude trace along y"),
    "switching": (cmd_switching, "max transfer versus drain gate offset"),
    "sweep": (cmd_sweep, "transfer frequency over a (d, D) grid"),
    "fit": (cmd_fit, "exponential distance fit of a sweep CSV"),
}


def _flag(name):
    return "--" + name.replace("_", "-")


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="flat JSON config document")
    common.add_argument("--out", help="output path (default: stdout)")
    common.add_argument("--threads", type=int, default=1, help="worker processes for `sweep` (default: 1)")
    common.add_argument("--input", help="`fit`: sweep CSV to read")
    keys = common.add_argument_group("config keys (flags override --config)")
    for key in KEYS:
        text = f"{key.help} (default: {key.default})"
        if key.kind == "bool":
            keys.add_argument(_flag(key.name), dest=key.name, default=None,
                              action=argparse.BooleanOptionalAction, help=text)
        else:
            keys.add_argument(_flag(key.name), dest=key.name, default=None, help=text)

    parser = argparse.ArgumentParser(prog="graphene-coupler", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    for name, (_, text) in COMMANDS.items():
        sub.add_parser(name, parents=[common], help=text, description=text)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        if args.threads < 1:
            raise ConfigError("--threads must be at least 1")
        overrides = {k.name: getattr(args, k.name) for k in KEYS}
        cfg = load_config(args.config, overrides)
        handler = COMMANDS[args.command][0]
        text = handler(cfg, args)
        emit(text, args.out)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except PhysicsError as exc:
        print(f"physics error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_PHYSICS
    except Exception as exc:  # noqa: BLE001
        print(f"internal error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_INTERNAL
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
