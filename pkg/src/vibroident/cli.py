"""Batch command-line surface.

    vibroident simulate -c cfg.json -o out/
    vibroident analyze -c cfg.json --response r.csv --force f.csv -o out/
    vibroident linearity a/frc.csv b/frc.csv --exclude-below 2
    vibroident vs cpt.csv -o vs.csv

Exit codes: 0 ok, 2 config, 3 parse, 4 numeric, 5 io.  VIBROIDENT_SEED
overrides the configured seed.  Output files are written via temp +
atomic rename, never partially.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import math
import os
import sys
from importlib import resources
from pathlib import Path

import numpy as np

from . import geotech, modal, svg
from .errors import (
    AlignmentError,
    ConfigError,
    DesignError,
    ParseError,
    NumericError,
    VibroidentError,
    WindowError,
)
from .modal import GENERALIZED_AXES
from .pipeline import AnalysisPolicy, AnalysisResult, analyze
from .simulator import (
    NoiseSpec,
    assemble_system,
    force_timeseries,
    integrate,
    load_model,
    load_program,
    modal_properties,
    sensor_kinematics,
)
from .timeseries import (
    SensorLayout,
    load_layout,
    parse_timeseries_csv,
    serialize_timeseries_csv,
    synchronize,
)

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_PARSE = 3
EXIT_NUMERIC = 4
EXIT_IO = 5


def _read_resource(kind: str, name: str) -> str:
    base = resources.files("vibroident") / "data"
    path = {"model": "default_model.json", "layout": "default_layout.json"}.get(kind)
    if kind == "program":
        path = f"programs/{name}.json"
    return (base / path).read_text()


def _load_text(spec: str, kind: str) -> str:
    """'default' / 'default:stepped_x' resolve to bundled data; else a path."""
    if spec == "default" or spec.startswith("default:"):
        name = spec.partition(":")[2] or "stepped_x"
        return _read_resource(kind, name)
    p = Path(spec)
    if not p.exists():
        raise ConfigError(f"{kind} file not found: {spec}")
    return p.read_text()


def load_run_config(path: str) -> dict:
    try:
        doc = json.loads(Path(path).read_text())
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config {path} is not valid JSON: {exc}") from exc
    if not isinstance(doc, dict):
        raise ConfigError("config root must be an object")
    defaults = {
        "model": "default",
        "layout": "default",
        "program": "default:stepped_x",
        "seed": 42,
        "noise_rms": 0.001,
        "noise_tone_hz": None,
        "noise_tone_amplitude": 0.0,
        "response_rate": 200.0,
        "force_rate": 512.0,
        "integration_factor": 40.0,
        "filter": {"order": 5, "f_low": 1.0, "f_high": 25.0},
        "window": {"skip_cycles": 10.0, "max_len_s": 40.0},
        "f_ref_force_kn": 6800.0,
        "f_ref_torque_knm": 117000.0,
        "rotation_lever_m": 16.5,
        "damping_channel_floor": 0.2,
        "force_low_freq_cut": None,
        "strain": {"stations": ["T3SW", "T2S", "T3SE"], "fiber_m": 2.9},
    }
    cfg = {**defaults, **doc}
    cfg["filter"] = {**defaults["filter"], **(doc.get("filter") or {})}
    cfg["window"] = {**defaults["window"], **(doc.get("window") or {})}
    env_seed = os.environ.get("VIBROIDENT_SEED")
    if env_seed is not None:
        try:
            cfg["seed"] = int(env_seed)
        except ValueError:
            raise ConfigError(f"VIBROIDENT_SEED must be an integer, got {env_seed!r}") from None
    if cfg["f_ref_force_kn"] <= 0 or cfg["f_ref_torque_knm"] <= 0:
        raise ConfigError("reference force and torque must be positive")
    return cfg


def config_hash(cfg: dict) -> str:
    return hashlib.sha256(json.dumps(cfg, sort_keys=True).encode()).hexdigest()


def policy_from_config(cfg: dict) -> AnalysisPolicy:
    return AnalysisPolicy(
        filter_order=int(cfg["filter"]["order"]),
        f_low=float(cfg["filter"]["f_low"]),
        f_high=float(cfg["filter"]["f_high"]),
        skip_cycles=float(cfg["window"]["skip_cycles"]),
        max_window_s=float(cfg["window"]["max_len_s"]),
        f_ref_force_kn=float(cfg["f_ref_force_kn"]),
        f_ref_torque_knm=float(cfg["f_ref_torque_knm"]),
        rotation_lever_m=float(cfg["rotation_lever_m"]),
        damping_channel_floor=float(cfg["damping_channel_floor"]),
        force_low_freq_cut=cfg["force_low_freq_cut"],
    )


def _atomic_write(path: Path, text: str) -> None:
    tmp = path.with_name(path.name + ".tmp")
    tmp.write_text(text)
    os.replace(tmp, path)


def cmd_simulate(args) -> int:
    cfg = load_run_config(args.config)
    model = load_model(_load_text(cfg["model"], "model"))
    layout = load_layout(_load_text(cfg["layout"], "layout"))
    program = load_program(_load_text(cfg["program"], "program"))

    fs_resp = float(cfg["response_rate"])
    if program.f_max > fs_resp / 2.0 / 2.5:
        raise DesignError(
            f"program reaches {program.f_max} Hz, above {fs_resp / 2.0 / 2.5:.1f} Hz "
            f"(response Nyquist / 2.5)"
        )
    sys_m = assemble_system(model)
    rate = fs_resp * math.ceil(cfg["integration_factor"] * program.f_max / fs_resp)
    hist = integrate(sys_m, program, dt=1.0 / rate)
    noise = NoiseSpec(
        rms=float(cfg["noise_rms"]),
        seed=int(cfg["seed"]),
        tone_hz=cfg["noise_tone_hz"],
        tone_amplitude=float(cfg["noise_tone_amplitude"]),
    )
    response = sensor_kinematics(hist, layout, noise, output_rate=fs_resp)
    force = force_timeseries(program, fs=float(cfg["force_rate"]), duration=program.duration)

    modes = modal_properties(sys_m)
    manifest = {
        "config_sha256": config_hash(cfg),
        "seed": int(cfg["seed"]),
        "program": {"name": program.name, "kind": program.kind, "dof_excited": program.dof_excited},
        "rates": {"response_hz": fs_resp, "force_hz": float(cfg["force_rate"]), "integration_hz": rate},
        "modes": [
            {
                "frequency_hz": m.frequency_hz,
                "dominant_dof": m.dominant_dof,
                "shape": m.shape.tolist(),
            }
            for m in modes
        ],
        "generalized_force_amplitude": program.generalized_amplitude().tolist(),
    }

    out = Path(args.output)
    out.mkdir(parents=True, exist_ok=True)
    _atomic_write(out / "response.csv", serialize_timeseries_csv(response))
    _atomic_write(out / "force.csv", serialize_timeseries_csv(force))
    _atomic_write(out / "manifest.json", json.dumps(manifest, indent=1, sort_keys=True) + "\n")
    print(f"wrote {out / 'response.csv'}, {out / 'force.csv'}, {out / 'manifest.json'}")
    return EXIT_OK


def _rbm_csv(result: AnalysisResult) -> str:
    header = (
        ["f_hz"]
        + [f"{a}_mag" for a in GENERALIZED_AXES]
        + [f"{a}_phase" for a in GENERALIZED_AXES]
    )
    lines = [",".join(header)]
    for f in sorted(result.rigid_motions):
        rm = result.rigid_motions[f]
        mags = [repr(float(abs(v))) for v in rm.delta]
        phases = [repr(float(np.angle(v))) for v in rm.delta]
        lines.append(",".join([repr(float(f))] + mags + phases))
    return "\n".join(lines) + "\n"


def _contribution_csv(result: AnalysisResult) -> str:
    lines = ["f_hz,x_pct,y_pct,z_pct"]
    for f in sorted(result.contributions):
        row = result.contributions[f]
        cells = [repr(float(f))]
        for axis in ("x", "y", "z"):
            v = row.get(axis)
            cells.append("" if v is None else repr(float(v)))
        lines.append(",".join(cells))
    return "\n".join(lines) + "\n"


def _frc_figures(result: AnalysisResult, layout: SensorLayout) -> dict[str, str]:
    figs = {}
    for axis in ("x", "y", "z"):
        series = []
        for gname in sorted(layout.groups):
            try:
                f, u = result.frc_stations.series(gname, axis)
            except KeyError:
                continue
            if np.max(u) <= 0:
                continue
            series.append(svg.Series(gname, f.tolist(), u.tolist()))
        try:
            f, u = result.frc_rigid.series("rbm", {"x": "dx", "y": "dy", "z": "dz"}[axis])
            series.append(svg.Series("rigid", f.tolist(), u.tolist()))
        except KeyError:
            pass
        if not series:
            continue
        figs[f"frc_{axis}.svg"] = svg.line_chart(
            series,
            title=f"{result.dof_excited} excitation: scaled {axis} displacement",
            xlabel="forcing frequency [Hz]",
            ylabel="displacement at reference force [mm]",
        )
    return figs


def _re_phase(phasor: complex, ref: complex) -> float:
    if ref == 0:
        return abs(phasor)
    return float((phasor * np.exp(-1j * np.angle(ref))).real)


def _deformation_figures(result: AnalysisResult, layout: SensorLayout) -> dict[str, str]:
    f = min(result.station_phasors, key=lambda ff: abs(ff - result.natural_frequency_hz))
    phasors = result.station_phasors[f]
    rm = result.rigid_motions[f]
    ref = max(
        (p for by_axis in phasors.values() for p in by_axis.values()),
        key=abs,
        default=1.0 + 0j,
    )
    max_disp = max(abs(p) for by_axis in phasors.values() for p in by_axis.values())
    figs = {}
    views = {
        "deformation_plan.svg": ("x", "y", lambda st: st.position[2] > 1.0, "plan view (top)"),
        "deformation_elevation.svg": ("x", "z", lambda st: st.position[1] < -1.0, "south face elevation"),
    }
    for fname, (ax_h, ax_v, keep, label) in views.items():
        idx_h, idx_v = "xyz".index(ax_h), "xyz".index(ax_v)
        rows = []
        span = max(
            (abs(layout.station(sid).position[idx_h]) for sid in phasors), default=1.0
        )
        scale = 0.15 * span / max(max_disp, 1e-30)
        for sid in sorted(phasors):
            st = layout.station(sid)
            if not keep(st):
                continue
            meas = phasors[sid]
            pred = rm.predict(st.position)
            h0, v0 = float(st.position[idx_h]), float(st.position[idx_v])
            rows.append(
                (
                    sid,
                    h0,
                    v0,
                    h0 + scale * _re_phase(meas.get(ax_h, 0.0), ref),
                    v0 + scale * _re_phase(meas.get(ax_v, 0.0), ref),
                    h0 + scale * _re_phase(complex(pred[idx_h]), ref),
                    v0 + scale * _re_phase(complex(pred[idx_v]), ref),
                )
            )
        if not rows:
            continue
        lim_h = max(abs(r[1]) for r in rows)
        lim_v = max(abs(r[2]) for r in rows)
        outline = [(-lim_h, -lim_v), (lim_h, -lim_v), (lim_h, lim_v), (-lim_h, lim_v)]
        figs[fname] = svg.deformation_chart(
            outline,
            rows,
            title=f"{result.dof_excited} excitation at {f:g} Hz: {label}",
            xlabel=f"{ax_h} [m]",
            ylabel=f"{ax_v} [m]",
            scale_note=f"displacements exaggerated x{scale:.3g}",
        )
    return figs


def cmd_analyze(args) -> int:
    cfg = load_run_config(args.config)
    layout = load_layout(_load_text(cfg["layout"], "layout"))
    program = load_program(_load_text(cfg["program"], "program"))
    policy = policy_from_config(cfg)

    try:
        response = parse_timeseries_csv(Path(args.response).read_text())
        force = parse_timeseries_csv(Path(args.force).read_text())
    except OSError as exc:
        raise ConfigError(f"cannot read input: {exc}") from exc

    # establishes the shared timebase and overlap before analysis
    synchronize(response, force)

    strain_cfg = cfg.get("strain")
    strain_stations = None
    strain_fiber = 2.9
    if strain_cfg:
        ids = tuple(strain_cfg["stations"])
        known = {s.id for s in layout.stations}
        if len(ids) == 3 and set(ids) <= known:
            strain_stations = ids
            strain_fiber = float(strain_cfg.get("fiber_m", 2.9))

    result = analyze(
        response, force, program, layout, policy,
        strain_stations=strain_stations, strain_fiber_m=strain_fiber,
    )

    damping_doc = {
        "config_sha256": config_hash(cfg),
        "dof_excited": result.dof_excited,
        "fn_hz": result.natural_frequency_hz,
        "peak_flat": result.peak_flat,
        "xi_lo": result.damping.xi_lo,
        "xi_hi": result.damping.xi_hi,
        "xi_poor_fit": result.damping.poor_fit,
        "amplification": result.amplification,
        "strain": result.strain,
        "f_ref": policy.f_ref(result.dof_excited),
    }

    files = {
        "frc.csv": modal.frc_to_csv(result.frc_stations),
        "frc_rigid.csv": modal.frc_to_csv(result.frc_rigid),
        "rbm.csv": _rbm_csv(result),
        "contribution.csv": _contribution_csv(result),
        "damping.json": json.dumps(damping_doc, indent=1, sort_keys=True) + "\n",
    }
    files.update(_frc_figures(result, layout))
    files.update(_deformation_figures(result, layout))

    out = Path(args.output)
    out.mkdir(parents=True, exist_ok=True)
    for name, text in files.items():
        _atomic_write(out / name, text)
    print(
        f"{result.dof_excited}: fn={result.natural_frequency_hz:g} Hz, "
        f"xi=[{result.damping.xi_lo:.3f}, {result.damping.xi_hi:.3f}], "
        f"amplification={result.amplification:.2f} -> {out}"
    )
    return EXIT_OK


def cmd_linearity(args) -> int:
    frc_a = modal.frc_from_csv(Path(args.frc_a).read_text())
    frc_b = modal.frc_from_csv(Path(args.frc_b).read_text())
    rms = modal.linearity_rms(frc_a, frc_b, exclude_below=args.exclude_below)
    shared = len(
        {(p.id, p.axis, p.f_hz) for p in frc_a.points if p.f_hz > args.exclude_below}
        & {(p.id, p.axis, p.f_hz) for p in frc_b.points if p.f_hz > args.exclude_below}
    )
    doc = {"rms_mm": rms, "shared_points": shared, "exclude_below_hz": args.exclude_below}
    text = json.dumps(doc, indent=1, sort_keys=True) + "\n"
    if args.output:
        _atomic_write(Path(args.output), text)
    sys.stdout.write(text)
    return EXIT_OK


def cmd_vs(args) -> int:
    sounding = geotech.parse_cpt_csv(Path(args.cpt).read_text())
    rows = geotech.vs_average(sounding, multiplicative=args.multiplicative)
    text = geotech.vs_profile_csv(rows)
    if args.output:
        _atomic_write(Path(args.output), text)
    else:
        sys.stdout.write(text)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="vibroident",
        description="Forced-vibration simulation and system identification",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    sim = sub.add_parser("simulate", help="generate synthetic test records")
    sim.add_argument("-c", "--config", required=True)
    sim.add_argument("-o", "--output", required=True)
    sim.set_defaults(func=cmd_simulate)

    ana = sub.add_parser("analyze", help="identify dynamics from records")
    ana.add_argument("-c", "--config", required=True)
    ana.add_argument("--response", required=True)
    ana.add_argument("--force", required=True)
    ana.add_argument("-o", "--output", required=True)
    ana.set_defaults(func=cmd_analyze)

    lin = sub.add_parser("linearity", help="RMS difference of two scaled FRCs")
    lin.add_argument("frc_a")
    lin.add_argument("frc_b")
    lin.add_argument("--exclude-below", type=float, default=2.0)
    lin.add_argument("-o", "--output")
    lin.set_defaults(func=cmd_linearity)

    vs = sub.add_parser("vs", help="CPT shear-wave-velocity profile")
    vs.add_argument("cpt")
    vs.add_argument("-o", "--output")
    vs.add_argument("--multiplicative", action="store_true")
    vs.set_defaults(func=cmd_vs)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (ParseError, AlignmentError, WindowError) as exc:
        print(f"input error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except NumericError as exc:
        print(f"numeric error ({type(exc).__name__}): {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except VibroidentError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except OSError as exc:
        print(f"io error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
