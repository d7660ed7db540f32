"""End-to-end analysis: records in, identified dynamics out.

Band-pass filter the response, window each dwell (or sweep crossing),
sine-fit every channel, estimate force amplitudes from the native-rate
force records, scale to the reference force, then derive rigid-body
motion, natural frequency, damping and amplification.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import dsp, modal
from .errors import WindowError
from .modal import (
    DampingEstimate,
    ForceEstimate,
    ForceGeometry,
    FrcPoint,
    FrequencyResponseCurve,
    RigidMotion,
    StationPhasors,
)
from .simulator.excitation import ExcitationProgram
from .timeseries import SensorLayout, TimeSeriesSet, extract_window

#: rigid-motion FRC axis measured for each excited DOF
EXCITED_AXIS = {"X": "dx", "Y": "dy", "Z": "dz", "YAW": "rz"}


@dataclass(frozen=True)
class AnalysisPolicy:
    """Knobs of the identification chain; defaults follow the test campaign."""

    filter_order: int = 5
    f_low: float = 1.0
    f_high: float = 25.0
    skip_cycles: float = 10.0
    max_window_s: float = 40.0
    sweep_window_min_s: float = 2.0
    sweep_window_max_s: float = 5.0
    sweep_grid_step: float = 1.0
    f_ref_force_kn: float = 6800.0
    f_ref_torque_knm: float = 117000.0
    rotation_lever_m: float = 16.5
    xi_grid: tuple[float, ...] = modal.DEFAULT_XI_GRID
    damping_fit_range: tuple[float, float] = (0.3, 1.5)
    damping_channel_floor: float = 0.2
    force_low_freq_cut: float | None = None
    exclude_below_hz: float = 2.0      # linearity comparisons

    def f_ref(self, dof: str) -> float:
        return self.f_ref_torque_knm if dof.upper() == "YAW" else self.f_ref_force_kn


@dataclass(frozen=True)
class AnalysisResult:
    dof_excited: str
    frc_stations: FrequencyResponseCurve
    frc_rigid: FrequencyResponseCurve
    rigid_motions: dict[float, RigidMotion]
    contributions: dict[float, dict[str, float | None]]
    force_estimates: dict[float, ForceEstimate]
    damping: DampingEstimate
    natural_frequency_hz: float
    peak_flat: bool
    amplification: float
    station_phasors: dict[float, dict[str, dict[str, complex]]] = field(default_factory=dict)
    strain: float | None = None


def _split_label(label: str) -> tuple[str, str]:
    sid, _, axis = label.rpartition("_")
    return sid, axis


def analysis_windows(program: ExcitationProgram, policy: AnalysisPolicy) -> list[tuple[float, float, float]]:
    """(f, t0, t1) per analysis point, from the program's own schedule."""
    out = []
    if program.kind == "stepped":
        for t_on, t_off, f in program.stepped.schedule():
            t0 = t_on + policy.skip_cycles / f
            t1 = min(t_off, t0 + policy.max_window_s)
            if (t1 - t0) * f < 3.0:
                raise WindowError(
                    f"dwell at {f} Hz leaves {(t1 - t0) * f:.2f} cycles after the transient skip"
                )
            out.append((f, t0, t1))
        return out
    sw = program.sweep
    f = math.ceil(sw.f0 / policy.sweep_grid_step) * policy.sweep_grid_step
    while f <= sw.f1 + 1e-9:
        width = min(max(3.5 / f, policy.sweep_window_min_s), policy.sweep_window_max_s)
        tc = sw.time_at_frequency(f)
        t0, t1 = tc - width / 2.0, tc + width / 2.0
        if t0 >= 0.0 and t1 <= sw.duration:
            out.append((float(f), t0, t1))
        f += policy.sweep_grid_step
    if not out:
        raise WindowError("no sweep analysis window fits inside the run")
    return out


def analyze(
    response: TimeSeriesSet,
    force: TimeSeriesSet,
    program: ExcitationProgram,
    layout: SensorLayout,
    policy: AnalysisPolicy = AnalysisPolicy(),
    strain_stations: tuple[str, str, str] | None = None,
    strain_fiber_m: float = 2.9,
) -> AnalysisResult:
    dof = program.dof_excited.upper()
    windows = analysis_windows(program, policy)
    coeffs = dsp.design_bandpass(policy.filter_order, policy.f_low, policy.f_high, response.sample_rate)
    filtered = {ts.label: dsp.filtfilt(coeffs, ts) for ts in response}

    geometry = {
        fp.id: ForceGeometry(fp.location, fp.direction) for fp in program.force_points
    }

    amplitudes: dict[float, dict[tuple[str, str], float]] = {}
    phasors: dict[float, dict[str, dict[str, complex]]] = {}
    force_estimates: dict[float, ForceEstimate] = {}
    forces_scalar: dict[float, float] = {}

    for f, t0, t1 in windows:
        amps: dict[tuple[str, str], float] = {}
        by_station: dict[str, dict[str, complex]] = {}
        for label, ts in filtered.items():
            try:
                fit = dsp.fit_sine(extract_window(ts, t0, t1), f)
            except dsp.FitError as exc:
                # channels with no coherent response (noise-only) may run out
                # of polish iterations; the carried best fit is valid there
                if exc.best is None:
                    raise
                fit = exc.best
            # forward+backward filtering scales amplitudes by |H|^2; undo it
            gain2 = float(dsp.filter_gain(coeffs, fit.frequency)[0]) ** 2
            accel_phasor = fit.phasor / gain2
            disp_phasor = -accel_phasor / fit.omega**2
            sid, axis = _split_label(label)
            amps[(sid, axis)] = abs(disp_phasor)
            by_station.setdefault(sid, {})[axis] = complex(disp_phasor)
        amplitudes[f] = amps
        phasors[f] = by_station

        windowed_force = TimeSeriesSet(
            tuple(extract_window(ts, t0, t1) for ts in force)
        )
        est = modal.estimate_force_amplitude(
            windowed_force, geometry, f, low_freq_cut=policy.force_low_freq_cut
        )
        force_estimates[f] = est
        forces_scalar[f] = est.torque if dof == "YAW" else est.resultant

    f_ref = policy.f_ref(dof)
    frc_stations = modal.build_frc(amplitudes, forces_scalar, f_ref, dof, layout)

    rigid_motions: dict[float, RigidMotion] = {}
    contributions: dict[float, dict[str, float | None]] = {}
    rigid_points: list[FrcPoint] = []
    for f in sorted(phasors):
        stations = [
            StationPhasors(sid, layout.station(sid).position, axes)
            for sid, axes in sorted(phasors[f].items())
        ]
        rm = modal.fit_rigid_body(stations, f)
        rigid_motions[f] = rm
        contributions[f] = modal.rbm_contribution(stations, rm)
        scale = f_ref / forces_scalar[f]
        for k, axis in enumerate(modal.GENERALIZED_AXES):
            value = abs(rm.delta[k])
            if axis.startswith("r"):
                value *= policy.rotation_lever_m
            rigid_points.append(
                FrcPoint(f, "rbm", axis, value * 1e3 * scale, forces_scalar[f], f_ref)
            )
    frc_rigid = FrequencyResponseCurve(tuple(rigid_points), dof)

    fn, _, flat = modal.frc_peak(frc_rigid, "rbm", EXCITED_AXIS[dof])

    # damping: every station channel that meaningfully responded
    peaks = {}
    for sid, axis in frc_stations.ids():
        if sid in layout.groups:
            continue
        _, u = frc_stations.series(sid, axis)
        peaks[(sid, axis)] = float(np.max(u))
    peak_max = max(peaks.values())
    relevant = {
        key for key, p in peaks.items() if p >= policy.damping_channel_floor * peak_max
    }
    frc_damping = frc_stations.subset(lambda p: (p.id, p.axis) in relevant)
    damping = modal.estimate_damping(
        frc_damping, fn, policy.xi_grid, policy.damping_fit_range
    )
    amplification = modal.amplification_factor(
        frc_rigid.subset(lambda p: p.axis == EXCITED_AXIS[dof])
    )

    strain = None
    if strain_stations is not None:
        strain = deformational_strain(
            phasors, rigid_motions, layout, strain_stations, fn, strain_fiber_m
        )

    return AnalysisResult(
        dof_excited=dof,
        frc_stations=frc_stations,
        frc_rigid=frc_rigid,
        rigid_motions=rigid_motions,
        contributions=contributions,
        force_estimates=force_estimates,
        damping=damping,
        natural_frequency_hz=fn,
        peak_flat=flat,
        amplification=amplification,
        station_phasors=phasors,
        strain=strain,
    )


def deformational_strain(
    phasors: dict[float, dict[str, dict[str, complex]]],
    rigid_motions: dict[float, RigidMotion],
    layout: SensorLayout,
    station_ids: tuple[str, str, str],
    f_peak: float,
    fiber_m: float,
) -> float:
    """Bending strain from the deformational (rigid-subtracted) vertical
    displacement of three stations, at the frequency nearest the peak."""
    f = min(phasors, key=lambda ff: abs(ff - f_peak))
    rm = rigid_motions[f]
    xs = []
    ws = []
    for sid in station_ids:
        st = layout.station(sid)
        meas = phasors[f][sid]["z"]
        pred = rm.predict(st.position)[2]
        deform = meas - pred
        xs.append(float(st.position[0]))
        # real part relative to the strongest component's phase
        ws.append(abs(deform) * math.copysign(1.0, (deform * np.exp(-1j * np.angle(meas))).real or 1.0))
    return modal.curvature_strain(xs, ws, fiber_m)
