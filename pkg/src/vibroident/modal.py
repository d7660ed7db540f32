"""Frequency response curves, rigid-body motion, damping and strain estimates.

Everything downstream of the per-channel sine fits: force-amplitude
estimation, force-normalized FRC construction with group averaging,
least-squares rigid-body motion, SDOF amplification matching for the
damping ratio, linearity comparison, and the bending-strain estimate.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass

import numpy as np

from .dsp import LowFreqRemoval, SineFit, fit_sine, subtract_low_freq
from .errors import (
    BuildError,
    ComparisonError,
    DomainError,
    FitError,
    ForceEstimationError,
    GeometryError,
    InfinityError,
    NormalizationError,
    RankError,
)
from .timeseries import SensorLayout, TimeSeriesSet

GENERALIZED_AXES = ("dx", "dy", "dz", "rx", "ry", "rz")

#: rotations are reported as displacements at half the block length
DEFAULT_ROTATION_LEVER_M = 16.5


def displacement_amplitude(fit: SineFit) -> float:
    """Steady-state displacement amplitude from an acceleration fit: A/w^2."""
    if fit.omega <= 1e-9:
        raise DomainError(f"fit frequency {fit.omega} rad/s too small to integrate twice")
    return fit.amplitude / fit.omega**2


def displacement_phasor(fit: SineFit) -> complex:
    """Complex displacement phasor; u = -a/w^2 for a steady sinusoid."""
    if fit.omega <= 1e-9:
        raise DomainError(f"fit frequency {fit.omega} rad/s too small to integrate twice")
    return -fit.phasor / fit.omega**2


@dataclass(frozen=True)
class ForceGeometry:
    """Where a recorded force channel acts and along which direction."""

    position: np.ndarray
    direction: np.ndarray

    def __post_init__(self):
        pos = np.asarray(self.position, dtype=float).reshape(3)
        d = np.asarray(self.direction, dtype=float).reshape(3)
        pos.flags.writeable = False
        d.flags.writeable = False
        object.__setattr__(self, "position", pos)
        object.__setattr__(self, "direction", d)


@dataclass(frozen=True)
class ForceEstimate:
    """Resultant force/torque phasors at one forcing frequency, kN and kN*m."""

    frequency_hz: float
    component_phasors: np.ndarray      # complex (3,), x/y/z force resultants
    torque_z_phasor: complex
    channel_fits: dict[str, SineFit]

    @property
    def resultant(self) -> float:
        """Magnitude of the force resultant across X/Y/Z components."""
        return float(np.linalg.norm(np.abs(self.component_phasors)))

    @property
    def torque(self) -> float:
        return abs(self.torque_z_phasor)


def estimate_force_amplitude(
    force: TimeSeriesSet,
    geometry: dict[str, ForceGeometry],
    f: float,
    low_freq_cut: float | None = None,
) -> ForceEstimate:
    """Combine per-actuator sine fits into resultant force and torque.

    Torque about Z comes from the X/Y components and their lever arms.
    When ``low_freq_cut`` is set, a dominant sub-cutoff wave is subtracted
    from each channel before fitting.
    """
    components = np.zeros(3, dtype=complex)
    torque = 0.0 + 0.0j
    fits: dict[str, SineFit] = {}
    for label, geo in geometry.items():
        try:
            ts = force[label]
        except KeyError:
            raise ForceEstimationError(f"force channel {label!r} missing") from None
        if low_freq_cut is not None:
            removal: LowFreqRemoval = subtract_low_freq(ts, low_freq_cut)
            ts = removal.series
        try:
            fit = fit_sine(ts, f)
        except FitError as exc:
            raise ForceEstimationError(f"sine fit failed on channel {label!r}: {exc}") from exc
        fits[label] = fit
        phasor = fit.phasor
        fvec = phasor * geo.direction
        components += fvec
        torque += geo.position[0] * fvec[1] - geo.position[1] * fvec[0]
    return ForceEstimate(
        frequency_hz=f,
        component_phasors=components,
        torque_z_phasor=complex(torque),
        channel_fits=fits,
    )


@dataclass(frozen=True)
class FrcPoint:
    f_hz: float
    id: str                  # station id, group name, or "rbm"
    axis: str                # x | y | z (stations), dx..rz (rigid motion)
    u_scaled_mm: float
    f_measured: float        # kN (or kN*m for yaw programs)
    f_ref: float


@dataclass(frozen=True)
class FrequencyResponseCurve:
    points: tuple[FrcPoint, ...]
    dof_excited: str = "X"

    def __post_init__(self):
        object.__setattr__(self, "points", tuple(self.points))

    def ids(self) -> list[tuple[str, str]]:
        seen = []
        for p in self.points:
            key = (p.id, p.axis)
            if key not in seen:
                seen.append(key)
        return seen

    def series(self, sid: str, axis: str) -> tuple[np.ndarray, np.ndarray]:
        pts = sorted(
            ((p.f_hz, p.u_scaled_mm) for p in self.points if p.id == sid and p.axis == axis)
        )
        if not pts:
            raise KeyError((sid, axis))
        f = np.array([p[0] for p in pts])
        u = np.array([p[1] for p in pts])
        return f, u

    def subset(self, keep) -> "FrequencyResponseCurve":
        return FrequencyResponseCurve(
            tuple(p for p in self.points if keep(p)), self.dof_excited
        )


def build_frc(
    amplitudes: dict[float, dict[tuple[str, str], float]],
    forces: dict[float, float],
    f_ref: float,
    dof_excited: str = "X",
    layout: SensorLayout | None = None,
) -> FrequencyResponseCurve:
    """Scale station displacement amplitudes (meters) to the reference force.

    Adds one averaged series per layout group.  Frequencies must have a
    matching measured force; amplitudes scale by f_ref / f_measured.
    """
    points: list[FrcPoint] = []
    for f in sorted(amplitudes):
        if f not in forces:
            raise BuildError(f"no measured force for frequency {f} Hz")
        fm = forces[f]
        if fm <= 0:
            raise BuildError(f"non-positive measured force at {f} Hz")
        scale = f_ref / fm
        by_group: dict[tuple[str, str], list[float]] = {}
        for (sid, axis), u_m in sorted(amplitudes[f].items()):
            u_mm = u_m * 1e3 * scale
            points.append(FrcPoint(f, sid, axis, u_mm, fm, f_ref))
            if layout is not None:
                for gname, members in layout.groups.items():
                    if sid in members:
                        by_group.setdefault((gname, axis), []).append(u_mm)
        for (gname, axis), vals in sorted(by_group.items()):
            points.append(FrcPoint(f, gname, axis, float(np.mean(vals)), fm, f_ref))
    return FrequencyResponseCurve(tuple(points), dof_excited)


FRC_CSV_HEADER = ("f_hz", "station", "axis", "u_scaled_mm", "F_measured", "F_ref")


def frc_to_csv(frc: FrequencyResponseCurve) -> str:
    buf = io.StringIO()
    buf.write(f"# dof_excited: {frc.dof_excited}\n")
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(FRC_CSV_HEADER)
    for p in frc.points:
        writer.writerow([
            repr(float(p.f_hz)), p.id, p.axis,
            repr(float(p.u_scaled_mm)), repr(float(p.f_measured)), repr(float(p.f_ref)),
        ])
    return buf.getvalue()


def frc_from_csv(text: str) -> FrequencyResponseCurve:
    dof = "X"
    rows = []
    for line in text.splitlines():
        if line.startswith("#"):
            if "dof_excited:" in line:
                dof = line.split("dof_excited:", 1)[1].strip()
            continue
        if line.strip():
            rows.append(line)
    reader = csv.reader(rows)
    header = next(reader)
    if tuple(header) != FRC_CSV_HEADER:
        raise BuildError(f"unexpected FRC csv header: {header}")
    points = tuple(
        FrcPoint(float(r[0]), r[1], r[2], float(r[3]), float(r[4]), float(r[5]))
        for r in reader
    )
    return FrequencyResponseCurve(points, dof)


# --- rigid body motion ------------------------------------------------------


def rigid_rows(position: np.ndarray) -> np.ndarray:
    """3x6 map from {dx,dy,dz,rx,ry,rz} to station displacement (small angles)."""
    x, y, z = position
    return np.array([
        [1.0, 0.0, 0.0, 0.0, z, -y],
        [0.0, 1.0, 0.0, -z, 0.0, x],
        [0.0, 0.0, 1.0, y, -x, 0.0],
    ])


AXIS_ROW = {"x": 0, "y": 1, "z": 2}


@dataclass(frozen=True)
class StationPhasors:
    """Measured complex displacement per axis at one station."""

    id: str
    position: np.ndarray
    phasors: dict[str, complex]     # axis -> displacement phasor, meters

    def __post_init__(self):
        pos = np.asarray(self.position, dtype=float).reshape(3)
        pos.flags.writeable = False
        object.__setattr__(self, "position", pos)


@dataclass(frozen=True)
class RigidMotion:
    """Complex 6-vector of the reference point, per forcing frequency."""

    frequency_hz: float
    delta: np.ndarray               # complex (6,)
    residual_rms: float             # meters
    n_stations: int

    def __post_init__(self):
        d = np.asarray(self.delta, dtype=complex).reshape(6)
        d.flags.writeable = False
        object.__setattr__(self, "delta", d)

    def predict(self, position: np.ndarray) -> np.ndarray:
        """Rigid displacement phasor (3,) at a point."""
        return rigid_rows(np.asarray(position, dtype=float)) @ self.delta


def fit_rigid_body(stations: list[StationPhasors], frequency_hz: float = 0.0) -> RigidMotion:
    """Least-squares 6-parameter rigid motion explaining all station phasors."""
    rows = []
    values = []
    for st in stations:
        alpha = rigid_rows(st.position)
        for axis, phasor in sorted(st.phasors.items()):
            rows.append(alpha[AXIS_ROW[axis]])
            values.append(phasor)
    if len(rows) < 6:
        raise RankError(f"only {len(rows)} measured components; need at least 6")
    A = np.array(rows)
    b = np.array(values, dtype=complex)
    _, sv, vt = np.linalg.svd(A)
    if sv[-1] <= 1e-10 * sv[0]:
        direction = GENERALIZED_AXES[int(np.argmax(np.abs(vt[-1])))]
        raise RankError(
            f"station set cannot observe the {direction} direction", direction=direction
        )
    # identical real operator for the real and imaginary parts
    sol_re, *_ = np.linalg.lstsq(A, b.real, rcond=None)
    sol_im, *_ = np.linalg.lstsq(A, b.imag, rcond=None)
    delta = sol_re + 1j * sol_im
    resid = A @ delta - b
    return RigidMotion(
        frequency_hz=frequency_hz,
        delta=delta,
        residual_rms=float(np.sqrt(np.mean(np.abs(resid) ** 2))),
        n_stations=len(stations),
    )


def rbm_contribution(
    stations: list[StationPhasors],
    rigid: RigidMotion,
    floor_ratio: float = 1e-3,
) -> dict[str, float | None]:
    """Percent of measured motion explained by the rigid prediction, per axis.

    Stations whose measured amplitude on an axis sits below
    floor_ratio x (largest measured amplitude anywhere) are left out; an
    axis with no usable stations reports None.
    """
    max_amp = max(
        (abs(p) for st in stations for p in st.phasors.values()), default=0.0
    )
    floor = floor_ratio * max_amp
    out: dict[str, float | None] = {}
    for axis in ("x", "y", "z"):
        meas = []
        pred = []
        for st in stations:
            if axis not in st.phasors or abs(st.phasors[axis]) < floor:
                continue
            meas.append(abs(st.phasors[axis]))
            pred.append(abs(rigid.predict(st.position)[AXIS_ROW[axis]]))
        if not meas:
            out[axis] = None
        else:
            out[axis] = 100.0 * float(np.mean(pred)) / float(np.mean(meas))
    return out


# --- SDOF amplification and damping -----------------------------------------


def rd_curve(xi: float, r) -> np.ndarray | float:
    """Dynamic amplification of an SDOF oscillator: peak of ~1/(2 xi) near r=1."""
    if not 0.0 <= xi < 1.0:
        raise DomainError(f"damping ratio {xi} outside [0, 1)")
    r_arr = np.asarray(r, dtype=float)
    if np.any(r_arr < 0):
        raise DomainError("frequency ratio must be non-negative")
    if xi == 0.0 and np.any(r_arr == 1.0):
        raise InfinityError("undamped oscillator at resonance")
    out = 1.0 / np.sqrt((1.0 - r_arr**2) ** 2 + (2.0 * xi * r_arr) ** 2)
    return float(out) if np.isscalar(r) else out


DEFAULT_XI_GRID = tuple(np.arange(0.05, 0.95 + 1e-9, 0.025))


@dataclass(frozen=True)
class DampingEstimate:
    xi_lo: float
    xi_hi: float
    per_station: dict[tuple[str, str], float]
    normalization_freq_hz: float          # the assumed natural frequency
    boundary: bool = False                # best xi pinned at a grid end somewhere
    poor_fit: bool = False                # some curve matches no oscillator shape

#: relative rms misfit beyond which a curve is not credibly SDOF-shaped
POOR_FIT_MISFIT = 0.15


def _normalization(u: np.ndarray) -> float:
    """Static-displacement proxy: mean of the two lowest-frequency amplitudes."""
    return float(np.mean(u[:2]))


def estimate_damping(
    frc: FrequencyResponseCurve,
    fn_hint: float,
    xi_grid=DEFAULT_XI_GRID,
    fit_range: tuple[float, float] = (0.3, 1.5),
) -> DampingEstimate:
    """Match normalized station curves against the SDOF amplification family.

    The response at the lowest frequencies stands in for the static
    displacement; the grid value minimizing the L2 distance over
    r in fit_range wins, reported as a min/max interval across stations.
    """
    if fn_hint <= 0:
        raise NormalizationError("need a positive natural-frequency hint")
    xi_grid = np.asarray(xi_grid, dtype=float)
    per_station: dict[tuple[str, str], float] = {}
    boundary = False
    poor_fit = False
    for sid, axis in frc.ids():
        f, u = frc.series(sid, axis)
        if np.count_nonzero(f < 0.5 * fn_hint) < 2:
            raise NormalizationError(
                f"series {sid}/{axis} lacks two points below {0.5 * fn_hint:.3g} Hz"
            )
        norm = _normalization(u)
        if norm <= 0:
            raise NormalizationError(f"series {sid}/{axis} has a non-positive normalization")
        r = f / fn_hint
        sel = (r >= fit_range[0]) & (r <= fit_range[1])
        if np.count_nonzero(sel) < 3:
            raise NormalizationError(
                f"series {sid}/{axis} has fewer than 3 points in the fit range"
            )
        target = u[sel] / norm
        errs = [
            float(np.sum((target - rd_curve(float(xi), r[sel])) ** 2)) for xi in xi_grid
        ]
        best = int(np.argmin(errs))
        if best in (0, len(xi_grid) - 1):
            boundary = True
        misfit = math.sqrt(errs[best] / len(target)) / float(np.mean(np.abs(target)))
        if misfit > POOR_FIT_MISFIT:
            poor_fit = True
        per_station[(sid, axis)] = float(xi_grid[best])
    if not per_station:
        raise NormalizationError("no station series in the curve")
    values = list(per_station.values())
    return DampingEstimate(
        xi_lo=min(values),
        xi_hi=max(values),
        per_station=per_station,
        normalization_freq_hz=fn_hint,
        boundary=boundary,
        poor_fit=poor_fit,
    )


def amplification_factor(frc: FrequencyResponseCurve) -> float:
    """Peak scaled amplitude over the low-frequency (static proxy) amplitude,
    averaged across station series."""
    ratios = []
    for sid, axis in frc.ids():
        f, u = frc.series(sid, axis)
        if len(f) < 3:
            raise NormalizationError(f"series {sid}/{axis} too short to normalize")
        norm = _normalization(u)
        if norm <= 0:
            raise NormalizationError(f"series {sid}/{axis} has a non-positive normalization")
        ratios.append(float(np.max(u)) / norm)
    if not ratios:
        raise NormalizationError("no station series in the curve")
    return float(np.mean(ratios))


def frc_peak(frc: FrequencyResponseCurve, sid: str, axis: str) -> tuple[float, float, bool]:
    """(frequency, amplitude, flat_flag) of a series' maximum; the flag marks
    a peak whose runner-up sits within 5 %."""
    f, u = frc.series(sid, axis)
    order = np.argsort(u)
    peak_idx = order[-1]
    flat = len(u) > 1 and (u[order[-1]] - u[order[-2]]) < 0.05 * u[order[-1]]
    return float(f[peak_idx]), float(u[peak_idx]), bool(flat)


def linearity_rms(
    frc_a: FrequencyResponseCurve,
    frc_b: FrequencyResponseCurve,
    exclude_below: float = 2.0,
) -> float:
    """RMS difference of scaled amplitudes over the shared grid, in mm."""
    def table(frc):
        return {
            (p.id, p.axis, p.f_hz): p.u_scaled_mm
            for p in frc.points
            if p.f_hz > exclude_below
        }

    ta, tb = table(frc_a), table(frc_b)
    shared = sorted(set(ta) & set(tb))
    if not shared:
        raise ComparisonError("curves share no frequencies above the exclusion limit")
    diffs = np.array([ta[k] - tb[k] for k in shared])
    return float(np.sqrt(np.mean(diffs**2)))


def curvature_strain(x_positions, deflections_m, fiber_distance_m: float) -> float:
    """Bending strain from a parabola through three (x, w) samples.

    Curvature is the parabola's second derivative, 2a; strain = curvature
    times the fiber distance.
    """
    x = np.asarray(x_positions, dtype=float).reshape(3)
    w = np.asarray(deflections_m, dtype=float).reshape(3)
    if len(set(x.tolist())) != 3:
        raise GeometryError("parabola needs three distinct x positions")
    a = np.polyfit(x, w, 2)[0]
    curvature = 2.0 * a
    return float(curvature * fiber_distance_m)
