"""Station accelerations from the generalized state history."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..timeseries import SensorLayout, TimeSeries, TimeSeriesSet
from .integrate import StateHistory

AXIS_NAMES = ("x", "y", "z")


@dataclass(frozen=True)
class NoiseSpec:
    """Additive sensor noise: white Gaussian plus an optional pure tone
    (a stand-in for actuator super-harmonic contamination)."""

    rms: float = 0.0                 # m/s^2
    seed: int | None = None
    tone_hz: float | None = None
    tone_amplitude: float = 0.0      # m/s^2


def channel_label(station_id: str, axis: int) -> str:
    return f"{station_id}_{AXIS_NAMES[axis]}"


def sensor_kinematics(
    history: StateHistory,
    layout: SensorLayout,
    noise: NoiseSpec = NoiseSpec(),
    output_rate: float | None = None,
) -> TimeSeriesSet:
    """Per-station acceleration a_i = a_0 + alpha x r_i (linearized).

    The centripetal term is quadratic in the small rotational velocity and
    omitted.  Channels are named ``<station>_<axis>``; optional white noise
    is deterministic per seed and added at the output rate.
    """
    max_rot = float(np.max(np.abs(history.u[:, 3:]))) if len(history.t) else 0.0
    if max_rot >= 1e-3:
        raise ValueError(
            f"rotations reach {max_rot:.2e} rad; linearized kinematics need |theta| < 1e-3"
        )
    rate = history.sample_rate
    if output_rate is None:
        output_rate = rate
    step_f = rate / output_rate
    step = int(round(step_f))
    if abs(step_f - step) > 1e-9 or step < 1:
        raise ValueError(f"output rate {output_rate} must integer-divide the state rate {rate}")

    idx = np.arange(0, len(history.t), step)
    t0 = float(history.t[0])
    acc_tr = history.a[idx, :3]
    acc_rot = history.a[idx, 3:]

    rng = np.random.default_rng(noise.seed)
    t_out = history.t[idx]
    series = []
    for st in layout.stations:
        a_st = acc_tr + np.cross(acc_rot, st.position[None, :])
        for axis in range(3):
            vals = a_st @ st.axes[axis]
            if noise.tone_hz is not None and noise.tone_amplitude > 0.0:
                vals = vals + noise.tone_amplitude * np.sin(2.0 * np.pi * noise.tone_hz * t_out)
            if noise.rms > 0.0:
                vals = vals + rng.normal(0.0, noise.rms, size=vals.shape)
            series.append(
                TimeSeries(t0, output_rate, vals, "m/s^2", channel_label(st.id, axis))
            )
    return TimeSeriesSet(tuple(series))
