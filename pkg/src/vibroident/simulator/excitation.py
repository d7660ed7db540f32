"""Stepped and swept sine excitation programs and force synthesis."""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from ..errors import ConfigError
from ..timeseries import TimeSeries, TimeSeriesSet


@dataclass(frozen=True)
class ForcePoint:
    """One actuator: where it pushes, along which axis, how hard."""

    id: str
    location: np.ndarray      # m, relative to the CG
    direction: np.ndarray     # unit vector
    amplitude: float          # N

    def __post_init__(self):
        loc = np.asarray(self.location, dtype=float).reshape(3)
        d = np.asarray(self.direction, dtype=float).reshape(3)
        if abs(np.linalg.norm(d) - 1.0) > 1e-9:
            raise ValueError(f"force point {self.id}: direction must be a unit vector")
        loc.flags.writeable = False
        d.flags.writeable = False
        object.__setattr__(self, "location", loc)
        object.__setattr__(self, "direction", d)

    def generalized(self) -> np.ndarray:
        """6-vector of generalized force per unit drive."""
        return self.amplitude * np.concatenate([self.direction, np.cross(self.location, self.direction)])


@dataclass(frozen=True)
class SteppedSpec:
    frequencies: tuple[float, ...]        # Hz, strictly increasing
    duration_per_step: float | None = None
    cycles_per_step: float | None = None
    rest_gap: float = 5.0                 # zero-force decay between steps

    def __post_init__(self):
        freqs = tuple(float(f) for f in self.frequencies)
        if not freqs or any(b <= a for a, b in zip(freqs, freqs[1:])) or freqs[0] <= 0:
            raise ValueError("stepped frequencies must be positive and strictly increasing")
        if (self.duration_per_step is None) == (self.cycles_per_step is None):
            raise ValueError("give exactly one of duration_per_step / cycles_per_step")
        object.__setattr__(self, "frequencies", freqs)

    def step_duration(self, f: float) -> float:
        if self.duration_per_step is not None:
            return float(self.duration_per_step)
        return float(self.cycles_per_step) / f

    def schedule(self) -> list[tuple[float, float, float]]:
        """(t_start, t_end, frequency) of each active dwell."""
        out = []
        t = 0.0
        for f in self.frequencies:
            dur = self.step_duration(f)
            out.append((t, t + dur, f))
            t += dur + self.rest_gap
        return out


@dataclass(frozen=True)
class SweepSpec:
    f0: float
    f1: float
    rate: float               # Hz/s, linear increase

    def __post_init__(self):
        if not (self.f1 > self.f0 > 0 and self.rate > 0):
            raise ValueError("sweep needs f1 > f0 > 0 and rate > 0")

    @property
    def duration(self) -> float:
        return (self.f1 - self.f0) / self.rate

    def instantaneous_frequency(self, t) -> np.ndarray:
        return self.f0 + self.rate * np.asarray(t, dtype=float)

    def time_at_frequency(self, f: float) -> float:
        return (f - self.f0) / self.rate


@dataclass(frozen=True)
class ExcitationProgram:
    kind: str                                   # "stepped" | "sweep"
    force_points: tuple[ForcePoint, ...]
    stepped: SteppedSpec | None = None
    sweep: SweepSpec | None = None
    dof_excited: str = "X"                      # X | Y | Z | YAW, metadata
    name: str = "program"

    def __post_init__(self):
        if self.kind not in ("stepped", "sweep"):
            raise ValueError(f"unknown program kind {self.kind!r}")
        if self.kind == "stepped" and self.stepped is None:
            raise ValueError("stepped program needs a stepped spec")
        if self.kind == "sweep" and self.sweep is None:
            raise ValueError("sweep program needs a sweep spec")
        if not self.force_points:
            raise ValueError("program needs at least one force point")
        object.__setattr__(self, "force_points", tuple(self.force_points))

    @property
    def f_max(self) -> float:
        if self.kind == "stepped":
            return self.stepped.frequencies[-1]
        return self.sweep.f1

    @property
    def duration(self) -> float:
        if self.kind == "stepped":
            sched = self.stepped.schedule()
            return sched[-1][1] + self.stepped.rest_gap
        return self.sweep.duration

    def generalized_amplitude(self) -> np.ndarray:
        """Constant 6-vector multiplying the unit drive signal."""
        return np.sum([fp.generalized() for fp in self.force_points], axis=0)

    def drive(self, t: np.ndarray) -> np.ndarray:
        """Unit-amplitude drive signal shared by all force points."""
        t = np.asarray(t, dtype=float)
        s = np.zeros_like(t)
        if self.kind == "sweep":
            active = (t >= 0.0) & (t <= self.sweep.duration)
            tau = t[active]
            s[active] = np.sin(2.0 * np.pi * (self.sweep.f0 * tau + 0.5 * self.sweep.rate * tau * tau))
            return s
        for t_on, t_off, f in self.stepped.schedule():
            active = (t >= t_on) & (t < t_off)
            s[active] = np.sin(2.0 * np.pi * f * (t[active] - t_on))
        return s

    def scaled(self, factor: float) -> "ExcitationProgram":
        """Same program with every force amplitude multiplied by factor."""
        pts = tuple(
            ForcePoint(fp.id, fp.location, fp.direction, fp.amplitude * factor)
            for fp in self.force_points
        )
        return ExcitationProgram(
            kind=self.kind, force_points=pts, stepped=self.stepped,
            sweep=self.sweep, dof_excited=self.dof_excited, name=self.name,
        )


def force_timeseries(program: ExcitationProgram, fs: float, duration: float | None = None) -> TimeSeriesSet:
    """Per-actuator applied force records in kN at the controller rate."""
    if duration is None:
        duration = program.duration
    n = int(round(duration * fs)) + 1
    t = np.arange(n) / fs
    s = program.drive(t)
    series = tuple(
        TimeSeries(0.0, fs, fp.amplitude * 1e-3 * s, "kN", fp.id)
        for fp in program.force_points
    )
    return TimeSeriesSet(series)


def load_program(source) -> ExcitationProgram:
    if isinstance(source, (str, bytes)):
        doc = json.loads(source)
    else:
        doc = json.load(source)
    try:
        points = tuple(
            ForcePoint(
                id=fp["id"],
                location=np.asarray(fp["location"], dtype=float),
                direction=np.asarray(fp["direction"], dtype=float),
                amplitude=float(fp["amplitude_n"]),
            )
            for fp in doc["force_points"]
        )
        stepped = None
        sweep = None
        if "stepped" in doc:
            sp = doc["stepped"]
            stepped = SteppedSpec(
                frequencies=tuple(sp["frequencies"]),
                duration_per_step=sp.get("duration_per_step"),
                cycles_per_step=sp.get("cycles_per_step"),
                rest_gap=float(sp.get("rest_gap", 5.0)),
            )
        if "sweep" in doc:
            sw = doc["sweep"]
            sweep = SweepSpec(f0=float(sw["f0"]), f1=float(sw["f1"]), rate=float(sw["rate"]))
        return ExcitationProgram(
            kind=doc["kind"],
            force_points=points,
            stepped=stepped,
            sweep=sweep,
            dof_excited=doc.get("dof_excited", "X"),
            name=doc.get("name", "program"),
        )
    except (KeyError, TypeError, ValueError) as exc:
        raise ConfigError(f"bad program document: {exc}") from exc


def dump_program(program: ExcitationProgram) -> str:
    doc: dict = {
        "kind": program.kind,
        "name": program.name,
        "dof_excited": program.dof_excited,
        "force_points": [
            {
                "id": fp.id,
                "location": fp.location.tolist(),
                "direction": fp.direction.tolist(),
                "amplitude_n": fp.amplitude,
            }
            for fp in program.force_points
        ],
    }
    if program.stepped is not None:
        doc["stepped"] = {
            "frequencies": list(program.stepped.frequencies),
            "rest_gap": program.stepped.rest_gap,
        }
        if program.stepped.duration_per_step is not None:
            doc["stepped"]["duration_per_step"] = program.stepped.duration_per_step
        else:
            doc["stepped"]["cycles_per_step"] = program.stepped.cycles_per_step
    if program.sweep is not None:
        doc["sweep"] = {"f0": program.sweep.f0, "f1": program.sweep.f1, "rate": program.sweep.rate}
    return json.dumps(doc, indent=1, sort_keys=True)
