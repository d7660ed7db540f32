"""Multi-channel, multi-rate time series: data model, CSV ingestion, alignment.

CSV layout: first column ``t`` in seconds, remaining columns are channel
labels; ``#`` lines are comments.  Timestamps must be uniform; the sample
rate is inferred from the median delta.
"""

from __future__ import annotations

import io
import json
from dataclasses import dataclass, field, replace

import numpy as np

from .errors import (
    AlignmentError,
    ConfigError,
    ParseError,
    SpacingError,
    WindowError,
)

#: relative tolerance on timestamp spacing uniformity
SPACING_RTOL = 1e-6


def _freeze(arr: np.ndarray) -> np.ndarray:
    arr = np.ascontiguousarray(arr, dtype=float)
    arr.flags.writeable = False
    return arr


@dataclass(frozen=True)
class TimeSeries:
    """Uniformly sampled single-channel record.

    ``start_time`` is an offset in seconds from the record epoch; sample i
    lives at ``start_time + i / sample_rate``.
    """

    start_time: float
    sample_rate: float
    values: np.ndarray
    unit: str = "1"
    label: str = ""

    def __post_init__(self):
        if self.sample_rate <= 0:
            raise ValueError("sample_rate must be positive")
        object.__setattr__(self, "values", _freeze(np.atleast_1d(self.values)))
        if self.values.size == 0:
            raise ValueError("values must not be empty")

    def __len__(self) -> int:
        return int(self.values.size)

    @property
    def duration(self) -> float:
        """(len - 1) / sample_rate, exactly."""
        return (len(self) - 1) / self.sample_rate

    @property
    def end_time(self) -> float:
        return self.start_time + self.duration

    def times(self) -> np.ndarray:
        return self.start_time + np.arange(len(self)) / self.sample_rate

    def with_values(self, values: np.ndarray, unit: str | None = None) -> "TimeSeries":
        return replace(self, values=values, unit=self.unit if unit is None else unit)


@dataclass(frozen=True)
class TimeSeriesSet:
    """Channels sharing one start time and sample rate."""

    series: tuple[TimeSeries, ...]

    def __post_init__(self):
        if not self.series:
            raise ValueError("empty channel set")
        t0 = self.series[0].start_time
        fs = self.series[0].sample_rate
        n = len(self.series[0])
        for ts in self.series[1:]:
            if ts.start_time != t0 or ts.sample_rate != fs or len(ts) != n:
                raise ValueError("channels must share start_time, rate and length")
        object.__setattr__(self, "series", tuple(self.series))

    def __iter__(self):
        return iter(self.series)

    def __len__(self):
        return len(self.series)

    @property
    def start_time(self) -> float:
        return self.series[0].start_time

    @property
    def sample_rate(self) -> float:
        return self.series[0].sample_rate

    @property
    def labels(self) -> tuple[str, ...]:
        return tuple(ts.label for ts in self.series)

    def __getitem__(self, label: str) -> TimeSeries:
        for ts in self.series:
            if ts.label == label:
                return ts
        raise KeyError(label)

    def times(self) -> np.ndarray:
        return self.series[0].times()


@dataclass(frozen=True)
class Station:
    """Sensor location and the three directions it measures."""

    id: str
    position: np.ndarray          # meters, relative to the reference point P0
    axes: np.ndarray              # rows are unit measurement directions

    def __post_init__(self):
        pos = _freeze(np.asarray(self.position, dtype=float).reshape(3))
        axes = np.asarray(self.axes, dtype=float).reshape(3, 3)
        norms = np.linalg.norm(axes, axis=1)
        if not np.allclose(norms, 1.0, atol=1e-9):
            raise ValueError(f"station {self.id}: measurement axes must be unit vectors")
        object.__setattr__(self, "position", pos)
        object.__setattr__(self, "axes", _freeze(axes))


@dataclass(frozen=True)
class SensorLayout:
    """Station positions plus named station groups (T1, B2, ...)."""

    stations: tuple[Station, ...]
    groups: dict[str, tuple[str, ...]] = field(default_factory=dict)

    def __post_init__(self):
        ids = [s.id for s in self.stations]
        if len(set(ids)) != len(ids):
            raise ValueError("station ids must be unique")
        known = set(ids)
        for name, members in self.groups.items():
            for sid in members:
                if sid not in known:
                    raise ValueError(f"group {name} references unknown station {sid}")
        object.__setattr__(self, "stations", tuple(self.stations))
        object.__setattr__(self, "groups", {k: tuple(v) for k, v in self.groups.items()})

    def station(self, sid: str) -> Station:
        for s in self.stations:
            if s.id == sid:
                return s
        raise KeyError(sid)


@dataclass(frozen=True)
class AlignedRecord:
    """Response channels plus force channels resampled onto the response timebase."""

    response: TimeSeriesSet
    force: TimeSeriesSet
    metadata: dict = field(default_factory=dict)


def _parse_rows(rows: list[str], row_idx: list[int], ncol: int) -> np.ndarray:
    """Bulk-convert data lines; on any defect, re-scan to report the exact row."""
    try:
        data = np.loadtxt(io.StringIO("\n".join(rows)), delimiter=",", ndmin=2)
        if data.shape[1] != ncol:
            raise ValueError("column count mismatch")
    except ValueError:
        data = np.empty((len(rows), ncol))
        for i, (line, lineno) in enumerate(zip(rows, row_idx)):
            cells = [c.strip() for c in line.split(",")]
            if len(cells) != ncol:
                raise ParseError(
                    f"row {lineno}: expected {ncol} cells, got {len(cells)}", row=lineno
                ) from None
            for j, cell in enumerate(cells):
                try:
                    data[i, j] = float(cell)
                except ValueError:
                    raise ParseError(f"row {lineno}: cannot parse {cell!r}", row=lineno) from None
    if np.isnan(data).any():
        bad = int(np.argwhere(np.isnan(data))[0][0])
        raise ParseError(f"row {row_idx[bad]}: NaN cell", row=row_idx[bad])
    return data


def parse_timeseries_csv(text, units: dict[str, str] | None = None) -> TimeSeriesSet:
    """Parse a CSV stream into one TimeSeries per data column.

    ``units`` optionally maps column labels to physical units; a
    ``# units: a=kN,b=m/s^2`` comment line in the file serves the same
    purpose (explicit argument wins).
    """
    if isinstance(text, str):
        text = io.StringIO(text)
    file_units: dict[str, str] = {}
    header: list[str] | None = None
    rows: list[str] = []
    row_idx: list[int] = []
    for lineno, raw in enumerate(text, start=1):
        line = raw.strip()
        if not line:
            continue
        if line.startswith("#"):
            body = line[1:].strip()
            if body.startswith("units:"):
                for pair in body[len("units:"):].split(","):
                    if "=" in pair:
                        k, v = pair.split("=", 1)
                        file_units[k.strip()] = v.strip()
            continue
        if header is None:
            header = [c.strip() for c in line.split(",")]
            continue
        rows.append(line)
        row_idx.append(lineno)

    if header is None or len(header) < 2:
        raise ParseError("header row must name the time column and at least one data column")
    if header[0] != "t":
        raise ParseError(f"first column must be 't', got {header[0]!r}")
    if not rows:
        raise ParseError("no data rows")

    ncol = len(header)
    data = _parse_rows(rows, row_idx, ncol)

    t = data[:, 0]
    if len(t) < 2:
        raise ParseError("need at least two samples to infer the sample rate")
    dt = np.diff(t)
    if np.any(dt <= 0):
        bad = int(np.argmax(dt <= 0))
        raise SpacingError(f"row {row_idx[bad + 1]}: timestamps not increasing", row=row_idx[bad + 1])
    dt_med = float(np.median(dt))
    if np.any(np.abs(dt - dt_med) > SPACING_RTOL * dt_med):
        bad = int(np.argmax(np.abs(dt - dt_med) > SPACING_RTOL * dt_med))
        raise SpacingError(
            f"row {row_idx[bad + 1]}: non-uniform spacing "
            f"(dt={dt[bad]:.9g} vs median {dt_med:.9g})",
            row=row_idx[bad + 1],
        )
    rate = 1.0 / dt_med
    # snap to an integer rate when the inferred value is within spacing tolerance
    if abs(rate - round(rate)) < SPACING_RTOL * rate:
        rate = float(round(rate))

    units = {**file_units, **(units or {})}
    series = tuple(
        TimeSeries(
            start_time=float(t[0]),
            sample_rate=rate,
            values=data[:, j],
            unit=units.get(header[j], "1"),
            label=header[j],
        )
        for j in range(1, ncol)
    )
    return TimeSeriesSet(series)


def serialize_timeseries_csv(tss: TimeSeriesSet) -> str:
    """Inverse of :func:`parse_timeseries_csv`; round-trips values bit-exactly."""
    units = ",".join(f"{ts.label}={ts.unit}" for ts in tss)
    lines = [f"# units: {units}"]
    lines.append(",".join(["t", *tss.labels]))
    t = tss.times()
    cols = [ts.values for ts in tss]
    for i in range(len(t)):
        lines.append(",".join([repr(float(t[i]))] + [repr(float(c[i])) for c in cols]))
    return "\n".join(lines) + "\n"


def synchronize(response: TimeSeriesSet, force: TimeSeriesSet, metadata: dict | None = None) -> AlignedRecord:
    """Linearly interpolate force channels onto the response timebase.

    The response is restricted to the overlap window and left otherwise
    untouched; force content is far below its Nyquist so linear
    interpolation is effectively exact.
    """
    t0 = max(response.start_time, force.start_time)
    t1 = min(response.series[0].end_time, force.series[0].end_time)
    if t1 - t0 <= 1.0:
        raise AlignmentError(f"streams overlap for {max(t1 - t0, 0.0):.3f} s; need > 1 s")

    resp_t = response.times()
    keep = (resp_t >= t0 - 1e-12) & (resp_t <= t1 + 1e-12)
    if not np.any(keep):
        raise AlignmentError("no response samples inside the overlap window")
    first = int(np.argmax(keep))
    resp_cut = tuple(
        TimeSeries(float(resp_t[first]), response.sample_rate, ts.values[keep], ts.unit, ts.label)
        for ts in response
    )
    grid = resp_t[keep]
    force_t = force.times()
    force_rs = tuple(
        TimeSeries(
            float(grid[0]),
            response.sample_rate,
            np.interp(grid, force_t, ts.values),
            ts.unit,
            ts.label,
        )
        for ts in force
    )
    return AlignedRecord(TimeSeriesSet(resp_cut), TimeSeriesSet(force_rs), dict(metadata or {}))


def extract_window(ts: TimeSeries, t0: float, t1: float) -> TimeSeries:
    """Samples with timestamps in [t0, t1]; start_time updated."""
    if not t0 < t1:
        raise WindowError(f"empty window [{t0}, {t1}]")
    t = ts.times()
    keep = (t >= t0 - 1e-12) & (t <= t1 + 1e-12)
    if not np.any(keep):
        raise WindowError(f"window [{t0}, {t1}] selects no samples from [{ts.start_time}, {ts.end_time}]")
    first = int(np.argmax(keep))
    return TimeSeries(float(t[first]), ts.sample_rate, ts.values[keep], ts.unit, ts.label)


def load_layout(source) -> SensorLayout:
    """Read a sensor layout document: {stations: [{id, pos, axes?}], groups: {...}}."""
    if isinstance(source, (str, bytes)):
        doc = json.loads(source)
    else:
        doc = json.load(source)
    try:
        stations = tuple(
            Station(
                id=st["id"],
                position=np.asarray(st["pos"], dtype=float),
                axes=np.asarray(st.get("axes", np.eye(3).tolist()), dtype=float),
            )
            for st in doc["stations"]
        )
        groups = {name: tuple(members) for name, members in doc.get("groups", {}).items()}
    except (KeyError, TypeError, ValueError) as exc:
        raise ConfigError(f"bad layout document: {exc}") from exc
    return SensorLayout(stations, groups)


def dump_layout(layout: SensorLayout) -> str:
    doc = {
        "stations": [
            {"id": s.id, "pos": s.position.tolist(), "axes": s.axes.tolist()}
            for s in layout.stations
        ],
        "groups": {k: list(v) for k, v in layout.groups.items()},
    }
    return json.dumps(doc, indent=2, sort_keys=True)
