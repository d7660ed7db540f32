"""CPT shear-wave-velocity correlations and bearing-capacity checks.

Three empirical correlations (sleeve-friction, cone-resistance-plus-SBT,
and stress-normalized forms) are averaged per depth; the bearing model is
linear in depth with a cap.  All stresses in kPa, velocities in m/s.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError, GeometryError

PA_KPA = 101.325

#: capacity at the surface, gain per meter of depth, and the cap (kPa)
BEARING_SURFACE = 191.0
BEARING_PER_M = 157.0
BEARING_CAP = 479.0


def vs_mayne(fs: float) -> float:
    """Sleeve-friction correlation, log base 10."""
    if fs <= 0:
        raise DomainError(f"sleeve friction must be positive, got {fs}")
    return 118.8 * math.log10(fs) + 18.5


def vs_andrus(
    qt: float,
    ic: float,
    depth: float,
    sf: float = 1.0,
    a: float = 1.0,
    multiplicative: bool = False,
) -> float:
    """Cone-resistance correlation with SBT and depth terms.

    The default additive form follows the printed equation; the
    multiplicative variant is available for sensitivity studies.
    """
    if qt <= 0 or ic <= 0 or depth <= 0:
        raise DomainError("qt, Ic and depth must all be positive")
    if multiplicative:
        return 2.62 * qt**0.395 * ic**0.912 * depth**0.124 * sf**a
    return 2.62 * qt**0.395 + ic**0.912 * depth**0.124 * sf**a


def vs_robertson(qt: float, sigma_v: float, ic: float) -> float:
    """Stress-normalized correlation: sqrt(10^(0.55 Ic + 1.68) (qt - sv) / Pa)."""
    if qt <= sigma_v:
        raise DomainError(f"need qt > sigma_v, got qt={qt}, sigma_v={sigma_v}")
    return math.sqrt(10 ** (0.55 * ic + 1.68) * (qt - sigma_v) / PA_KPA)


@dataclass(frozen=True)
class CptSounding:
    """Per-depth CPT record, already reduced to qt/fs/sigma_v/Ic."""

    depth: np.ndarray        # m, strictly increasing
    qt: np.ndarray           # kPa
    fs: np.ndarray           # kPa
    sigma_v: np.ndarray      # kPa
    ic: np.ndarray           # dimensionless SBT index
    sf: float = 1.0          # age scaling factor (not pinned by the source data)
    a: float = 1.0

    def __post_init__(self):
        arrays = {}
        n = None
        for name in ("depth", "qt", "fs", "sigma_v", "ic"):
            arr = np.atleast_1d(np.asarray(getattr(self, name), dtype=float))
            if n is None:
                n = arr.size
            elif arr.size != n:
                raise ValueError("all sounding columns must have equal length")
            arr.flags.writeable = False
            arrays[name] = arr
        if np.any(np.diff(arrays["depth"]) <= 0):
            raise ValueError("depths must be strictly increasing")
        for name, arr in arrays.items():
            object.__setattr__(self, name, arr)

    def __len__(self) -> int:
        return int(self.depth.size)


@dataclass(frozen=True)
class VsProfileRow:
    depth: float
    vs_mayne: float | None
    vs_andrus: float | None
    vs_robertson: float | None
    vs_avg: float | None
    gap: bool


def vs_average(sounding: CptSounding, multiplicative: bool = False) -> list[VsProfileRow]:
    """Arithmetic mean of the three correlations per depth; depths where any
    correlation is out of domain come back gap-flagged instead of failing."""
    rows = []
    for i in range(len(sounding)):
        vals: dict[str, float | None] = {}
        try:
            vals["m"] = vs_mayne(float(sounding.fs[i]))
        except DomainError:
            vals["m"] = None
        try:
            vals["a"] = vs_andrus(
                float(sounding.qt[i]), float(sounding.ic[i]), float(sounding.depth[i]),
                sounding.sf, sounding.a, multiplicative,
            )
        except DomainError:
            vals["a"] = None
        try:
            vals["r"] = vs_robertson(
                float(sounding.qt[i]), float(sounding.sigma_v[i]), float(sounding.ic[i])
            )
        except DomainError:
            vals["r"] = None
        gap = any(v is None for v in vals.values())
        avg = None if gap else (vals["m"] + vals["a"] + vals["r"]) / 3.0
        rows.append(
            VsProfileRow(
                depth=float(sounding.depth[i]),
                vs_mayne=vals["m"],
                vs_andrus=vals["a"],
                vs_robertson=vals["r"],
                vs_avg=avg,
                gap=gap,
            )
        )
    return rows


def bearing_capacity(depth: float) -> float:
    """191 kPa at the surface plus 157 kPa per meter, capped at 479 kPa."""
    if depth < 0:
        raise DomainError(f"depth must be non-negative, got {depth}")
    return min(BEARING_SURFACE + BEARING_PER_M * depth, BEARING_CAP)


@dataclass(frozen=True)
class Footprint:
    length: float            # m
    width: float             # m
    excluded_area: float = 0.0   # m^2, e.g. the central shear key

    @property
    def net_area(self) -> float:
        return self.length * self.width - self.excluded_area


#: reaction-mass base with the central shear key excluded; the key's plan
#: area is not published, 20 m^2 is the configured default
REACTION_MASS_FOOTPRINT = Footprint(length=33.12, width=16.91, excluded_area=20.0)


def bearing_utilization(total_force_kn: float, footprint: Footprint, depth: float) -> float:
    """Applied stress as a percentage of the bearing capacity at depth."""
    area = footprint.net_area
    if area <= 0:
        raise GeometryError(f"non-positive net area {area} m^2")
    stress = total_force_kn / area
    return 100.0 * stress / bearing_capacity(depth)


def parse_cpt_csv(text: str) -> CptSounding:
    """CSV columns: depth_m, qt_kpa, fs_kpa, sigma_v_kpa, ic."""
    from .errors import ParseError

    rows = []
    header = None
    for lineno, line in enumerate(text.splitlines(), start=1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        cells = [c.strip() for c in line.split(",")]
        if header is None:
            header = cells
            continue
        if len(cells) != 5:
            raise ParseError(f"row {lineno}: expected 5 cells, got {len(cells)}", row=lineno)
        try:
            rows.append([float(c) for c in cells])
        except ValueError:
            raise ParseError(f"row {lineno}: unparsable cell", row=lineno) from None
    expected = ["depth_m", "qt_kpa", "fs_kpa", "sigma_v_kpa", "ic"]
    if header != expected:
        raise ParseError(f"CPT header must be {expected}, got {header}")
    if not rows:
        raise ParseError("no CPT rows")
    data = np.array(rows)
    return CptSounding(
        depth=data[:, 0], qt=data[:, 1], fs=data[:, 2], sigma_v=data[:, 3], ic=data[:, 4]
    )


def vs_profile_csv(rows: list[VsProfileRow]) -> str:
    def fmt(v):
        return "" if v is None else repr(v)

    lines = ["depth_m,vs_mayne,vs_andrus,vs_robertson,vs_avg,gap_flag"]
    for r in rows:
        lines.append(
            f"{r.depth!r},{fmt(r.vs_mayne)},{fmt(r.vs_andrus)},"
            f"{fmt(r.vs_robertson)},{fmt(r.vs_avg)},{int(r.gap)}"
        )
    return "\n".join(lines) + "\n"
