"""Signal conditioning and sinusoidal parameter estimation.

Band-pass Butterworth design (bilinear transform with pre-warping,
realized as second-order sections), zero-phase filtering, steady-state
window selection, the three-stage sine least-squares fit, and removal of
a dominant low-frequency component.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np
from scipy import signal as sps

from .errors import DesignError, FilterError, FitError, WindowError
from .timeseries import TimeSeries

GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0


@dataclass(frozen=True)
class FilterCoefficients:
    """Band-pass IIR filter: expanded polynomials plus the SOS realization.

    ``b``/``a`` have length 2n+1 for an order-n request; filtering always
    runs on the second-order sections, the polynomials exist for export
    and cross-implementation comparison.
    """

    b: np.ndarray
    a: np.ndarray
    sos: np.ndarray
    design: dict

    @property
    def order(self) -> int:
        return int(self.design["order"])

    @property
    def pad_len(self) -> int:
        return 3 * (2 * self.order + 1)

    def to_json(self) -> str:
        return json.dumps(
            {"b": self.b.tolist(), "a": self.a.tolist(), "design": self.design},
            sort_keys=True,
        )


@dataclass(frozen=True)
class SineFit:
    """u(t) = amplitude * sin(omega * t + phase), t absolute seconds."""

    amplitude: float
    omega: float            # rad/s
    phase: float            # rad, wrapped to (-pi, pi]
    residual_rms: float
    window: tuple[float, float]

    @property
    def frequency(self) -> float:
        return self.omega / (2.0 * math.pi)

    @property
    def phasor(self) -> complex:
        """Complex amplitude: u(t) = Im(phasor * exp(i*omega*t))."""
        return self.amplitude * np.exp(1j * self.phase)

    def evaluate(self, t: np.ndarray) -> np.ndarray:
        return self.amplitude * np.sin(self.omega * t + self.phase)


def design_bandpass(order: int, f_low: float, f_high: float, fs: float) -> FilterCoefficients:
    """Butterworth band-pass with -3 dB corners at f_low and f_high."""
    if order < 1:
        raise DesignError("order must be >= 1")
    if not 0.0 < f_low < f_high:
        raise DesignError(f"need 0 < f_low < f_high, got {f_low}, {f_high}")
    if f_high >= fs / 2.0:
        raise DesignError(f"corner {f_high} Hz at or above Nyquist {fs / 2.0} Hz")
    sos = sps.butter(order, [f_low, f_high], btype="bandpass", fs=fs, output="sos")
    b, a = sps.sos2tf(sos)
    return FilterCoefficients(
        b=b,
        a=a,
        sos=sos,
        design={"order": order, "f_low": f_low, "f_high": f_high, "fs": fs},
    )


def filter_gain(coeffs: FilterCoefficients, freqs) -> np.ndarray:
    """|H(f)| of the single-pass filter, evaluated from the sections."""
    freqs = np.atleast_1d(np.asarray(freqs, dtype=float))
    _, h = sps.sosfreqz(coeffs.sos, worN=freqs, fs=coeffs.design["fs"])
    return np.abs(h)


def filtfilt(coeffs: FilterCoefficients, ts: TimeSeries) -> TimeSeries:
    """Forward-backward zero-phase filtering; effective magnitude |H|^2.

    Odd (reflective) edge padding of length 3*(2n+1) is applied and
    removed, so the output has the input's length and timestamps.
    """
    if ts.sample_rate != coeffs.design["fs"]:
        raise FilterError(
            f"series rate {ts.sample_rate} Hz does not match design rate {coeffs.design['fs']} Hz"
        )
    if len(ts) <= coeffs.pad_len:
        raise FilterError(f"series length {len(ts)} <= padding requirement {coeffs.pad_len}")
    y = sps.sosfiltfilt(coeffs.sos, ts.values, padtype="odd", padlen=coeffs.pad_len)
    return ts.with_values(y)


@dataclass(frozen=True)
class WindowPolicy:
    skip_cycles: float = 10.0
    max_len: float = 40.0   # seconds; use ~2 s windows for sweep data

    #: minimum usable window, in cycles of the forcing frequency
    min_cycles: float = 3.0


def extract_steady_window(ts: TimeSeries, f_force: float, policy: WindowPolicy = WindowPolicy()) -> tuple[float, float]:
    """Bounds [t0, t1] that skip the transient and cap the window length."""
    if f_force <= 0:
        raise WindowError("forcing frequency must be positive")
    t0 = ts.start_time + policy.skip_cycles / f_force
    t1 = min(ts.end_time, t0 + policy.max_len)
    if (t1 - t0) * f_force < policy.min_cycles:
        raise WindowError(
            f"only {(t1 - t0) * f_force:.2f} cycles left after skipping "
            f"{policy.skip_cycles} transient cycles at {f_force} Hz"
        )
    return (t0, t1)


def _linear_fit(t: np.ndarray, u: np.ndarray, omega: float) -> tuple[float, float, float]:
    """LSF of a*sin(wt) + b*cos(wt); returns (amplitude, phase, sse).

    Normal equations in closed form: the 2x2 system is well conditioned for
    any window covering a few cycles.
    """
    s = np.sin(omega * t)
    c = np.cos(omega * t)
    ss = s @ s
    cc = c @ c
    sc = s @ c
    su = s @ u
    cu = c @ u
    det = ss * cc - sc * sc
    if det <= 1e-12 * max(ss * cc, 1e-300):
        g = np.column_stack([s, c])
        coef, *_ = np.linalg.lstsq(g, u, rcond=None)
        a, b = float(coef[0]), float(coef[1])
    else:
        a = (cc * su - sc * cu) / det
        b = (ss * cu - sc * su) / det
    r = u - a * s - b * c
    return float(np.hypot(a, b)), float(math.atan2(b, a)), float(r @ r)


def _wrap_phase(phi: float) -> float:
    """Wrap to (-pi, pi]."""
    out = math.remainder(phi, 2.0 * math.pi)
    if out <= -math.pi:
        out += 2.0 * math.pi
    return out


def fit_sine(ts: TimeSeries, f_init: float, max_iter: int = 100) -> SineFit:
    """Fit amplitude/frequency/phase of a single sinusoid.

    Three stages: (i) linear fit of the in-phase/quadrature pair at the
    initial frequency, (ii) golden-section refinement of the frequency
    over +-10 % re-solving the linear problem, (iii) Gauss-Newton polish
    on all three parameters.  The reported residual never exceeds the
    stage-(i) residual.
    """
    if f_init <= 0:
        raise FitError("initial frequency must be positive")
    t = ts.times()
    u = ts.values
    if (t[-1] - t[0]) * f_init < 3.0:
        raise FitError(f"window covers {(t[-1] - t[0]) * f_init:.2f} cycles of {f_init} Hz; need >= 3")

    w0 = 2.0 * math.pi * f_init

    # stage (i): linear fit at the commanded frequency
    amp, phase, sse = _linear_fit(t, u, w0)
    best = (amp, w0, phase, sse)

    if amp > 0.0:
        # stage (ii): golden-section search on omega in +-10 %
        lo, hi = 0.9 * w0, 1.1 * w0
        x1 = hi - GOLDEN * (hi - lo)
        x2 = lo + GOLDEN * (hi - lo)
        f1 = _linear_fit(t, u, x1)
        f2 = _linear_fit(t, u, x2)
        for _ in range(60):
            if f1[2] < f2[2]:
                hi, x2, f2 = x2, x1, f1
                x1 = hi - GOLDEN * (hi - lo)
                f1 = _linear_fit(t, u, x1)
            else:
                lo, x1, f1 = x1, x2, f2
                x2 = lo + GOLDEN * (hi - lo)
                f2 = _linear_fit(t, u, x2)
            if hi - lo < 1e-6 * w0:
                break  # the Gauss-Newton polish finishes the refinement
        for w, (a, p, s) in ((x1, f1), (x2, f2)):
            if s < best[3]:
                best = (a, w, p, s)

        # stage (iii): Gauss-Newton on (A, w, phi) with step halving
        a, w, p, sse = best
        params = np.array([a, w, p])
        converged = False
        for _ in range(max_iter):
            theta = params[1] * t + params[2]
            sin_t = np.sin(theta)
            cos_t = np.cos(theta)
            r = u - params[0] * sin_t
            jac = np.column_stack([sin_t, params[0] * t * cos_t, params[0] * cos_t])
            try:
                step, *_ = np.linalg.lstsq(jac, r, rcond=None)
            except np.linalg.LinAlgError:
                break
            # halve until the residual improves (keeps refinement monotone)
            improved = False
            for _ in range(30):
                trial = params + step
                rt = u - trial[0] * np.sin(trial[1] * t + trial[2])
                sse_t = float(rt @ rt)
                if sse_t <= sse:
                    improved = sse - sse_t > 1e-12 * max(sse, 1e-300)
                    params, sse = trial, sse_t
                    break
                step = step / 2.0
            # parameter scales: amplitude/frequency relative, phase in radians
            scale = np.array([max(abs(params[0]), 1e-300), abs(params[1]), 1.0])
            if np.max(np.abs(step) / scale) < 1e-13:
                converged = True
                break
            if not improved:
                converged = True
                break
        a, w, p = params
        if a < 0.0:
            a, p = -a, p + math.pi
        if w < 0.0:
            w, p = -w, -p + math.pi  # sin(-wt+phi) = sin(wt + pi - phi)
        best = (float(a), float(w), float(p), sse)
        if not converged:
            raise FitError(
                f"no convergence after {max_iter} Gauss-Newton iterations",
                best=SineFit(
                    amplitude=best[0],
                    omega=best[1],
                    phase=_wrap_phase(best[2]),
                    residual_rms=math.sqrt(best[3] / len(u)),
                    window=(float(t[0]), float(t[-1])),
                ),
            )

    amp, w, phase, sse = best
    return SineFit(
        amplitude=amp,
        omega=w,
        phase=_wrap_phase(phase),
        residual_rms=math.sqrt(sse / len(u)),
        window=(float(t[0]), float(t[-1])),
    )


@dataclass(frozen=True)
class LowFreqRemoval:
    """Outcome of subtract_low_freq; ``removed`` is False when no clear
    sub-cutoff peak exists and the series is returned unchanged."""

    series: TimeSeries
    removed: bool
    component: SineFit | None = None


def _dominant_low_freq(ts: TimeSeries, f_cut: float) -> float | None:
    """Frequency of the strongest sub-cutoff spectral peak, if it clears
    3x the spectral noise floor; Hann window keeps leakage from strong
    in-band tones out of the low bins."""
    x = ts.values - np.mean(ts.values)
    win = np.hanning(len(x))
    spec = np.abs(np.fft.rfft(x * win))
    freqs = np.fft.rfftfreq(len(x), d=1.0 / ts.sample_rate)
    sel = (freqs > 0.0) & (freqs < f_cut)
    if not np.any(sel):
        return None
    floor = np.median(spec[1:])
    peak_idx = np.argmax(np.where(sel, spec, -np.inf))
    peak = spec[peak_idx]
    if peak <= 3.0 * floor or peak < 1e-3 * np.max(spec):
        return None
    return float(freqs[peak_idx])


def subtract_low_freq(ts: TimeSeries, f_cut: float) -> LowFreqRemoval:
    """Fit and remove the dominant component below f_cut, if any."""
    if f_cut <= 0:
        raise ValueError("f_cut must be positive")
    f_low = _dominant_low_freq(ts, f_cut)
    if f_low is None:
        return LowFreqRemoval(ts, removed=False)
    if (ts.end_time - ts.start_time) * f_low < 3.0:
        return LowFreqRemoval(ts, removed=False)
    fit = fit_sine(ts, f_low)
    cleaned = ts.with_values(ts.values - fit.evaluate(ts.times()))
    return LowFreqRemoval(cleaned, removed=True, component=fit)
