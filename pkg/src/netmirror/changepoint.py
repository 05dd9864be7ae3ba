"""Rolling anomaly scans over a 1-D trace.

Two causal detectors over a trailing window of w points: the sigmage
(deviation from the window mean in units of the window's sample standard
deviation) and an ordinary-least-squares prediction band (deviation from
the line fit to the window, in units of the fit's residual standard
error). Reports start at the first index with a full lookback window.
"""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass

import numpy as np

from .errors import DataError
from .mirror import IsomapTrace

_SD_FLOOR = 1e-12


@dataclass(frozen=True)
class SigmagePoint:
    time: float
    sigmage: float
    window_mean: float
    window_sd: float
    flag: bool


@dataclass(frozen=True)
class SigmageReport:
    points: tuple[SigmagePoint, ...]
    window: int
    threshold: float

    def flagged_times(self) -> list[float]:
        return [p.time for p in self.points if p.flag]


@dataclass(frozen=True)
class RegressionBandPoint:
    time: float
    observed: float
    predicted: float
    half_width: float
    flag: bool


@dataclass(frozen=True)
class RegressionBandReport:
    points: tuple[RegressionBandPoint, ...]
    window: int
    multiplier: float

    def flagged_times(self) -> list[float]:
        return [p.time for p in self.points if p.flag]


def sigmage_scan(trace: IsomapTrace, w: int = 5, threshold: float = 5.0) -> SigmageReport:
    """Flag points whose sigmage over the previous w values exceeds the threshold.

    The denominator is the sample standard deviation (divisor w - 1) of the
    window values. A degenerate window (sd below 1e-12) maps to sigmage
    +inf and a flag whenever the deviation itself is nonzero beyond 1e-12,
    and to sigmage 0 otherwise.
    """
    if w < 2:
        raise DataError("window must be at least 2")
    x = np.asarray(trace.values, dtype=np.float64)
    if x.size <= w:
        raise DataError(f"trace has {x.size} points, need more than w={w}")
    points = []
    for i in range(w, x.size):
        window = x[i - w : i]
        mu = float(window.mean())
        sd = float(window.std(ddof=1))
        dev = abs(x[i] - mu)
        if sd < _SD_FLOOR:
            if dev > _SD_FLOOR:
                s, flag = float("inf"), True
            else:
                s, flag = 0.0, False
        else:
            s = dev / sd
            flag = s > threshold
        points.append(
            SigmagePoint(
                time=float(trace.grid.times[i]),
                sigmage=s,
                window_mean=mu,
                window_sd=sd,
                flag=flag,
            )
        )
    return SigmageReport(points=tuple(points), window=w, threshold=threshold)


def regression_band_scan(
    trace: IsomapTrace, w: int = 5, multiplier: float = 5.0
) -> RegressionBandReport:
    """Flag points leaving the extrapolated OLS band of the previous w values.

    The band half-width is `multiplier` times the residual standard error
    (divisor w - 2) of the window fit. A near-zero residual error shrinks
    the band to the 1e-12 floor and flags any deviation above 1e-9.
    """
    if w < 3:
        raise DataError("window must be at least 3")
    x = np.asarray(trace.values, dtype=np.float64)
    t = np.asarray(trace.grid.times, dtype=np.float64)
    if x.size <= w:
        raise DataError(f"trace has {x.size} points, need more than w={w}")
    points = []
    for i in range(w, x.size):
        tw = t[i - w : i]
        xw = x[i - w : i]
        slope, intercept = np.polyfit(tw, xw, 1)
        resid = xw - (slope * tw + intercept)
        se = float(np.sqrt((resid**2).sum() / (w - 2)))
        predicted = float(slope * t[i] + intercept)
        dev = abs(x[i] - predicted)
        if se < _SD_FLOOR:
            half = max(_SD_FLOOR, multiplier * _SD_FLOOR)
            flag = dev > 1e-9
        else:
            half = multiplier * se
            flag = dev > half
        points.append(
            RegressionBandPoint(
                time=float(t[i]),
                observed=float(x[i]),
                predicted=predicted,
                half_width=half,
                flag=flag,
            )
        )
    return RegressionBandReport(points=tuple(points), window=w, multiplier=multiplier)


def write_report_json(report: SigmageReport | RegressionBandReport, path) -> None:
    """Per-time records plus a config echo."""
    if isinstance(report, SigmageReport):
        config = {"kind": "sigmage", "window": report.window, "threshold": report.threshold}
    else:
        config = {"kind": "regression_band", "window": report.window, "multiplier": report.multiplier}
    records = []
    for p in report.points:
        rec = asdict(p)
        # keep the payload strict JSON; infinities only arise from the
        # degenerate-window sentinel
        for key, val in rec.items():
            if isinstance(val, float) and not np.isfinite(val):
                rec[key] = "inf"
        records.append(rec)
    payload = {"config": config, "points": records}
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")
