"""Experiment reports: deterministic CSV plus optional log-log SVG figures."""

from __future__ import annotations

import datetime
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Tuple

import numpy as np

from ..fitting import fit_loglog

__all__ = ["FitRecord", "CheckRecord", "ExperimentReport", "write_csv", "write_svg"]


@dataclass(frozen=True)
class FitRecord:
    """A fitted log-log slope with its predicted value and tolerance.

    x_col/y_col/group make the fit recomputable from the sample table alone:
    rows are filtered by group (column, value) when given.
    """

    label: str
    slope: float
    residual: float
    predicted: float
    tol: float
    source: str
    x_col: str
    y_col: str
    group: Optional[Tuple[str, str]] = None

    @property
    def passed(self) -> bool:
        return abs(self.slope - self.predicted) <= self.tol


@dataclass(frozen=True)
class CheckRecord:
    label: str
    value: float
    threshold: float
    passed: bool
    note: str = ""


@dataclass
class ExperimentReport:
    name: str
    config_echo: Dict[str, str]
    columns: List[str]
    rows: List[Dict[str, object]]
    fits: List[FitRecord] = field(default_factory=list)
    checks: List[CheckRecord] = field(default_factory=list)
    plot: Optional[Dict[str, str]] = None  # x, y, optional group column

    @property
    def passed(self) -> bool:
        return all(f.passed for f in self.fits) and all(c.passed for c in self.checks)

    def refit_from_rows(self, fit: FitRecord) -> float:
        """Recompute a fitted slope from the sample table (self-consistency)."""
        rows = self.rows
        if fit.group is not None:
            col, val = fit.group
            rows = [r for r in rows if str(r[col]) == str(val)]
        x = np.array([float(r[fit.x_col]) for r in rows])
        y = np.array([float(r[fit.y_col]) for r in rows])
        return fit_loglog(x, y).slope


def _fmt(v) -> str:
    if isinstance(v, float):
        return format(v, ".12g")
    if isinstance(v, complex):
        return f"{v.real:.12g}{v.imag:+.12g}j"
    return str(v)


def render_csv(report: ExperimentReport, timestamp: bool = True) -> str:
    lines = [f"# report: {report.name}"]
    if timestamp:
        now = datetime.datetime.now(datetime.timezone.utc)
        lines.append(f"# generated: {now.strftime('%Y-%m-%dT%H:%M:%SZ')}")
    cfg = " ".join(f"{k}={v}" for k, v in sorted(report.config_echo.items()))
    lines.append(f"# config: {cfg}")
    lines.append(",".join(report.columns))
    for row in report.rows:
        lines.append(",".join(_fmt(row.get(c, "")) for c in report.columns))
    for f in report.fits:
        lines.append(
            f"# fit: {f.label} slope={_fmt(f.slope)} predicted={_fmt(f.predicted)} "
            f"tol={_fmt(f.tol)} residual={_fmt(f.residual)} "
            f"source={f.source.replace(' ', '_')} verdict={'PASS' if f.passed else 'FAIL'}")
    for c in report.checks:
        lines.append(
            f"# check: {c.label} value={_fmt(c.value)} threshold={_fmt(c.threshold)} "
            f"verdict={'PASS' if c.passed else 'FAIL'}"
            + (f" note={c.note.replace(' ', '_')}" if c.note else ""))
    lines.append(f"# verdict: {'PASS' if report.passed else 'FAIL'}")
    return "\n".join(lines) + "\n"


def write_csv(report: ExperimentReport, path: str, timestamp: bool = True) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(render_csv(report, timestamp=timestamp))


def write_svg(report: ExperimentReport, path: str) -> bool:
    """Log-log scatter of the report's plot columns with fitted lines.

    Returns False when the report declares no plottable columns.
    """
    if report.plot is None or not report.rows:
        return False
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    xcol, ycol = report.plot["x"], report.plot["y"]
    gcol = report.plot.get("group")
    fig, ax = plt.subplots(figsize=(5.5, 4.0))
    groups: Dict[str, List[Tuple[float, float]]] = {}
    for r in report.rows:
        try:
            x, y = float(r[xcol]), float(r[ycol])
        except (KeyError, TypeError, ValueError):
            continue
        if x <= 0 or y <= 0:
            continue
        key = str(r.get(gcol, "")) if gcol else ""
        groups.setdefault(key, []).append((x, y))
    for key, pts in sorted(groups.items()):
        pts = np.array(pts)
        ax.loglog(pts[:, 0], pts[:, 1], "o", ms=4,
                  label=key if key else None)
    for f in report.fits:
        key = str(f.group[1]) if f.group else ""
        pts = groups.get(key)
        if not pts:
            continue
        xs = np.array([p[0] for p in pts])
        xs = np.array([xs.min(), xs.max()])
        c = np.exp(f.residual * 0.0)  # line through the fitted intercept
        ys = np.exp(f.slope * np.log(xs)) * np.exp(
            np.log(np.array([p[1] for p in pts])).mean()
            - f.slope * np.log(np.array([p[0] for p in pts])).mean())
        ax.loglog(xs, ys * c, "-", lw=1,
                  label=f"{f.label}: slope {f.slope:.3f} (target {f.predicted:g})")
    ax.set_xlabel(xcol)
    ax.set_ylabel(ycol)
    ax.set_title(report.name)
    handles, labels = ax.get_legend_handles_labels()
    if labels:
        ax.legend(fontsize=7, loc="best")
    fig.tight_layout()
    fig.savefig(path, format="svg")
    plt.close(fig)
    return True
