"""Least-squares slope fits for the scaling-law experiments."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = ["LogLogFit", "fit_loglog"]


@dataclass(frozen=True)
class LogLogFit:
    slope: float
    intercept: float
    residual: float  # rms residual of log values about the fitted line

    def within(self, predicted: float, tol: float) -> bool:
        return abs(self.slope - predicted) <= tol


def fit_loglog(x, y) -> LogLogFit:
    """Fit log|y| = slope * log x + intercept by least squares."""
    x = np.asarray(x, dtype=float)
    y = np.abs(np.asarray(y, dtype=float))
    if x.size < 2:
        raise ValueError("need at least two samples to fit a slope")
    if np.any(x <= 0.0) or np.any(y <= 0.0):
        raise ValueError("log-log fit needs positive samples")
    lx, ly = np.log(x), np.log(y)
    A = np.stack([lx, np.ones_like(lx)], axis=1)
    coef, *_ = np.linalg.lstsq(A, ly, rcond=None)
    resid = ly - A @ coef
    rms = float(np.sqrt(np.mean(resid * resid)))
    return LogLogFit(slope=float(coef[0]), intercept=float(coef[1]), residual=rms)
