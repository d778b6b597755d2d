"""Convergence-law fits shared by every experiment.

All fits are unweighted least squares on log-transformed errors after
dropping points that sit within ``FLOOR_FACTOR`` of the measured noise floor.
The floor is the median of the longest tail segment (at the small-error end)
whose slope is flat compared with the rest of the curve, or the caller's
absolute floor when that is larger.
"""

import logging
from dataclasses import dataclass, field
from typing import List, Tuple

import numpy as np

from src.config import config
from src.errors import FitError

logger = logging.getLogger(__name__)

_TINY = 1e-300


@dataclass
class SlopeFit:
    slope: float
    intercept: float
    residual: float
    r_squared: float
    n_points: int
    floor: float
    excluded: List[int] = field(default_factory=list)

    @property
    def rate(self) -> float:
        """Decay rate of an exponential fit (minus the slope)."""

        return -self.slope


def fit_line(t: np.ndarray, u: np.ndarray) -> Tuple[float, float, float, float]:
    """Least-squares line u = slope t + intercept: (slope, intercept, rms residual, r^2)."""

    A = np.column_stack([t, np.ones_like(t)])
    (slope, intercept), *_ = np.linalg.lstsq(A, u, rcond=None)
    fitted = slope * t + intercept
    resid = u - fitted
    ss_tot = float(np.sum((u - u.mean()) ** 2))
    r_squared = 1.0 - float(np.sum(resid**2)) / ss_tot if ss_tot > 0 else 1.0
    return float(slope), float(intercept), float(np.sqrt(np.mean(resid**2))), r_squared


def noise_floor(
    x: np.ndarray,
    y: np.ndarray,
    *,
    log_x: bool = True,
    min_tail: int = 3,
    flatness: float = 0.2,
    absolute: float = 0.0,
) -> float:
    x = np.asarray(x, dtype=float)
    y = np.maximum(np.abs(np.asarray(y, dtype=float)), _TINY)
    order = np.argsort(x)
    x, y = x[order], y[order]
    if y[0] < y[-1]:
        x, y = x[::-1], y[::-1]
    t = np.log(x) if log_x else x
    u = np.log(y)
    floor = 0.0
    n = y.size
    for k in range(n - 2, min_tail - 1, -1):
        tail_slope = fit_line(t[n - k:], u[n - k:])[0]
        head_slope = fit_line(t[: n - k], u[: n - k])[0]
        if abs(tail_slope) <= flatness * abs(head_slope):
            floor = float(np.median(y[n - k:]))
            break
    return max(floor, absolute)


def _fit(x, y, log_x: bool, floor_factor: float, absolute_floor: float, min_points: int) -> SlopeFit:
    x = np.asarray(x, dtype=float)
    y = np.abs(np.asarray(y, dtype=float))
    if x.shape != y.shape:
        raise FitError("x and y must have the same shape")
    if log_x and np.any(x <= 0):
        raise FitError("log-log fits need positive abscissae")
    floor = noise_floor(x, y, log_x=log_x, absolute=absolute_floor) if x.size >= 2 else absolute_floor
    keep = (y > floor_factor * floor) & np.isfinite(y) & (y > 0)
    excluded = [int(i) for i in np.flatnonzero(~keep)]
    if excluded:
        logger.warning("Excluded %s of %s points at or near the noise floor %.3e", len(excluded), y.size, floor)
    if keep.sum() < min_points:
        raise FitError(f"Only {int(keep.sum())} usable points above the noise floor {floor:.3e}")
    t = np.log(x[keep]) if log_x else x[keep]
    slope, intercept, residual, r_squared = fit_line(t, np.log(y[keep]))
    fit = SlopeFit(slope, intercept, residual, r_squared, int(keep.sum()), floor, excluded)
    logger.debug("Fit slope=%.4f r2=%.5f points=%s", slope, r_squared, fit.n_points)
    return fit


def loglog_slope(
    x,
    y,
    *,
    floor_factor: float = config.FLOOR_FACTOR,
    absolute_floor: float = 0.0,
    min_points: int = 3,
) -> SlopeFit:
    """Slope of log|y| against log x."""

    return _fit(x, y, True, floor_factor, absolute_floor, min_points)


def exponential_rate(
    x,
    y,
    *,
    floor_factor: float = config.FLOOR_FACTOR,
    absolute_floor: float = 0.0,
    min_points: int = 3,
) -> SlopeFit:
    """Slope of log|y| against x; ``fit.rate`` is the decay rate."""

    return _fit(x, y, False, floor_factor, absolute_floor, min_points)


def roundoff_floor(scale: float) -> float:
    """Absolute floor for quantities of magnitude ``scale`` computed in double precision."""

    return 64.0 * np.finfo(float).eps * max(abs(scale), 1.0)
