"""Kernel-smoothed spectral densities and their convergence order."""

import logging
from typing import Sequence

import numpy as np

from src.harness.fitting import SlopeFit, loglog_slope, roundoff_floor
from src.smoothing.kernels import KernelSpec, kernel_eval

logger = logging.getLogger(__name__)

_CHUNK_ENTRIES = 2_000_000


def smoothed_density(weights, frequencies, spec: KernelSpec, omegas) -> np.ndarray:
    """A_eta(omega) = sum_k w_k phi_eta(omega - f_k) on a grid of omegas."""

    weights = np.asarray(weights, dtype=float)
    frequencies = np.asarray(frequencies, dtype=float)
    omegas = np.atleast_1d(np.asarray(omegas, dtype=float))
    keep = weights != 0
    weights, frequencies = weights[keep], frequencies[keep]
    out = np.empty(omegas.size)
    step = max(1, _CHUNK_ENTRIES // max(frequencies.size, 1))
    for start in range(0, omegas.size, step):
        sl = slice(start, start + step)
        out[sl] = kernel_eval(spec, omegas[sl, None] - frequencies[None, :]) @ weights
    return out


def order_slope(
    weights,
    frequencies,
    family: str,
    omega: float,
    etas: Sequence[float],
    exact: float,
) -> SlopeFit:
    """Fit log|A_eta(omega) - exact| against log eta for one kernel family.

    ``family`` is a kernel name such as ``"gaussian"`` or ``"hermite3"``. Points
    on the finite-size or round-off floor are dropped and reported by the fit.
    """

    etas = np.asarray(sorted(etas), dtype=float)
    errors = np.array(
        [abs(smoothed_density(weights, frequencies, KernelSpec.from_name(family, eta), omega)[0] - exact) for eta in etas]
    )
    fit = loglog_slope(etas, errors, absolute_floor=roundoff_floor(abs(exact)) * 16)
    logger.info("Kernel %s at omega=%s: slope %.3f over %s points", family, omega, fit.slope, fit.n_points)
    return fit
