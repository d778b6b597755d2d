"""Growth of position and difference moments under the unperturbed flow."""

import logging
from dataclasses import dataclass
from typing import Optional

import numpy as np

from src.dynamics.propagation import propagate_free_many
from src.harness.fitting import fit_line
from src.spectral.eigen import EigenDecomposition

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class MomentTable:
    times: np.ndarray
    position: np.ndarray
    difference: np.ndarray

    @property
    def quadratic_constant(self) -> float:
        """Smallest c0 with both moments <= c0 (1 + t)^2 on the sampled times."""

        scale = (1.0 + self.times) ** 2
        return float(max(np.max(self.position / scale), np.max(self.difference / scale)))

    def is_bounded(self, c0: float) -> bool:
        return self.quadratic_constant <= c0

    def ballistic_speed(self, t_min: float = 0.0) -> float:
        """Slope of ||x psi(t)|| against t for t >= t_min."""

        mask = self.times >= t_min
        if mask.sum() < 2:
            return float("nan")
        return fit_line(self.times[mask], self.position[mask])[0]


def moment_growth(
    eig: EigenDecomposition,
    psi: np.ndarray,
    ts: np.ndarray,
    positions: Optional[np.ndarray] = None,
) -> MomentTable:
    """||x psi(t)|| and ||D psi(t)|| for psi(t) = e^{-iHt} psi.

    D is the forward difference with zero boundary values, so ||D psi|| stays
    bounded by 2 ||psi||; x psi grows at most ballistically.
    """

    ts = np.asarray(ts, dtype=float)
    if positions is None:
        positions = np.arange(eig.n) - eig.n // 2
    states = propagate_free_many(eig, psi, ts)
    position = np.linalg.norm(positions[:, None] * states, axis=0)
    padded = np.pad(states, ((1, 1), (0, 0)))
    difference = np.linalg.norm(np.diff(padded, axis=0), axis=0)
    table = MomentTable(times=ts, position=position, difference=difference)
    logger.debug("Moment growth over %s times, c0=%.3f", ts.size, table.quadratic_constant)
    return table
