"""Unperturbed and perturbed Schrodinger propagation on the truncated box."""

import logging
from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy.linalg import solve_banded

from src.config import config
from src.errors import DimensionError, StepSizeError
from src.model.hamiltonian import TruncatedHamiltonian
from src.spectral.eigen import EigenDecomposition, ground_state

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class Drive:
    """Causal time profile f(t) with |f| <= 1."""

    name: str = "ramp"

    def __post_init__(self) -> None:
        if self.name not in config.DRIVES:
            raise ValueError(f"Unknown drive {self.name!r}; expected one of {config.DRIVES}")

    def __call__(self, t):
        t = np.asarray(t, dtype=float)
        if self.name == "ramp":
            value = 1.0 - np.exp(-np.maximum(t, 0.0))
        else:
            value = np.sin(t) ** 2
        value = np.where(t < 0, 0.0, value)
        return float(value) if value.ndim == 0 else value


@dataclass(frozen=True, eq=False)
class Trajectory:
    """States recorded along a perturbed run.

    ``expectation`` holds <psi(t), V_O psi(t)> on the full step grid
    ``step_times`` when an observable was supplied.
    """

    times: np.ndarray
    states: np.ndarray
    dt: float
    epsilon: float
    step_times: np.ndarray
    expectation: Optional[np.ndarray]
    norm_drift: float


def propagate_free(eig: EigenDecomposition, v: np.ndarray, t: float) -> np.ndarray:
    """e^{-iHt} v by expansion in the eigenbasis; t = 0 returns ``v`` itself."""

    v = np.asarray(v)
    if v.shape != (eig.n,):
        raise DimensionError(f"Vector of length {v.shape[0]} does not match dimension {eig.n}")
    if t == 0:
        return v.astype(complex)
    coeffs = eig.vectors.T @ v
    return eig.vectors @ (np.exp(-1j * eig.values * t) * coeffs)


def propagate_free_many(eig: EigenDecomposition, v: np.ndarray, ts: np.ndarray) -> np.ndarray:
    """States e^{-iHt} v for every t in ``ts``, one column per time.

    Columns at t = 0 hold ``v`` exactly instead of its eigenbasis round trip.
    """

    v = np.asarray(v)
    if v.shape != (eig.n,):
        raise DimensionError(f"Vector of length {v.shape[0]} does not match dimension {eig.n}")
    ts = np.asarray(ts, dtype=float)
    coeffs = eig.vectors.T @ v
    phases = np.exp(-1j * np.outer(eig.values, ts))
    states = eig.vectors @ (coeffs[:, None] * phases)
    states[:, ts == 0] = v[:, None]
    return states


def default_dt(H: TruncatedHamiltonian, epsilon: float) -> float:
    return min(0.01, 0.1 / (H.norm_bound + epsilon))


def propagate_perturbed(
    H: TruncatedHamiltonian,
    v_p: np.ndarray,
    epsilon: float,
    drive: Drive,
    dt: Optional[float],
    T: float,
    *,
    psi0: Optional[np.ndarray] = None,
    observable: Optional[np.ndarray] = None,
    record_every: int = 1,
) -> Trajectory:
    """Crank-Nicolson for i d/dt psi = (H + epsilon f(t) V_P) psi, psi(0) = psi0.

    The drive is sampled at each step midpoint, which keeps the scheme second
    order. The Cayley step is unitary, so the norm only drifts by round-off;
    drift beyond ``NORM_DRIFT_TOL`` means the step is too large.
    """

    if not 0 <= epsilon < 1:
        raise ValueError(f"epsilon must lie in [0, 1), got {epsilon}")
    v_p = np.asarray(v_p, dtype=float)
    if v_p.shape != (H.n,):
        raise DimensionError("Perturbation must be a diagonal vector of the Hamiltonian's dimension")
    if dt is None:
        dt = default_dt(H, epsilon)
    if not (dt > 0 and T > 0):
        raise ValueError("dt and T must be positive")
    steps = max(1, int(round(T / dt)))
    if abs(steps * dt - T) > 1e-12 * T:
        dt = T / steps
        logger.debug("Adjusted dt to %s so that T is a whole number of steps", dt)
    psi = np.array(ground_state(H).vector if psi0 is None else psi0, dtype=complex)
    norm0 = np.linalg.norm(psi)

    half = 0.5j * dt
    ab = np.zeros((3, H.n), dtype=complex)
    ab[0, 1:] = half * H.offdiag
    ab[2, :-1] = half * H.offdiag
    step_times = dt * np.arange(steps + 1)
    expectation = None
    if observable is not None:
        observable = np.asarray(observable, dtype=float)
        expectation = np.empty(steps + 1)
        expectation[0] = float(np.sum(observable * np.abs(psi) ** 2))
    times, states = [0.0], [psi.copy()]
    drift = 0.0
    for m in range(steps):
        diag = H.diag + epsilon * drive((m + 0.5) * dt) * v_p
        rhs = psi - half * diag * psi
        rhs[:-1] -= half * H.offdiag * psi[1:]
        rhs[1:] -= half * H.offdiag * psi[:-1]
        ab[1, :] = 1.0 + half * diag
        psi = solve_banded((1, 1), ab, rhs, check_finite=False)
        drift = max(drift, abs(np.linalg.norm(psi) - norm0))
        if expectation is not None:
            expectation[m + 1] = float(np.sum(observable * np.abs(psi) ** 2))
        if (m + 1) % record_every == 0 or m + 1 == steps:
            times.append(step_times[m + 1])
            states.append(psi.copy())
    if drift > config.NORM_DRIFT_TOL * max(norm0, 1.0):
        raise StepSizeError(f"Norm drifted by {drift:.3e} with dt={dt}; reduce the step size")
    logger.debug("Propagated %s steps (dt=%s, epsilon=%s), norm drift %.2e", steps, dt, epsilon, drift)
    return Trajectory(
        times=np.array(times),
        states=np.array(states),
        dt=dt,
        epsilon=epsilon,
        step_times=step_times,
        expectation=expectation,
        norm_drift=drift,
    )


