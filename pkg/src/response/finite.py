"""Response functions of the truncated problem.

K_L(tau) and its Fourier-Laplace transform K_L(omega + i eta) are evaluated
by sum over states in the eigenbasis of H_L, and the frequency response a
second, independent way through two shifted resolvent solves.
"""

import logging
import math
from dataclasses import dataclass
from typing import List, Optional, Tuple, Union

import numpy as np
from scipy.integrate import simpson

from src.errors import DimensionError, NumericError
from src.model.hamiltonian import TruncatedHamiltonian
from src.response.observables import ObservablePair
from src.spectral.eigen import EigenDecomposition, ground_state
from src.spectral.resolvent import resolvent_solve

logger = logging.getLogger(__name__)

# Upper bound on the size of the (samples x states) phase matrices built at once.
_CHUNK_ENTRIES = 2_000_000

ArrayLike = Union[float, np.ndarray]


@dataclass(frozen=True)
class TimeSample:
    tau: float
    value: float


@dataclass(frozen=True)
class ResponseSample:
    omega: float
    eta: float
    value: complex

    def __post_init__(self) -> None:
        if self.eta < 0:
            raise ValueError("eta must be non-negative")


def overlap_weights(eig: EigenDecomposition, obs: ObservablePair) -> Tuple[np.ndarray, np.ndarray]:
    """Weights of the two sum-over-states terms.

    w_plus[k] = <u_O, psi_k><psi_k, u_P>, w_minus[k] = <u_P, psi_k><psi_k, u_O>.
    """

    if obs.u_O.size != eig.n:
        raise DimensionError(f"Observables of length {obs.u_O.size} do not match dimension {eig.n}")
    o = eig.vectors.T @ obs.u_O
    p = eig.vectors.T @ obs.u_P
    return np.conj(o) * p, np.conj(p) * o


def spectral_weight(eig: EigenDecomposition, obs: ObservablePair) -> Tuple[np.ndarray, np.ndarray]:
    """Discrete spectral measure (w_k, f_k) with f_k = E_k - E_0,L."""

    w_plus, _ = overlap_weights(eig, obs)
    weights = np.real_if_close(w_plus, tol=1000)
    return weights, eig.values - eig.values[0]


def _chunks(rows: int, cols: int):
    step = max(1, _CHUNK_ENTRIES // max(cols, 1))
    for start in range(0, rows, step):
        yield slice(start, min(rows, start + step))


def time_response_values(eig: EigenDecomposition, obs: ObservablePair, taus: np.ndarray) -> np.ndarray:
    """K_L on a grid: -i theta(tau) sum_k w_k e^{-i f_k tau} + c.c."""

    taus = np.asarray(taus, dtype=float)
    w_plus, _ = overlap_weights(eig, obs)
    freqs = eig.values - eig.values[0]
    keep = np.abs(w_plus) > 0
    w_plus, freqs = w_plus[keep], freqs[keep]
    out = np.zeros(taus.size)
    for sl in _chunks(taus.size, freqs.size):
        s = np.exp(-1j * np.outer(taus[sl], freqs)) @ w_plus
        out[sl] = 2.0 * np.imag(s)
    out[taus < 0] = 0.0
    return out


def time_response(eig: EigenDecomposition, obs: ObservablePair, taus: np.ndarray) -> List[TimeSample]:
    taus = np.asarray(taus, dtype=float)
    if np.any(np.diff(taus) < 0):
        raise ValueError("taus must be sorted")
    values = time_response_values(eig, obs, taus)
    return [TimeSample(float(t), float(v)) for t, v in zip(taus, values)]


def _require_eta(eta: float) -> None:
    if eta == 0:
        raise ValueError("eta = 0 is a singular distribution for a finite box; use the exact oracle")
    if not eta > 0:
        raise ValueError(f"eta must be positive, got {eta}")


def freq_response_sos(
    eig: EigenDecomposition,
    obs: ObservablePair,
    omega: ArrayLike,
    eta: float,
    E0: Optional[float] = None,
) -> Union[complex, np.ndarray]:
    """Sum-over-states K_L(omega + i eta); ``omega`` may be an array."""

    _require_eta(eta)
    E0 = eig.values[0] if E0 is None else E0
    w_plus, w_minus = overlap_weights(eig, obs)
    freqs = eig.values - E0
    z = np.atleast_1d(np.asarray(omega, dtype=float)) + 1j * eta
    out = np.empty(z.size, dtype=complex)
    # The ground-state pair sits at the origin with residue w_plus[0] - w_minus[0];
    # it is added on its own so that it cancels exactly for u_O = u_P.
    pole = (w_plus[0] / (z - freqs[0])) - (w_minus[0] / (z + freqs[0]))
    w_plus, w_minus, freqs = w_plus[1:], w_minus[1:], freqs[1:]
    for sl in _chunks(z.size, freqs.size):
        zz = z[sl, None]
        out[sl] = pole[sl] + (w_plus / (zz - freqs) - w_minus / (zz + freqs)).sum(axis=1)
    return complex(out[0]) if np.ndim(omega) == 0 else out


def freq_response_resolvent(
    H: TruncatedHamiltonian,
    E0: float,
    obs: ObservablePair,
    omega: float,
    eta: float,
    psi0: Optional[np.ndarray] = None,
) -> complex:
    """<u_O, (z - (H - E0))^{-1} u_P> - <u_P, (z + (H - E0))^{-1} u_O>, z = omega + i eta.

    ``psi0`` is the eigenvector at ``E0`` (computed when absent). Its pole is
    handled in closed form and both solves see only the orthogonal complement,
    so the near-singular direction never reaches the inner products.
    """

    _require_eta(eta)
    if psi0 is None:
        psi0 = ground_state(H).vector
    if psi0.size != H.n:
        raise DimensionError(f"Ground state of length {psi0.size} does not match dimension {H.n}")
    z = complex(omega, eta)
    a = np.vdot(psi0, obs.u_P)
    b = np.vdot(psi0, obs.u_O)
    u_P = obs.u_P - a * psi0
    u_O = obs.u_O - b * psi0
    pole = (np.conj(b) * a - np.conj(a) * b) / z
    first = np.vdot(u_O, resolvent_solve(H, E0 + z, u_P))
    # (z + H - E0)^{-1} = -((E0 - z) - H)^{-1}
    second = -np.vdot(u_P, resolvent_solve(H, E0 - z, u_O))
    return complex(pole + first - second)


def damped_fourier(
    eig: EigenDecomposition,
    obs: ObservablePair,
    omega: float,
    eta: float,
    T: float,
    num: Optional[int] = None,
) -> complex:
    """Quadrature of int_0^T K_L(tau) e^{i(omega + i eta) tau} d tau (Simpson)."""

    _require_eta(eta)
    if num is None:
        fastest = float(eig.values[-1] - eig.values[0]) + abs(omega)
        # 128 samples per period of the fastest oscillation, odd count for Simpson.
        steps = int(math.ceil(128.0 * T * fastest / (2.0 * math.pi)))
        num = 2 * ((steps + 1) // 2) + 1
    taus = np.linspace(0.0, T, num)
    integrand = time_response_values(eig, obs, taus) * np.exp(1j * (omega + 1j * eta) * taus)
    value = simpson(integrand, x=taus)
    if not np.isfinite(value):
        raise NumericError("Damped Fourier quadrature produced a non-finite value")
    return complex(value)
