"""Exact response of the infinite impurity chain, used as the oracle.

The free chain with unit hopping has the Green's function
G0(z; m, n) = zeta^{|m-n|} / s(z) with s(z) = sqrt(z - 2) sqrt(z + 2)
(product of principal roots) and zeta = (z - s) / 2, so that |zeta| < 1 for
Im z > 0. Real arguments are treated as limits from the upper half plane.
The impurity V delta_{m0} delta_{n0} is a rank-one update, which gives
G(z; 0, 0) = 1 / (s(z) - V). A bound state exists below the band for V < 0 at
E0 = -sqrt(V^2 + 4), where s(E0) = V; its amplitude decays as zeta0^{|n|} with
zeta0 = (E0 - V) / 2, which is negative (alternating signs) for unit positive
hopping, and |psi0(0)|^2 = (1 - zeta0^2) / (1 + zeta0^2) = |V| / sqrt(V^2 + 4).
"""

import math
from typing import NamedTuple, Tuple, Union

import numpy as np

from src.config import config
from src.errors import InvalidModelError, ThresholdError

ComplexLike = Union[complex, np.ndarray]


class BoundState(NamedTuple):
    energy: float
    decay: float
    amplitude: float

    def wavefunction(self, sites: np.ndarray) -> np.ndarray:
        sites = np.asarray(sites)
        return self.amplitude * self.decay ** np.abs(sites)


def impurity_bound_state(V: float) -> BoundState:
    if not math.isfinite(V):
        raise InvalidModelError(f"Impurity strength must be finite, got {V}")
    if V >= 0:
        raise InvalidModelError(f"V={V} binds no state below the band; the ground state is not isolated")
    energy = -math.sqrt(V * V + 4.0)
    decay = 0.5 * (energy - V)
    amplitude = math.sqrt((1.0 - decay * decay) / (1.0 + decay * decay))
    return BoundState(energy, decay, amplitude)


def free_sqrt(z: ComplexLike) -> ComplexLike:
    """sqrt(z^2 - 4) on the branch that behaves like z at infinity."""

    z = np.asarray(z, dtype=complex)
    return np.sqrt(z - 2.0) * np.sqrt(z + 2.0)


def free_green(z: complex, m: int, n: int) -> complex:
    """Free-chain Green's function; lower half plane by reflection."""

    z = complex(z)
    if z.imag < 0:
        return complex(np.conj(free_green(z.conjugate(), m, n)))
    s = complex(free_sqrt(z))
    zeta = 0.5 * (z - s)
    return zeta ** abs(m - n) / s


def _green00_upper(V: float, w: ComplexLike) -> ComplexLike:
    return 1.0 / (free_sqrt(w) - V)


def impurity_green_00(V: float, w: complex) -> complex:
    """G(w; 0, 0) of the impurity chain, with the conjugate branch below the axis."""

    w = complex(w)
    if w.imag < 0:
        return complex(np.conj(_green00_upper(V, w.conjugate())))
    return complex(_green00_upper(V, w))


def impurity_green(V: float, z: complex, m: int, n: int) -> complex:
    """G(z; m, n) of the impurity chain by the rank-one resolvent update."""

    z = complex(z)
    if z.imag < 0:
        return complex(np.conj(impurity_green(V, z.conjugate(), m, n)))
    g00 = free_green(z, 0, 0)
    return free_green(z, m, n) + V * free_green(z, m, 0) * free_green(z, 0, n) / (1.0 - V * g00)


def threshold_frequencies(V: float) -> Tuple[float, ...]:
    """Frequencies where the boundary value of the response is singular."""

    E0 = impurity_bound_state(V).energy
    upper, lower = 2.0 - E0, -2.0 - E0
    return (0.0, lower, upper, -lower, -upper)


def _check_thresholds(V: float, omega: float, margin: float) -> None:
    for edge in threshold_frequencies(V):
        if abs(omega - edge) < margin:
            raise ThresholdError(f"omega={omega} lies within {margin} of the threshold {edge:.6f}")


def exact_lattice_response(V: float, omega: float, eta: float) -> complex:
    """Infinite-chain K(omega + i eta) for V_O = V_P = delta_0; eta = 0 is the limit from above."""

    if eta < 0 or not math.isfinite(eta):
        raise ValueError(f"eta must be non-negative, got {eta}")
    state = impurity_bound_state(V)
    if eta == 0:
        _check_thresholds(V, omega, config.THRESHOLD_MARGIN)
    weight = state.amplitude**2
    # <u, (z - (H - E0))^{-1} u> - <u, (z + (H - E0))^{-1} u>, the second factor
    # lives in the lower half plane and is the conjugate of an upper-branch value.
    first = _green00_upper(V, complex(state.energy + omega, eta))
    second = np.conj(_green00_upper(V, complex(state.energy - omega, eta)))
    return complex(weight * (first + second))


def exact_spectral_density(V: float, omega: float) -> float:
    """-Im of the positive-frequency term at eta -> 0+, divided by pi.

    This is the continuous density of the measure sum_k w_k delta(omega - f_k)
    in the infinite-box limit (the bound-state atom at omega = 0 excluded).
    """

    state = impurity_bound_state(V)
    _check_thresholds(V, omega, config.THRESHOLD_MARGIN)
    g = _green00_upper(V, complex(state.energy + omega, 0.0))
    return float(-state.amplitude**2 * np.imag(g) / math.pi)
