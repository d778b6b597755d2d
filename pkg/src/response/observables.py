"""Observable/perturbation pairs applied to the ground state."""

from dataclasses import dataclass
from typing import Optional

import numpy as np

from src.errors import DimensionError, InvalidModelError
from src.spectral.eigen import EigenDecomposition, fix_sign


@dataclass(frozen=True, eq=False)
class ObservablePair:
    """u_O = V_O psi0 and u_P = V_P psi0 for diagonal V_O, V_P."""

    u_O: np.ndarray
    u_P: np.ndarray
    description: str = ""

    def __post_init__(self) -> None:
        if self.u_O.shape != self.u_P.shape or self.u_O.ndim != 1:
            raise DimensionError("Observable and perturbation vectors must have equal length")
        if not (np.all(np.isfinite(self.u_O)) and np.all(np.isfinite(self.u_P))):
            raise InvalidModelError("Observable vectors must be finite")


def observables_diagonal(
    psi0: np.ndarray, v_o: np.ndarray, v_p: Optional[np.ndarray] = None, description: str = "diagonal"
) -> ObservablePair:
    """Pair from multiplication operators given as diagonal vectors."""

    psi0 = np.asarray(psi0)
    v_o = np.asarray(v_o, dtype=float)
    v_p = v_o if v_p is None else np.asarray(v_p, dtype=float)
    if v_o.shape != psi0.shape or v_p.shape != psi0.shape:
        raise DimensionError("Diagonal observables must match the ground-state length")
    return ObservablePair(u_O=v_o * psi0, u_P=v_p * psi0, description=description)


def delta0(n: int) -> np.ndarray:
    """Indicator of the central site."""

    if n % 2 == 0:
        raise InvalidModelError("delta_0 needs a lattice with an odd number of sites")
    vec = np.zeros(n)
    vec[n // 2] = 1.0
    return vec


def observables_delta0(eig: EigenDecomposition) -> ObservablePair:
    """V_O = V_P = delta_0, the potential localized on site 0."""

    psi0 = fix_sign(np.array(eig.vectors[:, 0]), None)
    mask = delta0(eig.n)
    return observables_diagonal(psi0, mask, mask, description="delta_0")
