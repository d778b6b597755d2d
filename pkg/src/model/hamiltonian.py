"""Truncated one-particle Hamiltonians with Dirichlet ends.

Two families are supported: the tight-binding chain with unit hopping and an
impurity (or arbitrary onsite energies), and the 3-point finite-difference
discretization of -d^2/dx^2 + V(x) on (-L, L). Both are stored as the diagonal
and off-diagonal of a real symmetric tridiagonal matrix.
"""

import logging
import math
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from src.config.config import ModelSpec
from src.errors import DimensionError, InvalidModelError
from src.model.potentials import PotentialPreset, make_preset

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class TruncatedHamiltonian:
    """Real symmetric tridiagonal operator for a box of half-width ``L``."""

    L: float
    n: int
    diag: np.ndarray
    offdiag: np.ndarray
    kind: str
    h: float = 1.0
    preset: Optional[PotentialPreset] = None

    def __post_init__(self) -> None:
        if self.diag.shape != (self.n,) or self.offdiag.shape != (self.n - 1,):
            raise InvalidModelError("diag/offdiag lengths do not match the dimension")
        if not (np.all(np.isfinite(self.diag)) and np.all(np.isfinite(self.offdiag))):
            raise InvalidModelError("Hamiltonian entries must be finite")
        self.diag.setflags(write=False)
        self.offdiag.setflags(write=False)

    @property
    def center(self) -> int:
        """Array index of the site at the origin."""

        return self.n // 2

    @property
    def positions(self) -> np.ndarray:
        if self.kind == "lattice":
            half = (self.n - 1) // 2
            return np.arange(-half, half + 1, dtype=float)
        return -self.L + self.h * np.arange(1, self.n + 1)

    @property
    def norm_bound(self) -> float:
        """Gershgorin bound on the spectral norm."""

        radius = np.abs(self.diag).copy()
        radius[:-1] += np.abs(self.offdiag)
        radius[1:] += np.abs(self.offdiag)
        return float(radius.max())

    def index_of(self, site: int) -> int:
        """Map a lattice label in -L..L to its array index."""

        index = int(site) + self.center
        if not 0 <= index < self.n:
            raise DimensionError(f"Site {site} lies outside the box of {self.n} sites")
        return index

    def to_dense(self) -> np.ndarray:
        return np.diag(self.diag) + np.diag(self.offdiag, 1) + np.diag(self.offdiag, -1)


def build_lattice(V: float, L: int) -> TruncatedHamiltonian:
    """Tight-binding chain on sites -L..L with impurity ``V`` on site 0."""

    if not math.isfinite(V):
        raise InvalidModelError(f"Impurity strength must be finite, got {V}")
    if int(L) != L or L < 1:
        raise InvalidModelError(f"Lattice half-width must be an integer >= 1, got {L}")
    L = int(L)
    n = 2 * L + 1
    diag = np.zeros(n)
    diag[L] = V
    logger.debug("Built impurity lattice V=%s L=%s (n=%s)", V, L, n)
    return TruncatedHamiltonian(L=L, n=n, diag=diag, offdiag=np.ones(n - 1), kind="lattice")


def build_onsite(values: Sequence[float]) -> TruncatedHamiltonian:
    """Tight-binding chain with arbitrary onsite energies centred on site 0."""

    diag = np.array(values, dtype=float)
    n = diag.size
    if n < 3 or n % 2 == 0:
        raise InvalidModelError(f"Onsite vector must have odd length >= 3, got {n}")
    if not np.all(np.isfinite(diag)):
        raise InvalidModelError("Onsite energies must be finite")
    return TruncatedHamiltonian(L=(n - 1) // 2, n=n, diag=diag, offdiag=np.ones(n - 1), kind="lattice")


def build_continuum(preset: PotentialPreset, L: float, h: float) -> TruncatedHamiltonian:
    """Finite differences for -d^2/dx^2 + V(x) on (-L, L), Dirichlet ends.

    Interior nodes are x_i = -L + i h for i = 1..N-1 with N = 2 round(L / h), so
    the origin is the middle node; when L/h is not an integer the spacing is
    adjusted to 2L/N.
    """

    if not (math.isfinite(h) and h > 0):
        raise InvalidModelError(f"Grid spacing must be positive, got {h}")
    if not (math.isfinite(L) and L > 0) or L / h < 2:
        raise InvalidModelError(f"Interval half-width {L} is degenerate for h={h}")
    intervals = 2 * int(round(L / h))
    h_eff = 2.0 * L / intervals
    if abs(h_eff - h) > 1e-12 * h:
        logger.info("Adjusted grid spacing from %s to %s so that the origin is a grid node", h, h_eff)
    n = intervals - 1
    x = -L + h_eff * np.arange(1, n + 1)
    diag = 2.0 / h_eff**2 + preset(x)
    offdiag = np.full(n - 1, -1.0 / h_eff**2)
    return TruncatedHamiltonian(
        L=float(L), n=n, diag=diag, offdiag=offdiag, kind="continuum", h=h_eff, preset=preset
    )


def build(spec: ModelSpec, L: float) -> TruncatedHamiltonian:
    """Build the Hamiltonian a :class:`ModelSpec` describes at half-width ``L``."""

    if spec.kind == "lattice_impurity":
        return build_lattice(spec.V, L)
    if spec.kind == "lattice_onsite":
        # Onsite vectors fix their own size; L is ignored.
        return build_onsite(spec.values or [])
    if spec.kind == "continuum_1d":
        return build_continuum(make_preset(spec.preset, spec.params), L, spec.h)
    raise InvalidModelError(f"Unknown model kind {spec.kind!r}")


def apply(H: TruncatedHamiltonian, v: np.ndarray) -> np.ndarray:
    """Tridiagonal matrix-vector (or matrix-matrix, column-wise) product."""

    v = np.asarray(v)
    if v.shape[0] != H.n:
        raise DimensionError(f"Vector of length {v.shape[0]} does not match dimension {H.n}")
    diag = H.diag if v.ndim == 1 else H.diag[:, None]
    off = H.offdiag if v.ndim == 1 else H.offdiag[:, None]
    out = diag * v
    out[:-1] += off * v[1:]
    out[1:] += off * v[:-1]
    return out
