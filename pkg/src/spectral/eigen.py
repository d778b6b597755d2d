"""Eigendecomposition and ground-state extraction for truncated Hamiltonians."""

import logging
import warnings
from dataclasses import dataclass
from typing import NamedTuple, Optional

import numpy as np
from scipy.linalg import LinAlgError, eigh_tridiagonal

from src.config import config
from src.errors import DegeneracyWarning, NumericError
from src.model.hamiltonian import TruncatedHamiltonian, apply

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class EigenDecomposition:
    """Ascending eigenvalues with orthonormal eigenvectors stored as columns."""

    values: np.ndarray
    vectors: np.ndarray
    residual_tol: float = config.RESIDUAL_TOL

    @property
    def n(self) -> int:
        return self.values.size

    def orthogonality_error(self) -> float:
        """max |<psi_j, psi_k> - delta_jk|; O(n^3), meant for checks and tests."""

        gram = self.vectors.T @ self.vectors
        return float(np.max(np.abs(gram - np.eye(self.n))))

    def check_orthogonality(self, tol: float = config.ORTHOGONALITY_TOL) -> float:
        """Return the orthogonality error, raising :class:`NumericError` above ``tol``."""

        error = self.orthogonality_error()
        if error > tol:
            raise NumericError(f"Eigenvectors lost orthogonality: {error:.3e} above {tol:.3e}")
        return error


class GroundState(NamedTuple):
    energy: float
    vector: np.ndarray


def _check_residuals(H: TruncatedHamiltonian, values: np.ndarray, vectors: np.ndarray, tol: float) -> None:
    residual = apply(H, vectors) - vectors * values[None, :]
    norms = np.linalg.norm(residual, axis=0)
    bound = tol * (1.0 + H.norm_bound)
    worst = int(np.argmax(norms))
    if norms[worst] > bound:
        raise NumericError(
            f"Eigenpair {worst} has residual {norms[worst]:.3e} above {bound:.3e}", index=worst
        )


def eigendecompose(H: TruncatedHamiltonian, residual_tol: float = config.RESIDUAL_TOL) -> EigenDecomposition:
    """Full spectrum of ``H`` in ascending order, residual-checked."""

    if H.n < 2:
        raise NumericError("Eigendecomposition needs a matrix of dimension >= 2")
    try:
        values, vectors = eigh_tridiagonal(H.diag, H.offdiag)
    except LinAlgError as exc:
        # LAPACK reports the failing eigenvalue through the info code.
        raise NumericError(f"Tridiagonal eigensolver failed: {exc}", index=_info_index(exc)) from exc
    _check_residuals(H, values, vectors, residual_tol)
    logger.debug("Eigendecomposition n=%s E0=%.12f", H.n, values[0])
    values.setflags(write=False)
    vectors.setflags(write=False)
    return EigenDecomposition(values=values, vectors=vectors, residual_tol=residual_tol)


def _info_index(exc: Exception) -> Optional[int]:
    digits = "".join(ch if ch.isdigit() else " " for ch in str(exc)).split()
    return int(digits[-1]) if digits else None


def fix_sign(vector: np.ndarray, reference: Optional[np.ndarray]) -> np.ndarray:
    """Flip ``vector`` so <reference, vector> >= 0, or its largest entry is positive."""

    if reference is not None:
        flip = np.real(np.vdot(reference, vector)) < 0
    else:
        flip = vector[int(np.argmax(np.abs(vector)))] < 0
    return -vector if flip else vector


def ground_state(
    H: TruncatedHamiltonian,
    reference: Optional[np.ndarray] = None,
    eig: Optional[EigenDecomposition] = None,
) -> GroundState:
    """Lowest eigenpair with a deterministic sign.

    With a ``reference`` the sign makes <psi0, reference> >= 0, otherwise the
    largest-magnitude entry of psi0 is positive. Without a precomputed
    decomposition only the two lowest eigenpairs are computed.
    """

    if eig is not None:
        values, vectors, tol = eig.values[:2], eig.vectors[:, :2], eig.residual_tol
    else:
        tol = config.RESIDUAL_TOL
        try:
            values, vectors = eigh_tridiagonal(H.diag, H.offdiag, select="i", select_range=(0, min(1, H.n - 1)))
        except LinAlgError as exc:
            raise NumericError(f"Tridiagonal eigensolver failed: {exc}", index=_info_index(exc)) from exc
        _check_residuals(H, values, vectors, tol)
    if values.size > 1 and values[1] - values[0] <= tol * (1.0 + H.norm_bound):
        message = f"Lowest eigenvalue {values[0]:.12g} is degenerate within tolerance"
        logger.warning(message)
        warnings.warn(message, DegeneracyWarning, stacklevel=2)
    vector = fix_sign(np.array(vectors[:, 0]), reference)
    return GroundState(float(values[0]), vector)
