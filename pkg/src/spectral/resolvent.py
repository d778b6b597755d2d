"""Complex shifted tridiagonal solves: x = (z - H)^{-1} v."""

import logging

import numpy as np
from scipy.linalg import LinAlgError, eigvalsh_tridiagonal, solve_banded

from src.config import config
from src.errors import DimensionError, NumericError, SingularShiftError
from src.model.hamiltonian import TruncatedHamiltonian, apply

logger = logging.getLogger(__name__)


def _check_shift(H: TruncatedHamiltonian, z: complex) -> None:
    """Refuse a real shift that sits on a computed eigenvalue."""

    if z.imag != 0.0:
        return
    bound = H.norm_bound
    if abs(z.real) > bound:
        return
    values = eigvalsh_tridiagonal(H.diag, H.offdiag)
    gap = np.min(np.abs(values - z.real))
    if gap <= config.SINGULAR_SHIFT_TOL * max(1.0, abs(z.real)):
        raise SingularShiftError(f"Shift z={z.real!r} coincides with an eigenvalue (gap {gap:.2e})")


def resolvent_solve(
    H: TruncatedHamiltonian, z: complex, v: np.ndarray, tol: float = config.RESOLVENT_TOL
) -> np.ndarray:
    """Solve (z - H) x = v by banded LU; ``v`` may hold several columns."""

    z = complex(z)
    v = np.asarray(v, dtype=complex)
    if v.shape[0] != H.n:
        raise DimensionError(f"Right-hand side of length {v.shape[0]} does not match dimension {H.n}")
    _check_shift(H, z)
    ab = np.zeros((3, H.n), dtype=complex)
    ab[0, 1:] = -H.offdiag
    ab[1, :] = z - H.diag
    ab[2, :-1] = -H.offdiag
    try:
        x = solve_banded((1, 1), ab, v, check_finite=False)
    except LinAlgError as exc:
        raise SingularShiftError(f"Shifted matrix is singular at z={z}: {exc}") from exc
    residual = z * x - apply(H, x) - v
    scale = np.linalg.norm(v, axis=0)
    err = np.linalg.norm(residual, axis=0)
    if np.any(err > tol * np.maximum(scale, np.finfo(float).tiny)):
        raise NumericError(f"Resolvent residual {np.max(err):.3e} exceeds {tol:g} relative at z={z}")
    return x


def greens_column(H: TruncatedHamiltonian, z: complex, n: int) -> np.ndarray:
    """Column ``n`` (array index) of (z - H)^{-1}."""

    if not 0 <= n < H.n:
        raise DimensionError(f"Column index {n} outside dimension {H.n}")
    e = np.zeros(H.n, dtype=complex)
    e[n] = 1.0
    return resolvent_solve(H, z, e)


def greens_entry(H: TruncatedHamiltonian, z: complex, m: int, n: int) -> complex:
    """G(z; m, n) with m, n array indices (use ``H.index_of`` for site labels)."""

    if not (0 <= m < H.n and 0 <= n < H.n):
        raise DimensionError(f"Indices ({m}, {n}) outside dimension {H.n}")
    return complex(greens_column(H, z, n)[m])
