"""Smoothing kernels phi_eta(x) = phi(x / eta) / eta of prescribed moment order.

``hermite`` kernels are the Gaussian multiplied by the even polynomial that
cancels the moments 2..p, the classical vanishing-moment construction. The
Lorentzian has no finite moments beyond the mass and gets no formal order.
"""

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Optional

import numpy as np
from scipy.integrate import quad

from src.config.config import KERNEL_FAMILIES, parse_kernel_family


@dataclass(frozen=True)
class KernelSpec:
    family: str
    eta: float
    p: Optional[int] = None

    def __post_init__(self) -> None:
        if self.family not in KERNEL_FAMILIES:
            raise ValueError(f"Unknown kernel family {self.family!r}")
        if self.family == "hermite" and (self.p is None or self.p < 1 or self.p % 2 == 0):
            raise ValueError("hermite kernels need an odd order p >= 1")

    @classmethod
    def from_name(cls, name: str, eta: float) -> "KernelSpec":
        family, p = parse_kernel_family(name)
        return cls(family, eta, p)

    @property
    def order(self) -> Optional[int]:
        if self.family == "lorentzian":
            return None
        if self.family == "gaussian":
            return 1
        return self.p

    @property
    def label(self) -> str:
        return f"hermite{self.p}" if self.family == "hermite" else self.family


def _gaussian_moment(k: int) -> float:
    """E[x^k] of the standard normal."""

    if k % 2:
        return 0.0
    return float(np.prod(np.arange(k - 1, 0, -2))) if k > 0 else 1.0


@lru_cache(maxsize=None)
def hermite_coefficients(p: int) -> tuple:
    """Coefficients c_j of sum_j c_j x^{2j} cancelling Gaussian moments 2..p."""

    m = (p + 1) // 2
    gram = np.array([[_gaussian_moment(2 * (i + j)) for j in range(m)] for i in range(m)])
    rhs = np.zeros(m)
    rhs[0] = 1.0
    return tuple(float(c) for c in np.linalg.solve(gram, rhs))


def _profile(spec: KernelSpec, u: np.ndarray) -> np.ndarray:
    if spec.family == "lorentzian":
        return 1.0 / (math.pi * (1.0 + u * u))
    gauss = np.exp(-0.5 * u * u) / math.sqrt(2.0 * math.pi)
    if spec.family == "gaussian":
        return gauss
    poly = np.polynomial.polynomial.polyval(u * u, hermite_coefficients(spec.p))
    return gauss * poly


def kernel_eval(spec: KernelSpec, x):
    """phi_eta(x); ``x`` may be a scalar or an array."""

    if not spec.eta > 0:
        raise ValueError(f"Kernel width must be positive, got {spec.eta}")
    u = np.asarray(x, dtype=float) / spec.eta
    value = _profile(spec, u) / spec.eta
    return float(value) if np.ndim(x) == 0 else value


def kernel_moment(spec: KernelSpec, k: int) -> float:
    """int x^k phi_eta(x) dx by adaptive quadrature; NaN for divergent Lorentzian moments."""

    if spec.family == "lorentzian" and k >= 1:
        return float("nan")
    # Integrate the unit-width profile; x = eta u.
    value, _ = quad(
        lambda u: u**k * float(_profile(spec, np.asarray(u))), -np.inf, np.inf, epsabs=1e-13, epsrel=1e-12, limit=200
    )
    return float(spec.eta**k * value)
