"""Named continuum potentials, each carrying the oracle it is checked against."""

import math
from dataclasses import dataclass, field
from typing import Dict, Optional

import numpy as np

from src.errors import InvalidModelError


@dataclass(frozen=True)
class PotentialPreset:
    """A smooth, short-range potential V(x) on the real line.

    ``exact_ground_energy`` is the analytic bound-state energy when one is
    known. Every preset is even in x, and so is its ground state.
    """

    name: str
    params: Dict[str, float] = field(default_factory=dict)

    def __call__(self, x: np.ndarray) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        if self.name == "poschl_teller":
            return -self.params["depth"] / np.cosh(x) ** 2
        if self.name == "gaussian_well":
            width = self.params["width"]
            return -self.params["depth"] * np.exp(-0.5 * (x / width) ** 2)
        raise InvalidModelError(f"Unknown potential preset {self.name!r}")

    @property
    def exact_ground_energy(self) -> Optional[float]:
        if self.name != "poschl_teller":
            return None
        # depth = lam (lam + 1) binds at E = -lam^2.
        lam = 0.5 * (math.sqrt(1.0 + 4.0 * self.params["depth"]) - 1.0)
        return -lam * lam


def make_preset(name: str, params: Optional[Dict[str, float]] = None) -> PotentialPreset:
    """Validate preset parameters and fill in defaults."""

    params = dict(params or {})
    if name == "poschl_teller":
        params.setdefault("depth", 2.0)
        required = ("depth",)
    elif name == "gaussian_well":
        params.setdefault("depth", 1.0)
        params.setdefault("width", 1.0)
        required = ("depth", "width")
    else:
        raise InvalidModelError(f"Unknown potential preset {name!r}; expected poschl_teller or gaussian_well")
    for key in required:
        value = params[key]
        if not isinstance(value, (int, float)) or not math.isfinite(value):
            raise InvalidModelError(f"Preset {name} parameter {key} must be a finite number")
    if name == "gaussian_well" and params["width"] <= 0:
        raise InvalidModelError("gaussian_well width must be positive")
    if params["depth"] < 0:
        raise InvalidModelError(f"Preset {name} depth must be non-negative")
    return PotentialPreset(name, {k: float(v) for k, v in params.items()})
