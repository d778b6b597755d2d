"""Centralized configuration and defaults for boxresponse.

Every numerical module and the harness read their tolerances and default
grids from here rather than hard-coding values. Experiment sweeps are
described by :class:`ExperimentConfig`, which can be loaded from a JSON file
and is echoed verbatim into each run manifest so a run can be reproduced.
"""

import json
import math
import os
from dataclasses import asdict, dataclass, field, fields, is_dataclass, replace
from typing import Any, Dict, List, Optional

import numpy as np

from src.errors import ConfigError

TOOL_VERSION = "0.3.0"

# Numerical tolerances shared across modules.
RESIDUAL_TOL = 1e-11
ORTHOGONALITY_TOL = 1e-10
RESOLVENT_TOL = 1e-10
SINGULAR_SHIFT_TOL = 1e-14
# Boundary values of the exact response are refused this close to a threshold.
THRESHOLD_MARGIN = 1e-3
# lap-rate needs the frequency well inside the continuum window.
CONTINUUM_MARGIN = 0.2
NORM_DRIFT_TOL = 1e-9
# Points within this factor of the measured noise floor are dropped from fits.
FLOOR_FACTOR = 10.0

# The impurity strength used throughout the numerical illustration.
DEFAULT_V = -4.0
HEADLINE_OMEGA = 3.0

OUT_DIR = os.getenv("BOXRESPONSE_OUT", "results")

DRIVES = ("ramp", "sin2")
KERNEL_FAMILIES = ("lorentzian", "gaussian", "hermite")
PRESETS = ("poschl_teller", "gaussian_well")
MODEL_KINDS = ("lattice_impurity", "lattice_onsite", "continuum_1d")


def env_int(name: str, default: int) -> int:
    """Integer from the environment; malformed values raise :class:`ConfigError`."""

    raw = os.getenv(name)
    if raw is None or not raw.strip():
        return default
    try:
        return int(raw)
    except ValueError as exc:
        raise ConfigError(f"{name} must be an integer, got {raw!r}") from exc


def _linspace(start: float, stop: float, num: int) -> List[float]:
    return [float(x) for x in np.linspace(start, stop, num)]


def _geomspace(start: float, stop: float, num: int) -> List[float]:
    return [float(x) for x in np.geomspace(start, stop, num)]


@dataclass
class ModelSpec:
    """Which truncated Hamiltonian to build.

    ``kind`` selects the variant; only the fields relevant to that variant are
    read (``V`` for the impurity lattice, ``values`` for arbitrary onsite
    energies, ``preset``/``params``/``h`` for the continuum model).
    """

    kind: str = "lattice_impurity"
    V: float = DEFAULT_V
    values: Optional[List[float]] = None
    preset: str = "poschl_teller"
    params: Dict[str, float] = field(default_factory=dict)
    h: float = 0.05


@dataclass
class DynamicsSettings:
    drive: str = "ramp"
    epsilons: List[float] = field(default_factory=lambda: [0.01, 0.02, 0.04, 0.08])
    T: float = 10.0
    # None selects min(0.01, 0.1 / (||H|| + epsilon)).
    dt: Optional[float] = None
    L: int = 200


@dataclass
class KernelSettings:
    families: List[str] = field(default_factory=lambda: ["lorentzian", "gaussian", "hermite3"])
    etas: List[float] = field(default_factory=lambda: _geomspace(0.01, 0.1, 9))
    L: int = 2000
    omega: float = HEADLINE_OMEGA


@dataclass
class LapSettings:
    omega: float = HEADLINE_OMEGA
    etas: List[float] = field(default_factory=lambda: _geomspace(1e-3, 1e-1, 9))


@dataclass
class LocalitySettings:
    omega: float = HEADLINE_OMEGA
    etas: List[float] = field(default_factory=lambda: [0.05, 0.1, 0.2, 0.4])
    L: int = 2000


@dataclass
class OptimalEtaSettings:
    omega: float = HEADLINE_OMEGA
    Ls: List[int] = field(default_factory=lambda: [250, 500, 1000])
    etas: List[float] = field(default_factory=lambda: _geomspace(1e-3, 1.0, 91))
    # Errors are maximized over omega +- window to smooth out finite-size oscillations.
    window: float = 0.1
    window_points: int = 401


@dataclass
class DistconvSettings:
    Ls: List[int] = field(default_factory=lambda: [100, 200, 400])
    L_ref: int = 1600
    width: float = 5.0
    center: float = 10.0
    # Pairing integrand is cut at center + tail_widths * width.
    tail_widths: float = 10.0
    tau_step: float = 0.05


@dataclass
class FigureSettings:
    # Figure grids are visual choices, not measured quantities.
    figure1_Ls: List[int] = field(default_factory=lambda: [30, 100, 1000])
    figure1_taus: List[float] = field(default_factory=lambda: _linspace(0.0, 100.0, 1001))
    figure2_Ls: List[int] = field(default_factory=lambda: [30, 1000])
    figure2_etas: List[float] = field(default_factory=lambda: [0.02, 0.5])
    figure2_omegas: List[float] = field(default_factory=lambda: _linspace(0.0, 9.0, 1801))


@dataclass
class ExperimentConfig:
    """Declarative description of every sweep the harness can run."""

    model: ModelSpec = field(default_factory=ModelSpec)
    L_values: List[int] = field(default_factory=lambda: list(range(50, 1601, 10)))
    eta_values: List[float] = field(default_factory=lambda: [0.05, 0.1, 0.2])
    omegas: List[float] = field(default_factory=lambda: [HEADLINE_OMEGA])
    taus: List[float] = field(default_factory=lambda: _linspace(0.0, 60.0, 601))
    # Box sizes for the single-shot ground-state, time-response and freq-response runs.
    probe_Ls: List[int] = field(default_factory=lambda: [30, 200])
    dynamics: DynamicsSettings = field(default_factory=DynamicsSettings)
    kernel: KernelSettings = field(default_factory=KernelSettings)
    lap: LapSettings = field(default_factory=LapSettings)
    locality: LocalitySettings = field(default_factory=LocalitySettings)
    optimal_eta: OptimalEtaSettings = field(default_factory=OptimalEtaSettings)
    distconv: DistconvSettings = field(default_factory=DistconvSettings)
    figures: FigureSettings = field(default_factory=FigureSettings)
    out_dir: str = OUT_DIR
    seed: int = field(default_factory=lambda: env_int("BOXRESPONSE_SEED", 0))
    threads: int = field(default_factory=lambda: env_int("BOXRESPONSE_THREADS", 1))

    def to_dict(self) -> Dict[str, Any]:
        return asdict(self)

    def validate(self) -> "ExperimentConfig":
        """Raise :class:`ConfigError` on the first inconsistency found."""

        _validate_model(self.model)
        for name, values in (
            ("L_values", self.L_values),
            ("eta_values", self.eta_values),
            ("omegas", self.omegas),
            ("taus", self.taus),
            ("probe_Ls", self.probe_Ls),
            ("dynamics.epsilons", self.dynamics.epsilons),
            ("kernel.etas", self.kernel.etas),
            ("lap.etas", self.lap.etas),
            ("locality.etas", self.locality.etas),
            ("optimal_eta.Ls", self.optimal_eta.Ls),
            ("optimal_eta.etas", self.optimal_eta.etas),
            ("distconv.Ls", self.distconv.Ls),
            ("figures.figure1_Ls", self.figures.figure1_Ls),
            ("figures.figure1_taus", self.figures.figure1_taus),
            ("figures.figure2_Ls", self.figures.figure2_Ls),
            ("figures.figure2_etas", self.figures.figure2_etas),
            ("figures.figure2_omegas", self.figures.figure2_omegas),
        ):
            if len(values) == 0:
                raise ConfigError(f"{name} must not be empty")
            if not all(math.isfinite(v) for v in values):
                raise ConfigError(f"{name} contains non-finite values")
        for name, values in (
            ("omegas", self.omegas),
            ("taus", self.taus),
            ("figures.figure1_taus", self.figures.figure1_taus),
            ("figures.figure2_omegas", self.figures.figure2_omegas),
        ):
            if any(b < a for a, b in zip(values, values[1:])):
                raise ConfigError(f"{name} must be sorted ascending")
        for name, values in (
            ("eta_values", self.eta_values),
            ("kernel.etas", self.kernel.etas),
            ("lap.etas", self.lap.etas),
            ("locality.etas", self.locality.etas),
            ("optimal_eta.etas", self.optimal_eta.etas),
            ("figures.figure2_etas", self.figures.figure2_etas),
        ):
            if any(v <= 0 for v in values):
                raise ConfigError(f"{name} must be strictly positive")
        for name, values in (
            ("L_values", self.L_values),
            ("probe_Ls", self.probe_Ls),
            ("optimal_eta.Ls", self.optimal_eta.Ls),
            ("distconv.Ls", self.distconv.Ls),
            ("figures.figure1_Ls", self.figures.figure1_Ls),
            ("figures.figure2_Ls", self.figures.figure2_Ls),
        ):
            if any(int(v) < 1 for v in values):
                raise ConfigError(f"{name} must hold box sizes >= 1")
        if self.distconv.L_ref < max(self.distconv.Ls):
            raise ConfigError("distconv.L_ref must be at least max(distconv.Ls)")
        if self.optimal_eta.window < 0 or self.optimal_eta.window_points < 1:
            raise ConfigError("optimal_eta.window must be >= 0 and optimal_eta.window_points >= 1")
        if self.dynamics.drive not in DRIVES:
            raise ConfigError(f"Unknown drive {self.dynamics.drive!r}; expected one of {DRIVES}")
        if any(not 0 <= e < 1 for e in self.dynamics.epsilons):
            raise ConfigError("dynamics.epsilons must lie in [0, 1)")
        if self.dynamics.T <= 0 or (self.dynamics.dt is not None and self.dynamics.dt <= 0):
            raise ConfigError("dynamics.T and dynamics.dt must be positive")
        for family in self.kernel.families:
            parse_kernel_family(family)
        if self.threads < 1:
            raise ConfigError("threads must be >= 1")
        return self


def _validate_model(model: ModelSpec) -> None:
    if model.kind not in MODEL_KINDS:
        raise ConfigError(f"Unknown model kind {model.kind!r}; expected one of {MODEL_KINDS}")
    if model.kind == "continuum_1d" and model.preset not in PRESETS:
        raise ConfigError(f"Unknown potential preset {model.preset!r}; expected one of {PRESETS}")
    if model.kind == "lattice_onsite" and not model.values:
        raise ConfigError("lattice_onsite models need a non-empty 'values' list")


def parse_kernel_family(name: str) -> tuple:
    """Split ``"hermite3"`` into ``("hermite", 3)``; other families carry no order."""

    if name in KERNEL_FAMILIES and name != "hermite":
        return name, None
    if name.startswith("hermite"):
        digits = name[len("hermite"):]
        if digits.isdigit() and int(digits) % 2 == 1:
            return "hermite", int(digits)
    raise ConfigError(f"Unknown kernel family {name!r}; use lorentzian, gaussian or hermite<odd p>")


def _parse_grid(key: str, value: Any) -> List[float]:
    """Accept a literal list or a ``{start, stop, num, spacing}`` object."""

    if isinstance(value, list):
        return [float(v) for v in value]
    if isinstance(value, dict):
        try:
            start, stop, num = float(value["start"]), float(value["stop"]), int(value["num"])
        except (KeyError, TypeError, ValueError) as exc:
            raise ConfigError(f"Grid {key!r} needs numeric start, stop and num") from exc
        spacing = value.get("spacing", "linear")
        if spacing == "linear":
            return _linspace(start, stop, num)
        if spacing == "log":
            if start <= 0 or stop <= 0:
                raise ConfigError(f"Log grid {key!r} needs positive bounds")
            return _geomspace(start, stop, num)
        raise ConfigError(f"Grid {key!r} has unknown spacing {spacing!r}")
    raise ConfigError(f"Grid {key!r} must be a list or a start/stop/num object")


def _merge(target: Any, overrides: Dict[str, Any], path: str = "") -> Any:
    """Return a copy of dataclass ``target`` with ``overrides`` applied recursively."""

    known = {f.name: f for f in fields(target)}
    changes: Dict[str, Any] = {}
    for key, value in overrides.items():
        where = f"{path}{key}"
        if key not in known:
            raise ConfigError(f"Unknown configuration key {where!r}")
        current = getattr(target, key)
        if is_dataclass(current):
            if not isinstance(value, dict):
                raise ConfigError(f"{where!r} must be an object")
            changes[key] = _merge(current, value, f"{where}.")
        elif isinstance(current, list) and key not in ("values", "families"):
            grid = _parse_grid(where, value)
            if key.endswith("Ls") or key == "L_values":
                grid = [int(round(v)) for v in grid]
            changes[key] = grid
        else:
            changes[key] = value
    return replace(target, **changes)


def config_from_dict(data: Dict[str, Any]) -> ExperimentConfig:
    if not isinstance(data, dict):
        raise ConfigError("Configuration root must be a JSON object")
    return _merge(ExperimentConfig(), data).validate()


def load_config(path: Optional[str]) -> ExperimentConfig:
    """Load a JSON configuration file on top of the built-in defaults."""

    if path is None:
        return ExperimentConfig().validate()
    try:
        with open(path, "r", encoding="utf-8") as handle:
            data = json.load(handle)
    except OSError as exc:
        raise ConfigError(f"Cannot read configuration file {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"Configuration file {path} is not valid JSON: {exc}") from exc
    return config_from_dict(data)


def apply_overrides(cfg: ExperimentConfig, overrides: Dict[str, Any]) -> ExperimentConfig:
    """Layer command-line overrides (same shape as the JSON file) over ``cfg``."""

    return _merge(cfg, overrides).validate()
