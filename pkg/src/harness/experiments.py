"""Experiments: each builds the models it needs, runs one study and returns a table.

Results are plain :class:`ExperimentResult` records; writing them to disk is
the storage layer's job. Independent cells are fanned out over a thread pool
and reassembled in a fixed order so the output never depends on scheduling.
"""

import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Any, Callable, Dict, Iterable, List, Optional, Sequence, Tuple

import numpy as np
from scipy.integrate import simpson

from src.config import config
from src.config.config import ExperimentConfig
from src.dynamics.kubo import kubo_remainder
from src.dynamics.moments import moment_growth
from src.dynamics.propagation import Drive, default_dt
from src.errors import FitError, InvalidModelError, ThresholdError
from src.harness.fitting import SlopeFit, exponential_rate, loglog_slope, roundoff_floor
from src.model.hamiltonian import TruncatedHamiltonian, apply, build, build_lattice
from src.response.exact import (
    exact_lattice_response,
    exact_spectral_density,
    impurity_bound_state,
    threshold_frequencies,
)
from src.response.finite import freq_response_resolvent, freq_response_sos, spectral_weight, time_response_values
from src.response.observables import ObservablePair, delta0, observables_diagonal
from src.smoothing.density import order_slope, smoothed_density
from src.smoothing.kernels import KernelSpec
from src.spectral.eigen import eigendecompose, ground_state
from src.spectral.resolvent import greens_column, resolvent_solve

logger = logging.getLogger(__name__)

Row = Tuple[Any, ...]

# Frequencies over which isolated finite-box peaks are counted for V = -4.
PEAK_WINDOW = (2.6, 6.4)


@dataclass
class ExperimentResult:
    """One experiment's main table, a summary for the manifest and optional side tables."""

    name: str
    header: List[str]
    rows: List[Row]
    summary: Dict[str, Any] = field(default_factory=dict)
    extra: Dict[str, Tuple[List[str], List[Row]]] = field(default_factory=dict)


def fit_summary(fit: Optional[SlopeFit]) -> Dict[str, Any]:
    if fit is None:
        return {"slope": None}
    return {
        "slope": fit.slope,
        "intercept": fit.intercept,
        "residual": fit.residual,
        "r_squared": fit.r_squared,
        "n_points": fit.n_points,
        "floor": fit.floor,
        "excluded": fit.excluded,
    }


def parallel_map(fn: Callable, items: Iterable, threads: int) -> List:
    """``map`` over a thread pool; results come back in input order."""

    items = list(items)
    if threads <= 1 or len(items) <= 1:
        return [fn(item) for item in items]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(fn, items))


def impurity_strength(cfg: ExperimentConfig) -> float:
    if cfg.model.kind != "lattice_impurity":
        raise InvalidModelError(f"This experiment needs the exact oracle of the impurity lattice, not {cfg.model.kind!r}")
    return cfg.model.V


def _delta0_pair(H: TruncatedHamiltonian, psi0: np.ndarray) -> ObservablePair:
    mask = delta0(H.n)
    return observables_diagonal(psi0, mask, mask, description="delta_0")


def _exact_ground_energy(cfg: ExperimentConfig, H: TruncatedHamiltonian) -> float:
    if cfg.model.kind == "lattice_impurity" and cfg.model.V < 0:
        return impurity_bound_state(cfg.model.V).energy
    if H.preset is not None and H.preset.exact_ground_energy is not None:
        return H.preset.exact_ground_energy
    return float("nan")


def ground_state_table(cfg: ExperimentConfig) -> ExperimentResult:
    """E0,L for each probe box, with residual and resolvent self-checks."""

    rng = np.random.default_rng(cfg.seed)
    rows: List[Row] = []
    for L in cfg.probe_Ls:
        H = build(cfg.model, L)
        eig = eigendecompose(H)
        gs = ground_state(H, eig=eig)
        exact = _exact_ground_energy(cfg, H)
        residual = float(np.max(np.abs(apply(H, gs.vector) - gs.energy * gs.vector)))
        # Random right-hand side in the upper half plane checks the shifted solver.
        v = rng.standard_normal(H.n) + 1j * rng.standard_normal(H.n)
        z = complex(rng.uniform(-2.0, 2.0), 0.1)
        x = resolvent_solve(H, z, v)
        solve_residual = float(np.linalg.norm(z * x - apply(H, x) - v) / np.linalg.norm(v))
        error = abs(gs.energy - exact) if math.isfinite(exact) else float("nan")
        rows.append(
            (
                int(H.n),
                float(L),
                gs.energy,
                exact,
                error,
                float(gs.vector[H.center]),
                residual,
                eig.check_orthogonality(),
                solve_residual,
            )
        )
        logger.info("L=%s: E0=%.12f (exact %.12f)", L, gs.energy, exact)
    header = [
        "n",
        "L",
        "E0",
        "E0_exact",
        "abs_error",
        "psi0_center",
        "eigen_residual",
        "orthogonality_error",
        "resolvent_residual",
    ]
    return ExperimentResult("ground-state", header, rows, {"model": cfg.model.kind})


def time_response_table(cfg: ExperimentConfig) -> ExperimentResult:
    taus = np.asarray(cfg.taus)
    rows: List[Row] = []
    for L in cfg.probe_Ls:
        H = build(cfg.model, L)
        eig = eigendecompose(H)
        obs = _delta0_pair(H, ground_state(H, eig=eig).vector)
        values = time_response_values(eig, obs, taus)
        rows.extend((float(L), float(t), float(k)) for t, k in zip(taus, values))
    return ExperimentResult("time-response", ["L", "tau", "K"], rows)


def freq_response_table(cfg: ExperimentConfig) -> ExperimentResult:
    """K_L(omega + i eta) by sum over states and by resolvent, with their disagreement."""

    rows: List[Row] = []
    worst = 0.0
    for L in cfg.probe_Ls:
        H = build(cfg.model, L)
        eig = eigendecompose(H)
        gs = ground_state(H, eig=eig)
        obs = _delta0_pair(H, gs.vector)
        for eta in cfg.eta_values:
            sos = freq_response_sos(eig, obs, np.asarray(cfg.omegas), eta)
            for omega, a in zip(cfg.omegas, sos):
                b = freq_response_resolvent(H, gs.energy, obs, omega, eta, psi0=gs.vector)
                rel = abs(a - b) / max(abs(b), np.finfo(float).tiny)
                worst = max(worst, rel)
                rows.append((float(L), float(eta), float(omega), a.real, a.imag, b.real, b.imag, rel))
    header = ["L", "eta", "omega", "re_sos", "im_sos", "re_resolvent", "im_resolvent", "rel_diff"]
    logger.info("Sum over states and resolvent agree to %.3e relative", worst)
    return ExperimentResult("freq-response", header, rows, {"max_rel_diff": worst})


def sweep_eta_L(cfg: ExperimentConfig) -> ExperimentResult:
    """|K_L - K| over the (omega, eta, L) grid and the exponential rate per (omega, eta)."""

    V = impurity_strength(cfg)
    Ls = sorted(set(int(L) for L in cfg.L_values))

    exact: Dict[Tuple[float, float], Any] = {}
    for omega in cfg.omegas:
        for eta in cfg.eta_values:
            try:
                exact[(omega, eta)] = exact_lattice_response(V, omega, eta)
            except ThresholdError as exc:
                exact[(omega, eta)] = exc

    def cell(L: int) -> Dict[Tuple[float, float], complex]:
        # One ground state per box, shared by every (omega, eta).
        H = build_lattice(V, L)
        gs = ground_state(H)
        obs = _delta0_pair(H, gs.vector)
        out = {}
        for omega in cfg.omegas:
            for eta in cfg.eta_values:
                out[(omega, eta)] = freq_response_resolvent(H, gs.energy, obs, omega, eta, psi0=gs.vector)
        logger.debug("Swept L=%s", L)
        return out

    finite = dict(zip(Ls, parallel_map(cell, Ls, cfg.threads)))

    rows: List[Row] = []
    fits: Dict[str, Any] = {}
    nan = float("nan")
    for omega in cfg.omegas:
        for eta in cfg.eta_values:
            ref = exact[(omega, eta)]
            errors = []
            for L in Ls:
                k = finite[L][(omega, eta)]
                if isinstance(ref, ThresholdError):
                    rows.append((float(omega), float(eta), L, k.real, k.imag, nan, nan, nan, "threshold"))
                    continue
                err = abs(k - ref)
                errors.append(err)
                rows.append((float(omega), float(eta), L, k.real, k.imag, ref.real, ref.imag, err, "ok"))
            key = f"omega={omega!r},eta={eta!r}"
            if isinstance(ref, ThresholdError) or len(errors) < 3:
                fits[key] = {"slope": None}
                continue
            try:
                fit = exponential_rate(Ls, errors, absolute_floor=roundoff_floor(abs(ref)))
                fits[key] = dict(fit_summary(fit), rate=fit.rate)
                logger.info("omega=%s eta=%s: rate %.4f (r2=%.4f, %s points)", omega, eta, fit.rate, fit.r_squared, fit.n_points)
            except FitError as exc:
                logger.warning("omega=%s eta=%s: %s", omega, eta, exc)
                fits[key] = {"slope": None, "error": str(exc)}
    header = ["omega", "eta", "L", "re_K_L", "im_K_L", "re_K_exact", "im_K_exact", "abs_error", "status"]
    return ExperimentResult("sweep", header, rows, {"fits": fits})


def _continuum_window(V: float) -> Tuple[float, float]:
    E0 = impurity_bound_state(V).energy
    return -2.0 - E0, 2.0 - E0


def lap_rate(
    V: float, omega: float, etas: Sequence[float], *, require_continuum: bool = True
) -> ExperimentResult:
    """Slope of log|K(omega + i eta) - K(omega + i0)| against log eta, oracle only."""

    lower, upper = _continuum_window(V)
    margin = config.CONTINUUM_MARGIN
    inside = lower + margin <= abs(omega) <= upper - margin
    if require_continuum and not inside:
        raise ThresholdError(
            f"omega={omega} is not inside the continuum window [{lower:.4f}, {upper:.4f}] by {margin}"
        )
    for edge in threshold_frequencies(V):
        if abs(omega - edge) < margin:
            raise ThresholdError(f"omega={omega} lies within {margin} of the threshold {edge:.6f}")
    boundary = exact_lattice_response(V, omega, 0.0)
    etas = sorted(float(e) for e in etas)
    rows: List[Row] = []
    errors = []
    for eta in etas:
        k = exact_lattice_response(V, omega, eta)
        errors.append(abs(k - boundary))
        rows.append((eta, k.real, k.imag, errors[-1]))
    fit = loglog_slope(etas, errors, absolute_floor=roundoff_floor(abs(boundary)))
    logger.info("LAP slope at omega=%s: %.4f", omega, fit.slope)
    summary = dict(fit_summary(fit), omega=omega, in_continuum=inside, re_boundary=boundary.real, im_boundary=boundary.imag)
    return ExperimentResult("lap-rate", ["eta", "re_K", "im_K", "abs_error"], rows, summary)


@dataclass
class LocalityFit:
    alpha: float
    fit: SlopeFit
    window: Tuple[int, int]


def locality_fit(
    H: TruncatedHamiltonian,
    omega: float,
    eta: float,
    *,
    near_field: int = 10,
    min_sites: int = 10,
) -> LocalityFit:
    """Exponential decay rate of |G(z; n, 0)| in |n| at z = E0,L + omega + i eta.

    Sites closer than ``near_field`` to the origin, the quarter of the box next
    to each wall and entries at the round-off level are left out of the fit.
    """

    if not eta > 0:
        raise ValueError(f"eta must be positive, got {eta}")
    E0 = ground_state(H).energy
    column = greens_column(H, complex(E0 + omega, eta), H.center)
    half = H.n // 2
    far = half - max(10, half // 4)
    if far <= near_field:
        raise FitError(f"Box of {H.n} sites leaves no fitting window beyond the near field")
    distances = np.arange(near_field, far + 1)
    magnitude = 0.5 * (np.abs(column[H.center + distances]) + np.abs(column[H.center - distances]))
    fit = exponential_rate(
        distances,
        magnitude,
        absolute_floor=roundoff_floor(abs(column[H.center])),
        min_points=min_sites,
    )
    if not fit.rate > 0:
        raise FitError(f"Green's function does not decay at eta={eta} (rate {fit.rate:.3e})")
    logger.debug("eta=%s: alpha=%.5f over %s sites", eta, fit.rate, fit.n_points)
    return LocalityFit(alpha=fit.rate, fit=fit, window=(near_field, far))


def locality(cfg: ExperimentConfig) -> ExperimentResult:
    settings = cfg.locality
    H = build(cfg.model, settings.L)
    etas = sorted(settings.etas)
    fits = parallel_map(lambda eta: locality_fit(H, settings.omega, eta), etas, cfg.threads)
    rows = [(eta, f.alpha, f.fit.r_squared, f.fit.n_points, f.fit.residual) for eta, f in zip(etas, fits)]
    ratios = [b.alpha / a.alpha for a, b in zip(fits, fits[1:])]
    return ExperimentResult(
        "locality",
        ["eta", "alpha", "r_squared", "n_points", "residual"],
        rows,
        {"omega": settings.omega, "L": settings.L, "alpha_ratios": ratios},
    )


def _is_unimodal(errors: np.ndarray) -> bool:
    """True when the log-error curve has a single interior or boundary minimum."""

    logs = np.log(np.maximum(errors, np.finfo(float).tiny))
    interior = np.flatnonzero((logs[1:-1] < logs[:-2]) & (logs[1:-1] < logs[2:]))
    return interior.size <= 1


def optimal_eta(
    V: float,
    omega: float,
    Ls: Sequence[int],
    etas: Sequence[float],
    threads: int = 1,
    window: float = 0.1,
    window_points: int = 401,
) -> ExperimentResult:
    """Per box size, the smoothing width minimizing the total error around ``omega``.

    The finite-size part of K_L(w + i eta) - K(w + i0) oscillates in w with a
    period of about one level spacing and can cancel the smoothing part at a
    single frequency. The error at each eta is therefore the largest one over
    ``window_points`` frequencies in [omega - window, omega + window].
    """

    if window < 0:
        raise ValueError(f"window must be non-negative, got {window}")
    if window_points < 1:
        raise ValueError(f"window_points must be at least 1, got {window_points}")
    if window == 0 or window_points == 1:
        omegas = np.array([float(omega)])
    else:
        omegas = np.linspace(omega - window, omega + window, window_points)
    boundary = np.array([exact_lattice_response(V, float(w), 0.0) for w in omegas])
    etas = np.asarray(sorted(etas), dtype=float)

    def scan(L: int) -> np.ndarray:
        H = build_lattice(V, L)
        eig = eigendecompose(H)
        obs = _delta0_pair(H, ground_state(H, eig=eig).vector)
        return np.array([np.max(np.abs(freq_response_sos(eig, obs, omegas, eta) - boundary)) for eta in etas])

    Ls = [int(L) for L in Ls]
    scans = parallel_map(scan, Ls, threads)
    rows: List[Row] = []
    scan_rows: List[Row] = []
    for L, errors in zip(Ls, scans):
        best = int(np.argmin(errors))
        unimodal = _is_unimodal(errors)
        if not unimodal:
            logger.warning("L=%s: error scan is not unimodal; reporting the global minimum", L)
        rows.append((L, float(etas[best]), float(errors[best]), unimodal))
        scan_rows.extend((L, float(e), float(err)) for e, err in zip(etas, errors))
        logger.info("L=%s: eta*=%.4g, min error %.3e", L, etas[best], errors[best])
    eta_ratios = [b[1] / a[1] for a, b in zip(rows, rows[1:])]
    error_ratios = [b[2] / a[2] for a, b in zip(rows, rows[1:])]
    return ExperimentResult(
        "optimal-eta",
        ["L", "eta_star", "min_error", "unimodal"],
        rows,
        {
            "omega": omega,
            "window": window,
            "window_points": int(omegas.size),
            "eta_ratios": eta_ratios,
            "error_ratios": error_ratios,
        },
        extra={"optimal-eta_scan": (["L", "eta", "total_error"], scan_rows)},
    )


def gaussian_test_function(width: float, center: float) -> Callable[[np.ndarray], np.ndarray]:
    def g(tau: np.ndarray) -> np.ndarray:
        return np.exp(-0.5 * ((np.asarray(tau) - center) / width) ** 2)

    return g


def distconv(
    V: float,
    Ls: Sequence[int],
    L_ref: int,
    width: float,
    center: float,
    tail_widths: float = 10.0,
    tau_step: float = 0.05,
) -> ExperimentResult:
    """|int (K_L - K_ref)(tau) g(tau) d tau| for a Gaussian test function g.

    K is causal, so the pairing starts at tau = 0; the upper limit cuts g at
    ``center + tail_widths * width``. When every error already sits at the
    round-off floor no slope is fitted and the run is reported as converged.
    """

    if L_ref < max(Ls):
        raise ValueError("The reference box must be at least as large as every tested box")
    upper = center + tail_widths * width
    num = 2 * int(math.ceil(upper / tau_step / 2.0)) + 1
    taus = np.linspace(0.0, upper, num)
    g = gaussian_test_function(width, center)
    weights = g(taus)
    truncated = bool(weights[-1] > 1e-12 * weights.max())
    if truncated:
        logger.warning("Test function is cut at tau=%s while still %.2e of its peak; widen the tau grid", upper, weights[-1])

    def response(L: int) -> np.ndarray:
        H = build_lattice(V, L)
        eig = eigendecompose(H)
        return time_response_values(eig, _delta0_pair(H, ground_state(H, eig=eig).vector), taus)

    reference = response(L_ref)
    scale = float(simpson(np.abs(reference) * weights, x=taus))
    floor = roundoff_floor(scale) * num
    rows: List[Row] = []
    errors = []
    Ls = sorted(int(L) for L in Ls)
    for L in Ls:
        err = abs(float(simpson((response(L) - reference) * weights, x=taus)))
        errors.append(err)
        rows.append((L, err, err <= config.FLOOR_FACTOR * floor))
        logger.info("L=%s: pairing error %.3e", L, err)
    summary: Dict[str, Any] = {"L_ref": L_ref, "floor": floor, "truncated": truncated}
    if all(r[2] for r in rows):
        summary.update(slope=None, converged_at_floor=True)
        logger.warning("All pairing errors are at the round-off floor %.3e; no slope fitted", floor)
    else:
        try:
            fit = loglog_slope(Ls, errors, absolute_floor=floor, min_points=2)
            summary.update(fit_summary(fit), converged_at_floor=False)
        except FitError as exc:
            summary.update(slope=None, converged_at_floor=True, note=str(exc))
    summary["non_increasing"] = all(b <= a or b <= config.FLOOR_FACTOR * floor for a, b in zip(errors, errors[1:]))
    return ExperimentResult("distconv", ["L", "abs_error", "at_floor"], rows, summary)


def decay_contrast(taus: np.ndarray, values: np.ndarray, early=(0.0, 20.0), late=(40.0, 60.0)) -> float:
    """max|K| over the late window divided by max|K| over the early window."""

    taus = np.asarray(taus)
    values = np.abs(np.asarray(values))
    early_max = values[(taus >= early[0]) & (taus <= early[1])].max()
    late_max = values[(taus >= late[0]) & (taus <= late[1])].max()
    return float(late_max / early_max)


def count_peaks(omegas: np.ndarray, values: np.ndarray, lo: float, hi: float) -> int:
    """Strict local maxima of ``values`` with omega in [lo, hi]."""

    omegas = np.asarray(omegas)
    values = np.asarray(values)
    is_peak = (values[1:-1] > values[:-2]) & (values[1:-1] > values[2:])
    inner = omegas[1:-1]
    return int(np.sum(is_peak & (inner >= lo) & (inner <= hi)))


def figure1(cfg: ExperimentConfig) -> ExperimentResult:
    """K_L(tau) on the figure grid for each box size."""

    V = impurity_strength(cfg)
    taus = np.asarray(cfg.figures.figure1_taus)

    def curve(L: int) -> np.ndarray:
        H = build_lattice(V, L)
        eig = eigendecompose(H)
        return time_response_values(eig, _delta0_pair(H, ground_state(H, eig=eig).vector), taus)

    Ls = [int(L) for L in cfg.figures.figure1_Ls]
    curves = parallel_map(curve, Ls, cfg.threads)
    rows: List[Row] = []
    contrast = {}
    for L, values in zip(Ls, curves):
        rows.extend((L, float(t), float(k)) for t, k in zip(taus, values))
        if taus.max() >= 60.0:
            contrast[str(L)] = decay_contrast(taus, values)
    return ExperimentResult("figure1", ["L", "tau", "K_L"], rows, {"decay_contrast": contrast, "grids": "visual choice"})


def figure2(cfg: ExperimentConfig) -> ExperimentResult:
    """K_L(omega + i eta) next to the exact response for each (L, eta)."""

    V = impurity_strength(cfg)
    omegas = np.asarray(cfg.figures.figure2_omegas)
    etas = list(cfg.figures.figure2_etas)

    def panel(L: int) -> List[np.ndarray]:
        H = build_lattice(V, L)
        eig = eigendecompose(H)
        obs = _delta0_pair(H, ground_state(H, eig=eig).vector)
        return [freq_response_sos(eig, obs, omegas, eta) for eta in etas]

    Ls = [int(L) for L in cfg.figures.figure2_Ls]
    panels = parallel_map(panel, Ls, cfg.threads)
    rows: List[Row] = []
    peaks: Dict[str, int] = {}
    sup_error: Dict[str, float] = {}
    for L, values in zip(Ls, panels):
        for eta, finite in zip(etas, values):
            exact = np.array([exact_lattice_response(V, w, eta) for w in omegas])
            error = np.abs(finite - exact)
            key = f"L={L},eta={eta!r}"
            peaks[key] = count_peaks(omegas, -finite.imag, *PEAK_WINDOW)
            sup_error[key] = float(error.max())
            rows.extend(
                (L, float(eta), float(w), a.real, a.imag, b.real, b.imag, float(e))
                for w, a, b, e in zip(omegas, finite, exact, error)
            )
    header = ["L", "eta", "omega", "re_K_L", "im_K_L", "re_K_exact", "im_K_exact", "abs_error"]
    return ExperimentResult("figure2", header, rows, {"peaks": peaks, "sup_error": sup_error, "grids": "visual choice"})


def kernel_orders(cfg: ExperimentConfig) -> ExperimentResult:
    """Convergence order of the kernel-smoothed density for each kernel family."""

    V = impurity_strength(cfg)
    settings = cfg.kernel
    H = build_lattice(V, settings.L)
    eig = eigendecompose(H)
    obs = _delta0_pair(H, ground_state(H, eig=eig).vector)
    weights, frequencies = spectral_weight(eig, obs)
    exact = exact_spectral_density(V, settings.omega)
    rows: List[Row] = []
    slopes: Dict[str, Any] = {}
    for family in settings.families:
        for eta in sorted(settings.etas):
            value = float(smoothed_density(weights, frequencies, KernelSpec.from_name(family, eta), settings.omega)[0])
            rows.append((family, float(eta), value, exact, abs(value - exact)))
        try:
            slopes[family] = fit_summary(order_slope(weights, frequencies, family, settings.omega, settings.etas, exact))
        except FitError as exc:
            logger.warning("Kernel %s: %s", family, exc)
            slopes[family] = {"slope": None, "error": str(exc)}
    return ExperimentResult(
        "kernel-orders",
        ["family", "eta", "smoothed", "exact", "abs_error"],
        rows,
        {"omega": settings.omega, "L": settings.L, "fits": slopes},
    )


def kubo_check(cfg: ExperimentConfig) -> ExperimentResult:
    settings = cfg.dynamics
    H = build(cfg.model, settings.L)
    dt = settings.dt if settings.dt is not None else default_dt(H, max(settings.epsilons))
    report = kubo_remainder(H, settings.epsilons, Drive(settings.drive), settings.T, dt)
    rows = [(r.epsilon, r.sup_remainder, r.quadrature_error, r.norm_drift, r.flagged) for r in report.rows]
    summary = dict(fit_summary(report.fit), dt=report.dt, T=report.T, drive=report.drive, notes=report.notes)
    return ExperimentResult(
        "kubo-check", ["epsilon", "sup_remainder", "quadrature_error", "norm_drift", "flagged"], rows, summary
    )


def moment_growth_table(cfg: ExperimentConfig, initial: str = "site") -> ExperimentResult:
    """Moments of e^{-iHt} psi for the ground state or the normalized V_P psi0."""

    H = build(cfg.model, cfg.dynamics.L)
    eig = eigendecompose(H)
    gs = ground_state(H, eig=eig)
    if initial == "ground":
        psi = gs.vector
    elif initial == "site":
        psi = delta0(H.n) * gs.vector
        psi = psi / np.linalg.norm(psi)
    else:
        raise ValueError(f"Unknown initial state {initial!r}; use 'ground' or 'site'")
    table = moment_growth(eig, psi, np.asarray(cfg.taus), positions=H.positions)
    rows = [(float(t), float(x), float(d)) for t, x, d in zip(table.times, table.position, table.difference)]
    t_min = float(table.times.max()) / 2.0
    summary = {
        "initial": initial,
        "quadratic_constant": table.quadratic_constant,
        "ballistic_speed": table.ballistic_speed(t_min),
    }
    return ExperimentResult("moment-growth", ["t", "position_moment", "difference_moment"], rows, summary)

