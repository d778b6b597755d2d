"""Check of the first-order (Kubo) term against full time evolution.

For psi(t) solving the driven problem from the ground state,
<psi(t), V_O psi(t)> = <psi0, V_O psi0> + epsilon (K_L * f)(t) + R(t) with
R = O(epsilon^2). The convolution is evaluated by the trapezoid rule on the
propagation grid and its quadrature error is estimated by comparison with the
same rule on the grid of doubled spacing; remainders that are not clearly
above that estimate are flagged instead of fitted.
"""

import logging
from dataclasses import dataclass, field
from typing import List, Optional, Sequence

import numpy as np
from scipy.integrate import cumulative_trapezoid
from scipy.signal import fftconvolve

from src.errors import FitError
from src.harness.fitting import SlopeFit, loglog_slope
from src.model.hamiltonian import TruncatedHamiltonian
from src.response.finite import overlap_weights, time_response_values
from src.response.observables import ObservablePair, delta0, observables_diagonal
from src.spectral.eigen import EigenDecomposition, eigendecompose, ground_state
from src.dynamics.propagation import Drive, propagate_perturbed

logger = logging.getLogger(__name__)

# A remainder must exceed the quadrature error estimate by this factor to be fitted.
QUADRATURE_MARGIN = 10.0


@dataclass
class KuboRow:
    epsilon: float
    sup_remainder: float
    quadrature_error: float
    norm_drift: float
    flagged: bool


@dataclass
class KuboReport:
    rows: List[KuboRow]
    fit: Optional[SlopeFit]
    dt: float
    T: float
    drive: str
    notes: List[str] = field(default_factory=list)

    @property
    def slope(self) -> float:
        return self.fit.slope if self.fit is not None else float("nan")


def causal_convolution(kernel: np.ndarray, signal: np.ndarray, dt: float) -> np.ndarray:
    """Trapezoid rule for int_0^t kernel(t - s) signal(s) ds on a uniform grid."""

    kernel = np.asarray(kernel, dtype=float)
    signal = np.asarray(signal, dtype=float)
    full = fftconvolve(kernel, signal)[: kernel.size]
    ends = 0.5 * (kernel * signal[0] + kernel[0] * signal)
    out = dt * (full - ends)
    out[0] = 0.0
    return out


def dyson_first_order(eig: EigenDecomposition, obs: ObservablePair, drive: Drive, ts: np.ndarray) -> np.ndarray:
    """First-order Dyson term 2 Re <psi0(t), V_O psi1(t)> from the interaction picture.

    psi1(t) = -i sum_k psi_k <psi_k, u_P> e^{-i E_k t} int_0^t f(s) e^{i f_k s} ds,
    which reproduces (K_L * f)(t) without going through K_L.
    """

    ts = np.asarray(ts, dtype=float)
    w_plus, _ = overlap_weights(eig, obs)
    freqs = eig.values - eig.values[0]
    keep = np.abs(w_plus) > 0
    w_plus, freqs = w_plus[keep], freqs[keep]
    phases = np.exp(1j * np.outer(freqs, ts))
    integrals = cumulative_trapezoid(drive(ts)[None, :] * phases, ts, axis=1, initial=0.0)
    first = -1j * np.sum(w_plus[:, None] * np.conj(phases) * integrals, axis=0)
    return 2.0 * np.real(first)


def kubo_remainder(
    H: TruncatedHamiltonian,
    epsilons: Sequence[float],
    drive: Drive,
    T: float,
    dt: float,
    observable: Optional[np.ndarray] = None,
    perturbation: Optional[np.ndarray] = None,
) -> KuboReport:
    """sup_t |R(t)| for each epsilon and its log-log slope in epsilon.

    ``observable`` and ``perturbation`` are diagonal vectors; both default to
    the central-site indicator.
    """

    eig = eigendecompose(H)
    gs = ground_state(H, eig=eig)
    v_o = delta0(H.n) if observable is None else np.asarray(observable, dtype=float)
    v_p = v_o if perturbation is None else np.asarray(perturbation, dtype=float)
    obs = observables_diagonal(gs.vector, v_o, v_p)

    steps = max(1, int(round(T / dt)))
    dt = T / steps
    times = dt * np.arange(steps + 1)
    kernel = time_response_values(eig, obs, times)
    signal = drive(times)
    linear = causal_convolution(kernel, signal, dt)
    coarse = causal_convolution(kernel[::2], signal[::2], 2 * dt)
    # Trapezoid error is O(dt^2): the halved-grid difference over 3 estimates it.
    quadrature_error = float(np.max(np.abs(linear[::2] - coarse))) / 3.0
    baseline = float(np.sum(v_o * gs.vector**2))

    rows: List[KuboRow] = []
    for epsilon in epsilons:
        traj = propagate_perturbed(
            H, v_p, epsilon, drive, dt, T, psi0=gs.vector, observable=v_o, record_every=steps
        )
        remainder = traj.expectation - baseline - epsilon * linear
        sup = float(np.max(np.abs(remainder)))
        flagged = sup < QUADRATURE_MARGIN * epsilon * quadrature_error
        if flagged:
            logger.warning("epsilon=%s: remainder %.3e is at the quadrature floor", epsilon, sup)
        rows.append(KuboRow(float(epsilon), sup, float(epsilon * quadrature_error), traj.norm_drift, flagged))
        logger.info("epsilon=%s sup|R|=%.4e", epsilon, sup)

    report = KuboReport(rows=rows, fit=None, dt=dt, T=T, drive=drive.name)
    usable = [r for r in rows if not r.flagged and r.epsilon > 0]
    try:
        report.fit = loglog_slope(
            [r.epsilon for r in usable], [r.sup_remainder for r in usable], floor_factor=0.0, min_points=2
        )
    except FitError as exc:
        report.notes.append(str(exc))
        logger.warning("No remainder slope: %s", exc)
    return report
