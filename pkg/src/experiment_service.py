"""Orchestration layer tying the experiments to the result store."""

import logging
from datetime import datetime, timezone
from typing import Callable, Dict, List, Optional, Sequence

from src.config.config import ExperimentConfig
from src.errors import ResponseError
from src.harness import experiments
from src.harness.experiments import ExperimentResult
from src.storage.csv_storage import ResultStore

logger = logging.getLogger(__name__)


class ExperimentService:
    """Central coordinator used by the CLI: runs experiments and records every outcome."""

    def __init__(self, cfg: ExperimentConfig, store: Optional[ResultStore] = None) -> None:
        self.config = cfg
        self.store = store or ResultStore(cfg.out_dir)
        self.failures: List[ResponseError] = []
        self._status_callback: Optional[Callable[[str], None]] = None
        self._stages: Dict[str, Callable[[], ExperimentResult]] = {
            "ground-state": self.ground_state,
            "time-response": self.time_response,
            "freq-response": self.freq_response,
            "sweep": self.sweep,
            "lap-rate": self.lap_rate,
            "locality": self.locality,
            "optimal-eta": self.optimal_eta,
            "distconv": self.distconv,
            "kubo-check": self.kubo_check,
            "figure1": self.figure1,
            "figure2": self.figure2,
            "kernel-orders": self.kernel_orders,
            "moment-growth": self.moment_growth,
        }

    @property
    def experiment_names(self) -> List[str]:
        return list(self._stages)

    def set_status_callback(self, callback: Callable[[str], None]) -> None:
        self._status_callback = callback

    def _notify(self, message: str) -> None:
        """Log a progress message and forward it to the registered callback."""

        logger.info(message)
        if self._status_callback:
            self._status_callback(message)

    def _stage(self, name: str, compute: Callable[[], ExperimentResult]) -> ExperimentResult:
        started = datetime.now(timezone.utc).isoformat()
        self._notify(f"Running {name}...")
        try:
            result = compute()
            files = [self.store.write_table(result.name, result.header, result.rows)]
            for extra_name, (header, rows) in result.extra.items():
                files.append(self.store.write_table(extra_name, header, rows))
            self.store.log_experiment(name, started, True, "ok", files, result.summary)
            self._notify(f"{name} complete ({len(result.rows)} rows)")
            return result
        except ResponseError as exc:
            self.failures.append(exc)
            self.store.log_experiment(name, started, False, f"{type(exc).__name__}: {exc}")
            self._notify(f"{name} failed: {exc}")
            logger.exception("Experiment %s failed", name)
            raise

    def ground_state(self) -> ExperimentResult:
        return self._stage("ground-state", lambda: experiments.ground_state_table(self.config))

    def time_response(self) -> ExperimentResult:
        return self._stage("time-response", lambda: experiments.time_response_table(self.config))

    def freq_response(self) -> ExperimentResult:
        return self._stage("freq-response", lambda: experiments.freq_response_table(self.config))

    def sweep(self) -> ExperimentResult:
        return self._stage("sweep", lambda: experiments.sweep_eta_L(self.config))

    def lap_rate(self) -> ExperimentResult:
        cfg = self.config
        return self._stage(
            "lap-rate", lambda: experiments.lap_rate(experiments.impurity_strength(cfg), cfg.lap.omega, cfg.lap.etas)
        )

    def locality(self) -> ExperimentResult:
        return self._stage("locality", lambda: experiments.locality(self.config))

    def optimal_eta(self) -> ExperimentResult:
        cfg = self.config
        settings = cfg.optimal_eta
        return self._stage(
            "optimal-eta",
            lambda: experiments.optimal_eta(
                experiments.impurity_strength(cfg),
                settings.omega,
                settings.Ls,
                settings.etas,
                cfg.threads,
                window=settings.window,
                window_points=settings.window_points,
            ),
        )

    def distconv(self) -> ExperimentResult:
        cfg = self.config
        s = cfg.distconv
        return self._stage(
            "distconv",
            lambda: experiments.distconv(
                experiments.impurity_strength(cfg), s.Ls, s.L_ref, s.width, s.center, s.tail_widths, s.tau_step
            ),
        )

    def kubo_check(self) -> ExperimentResult:
        return self._stage("kubo-check", lambda: experiments.kubo_check(self.config))

    def figure1(self) -> ExperimentResult:
        return self._stage("figure1", lambda: experiments.figure1(self.config))

    def figure2(self) -> ExperimentResult:
        return self._stage("figure2", lambda: experiments.figure2(self.config))

    def kernel_orders(self) -> ExperimentResult:
        return self._stage("kernel-orders", lambda: experiments.kernel_orders(self.config))

    def moment_growth(self, initial: str = "site") -> ExperimentResult:
        return self._stage("moment-growth", lambda: experiments.moment_growth_table(self.config, initial))

    def run(self, name: str, **options) -> ExperimentResult:
        """Run one experiment and write the manifest whatever the outcome."""

        if name not in self._stages:
            raise KeyError(f"Unknown experiment {name!r}")
        try:
            return self._stages[name](**options)
        finally:
            self.finish()

    def run_all(self, names: Optional[Sequence[str]] = None) -> bool:
        """Run experiments in sequence, keep going past failures and write one manifest."""

        self._notify("Running all experiments...")
        ok = True
        for name in names or self.experiment_names:
            try:
                self._stages[name]()
            except ResponseError:
                ok = False
        self.finish()
        self._notify("All experiments complete" if ok else f"{len(self.failures)} experiment(s) failed")
        return ok

    def finish(self) -> str:
        return self.store.write_manifest(self.config.to_dict())
