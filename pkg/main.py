"""Entry point for the boxresponse command-line tool.

This module wires together logging, the configuration layer and the
experiment service, then dispatches to one subcommand. Keeping the top-level
script small makes it easy to debug start-up issues (a bad config file, an
unwritable output directory) without reading through the numerical code.

Exit codes: 0 on success, 2 on configuration or model errors, 3 on numeric
errors (singular shifts, threshold proximity, norm drift, failed fits).
"""

import argparse
import logging
import os
import sys
from typing import Any, Dict, List, Optional

from src.config import config
from src.config.config import apply_overrides, load_config
from src.errors import ConfigError, DimensionError, InvalidModelError, NumericError, ResponseError
from src.experiment_service import ExperimentService

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_NUMERIC = 3


def _grid(values: List[float]) -> Dict[str, Any]:
    start, stop, num = values
    return {"start": start, "stop": stop, "num": int(num)}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="boxresponse",
        description="Linear response of truncated one-dimensional Hamiltonians and its convergence laws.",
    )
    parser.add_argument("--config", help="JSON file mirroring ExperimentConfig")
    parser.add_argument("--out", help=f"output directory (default {config.OUT_DIR})")
    parser.add_argument("--threads", type=int, help="worker threads for independent cells")
    parser.add_argument("--seed", type=int, help="seed for randomized self-check vectors")
    parser.add_argument("--log-level", default=os.getenv("LOG_LEVEL", "INFO"), help="logging level")
    sub = parser.add_subparsers(dest="command", required=True)

    def command(name: str, help_text: str) -> argparse.ArgumentParser:
        p = sub.add_parser(name, help=help_text)
        p.add_argument("--V", type=float, help="impurity strength of the lattice model")
        return p

    for name, help_text in (
        ("ground-state", "ground-state energies of the probe boxes"),
        ("time-response", "K_L(tau) for the probe boxes"),
        ("freq-response", "K_L(omega + i eta) by sum over states and by resolvent"),
    ):
        p = command(name, help_text)
        p.add_argument("--L", type=int, nargs="+", dest="probe_Ls", help="box half-widths")
        p.add_argument("--etas", type=float, nargs="+")
        p.add_argument("--omegas", type=float, nargs="+")
        p.add_argument("--taus", type=float, nargs=3, metavar=("START", "STOP", "NUM"))

    p = command("sweep", "error against the exact response over (omega, eta, L)")
    p.add_argument("--Ls", type=int, nargs="+")
    p.add_argument("--etas", type=float, nargs="+")
    p.add_argument("--omegas", type=float, nargs="+")

    p = command("lap-rate", "boundary-value convergence rate of the exact response")
    p.add_argument("--omega", type=float)
    p.add_argument("--etas", type=float, nargs="+")

    p = command("locality", "exponential decay rate of the resolvent kernel")
    p.add_argument("--omega", type=float)
    p.add_argument("--etas", type=float, nargs="+")
    p.add_argument("--L", type=int)

    p = command("optimal-eta", "smoothing width minimizing the total error per box")
    p.add_argument("--omega", type=float)
    p.add_argument("--Ls", type=int, nargs="+")
    p.add_argument("--etas", type=float, nargs="+")
    p.add_argument("--window", type=float, help="half-width of the omega window the error is maximized over")

    p = command("distconv", "distributional convergence of K_L against a test function")
    p.add_argument("--Ls", type=int, nargs="+")
    p.add_argument("--L-ref", type=int, dest="L_ref")
    p.add_argument("--width", type=float)
    p.add_argument("--center", type=float)

    p = command("kubo-check", "second-order remainder of the Kubo formula")
    p.add_argument("--epsilons", type=float, nargs="+")
    p.add_argument("--drive", choices=config.DRIVES)
    p.add_argument("--T", type=float)
    p.add_argument("--dt", type=float)
    p.add_argument("--L", type=int)

    for name in ("figure1", "figure2"):
        p = command(name, f"data behind {name}")
        p.add_argument("--Ls", type=int, nargs="+")

    p = command("kernel-orders", "convergence order of kernel-smoothed densities")
    p.add_argument("--families", nargs="+")
    p.add_argument("--etas", type=float, nargs="+")
    p.add_argument("--omega", type=float)
    p.add_argument("--L", type=int)

    p = command("moment-growth", "position and difference moments under free evolution")
    p.add_argument("--L", type=int)
    p.add_argument("--taus", type=float, nargs=3, metavar=("START", "STOP", "NUM"))
    p.add_argument("--initial", choices=("site", "ground"), default="site")

    command("all", "run every experiment and write one manifest")
    return parser


# (argument, config path) per subcommand; the path is relative to ExperimentConfig.
_OVERRIDES = {
    "ground-state": [("probe_Ls", "probe_Ls"), ("etas", "eta_values"), ("omegas", "omegas"), ("taus", "taus")],
    "sweep": [("Ls", "L_values"), ("etas", "eta_values"), ("omegas", "omegas")],
    "lap-rate": [("omega", "lap.omega"), ("etas", "lap.etas")],
    "locality": [("omega", "locality.omega"), ("etas", "locality.etas"), ("L", "locality.L")],
    "optimal-eta": [
        ("omega", "optimal_eta.omega"),
        ("Ls", "optimal_eta.Ls"),
        ("etas", "optimal_eta.etas"),
        ("window", "optimal_eta.window"),
    ],
    "distconv": [
        ("Ls", "distconv.Ls"),
        ("L_ref", "distconv.L_ref"),
        ("width", "distconv.width"),
        ("center", "distconv.center"),
    ],
    "kubo-check": [
        ("epsilons", "dynamics.epsilons"),
        ("drive", "dynamics.drive"),
        ("T", "dynamics.T"),
        ("dt", "dynamics.dt"),
        ("L", "dynamics.L"),
    ],
    "figure1": [("Ls", "figures.figure1_Ls")],
    "figure2": [("Ls", "figures.figure2_Ls")],
    "kernel-orders": [
        ("families", "kernel.families"),
        ("etas", "kernel.etas"),
        ("omega", "kernel.omega"),
        ("L", "kernel.L"),
    ],
    "moment-growth": [("L", "dynamics.L"), ("taus", "taus")],
}
_OVERRIDES["time-response"] = _OVERRIDES["ground-state"]
_OVERRIDES["freq-response"] = _OVERRIDES["ground-state"]


def collect_overrides(args: argparse.Namespace) -> Dict[str, Any]:
    """Translate parsed flags into a nested override dict."""

    overrides: Dict[str, Any] = {}

    def put(path: str, value: Any) -> None:
        node = overrides
        *parents, leaf = path.split(".")
        for key in parents:
            node = node.setdefault(key, {})
        node[leaf] = value

    for flag, path in (("out", "out_dir"), ("threads", "threads"), ("seed", "seed"), ("V", "model.V")):
        if getattr(args, flag, None) is not None:
            put(path, getattr(args, flag))
    for flag, path in _OVERRIDES.get(args.command, []):
        value = getattr(args, flag, None)
        if value is None:
            continue
        put(path, _grid(value) if flag == "taus" else value)
    return overrides


def main(argv: Optional[List[str]] = None) -> int:
    """Parse flags, configure logging, run the requested experiment and return the exit code.

    Logging defaults to ``INFO`` (experiment start/finish, file writes, fit
    summaries). Set ``LOG_LEVEL=DEBUG`` or pass ``--log-level DEBUG`` to see
    per-cell diagnostics emitted throughout the codebase.
    """

    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=getattr(logging, str(args.log_level).upper(), logging.INFO),
        format="%(asctime)s [%(levelname)s] %(name)s - %(message)s",
    )
    try:
        cfg = apply_overrides(load_config(args.config), collect_overrides(args))
        service = ExperimentService(cfg)
        if args.command == "all":
            ok = service.run_all()
            if not ok:
                first = service.failures[0]
                return EXIT_NUMERIC if isinstance(first, NumericError) else EXIT_CONFIG
            return EXIT_OK
        options = {"initial": args.initial} if args.command == "moment-growth" else {}
        service.run(args.command, **options)
    except (ConfigError, InvalidModelError, DimensionError, ValueError) as exc:
        logger.error("%s", exc)
        return EXIT_CONFIG
    except NumericError as exc:
        logger.error("%s", exc)
        return EXIT_NUMERIC
    except ResponseError as exc:
        logger.error("%s", exc)
        return EXIT_NUMERIC
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
