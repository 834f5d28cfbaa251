"""Command-line driver: read an MPS model and a perturbation, sweep, verify, report.

Exit status is 0 when the oracle passes (or was skipped with ``--no-oracle``),
1 when it fails and 2 on any error, which is also described as a JSON object
on stderr.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
import time
from dataclasses import dataclass
from importlib import resources
from pathlib import Path

from . import __version__
from .embedding import ParametricLP
from .errors import ParamLPError
from .mps import read_mps
from .oracle import grid_verify
from .perturbation import GENERATOR, PerturbationSpec, generate_perturbation, parse_perturbation
from .report import write_reports
from .sweep import sweep

log = logging.getLogger(__name__)

BUILTIN_PREFIX = "builtin:"


@dataclass(frozen=True)
class RunConfig:
    epsilon: float = 0.015
    lambda_cap: float = 1e3
    probes_per_interval: int = 5
    seed: int | None = None
    out_dir: Path = Path("out")
    direction: str = "both"
    oracle: bool = True

    def __post_init__(self):
        if not self.epsilon > 0:
            raise ValueError(f"epsilon must be positive, got {self.epsilon}")
        if not self.lambda_cap > 0:
            raise ValueError(f"lambda_cap must be positive, got {self.lambda_cap}")
        if self.probes_per_interval < 1:
            raise ValueError("probes_per_interval must be at least 1")


def read_source(path: str) -> str:
    """Text of ``path``; ``builtin:NAME`` reads a file shipped in ``paramlp/data``."""
    if path.startswith(BUILTIN_PREFIX):
        name = path[len(BUILTIN_PREFIX):]
        return resources.files("paramlp").joinpath("data", name).read_text()
    return Path(path).read_text()


def run(config: RunConfig, mps_text: str, perturbation: PerturbationSpec, source: str = "") -> int:
    """Sweep, verify and write reports; returns the process exit status."""
    model = read_mps(mps_text)
    dA, db = generate_perturbation(model.lp, perturbation)
    p = ParametricLP(model.lp.A, model.lp.b, model.lp.c, dA, db)
    report = sweep(p, epsilon=config.epsilon, lambda_cap=config.lambda_cap, direction=config.direction)

    oracle = None
    oracle_seconds = None
    if config.oracle:
        start = time.perf_counter()
        oracle = grid_verify(p, report, config.probes_per_interval)
        oracle_seconds = time.perf_counter() - start

    m, n = model.lp.shape
    metadata = {
        "version": __version__,
        "source": source,
        "model": model.name,
        "rows": m,
        "columns": n,
        "structural_columns": model.n_structural,
        "perturbation": perturbation.mode.value,
        "seed": perturbation.seed if perturbation.mode.value == "random" else None,
        "generator": GENERATOR,
        "direction": config.direction,
        "probes_per_interval": config.probes_per_interval,
    }
    write_reports(config.out_dir, report, oracle, metadata, oracle_seconds)
    if oracle is None:
        return 0
    return 0 if oracle.passed else 1


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="paramlp",
        description="Uni-parametric LP analysis with the same parameter in the matrix and the right-hand side.",
    )
    ap.add_argument("--mps", required=True, help="MPS file, or builtin:NAME for a packaged model")
    src = ap.add_mutually_exclusive_group(required=True)
    src.add_argument("--perturb", metavar="PATH", help="perturbation file (explicit or random)")
    src.add_argument("--random-seed", type=int, metavar="N", help="random perturbation with default parameters")
    ap.add_argument("--epsilon", type=float, default=0.015, help="initial probe step past each breakpoint")
    ap.add_argument("--lambda-cap", type=float, default=1e3, help="stop walking once |lambda| exceeds this")
    ap.add_argument("--probes", type=int, default=5, help="oracle probes per interval")
    ap.add_argument("--out", default="out", help="output directory")
    side = ap.add_mutually_exclusive_group()
    side.add_argument("--left", dest="direction", action="store_const", const="left", help="sweep left of 0 only")
    side.add_argument("--right", dest="direction", action="store_const", const="right", help="sweep right of 0 only")
    side.add_argument("--both", dest="direction", action="store_const", const="both", help="sweep both sides (default)")
    ap.set_defaults(direction="both")
    ap.add_argument("--no-oracle", action="store_true", help="skip grid verification")
    ap.add_argument("-v", "--verbose", action="store_true", help="log progress and warnings")
    return ap


def _diagnostic(exc: BaseException) -> str:
    info = {"error": type(exc).__name__, "message": str(exc)}
    for attr in ("line", "lam", "context"):
        if getattr(exc, attr, None) is not None:
            info[attr] = getattr(exc, attr)
    return json.dumps(info, default=repr)


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.ERROR, format="%(levelname)s %(name)s: %(message)s")
    try:
        if args.perturb is not None:
            spec = parse_perturbation(read_source(args.perturb))
        else:
            spec = PerturbationSpec.random(args.random_seed)
        config = RunConfig(
            epsilon=args.epsilon,
            lambda_cap=args.lambda_cap,
            probes_per_interval=args.probes,
            seed=spec.seed if args.perturb is None else None,
            out_dir=Path(args.out),
            direction=args.direction,
            oracle=not args.no_oracle,
        )
        status = run(config, read_source(args.mps), spec, source=args.mps)
    except (ParamLPError, OSError, ValueError) as exc:
        print(_diagnostic(exc), file=sys.stderr)
        return 2
    if status:
        print(json.dumps({"error": "OracleFailure", "message": "grid verification failed", "out": args.out}), file=sys.stderr)
    return status


if __name__ == "__main__":
    sys.exit(main())
