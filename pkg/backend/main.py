"""
Competition Lab - command-line driver
"""

import argparse
import json
import logging
import sys
from pathlib import Path
from typing import List, Optional

import pandas as pd
from pydantic import ValidationError

from auctions.analysis import CompetitionConfig, competition_sweep
from auctions.core import AuctionLabError
from auctions.distributions import EqualRevenue, Exponential, iid_prior
from auctions.experiments import ExperimentSpec, SampleSpec, SuiteConfig, figure_preset, run_figure, run_suite
from auctions.quantile_game import case_probabilities, dominance_report, mixture_weights_m3
from auctions.sampling import derive_seed
from config import settings

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_CHECK_FAILED = 1
EXIT_USAGE = 2

EXPECTED_CASES = {2: ("1/3", "2/3"), 3: ("17/36", "1/9", "1/12", "1/3")}
EXPECTED_MIXTURE = ("505/972", "491/1944", "443/1944")


def configure_logging() -> None:
    level = logging.DEBUG if settings.DEBUG else getattr(logging, settings.LOG_LEVEL.upper(), logging.INFO)
    logging.basicConfig(level=level, format="%(asctime)s - %(name)s - %(levelname)s - %(message)s")


def emit(text: str, out: Optional[str]) -> None:
    """Write text to a file, or to stdout when no path is given."""
    if out is None:
        sys.stdout.write(text if text.endswith("\n") else text + "\n")
        return
    target = Path(out)
    target.parent.mkdir(parents=True, exist_ok=True)
    target.write_text(text if text.endswith("\n") else text + "\n")
    logger.info(f"Wrote {target}")


def sample_spec(seed: Optional[int], samples: Optional[int]) -> SampleSpec:
    return SampleSpec(
        seed=settings.DEFAULT_SEED if seed is None else seed,
        samples=samples or settings.DEFAULT_SAMPLES,
        chunks=settings.DEFAULT_CHUNKS,
        n_jobs=settings.N_JOBS,
    )


# ==========================================
# Subcommands
# ==========================================


def cmd_figure1(args: argparse.Namespace) -> int:
    """Emit the data of one competition figure panel."""
    spec = figure_preset(args.panel, shifted=args.shifted, m_max=args.m_max, sample=sample_spec(args.seed, args.samples))
    out = args.out or str(Path(settings.OUTPUT_DIR) / f"{spec.name}.csv")
    result = run_figure(spec, out=out)
    logger.info(f"{len(result.frame)} rows in {result.csv_path}, manifest {result.manifest_path}")
    return EXIT_OK


def cmd_cc_const(args: argparse.Namespace) -> int:
    """Competition constants C(n, alpha) as CSV rows."""
    config = CompetitionConfig(quad_tolerance=settings.QUAD_TOLERANCE)
    results = competition_sweep(args.n, args.alpha, n_jobs=settings.N_JOBS, config=config)
    frame = pd.DataFrame([result.to_row() for result in results])
    emit(frame.to_csv(index=False, float_format="%.12g"), args.out)
    return EXIT_OK if all(result.within_bounds for result in results) else EXIT_CHECK_FAILED


def cmd_verify(args: argparse.Namespace) -> int:
    """Run one verification suite and write its report as JSON."""
    config = SuiteConfig(
        seed=settings.DEFAULT_SEED if args.seed is None else args.seed,
        samples=args.samples or settings.DEFAULT_SAMPLES,
        chunks=settings.DEFAULT_CHUNKS,
        margin=settings.STDERR_MARGIN,
        escalation=settings.ESCALATION_FACTOR,
        n_jobs=settings.N_JOBS,
        batch_size=settings.BATCH_SIZE,
        groups=settings.MEDIAN_OF_MEANS_GROUPS,
    )
    report = run_suite(args.suite, config)
    emit(report.to_json(), args.out)
    return EXIT_OK if report.passed else EXIT_CHECK_FAILED


def cmd_mech_eval(args: argparse.Namespace) -> int:
    """Evaluate a JSON experiment spec."""
    spec = ExperimentSpec.model_validate_json(Path(args.config).read_text())
    result = run_figure(spec, out=args.out)
    if result.csv_path is None:
        emit(result.frame.to_csv(index=False, float_format="%.12g"), None)
    return EXIT_OK


def cmd_qgame_verify(args: argparse.Namespace) -> int:
    """Exact case probabilities plus a per-matrix dominance sweep."""
    seed = settings.DEFAULT_SEED if args.seed is None else args.seed
    found = tuple(f"{p.numerator}/{p.denominator}" for p in case_probabilities(args.m))
    ok = found == EXPECTED_CASES[args.m]

    payload = {"m": args.m, "trials": args.trials, "seed": seed, "case_probabilities": list(found)}
    if args.m == 3:
        mixture = mixture_weights_m3()
        payload["mixture_weights"] = list(mixture.as_strings())
        payload["mixture_dominates_cdw"] = mixture.dominates_cdw
        ok = ok and mixture.as_strings() == EXPECTED_MIXTURE and mixture.dominates_cdw

    sweeps = {}
    for index, family in enumerate((Exponential(), EqualRevenue())):
        sweep = dominance_report(iid_prior(family, args.m), args.trials, derive_seed(seed, index))
        sweeps[family.kind.value] = sweep.to_dict()
        ok = ok and bool(sweep.holds)
    payload["dominance"] = sweeps
    payload["min_gap"] = min(sweep["min_gap"] for sweep in sweeps.values())
    payload["status"] = "pass" if ok else "fail"

    emit(json.dumps(payload, indent=2, sort_keys=True), args.out)
    return EXIT_OK if ok else EXIT_CHECK_FAILED


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="competition-lab", description="Competition complexity of multi-item auctions")
    commands = parser.add_subparsers(dest="command", required=True)

    figure = commands.add_parser("figure1", help="figure data for panel a or b")
    figure.add_argument("--panel", choices=["a", "b"], required=True)
    figure.add_argument("--out", help="CSV path (default: OUTPUT_DIR/<name>.csv)")
    figure.add_argument("--shifted", action="store_true", help="panel a with exponentials shifted by one")
    figure.add_argument("--m-max", type=int, default=40)
    figure.add_argument("--seed", type=int)
    figure.add_argument("--samples", type=int)
    figure.set_defaults(handler=cmd_figure1)

    cc = commands.add_parser("cc-const", help="competition constants C(n, alpha)")
    cc.add_argument("--n", type=int, nargs="+", required=True)
    cc.add_argument("--alpha", type=float, nargs="+", required=True)
    cc.add_argument("--out")
    cc.set_defaults(handler=cmd_cc_const)

    verify = commands.add_parser("verify", help="run a verification suite")
    verify.add_argument("--suite", required=True)
    verify.add_argument("--seed", type=int)
    verify.add_argument("--samples", type=int)
    verify.add_argument("--out")
    verify.set_defaults(handler=cmd_verify)

    mech = commands.add_parser("mech-eval", help="evaluate a JSON experiment spec")
    mech.add_argument("--config", required=True)
    mech.add_argument("--out", help="CSV path (overrides the spec's output)")
    mech.set_defaults(handler=cmd_mech_eval)

    qgame = commands.add_parser("qgame-verify", help="quantile game case analysis and dominance")
    qgame.add_argument("--m", type=int, choices=[2, 3], required=True)
    qgame.add_argument("--trials", type=int, required=True)
    qgame.add_argument("--seed", type=int)
    qgame.add_argument("--out")
    qgame.set_defaults(handler=cmd_qgame_verify)

    return parser


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    configure_logging()
    try:
        return args.handler(args)
    except (AuctionLabError, ValidationError) as e:
        logger.error(f"{args.command}: {e}")
        return EXIT_USAGE
    except OSError as e:
        logger.error(f"{args.command}: I/O failure: {e}")
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
