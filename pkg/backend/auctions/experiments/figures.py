"""
Figure data and single-cell mechanism evaluation.

Every (m, mechanism) cell draws from its own seed, derived from the spec seed,
m and the mechanism's column index, so cells can run on any number of workers
in any order and still write identical files.
"""

import logging
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Dict, List, Optional, Union

import pandas as pd
from joblib import Parallel, delayed

from ..core import Estimate, MechanismKind, ParameterError, SampleConfig
from ..distributions import ProductPrior
from ..mechanisms import eval_brev, eval_cdw, eval_simple, eval_srev
from ..sampling import derive_seed
from .reporting import RESULT_COLUMNS, manifest_path, result_row, write_manifest, write_results
from .specs import ExperimentSpec, MechanismSpec

logger = logging.getLogger(__name__)

# additive across items, so their quadrature path covers every m
ADDITIVE = (MechanismKind.WEL, MechanismKind.VCG)


def evaluate_mechanism(kind: Union[MechanismKind, str], prior: ProductPrior, bidders: int, cfg: SampleConfig) -> Estimate:
    """Dispatch one mechanism evaluation."""
    kind = MechanismKind(kind.upper()) if isinstance(kind, str) else kind
    if kind in (MechanismKind.WEL, MechanismKind.VCG, MechanismKind.BSPA):
        return eval_simple(kind, prior, bidders, cfg)
    if kind is MechanismKind.SREV:
        return eval_srev(prior, bidders, cfg)
    if kind is MechanismKind.BREV:
        return eval_brev(prior, bidders, cfg)
    if kind is MechanismKind.CDW:
        return eval_cdw(prior, bidders, cfg)
    raise ParameterError("kind", f"unsupported: {kind.value}")


def uses_quadrature(spec: ExperimentSpec, kind: MechanismKind, m: int) -> bool:
    return spec.sample.prefer_quadrature and (kind in ADDITIVE or m == 1)


def _run_cell(spec: ExperimentSpec, m: int, index: int, mechanism: MechanismSpec) -> Dict[str, Any]:
    kind = mechanism.mechanism
    cfg = spec.sample.config(seed=derive_seed(spec.sample.seed, m, index), quadrature=uses_quadrature(spec, kind, m))
    estimate = evaluate_mechanism(kind, spec.build_prior(m), mechanism.bidders, cfg)
    return result_row(spec.instance_id(m), mechanism.name, mechanism.bidders, m, estimate)


@dataclass
class FigureResult:
    """Rows of a figure run and where they were written."""

    frame: pd.DataFrame
    csv_path: Optional[Path] = None
    manifest_path: Optional[Path] = None


def build_manifest(spec: ExperimentSpec) -> Dict[str, Any]:
    return {
        "name": spec.name,
        "columns": RESULT_COLUMNS,
        "spec": spec.model_dump(mode="json"),
        "instances": {spec.instance_id(m): spec.build_prior(m).spec() for m in spec.m_values},
    }


def run_figure(spec: ExperimentSpec, out: Optional[Union[str, Path]] = None) -> FigureResult:
    """
    Evaluate every (m, mechanism) cell of a spec.

    Args:
        spec: Validated experiment spec
        out: CSV path; defaults to spec.output, nothing is written when both are None

    Returns:
        FigureResult with one row per cell, ordered by m then mechanism
    """
    cells = list(spec.cells())
    logger.info(f"Running {spec.name}: {len(cells)} cells over m={spec.m_min}..{spec.m_max}")

    rows: List[Dict[str, Any]] = Parallel(n_jobs=spec.sample.n_jobs)(
        delayed(_run_cell)(spec, m, index, mechanism) for m, index, mechanism in cells
    )

    target = out or spec.output
    if target is None:
        return FigureResult(pd.DataFrame(rows, columns=RESULT_COLUMNS))

    frame = write_results(rows, target)
    manifest = write_manifest(build_manifest(spec), manifest_path(target))
    logger.info(f"Finished {spec.name}")
    return FigureResult(frame, Path(target), manifest)
