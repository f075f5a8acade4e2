"""
Experiment specifications.

Specs are JSON documents validated with pydantic. A spec names a prior
(family records, cycled over items), a list of mechanisms with bidder counts,
an inclusive m range and the sampling settings.
"""

import logging
from typing import Iterator, List, Optional, Tuple

from pydantic import BaseModel, Field, field_validator, model_validator

from ..core import EstimateMethod, MechanismKind, SampleConfig
from ..distributions import FamilySpec, ProductPrior, make_marginal

logger = logging.getLogger(__name__)

FIGURE_M_MAX = 40


class MechanismSpec(BaseModel):
    """One mechanism column of an experiment."""

    kind: str
    bidders: int = Field(default=1, ge=1)
    label: Optional[str] = None

    @field_validator("kind")
    @classmethod
    def _known_kind(cls, value: str) -> str:
        key = value.strip().upper()
        if key not in {k.value for k in MechanismKind}:
            raise ValueError(f"unknown mechanism {value!r}")
        return key

    @property
    def mechanism(self) -> MechanismKind:
        return MechanismKind(self.kind)

    @property
    def name(self) -> str:
        return self.label or f"{self.kind}_{self.bidders}"


class SampleSpec(BaseModel):
    """Sampling settings of an experiment."""

    seed: int = Field(default=20240601, ge=0, lt=2**64)
    samples: int = Field(default=200_000, ge=1)
    chunks: int = Field(default=8, ge=1)
    n_jobs: int = 1
    prefer_quadrature: bool = True  # use quadrature/closed forms wherever a mechanism has them

    def config(self, seed: Optional[int] = None, quadrature: bool = False) -> SampleConfig:
        method = EstimateMethod.QUADRATURE if quadrature else EstimateMethod.MONTE_CARLO
        return SampleConfig(seed=self.seed if seed is None else seed, samples=self.samples, chunks=self.chunks, method=method)


class ExperimentSpec(BaseModel):
    """
    A reproducible experiment.

    Attributes:
        name: Experiment name, also the instance id prefix
        prior: Family records assigned to items cyclically (one record = i.i.d.)
        mechanisms: Mechanisms and bidder counts to evaluate
        m_min: Smallest item count
        m_max: Largest item count (inclusive)
        sample: Sampling settings
        output: CSV path (the manifest is written next to it)
    """

    name: str
    prior: List[FamilySpec]
    mechanisms: List[MechanismSpec]
    m_min: int = 1
    m_max: int = 1
    sample: SampleSpec = Field(default_factory=SampleSpec)
    output: Optional[str] = None

    @field_validator("prior")
    @classmethod
    def _valid_families(cls, value: List[FamilySpec]) -> List[FamilySpec]:
        if not value:
            raise ValueError("prior needs at least one family record")
        for record in value:
            make_marginal(record)
        return value

    @field_validator("mechanisms")
    @classmethod
    def _some_mechanism(cls, value: List[MechanismSpec]) -> List[MechanismSpec]:
        if not value:
            raise ValueError("at least one mechanism is required")
        return value

    @model_validator(mode="after")
    def _nonempty_range(self) -> "ExperimentSpec":
        if self.m_min < 1:
            raise ValueError(f"m_min must be >= 1, got {self.m_min}")
        if self.m_max < self.m_min:
            raise ValueError(f"empty m range: m_min={self.m_min} > m_max={self.m_max}")
        return self

    @property
    def m_values(self) -> List[int]:
        return list(range(self.m_min, self.m_max + 1))

    def build_prior(self, m: int) -> ProductPrior:
        marginals = [make_marginal(self.prior[j % len(self.prior)]) for j in range(m)]
        return ProductPrior(tuple(marginals))

    def instance_id(self, m: int) -> str:
        return f"{self.name}-m{m}"

    def cells(self) -> Iterator[Tuple[int, int, MechanismSpec]]:
        """(m, column index, mechanism) in output order."""
        for m in self.m_values:
            for index, mechanism in enumerate(self.mechanisms):
                yield m, index, mechanism


def figure_preset(
    panel: str, shifted: bool = False, m_max: int = FIGURE_M_MAX, sample: Optional[SampleSpec] = None
) -> ExperimentSpec:
    """
    Spec for one panel of the competition figure.

    Panel "a" puts unit exponential items (or exponentials shifted by one when
    `shifted`) against CDW_1, BSPA with 2 and 3 bidders and VCG with 3 and 4
    bidders. Panel "b" puts equal-revenue items against CDW_1, BSPA with 3
    bidders and VCG with 5 bidders.
    """
    key = panel.strip().lower()
    if key == "a":
        family = {"family": "exponential"}
        if shifted:
            family = {"family": "shifted_exponential", "params": {"rate": 1.0, "shift": 1.0}}
        mechanisms = [("CDW", 1), ("BSPA", 2), ("BSPA", 3), ("VCG", 3), ("VCG", 4)]
        name = "fig1a_shifted" if shifted else "fig1a"
    elif key == "b":
        family = {"family": "equal_revenue"}
        mechanisms = [("CDW", 1), ("BSPA", 3), ("VCG", 5)]
        name = "fig1b"
    else:
        raise ValueError(f"unknown panel {panel!r} (expected 'a' or 'b')")

    return ExperimentSpec(
        name=name,
        prior=[FamilySpec(**family)],
        mechanisms=[MechanismSpec(kind=kind, bidders=bidders) for kind, bidders in mechanisms],
        m_min=1,
        m_max=m_max,
        sample=sample or SampleSpec(),
    )
