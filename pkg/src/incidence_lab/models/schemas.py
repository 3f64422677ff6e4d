"""Pydantic models for experiment configs, reports and MCP tool responses."""

from typing import Any, Literal, Optional

from pydantic import BaseModel, ConfigDict, Field

GeneratorName = Literal[
    "plane_grid",
    "elekes_grid",
    "grid_rich_lines",
    "complex_cartesian",
    "example_ex1",
    "example_ex2",
    "unit_circles",
    "plane_unit_circles",
    "random_uniform",
]
AuditName = Literal[
    "partition",
    "crossing",
    "st",
    "kst",
    "domain",
    "pach_sharir",
    "harnack",
    "bezout",
    "admissible",
    "good_family",
    "unit_distance",
    "duality",
]
OutputFormat = Literal["json", "csv"]


class ExperimentConfig(BaseModel):
    """One experiment: a generator call plus the decomposition and audit choices."""
    model_config = ConfigDict(extra="forbid")

    generator: GeneratorName
    params: dict[str, Any] = Field(default_factory=dict)
    seed: int = Field(default=0, ge=0, lt=2**64)
    degree: Optional[int] = Field(None, ge=1, description="First-level degree D")
    second_degree: Optional[int] = Field(None, ge=1, description="Second-level degree E")
    rho: str = "1/4"
    audits: list[AuditName] = Field(default_factory=list)
    decompose: Optional[bool] = Field(
        None, description="Run the two-level decomposition; None decides from the audits"
    )
    output: Optional[str] = Field(None, description="Report path")
    svg: Optional[str] = Field(None, description="SVG path for the partition or drawing")


class FixtureSummary(BaseModel):
    """Size and degrees-of-freedom data of a generated fixture."""

    name: str
    dimension: int
    m: int
    n: int
    k: int
    c0: int


class DegreeChoice(BaseModel):
    """A degree, the formula value it came from, and whether clamping changed it."""

    value: int
    formula: Optional[str] = None
    clamped: bool = False


class StageCounts(BaseModel):
    """Incidences split by where their point ends up."""

    interior: int = 0
    boundary: int = 0
    second_level: int = 0
    residual: int = 0

    @property
    def total(self) -> int:
        return self.interior + self.boundary + self.second_level + self.residual


class SecondLevelSummary(BaseModel):
    factor: str
    points: int
    degree: DegreeChoice
    family: list[str] = Field(default_factory=list)
    family_degree: int = 0
    strict_cells: int = 0
    boundary_points: int = 0
    constant: Optional[str] = None
    error: Optional[str] = None


class AuditOutcome(BaseModel):
    """Result of one audit; ``details`` holds the audit's own report fields."""

    name: str
    passed: bool
    details: dict[str, Any] = Field(default_factory=dict)


class Report(BaseModel):
    """Everything a run produced, serialized with the config that produced it."""

    version: int = 1
    config: ExperimentConfig
    fixture: FixtureSummary
    incidences: int
    stages: StageCounts
    first_degree: Optional[DegreeChoice] = None
    partition: Optional[dict[str, Any]] = None
    cell_incidences: list[int] = Field(default_factory=list)
    second_level: list[SecondLevelSummary] = Field(default_factory=list)
    audits: list[AuditOutcome] = Field(default_factory=list)
    ratios: dict[str, str] = Field(default_factory=dict)
    non_conclusive: bool = False
    errors: list[str] = Field(default_factory=list)
    timings: Optional[dict[str, float]] = None

    @property
    def passed(self) -> bool:
        return all(a.passed for a in self.audits) and not self.non_conclusive


class CampaignRow(BaseModel):
    """One line of the ratio-vs-size table."""

    generator: str
    size: int
    m: int
    n: int
    incidences: int
    audit: str
    ratio: Optional[float] = None
    ratio_text: Optional[str] = None
    passed: bool


class CampaignSummary(BaseModel):
    rows: list[CampaignRow] = Field(default_factory=list)
    reports: list[Report] = Field(default_factory=list)
    pass_rate: Optional[float] = None
    outputs: list[str] = Field(default_factory=list)


# MCP Tool Response Models

class FixtureResponse(BaseModel):
    """Response for generating a fixture."""
    success: bool = Field(description="Whether the operation succeeded")
    fixture: Optional[FixtureSummary] = Field(None, description="Fixture sizes")
    points: Optional[list[Any]] = Field(None, description="Points as exact rational strings")
    surfaces: Optional[list[Any]] = Field(None, description="Surfaces with their kind and data")
    error: Optional[str] = Field(None, description="Error message if operation failed")


class CountResponse(BaseModel):
    """Response for brute-force incidence counting."""
    success: bool = Field(description="Whether the operation succeeded")
    incidences: Optional[int] = Field(None, description="Number of incident pairs")
    ratio: Optional[str] = Field(None, description="I / (m^2/3 n^2/3 + m + n), high precision")
    csv: Optional[str] = Field(None, description="Incidence pairs as CSV when requested")
    error: Optional[str] = Field(None, description="Error message if operation failed")


class PartitionResponse(BaseModel):
    """Response for building a partition."""
    success: bool = Field(description="Whether the operation succeeded")
    partition: Optional[dict[str, Any]] = Field(None, description="Serialized partition")
    error: Optional[str] = Field(None, description="Error message if operation failed")


class ReportResponse(BaseModel):
    """Response for pipeline and audit runs."""
    success: bool = Field(description="Whether the operation succeeded")
    report: Optional[Report] = Field(None, description="Full run report")
    passed: Optional[bool] = Field(None, description="Whether every requested audit passed")
    error: Optional[str] = Field(None, description="Error message if operation failed")


class CampaignResponse(BaseModel):
    """Response for a campaign over several configs."""
    success: bool = Field(description="Whether the operation succeeded")
    summary: Optional[CampaignSummary] = Field(None, description="Rows and written outputs")
    error: Optional[str] = Field(None, description="Error message if operation failed")


class PlotResponse(BaseModel):
    """Response for SVG emission."""
    success: bool = Field(description="Whether the operation succeeded")
    path: Optional[str] = Field(None, description="Path of the written SVG")
    error: Optional[str] = Field(None, description="Error message if operation failed")
