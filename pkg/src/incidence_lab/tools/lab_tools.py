"""FastMCP tools for the incidence laboratory."""

import logging
from typing import Annotated, Any

from fastmcp import FastMCP
from pydantic import Field

from incidence_lab.experiments.generators import surface_dict
from incidence_lab.incidence.engine import export_csv, st_ratio
from incidence_lab.models.schemas import (
    AuditName,
    CampaignResponse,
    CountResponse,
    ExperimentConfig,
    FixtureResponse,
    GeneratorName,
    OutputFormat,
    PartitionResponse,
    PlotResponse,
    ReportResponse,
)
from incidence_lab.services.laboratory import Laboratory, parse_config

logger = logging.getLogger(__name__)


GeneratorArg = Annotated[
    GeneratorName,
    Field(description="Fixture generator, e.g. 'plane_grid', 'example_ex1', 'complex_cartesian'"),
]
ParamsArg = Annotated[
    dict[str, Any] | None,
    Field(None, description="Generator parameters, e.g. {'k': 10, 's': 3, 't': 5} for plane_grid"),
]
SeedArg = Annotated[int, Field(0, ge=0, description="Seed for every random choice")]


def _config(generator: str, params: dict[str, Any] | None, seed: int,
            **extra: Any) -> ExperimentConfig:
    return parse_config({"generator": generator, "params": params or {}, "seed": seed,
                         **{k: v for k, v in extra.items() if v is not None}})


def register_tools(mcp: FastMCP, lab: Laboratory) -> None:
    """Register all laboratory tools with the FastMCP server."""

    @mcp.tool()
    async def lab_generate(
        generator: GeneratorArg,
        params: ParamsArg = None,
        seed: SeedArg = 0,
    ) -> FixtureResponse:
        """Generate a named point/surface fixture.

        Coordinates come back as exact rational strings. Use this to inspect a
        configuration before counting or decomposing it.
        """
        try:
            fixture = await lab.generate(_config(generator, params, seed))
            data = fixture.to_dict()
            return FixtureResponse(success=True, fixture=fixture.summary(),
                                   points=data["points"],
                                   surfaces=[surface_dict(s) for s in fixture.surfaces])
        except Exception as e:
            logger.error(f"Error generating fixture: {e}")
            return FixtureResponse(success=False, error=f"Failed to generate fixture: {str(e)}")

    @mcp.tool()
    async def lab_count(
        generator: GeneratorArg,
        params: ParamsArg = None,
        seed: SeedArg = 0,
        format: Annotated[
            OutputFormat,
            Field("json", description="'csv' also returns every incident pair"),
        ] = "json",
    ) -> CountResponse:
        """Count point-surface incidences exactly by brute force."""
        try:
            inc = await lab.count(_config(generator, params, seed))
            return CountResponse(success=True, incidences=inc.size,
                                 ratio=st_ratio(inc).ratio_text,
                                 csv=export_csv(inc) if format == "csv" else None)
        except Exception as e:
            logger.error(f"Error counting incidences: {e}")
            return CountResponse(success=False, error=f"Failed to count incidences: {str(e)}")

    @mcp.tool()
    async def lab_partition(
        generator: GeneratorArg,
        params: ParamsArg = None,
        seed: SeedArg = 0,
        degree: Annotated[
            int | None,
            Field(None, ge=1, le=32, description="Target degree D; default from the m, n formula"),
        ] = None,
    ) -> PartitionResponse:
        """Build the first-level polynomial partition of the fixture's points."""
        try:
            partition = await lab.partition(_config(generator, params, seed, degree=degree))
            return PartitionResponse(success=True, partition=partition.to_dict())
        except Exception as e:
            logger.error(f"Error building partition: {e}")
            return PartitionResponse(success=False, error=f"Failed to build partition: {str(e)}")

    @mcp.tool()
    async def lab_pipeline(
        generator: GeneratorArg,
        params: ParamsArg = None,
        seed: SeedArg = 0,
        degree: Annotated[int | None, Field(None, ge=1, le=32, description="First-level D")] = None,
        second_degree: Annotated[
            int | None, Field(None, ge=1, le=32, description="Second-level E")
        ] = None,
        rho: Annotated[str, Field("1/4", description="Exact rational rho, E >= rho * deg Z")] = "1/4",
    ) -> ReportResponse:
        """Run the two-level decomposition and report incidences per stage.

        Stage counts (interior, boundary, second level, residual) always add up to
        the brute-force total.
        """
        try:
            report = await lab.pipeline(_config(generator, params, seed, degree=degree,
                                                second_degree=second_degree, rho=rho))
            return ReportResponse(success=True, report=report, passed=report.passed)
        except Exception as e:
            logger.error(f"Error running pipeline: {e}")
            return ReportResponse(success=False, error=f"Failed to run pipeline: {str(e)}")

    @mcp.tool()
    async def lab_audit(
        generator: GeneratorArg,
        audits: Annotated[
            list[AuditName],
            Field(min_length=1, description="Audits to run, e.g. ['st', 'kst', 'crossing']"),
        ],
        params: ParamsArg = None,
        seed: SeedArg = 0,
        degree: Annotated[int | None, Field(None, ge=1, le=32, description="First-level D")] = None,
    ) -> ReportResponse:
        """Run bound audits against a fixture; passed is true only if every audit passes."""
        try:
            report = await lab.audit(_config(generator, params, seed, degree=degree,
                                             audits=audits))
            return ReportResponse(success=True, report=report, passed=report.passed)
        except Exception as e:
            logger.error(f"Error running audits: {e}")
            return ReportResponse(success=False, error=f"Failed to run audits: {str(e)}")

    @mcp.tool()
    async def lab_campaign(
        sweep: Annotated[
            str,
            Field(description="Sweep name: 'grid', 'elekes', 'cartesian', 'unit_distance' or 'crossing'"),
        ],
        seed: SeedArg = 0,
        write: Annotated[bool, Field(False, description="Write campaign.json/csv to the output dir")] = False,
    ) -> CampaignResponse:
        """Run a scaling sweep and return the ratio-vs-size rows."""
        try:
            summary = await lab.sweep(sweep, seed=seed, write=write)
            return CampaignResponse(success=True, summary=summary)
        except Exception as e:
            logger.error(f"Error running campaign: {e}")
            return CampaignResponse(success=False, error=f"Failed to run campaign: {str(e)}")

    @mcp.tool()
    async def lab_plot(
        generator: GeneratorArg,
        path: Annotated[str, Field(description="Where to write the SVG", min_length=1)],
        params: ParamsArg = None,
        seed: SeedArg = 0,
        degree: Annotated[int | None, Field(None, ge=1, le=32, description="First-level D")] = None,
    ) -> PlotResponse:
        """Draw the fixture's partition (or its drawing, for circles) as an SVG file."""
        try:
            written = await lab.plot(_config(generator, params, seed, degree=degree), path)
            return PlotResponse(success=True, path=written)
        except Exception as e:
            logger.error(f"Error plotting: {e}")
            return PlotResponse(success=False, error=f"Failed to plot: {str(e)}")
