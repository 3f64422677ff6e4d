"""In-process facade over the laboratory, shared by the CLI and the MCP tools."""

import asyncio
import json
import logging
from collections.abc import Sequence
from pathlib import Path
from typing import Any

from pydantic import ValidationError

from incidence_lab.config import settings
from incidence_lab.errors import LabError
from incidence_lab.experiments import campaign as campaigns
from incidence_lab.experiments.generators import Fixture, generate
from incidence_lab.experiments.pipeline import first_level_degree, run_experiment
from incidence_lab.experiments.plots import plot_config
from incidence_lab.incidence.engine import IncidenceSet, count_bruteforce
from incidence_lab.models.schemas import (
    CampaignSummary,
    ExperimentConfig,
    OutputFormat,
    Report,
)
from incidence_lab.partition.ham_sandwich import Partition, build_partition

logger = logging.getLogger(__name__)


class LaboratoryError(LabError):
    """Base exception for facade errors."""


class InvalidConfig(LaboratoryError):
    """Raised when a config document does not match ExperimentConfig."""


def parse_config(data: dict[str, Any]) -> ExperimentConfig:
    try:
        return ExperimentConfig.model_validate(data)
    except ValidationError as e:
        raise InvalidConfig(f"Invalid experiment config: {e}") from e


def load_configs(path: str | Path) -> list[ExperimentConfig]:
    """A JSON file holding one config object or a list of them."""
    try:
        data = json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as e:
        raise InvalidConfig(f"Cannot read config file {path}: {e}") from e
    items = data if isinstance(data, list) else [data]
    return [parse_config(item) for item in items]


class Laboratory:
    """Async front for the exact computations; each call runs in a worker thread."""

    def __init__(self, output_dir: str | None = None):
        self.output_dir = output_dir or settings.output_dir

    async def generate(self, config: ExperimentConfig) -> Fixture:
        return await asyncio.to_thread(generate, config)

    async def count(self, config: ExperimentConfig) -> IncidenceSet:
        """Brute-force incidences of the generated fixture."""
        fixture = await self.generate(config)
        return await asyncio.to_thread(count_bruteforce, fixture.points, fixture.surfaces,
                                       fixture.k, fixture.c0)

    async def partition(self, config: ExperimentConfig) -> Partition:
        """First-level partition at the configured degree (or the default formula)."""
        fixture = await self.generate(config)
        degree = config.degree or first_level_degree(
            len(fixture.points), len(fixture.surfaces), fixture.k).value
        return await asyncio.to_thread(build_partition, fixture.coordinates(),
                                       fixture.dimension, degree, config.seed)

    async def pipeline(self, config: ExperimentConfig) -> Report:
        """The two-level decomposition, plus any audits the config lists."""
        forced = config.model_copy(update={"decompose": True})
        return await self._experiment(forced)

    async def audit(self, config: ExperimentConfig) -> Report:
        if not config.audits:
            raise LaboratoryError("No audits requested")
        return await self._experiment(config)

    async def _experiment(self, config: ExperimentConfig) -> Report:
        report = await asyncio.to_thread(run_experiment, config)
        if config.output:
            await asyncio.to_thread(campaigns.write_report, report, config.output)
        if config.svg:
            await asyncio.to_thread(plot_config, config, config.svg)
        logger.info(f"Experiment {config.generator}: I={report.incidences}, "
                    f"{'passed' if report.passed else 'not passed'}")
        return report

    async def campaign(
        self,
        configs: Sequence[ExperimentConfig],
        write: bool = True,
        formats: Sequence[OutputFormat] = ("json", "csv"),
    ) -> CampaignSummary:
        output_dir = self.output_dir if write else None
        return await asyncio.to_thread(campaigns.campaign, configs, output_dir, formats)

    async def sweep(self, name: str, seed: int = 0, write: bool = True) -> CampaignSummary:
        """One of the named scaling sweeps (grid, elekes, cartesian, unit_distance, crossing)."""
        try:
            build = campaigns.SWEEPS[name]
        except KeyError:
            raise LaboratoryError(f"Unknown sweep: {name}") from None
        return await self.campaign(build(seed=seed), write=write)

    async def plot(self, config: ExperimentConfig, path: str) -> str:
        return await asyncio.to_thread(plot_config, config, path)
