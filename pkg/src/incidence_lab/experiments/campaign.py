"""Campaigns: many experiment configs, one ratio-vs-size table."""

from __future__ import annotations

import csv
import io
import logging
from collections.abc import Sequence
from multiprocessing import Pool
from pathlib import Path

from incidence_lab.config import settings
from incidence_lab.experiments.pipeline import run_experiment
from incidence_lab.experiments.plots import plot_config
from incidence_lab.models.schemas import (
    CampaignRow,
    CampaignSummary,
    ExperimentConfig,
    OutputFormat,
    Report,
)

logger = logging.getLogger(__name__)

_SIZE_KEYS = ("size", "k", "count", "m")


def _size(report: Report) -> int:
    params = report.config.params
    return next((int(params[key]) for key in _SIZE_KEYS if key in params), report.fixture.m)


def _rows(report: Report) -> list[CampaignRow]:
    base = {"generator": report.config.generator, "size": _size(report),
            "m": report.fixture.m, "n": report.fixture.n, "incidences": report.incidences}
    rows = []
    for outcome in report.audits:
        ratio = outcome.details.get("ratio")
        rows.append(CampaignRow(
            **base, audit=outcome.name,
            ratio=ratio if isinstance(ratio, float) else None,
            ratio_text=report.ratios.get(outcome.name),
            passed=outcome.passed,
        ))
    if not rows:
        rows.append(CampaignRow(**base, audit="none", passed=not report.non_conclusive))
    return rows


def _run_one(config: ExperimentConfig) -> Report:
    return run_experiment(config)


def rows_csv(rows: Sequence[CampaignRow]) -> str:
    buffer = io.StringIO()
    writer = csv.DictWriter(buffer, fieldnames=list(CampaignRow.model_fields),
                            lineterminator="\n")
    writer.writeheader()
    for row in rows:
        writer.writerow(row.model_dump())
    return buffer.getvalue()


def campaign(
    configs: Sequence[ExperimentConfig],
    output_dir: str | Path | None = None,
    formats: Sequence[OutputFormat] = ("json", "csv"),
) -> CampaignSummary:
    """Run every config (in parallel when ``settings.workers > 1``) and tabulate the audits.

    Reports come back in config order, so output files do not depend on scheduling.
    """
    if not configs:
        return CampaignSummary()
    if settings.workers > 1 and len(configs) > 1:
        with Pool(min(settings.workers, len(configs))) as pool:
            reports = pool.map(_run_one, configs)
    else:
        reports = [_run_one(config) for config in configs]

    rows = [row for report in reports for row in _rows(report)]
    summary = CampaignSummary(rows=rows, reports=reports,
                              pass_rate=sum(r.passed for r in rows) / len(rows))
    logger.info(f"Campaign of {len(configs)} configs: {len(rows)} rows, "
                f"pass rate {summary.pass_rate:.3f}")

    for config, report in zip(configs, reports):
        if config.output:
            write_report(report, config.output)
            summary.outputs.append(config.output)
        if config.svg:
            plot_config(config, config.svg)
            summary.outputs.append(config.svg)
    if output_dir is not None:
        summary.outputs.extend(write_summary(summary, output_dir, formats))
    return summary


def write_report(report: Report, path: str | Path) -> None:
    target = Path(path)
    target.parent.mkdir(parents=True, exist_ok=True)
    target.write_text(report.model_dump_json(indent=2) + "\n")


def write_summary(summary: CampaignSummary, output_dir: str | Path,
                  formats: Sequence[OutputFormat] = ("json", "csv")) -> list[str]:
    directory = Path(output_dir)
    directory.mkdir(parents=True, exist_ok=True)
    written = []
    if "json" in formats:
        path = directory / "campaign.json"
        path.write_text(summary.model_dump_json(indent=2, exclude={"outputs"}) + "\n")
        written.append(str(path))
    if "csv" in formats:
        path = directory / "campaign.csv"
        path.write_text(rows_csv(summary.rows))
        written.append(str(path))
    return written


# Sweeps


def grid_sweep(sizes: Sequence[int] = (8, 16, 32, 64), seed: int = 0) -> list[ExperimentConfig]:
    """plane_grid(k, k, k): m = n = k^2."""
    return [ExperimentConfig(generator="plane_grid", params={"k": k, "s": k, "t": k},
                             seed=seed, audits=["st"]) for k in sizes]


def elekes_sweep(sizes: Sequence[int] = (2, 3, 4, 6), seed: int = 0) -> list[ExperimentConfig]:
    return [ExperimentConfig(generator="elekes_grid", params={"k": k}, seed=seed,
                             audits=["st", "crossing"]) for k in sizes]


def cartesian_sweep(sizes: Sequence[int] = (8, 16, 32, 64),
                    seed: int = 0) -> list[ExperimentConfig]:
    """complex_cartesian with |A| = |B| = s and s slopes: m = n = s^2."""
    return [ExperimentConfig(generator="complex_cartesian", params={"size": s, "slopes": s},
                             seed=seed, audits=["st", "kst"]) for s in sizes]


def unit_distance_sweep(counts: Sequence[int] = (4, 8, 16),
                        seed: int = 0) -> list[ExperimentConfig]:
    return [ExperimentConfig(generator="unit_circles", params={"count": c, "per_circle": 3},
                             seed=seed, audits=["unit_distance", "good_family"])
            for c in counts]


def crossing_sweep(count: int = 500, seed: int = 0) -> list[ExperimentConfig]:
    """Drawings cycling through random lines, rich grid lines and unit circles."""
    configs = []
    for i in range(count):
        kind = i % 3
        if kind == 0:
            generator, params = "random_uniform", {"m": 8 + i % 17, "n": 6 + i % 11, "box": 6}
        elif kind == 1:
            generator, params = "grid_rich_lines", {"k": 2 + i % 4}
        else:
            generator, params = "plane_unit_circles", {"count": 2 + i % 5}
        configs.append(ExperimentConfig(generator=generator, params=params,  # type: ignore[arg-type]
                                        seed=seed + i, audits=["crossing"]))
    return configs


SWEEPS = {
    "grid": grid_sweep,
    "elekes": elekes_sweep,
    "cartesian": cartesian_sweep,
    "unit_distance": unit_distance_sweep,
    "crossing": crossing_sweep,
}
