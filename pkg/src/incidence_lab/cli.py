"""Command line entry point: ``incidence-lab <command> ...``.

Exit status is 0 when every requested audit passes, 1 when one fails and 2 on
a laboratory error.
"""

import argparse
import asyncio
import json
import logging
import sys
from typing import Any

from incidence_lab.config import settings
from incidence_lab.errors import LabError
from incidence_lab.experiments.campaign import SWEEPS, rows_csv
from incidence_lab.incidence.engine import export_csv, st_ratio
from incidence_lab.models.schemas import ExperimentConfig, Report
from incidence_lab.services.laboratory import Laboratory, load_configs, parse_config

logger = logging.getLogger(__name__)

EXIT_OK, EXIT_FAILED, EXIT_ERROR = 0, 1, 2


def _value(text: str) -> Any:
    try:
        return json.loads(text)
    except json.JSONDecodeError:
        return text


def _params(pairs: list[str]) -> dict[str, Any]:
    params = {}
    for pair in pairs:
        key, sep, value = pair.partition("=")
        if not sep:
            raise argparse.ArgumentTypeError(f"Expected KEY=VALUE, got {pair!r}")
        params[key] = _value(value)
    return params


def _add_fixture_args(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("generator", nargs="?", help="Generator name (or use --config)")
    parser.add_argument("-p", "--param", action="append", default=[], metavar="KEY=VALUE",
                        help="Generator parameter; values are read as JSON when they parse")
    parser.add_argument("--config", help="JSON file with an ExperimentConfig")
    parser.add_argument("--seed", type=int, default=None)
    parser.add_argument("--box", type=int, default=None,
                        help="Coordinate box for generators that take one")
    parser.add_argument("--degree", type=int, default=None, help="First-level degree D")
    parser.add_argument("--second-degree", type=int, default=None, help="Second-level degree E")
    parser.add_argument("--rho", default=None, help="Exact rational rho, E >= rho * deg Z")
    parser.add_argument("--format", choices=["json", "csv"], default="json")
    parser.add_argument("--svg", default=None, help="Write an SVG picture here")
    parser.add_argument("--output", default=None, help="Write the JSON report here")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="incidence-lab",
        description="Exact polynomial partitioning and incidence-bound audits",
    )
    parser.add_argument("-v", "--verbose", action="store_true", help="Debug logging")
    commands = parser.add_subparsers(dest="command", required=True)
    for name, text in (("gen", "Generate a fixture"),
                       ("count", "Count incidences by brute force"),
                       ("partition", "Build the first-level partition"),
                       ("pipeline", "Run the two-level decomposition"),
                       ("plot", "Write an SVG of the partition or drawing")):
        _add_fixture_args(commands.add_parser(name, help=text))
    audit = commands.add_parser("audit", help="Run bound audits")
    _add_fixture_args(audit)
    audit.add_argument("-a", "--audit", action="append", default=[], dest="audits",
                       help="Audit name; repeat for several")
    campaign = commands.add_parser("campaign", help="Run a sweep or a list of configs")
    campaign.add_argument("configs", nargs="?", help="JSON file with a list of configs")
    campaign.add_argument("--sweep", choices=sorted(SWEEPS))
    campaign.add_argument("--seed", type=int, default=0)
    campaign.add_argument("--output-dir", default=None)
    campaign.add_argument("--format", choices=["json", "csv"], default=None,
                          help="Only write this format (default both)")
    return parser


def _config(args: argparse.Namespace) -> ExperimentConfig:
    if args.config:
        config = load_configs(args.config)[0]
        data = config.model_dump()
    elif args.generator:
        data = {"generator": args.generator}
    else:
        raise LabError("Give a generator name or --config")
    data["params"] = {**data.get("params", {}), **_params(args.param)}
    if args.box is not None:
        data["params"]["box"] = args.box
    overrides = {"seed": args.seed, "degree": args.degree, "second_degree": args.second_degree,
                 "rho": args.rho, "svg": args.svg, "output": args.output,
                 "audits": getattr(args, "audits", None) or None}
    data.update({k: v for k, v in overrides.items() if v is not None})
    return parse_config(data)


def _print(payload: Any) -> None:
    print(json.dumps(payload, indent=2))


def _report_exit(report: Report) -> int:
    print(report.model_dump_json(indent=2))
    return EXIT_OK if report.passed else EXIT_FAILED


async def run(args: argparse.Namespace, lab: Laboratory) -> int:
    if args.command == "campaign":
        if args.sweep:
            configs = SWEEPS[args.sweep](seed=args.seed)
        elif args.configs:
            configs = load_configs(args.configs)
        else:
            raise LabError("Give a configs file or --sweep")
        if args.output_dir:
            lab.output_dir = args.output_dir
        formats = (args.format,) if args.format else ("json", "csv")
        summary = await lab.campaign(configs, formats=formats)
        if args.format == "csv":
            print(rows_csv(summary.rows), end="")
        else:
            print(summary.model_dump_json(indent=2, exclude={"reports"}))
        return EXIT_OK if all(row.passed for row in summary.rows) else EXIT_FAILED

    config = _config(args)
    if args.command == "gen":
        fixture = await lab.generate(config)
        _print(fixture.to_dict())
    elif args.command == "count":
        inc = await lab.count(config)
        if args.format == "csv":
            print(export_csv(inc), end="")
        else:
            _print({"m": inc.m, "n": inc.n, "incidences": inc.size,
                    "ratio": st_ratio(inc).ratio_text})
    elif args.command == "partition":
        partition = await lab.partition(config)
        _print(partition.to_dict())
        if config.svg:
            await lab.plot(config, config.svg)
    elif args.command == "plot":
        if not config.svg:
            raise LabError("plot needs --svg PATH")
        await lab.plot(config, config.svg)
    elif args.command == "pipeline":
        return _report_exit(await lab.pipeline(config))
    elif args.command == "audit":
        return _report_exit(await lab.audit(config))
    return EXIT_OK


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=logging.DEBUG if args.verbose else settings.log_level,
        format="%(asctime)s - %(name)s - %(levelname)s - %(message)s",
        stream=sys.stderr,
    )
    try:
        return asyncio.run(run(args, Laboratory()))
    except (LabError, argparse.ArgumentTypeError) as e:
        logger.error(f"{args.command} failed: {e}")
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
