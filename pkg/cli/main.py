import argparse
import asyncio
import logging
import os
import sys
from typing import List, Optional

sys.path.insert(0, os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

from config.settings import LOG_LEVEL, SWEEP_JOBS
from src.exceptions import ConfigError, SimulationError
from src.results import render_csv
from src.run_config import load_config
from cli.formatting import format_feasibility, format_oracle, format_row_summary, format_sweep_summary
from cli.handlers import cmd_feasibility, cmd_oracle_check, cmd_simulate, cmd_sweep, has_output_path

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_ORACLE_FAILURE = 1
EXIT_CONFIG_ERROR = 2
EXIT_SIMULATION_ERROR = 3


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="JSON run configuration")
    common.add_argument("--output", help="CSV output path")
    common.add_argument("--jobs", type=int, default=SWEEP_JOBS, help="concurrent sweep steps")
    common.add_argument("--print-config", action="store_true", help="print the resolved configuration and exit")

    parser = argparse.ArgumentParser(
        prog="fss-correction",
        description="Fine-structure-splitting correction with ramped Pockels cells",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("simulate", parents=[common], help="run the configured scheme once")
    sub.add_parser("sweep", parents=[common], help="run the configured sweep")
    sub.add_parser("feasibility", parents=[common], help="required ramp rates and voltages")
    oracle = sub.add_parser("oracle-check", parents=[common], help="verify closed forms against brute force")
    oracle.add_argument("--corrupt-scale", type=float, default=1.0, help=argparse.SUPPRESS)
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)

    logging.basicConfig(
        level=LOG_LEVEL,
        format="%(asctime)s - %(name)s - %(levelname)s - %(message)s"
    )

    try:
        config = load_config(args.config)
        if args.print_config:
            print(config.to_json())
            return EXIT_OK

        if args.command == "simulate":
            row = cmd_simulate(config, args.output)
            print(format_row_summary(row))
            if not has_output_path(config, args.output):
                print(render_csv([row], config), end="")
        elif args.command == "sweep":
            rows = asyncio.run(cmd_sweep(config, args.output, args.jobs))
            print(format_sweep_summary(rows))
        elif args.command == "feasibility":
            print(format_feasibility(cmd_feasibility(config)))
        elif args.command == "oracle-check":
            report = cmd_oracle_check(config, args.corrupt_scale)
            print(format_oracle(report))
            if not report.passed:
                return EXIT_ORACLE_FAILURE

    except ConfigError as e:
        logger.error(f"Config error: {e}")
        print(f"config error: {e}", file=sys.stderr)
        return EXIT_CONFIG_ERROR

    except SimulationError as e:
        logger.error(f"Simulation error: {e}")
        print(f"simulation error: {e}", file=sys.stderr)
        return EXIT_SIMULATION_ERROR

    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
