"""Command line front-end.

    python creditsim/cli.py preset table2 --replicas 4 --format csv --out table2.csv
    python creditsim/cli.py sweep fig5 --param vm.attacker.spin --values 9.8ms,10ms
    python creditsim/cli.py --seed 3 --format json preset table2
"""

import argparse
import os
import sys

from config import get_presets
from harness.report import emit
from harness.runner import run_scenario, sweep
from harness.scenario import Scenario, ScenarioError, load_scenario
from logger import Logger
from simcore.engine import SimulationError
from simcore.units import parse_list
from templates import Messages

logger = Logger(__name__)

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_SIMULATION = 2


class ArgumentParser(argparse.ArgumentParser):
    """argparse exits with 2 on usage errors, which here means a simulation failure."""

    def error(self, message: str):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def add_run_options(parser: argparse.ArgumentParser, suppress: bool = False) -> None:
    """Options shared by every command that runs a scenario.

    They are accepted before and after the subcommand. With `suppress` an option
    left out after the subcommand keeps the value given before it.
    """

    def default(value):
        return argparse.SUPPRESS if suppress else value

    parser.add_argument("--seed", type=int, default=default(None), help="seed (default: scenario, then SIM_SEED, then 0)")
    parser.add_argument("--replicas", type=int, default=default(None), help="replicas per scheduler variant")
    parser.add_argument("--horizon", default=default(None), help="virtual run length, e.g. 10s")
    parser.add_argument("--format", choices=("csv", "json"), default=default("csv"), help="report format")
    parser.add_argument("--out", default=default(None), help="write the report to this path instead of stdout")
    parser.add_argument("--workers", type=int, default=default(None), help="replica worker threads (default: SIM_WORKERS)")
    parser.add_argument("--progress", action="store_true", default=default(False), help="show a progress bar")


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    add_run_options(common, suppress=True)

    parser = ArgumentParser(
        prog="creditsim", description=Messages.DESCRIPTION, epilog=Messages.CLI_EPILOG
    )
    add_run_options(parser)
    commands = parser.add_subparsers(dest="command", required=True, parser_class=ArgumentParser)

    run = commands.add_parser("run", parents=[common], help=Messages.RUN_HELP)
    run.add_argument("scenario")

    sweep_parser = commands.add_parser("sweep", parents=[common], help=Messages.SWEEP_HELP)
    sweep_parser.add_argument("scenario")
    sweep_parser.add_argument("--param", help="dotted path, e.g. vm.attacker.spin")
    sweep_parser.add_argument("--values", help="comma-separated values, e.g. 9.8ms,10ms")

    preset = commands.add_parser("preset", parents=[common], help=Messages.PRESET_HELP)
    preset.add_argument("name")

    validate = commands.add_parser("validate", help=Messages.VALIDATE_HELP)
    validate.add_argument("scenario")

    commands.add_parser("list-presets", help=Messages.LIST_HELP)
    return parser


def apply_overrides(scenario: Scenario, args: argparse.Namespace) -> Scenario:
    updates = {}
    if args.seed is not None:
        updates["seed"] = args.seed
    if args.replicas is not None:
        updates["replicas"] = args.replicas
    if args.horizon is not None:
        updates["horizon"] = args.horizon
    return scenario.with_updates(**updates) if updates else scenario


def output(text: str) -> None:
    sys.stdout.write(text)
    sys.stdout.flush()


def command_run(args: argparse.Namespace, scenario_name: str, sweep_param: str | None = None,
                sweep_values: list[str] | None = None) -> int:
    scenario = apply_overrides(load_scenario(scenario_name), args)
    if sweep_param is not None:
        reports = sweep(scenario, sweep_param, sweep_values or [], args.workers, args.progress)
        text = emit(reports, args.format, args.out)
    else:
        report = run_scenario(scenario, args.workers, args.progress)
        text = emit(report, args.format, args.out)
    if args.out is None:
        output(text)
    return EXIT_OK


def command_sweep(args: argparse.Namespace) -> int:
    param, values = args.param, parse_list(args.values) if args.values else None
    if param is None or values is None:
        defined = load_scenario(args.scenario).sweep
        if defined is None:
            raise ScenarioError.single(Messages.SWEEP_NEEDS_VALUES, args.scenario)
        param = param or defined.param
        values = values or defined.values
    return command_run(args, args.scenario, param, values)


def command_preset(args: argparse.Namespace) -> int:
    if args.name not in get_presets():
        raise ScenarioError.single(f"unknown preset, choose from: {', '.join(get_presets())}", args.name)
    defined = load_scenario(args.name).sweep
    if defined is not None:
        return command_run(args, args.name, defined.param, defined.values)
    return command_run(args, args.name)


def command_validate(args: argparse.Namespace) -> int:
    scenario = load_scenario(args.scenario)
    output(
        Messages.SCENARIO_VALID.format(
            source=os.path.basename(args.scenario),
            vms=len(scenario.all_vms),
            pcpus=scenario.pcpus,
            schedulers=", ".join(variant.value for variant in scenario.variant_list),
        )
        + "\n"
    )
    return EXIT_OK


def command_list_presets(args: argparse.Namespace) -> int:
    for name in get_presets():
        scenario = load_scenario(name)
        output(f"{name}\t{scenario.description}\n")
    return EXIT_OK


COMMANDS = {
    "run": lambda args: command_run(args, args.scenario),
    "sweep": command_sweep,
    "preset": command_preset,
    "validate": command_validate,
    "list-presets": command_list_presets,
}


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return int(e.code or EXIT_OK)

    try:
        return COMMANDS[args.command](args)
    except ScenarioError as e:
        sys.stderr.write(f"{e}\n")
        return EXIT_USAGE
    except OSError as e:
        sys.stderr.write(f"{e}\n")
        return EXIT_USAGE
    except SimulationError as e:
        sys.stderr.write(f"{Messages.SIMULATION_FAILED}\n{e}\n")
        return EXIT_SIMULATION


if __name__ == "__main__":
    sys.exit(main())
