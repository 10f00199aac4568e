"""``comix`` command line: run comparisons, validate the prox catalog, describe instances."""

import argparse
import logging
import sys
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Dict, Optional, Sequence

from colorama import Fore, Style
from tabulate import tabulate

from . import __version__
from ..exceptions import ComixtureError
from ..services.comparison import run_comparison, write_comparison_csv, write_restored_images
from ..services.experiments import build_instance, describe_instance
from ..services.image_io import read_pgm
from ..services.validation_suite import run_checks
from ..utils import Config, RunConfigValidator, ValidationError, setup_logging

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_FAILURE = 1
EXIT_CONFIG_ERROR = 2


@dataclass
class CliConfig:
    """Validated command-line settings."""
    command: str
    experiment: Optional[str] = None
    side: Optional[int] = None
    n: Optional[int] = None
    m: Optional[int] = None
    p: Optional[int] = None
    iters: Optional[int] = None
    seed: int = 0
    output_dir: Path = Path("outputs")
    record_every: int = 1
    image: Optional[Path] = None
    instances: int = 100
    show_progress: bool = True
    use_colors: bool = True

    @property
    def scale(self) -> Dict[str, int]:
        if self.experiment == 'exp3':
            return {'n': self.n, 'm': self.m, 'p': self.p}
        return {'side': self.side}


def _add_instance_arguments(parser: argparse.ArgumentParser) -> None:
    parser.add_argument('experiment_name', nargs='?', metavar='EXPERIMENT',
                        help='Experiment to use: exp1, exp2 or exp3')
    parser.add_argument('--experiment', '-e', help='Experiment name (alternative to the positional argument)')
    parser.add_argument('--side', type=int, help='Image side for exp1/exp2 (power of two, >= 32)')
    parser.add_argument('--n', type=int, help='Signal length for exp3')
    parser.add_argument('--m', type=int, help='Number of measurements for exp3')
    parser.add_argument('--p', type=int, help='Number of groups for exp3')
    parser.add_argument('--seed', type=int, help='Random seed')
    parser.add_argument('--image', help='Ground-truth image (binary PGM) for exp1/exp2')


def create_parser() -> argparse.ArgumentParser:
    """Create command line argument parser."""
    parser = argparse.ArgumentParser(
        prog='comix',
        allow_abbrev=False,
        description='Proximal comixture toolkit: splitting solvers and recovery experiments',
        formatter_class=argparse.RawDescriptionHelpFormatter,
        epilog="""
Examples:
  comix run exp1 --side 64 --iters 500     # Condat-Vu vs Douglas-Rachford deblurring
  comix run exp3 --iters 1000 --seed 7     # Condat-Vu vs forward-backward group lasso
  comix info exp2 --side 32                # Describe the phase recovery instance
  comix validate                           # Check the prox catalog against oracles
        """
    )

    parser.add_argument('--version', action='version', version=f'comix {__version__}')
    parser.add_argument(
        '--log-level',
        choices=['DEBUG', 'INFO', 'WARNING', 'ERROR'],
        help='Logging level (default from config)'
    )
    parser.add_argument('--no-color', action='store_true', help='Disable colored output')
    parser.add_argument('--no-progress', action='store_true', help='Disable progress bars')

    subparsers = parser.add_subparsers(dest='command', metavar='COMMAND')
    subparsers.required = True

    run_parser = subparsers.add_parser('run', allow_abbrev=False, help='Compare two solvers on an experiment')
    _add_instance_arguments(run_parser)
    run_parser.add_argument('--iters', type=int, help='Iterations per method')
    run_parser.add_argument('--record-every', type=int, help='Record every N iterations')
    run_parser.add_argument('--out', '-o', help='Output directory for CSV and PGM files')

    info_parser = subparsers.add_parser('info', allow_abbrev=False, help='Describe an experiment instance')
    _add_instance_arguments(info_parser)

    validate_parser = subparsers.add_parser('validate', allow_abbrev=False, help='Run the numerical check suite')
    validate_parser.add_argument('--instances', type=int, help='Random instances per check')
    validate_parser.add_argument('--seed', type=int, default=0, help='Random seed')

    return parser


def build_cli_config(args: argparse.Namespace, config: Config) -> CliConfig:
    """Merge parsed arguments with configured defaults and validate them.

    Raises:
        ValidationError: If a setting is invalid
    """
    cfg = CliConfig(
        command=args.command,
        show_progress=config.show_progress() and not args.no_progress,
        use_colors=config.use_colors() and not args.no_color
    )

    if args.command == 'validate':
        instances = args.instances if args.instances is not None else int(config.get('validation.oracle_instances', 100))
        cfg.instances = RunConfigValidator.validate_positive(instances, 'instances')
        cfg.seed = RunConfigValidator.validate_seed(args.seed)
        return cfg

    if args.experiment and args.experiment_name and args.experiment != args.experiment_name:
        raise ValidationError(
            f"Conflicting experiments: '{args.experiment_name}' and --experiment '{args.experiment}'"
        )
    cfg.experiment = RunConfigValidator.validate_experiment(args.experiment or args.experiment_name)
    defaults = config.get_experiment_defaults(cfg.experiment)

    def pick(name: str) -> Any:
        value = getattr(args, name, None)
        return defaults.get(name) if value is None else value

    cfg.seed = RunConfigValidator.validate_seed(pick('seed'))
    if cfg.experiment == 'exp3':
        if args.side is not None or args.image is not None:
            raise ValidationError("exp3 takes --n/--m/--p, not --side or --image")
        cfg.n, cfg.m, cfg.p = pick('n'), pick('m'), pick('p')
        RunConfigValidator.validate_group_geometry(cfg.n, cfg.m, cfg.p)
    else:
        if any(getattr(args, name) is not None for name in ('n', 'm', 'p')):
            raise ValidationError(f"{cfg.experiment} takes --side, not --n/--m/--p")
        cfg.side = RunConfigValidator.validate_side(pick('side'))
        cfg.image = RunConfigValidator.validate_image_path(args.image)

    if args.command == 'run':
        solver_defaults = config.get_solver_defaults()
        cfg.iters = RunConfigValidator.validate_positive(pick('iters'), 'iters')
        record_every = args.record_every if args.record_every is not None else int(solver_defaults['record_every'])
        cfg.record_every = RunConfigValidator.validate_positive(record_every, 'record-every')
        cfg.output_dir = RunConfigValidator.validate_output_dir(args.out or config.get_output_dir())

    return cfg


def _colored(text: str, color: str, cfg: CliConfig) -> str:
    return f"{color}{text}{Style.RESET_ALL}" if cfg.use_colors else text


def _load_instance(cfg: CliConfig, config: Config):
    image = read_pgm(cfg.image) if cfg.image is not None else None
    return build_instance(
        cfg.experiment, seed=cfg.seed, image=image,
        power_iteration=config.get_power_iteration(), **cfg.scale
    )


def cmd_run(cfg: CliConfig, config: Config) -> int:
    """Build the instance, compare the two methods, write ``<exp>_dist.csv`` and restored images."""
    solver = config.get_solver_defaults()
    comparison = config.get_comparison_settings()

    inst = _load_instance(cfg, config)
    result = run_comparison(
        inst,
        iters=cfg.iters,
        record_every=cfg.record_every,
        stop_residual=float(solver['stop_residual']),
        relaxation=float(solver['relaxation']),
        sigma_factor=float(solver['sigma_factor']),
        reference_multiplier=int(comparison['reference_multiplier']),
        workers=config.get_concurrent_workers(),
        show_progress=cfg.show_progress,
        power_iteration=config.get_power_iteration()
    )

    csv_path = write_comparison_csv(
        result, cfg.output_dir / f"{cfg.experiment}_dist.csv", comparison['float_format']
    )
    images = write_restored_images(result, cfg.output_dir)

    for method, run in result.runs.items():
        print(
            f"{_colored(method.value, Fore.CYAN, cfg)}: {run.iterations_used} iterations, "
            f"final err {run.final_error_db:.2f} dB"
        )
    print()
    print(result.summary_table())
    print()
    print(_colored(f"✓ Wrote {csv_path}", Fore.GREEN, cfg))
    for path in images:
        print(_colored(f"✓ Wrote {path}", Fore.GREEN, cfg))
    return EXIT_OK


def cmd_validate(cfg: CliConfig, config: Config) -> int:
    """Run every registered check and print pass/fail per check."""
    results = run_checks(instances=cfg.instances, seed=cfg.seed, show_progress=cfg.show_progress)

    rows = []
    for result in results:
        status = _colored("PASS", Fore.GREEN, cfg) if result.passed else _colored("FAIL", Fore.RED, cfg)
        rows.append([status, result.name, result.defect, result.tolerance, result.detail])
    print(tabulate(rows, headers=['status', 'check', 'defect', 'tolerance', 'detail'], floatfmt='.2e'))

    failed = [result.name for result in results if not result.passed]
    print()
    if failed:
        print(_colored(f"✗ {len(failed)} of {len(results)} checks failed: {', '.join(failed)}", Fore.RED, cfg))
        return EXIT_FAILURE
    print(_colored(f"✓ All {len(results)} checks passed", Fore.GREEN, cfg))
    return EXIT_OK


def cmd_info(cfg: CliConfig, config: Config) -> int:
    """Print scale, terms and observation statistics of an instance."""
    description = describe_instance(_load_instance(cfg, config), config.get_power_iteration())

    overview = [
        [key, value] for key, value in description.items()
        if key not in ('terms', 'observations', 'parameters')
    ]
    overview.extend([key, value] for key, value in description['parameters'].items())
    print(tabulate(overview, headers=['property', 'value']))
    print()
    print(tabulate(
        [[t['k'], t['weight'], t['operator'], t['norm_bound'], t['function']] for t in description['terms']],
        headers=['k', 'weight', 'operator', 'norm bound', 'function'],
        floatfmt='.6g'
    ))
    print()
    print(tabulate(
        [[name, stats['shape'], stats['mean'], stats['std'], stats['min'], stats['max']]
         for name, stats in description['observations'].items()],
        headers=['observation', 'shape', 'mean', 'std', 'min', 'max'],
        floatfmt='.4g'
    ))
    return EXIT_OK


COMMANDS = {
    'run': cmd_run,
    'validate': cmd_validate,
    'info': cmd_info,
}


def main(argv: Optional[Sequence[str]] = None) -> int:
    """Main entry point; returns the process exit status."""
    parser = create_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        # argparse exits 0 for --help/--version and 2 for usage errors
        return int(e.code) if e.code is not None else EXIT_OK

    config = Config()
    setup_logging(
        config.get_log_config(),
        console_level=args.log_level,
        use_colors=config.use_colors() and not args.no_color
    )

    try:
        config.validate()
        cfg = build_cli_config(args, config)
    except (ValidationError, ValueError, KeyError) as e:
        logger.error(f"Configuration error: {e}")
        return EXIT_CONFIG_ERROR

    try:
        return COMMANDS[cfg.command](cfg, config)
    except KeyboardInterrupt:
        print("\nInterrupted")
        return EXIT_FAILURE
    except ComixtureError as e:
        logger.error(f"{cfg.command} failed: {e}")
        logger.debug("Traceback:", exc_info=True)
        return EXIT_FAILURE
    except Exception as e:
        logger.error(f"Unexpected error: {e}")
        logger.debug("Traceback:", exc_info=True)
        return EXIT_FAILURE


if __name__ == '__main__':
    sys.exit(main())
