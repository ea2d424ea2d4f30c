"""
Main module for the inverse-square oscillator tools.
"""
import argparse
import sys
from typing import List, Optional

from rich.console import Console
from rich.panel import Panel

from inverse_square_oscillator.config.config_loader import TASKS, TOLERANCE_PROFILES, ConfigLoader
from inverse_square_oscillator.tasks.runner import TaskRunner
from inverse_square_oscillator.utils.exceptions import ConfigError, NumericalToleranceError, ParameterError
from inverse_square_oscillator.utils.logger import logger, set_level

console = Console()

EXIT_OK = 0
EXIT_CONFIG = 1
EXIT_TOLERANCE = 2


def parse_arguments(argv: Optional[List[str]] = None):
    """Parse command line arguments."""
    parser = argparse.ArgumentParser(
        description='U(2) quantizations of the harmonic oscillator with an inverse-square potential')
    parser.add_argument('-c', '--config', type=str, default=None,
                        help='Path to a YAML or JSON configuration file (defaults: natural units, a = 3/4)')
    parser.add_argument('--task', type=str, choices=TASKS, default=None,
                        help='Task to run (overrides the configuration)')
    parser.add_argument('--out', type=str, default=None,
                        help='Output directory for artifacts')
    parser.add_argument('--seed', type=int, default=None,
                        help='Seed for randomized property sweeps')
    parser.add_argument('--tolerance-profile', type=str, choices=TOLERANCE_PROFILES, default=None,
                        help='strict (default) or fast')
    parser.add_argument('--compare', action='store_true',
                        help='kernel task: also evaluate the extrapolated spectral sum')
    parser.add_argument('-v', '--verbose', action='store_true',
                        help='Log per-iteration detail (quadrature levels, bracketing counts)')
    return parser.parse_args(argv)


def main(argv: Optional[List[str]] = None) -> int:
    """Main entry point for the application."""
    # Display welcome banner
    console.print(Panel.fit(
        "[bold blue]Inverse-Square Oscillator[/bold blue]\n"
        "[italic]Spectra, propagators and caustics of the U(2) quantizations[/italic]",
        border_style="green"
    ))

    args = parse_arguments(argv)
    if args.verbose:
        set_level("DEBUG")

    try:
        logger.info(f"Loading configuration from {args.config or 'defaults'}")
        loader = ConfigLoader(args.config, overrides={
            'task': args.task,
            'output': args.out,
            'seed': args.seed,
            'tolerance_profile': args.tolerance_profile,
        })
        if args.compare:
            loader.set_option('compare', True)
        config = loader.get_run_config()
    except (ConfigError, ParameterError) as e:
        logger.error(f"Invalid configuration: {e}")
        return EXIT_CONFIG

    try:
        summary = TaskRunner(config).run()
    except ParameterError as e:
        logger.error(f"Invalid input: {e}")
        return EXIT_CONFIG
    except ConfigError as e:
        logger.error(f"Invalid configuration: {e}")
        return EXIT_CONFIG
    except NumericalToleranceError as e:
        logger.error(f"Numerical check '{e.check}' failed: {e}")
        return EXIT_TOLERANCE
    except Exception as e:
        logger.exception(f"Unexpected error: {e}")
        return 1

    # Print summary
    lines = "\n".join(f"{key}: {value}" for key, value in summary.items())
    console.print(Panel.fit(
        f"[bold green]Task {config.task} complete[/bold green]\n{lines}\n"
        f"Artifacts in {config.output}",
        border_style="blue"
    ))
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
