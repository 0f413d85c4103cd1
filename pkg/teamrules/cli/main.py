"""Command-line entry point for TeamRules.

Commands:
    gen     generate a synthetic dataset as CSV
    fit     fit one advising model and evaluate it
    sweep   run an alpha and/or discretion sweep from a config or preset
    report  re-summarize an existing results CSV

Exit codes are 0 on success, 1 for usage errors, 2 for configuration errors
and 3 for runtime failures (including sweeps with failed cells).

Example:
    teamrules --logging-level info sweep --preset table1-checkers --jobs 4
"""

import logging
import pathlib
import sys
from typing import Optional

import click
from dotenv import load_dotenv

from teamrules.cli.fit import fit
from teamrules.cli.gen import gen
from teamrules.cli.report import report
from teamrules.cli.sweep import sweep
from teamrules.cli.util import setup_logging
from teamrules.onto import ConfigError

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_CONFIG = 2
EXIT_RUNTIME = 3


class ExitCodeGroup(click.Group):
    """Group that maps failures onto the documented exit codes."""

    def main(self, args=None, prog_name=None, complete_var=None, **extra):
        extra["standalone_mode"] = False
        try:
            rv = super().main(args, prog_name, complete_var, **extra)
        except click.exceptions.Abort:
            click.echo("Aborted!", err=True)
            sys.exit(EXIT_RUNTIME)
        except click.ClickException as e:
            e.show()
            sys.exit(EXIT_USAGE)
        except ConfigError as e:
            click.echo(f"configuration error:\n{e}", err=True)
            sys.exit(EXIT_CONFIG)
        except Exception as e:
            logger.error(f"command failed: {e}", exc_info=True)
            click.echo(f"error: {e}", err=True)
            sys.exit(EXIT_RUNTIME)
        sys.exit(rv if isinstance(rv, int) else EXIT_OK)


@click.group(cls=ExitCodeGroup)
@click.option("--logging-level", type=click.STRING, default=None)
@click.option(
    "--env-path",
    type=click.Path(path_type=pathlib.Path),
    default=pathlib.Path(".env"),
    show_default=True,
    help="Optional .env providing TEAMRULES_JOBS / TEAMRULES_OUT",
)
def cli(logging_level: Optional[str], env_path: pathlib.Path):
    """Rule-set advising for human-AI teams."""
    setup_logging(logging_level)
    _ = load_dotenv(dotenv_path=env_path.expanduser())


cli.add_command(gen)
cli.add_command(fit)
cli.add_command(sweep)
cli.add_command(report)


def main():
    cli()


if __name__ == "__main__":
    main()
