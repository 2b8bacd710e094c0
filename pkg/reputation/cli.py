"""
Single entry point over the management commands.

    python -m reputation.cli bounds --params reputation/fixtures/pizza.kv
    python -m reputation.cli ppe-set --delta 0.9 --out set.csv

Exit status: 0 on success, 1 on invalid input or usage, 2 on numeric or
convergence failures.
"""
import logging
import os
import sys
from dataclasses import dataclass
from typing import Optional, Sequence, TextIO

from django.core.management import call_command
from django.core.management.base import CommandError

logger = logging.getLogger(__name__)

SUBCOMMANDS = {
    'bounds': 'bounds',
    'simulate': 'simulate',
    'deviation-check': 'deviation_check',
    'reputation-sim': 'reputation_sim',
    'ppe-set': 'ppe_set',
    'reproduce-pizza': 'reproduce_pizza',
    'warm-ppe-cache': 'warm_ppe_cache',
}

USAGE = (
    "usage: reputation <subcommand> [options]\n"
    f"subcommands: {', '.join(SUBCOMMANDS)}\n"
    "run '<subcommand> --help' for the options of a subcommand\n"
)


@dataclass(frozen=True)
class RunConfig:
    subcommand: str
    arguments: tuple[str, ...]

    @property
    def command_name(self) -> str:
        return SUBCOMMANDS[self.subcommand]


def parse_argv(argv: Sequence[str]) -> Optional[RunConfig]:
    if not argv or argv[0] not in SUBCOMMANDS:
        return None
    return RunConfig(argv[0], tuple(argv[1:]))


def dispatch(argv: Sequence[str], stdout: Optional[TextIO] = None, stderr: Optional[TextIO] = None) -> int:
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    config = parse_argv(argv)
    if config is None:
        if argv and argv[0] not in ('-h', '--help'):
            stderr.write(f"unknown subcommand: {argv[0]}\n")
        stderr.write(USAGE)
        return 1
    try:
        call_command(config.command_name, *config.arguments, stdout=stdout, stderr=stderr)
    except CommandError as exc:
        stderr.write(f"{config.subcommand}: {exc}\n")
        return exc.returncode
    except SystemExit as exc:
        # --help exits through argparse
        return int(exc.code or 0)
    return 0


def main() -> None:
    os.environ.setdefault('DJANGO_SETTINGS_MODULE', 'sanctioning.settings')
    import django
    django.setup()
    sys.exit(dispatch(sys.argv[1:]))


if __name__ == '__main__':
    main()
