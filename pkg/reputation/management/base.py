"""
Shared plumbing of the reputation management commands.

Commands implement `run()`; `handle()` turns domain errors into
`CommandError` with exit status 1 (bad input) or 2 (numeric trouble).
"""
import logging
from pathlib import Path
from typing import Any, Optional

from django.conf import settings
from django.core.exceptions import ValidationError
from django.core.management.base import BaseCommand, CommandError, CommandParser

from reputation.exceptions import NumericError, SanctionError
from reputation.params import PIZZA_FIXTURE, MarketParams, load_params

logger = logging.getLogger(__name__)

EXIT_INVALID = 1
EXIT_NUMERIC = 2


def validation_message(exc: ValidationError) -> str:
    if hasattr(exc, 'message_dict'):
        return '; '.join(f'{key}: {" ".join(messages)}' for key, messages in sorted(exc.message_dict.items()))
    return ' '.join(exc.messages)


def parse_seed_range(text: str) -> range:
    """`A..B`, both ends included, or a single seed."""
    start, sep, stop = text.partition('..')
    try:
        first = int(start)
        last = int(stop) if sep else first
    except ValueError:
        raise SanctionError(f"seed range must look like A..B, got {text!r}")
    if last < first:
        raise SanctionError(f"seed range {text!r} is empty")
    return range(first, last + 1)


def parse_float_list(text: str) -> list[float]:
    try:
        return [float(item) for item in text.split(',') if item.strip()]
    except ValueError:
        raise SanctionError(f"expected comma separated numbers, got {text!r}")


class SanctionCommand(BaseCommand):

    def add_params_argument(self, parser: CommandParser) -> None:
        parser.add_argument(
            '--params',
            default=str(PIZZA_FIXTURE),
            help='key=value parameter file (default: the bundled pizza market)'
        )

    def add_delta_argument(self, parser: CommandParser) -> None:
        parser.add_argument(
            '--delta',
            type=float,
            default=None,
            help="client discount factor (default: the parameter file's delta)"
        )

    def load_market(self, options: dict[str, Any]) -> MarketParams:
        params = load_params(Path(options['params']))
        delta: Optional[float] = options.get('delta')
        return params if delta is None else params.with_delta(delta)

    @property
    def threads(self) -> int:
        return max(1, int(getattr(settings, 'SANCTION_SIM_THREADS', 1)))

    def handle(self, *args: Any, **options: Any) -> None:
        try:
            self.run(**options)
        except ValidationError as exc:
            raise CommandError(validation_message(exc), returncode=EXIT_INVALID)
        except (SanctionError, ValueError) as exc:
            raise CommandError(str(exc), returncode=EXIT_INVALID)
        except NumericError as exc:
            raise CommandError(str(exc), returncode=EXIT_NUMERIC)
        except OSError as exc:
            raise CommandError(f"cannot write output: {exc}", returncode=EXIT_INVALID)

    def run(self, **options: Any) -> None:
        raise NotImplementedError('subclasses of SanctionCommand must provide a run() method')
