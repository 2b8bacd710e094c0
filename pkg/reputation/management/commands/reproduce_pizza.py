"""
Write the pizza-market numbers and the figure data as CSV.

Usage:
    python manage.py reproduce_pizza --out-dir out/
"""
from pathlib import Path
from typing import Any

from django.core.management.base import CommandParser

from reputation.management.base import SanctionCommand
from reputation.reports import PIZZA_CLIENT_DELTA, reproduce_pizza


class Command(SanctionCommand):
    help = 'Reproduce the worked pizza delivery example (table and figure data)'

    def add_arguments(self, parser: CommandParser) -> None:
        self.add_params_argument(parser)
        parser.add_argument('--out-dir', default='out')
        parser.add_argument('--client-delta', type=float, default=PIZZA_CLIENT_DELTA,
                            help='client discount factor used for the lifetime rows')

    def run(self, **options: Any) -> None:
        params = self.load_market(options)
        written = reproduce_pizza(Path(options['out_dir']), params, options['client_delta'])
        for path in written:
            self.stdout.write(self.style.SUCCESS(f"✓ Wrote {path}"))
