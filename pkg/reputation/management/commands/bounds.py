"""
Print the closed-form bounds of a market.

Usage:
    python manage.py bounds
    python manage.py bounds --params market.kv --mu-star 0.2 --format csv
"""
from typing import Any

from django.core.management.base import CommandParser

from reputation.bounds import compute_bound_report
from reputation.management.base import SanctionCommand
from reputation.reports import bound_report_rows, write_csv_stream, write_kv_stream


class Command(SanctionCommand):
    help = 'Compute the delta threshold, false-report bounds, testing bound and lifetimes'

    def add_arguments(self, parser: CommandParser) -> None:
        self.add_params_argument(parser)
        self.add_delta_argument(parser)
        parser.add_argument('--mu-star', type=float, default=None,
                            help='prior probability of the commitment type (adds pi_bar, k_P and gamma_hat)')
        parser.add_argument('--v-hat-c', type=float, default=None,
                            help='client continuation payoff for gamma_hat (default: the k_P floor)')
        parser.add_argument('--format', choices=['kv', 'csv'], default='kv')

    def run(self, **options: Any) -> None:
        params = self.load_market(options)
        report = compute_bound_report(params, mu_star=options['mu_star'], v_hat_c=options['v_hat_c'])
        rows = bound_report_rows(report)
        if options['format'] == 'csv':
            write_csv_stream(self.stdout, ['quantity', 'value'], rows)
        else:
            write_kv_stream(self.stdout, rows)
