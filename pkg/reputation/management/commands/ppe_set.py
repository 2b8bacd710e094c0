"""
Approximate the perfect public equilibrium payoff set on a grid.

Usage:
    python manage.py ppe_set --delta 0.9 --grid 0.02 --out set.csv
    python manage.py ppe_set --delta 0.9 --no-cache
"""
from pathlib import Path
from typing import Any

from django.conf import settings
from django.core.management.base import CommandError, CommandParser

from reputation.management.base import EXIT_NUMERIC, SanctionCommand
from reputation.ppe import PPE_HEADER, cached_ppe_set, check_prop2, check_prop3, clear_cached_sets, ppe_rows
from reputation.reports import write_csv, write_csv_stream


class Command(SanctionCommand):
    help = 'Iterate the enforcement operator from the feasible rectangle and export the payoff set'

    def add_arguments(self, parser: CommandParser) -> None:
        self.add_params_argument(parser)
        self.add_delta_argument(parser)
        parser.add_argument('--grid', type=float, default=getattr(settings, 'PPE_DEFAULT_GRID', 0.02))
        parser.add_argument('--max-iters', type=int, default=getattr(settings, 'PPE_DEFAULT_MAX_ITERS', 500))
        parser.add_argument('--tol', type=float, default=getattr(settings, 'PPE_DEFAULT_TOL', 1e-9))
        parser.add_argument('--out', default=None, help='CSV output (default: stdout)')
        parser.add_argument('--no-cache', action='store_true', help='always recompute')
        parser.add_argument('--clear-cache', action='store_true',
                            help="drop cached sets of these parameters before computing")
        parser.add_argument('--check', action='store_true',
                            help='also report the negative-feedback and false-report checks')

    def run(self, **options: Any) -> None:
        params = self.load_market(options)
        if options['clear_cache']:
            cleared = clear_cached_sets(params)
            self.stdout.write(self.style.WARNING(f"Cleared {cleared} cached sets"))

        payoff_set, hit = cached_ppe_set(
            params, params.delta,
            grid=options['grid'],
            max_iters=options['max_iters'],
            tol=options['tol'],
            threads=self.threads,
            timeout=getattr(settings, 'CACHE_TTL', 3600),
            use_cache=not options['no_cache'],
        )
        rows = ppe_rows(payoff_set, params)
        if options['out']:
            write_csv(Path(options['out']), PPE_HEADER, rows)
        else:
            write_csv_stream(self.stdout, PPE_HEADER, rows)

        summary = (f"delta={params.delta:.9g} grid={options['grid']:g} points={payoff_set.size} "
                   f"iterations={payoff_set.iterations} converged={str(payoff_set.converged).lower()} "
                   f"cached={str(hit).lower()}")
        self.stderr.write(summary)
        if options['check']:
            negative = check_prop2(payoff_set, params, params.delta, options['tol'])
            implied = check_prop3(payoff_set, params)
            self.stderr.write(f"negative_feedback_free={str(negative.passed).lower()} "
                              f"implied_gamma={implied.implied_gamma:.9g} gamma={implied.gamma:.9g}")

        if not payoff_set.converged:
            raise CommandError(
                f"no fixed point after {options['max_iters']} iterations; the partial set was written",
                returncode=EXIT_NUMERIC,
            )

