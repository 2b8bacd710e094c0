"""
Management command to warm up the cache with PPE payoff sets.

Computing a payoff set takes minutes; this precomputes the sets for a list of
discount factors so later `ppe_set` runs are served from the cache.

Usage:
    python manage.py warm_ppe_cache --deltas 0.5,0.9,0.95
    python manage.py warm_ppe_cache --deltas 0.9 --timeout 86400 --clear
"""
from typing import Any

from django.conf import settings
from django.core.management.base import CommandParser

from reputation.cache_utils import clear_all_cache
from reputation.management.base import SanctionCommand, parse_float_list
from reputation.ppe import cached_ppe_set


class Command(SanctionCommand):
    help = 'Precompute and cache PPE payoff sets for several discount factors'

    def add_arguments(self, parser: CommandParser) -> None:
        self.add_params_argument(parser)
        parser.add_argument('--deltas', default='0.9', help='comma separated discount factors')
        parser.add_argument('--grid', type=float, default=getattr(settings, 'PPE_DEFAULT_GRID', 0.02))
        parser.add_argument('--max-iters', type=int, default=getattr(settings, 'PPE_DEFAULT_MAX_ITERS', 500))
        parser.add_argument(
            '--timeout',
            type=int,
            default=getattr(settings, 'CACHE_TTL', 3600),
            help='Cache timeout in seconds (default: CACHE_TTL from settings)'
        )
        parser.add_argument(
            '--clear',
            action='store_true',
            help='Clear existing cache before warming'
        )

    def run(self, **options: Any) -> None:
        params = self.load_market(options)
        deltas = parse_float_list(options['deltas'])

        if options['clear']:
            self.stdout.write("Clearing existing cache...")
            clear_all_cache()
            self.stdout.write(self.style.WARNING("Cleared all cache entries"))

        self.stdout.write(f"Warming {len(deltas)} payoff sets at grid {options['grid']:g}...")
        computed = 0
        for delta in deltas:
            payoff_set, hit = cached_ppe_set(
                params, delta,
                grid=options['grid'],
                max_iters=options['max_iters'],
                threads=self.threads,
                timeout=options['timeout'],
            )
            computed += not hit
            state = 'cached already' if hit else f'{payoff_set.iterations} iterations'
            self.stdout.write(self.style.SUCCESS(f"✓ delta={delta:g}: {payoff_set.size} points ({state})"))

        self.stdout.write(self.style.SUCCESS(
            f"\nCache warm-up complete! Computed {computed} new sets with {options['timeout']}s timeout"
        ))
