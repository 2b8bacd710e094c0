"""
Roll out a builtin strategy profile over a range of seeds.

Usage:
    python manage.py simulate --profile grim-cooperative --seeds 0..199
    python manage.py simulate --backend license --seeds 7..7 --rounds 500 --out trace.csv
    python manage.py simulate --seeds 0..199 --summary-out rollouts.csv
"""
from pathlib import Path
from typing import Any

from django.conf import settings
from django.core.management.base import CommandParser

from reputation.automata import builtin_profiles, get_profile
from reputation.backends import make_backend
from reputation.management.base import SanctionCommand, parse_seed_range
from reputation.repeated import horizon_for, normalized_payoff, run_rollouts
from reputation.reports import write_csv

TRACE_HEADER = ['round', 'client_action', 'provider_action', 'outcome', 'g_client', 'g_provider']
SUMMARY_HEADER = ['seed', 'v_client', 'v_provider', 'negatives', 'total_adjustment', 'restores', 'cash_paid']


class Command(SanctionCommand):
    help = 'Simulate a strategy profile of the repeated game and report normalized payoffs'

    def add_arguments(self, parser: CommandParser) -> None:
        self.add_params_argument(parser)
        self.add_delta_argument(parser)
        parser.add_argument('--profile', default='grim-cooperative', choices=sorted(builtin_profiles()))
        parser.add_argument('--backend', default='direct', choices=['direct', 'license'])
        parser.add_argument('--seeds', default='0..199', help='seed range A..B, both ends included')
        parser.add_argument('--rounds', type=int, default=None,
                            help='rounds per rollout (default: until the discount tail mass drops below '
                                 'SIM_TAIL_MASS)')
        parser.add_argument('--out', default=None,
                            help='per-round trace CSV; rollouts follow each other in seed order, '
                                 'round restarting at 0')
        parser.add_argument('--summary-out', default=None, help='per-seed payoff and ledger CSV')

    def run(self, **options: Any) -> None:
        params = self.load_market(options)
        profile = get_profile(options['profile'])
        backend = make_backend(options['backend'], params, getattr(settings, 'LICENSE_MULTIPLIER', 10))
        seeds = parse_seed_range(options['seeds'])
        rounds = options['rounds'] or horizon_for(params.delta, getattr(settings, 'SIM_TAIL_MASS', 1e-12))

        keep = bool(options['out'] or options['summary_out'])
        summary = run_rollouts(params, profile, backend, seeds, rounds, threads=self.threads, keep_traces=keep)
        if options['out']:
            write_csv(Path(options['out']), TRACE_HEADER, [
                [r.round, r.client_action.value, r.provider_action.value, r.outcome.value, r.g_client, r.g_provider]
                for trace in summary.traces for r in trace.records
            ])
        if options['summary_out']:
            rows = []
            for trace in summary.traces:
                value = normalized_payoff(trace, params.delta)
                ledger = trace.backend
                rows.append([trace.seed, value.v_client, value.v_provider, ledger.get('negatives', 0),
                             ledger.get('total_adjustment', 0.0), ledger.get('restores'), ledger.get('cash_paid')])
            write_csv(Path(options['summary_out']), SUMMARY_HEADER, rows)

        mean, stderr = summary.mean, summary.stderr
        self.stdout.write(f"profile={profile.name} backend={backend.name} seeds={len(seeds)} rounds={rounds}")
        self.stdout.write(f"v_client={mean.v_client:.9g} stderr={stderr.v_client:.9g}")
        self.stdout.write(f"v_provider={mean.v_provider:.9g} stderr={stderr.v_provider:.9g}")
