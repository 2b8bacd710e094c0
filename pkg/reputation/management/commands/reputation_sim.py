"""
Incomplete-information simulations over a range of seeds.

The `testing` scenario runs the type-testing provider against one client type
and compares the number of low-quality deliveries with k_P. The `campaign`
scenario runs the malicious-client defence and counts false negatives.

Usage:
    python manage.py reputation_sim --prior normal=0.8,commitment=0.2 --client-type commitment --seeds 0..9999
    python manage.py reputation_sim --scenario campaign --prior normal=0.7,commitment=0.2,malicious=0.1
"""
from pathlib import Path
from typing import Any

from django.core.management.base import CommandParser

from reputation.belief import (ReportConjecture, Schedule, TestingMode, malicious_campaign_sim, parse_client_type,
                               parse_prior, testing_provider)
from reputation.management.base import SanctionCommand, parse_float_list, parse_seed_range
from reputation.exceptions import SanctionError
from reputation.reports import write_csv


class Command(SanctionCommand):
    help = 'Simulate reputation building and malicious reporting under type uncertainty'

    def add_arguments(self, parser: CommandParser) -> None:
        self.add_params_argument(parser)
        self.add_delta_argument(parser)
        parser.add_argument('--scenario', choices=['testing', 'campaign'], default='testing')
        parser.add_argument('--prior', default='normal=0.8,commitment=0.2',
                            help='type=probability list, e.g. normal=0.7,commitment=0.2,malicious:1.5=0.1')
        parser.add_argument('--client-type', default=None,
                            help='true client type (testing default: commitment; campaign default: drawn '
                                 'from the prior)')
        parser.add_argument('--normal-conjecture', default='1,0',
                            help='probabilities that a normal client reports 0 after q0 and after q1')
        parser.add_argument('--mode', choices=[m.value for m in TestingMode], default=TestingMode.WORST_CASE.value)
        parser.add_argument('--schedule', choices=[s.value for s in Schedule], default=Schedule.EARLIEST.value)
        parser.add_argument('--seeds', default='0..999', help='seed range A..B, both ends included')
        parser.add_argument('--rounds', type=int, default=None)
        parser.add_argument('--out', default=None, help='per-seed CSV output')

    def run(self, **options: Any) -> None:
        params = self.load_market(options)
        prior = parse_prior(options['prior'])
        conjecture_values = parse_float_list(options['normal_conjecture'])
        if len(conjecture_values) != 2:
            raise SanctionError('--normal-conjecture needs two probabilities')
        conjecture = ReportConjecture(*conjecture_values)
        seeds = parse_seed_range(options['seeds'])
        record = bool(options['out'])

        if options['scenario'] == 'testing':
            self._testing(params, prior, conjecture, seeds, options, record)
        else:
            self._campaign(params, prior, conjecture, seeds, options, record)

    def _testing(self, params, prior, conjecture, seeds, options, record) -> None:
        client_type = parse_client_type(options['client_type'] or 'commitment')
        rows = []
        worst = violations = 0
        bound = None
        for seed in seeds:
            result = testing_provider(
                params, prior, params.delta, seed, client_type,
                normal_conjecture=conjecture,
                mode=TestingMode(options['mode']),
                schedule=Schedule(options['schedule']),
                T=options['rounds'],
                record_trace=False,
            )
            bound = result.k_p
            worst = max(worst, result.test_count)
            violations += result.test_count > result.k_p
            if record:
                rows.append([seed, result.test_count, result.k_p, result.stop_round, result.final_mu_star])
        if record:
            write_csv(Path(options['out']), ['seed', 'tests', 'k_p', 'stop_round', 'final_mu_star'], rows)
        self.stdout.write(f"scenario=testing client={client_type} seeds={len(seeds)} k_p={bound}")
        self.stdout.write(f"max_tests={worst} violations={violations}")

    def _campaign(self, params, prior, conjecture, seeds, options, record) -> None:
        client_type = parse_client_type(options['client_type']) if options['client_type'] else None
        rows = []
        worst = 0
        payoffs = []
        for seed in seeds:
            result = malicious_campaign_sim(params, prior, seed, client_type, normal_conjecture=conjecture,
                                            T=options['rounds'], record_trace=False)
            worst = max(worst, result.false_negatives)
            payoffs.append(result.provider_payoff)
            if record:
                rows.append([seed, result.client_type, result.false_negatives, result.defended_from,
                             result.provider_payoff])
        if record:
            write_csv(Path(options['out']),
                      ['seed', 'client_type', 'false_negatives', 'defended_from', 'v_provider'], rows)
        mean = sum(payoffs) / len(payoffs)
        self.stdout.write(f"scenario=campaign seeds={len(seeds)} max_false_negatives={worst}")
        self.stdout.write(f"v_provider={mean:.9g}")
