"""
Exact one-shot deviation check of a builtin profile.

Usage:
    python manage.py deviation_check --delta 0.9
"""
from typing import Any

from django.core.management.base import CommandParser

from reputation.automata import builtin_profiles, get_profile
from reputation.management.base import SanctionCommand
from reputation.repeated import one_shot_deviation_check


class Command(SanctionCommand):
    help = 'Check that no single-round deviation from a strategy profile pays'

    def add_arguments(self, parser: CommandParser) -> None:
        self.add_params_argument(parser)
        self.add_delta_argument(parser)
        parser.add_argument('--profile', default='grim-cooperative', choices=sorted(builtin_profiles()))
        parser.add_argument('--tol', type=float, default=1e-9)

    def run(self, **options: Any) -> None:
        params = self.load_market(options)
        check = one_shot_deviation_check(params, get_profile(options['profile']), params.delta, options['tol'])
        status = 'pass' if check.passed else 'fail'
        self.stdout.write(f"profile={options['profile']} delta={params.delta:.9g} result={status}")
        binding = check.binding
        if binding is not None:
            state = '/'.join(binding.state)
            self.stdout.write(
                f"binding: state={state} player={binding.player} deviation={binding.deviation} "
                f"gain={binding.gain:.9g}"
            )
        for failure in check.failures:
            self.stdout.write(
                f"profitable: state={'/'.join(failure.state)} {failure.player} -> {failure.deviation} "
                f"gain={failure.gain:.9g}"
            )
