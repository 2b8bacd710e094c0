from django.test import SimpleTestCase

from reputation.automata import PUNISHMENT_TRIGGERS, Profile, StrategyAutomaton, constant, get_profile
from reputation.backends import NEGATIVE, NEUTRAL, POSITIVE, DirectFine, License, make_backend
from reputation.game import ClientStrategy, MixedStrategy, Outcome, ProviderStrategy
from reputation.params import PIZZA
from reputation.repeated import realized_payoffs, simulate


class DirectFineTests(SimpleTestCase):

    def test_only_negative_reports_cost(self):
        fine = DirectFine(2.5)
        self.assertEqual(fine.on_feedback(POSITIVE), 0.0)
        self.assertEqual(fine.on_feedback(NEUTRAL), 0.0)
        self.assertEqual(fine.on_feedback(None), 0.0)
        self.assertEqual(fine.on_feedback(NEGATIVE), -2.5)
        self.assertEqual(fine.summary(), {'negatives': 1, 'total_adjustment': -2.5})

    def test_spawn_starts_fresh(self):
        fine = DirectFine(2.5)
        fine.on_feedback(NEGATIVE)
        self.assertEqual(fine.spawn().summary()['negatives'], 0)

    def test_ledger_matches_negative_reports_on_a_mixed_profile(self):
        client = constant('mixed-client', MixedStrategy({ClientStrategy.IN01: 0.5, ClientStrategy.IN00: 0.2,
                                                         ClientStrategy.IN11: 0.3}))
        provider = constant('mixed-provider', MixedStrategy({ProviderStrategy.E1DD: 0.5, ProviderStrategy.E0D: 0.3,
                                                             ProviderStrategy.E1LD: 0.2}))
        trace = simulate(PIZZA, Profile('mixed', client, provider), DirectFine(PIZZA.eps_bar), seed=13, T=400)
        negatives = trace.count(Outcome.Q0R0, Outcome.Q1R0)
        self.assertGreater(negatives, 0)
        self.assertEqual(trace.backend['negatives'], negatives)
        self.assertAlmostEqual(trace.backend['total_adjustment'], -PIZZA.eps_bar * negatives, places=9)
        for record in trace.records:
            _, before_fine = realized_payoffs(PIZZA, record.client_action, record.provider_action, record.outcome)
            fine = PIZZA.eps_bar if record.outcome.is_negative else 0.0
            self.assertAlmostEqual(record.g_provider, before_fine - fine, places=12)

    def test_grim_trace_after_a_negative_report(self):
        # a noisy-reporting client breaks grim cooperation with its first negative report
        client = StrategyAutomaton(
            'grim-noisy-client', ('cooperate', 'punish'), 'cooperate',
            {'cooperate': MixedStrategy({ClientStrategy.IN11: 0.9, ClientStrategy.IN10: 0.1}),
             'punish': MixedStrategy.pure(ClientStrategy.OUT)},
            {('cooperate', outcome): 'punish' for outcome in PUNISHMENT_TRIGGERS},
        )
        profile = Profile('grim-noisy', client, get_profile('grim-cooperative').provider)
        trace = simulate(PIZZA, profile, DirectFine(PIZZA.eps_bar), seed=1, T=300)
        self.assertEqual(trace.count(Outcome.Q0R0, Outcome.Q1R0), trace.backend['negatives'])
        self.assertEqual(trace.backend['negatives'], 1)
        self.assertAlmostEqual(trace.backend['total_adjustment'], -PIZZA.eps_bar, places=12)
        self.assertEqual(trace.outcomes[-1], Outcome.OUT)


class LicenseTests(SimpleTestCase):

    def test_calibration(self):
        licence = License.calibrated(2.5)
        self.assertEqual((licence.price, licence.damage, licence.restore), (25.0, 2.5, 25.0))

    def test_restored_when_exhausted(self):
        licence = License(price=5.0, damage=2.5, restore=5.0)
        adjustments = [licence.on_feedback(NEGATIVE) for _ in range(5)]
        self.assertEqual(adjustments, [-2.5] * 5)
        summary = licence.summary()
        self.assertEqual(summary['restores'], 2)
        self.assertEqual(summary['cash_paid'], 15.0)
        self.assertEqual(summary['balance'], 2.5)

    def test_restore_payments_stay_out_of_the_payoff(self):
        licence = License.calibrated(2.5)
        fine = DirectFine(2.5)
        for _ in range(25):
            self.assertEqual(licence.on_feedback(NEGATIVE), fine.on_feedback(NEGATIVE))
        summary = licence.summary()
        self.assertEqual(summary['total_adjustment'], fine.summary()['total_adjustment'])
        self.assertEqual(summary['restores'], 2)
        self.assertEqual(summary['cash_paid'] - licence.price, summary['restores'] * licence.restore)

    def test_positive_feedback_keeps_the_balance(self):
        licence = License.calibrated(2.5)
        licence.on_feedback(POSITIVE)
        self.assertEqual(licence.summary()['balance'], 25.0)

    def test_free_reports_keep_a_token_licence(self):
        licence = License.calibrated(0.0)
        self.assertEqual(licence.on_feedback(NEGATIVE), 0.0)
        self.assertEqual(licence.summary()['restores'], 0)

    def test_invalid_calibration(self):
        with self.assertRaises(ValueError):
            License(price=0.0, damage=1.0, restore=1.0)


class MakeBackendTests(SimpleTestCase):

    def test_names(self):
        self.assertIsInstance(make_backend('direct', PIZZA), DirectFine)
        self.assertIsInstance(make_backend('license', PIZZA), License)

    def test_unknown(self):
        with self.assertRaises(ValueError):
            make_backend('escrow', PIZZA)
