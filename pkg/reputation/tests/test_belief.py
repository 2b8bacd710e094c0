import math
import random

import numpy as np
from django.test import SimpleTestCase

from reputation.belief import (HONEST, ClientType, ReportConjecture, ReportingModel, Schedule, TestingMode,
                               bayes_update, check_malicious_rewards, check_reputation_prior, initial_belief,
                               malicious_campaign_sim, parse_client_type, parse_prior, run_testing_batch,
                               testing_provider)
from reputation.bounds import malicious_nu_bound, provider_noise_payoff, provider_noise_payoff_exact
from reputation.exceptions import BeliefInconsistency, SanctionError, UnboundedTesting
from reputation.game import Outcome
from reputation.params import PIZZA

NORMAL, COMMITMENT = ClientType.normal(), ClientType.commitment()
# a rational client that never sends a negative report
SILENT = ReportConjecture(0.0, 0.0)


class ClientTypeTests(SimpleTestCase):

    def test_parse_client_types(self):
        self.assertEqual(parse_client_type('normal'), NORMAL)
        self.assertEqual(parse_client_type('malicious'), ClientType.malicious(1.0))
        self.assertEqual(parse_client_type('malicious:1.5').beta, 1.5)
        self.assertEqual(parse_client_type('noisy:0.076'), ClientType.noisy_normal(0.076))
        self.assertEqual(str(parse_client_type('noisy:0.076')), 'noisy:0.076')

    def test_bad_client_types(self):
        for text in ('noisy', 'noisy:1.5', 'malicious:x', 'altruist'):
            with self.assertRaises(SanctionError, msg=text):
                parse_client_type(text)

    def test_parse_prior(self):
        prior = parse_prior('normal=0.7,commitment=0.2,malicious:1.5=0.1')
        self.assertEqual(prior, {NORMAL: 0.7, COMMITMENT: 0.2, ClientType.malicious(1.5): 0.1})

    def test_prior_must_sum_to_one(self):
        with self.assertRaises(SanctionError):
            parse_prior('normal=0.7,commitment=0.2')
        with self.assertRaises(SanctionError):
            parse_prior('normal=0.7;commitment=0.3')

    def test_prior_needs_both_rational_and_commitment_types(self):
        with self.assertRaises(SanctionError):
            check_reputation_prior(parse_prior('normal=1'))
        check_reputation_prior(parse_prior('normal=0.5,commitment=0.5'))

    def test_malicious_reward_must_exceed_report_cost(self):
        with self.assertRaises(SanctionError):
            check_malicious_rewards(parse_prior('normal=0.5,malicious:0.005=0.5'), PIZZA)


class ReportingModelTests(SimpleTestCase):

    def test_fixed_types(self):
        model = ReportingModel()
        self.assertEqual(model.for_type(COMMITMENT), HONEST)
        self.assertEqual(model.for_type(ClientType.malicious()), ReportConjecture(1.0, 1.0))

    def test_normal_type_needs_a_conjecture(self):
        with self.assertRaises(SanctionError):
            ReportingModel().for_type(NORMAL)

    def test_noise_flips_reports(self):
        model = ReportingModel(HONEST)
        noisy = model.for_type(ClientType.noisy_normal(0.1))
        self.assertAlmostEqual(noisy.zero_after_q0, 1.0)
        self.assertAlmostEqual(noisy.zero_after_q1, 0.1)


class BayesUpdateTests(SimpleTestCase):

    def setUp(self):
        self.model = ReportingModel(SILENT)
        self.belief = initial_belief({NORMAL: 0.7, COMMITMENT: 0.3}, self.model)

    def test_initial_prediction(self):
        self.assertAlmostEqual(self.belief.pi_next, 0.3)

    def test_negative_answer_reveals_commitment(self):
        posterior = bayes_update(self.belief, Outcome.Q0R0, self.model)
        self.assertEqual(posterior.commitment_mass, 1.0)
        self.assertEqual(posterior.pi_next, 1.0)

    def test_positive_answer_reveals_a_rational_client(self):
        posterior = bayes_update(self.belief, Outcome.Q0R1, self.model)
        self.assertEqual(posterior.mass(NORMAL), 1.0)
        self.assertEqual(posterior.commitment_mass, 0.0)

    def test_undelivered_rounds_carry_no_information(self):
        self.assertIs(bayes_update(self.belief, Outcome.OUT, self.model), self.belief)
        self.assertIs(bayes_update(self.belief, Outcome.ROLLBACK, self.model), self.belief)

    def test_impossible_outcome(self):
        with self.assertRaises(BeliefInconsistency):
            bayes_update(self.belief, Outcome.Q1R0, self.model)

    def test_false_negative_exposes_the_malicious_type(self):
        malicious = ClientType.malicious(1.0)
        model = ReportingModel(HONEST)
        belief = initial_belief({NORMAL: 0.7, COMMITMENT: 0.2, malicious: 0.1}, model)
        posterior = bayes_update(belief, Outcome.Q1R0, model)
        self.assertEqual(posterior.posterior, {malicious: 1.0})

    def test_honest_histories_never_lower_the_commitment_mass(self):
        honest_outcomes = [Outcome.Q0R0, Outcome.Q1R1, Outcome.OUT, Outcome.ROLLBACK]
        prior = {NORMAL: 0.5, COMMITMENT: 0.2, ClientType.malicious(1.0): 0.1, ClientType.noisy_normal(0.05): 0.2}
        model = ReportingModel(ReportConjecture(0.4, 0.1))
        rng = random.Random(5)
        for _ in range(200):
            belief = initial_belief(prior, model)
            for _ in range(30):
                updated = bayes_update(belief, rng.choice(honest_outcomes), model)
                self.assertGreaterEqual(updated.commitment_mass, belief.commitment_mass - 1e-12)
                belief = updated

    def test_mixed_reports_weight_the_posterior(self):
        model = ReportingModel(ReportConjecture(0.5, 0.0))
        belief = initial_belief({NORMAL: 0.5, COMMITMENT: 0.5}, model)
        posterior = bayes_update(belief, Outcome.Q0R0, model)
        self.assertAlmostEqual(posterior.commitment_mass, 2 / 3, places=12)


class TestingProviderTests(SimpleTestCase):

    def run_batch(self, mu_star, seeds=range(10_000), **kwargs):
        prior = {NORMAL: 1 - mu_star, COMMITMENT: mu_star}
        return run_testing_batch(PIZZA, prior, PIZZA.delta, seeds, COMMITMENT, record_trace=False, **kwargs)

    def test_commitment_client_is_tested_at_most_k_p_times(self):
        for mu_star, bound in ((0.2, 3), (0.4, 1)):
            results = self.run_batch(mu_star)
            self.assertTrue(all(r.k_p == bound for r in results))
            self.assertEqual(max(r.test_count for r in results), bound)
            self.assertEqual(sum(r.test_count > r.k_p for r in results), 0)

    def test_random_schedule_never_exceeds_the_bound(self):
        results = self.run_batch(0.2, seeds=range(2000), schedule=Schedule.RANDOM)
        self.assertTrue(all(r.test_count <= 3 for r in results))

    def test_exact_beliefs_stop_after_one_answered_test(self):
        prior = {NORMAL: 0.8, COMMITMENT: 0.2}
        result = testing_provider(PIZZA, prior, PIZZA.delta, 4, COMMITMENT,
                                  normal_conjecture=SILENT, mode=TestingMode.EXACT)
        self.assertEqual(result.test_count, 1)
        self.assertEqual(result.final_mu_star, 1.0)
        self.assertEqual(result.stop_round, result.tests_at[0] + 1)

    def test_rational_client_is_tested_forever(self):
        prior = {NORMAL: 0.8, COMMITMENT: 0.2}
        result = testing_provider(PIZZA, prior, PIZZA.delta, 9, NORMAL, normal_conjecture=SILENT)
        low_quality_rounds = result.trace.count(Outcome.Q0R1)
        self.assertEqual(result.test_count, low_quality_rounds)
        self.assertEqual(result.final_mu_star, 0.0)
        self.assertIsNone(result.stop_round)

    def test_trace_covers_the_horizon(self):
        result = testing_provider(PIZZA, {NORMAL: 0.8, COMMITMENT: 0.2}, PIZZA.delta, 1, COMMITMENT, T=300)
        trace = result.trace
        self.assertEqual(len(trace), 300)
        self.assertEqual(trace.count(Outcome.Q0R0), result.test_count)
        self.assertEqual(trace.count(Outcome.Q0R1, Outcome.Q1R0), 0)
        self.assertEqual(trace.backend['negatives'], result.test_count)

    def test_unbounded_testing(self):
        with self.assertRaises(UnboundedTesting):
            testing_provider(PIZZA.replace(eps_bar=1.0), {NORMAL: 0.8, COMMITMENT: 0.2}, 0.95, 0, COMMITMENT)

    def test_normal_client_needs_a_conjecture(self):
        with self.assertRaises(SanctionError):
            testing_provider(PIZZA, {NORMAL: 0.8, COMMITMENT: 0.2}, 0.95, 0, NORMAL)


class CampaignTests(SimpleTestCase):

    def test_malicious_client_gets_at_most_one_false_negative(self):
        malicious = ClientType.malicious(1.0)
        prior = {NORMAL: 0.5, COMMITMENT: 0.3, malicious: 0.2}
        worst = 0
        for seed in range(10_000):
            result = malicious_campaign_sim(PIZZA, prior, seed, malicious, record_trace=False)
            worst = max(worst, result.false_negatives)
        self.assertLessEqual(worst, 1)

    def test_defence_starts_after_the_first_false_negative(self):
        malicious = ClientType.malicious(1.0)
        result = malicious_campaign_sim(PIZZA, {NORMAL: 0.8, malicious: 0.2}, 2, malicious, T=200)
        first_negative = result.trace.outcomes.index(Outcome.Q1R0)
        self.assertEqual(result.defended_from, first_negative + 1)
        self.assertTrue(all(o is Outcome.OUT for o in result.trace.outcomes[first_negative + 1:]))

    def test_tolerated_noise_keeps_the_provider_cooperating(self):
        nu = malicious_nu_bound(PIZZA)
        noisy = ClientType.noisy_normal(nu)
        prior = {noisy: 1.0}
        payoffs = []
        for seed in range(10_000):
            result = malicious_campaign_sim(PIZZA, prior, seed, noisy, normal_conjecture=SILENT, T=200,
                                            record_trace=False)
            self.assertIsNone(result.defended_from)
            payoffs.append(result.provider_payoff)
        mean = np.mean(payoffs)
        stderr = np.std(payoffs, ddof=1) / math.sqrt(len(payoffs))

        # charging every round breaks even; misreports only follow delivered q1, which leaves (1-alpha)*nu*eps_bar
        charged_every_round = provider_noise_payoff(PIZZA, nu)
        exact = provider_noise_payoff_exact(PIZZA, nu)
        self.assertAlmostEqual(charged_every_round, 0.0, delta=1e-12)
        self.assertAlmostEqual(exact - charged_every_round, (1 - PIZZA.alpha) * nu * PIZZA.eps_bar, delta=1e-12)
        self.assertAlmostEqual(exact, 0.0019, delta=1e-12)
        self.assertLessEqual(abs(mean - exact), 3 * stderr)
        self.assertGreaterEqual(mean, charged_every_round - 3 * stderr)

    def test_type_is_drawn_from_the_prior(self):
        result = malicious_campaign_sim(PIZZA, {COMMITMENT: 1.0}, 0, T=20)
        self.assertEqual(result.client_type, COMMITMENT)
        self.assertEqual(result.false_negatives, 0)
