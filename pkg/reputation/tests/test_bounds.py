import math
import random

import numpy as np
from django.test import SimpleTestCase

from reputation.belief import ReportDecision, reputation_building_value
from reputation.bounds import (compute_bound_report, delta_threshold, gamma_bound, gamma_hat, interleave_and_lifetimes,
                               k_p, malicious_nu_bound, n_pi, pi_bar, provider_noise_payoff,
                               provider_noise_payoff_exact, reporting_decision_values, reputation_floor,
                               v_hat_c_threshold)
from reputation.exceptions import BoundUndefined, ThresholdUndefined
from reputation.params import PIZZA
from reputation.reports import MU_STAR_SWEEP
from reputation.tests.test_game import random_market


class ThresholdTests(SimpleTestCase):

    def test_pizza_delta_threshold(self):
        self.assertAlmostEqual(delta_threshold(PIZZA), 1 / 1.19, delta=1e-12)
        self.assertAlmostEqual(delta_threshold(PIZZA), 0.840336134, delta=1e-9)

    def test_threshold_undefined_when_cooperation_cannot_pay(self):
        with self.assertRaises(ThresholdUndefined):
            delta_threshold(PIZZA.replace(alpha=0.5, c=1.6))

    def test_lifetimes_and_interleave(self):
        lifetimes = interleave_and_lifetimes(PIZZA.with_delta(0.84))
        self.assertAlmostEqual(lifetimes.lifetime_provider, 250.0, delta=1e-9)
        self.assertAlmostEqual(lifetimes.lifetime_client, 6.25, delta=1e-9)
        self.assertEqual(lifetimes.lifetime_client_rounds, 7)
        self.assertEqual(lifetimes.n_max, 43)


class FalseReportBoundTests(SimpleTestCase):

    def test_pizza_gamma(self):
        self.assertAlmostEqual(gamma_bound(PIZZA), 0.1, delta=1e-12)

    def test_gamma_low_premium_branch(self):
        # rho below u(1-alpha)/p uses the first branch, which vanishes here
        self.assertAlmostEqual(gamma_bound(PIZZA.replace(rho=0.01)), 0.0, delta=1e-12)

    def test_gamma_high_quality_rate_branch_example(self):
        params = PIZZA.replace(p=1.0, u=1.2, alpha=0.8, c=0.5, rho=0.15)
        self.assertLessEqual(params.p * params.rho, params.u * (1 - params.alpha))
        self.assertAlmostEqual(gamma_bound(params), 0.11, delta=1e-12)

    def test_gamma_grows_with_the_outside_option_premium(self):
        rng = random.Random(23)
        for _ in range(50):
            market = random_market(rng)
            values = [gamma_bound(market.replace(rho=rho)) for rho in np.linspace(0.01, 2.0, 40)]
            self.assertTrue(all(a <= b + 1e-12 for a, b in zip(values, values[1:])), str(market))

    def test_gamma_hat_single_test(self):
        v_hat_c = v_hat_c_threshold(PIZZA, 1)
        expected = (1 - 0.95) * 0.01 / (0.95 * 1)
        self.assertAlmostEqual(gamma_hat(PIZZA, v_hat_c), expected, delta=1e-12)
        self.assertAlmostEqual(gamma_hat(PIZZA, v_hat_c), 5.263e-4, delta=1e-7)

    def test_gamma_hat_at_the_minimax_floor_equals_gamma(self):
        rng = random.Random(11)
        checked = 0
        while checked < 100:
            params = random_market(rng)
            if not params.is_viable:
                continue
            self.assertAlmostEqual(gamma_hat(params, params.minimax_client), gamma_bound(params), delta=1e-12)
            checked += 1

    def test_gamma_hat_beyond_honest_trade_is_zero(self):
        self.assertEqual(gamma_hat(PIZZA, 0.995), 0.0)

    def test_refined_bound_is_tighter_for_reputable_clients(self):
        gamma = gamma_bound(PIZZA)
        for mu_star in MU_STAR_SWEEP:
            if mu_star < 0.26:
                continue
            refined = gamma_hat(PIZZA, reputation_floor(PIZZA, k_p(PIZZA, mu_star)))
            self.assertLessEqual(refined, gamma + 1e-12, f'mu*={mu_star}')

    def test_about_half_as_many_false_reports_at_thirty_percent(self):
        refined = gamma_hat(PIZZA, reputation_floor(PIZZA, k_p(PIZZA, 0.3)))
        ratio = refined / gamma_bound(PIZZA)
        self.assertGreaterEqual(ratio, 0.3)
        self.assertLessEqual(ratio, 0.7)

    def test_operative_bound_is_the_minimum(self):
        report = compute_bound_report(PIZZA, mu_star=0.2)
        self.assertEqual(report.k_p, 3)
        self.assertEqual(report.operative_gamma, min(report.gamma, report.gamma_hat))


class TestingBoundTests(SimpleTestCase):

    def test_pi_bar(self):
        self.assertAlmostEqual(pi_bar(PIZZA), 0.63161, places=4)

    def test_pizza_k_p(self):
        self.assertEqual(k_p(PIZZA, 0.2), 3)
        self.assertEqual(k_p(PIZZA, 0.4), 1)

    def test_k_p_is_a_non_increasing_step_function(self):
        values = [k_p(PIZZA, mu) for mu in MU_STAR_SWEEP]
        self.assertTrue(all(a >= b for a, b in zip(values, values[1:])))
        self.assertTrue(all(float(v).is_integer() for v in values))

    def test_k_p_does_not_grow_with_the_penalty(self):
        rng = random.Random(31)
        checked = 0
        while checked < 50:
            market = random_market(rng)
            if not market.is_viable:
                continue
            mu_star = rng.uniform(0.05, 0.95)
            values = [k_p(market.replace(eps_bar=eps_bar), mu_star) for eps_bar in np.linspace(0.1, 8.0, 40)]
            self.assertTrue(all(a >= b for a, b in zip(values, values[1:])), str(market))
            checked += 1

    def test_pi_bar_below_one_exactly_when_the_penalty_exceeds_the_price(self):
        rng = random.Random(37)
        checked = 0
        while checked < 200:
            market = random_market(rng)
            if not market.is_viable or market.eps_bar == 0 or abs(market.eps_bar - market.p) < 1e-6:
                continue
            self.assertEqual(pi_bar(market) < 1, market.eps_bar > market.p, str(market))
            checked += 1

    def test_certain_commitment_needs_no_test(self):
        self.assertEqual(n_pi(1.0, 0.5), 0)

    def test_unbounded_when_penalty_does_not_exceed_price(self):
        cheap = PIZZA.replace(eps_bar=1.0)
        self.assertGreaterEqual(pi_bar(cheap), 1.0 - 1e-12)
        self.assertTrue(math.isinf(k_p(cheap, 0.2)))

    def test_pi_bar_needs_a_penalty(self):
        with self.assertRaises(BoundUndefined):
            pi_bar(PIZZA.replace(eps_bar=0.0))

    def test_reputation_floor(self):
        self.assertEqual(reputation_floor(PIZZA, math.inf), PIZZA.minimax_client)
        self.assertAlmostEqual(reputation_floor(PIZZA, 0), 0.99, delta=1e-12)
        self.assertAlmostEqual(reputation_floor(PIZZA, 2), 0.889473684, delta=1e-8)


class ReportingDecisionTests(SimpleTestCase):

    def test_low_continuation_favours_building_a_reputation(self):
        values = reporting_decision_values(PIZZA, 1, 0.8)
        self.assertAlmostEqual(values.v_c_report0, 0.89, delta=1e-12)
        self.assertAlmostEqual(values.v_c_report1, 0.71, delta=1e-12)
        self.assertEqual(reputation_building_value(PIZZA, 1, 0.8), ReportDecision.REPORT0)

    def test_high_continuation_favours_reporting_one(self):
        values = reporting_decision_values(PIZZA, 2, 0.99)
        self.assertAlmostEqual(values.v_c_report0, 0.795, delta=1e-12)
        self.assertAlmostEqual(values.v_c_report1, 0.8905, delta=1e-12)
        self.assertEqual(reputation_building_value(PIZZA, 2, 0.99), ReportDecision.REPORT1)

    def test_indifference_at_the_threshold(self):
        for tests in (1, 2, 3):
            threshold = v_hat_c_threshold(PIZZA, tests)
            self.assertEqual(reputation_building_value(PIZZA, tests, threshold), ReportDecision.INDIFFERENT)

    def test_threshold_needs_a_finite_test_count(self):
        with self.assertRaises(ValueError):
            v_hat_c_threshold(PIZZA, 0)
        with self.assertRaises(ValueError):
            v_hat_c_threshold(PIZZA, math.inf)


class NoisyClientBoundTests(SimpleTestCase):

    def test_nu_bound(self):
        self.assertAlmostEqual(malicious_nu_bound(PIZZA), 0.076, delta=1e-12)

    def test_provider_breaks_even_at_the_bound(self):
        nu = malicious_nu_bound(PIZZA)
        self.assertAlmostEqual(provider_noise_payoff(PIZZA, nu), 0.0, delta=1e-12)
        self.assertAlmostEqual(provider_noise_payoff_exact(PIZZA, nu), 0.0019, delta=1e-12)

    def test_free_reports_tolerate_any_noise(self):
        self.assertEqual(malicious_nu_bound(PIZZA.replace(eps_bar=0.0)), 1.0)


class BoundReportTests(SimpleTestCase):

    def test_pizza_report(self):
        report = compute_bound_report(PIZZA)
        self.assertAlmostEqual(report.delta_threshold, 0.840336134, delta=1e-9)
        self.assertAlmostEqual(report.gamma, 0.1, delta=1e-12)
        self.assertAlmostEqual(report.v_p_max, 0.272727273, delta=1e-9)
        self.assertIsNone(report.k_p)
        self.assertEqual(report.clamped, [])

    def test_clamped_fraction_is_flagged(self):
        # a large premium pushes p*rho/u past 1
        report = compute_bound_report(PIZZA.replace(rho=3.0))
        self.assertEqual(report.gamma, 1.0)
        self.assertIn('gamma', report.clamped)
