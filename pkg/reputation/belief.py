"""
Incomplete information about the client's type.

The provider does not know whether the client is a rational (normal) client,
a commitment type that always reports honestly, a malicious client paid
externally for negative reports, or a normal client that misreports by
mistake. He holds a posterior over these types and updates it from the
public outcomes. Reports carry information only after a delivery.
"""
import enum
import logging
import math
from dataclasses import dataclass, field
from typing import Iterable, Mapping, NamedTuple, Optional

import numpy as np

from reputation.backends import DirectFine
from reputation.bounds import k_p, pi_bar, reporting_decision_values
from reputation.exceptions import BeliefInconsistency, SanctionError, UnboundedTesting
from reputation.game import ClientStrategy, Outcome, ProviderStrategy, feedback_of
from reputation.params import MarketParams
from reputation.repeated import RoundRecord, SimTrace, horizon_for, realized_payoffs
from reputation.rng import SeededStreams

logger = logging.getLogger(__name__)

PRIOR_TOL = 1e-12


@dataclass(frozen=True)
class ClientType:
    kind: str
    beta: Optional[float] = None
    nu: Optional[float] = None

    NORMAL = 'normal'
    COMMITMENT = 'commitment'
    MALICIOUS = 'malicious'
    NOISY = 'noisy'

    def __post_init__(self) -> None:
        if self.kind not in (self.NORMAL, self.COMMITMENT, self.MALICIOUS, self.NOISY):
            raise SanctionError(f"unknown client type {self.kind!r}")
        if self.kind == self.NOISY and (self.nu is None or not 0 <= self.nu <= 1):
            raise SanctionError(f"noisy client needs a misreport rate in [0, 1], got {self.nu}")
        if self.kind == self.MALICIOUS and (self.beta is None or self.beta < 0):
            raise SanctionError(f"malicious client needs a nonnegative reward beta, got {self.beta}")

    @classmethod
    def normal(cls) -> 'ClientType':
        return cls(cls.NORMAL)

    @classmethod
    def commitment(cls) -> 'ClientType':
        return cls(cls.COMMITMENT)

    @classmethod
    def malicious(cls, beta: float = 1.0) -> 'ClientType':
        return cls(cls.MALICIOUS, beta=beta)

    @classmethod
    def noisy_normal(cls, nu: float) -> 'ClientType':
        return cls(cls.NOISY, nu=nu)

    def __str__(self) -> str:
        if self.kind == self.MALICIOUS:
            return f'malicious:{self.beta:g}'
        if self.kind == self.NOISY:
            return f'noisy:{self.nu:g}'
        return self.kind


def parse_client_type(text: str) -> ClientType:
    """`normal`, `commitment`, `malicious[:beta]` or `noisy:nu`."""
    name, _, argument = text.strip().partition(':')
    try:
        if name == ClientType.NORMAL:
            return ClientType.normal()
        if name == ClientType.COMMITMENT:
            return ClientType.commitment()
        if name == ClientType.MALICIOUS:
            return ClientType.malicious(float(argument)) if argument else ClientType.malicious()
        if name == ClientType.NOISY:
            return ClientType.noisy_normal(float(argument))
    except ValueError:
        raise SanctionError(f"bad client type argument in {text!r}")
    raise SanctionError(f"unknown client type {text!r}")


Prior = dict[ClientType, float]


def make_prior(weights: Mapping[ClientType, float]) -> Prior:
    prior = {t: float(w) for t, w in weights.items() if w != 0}
    if any(w < 0 for w in prior.values()):
        raise SanctionError(f"prior has negative mass: {weights}")
    if abs(sum(prior.values()) - 1) > PRIOR_TOL:
        raise SanctionError(f"prior must sum to 1, got {sum(prior.values())}")
    return prior


def parse_prior(text: str) -> Prior:
    """Parse `normal=0.7,commitment=0.2,malicious=0.1`."""
    weights: dict[ClientType, float] = {}
    for item in filter(None, (part.strip() for part in text.split(','))):
        name, sep, value = item.rpartition('=')
        if not sep:
            raise SanctionError(f"prior entry {item!r} is not type=probability")
        try:
            weights[parse_client_type(name)] = float(value)
        except ValueError:
            raise SanctionError(f"prior entry {item!r} has a non-numeric probability")
    return make_prior(weights)


def check_reputation_prior(prior: Prior) -> None:
    """The reputation bound needs positive mass on both the normal and commitment type."""
    if prior.get(ClientType.normal(), 0) <= 0 or prior.get(ClientType.commitment(), 0) <= 0:
        raise SanctionError("prior must give positive probability to the normal and commitment types")


def check_malicious_rewards(prior: Prior, params: MarketParams) -> None:
    for client_type in prior:
        if client_type.kind == ClientType.MALICIOUS and client_type.beta is not None \
                and client_type.beta <= params.eps:
            raise SanctionError(
                f"malicious reward beta={client_type.beta:g} must exceed the report cost eps={params.eps:g}"
            )


class ReportConjecture(NamedTuple):
    """Probabilities of reporting 0 after q0 and after q1."""
    zero_after_q0: float
    zero_after_q1: float

    def zero_after(self, quality: int) -> float:
        return self.zero_after_q1 if quality else self.zero_after_q0


HONEST = ReportConjecture(1.0, 0.0)


@dataclass(frozen=True)
class ReportingModel:
    """Reporting behaviour per type; the normal type's is supplied, never assumed."""
    normal: Optional[ReportConjecture] = None

    def for_type(self, client_type: ClientType) -> ReportConjecture:
        if client_type.kind == ClientType.COMMITMENT:
            return HONEST
        if client_type.kind == ClientType.MALICIOUS:
            return ReportConjecture(1.0, 1.0)
        if self.normal is None:
            raise SanctionError(f"a reporting conjecture for the normal type is needed to reason about {client_type}")
        if client_type.kind == ClientType.NOISY:
            nu = client_type.nu or 0.0
            return ReportConjecture(
                self.normal.zero_after_q0 + (1 - self.normal.zero_after_q0) * nu,
                self.normal.zero_after_q1 + (1 - self.normal.zero_after_q1) * nu,
            )
        return self.normal


@dataclass(frozen=True)
class BeliefState:
    posterior: dict[ClientType, float]
    pi_next: float

    def mass(self, client_type: ClientType) -> float:
        return self.posterior.get(client_type, 0.0)

    @property
    def commitment_mass(self) -> float:
        return self.mass(ClientType.commitment())

    def predicted_zero(self, quality: int, model: ReportingModel) -> float:
        return sum(w * model.for_type(t).zero_after(quality) for t, w in self.posterior.items())


def initial_belief(prior: Mapping[ClientType, float], model: ReportingModel) -> BeliefState:
    posterior = make_prior(prior)
    pi_next = sum(w * model.for_type(t).zero_after_q0 for t, w in posterior.items())
    return BeliefState(posterior, pi_next)


def _likelihood(conjecture: ReportConjecture, observed: Outcome) -> float:
    quality, report = observed.delivered_quality, observed.report
    assert quality is not None and report is not None
    zero = conjecture.zero_after(quality)
    return zero if report == 0 else 1 - zero


def bayes_update(belief: BeliefState, observed: Outcome, model: ReportingModel) -> BeliefState:
    """Posterior after one public outcome; types with zero likelihood drop out."""
    if observed.delivered_quality is None:
        return belief
    joint = {t: w * _likelihood(model.for_type(t), observed) for t, w in belief.posterior.items()}
    total = sum(joint.values())
    if total <= 0:
        raise BeliefInconsistency(f"outcome {observed.value} is impossible under every type in the posterior")
    posterior = {t: w / total for t, w in joint.items() if w > 0}
    pi_next = sum(w * model.for_type(t).zero_after_q0 for t, w in posterior.items())
    return BeliefState(posterior, min(1.0, pi_next))


def client_report(client_type: ClientType, quality: int, model: ReportingModel,
                  streams: SeededStreams) -> int:
    zero = model.for_type(client_type).zero_after(quality)
    if zero in (0.0, 1.0):
        return 0 if zero == 1.0 else 1
    return 0 if streams.bernoulli(zero) else 1


def _client_strategy(client_type: ClientType, model: ReportingModel) -> ClientStrategy:
    """Deterministic label of the client's stage play (reports may still be random)."""
    conjecture = model.for_type(client_type)
    after_q0 = 0 if conjecture.zero_after_q0 >= 0.5 else 1
    after_q1 = 0 if conjecture.zero_after_q1 >= 0.5 else 1
    return ClientStrategy(f'in{after_q0}{after_q1}')


class TestingMode(str, enum.Enum):
    WORST_CASE = 'worst-case'
    EXACT = 'exact'


class Schedule(str, enum.Enum):
    EARLIEST = 'earliest'
    RANDOM = 'random'


@dataclass
class TestingResult:
    test_count: int
    k_p: float
    stop_round: Optional[int]
    final_mu_star: float
    trace: Optional[SimTrace] = None
    tests_at: list[int] = field(default_factory=list)


def testing_provider(params: MarketParams, prior: Mapping[ClientType, float], delta: float,
                     seed: int, client_type: ClientType, *,
                     normal_conjecture: Optional[ReportConjecture] = None,
                     mode: TestingMode = TestingMode.WORST_CASE,
                     schedule: Schedule = Schedule.EARLIEST,
                     test_probability: float = 0.5,
                     T: Optional[int] = None,
                     record_trace: bool = True) -> TestingResult:
    """
    Provider that tests the client's type by delivering low quality.

    Outside tests the provider plays E1LD. While his predicted probability that
    a test is answered by a negative report stays at or below pi_bar he plays
    E1DD, so a q0 draw becomes a test. In worst-case mode each answered test
    raises the commitment mass by the factor 1/pi_bar; in exact mode the
    posterior follows Bayes' rule under the reporting model. Once the
    prediction exceeds pi_bar testing stops for good. A test answered by a
    positive report reveals a rational client, who is then tested forever.
    """
    if params.eps_bar <= params.p:
        raise UnboundedTesting(
            f"eps_bar={params.eps_bar:g} <= p={params.p:g}: the number of tests is unbounded"
        )
    market = params.with_delta(delta)
    threshold = pi_bar(market)
    model = ReportingModel(normal_conjecture)
    prior = make_prior(prior)
    check_reputation_prior(prior)
    mu_star0 = prior[ClientType.commitment()]
    bound = k_p(market, mu_star0)
    horizon = T if T is not None else horizon_for(delta)

    streams = SeededStreams(seed)
    high_quality = streams.nature.random(horizon) < market.alpha
    zero_after_q1 = model.for_type(client_type).zero_after_q1
    mechanism = DirectFine(market.eps_bar)
    trace = SimTrace(seed=seed, horizon=horizon, profile=f'testing-vs-{client_type}') if record_trace else None
    client_action = _client_strategy(client_type, model)

    belief = initial_belief(prior, model) if mode is TestingMode.EXACT else None
    mu_star = mu_star0
    revealed_rational = False
    testing = True
    stop_round: Optional[int] = None
    tests_at: list[int] = []

    def predicted() -> float:
        if belief is not None:
            return belief.pi_next
        # worst case: every test is answered negatively with probability pi_bar
        return threshold if mu_star <= threshold else mu_star

    def record(t: int, sp: ProviderStrategy, outcome: Outcome) -> None:
        if trace is None:
            return
        g_client, g_provider = realized_payoffs(market, client_action, sp, outcome)
        g_provider += mechanism.on_feedback(feedback_of(outcome))
        trace.append(RoundRecord(t, client_action, sp, outcome, g_client, g_provider))

    def fill_quiet_rounds(start: int, stop: int) -> None:
        # rounds where q1 was drawn and the client's report is certainly 1
        sp = ProviderStrategy.E1DD if testing else ProviderStrategy.E1LD
        for t in range(start, stop):
            record(t, sp, Outcome.Q1R1)

    if zero_after_q1 == 0:
        eventful = np.flatnonzero(~high_quality)
    else:
        eventful = np.arange(horizon)

    def settled(t: int) -> bool:
        """Stop testing once the prediction exceeds pi_bar; True when nothing else can happen."""
        nonlocal testing, stop_round
        if testing and not revealed_rational and predicted() > threshold:
            testing = False
            stop_round = t
            logger.debug(f"seed {seed}: testing stops at round {t} after {len(tests_at)} tests")
        return not testing and trace is None and zero_after_q1 == 0

    last = 0
    finished = settled(0)
    for t in map(int, eventful):
        if finished:
            break
        fill_quiet_rounds(last, t)
        last = t + 1

        test_now = testing and (schedule is Schedule.EARLIEST or streams.bernoulli(test_probability))
        sp = ProviderStrategy.E1DD if test_now else ProviderStrategy.E1LD
        quality = int(high_quality[t])

        if not sp.delivers(quality):
            record(t, sp, Outcome.ROLLBACK)
            continue

        outcome = Outcome.delivered(quality, client_report(client_type, quality, model, streams))
        record(t, sp, outcome)
        if quality == 0:
            tests_at.append(t)
            if outcome is Outcome.Q0R0 and not revealed_rational:
                mu_star = min(1.0, mu_star / threshold)
            elif outcome is Outcome.Q0R1:
                revealed_rational = True
                mu_star = 0.0
        if belief is not None:
            try:
                belief = bayes_update(belief, outcome, model)
            except BeliefInconsistency:
                revealed_rational = True
                belief = None
            else:
                mu_star = belief.commitment_mass
                if mu_star == 0:
                    revealed_rational = True
        finished = settled(t + 1)
    else:
        fill_quiet_rounds(last, horizon)

    if trace is not None:
        trace.backend = mechanism.summary()
    return TestingResult(
        test_count=len(tests_at),
        k_p=bound,
        stop_round=stop_round,
        final_mu_star=mu_star,
        trace=trace,
        tests_at=tests_at,
    )


class ReportDecision(str, enum.Enum):
    REPORT0 = 'report0'
    REPORT1 = 'report1'
    INDIFFERENT = 'indifferent'


def reputation_building_value(params: MarketParams, k_p: float, v_hat_c: float,
                              tol: float = 1e-12) -> ReportDecision:
    """What a rational client does on her first low-quality delivery."""
    values = reporting_decision_values(params, k_p, v_hat_c)
    if abs(values.v_c_report0 - values.v_c_report1) <= tol:
        return ReportDecision.INDIFFERENT
    if values.v_c_report0 > values.v_c_report1:
        return ReportDecision.REPORT0
    return ReportDecision.REPORT1


@dataclass
class CampaignResult:
    client_type: ClientType
    false_negatives: int
    defended_from: Optional[int]
    provider_payoff: float
    trace: Optional[SimTrace] = None


def malicious_campaign_sim(params: MarketParams, prior: Mapping[ClientType, float], seed: int,
                           client_type: Optional[ClientType] = None, *,
                           normal_conjecture: ReportConjecture = ReportConjecture(0.0, 0.0),
                           T: Optional[int] = None,
                           record_trace: bool = True) -> CampaignResult:
    """
    Provider cooperates (E1LD) and re-evaluates the client after every
    negative report: once the posterior-predicted rate of negative reports on
    high quality makes cooperation unprofitable, he defends with E0L forever.
    A malicious client attacks (reports 0 on every delivery) while the
    provider cooperates and opts out once he defends. The client's type is
    drawn from the prior when not given.
    """
    prior = make_prior(prior)
    check_malicious_rewards(prior, params)
    model = ReportingModel(normal_conjecture)
    streams = SeededStreams(seed)
    if client_type is None:
        types = list(prior)
        client_type = types[int(streams.strategy.choice(len(types), p=[prior[t] for t in types]))]
    horizon = T if T is not None else horizon_for(params.delta)

    mechanism = DirectFine(params.eps_bar)
    belief = initial_belief(prior, model)
    margin = params.alpha * params.p - params.c
    trace = SimTrace(seed=seed, horizon=horizon, profile=f'campaign-vs-{client_type}') if record_trace else None
    malicious = client_type.kind == ClientType.MALICIOUS
    entering = _client_strategy(client_type, model)

    defended_from: Optional[int] = None
    false_negatives = 0
    payoffs = np.zeros(horizon)
    for t in range(horizon):
        defending = defended_from is not None
        sp = ProviderStrategy.E0L if defending else ProviderStrategy.E1LD
        sc = ClientStrategy.OUT if (defending and malicious) else entering
        high_quality = streams.quality_coin(params.alpha)
        if sc is ClientStrategy.OUT:
            outcome = Outcome.OUT
        elif not sp.high_effort or not high_quality:
            outcome = Outcome.ROLLBACK
        else:
            outcome = Outcome.delivered(1, client_report(client_type, 1, model, streams))

        g_client, g_provider = realized_payoffs(params, sc, sp, outcome)
        if outcome.is_negative and malicious:
            g_client += client_type.beta or 0.0
        g_provider += mechanism.on_feedback(feedback_of(outcome))
        payoffs[t] = g_provider
        if trace is not None:
            trace.append(RoundRecord(t, sc, sp, outcome, g_client, g_provider))

        if outcome is Outcome.Q1R0:
            false_negatives += 1
            belief = bayes_update(belief, outcome, model)
            if margin - params.eps_bar * belief.predicted_zero(1, model) < -1e-12:
                defended_from = t + 1
                logger.debug(f"seed {seed}: provider defends from round {t + 1}")
        if defended_from is not None and malicious and trace is None:
            break

    if trace is not None:
        trace.backend = mechanism.summary()
    weights = (1 - params.delta) * params.delta ** np.arange(horizon)
    return CampaignResult(
        client_type=client_type,
        false_negatives=false_negatives,
        defended_from=defended_from,
        provider_payoff=float(weights @ payoffs),
        trace=trace,
    )


def run_testing_batch(params: MarketParams, prior: Mapping[ClientType, float], delta: float,
                      seeds: Iterable[int], client_type: ClientType, **kwargs) -> list[TestingResult]:
    results = [testing_provider(params, prior, delta, seed, client_type, **kwargs) for seed in seeds]
    worst = max((r.test_count for r in results), default=0)
    bound = results[0].k_p if results else math.nan
    logger.info(f"{len(results)} testing rollouts against {client_type}: max tests {worst}, k_P {bound}")
    return results
