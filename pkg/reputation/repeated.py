"""
Discounted repeated game: seeded rollouts, normalized and continuation
payoffs, and the exact one-shot deviation check for automaton profiles.
"""
import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Iterable, Optional

import numpy as np

from reputation.automata import Profile, PublicHistory, joint_states
from reputation.backends import ReputationBackend
from reputation.cache_utils import timed
from reputation.exceptions import ValueSolveError
from reputation.game import (ClientStrategy, MixedStrategy, Outcome, PayoffPair, ProviderStrategy,
                             feedback_of, outcome_distribution, realize_outcome, stage_payoffs)
from reputation.params import MarketParams
from reputation.rng import SeededStreams

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class RoundRecord:
    round: int
    client_action: ClientStrategy
    provider_action: ProviderStrategy
    outcome: Outcome
    g_client: float
    g_provider: float


@dataclass
class SimTrace:
    seed: int
    horizon: int
    profile: str = ''
    records: list[RoundRecord] = field(default_factory=list)
    backend: dict[str, float] = field(default_factory=dict)

    def __len__(self) -> int:
        return len(self.records)

    def append(self, record: RoundRecord) -> None:
        if record.round != len(self.records):
            raise ValueError(f"round {record.round} appended after {len(self.records)} records")
        self.records.append(record)

    @property
    def outcomes(self) -> list[Outcome]:
        return [record.outcome for record in self.records]

    @property
    def history(self) -> PublicHistory:
        return tuple(self.outcomes)

    def payoff_matrix(self) -> np.ndarray:
        """Per-round payoffs, shape (rounds, 2): client then provider."""
        if not self.records:
            return np.zeros((0, 2))
        return np.array([(r.g_client, r.g_provider) for r in self.records], dtype=float)

    def count(self, *outcomes: Outcome) -> int:
        return sum(1 for record in self.records if record.outcome in outcomes)


def horizon_for(delta: float, tail_mass: float = 1e-12) -> int:
    """Rounds after which the remaining discount mass delta**T drops below tail_mass."""
    if not 0 < delta < 1:
        raise ValueError(f"delta must lie in (0, 1), got {delta}")
    return max(1, math.ceil(math.log(tail_mass) / math.log(delta)))


def realized_payoffs(params: MarketParams, sc: ClientStrategy, sp: ProviderStrategy,
                     outcome: Outcome) -> tuple[float, float]:
    """
    Payoffs of one played round before the mechanism's penalty on the
    provider; the client's reporting cost eps is included.
    """
    if outcome is Outcome.OUT:
        return params.minimax_client, 0.0
    client, provider = -params.p, params.p
    if sp.high_effort:
        provider -= params.c
    if outcome is Outcome.ROLLBACK:
        return client + params.p, provider - params.p
    if outcome.delivered_quality == 1:
        client += params.u
    if outcome.is_negative:
        client -= params.eps
    return client, provider


def _sample(streams: SeededStreams, mixed: MixedStrategy):
    strategies, weights = zip(*mixed.items())
    return streams.choice(list(strategies), list(weights))


def simulate(params: MarketParams, profile: Profile, backend: ReputationBackend,
             seed: int, T: int) -> SimTrace:
    """Play T rounds of the profile; deterministic given the seed."""
    if T < 1:
        raise ValueError(f"T must be at least 1, got {T}")
    streams = SeededStreams(seed)
    mechanism = backend.spawn()
    trace = SimTrace(seed=seed, horizon=T, profile=profile.name)
    client_state, provider_state = profile.client.initial, profile.provider.initial

    for t in range(T):
        sc = _sample(streams, profile.client.action(client_state))
        sp = _sample(streams, profile.provider.action(provider_state))
        # one coin per round keeps nature aligned across profiles
        high_quality = streams.quality_coin(params.alpha)
        outcome = realize_outcome(sc, sp, high_quality)
        g_client, g_provider = realized_payoffs(params, sc, sp, outcome)
        g_provider += mechanism.on_feedback(feedback_of(outcome))
        trace.append(RoundRecord(t, sc, sp, outcome, g_client, g_provider))
        client_state = profile.client.transition(client_state, outcome)
        provider_state = profile.provider.transition(provider_state, outcome)

    trace.backend = mechanism.summary()
    return trace


def _discounted_sum(values: np.ndarray, delta: float) -> np.ndarray:
    weights = delta ** np.arange(len(values))
    return (1 - delta) * weights @ values


def normalized_payoff(trace: SimTrace, delta: float) -> PayoffPair:
    """(1 - delta) * sum_t delta^t g^t for both players."""
    if not 0 < delta < 1:
        raise ValueError(f"delta must lie in (0, 1), got {delta}")
    if not trace.records:
        return PayoffPair(0.0, 0.0)
    client, provider = _discounted_sum(trace.payoff_matrix(), delta)
    return PayoffPair(float(client), float(provider))


def continuation_payoff(trace: SimTrace, t: int, delta: float) -> PayoffPair:
    """Average continuation payoff from round t onward, round t included."""
    if not 0 <= t < len(trace):
        raise IndexError(f"round {t} outside a trace of {len(trace)} rounds")
    if not 0 < delta < 1:
        raise ValueError(f"delta must lie in (0, 1), got {delta}")
    client, provider = _discounted_sum(trace.payoff_matrix()[t:], delta)
    return PayoffPair(float(client), float(provider))


def continuation_payoffs(trace: SimTrace, delta: float) -> np.ndarray:
    """All continuation payoffs at once via the backward recursion V^t = (1-d)g^t + d V^{t+1}."""
    payoffs = trace.payoff_matrix()
    values = np.zeros((len(payoffs) + 1, 2))
    for t in range(len(payoffs) - 1, -1, -1):
        values[t] = (1 - delta) * payoffs[t] + delta * values[t + 1]
    return values[:-1]


def empirical_gamma(trace: SimTrace, delta: float) -> float:
    """Discount-weighted share of rounds recording a false positive report (q0 reported 1)."""
    flags = np.array([record.outcome is Outcome.Q0R1 for record in trace.records], dtype=float)
    if not len(flags):
        return 0.0
    return float(_discounted_sum(flags, delta))


@dataclass
class RolloutSummary:
    seeds: list[int]
    payoffs: np.ndarray
    traces: list[SimTrace]

    @property
    def mean(self) -> PayoffPair:
        client, provider = self.payoffs.mean(axis=0)
        return PayoffPair(float(client), float(provider))

    @property
    def stderr(self) -> PayoffPair:
        if len(self.payoffs) < 2:
            return PayoffPair(math.inf, math.inf)
        client, provider = self.payoffs.std(axis=0, ddof=1) / math.sqrt(len(self.payoffs))
        return PayoffPair(float(client), float(provider))


@timed("rollouts")
def run_rollouts(params: MarketParams, profile: Profile, backend: ReputationBackend,
                 seeds: Iterable[int], T: int, delta: Optional[float] = None,
                 threads: int = 1, keep_traces: bool = True) -> RolloutSummary:
    """Independent rollouts, one per seed, on at most `threads` workers."""
    delta = params.delta if delta is None else delta
    seeds = list(seeds)

    def one(seed: int) -> SimTrace:
        return simulate(params, profile, backend, seed, T)

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            traces = list(pool.map(one, seeds))
    else:
        traces = [one(seed) for seed in seeds]

    payoffs = np.array([normalized_payoff(trace, delta).as_tuple() for trace in traces])
    summary = RolloutSummary(seeds, payoffs, traces if keep_traces else [])
    logger.info(
        f"{len(seeds)} rollouts of {profile.name!r}, T={T}: mean payoffs "
        f"({summary.mean.v_client:.6f}, {summary.mean.v_provider:.6f})"
    )
    return summary


@dataclass(frozen=True)
class Deviation:
    state: tuple[str, str]
    player: str
    deviation: str
    gain: float


@dataclass
class DeviationCheck:
    delta: float
    values: dict[tuple[str, str], PayoffPair]
    deviations: list[Deviation]
    tol: float

    @property
    def failures(self) -> list[Deviation]:
        return [d for d in self.deviations if d.gain > self.tol]

    @property
    def passed(self) -> bool:
        return not self.failures

    @property
    def binding(self) -> Optional[Deviation]:
        """Most profitable deviation (the one that decides pass or fail)."""
        if not self.deviations:
            return None
        return max(self.deviations, key=lambda d: d.gain)


def state_values(params: MarketParams, profile: Profile,
                 delta: float) -> dict[tuple[str, str], PayoffPair]:
    """Exact normalized values of every joint automaton state."""
    states = joint_states(profile)
    index = {state: i for i, state in enumerate(states)}
    n = len(states)
    transition = np.zeros((n, n))
    rewards = np.zeros((n, 2))
    for i, (client_state, provider_state) in enumerate(states):
        client_play = profile.client.action(client_state)
        provider_play = profile.provider.action(provider_state)
        rewards[i] = stage_payoffs(params, client_play, provider_play).as_tuple()
        for outcome, probability in outcome_distribution(params, client_play, provider_play).items():
            if probability == 0:
                continue
            nxt = (profile.client.transition(client_state, outcome),
                   profile.provider.transition(provider_state, outcome))
            transition[i, index[nxt]] += probability

    system = np.eye(n) - delta * transition
    try:
        solution = np.linalg.solve(system, (1 - delta) * rewards)
    except np.linalg.LinAlgError as exc:
        raise ValueSolveError(f"value recursion of {profile.name!r} is singular: {exc}") from exc
    if not np.all(np.isfinite(solution)):
        raise ValueSolveError(f"value recursion of {profile.name!r} did not produce finite values")
    return {state: PayoffPair(*map(float, solution[i])) for state, i in index.items()}


def one_shot_deviation_check(params: MarketParams, profile: Profile, delta: float,
                             tol: float = 1e-9) -> DeviationCheck:
    """
    Verify that no player gains more than `tol` by changing the action of a
    single joint state for a single round.
    """
    values = state_values(params, profile, delta)
    deviations: list[Deviation] = []
    for (client_state, provider_state), value in values.items():
        client_play = profile.client.action(client_state)
        provider_play = profile.provider.action(provider_state)

        def continuation(outcome: Outcome) -> PayoffPair:
            return values[(profile.client.transition(client_state, outcome),
                           profile.provider.transition(provider_state, outcome))]

        for sc in ClientStrategy:
            g = stage_payoffs(params, sc, provider_play).v_client
            future = sum(pr * continuation(y).v_client
                         for y, pr in outcome_distribution(params, sc, provider_play).items() if pr)
            gain = (1 - delta) * g + delta * future - value.v_client
            deviations.append(Deviation((client_state, provider_state), 'client', sc.value, gain))

        for sp in ProviderStrategy:
            g = stage_payoffs(params, client_play, sp).v_provider
            future = sum(pr * continuation(y).v_provider
                         for y, pr in outcome_distribution(params, client_play, sp).items() if pr)
            gain = (1 - delta) * g + delta * future - value.v_provider
            deviations.append(Deviation((client_state, provider_state), 'provider', sp.value, gain))

    check = DeviationCheck(delta, values, deviations, tol)
    binding = check.binding
    logger.info(
        f"Deviation check of {profile.name!r} at delta={delta:.6f}: "
        f"{'pass' if check.passed else 'fail'} (max gain {binding.gain if binding else 0.0:.3e})"
    )
    return check
