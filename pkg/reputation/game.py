"""
The one-shot game between a client and a service provider.

One interaction: the client opts out (buys the outside option at p(1+rho)) or
pays p up front; the provider exerts low (e0) or high (e1) effort, nature
draws high quality q1 with probability alpha when effort is high (q0 always
under low effort), the provider either delivers (d) or rolls back and
reimburses (l), and after a delivery the client reports 1 or 0. A negative
report costs the client eps and the provider eps_bar.

`stage_payoffs` is the hand-encoded normal form; `tree_payoffs` walks the
extensive form from the rules above and must agree with it on every cell.
"""
import enum
import itertools
from dataclasses import dataclass
from typing import Callable, Generic, Iterator, Mapping, Optional, TypeVar, Union

from reputation.exceptions import InvalidStrategy
from reputation.params import MarketParams

PROBABILITY_TOL = 1e-12


class ClientStrategy(enum.Enum):
    """Pure client strategies; the four `out` variants are collapsed into OUT."""
    OUT = 'out'
    IN11 = 'in11'
    IN10 = 'in10'
    IN01 = 'in01'
    IN00 = 'in00'

    @property
    def enters(self) -> bool:
        return self is not ClientStrategy.OUT

    def report(self, quality: int) -> int:
        """Report sent after receiving quality q0 (0) or q1 (1)."""
        if not self.enters:
            raise InvalidStrategy('a client that opts out never reports')
        return int(self.value[2 + quality])

    @classmethod
    def entering(cls) -> tuple['ClientStrategy', ...]:
        return (cls.IN11, cls.IN10, cls.IN01, cls.IN00)


class ProviderStrategy(enum.Enum):
    """
    Pure provider strategies.

    E1LD (high effort, roll back q0, deliver q1) is the socially desired one.
    """
    E0L = 'e0l'
    E0D = 'e0d'
    E1LL = 'e1ll'
    E1LD = 'e1ld'
    E1DL = 'e1dl'
    E1DD = 'e1dd'

    @property
    def high_effort(self) -> bool:
        return self.value[1] == '1'

    def delivers(self, quality: int) -> bool:
        if not self.high_effort:
            return self.value[2] == 'd'
        return self.value[2 + quality] == 'd'


class Outcome(enum.Enum):
    """Public signal observed by both players after a round."""
    OUT = 'out'
    ROLLBACK = 'l'
    Q0R1 = 'q0_1'
    Q0R0 = 'q0_0'
    Q1R1 = 'q1_1'
    Q1R0 = 'q1_0'

    @property
    def delivered_quality(self) -> Optional[int]:
        if self in (Outcome.OUT, Outcome.ROLLBACK):
            return None
        return int(self.value[1])

    @property
    def report(self) -> Optional[int]:
        if self in (Outcome.OUT, Outcome.ROLLBACK):
            return None
        return int(self.value[3])

    @property
    def is_negative(self) -> bool:
        return self.report == 0

    @classmethod
    def delivered(cls, quality: int, report: int) -> 'Outcome':
        return cls(f'q{quality}_{report}')


def feedback_of(outcome: Outcome) -> Optional[str]:
    """Signal recorded by the reputation mechanism for an outcome."""
    if outcome is Outcome.OUT:
        return None
    if outcome is Outcome.ROLLBACK:
        return 'neutral'
    return 'negative' if outcome.is_negative else 'positive'


@dataclass(frozen=True)
class PayoffPair:
    v_client: float
    v_provider: float

    def __add__(self, other: 'PayoffPair') -> 'PayoffPair':
        return PayoffPair(self.v_client + other.v_client, self.v_provider + other.v_provider)

    def __sub__(self, other: 'PayoffPair') -> 'PayoffPair':
        return PayoffPair(self.v_client - other.v_client, self.v_provider - other.v_provider)

    def scaled(self, factor: float) -> 'PayoffPair':
        return PayoffPair(factor * self.v_client, factor * self.v_provider)

    def as_tuple(self) -> tuple[float, float]:
        return (self.v_client, self.v_provider)

    def close_to(self, other: 'PayoffPair', tol: float) -> bool:
        return (abs(self.v_client - other.v_client) <= tol
                and abs(self.v_provider - other.v_provider) <= tol)


ZERO = PayoffPair(0.0, 0.0)

S = TypeVar('S', ClientStrategy, ProviderStrategy)


class MixedStrategy(Generic[S]):
    """Probability distribution over the pure strategies of one player."""

    def __init__(self, weights: Mapping[S, float]) -> None:
        cleaned = {s: float(w) for s, w in weights.items() if w != 0}
        if any(w < 0 for w in cleaned.values()):
            raise InvalidStrategy(f'negative weight in mixed strategy: {weights}')
        if not cleaned or abs(sum(cleaned.values()) - 1.0) > PROBABILITY_TOL:
            raise InvalidStrategy(f'mixed strategy weights must sum to 1: {weights}')
        kinds = {type(s) for s in cleaned}
        if len(kinds) != 1:
            raise InvalidStrategy('a mixed strategy mixes pure strategies of one player only')
        self._weights = cleaned

    @classmethod
    def pure(cls, strategy: S) -> 'MixedStrategy[S]':
        return cls({strategy: 1.0})

    def items(self) -> Iterator[tuple[S, float]]:
        return iter(self._weights.items())

    def weight(self, strategy: S) -> float:
        return self._weights.get(strategy, 0.0)

    def support(self) -> list[S]:
        return list(self._weights)

    def __eq__(self, other: object) -> bool:
        return isinstance(other, MixedStrategy) and self._weights == other._weights

    def __repr__(self) -> str:
        inner = ', '.join(f'{s.value}: {w:g}' for s, w in self._weights.items())
        return f'MixedStrategy({{{inner}}})'


ClientPlay = Union[ClientStrategy, MixedStrategy[ClientStrategy]]
ProviderPlay = Union[ProviderStrategy, MixedStrategy[ProviderStrategy]]


def as_mixed(play: Union[S, MixedStrategy[S]]) -> MixedStrategy[S]:
    if isinstance(play, MixedStrategy):
        return play
    return MixedStrategy.pure(play)


def pure_profiles() -> Iterator[tuple[ClientStrategy, ProviderStrategy]]:
    return itertools.product(ClientStrategy, ProviderStrategy)


# Normal form, one row per provider strategy, entering columns in the order
# in11, in10, in01, in00. The out column is (u - p(1+rho), 0) everywhere.
Cell = Callable[[MarketParams], tuple[float, float]]

_TABLE: dict[ProviderStrategy, tuple[Cell, Cell, Cell, Cell]] = {
    ProviderStrategy.E0L: (
        lambda m: (0.0, 0.0),
        lambda m: (0.0, 0.0),
        lambda m: (0.0, 0.0),
        lambda m: (0.0, 0.0),
    ),
    ProviderStrategy.E0D: (
        lambda m: (-m.p, m.p),
        lambda m: (-m.p, m.p),
        lambda m: (-m.p - m.eps, m.p - m.eps_bar),
        lambda m: (-m.p - m.eps, m.p - m.eps_bar),
    ),
    ProviderStrategy.E1LL: (
        lambda m: (0.0, -m.c),
        lambda m: (0.0, -m.c),
        lambda m: (0.0, -m.c),
        lambda m: (0.0, -m.c),
    ),
    ProviderStrategy.E1LD: (
        lambda m: (m.alpha * (m.u - m.p), m.alpha * m.p - m.c),
        lambda m: (m.alpha * (m.u - m.p - m.eps), m.alpha * (m.p - m.eps_bar) - m.c),
        lambda m: (m.alpha * (m.u - m.p), m.alpha * m.p - m.c),
        lambda m: (m.alpha * (m.u - m.p - m.eps), m.alpha * (m.p - m.eps_bar) - m.c),
    ),
    ProviderStrategy.E1DL: (
        lambda m: (-(1 - m.alpha) * m.p, (1 - m.alpha) * m.p - m.c),
        lambda m: (-(1 - m.alpha) * m.p, (1 - m.alpha) * m.p - m.c),
        lambda m: (-(1 - m.alpha) * (m.p + m.eps), (1 - m.alpha) * (m.p - m.eps_bar) - m.c),
        lambda m: (-(1 - m.alpha) * (m.p + m.eps), (1 - m.alpha) * (m.p - m.eps_bar) - m.c),
    ),
    ProviderStrategy.E1DD: (
        lambda m: (m.alpha * m.u - m.p, m.p - m.c),
        lambda m: (m.alpha * (m.u - m.eps) - m.p, m.p - m.alpha * m.eps_bar - m.c),
        lambda m: (m.alpha * m.u - (1 - m.alpha) * m.eps - m.p,
                   m.p - (1 - m.alpha) * m.eps_bar - m.c),
        lambda m: (m.alpha * m.u - m.eps - m.p, m.p - m.eps_bar - m.c),
    ),
}


def _pure_stage_payoffs(params: MarketParams, sc: ClientStrategy,
                        sp: ProviderStrategy) -> PayoffPair:
    if sc is ClientStrategy.OUT:
        return PayoffPair(params.minimax_client, 0.0)
    column = ClientStrategy.entering().index(sc)
    return PayoffPair(*_TABLE[sp][column](params))


def _bilinear(pure: Callable[[MarketParams, ClientStrategy, ProviderStrategy], PayoffPair],
              params: MarketParams, sc: ClientPlay, sp: ProviderPlay) -> PayoffPair:
    if isinstance(sc, ClientStrategy) and isinstance(sp, ProviderStrategy):
        return pure(params, sc, sp)
    total = ZERO
    for c_strategy, c_weight in as_mixed(sc).items():
        for p_strategy, p_weight in as_mixed(sp).items():
            total = total + pure(params, c_strategy, p_strategy).scaled(c_weight * p_weight)
    return total


def stage_payoffs(params: MarketParams, sc: ClientPlay, sp: ProviderPlay) -> PayoffPair:
    """Expected stage payoffs from the normal form, bilinear in mixtures."""
    return _bilinear(_pure_stage_payoffs, params, sc, sp)


def _walk_tree(params: MarketParams, sc: ClientStrategy, sp: ProviderStrategy) -> PayoffPair:
    if not sc.enters:
        return PayoffPair(params.u - params.p * (1 + params.rho), 0.0)

    # entry: the client pays p up front
    client, provider = -params.p, params.p
    if sp.high_effort:
        provider -= params.c
        branches = ((1, params.alpha), (0, 1 - params.alpha))
    else:
        branches = ((0, 1.0),)

    expected_client = expected_provider = 0.0
    for quality, probability in branches:
        leaf_client, leaf_provider = client, provider
        if not sp.delivers(quality):
            # rollback refunds the price
            leaf_client += params.p
            leaf_provider -= params.p
        else:
            if quality == 1:
                leaf_client += params.u
            if sc.report(quality) == 0:
                leaf_client -= params.eps
                leaf_provider -= params.eps_bar
        expected_client += probability * leaf_client
        expected_provider += probability * leaf_provider
    return PayoffPair(expected_client, expected_provider)


def tree_payoffs(params: MarketParams, sc: ClientPlay, sp: ProviderPlay) -> PayoffPair:
    """Expected payoffs evaluated directly on the extensive form."""
    return _bilinear(_walk_tree, params, sc, sp)


def _pure_outcomes(params: MarketParams, sc: ClientStrategy,
                   sp: ProviderStrategy) -> dict[Outcome, float]:
    if not sc.enters:
        return {Outcome.OUT: 1.0}
    if sp.high_effort:
        branches = ((1, params.alpha), (0, 1 - params.alpha))
    else:
        branches = ((0, 1.0),)
    distribution: dict[Outcome, float] = {}
    for quality, probability in branches:
        if sp.delivers(quality):
            outcome = Outcome.delivered(quality, sc.report(quality))
        else:
            outcome = Outcome.ROLLBACK
        distribution[outcome] = distribution.get(outcome, 0.0) + probability
    return distribution


def outcome_distribution(params: MarketParams, sc: ClientPlay,
                         sp: ProviderPlay) -> dict[Outcome, float]:
    """Probability of every public outcome; all six outcomes are keys."""
    distribution = {outcome: 0.0 for outcome in Outcome}
    for c_strategy, c_weight in as_mixed(sc).items():
        for p_strategy, p_weight in as_mixed(sp).items():
            for outcome, probability in _pure_outcomes(params, c_strategy, p_strategy).items():
                distribution[outcome] += c_weight * p_weight * probability
    return distribution


def realize_outcome(sc: ClientStrategy, sp: ProviderStrategy, high_quality: bool) -> Outcome:
    """Outcome of a pure profile once nature's coin is known."""
    if not sc.enters:
        return Outcome.OUT
    quality = 1 if (sp.high_effort and high_quality) else 0
    if not sp.delivers(quality):
        return Outcome.ROLLBACK
    return Outcome.delivered(quality, sc.report(quality))


def minimax(params: MarketParams) -> PayoffPair:
    """Client secures the outside option, the provider secures 0 with e0l."""
    return PayoffPair(params.minimax_client, 0.0)


def is_market_viable(params: MarketParams) -> bool:
    """Honest trade beats the outside option for both sides."""
    return params.is_viable


def provider_max_ppe_payoff(params: MarketParams) -> float:
    p, u, c, alpha, rho = params.p, params.u, params.c, params.alpha, params.rho
    if rho <= u * (1 - alpha) / p:
        return alpha * u - c - u + p * (1 + rho)
    return p + c * (p * rho - u) / (alpha * u)


def _clip_polyline(vertices: list[PayoffPair], floor: PayoffPair) -> list[PayoffPair]:
    """Keep the prefix of the polyline inside {v >= floor}, cutting at the boundary."""
    def inside(v: PayoffPair) -> bool:
        return v.v_client >= floor.v_client and v.v_provider >= floor.v_provider

    if not vertices or not inside(vertices[0]):
        return []
    clipped = [vertices[0]]
    for start, end in zip(vertices, vertices[1:]):
        if inside(end):
            clipped.append(end)
            continue
        t = 1.0
        for a, b, f in ((start.v_client, end.v_client, floor.v_client),
                        (start.v_provider, end.v_provider, floor.v_provider)):
            if b < f:
                t = min(t, (a - f) / (a - b))
        if t > 0:
            clipped.append(start + (end - start).scaled(t))
        break
    return clipped


def pareto_frontier(params: MarketParams) -> list[PayoffPair]:
    """
    Vertices of the pareto-optimal frontier of the feasible, individually
    rational payoffs, ordered from the client-best to the provider-best end.
    """
    if not is_market_viable(params):
        return [minimax(params)]
    corners = [
        stage_payoffs(params, ClientStrategy.IN11, ProviderStrategy.E1LD),
        stage_payoffs(params, ClientStrategy.IN11, ProviderStrategy.E1DD),
        stage_payoffs(params, ClientStrategy.IN11, ProviderStrategy.E0D),
    ]
    clipped = _clip_polyline(corners, minimax(params))
    return clipped or [minimax(params)]


def best_responses(params: MarketParams, opponent: Union[ClientPlay, ProviderPlay],
                   tol: float = PROBABILITY_TOL) -> list:
    """Pure best responses to the opponent's (possibly mixed) play."""
    sample = opponent.support()[0] if isinstance(opponent, MixedStrategy) else opponent
    if isinstance(sample, ProviderStrategy):
        values = {sc: stage_payoffs(params, sc, opponent).v_client for sc in ClientStrategy}
    else:
        values = {sp: stage_payoffs(params, opponent, sp).v_provider for sp in ProviderStrategy}
    best = max(values.values())
    return [s for s, v in values.items() if v >= best - tol]


def stage_equilibria(params: MarketParams) -> list[tuple[ClientStrategy, ProviderStrategy]]:
    """Pure Nash equilibria of the one-shot game."""
    return [
        (sc, sp) for sc, sp in pure_profiles()
        if sc in best_responses(params, sp) and sp in best_responses(params, sc)
    ]
