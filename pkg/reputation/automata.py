"""
Finite-state public strategies.

A strategy of the repeated game maps public histories to stage actions. Every
strategy used here only needs a finite summary of the history, so strategies
are automata whose transitions read the public outcome of each round.
"""
from dataclasses import dataclass
from typing import Generic, Iterable, Mapping, NamedTuple, Optional, Union

from reputation.exceptions import InvalidStrategy
from reputation.game import (ClientStrategy, MixedStrategy, Outcome, ProviderStrategy,
                             S, as_mixed)

# Outcomes that start the punishment phase of the grim profile: a delivered
# low-quality service or any negative report.
PUNISHMENT_TRIGGERS = frozenset({Outcome.Q0R1, Outcome.Q0R0, Outcome.Q1R0})

# outcomes observed so far, oldest first
PublicHistory = tuple[Outcome, ...]


@dataclass(frozen=True)
class StrategyAutomaton(Generic[S]):
    name: str
    states: tuple[str, ...]
    initial: str
    actions: Mapping[str, MixedStrategy[S]]
    # missing (state, outcome) pairs stay in the same state
    moves: Mapping[tuple[str, Outcome], str]

    def __post_init__(self) -> None:
        if self.initial not in self.states:
            raise InvalidStrategy(f'{self.name}: initial state {self.initial!r} is unknown')
        if set(self.actions) != set(self.states):
            raise InvalidStrategy(f'{self.name}: every state needs exactly one action')
        for (state, _), target in self.moves.items():
            if state not in self.states or target not in self.states:
                raise InvalidStrategy(f'{self.name}: transition {state!r} -> {target!r} is unknown')

    def action(self, state: str) -> MixedStrategy[S]:
        return self.actions[state]

    def transition(self, state: str, outcome: Outcome) -> str:
        return self.moves.get((state, outcome), state)


def constant(name: str, play: Union[S, MixedStrategy[S]]) -> StrategyAutomaton[S]:
    return StrategyAutomaton(name, ('play',), 'play', {'play': as_mixed(play)}, {})


def trigger(name: str, cooperate: S, punish: S,
            on: Iterable[Outcome]) -> StrategyAutomaton[S]:
    """Play `cooperate` until one of `on` is observed, then `punish` forever."""
    moves = {('cooperate', outcome): 'punish' for outcome in on}
    return StrategyAutomaton(
        name, ('cooperate', 'punish'), 'cooperate',
        {'cooperate': MixedStrategy.pure(cooperate), 'punish': MixedStrategy.pure(punish)},
        moves,
    )


def grim_client() -> StrategyAutomaton[ClientStrategy]:
    return trigger('grim-client', ClientStrategy.IN11, ClientStrategy.OUT, PUNISHMENT_TRIGGERS)


def grim_provider() -> StrategyAutomaton[ProviderStrategy]:
    return trigger('grim-provider', ProviderStrategy.E1LD, ProviderStrategy.E0D, PUNISHMENT_TRIGGERS)


def honest_commitment() -> StrategyAutomaton[ClientStrategy]:
    return constant('honest-commitment', ClientStrategy.IN01)


def out_forever() -> StrategyAutomaton[ClientStrategy]:
    return constant('out-forever', ClientStrategy.OUT)


def always(strategy: Union[ClientStrategy, ProviderStrategy]):
    return constant(f'always-{strategy.value}', strategy)


class Profile(NamedTuple):
    name: str
    client: StrategyAutomaton[ClientStrategy]
    provider: StrategyAutomaton[ProviderStrategy]


def builtin_profiles() -> dict[str, Profile]:
    profiles = [
        Profile('grim-cooperative', grim_client(), grim_provider()),
        Profile('honest-commitment', honest_commitment(), always(ProviderStrategy.E1LD)),
        Profile('always-defect', always(ClientStrategy.IN11), always(ProviderStrategy.E0D)),
        Profile('out-forever', out_forever(), always(ProviderStrategy.E0D)),
    ]
    return {profile.name: profile for profile in profiles}


def get_profile(name: str) -> Profile:
    profiles = builtin_profiles()
    try:
        return profiles[name]
    except KeyError:
        raise InvalidStrategy(
            f"unknown profile {name!r}; choose one of {', '.join(sorted(profiles))}"
        )


def joint_states(profile: Profile) -> list[tuple[str, str]]:
    """Joint states reachable from the initial pair under any sequence of outcomes."""
    start = (profile.client.initial, profile.provider.initial)
    seen = {start}
    order = [start]
    frontier = [start]
    while frontier:
        client_state, provider_state = frontier.pop()
        for outcome in Outcome:
            nxt = (profile.client.transition(client_state, outcome),
                   profile.provider.transition(provider_state, outcome))
            if nxt not in seen:
                seen.add(nxt)
                order.append(nxt)
                frontier.append(nxt)
    return order


def find_state(automaton: StrategyAutomaton, history: PublicHistory,
               start: Optional[str] = None) -> str:
    state = automaton.initial if start is None else start
    for outcome in history:
        state = automaton.transition(state, outcome)
    return state
