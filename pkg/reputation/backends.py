"""
Reputation back-ends: how the mechanism turns feedback into provider payoff.

Positive and neutral feedback are worth 0 to the provider; each negative
report costs him. `DirectFine` charges eps_bar outright. `License` makes the
provider hold a market licence that every negative report partially destroys;
a licence used up completely has to be restored by a new payment before the
provider may keep operating.
"""
import logging
from typing import Optional, Protocol

from reputation.params import MarketParams

logger = logging.getLogger(__name__)

POSITIVE, NEUTRAL, NEGATIVE = 'positive', 'neutral', 'negative'


class ReputationBackend(Protocol):
    name: str

    def on_feedback(self, signal: Optional[str]) -> float:
        """Provider payoff adjustment for one recorded signal."""
        ...

    def spawn(self) -> 'ReputationBackend':
        """Fresh instance with the same calibration, for one rollout."""
        ...

    def summary(self) -> dict[str, float]:
        ...


class DirectFine:
    name = 'direct'

    def __init__(self, eps_bar: float) -> None:
        self.eps_bar = eps_bar
        self.total_adjustment = 0.0
        self.negatives = 0

    def on_feedback(self, signal: Optional[str]) -> float:
        if signal != NEGATIVE:
            return 0.0
        self.negatives += 1
        self.total_adjustment -= self.eps_bar
        return -self.eps_bar

    def spawn(self) -> 'DirectFine':
        return DirectFine(self.eps_bar)

    def summary(self) -> dict[str, float]:
        return {'negatives': self.negatives, 'total_adjustment': self.total_adjustment}


class License:
    """
    Licence of value `price` at purchase; every negative report destroys
    `damage` of it. When the balance is exhausted the provider pays `restore`
    to top it up. The payoff adjustment is the destroyed value, so the
    expected cost of a negative report equals `damage` and payoffs match
    `DirectFine` with eps_bar = damage. Restore payments only refill the
    balance: they are tracked in `cash_paid` and `restores`, never charged
    to the payoff again.
    """
    name = 'license'

    def __init__(self, price: float, damage: float, restore: float) -> None:
        if damage < 0 or price <= 0 or restore <= 0:
            raise ValueError('licence price and restore payment must be positive, damage nonnegative')
        self.price = price
        self.damage = damage
        self.restore = restore
        self.balance = price
        self.restores = 0
        self.cash_paid = price
        self.total_adjustment = 0.0
        self.negatives = 0

    @classmethod
    def calibrated(cls, eps_bar: float, multiplier: float = 10.0) -> 'License':
        # a free licence cannot be destroyed; keep a token price
        size = multiplier * eps_bar if eps_bar > 0 else 1.0
        return cls(price=size, damage=eps_bar, restore=size)

    def on_feedback(self, signal: Optional[str]) -> float:
        if signal != NEGATIVE:
            return 0.0
        self.negatives += 1
        self.balance -= self.damage
        while self.balance <= 0:
            self.balance += self.restore
            self.cash_paid += self.restore
            self.restores += 1
            logger.debug(f"Licence exhausted, restored (restore #{self.restores})")
        self.total_adjustment -= self.damage
        return -self.damage

    def spawn(self) -> 'License':
        return License(self.price, self.damage, self.restore)

    def summary(self) -> dict[str, float]:
        return {
            'negatives': self.negatives,
            'total_adjustment': self.total_adjustment,
            'balance': self.balance,
            'restores': self.restores,
            'cash_paid': self.cash_paid,
        }


def make_backend(name: str, params: MarketParams, multiplier: float = 10.0) -> ReputationBackend:
    if name == DirectFine.name:
        return DirectFine(params.eps_bar)
    if name == License.name:
        return License.calibrated(params.eps_bar, multiplier)
    raise ValueError(f"unknown backend {name!r}; choose 'direct' or 'license'")
