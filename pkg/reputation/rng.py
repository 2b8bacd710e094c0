"""Seeded random streams for reproducible rollouts."""
from __future__ import annotations

import numpy as np


class SeededStreams:
    """
    Independent generators derived from one seed.

    `nature` draws the quality coin and nothing else, so changing a strategy
    profile never shifts nature's draws. `strategy` samples mixed actions and
    random client behaviour.
    """

    def __init__(self, seed: int) -> None:
        self._seed = seed
        nature_seq, strategy_seq = np.random.SeedSequence(seed).spawn(2)
        self.nature = np.random.default_rng(nature_seq)
        self.strategy = np.random.default_rng(strategy_seq)

    @property
    def seed(self) -> int:
        return self._seed

    def quality_coin(self, alpha: float) -> bool:
        """True with probability alpha (high quality if effort is high)."""
        return bool(self.nature.random() < alpha)

    def bernoulli(self, probability: float) -> bool:
        return bool(self.strategy.random() < probability)

    def choice(self, options: list, weights: list[float]):
        if len(options) == 1:
            return options[0]
        index = int(self.strategy.choice(len(options), p=np.asarray(weights) / sum(weights)))
        return options[index]
