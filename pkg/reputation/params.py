"""
Market parameters and the flat key=value parameter file format.

A parameter file looks like::

    # pizza delivery market
    p=1
    u=2
    c=0.8
    alpha=0.99
    ...

and is parsed with python-dotenv, the same reader the settings use for `.env`.
"""
import dataclasses
import hashlib
import logging
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Optional, Union

from django.core.exceptions import ValidationError
from dotenv import dotenv_values

logger = logging.getLogger(__name__)

REQUIRED_KEYS = ('p', 'u', 'c', 'alpha', 'rho', 'eps', 'eps_bar', 'delta_hat')
OPTIONAL_KEYS = ('N', 'delta')

DELTA_CONSISTENCY_TOL = 1e-9


@dataclass(frozen=True)
class MarketParams:
    """
    All scalar constants of the market and the reputation mechanism.

    Money values are plain floats. `delta` is the client's effective discount
    factor; when it is not given it is derived as ``delta_hat ** N``.
    """
    p: float
    u: float
    c: float
    alpha: float
    rho: float
    eps: float
    eps_bar: float
    delta_hat: float
    delta: float = math.nan
    N: Optional[int] = None

    def __post_init__(self) -> None:
        if math.isnan(self.delta) and self.N is not None:
            object.__setattr__(self, 'delta', self.delta_hat ** self.N)
        self.clean()

    def clean(self) -> None:
        errors: dict[str, str] = {}
        if not 0 < self.alpha < 1:
            errors['alpha'] = f'alpha must lie in (0, 1), got {self.alpha}'
        if self.p <= 0:
            errors['p'] = f'p must be positive, got {self.p}'
        if self.u <= 0:
            errors['u'] = f'u must be positive, got {self.u}'
        if self.c < 0:
            errors['c'] = f'c must be nonnegative, got {self.c}'
        if self.rho <= 0:
            errors['rho'] = f'rho must be positive, got {self.rho}'
        if self.eps < 0:
            errors['eps'] = f'eps must be nonnegative, got {self.eps}'
        if self.eps_bar < 0:
            errors['eps_bar'] = f'eps_bar must be nonnegative, got {self.eps_bar}'
        if not 0 < self.delta_hat < 1:
            errors['delta_hat'] = f'delta_hat must lie in (0, 1), got {self.delta_hat}'
        if math.isnan(self.delta):
            errors['delta'] = 'delta is required when N is not given'
        elif not 0 < self.delta < 1:
            errors['delta'] = f'delta must lie in (0, 1), got {self.delta}'
        elif self.N is not None:
            if self.N < 1:
                errors['N'] = f'N must be a positive integer, got {self.N}'
            elif abs(self.delta - self.delta_hat ** self.N) > DELTA_CONSISTENCY_TOL:
                errors['delta'] = (
                    f'delta={self.delta} disagrees with delta_hat**N={self.delta_hat ** self.N}'
                )
        if errors:
            raise ValidationError(errors)

    @property
    def minimax_client(self) -> float:
        return self.u - self.p * (1 + self.rho)

    @property
    def is_viable(self) -> bool:
        """More than one feasible individually rational payoff exists."""
        return (self.alpha * (self.u - self.p) > self.minimax_client
                and self.alpha * self.p - self.c > 0)

    def with_delta(self, delta: float) -> 'MarketParams':
        """Copy with another client discount factor (drops N)."""
        return dataclasses.replace(self, delta=delta, N=None)

    def replace(self, **changes: Any) -> 'MarketParams':
        if 'delta' in changes and 'N' not in changes:
            changes['N'] = None
        elif 'N' in changes and 'delta' not in changes:
            changes['delta'] = math.nan
        return dataclasses.replace(self, **changes)

    def as_dict(self) -> dict[str, Any]:
        return dataclasses.asdict(self)

    def fingerprint(self) -> str:
        """Stable short digest, used as cache tag."""
        text = ';'.join(f'{k}={v!r}' for k, v in sorted(self.as_dict().items()))
        return hashlib.sha1(text.encode('utf-8')).hexdigest()[:16]


PIZZA = MarketParams(p=1.0, u=2.0, c=0.8, alpha=0.99, rho=0.2, eps=0.01,
                     eps_bar=2.5, delta_hat=0.996, delta=0.95)

PIZZA_FIXTURE = Path(__file__).resolve().parent / 'fixtures' / 'pizza.kv'


def _parse_number(key: str, raw: Optional[str]) -> float:
    if raw is None or raw.strip() == '':
        raise ValidationError({key: f'{key} has no value'})
    try:
        return float(raw)
    except ValueError:
        raise ValidationError({key: f'{key} is not a number: {raw!r}'})


def parse_params(values: dict[str, Optional[str]]) -> MarketParams:
    unknown = sorted(set(values) - set(REQUIRED_KEYS) - set(OPTIONAL_KEYS))
    if unknown:
        raise ValidationError(f"unknown parameter keys: {', '.join(unknown)}")
    missing = [key for key in REQUIRED_KEYS if key not in values]
    if missing:
        raise ValidationError(f"missing parameter keys: {', '.join(missing)}")

    fields: dict[str, Any] = {key: _parse_number(key, values[key]) for key in REQUIRED_KEYS}
    if 'N' in values:
        n = _parse_number('N', values['N'])
        if n != int(n):
            raise ValidationError({'N': f'N must be an integer, got {values["N"]!r}'})
        fields['N'] = int(n)
    if 'delta' in values:
        fields['delta'] = _parse_number('delta', values['delta'])
    elif 'N' not in fields:
        raise ValidationError('either delta or N must be given')
    return MarketParams(**fields)


def load_params(path: Union[str, Path]) -> MarketParams:
    """Read a key=value parameter file."""
    path = Path(path)
    if not path.is_file():
        raise ValidationError(f'parameter file not found: {path}')
    params = parse_params(dict(dotenv_values(path)))
    logger.debug(f"Loaded parameters from {path}: {params}")
    return params


def dump_params(params: MarketParams) -> str:
    lines = [f'{key}={getattr(params, key)!r}' for key in REQUIRED_KEYS]
    lines.append(f'delta={params.delta!r}')
    if params.N is not None:
        lines.append(f'N={params.N}')
    return '\n'.join(lines) + '\n'
