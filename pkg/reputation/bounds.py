"""
Closed-form bounds and thresholds of the sanctioning mechanism.

Every function is a pure function of `MarketParams` (and a few explicit
arguments). Fractions that come out negative are clamped to 0 and logged;
an unbounded number of tests is `math.inf`, never an exception.
"""
import logging
import math
from dataclasses import dataclass, field, fields
from typing import NamedTuple, Optional

from reputation.exceptions import BoundUndefined, ThresholdUndefined
from reputation.game import provider_max_ppe_payoff
from reputation.params import MarketParams

logger = logging.getLogger(__name__)

UNBOUNDED = math.inf

# slack for floor() of ratios that are mathematically integral
FLOOR_SLACK = 1e-12


def _clamp_fraction(name: str, value: float) -> float:
    if value < 0 or value > 1:
        clamped = min(1.0, max(0.0, value))
        logger.warning(f"{name}={value:.9g} outside [0, 1], clamped to {clamped:g}")
        return clamped
    return value


def delta_threshold(params: MarketParams) -> float:
    """Discount factor above which the grim cooperative profile is a PPE."""
    denominator = params.p * (1 + params.alpha) - params.c
    if denominator <= 0:
        raise ThresholdUndefined(
            f"p(1+alpha) - c = {denominator:.9g} <= 0: cooperation is never enforceable"
        )
    return params.p / denominator


def gamma_bound_raw(params: MarketParams) -> float:
    p, u, alpha, rho = params.p, params.u, params.alpha, params.rho
    if p * rho <= u * (1 - alpha):
        return ((1 - alpha) * (p - u) + p * rho) / p
    return p * rho / u


def gamma_bound(params: MarketParams) -> float:
    """Worst-case discounted share of false reports in any pareto-optimal PPE."""
    return _clamp_fraction('gamma', gamma_bound_raw(params))


def pi_bar(params: MarketParams) -> float:
    """Belief above which testing the client's type no longer pays."""
    if params.eps_bar <= 0:
        raise BoundUndefined('pi_bar needs a positive penalty eps_bar')
    delta = params.delta
    margin = provider_max_ppe_payoff(params) - params.alpha * params.p + params.c
    numerator = delta * margin + (1 - delta) * params.p
    denominator = delta * margin + (1 - delta) * params.eps_bar
    if denominator <= 0:
        raise BoundUndefined(f"pi_bar denominator {denominator:.9g} is not positive")
    return numerator / denominator


def n_pi(mu_star: float, pi: float) -> float:
    """Number of sanctioned tests before the next one is expected sanctioned with probability > pi."""
    if not 0 < mu_star <= 1:
        raise ValueError(f"mu_star must lie in (0, 1], got {mu_star}")
    if pi <= 0:
        raise ValueError(f"pi must be positive, got {pi}")
    if pi >= 1:
        return UNBOUNDED
    if mu_star == 1:
        return 0
    return math.floor(math.log(mu_star) / math.log(pi) + FLOOR_SLACK)


def k_p(params: MarketParams, mu_star: float) -> float:
    """Upper bound on low-quality deliveries to a client who always reports honestly."""
    threshold = pi_bar(params)
    if threshold >= 1:
        logger.warning(
            f"eps_bar={params.eps_bar:g} <= p={params.p:g}: testing is never deterred, k_P unbounded"
        )
        return UNBOUNDED
    return n_pi(mu_star, threshold)


def v_hat_c_threshold(params: MarketParams, k_p: float) -> float:
    """Continuation payoff above which a normal client stops building a reputation."""
    if k_p < 1 or math.isinf(k_p):
        raise ValueError(f"k_p must be a finite integer >= 1, got {k_p}")
    p, u, alpha, eps, delta = params.p, params.u, params.alpha, params.eps, params.delta
    discount = delta ** (k_p - 1)
    return discount * alpha * (u - p) - (1 - discount) * (p + eps) - (1 - delta) / delta * eps


def gamma_hat_raw(params: MarketParams, v_hat_c: float) -> float:
    p, u, alpha = params.p, params.u, params.alpha
    if v_hat_c > alpha * (u - p):
        return 0.0
    if v_hat_c >= alpha * u - p:
        return (alpha * (u - p) - v_hat_c) / p
    return (u - p - v_hat_c) / u


def gamma_hat(params: MarketParams, v_hat_c: float) -> float:
    """False-report bound in a pareto-optimal PPE giving the client at least v_hat_c."""
    return _clamp_fraction('gamma_hat', gamma_hat_raw(params, v_hat_c))


def reputation_floor(params: MarketParams, k_p: float) -> float:
    """
    Client payoff floor implied by k_P: the outside option when testing is
    unbounded, the honest-trade payoff when the provider never tests.
    """
    if math.isinf(k_p):
        return params.minimax_client
    if k_p == 0:
        return params.alpha * (params.u - params.p)
    return v_hat_c_threshold(params, k_p)


class ReportingValues(NamedTuple):
    v_c_report0: float
    v_c_report1: float


def reporting_decision_values(params: MarketParams, k_p: float,
                              v_hat_c: float) -> ReportingValues:
    """Client values of reporting 0 (build a reputation) or 1 after a first low-quality delivery."""
    if k_p < 1 or math.isinf(k_p):
        raise ValueError(f"k_p must be a finite integer >= 1, got {k_p}")
    p, u, alpha, eps, delta = params.p, params.u, params.alpha, params.eps, params.delta
    report0 = ((1 - delta) * (-p - eps)
               + delta * (1 - delta ** (k_p - 1)) * (-p - eps)
               + delta ** k_p * alpha * (u - p))
    report1 = (1 - delta) * (-p) + delta * v_hat_c
    return ReportingValues(report0, report1)


def malicious_nu_bound(params: MarketParams) -> float:
    """Largest misreport rate a tolerated noisy client can have."""
    if params.eps_bar == 0:
        logger.warning("eps_bar=0: negative reports cost nothing, nu bound is unbounded")
        return 1.0
    return _clamp_fraction('nu', (params.alpha * params.p - params.c) / params.eps_bar)


def provider_noise_payoff(params: MarketParams, nu: float) -> float:
    """Provider payoff against a noisy client, charging eps_bar for every misreport chance."""
    return params.alpha * params.p - params.c - nu * params.eps_bar


def provider_noise_payoff_exact(params: MarketParams, nu: float) -> float:
    """Same, counting misreports only on delivered high quality."""
    return params.alpha * params.p - params.c - params.alpha * nu * params.eps_bar


class Lifetimes(NamedTuple):
    n_max: int
    lifetime_provider: float
    lifetime_client: float
    lifetime_client_rounds: int


def interleave_and_lifetimes(params: MarketParams) -> Lifetimes:
    """Max rounds between a client's visits, and expected lifetimes in rounds."""
    threshold = delta_threshold(params)
    if threshold >= 1:
        n_max = 0
    else:
        n_max = max(0, math.floor(math.log(threshold) / math.log(params.delta_hat) + FLOOR_SLACK))
    lifetime_client = 1 / (1 - params.delta)
    return Lifetimes(
        n_max=n_max,
        lifetime_provider=1 / (1 - params.delta_hat),
        lifetime_client=lifetime_client,
        lifetime_client_rounds=math.ceil(lifetime_client - 1e-9),
    )


@dataclass
class BoundReport:
    delta_threshold: float
    gamma: float
    v_p_max: float
    nu_max: float
    n_interleave_max: int
    lifetime_provider: float
    lifetime_client: float
    lifetime_client_rounds: int
    pi_bar: Optional[float] = None
    mu_star: Optional[float] = None
    k_p: Optional[float] = None
    v_hat_c: Optional[float] = None
    gamma_hat: Optional[float] = None
    operative_gamma: Optional[float] = None
    clamped: list[str] = field(default_factory=list)

    def as_rows(self) -> list[tuple[str, object]]:
        return [(f.name, getattr(self, f.name)) for f in fields(self) if f.name != 'clamped']


def compute_bound_report(params: MarketParams, mu_star: Optional[float] = None,
                         v_hat_c: Optional[float] = None) -> BoundReport:
    lifetimes = interleave_and_lifetimes(params)
    report = BoundReport(
        delta_threshold=delta_threshold(params),
        gamma=gamma_bound(params),
        v_p_max=provider_max_ppe_payoff(params),
        nu_max=malicious_nu_bound(params),
        n_interleave_max=lifetimes.n_max,
        lifetime_provider=lifetimes.lifetime_provider,
        lifetime_client=lifetimes.lifetime_client,
        lifetime_client_rounds=lifetimes.lifetime_client_rounds,
    )
    if report.gamma != gamma_bound_raw(params):
        report.clamped.append('gamma')

    if params.eps_bar > 0:
        report.pi_bar = pi_bar(params)
    if mu_star is not None and report.pi_bar is not None:
        report.mu_star = mu_star
        report.k_p = k_p(params, mu_star)
        if v_hat_c is None:
            v_hat_c = reputation_floor(params, report.k_p)
    if v_hat_c is not None:
        report.v_hat_c = v_hat_c
        report.gamma_hat = gamma_hat(params, v_hat_c)
        if report.gamma_hat != gamma_hat_raw(params, v_hat_c):
            report.clamped.append('gamma_hat')
        report.operative_gamma = min(report.gamma, report.gamma_hat)
    return report
