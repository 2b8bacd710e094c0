"""
Perfect public equilibrium payoffs by set-valued iteration.

Starting from the feasible payoff rectangle, each step keeps the grid points
that can be enforced by a pure stage profile (plus public randomization) with
continuation payoffs drawn from the convex hull of the current set. The
enforceable region of every stage profile is described by its support
function over a fan of directions; each support value is attained by an
explicit certificate (stage profile and continuation payoffs) found by a small
linear program. Grid points are kept when they lie within half a cell of the
resulting polygon, so the fixed point is an outer approximation.
"""
import hashlib
import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Mapping, NamedTuple, Optional

import numpy as np
from scipy.optimize import linprog
from scipy.spatial import ConvexHull

from reputation.bounds import gamma_bound, gamma_hat
from reputation.cache_utils import get_cache_key, get_or_compute, invalidate_by_tag, timed
from reputation.exceptions import SanctionError
from reputation.game import (ClientStrategy, Outcome, PayoffPair, ProviderStrategy, minimax,
                             outcome_distribution, pure_profiles, stage_payoffs)
from reputation.params import MarketParams

logger = logging.getLogger(__name__)

OUTCOMES: tuple[Outcome, ...] = tuple(Outcome)
NEGATIVE_OUTCOMES = (Outcome.Q0R0, Outcome.Q1R0)
GEOMETRY_TOL = 1e-9
MIN_GRID = 1e-3

StageProfile = tuple[ClientStrategy, ProviderStrategy]


def profile_label(profile: StageProfile) -> str:
    return f'{profile[0].value}/{profile[1].value}'


def _profile_order() -> list[StageProfile]:
    # profiles without negative reports first, honest trade first of all
    def key(profile: StageProfile) -> tuple[int, int, int]:
        sc, _ = profile
        reports_zero = sc.enters and (sc.report(0) == 0 or sc.report(1) == 0)
        return (sc is not ClientStrategy.IN11, int(reports_zero), list(ClientStrategy).index(sc))
    return sorted(pure_profiles(), key=key)


@dataclass(frozen=True)
class StageEnforcement:
    """A pure stage profile with continuation payoffs that enforce it."""
    client: ClientStrategy
    provider: ProviderStrategy
    continuation: Mapping[Outcome, PayoffPair]
    value: PayoffPair

    @property
    def profile(self) -> StageProfile:
        return (self.client, self.provider)


@dataclass(frozen=True)
class EnforcementCertificate:
    """Public randomization over stage enforcements whose mixture reaches `target`."""
    target: PayoffPair
    components: tuple[tuple[float, StageEnforcement], ...]
    gap: float = 0.0

    @property
    def value(self) -> PayoffPair:
        total = PayoffPair(0.0, 0.0)
        for weight, component in self.components:
            total = total + component.value.scaled(weight)
        return total

    def outcome_probabilities(self, params: MarketParams) -> dict[Outcome, float]:
        probabilities = {outcome: 0.0 for outcome in OUTCOMES}
        for weight, component in self.components:
            for outcome, pr in outcome_distribution(params, component.client, component.provider).items():
                probabilities[outcome] += weight * pr
        return probabilities

    def negative_report_probability(self, params: MarketParams) -> float:
        probabilities = self.outcome_probabilities(params)
        return sum(probabilities[outcome] for outcome in NEGATIVE_OUTCOMES)

    def label(self) -> str:
        if len(self.components) == 1:
            return profile_label(self.components[0][1].profile)
        return '+'.join(f'{w:.6g}*{profile_label(c.profile)}' for w, c in self.components)

    def verify(self, params: MarketParams, delta: float, tol: float = 1e-9,
               promise_tol: float = 0.0) -> list[str]:
        """Violated constraints, empty when the certificate holds."""
        problems: list[str] = []
        for _, component in self.components:
            problems.extend(_verify_component(params, delta, component, tol))
        gap = max(abs(self.value.v_client - self.target.v_client),
                  abs(self.value.v_provider - self.target.v_provider))
        if gap > promise_tol + GEOMETRY_TOL:
            problems.append(f'promise keeping misses the target by {gap:.3g}')
        return problems


def _continuation_value(params: MarketParams, delta: float, sc: ClientStrategy, sp: ProviderStrategy,
                        continuation: Mapping[Outcome, PayoffPair]) -> PayoffPair:
    g = stage_payoffs(params, sc, sp)
    total = g.scaled(1 - delta)
    for outcome, pr in outcome_distribution(params, sc, sp).items():
        if pr:
            total = total + continuation[outcome].scaled(delta * pr)
    return total


def _verify_component(params: MarketParams, delta: float, component: StageEnforcement,
                      tol: float) -> list[str]:
    problems = []
    sc, sp, w = component.client, component.provider, component.continuation
    on_path = _continuation_value(params, delta, sc, sp, w)
    if not on_path.close_to(component.value, 1e-7):
        problems.append(f'{profile_label(component.profile)}: stored value differs from the recursion')
    for deviation in ClientStrategy:
        gain = _continuation_value(params, delta, deviation, sp, w).v_client - on_path.v_client
        if gain > tol + 1e-7:
            problems.append(f'{profile_label(component.profile)}: client gains {gain:.3g} with {deviation.value}')
    for deviation in ProviderStrategy:
        gain = _continuation_value(params, delta, sc, deviation, w).v_provider - on_path.v_provider
        if gain > tol + 1e-7:
            problems.append(f'{profile_label(component.profile)}: provider gains {gain:.3g} with {deviation.value}')
    return problems


class HullConstraints(NamedTuple):
    """Convex hull of a point set as A_ub w <= b_ub and A_eq w == b_eq."""
    a_ub: np.ndarray
    b_ub: np.ndarray
    a_eq: np.ndarray
    b_eq: np.ndarray

    def contains(self, w: PayoffPair, tol: float = GEOMETRY_TOL) -> bool:
        x = np.array(w.as_tuple())
        if len(self.b_ub) and np.any(self.a_ub @ x > self.b_ub + tol):
            return False
        return not len(self.b_eq) or bool(np.all(np.abs(self.a_eq @ x - self.b_eq) <= tol))


def hull_constraints(points: np.ndarray) -> HullConstraints:
    """Halfspace description of the hull, with equalities for a point or a segment."""
    unique = np.unique(np.round(points, 12), axis=0)
    if len(unique) == 0:
        raise SanctionError('the hull of an empty payoff set is undefined')
    empty_ub, empty_b = np.zeros((0, 2)), np.zeros(0)
    if len(unique) == 1:
        return HullConstraints(empty_ub, empty_b, np.eye(2), unique[0].copy())

    offsets = unique - unique[0]
    if np.linalg.matrix_rank(offsets, tol=1e-12) < 2:
        direction = offsets[np.argmax(np.linalg.norm(offsets, axis=1))]
        direction = direction / np.linalg.norm(direction)
        normal = np.array([-direction[1], direction[0]])
        along = unique @ direction
        return HullConstraints(
            np.vstack([direction, -direction]),
            np.array([along.max(), -along.min()]),
            normal.reshape(1, 2),
            np.array([normal @ unique[0]]),
        )

    hull = ConvexHull(unique)
    # rows are (n_x, n_y, offset) with n.x + offset <= 0 inside
    return HullConstraints(hull.equations[:, :2], -hull.equations[:, 2], np.zeros((0, 2)), np.zeros(0))


@dataclass
class ProfileSupport:
    """Support points of one stage profile's enforceable region, one per direction."""
    profile: StageProfile
    components: list[StageEnforcement]


@dataclass
class PayoffSet:
    """
    Payoff profiles on a grid anchored at the minimax point.

    Cell (i, j) is the profile (origin_client + i*grid, j*grid). `supports`
    holds the certificates found by the step that produced the set.
    """
    grid: float
    origin: PayoffPair
    mask: np.ndarray
    supports: dict[StageProfile, ProfileSupport] = field(default_factory=dict)
    certificates: dict[tuple[int, int], EnforcementCertificate] = field(default_factory=dict)
    converged: Optional[bool] = None
    iterations: int = 0
    sizes: list[int] = field(default_factory=list)

    @classmethod
    def rectangle(cls, params: MarketParams, grid: float) -> 'PayoffSet':
        """Every grid point of [minimax_C, max g_C] x [0, max g_P]."""
        if grid < MIN_GRID:
            raise SanctionError(f"grid must be at least {MIN_GRID:g}, got {grid}")
        cells = [stage_payoffs(params, sc, sp) for sc, sp in pure_profiles()]
        origin = minimax(params)
        top_client = max(g.v_client for g in cells)
        top_provider = max(max(g.v_provider for g in cells), 0.0)
        n_client = math.floor((top_client - origin.v_client) / grid + GEOMETRY_TOL) + 1
        n_provider = math.floor(top_provider / grid + GEOMETRY_TOL) + 1
        return cls(grid, origin, np.ones((n_client, n_provider), dtype=bool))

    @classmethod
    def from_points(cls, params: MarketParams, grid: float,
                    points: list[PayoffPair]) -> 'PayoffSet':
        """Set holding only the given points, which must lie on the grid."""
        payoff_set = cls.rectangle(params, grid)
        payoff_set.mask[:] = False
        for point in points:
            index = payoff_set.index_of(point)
            if index is None:
                raise SanctionError(f"{point.as_tuple()} is not a point of the grid {grid:g}")
            payoff_set.mask[index] = True
        return payoff_set

    @property
    def shape(self) -> tuple[int, int]:
        return self.mask.shape  # type: ignore[return-value]

    @property
    def size(self) -> int:
        return int(self.mask.sum())

    def __len__(self) -> int:
        return self.size

    def coordinates(self, indices: np.ndarray) -> np.ndarray:
        return np.column_stack([
            self.origin.v_client + indices[:, 0] * self.grid,
            self.origin.v_provider + indices[:, 1] * self.grid,
        ])

    def grid_points(self) -> np.ndarray:
        """Coordinates of every cell of the rectangle, row-major."""
        return self.coordinates(np.argwhere(np.ones_like(self.mask)))

    def points(self) -> np.ndarray:
        return self.coordinates(np.argwhere(self.mask))

    def payoff_pairs(self) -> list[PayoffPair]:
        return [PayoffPair(float(c), float(p)) for c, p in self.points()]

    def index_of(self, point: PayoffPair) -> Optional[tuple[int, int]]:
        i = (point.v_client - self.origin.v_client) / self.grid
        j = (point.v_provider - self.origin.v_provider) / self.grid
        ri, rj = round(i), round(j)
        if abs(i - ri) > 1e-6 or abs(j - rj) > 1e-6:
            return None
        if not (0 <= ri < self.shape[0] and 0 <= rj < self.shape[1]):
            return None
        return (ri, rj)

    def contains(self, point: PayoffPair) -> bool:
        index = self.index_of(point)
        return index is not None and bool(self.mask[index])

    def near(self, point: PayoffPair, radius: Optional[float] = None) -> bool:
        """Some point of the set within `radius` (default one cell) in both coordinates."""
        radius = self.grid if radius is None else radius
        if not self.size:
            return False
        distance = np.abs(self.points() - np.array(point.as_tuple())).max(axis=1)
        return bool(distance.min() <= radius + GEOMETRY_TOL)

    def symmetric_difference(self, other: 'PayoffSet') -> int:
        return int(np.logical_xor(self.mask, other.mask).sum())

    def hull(self) -> HullConstraints:
        return hull_constraints(self.points())

    @property
    def min_client_payoff(self) -> float:
        return float(self.points()[:, 0].min())

    def client_maximal_points(self) -> list[PayoffPair]:
        """For every provider payoff present, the point with the highest client payoff."""
        maximal = []
        for j in range(self.shape[1]):
            rows = np.flatnonzero(self.mask[:, j])
            if len(rows):
                maximal.append(PayoffPair(
                    float(self.origin.v_client + rows.max() * self.grid),
                    float(self.origin.v_provider + j * self.grid),
                ))
        return maximal

    def enforcements(self) -> list[StageEnforcement]:
        """Stored enforcements, one per distinct (profile, value)."""
        distinct: dict[tuple, StageEnforcement] = {}
        for support in self.supports.values():
            for component in support.components:
                key = (component.profile, round(component.value.v_client, 12), round(component.value.v_provider, 12))
                distinct.setdefault(key, component)
        return list(distinct.values())

    def certificate_for(self, point: PayoffPair, params: MarketParams) -> EnforcementCertificate:
        """
        Public randomization over the stored enforcements closest to `point`;
        among equally close mixtures, the one with the least mass on negative reports.
        """
        index = self.index_of(point)
        if index is not None and index in self.certificates:
            return self.certificates[index]
        components = self.enforcements()
        if not components:
            if point.close_to(minimax(params), GEOMETRY_TOL):
                return static_certificate(params)
            raise SanctionError(f"payoff set carries no enforcements to certify {point.as_tuple()}")
        return _closest_mixture(point, components, params, self.grid / 2)


def static_certificate(params: MarketParams) -> EnforcementCertificate:
    """Staying out forever, enforced by itself."""
    floor = minimax(params)
    stay_out = StageEnforcement(ClientStrategy.OUT, ProviderStrategy.E0L,
                                {y: floor for y in OUTCOMES}, floor)
    return EnforcementCertificate(floor, ((1.0, stay_out),))


def _closest_mixture(point: PayoffPair, components: list[StageEnforcement], params: MarketParams,
                     slack: float) -> EnforcementCertificate:
    values = np.array([c.value.as_tuple() for c in components])
    negative = np.array([
        sum(outcome_distribution(params, c.client, c.provider)[y] for y in NEGATIVE_OUTCOMES)
        for c in components
    ])
    target = np.array(point.as_tuple())
    n = len(components)
    # variables: mixture weights, then the largest coordinate gap s
    rows, rhs = [], []
    for k in range(2):
        rows.append(np.append(values[:, k], -1.0))
        rhs.append(target[k])
        rows.append(np.append(-values[:, k], -1.0))
        rhs.append(-target[k])
    a_ub, b_ub = np.array(rows), np.array(rhs)
    a_eq, b_eq = np.append(np.ones(n), 0.0).reshape(1, -1), np.array([1.0])
    bounds = [(0, None)] * (n + 1)

    closest = linprog(np.append(np.zeros(n), 1.0), A_ub=a_ub, b_ub=b_ub, A_eq=a_eq, b_eq=b_eq,
                      bounds=bounds, method='highs')
    if closest.status != 0:
        raise SanctionError(f"no mixture of enforcements approaches {point.as_tuple()}: {closest.message}")
    gap_limit = max(closest.x[-1], slack) + GEOMETRY_TOL
    bounds[-1] = (0, gap_limit)
    cleanest = linprog(np.append(negative, 0.0), A_ub=a_ub, b_ub=b_ub, A_eq=a_eq, b_eq=b_eq,
                       bounds=bounds, method='highs')
    solution = cleanest.x if cleanest.status == 0 else closest.x
    weights = solution[:n]
    picked = tuple((float(w), components[i]) for i, w in enumerate(weights) if w > 1e-12)
    scale = sum(w for w, _ in picked)
    picked = tuple((w / scale, c) for w, c in picked)
    return EnforcementCertificate(point, picked, float(solution[-1]))


def fan(directions: int) -> np.ndarray:
    angles = np.linspace(0.0, 2 * math.pi, directions, endpoint=False)
    return np.column_stack([np.cos(angles), np.sin(angles)])


class _ProfileProgram:
    """Linear constraints on the continuation payoffs W(y) that enforce one stage profile."""

    def __init__(self, params: MarketParams, delta: float, profile: StageProfile,
                 hull: HullConstraints, tol: float) -> None:
        sc, sp = profile
        self.profile = profile
        self.delta = delta
        n_vars = 2 * len(OUTCOMES)
        g = stage_payoffs(params, sc, sp)
        pi = np.array([outcome_distribution(params, sc, sp)[y] for y in OUTCOMES])

        self.base = (1 - delta) * np.array(g.as_tuple())
        self.promise = np.zeros((2, n_vars))
        for k in range(2):
            self.promise[k, k::2] = delta * pi

        rows, rhs = [], []
        for deviation in ClientStrategy:
            if deviation is sc:
                continue
            g_dev = stage_payoffs(params, deviation, sp)
            pi_dev = np.array([outcome_distribution(params, deviation, sp)[y] for y in OUTCOMES])
            row = np.zeros(n_vars)
            row[0::2] = delta * (pi_dev - pi)
            rows.append(row)
            rhs.append((1 - delta) * (g.v_client - g_dev.v_client) + tol)
        for deviation in ProviderStrategy:
            if deviation is sp:
                continue
            g_dev = stage_payoffs(params, sc, deviation)
            pi_dev = np.array([outcome_distribution(params, sc, deviation)[y] for y in OUTCOMES])
            row = np.zeros(n_vars)
            row[1::2] = delta * (pi_dev - pi)
            rows.append(row)
            rhs.append((1 - delta) * (g.v_provider - g_dev.v_provider) + tol)

        blocks = len(OUTCOMES)
        self.a_ub = np.vstack([np.array(rows), _block_diag(hull.a_ub, blocks)])
        self.b_ub = np.concatenate([np.array(rhs), np.tile(hull.b_ub, blocks)])
        if len(hull.b_eq):
            self.a_eq: Optional[np.ndarray] = _block_diag(hull.a_eq, blocks)
            self.b_eq: Optional[np.ndarray] = np.tile(hull.b_eq, blocks)
        else:
            self.a_eq = self.b_eq = None

    def solve(self, direction: np.ndarray) -> Optional[StageEnforcement]:
        objective = -(direction @ self.promise)
        result = linprog(objective, A_ub=self.a_ub, b_ub=self.b_ub, A_eq=self.a_eq, b_eq=self.b_eq,
                         bounds=(None, None), method='highs')
        if result.status != 0:
            if result.status != 2:
                logger.warning(f"LP for {profile_label(self.profile)} ended with status {result.status}: "
                               f"{result.message}")
            return None
        w = result.x
        value = self.base + self.promise @ w
        continuation = {y: PayoffPair(float(w[2 * j]), float(w[2 * j + 1])) for j, y in enumerate(OUTCOMES)}
        return StageEnforcement(self.profile[0], self.profile[1], continuation,
                                PayoffPair(float(value[0]), float(value[1])))


def _block_diag(block: np.ndarray, copies: int) -> np.ndarray:
    return np.kron(np.eye(copies), block)


def _still_valid(component: StageEnforcement, hull: HullConstraints) -> bool:
    return all(hull.contains(w) for w in component.continuation.values())


def _profile_support(params: MarketParams, delta: float, profile: StageProfile, hull: HullConstraints,
                     directions: np.ndarray, tol: float,
                     previous: Optional[ProfileSupport], reuse: bool) -> Optional[ProfileSupport]:
    if reuse and previous is not None and len(previous.components) == len(directions):
        reused = [c if _still_valid(c, hull) else None for c in previous.components]
        if all(c is not None for c in reused):
            return ProfileSupport(profile, reused)  # type: ignore[arg-type]
    else:
        reused = [None] * len(directions)

    program = _ProfileProgram(params, delta, profile, hull, tol)
    components = []
    for direction, kept in zip(directions, reused):
        component = kept or program.solve(direction)
        if component is None:
            return None
        components.append(component)
    return ProfileSupport(profile, components)


@timed("aps_step")
def aps_step(payoff_set: PayoffSet, params: MarketParams, delta: float, tol: float = 1e-9,
             directions: int = 32, threads: int = 1, reuse: bool = True) -> PayoffSet:
    """
    One application of the enforcement operator. Returns the grid points of the
    input set within half a cell of the payoffs enforceable with continuations
    from the input's hull; never empty, falling back to the static equilibrium.
    """
    if not payoff_set.size:
        raise SanctionError('aps_step needs a nonempty payoff set')
    if not 0 < delta < 1:
        raise SanctionError(f"delta must lie in (0, 1), got {delta}")
    hull = payoff_set.hull()
    fan_directions = fan(directions)
    profiles = _profile_order()

    def support_of(profile: StageProfile) -> Optional[ProfileSupport]:
        previous = payoff_set.supports.get(profile)
        if reuse and payoff_set.supports and previous is None:
            # not enforceable on a larger set, so not on this one either
            return None
        return _profile_support(params, delta, profile, hull, fan_directions, tol, previous, reuse)

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            found = list(pool.map(support_of, profiles))
    else:
        found = [support_of(profile) for profile in profiles]
    supports = {profile: support for profile, support in zip(profiles, found) if support is not None}

    result = PayoffSet(payoff_set.grid, payoff_set.origin, np.zeros_like(payoff_set.mask), supports)
    if supports:
        values = np.array([c.value.as_tuple() for s in supports.values() for c in s.components])
        reach = (fan_directions @ values.T).max(axis=1)
        box = payoff_set.grid / 2 * np.abs(fan_directions).sum(axis=1)
        inside = (fan_directions @ payoff_set.grid_points().T <= (reach + box + GEOMETRY_TOL)[:, None]).all(axis=0)
        result.mask = payoff_set.mask & inside.reshape(payoff_set.shape)

    if not result.size:
        logger.info("No enforceable payoffs left; falling back to the static equilibrium")
        result.mask[0, 0] = True
    logger.debug(f"aps_step: {payoff_set.size} -> {result.size} points, {len(supports)} enforceable profiles")
    return result


@timed("ppe_set")
def compute_ppe_set(params: MarketParams, delta: float, grid: float = 0.02, max_iters: int = 500,
                    tol: float = 1e-9, directions: int = 32, threads: int = 1) -> PayoffSet:
    """
    Iterate aps_step from the feasible rectangle until no grid point changes.
    A run that hits max_iters returns the current set with converged=False.
    """
    if grid < MIN_GRID:
        raise SanctionError(f"grid must be at least {MIN_GRID:g}, got {grid}")
    if not 0 < delta < 1:
        raise SanctionError(f"delta must lie in (0, 1), got {delta}")
    current = PayoffSet.rectangle(params, grid)
    sizes = [current.size]
    converged = False
    iteration = 0
    for iteration in range(1, max_iters + 1):
        nxt = aps_step(current, params, delta, tol=tol, directions=directions, threads=threads)
        change = nxt.symmetric_difference(current)
        sizes.append(nxt.size)
        logger.debug(f"iteration {iteration}: {nxt.size} points, {change} changed")
        current = nxt
        if change == 0:
            converged = True
            break

    current.converged = converged
    current.iterations = iteration
    current.sizes = sizes
    if converged:
        logger.info(f"PPE set at delta={delta:g}, grid={grid:g}: {current.size} points after {iteration} iterations")
    else:
        logger.warning(f"PPE iteration at delta={delta:g} did not converge in {max_iters} iterations "
                       f"({current.size} points)")
    return current


def ppe_cache_tag(params: MarketParams) -> str:
    return f'params_{params.fingerprint()}'


def ppe_cache_key(params: MarketParams, delta: float, grid: float, tol: float, max_iters: int) -> str:
    digest = hashlib.sha1(f'{params.fingerprint()}|{delta!r}|{grid!r}|{tol!r}|{max_iters}'.encode()).hexdigest()
    return get_cache_key('ppe_set', digest[:20])


def cached_ppe_set(params: MarketParams, delta: float, grid: float = 0.02, max_iters: int = 500,
                   tol: float = 1e-9, threads: int = 1, timeout: Optional[int] = 3600,
                   use_cache: bool = True) -> tuple[PayoffSet, bool]:
    """compute_ppe_set through the Django cache; returns (set, cache hit)."""
    def compute() -> PayoffSet:
        return compute_ppe_set(params, delta, grid=grid, max_iters=max_iters, tol=tol, threads=threads)

    if not use_cache:
        return compute(), False
    key = ppe_cache_key(params, delta, grid, tol, max_iters)
    return get_or_compute(key, compute, [ppe_cache_tag(params)], timeout)


def clear_cached_sets(params: MarketParams) -> int:
    return invalidate_by_tag(ppe_cache_tag(params))


class Prop2Check(NamedTuple):
    passed: bool
    point: Optional[PayoffPair] = None
    certificate: Optional[EnforcementCertificate] = None
    negative_probability: float = 0.0


def check_prop2(payoff_set: PayoffSet, params: MarketParams, delta: float,
                tol: float = 1e-9) -> Prop2Check:
    """
    Client-payoff-maximal points must be enforceable without negative reports
    on the equilibrium path. Returns the first counterexample found.
    """
    for point in payoff_set.client_maximal_points():
        certificate = payoff_set.certificate_for(point, params)
        problems = certificate.verify(params, delta, tol, promise_tol=10 * payoff_set.grid)
        if problems:
            logger.warning(f"certificate at {point.as_tuple()} does not hold: {problems[0]}")
        negative = certificate.negative_report_probability(params)
        if negative > tol:
            logger.info(f"negative reports with probability {negative:.3g} at {point.as_tuple()}")
            return Prop2Check(False, point, certificate, negative)
    return Prop2Check(True)


class Prop3Check(NamedTuple):
    implied_gamma: float
    min_client_payoff: float
    gamma: float
    passed: bool


def check_prop3(payoff_set: PayoffSet, params: MarketParams) -> Prop3Check:
    """
    Largest share of false reports compatible with the set: the false-report
    bound evaluated at the set's lowest client payoff.
    """
    floor = payoff_set.min_client_payoff
    implied = gamma_hat(params, floor)
    bound = gamma_bound(params)
    passed = floor >= params.minimax_client - payoff_set.grid - GEOMETRY_TOL \
        and implied <= bound + payoff_set.grid
    return Prop3Check(implied, floor, bound, passed)


def ppe_rows(payoff_set: PayoffSet, params: MarketParams) -> list[list[object]]:
    """One row per point: payoffs, enforcing profile and the on-path outcome distribution."""
    rows: list[list[object]] = []
    for point in payoff_set.payoff_pairs():
        certificate = payoff_set.certificate_for(point, params)
        probabilities = certificate.outcome_probabilities(params)
        rows.append([point.v_client, point.v_provider, certificate.label()] + [probabilities[y] for y in OUTCOMES])
    return rows


PPE_HEADER = ['v_client', 'v_provider', 'enforcing_profile'] + [f'pr_{y.value}' for y in OUTCOMES]
