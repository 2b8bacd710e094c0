"""
Tabular output: CSV and key=value writers with fixed 9-significant-digit
formatting, and the reproduction of the pizza-market numbers and figure data.
"""
import csv
import logging
import math
from pathlib import Path
from typing import Iterable, Optional, Sequence, TextIO

import numpy as np

from reputation.bounds import (BoundReport, delta_threshold, gamma_bound, gamma_hat, interleave_and_lifetimes,
                               k_p, malicious_nu_bound, pi_bar, reputation_floor)
from reputation.game import ClientStrategy, ProviderStrategy, minimax, pareto_frontier, provider_max_ppe_payoff, \
    stage_payoffs
from reputation.params import PIZZA, MarketParams

logger = logging.getLogger(__name__)

PIZZA_CLIENT_DELTA = 0.84
MU_STAR_SWEEP = tuple(round(0.01 * i, 2) for i in range(5, 96))


def format_value(value: object) -> str:
    if value is None:
        return ''
    if isinstance(value, bool):
        return str(value).lower()
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        if math.isinf(value):
            return 'inf' if value > 0 else '-inf'
        if float(value).is_integer() and abs(value) < 1e15:
            return str(int(value))
        return f'{float(value):.9g}'
    return str(value)


def write_csv(path: Path, header: Sequence[str], rows: Iterable[Sequence[object]]) -> Path:
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, 'w', newline='') as handle:
        write_csv_stream(handle, header, rows)
    logger.info(f"Wrote {path}")
    return path


def write_csv_stream(handle: TextIO, header: Sequence[str], rows: Iterable[Sequence[object]]) -> None:
    writer = csv.writer(handle, lineterminator='\n')
    writer.writerow(header)
    for row in rows:
        writer.writerow([format_value(cell) for cell in row])


def write_kv_stream(handle: TextIO, rows: Iterable[tuple[str, object]]) -> None:
    for key, value in rows:
        handle.write(f'{key}={format_value(value)}\n')


def bound_report_rows(report: BoundReport) -> list[tuple[str, object]]:
    rows = report.as_rows()
    if report.clamped:
        rows.append(('clamped', ' '.join(report.clamped)))
    return rows


def pizza_table_rows(params: MarketParams = PIZZA,
                     client_delta: float = PIZZA_CLIENT_DELTA) -> list[tuple[str, object]]:
    """Headline numbers of the worked example; lifetimes use the client's delta at the threshold."""
    floor = minimax(params)
    cooperative = stage_payoffs(params, ClientStrategy.IN11, ProviderStrategy.E1LD)
    lifetimes = interleave_and_lifetimes(params.with_delta(client_delta))
    return [
        ('delta_threshold', delta_threshold(params)),
        ('minimax_client', floor.v_client),
        ('minimax_provider', floor.v_provider),
        ('cooperative_client', cooperative.v_client),
        ('cooperative_provider', cooperative.v_provider),
        ('gamma', gamma_bound(params)),
        ('v_p_max', provider_max_ppe_payoff(params)),
        ('nu_max', malicious_nu_bound(params)),
        ('pi_bar', pi_bar(params)),
        ('client_delta', client_delta),
        ('lifetime_provider', lifetimes.lifetime_provider),
        ('lifetime_client', lifetimes.lifetime_client),
        ('lifetime_client_rounds', lifetimes.lifetime_client_rounds),
        ('n_interleave_max', lifetimes.n_max),
    ]


def figure2_rows(params: MarketParams = PIZZA) -> list[list[object]]:
    return [[i, v.v_client, v.v_provider] for i, v in enumerate(pareto_frontier(params))]


def figure3_rows(params: MarketParams = PIZZA,
                 sweep: Sequence[float] = MU_STAR_SWEEP) -> list[list[object]]:
    return [[mu, k_p(params, mu)] for mu in sweep]


def figure4_rows(params: MarketParams = PIZZA,
                 sweep: Sequence[float] = MU_STAR_SWEEP) -> list[list[object]]:
    gamma = gamma_bound(params)
    rows: list[list[object]] = []
    for mu in sweep:
        tests = k_p(params, mu)
        v_hat_c = reputation_floor(params, tests)
        refined = gamma_hat(params, v_hat_c)
        rows.append([mu, tests, v_hat_c, gamma, refined, min(gamma, refined)])
    return rows


def reproduce_pizza(out_dir: Path, params: MarketParams = PIZZA,
                    client_delta: Optional[float] = None) -> list[Path]:
    """Write pizza-table.csv, figure2.csv, figure3.csv and figure4.csv into out_dir."""
    client_delta = PIZZA_CLIENT_DELTA if client_delta is None else client_delta
    out_dir = Path(out_dir)
    return [
        write_csv(out_dir / 'pizza-table.csv', ['quantity', 'value'], pizza_table_rows(params, client_delta)),
        write_csv(out_dir / 'figure2.csv', ['vertex', 'v_client', 'v_provider'], figure2_rows(params)),
        write_csv(out_dir / 'figure3.csv', ['mu_star', 'k_p'], figure3_rows(params)),
        write_csv(out_dir / 'figure4.csv',
                  ['mu_star', 'k_p', 'v_hat_c', 'gamma', 'gamma_hat', 'operative_gamma'],
                  figure4_rows(params)),
    ]
