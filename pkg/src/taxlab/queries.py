"""The two query oracles and the brute-force welfare optimizer."""

from __future__ import annotations

from fractions import Fraction
from typing import Sequence

from .bundles import all_bundles, bit
from .rational import INF, Price, is_finite
from .valuations import DomainError, Valuation


class CapacityError(ValueError):
    """Instance too large for the exhaustive mode."""


def value_query(v: Valuation, s: int) -> Fraction:
    return v.value(s)


def bundle_price(prices: Sequence[Price], mask: int) -> Price:
    total = Fraction(0)
    for j, p in enumerate(prices):
        if mask & bit(j):
            if not is_finite(p):
                return INF
            total += p
    return total


def demand_query(v: Valuation, prices: Sequence[Price]) -> tuple[int, Fraction]:
    """Profit-maximizing bundle under per-item prices, smallest mask among
    ties; bundles holding an infinitely-priced item never win.  Returns the
    bundle and its value."""
    if len(prices) != v.m:
        raise DomainError("price vector length must equal m")
    best_mask = 0
    best_profit = Fraction(0)
    for s in all_bundles(v.m):
        cost = bundle_price(prices, s)
        if not is_finite(cost):
            continue
        profit = v.table[s] - cost
        if profit > best_profit:
            best_mask, best_profit = s, profit
    return best_mask, v.table[best_mask]


def optimal_welfare(vs: Sequence[Valuation]) -> tuple[tuple[int, ...], Fraction]:
    """Welfare-maximizing partition by enumerating all n^m item assignments;
    ties broken by smallest (mask_1, ..., mask_n)."""
    n = len(vs)
    if not 1 <= n <= 4:
        raise CapacityError("exhaustive welfare supports 1..4 players")
    m = vs[0].m
    if any(v.m != m for v in vs):
        raise DomainError("players must share m")
    best = None
    best_welfare = None
    for code in range(n ** m):
        masks = [0] * n
        c = code
        for j in range(m):
            masks[c % n] |= bit(j)
            c //= n
        welfare = sum((vs[i].table[masks[i]] for i in range(n)), Fraction(0))
        key = tuple(masks)
        if (best is None or welfare > best_welfare
                or (welfare == best_welfare and key < best)):
            best, best_welfare = key, welfare
    return best, best_welfare
