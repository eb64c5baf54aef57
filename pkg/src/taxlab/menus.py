"""Menus: per-bundle price tables, their canonical form, and min-affine
representations.

A menu is the taxation-principle object: the price (possibly infinite) a
player faces for each bundle.  The canonical form is normalized (empty
bundle costs 0) and monotone (supersets never cheaper); menu equality is
exact table equality after normalization.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .bundles import all_bundles, bit, check_m, grand, supersets
from .rational import INF, Price, format_price, is_finite, parse_price, sum_prices
from .valuations import DomainError, Valuation


class ContractError(ValueError):
    """A documented precondition was violated."""


@dataclass(frozen=True)
class Menu:
    m: int
    price: tuple[Price, ...]

    def __post_init__(self):
        check_m(self.m)
        if len(self.price) != 1 << self.m:
            raise DomainError("menu must price all 2^m bundles")

    def is_normalized(self) -> bool:
        if self.price[0] != 0:
            return False
        for s in all_bundles(self.m):
            for j in range(self.m):
                if not s & bit(j) and not self.price[s] <= self.price[s | bit(j)]:
                    return False
        return True

    def sort_key(self):
        return tuple(
            (1,) if not is_finite(p) else (0, p.numerator, p.denominator)
            for p in self.price
        )


def normalize_menu(raw: Menu) -> Menu:
    """Canonical form: shift so the empty bundle costs 0, then repair
    monotonicity by lowering each bundle to its cheapest superset price
    (never-winnable bundles inherit the cheapest superset).  Keeps the
    maximum profit and every previously profit-maximizing bundle intact for
    any valuation."""
    base = raw.price[0]
    if not is_finite(base):
        raise DomainError("menu price of the empty bundle must be finite")
    shifted = [p - base if is_finite(p) else INF for p in raw.price]
    repaired: list[Price] = list(shifted)
    # min over supersets, computed by descending subset DP on each item
    for j in range(raw.m):
        b = bit(j)
        for s in reversed(all_bundles(raw.m)):
            if not s & b and repaired[s | b] < repaired[s]:
                repaired[s] = repaired[s | b]
    return Menu(raw.m, tuple(repaired))


def profit_argmax_set(menu: Menu, v: Valuation) -> list[int]:
    """All profit-maximizing bundles in ascending mask order.  Bundles with
    infinite price are excluded; the empty bundle guarantees nonemptiness."""
    if menu.m != v.m:
        raise DomainError("menu and valuation must share m")
    best = None
    arg: list[int] = []
    for s in all_bundles(menu.m):
        p = menu.price[s]
        if not is_finite(p):
            continue
        profit = v.table[s] - p
        if best is None or profit > best:
            best, arg = profit, [s]
        elif profit == best:
            arg.append(s)
    return arg


def menu_complexity(menu: Menu) -> tuple[int, tuple[int, ...]]:
    """Bundles "in the menu": every strict superset strictly more expensive;
    the grand bundle qualifies iff its price is finite."""
    if not menu.is_normalized():
        raise ContractError("menu_complexity expects a normalized menu")
    top = grand(menu.m)
    out = []
    for s in all_bundles(menu.m):
        if s == top:
            if is_finite(menu.price[s]):
                out.append(s)
            continue
        ps = menu.price[s]
        if all(ps < menu.price[t] for t in supersets(s, menu.m) if t != s):
            out.append(s)
    return len(out), tuple(out)


def in_menu_rebuild(m: int, priced: dict[int, Fraction]) -> Menu:
    """Menu determined by its in-menu bundles: each bundle costs the cheapest
    in-menu superset, infinite when none exists."""
    table: list[Price] = []
    for s in all_bundles(m):
        best: Price = INF
        for k, p in priced.items():
            if k & s == s and p < best:
                best = p
        table.append(best)
    return Menu(m, tuple(table))


@dataclass(frozen=True)
class MinAffineMenu:
    """Pointwise minimum of per-item price vectors plus offsets, with an
    exception table of arbitrarily priced bundles."""

    m: int
    vectors: tuple[tuple[Price, ...], ...]
    offsets: tuple[Fraction, ...]
    exceptions: tuple[tuple[int, Price], ...] = ()

    def __post_init__(self):
        check_m(self.m)
        if len(self.vectors) != len(self.offsets):
            raise DomainError("one offset per price vector")
        for vec in self.vectors:
            if len(vec) != self.m:
                raise DomainError("price vector length must equal m")
        if any(r < 0 for r in self.offsets):
            raise DomainError("offsets must be nonnegative")
        masks = [s for s, _ in self.exceptions]
        if len(set(masks)) != len(masks):
            raise DomainError("duplicate exception bundle")

    @property
    def alpha(self) -> int:
        return len(self.vectors)

    @property
    def beta(self) -> int:
        return len(self.exceptions)

    def exception_map(self) -> dict[int, Price]:
        return dict(self.exceptions)


def eval_min_affine(ma: MinAffineMenu, s: int) -> Price:
    """Exception price if present; else the cheapest affine term, with any
    infinite summand knocking that term out.  The empty bundle is free by
    menu normalization unless an exception overrides it."""
    if not 0 <= s < (1 << ma.m):
        raise DomainError("bundle out of range")
    exc = ma.exception_map()
    if s in exc:
        return exc[s]
    if s == 0:
        return Fraction(0)
    best: Price = INF
    for vec, r in zip(ma.vectors, ma.offsets):
        term = sum_prices(vec[j] for j in range(ma.m) if s & bit(j))
        if is_finite(term):
            term = term + r
            if term < best:
                best = term
    return best


def min_affine_table(ma: MinAffineMenu) -> Menu:
    return Menu(ma.m, tuple(eval_min_affine(ma, s) for s in all_bundles(ma.m)))


def menu_to_json(menu: Menu) -> dict:
    return {
        "m": menu.m,
        "values": {str(s): format_price(menu.price[s]) for s in all_bundles(menu.m)},
    }


def menu_from_json(doc: dict) -> Menu:
    m = int(doc["m"])
    values = doc["values"]
    table = []
    for s in all_bundles(m):
        key = str(s)
        if key not in values:
            raise DomainError(f"menu JSON omits mask {s}")
        table.append(parse_price(values[key]))
    return Menu(m, tuple(table))


def min_affine_to_json(ma: MinAffineMenu) -> dict:
    return {
        "m": ma.m,
        "vectors": [[format_price(p) for p in vec] for vec in ma.vectors],
        "offsets": [format_price(r) for r in ma.offsets],
        "exceptions": {str(s): format_price(p) for s, p in ma.exceptions},
    }


def min_affine_from_json(doc: dict) -> MinAffineMenu:
    m = int(doc["m"])
    vectors = tuple(tuple(parse_price(p) for p in vec) for vec in doc["vectors"])
    offsets = tuple(Fraction(r) for r in doc["offsets"])
    exceptions = tuple(
        sorted((int(k), parse_price(v)) for k, v in doc.get("exceptions", {}).items())
    )
    return MinAffineMenu(m, vectors, offsets, exceptions)
