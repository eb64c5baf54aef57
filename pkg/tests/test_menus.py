"""Menu canonical form, profit maximization, menu complexity, min-affine."""

from fractions import Fraction

import pytest

from taxlab.bundles import all_bundles, supersets
from taxlab.menus import (ContractError, Menu, MinAffineMenu, eval_min_affine,
                          in_menu_rebuild, menu_complexity, menu_from_json,
                          menu_to_json, min_affine_from_json, min_affine_table,
                          min_affine_to_json, normalize_menu, profit_argmax_set)
from taxlab.rational import INF, is_finite
from taxlab.rng import stream
from taxlab.valuations import (DomainError, Valuation, random_monotone_valuation,
                               valuation_from_values)

F = Fraction


def menu_of(m, entries):
    table = [INF] * (1 << m)
    table[0] = F(0)
    for s, p in entries.items():
        table[s] = p if p is INF else F(p)
    return Menu(m, tuple(table))


def test_normalize_idempotent_and_shift():
    already = menu_of(2, {0b01: 1, 0b10: 2, 0b11: 3})
    assert normalize_menu(already).price == already.price
    raw = Menu(1, (F(1), F(3)))
    fixed = normalize_menu(raw)
    assert fixed.price == (F(0), F(2))


def test_normalize_monotone_repair():
    raw = Menu(2, (F(0), F(2), F(0), F(1)))
    fixed = normalize_menu(raw)
    assert fixed.price[0b01] == 1  # lowered to the cheapest superset
    assert fixed.is_normalized()
    with pytest.raises(DomainError):
        normalize_menu(Menu(1, (INF, F(1))))


def test_normalize_keeps_max_profit_and_old_argmax():
    rng = stream(4, "norm")
    prices = [F(0), F(1, 2), F(1), F(2), F(3), INF]
    for _ in range(120):
        m = rng.randrange(1, 5)
        table = [prices[rng.randrange(len(prices))] for _ in all_bundles(m)]
        table[0] = F(0)
        raw = Menu(m, tuple(table))
        fixed = normalize_menu(raw)
        v = random_monotone_valuation(m, rng)
        old = profit_argmax_set(raw, v)
        new = profit_argmax_set(fixed, v)
        def best(menu, arg):
            return v.value(arg[0]) - menu.price[arg[0]]
        assert best(raw, old) == best(fixed, new)
        assert set(old) <= set(new)
        # every newcomer ties through an equal-valued superset in the old set
        for s in set(new) - set(old):
            assert any(t & s == s and v.value(t) == v.value(s) for t in old)


def test_profit_argmax_examples():
    only_empty = menu_of(2, {})
    v = random_monotone_valuation(2, stream(5, "pa"))
    assert profit_argmax_set(only_empty, v) == [0]
    menu = menu_of(1, {0b1: 2})
    v1 = valuation_from_values(1, {0b1: 3})
    assert profit_argmax_set(menu, v1) == [0b1]
    flat = menu_of(2, {0b01: 1, 0b10: 1, 0b11: 2})
    v_eq = valuation_from_values(2, {0b01: 1, 0b10: 1, 0b11: 2})
    assert profit_argmax_set(flat, v_eq) == [0, 0b01, 0b10, 0b11]


def test_menu_complexity_examples():
    warm = menu_of(2, {0b01: 3})
    count, bundles = menu_complexity(warm)
    assert count == 2 and bundles == (0, 0b01)
    allzero = Menu(2, (F(0),) * 4)
    count, bundles = menu_complexity(allzero)
    assert count == 1 and bundles == (0b11,)
    droptie = menu_of(2, {0b01: 0, 0b10: 0})
    count, bundles = menu_complexity(droptie)
    assert count == 2 and bundles == (0b01, 0b10)
    with pytest.raises(ContractError):
        menu_complexity(Menu(1, (F(1), F(0))))


def strictly_monotone_for(menu: Menu, target: int) -> Valuation:
    """Strictly monotone valuation whose unique profit maximizer is the
    given in-menu bundle."""
    m = menu.m
    q = menu.price[target]
    gaps = [menu.price[t] - q for t in supersets(target, m)
            if t != target and is_finite(menu.price[t])]
    gap = min(gaps) if gaps else F(1)
    delta = min(F(1), gap) / (2 * m + 2)
    gamma = (m + 1) * delta
    table = []
    for s in all_bundles(m):
        capped = menu.price[s] if is_finite(menu.price[s]) else None
        base = min(capped, q) if capped is not None else q
        bonus = gamma if s & target == target else F(0)
        table.append((base if s else F(0)) + delta * bin(s).count("1") + bonus)
    table[0] = F(0)
    return Valuation(m, tuple(table))


def test_menu_complexity_matches_unique_winnability():
    rng = stream(6, "mc")
    prices = [F(0), F(1), F(2), INF]
    for _ in range(60):
        m = rng.randrange(1, 4)
        table = [prices[rng.randrange(len(prices))] for _ in all_bundles(m)]
        table[0] = F(0)
        menu = normalize_menu(Menu(m, tuple(table)))
        count, bundles = menu_complexity(menu)
        for s in all_bundles(m):
            if s in bundles:
                v = strictly_monotone_for(menu, s)
                assert profit_argmax_set(menu, v) == [s]
            else:
                # not in the menu: infinite price or a no-pricier superset
                if is_finite(menu.price[s]):
                    assert any(
                        t != s and menu.price[t] <= menu.price[s]
                        for t in supersets(s, m)
                    )


def test_eval_min_affine_examples():
    ma = MinAffineMenu(2, ((F(1), F(1)),), (F(0),))
    assert eval_min_affine(ma, 0b11) == 2
    ma2 = MinAffineMenu(2, ((F(1), F(1)), (F(0), INF)), (F(0), F(1, 2)))
    assert eval_min_affine(ma2, 0b01) == F(1, 2)
    ma3 = MinAffineMenu(2, ((F(1), F(1)),), (F(0),), ((0b11, F(5, 2)),))
    assert eval_min_affine(ma3, 0b11) == F(5, 2)
    assert eval_min_affine(ma2, 0) == 0
    assert min_affine_table(ma2).is_normalized()


def test_min_affine_validation_and_json():
    with pytest.raises(DomainError):
        MinAffineMenu(2, ((F(1), F(1)),), (F(-1),))
    ma = MinAffineMenu(2, ((F(1), INF),), (F(0),), ((0b10, INF),))
    doc = min_affine_to_json(ma)
    back = min_affine_from_json(doc)
    assert min_affine_table(back).price == min_affine_table(ma).price


def test_in_menu_rebuild_and_json():
    menu = menu_of(2, {0b01: 1, 0b11: 2})
    rebuilt = in_menu_rebuild(2, {0: F(0), 0b01: F(1), 0b11: F(2)})
    assert rebuilt.price == (F(0), F(1), F(2), F(2))
    doc = menu_to_json(menu)
    assert menu_from_json(doc).price == menu.price
