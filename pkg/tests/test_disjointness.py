"""Promise disjointness: the neighborhood protocol and the product
recursion."""

import pytest

from taxlab.disjointness import (PromiseError, ZDisjointnessInstance,
                                 announce_cost, bits_to_mask, brute_force_verdict,
                                 instance_from_json, instance_to_json,
                                 mask_to_bits, max_intersection,
                                 run_one_disjointness, solve_one_disjointness,
                                 solve_z_disjointness)
from taxlab.rng import stream
from taxlab.suites import random_promise_instance


def test_bits_mask_roundtrip():
    assert bits_to_mask("0100") == 0b0010
    assert mask_to_bits(0b0010, 4) == "0100"
    assert announce_cost(4) == 3  # a bit index or "none" among five symbols


def test_spec_examples():
    shared = (0b0000, 0b0001, 0b0010)
    inst = ZDisjointnessInstance(2, 4, (shared, shared), (0b0001, 0b0001), 1)
    v = solve_one_disjointness(inst)
    assert v.intersecting_bit == 0

    zeros = ZDisjointnessInstance(2, 4, ((0,), (0,)), (0, 0), 1)
    assert solve_one_disjointness(zeros).disjoint

    apart = ZDisjointnessInstance(2, 4, ((0b0001, 0), (0b0010, 0)),
                                  (0b0001, 0b0010), 1)
    assert solve_one_disjointness(apart).disjoint

    pair = ZDisjointnessInstance(2, 4, ((0b0011, 0),) * 2, (0b0011, 0b0011), 2)
    got = solve_z_disjointness(pair)
    assert got.intersecting_bit in (0, 1)

    one_side_zero = ZDisjointnessInstance(2, 4, ((0b0011, 0),) * 2, (0b0011, 0), 2)
    assert solve_z_disjointness(one_side_zero).disjoint


def test_single_common_bit_found_at_recursion_bottom():
    # declared promise 2, but the inputs share exactly one bit
    a = (0b0110, 0b0011)
    b = (0b0101, 0b0011)
    inst = ZDisjointnessInstance(2, 4, (a, b), (0b0110, 0b0101), 2)
    got = solve_z_disjointness(inst)
    assert got.intersecting_bit == 2  # the single shared bit


def test_promise_validation():
    with pytest.raises(PromiseError):
        ZDisjointnessInstance(2, 4, ((0b0111,), (0b0111,)), (0b0111, 0b0111), 2)
    inst = ZDisjointnessInstance(2, 4, ((0b0111,), (0b0011,)), (0b0111, 0b0011), 2)
    assert inst.exact_promise() == 2


def test_max_intersection_dp():
    allowed = [(0b1100, 0b0011), (0b1111,), (0b1010, 0b0101)]
    assert max_intersection(allowed, 4) == 1
    assert max_intersection([(0b1100,), (0b1101,)], 4) == 2


def test_random_instances_against_brute_force():
    rng = stream(23, "unit-zdis")
    for _ in range(250):
        inst = random_promise_instance(rng)
        got = solve_z_disjointness(inst)
        want = brute_force_verdict(inst)
        assert (got.intersecting_bit is None) == (want is None)
        if got.intersecting_bit is not None:
            common = inst.inputs[0]
            for a in inst.inputs:
                common &= a
            assert common >> got.intersecting_bit & 1


def test_round_shrink_factor():
    rng = stream(24, "shrink")
    seen_rounds = 0
    for _ in range(200):
        inst = random_promise_instance(rng, z_max=1)
        run = run_one_disjointness(inst.n, inst.l, inst.allowed, inst.inputs)
        for before, after in zip(run.live_sizes, run.live_sizes[1:]):
            assert 2 * inst.n * after <= (2 * inst.n - 1) * before
            seen_rounds += 1
    assert seen_rounds > 0


def test_bits_nonincreasing_under_tighter_promise():
    rng = stream(25, "tighten")
    compared = 0
    for _ in range(300):
        inst = random_promise_instance(rng, z_max=3)
        exact = inst.exact_promise()
        if exact >= inst.z:
            continue
        loose = solve_z_disjointness(inst)
        tight = solve_z_disjointness(ZDisjointnessInstance(
            inst.n, inst.l, inst.allowed, inst.inputs, exact))
        assert tight.bits <= loose.bits
        assert (tight.intersecting_bit is None) == (loose.intersecting_bit is None)
        compared += 1
    assert compared > 20


def test_instance_json_roundtrip():
    inst = ZDisjointnessInstance(2, 4, ((0b0001, 0), (0b0010,)),
                                 (0b0001, 0b0010), 1)
    doc = instance_to_json(inst)
    back = instance_from_json(doc)
    assert back == inst
    assert doc["allowed"][0][0] == "1000"
