"""Promise multiparty set disjointness with exact bit accounting.

Players hold l-bit strings from known allowed sets; every profile of
allowed strings shares at most z common-1 bits (the promise).  The
1-promise protocol repeatedly has each player announce an own-1 bit whose
neighborhood (bits co-occurring with it somewhere in the player's allowed
set) is small; the live window shrinks to that neighborhood until a
constant-size remainder is revealed outright.  General z reduces to the
1-promise case on the z-product strings (one bit per z-tuple) and recurses
at z-1 on the allowed strings consistent with a "no" transcript.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations
from math import comb
from typing import Optional, Sequence

from .valuations import DomainError


class PromiseError(RuntimeError):
    """The promise does not hold for the declared allowed sets."""


def popcount(x: int) -> int:
    return x.bit_count()


def bits_to_mask(bits: str) -> int:
    """Bit k of the string (leftmost = bit 0) becomes bit k of the mask."""
    mask = 0
    for k, ch in enumerate(bits):
        if ch == "1":
            mask |= 1 << k
        elif ch != "0":
            raise DomainError("bit strings must be over 0/1")
    return mask


def mask_to_bits(mask: int, l: int) -> str:
    return "".join("1" if mask >> k & 1 else "0" for k in range(l))


def max_intersection(allowed: Sequence[Sequence[int]], l: int) -> int:
    """Exact maximum number of common-1 bits over the allowed-set product,
    by propagating the reachable partial-AND masks."""
    reach = {(1 << l) - 1}
    for strings in allowed:
        reach = {r & a for r in reach for a in strings}
    return max((popcount(r) for r in reach), default=0)


@dataclass(frozen=True)
class ZDisjointnessInstance:
    n: int
    l: int
    allowed: tuple[tuple[int, ...], ...]
    inputs: tuple[int, ...]
    z: int

    def __post_init__(self):
        if self.n < 1 or self.l < 1:
            raise DomainError("need at least one player and one bit")
        if len(self.allowed) != self.n or len(self.inputs) != self.n:
            raise DomainError("allowed sets and inputs must cover all players")
        full = (1 << self.l) - 1
        for strings, a in zip(self.allowed, self.inputs):
            if not strings:
                raise DomainError("allowed sets must be nonempty")
            if any(s & ~full for s in strings):
                raise DomainError("allowed strings exceed the bit width")
            if a not in strings:
                raise DomainError("each input must come from its allowed set")
        worst = max_intersection(self.allowed, self.l)
        if worst > self.z:
            raise PromiseError(
                f"promise z={self.z} violated: some profile shares {worst} bits"
            )

    def exact_promise(self) -> int:
        return max_intersection(self.allowed, self.l)


@dataclass(frozen=True)
class Verdict:
    intersecting_bit: Optional[int]
    bits: int

    @property
    def disjoint(self) -> bool:
        return self.intersecting_bit is None


def announce_cost(l: int) -> int:
    """A bit index or 'none', per player per round: ceil(log2(l+1))."""
    return max(1, l.bit_length())


def small_candidate(strings: Sequence[int], own: int, live: int, r_s: int, n: int) -> Optional[int]:
    """The player's smallest own-1 live bit whose neighborhood within the
    live window has at most (1 - 1/2n) r_s bits."""
    cand = own & live
    while cand:
        k = (cand & -cand).bit_length() - 1
        cand &= cand - 1
        nb = 0
        kbit = 1 << k
        for a in strings:
            a_live = a & live
            if a_live & kbit:
                nb |= a_live
        if 2 * n * popcount(nb) <= (2 * n - 1) * r_s:
            return k
    return None


@dataclass
class OneDisjointnessRun:
    verdict: Verdict
    consistent: tuple[tuple[int, ...], ...]  # allowed strings per player matching the transcript
    rounds: int
    live_sizes: tuple[int, ...] = ()  # live-window size entering each round


def run_one_disjointness(n: int, l: int, allowed: Sequence[Sequence[int]],
                         inputs: Sequence[int]) -> OneDisjointnessRun:
    """The 1-promise protocol with per-round consistency tracking."""
    live = (1 << l) - 1
    bits = 0
    rounds = 0
    live_sizes: list[int] = []
    consistent = [list(strings) for strings in allowed]

    if n == 1:
        def first_bit(a: int) -> Optional[int]:
            return (a & -a).bit_length() - 1 if a else None

        bits = announce_cost(l)
        hit = first_bit(inputs[0])
        consistent[0] = [a for a in consistent[0] if first_bit(a) == hit]
        return OneDisjointnessRun(Verdict(hit, bits), tuple(map(tuple, consistent)), 1)

    while True:
        r_s = popcount(live)
        if r_s <= 2 * n:
            live_sizes.append(r_s)
            bits += n * r_s
            for i in range(n):
                reveal = inputs[i] & live
                consistent[i] = [a for a in consistent[i] if a & live == reveal]
            common = live
            for a in inputs:
                common &= a
            hits = popcount(common)
            if hits >= 2:
                raise PromiseError("two intersecting bits observed in one window")
            hit = (common & -common).bit_length() - 1 if common else None
            return OneDisjointnessRun(Verdict(hit, bits), tuple(map(tuple, consistent)),
                                      rounds, tuple(live_sizes))

        rounds += 1
        live_sizes.append(r_s)
        bits += n * announce_cost(l)
        announced = [
            small_candidate(allowed[i], inputs[i], live, r_s, n) for i in range(n)
        ]
        for i in range(n):
            consistent[i] = [
                a for a in consistent[i]
                if small_candidate(allowed[i], a, live, r_s, n) == announced[i]
            ]
        speaker = next((i for i in range(n) if announced[i] is not None), None)
        if speaker is None:
            return OneDisjointnessRun(Verdict(None, bits), tuple(map(tuple, consistent)),
                                      rounds, tuple(live_sizes))
        kbit = 1 << announced[speaker]
        nb = 0
        for a in allowed[speaker]:
            a_live = a & live
            if a_live & kbit:
                nb |= a_live
        live = nb


def solve_one_disjointness(inst: ZDisjointnessInstance) -> Verdict:
    if inst.z != 1:
        raise DomainError("the neighborhood protocol needs the promise z = 1")
    return run_one_disjointness(inst.n, inst.l, inst.allowed, inst.inputs).verdict


def combination_rank(combo: Sequence[int], l: int, z: int) -> int:
    """Index of an ascending z-tuple in lexicographic combination order."""
    rank = 0
    prev = -1
    for i, b in enumerate(combo):
        for v in range(prev + 1, b):
            rank += comb(l - 1 - v, z - i - 1)
        prev = b
    return rank


def combination_unrank(rank: int, l: int, z: int) -> tuple[int, ...]:
    """Inverse of combination_rank."""
    combo = []
    v = 0
    for i in range(z):
        while comb(l - 1 - v, z - i - 1) <= rank:
            rank -= comb(l - 1 - v, z - i - 1)
            v += 1
        combo.append(v)
        v += 1
    return tuple(combo)


def z_product_mask(a: int, l: int, z: int) -> int:
    """One bit per z-tuple of positions, set when all tuple bits are set in
    the string; built sparsely from the string's own bits."""
    bits = [k for k in range(l) if a >> k & 1]
    out = 0
    for combo in combinations(bits, z):
        out |= 1 << combination_rank(combo, l, z)
    return out


def solve_z_with_consistency(inst: ZDisjointnessInstance) -> tuple[Verdict, tuple[tuple[int, ...], ...]]:
    """Verdict plus, per player, the allowed strings consistent with the
    whole transcript (the rectangle the run ends in)."""
    if inst.z == 0:
        return Verdict(None, 0), inst.allowed
    if inst.z == 1:
        run = run_one_disjointness(inst.n, inst.l, inst.allowed, inst.inputs)
        return run.verdict, run.consistent

    n_tuples = comb(inst.l, inst.z)
    prod_allowed = [
        [z_product_mask(a, inst.l, inst.z) for a in strings]
        for strings in inst.allowed
    ]
    prod_inputs = [z_product_mask(a, inst.l, inst.z) for a in inst.inputs]
    run = run_one_disjointness(inst.n, n_tuples, prod_allowed, prod_inputs)
    kept = []
    for i in range(inst.n):
        keep_products = set(run.consistent[i])
        kept.append(tuple(
            a for a, pa in zip(inst.allowed[i], prod_allowed[i]) if pa in keep_products
        ))
    if run.verdict.intersecting_bit is not None:
        combo = combination_unrank(run.verdict.intersecting_bit, inst.l, inst.z)
        return Verdict(combo[0], run.verdict.bits), tuple(kept)

    # "no" leaf: the consistent strings share at most z-1 bits
    sub = ZDisjointnessInstance(
        n=inst.n,
        l=inst.l,
        allowed=tuple(kept),
        inputs=inst.inputs,
        z=inst.z - 1,
    )
    deeper, deeper_kept = solve_z_with_consistency(sub)
    return Verdict(deeper.intersecting_bit, run.verdict.bits + deeper.bits), deeper_kept


def solve_z_disjointness(inst: ZDisjointnessInstance) -> Verdict:
    """Decide disjointness under the declared promise; bits accumulate over
    the product levels z, z-1, ..., 1."""
    verdict, _ = solve_z_with_consistency(inst)
    return verdict


def brute_force_verdict(inst: ZDisjointnessInstance) -> Optional[int]:
    common = (1 << inst.l) - 1
    for a in inst.inputs:
        common &= a
    return (common & -common).bit_length() - 1 if common else None


def instance_to_json(inst: ZDisjointnessInstance) -> dict:
    return {
        "n": inst.n,
        "l": inst.l,
        "allowed": [[mask_to_bits(a, inst.l) for a in strings] for strings in inst.allowed],
        "inputs": [mask_to_bits(a, inst.l) for a in inst.inputs],
        "z": inst.z,
    }


def instance_from_json(doc: dict) -> ZDisjointnessInstance:
    l = int(doc["l"])
    return ZDisjointnessInstance(
        n=int(doc["n"]),
        l=l,
        allowed=tuple(tuple(bits_to_mask(s) for s in strings) for strings in doc["allowed"]),
        inputs=tuple(bits_to_mask(s) for s in doc["inputs"]),
        z=int(doc["z"]),
    )
