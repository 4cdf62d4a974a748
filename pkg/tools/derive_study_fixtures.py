#!/usr/bin/env python3
"""Search per-group fixture values whose per-group metric means reproduce the
target summary-table values exactly at 3-decimal half-up rounding.

Targets (feasibility study fixture):
  ad-hoc    : total defects 10, mean time 0.924 h, mean CE 2.781, mean EFF 0.276, mean EFC 0.436
  checklist : total defects 33, mean time 0.600 h, mean CE 14.771, mean EFF 0.875, mean EFC 0.608

The three metric columns are independent given a defects vector, so each is
searched separately: discrepancies for efficiency, known-defect counts for
effectiveness, times for cost-efficiency. Results are frozen into
src/iotsc/fixtures.py; the acceptance suite re-verifies the means with exact
rational arithmetic.
"""

from __future__ import annotations

import sys
from fractions import Fraction
from itertools import product


def round3(x: Fraction) -> Fraction:
    """Half-up rounding to 3 decimal places, exact."""
    n = x * 1000
    millis = (2 * n.numerator + n.denominator) // (2 * n.denominator)
    return Fraction(millis, 1000)


def mean(values: list[Fraction]) -> Fraction:
    return sum(values, Fraction(0)) / len(values)


def find_ratio_vector(d: tuple[int, ...], target: Fraction, lo: int, hi: int,
                      label: str) -> list[tuple[int, ...]]:
    """Find denominators q_g in [max(d_g, lo), hi] with round3(mean(d_g/q_g)) == target."""
    n = len(d)
    out = []
    window_lo = (target - Fraction(1, 2000)) * n
    window_hi = (target + Fraction(1, 2000)) * n
    ranges = [range(max(dg, lo), hi + 1) for dg in d[:-1]]
    for head in product(*ranges):
        partial = sum(Fraction(dg, q) for dg, q in zip(d, head))
        need_lo, need_hi = window_lo - partial, window_hi - partial
        if need_hi <= 0:
            continue
        dn = d[-1]
        # dn/q in (need_lo, need_hi] -> q in [dn/need_hi, dn/need_lo)
        q_min = max(dn, lo, -(-dn * need_hi.denominator // need_hi.numerator) if need_hi > 0 else lo)
        # guard: just scan a sensible window
        for q in range(max(dn, lo), hi + 1):
            r = partial + Fraction(dn, q)
            if round3(r / n) == target:
                out.append(head + (q,))
                if len(out) >= 3:
                    return out
    return out


def find_time_vector(d: tuple[int, ...], mean_time: Fraction, target_ce: Fraction,
                     lo: Fraction, hi: Fraction, step: Fraction) -> list[tuple[Fraction, ...]]:
    """Find times t_g (sum = n*mean_time, grid multiples of step) hitting the CE mean."""
    n = len(d)
    total = mean_time * n
    grid = []
    t = lo
    while t <= hi:
        grid.append(t)
        t += step
    out = []
    for head in product(grid, repeat=n - 1):
        t_last = total - sum(head, Fraction(0))
        if t_last < lo or t_last > hi:
            continue
        times = head + (t_last,)
        ce = mean([Fraction(dg) / tg for dg, tg in zip(d, times)])
        if round3(ce) == target_ce:
            out.append(times)
            if len(out) >= 3:
                return out
    return out


def compositions(total: int, parts: int, lo: int, hi: int):
    if parts == 1:
        if lo <= total <= hi:
            yield (total,)
        return
    for first in range(lo, min(hi, total) + 1):
        for rest in compositions(total - first, parts - 1, lo, hi):
            yield (first,) + rest


def search(tag: str, total_defects: int, mean_time: Fraction, ce: Fraction,
           eff: Fraction, efc: Fraction, groups: int) -> None:
    for d in compositions(total_defects, groups, 1, total_defects):
        if list(d) != sorted(d, reverse=True):
            continue
        discs = find_ratio_vector(d, eff, 1, 40, "disc")
        if not discs:
            continue
        knowns = find_ratio_vector(d, efc, 1, 40, "known")
        if not knowns:
            continue
        times = find_time_vector(d, mean_time, ce, Fraction(1, 10), Fraction(3, 2), Fraction(1, 100))
        if not times:
            times = find_time_vector(d, mean_time, ce, Fraction(1, 10), Fraction(3, 2), Fraction(1, 1000))
        if not times:
            continue
        print(f"== {tag} ==")
        print(f"  defects       = {d}")
        print(f"  discrepancies = {discs[0]}  (mean eff {float(round3(mean([Fraction(a, b) for a, b in zip(d, discs[0])])))})")
        print(f"  known         = {knowns[0]}  (mean efc {float(round3(mean([Fraction(a, b) for a, b in zip(d, knowns[0])])))})")
        print(f"  times         = {[str(t) for t in times[0]]}  (mean ce {float(round3(mean([Fraction(a) / t for a, t in zip(d, times[0])])))})")
        print(f"  sums: disc={sum(discs[0])} known={sum(knowns[0])} time={str(sum(times[0], Fraction(0)))}")
        return
    print(f"== {tag} == NO SOLUTION")


def main() -> None:
    search("checklist", 33, Fraction("0.60"), Fraction("14.771"), Fraction("0.875"), Fraction("0.608"), 4)
    search("ad-hoc", 10, Fraction("0.924"), Fraction("2.781"), Fraction("0.276"), Fraction("0.436"), 4)


if __name__ == "__main__":
    sys.exit(main())
