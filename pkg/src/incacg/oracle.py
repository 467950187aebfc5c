"""Brute-force bottom-up parser using only left and right application.

Independent of the incremental transition system; used as ground truth
for which strings are accepted and with what semantic values.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Dict, List, Optional, Tuple

from .category import Category
from .lexicon import Lexicon
from .terms import DEFAULT_FUEL, App, Term, Var, abs_n, alpha_key, app_n, normalize

__all__ = ["ChartItem", "OracleReading", "apply_right", "apply_left", "cky_parse", "lexical_items"]


@dataclass(frozen=True)
class ChartItem:
    start: int
    end: int
    cat: Category
    sem: Term

    def __post_init__(self):
        if self.end <= self.start:
            raise ValueError("empty span")


@dataclass
class OracleReading:
    term: Term
    derivations: int


def apply_right(f: ChartItem, a: ChartItem, fuel: int = DEFAULT_FUEL) -> Optional[ChartItem]:
    """``X{l:L, r:<R1>.R} + R1 => X{l:L, r:R}``"""
    if f.end != a.start or not f.cat.right or f.cat.right[0] != a.cat:
        return None
    cat = Category(f.cat.head, f.cat.left, f.cat.right[1:])
    return ChartItem(f.start, a.end, cat, normalize(App(f.sem, a.sem), fuel))


def apply_left(a: ChartItem, f: ChartItem, right_first: bool = True,
               fuel: int = DEFAULT_FUEL) -> Optional[ChartItem]:
    """``L1 + X{l:<L1>.L, r:R} => X{l:L, r:R}``

    With ``right_first`` the functor must have no right arguments left.
    Otherwise the left argument is slotted in behind the outstanding right
    arguments so the result keeps the lexical argument order.
    """
    if a.end != f.start or not f.cat.left or f.cat.left[0] != a.cat:
        return None
    if right_first and f.cat.right:
        return None
    cat = Category(f.cat.head, f.cat.left[1:], f.cat.right)
    names = [f"r{i}" for i in range(len(f.cat.right))]
    sem = abs_n(names, App(app_n(f.sem, [Var(n) for n in names]), a.sem))
    return ChartItem(a.start, f.end, cat, normalize(sem, fuel))


def lexical_items(tokens, lexicon: Lexicon):
    return [[ChartItem(i, i + 1, e.cat, e.sem) for e in lexicon.get(w)] for i, w in enumerate(tokens)]


def cky_parse(tokens, lexicon: Lexicon, goal: str = "s", right_first: bool = True,
              fuel: int = DEFAULT_FUEL) -> List[OracleReading]:
    """All readings of ``tokens`` as ``goal``, with derivation counts.

    Unknown words simply make the input ungrammatical.
    """
    n = len(tokens)
    if n == 0:
        raise ValueError("nothing to parse")
    # chart[(i, j)] : (cat, alpha key) -> [item, derivation count]
    chart: Dict[Tuple[int, int], Dict] = {}
    for i, items in enumerate(lexical_items(tokens, lexicon)):
        cell = chart.setdefault((i, i + 1), {})
        for item in items:
            key = (item.cat, alpha_key(item.sem))
            if key in cell:
                cell[key][1] += 1
            else:
                cell[key] = [item, 1]
    for width in range(2, n + 1):
        for i in range(0, n - width + 1):
            j = i + width
            cell = {}
            for k in range(i + 1, j):
                for left, lcount in chart.get((i, k), {}).values():
                    for right, rcount in chart.get((k, j), {}).values():
                        for item in (
                            apply_right(left, right, fuel),
                            apply_left(left, right, right_first, fuel),
                        ):
                            if item is None:
                                continue
                            key = (item.cat, alpha_key(item.sem))
                            if key in cell:
                                cell[key][1] += lcount * rcount
                            else:
                                cell[key] = [item, lcount * rcount]
            if cell:
                chart[(i, j)] = cell
    target = Category(goal)
    out = {}
    for (cat, key), (item, count) in chart.get((0, n), {}).items():
        if cat == target:
            if key in out:
                out[key].derivations += count
            else:
                out[key] = OracleReading(item.sem, count)
    return list(out.values())
