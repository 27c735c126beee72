"""Exact oracles for full and maximum rainbow matchings on small instances.

``find_full`` and ``max_rainbow`` run fail-first backtracking over colour
classes with a vertex-used bitmask; ``enumerate_oracle`` iterates the whole
Cartesian selection space and is kept deliberately simpler so the two can
cross-validate each other.

The contractual resource limit is the node budget (deterministic); the
wall-clock limit is advisory.
"""

from __future__ import annotations

import time
from dataclasses import dataclass

from .model import MatchingFamily, RainbowMatching


@dataclass(frozen=True)
class ExactResult:
    status: str              # found | none | timeout
    witness: RainbowMatching = None
    nodes: int = 0


@dataclass(frozen=True)
class MaxRainbowResult:
    size: int
    witness: RainbowMatching
    optimal: bool            # False when a limit stopped the search early
    nodes: int = 0


def _edge_masks(family: MatchingFamily):
    masks = []
    for cls in family.matchings:
        row = []
        for e in cls:
            mk = 0
            for v in e:
                mk |= 1 << v
            row.append((mk, e))
        masks.append(row)
    return masks


class _Budget:
    def __init__(self, node_budget, time_limit):
        self.node_budget = node_budget
        self.deadline = time.monotonic() + time_limit if time_limit else None
        self.nodes = 0

    def spend(self) -> bool:
        """Account one search node; True when a limit is hit."""
        self.nodes += 1
        if self.node_budget is not None and self.nodes > self.node_budget:
            return True
        if self.deadline is not None and self.nodes % 4096 == 0:
            return True if time.monotonic() > self.deadline else False
        return False


def find_full(family: MatchingFamily, node_budget: int = None,
              time_limit: float = None) -> ExactResult:
    """Decide existence of a full rainbow matching by complete backtracking.

    Colours are expanded fewest-available-edges-first (recomputed at each
    depth, ties by index).  Returns a witness, a certified 'none', or
    'timeout' when the node budget / wall clock runs out.
    """
    masks = _edge_masks(family)
    m = family.m
    budget = _Budget(node_budget, time_limit)
    chosen = {}

    def descend(used: int, remaining: tuple):
        if not remaining:
            return "found"
        best, best_avail = None, None
        for mi in remaining:
            avail = [em for em in masks[mi] if not em[0] & used]
            if best_avail is None or len(avail) < len(best_avail):
                best, best_avail = mi, avail
                if not avail:
                    return "none"
        rest = tuple(mi for mi in remaining if mi != best)
        for mk, e in best_avail:
            if budget.spend():
                return "timeout"
            chosen[best] = e
            out = descend(used | mk, rest)
            if out != "none":
                return out
            del chosen[best]
        return "none"

    out = descend(0, tuple(range(m)))
    if out == "found":
        return ExactResult("found", RainbowMatching(dict(chosen)), budget.nodes)
    return ExactResult(out, None, budget.nodes)


def max_rainbow(family: MatchingFamily, node_budget: int = None,
                time_limit: float = None) -> MaxRainbowResult:
    """Maximum number of representable colours, by branch and bound.

    Bound: current size + number of unassigned colours that still have an
    available edge.  On limit exhaustion the best matching found so far is
    returned with ``optimal=False`` (a valid lower bound).
    """
    masks = _edge_masks(family)
    budget = _Budget(node_budget, time_limit)
    best = {"size": 0, "sel": {}}
    chosen = {}
    hit_limit = [False]

    def descend(used: int, remaining: tuple):
        avail_by = []
        open_cols = 0
        for mi in remaining:
            avail = [em for em in masks[mi] if not em[0] & used]
            if avail:
                open_cols += 1
            avail_by.append((len(avail), mi, avail))
        if len(chosen) > best["size"]:
            best["size"] = len(chosen)
            best["sel"] = dict(chosen)
        if len(chosen) + open_cols <= best["size"] or open_cols == 0:
            return
        avail_by.sort(key=lambda t: (t[0], t[1]))
        cnt, mi, avail = next(t for t in avail_by if t[0] > 0)
        rest = tuple(x for x in remaining if x != mi)
        for mk, e in avail:
            if budget.spend():
                hit_limit[0] = True
                return
            chosen[mi] = e
            descend(used | mk, rest)
            del chosen[mi]
            if hit_limit[0]:
                return
        # branch where colour mi stays unrepresented
        descend(used, rest)

    descend(0, tuple(range(family.m)))
    return MaxRainbowResult(size=best["size"],
                            witness=RainbowMatching(best["sel"]),
                            optimal=not hit_limit[0],
                            nodes=budget.nodes)


def enumerate_oracle(family: MatchingFamily, product_limit: int = 10 ** 7) -> int:
    """Count full rainbow matchings by iterating the full Cartesian product of
    per-colour choices.  Refuses when the product space exceeds the limit."""
    from itertools import product

    space = 1
    for cls in family.matchings:
        space *= len(cls)
        if space > product_limit:
            raise ValueError(f"selection space exceeds {product_limit}")
    if family.m == 0:
        return 1
    mask_lists = [[_mask(e) for e in cls] for cls in family.matchings]
    count = 0
    for combo in product(*mask_lists):
        used = 0
        for mk in combo:
            if mk & used:
                break
            used |= mk
        else:
            count += 1
    return count


def _mask(e):
    mk = 0
    for v in e:
        mk |= 1 << v
    return mk
