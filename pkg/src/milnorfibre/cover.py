"""Minimum-weight covers of a small universe by named subsets."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping

EXACT_LIMIT = 24


@dataclass(frozen=True)
class Cover:
    chosen: tuple[str, ...]
    weight: int
    optimal: bool


def min_weight_cover(
    universe: set[str],
    sets: Mapping[str, frozenset[str]],
    weights: Mapping[str, int],
    exact_limit: int = EXACT_LIMIT,
) -> Cover | None:
    """Cheapest family of ``sets`` whose union contains ``universe``.

    Branch and bound when there are at most ``exact_limit`` candidate sets,
    greedy (flagged non-optimal) beyond that. Returns ``None`` if no cover
    exists. Ties are broken by name so the result is deterministic.
    """
    names = sorted(sets)
    if not universe <= set().union(*(sets[k] for k in names)):
        return None
    if len(names) > exact_limit:
        return _greedy(universe, sets, weights, names)

    best: list = [None, None]  # weight, chosen

    def branch(uncovered: frozenset, chosen: tuple, cost: int):
        if best[0] is not None and cost >= best[0]:
            return
        if not uncovered:
            best[0], best[1] = cost, tuple(sorted(chosen))
            return
        # branch on the element with the fewest candidate sets
        target = min(sorted(uncovered), key=lambda e: sum(1 for k in names if e in sets[k]))
        options = sorted((k for k in names if target in sets[k] and k not in chosen), key=lambda k: (weights[k], k))
        for k in options:
            branch(uncovered - sets[k], chosen + (k,), cost + weights[k])

    branch(frozenset(universe), (), 0)
    return Cover(best[1], best[0], True)


def _greedy(universe, sets, weights, names) -> Cover:
    uncovered = set(universe)
    chosen = []
    while uncovered:
        k = min(
            (k for k in names if sets[k] & uncovered),
            key=lambda k: (weights[k] / len(sets[k] & uncovered), k),
        )
        chosen.append(k)
        uncovered -= sets[k]
    return Cover(tuple(sorted(chosen)), sum(weights[k] for k in chosen), False)
