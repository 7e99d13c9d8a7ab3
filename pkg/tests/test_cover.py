import itertools
import random

from milnorfibre.cover import min_weight_cover


def brute(universe, sets, weights):
    best = None
    for r in range(len(sets) + 1):
        for combo in itertools.combinations(sorted(sets), r):
            if universe <= set().union(*(sets[k] for k in combo)):
                w = sum(weights[k] for k in combo)
                best = w if best is None else min(best, w)
    return best


def test_triple_lines():
    lines = {"12", "13", "14", "23", "24", "34"}
    sets = {
        "T" + "".join(t): frozenset(a + b for a, b in itertools.combinations(t, 2))
        for t in itertools.combinations("1234", 3)
    }
    c = min_weight_cover(lines, sets, {k: 2 for k in sets})
    assert c.weight == 6 and len(c.chosen) == 3 and c.optimal


def test_no_cover():
    assert min_weight_cover({"a", "b"}, {"s": frozenset({"a"})}, {"s": 1}) is None


def test_empty_universe():
    c = min_weight_cover(set(), {"s": frozenset({"a"})}, {"s": 4})
    assert c.weight == 0 and c.chosen == ()


def test_matches_brute_force():
    rng = random.Random(3)
    for _ in range(200):
        universe = {f"e{i}" for i in range(rng.randint(1, 6))}
        sets = {
            f"s{j}": frozenset(rng.sample(sorted(universe), rng.randint(1, len(universe))))
            for j in range(rng.randint(1, 7))
        }
        weights = {k: rng.randint(0, 5) for k in sets}
        c = min_weight_cover(universe, sets, weights)
        expected = brute(universe, sets, weights)
        assert (c.weight if c else None) == expected


def test_greedy_beyond_limit():
    universe = {f"e{i}" for i in range(30)}
    sets = {f"s{i}": frozenset({f"e{i}"}) for i in range(30)}
    c = min_weight_cover(universe, sets, {k: 1 for k in sets})
    assert not c.optimal and c.weight == 30
    c = min_weight_cover(universe, sets, {k: 1 for k in sets}, exact_limit=40)
    assert c.optimal
