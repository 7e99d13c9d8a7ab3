"""Small constructors for diagrams used across the test modules."""

from __future__ import annotations

import random

from milnorfibre import IntMatrix, diagram_from_dict, validate

H = [[1, 1, 1], [-1, 0, 0], [0, -1, 0]]  # Milnor monodromy of F1A3, order 4
BOUQUET_A = [[0, -1], [1, 1]]  # det(A - I) = 1


def eye(k):
    return [[int(i == j) for j in range(k)] for i in range(k)]


def branch(bid, mu, outside, genus=0, genus_loops=()):
    return {
        "id": bid,
        "genus": genus,
        "transversal_milnor_number": mu,
        "genus_loops": [list(map(list, g)) for g in genus_loops],
        "outside_loops": [list(map(list, m)) for m in outside],
    }


def point(pid, loops, euler=None, betti=None, h_zero=None, j1=None):
    fibre = {}
    if euler is not None:
        fibre["euler_char"] = euler
    if betti is not None:
        fibre["betti_n_minus_1"] = betti
    if h_zero is not None:
        fibre["h_n_minus_1_is_zero_over_Z"] = h_zero
    q = {"id": pid, "loops": [{"branch": b, "monodromy": m} for b, m in loops], "fibre": fibre}
    if j1 is not None:
        q["j1_block"] = j1
    return q


def diagram(n, branches, points=(), isolated=(), **extra):
    data = {
        "n": n,
        "branches": list(branches),
        "special_points": list(points),
        "isolated_points": [{"id": r, "milnor_number": mu, "on_zero_fibre": False} for r, mu in isolated],
    }
    data.update(extra)
    return validate(diagram_from_dict(data))


def a_infinity(n=2, isolated=()):
    return diagram(n, [branch("line", 1, [[[1]]])], isolated=isolated)


def xk_family(k):
    """f_s = (x^k - s)z^2 + yz^2 + y^2z: k special points with loop h, outside loop h^k."""
    h = IntMatrix.from_rows(H)
    hk = h.power(k).to_rows()
    pts = [point(f"p{t + 1}", [("x", H)], euler=0, betti=1, j1=[[1]]) for t in range(k)]
    return diagram(2, [branch("x", 3, [hk])], pts, isolated=[(f"A{k}", k)])


def bouquet_diagram(n):
    """Two branches, each with a loop whose A - I is unimodular; chi = 1 + 2 * (-1)^n."""
    return diagram(n, [branch("a", 2, [BOUQUET_A, eye(2)]), branch("b", 2, [eye(2), BOUQUET_A, BOUQUET_A])])


def random_unimodular(rng: random.Random, size: int, bound: int = 3, steps: int = 8) -> list[list[int]]:
    """Product of random elementary matrices, keeping every entry within ``bound``."""
    m = eye(size)
    for _ in range(steps):
        op = rng.randrange(3)
        i, j = rng.randrange(size), rng.randrange(size)
        trial = [row[:] for row in m]
        if op == 0 and i != j:
            c = rng.choice((-1, 1))
            trial[i] = [x + c * y for x, y in zip(trial[i], trial[j])]
        elif op == 1:
            trial[i], trial[j] = trial[j], trial[i]
        else:
            trial[i] = [-x for x in trial[i]]
        if max(abs(x) for row in trial for x in row) <= bound:
            m = trial
    return m


def random_diagram(rng: random.Random):
    """Random valid diagram: at most 4 branches, mu <= 4, at most 3 loops per branch."""
    nb = rng.randint(1, 4)
    mus = {f"b{i}": rng.randint(1, 4) for i in range(nb)}
    budget = {}
    branches = []
    for bid, mu in mus.items():
        genus = 1 if rng.random() < 0.2 else 0
        tau = rng.randint(1, 3 - 2 * genus)
        branches.append(
            branch(
                bid,
                mu,
                [random_unimodular(rng, mu) for _ in range(tau)],
                genus,
                [random_unimodular(rng, mu) for _ in range(2 * genus)],
            )
        )
        budget[bid] = 3 - 2 * genus - tau
    points = []
    for t in range(rng.randint(0, 3)):
        open_branches = [b for b, left in budget.items() if left > 0]
        if not open_branches:
            break
        picks = rng.sample(open_branches, rng.randint(1, min(2, len(open_branches))))
        loops = []
        for b in picks:
            budget[b] -= 1
            loops.append((b, random_unimodular(rng, mus[b])))
        points.append(point(f"q{t}", loops, euler=rng.randint(-3, 3)))
    return diagram(rng.randint(2, 4), branches, points)
