import math
import random

import pytest

from greenseq import ExchangeMatrix


def random_exchange_matrix(rng: random.Random, n: int | None = None, frozen: int = 0,
                           bound: int = 5) -> ExchangeMatrix:
    """Random skew-symmetrizable matrix with ``|entries| <= bound``."""
    n = n if n is not None else rng.randint(1, 8)
    d = [rng.choice((1, 1, 2, 3)) for _ in range(n)]
    rows = [[0] * n for _ in range(n + frozen)]
    for a in range(n):
        for b in range(a + 1, n):
            if rng.random() < 0.4:
                continue
            g = math.lcm(d[a], d[b])
            # d_a * b_ab = -d_b * b_ba = s, a multiple of lcm(d_a, d_b)
            choices = [m for m in range(1, bound + 1)
                       if m * g // d[a] <= bound and m * g // d[b] <= bound]
            if not choices:
                continue
            s = rng.choice(choices) * g * rng.choice((1, -1))
            rows[a][b] = s // d[a]
            rows[b][a] = -s // d[b]
    for a in range(n, n + frozen):
        rows[a] = [rng.randint(-bound, bound) for _ in range(n)]
    ex = tuple(range(1, n + 1))
    fr = tuple(range(n + 1, n + frozen + 1))
    return ExchangeMatrix(ex, fr, tuple(map(tuple, rows)))


@pytest.fixture
def rng():
    return random.Random(12345)
