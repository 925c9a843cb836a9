"""Permutations with interval prefixes, contiguous paths and the sequences they induce.

Permutations are tuples in one-line notation on ``1..N``: ``sigma[i - 1] == sigma(i)``.
Products compose right to left, so ``compose(a, b)`` applies ``b`` first and
right multiplication by ``s_p`` swaps the entries in positions ``p, p + 1``.
"""
from __future__ import annotations

from dataclasses import dataclass
from itertools import permutations
from typing import Iterator, Sequence

from .exchange import GreenSeqError
from .layering import Layering, Mode

Permutation = tuple


class NotInXi(GreenSeqError):
    pass


class NotContiguous(GreenSeqError):
    def __init__(self, message: str, prefix: int | None = None):
        super().__init__(message)
        self.prefix = prefix


def identity(N: int) -> Permutation:
    return tuple(range(1, N + 1))


def longest(N: int) -> Permutation:
    return tuple(range(N, 0, -1))


def compose(a: Sequence[int], b: Sequence[int]) -> Permutation:
    return tuple(a[x - 1] for x in b)


def inverse(a: Sequence[int]) -> Permutation:
    out = [0] * len(a)
    for i, x in enumerate(a, 1):
        out[x - 1] = i
    return tuple(out)


def times_s(sigma: Sequence[int], p: int) -> Permutation:
    """``sigma * s_p``."""
    out = list(sigma)
    out[p - 1], out[p] = out[p], out[p - 1]
    return tuple(out)


def cycle(N: int, a: int, b: int) -> Permutation:
    """The cycle ``(a a+1 ... b)`` sending ``a -> a+1 -> ... -> b -> a``."""
    out = list(range(1, N + 1))
    for x in range(a, b):
        out[x - 1] = x + 1
    out[b - 1] = a
    return tuple(out)


def xi_contains(sigma: Sequence[int]) -> bool:
    """``sigma([1, k])`` is an interval for every ``k``.

    >>> xi_contains((3, 4, 2, 5, 1, 6)), xi_contains((1, 3, 2))
    (True, False)
    """
    lo = hi = sigma[0] if sigma else 0
    for k, x in enumerate(sigma[1:], 2):
        if x == hi + 1:
            hi = x
        elif x == lo - 1:
            lo = x
        else:
            return False
    return True


def enumerate_xi(N: int) -> list[Permutation]:
    """Elements of the interval-prefix set, grown by the max+1 / min-1 rule."""
    if N < 1:
        raise ValueError("N must be positive")
    found = []

    def grow(prefix: list[int], lo: int, hi: int):
        if len(prefix) == N:
            found.append(tuple(prefix))
            return
        for x in (lo - 1, hi + 1):
            if 1 <= x <= N:
                prefix.append(x)
                grow(prefix, min(lo, x), max(hi, x))
                prefix.pop()

    for start in range(1, N + 1):
        grow([start], start, start)
    return sorted(found)


@dataclass(frozen=True)
class TauPresentation:
    """``tau_(j_k, ..., j_1) = (k ... j_k) ... (2 ... j_2)(1 ... j_1)``; ``js = (j_k, ..., j_1)``."""

    k: int
    js: tuple = ()

    def __post_init__(self):
        js = tuple(self.js)
        object.__setattr__(self, "js", js)
        if len(js) != self.k:
            raise ValueError(f"need {self.k} entries, got {js}")
        for a in range(len(js) - 1):
            if js[a] > js[a + 1]:
                raise ValueError(f"{js} must be weakly increasing from j_k to j_1")
        if js and js[0] <= self.k:
            raise ValueError(f"need k < j_k, got k={self.k}, j_k={js[0]}")


def tau_from_presentation(tp: TauPresentation, N: int) -> Permutation:
    if tp.js and tp.js[-1] > N:
        raise ValueError(f"j_1 = {tp.js[-1]} exceeds N = {N}")
    sigma = identity(N)
    # rightmost cycle (1 ... j_1) acts first
    for r in range(tp.k, 0, -1):
        j = tp.js[tp.k - r]
        sigma = compose(sigma, cycle(N, r, j))
    return sigma


def tau_to_presentation(sigma: Sequence[int]) -> TauPresentation:
    """Unique presentation of an element of the interval-prefix set."""
    sigma = tuple(sigma)
    N = len(sigma)
    if not xi_contains(sigma):
        raise NotInXi(f"{list(sigma)} has a non-interval prefix")
    where = inverse(sigma)
    for k in range(N - 1, -1, -1):
        js = tuple(where[r - 1] + r - 1 for r in range(k, 0, -1))
        try:
            tp = TauPresentation(k, js)
        except ValueError:
            continue
        if js and js[-1] > N:
            continue
        if tau_from_presentation(tp, N) == sigma:
            return tp
    raise NotInXi(f"no presentation found for {list(sigma)}")


def tau_bullet(tau: Sequence[int], eta: Layering) -> Permutation:
    """Level-preserving relabeling: the ``i``-th level value read left to right
    in ``tau`` goes to the ``i``-th smallest member of that level."""
    N = len(tau)
    out = [0] * N
    seen: dict[int, int] = {}
    for x in tau:
        t = eta(x)
        i = seen.get(t, 0)
        out[x - 1] = eta.members(t)[i]
        seen[t] = i + 1
    return tuple(out)


@dataclass(frozen=True)
class PathStep:
    p: int
    m: int
    n: int


@dataclass(frozen=True)
class ContiguousPath:
    perms: tuple
    steps: tuple

    @property
    def N(self) -> int:
        return len(self.perms[0])

    @property
    def word(self) -> tuple:
        return tuple(s.p for s in self.steps)

    def to_doc(self) -> dict:
        return {"words": list(self.word), "perms": [list(p) for p in self.perms]}


def word_to_path(word: Sequence[int], N: int) -> ContiguousPath:
    """Path ``id -> w_{<=1} -> ... -> w_0`` for a reduced word with interval prefixes."""
    word = tuple(int(p) for p in word)
    M = N * (N - 1) // 2
    if len(word) != M:
        raise NotContiguous(f"word has length {len(word)}, a reduced word of w0 needs {M}")
    sigma = identity(N)
    perms = [sigma]
    steps = []
    for i, p in enumerate(word, 1):
        if not 1 <= p <= N - 1:
            raise NotContiguous(f"position {p} out of range at letter {i}", i)
        m, n = sigma[p - 1], sigma[p]
        if m > n:
            raise NotContiguous(f"letter {i} (s_{p}) is not length-increasing", i)
        sigma = times_s(sigma, p)
        if not xi_contains(sigma):
            raise NotContiguous(f"prefix of length {i} gives {list(sigma)}, "
                                "which has a non-interval prefix", i)
        perms.append(sigma)
        steps.append(PathStep(p, m, n))
    return ContiguousPath(tuple(perms), tuple(steps))


def path_to_word(path: ContiguousPath) -> tuple:
    word = []
    for a, step in enumerate(path.steps):
        before, after = path.perms[a], path.perms[a + 1]
        assert before[step.p - 1] == step.m and before[step.p] == step.n
        assert after == times_s(before, step.p)
        word.append(step.p)
    return tuple(word)


def enumerate_contiguous_paths(N: int, limit: int | None = None) -> Iterator[ContiguousPath]:
    """All contiguous paths, lexicographic in their words, at most ``limit``."""
    if N < 2:
        raise ValueError("N must be at least 2")
    target = longest(N)
    perms = [identity(N)]
    steps: list[PathStep] = []
    emitted = 0

    def walk() -> Iterator[ContiguousPath]:
        nonlocal emitted
        sigma = perms[-1]
        if sigma == target:
            emitted += 1
            yield ContiguousPath(tuple(perms), tuple(steps))
            return
        for p in range(1, N):
            if limit is not None and emitted >= limit:
                return
            m, n = sigma[p - 1], sigma[p]
            if m > n:
                continue
            nxt = times_s(sigma, p)
            if not xi_contains(nxt):
                continue
            perms.append(nxt)
            steps.append(PathStep(p, m, n))
            yield from walk()
            steps.pop()
            perms.pop()

    yield from walk()


def is_pull_path(perms: Sequence[Sequence[int]]) -> bool:
    """Check the pulling rules directly on a list of permutations.

    Every step swaps adjacent ``m < n`` moving ``m`` right, and ``m`` may only
    move once ``1..m-1`` all sit to its right.
    """
    N = len(perms[0])
    if tuple(perms[0]) != identity(N) or tuple(perms[-1]) != longest(N):
        return False
    for before, after in zip(perms, perms[1:]):
        diff = [i for i in range(N) if before[i] != after[i]]
        if len(diff) != 2 or diff[1] != diff[0] + 1:
            return False
        a = diff[0]
        m, n = before[a], before[a + 1]
        if not (m < n and after[a] == n and after[a + 1] == m):
            return False
        right = set(before[a + 1:])
        if any(x not in right for x in range(1, m)):
            return False
    return True


def reduced_words_of_longest(N: int) -> Iterator[tuple]:
    """Every reduced word of ``w0`` (no interval filtering)."""
    target = longest(N)

    def walk(sigma, word):
        if sigma == target:
            yield tuple(word)
            return
        for p in range(1, N):
            if sigma[p - 1] < sigma[p]:
                word.append(p)
                yield from walk(times_s(sigma, p), word)
                word.pop()

    yield from walk(identity(N), [])


def all_permutations(N: int) -> Iterator[Permutation]:
    return (tuple(p) for p in permutations(range(1, N + 1)))


def seq_from_path(path: ContiguousPath, eta: Layering) -> tuple:
    """Mutation sequence read off a contiguous path.

    A step swapping ``m < n`` of different levels emits nothing; a same-level
    step emits the relabeled index of the swapped position.  Both the
    later-permutation and earlier-permutation formulas are computed and must agree.
    """
    if eta.mode is not Mode.FULL:
        raise ValueError("seq_from_path needs a full-mode layering on [1, N]")
    if set(eta.domain) != set(range(1, path.N + 1)):
        raise ValueError(f"layering must cover 1..{path.N}")
    frozen = set(eta.frozen_set())
    out = []
    for a, step in enumerate(path.steps):
        if eta(step.m) != eta(step.n):
            continue
        before, after = path.perms[a], path.perms[a + 1]
        later = tau_bullet(after, eta)[after[step.p - 1] - 1]
        earlier = tau_bullet(before, eta)[before[step.p - 1] - 1]
        if later != earlier:
            raise AssertionError(f"step {a + 1}: relabeled index {later} != {earlier}")
        assert later not in frozen, f"step {a + 1} emitted frozen index {later}"
        out.append(later)
    return tuple(out)
