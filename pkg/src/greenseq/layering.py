"""Level functions, layered T-system conditions and full shuffles."""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Iterator, Mapping, Sequence

from .exchange import GreenSeqError
from .quiver import ValuedArrow, ValuedIceQuiver

NEG_INF = -math.inf
POS_INF = math.inf


class WrongMode(GreenSeqError):
    pass


class Mode(enum.Enum):
    EXCHANGE = "exchange"
    FULL = "full"


@dataclass(frozen=True)
class LevelData:
    t: int
    members: tuple


class Layering:
    """A level function ``eta`` on an ordered vertex set.

    In ``EXCHANGE`` mode every vertex is exchangeable.  In ``FULL`` mode the
    maximum of each level is frozen and the rest is exchangeable.
    """

    def __init__(self, eta: Mapping[int, int], mode: Mode | str = Mode.EXCHANGE):
        self.eta = {int(k): int(v) for k, v in sorted(eta.items())}
        self.mode = Mode(mode)
        self.domain = tuple(self.eta)
        self._levels: dict[int, tuple] = {}
        for v in self.domain:
            self._levels.setdefault(self.eta[v], ())
            self._levels[self.eta[v]] += (v,)
        self._pos = {}
        for members in self._levels.values():
            for a, v in enumerate(members):
                self._pos[v] = a

    @classmethod
    def constant(cls, vertices: Sequence[int], mode: Mode | str = Mode.EXCHANGE) -> "Layering":
        return cls({v: 1 for v in vertices}, mode)

    @classmethod
    def from_blocks(cls, blocks: Sequence[Sequence[int]],
                    mode: Mode | str = Mode.EXCHANGE) -> "Layering":
        """Level ``t`` (1-based) is ``blocks[t-1]``."""
        return cls({v: t for t, block in enumerate(blocks, 1) for v in block}, mode)

    def __eq__(self, other):
        return (isinstance(other, Layering) and self.eta == other.eta
                and self.mode is other.mode)

    def __hash__(self):
        return hash((tuple(self.eta.items()), self.mode))

    def __repr__(self):
        return f"Layering({self.eta!r}, mode={self.mode.value!r})"

    def __call__(self, v: int) -> int:
        return self.eta[v]

    def levels(self) -> list[int]:
        return sorted(self._levels)

    def level(self, t: int) -> LevelData:
        return LevelData(t, self._levels[t])

    def members(self, t: int) -> tuple:
        return self._levels[t]

    def pred(self, k: int):
        members = self._levels[self.eta[k]]
        a = self._pos[k]
        return members[a - 1] if a > 0 else NEG_INF

    def succ(self, k: int):
        members = self._levels[self.eta[k]]
        a = self._pos[k]
        return members[a + 1] if a + 1 < len(members) else POS_INF

    def order_plus(self, k: int) -> int:
        return len(self._levels[self.eta[k]]) - 1 - self._pos[k]

    def order_minus(self, k: int) -> int:
        return self._pos[k]

    def frozen_set(self) -> tuple:
        if self.mode is not Mode.FULL:
            raise WrongMode("frozen_set needs a full-mode layering")
        return tuple(sorted(members[-1] for members in self._levels.values()))

    def exchangeable(self) -> tuple:
        if self.mode is Mode.EXCHANGE:
            return self.domain
        frozen = set(self.frozen_set())
        return tuple(v for v in self.domain if v not in frozen)

    def exchange_only(self) -> "Layering":
        """Restriction to the exchangeable vertices (level maxima dropped in full mode)."""
        if self.mode is Mode.EXCHANGE:
            return self
        return Layering({v: self.eta[v] for v in self.exchangeable()}, Mode.EXCHANGE)

    def to_doc(self) -> dict:
        return {"mode": self.mode.value, "eta": {str(k): v for k, v in self.eta.items()}}

    @classmethod
    def from_doc(cls, doc: Mapping) -> "Layering":
        return cls({int(k): int(v) for k, v in doc["eta"].items()}, doc.get("mode", "exchange"))


# free-function spellings of the Layering methods
def pred(eta: Layering, k: int):
    return eta.pred(k)


def succ(eta: Layering, k: int):
    return eta.succ(k)


def order_plus(eta: Layering, k: int) -> int:
    return eta.order_plus(k)


def order_minus(eta: Layering, k: int) -> int:
    return eta.order_minus(k)


def frozen_set(eta: Layering) -> tuple:
    return eta.frozen_set()


class ViolationKind(enum.Enum):
    BAD_INCOMING_SOURCE = "BadIncomingSource"
    NON_SIMPLE_INCOMING = "NonSimpleIncoming"
    SAME_LEVEL_OUTGOING = "SameLevelOutgoing"
    # strict reading only: a finite same-level neighbour sends no arrow
    MISSING_INCOMING = "MissingIncoming"


@dataclass(frozen=True)
class LayeredViolation:
    step: int | None
    vertex: int
    kind: ViolationKind
    arrow: ValuedArrow | None = None
    neighbour: int | None = None

    @property
    def lenient_ok(self) -> bool:
        """True when only the strict 'exactly one arrow from each neighbour' reading fails."""
        return self.kind is ViolationKind.MISSING_INCOMING

    def to_dict(self) -> dict:
        arrow = None
        if self.arrow is not None:
            arrow = {"src": str(self.arrow.src), "dst": str(self.arrow.dst),
                     "v": list(self.arrow.labels)}
        return {"step": self.step, "vertex": self.vertex, "kind": self.kind.value,
                "arrow": arrow, "neighbour": self.neighbour}


def check_layered_step(Q: ValuedIceQuiver, k: int, eta: Layering,
                       step: int | None = None) -> LayeredViolation | None:
    """Check the layered conditions at mutation vertex ``k`` of ``Q``.

    Incoming arrows must be simple and come from ``k[-1]``/``k[1]``, one from
    each finite neighbour; outgoing arrows must leave the level of ``k``.
    Returns ``None`` when all conditions hold.
    """
    eta = eta.exchange_only()
    neighbours = [x for x in (eta.pred(k), eta.succ(k)) if not math.isinf(x)]
    seen = {x: 0 for x in neighbours}
    level = eta(k)
    for arr in Q.arrows:
        if arr.dst == k:
            if arr.src not in seen:
                return LayeredViolation(step, k, ViolationKind.BAD_INCOMING_SOURCE, arr)
            if not arr.simple:
                return LayeredViolation(step, k, ViolationKind.NON_SIMPLE_INCOMING, arr)
            seen[arr.src] += 1
        elif arr.src == k:
            if arr.dst in eta.eta and eta(arr.dst) == level:
                return LayeredViolation(step, k, ViolationKind.SAME_LEVEL_OUTGOING, arr)
    for x in neighbours:
        if seen[x] != 1:
            return LayeredViolation(step, k, ViolationKind.MISSING_INCOMING, None, x)
    return None


class FullnessKind(enum.Enum):
    UNKNOWN_VERTEX = "UnknownVertex"
    COUNT = "Count"
    ROW_ORDER = "RowOrder"
    CROSS_ROW = "CrossRow"


@dataclass(frozen=True)
class FullnessViolation:
    kind: FullnessKind
    level: int | None
    vertex: int
    detail: str

    def to_dict(self) -> dict:
        return {"kind": self.kind.value, "level": self.level, "vertex": self.vertex,
                "detail": self.detail}


def is_full(seq: Sequence[int], eta: Layering) -> FullnessViolation | None:
    """Check the staircase shuffle rule level by level.

    The ``n``-th occurrence of a level member is read as its copy in row
    ``n``.  Returns ``None`` when ``seq`` is full, else the first violation.
    """
    eta = eta.exchange_only()
    positions: dict[int, list[int]] = {v: [] for v in eta.domain}
    for pos, k in enumerate(seq):
        if k not in positions:
            return FullnessViolation(FullnessKind.UNKNOWN_VERTEX, None, k,
                                     f"{k} at position {pos + 1} is not a layered vertex")
        positions[k].append(pos)
    for t in eta.levels():
        members = eta.members(t)
        ell = len(members)
        for i, v in enumerate(members, 1):
            want = ell + 1 - i
            if len(positions[v]) != want:
                return FullnessViolation(FullnessKind.COUNT, t, v,
                                         f"{v} occurs {len(positions[v])} times, expected {want}")
        for i, v in enumerate(members, 1):
            occ = positions[v]
            for n in range(1, len(occ) + 1):
                # row n reads j_1, ..., j_{ell-n+1} in order
                if i >= 2 and not positions[members[i - 2]][n - 1] < occ[n - 1]:
                    return FullnessViolation(
                        FullnessKind.ROW_ORDER, t, v,
                        f"copy {n} of {v} precedes copy {n} of {members[i - 2]}")
                if n >= 2 and i + 1 <= ell - n + 2:
                    before = positions[members[i]][n - 2]
                    if not before < occ[n - 1]:
                        return FullnessViolation(
                            FullnessKind.CROSS_ROW, t, v,
                            f"copy {n} of {v} precedes copy {n - 1} of {members[i]}")
    return None


def expected_length(eta: Layering) -> int:
    """Sum over levels of ``l(l + 1) / 2``, ``l`` the exchangeable level size."""
    ex = eta.exchange_only()
    return sum(len(ex.members(t)) * (len(ex.members(t)) + 1) // 2 for t in ex.levels())


def enumerate_full_shuffles(eta: Layering, limit: int | None = None) -> Iterator[tuple]:
    """Full shuffles in lexicographic order, at most ``limit`` of them.

    Backtracking over linear extensions of the per-level staircase posets,
    interleaved freely across levels.
    """
    if limit is not None and limit < 1:
        raise ValueError("limit must be at least 1")
    eta = eta.exchange_only()
    order = sorted(eta.domain)
    rank = {}
    size = {}
    for t in eta.levels():
        members = eta.members(t)
        for i, v in enumerate(members):
            rank[v] = i
            size[v] = len(members)
    used = {v: 0 for v in order}
    total = expected_length(eta)
    members_of = {v: eta.members(eta(v)) for v in order}
    prefix: list[int] = []
    emitted = 0

    def allowed(v: int) -> bool:
        i, ell, n = rank[v], size[v], used[v] + 1
        if n > ell - i:
            return False
        members = members_of[v]
        if i >= 1 and used[members[i - 1]] < n:
            return False
        if n >= 2 and i + 1 < ell and used[members[i + 1]] < n - 1:
            return False
        return True

    def walk() -> Iterator[tuple]:
        nonlocal emitted
        if len(prefix) == total:
            emitted += 1
            yield tuple(prefix)
            return
        for v in order:
            if limit is not None and emitted >= limit:
                return
            if allowed(v):
                used[v] += 1
                prefix.append(v)
                yield from walk()
                prefix.pop()
                used[v] -= 1

    yield from walk()


def chain_quiver(S: Sequence[int]) -> ValuedIceQuiver:
    """``s_1 <- s_2 <- ... <- s_n`` with simple arrows."""
    S = tuple(S)
    if not S:
        raise ValueError("chain needs at least one vertex")
    return ValuedIceQuiver(S, (), tuple(ValuedArrow(S[a + 1], S[a]) for a in range(len(S) - 1)))


def layered_chain_quiver(eta: Layering) -> ValuedIceQuiver:
    """Disjoint union of the chains on each level's exchangeable members."""
    eta = eta.exchange_only()
    arrows = []
    for t in eta.levels():
        m = eta.members(t)
        arrows.extend(ValuedArrow(m[a + 1], m[a]) for a in range(len(m) - 1))
    return ValuedIceQuiver(eta.domain, (), tuple(arrows))
