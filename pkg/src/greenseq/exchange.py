"""Exchange matrices, mutation and c-vector bookkeeping.

Matrices are stored as immutable tuples of Python ints (arbitrary precision),
rows ordered ``ex + fr`` and columns ordered ``ex``.  Vertex labels are
positive ints; the primed copies added by framing are :class:`Prime` labels.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass, field
from fractions import Fraction
from math import gcd, lcm
from typing import Iterable, Sequence, Union


class GreenSeqError(Exception):
    """Base class for every error raised by this package."""


class NotSkewSymmetrizable(GreenSeqError):
    pass


class FrozenMutation(GreenSeqError):
    pass


class HasFrozen(GreenSeqError):
    pass


class InvalidMatrix(GreenSeqError):
    pass


class SignIncoherent(GreenSeqError):
    """A c-vector with mixed signs (or the zero vector) was encountered.

    Never raised on a state reached by mutating a freshly framed matrix;
    seeing it means corrupted input or a bug.
    """


class MutationStepError(GreenSeqError):
    """Wraps an error raised while applying step ``step`` (1-based)."""

    def __init__(self, step: int, vertex, cause: Exception):
        super().__init__(f"step {step} (vertex {vertex}): {cause}")
        self.step = step
        self.vertex = vertex
        self.cause = cause


@dataclass(frozen=True, order=True)
class Prime:
    """The primed copy ``i'`` of an exchangeable vertex ``i``."""

    base: int

    def __str__(self) -> str:
        return f"{self.base}'"

    def __repr__(self) -> str:
        return f"Prime({self.base})"


Vertex = Union[int, Prime]


def vertex_key(v: Vertex) -> tuple[int, int]:
    """Sort key placing plain labels before primed ones."""
    if isinstance(v, Prime):
        return (1, v.base)
    return (0, v)


def format_vertex(v: Vertex) -> str:
    return str(v)


def parse_vertex(text: str | int) -> Vertex:
    if isinstance(text, int):
        return text
    text = text.strip()
    if text.endswith("'"):
        return Prime(int(text[:-1]))
    return int(text)


@dataclass(frozen=True)
class ExchangeMatrix:
    """Integer matrix over ``(ex + fr) x ex`` with skew-symmetrizable principal part.

    >>> B = ExchangeMatrix.from_rows([[0, 1], [-2, 0]])
    >>> B.symmetrizer
    {1: 2, 2: 1}
    """

    ex: tuple
    fr: tuple
    rows: tuple
    _symmetrizer: dict = field(default=None, repr=False, compare=False, hash=False)

    def __post_init__(self):
        ex = tuple(self.ex)
        fr = tuple(self.fr)
        rows = tuple(tuple(int(x) for x in row) for row in self.rows)
        object.__setattr__(self, "ex", ex)
        object.__setattr__(self, "fr", fr)
        object.__setattr__(self, "rows", rows)
        labels = ex + fr
        if len(set(labels)) != len(labels):
            raise InvalidMatrix(f"duplicate vertex labels in {labels}")
        if len(rows) != len(labels):
            raise InvalidMatrix(f"expected {len(labels)} rows, got {len(rows)}")
        for label, row in zip(labels, rows):
            if len(row) != len(ex):
                raise InvalidMatrix(f"row {label} has {len(row)} entries, expected {len(ex)}")
        for a, i in enumerate(ex):
            if rows[a][a] != 0:
                raise InvalidMatrix(f"diagonal entry b_{i}{i} = {rows[a][a]} is not zero")
        object.__setattr__(self, "_rows_at", {v: a for a, v in enumerate(labels)})
        if self._symmetrizer is None:
            object.__setattr__(self, "_symmetrizer", _solve_symmetrizer(ex, rows))

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence[int]], ex: Iterable | None = None,
                  fr: Iterable = ()) -> "ExchangeMatrix":
        """Build from a row list; labels default to ``1..n`` for the columns."""
        rows = [list(r) for r in rows]
        if ex is None:
            n = len(rows[0]) if rows else 0
            ex = range(1, n + 1)
        return cls(tuple(ex), tuple(fr), tuple(tuple(r) for r in rows))

    @property
    def labels(self) -> tuple:
        return self.ex + self.fr

    @property
    def symmetrizer(self) -> dict:
        return dict(self._symmetrizer)

    def row_index(self, label) -> int:
        try:
            return self._rows_at[label]
        except KeyError:
            raise KeyError(f"unknown vertex {label!r}") from None

    def col_index(self, label) -> int:
        # exchangeable labels come first, so row and column positions agree
        a = self._rows_at.get(label)
        if a is None or a >= len(self.ex):
            raise KeyError(f"{label!r} is not exchangeable")
        return a

    def entry(self, i, j) -> int:
        return self.rows[self.row_index(i)][self.col_index(j)]

    def column(self, j) -> tuple:
        c = self.col_index(j)
        return tuple(row[c] for row in self.rows)

    @property
    def principal(self) -> tuple:
        return self.rows[: len(self.ex)]

    def principal_part(self) -> "ExchangeMatrix":
        return ExchangeMatrix(self.ex, (), self.principal, self._symmetrizer)

    def restrict(self, keep: Iterable) -> "ExchangeMatrix":
        """Full submatrix on the exchangeable labels in ``keep`` (frozen rows dropped)."""
        keep = set(keep)
        idx = [a for a, i in enumerate(self.ex) if i in keep]
        rows = tuple(tuple(self.rows[a][b] for b in idx) for a in idx)
        return ExchangeMatrix(tuple(self.ex[a] for a in idx), (), rows)

    def __str__(self) -> str:
        width = max((len(str(x)) for row in self.rows for x in row), default=1)
        lines = []
        for label, row in zip(self.labels, self.rows):
            cells = " ".join(str(x).rjust(width) for x in row)
            lines.append(f"{format_vertex(label):>4} [{cells}]")
        return "\n".join(lines)


def _solve_symmetrizer(ex: tuple, rows: tuple) -> dict:
    n = len(ex)
    ratio: list[Fraction | None] = [None] * n
    for start in range(n):
        if ratio[start] is not None:
            continue
        ratio[start] = Fraction(1)
        component = [start]
        stack = [start]
        while stack:
            a = stack.pop()
            for b in range(n):
                bab, bba = rows[a][b], rows[b][a]
                if bab == 0 and bba == 0:
                    continue
                if bab == 0 or bba == 0 or (bab > 0) == (bba > 0):
                    raise NotSkewSymmetrizable(
                        f"b_{ex[a]}{ex[b]} = {bab} and b_{ex[b]}{ex[a]} = {bba} "
                        "are not of strictly opposite signs")
                # d_a * b_ab = -d_b * b_ba
                want = ratio[a] * Fraction(bab, -bba)
                if ratio[b] is None:
                    ratio[b] = want
                    component.append(b)
                    stack.append(b)
                elif ratio[b] != want:
                    raise NotSkewSymmetrizable(
                        f"inconsistent ratios around vertex {ex[b]}")
        scale = lcm(*(ratio[a].denominator for a in component))
        ints = [int(ratio[a] * scale) for a in component]
        g = gcd(*ints)
        for a, v in zip(component, ints):
            ratio[a] = Fraction(v // g)
    return {ex[a]: int(ratio[a]) for a in range(n)}


def compute_symmetrizer(B: ExchangeMatrix) -> dict:
    """Minimal positive integer ``d`` with ``d_i b_ij = -d_j b_ji`` on ``ex x ex``.

    Each connected component is reduced to gcd 1, which makes the global gcd 1.

    >>> compute_symmetrizer(ExchangeMatrix.from_rows([[0, 1], [-2, 0]]))
    {1: 2, 2: 1}
    """
    return _solve_symmetrizer(B.ex, B.rows)


def _mutate_rows(rows: Sequence[Sequence[int]], c: int, r: int | None = None) -> tuple:
    """Mutate in column index ``c``; ``r`` is the matching row index (defaults to ``c``)."""
    r = c if r is None else r
    pivot_row = rows[r]
    out = []
    for a, row in enumerate(rows):
        if a == r:
            out.append(tuple(-x for x in row))
            continue
        bik = row[c]
        if bik == 0:
            new = list(row)
        else:
            abs_bik = abs(bik)
            new = []
            for b, x in enumerate(row):
                bkj = pivot_row[b]
                if b == c or bkj == 0:
                    new.append(x)
                else:
                    new.append(x + (abs_bik * bkj + bik * abs(bkj)) // 2)
        new[c] = -row[c]
        out.append(tuple(new))
    return tuple(out)


def mutate(B: ExchangeMatrix, k) -> ExchangeMatrix:
    """Matrix mutation in direction ``k``; frozen rows follow the same rule.

    >>> B = ExchangeMatrix.from_rows([[0, 2, -1], [-2, 0, 1], [1, -1, 0]])
    >>> mutate(B, 3).rows
    ((0, 1, 1), (-1, 0, -1), (-1, 1, 0))
    """
    if k in B.fr:
        raise FrozenMutation(f"cannot mutate at frozen vertex {k}")
    if k not in B.ex:
        raise KeyError(f"unknown vertex {k!r}")
    c = B.ex.index(k)
    # the symmetrizer is mutation invariant
    return ExchangeMatrix(B.ex, B.fr, _mutate_rows(B.rows, c), B._symmetrizer)


def mutate_sequence(B: ExchangeMatrix, seq: Iterable) -> ExchangeMatrix:
    for step, k in enumerate(seq, 1):
        try:
            B = mutate(B, k)
        except (GreenSeqError, KeyError) as exc:
            raise MutationStepError(step, k, exc) from exc
    return B


class Color(enum.Enum):
    GREEN = "green"
    RED = "red"


@dataclass(frozen=True)
class FramedState:
    """Framed matrix plus the mutations applied so far.

    ``bhat`` stacks ``B`` over ``-Id`` on rows ``ex'``: under the
    ``b_ij > 0 <=> i -> j`` encoding that is the framed quiver with arrows
    ``i -> i'``.  The c-vector of ``j`` counts arrows ``j -> i'`` minus
    ``i' -> j``, i.e. it is the negated ``ex'`` part of column ``j``; it starts
    as the ``j``-th unit vector.
    """

    bhat: ExchangeMatrix
    history: tuple = ()
    origin: ExchangeMatrix | None = None

    @property
    def ex(self) -> tuple:
        return self.bhat.ex

    @property
    def principal(self) -> ExchangeMatrix:
        return self.bhat.principal_part()

    def c_matrix(self) -> tuple:
        """Rows ``ex'``, columns ``ex``; column ``j`` is the c-vector of ``j``."""
        return tuple(tuple(-x for x in row) for row in self.bhat.rows[len(self.bhat.ex):])

    def mutate(self, k) -> "FramedState":
        state = FramedState(mutate(self.bhat, k), self.history + (k,), self.origin)
        state.check_sign_coherence()
        return state

    def check_sign_coherence(self) -> None:
        for j in self.ex:
            _color_of(c_vector(self, j), j)

    def colors(self) -> dict:
        return {j: classify(self, j) for j in self.ex}


def frame(B: ExchangeMatrix) -> FramedState:
    """Add a frozen copy ``i'`` of every vertex with an arrow ``i -> i'``.

    >>> frame(ExchangeMatrix.from_rows([[0]])).bhat.rows
    ((0,), (-1,))
    """
    if B.fr:
        raise HasFrozen(f"cannot frame a matrix with frozen rows {B.fr}")
    n = len(B.ex)
    block = tuple(tuple(-int(a == b) for b in range(n)) for a in range(n))
    bhat = ExchangeMatrix(B.ex, tuple(Prime(i) for i in B.ex), B.rows + block,
                          B._symmetrizer)
    return FramedState(bhat, (), B)


def c_vector(s: FramedState, j) -> tuple:
    c = s.bhat.col_index(j)
    return tuple(-row[c] for row in s.bhat.rows[len(s.bhat.ex):])


def _color_of(vec: Sequence[int], j) -> Color:
    nonneg = all(x >= 0 for x in vec)
    nonpos = all(x <= 0 for x in vec)
    if nonneg and nonpos:
        raise SignIncoherent(f"c-vector of {j} is zero")
    if nonneg:
        return Color.GREEN
    if nonpos:
        return Color.RED
    raise SignIncoherent(f"c-vector of {j} has mixed signs: {list(vec)}")


def classify(s: FramedState, j) -> Color:
    return _color_of(c_vector(s, j), j)


def run_sequence(B: ExchangeMatrix, seq: Iterable) -> list[FramedState]:
    """Frame ``B`` and mutate along ``seq``; returns all ``len(seq) + 1`` states."""
    traj = [frame(B)]
    for step, k in enumerate(seq, 1):
        try:
            traj.append(traj[-1].mutate(k))
        except (GreenSeqError, KeyError) as exc:
            raise MutationStepError(step, k, exc) from exc
    return traj


class VerdictKind(enum.Enum):
    MAXIMAL_GREEN = "MAXIMAL_GREEN"
    GREEN_SEQ = "GREEN_SEQ"
    REDDENING = "REDDENING"
    NOT_GREEN = "NOT_GREEN"
    NOT_REDDENING = "NOT_REDDENING"


@dataclass(frozen=True)
class Verdict:
    """Classification of a mutation sequence.

    ``step`` is the 1-based index of the first mutation at a red vertex,
    ``vertex`` the first vertex still green at the end (when not reddening).
    """

    kind: VerdictKind
    length: int
    green: bool
    reddening: bool
    step: int | None = None
    vertex: Vertex | None = None

    def line(self) -> str:
        parts = [self.kind.value]
        if self.kind is VerdictKind.NOT_GREEN:
            parts.append(f"step={self.step}")
        elif self.kind in (VerdictKind.NOT_REDDENING, VerdictKind.GREEN_SEQ):
            parts.append(f"vertex={self.vertex}")
        parts.append(f"length={self.length}")
        return " ".join(parts)

    def to_dict(self) -> dict:
        return {"kind": self.kind.value, "length": self.length, "green": self.green,
                "reddening": self.reddening, "step": self.step,
                "vertex": None if self.vertex is None else format_vertex(self.vertex)}


def verdict_from_trajectory(traj: Sequence[FramedState], seq: Sequence) -> Verdict:
    first_red_step = None
    for step, (state, k) in enumerate(zip(traj, seq), 1):
        if classify(state, k) is Color.RED:
            first_red_step = step
            break
    final = traj[-1]
    still_green = [j for j in final.ex if classify(final, j) is Color.GREEN]
    green = first_red_step is None
    reddening = not still_green
    n = len(seq)
    if green and reddening:
        kind = VerdictKind.MAXIMAL_GREEN
    elif reddening:
        kind = VerdictKind.REDDENING
    elif not green:
        kind = VerdictKind.NOT_GREEN
    elif n == 0:
        kind = VerdictKind.NOT_REDDENING
    else:
        kind = VerdictKind.GREEN_SEQ
    return Verdict(kind, n, green, reddening, first_red_step,
                   still_green[0] if still_green else None)


def verdict(B: ExchangeMatrix, seq: Sequence) -> Verdict:
    """Green / maximal green / reddening classification of ``seq`` for ``B``.

    >>> A3 = ExchangeMatrix.from_rows([[0, -1, 0], [1, 0, -1], [0, 1, 0]])
    >>> verdict(A3, [1, 2, 3, 1, 2, 1]).kind
    <VerdictKind.MAXIMAL_GREEN: 'MAXIMAL_GREEN'>
    """
    seq = list(seq)
    return verdict_from_trajectory(run_sequence(B, seq), seq)


def permutation_equivalent(B1: ExchangeMatrix, B2: ExchangeMatrix) -> dict | None:
    """Find a relabeling ``p`` of ``ex`` with ``B2[p(i), p(j)] == B1[i, j]``.

    Backtracking search over the principal parts; returns ``None`` if none exists.
    """
    if len(B1.ex) != len(B2.ex):
        return None
    P1, P2 = B1.principal, B2.principal
    n = len(P1)
    assign: list[int] = []
    used = [False] * n

    def extend(a: int) -> bool:
        if a == n:
            return True
        for b in range(n):
            if used[b]:
                continue
            if all(P2[b][assign[c]] == P1[a][c] and P2[assign[c]][b] == P1[c][a]
                   for c in range(a)):
                used[b] = True
                assign.append(b)
                if extend(a + 1):
                    return True
                assign.pop()
                used[b] = False
        return False

    if not extend(0):
        return None
    return {B1.ex[a]: B2.ex[assign[a]] for a in range(n)}
