"""Valued ice quivers: the graphical encoding of exchange matrices."""
from __future__ import annotations

import warnings
from dataclasses import dataclass
from typing import Iterable, Mapping

from .exchange import (
    ExchangeMatrix,
    FrozenMutation,
    GreenSeqError,
    NotSkewSymmetrizable,
    format_vertex,
    mutate,
    vertex_key,
)


class InvalidQuiver(GreenSeqError):
    pass


class UnknownLevel(GreenSeqError):
    pass


@dataclass(frozen=True, order=True)
class ValuedArrow:
    """Arrow ``src -> dst`` labelled ``(v_src_dst, v_dst_src)``."""

    src: object
    dst: object
    labels: tuple = (1, 1)

    @property
    def simple(self) -> bool:
        return self.labels == (1, 1)


def _arrow_key(a: ValuedArrow):
    return (vertex_key(a.src), vertex_key(a.dst))


@dataclass(frozen=True)
class ValuedIceQuiver:
    ex: tuple
    fr: tuple
    arrows: tuple

    def __post_init__(self):
        ex, fr = tuple(self.ex), tuple(self.fr)
        labels = ex + fr
        if len(set(labels)) != len(labels):
            raise InvalidQuiver(f"duplicate vertex labels in {labels}")
        frozen = set(fr)
        everything = set(labels)
        kept = []
        seen = set()
        for a in self.arrows:
            if not isinstance(a, ValuedArrow):
                a = ValuedArrow(*a)
            a = ValuedArrow(a.src, a.dst, tuple(int(x) for x in a.labels))
            if a.src not in everything or a.dst not in everything:
                raise InvalidQuiver(f"arrow {a} touches an unknown vertex")
            if a.src == a.dst:
                raise InvalidQuiver(f"loop at {a.src}")
            if len(a.labels) != 2 or min(a.labels) <= 0:
                raise InvalidQuiver(f"arrow {a} needs two positive labels")
            if a.src in frozen and a.dst in frozen:
                warnings.warn(f"dropping arrow {a} between frozen vertices", stacklevel=3)
                continue
            if (a.src in frozen or a.dst in frozen) and a.labels[0] != a.labels[1]:
                raise InvalidQuiver(f"arrow {a} touches a frozen vertex but has unequal labels")
            pair = frozenset((a.src, a.dst))
            if pair in seen:
                raise InvalidQuiver(f"more than one arrow between {a.src} and {a.dst}")
            seen.add(pair)
            kept.append(a)
        object.__setattr__(self, "ex", ex)
        object.__setattr__(self, "fr", fr)
        object.__setattr__(self, "arrows", tuple(sorted(kept, key=_arrow_key)))

    @classmethod
    def _trusted(cls, ex: tuple, fr: tuple, arrows: list) -> "ValuedIceQuiver":
        # arrows known to be valid (decoded from a matrix): skip the checks
        Q = object.__new__(cls)
        object.__setattr__(Q, "ex", tuple(ex))
        object.__setattr__(Q, "fr", tuple(fr))
        object.__setattr__(Q, "arrows", tuple(sorted(arrows, key=_arrow_key)))
        return Q

    @property
    def vertices(self) -> tuple:
        return self.ex + self.fr

    def arrow_map(self) -> dict:
        return {(a.src, a.dst): a.labels for a in self.arrows}

    def incoming(self, v) -> list[ValuedArrow]:
        return [a for a in self.arrows if a.dst == v]

    def outgoing(self, v) -> list[ValuedArrow]:
        return [a for a in self.arrows if a.src == v]

    def subquiver(self, keep: Iterable) -> "ValuedIceQuiver":
        """Full valued subquiver on ``keep``."""
        keep = set(keep)
        return ValuedIceQuiver(
            tuple(v for v in self.ex if v in keep),
            tuple(v for v in self.fr if v in keep),
            tuple(a for a in self.arrows if a.src in keep and a.dst in keep),
        )


def same_quiver(Q1: ValuedIceQuiver, Q2: ValuedIceQuiver) -> bool:
    """Label-preserving equality, ignoring the stored vertex order."""
    return (set(Q1.ex) == set(Q2.ex) and set(Q1.fr) == set(Q2.fr)
            and set(Q1.arrows) == set(Q2.arrows))


def to_quiver(B: ExchangeMatrix) -> ValuedIceQuiver:
    """Arrow ``i -> j`` labelled ``(b_ij, -b_ji)`` exactly when ``b_ij > 0``."""
    n = len(B.ex)
    arrows = []
    for a in range(n):
        for b in range(n):
            x = B.rows[a][b]
            if x > 0:
                arrows.append(ValuedArrow(B.ex[a], B.ex[b], (x, -B.rows[b][a])))
    for a, f in enumerate(B.fr, n):
        for b, j in enumerate(B.ex):
            x = B.rows[a][b]
            if x > 0:
                arrows.append(ValuedArrow(f, j, (x, x)))
            elif x < 0:
                arrows.append(ValuedArrow(j, f, (-x, -x)))
    return ValuedIceQuiver._trusted(B.ex, B.fr, arrows)


def to_matrix(Q: ValuedIceQuiver) -> ExchangeMatrix:
    """Inverse of :func:`to_quiver`; raises :class:`InvalidQuiver` without a symmetrizer."""
    labels = Q.ex + Q.fr
    row = {v: a for a, v in enumerate(labels)}
    col = {v: b for b, v in enumerate(Q.ex)}
    rows = [[0] * len(Q.ex) for _ in labels]
    for arr in Q.arrows:
        fwd, back = arr.labels
        if arr.dst in col:
            rows[row[arr.src]][col[arr.dst]] = fwd
        if arr.src in col:
            rows[row[arr.dst]][col[arr.src]] = -back
    try:
        return ExchangeMatrix(Q.ex, Q.fr, tuple(tuple(r) for r in rows))
    except NotSkewSymmetrizable as exc:
        raise InvalidQuiver(f"no symmetrizer for the quiver labels: {exc}") from exc


def _signed(pairs: Mapping, i, j) -> tuple[int, int]:
    """Matrix-style pair ``(b_ij, b_ji)`` read from an arrow map."""
    if (i, j) in pairs:
        fwd, back = pairs[(i, j)]
        return fwd, -back
    if (j, i) in pairs:
        fwd, back = pairs[(j, i)]
        return -back, fwd
    return 0, 0


def mutate_quiver(Q: ValuedIceQuiver, k) -> ValuedIceQuiver:
    """Three-step quiver mutation at ``k``.

    1. reverse every arrow at ``k`` (labels swap with the direction);
    2. for each 2-path ``i -> k -> j`` with ``i`` or ``j`` exchangeable, add
       ``i -> j`` labelled ``(v_ik * v_kj, v_ki * v_jk)`` (both labels read
       off the frozen side when an end is frozen);
    3. cancel opposite arrows by summing in the signed (matrix) encoding.
    """
    if k in Q.fr:
        raise FrozenMutation(f"cannot mutate at frozen vertex {k}")
    if k not in Q.ex:
        raise KeyError(f"unknown vertex {k!r}")
    frozen = set(Q.fr)
    pairs = dict(Q.arrow_map())
    into = [(a.src, a.labels) for a in Q.arrows if a.dst == k]
    out = [(a.dst, a.labels) for a in Q.arrows if a.src == k]

    for i, _ in into:
        del pairs[(i, k)]
    for j, _ in out:
        del pairs[(k, j)]

    added: dict = {}
    for i, (v_ik, v_ki) in into:
        for j, (v_kj, v_jk) in out:
            if i in frozen and j in frozen:
                continue
            # a frozen end has no column of its own: the matrix entry on its
            # row fixes both labels
            if i in frozen:
                f = b = v_ik * v_kj
            elif j in frozen:
                f = b = v_ki * v_jk
            else:
                f, b = v_ik * v_kj, v_ki * v_jk
            fwd, back = added.get((i, j), (0, 0))
            added[(i, j)] = (fwd + f, back + b)

    for (i, j), (fwd, back) in added.items():
        bij, bji = _signed(pairs, i, j)
        bij += fwd
        bji -= back
        pairs.pop((i, j), None)
        pairs.pop((j, i), None)
        if bij > 0:
            pairs[(i, j)] = (bij, -bji)
        elif bij < 0:
            pairs[(j, i)] = (bji, -bij)
        elif bji != 0:
            raise InvalidQuiver(f"cancellation between {i} and {j} left a one-sided arrow")

    for i, labels in into:
        pairs[(k, i)] = (labels[1], labels[0])
    for j, labels in out:
        pairs[(j, k)] = (labels[1], labels[0])

    return ValuedIceQuiver(Q.ex, Q.fr,
                           tuple(ValuedArrow(s, d, v) for (s, d), v in pairs.items()))


def mutate_quiver_via_matrix(Q: ValuedIceQuiver, k) -> ValuedIceQuiver:
    """Oracle route: encode, mutate the matrix, decode."""
    return to_quiver(mutate(to_matrix(Q), k))


def truncate(Q: ValuedIceQuiver, eta, t) -> ValuedIceQuiver:
    """Full subquiver on level ``t`` together with the primed copies present in ``Q``."""
    from .exchange import Prime

    if t not in eta.levels():
        raise UnknownLevel(f"level {t} is not in the range of eta")
    members = {v for v in Q.vertices if not isinstance(v, Prime) and v in eta.eta
               and eta.eta[v] == t}
    keep = members | {v for v in Q.vertices if isinstance(v, Prime) and v.base in members}
    return Q.subquiver(keep)


def _dot_id(v) -> str:
    return '"%s"' % format_vertex(v)


def export_dot(Q: ValuedIceQuiver, layout=None) -> str:
    """Deterministic Graphviz text; frozen vertices are boxes.

    With a layering, nodes of one level share a rank and are ordered by
    ``(level, label)``.
    """
    from .exchange import Prime

    def level(v):
        base = v.base if isinstance(v, Prime) else v
        if layout is None or base not in layout.eta:
            return None
        return layout.eta[base]

    def order(v):
        lv = level(v)
        return (lv is None, lv if lv is not None else 0, vertex_key(v))

    frozen = set(Q.fr)
    lines = ["digraph Q {", "  rankdir=BT;"]
    nodes = sorted(Q.vertices, key=order)
    for v in nodes:
        shape = "box" if v in frozen else "circle"
        lines.append(f'  {_dot_id(v)} [label="{format_vertex(v)}", shape={shape}];')
    if layout is not None:
        by_level: dict = {}
        for v in nodes:
            lv = level(v)
            if lv is not None and v not in frozen:
                by_level.setdefault(lv, []).append(v)
        for lv in sorted(by_level):
            members = " ".join(_dot_id(v) for v in by_level[lv])
            lines.append(f"  {{ rank=same; {members} }}")
    for a in Q.arrows:
        attrs = ""
        if a.labels != (1, 1):
            attrs = f' [label="({a.labels[0]},{a.labels[1]})"]'
        lines.append(f"  {_dot_id(a.src)} -> {_dot_id(a.dst)}{attrs};")
    lines.append("}")
    return "\n".join(lines) + "\n"
