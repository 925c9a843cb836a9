"""Instance-level certification of layered T-systems and contiguous-path sequences."""
from __future__ import annotations

import hashlib
import json
import math
import random
from dataclasses import dataclass, field
from itertools import combinations
from typing import Iterator, Sequence

from .exchange import (
    Color,
    ExchangeMatrix,
    GreenSeqError,
    Prime,
    VerdictKind,
    classify,
    frame,
    mutate,
    run_sequence,
    verdict_from_trajectory,
)
from .layering import (
    FullnessViolation,
    LayeredViolation,
    Layering,
    Mode,
    check_layered_step,
    chain_quiver,
    enumerate_full_shuffles,
    expected_length,
    is_full,
    layered_chain_quiver,
)
from .io import layering_from_doc, matrix_from_doc, matrix_to_doc, path_from_doc
from .permpath import ContiguousPath, enumerate_contiguous_paths, seq_from_path
from .quiver import ValuedArrow, ValuedIceQuiver, to_matrix, to_quiver

SCHEMA_VERSION = 1


class CounterexampleError(GreenSeqError):
    """A run whose hypotheses all hold but whose verdict is not maximal green."""

    def __init__(self, certificate: "Certificate"):
        super().__init__(f"hypotheses hold but verdict is {certificate.verdict.kind.value} "
                         f"(instance {certificate.digest[:12]})")
        self.certificate = certificate


class PreconditionError(GreenSeqError):
    pass


def instance_digest(B: ExchangeMatrix, eta: Layering, seq: Sequence) -> str:
    payload = {"matrix": matrix_to_doc(B), "eta": eta.to_doc(), "seq": list(seq)}
    text = json.dumps(payload, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(text.encode()).hexdigest()


@dataclass(frozen=True)
class StepRecord:
    index: int
    vertex: int
    color: Color
    layered: LayeredViolation | None

    def to_dict(self) -> dict:
        return {"index": self.index, "vertex": self.vertex, "color": self.color.value,
                "layered": None if self.layered is None else self.layered.to_dict()}


@dataclass(frozen=True)
class TruncationRecord:
    prefix: int
    level: int
    part_a: bool
    part_b: bool

    @property
    def ok(self) -> bool:
        return self.part_a and self.part_b


@dataclass
class Certificate:
    digest: str
    sequence: tuple
    steps: list
    fullness: FullnessViolation | None
    verdict: object
    expected_length: int
    truncations: list = field(default_factory=list)

    @property
    def layered(self) -> bool:
        return all(s.layered is None for s in self.steps)

    @property
    def full(self) -> bool:
        return self.fullness is None

    @property
    def hypotheses_hold(self) -> bool:
        return self.layered and self.full

    @property
    def maximal_green(self) -> bool:
        return self.verdict.kind is VerdictKind.MAXIMAL_GREEN

    @property
    def counterexample(self) -> bool:
        return self.hypotheses_hold and not self.maximal_green

    @property
    def truncations_ok(self) -> bool:
        return all(r.ok for r in self.truncations)

    def first_layered_violation(self) -> LayeredViolation | None:
        return next((s.layered for s in self.steps if s.layered is not None), None)

    def to_dict(self) -> dict:
        return {
            "schema": SCHEMA_VERSION,
            "digest": self.digest,
            "sequence": list(self.sequence),
            "steps": [s.to_dict() for s in self.steps],
            "full": self.full,
            "fullness": None if self.fullness is None else self.fullness.to_dict(),
            "layered": self.layered,
            "expected_length": self.expected_length,
            "verdict": self.verdict.to_dict(),
            "truncations": [
                {"prefix": r.prefix, "level": r.level, "a": r.part_a, "b": r.part_b}
                for r in self.truncations],
        }


def _check_exchange_layering(B: ExchangeMatrix, eta: Layering) -> Layering:
    if B.fr:
        raise PreconditionError("matrix must have no frozen rows")
    eta = eta.exchange_only()
    if set(eta.domain) != set(B.ex):
        raise PreconditionError(f"layering covers {sorted(eta.domain)}, matrix has {sorted(B.ex)}")
    return eta


def verify_theorem_b(B: ExchangeMatrix, eta: Layering, seq: Sequence[int],
                     truncations: bool = False, strict: bool = True) -> Certificate:
    """Run ``seq`` on the framed ``B`` with layered checks at every step.

    When every check passes and ``seq`` is full the verdict must be maximal
    green; otherwise :class:`CounterexampleError` is raised (if ``strict``).
    """
    eta = _check_exchange_layering(B, eta)
    seq = tuple(seq)
    traj = run_sequence(B, seq)
    steps = []
    for i, k in enumerate(seq, 1):
        state = traj[i - 1]
        Q = to_quiver(state.principal)
        steps.append(StepRecord(i, k, classify(state, k), check_layered_step(Q, k, eta, i)))
    cert = Certificate(
        digest=instance_digest(B, eta, seq),
        sequence=seq,
        steps=steps,
        fullness=is_full(seq, eta),
        verdict=verdict_from_trajectory(traj, seq),
        expected_length=expected_length(eta),
    )
    if truncations:
        cert.truncations = _truncation_records(traj, eta, seq)
    if strict and cert.counterexample:
        raise CounterexampleError(cert)
    return cert


def _truncation_records(traj, eta: Layering, seq: Sequence[int]) -> list[TruncationRecord]:
    # Works on matrix blocks: the quiver encoding is a bijection, so comparing
    # the level block of the framed matrix with the reference block is the
    # same as comparing the truncated quivers.
    levels = eta.levels()
    reference = {t: frame(to_matrix(chain_quiver(eta.members(t)))) for t in levels}
    first = traj[0].bhat
    layout = {}
    for t in levels:
        members = eta.members(t)
        rows = [first.row_index(v) for v in members] + \
               [first.row_index(Prime(v)) for v in members]
        cols = [first.col_index(v) for v in members]
        outside = [first.col_index(j) for j in first.ex if eta(j) != t]
        layout[t] = (rows, cols, rows[len(members):], outside)
    records = []
    for i, state in enumerate(traj):
        if i > 0:
            k = seq[i - 1]
            reference[eta(k)] = reference[eta(k)].mutate(k)
        bhat = state.bhat.rows
        for t in levels:
            rows, cols, prime_rows, outside = layout[t]
            part_a = all(bhat[r][c] == 0 for r in prime_rows for c in outside)
            # reference rows are members then their primes, columns the members
            part_b = [tuple(bhat[r][c] for c in cols) for r in rows] == \
                list(reference[t].bhat.rows)
            records.append(TruncationRecord(i, t, part_a, part_b))
    return records


def verify_truncations(B: ExchangeMatrix, eta: Layering,
                       seq: Sequence[int]) -> list[TruncationRecord]:
    """Per prefix and level: no cross-level arrows to primed vertices, and the
    level truncation equals the independently mutated framed chain."""
    eta = _check_exchange_layering(B, eta)
    seq = tuple(seq)
    return _truncation_records(run_sequence(B, seq), eta, seq)


@dataclass(frozen=True)
class LemmaResult:
    ok: bool
    witness: str | None = None


def _is_an_orientation(Q: ValuedIceQuiver, n: int) -> bool:
    edges = sorted(tuple(sorted((a.src, a.dst))) for a in Q.arrows)
    return edges == [(i, i + 1) for i in range(1, n)] and all(a.simple for a in Q.arrows)


def verify_an_lemma(n: int, seq: Sequence[int]) -> LemmaResult:
    """Every mutation of a full shuffle on the chain ``1 <- ... <- n`` is at a
    sink of an orientation of the A_n graph, and the framed run is maximal green."""
    seq = tuple(seq)
    eta = Layering.constant(range(1, n + 1))
    violation = is_full(seq, eta)
    if violation is not None:
        return LemmaResult(False, f"precondition: not full ({violation.detail})")
    B = to_matrix(chain_quiver(range(1, n + 1)))
    traj = run_sequence(B, seq)
    for i, k in enumerate(seq, 1):
        Q = to_quiver(traj[i - 1].principal)
        if not _is_an_orientation(Q, n):
            return LemmaResult(False, f"step {i}: quiver is not an orientation of A_{n}")
        if Q.outgoing(k):
            return LemmaResult(False, f"step {i}: vertex {k} is not a sink")
    if not _is_an_orientation(to_quiver(traj[-1].principal), n):
        return LemmaResult(False, f"final quiver is not an orientation of A_{n}")
    v = verdict_from_trajectory(traj, seq)
    if v.kind is not VerdictKind.MAXIMAL_GREEN:
        return LemmaResult(False, f"framed run is {v.kind.value}")
    return LemmaResult(True)


def chain_matrix(eta: Layering) -> ExchangeMatrix:
    """Default initial matrix: within-level chains on the exchangeable vertices."""
    return to_matrix(layered_chain_quiver(eta))


def verify_theorem_a(B: ExchangeMatrix | None, eta: Layering, path: ContiguousPath,
                     truncations: bool = False) -> Certificate:
    """Build the path sequence, check it is full of the predicted length, and
    certify it through :func:`verify_theorem_b`."""
    if eta.mode is not Mode.FULL:
        raise PreconditionError("path certification needs a full-mode layering on [1, N]")
    seq = seq_from_path(path, eta)
    ex_eta = eta.exchange_only()
    if B is None:
        B = chain_matrix(eta)
    want = sum(len(eta.members(t)) * (len(eta.members(t)) - 1) // 2 for t in eta.levels())
    if len(seq) != want:
        raise AssertionError(f"sequence length {len(seq)} != {want}")
    violation = is_full(seq, ex_eta)
    if violation is not None:
        raise AssertionError(f"path sequence is not full: {violation.detail}")
    return verify_theorem_b(B, ex_eta, seq, truncations=truncations)


# -- instance families -------------------------------------------------------

FAMILIES = ("DisjointChains", "AcyclicFinest", "RandomLayered", "PathDerived")


@dataclass(frozen=True)
class InstanceFamily:
    kind: str
    n: int = 3
    level_sizes: tuple = ()
    density: float = 0.0
    seed: int = 0
    count: int = 10
    max_label: int = 3

    def __post_init__(self):
        if self.kind not in FAMILIES:
            raise ValueError(f"unknown family {self.kind!r}; expected one of {FAMILIES}")


@dataclass
class Instance:
    family: str
    B: ExchangeMatrix
    eta: Layering
    seq: tuple
    path: ContiguousPath | None = None
    layered_ok: bool | None = None

    @property
    def digest(self) -> str:
        return instance_digest(self.B, self.eta, self.seq)


def _blocks(sizes: Sequence[int]) -> list[list[int]]:
    out, start = [], 1
    for s in sizes:
        out.append(list(range(start, start + s)))
        start += s
    return out


def random_acyclic_quiver(n: int, rng: random.Random, max_label: int = 3,
                          density: float = 0.5) -> tuple[ValuedIceQuiver, list[int]]:
    """Random acyclic valued quiver on ``1..n`` and a topological order of it."""
    order = list(range(1, n + 1))
    rng.shuffle(order)
    d = {v: rng.choice((1, 2, 3)) for v in order}
    arrows = []
    for a, b in combinations(range(n), 2):
        if rng.random() >= density:
            continue
        i, j = order[a], order[b]
        # d_i * v_ij = d_j * v_ji
        g = math.lcm(d[i], d[j])
        base = (g // d[i], g // d[j])
        mults = [m for m in range(1, max_label + 1) if max(base) * m <= max_label]
        if not mults:
            continue
        m = rng.choice(mults)
        arrows.append(ValuedArrow(i, j, (base[0] * m, base[1] * m)))
    return ValuedIceQuiver(tuple(range(1, n + 1)), (), tuple(arrows)), order


def _random_cross_arrows(eta: Layering, rng: random.Random, density: float,
                         max_label: int) -> list[ValuedArrow]:
    arrows = []
    for i, j in combinations(eta.domain, 2):
        if eta(i) == eta(j) or rng.random() >= density:
            continue
        v = rng.randint(1, max_label)
        src, dst = (i, j) if rng.random() < 0.5 else (j, i)
        arrows.append(ValuedArrow(src, dst, (v, v)))
    return arrows


def _trial_layered(B: ExchangeMatrix, eta: Layering, seq: Sequence[int]) -> bool:
    Bk = B
    for k in seq:
        if check_layered_step(to_quiver(Bk), k, eta) is not None:
            return False
        Bk = mutate(Bk, k)
    return True


def generate(family: InstanceFamily) -> Iterator[Instance]:
    """Reproducible instance stream for a family description."""
    rng = random.Random(family.seed)
    if family.kind == "DisjointChains" or (family.kind == "RandomLayered" and family.density == 0):
        sizes = family.level_sizes or (family.n,)
        eta = Layering.from_blocks(_blocks(sizes))
        B = chain_matrix(eta)
        for seq in enumerate_full_shuffles(eta, family.count):
            yield Instance(family.kind, B, eta, seq, layered_ok=True if
                           family.kind == "RandomLayered" else None)
    elif family.kind == "AcyclicFinest":
        for _ in range(family.count):
            n = family.n if family.n else rng.randint(1, 7)
            Q, order = random_acyclic_quiver(n, rng, family.max_label,
                                             family.density or 0.5)
            eta = Layering({v: v for v in range(1, n + 1)})
            yield Instance(family.kind, to_matrix(Q), eta, tuple(order))
    elif family.kind == "RandomLayered":
        sizes = family.level_sizes or (family.n,)
        eta = Layering.from_blocks(_blocks(sizes))
        shuffles = list(enumerate_full_shuffles(eta, 200))
        for _ in range(family.count):
            chains = layered_chain_quiver(eta)
            extra = _random_cross_arrows(eta, rng, family.density, family.max_label)
            Q = ValuedIceQuiver(chains.ex, (), chains.arrows + tuple(extra))
            B = to_matrix(Q)
            seq = rng.choice(shuffles)
            yield Instance(family.kind, B, eta, seq, layered_ok=_trial_layered(B, eta, seq))
    elif family.kind == "PathDerived":
        N = family.n
        if family.level_sizes:
            blocks = _blocks(family.level_sizes)
        else:
            labels = list(range(1, N + 1))
            blocks_by_vertex = {v: rng.randint(1, max(1, N // 2)) for v in labels}
            blocks = [[v for v in labels if blocks_by_vertex[v] == t]
                      for t in sorted(set(blocks_by_vertex.values()))]
        eta = Layering.from_blocks(blocks, Mode.FULL)
        B = chain_matrix(eta)
        for path in enumerate_contiguous_paths(N, family.count):
            yield Instance(family.kind, B, eta, seq_from_path(path, eta), path)


def certify(inst: Instance, truncations: bool = True) -> Certificate:
    """Certificate for a generated instance; negative controls never raise."""
    eta = inst.eta.exchange_only()
    strict = inst.family != "RandomLayered"
    return verify_theorem_b(inst.B, eta, inst.seq, truncations=truncations, strict=strict)


def set_partitions(N: int) -> Iterator[list[list[int]]]:
    """All set partitions of ``1..N`` as ordered block lists (restricted growth)."""
    def walk(v: int, blocks: list[list[int]]):
        if v > N:
            yield [list(b) for b in blocks]
            return
        for b in blocks:
            b.append(v)
            yield from walk(v + 1, blocks)
            b.pop()
        blocks.append([v])
        yield from walk(v + 1, blocks)
        blocks.pop()

    yield from walk(1, [])


def instance_to_doc(inst: Instance) -> dict:
    doc = {
        "family": inst.family,
        "matrix": matrix_to_doc(inst.B),
        "eta": inst.eta.to_doc(),
        "seq": list(inst.seq),
        "layered_ok": inst.layered_ok,
    }
    if inst.path is not None:
        doc["path"] = inst.path.to_doc()
    return doc


def instance_from_doc(doc: dict) -> Instance:
    path = path_from_doc(doc["path"]) if doc.get("path") else None
    return Instance(doc["family"], matrix_from_doc(doc["matrix"]),
                    layering_from_doc(doc["eta"]), tuple(doc["seq"]), path,
                    doc.get("layered_ok"))
