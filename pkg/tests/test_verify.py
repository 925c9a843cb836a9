import json

import pytest

from greenseq import ExchangeMatrix, Layering, Mode, VerdictKind
from greenseq.io import matrix_from_doc, matrix_to_doc, parse_sequence, quiver_from_doc, quiver_to_doc
from greenseq.layering import enumerate_full_shuffles
from greenseq.permpath import enumerate_contiguous_paths, word_to_path
from greenseq.quiver import ValuedArrow, ValuedIceQuiver, to_matrix, to_quiver
from greenseq.verify import (
    CounterexampleError,
    InstanceFamily,
    PreconditionError,
    certify,
    chain_matrix,
    generate,
    instance_digest,
    instance_from_doc,
    instance_to_doc,
    set_partitions,
    verify_an_lemma,
    verify_theorem_a,
    verify_theorem_b,
    verify_truncations,
)

SHUFFLE_A4 = (1, 2, 3, 1, 2, 1, 4, 3, 2, 1)


def test_shuffle_certificate():
    eta = Layering.constant([1, 2, 3, 4])
    cert = verify_theorem_b(chain_matrix(eta), eta, SHUFFLE_A4, truncations=True)
    assert cert.maximal_green and cert.full and cert.layered
    assert cert.expected_length == len(SHUFFLE_A4) == 10
    assert cert.truncations_ok
    doc = cert.to_dict()
    assert doc["verdict"]["kind"] == "MAXIMAL_GREEN"
    json.dumps(doc)


def test_an_lemma():
    assert verify_an_lemma(4, SHUFFLE_A4).ok
    bad = verify_an_lemma(3, (1, 1, 2, 2, 3, 1))
    assert not bad.ok and bad.witness.startswith("precondition")


def test_non_full_input_is_reported_not_raised():
    eta = Layering.constant([1, 2, 3])
    cert = verify_theorem_b(chain_matrix(eta), eta, (1, 2, 3))
    assert not cert.full and not cert.counterexample


def test_non_layered_sequence_is_recorded():
    eta = Layering.constant([1, 2])
    cert = verify_theorem_b(chain_matrix(eta), eta, (2, 1, 2), strict=True)
    v = cert.first_layered_violation()
    assert v is not None and v.step == 1


def test_counterexample_is_raised_when_hypotheses_hold(monkeypatch):
    import greenseq.verify as verify_mod
    from greenseq.exchange import Verdict

    def broken(traj, seq):
        return Verdict(VerdictKind.GREEN_SEQ, len(seq), True, False, None, 1)

    monkeypatch.setattr(verify_mod, "verdict_from_trajectory", broken)
    eta = Layering.constant([1, 2])
    with pytest.raises(CounterexampleError) as info:
        verify_theorem_b(chain_matrix(eta), eta, (1, 2, 1))
    cert = info.value.certificate
    assert cert.hypotheses_hold and cert.counterexample
    assert cert.digest[:12] in str(info.value)
    assert not verify_theorem_b(chain_matrix(eta), eta, (1, 2, 1), strict=False).maximal_green


def test_preconditions():
    eta = Layering.constant([1, 2])
    with pytest.raises(PreconditionError):
        verify_theorem_b(chain_matrix(Layering.constant([1, 2, 3])), eta, (1, 2, 1))
    framed = ExchangeMatrix((1,), (2,), ((0,), (1,)))
    with pytest.raises(PreconditionError):
        verify_theorem_b(framed, Layering.constant([1]), (1,))
    with pytest.raises(PreconditionError):
        verify_theorem_a(None, Layering.constant([1, 2, 3]), word_to_path((1, 2, 1), 3))


def test_cross_level_arrows_keep_truncations():
    eta = Layering.from_blocks([[1, 2], [3, 4]])
    Q = ValuedIceQuiver((1, 2, 3, 4), (), (ValuedArrow(2, 1), ValuedArrow(4, 3),
                                           ValuedArrow(1, 3), ValuedArrow(4, 2)))
    B = to_matrix(Q)
    for seq in enumerate_full_shuffles(eta):
        cert = verify_theorem_b(B, eta, seq, truncations=True, strict=False)
        if cert.hypotheses_hold:
            assert cert.maximal_green and cert.truncations_ok
    assert all(r.ok for r in verify_truncations(chain_matrix(eta), eta, (1, 2, 1, 3, 4, 3)))


def test_theorem_a_small():
    eta = Layering.from_blocks([[1, 3, 4], [2]], Mode.FULL)
    for path in enumerate_contiguous_paths(4):
        cert = verify_theorem_a(None, eta, path, truncations=True)
        assert cert.maximal_green and cert.truncations_ok
        assert len(cert.sequence) == 3


def test_set_partitions_bell_numbers():
    assert [sum(1 for _ in set_partitions(n)) for n in range(1, 7)] == [1, 2, 5, 15, 52, 203]


@pytest.mark.parametrize("family", [
    InstanceFamily("DisjointChains", level_sizes=(2, 2), count=20),
    InstanceFamily("AcyclicFinest", n=0, count=20, seed=3),
    InstanceFamily("PathDerived", n=5, count=5, seed=1),
    InstanceFamily("RandomLayered", level_sizes=(2, 2), density=0.4, count=10, seed=2),
])
def test_families_certify(family):
    insts = list(generate(family))
    assert insts
    for inst in insts:
        cert = certify(inst)
        assert not cert.counterexample
        if family.kind != "RandomLayered":
            assert cert.maximal_green
        else:
            assert inst.layered_ok == cert.layered
        again = instance_from_doc(json.loads(json.dumps(instance_to_doc(inst))))
        assert again.digest == inst.digest


def test_generation_is_reproducible():
    fam = InstanceFamily("AcyclicFinest", n=0, count=10, seed=99)
    assert [i.digest for i in generate(fam)] == [i.digest for i in generate(fam)]
    with pytest.raises(ValueError):
        InstanceFamily("Nope")


def test_digest_changes_with_sequence():
    eta = Layering.constant([1, 2])
    B = chain_matrix(eta)
    assert instance_digest(B, eta, (1, 2, 1)) != instance_digest(B, eta, (2, 1, 2))


def test_io_round_trips():
    B = ExchangeMatrix((1, 2), (3,), ((0, 2), (-1, 0), (4, -1)))
    assert matrix_from_doc(json.loads(json.dumps(matrix_to_doc(B)))) == B
    Q = to_quiver(B)
    assert quiver_from_doc(quiver_to_doc(Q)) == Q
    assert parse_sequence("1, 2 3") == (1, 2, 3) == parse_sequence("[1,2,3]")
    assert parse_sequence("  ") == ()


def test_verdict_on_certified_sequences_matches_kind():
    eta = Layering.constant([1, 2, 3])
    for seq in enumerate_full_shuffles(eta):
        cert = verify_theorem_b(chain_matrix(eta), eta, seq)
        assert cert.verdict.kind is VerdictKind.MAXIMAL_GREEN


def test_truncation_records_agree_with_quiver_truncation():
    from greenseq.exchange import frame, run_sequence
    from greenseq.layering import chain_quiver
    from greenseq.quiver import same_quiver, truncate

    eta = Layering.from_blocks([[1, 2], [3, 4]])
    Q = ValuedIceQuiver((1, 2, 3, 4), (), (ValuedArrow(2, 1), ValuedArrow(4, 3),
                                           ValuedArrow(1, 3, (2, 2))))
    B = to_matrix(Q)
    for seq in [(1, 2, 1, 3, 4, 3), (3, 1, 4, 2, 3, 1), (1, 1, 3)]:
        records = verify_truncations(B, eta, seq)
        traj = run_sequence(B, seq)
        for r in records:
            state = traj[r.prefix]
            ref = frame(to_matrix(chain_quiver(eta.members(r.level))))
            for k in seq[:r.prefix]:
                if eta(k) == r.level:
                    ref = ref.mutate(k)
            full = to_quiver(state.bhat)
            assert r.part_b == same_quiver(truncate(full, eta, r.level), to_quiver(ref.bhat))
            cross = [a for a in full.arrows
                     if any(getattr(v, "base", None) in eta.members(r.level)
                            for v in (a.src, a.dst))
                     and any(isinstance(v, int) and eta(v) != r.level
                             for v in (a.src, a.dst))]
            assert r.part_a == (not cross)
