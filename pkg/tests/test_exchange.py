import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from greenseq import (
    Color,
    ExchangeMatrix,
    Prime,
    VerdictKind,
    c_vector,
    classify,
    compute_symmetrizer,
    frame,
    mutate,
    run_sequence,
    verdict,
)
from greenseq.exchange import (
    FrozenMutation,
    HasFrozen,
    InvalidMatrix,
    MutationStepError,
    NotSkewSymmetrizable,
    SignIncoherent,
    format_vertex,
    mutate_sequence,
    parse_vertex,
    permutation_equivalent,
)

from conftest import random_exchange_matrix

A3 = ExchangeMatrix.from_rows([[0, -1, 0], [1, 0, -1], [0, 1, 0]])


def test_worked_mutation():
    B = ExchangeMatrix.from_rows([[0, 2, -1], [-2, 0, 1], [1, -1, 0]])
    assert mutate(B, 3).rows == ((0, 1, 1), (-1, 0, -1), (-1, 1, 0))


def test_mutation_with_frozen_rows():
    B = ExchangeMatrix((1, 2), (3,), ((0, 1), (-1, 0), (2, -1)))
    M = mutate(B, 1)
    # frozen row: b_31 flips, b_32 += (|2|*1 + 2*|1|)/2
    assert M.rows == ((0, -1), (1, 0), (-2, 1))


def test_frozen_mutation_rejected():
    B = ExchangeMatrix((1,), (2,), ((0,), (1,)))
    with pytest.raises(FrozenMutation):
        mutate(B, 2)
    with pytest.raises(KeyError):
        mutate(B, 9)


def test_symmetrizer_examples():
    assert compute_symmetrizer(ExchangeMatrix.from_rows([[0, 1], [-2, 0]])) == {1: 2, 2: 1}
    # two components, each reduced separately
    B = ExchangeMatrix.from_rows([[0, 3, 0, 0], [-1, 0, 0, 0], [0, 0, 0, 1], [0, 0, -1, 0]])
    assert compute_symmetrizer(B) == {1: 1, 2: 3, 3: 1, 4: 1}


@pytest.mark.parametrize("rows", [
    [[0, 1], [1, 0]],
    [[0, 1], [0, 0]],
    [[0, 1, 1], [-1, 0, 1], [-2, -1, 0]],
])
def test_not_skew_symmetrizable(rows):
    with pytest.raises(NotSkewSymmetrizable):
        ExchangeMatrix.from_rows(rows)


def test_shape_checks():
    with pytest.raises(InvalidMatrix):
        ExchangeMatrix.from_rows([[1]])
    with pytest.raises(InvalidMatrix):
        ExchangeMatrix((1, 2), (), ((0, 1),))


def test_frame_single_vertex():
    s = frame(ExchangeMatrix.from_rows([[0]]))
    assert s.bhat.rows == ((0,), (-1,))
    assert s.bhat.fr == (Prime(1),)
    assert c_vector(s, 1) == (1,)
    assert classify(s, 1) is Color.GREEN


def test_frame_a2():
    s = frame(ExchangeMatrix.from_rows([[0, -1], [1, 0]]))
    assert s.bhat.rows == ((0, -1), (1, 0), (-1, 0), (0, -1))
    with pytest.raises(HasFrozen):
        frame(s.bhat)


def test_single_vertex_sequences():
    B = ExchangeMatrix.from_rows([[0]])
    assert verdict(B, [1]).kind is VerdictKind.MAXIMAL_GREEN
    v = verdict(B, [1, 1])
    assert v.kind is VerdictKind.NOT_GREEN and v.step == 2
    v = verdict(B, [])
    assert v.kind is VerdictKind.NOT_REDDENING and v.vertex == 1


def test_a2_verdicts():
    B = ExchangeMatrix.from_rows([[0, -1], [1, 0]])  # 1 <- 2
    assert verdict(B, [1, 2, 1]).kind is VerdictKind.MAXIMAL_GREEN
    # source first
    assert verdict(B, [2, 1]).kind is VerdictKind.MAXIMAL_GREEN
    v = verdict(B, [2, 1, 2])
    assert v.kind is VerdictKind.NOT_GREEN and v.step == 3
    v = verdict(B, [1, 2])
    assert v.kind is VerdictKind.GREEN_SEQ and v.vertex == 1
    assert v.line() == "GREEN_SEQ vertex=1 length=2"


def test_reddening_but_not_green():
    B = ExchangeMatrix.from_rows([[0]])
    assert verdict(B, [1, 1, 1]).kind is VerdictKind.REDDENING


def test_a3_shuffle_is_maximal_green():
    v = verdict(A3, [1, 2, 3, 1, 2, 1])
    assert v.kind is VerdictKind.MAXIMAL_GREEN
    assert v.line() == "MAXIMAL_GREEN length=6"


def test_empty_matrix():
    B = ExchangeMatrix((), (), ())
    assert verdict(B, []).kind is VerdictKind.MAXIMAL_GREEN


def test_step_error_carries_position():
    with pytest.raises(MutationStepError) as info:
        run_sequence(A3, [1, 7])
    assert info.value.step == 2 and info.value.vertex == 7
    with pytest.raises(MutationStepError):
        mutate_sequence(A3, [4])


def test_sign_incoherence_detected():
    from greenseq.exchange import _color_of
    with pytest.raises(SignIncoherent):
        _color_of((1, -1), 1)
    with pytest.raises(SignIncoherent):
        _color_of((0, 0), 1)


def test_vertex_labels_round_trip():
    for v in (1, 17, Prime(3)):
        assert parse_vertex(format_vertex(v)) == v
    assert str(Prime(3)) == "3'"


def test_permutation_equivalent():
    B = ExchangeMatrix.from_rows([[0, 1, 0], [-1, 0, 2], [0, -1, 0]])
    C = ExchangeMatrix.from_rows([[0, -1, 0], [1, 0, 0], [0, 0, 0]])
    assert permutation_equivalent(B, B) == {1: 1, 2: 2, 3: 3}
    assert permutation_equivalent(B, C) is None


def test_maximal_green_ends_at_permuted_initial_matrix():
    # final principal part is B up to relabeling, with c-matrix = -permutation
    B = ExchangeMatrix.from_rows([[0, -1, 0, 0], [1, 0, -1, 0], [0, 1, 0, -1], [0, 0, 1, 0]])
    seq = (1, 2, 3, 4, 1, 2, 3, 1, 2, 1)
    traj = run_sequence(B, seq)
    final = traj[-1]
    assert permutation_equivalent(B, final.principal) is not None
    C = final.c_matrix()
    for row in C:
        assert sorted(row) == [-1, 0, 0, 0]


@settings(max_examples=200, deadline=None)
@given(st.integers(0, 10**6), st.integers(0, 3))
def test_mutation_is_involution(seed, frozen):
    rng = random.Random(seed)
    B = random_exchange_matrix(rng, frozen=frozen)
    k = rng.choice(B.ex)
    assert mutate(mutate(B, k), k) == B


@settings(max_examples=200, deadline=None)
@given(st.integers(0, 10**6))
def test_symmetrizer_preserved(seed):
    rng = random.Random(seed)
    B = random_exchange_matrix(rng)
    D = B.symmetrizer
    for _ in range(rng.randint(1, 6)):
        B = mutate(B, rng.choice(B.ex))
        for a, i in enumerate(B.ex):
            for b, j in enumerate(B.ex):
                assert D[i] * B.rows[a][b] == -D[j] * B.rows[b][a]


@settings(max_examples=100, deadline=None)
@given(st.integers(0, 10**6))
def test_c_vectors_sign_coherent(seed):
    rng = random.Random(seed)
    B = random_exchange_matrix(rng, n=rng.randint(1, 5), bound=3)
    seq = [rng.choice(B.ex) for _ in range(rng.randint(0, 8))]
    # raises SignIncoherent on failure
    for state in run_sequence(B, seq):
        assert len(state.colors()) == len(B.ex)


@settings(max_examples=100, deadline=None)
@given(st.integers(0, 10**6))
def test_green_mutation_turns_vertex_red(seed):
    rng = random.Random(seed)
    B = random_exchange_matrix(rng, n=rng.randint(1, 5), bound=3)
    s = frame(B)
    k = rng.choice(B.ex)
    before = classify(s, k)
    after = classify(s.mutate(k), k)
    assert before is not after
