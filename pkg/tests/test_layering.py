import math
from math import comb

import pytest

from greenseq import Layering, Mode, check_layered_step, enumerate_full_shuffles, is_full
from greenseq.exchange import ExchangeMatrix
from greenseq.layering import (
    NEG_INF,
    POS_INF,
    FullnessKind,
    ViolationKind,
    WrongMode,
    chain_quiver,
    expected_length,
    layered_chain_quiver,
    order_minus,
    order_plus,
)
from greenseq.quiver import ValuedArrow, ValuedIceQuiver, to_quiver

from oracles import brute_force_full_shuffles, count_shifted_staircase_tableaux

ETA6 = Layering({1: 1, 4: 1, 6: 1, 2: 2, 5: 2, 3: 3})


def test_neighbours_and_orders():
    assert ETA6.pred(4) == 1 and ETA6.succ(4) == 6
    assert ETA6.pred(1) == NEG_INF and ETA6.succ(6) == POS_INF
    assert ETA6.pred(3) == NEG_INF and ETA6.succ(3) == POS_INF
    assert order_plus(ETA6, 1) == 2 and order_minus(ETA6, 1) == 0
    assert order_plus(ETA6, 5) == 0 and order_minus(ETA6, 5) == 1


def test_full_mode_freezes_level_maxima():
    eta = Layering(ETA6.eta, Mode.FULL)
    assert eta.frozen_set() == (3, 5, 6)
    assert eta.exchangeable() == (1, 2, 4)
    assert eta.exchange_only() == Layering({1: 1, 4: 1, 2: 2})
    with pytest.raises(WrongMode):
        ETA6.frozen_set()


def test_doc_round_trip():
    eta = Layering(ETA6.eta, Mode.FULL)
    assert Layering.from_doc(eta.to_doc()) == eta


@pytest.mark.parametrize("seq", [(1,), ()])
def test_trivial_levels(seq):
    eta = Layering.constant([1])
    assert (is_full(seq, eta) is None) == (seq == (1,))


def test_four_vertex_shuffle_is_full():
    eta = Layering.constant([1, 2, 3, 4])
    assert is_full((1, 2, 3, 1, 2, 1, 4, 3, 2, 1), eta) is None


@pytest.mark.parametrize("seq,kind", [
    ((1, 2, 2), FullnessKind.COUNT),
    ((1, 1, 2), FullnessKind.CROSS_ROW),
    ((2, 1, 1), FullnessKind.ROW_ORDER),
    ((2, 1, 3, 1, 2, 1), FullnessKind.ROW_ORDER),
    ((1, 1, 2, 2, 3, 1), FullnessKind.CROSS_ROW),
    ((1, 2, 1, 9, 3, 2, 1), FullnessKind.UNKNOWN_VERTEX),
])
def test_fullness_violations(seq, kind):
    eta = Layering.constant([1, 2, 3][:max(v for v in seq if v < 9)])
    v = is_full(seq, eta)
    assert v is not None and v.kind is kind


def test_row_order_not_implied_by_counts_and_cross_rows():
    # counts match and every copy n >= 2 follows the right row-(n-1) copy,
    # yet row 1 reads 2 before 1
    eta = Layering.constant([1, 2])
    assert is_full((2, 1, 1), eta).kind is FullnessKind.ROW_ORDER


@pytest.mark.parametrize("ell,count", [(1, 1), (2, 1), (3, 2), (4, 12)])
def test_constant_level_counts(ell, count):
    eta = Layering.constant(range(1, ell + 1))
    got = list(enumerate_full_shuffles(eta))
    assert len(got) == count == count_shifted_staircase_tableaux(ell)
    assert got == brute_force_full_shuffles([list(range(1, ell + 1))])


def test_three_vertex_shuffles_listed():
    eta = Layering.constant([1, 2, 3])
    assert list(enumerate_full_shuffles(eta)) == [(1, 2, 1, 3, 2, 1), (1, 2, 3, 1, 2, 1)]


@pytest.mark.parametrize("blocks", [[[1, 2], [3]], [[1, 3], [2]], [[1, 2], [3, 4]],
                                    [[2, 4], [1, 3]], [[1, 2, 3], [4]]])
def test_multi_level_shuffles_match_brute_force(blocks):
    eta = Layering.from_blocks(blocks)
    got = list(enumerate_full_shuffles(eta))
    assert got == brute_force_full_shuffles(blocks)
    sizes = [len(b) for b in blocks]
    L = [s * (s + 1) // 2 for s in sizes]
    expected = math.prod(count_shifted_staircase_tableaux(s) for s in sizes)
    expected *= math.factorial(sum(L)) // math.prod(math.factorial(x) for x in L)
    assert len(got) == expected
    for seq in got:
        assert is_full(seq, eta) is None


def test_enumeration_limit():
    eta = Layering.constant([1, 2, 3, 4])
    assert len(list(enumerate_full_shuffles(eta, 5))) == 5
    with pytest.raises(ValueError):
        list(enumerate_full_shuffles(eta, 0))


def test_expected_length_is_a_sum_over_levels():
    assert expected_length(Layering.from_blocks([[1, 2, 3], [4, 5]])) == comb(4, 2) + comb(3, 2)
    assert expected_length(Layering.from_blocks([[1, 2, 3], [4, 5]], Mode.FULL)) == 3 + 1


def test_layered_check_on_chain():
    eta = Layering.constant([1, 2, 3])
    Q = chain_quiver([1, 2, 3])
    assert check_layered_step(Q, 1, eta) is None
    v = check_layered_step(Q, 2, eta)
    assert v.kind is ViolationKind.SAME_LEVEL_OUTGOING


def test_layered_check_violations():
    eta = Layering.from_blocks([[1, 2], [3]])
    bad_source = ValuedIceQuiver((1, 2, 3), (), (ValuedArrow(2, 1), ValuedArrow(3, 1)))
    assert check_layered_step(bad_source, 1, eta).kind is ViolationKind.BAD_INCOMING_SOURCE
    valued = ValuedIceQuiver((1, 2, 3), (), (ValuedArrow(2, 1, (1, 2)),))
    assert check_layered_step(valued, 1, eta).kind is ViolationKind.NON_SIMPLE_INCOMING
    missing = ValuedIceQuiver((1, 2, 3), (), (ValuedArrow(1, 3),))
    v = check_layered_step(missing, 1, eta, step=4)
    assert v.kind is ViolationKind.MISSING_INCOMING and v.neighbour == 2
    assert v.lenient_ok and v.step == 4
    ok = ValuedIceQuiver((1, 2, 3), (), (ValuedArrow(2, 1), ValuedArrow(1, 3, (2, 2))))
    assert check_layered_step(ok, 1, eta) is None


def test_layered_chain_quiver():
    eta = Layering.from_blocks([[1, 3], [2, 4, 5]])
    Q = layered_chain_quiver(eta)
    assert set(Q.arrows) == {ValuedArrow(3, 1), ValuedArrow(4, 2), ValuedArrow(5, 4)}
    B = ExchangeMatrix.from_rows([[0, -1], [1, 0]])
    assert to_quiver(B) == chain_quiver([1, 2])


def test_infinities_are_floats():
    assert math.isinf(NEG_INF) and NEG_INF < 0 < POS_INF
