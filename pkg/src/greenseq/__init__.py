"""Exact cluster mutation with c-vectors, and mechanical checks that layered
T-systems and contiguous-path sequences are maximal green sequences."""
from .exchange import (
    Color,
    ExchangeMatrix,
    FramedState,
    Prime,
    Verdict,
    VerdictKind,
    c_vector,
    classify,
    compute_symmetrizer,
    frame,
    mutate,
    run_sequence,
    verdict,
)
from .layering import Layering, Mode, check_layered_step, enumerate_full_shuffles, is_full
from .quiver import ValuedArrow, ValuedIceQuiver, export_dot, mutate_quiver, to_matrix, to_quiver

__version__ = "0.1.0"

__all__ = [
    "Color", "ExchangeMatrix", "FramedState", "Layering", "Mode", "Prime", "ValuedArrow",
    "ValuedIceQuiver", "Verdict", "VerdictKind", "c_vector", "check_layered_step", "classify",
    "compute_symmetrizer", "enumerate_full_shuffles", "export_dot", "frame", "is_full",
    "mutate", "mutate_quiver", "run_sequence", "to_matrix", "to_quiver", "verdict",
]
