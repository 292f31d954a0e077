"""Weak values and ABL probabilities for a pre/post-selected ensemble."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import StructuralError, UndefinedABLError, UndefinedWeakValueError
from .qcore import (
    ATOL,
    Operator,
    StateVector,
    apply,
    basis_projector,
    identity,
    inner,
    ket,
    normalize,
)

OVERLAP_CUTOFF = 1e-12
PATHS3 = ("A", "B", "C")


@dataclass(frozen=True, eq=False)
class PrePostSelection:
    pre: StateVector
    post: StateVector
    overlap: complex

    @classmethod
    def create(cls, pre: StateVector, post: StateVector) -> PrePostSelection:
        """Normalize both states and cache ``<post|pre>``.

        Raises UndefinedWeakValueError for (numerically) orthogonal pairs.
        """
        if pre.labels != post.labels:
            raise StructuralError(f"pre {pre.labels} and post {post.labels} bases differ")
        pre, _ = normalize(pre)
        post, _ = normalize(post)
        overlap = inner(post, pre)
        if abs(overlap) <= OVERLAP_CUTOFF:
            raise UndefinedWeakValueError(
                f"|<f|i>| = {abs(overlap):.3g} is below {OVERLAP_CUTOFF:g}"
            )
        return cls(pre, post, overlap)

    @property
    def labels(self) -> tuple[str, ...]:
        return self.pre.labels


@dataclass(frozen=True)
class WeakValueResult:
    value: complex
    observable_tag: str = ""

    @property
    def real(self) -> float:
        return self.value.real


def _transition(pp: PrePostSelection, op: Operator) -> complex:
    if op.labels_in != pp.labels or op.labels_out != pp.labels:
        raise StructuralError(
            f"operator acts on {op.labels_in}, selection lives on {pp.labels}"
        )
    return inner(pp.post, apply(op, pp.pre))


def weak_value(pp: PrePostSelection, obs: Operator, tag: str | None = None) -> WeakValueResult:
    """``<f|O|i> / <f|i>``, kept complex."""
    if abs(pp.overlap) <= OVERLAP_CUTOFF:
        raise UndefinedWeakValueError("pre- and post-selection are orthogonal")
    value = _transition(pp, obs) / pp.overlap
    return WeakValueResult(complex(value), obs.name if tag is None else tag)


def abl_probability(pp: PrePostSelection, proj: Operator) -> float:
    """Probability that a strong measurement of ``proj`` between the
    selections finds the system in its range (projector vs. complement)."""
    if not proj.is_projector():
        raise StructuralError(f"{proj.name or 'operator'} is not a projector")
    hit = abs(_transition(pp, proj)) ** 2
    miss = abs(_transition(pp, identity(pp.labels) - proj)) ** 2
    total = hit + miss
    if total <= ATOL**2:
        raise UndefinedABLError("both outcomes are annihilated by the postselection")
    return hit / total


def is_resolution_of_identity(projs: Sequence[Operator], labels: Sequence[str]) -> bool:
    total = np.zeros((len(labels), len(labels)), dtype=complex)
    for p in projs:
        if p.labels_in != tuple(labels) or p.labels_out != tuple(labels):
            return False
        total = total + p.entries
    return bool(np.max(np.abs(total - np.eye(len(labels)))) <= ATOL)


def weak_value_sum(pp: PrePostSelection, projs: Sequence[Operator]) -> complex:
    if not projs or not is_resolution_of_identity(projs, pp.labels):
        raise StructuralError("projectors do not sum to the identity")
    return sum((weak_value(pp, p).value for p in projs), 0j)


def three_box_scenario() -> tuple[PrePostSelection, tuple[Operator, Operator, Operator]]:
    """The three-box selection: i = (A+B+C)/√3, f = (A+B−C)/√3.

    Returns the selection and the path projectors (|A><A|, |B><B|, |C><C|),
    whose weak values are (1, 1, -1).
    """
    pre = ket(PATHS3, [1, 1, 1])
    post = ket(PATHS3, [1, 1, -1])
    pp = PrePostSelection.create(pre, post)
    projs = tuple(basis_projector(PATHS3, x) for x in PATHS3)
    return pp, projs
