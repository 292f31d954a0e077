"""Complex linear algebra over small labeled Hilbert spaces.

Every state and operator carries its basis labels, and binary operations check
them, so a path ket can never be silently contracted against a polarization
ket.  Values are immutable; all functions are pure.
"""

from __future__ import annotations

from dataclasses import dataclass
from numbers import Number
from typing import Sequence

import numpy as np

from .errors import NullStateError, StructuralError

ATOL = 1e-12
TENSOR_SEP = "⊗"


def _frozen(array) -> np.ndarray:
    out = np.array(array, dtype=np.complex128)
    out.setflags(write=False)
    return out


def _check_labels(labels: Sequence[str]) -> tuple[str, ...]:
    labels = tuple(str(x) for x in labels)
    if len(set(labels)) != len(labels):
        raise StructuralError(f"basis labels must be unique, got {labels}")
    return labels


@dataclass(frozen=True, eq=False)
class StateVector:
    labels: tuple[str, ...]
    amplitudes: np.ndarray

    def __post_init__(self):
        labels = _check_labels(self.labels)
        amps = _frozen(self.amplitudes)
        if amps.ndim != 1 or amps.shape[0] != len(labels):
            raise StructuralError(
                f"{amps.shape} amplitudes do not match {len(labels)} labels"
            )
        if not np.all(np.isfinite(amps)):
            raise StructuralError("amplitudes must be finite")
        object.__setattr__(self, "labels", labels)
        object.__setattr__(self, "amplitudes", amps)

    @property
    def dim(self) -> int:
        return len(self.labels)

    @property
    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    def is_normalized(self, atol: float = ATOL) -> bool:
        return abs(float(np.vdot(self.amplitudes, self.amplitudes).real) - 1.0) <= atol

    def amplitude(self, label: str) -> complex:
        return complex(self.amplitudes[self.labels.index(label)])

    def allclose(self, other: StateVector, atol: float = ATOL) -> bool:
        _require_same_basis(self.labels, other.labels)
        return bool(np.allclose(self.amplitudes, other.amplitudes, rtol=0, atol=atol))

    def __add__(self, other: StateVector) -> StateVector:
        _require_same_basis(self.labels, other.labels)
        return StateVector(self.labels, self.amplitudes + other.amplitudes)

    def __sub__(self, other: StateVector) -> StateVector:
        return self + (-1.0) * other

    def __neg__(self) -> StateVector:
        return (-1.0) * self

    def __mul__(self, scalar: Number) -> StateVector:
        return StateVector(self.labels, complex(scalar) * self.amplitudes)

    __rmul__ = __mul__

    def __truediv__(self, scalar: Number) -> StateVector:
        return StateVector(self.labels, self.amplitudes / complex(scalar))

    def __repr__(self) -> str:
        terms = ", ".join(f"{l}: {a:.6g}" for l, a in zip(self.labels, self.amplitudes))
        return f"StateVector({terms})"


@dataclass(frozen=True, eq=False)
class Operator:
    """A ``dim_out x dim_in`` complex matrix between two labeled bases."""

    entries: np.ndarray
    labels_out: tuple[str, ...]
    labels_in: tuple[str, ...]
    name: str = ""

    def __post_init__(self):
        out = _check_labels(self.labels_out)
        inp = _check_labels(self.labels_in)
        m = _frozen(self.entries)
        if m.shape != (len(out), len(inp)):
            raise StructuralError(f"matrix shape {m.shape} vs labels {len(out)}x{len(inp)}")
        if not np.all(np.isfinite(m)):
            raise StructuralError("operator entries must be finite")
        object.__setattr__(self, "labels_out", out)
        object.__setattr__(self, "labels_in", inp)
        object.__setattr__(self, "entries", m)

    @property
    def dim_out(self) -> int:
        return len(self.labels_out)

    @property
    def dim_in(self) -> int:
        return len(self.labels_in)

    @property
    def is_square(self) -> bool:
        return self.labels_out == self.labels_in

    def dagger(self) -> Operator:
        return Operator(self.entries.conj().T, self.labels_in, self.labels_out, self.name)

    def is_unitary(self, atol: float = ATOL) -> bool:
        if not self.is_square:
            return False
        m = self.entries
        return bool(np.max(np.abs(m.conj().T @ m - np.eye(self.dim_in))) <= atol)

    def is_projector(self, atol: float = ATOL) -> bool:
        if not self.is_square:
            return False
        m = self.entries
        return bool(
            np.max(np.abs(m @ m - m)) <= atol and np.max(np.abs(m.conj().T - m)) <= atol
        )

    def allclose(self, other: Operator, atol: float = ATOL) -> bool:
        _require_same_basis(self.labels_out, other.labels_out)
        _require_same_basis(self.labels_in, other.labels_in)
        return bool(np.allclose(self.entries, other.entries, rtol=0, atol=atol))

    def __matmul__(self, other):
        if isinstance(other, StateVector):
            return apply(self, other)
        _require_same_basis(self.labels_in, other.labels_out)
        return Operator(self.entries @ other.entries, self.labels_out, other.labels_in)

    def __add__(self, other: Operator) -> Operator:
        _require_same_basis(self.labels_out, other.labels_out)
        _require_same_basis(self.labels_in, other.labels_in)
        return Operator(self.entries + other.entries, self.labels_out, self.labels_in)

    def __sub__(self, other: Operator) -> Operator:
        return self + (-1.0) * other

    def __mul__(self, scalar: Number) -> Operator:
        return Operator(complex(scalar) * self.entries, self.labels_out, self.labels_in, self.name)

    __rmul__ = __mul__


def _require_same_basis(a: Sequence[str], b: Sequence[str]) -> None:
    if tuple(a) != tuple(b):
        raise StructuralError(f"basis mismatch: {tuple(a)} vs {tuple(b)}")


def ket(labels: Sequence[str], amplitudes: Sequence[complex]) -> StateVector:
    return StateVector(tuple(labels), np.asarray(amplitudes, dtype=np.complex128))


def basis_state(labels: Sequence[str], label: str) -> StateVector:
    labels = tuple(labels)
    if label not in labels:
        raise StructuralError(f"{label!r} is not one of {labels}")
    amps = np.zeros(len(labels), dtype=np.complex128)
    amps[labels.index(label)] = 1.0
    return StateVector(labels, amps)


def tensor_labels(a: Sequence[str], b: Sequence[str]) -> tuple[str, ...]:
    return tuple(f"{x}{TENSOR_SEP}{y}" for x in a for y in b)


def tensor(a: StateVector, b: StateVector) -> StateVector:
    """Product state; label ``x⊗y`` sits at index ``i_x * b.dim + i_y``."""
    return StateVector(tensor_labels(a.labels, b.labels), np.kron(a.amplitudes, b.amplitudes))


def inner(a: StateVector, b: StateVector) -> complex:
    """``<a|b>``, antilinear in the first argument."""
    _require_same_basis(a.labels, b.labels)
    return complex(np.vdot(a.amplitudes, b.amplitudes))


def apply(op: Operator, s: StateVector) -> StateVector:
    _require_same_basis(op.labels_in, s.labels)
    return StateVector(op.labels_out, op.entries @ s.amplitudes)


def normalize(s: StateVector) -> tuple[StateVector, float]:
    norm = s.norm
    if norm <= ATOL:
        raise NullStateError("cannot normalize a null state")
    return s / norm, norm


def identity(labels: Sequence[str]) -> Operator:
    labels = tuple(labels)
    return Operator(np.eye(len(labels)), labels, labels, "I")


def outer(a: StateVector, b: StateVector, name: str = "") -> Operator:
    """``|a><b|``."""
    return Operator(np.outer(a.amplitudes, b.amplitudes.conj()), a.labels, b.labels, name)


def projector(s: StateVector, name: str = "") -> Operator:
    """Projector onto the ray of ``s`` (normalized internally)."""
    unit, _ = normalize(s)
    return outer(unit, unit, name)


def basis_projector(labels: Sequence[str], label: str) -> Operator:
    return projector(basis_state(labels, label), name=f"|{label}><{label}|")


def kron(a: Operator, b: Operator) -> Operator:
    return Operator(
        np.kron(a.entries, b.entries),
        tensor_labels(a.labels_out, b.labels_out),
        tensor_labels(a.labels_in, b.labels_in),
        f"{a.name}{TENSOR_SEP}{b.name}" if a.name and b.name else "",
    )


def bra_on_first(bra: StateVector, second_labels: Sequence[str]) -> Operator:
    """``<bra| ⊗ I``: contracts the first tensor factor against ``bra``."""
    second = identity(second_labels)
    row = Operator(bra.amplitudes.conj()[None, :], ("1",), bra.labels)
    op = kron(row, second)
    return Operator(op.entries, tuple(second_labels), op.labels_in)
