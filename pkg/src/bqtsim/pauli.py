"""Pauli operators with exact phases, and tensor strings of them."""
from __future__ import annotations

import itertools
from collections.abc import Iterator, Sequence
from dataclasses import dataclass

import numpy as np

from .statevector import I2, X, Y, Z, StateError, StateVector, apply_1q

KINDS = "IXYZ"
MAX_SEARCH_WIDTH = 4

_MATRICES = {"I": I2, "X": X, "Y": Y, "Z": Z}
# phases are stored as the exponent k of i**k
_PHASE_EXP = {1: 0, 1j: 1, -1: 2, -1j: 3}
_PHASE_VALUE = (1, 1j, -1, -1j)


@dataclass(frozen=True)
class PauliOp:
    kind: str
    phase_exp: int = 0  # phase = i**phase_exp

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown Pauli kind {self.kind!r}")
        object.__setattr__(self, "phase_exp", self.phase_exp % 4)

    @classmethod
    def with_phase(cls, kind: str, phase: complex) -> PauliOp:
        try:
            return cls(kind, _PHASE_EXP[complex(phase)])
        except KeyError:
            raise ValueError(f"phase {phase} is not a fourth root of unity") from None

    @property
    def phase(self) -> complex:
        return _PHASE_VALUE[self.phase_exp]

    def to_gate(self) -> np.ndarray:
        return self.phase * _MATRICES[self.kind]

    def symbol(self) -> str:
        """Render in sigma notation: I, X, Z -> s0, s1, s3 and iY -> "iσ2"."""
        idx = KINDS.index(self.kind)
        prefix = {0: "", 1: "i", 2: "-", 3: "-i"}[self.phase_exp]
        return f"{prefix}σ{idx}"

    def __str__(self) -> str:
        return self.symbol()


def to_gate(p: PauliOp) -> np.ndarray:
    return p.to_gate()


SIGMA = {
    "σ0": PauliOp("I"),
    "σ1": PauliOp("X"),
    "σ2": PauliOp("Y"),
    "iσ2": PauliOp("Y", 1),
    "σ3": PauliOp("Z"),
}


def parse_symbol(sym: str) -> PauliOp:
    """Inverse of :meth:`PauliOp.symbol` for the unsigned forms."""
    try:
        return SIGMA[sym.strip()]
    except KeyError:
        raise ValueError(f"unrecognized Pauli symbol {sym!r}") from None


@dataclass(frozen=True)
class PauliString:
    ops: tuple[PauliOp, ...]
    targets: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "ops", tuple(self.ops))
        object.__setattr__(self, "targets", tuple(int(t) for t in self.targets))
        if len(self.ops) != len(self.targets):
            raise ValueError("ops and targets differ in length")
        if len(set(self.targets)) != len(self.targets):
            raise ValueError(f"targets {self.targets} are not distinct")

    @classmethod
    def from_kinds(cls, kinds: str, targets: Sequence[int] | None = None) -> PauliString:
        targets = range(len(kinds)) if targets is None else targets
        return cls(tuple(PauliOp(k) for k in kinds), tuple(targets))

    @property
    def kinds(self) -> str:
        return "".join(op.kind for op in self.ops)

    @property
    def weight(self) -> int:
        return sum(op.kind != "I" for op in self.ops)

    def retarget(self, targets: Sequence[int]) -> PauliString:
        return PauliString(self.ops, tuple(targets))

    def matrix(self) -> np.ndarray:
        out = np.eye(1, dtype=complex)
        for op in self.ops:
            out = np.kron(out, op.to_gate())
        return out

    def symbol(self) -> str:
        return "⊗".join(op.symbol() for op in self.ops)

    def __str__(self) -> str:
        return self.symbol()


def apply_string(s: StateVector, p: PauliString) -> StateVector:
    for op, q in zip(p.ops, p.targets):
        if op.kind == "I" and op.phase_exp == 0:
            continue
        s = apply_1q(s, op.to_gate(), q)
    return s


def enumerate_strings(width: int, max_width: int = MAX_SEARCH_WIDTH) -> Iterator[PauliString]:
    """All 4**width phase-free Pauli strings in lexicographic I<X<Y<Z order."""
    if not 0 < width <= max_width:
        raise StateError(f"search width {width} outside [1, {max_width}]")
    for kinds in itertools.product(KINDS, repeat=width):
        yield PauliString.from_kinds("".join(kinds))
