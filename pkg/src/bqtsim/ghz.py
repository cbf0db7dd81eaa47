"""
GHZ-type measurement bases.

The n-qubit basis holds the 2**n states (|s> +/- |~s>)/sqrt(2) where the seed
s has leading bit 0 and ~s is its bitwise complement. Canonical order is seed
ascending, "+" before "-", i.e. ``index = 2*seed + (sign == -1)``. Protocol
labels number seeds from one: seed 000 is eta_1, seed 001 is eta_2, and so on.
"""
from __future__ import annotations

from collections.abc import Sequence
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .statevector import (
    H,
    SQRT2_INV,
    ZERO_PROBABILITY,
    StateError,
    StateVector,
    ZeroProbabilityError,
    _split,
    apply_1q,
    apply_cnot,
    branch_probability,
    project,
)

MAX_GHZ_QUBITS = 8


@dataclass(frozen=True)
class GhzOutcome:
    n: int
    seed: int
    sign: int

    def __post_init__(self):
        if not 1 <= self.n <= MAX_GHZ_QUBITS:
            raise StateError(f"GHZ width {self.n} outside [1, {MAX_GHZ_QUBITS}]")
        if not 0 <= self.seed < 2 ** (self.n - 1):
            raise StateError(f"seed {self.seed} needs a leading 0 bit on {self.n} qubits")
        if self.sign not in (1, -1):
            raise StateError(f"sign must be +1 or -1, got {self.sign}")

    @classmethod
    def from_index(cls, n: int, index: int) -> GhzOutcome:
        if not 0 <= index < 2**n:
            raise StateError(f"outcome index {index} outside [0, {2**n})")
        return cls(n, index >> 1, -1 if index & 1 else 1)

    @property
    def canonical_index(self) -> int:
        return 2 * self.seed + (self.sign == -1)

    @property
    def seed_bits(self) -> str:
        return format(self.seed, f"0{self.n}b")

    def label(self, symbol: str = "η") -> str:
        return f"{symbol}{self.seed + 1}{'+' if self.sign == 1 else '-'}"

    def state(self) -> StateVector:
        return ghz_state(self.n, self.seed, self.sign)


@dataclass(frozen=True)
class GhzBasisState:
    outcome: GhzOutcome
    vector: StateVector

    @property
    def n(self) -> int:
        return self.outcome.n

    @property
    def seed(self) -> str:
        return self.outcome.seed_bits

    @property
    def sign(self) -> int:
        return self.outcome.sign


@lru_cache(maxsize=None)
def _ghz_amps(n: int, seed: int, sign: int) -> np.ndarray:
    amps = np.zeros(2**n, dtype=complex)
    amps[seed] = SQRT2_INV
    amps[(2**n - 1) ^ seed] = sign * SQRT2_INV
    amps.setflags(write=False)
    return amps


def ghz_state(n: int, seed: int = 0, sign: int = 1) -> StateVector:
    GhzOutcome(n, seed, sign)
    return StateVector(_ghz_amps(n, seed, sign), _checked=True)


def ghz_basis(n: int) -> list[GhzBasisState]:
    if not 1 <= n <= MAX_GHZ_QUBITS:
        raise StateError(f"GHZ width {n} outside [1, {MAX_GHZ_QUBITS}]")
    out = []
    for idx in range(2**n):
        o = GhzOutcome.from_index(n, idx)
        out.append(GhzBasisState(o, o.state()))
    return out


def basis_matrix(n: int) -> np.ndarray:
    """Columns are the basis vectors in canonical order."""
    return np.stack([b.vector.amps for b in ghz_basis(n)], axis=1)


def outcome_distribution(s: StateVector, qubits: Sequence[int]) -> np.ndarray:
    """Probability of every GHZ outcome on `qubits`, in canonical order."""
    m = _split(s, qubits)
    amps = basis_matrix(len(qubits)).conj().T @ m
    return np.sum(np.abs(amps) ** 2, axis=1)


def ghz_measure(
    s: StateVector,
    qubits: Sequence[int],
    branch: GhzOutcome | None = None,
    rng: np.random.Generator | int | None = None,
) -> tuple[GhzOutcome, float, StateVector]:
    """GHZ-basis measurement of `qubits`.

    Pass ``branch`` to force an outcome (raises ZeroProbabilityError when it
    cannot occur). Otherwise an outcome is sampled from the exact Born
    distribution, which requires an explicit ``rng`` or integer seed.
    """
    n = len(qubits)
    if branch is None:
        if rng is None:
            raise ValueError("random GHZ measurement needs an explicit rng or seed")
        rng = np.random.default_rng(rng)
        probs = outcome_distribution(s, qubits)
        probs = np.where(probs < ZERO_PROBABILITY, 0.0, probs)
        idx = int(rng.choice(len(probs), p=probs / probs.sum()))
        branch = GhzOutcome.from_index(n, idx)
    elif branch.n != n:
        raise StateError(f"outcome is for {branch.n} qubits, {n} addressed")
    p, post = project(s, qubits, branch.state())
    return branch, p, post


def ghz_decode_circuit(n: int) -> list[tuple]:
    """Gate list that maps each GHZ basis state to a computational ket.

    Entries are ``("cnot", control, target)`` or ``("h", qubit)`` on wires
    0..n-1. The basis state with seed s and sign b lands on the ket whose
    first bit is 1 iff b is "-" and whose remaining bits are those of s
    (see :func:`decoded_index`).
    """
    if n < 2:
        raise StateError("decode circuit needs at least 2 qubits")
    return [("cnot", 0, k) for k in range(1, n)] + [("h", 0)]


def decoded_index(outcome: GhzOutcome) -> int:
    """Computational-basis index the decode circuit sends `outcome` to."""
    sign_bit = 1 if outcome.sign == -1 else 0
    return (sign_bit << (outcome.n - 1)) | outcome.seed


def outcome_from_decoded(n: int, ket_index: int) -> GhzOutcome:
    sign_bit = ket_index >> (n - 1)
    return GhzOutcome(n, ket_index & (2 ** (n - 1) - 1), -1 if sign_bit else 1)


def run_circuit(s: StateVector, gates: Sequence[tuple], wires: Sequence[int]) -> StateVector:
    """Apply a decode-style gate list with local wire k mapped to ``wires[k]``."""
    for g in gates:
        if g[0] == "cnot":
            s = apply_cnot(s, wires[g[1]], wires[g[2]])
        elif g[0] == "h":
            s = apply_1q(s, H, wires[g[1]])
        else:
            raise StateError(f"unknown gate {g[0]!r}")
    return s


def inverse_circuit(gates: Sequence[tuple]) -> list[tuple]:
    # every gate used here is self-inverse
    return list(reversed(gates))


def measure_via_decode(
    s: StateVector,
    qubits: Sequence[int],
    branch: GhzOutcome | None = None,
    rng: np.random.Generator | int | None = None,
) -> tuple[GhzOutcome, float, StateVector]:
    """Same contract as :func:`ghz_measure`, realized as decode circuit,
    computational-basis measurement and re-encode."""
    n = len(qubits)
    gates = [("h", 0)] if n == 1 else ghz_decode_circuit(n)
    decoded = run_circuit(s, gates, qubits)
    m = _split(decoded, qubits)
    probs = np.sum(np.abs(m) ** 2, axis=1)
    if branch is None:
        if rng is None:
            raise ValueError("random GHZ measurement needs an explicit rng or seed")
        rng = np.random.default_rng(rng)
        p = np.where(probs < ZERO_PROBABILITY, 0.0, probs)
        ket = int(rng.choice(len(p), p=p / p.sum()))
    else:
        if branch.n != n:
            raise StateError(f"outcome is for {branch.n} qubits, {n} addressed")
        ket = decoded_index(branch)
    outcome = outcome_from_decoded(n, ket)
    onto = np.zeros(2**n, dtype=complex)
    onto[ket] = 1.0
    p, post = project(decoded, qubits, StateVector(onto, _checked=True))
    post = run_circuit(post, inverse_circuit(gates), qubits)
    return outcome, p, post


__all__ = [
    "GhzBasisState",
    "GhzOutcome",
    "basis_matrix",
    "branch_probability",
    "decoded_index",
    "ghz_basis",
    "ghz_decode_circuit",
    "ghz_measure",
    "ghz_state",
    "measure_via_decode",
    "outcome_distribution",
    "ZeroProbabilityError",
]
