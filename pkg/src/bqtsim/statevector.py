"""
Dense statevector register.

Bit ordering: register qubit 0 is the leftmost symbol of a ket and the most
significant bit of the amplitude index, so |q0 q1 ... q(n-1)> lives at
index sum(q_k * 2**(n-1-k)). Internally the amplitudes are reshaped to an
n-axis tensor of shape (2,)*n, where axis k is qubit k; C ordering gives the
MSB convention for free.

All operations return new StateVector objects; inputs are never mutated.
"""
from __future__ import annotations

from collections.abc import Sequence

import numpy as np

MAX_QUBITS = 26
GATE_ATOL = 1e-12
NORM_ATOL = 1e-12
ZERO_PROBABILITY = 1e-12

SQRT2_INV = 1 / np.sqrt(2)

I2 = np.eye(2, dtype=complex)
X = np.array([[0, 1], [1, 0]], dtype=complex)
Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
Z = np.array([[1, 0], [0, -1]], dtype=complex)
H = np.array([[1, 1], [1, -1]], dtype=complex) * SQRT2_INV
# literal "i sigma_2"
ISY = np.array([[0, 1], [-1, 0]], dtype=complex)


class StateError(ValueError):
    """Invalid register construction or gate request."""


class ZeroProbabilityError(StateError):
    """A projection onto a branch with (numerically) zero probability."""


class StateVector:
    """Normalized pure state over an ordered qubit register."""

    __slots__ = ("_amps", "_n")

    def __init__(self, amps: np.ndarray, _checked: bool = False):
        amps = np.asarray(amps, dtype=complex).reshape(-1)
        if not _checked:
            n = _width_of(len(amps))
            norm = np.linalg.norm(amps)
            if abs(norm - 1.0) > NORM_ATOL:
                raise StateError(f"amplitudes have norm {norm}, expected 1")
        else:
            n = int(len(amps)).bit_length() - 1
        self._amps = amps
        self._amps.setflags(write=False)
        self._n = n

    @property
    def num_qubits(self) -> int:
        return self._n

    @property
    def amps(self) -> np.ndarray:
        """Read-only view of the amplitude array."""
        return self._amps

    def tensor_view(self) -> np.ndarray:
        return self._amps.reshape((2,) * self._n)

    def norm(self) -> float:
        return float(np.linalg.norm(self._amps))

    def probabilities(self) -> np.ndarray:
        return np.abs(self._amps) ** 2

    def __len__(self) -> int:
        return len(self._amps)

    def __repr__(self) -> str:
        nz = np.flatnonzero(np.abs(self._amps) > 1e-12)
        terms = [f"{self._amps[i]:.4g}|{i:0{self._n}b}>" for i in nz[:8]]
        more = " + ..." if len(nz) > 8 else ""
        return f"StateVector({self._n}q: {' + '.join(terms)}{more})"


def _width_of(length: int) -> int:
    if length < 2 or length & (length - 1):
        raise StateError(f"amplitude count {length} is not a power of two >= 2")
    return length.bit_length() - 1


def _check_width(n: int) -> None:
    if not 1 <= n <= MAX_QUBITS:
        raise StateError(f"register width {n} outside [1, {MAX_QUBITS}]")


def _check_qubits(s: StateVector, qubits: Sequence[int]) -> None:
    for q in qubits:
        if not 0 <= q < s.num_qubits:
            raise StateError(f"qubit {q} out of range for {s.num_qubits}-qubit register")
    if len(set(qubits)) != len(qubits):
        raise StateError(f"qubits {list(qubits)} are not distinct")


def _wrap(amps: np.ndarray) -> StateVector:
    # gate outputs: renormalize away roundoff so the norm invariant holds
    amps = amps.reshape(-1)
    return StateVector(amps / np.linalg.norm(amps), _checked=True)


def zero_state(n: int) -> StateVector:
    _check_width(n)
    amps = np.zeros(2**n, dtype=complex)
    amps[0] = 1.0
    return StateVector(amps, _checked=True)


def basis_state(bits: str) -> StateVector:
    """Computational basis ket from a bit string, e.g. ``basis_state("011")``."""
    _check_width(len(bits))
    amps = np.zeros(2 ** len(bits), dtype=complex)
    amps[int(bits, 2)] = 1.0
    return StateVector(amps, _checked=True)


def from_amplitudes(amps, strict: bool = False) -> StateVector:
    """Build a state from raw amplitudes, renormalizing exactly.

    With ``strict=True`` the input norm must already be within 1e-9 of 1.
    """
    amps = np.asarray(amps, dtype=complex).reshape(-1)
    n = _width_of(len(amps))
    _check_width(n)
    norm = np.linalg.norm(amps)
    if norm == 0 or not np.isfinite(norm):
        raise StateError("cannot normalize a zero (or non-finite) vector")
    if strict and abs(norm - 1.0) > 1e-9:
        raise StateError(f"amplitudes have norm {norm}, expected 1 within 1e-9")
    return StateVector(amps / norm, _checked=True)


def tensor(a: StateVector, *rest: StateVector) -> StateVector:
    """Kronecker product; earlier arguments occupy the lower register indices."""
    out = a.amps
    width = a.num_qubits
    for b in rest:
        width += b.num_qubits
        _check_width(width)
        out = np.kron(out, b.amps)
    return StateVector(out.copy(), _checked=True)


def check_unitary(g: np.ndarray, dim: int = 2) -> np.ndarray:
    g = np.asarray(g, dtype=complex)
    if g.shape != (dim, dim):
        raise StateError(f"gate shape {g.shape}, expected {(dim, dim)}")
    if not np.allclose(g @ g.conj().T, np.eye(dim), rtol=0, atol=GATE_ATOL):
        raise StateError("gate is not unitary")
    return g


def apply_1q(s: StateVector, g: np.ndarray, q: int) -> StateVector:
    g = check_unitary(g)
    _check_qubits(s, [q])
    t = np.tensordot(g, s.tensor_view(), axes=([1], [q]))
    return _wrap(np.moveaxis(t, 0, q))


def _controlled_x(s: StateVector, controls: Sequence[int], target: int) -> StateVector:
    _check_qubits(s, [*controls, target])
    t = np.array(s.tensor_view())
    sel: list = [slice(None)] * s.num_qubits
    for c in controls:
        sel[c] = 1
    sel[target] = 0
    lo = tuple(sel)
    sel[target] = 1
    hi = tuple(sel)
    t[lo], t[hi] = t[hi].copy(), t[lo].copy()
    return StateVector(t.reshape(-1), _checked=True)


def apply_cnot(s: StateVector, control: int, target: int) -> StateVector:
    return _controlled_x(s, [control], target)


def apply_toffoli(s: StateVector, c1: int, c2: int, target: int) -> StateVector:
    return _controlled_x(s, [c1, c2], target)


def fidelity(a: StateVector, b: StateVector) -> float:
    """|<a|b>|^2; blind to global phase."""
    if a.num_qubits != b.num_qubits:
        raise StateError(f"width mismatch: {a.num_qubits} vs {b.num_qubits}")
    return float(min(1.0, abs(np.vdot(a.amps, b.amps)) ** 2))


def _split(s: StateVector, qubits: Sequence[int]) -> np.ndarray:
    """Matrix view M[m, r]: measured qubits (in the given order) by the rest."""
    _check_qubits(s, qubits)
    rest = [k for k in range(s.num_qubits) if k not in qubits]
    t = np.transpose(s.tensor_view(), [*qubits, *rest])
    return t.reshape(2 ** len(qubits), 2 ** len(rest))


def _check_onto(qubits: Sequence[int], onto: StateVector) -> None:
    if onto.num_qubits != len(qubits):
        raise StateError(
            f"projector acts on {onto.num_qubits} qubits but {len(qubits)} were addressed"
        )


def _merge(s: StateVector, qubits: Sequence[int], onto: StateVector, rest: np.ndarray) -> np.ndarray:
    # rebuild the full register with the measured subsystem set to `onto`
    n = s.num_qubits
    order = [*qubits, *(q for q in range(n) if q not in qubits)]
    t = np.outer(onto.amps, rest).reshape((2,) * n)
    return np.transpose(t, np.argsort(order)).reshape(-1)


def branch_probability(s: StateVector, qubits: Sequence[int], onto: StateVector) -> float:
    """<onto| rho_qubits |onto>, the weight of `onto` on the addressed qubits.

    Equals the subsystem fidelity when `onto` is a pure target state.
    """
    _check_onto(qubits, onto)
    m = _split(s, qubits)
    rest = onto.amps.conj() @ m
    return float(np.vdot(rest, rest).real)


def project(s: StateVector, qubits: Sequence[int], onto: StateVector) -> tuple[float, StateVector]:
    """Project the addressed qubits onto `onto`.

    Returns the branch probability and the renormalized post-measurement
    state on the full register.
    """
    _check_onto(qubits, onto)
    m = _split(s, qubits)
    rest = onto.amps.conj() @ m
    p = float(np.vdot(rest, rest).real)
    if p < ZERO_PROBABILITY:
        raise ZeroProbabilityError(f"branch probability {p:.3g} is zero")
    rest = rest / np.sqrt(p)
    return p, StateVector(_merge(s, qubits, onto, rest), _checked=True)


def contract(s: StateVector, qubits: Sequence[int], known: StateVector, atol: float = 1e-10) -> StateVector:
    """Drop qubits known to be in the product state `known`.

    The remaining qubits keep their relative order. Raises if the addressed
    subsystem is not (within `atol`) exactly `known` in tensor product with
    the rest.
    """
    _check_onto(qubits, known)
    if len(qubits) == s.num_qubits:
        raise StateError("cannot contract away every qubit")
    rest = known.amps.conj() @ _split(s, qubits)
    p = float(np.vdot(rest, rest).real)
    if abs(p - 1.0) > atol:
        raise StateError(f"subsystem is not in the stated product state (weight {p:.6g})")
    return StateVector(rest / np.sqrt(p), _checked=True)


def is_product_zero(s: StateVector, q: int) -> bool:
    _check_qubits(s, [q])
    sel: list = [slice(None)] * s.num_qubits
    sel[q] = 1
    return bool(np.all(np.abs(s.tensor_view()[tuple(sel)]) < 1e-12))


def discard_qubit(s: StateVector, q: int) -> StateVector:
    """Remove a qubit sitting in |0>; qubits above `q` shift down by one."""
    if s.num_qubits < 2:
        raise StateError("cannot discard the last qubit of a register")
    if not is_product_zero(s, q):
        raise StateError(f"qubit {q} is not separable in |0>")
    sel: list = [slice(None)] * s.num_qubits
    sel[q] = 0
    return StateVector(np.array(s.tensor_view()[tuple(sel)]).reshape(-1), _checked=True)


def permute(s: StateVector, order: Sequence[int]) -> StateVector:
    """Reorder wires: new qubit k is old qubit ``order[k]``."""
    if sorted(order) != list(range(s.num_qubits)):
        raise StateError(f"{list(order)} is not a permutation of the register")
    t = np.transpose(s.tensor_view(), list(order))
    return StateVector(np.ascontiguousarray(t).reshape(-1), _checked=True)
