"""
Two-party symmetric bidirectional teleportation over a 2n-qubit cluster channel.

Register conventions
--------------------
Channel qubits carry the labels "1" .. "2n" and sit in that order inside the
channel state (label k is channel index k-1). Alice's input wires are
"a1" .. "an", Bob's "b1" .. "bn"; the recovery ancillas are "A" (Alice) and
"B" (Bob). Alice holds channel qubits 1, n+1, ..., 2n-1 and Bob holds
2, ..., n, 2n.

A run goes:

1. each party folds its n-qubit input a|0..0> + b|1..1> into n-1 qubits with
   one Toffoli (a CNOT when n == 2) and drops the freed wire;
2. each party GHZ-measures its compressed input together with one channel
   qubit and sends the 2-bit outcome code to the other;
3. each party applies the Pauli correction chosen by the other side's outcome;
4. each party appends a fresh |0> ancilla and undoes the fold with one more
   Toffoli.

Alice ends up with Bob's state on (n+1 .. 2n-1, A) and Bob with Alice's on
(2 .. n, B).
"""
from __future__ import annotations

import json
from collections.abc import Mapping, Sequence
from dataclasses import asdict, dataclass, field
from functools import lru_cache

import numpy as np

from .ghz import GhzOutcome, ghz_measure
from .pauli import PauliString, apply_string
from .statevector import (
    StateError,
    StateVector,
    apply_cnot,
    apply_toffoli,
    branch_probability,
    contract,
    discard_qubit,
    is_product_zero,
    tensor,
    zero_state,
)

MIN_N, MAX_N = 2, 6
ALICE, BOB, SOURCE = "alice", "bob", "source"
MESSAGE_BITS = 2
SUCCESS_ATOL = 1e-10


class ProtocolError(RuntimeError):
    """The protocol reached a state it should never reach."""


class LocalityViolation(ProtocolError):
    """A party tried to act on a qubit it does not hold."""


def _check_n(n: int) -> None:
    if not MIN_N <= n <= MAX_N:
        raise ValueError(f"qubits per direction must be in [{MIN_N}, {MAX_N}], got {n}")


@dataclass(frozen=True)
class InputCoefficients:
    alpha: complex
    beta: complex
    gamma: complex
    delta: complex

    def __post_init__(self):
        for name in ("alpha", "beta", "gamma", "delta"):
            object.__setattr__(self, name, complex(getattr(self, name)))
        for a, b, who in ((self.alpha, self.beta, "alpha, beta"), (self.gamma, self.delta, "gamma, delta")):
            norm = abs(a) ** 2 + abs(b) ** 2
            if abs(norm - 1.0) > 1e-12:
                raise ValueError(f"|{who}|^2 sum to {norm}, expected 1")

    @classmethod
    def normalized(cls, alpha, beta, gamma, delta) -> InputCoefficients:
        na = np.sqrt(abs(alpha) ** 2 + abs(beta) ** 2)
        nb = np.sqrt(abs(gamma) ** 2 + abs(delta) ** 2)
        if na == 0 or nb == 0:
            raise ValueError("coefficient pair is zero")
        return cls(alpha / na, beta / na, gamma / nb, delta / nb)

    @classmethod
    def random(cls, rng: np.random.Generator | int | None) -> InputCoefficients:
        """Each pair uniform on the unit 3-sphere of (Re, Im, Re, Im)."""
        rng = np.random.default_rng(rng)
        a = rng.standard_normal(4)
        b = rng.standard_normal(4)
        a /= np.linalg.norm(a)
        b /= np.linalg.norm(b)
        return cls.normalized(
            complex(a[0], a[1]), complex(a[2], a[3]), complex(b[0], b[1]), complex(b[2], b[3])
        )

    def pair(self, party: str) -> tuple[complex, complex]:
        return (self.alpha, self.beta) if party == ALICE else (self.gamma, self.delta)

    def to_dict(self) -> dict:
        return {k: [v.real, v.imag] for k, v in asdict(self).items()}

    @classmethod
    def from_dict(cls, d: Mapping) -> InputCoefficients:
        return cls(**{k: complex(*d[k]) for k in ("alpha", "beta", "gamma", "delta")})


# ---------------------------------------------------------------------------
# layout and state preparation
# ---------------------------------------------------------------------------


def qubit_layout(n: int) -> tuple[tuple[int, ...], tuple[int, ...]]:
    """Channel labels held by (Alice, Bob)."""
    _check_n(n)
    alice = (1, *range(n + 1, 2 * n))
    bob = (*range(2, n + 1), 2 * n)
    return alice, bob


def recovery_labels(n: int) -> tuple[tuple[str, ...], tuple[str, ...]]:
    """Output wires of (Alice, Bob) after the final expansion."""
    _check_n(n)
    alice = (*(str(k) for k in range(n + 1, 2 * n)), "A")
    bob = (*(str(k) for k in range(2, n + 1)), "B")
    return alice, bob


def build_cluster_channel(n: int) -> StateVector:
    """(|0^n 0^n> + |0^n 1^n> + |1^n 0^n> + |1^n 1^n>) / 2 on 2n qubits."""
    _check_n(n)
    ones = 2**n - 1
    amps = np.zeros(4**n, dtype=complex)
    for hi in (0, ones):
        for lo in (0, ones):
            amps[(hi << n) | lo] = 0.5
    return StateVector(amps, _checked=True)


def ghz_class_state(a: complex, b: complex, width: int) -> StateVector:
    amps = np.zeros(2**width, dtype=complex)
    amps[0] = a
    amps[-1] = b
    return StateVector(amps)


def prepare_input(kind: str, c: InputCoefficients, n: int) -> StateVector:
    """a|0..0> + b|1..1> on n qubits, with (a, b) = (alpha, beta) for Alice."""
    if kind not in (ALICE, BOB):
        raise ValueError(f"unknown party {kind!r}")
    return ghz_class_state(*c.pair(kind), n)


# ---------------------------------------------------------------------------
# transcript
# ---------------------------------------------------------------------------


@dataclass
class Event:
    step: str
    kind: str
    party: str
    qubits: list[str]
    detail: dict = field(default_factory=dict)


@dataclass
class ClassicalMessage:
    sender: str
    outcome: str
    bits: str

    def decode(self, n: int) -> GhzOutcome:
        return decode_outcome(self.bits, n)


def encode_outcome(o: GhzOutcome) -> str:
    """Two-bit code of an outcome; only the seeds 0..0 and 0..01 can occur."""
    if o.canonical_index >= 2**MESSAGE_BITS:
        raise ProtocolError(f"outcome {o.label()} cannot occur in this protocol")
    return format(o.canonical_index, f"0{MESSAGE_BITS}b")


def decode_outcome(bits: str, n: int) -> GhzOutcome:
    if len(bits) != MESSAGE_BITS or set(bits) - {"0", "1"}:
        raise ProtocolError(f"malformed outcome code {bits!r}")
    return GhzOutcome.from_index(n, int(bits, 2))


@dataclass
class ProtocolTranscript:
    n: int
    coefficients: InputCoefficients
    seed: int | None
    ownership: dict[str, str]
    events: list[Event] = field(default_factory=list)
    messages: list[ClassicalMessage] = field(default_factory=list)
    corrections: list[dict] = field(default_factory=list)
    fidelity_alice: float = float("nan")
    fidelity_bob: float = float("nan")
    peak_width: int = 0

    def gates(self, name: str | None = None) -> list[Event]:
        return [e for e in self.events if e.kind == "gate" and (name is None or e.detail["gate"] == name)]

    @property
    def toffoli_count(self) -> int:
        return len(self.gates("toffoli"))

    @property
    def classical_bits(self) -> int:
        return sum(len(m.bits) for m in self.messages)

    @property
    def succeeded(self) -> bool:
        return self.fidelity_alice > 1 - SUCCESS_ATOL and self.fidelity_bob > 1 - SUCCESS_ATOL

    def locality_violations(self) -> list[Event]:
        """Gates or measurements touching a qubit the acting party does not hold."""
        bad = []
        for e in self.events:
            if e.kind in ("gate", "measure", "correction") and any(
                self.ownership.get(q) != e.party for q in e.qubits
            ):
                bad.append(e)
        return bad

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "seed": self.seed,
            "coefficients": self.coefficients.to_dict(),
            "ownership": self.ownership,
            "events": [asdict(e) for e in self.events],
            "messages": [asdict(m) for m in self.messages],
            "corrections": self.corrections,
            "fidelity_alice": self.fidelity_alice,
            "fidelity_bob": self.fidelity_bob,
            "toffoli_count": self.toffoli_count,
            "classical_bits": self.classical_bits,
            "peak_width": self.peak_width,
        }

    def to_json(self, **kw) -> str:
        return json.dumps(self.to_dict(), ensure_ascii=False, **kw)

    @classmethod
    def from_dict(cls, d: Mapping) -> ProtocolTranscript:
        t = cls(
            n=d["n"],
            coefficients=InputCoefficients.from_dict(d["coefficients"]),
            seed=d["seed"],
            ownership=dict(d["ownership"]),
            events=[Event(**e) for e in d["events"]],
            messages=[ClassicalMessage(**m) for m in d["messages"]],
            corrections=list(d["corrections"]),
            fidelity_alice=d["fidelity_alice"],
            fidelity_bob=d["fidelity_bob"],
            peak_width=d.get("peak_width", 0),
        )
        if t.toffoli_count != d["toffoli_count"] or t.classical_bits != d["classical_bits"]:
            raise ValueError("transcript counts disagree with its event log")
        return t

    @classmethod
    def from_json(cls, text: str) -> ProtocolTranscript:
        return cls.from_dict(json.loads(text))


# ---------------------------------------------------------------------------
# correction tables
# ---------------------------------------------------------------------------

ADMISSIBLE = tuple(range(4))


@dataclass
class CorrectionTable:
    """(Alice outcome index, Bob outcome index) -> (Alice's string, Bob's string).

    Strings are addressed relative to the party's recovered block: position k
    of Alice's string acts on channel qubit n+1+k, position k of Bob's on
    channel qubit 2+k.
    """

    n: int
    entries: dict[tuple[int, int], tuple[PauliString, PauliString]]
    provenance: dict[tuple[int, int], str] = field(default_factory=dict)

    def missing(self) -> list[tuple[int, int]]:
        return [(a, b) for a in ADMISSIBLE for b in ADMISSIBLE if (a, b) not in self.entries]

    def is_complete(self) -> bool:
        return not self.missing()

    def lookup(self, alice: GhzOutcome, bob: GhzOutcome) -> tuple[PauliString, PauliString]:
        key = (alice.canonical_index, bob.canonical_index)
        try:
            return self.entries[key]
        except KeyError:
            raise ProtocolError(f"no correction for outcomes {key}") from None

    def same_kinds(self, other: CorrectionTable) -> bool:
        if self.entries.keys() != other.entries.keys():
            return False
        return all(
            (pa.kinds, pb.kinds) == (qa.kinds, qb.kinds)
            for key, (pa, pb) in self.entries.items()
            for qa, qb in [other.entries[key]]
        )


@lru_cache(maxsize=None)
def default_table(n: int) -> CorrectionTable:
    from .oracle import derive_correction_table

    return derive_correction_table(n)


# ---------------------------------------------------------------------------
# engine
# ---------------------------------------------------------------------------


class _Register:
    """Labelled joint register that enforces per-party locality."""

    def __init__(self, state: StateVector, labels: Sequence[str], ownership: dict[str, str], log: list[Event]):
        self.state = state
        self.labels = list(labels)
        self.ownership = ownership
        self.log = log
        self.peak = state.num_qubits

    def idx(self, label: str) -> int:
        return self.labels.index(label)

    def check_local(self, party: str, labels: Sequence[str]) -> None:
        foreign = [q for q in labels if self.ownership.get(q) != party]
        if foreign:
            raise LocalityViolation(f"{party} cannot act on {foreign}")

    def gate(self, step: str, party: str, name: str, labels: Sequence[str]) -> None:
        self.check_local(party, labels)
        ix = [self.idx(q) for q in labels]
        if name == "toffoli":
            self.state = apply_toffoli(self.state, *ix)
        elif name == "cnot":
            self.state = apply_cnot(self.state, *ix)
        else:
            raise StateError(f"unknown gate {name!r}")
        self.log.append(Event(step, "gate", party, list(labels), {"gate": name}))

    def append(self, other: StateVector, labels: Sequence[str]) -> None:
        self.state = tensor(self.state, other)
        self.labels += list(labels)
        self.peak = max(self.peak, self.state.num_qubits)

    def drop(self, step: str, party: str, labels: Sequence[str], known: StateVector) -> None:
        ix = [self.idx(q) for q in labels]
        self.state = contract(self.state, ix, known)
        for q in labels:
            self.labels.remove(q)
        self.log.append(Event(step, "release", party, list(labels), {}))


def _compress_wires(party: str, n: int) -> list[str]:
    p = "a" if party == ALICE else "b"
    if n == 2:
        return [f"{p}1", f"{p}2"]
    return [f"{p}{n - 2}", f"{p}{n - 1}", f"{p}{n}"]


def step1_compress(party: str, state: StateVector, n: int) -> tuple[StateVector, list[Event]]:
    """Fold a party's n-qubit input into n-1 qubits and drop the freed wire.

    For n >= 3 this is a Toffoli controlled by the two wires before the last;
    for n == 2 a CNOT is the only gate that fits.
    """
    _check_n(n)
    if state.num_qubits != n:
        raise StateError(f"{party}'s input has {state.num_qubits} qubits, expected {n}")
    wires = _compress_wires(party, n)
    labels = [f"{'a' if party == ALICE else 'b'}{k}" for k in range(1, n + 1)]
    owners = {q: party for q in labels}
    log: list[Event] = []
    reg = _Register(state, labels, owners, log)
    reg.gate("I", party, "toffoli" if n >= 3 else "cnot", wires)
    target = reg.idx(wires[-1])
    if not is_product_zero(reg.state, target):
        raise ProtocolError(f"{party}'s input did not factor out |0> on {wires[-1]}")
    out = discard_qubit(reg.state, target)
    log.append(Event("I", "release", party, [wires[-1]], {}))
    return out, log


def run_bqt(
    n: int,
    c: InputCoefficients,
    branches: tuple[GhzOutcome | int, GhzOutcome | int] | None = None,
    seed: int | None = None,
    table: CorrectionTable | None = None,
) -> ProtocolTranscript:
    """Execute one run and return its transcript.

    ``branches`` forces (Alice's, Bob's) GHZ outcomes, given as outcomes or
    canonical indices; without it both are sampled from ``seed``. The default
    correction table is the brute-force derived one.
    """
    _check_n(n)
    if branches is None and seed is None:
        raise ValueError("either forced branches or an RNG seed is required")
    table = default_table(n) if table is None else table
    if table.n != n:
        raise ProtocolError(f"correction table is for n={table.n}, run has n={n}")
    if not table.is_complete():
        raise ProtocolError(f"correction table is missing rows {table.missing()}")
    forced = None
    if branches is not None:
        forced = tuple(b if isinstance(b, GhzOutcome) else GhzOutcome.from_index(n, b) for b in branches)
    rng = np.random.default_rng(seed)

    alice_ch, bob_ch = qubit_layout(n)
    ownership = {str(k): ALICE for k in alice_ch} | {str(k): BOB for k in bob_ch}
    for k in range(1, n + 1):
        ownership[f"a{k}"] = ALICE
        ownership[f"b{k}"] = BOB
    ownership |= {"A": ALICE, "B": BOB}

    tr = ProtocolTranscript(n=n, coefficients=c, seed=seed, ownership=ownership)
    log = tr.events
    channel_labels = [str(k) for k in range(1, 2 * n + 1)]
    log.append(Event("0", "prepare", SOURCE, channel_labels, {"state": "cluster"}))
    log.append(
        Event("0", "distribute", SOURCE, channel_labels, {"alice": list(map(str, alice_ch)), "bob": list(map(str, bob_ch))})
    )

    # Step I: local folding, done before the inputs join the simulated register
    compressed = {}
    for party in (ALICE, BOB):
        p = "a" if party == ALICE else "b"
        log.append(Event("I", "prepare", party, [f"{p}{k}" for k in range(1, n + 1)], {"state": "input"}))
        compressed[party], ev = step1_compress(party, prepare_input(party, c, n), n)
        log.extend(ev)

    labels = (
        [f"a{k}" for k in range(1, n)] + [f"b{k}" for k in range(1, n)] + channel_labels
    )
    reg = _Register(tensor(compressed[ALICE], compressed[BOB], build_cluster_channel(n)), labels, ownership, log)

    # Step II: GHZ measurements, then one 2-bit message each way
    measured = {
        ALICE: [f"a{k}" for k in range(1, n)] + ["1"],
        BOB: [f"b{k}" for k in range(1, n)] + [str(2 * n)],
    }
    outcomes = {}
    for i, party in enumerate((ALICE, BOB)):
        wires = measured[party]
        reg.check_local(party, wires)
        branch = forced[i] if forced else None
        o, prob, post = ghz_measure(reg.state, [reg.idx(q) for q in wires], branch=branch, rng=rng)
        reg.state = post
        outcomes[party] = o
        sym = "η" if party == ALICE else "ζ"
        log.append(
            Event("II", "measure", party, wires, {"basis": "ghz", "outcome": o.label(sym), "index": o.canonical_index, "probability": prob})
        )
        reg.drop("II", party, wires, o.state())
    for party, sym in ((ALICE, "η"), (BOB, "ζ")):
        o = outcomes[party]
        msg = ClassicalMessage(party, o.label(sym), encode_outcome(o))
        tr.messages.append(msg)
        log.append(Event("II", "send", party, [], {"bits": msg.bits, "to": BOB if party == ALICE else ALICE}))

    # Step III: each party corrects according to the message it received
    received = {ALICE: tr.messages[1].decode(n), BOB: tr.messages[0].decode(n)}
    fix_alice, fix_bob = table.lookup(received[BOB], received[ALICE])
    blocks = {
        ALICE: [str(k) for k in range(n + 1, 2 * n)],
        BOB: [str(k) for k in range(2, n + 1)],
    }
    for party, fix in ((ALICE, fix_alice), (BOB, fix_bob)):
        wires = blocks[party]
        if len(fix.ops) != len(wires):
            raise ProtocolError(f"correction {fix} does not fit {party}'s {len(wires)} qubits")
        reg.check_local(party, wires)
        reg.state = apply_string(reg.state, fix.retarget([reg.idx(q) for q in wires]))
        entry = {"party": party, "qubits": wires, "operator": fix.symbol(), "kinds": fix.kinds}
        tr.corrections.append(entry)
        log.append(Event("III", "correction", party, wires, {"operator": fix.symbol()}))

    # Step IV: fresh ancilla and one unfolding gate per party
    for party, anc in ((ALICE, "A"), (BOB, "B")):
        reg.append(zero_state(1), [anc])
        log.append(Event("IV", "prepare", party, [anc], {"state": "|0>"}))
        ctrl = blocks[party][-2:] if n >= 3 else blocks[party][-1:]
        reg.gate("IV", party, "toffoli" if n >= 3 else "cnot", [*ctrl, anc])

    out_alice, out_bob = recovery_labels(n)
    tr.fidelity_alice = branch_probability(
        reg.state, [reg.idx(q) for q in out_alice], prepare_input(BOB, c, n)
    )
    tr.fidelity_bob = branch_probability(
        reg.state, [reg.idx(q) for q in out_bob], prepare_input(ALICE, c, n)
    )
    tr.peak_width = reg.peak
    if tr.locality_violations():
        raise LocalityViolation("transcript contains non-local operations")
    return tr


def run_all_branches(n: int, c: InputCoefficients, table: CorrectionTable | None = None) -> list[ProtocolTranscript]:
    """Forced runs over all 16 admissible outcome pairs, canonical order."""
    return [run_bqt(n, c, branches=(a, b), table=table) for a in ADMISSIBLE for b in ADMISSIBLE]

