"""Exhaustive execution and auditing of two-party key-agreement protocols.

Alice holds the point of a uniformly random edge, Bob holds the polynomial.
A protocol alternates turns (starting with ``first``); on its turn a party
returns a bit string or :data:`HALT`.  Empty strings are legal "pass"
messages.  The transcript records every message with its sender and is
encoded with per-message length framing, e.g. ``A2:01|B0:|``.

Execution enumerates every (edge, public coins, Alice's coins, Bob's coins)
branch with equal weight and returns a :class:`~wellmix.info.JointTable`
over ``X, Y, R_pub, R_A, R_B, T, Z``.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field
from typing import Any, Callable, Hashable, NamedTuple

from .errors import KeyDisagreement, MissingVariable, NonHalting, TooLargeToMaterialize
from .field import eval_poly
from .graph import GraphSpec, Point, Poly, enumerate_edges
from .info import JointTable, entropy, exact_independent, mutual_info, triple_info

HALT = None
ALICE, BOB = "alice", "bob"
MAX_BRANCHES = 1 << 24
MAX_RAND_BITS = 8
DEFAULT_EPS = 0.01
DEFAULT_DELTA = 1.0
VARIABLES = ("X", "Y", "R_pub", "R_A", "R_B", "T", "Z")


class Message(NamedTuple):
    sender: str
    bits: str


# next_message(role, own_input, own_priv, pub, transcript) -> str | HALT
NextMessage = Callable[[str, Any, int, int, tuple], "str | None"]
# key_fn(role, own_input, own_priv, pub, transcript) -> key
KeyFn = Callable[[str, Any, int, int, tuple], Hashable]


@dataclass(frozen=True)
class ProtocolSpec:
    name: str
    next_message: NextMessage
    key_fn: KeyFn
    max_rounds: int = 16
    m_priv: int = 0
    pub_bits: int = 0
    first: str = ALICE
    description: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        if not 0 <= self.m_priv <= MAX_RAND_BITS:
            raise ValueError(f"private randomness must be 0..{MAX_RAND_BITS} bits")
        if not 0 <= self.pub_bits <= MAX_RAND_BITS:
            raise ValueError(f"public randomness must be 0..{MAX_RAND_BITS} bits")
        if self.first not in (ALICE, BOB):
            raise ValueError(f"first speaker must be {ALICE!r} or {BOB!r}")


def encode_transcript(transcript: tuple[Message, ...]) -> str:
    return "".join(f"{'A' if m.sender == ALICE else 'B'}{len(m.bits)}:{m.bits}|" for m in transcript)


def decode_transcript(encoded: str) -> tuple[Message, ...]:
    out = []
    pos = 0
    while pos < len(encoded):
        tag = encoded[pos]
        colon = encoded.index(":", pos)
        length = int(encoded[pos + 1:colon])
        bits = encoded[colon + 1:colon + 1 + length]
        if encoded[colon + 1 + length] != "|":
            raise ValueError(f"bad framing at offset {pos}")
        out.append(Message(ALICE if tag == "A" else BOB, bits))
        pos = colon + 2 + length
    return tuple(out)


def bit_counts(encoded: str) -> tuple[int, int]:
    """Payload bits sent by (Alice, Bob); framing is not counted."""
    a = b = 0
    for m in decode_transcript(encoded):
        if m.sender == ALICE:
            a += len(m.bits)
        else:
            b += len(m.bits)
    return a, b


def run_branch(spec: GraphSpec, protocol: ProtocolSpec, point: Point, poly: Poly,
               pub: int, r_a: int, r_b: int):
    """Run one branch; returns ``(transcript, key)``."""
    transcript: tuple[Message, ...] = ()
    views = {ALICE: (point, r_a), BOB: (poly, r_b)}
    speaker = protocol.first
    for _ in range(protocol.max_rounds + 1):
        own, priv = views[speaker]
        msg = protocol.next_message(speaker, own, priv, pub, transcript)
        if msg is HALT:
            break
        if not isinstance(msg, str) or set(msg) - {"0", "1"}:
            raise ValueError(f"{protocol.name}: {speaker} produced non-binary message {msg!r}")
        transcript += (Message(speaker, msg),)
        if len(transcript) > protocol.max_rounds:
            raise NonHalting(f"{protocol.name} exceeded {protocol.max_rounds} rounds on "
                             f"{(point, poly, pub, r_a, r_b)}")
        speaker = BOB if speaker == ALICE else ALICE
    key_a = protocol.key_fn(ALICE, point, r_a, pub, transcript)
    key_b = protocol.key_fn(BOB, poly, r_b, pub, transcript)
    if key_a != key_b:
        raise KeyDisagreement({"X": point, "Y": poly, "R_pub": pub, "R_A": r_a, "R_B": r_b},
                              key_a, key_b)
    return transcript, key_a


def execute_all(spec: GraphSpec, protocol: ProtocolSpec) -> JointTable:
    """Run every branch and collect the joint table of inputs, coins, transcript and key."""
    branches = spec.n_edges << (protocol.pub_bits + 2 * protocol.m_priv)
    if branches > MAX_BRANCHES:
        raise TooLargeToMaterialize(f"{branches} branches exceed {MAX_BRANCHES}")
    rows = {}
    n_pub, n_priv = 1 << protocol.pub_bits, 1 << protocol.m_priv
    for point, poly in enumerate_edges(spec):
        for pub in range(n_pub):
            for r_a in range(n_priv):
                for r_b in range(n_priv):
                    t, z = run_branch(spec, protocol, point, poly, pub, r_a, r_b)
                    rows[(point, poly, pub, r_a, r_b, encode_transcript(t), z)] = 1
    return JointTable(VARIABLES, rows)


# -- built-in protocols -----------------------------------------------------

def _bits(value: int, width: int) -> str:
    return format(value, f"0{width}b") if width else ""


def _unbits(s: str) -> int:
    return int(s, 2) if s else 0


def _last_from(transcript, sender):
    for m in reversed(transcript):
        if m.sender == sender:
            return m.bits
    return None


def protocol_point_first(spec: GraphSpec) -> ProtocolSpec:
    """Alice sends x1; the key is x2."""
    F, w = spec.field, spec.field.bit_width

    def next_message(role, own, priv, pub, t):
        if role == ALICE and not t:
            return _bits(own.x1, w)
        return HALT

    def key_fn(role, own, priv, pub, t):
        if role == ALICE:
            return own.x2
        return eval_poly(F, own.coeffs, _unbits(t[0].bits))

    return ProtocolSpec("point_first", next_message, key_fn, max_rounds=1,
                        description={"kind": "point_first"})


def protocol_poly_coeffs(spec: GraphSpec) -> ProtocolSpec:
    """Bob sends s_1..s_d; the key is s_0."""
    F, w, d = spec.field, spec.field.bit_width, spec.d

    def next_message(role, own, priv, pub, t):
        if role == BOB and not t:
            return "".join(_bits(c, w) for c in own.coeffs[1:])
        return HALT

    def key_fn(role, own, priv, pub, t):
        if role == BOB:
            return own.coeffs[0]
        payload = t[0].bits
        higher = tuple(_unbits(payload[i * w:(i + 1) * w]) for i in range(d))
        return F.sub(own.x2, eval_poly(F, (0,) + higher, own.x1))

    return ProtocolSpec("poly_coeffs", next_message, key_fn, max_rounds=1, first=BOB,
                        description={"kind": "poly_coeffs"})


def protocol_timeshare(spec: GraphSpec) -> ProtocolSpec:
    """One public coin picks point_first (0) or poly_coeffs (1).

    Alice always opens; under coin 1 she passes with an empty message and
    Bob then sends his coefficients.
    """
    a = protocol_point_first(spec)
    b = protocol_poly_coeffs(spec)

    def next_message(role, own, priv, pub, t):
        if pub == 0:
            return a.next_message(role, own, priv, pub, t)
        if not t:
            return ""
        return b.next_message(role, own, priv, pub, t[1:])

    def key_fn(role, own, priv, pub, t):
        if pub == 0:
            return a.key_fn(role, own, priv, pub, t)
        return b.key_fn(role, own, priv, pub, t[1:])

    return ProtocolSpec("timeshare", next_message, key_fn, max_rounds=2, pub_bits=1,
                        description={"kind": "timeshare"})


def builtin_protocols(spec: GraphSpec) -> dict[str, ProtocolSpec]:
    return {
        "point_first": protocol_point_first(spec),
        "poly_coeffs": protocol_poly_coeffs(spec),
        "timeshare": protocol_timeshare(spec),
    }


def _digest(seed: int, *parts) -> int:
    h = hashlib.blake2b(repr((seed,) + parts).encode(), digest_size=8)
    return int.from_bytes(h.digest(), "big")


def random_protocol(spec: GraphSpec, seed: int, rounds: int = 3, msg_bits: int = 2,
                    m_priv: int = 1, pub_bits: int = 0, key_values: int = 4) -> ProtocolSpec:
    """Pseudorandom protocol for property tests.

    Every message (length and content) and every halting decision is a keyed
    hash of the speaker's view, so the same seed always yields the same
    protocol.  The key is a hash of the public view, which both parties share.
    """

    def next_message(role, own, priv, pub, t):
        h = _digest(seed, "msg", role, own, priv, pub, t)
        if len(t) >= rounds or (t and h % 5 == 0):
            return HALT
        length = (h >> 3) % (msg_bits + 1)
        return _bits((h >> 8) % (1 << length), length) if length else ""

    def key_fn(role, own, priv, pub, t):
        return _digest(seed, "key", pub, t) % key_values

    return ProtocolSpec(f"random_{seed}", next_message, key_fn, max_rounds=rounds,
                        m_priv=m_priv, pub_bits=pub_bits,
                        description={"kind": "random", "seed": seed, "rounds": rounds,
                                     "msg_bits": msg_bits, "m_priv": m_priv,
                                     "pub_bits": pub_bits, "key_values": key_values})


def protocol_from_json(spec: GraphSpec, data: dict | str) -> ProtocolSpec:
    """Build a protocol from ``{"kind": ...}``; kinds are the built-ins and ``random``."""
    if isinstance(data, str):
        data = json.loads(data)
    data = dict(data)
    kind = data.pop("kind", None) or data.pop("name", None)
    builtins = builtin_protocols(spec)
    if kind in builtins:
        if data:
            raise ValueError(f"built-in protocol {kind!r} takes no parameters, got {sorted(data)}")
        return builtins[kind]
    if kind == "random":
        return random_protocol(spec, **data)
    raise ValueError(f"unknown protocol kind {kind!r}")


# -- audit -----------------------------------------------------------------------

@dataclass(frozen=True)
class Branch:
    x: Point
    y: Poly
    pub: int
    r_a: int
    r_b: int
    bits_a: int
    bits_b: int

    def to_dict(self) -> dict:
        return {"input": {"x": list(self.x), "y": list(self.y.coeffs)},
                "rand": {"pub": self.pub, "a": self.r_a, "b": self.r_b},
                "bits_A": self.bits_a, "bits_B": self.bits_b}


@dataclass(frozen=True)
class ProtocolAudit:
    correct: bool
    H_key: float
    leakage_bits: float
    leakage_exact_independent: bool
    triple_info_T: float
    branches: list[Branch]
    branch_coverage: float
    expected_bits_A: float
    expected_bits_B: float
    verdict: str
    n: float
    d: int
    eps: float
    delta: float

    @property
    def max_bits_A(self) -> int:
        return max(b.bits_a for b in self.branches)

    @property
    def max_bits_B(self) -> int:
        return max(b.bits_b for b in self.branches)

    def to_dict(self) -> dict:
        return {
            "correct": self.correct,
            "H_key": self.H_key,
            "leakage_bits": self.leakage_bits,
            "leakage_exact_independent": self.leakage_exact_independent,
            "triple_info_T": self.triple_info_T,
            "branch_coverage": self.branch_coverage,
            "expected_bits_A": self.expected_bits_A,
            "expected_bits_B": self.expected_bits_B,
            "verdict": self.verdict,
            "thresholds": {"n": self.n, "d": self.d, "eps": self.eps, "delta": self.delta},
            "branches": [b.to_dict() for b in self.branches],
        }


def audit(table: JointTable, n: float, d: int, eps: float = DEFAULT_EPS,
          delta: float = DEFAULT_DELTA) -> ProtocolAudit:
    """Security, key entropy and communication asymmetry of an executed protocol.

    The eavesdropper sees ``T`` and ``R_pub``.  A branch is covered when
    Alice sent at least ``n - delta`` bits or Bob at least ``d*n - delta``.
    Verdicts: ``SECURITY_FAIL`` when leakage exceeds ``eps``; otherwise
    ``ASYMMETRY_FAIL`` when the key is near-maximal (``H(Z) >= n - eps``) yet
    some branch is uncovered beyond ``eps``; otherwise ``PASS``.
    """
    for v in ("X", "Y", "T", "Z", "R_pub"):
        if v not in table:
            raise MissingVariable(v)
    view = ("T", "R_pub")
    h_key = entropy(table, "Z")
    leak = mutual_info(table, "Z", view)
    indep = exact_independent(table, "Z", view)
    tri = triple_info(table, view, "X", "Y")
    branches = []
    covered = 0
    sum_a = sum_b = 0
    for row, w in table.rows():
        a, b = bit_counts(row["T"])
        branches.append(Branch(row["X"], row["Y"], row["R_pub"], row.get("R_A", 0),
                               row.get("R_B", 0), a, b))
        if a >= n - delta or b >= d * n - delta:
            covered += w
        sum_a += w * a
        sum_b += w * b
    coverage = covered / table.total
    if leak > eps:
        verdict = "SECURITY_FAIL"
    elif h_key >= n - eps and coverage < 1 - eps:
        verdict = "ASYMMETRY_FAIL"
    else:
        verdict = "PASS"
    return ProtocolAudit(True, h_key, leak, indep, tri, branches, coverage,
                         sum_a / table.total, sum_b / table.total, verdict, n, d, eps, delta)


def audit_protocol(spec: GraphSpec, protocol: ProtocolSpec, eps: float = DEFAULT_EPS,
                   delta: float = DEFAULT_DELTA) -> ProtocolAudit:
    return audit(execute_all(spec, protocol), spec.field.n_bits, spec.d, eps, delta)
