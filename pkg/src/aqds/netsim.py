"""Deterministic discrete-event simulator for full signing rounds.

Logical integer time, explicit tie-breaking, and a single seeded rng make
every transcript a pure function of (topology, security params, adversary
script, seed).  Adversary rules interpose on the two payloads a real
attacker could touch -- the signer's broadcast and receivers' forwards --
while key release and key fetch ride authenticated channels no rule can
match.
"""

from __future__ import annotations

import configparser
import hashlib
import heapq
from dataclasses import dataclass, field, replace
from enum import IntEnum
from pathlib import Path
from random import Random
from typing import Mapping

from .gf2_hash import BitString
from .keymat import KeyBundle, SecurityParams, SessionKeys, combine, distribute_keys
from .protocol import (
    ForwardPacket,
    RoundRecord,
    SignatureBundle,
    VerificationOutcome,
    arbitrator_close_round,
    arbitrator_verify,
    receiver_verify,
    sign,
    timeout_forward_verify,
)


class ScriptError(ValueError):
    """Malformed adversary script or topology configuration."""


class SimulationComplete(Exception):
    """Signal that the event queue is exhausted."""


# ---------------------------------------------------------------------------
# Topology


@dataclass(frozen=True)
class Topology:
    """Star topology around signer and arbitrator with per-link delays."""

    receiver_ids: tuple[str, ...]
    signer_id: str = "signer"
    arbitrator_id: str = "arbitrator"
    deadline: int = 10
    default_delay: int = 1
    delays: Mapping[tuple[str, str], int] = field(default_factory=dict)

    def __post_init__(self) -> None:
        if not self.receiver_ids:
            raise ValueError("at least one receiver is required")
        nodes = (self.signer_id, self.arbitrator_id, *self.receiver_ids)
        if len(set(nodes)) != len(nodes):
            raise ValueError("node identifiers must be distinct")
        if self.deadline <= 0 or self.default_delay < 0:
            raise ValueError("deadline must be positive and delays non-negative")
        for (a, b), d in self.delays.items():
            if a not in nodes or b not in nodes:
                raise ValueError(f"delay for unknown link {a}->{b}")
            if d < 0:
                raise ValueError("link delays must be non-negative")

    @property
    def k(self) -> int:
        return len(self.receiver_ids)

    def delay(self, a: str, b: str) -> int:
        if (a, b) in self.delays:
            return self.delays[(a, b)]
        if (b, a) in self.delays:
            return self.delays[(b, a)]
        return self.default_delay

    @classmethod
    def fully_connected(cls, k: int, deadline: int = 10, default_delay: int = 1) -> Topology:
        return cls(tuple(f"r{i}" for i in range(1, k + 1)),
                   deadline=deadline, default_delay=default_delay)


# ---------------------------------------------------------------------------
# Events


class EventKind(IntEnum):
    # numeric value doubles as the tie-break rank: a deadline firing at t
    # precedes a delivery at t, so arrival exactly at the deadline is late
    DEADLINE_FIRE = 0
    DELIVER = 1
    ADVERSARY_ACTION = 2


@dataclass(frozen=True)
class Event:
    at: int
    kind: EventKind
    sender: str
    receiver: str
    payload: object
    seq: int = 0

    @property
    def sort_key(self) -> tuple[int, int, str, int]:
        return (self.at, int(self.kind), self.sender, self.seq)


class EventQueue:
    """Min-heap of events under the (time, kind, sender, seq) total order."""

    def __init__(self) -> None:
        self._heap: list[tuple[tuple[int, int, str, int], Event]] = []
        self._next_seq = 0

    def push(self, at: int, kind: EventKind, sender: str, receiver: str,
             payload: object) -> Event:
        ev = Event(at, kind, sender, receiver, payload, self._next_seq)
        self._next_seq += 1
        heapq.heappush(self._heap, (ev.sort_key, ev))
        return ev

    def advance(self) -> Event:
        if not self._heap:
            raise SimulationComplete
        return heapq.heappop(self._heap)[1]

    def __len__(self) -> int:
        return len(self._heap)

    def __bool__(self) -> bool:
        return bool(self._heap)


def advance(queue: EventQueue) -> Event:
    """Pop the globally minimal event; raises SimulationComplete when empty."""
    return queue.advance()


# ---------------------------------------------------------------------------
# Wire payloads


@dataclass(frozen=True)
class Broadcast:
    bundle: SignatureBundle


@dataclass(frozen=True)
class KeyRequest:
    timeout_ids: tuple[str, ...]


@dataclass(frozen=True)
class KeyResponse:
    keys: tuple[tuple[str, KeyBundle], ...]


@dataclass(frozen=True)
class KeyRelease:
    session: SessionKeys


@dataclass(frozen=True)
class Announcement:
    receiver_id: str
    verdict: VerificationOutcome


@dataclass(frozen=True)
class Verdict:
    receiver_id: str
    outcome: VerificationOutcome


@dataclass(frozen=True)
class TimeoutClaim:
    receiver_id: str
    bundle: SignatureBundle
    accepted: bool


def _canon(payload: object) -> str:
    if isinstance(payload, SignatureBundle):
        return (f"bundle:{payload.message.to_hex()}/{payload.message.length}"
                f":{payload.signature.to_hex()}/{payload.signature.length}")
    if isinstance(payload, KeyBundle):
        return f"keys:{payload.x.to_hex()}:{payload.y.to_hex()}"
    if isinstance(payload, SessionKeys):
        return f"session:{payload.xs.to_hex()}:{payload.ys.to_hex()}"
    if isinstance(payload, Broadcast):
        return f"broadcast[{_canon(payload.bundle)}]"
    if isinstance(payload, ForwardPacket):
        return (f"forward[{payload.receiver_id}:{_canon(payload.bundle)}"
                f":{_canon(payload.keys)}:{payload.sent_at}]")
    if isinstance(payload, KeyRequest):
        return "key-request[" + ",".join(payload.timeout_ids) + "]"
    if isinstance(payload, KeyResponse):
        return "key-response[" + ",".join(f"{r}:{_canon(b)}" for r, b in payload.keys) + "]"
    if isinstance(payload, KeyRelease):
        return f"key-release[{_canon(payload.session)}]"
    if isinstance(payload, Announcement):
        return f"announce[{payload.receiver_id}:{payload.verdict.value}]"
    if isinstance(payload, Verdict):
        return f"verdict[{payload.receiver_id}:{payload.outcome.value}]"
    if isinstance(payload, TimeoutClaim):
        return f"claim[{payload.receiver_id}:{_canon(payload.bundle)}:{payload.accepted}]"
    return repr(payload)


def _digest(payload: object) -> str:
    return hashlib.sha256(_canon(payload).encode()).hexdigest()[:16]


# ---------------------------------------------------------------------------
# Adversary scripts

_KINDS = ("broadcast", "forward")
_ACTIONS = ("tamper", "delay", "drop", "replace")
_TARGETS = ("message", "signature")


@dataclass(frozen=True)
class Rule:
    """One interposition rule; None match fields are wildcards."""

    action: str
    kind: str | None = None
    sender: str | None = None
    receiver: str | None = None
    target: str = "message"
    positions: tuple[int, ...] = ()
    delta: int = 0
    payload_hex: str | None = None

    def __post_init__(self) -> None:
        if self.action not in _ACTIONS:
            raise ScriptError(f"unknown action {self.action!r}")
        if self.kind is not None and self.kind not in _KINDS:
            raise ScriptError(
                f"rules may only touch {_KINDS}, not {self.kind!r}")
        if self.target not in _TARGETS:
            raise ScriptError(f"unknown tamper target {self.target!r}")
        if self.action == "tamper" and not self.positions:
            raise ScriptError("tamper rule needs bit positions")
        if any(p < 0 for p in self.positions):
            raise ScriptError("bit positions must be non-negative")
        if self.action == "delay" and self.delta < 0:
            raise ScriptError("delay must be non-negative")
        if self.action == "replace" and not self.payload_hex:
            raise ScriptError("replace rule needs payload-hex")

    def matches(self, kind: str, sender: str, receiver: str) -> bool:
        return ((self.kind is None or self.kind == kind)
                and (self.sender is None or self.sender == sender)
                and (self.receiver is None or self.receiver == receiver))


@dataclass(frozen=True)
class AdversaryScript:
    rules: tuple[Rule, ...] = ()

    @classmethod
    def none(cls) -> AdversaryScript:
        return cls()

    def validate_sized(self, m_bits: int, sig_bits: int) -> None:
        """Reject size-dependent rule problems before any event runs."""
        for rule in self.rules:
            if rule.action != "replace":
                continue
            width = m_bits if rule.target == "message" else sig_bits
            try:
                raw = bytes.fromhex(rule.payload_hex)
            except ValueError as exc:
                raise ScriptError(f"bad payload-hex: {exc}") from exc
            if len(raw) != (width + 7) // 8:
                raise ScriptError(
                    f"replace payload is {len(raw)} bytes but the "
                    f"{rule.target} needs {(width + 7) // 8}")

    def apply(self, kind: str, sender: str, receiver: str,
              bundle: SignatureBundle) -> tuple[SignatureBundle | None, int]:
        """Rewritten bundle (None = dropped) and extra delay after all rules."""
        extra = 0
        for rule in self.rules:
            if not rule.matches(kind, sender, receiver):
                continue
            if rule.action == "drop":
                return None, extra
            if rule.action == "delay":
                extra += rule.delta
                continue
            part = bundle.message if rule.target == "message" else bundle.signature
            if rule.action == "tamper":
                part = part.flip(*(p % part.length for p in rule.positions))
            else:  # replace
                part = BitString.from_hex(rule.payload_hex, part.length)
            if rule.target == "message":
                bundle = SignatureBundle(part, bundle.signature)
            else:
                bundle = SignatureBundle(bundle.message, part)
        return bundle, extra


# ---------------------------------------------------------------------------
# Config loaders (INI: key-value with sections)


def _parser() -> configparser.ConfigParser:
    cp = configparser.ConfigParser(inline_comment_prefixes=(";", "#"))
    cp.optionxform = str  # keep identifiers case-sensitive
    return cp


def load_topology(path: str | Path) -> Topology:
    cp = _parser()
    if not cp.read(path):
        raise ScriptError(f"cannot read topology file {path}")
    sec = cp["topology"]
    if "receiver-ids" in sec:
        ids = tuple(x.strip() for x in sec["receiver-ids"].split(",") if x.strip())
    else:
        k = sec.getint("receivers", 0)
        if k < 1:
            raise ScriptError("topology needs receivers or receiver-ids")
        ids = tuple(f"r{i}" for i in range(1, k + 1))
    delays = {}
    if cp.has_section("delays"):
        for key, val in cp["delays"].items():
            if "->" not in key:
                raise ScriptError(f"bad link spec {key!r}, expected a->b")
            a, b = (s.strip() for s in key.split("->", 1))
            delays[(a, b)] = int(val)
    try:
        return Topology(
            receiver_ids=ids,
            signer_id=sec.get("signer-id", "signer"),
            arbitrator_id=sec.get("arbitrator-id", "arbitrator"),
            deadline=sec.getint("deadline", 10),
            default_delay=sec.getint("default-delay", 1),
            delays=delays,
        )
    except ValueError as exc:
        raise ScriptError(str(exc)) from exc


def load_script(path: str | Path) -> AdversaryScript:
    cp = _parser()
    if not cp.read(path):
        raise ScriptError(f"cannot read script file {path}")
    rules = []
    for name in cp.sections():
        if not name.startswith("rule"):
            raise ScriptError(f"unexpected section {name!r}")
        sec = cp[name]
        positions = tuple(
            int(x) for x in sec.get("positions", "").replace(",", " ").split())
        rules.append(Rule(
            action=sec.get("action", ""),
            kind=sec.get("kind", None),
            sender=sec.get("sender", None),
            receiver=sec.get("receiver", None),
            target=sec.get("target", "message"),
            positions=positions,
            delta=sec.getint("delta", 0),
            payload_hex=sec.get("payload-hex", None),
        ))
    return AdversaryScript(tuple(rules))


# ---------------------------------------------------------------------------
# Round execution


@dataclass
class Transcript:
    """Full record of one simulated round."""

    round_id: int
    security: SecurityParams
    lines: list[str]
    outcomes: dict[str, VerificationOutcome]
    announcements: dict[str, VerificationOutcome]
    timeout_claims: dict[str, bool]
    record: RoundRecord
    signer_keys: SessionKeys
    session_keys: SessionKeys | None

    @property
    def consumed_bits_per_link(self) -> int:
        return 3 * self.security.n

    @property
    def consumed_bits_total(self) -> int:
        return 3 * self.security.n * (self.security.k + 1)

    def render(self) -> str:
        return "\n".join(self.lines) + "\n"


class _RoundRunner:
    def __init__(self, topology: Topology, security: SecurityParams,
                 script: AdversaryScript, seed: int, round_id: int,
                 message: BitString | None, claim_timeouts: bool) -> None:
        if topology.k != security.k:
            raise ValueError("topology and security params disagree on k")
        script.validate_sized(security.m_bits, 2 * security.n)
        self.top = topology
        self.sec = security
        self.script = script
        self.round_id = round_id
        self.claim_timeouts = claim_timeouts
        self.rng = Random(seed)

        bundles, self.arb_bundle = distribute_keys(security.n, security.k, self.rng)
        self.link_keys = dict(zip(topology.receiver_ids, bundles))
        self.signer_sk = combine(bundles, self.arb_bundle)
        if message is None:
            message = BitString.random(security.m_bits, self.rng)
        elif message.length != security.m_bits:
            raise ValueError("message length contradicts the security params")
        self.bundle, self.r_s = sign(message, self.signer_sk, self.rng)

        self.record = RoundRecord.open(topology.receiver_ids, topology.deadline,
                                       self.arb_bundle)
        self.queue = EventQueue()
        self.lines: list[str] = []
        self.receiver_copy: dict[str, SignatureBundle] = {}
        self.packets: dict[str, ForwardPacket] = {}
        self.fetched: dict[str, KeyBundle] = {}
        self.announcements: dict[str, VerificationOutcome] = {}
        self.session: SessionKeys | None = None
        self.closed = False
        self.last_time = 0

    def _log(self, event: str, sender: str, receiver: str, at: int,
             payload: object) -> None:
        self.lines.append(
            f"{self.round_id} {event} {sender} {receiver} {at} {_digest(payload)}")

    def run(self) -> Transcript:
        top, sec = self.top, self.sec
        for rid in top.receiver_ids:
            out, extra = self.script.apply("broadcast", top.signer_id, rid, self.bundle)
            if out is None:
                continue
            self.queue.push(top.delay(top.signer_id, rid) + extra,
                            EventKind.DELIVER, top.signer_id, rid, Broadcast(out))
        self.queue.push(top.deadline, EventKind.DEADLINE_FIRE,
                        top.arbitrator_id, top.arbitrator_id, "deadline")
        while True:
            try:
                ev = self.queue.advance()
            except SimulationComplete:
                break
            self.last_time = max(self.last_time, ev.at)
            self._dispatch(ev)
        self._claims()
        return Transcript(
            round_id=self.round_id,
            security=sec,
            lines=self.lines,
            outcomes={r: self.record.verdicts[r] for r in top.receiver_ids},
            announcements=dict(self.announcements),
            timeout_claims=self.claims,
            record=self.record,
            signer_keys=self.signer_sk,
            session_keys=self.session,
        )

    def _dispatch(self, ev: Event) -> None:
        if ev.kind is EventKind.DEADLINE_FIRE:
            self._log("deadline", ev.sender, ev.receiver, ev.at, ev.payload)
            self._on_deadline(ev.at)
            return
        payload = ev.payload
        if isinstance(payload, Broadcast):
            self._log("deliver:broadcast", ev.sender, ev.receiver, ev.at, payload)
            self._on_broadcast(ev.receiver, payload.bundle, ev.at)
        elif isinstance(payload, ForwardPacket):
            self._log("deliver:forward", ev.sender, ev.receiver, ev.at, payload)
            if not self.closed and payload.receiver_id not in self.packets:
                self.packets[payload.receiver_id] = payload
        elif isinstance(payload, KeyRequest):
            self._log("deliver:key-request", ev.sender, ev.receiver, ev.at, payload)
            keys = KeyResponse(tuple((r, self.link_keys[r])
                                     for r in payload.timeout_ids))
            self.queue.push(ev.at + self.top.delay(self.top.signer_id,
                                                   self.top.arbitrator_id),
                            EventKind.DELIVER, self.top.signer_id,
                            self.top.arbitrator_id, keys)
        elif isinstance(payload, KeyResponse):
            self._log("deliver:key-response", ev.sender, ev.receiver, ev.at, payload)
            self.fetched = dict(payload.keys)
            self._finish_close(ev.at)
        elif isinstance(payload, KeyRelease):
            self._log("deliver:key-release", ev.sender, ev.receiver, ev.at, payload)
            self._on_key_release(ev.receiver, payload.session, ev.at)
        elif isinstance(payload, Announcement):
            self._log("deliver:announce", ev.sender, ev.receiver, ev.at, payload)
            self._on_announcement(payload, ev.at)
        else:
            raise AssertionError(f"unhandled payload {payload!r}")

    def _on_broadcast(self, rid: str, bundle: SignatureBundle, now: int) -> None:
        top = self.top
        self.receiver_copy[rid] = bundle
        packet = ForwardPacket(rid, bundle, self.link_keys[rid], sent_at=now)
        out, extra = self.script.apply("forward", rid, top.arbitrator_id,
                                       packet.bundle)
        if out is None:
            return
        if out is not packet.bundle:
            packet = replace(packet, bundle=out)
        self.queue.push(now + top.delay(rid, top.arbitrator_id) + extra,
                        EventKind.DELIVER, rid, top.arbitrator_id, packet)

    def _on_deadline(self, now: int) -> None:
        self.closed = True
        top = self.top
        timeouts = [r for r in top.receiver_ids if r not in self.packets]
        if timeouts:
            d = top.delay(top.arbitrator_id, top.signer_id)
            self.queue.push(now + d, EventKind.DELIVER, top.arbitrator_id,
                            top.signer_id, KeyRequest(tuple(timeouts)))
        else:
            self._finish_close(now)

    def _finish_close(self, now: int) -> None:
        top = self.top
        self.session = arbitrator_close_round(
            self.record, list(self.packets.values()), now,
            lambda ids: {r: self.fetched[r] for r in ids})
        for rid in top.receiver_ids:
            if self.record.verdicts.get(rid) is VerificationOutcome.TIMED_OUT:
                self._log("verdict", top.arbitrator_id, rid, now,
                          Verdict(rid, VerificationOutcome.TIMED_OUT))
        for rid in top.receiver_ids:
            if rid in self.packets:
                self.queue.push(now + top.delay(top.arbitrator_id, rid),
                                EventKind.DELIVER, top.arbitrator_id, rid,
                                KeyRelease(self.session))

    def _on_key_release(self, rid: str, session: SessionKeys, now: int) -> None:
        verdict = receiver_verify(self.receiver_copy[rid], session)
        self.announcements[rid] = verdict
        self.queue.push(now + self.top.delay(rid, self.top.arbitrator_id),
                        EventKind.DELIVER, rid, self.top.arbitrator_id,
                        Announcement(rid, verdict))

    def _on_announcement(self, ann: Announcement, now: int) -> None:
        rid = ann.receiver_id
        if ann.verdict is VerificationOutcome.ACCEPTED:
            outcome = arbitrator_verify(self.packets[rid], self.session)
            if outcome is VerificationOutcome.ACCEPTED:
                self.record.archive_verified(self.packets[rid].bundle)
        else:
            outcome = VerificationOutcome.REJECTED
        self.record.verdicts[rid] = outcome
        self._log("verdict", self.top.arbitrator_id, rid, now, Verdict(rid, outcome))

    def _claims(self) -> None:
        self.claims: dict[str, bool] = {}
        if not self.claim_timeouts:
            return
        top = self.top
        for rid in top.receiver_ids:
            if (self.record.verdicts.get(rid) is VerificationOutcome.TIMED_OUT
                    and rid in self.receiver_copy):
                bundle = self.receiver_copy[rid]
                ok = timeout_forward_verify(self.record, bundle, self.link_keys[rid])
                self.claims[rid] = ok
                at = self.last_time + top.delay(rid, top.arbitrator_id)
                self._log("timeout-claim", rid, top.arbitrator_id, at,
                          TimeoutClaim(rid, bundle, ok))


def run_round(topology: Topology, security: SecurityParams,
              script: AdversaryScript | None = None, seed: int = 0,
              round_id: int = 0, message: BitString | None = None,
              claim_timeouts: bool = True) -> Transcript:
    """Execute one full round and return its transcript.

    The transcript (event lines, verdicts, claims) is a deterministic
    function of the arguments; malformed scripts fail before any event runs.
    """
    runner = _RoundRunner(topology, security, script or AdversaryScript.none(),
                          seed, round_id, message, claim_timeouts)
    return runner.run()
