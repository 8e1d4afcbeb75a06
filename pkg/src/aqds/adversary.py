"""Monte-Carlo attack experiments checked against the analytic bounds.

Each experiment splits a per-trial rng off a master seed, counts successes,
and reports them next to the bound it must stay under.  Robustness and
repudiation are structural zeroes (honest verdicts agree exactly); the two
forgery experiments are statistical and allow three binomial standard
deviations of slack above the bound.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from random import Random
from typing import Callable, Sequence

from .gf2_hash import BitString, Gf2Poly, sample_irreducible
from .keymat import KeyBundle, SecurityParams, SessionKeys, combine, distribute_keys
from .netsim import AdversaryScript, Rule, Topology, run_round
from .protocol import SignatureBundle, VerificationOutcome, receiver_verify, sign

Strategy = Callable[[SignatureBundle, Sequence[KeyBundle], Random], SignatureBundle]


@dataclass(frozen=True)
class AttackResult:
    """Trial count, successes, and the analytic bound they are held to."""

    trials: int
    successes: int
    bound: float
    z_slack: float = 3.0
    applicable: int | None = None

    def __post_init__(self) -> None:
        if not 0 <= self.successes <= self.trials:
            raise ValueError("successes must lie in [0, trials]")

    @property
    def rate(self) -> float:
        return self.successes / self.trials if self.trials else 0.0

    @property
    def threshold(self) -> float:
        if self.trials == 0 or self.bound in (0.0, 1.0):
            return self.bound
        sigma = math.sqrt(self.bound * (1.0 - self.bound) / self.trials)
        return self.bound + self.z_slack * sigma

    @property
    def within_bound(self) -> bool:
        return self.rate <= self.threshold


def forgery_blind(n: int, trials: int, rng: Random, m_bits: int = 32) -> AttackResult:
    """Forgery with no information: submit a uniformly random pair.

    The submitted signature decrypts to a uniform digest, so acceptance
    needs the random polynomial field to decode and the random tag to match;
    the bound is 1/2^n.
    """
    successes = 0
    for _ in range(trials):
        true_keys = SessionKeys(BitString.random(2 * n, rng), BitString.random(n, rng))
        forged = SignatureBundle(BitString.random(m_bits, rng),
                                 BitString.random(2 * n, rng))
        if receiver_verify(forged, true_keys) is VerificationOutcome.ACCEPTED:
            successes += 1
    return AttackResult(trials, successes, bound=2.0 ** -n)


def polynomial_guess_strategy(bundle: SignatureBundle, known: Sequence[KeyBundle],
                              rng: Random) -> SignatureBundle:
    """Tamper the message by a product of freshly guessed irreducibles.

    XORing the message with W(x) = product of distinct random degree-n
    irreducibles leaves the tag unchanged for every seed exactly when the
    signer's hidden polynomial divides W, so each factor is one guess at it.
    The receiver keys carry no information about the combined keys and are
    ignored.
    """
    n = bundle.n
    m = bundle.message.length
    guesses = max(1, (m - 1) // n)
    if m <= n:
        raise ValueError("message must be longer than n to host a guess")
    factors: set[int] = set()
    while len(factors) < guesses:
        p, _ = sample_irreducible(n, rng)
        factors.add(p.value)
    w = Gf2Poly(1)
    for v in sorted(factors):
        w = w * Gf2Poly(v)
    tampered = bundle.message ^ BitString(w.value, m)
    return SignatureBundle(tampered, bundle.signature)


def forgery_known_signature(n: int, m_bits: int, trials: int, rng: Random,
                            known_keys: int = 1,
                            strategy: Strategy = polynomial_guess_strategy,
                            ) -> AttackResult:
    """Forgery holding a genuine (message, signature) and receiver keys.

    Per trial a full honest signing happens, the attacker is handed the
    bundle plus ``known_keys`` receiver-link bundles (never the arbitrator
    link), and its forgery is judged by the arbitrator's check.  Bound:
    m / 2^(n-1).
    """
    if known_keys < 1:
        raise ValueError("the attacker is a receiver and holds its own keys")
    successes = 0
    for _ in range(trials):
        bundles, arb = distribute_keys(n, known_keys, rng)
        sk = combine(bundles, arb)
        message = BitString.random(m_bits, rng)
        bundle, _ = sign(message, sk, rng)
        forged = strategy(bundle, bundles, rng)
        if forged.message == bundle.message:
            raise ValueError("strategy must alter the message")
        if receiver_verify(forged, sk) is VerificationOutcome.ACCEPTED:
            successes += 1
    return AttackResult(trials, successes, bound=m_bits / 2.0 ** (n - 1))


def forgery_bound(eps_1: float, eps_2: float) -> float:
    """Overall forgery probability: the larger of the two attack bounds."""
    return max(eps_1, eps_2)


def _tamper_rules(rid: str, m_bits: int, n: int, rng: Random) -> list[Rule]:
    rules = []
    for target, width in (("message", m_bits), ("signature", 2 * n)):
        if rng.random() < 0.75:
            count = rng.randint(1, 3)
            positions = tuple(sorted(rng.sample(range(width), count)))
            rules.append(Rule(action="tamper", kind="broadcast", receiver=rid,
                              target=target, positions=positions))
    if not rules:
        rules.append(Rule(action="tamper", kind="broadcast", receiver=rid,
                          target="message", positions=(rng.randrange(m_bits),)))
    return rules


def repudiation_experiment(topology: Topology, trials: int, rng: Random,
                           security: SecurityParams | None = None) -> AttackResult:
    """Dishonest signer sends inconsistent broadcasts and tries to deny.

    Per trial some receivers get the genuine bundle and the rest get
    tampered copies.  Repudiation succeeds only if a receiver validated the
    signature yet the arbitrator confirms it for no receiver; trials where
    no receiver accepts anything are void (nothing was signed) and counted
    as non-applicable.  Expected successes: exactly zero.
    """
    if security is None:
        security = SecurityParams.for_n(16, 64, topology.k)
    successes = 0
    applicable = 0
    for _ in range(trials):
        genuine = rng.sample(topology.receiver_ids, rng.randint(1, topology.k))
        rules: list[Rule] = []
        for rid in topology.receiver_ids:
            if rid not in genuine:
                rules.extend(_tamper_rules(rid, security.m_bits, security.n, rng))
        t = run_round(topology, security, AdversaryScript(tuple(rules)),
                      seed=rng.getrandbits(64))
        validated = [r for r, v in t.announcements.items()
                     if v is VerificationOutcome.ACCEPTED]
        if not validated:
            continue
        applicable += 1
        if all(t.outcomes[r] is not VerificationOutcome.ACCEPTED
               for r in topology.receiver_ids):
            successes += 1
    return AttackResult(trials, successes, bound=0.0, applicable=applicable)


def robustness_experiment(topology: Topology, trials: int, rng: Random,
                          security: SecurityParams | None = None) -> AttackResult:
    """All-honest rounds; any non-accepted verdict counts as a failure."""
    if security is None:
        security = SecurityParams.for_n(16, 64, topology.k)
    successes = 0
    for _ in range(trials):
        t = run_round(topology, security, seed=rng.getrandbits(64))
        if any(v is not VerificationOutcome.ACCEPTED for v in t.outcomes.values()):
            successes += 1
    return AttackResult(trials, successes, bound=0.0)
