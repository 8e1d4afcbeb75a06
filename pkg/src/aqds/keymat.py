"""Per-link key bundles, XOR session-key algebra, and key-sizing formulas.

Each signer-adjacent link carries a (2n, n)-bit key pair: the 2n-bit half
encrypts the digest, the n-bit half seeds the hash.  Session keys are the
bitwise XOR of all receiver-link pairs with the arbitrator-link pair, so
signer and arbitrator derive identical keys from identical inputs.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from random import Random
from typing import Sequence

from .gf2_hash import BitString


@dataclass(frozen=True)
class KeyBundle:
    """One link's key pair: x encrypts (2n bits), y seeds the hash (n bits)."""

    x: BitString
    y: BitString

    def __post_init__(self) -> None:
        if self.x.length != 2 * self.y.length:
            raise ValueError("x must be exactly twice as long as y")

    @property
    def n(self) -> int:
        return self.y.length

    @classmethod
    def random(cls, n: int, rng: Random) -> KeyBundle:
        return cls(BitString.random(2 * n, rng), BitString.random(n, rng))


@dataclass(frozen=True)
class SessionKeys:
    """Combined encryption/seed keys as held by the signer or the arbitrator."""

    xs: BitString
    ys: BitString

    def __post_init__(self) -> None:
        if self.xs.length != 2 * self.ys.length:
            raise ValueError("xs must be exactly twice as long as ys")

    @property
    def n(self) -> int:
        return self.ys.length


def distribute_keys(n: int, k: int, rng: Random) -> tuple[list[KeyBundle], KeyBundle]:
    """Fresh uniform key bundles for k receiver links plus the arbitrator link.

    Models a perfectly executed key-distribution stage.  Draw order is fixed
    (receiver bundles first, arbitrator last, x before y) so a seeded rng
    reproduces the same bundles.
    """
    if n < 2:
        raise ValueError("security parameter n must be at least 2")
    if k < 1:
        raise ValueError("at least one receiver is required")
    receivers = [KeyBundle.random(n, rng) for _ in range(k)]
    return receivers, KeyBundle.random(n, rng)


def combine(bundles: Sequence[KeyBundle], arb: KeyBundle) -> SessionKeys:
    """XOR of all receiver-link keys with the arbitrator-link keys."""
    xs = arb.x
    ys = arb.y
    for b in bundles:
        xs = xs ^ b.x
        ys = ys ^ b.y
    return SessionKeys(xs, ys)


def required_n(m_bits: int, eps_f: float) -> int:
    """Minimal digest half-length n with m / 2^(n-1) <= eps_f.

    The comparison is exact (the float bound is taken at its binary value),
    so table reproductions cannot drift by one from rounding.
    """
    if m_bits < 1:
        raise ValueError("message length must be at least 1 bit")
    if not 0.0 < eps_f < 1.0:
        raise ValueError("forgery bound must be in (0, 1)")
    eps = Fraction(eps_f)
    # start near the float estimate, then settle exactly
    n = max(1, math.ceil(math.log2(m_bits / eps_f)) - 1)
    while Fraction(m_bits, 2 ** (n - 1)) > eps:
        n += 1
    while n > 1 and Fraction(m_bits, 2 ** (n - 2)) <= eps:
        n -= 1
    return n


def total_consumption(m_bits: int, eps_f: float, k: int) -> int:
    """Total key bits across all links for one signing round: 3n(k+1)."""
    if k < 0:
        raise ValueError("receiver count must be non-negative")
    return 3 * required_n(m_bits, eps_f) * (k + 1)


@dataclass(frozen=True)
class SecurityParams:
    """Signing-round security configuration with the derived parameter n.

    n is always the minimal value meeting the forgery bound for (m_bits,
    eps_f); it is computed, never supplied.
    """

    m_bits: int
    eps_f: float
    k: int
    n: int = field(init=False)

    def __post_init__(self) -> None:
        if self.k < 1:
            raise ValueError("at least one receiver is required")
        object.__setattr__(self, "n", required_n(self.m_bits, self.eps_f))

    @classmethod
    def for_n(cls, n: int, m_bits: int, k: int) -> SecurityParams:
        """Parameters that make a chosen n minimal: eps_f = m / 2^(n-1).

        Convenient for experiments that sweep n directly.
        """
        if n < 2:
            raise ValueError("n must be at least 2")
        eps = m_bits / 2 ** (n - 1)
        if not eps < 1.0:
            raise ValueError("m too long for this n")
        return cls(m_bits=m_bits, eps_f=eps, k=k)

    @property
    def bits_per_link(self) -> int:
        return 3 * self.n

    @property
    def total_bits(self) -> int:
        return 3 * self.n * (self.k + 1)
