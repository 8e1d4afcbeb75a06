"""GF(2) polynomial arithmetic and the LFSR-based Toeplitz one-time hash.

Polynomials over GF(2) are stored as nonnegative integers, bit i holding the
coefficient of x^i (so 0b111 is x^2 + x + 1).  Bit strings carry an explicit
length; bit 0 is the first transmitted bit, and byte/hex serialization is
most-significant-bit-first per byte.

All functions are pure: random choices come from an explicitly passed
``random.Random``, and every value is immutable after construction.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from random import Random
from typing import Iterator


# ---------------------------------------------------------------------------
# Bit strings


@dataclass(frozen=True)
class BitString:
    """Fixed-length bit string; bit j of ``value`` is the j-th transmitted bit."""

    value: int
    length: int

    def __post_init__(self) -> None:
        if self.length < 0:
            raise ValueError("length must be non-negative")
        if not 0 <= self.value < (1 << self.length):
            raise ValueError(f"value does not fit in {self.length} bits")

    @classmethod
    def zeros(cls, length: int) -> BitString:
        return cls(0, length)

    @classmethod
    def from_bits(cls, bits) -> BitString:
        bits = list(bits)
        value = 0
        for j, b in enumerate(bits):
            if b not in (0, 1):
                raise ValueError("bits must be 0 or 1")
            value |= b << j
        return cls(value, len(bits))

    @classmethod
    def random(cls, length: int, rng: Random) -> BitString:
        return cls(rng.getrandbits(length) if length else 0, length)

    @classmethod
    def from_hex(cls, text: str, length: int) -> BitString:
        raw = bytes.fromhex(text)
        if len(raw) != (length + 7) // 8:
            raise ValueError("hex length does not match bit length")
        value = 0
        for j in range(length):
            if (raw[j >> 3] >> (7 - (j & 7))) & 1:
                value |= 1 << j
        return cls(value, length)

    def to_bytes(self) -> bytes:
        out = bytearray((self.length + 7) // 8)
        v = self.value
        while v:
            j = (v & -v).bit_length() - 1
            out[j >> 3] |= 0x80 >> (j & 7)
            v &= v - 1
        return bytes(out)

    def to_hex(self) -> str:
        return self.to_bytes().hex()

    def __len__(self) -> int:
        return self.length

    def __iter__(self) -> Iterator[int]:
        return ((self.value >> j) & 1 for j in range(self.length))

    def __getitem__(self, j):
        if isinstance(j, slice):
            start, stop, step = j.indices(self.length)
            if step != 1:
                raise ValueError("only unit-step slices are supported")
            width = max(0, stop - start)
            return BitString((self.value >> start) & ((1 << width) - 1), width)
        if not 0 <= j < self.length:
            raise IndexError("bit index out of range")
        return (self.value >> j) & 1

    def __xor__(self, other: BitString) -> BitString:
        if self.length != other.length:
            raise ValueError("XOR requires equal lengths")
        return BitString(self.value ^ other.value, self.length)

    def concat(self, other: BitString) -> BitString:
        return BitString(self.value | other.value << self.length,
                         self.length + other.length)

    def split(self, n: int) -> tuple[BitString, BitString]:
        """First n bits and the remainder."""
        if not 0 <= n <= self.length:
            raise ValueError("split point out of range")
        return self[:n], self[n:]

    def flip(self, *positions: int) -> BitString:
        v = self.value
        for j in positions:
            if not 0 <= j < self.length:
                raise ValueError("flip position out of range")
            v ^= 1 << j
        return BitString(v, self.length)

    def weight(self) -> int:
        return self.value.bit_count()


# ---------------------------------------------------------------------------
# Polynomials over GF(2), integer-encoded


def _mul(a: int, b: int) -> int:
    if a < b:
        a, b = b, a
    c = 0
    while b:
        if b & 1:
            c ^= a
        a <<= 1
        b >>= 1
    return c


def _mod(a: int, b: int) -> int:
    if b == 0:
        raise ZeroDivisionError("reduction modulo zero polynomial")
    db = b.bit_length()
    da = a.bit_length()
    while da >= db:
        a ^= b << (da - db)
        da = a.bit_length()
    return a


def _gcd(a: int, b: int) -> int:
    while b:
        db = b.bit_length()
        da = a.bit_length()
        while da >= db:
            a ^= b << (da - db)
            da = a.bit_length()
        a, b = b, a
    return a


def _mulmod(a: int, b: int, m: int) -> int:
    return _mod(_mul(a, b), m)


# squaring over GF(2) spreads each bit to an even position; per-byte table
_SQ_BYTE = tuple(
    sum(((byte >> i) & 1) << (2 * i) for i in range(8)) for byte in range(256))


def _sq(a: int) -> int:
    out = 0
    shift = 0
    while a:
        out |= _SQ_BYTE[a & 0xFF] << shift
        a >>= 8
        shift += 16
    return out


@dataclass(frozen=True)
class Gf2Poly:
    """Polynomial over GF(2); bit i of ``value`` is the coefficient of x^i."""

    value: int

    def __post_init__(self) -> None:
        if self.value < 0:
            raise ValueError("polynomial encoding must be non-negative")

    @property
    def degree(self) -> int:
        """Degree of the polynomial (-1 for the zero polynomial)."""
        return self.value.bit_length() - 1

    @classmethod
    def from_coeffs(cls, coeffs) -> Gf2Poly:
        """Build from coefficients listed lowest power first."""
        value = 0
        for i, c in enumerate(coeffs):
            if c not in (0, 1):
                raise ValueError("coefficients must be 0 or 1")
            value |= c << i
        return cls(value)

    def coeff(self, i: int) -> int:
        return (self.value >> i) & 1 if i >= 0 else 0

    def __mul__(self, other: Gf2Poly) -> Gf2Poly:
        return Gf2Poly(_mul(self.value, other.value))

    def __mod__(self, other: Gf2Poly) -> Gf2Poly:
        return Gf2Poly(_mod(self.value, other.value))

    def gcd(self, other: Gf2Poly) -> Gf2Poly:
        return Gf2Poly(_gcd(self.value, other.value))

    def __str__(self) -> str:
        if self.value == 0:
            return "0"
        terms = []
        for i in range(self.degree, -1, -1):
            if self.coeff(i):
                terms.append("1" if i == 0 else "x" if i == 1 else f"x^{i}")
        return "+".join(terms)


@lru_cache(maxsize=1 << 16)
def _is_irreducible_value(v: int) -> bool:
    n = v.bit_length() - 1
    if n == 1:
        return True
    if not v & 1:
        return False  # divisible by x
    if v.bit_count() & 1 == 0:
        return False  # p(1) = 0, divisible by x+1
    b = 2
    for _ in range(n // 2):
        b = _mod(_sq(b), v)
        if _gcd(b ^ 2, v) != 1:
            return False
    return True


def poly_is_irreducible(p: Gf2Poly) -> bool:
    """Deterministic irreducibility test over GF(2).

    Walks the ladder b = x^(2^k) mod p for k = 1..deg/2 and rejects as soon
    as gcd(b + x, p) is non-trivial; any factor of degree d <= deg/2 divides
    x^(2^d) + x, so survival of the full ladder proves irreducibility.
    """
    if p.degree < 1:
        raise ValueError("zero or constant polynomial has no factorization")
    return _is_irreducible_value(p.value)


def encode_poly(p: Gf2Poly) -> BitString:
    """n-bit encoding of a degree-n polynomial: coefficients of x^0..x^(n-1)."""
    n = p.degree
    if n < 1:
        raise ValueError("cannot encode zero or constant polynomial")
    return BitString(p.value & ((1 << n) - 1), n)


def decode_poly(r: BitString) -> Gf2Poly | None:
    """Inverse of the n-bit encoding; None when the result is reducible.

    The leading x^n coefficient is an implicit 1; a decode that fails the
    irreducibility check signals tampering and the caller must reject.
    """
    n = r.length
    if n < 2:
        raise ValueError("encoded polynomial needs at least 2 bits")
    p = Gf2Poly(r.value | (1 << n))
    return p if poly_is_irreducible(p) else None


def sample_irreducible(n: int, rng: Random) -> tuple[Gf2Poly, BitString]:
    """Uniformly random irreducible degree-n polynomial and its n-bit encoding.

    Rejection-samples the n low coefficients until the polynomial (with
    implicit leading 1) is irreducible, so the draw is uniform over all
    monic irreducibles of degree n.
    """
    if n < 2:
        raise ValueError("degree must be at least 2")
    lead = 1 << n
    while True:
        low = rng.getrandbits(n)
        p = Gf2Poly(low | lead)
        if poly_is_irreducible(p):
            return p, BitString(low, n)


# ---------------------------------------------------------------------------
# LFSR keystream and Toeplitz hashing


def lfsr_stream(p: Gf2Poly, seed: BitString, count: int) -> BitString:
    """First ``count`` bits of the LFSR sequence s with s_{j+n} = sum c_i s_{j+i}.

    The register taps c_0..c_{n-1} are the coefficients of p below its
    degree; the first n outputs are the seed itself.
    """
    n = p.degree
    if n < 1:
        raise ValueError("LFSR needs a polynomial of degree >= 1")
    if seed.length != n:
        raise ValueError("seed length must equal the polynomial degree")
    if count < 0:
        raise ValueError("count must be non-negative")
    mask = (1 << n) - 1
    if count <= n:
        return BitString(seed.value & ((1 << count) - 1), count)
    taps = p.value & mask
    out = seed.value
    window = seed.value
    for j in range(count - n):
        nxt = (window & taps).bit_count() & 1
        window = (window >> 1) | (nxt << (n - 1))
        out |= nxt << (n + j)
    return BitString(out, count)


@dataclass(frozen=True)
class LfsrToeplitzHasher:
    """One-time universal hash keyed by an irreducible polynomial and a seed.

    The tag of an m-bit message M is the XOR, over all positions j with
    M_j = 1, of the n-bit keystream window (s_j, ..., s_{j+n-1}); equivalent
    to multiplying M by the n x m Toeplitz matrix whose rows are keystream
    windows.
    """

    poly: Gf2Poly
    seed: BitString

    def __post_init__(self) -> None:
        if not poly_is_irreducible(self.poly):
            raise ValueError("hasher polynomial must be irreducible")
        if self.seed.length != self.poly.degree:
            raise ValueError("seed length must equal the polynomial degree")

    @property
    def n(self) -> int:
        return self.poly.degree

    def hash(self, message: BitString) -> BitString:
        m = message.length
        if m < 1:
            raise ValueError("message must be non-empty")
        n = self.n
        stream = lfsr_stream(self.poly, self.seed, m + n - 1).value
        mask = (1 << n) - 1
        acc = 0
        v = message.value
        while v:
            j = (v & -v).bit_length() - 1
            acc ^= (stream >> j) & mask
            v &= v - 1
        return BitString(acc, n)


def toeplitz_oracle(p: Gf2Poly, seed: BitString, msg: BitString) -> BitString:
    """Reference hash by explicit Toeplitz matrix-vector multiply.

    Materializes the keystream with a literal per-bit recurrence and the
    full n x m matrix row by row; deliberately shares no code with
    ``LfsrToeplitzHasher.hash`` so the two can cross-check each other.
    """
    n = p.degree
    if seed.length != n:
        raise ValueError("seed length must equal the polynomial degree")
    m = msg.length
    if m < 1:
        raise ValueError("message must be non-empty")
    taps = [p.coeff(i) for i in range(n)]
    s = list(seed)
    while len(s) < m + n - 1:
        j = len(s) - n
        s.append(sum(taps[i] * s[j + i] for i in range(n)) % 2)
    msg_bits = list(msg)
    tag = []
    for i in range(n):
        row = s[i:i + m]  # row i of the matrix: (s_i, ..., s_{i+m-1})
        tag.append(sum(r * b for r, b in zip(row, msg_bits)) % 2)
    return BitString.from_bits(tag)
