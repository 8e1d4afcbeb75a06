"""Bit strings, GF(2) polynomials, LFSR streams, and the Toeplitz hash."""

import math
from random import Random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from aqds.gf2_hash import (
    BitString,
    Gf2Poly,
    LfsrToeplitzHasher,
    decode_poly,
    encode_poly,
    lfsr_stream,
    poly_is_irreducible,
    sample_irreducible,
    toeplitz_oracle,
)

X2_X_1 = Gf2Poly(0b111)  # x^2 + x + 1


def all_irreducibles(n):
    return [Gf2Poly(v) for v in range(1 << n, 1 << (n + 1))
            if poly_is_irreducible(Gf2Poly(v))]


# ---------------------------------------------------------------------------
# BitString


class TestBitString:
    def test_roundtrip_hex(self):
        rng = Random(0)
        for length in (1, 7, 8, 9, 31, 64, 65):
            b = BitString.random(length, rng)
            assert BitString.from_hex(b.to_hex(), length) == b

    def test_msb_first_per_byte(self):
        # bit 0 maps to the high bit of the first byte
        assert BitString.from_bits([1, 0, 0, 0, 0, 0, 0, 0]).to_hex() == "80"
        assert BitString.from_bits([0, 0, 0, 0, 0, 0, 0, 1]).to_hex() == "01"
        assert BitString.from_bits([1, 1]).to_hex() == "c0"

    def test_xor_requires_equal_length(self):
        with pytest.raises(ValueError):
            BitString(0, 4) ^ BitString(0, 5)

    def test_concat_and_split(self):
        a = BitString.from_bits([1, 0, 1])
        b = BitString.from_bits([0, 1])
        joined = a.concat(b)
        assert list(joined) == [1, 0, 1, 0, 1]
        first, rest = joined.split(3)
        assert first == a and rest == b

    def test_indexing_and_flip(self):
        b = BitString.from_bits([0, 1, 1, 0])
        assert b[1] == 1 and b[3] == 0
        assert list(b.flip(0, 3)) == [1, 1, 1, 1]
        assert b[1:3] == BitString.from_bits([1, 1])

    def test_value_must_fit(self):
        with pytest.raises(ValueError):
            BitString(4, 2)

    @given(st.integers(1, 64), st.integers(0, 2**30))
    def test_xor_involution(self, length, raw):
        a = BitString(raw % (1 << length), length)
        b = BitString((raw * 31) % (1 << length), length)
        assert a ^ b ^ b == a


# ---------------------------------------------------------------------------
# Irreducibility


class TestIrreducibility:
    def test_degree_two(self):
        assert poly_is_irreducible(X2_X_1)
        assert not poly_is_irreducible(Gf2Poly(0b101))  # x^2+1 = (x+1)^2

    def test_rejects_constants(self):
        with pytest.raises(ValueError):
            poly_is_irreducible(Gf2Poly(1))
        with pytest.raises(ValueError):
            poly_is_irreducible(Gf2Poly(0))

    def test_degree_one_irreducible(self):
        assert poly_is_irreducible(Gf2Poly(0b10))
        assert poly_is_irreducible(Gf2Poly(0b11))

    def test_against_trial_division(self):
        # independent oracle: a degree-n polynomial is reducible iff it is a
        # product of two lower-degree polynomials
        products = set()
        for da in range(1, 7):
            for a in range(1 << da, 1 << (da + 1)):
                for db in range(1, 8 - da):
                    for b in range(1 << db, 1 << (db + 1)):
                        if da + db <= 7:
                            products.add((Gf2Poly(a) * Gf2Poly(b)).value)
        for n in range(2, 8):
            for v in range(1 << n, 1 << (n + 1)):
                assert poly_is_irreducible(Gf2Poly(v)) == (v not in products)

    def test_count_degree_four(self):
        # 3 irreducibles of degree 4 (exhaustive check over all candidates)
        assert len(all_irreducibles(4)) == 3


class TestSampleDecode:
    def test_degree_two_unique(self):
        rng = Random(123)
        for _ in range(20):
            p, enc = sample_irreducible(2, rng)
            assert p == X2_X_1
            assert list(enc) == [1, 1]

    def test_encode_decode_roundtrip(self):
        rng = Random(7)
        for _ in range(1000):
            p, enc = sample_irreducible(16, rng)
            assert encode_poly(p) == enc
            assert decode_poly(enc) == p

    def test_sampled_always_irreducible(self):
        rng = Random(11)
        for n in (2, 3, 5, 8, 13):
            p, _ = sample_irreducible(n, rng)
            assert poly_is_irreducible(p) and p.degree == n

    def test_decode_rejects_reducible(self):
        # bits (0, 1) encode x^2 + x = x(x+1)
        assert decode_poly(BitString.from_bits([0, 1])) is None

    def test_decode_accepts_irreducible(self):
        assert decode_poly(BitString.from_bits([1, 1])) == X2_X_1

    def test_rejects_small_degree(self):
        with pytest.raises(ValueError):
            sample_irreducible(1, Random(0))

    def test_sampling_uniform_over_irreducibles(self):
        # every degree-3 irreducible (x^3+x+1, x^3+x^2+1) appears about
        # half the time over many draws
        rng = Random(99)
        counts = {}
        trials = 4000
        for _ in range(trials):
            p, _ = sample_irreducible(3, rng)
            counts[p.value] = counts.get(p.value, 0) + 1
        assert set(counts) == {0b1011, 0b1101}
        for c in counts.values():
            assert abs(c - trials / 2) < 3 * math.sqrt(trials * 0.25)


# ---------------------------------------------------------------------------
# LFSR


class TestLfsrStream:
    def test_zero_seed_zero_stream(self):
        for count in (0, 1, 5, 40):
            s = lfsr_stream(X2_X_1, BitString.zeros(2), count)
            assert s.value == 0 and s.length == count

    def test_hand_unrolled_period_three(self):
        # s0=1, s1=0, then s_{j+2} = s_j + s_{j+1}: 1,0,1,1,0,1,1,0,1
        s = lfsr_stream(X2_X_1, BitString.from_bits([1, 0]), 9)
        assert list(s) == [1, 0, 1, 1, 0, 1, 1, 0, 1]

    def test_prefix_property(self):
        rng = Random(3)
        p, _ = sample_irreducible(6, rng)
        seed = BitString.random(6, rng)
        long = lfsr_stream(p, seed, 50)
        for count in (0, 3, 6, 20):
            assert lfsr_stream(p, seed, count) == long[:count]

    def test_determinism(self):
        p = Gf2Poly(0b1011)
        seed = BitString.from_bits([1, 1, 0])
        assert lfsr_stream(p, seed, 30) == lfsr_stream(p, seed, 30)

    @pytest.mark.parametrize("n", range(2, 9))
    def test_period_divides_order(self, n):
        # cycle detection: walk states until the initial window recurs
        rng = Random(n)
        p, _ = sample_irreducible(n, rng)
        seed = BitString(rng.getrandbits(n) or 1, n)
        stream = lfsr_stream(p, seed, n + 2 ** n)
        first = stream[:n]
        period = next(j for j in range(1, 2 ** n + 1)
                      if stream[j:j + n] == first)
        assert (2 ** n - 1) % period == 0

    def test_seed_length_checked(self):
        with pytest.raises(ValueError):
            lfsr_stream(X2_X_1, BitString.zeros(3), 5)


# ---------------------------------------------------------------------------
# Hash vs oracle


# frozen vectors computed with the explicit-matrix oracle
HASH_VECTORS = [
    (0x163, 8, 24, "43", "598558", "49"),
    (0x185d, 12, 40, "bb30", "b0382e5034", "f6b0"),
    (0x13635, 16, 64, "0e6c", "d08b0dca88d9fc7c", "6a4f"),
]


class TestHash:
    def test_frozen_vectors(self):
        for pv, n, m, seed_hex, msg_hex, tag_hex in HASH_VECTORS:
            hasher = LfsrToeplitzHasher(Gf2Poly(pv), BitString.from_hex(seed_hex, n))
            tag = hasher.hash(BitString.from_hex(msg_hex, m))
            assert tag.to_hex() == tag_hex

    def test_zero_message_zero_tag(self):
        hasher = LfsrToeplitzHasher(X2_X_1, BitString.from_bits([1, 0]))
        assert hasher.hash(BitString.zeros(12)).value == 0

    def test_rejects_empty_message(self):
        hasher = LfsrToeplitzHasher(X2_X_1, BitString.from_bits([1, 0]))
        with pytest.raises(ValueError):
            hasher.hash(BitString.zeros(0))

    def test_rejects_reducible_polynomial(self):
        with pytest.raises(ValueError):
            LfsrToeplitzHasher(Gf2Poly(0b101), BitString.zeros(2))

    def test_single_bit_message_extracts_window(self):
        rng = Random(5)
        p, _ = sample_irreducible(6, rng)
        seed = BitString.random(6, rng)
        stream = lfsr_stream(p, seed, 6 + 15)
        for j in range(16):
            msg = BitString(1 << j, 16)
            assert toeplitz_oracle(p, seed, msg) == stream[j:j + 6]
            assert LfsrToeplitzHasher(p, seed).hash(msg) == stream[j:j + 6]

    def test_matches_oracle_exhaustive_n4_m4(self):
        rng = Random(17)
        p, _ = sample_irreducible(4, rng)
        seed = BitString.random(4, rng)
        hasher = LfsrToeplitzHasher(p, seed)
        for v in range(16):
            msg = BitString(v, 4)
            assert hasher.hash(msg) == toeplitz_oracle(p, seed, msg)

    def test_matches_oracle_random_instances(self):
        rng = Random(2024)
        for _ in range(2000):
            n = rng.randint(2, 16)
            m = rng.randint(1, 64)
            p, _ = sample_irreducible(n, rng)
            seed = BitString.random(n, rng)
            msg = BitString.random(m, rng)
            assert LfsrToeplitzHasher(p, seed).hash(msg) == \
                toeplitz_oracle(p, seed, msg)

    @settings(max_examples=200, deadline=None)
    @given(st.integers(2, 12), st.integers(1, 48), st.integers(0, 2**32))
    def test_linearity(self, n, m, seed):
        rng = Random(seed)
        p, _ = sample_irreducible(n, rng)
        seed = BitString.random(n, rng)
        hasher = LfsrToeplitzHasher(p, seed)
        m1 = BitString.random(m, rng)
        m2 = BitString.random(m, rng)
        assert hasher.hash(m1 ^ m2) == hasher.hash(m1) ^ hasher.hash(m2)


class TestCollisionBound:
    def test_random_pair_stays_under_bound(self):
        # fixed distinct messages, hasher drawn fresh per trial
        n, m, trials = 10, 32, 20000
        rng = Random(31337)
        m1 = BitString.random(m, rng)
        m2 = m1.flip(*rng.sample(range(m), 5))
        collisions = 0
        for _ in range(trials):
            p, _ = sample_irreducible(n, rng)
            hasher = LfsrToeplitzHasher(p, BitString.random(n, rng))
            if hasher.hash(m1) == hasher.hash(m2):
                collisions += 1
        bound = m / 2 ** (n - 1)
        sigma = math.sqrt(bound * (1 - bound) / trials)
        assert collisions / trials <= bound + 3 * sigma

    def test_worst_case_difference_stays_under_bound(self):
        # adversarial pair: the difference is a product of three distinct
        # degree-10 irreducibles, so a hasher collides whenever its
        # polynomial divides the difference -- the regime the bound covers
        n, m, trials = 10, 32, 20000
        rng = Random(271828)
        irr = all_irreducibles(n)
        w = irr[3] * irr[17] * irr[42]
        assert w.degree <= m - 1
        m1 = BitString.random(m, rng)
        m2 = m1 ^ BitString(w.value, m)
        collisions = 0
        for _ in range(trials):
            p, _ = sample_irreducible(n, rng)
            hasher = LfsrToeplitzHasher(p, BitString.random(n, rng))
            if hasher.hash(m1) == hasher.hash(m2):
                collisions += 1
        bound = m / 2 ** (n - 1)
        sigma = math.sqrt(bound * (1 - bound) / trials)
        rate = collisions / trials
        assert rate <= bound + 3 * sigma
        # and the attack is real: collisions do happen at roughly 3/99
        assert rate > bound / 8


class TestOracle:
    def test_zero_message(self):
        assert toeplitz_oracle(X2_X_1, BitString.from_bits([1, 1]),
                               BitString.zeros(9)).value == 0

    def test_oracle_checks_lengths(self):
        with pytest.raises(ValueError):
            toeplitz_oracle(X2_X_1, BitString.zeros(3), BitString.zeros(4))
        with pytest.raises(ValueError):
            toeplitz_oracle(X2_X_1, BitString.zeros(2), BitString.zeros(0))
