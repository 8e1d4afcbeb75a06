"""Key bundles, XOR combination, and the key-sizing formulas."""

import math
from fractions import Fraction
from random import Random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from aqds.gf2_hash import BitString
from aqds.keymat import (
    KeyBundle,
    SecurityParams,
    SessionKeys,
    combine,
    distribute_keys,
    required_n,
    total_consumption,
)


class TestDistributeKeys:
    def test_size_contract(self):
        bundles, arb = distribute_keys(4, 2, Random(0))
        assert len(bundles) == 2
        for b in (*bundles, arb):
            assert b.x.length == 8 and b.y.length == 4

    def test_deterministic_under_seed(self):
        assert distribute_keys(8, 3, Random(5)) == distribute_keys(8, 3, Random(5))

    def test_bit_balance(self):
        # 10^6 generated bits have mean within 3 sigma of one half
        rng = Random(42)
        ones = total = 0
        while total < 1_000_000:
            bundles, arb = distribute_keys(32, 9, rng)
            for b in (*bundles, arb):
                ones += b.x.weight() + b.y.weight()
                total += b.x.length + b.y.length
        sigma = 0.5 / math.sqrt(total)
        assert abs(ones / total - 0.5) < 3 * sigma

    def test_validates_arguments(self):
        with pytest.raises(ValueError):
            distribute_keys(1, 2, Random(0))
        with pytest.raises(ValueError):
            distribute_keys(4, 0, Random(0))


class TestCombine:
    def test_signer_equals_arbitrator(self):
        bundles, arb = distribute_keys(16, 5, Random(1))
        assert combine(bundles, arb) == combine(bundles, arb)

    def test_zero_receiver_keys_yield_arbitrator(self):
        zero = KeyBundle(BitString.zeros(8), BitString.zeros(4))
        _, arb = distribute_keys(4, 1, Random(2))
        sk = combine([zero], arb)
        assert sk.xs == arb.x and sk.ys == arb.y

    def test_order_independent(self):
        bundles, arb = distribute_keys(8, 4, Random(3))
        assert combine(bundles, arb) == combine(list(reversed(bundles)), arb)

    def test_self_inverse(self):
        # folding the combined keys back in as one more bundle recovers arb
        bundles, arb = distribute_keys(8, 3, Random(4))
        sk = combine(bundles, arb)
        back = combine(bundles, KeyBundle(sk.xs, sk.ys))
        assert back.xs == arb.x and back.ys == arb.y

    def test_length_mismatch_rejected(self):
        a = KeyBundle(BitString.zeros(8), BitString.zeros(4))
        b = KeyBundle(BitString.zeros(16), BitString.zeros(8))
        with pytest.raises(ValueError):
            combine([a], b)

    def test_bundle_shape_validated(self):
        with pytest.raises(ValueError):
            KeyBundle(BitString.zeros(9), BitString.zeros(4))
        with pytest.raises(ValueError):
            SessionKeys(BitString.zeros(7), BitString.zeros(4))


class TestRequiredN:
    @pytest.mark.parametrize("m_bits,eps,expected", [
        (8, 1e-10, 38),
        (2**23, 1e-10, 58),
        (2**13, 1e-10, 48),
        (2**13, 1e-14, 61),
        (2**23, 1e-14, 71),
        (2**23, 1e-20, 91),
    ])
    def test_pinned_values(self, m_bits, eps, expected):
        assert required_n(m_bits, eps) == expected

    def test_brute_force_minimality(self):
        # oracle: scan n upward with exact rational comparison
        for m_bits, eps in [(1, 0.5), (8, 1e-10), (1000, 1e-6), (2**13, 1e-14)]:
            n = 1
            while Fraction(m_bits, 2 ** (n - 1)) > Fraction(eps):
                n += 1
            assert required_n(m_bits, eps) == n

    @settings(max_examples=150, deadline=None)
    @given(st.integers(1, 2**30), st.integers(2, 60))
    def test_bound_satisfied_minimally(self, m_bits, neg_exp):
        eps = 2.0 ** -neg_exp
        n = required_n(m_bits, eps)
        assert Fraction(m_bits, 2 ** (n - 1)) <= Fraction(eps)
        if n > 1:
            assert Fraction(m_bits, 2 ** (n - 2)) > Fraction(eps)

    @settings(max_examples=100, deadline=None)
    @given(st.integers(1, 2**20), st.integers(1, 2**20))
    def test_monotone_in_message_length(self, a, b):
        lo, hi = min(a, b), max(a, b)
        assert required_n(lo, 1e-10) <= required_n(hi, 1e-10)

    def test_monotone_in_epsilon(self):
        for eps_hi, eps_lo in [(1e-6, 1e-10), (1e-10, 1e-14), (0.5, 1e-3)]:
            assert required_n(1024, eps_hi) <= required_n(1024, eps_lo)

    def test_validates_inputs(self):
        with pytest.raises(ValueError):
            required_n(0, 1e-10)
        with pytest.raises(ValueError):
            required_n(8, 0.0)
        with pytest.raises(ValueError):
            required_n(8, 1.0)


class TestTotalConsumption:
    def test_table_values(self):
        assert total_consumption(8, 1e-10, 7) == 912
        assert total_consumption(2**23, 1e-10, 4) == 870
        assert total_consumption(2**13, 1e-14, 10) == 2013

    def test_arbitrator_only(self):
        assert total_consumption(8, 1e-10, 0) == 3 * 38


class TestSecurityParams:
    def test_n_always_derived(self):
        sec = SecurityParams(m_bits=2**13, eps_f=1e-10, k=6)
        assert sec.n == 48
        assert sec.bits_per_link == 144
        assert sec.total_bits == 144 * 7

    def test_for_n_roundtrip(self):
        for n in (8, 16, 32):
            sec = SecurityParams.for_n(n, 64, 3)
            assert sec.n == n

    def test_for_n_rejects_long_message(self):
        with pytest.raises(ValueError):
            SecurityParams.for_n(4, 64, 1)
