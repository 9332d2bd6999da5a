"""Tests for the seeded pseudo-random function."""

from fractions import Fraction

import pytest

from hypersketch.core.prf import Prf, encode_parts, prf_bit, trailing_ones


class TestPrf:
    """Determinism and tag separation."""

    def test_rate_extremes(self, prf):
        assert prf_bit(prf, b"x", Fraction(1)) == 1
        assert prf_bit(prf, b"x", Fraction(0)) == 0

    def test_same_input_same_bit(self, prf):
        bits = {prf_bit(prf, b"edge-7", Fraction(1, 2)) for _ in range(5)}
        assert len(bits) == 1

    def test_rate_out_of_range(self, prf):
        with pytest.raises(ValueError):
            prf_bit(prf, b"x", Fraction(3, 2))

    def test_half_rate_is_balanced(self, prf):
        ones = sum(prf_bit(prf, encode_parts(i), Fraction(1, 2)) for i in range(2000))
        assert 850 < ones < 1150

    def test_children_are_independent_streams(self, prf):
        a, b = prf.child("stage", 0), prf.child("stage", 1)
        assert a.digest(b"x", 16) != b.digest(b"x", 16)
        assert a.digest(b"x", 16) == prf.child("stage", 0).digest(b"x", 16)

    def test_uniform_bound(self, prf):
        assert all(0 <= prf.uniform(encode_parts(i), 7) < 7 for i in range(100))
        with pytest.raises(ValueError):
            prf.uniform(b"x", 0)

    def test_commitment_ignores_tag(self):
        seed = bytes(range(32))
        assert Prf(seed, "a").commitment() == Prf(seed, "b").commitment()
        assert Prf(seed).commitment() != Prf(bytes(32)).commitment()

    def test_seed_length(self):
        with pytest.raises(ValueError):
            Prf(b"short")

    def test_encode_parts_is_unambiguous(self):
        assert encode_parts("ab", "c") != encode_parts("a", "bc")
        assert encode_parts(1) != encode_parts("1")

    def test_trailing_ones(self):
        assert [trailing_ones(w) for w in (0, 1, 3, 0b1011, 0b0111)] == [0, 1, 2, 2, 3]
