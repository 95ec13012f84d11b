from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from labelforest.bits import (
    ZERO_CODE,
    ApproxCode,
    BitString,
    MalformedCode,
    approx,
    approx_pack,
    approx_unpack,
    approx_value,
    concat,
    gamma_decode,
    gamma_encode,
    precision_for,
    snap_up,
    wlsb,
)


def gamma_oracle(x: int) -> str:
    # textbook construction on strings
    b = bin(x)[2:]
    return "0" * (len(b) - 1) + b


def approx_oracle(a: int, t: int) -> int:
    # exact rational rounding up to t significant bits
    if a == 0:
        return 0
    e = max(0, a.bit_length() - t)
    m = -(-Fraction(a) // 2 ** e)
    return int(m) * 2 ** e


# -- BitString ---------------------------------------------------------------


def test_bitstring_keeps_leading_zeros():
    s = BitString.from_str("0010")
    assert (s.value, s.length) == (2, 4)
    assert str(s) == "0010"


def test_bitstring_rejects_overflowing_value():
    with pytest.raises(ValueError):
        BitString(4, 2)


def test_bitstring_hex_round_trip():
    s = BitString.from_str("1011001")
    assert s.hex() == "x59"
    assert BitString.from_str("x59").value == s.value


def test_bitstring_empty():
    assert len(BitString.from_str("")) == 0
    assert str(BitString()) == ""


def test_bitstring_read_past_end():
    with pytest.raises(MalformedCode):
        BitString.from_str("101").read(2, 2)


@given(st.text(alphabet="01", max_size=80), st.text(alphabet="01", max_size=80))
def test_concat_matches_string_join(a, b):
    got = concat(BitString.from_str(a), BitString.from_str(b))
    assert str(got) == a + b
    assert BitString.from_str(a) + BitString.from_str(b) == got


# -- gamma codes -----------------------------------------------------------------


@pytest.mark.parametrize("x, code", [(1, "1"), (2, "010"), (5, "00101")])
def test_gamma_examples(x, code):
    assert str(gamma_encode(x)) == code
    assert code == gamma_oracle(x)


def test_gamma_decode_examples():
    assert gamma_decode(BitString.from_str("1"), 0) == (1, 1)
    assert gamma_decode(BitString.from_str("00101"), 0) == (5, 5)
    with pytest.raises(MalformedCode):
        gamma_decode(BitString.from_str("00"), 0)


def test_gamma_rejects_zero():
    with pytest.raises(ValueError):
        gamma_encode(0)


@given(st.integers(1, 2 ** 40))
def test_gamma_round_trip(x):
    code = gamma_encode(x)
    assert str(code) == gamma_oracle(x)
    assert gamma_decode(code, 0) == (x, 2 * x.bit_length() - 1)


@given(st.lists(st.integers(1, 2 ** 30), min_size=1, max_size=8), st.text(alphabet="01", max_size=5))
def test_gamma_is_prefix_free(xs, prefix):
    s = concat(BitString.from_str(prefix), *(gamma_encode(x) for x in xs))
    pos = len(prefix)
    for x in xs:
        got, pos = gamma_decode(s, pos)
        assert got == x
    assert pos == s.length


@given(st.text(alphabet="01", max_size=40), st.integers(0, 45))
def test_gamma_decode_total(text, pos):
    s = BitString.from_str(text)
    try:
        x, end = gamma_decode(s, pos)
    except MalformedCode:
        return
    assert x >= 1 and pos < end <= s.length


# -- wlsb / snap_up ----------------------------------------------------------------


def test_wlsb_examples():
    assert str(wlsb(12, 2)) == "11"
    assert wlsb(5, 10).length == 0
    assert str(wlsb(5, 0)) == "101"


@given(st.integers(0, 2 ** 70), st.integers(0, 80))
def test_wlsb_matches_string_truncation(a, k):
    b = bin(a)[2:] if a else ""
    assert str(wlsb(a, k)) == b[: max(0, len(b) - k)]


@given(st.integers(0, 2 ** 50), st.integers(0, 40))
def test_wlsb_reconstructs_aligned_values(a, k):
    a = (a >> k) << k
    assert wlsb(a, k).value << k == a


@given(st.integers(0, 2 ** 50), st.integers(0, 40))
def test_snap_up_is_smallest_aligned_upper_bound(s, k):
    x = snap_up(s, k)
    assert x >= s and x % (1 << k) == 0 and x - s < (1 << k)


# -- approximation codec ------------------------------------------------------------


def test_approx_zero():
    assert approx(0, 5) == ZERO_CODE
    assert approx(0, 5).value == 0


def test_approx_exact_below_precision():
    c = approx(5, 8)
    assert (c.exponent, c.mantissa, c.value) == (0, 5, 5)


def test_approx_rounds_up():
    c = approx(1000, 4)
    assert (c.exponent, c.mantissa, c.value) == (6, 16, 1024)
    assert 1000 <= c.value < 1000 * (1 + Fraction(1, 8))


def test_pack_examples():
    assert str(approx_pack(ZERO_CODE)) == "11"
    assert str(approx_pack(ApproxCode(False, 0, 5))) == "1" + "0" + "1" + "00101"


def test_unpack_skips_padding():
    code = ApproxCode(False, 0, 5)
    padded = BitString.from_str("000") + approx_pack(code)
    assert approx_unpack(padded, 0) == (code, padded.length)


def test_unpack_rejects_all_zero_field():
    with pytest.raises(MalformedCode):
        approx_unpack(BitString.from_str("0000"), 0)


@given(st.integers(0, 2 ** 80), st.integers(1, 40))
def test_approx_error_bound(a, t):
    b = approx(a, t).value
    assert b == approx_oracle(a, t) == approx_value(a, t)
    assert a <= b
    assert b * 2 ** (t - 1) <= a * (2 ** (t - 1) + 1)
    assert (b == 0) == (a == 0)


@given(st.integers(0, 2 ** 60), st.integers(0, 2 ** 60), st.integers(1, 30))
def test_approx_is_monotone(a, b, t):
    lo, hi = sorted((a, b))
    assert approx_value(lo, t) <= approx_value(hi, t)


@given(st.integers(0, 2 ** 80), st.integers(1, 40), st.integers(0, 6))
def test_pack_round_trip_and_size(a, t, pad):
    c = approx(a, t)
    packed = approx_pack(c)
    s = BitString(0, pad) + packed
    assert approx_unpack(s, 0, s.length) == (c, s.length)
    if not c.zero:
        lg = lambda x: max(1, (x - 1).bit_length())  # noqa: E731
        assert packed.length <= 4 + 2 * lg(c.exponent + 1) + 2 * lg(c.mantissa)


@pytest.mark.parametrize("gamma", range(1, 200))
def test_precision_meets_relative_error(gamma):
    t = precision_for(gamma)
    # 2^(1-t) <= gamma^-3
    assert 2 ** (t - 1) >= gamma ** 3
