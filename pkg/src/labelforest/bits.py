"""Bit strings and the integer codes used inside labels.

A :class:`BitString` is an MSB-first sequence of bits stored as a Python
integer plus an explicit length, so leading zeros are kept.  All codes here
work on that ``(value, length)`` pair directly; the ``_at`` helpers are the
allocation-free versions used by the label parsers.
"""

from __future__ import annotations

from typing import NamedTuple

LABEL_CAPACITY = 512


class MalformedCode(ValueError):
    """A code could not be read at the requested position."""


class BitString:
    """Immutable MSB-first bit sequence."""

    __slots__ = ("value", "length")

    def __init__(self, value: int = 0, length: int = 0):
        if length < 0 or value < 0 or value >> length:
            raise ValueError(f"value {value} does not fit in {length} bits")
        self.value = value
        self.length = length

    @classmethod
    def from_str(cls, text: str) -> BitString:
        text = text.strip()
        if text.startswith("x"):
            digits = text[1:]
            if not digits:
                return cls(0, 0)
            return cls(int(digits, 16), 4 * len(digits))
        if text and set(text) - {"0", "1"}:
            raise ValueError(f"not a bit string: {text!r}")
        return cls(int(text, 2) if text else 0, len(text))

    def __len__(self) -> int:
        return self.length

    def __str__(self) -> str:
        if not self.length:
            return ""
        return format(self.value, "0%db" % self.length)

    def __repr__(self) -> str:
        return f"BitString({str(self)!r})"

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, BitString):
            return NotImplemented
        return self.value == other.value and self.length == other.length

    def __lt__(self, other: BitString) -> bool:
        return (self.length, self.value) < (other.length, other.value)

    def __hash__(self) -> int:
        return hash((self.value, self.length))

    def __add__(self, other: BitString) -> BitString:
        return BitString((self.value << other.length) | other.value, self.length + other.length)

    def __getitem__(self, i: int) -> int:
        if i < 0:
            i += self.length
        if not 0 <= i < self.length:
            raise IndexError(i)
        return (self.value >> (self.length - 1 - i)) & 1

    def read(self, pos: int, nbits: int) -> int:
        """Integer formed by ``nbits`` bits starting at ``pos``."""
        if pos < 0 or nbits < 0 or pos + nbits > self.length:
            raise MalformedCode(f"read of {nbits} bits at {pos} past end ({self.length})")
        return (self.value >> (self.length - pos - nbits)) & ((1 << nbits) - 1)

    def hex(self) -> str:
        """Hex form: bits left-padded with zeros to a multiple of 4, prefixed 'x'."""
        digits = (self.length + 3) // 4
        if not digits:
            return "x"
        return "x" + format(self.value, "0%dx" % digits)


def concat(*parts: BitString) -> BitString:
    value = 0
    length = 0
    for p in parts:
        value = (value << p.length) | p.value
        length += p.length
    return BitString(value, length)


def gamma_encode(x: int) -> BitString:
    """Elias gamma code: floor(log2 x) zeros, then x in binary."""
    if x < 1:
        raise ValueError(f"gamma code needs x >= 1, got {x}")
    if x >= 1 << 63:
        raise ValueError(f"gamma code argument too large: {x}")
    return BitString(x, 2 * x.bit_length() - 1)


def _gamma_at(value: int, length: int, pos: int) -> tuple[int, int]:
    rem = length - pos
    if rem <= 0:
        raise MalformedCode("gamma code starts past end")
    tail = value & ((1 << rem) - 1)
    if not tail:
        raise MalformedCode("gamma code without terminating 1 bit")
    width = 2 * (rem - tail.bit_length()) + 1
    if width > rem:
        raise MalformedCode("gamma code runs past end")
    return tail >> (rem - width), pos + width


def gamma_decode(s: BitString, pos: int = 0) -> tuple[int, int]:
    """Read a gamma code at ``pos``; returns ``(value, next position)``."""
    if pos < 0:
        raise MalformedCode("negative position")
    return _gamma_at(s.value, s.length, pos)


def wlsb(a: int, k: int) -> BitString:
    """Binary form of ``a`` with its ``k`` least significant bits dropped."""
    if a < 0 or k < 0:
        raise ValueError("wlsb needs non-negative arguments")
    keep = a.bit_length() - k
    if keep <= 0:
        return BitString(0, 0)
    return BitString(a >> k, keep)


def snap_up(s: int, k: int) -> int:
    """Smallest integer >= s whose k low bits are zero."""
    a = (s >> k) << k
    return s if a == s else a + (1 << k)


class ApproxCode(NamedTuple):
    """Round-up floating value ``mantissa * 2**exponent`` (or zero)."""

    zero: bool
    exponent: int
    mantissa: int

    @property
    def value(self) -> int:
        return 0 if self.zero else self.mantissa << self.exponent


ZERO_CODE = ApproxCode(True, 0, 0)


def precision_for(gamma: int) -> int:
    """Mantissa bits t with 2**(1 - t) <= gamma**-3 (lg floored at 1)."""
    return max(3, (gamma ** 3 - 1).bit_length()) + 1


def approx(a: int, t: int) -> ApproxCode:
    """Smallest ``m * 2**e >= a`` with ``e = max(0, bitlen(a) - t)``.

    The result b satisfies ``a <= b <= a * (1 + 2**(1 - t))`` and is monotone
    in ``a``.
    """
    if t < 1:
        raise ValueError("precision must be at least 1 bit")
    if a < 0:
        raise ValueError("cannot approximate a negative value")
    if a == 0:
        return ZERO_CODE
    e = a.bit_length() - t
    if e <= 0:
        return ApproxCode(False, 0, a)
    return ApproxCode(False, e, -((-a) >> e))


def approx_value(a: int, t: int) -> int:
    """``approx(a, t).value`` without building the code."""
    e = a.bit_length() - t
    if e <= 0:
        return a
    return -((-a) >> e) << e


def approx_pack(c: ApproxCode) -> BitString:
    """'1' sentinel, zero flag, then gamma(e + 1) and gamma(m) when nonzero."""
    if c.zero:
        return BitString(0b11, 2)
    if c.mantissa < 1 or c.exponent < 0:
        raise ValueError(f"invalid approximation code {c}")
    e1 = gamma_encode(c.exponent + 1)
    m = gamma_encode(c.mantissa)
    return concat(BitString(0b10, 2), e1, m)


def approx_unpack(s: BitString, pos: int = 0, width: int | None = None) -> tuple[ApproxCode, int]:
    """Inverse of :func:`approx_pack`, skipping leading zero padding.

    With ``width`` the code must lie inside ``[pos, pos + width)``; without it
    the padding may extend to the end of ``s``.
    """
    end = s.length if width is None else pos + width
    if pos < 0 or end > s.length:
        raise MalformedCode("approximation entry out of range")
    rem = end - pos
    field = (s.value >> (s.length - end)) & ((1 << rem) - 1) if rem > 0 else 0
    if not field:
        raise MalformedCode("no sentinel bit in approximation entry")
    start = end - field.bit_length()
    if start + 2 > end:
        raise MalformedCode("approximation entry truncated")
    if s.read(start + 1, 1):
        return ZERO_CODE, start + 2
    window = s.value >> (s.length - end)
    e1, p = _gamma_at(window, end, start + 2)
    m, p = _gamma_at(window, end, p)
    return ApproxCode(False, e1 - 1, m), p
