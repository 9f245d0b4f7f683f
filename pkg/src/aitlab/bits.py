"""Prefix-free codes for naturals and strings, and a bijective string pairing.

Bit strings are ``str`` objects over ``'0'``/``'1'``.  The natural-number code
``e(n)`` is::

    e(0) = 00, e(1) = 01
    e(n) = 1 0^(k-1) 1 b_1..b_k    for n >= 2, where n = 1 b_1..b_k in binary

so ``|e(n)| = 2*floor(log2 n) + 1`` for ``n >= 2`` and 2 otherwise.
"""

from __future__ import annotations

from itertools import product
from math import isqrt
from typing import Iterator

from aitlab.errors import MalformedCode


def ilog2(n: int) -> int:
    """floor(log2 n), with log 0 = 0."""
    return n.bit_length() - 1 if n > 0 else 0


def is_bits(s: str) -> bool:
    return all(c in "01" for c in s)


def check_bits(s: str) -> str:
    if not isinstance(s, str) or not is_bits(s):
        raise ValueError(f"not a bit string: {s!r}")
    return s


def is_prefix(a: str, b: str) -> bool:
    return b.startswith(a)


def comparable(a: str, b: str) -> bool:
    return a.startswith(b) or b.startswith(a)


def strings_of_length(n: int) -> Iterator[str]:
    """All strings of length n in lexicographic order."""
    if n == 0:
        yield ""
        return
    for t in product("01", repeat=n):
        yield "".join(t)


def strings_up_to(n: int) -> Iterator[str]:
    """All strings of length <= n in length-lex order."""
    for k in range(n + 1):
        yield from strings_of_length(k)


def encode_nat(n: int) -> str:
    if n < 0:
        raise ValueError("encode_nat needs n >= 0")
    if n < 2:
        return "0" + str(n)
    body = bin(n)[3:]
    return "1" + "0" * (len(body) - 1) + "1" + body


def decode_nat(stream: str, pos: int = 0) -> tuple[int, int]:
    """Decode one ``e(n)`` starting at ``pos``; return ``(n, bits consumed)``."""
    end = len(stream)
    if pos >= end:
        raise MalformedCode("empty stream")
    if stream[pos] == "0":
        if pos + 2 > end:
            raise MalformedCode("truncated code")
        return int(stream[pos + 1]), 2
    j = pos + 1
    while j < end and stream[j] == "0":
        j += 1
    if j >= end:
        raise MalformedCode("truncated code")
    k = j - pos
    if j + 1 + k > end:
        raise MalformedCode("truncated code")
    return int("1" + stream[j + 1:j + 1 + k], 2), 2 * k + 1


def encode_string(x: str) -> str:
    return encode_nat(len(x)) + x


def decode_string(stream: str, pos: int = 0) -> tuple[str, int]:
    """Decode one ``e(x) = e(|x|) x``; return ``(x, bits consumed)``."""
    n, used = decode_nat(stream, pos)
    start = pos + used
    if start + n > len(stream):
        raise MalformedCode("truncated string payload")
    return stream[start:start + n], used + n


def rank(s: str) -> int:
    """Position of s in length-lex order: '' -> 0, '0' -> 1, '1' -> 2, ..."""
    return (1 << len(s)) - 1 + (int(s, 2) if s else 0)


def unrank(r: int) -> str:
    if r < 0:
        raise ValueError("rank must be >= 0")
    length = (r + 1).bit_length() - 1
    if length == 0:
        return ""
    return format(r + 1 - (1 << length), f"0{length}b")


def cantor(a: int, b: int) -> int:
    return (a + b) * (a + b + 1) // 2 + b


def uncantor(z: int) -> tuple[int, int]:
    w = (isqrt(8 * z + 1) - 1) // 2
    b = z - w * (w + 1) // 2
    return w - b, b


def pair(x: str, y: str) -> str:
    return unrank(cantor(rank(x), rank(y)))


def unpair(s: str) -> tuple[str, str]:
    a, b = uncantor(rank(s))
    return unrank(a), unrank(b)


def binary(n: int) -> str:
    """Binary numeral of n without leading zeros ('0' for zero)."""
    return format(n, "b")
