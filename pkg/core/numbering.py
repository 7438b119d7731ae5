"""
Numbering helpers: Cantor pairing, tuple codes and finite-set codes.

Derived posets and codes index their elements by natural numbers; these
functions fix that numbering once for every module.
"""

from math import isqrt


def pair(i, j):
    """Cantor pairing of two naturals."""
    s = i + j
    return s * (s + 1) // 2 + j


def unpair(k):
    """Inverse of pair."""
    w = (isqrt(8 * k + 1) - 1) // 2
    t = w * (w + 1) // 2
    j = k - t
    return w - j, j


def tuple_code(items):
    """Code a nonempty tuple of naturals as (length - 1) paired with its entries."""
    items = list(items)
    body = items[-1]
    for x in reversed(items[:-1]):
        body = pair(x, body)
    return pair(len(items) - 1, body)


def tuple_decode(code):
    n, body = unpair(code)
    out = []
    for _ in range(n):
        x, body = unpair(body)
        out.append(x)
    out.append(body)
    return tuple(out)


def set_code(elements):
    """Bitmask code of a finite set of naturals."""
    code = 0
    for x in elements:
        code |= 1 << x
    return code


def set_decode(code):
    out = []
    i = 0
    while code:
        if code & 1:
            out.append(i)
        code >>= 1
        i += 1
    return tuple(out)


def word(i):
    """Bijective binary numbering of finite 0/1 words: 0 -> '', 1 -> '0', 2 -> '1', 3 -> '00'."""
    return bin(i + 1)[3:]


def word_index(w):
    return int("1" + w, 2) - 1
