"""Hamming-weight bookkeeping behind the GS sign pattern.

Bit strings are stored as ``(value, length)`` with bit ``i`` (0-based from the
left) equal to ``(value >> (length - 1 - i)) & 1``, so enumeration over all
strings of a length is a ``range``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

EXHAUSTIVE_PARITY_MAX = 20
PARITY_MAX = 24


@dataclass(frozen=True)
class BitString:
    value: int
    length: int

    def __post_init__(self):
        if self.length < 1:
            raise ValueError("bit string length must be >= 1")
        if not 0 <= self.value < (1 << self.length):
            raise ValueError(f"value {self.value} does not fit in {self.length} bits")

    @classmethod
    def from_str(cls, s: str) -> "BitString":
        if not s or set(s) - {"0", "1"}:
            raise ValueError(f"not a bit string: {s!r}")
        return cls(int(s, 2), len(s))

    @classmethod
    def from_bits(cls, bits) -> "BitString":
        bits = list(bits)
        if any(b not in (0, 1) for b in bits):
            raise ValueError("bits must be 0 or 1")
        return cls.from_str("".join(str(b) for b in bits))

    @property
    def bits(self) -> tuple[int, ...]:
        return tuple((self.value >> (self.length - 1 - i)) & 1 for i in range(self.length))

    def __str__(self):
        return format(self.value, f"0{self.length}b")


def _as_bitstring(x) -> BitString:
    if isinstance(x, BitString):
        return x
    if isinstance(x, str):
        return BitString.from_str(x)
    return BitString.from_bits(x)


def _popcount(v: int) -> int:
    return bin(v).count("1")


def hamming_weight(x) -> int:
    return _popcount(_as_bitstring(x).value)


def nu_sign(k: int, variant: str) -> int:
    """(-1)^(k(k+1)/2) for ``plus`` and (-1)^(k(k-1)/2) for ``minus``."""
    if k < 0:
        raise ValueError("k must be non-negative")
    if variant == "minus":
        e = k * (k - 1) // 2
    elif variant == "plus":
        e = k * (k + 1) // 2
    else:
        raise ValueError(f"variant must be 'plus' or 'minus', got {variant!r}")
    return -1 if e % 2 else 1


def parity_counts(L: int) -> tuple[int, int]:
    """Number of length-L strings with even and with odd Hamming weight."""
    if not 1 <= L <= PARITY_MAX:
        raise ValueError(f"length must be in 1..{PARITY_MAX}, got {L}")
    if L <= EXHAUSTIVE_PARITY_MAX:
        odd = sum(_popcount(v) & 1 for v in range(1 << L))
        return (1 << L) - odd, odd
    even = sum(math.comb(L, k) for k in range(0, L + 1, 2))
    odd = sum(math.comb(L, k) for k in range(1, L + 1, 2))
    return even, odd


def hamming_distance(m1, m2) -> int:
    a, b = _as_bitstring(m1), _as_bitstring(m2)
    if a.length != b.length:
        raise ValueError(f"length mismatch: {a.length} vs {b.length}")
    return _popcount(a.value ^ b.value)


@dataclass(frozen=True)
class Lemma3Report:
    k: int
    w1d: int
    w2d: int
    ws: int
    lhs_floor_floor: int
    rhs_floor_floor: int
    lhs_floor_ceil: int
    rhs_floor_ceil: int

    @property
    def both_equal(self) -> bool:
        return self.lhs_floor_floor == self.rhs_floor_floor and self.lhs_floor_ceil == self.rhs_floor_ceil


def split_weights(m1, m2) -> tuple[int, int, int, int]:
    """Split two strings into differing and shared parts.

    Returns ``(k, w(m1^d), w(m2^d), w(m_s))``; the differing positions are
    taken in left-to-right order (any order works, the identities only see
    weights).
    """
    a, b = _as_bitstring(m1), _as_bitstring(m2)
    if a.length != b.length:
        raise ValueError(f"length mismatch: {a.length} vs {b.length}")
    diff = a.value ^ b.value
    k = _popcount(diff)
    shared_mask = ((1 << a.length) - 1) & ~diff
    return k, _popcount(a.value & diff), _popcount(b.value & diff), _popcount(a.value & shared_mask)


def _ceil_half(x: int) -> int:
    return -(-x // 2)


def lemma3_rhs(k: int, w1d: int, ws: int) -> tuple[int, int]:
    """Case-table right-hand sides of the floor+floor and floor+ceil identities."""
    if k % 2:
        ff = (k - 1) // 2 + ws
    elif w1d % 2 == 0:
        ff = k // 2 + 2 * (ws // 2)
    else:
        ff = (k - 2) // 2 + 2 * _ceil_half(ws)

    if k % 2 == 0:
        fc = k // 2 + ws
    elif w1d % 2 == 0:
        fc = (k + 1) // 2 + 2 * (ws // 2)
    else:
        fc = (k - 1) // 2 + 2 * _ceil_half(ws)
    return ff, fc


def lemma3_check(m1, m2) -> Lemma3Report:
    a = _as_bitstring(m1)
    k, w1d, w2d, ws = split_weights(m1, m2)
    if not 1 <= k <= a.length - 1:
        raise ValueError(f"Hamming distance must be in 1..{a.length - 1}, got {k}")
    lhs_ff = (w1d + ws) // 2 + (w2d + ws) // 2
    lhs_fc = (w1d + ws) // 2 + _ceil_half(w2d + ws)
    rhs_ff, rhs_fc = lemma3_rhs(k, w1d, ws)
    return Lemma3Report(k, w1d, w2d, ws, lhs_ff, rhs_ff, lhs_fc, rhs_fc)


def _popcount_array(v: np.ndarray) -> np.ndarray:
    v = v.astype(np.uint32)
    out = np.zeros(v.shape, dtype=np.int64)
    for shift in range(0, 32, 8):
        out += _BYTE_POPCOUNT[(v >> shift) & 0xFF]
    return out


_BYTE_POPCOUNT = np.array([bin(i).count("1") for i in range(256)], dtype=np.int64)


def lemma3_batch(v1: np.ndarray, v2: np.ndarray, length: int) -> np.ndarray:
    """Vectorized identity check for pairs of strings given as integer arrays.

    Pairs outside the admissible distance range are reported as ``True``.
    Both sides are evaluated in exact integer arithmetic.
    """
    full = (1 << length) - 1
    v1 = np.asarray(v1, dtype=np.int64)
    v2 = np.asarray(v2, dtype=np.int64)
    diff = v1 ^ v2
    k = _popcount_array(diff)
    w1d = _popcount_array(v1 & diff)
    w2d = k - w1d
    ws = _popcount_array(v1 & ~diff & full)

    lhs_ff = (w1d + ws) // 2 + (w2d + ws) // 2
    lhs_fc = (w1d + ws) // 2 + -(-(w2d + ws) // 2)

    k_odd = k % 2 == 1
    w_odd = w1d % 2 == 1
    floor_ws = 2 * (ws // 2)
    ceil_ws = 2 * -(-ws // 2)
    rhs_ff = np.where(k_odd, (k - 1) // 2 + ws, np.where(w_odd, (k - 2) // 2 + ceil_ws, k // 2 + floor_ws))
    rhs_fc = np.where(~k_odd, k // 2 + ws, np.where(w_odd, (k - 1) // 2 + ceil_ws, (k + 1) // 2 + floor_ws))

    admissible = (k >= 1) & (k <= length - 1)
    return ~admissible | ((lhs_ff == rhs_ff) & (lhs_fc == rhs_fc))


def lemma3_exhaustive(length: int) -> int:
    """Check every admissible ordered pair of one length; returns the pair count.

    Raises ``AssertionError`` naming the first failing pair.
    """
    values = np.arange(1 << length, dtype=np.int64)
    count = 0
    for v1 in range(1 << length):
        ok = lemma3_batch(np.full_like(values, v1), values, length)
        if not ok.all():
            v2 = int(values[~ok][0])
            raise AssertionError(f"identity fails for {v1:0{length}b}, {v2:0{length}b}")
        d = _popcount_array(values ^ v1)
        count += int(np.count_nonzero((d >= 1) & (d <= length - 1)))
    return count


def lemma3_random(length: int, samples: int, rng: np.random.Generator) -> int:
    """Check random admissible pairs; returns how many were checked."""
    full = (1 << length) - 1
    v1 = rng.integers(0, full + 1, size=samples, dtype=np.int64)
    v2 = rng.integers(0, full + 1, size=samples, dtype=np.int64)
    d = _popcount_array(v1 ^ v2)
    keep = (d >= 1) & (d <= length - 1)
    ok = lemma3_batch(v1[keep], v2[keep], length)
    if not ok.all():
        i = int(np.flatnonzero(~ok)[0])
        raise AssertionError(f"identity fails for {int(v1[keep][i]):0{length}b}, {int(v2[keep][i]):0{length}b}")
    return int(keep.sum())


def floor_split_holds(wx: int, wy: int) -> bool:
    """floor((wx+wy)/2) splits into halves as floor/ceil of wx depending on wy parity."""
    lhs = (wx + wy) // 2
    rhs = wx // 2 + wy // 2 if wy % 2 == 0 else _ceil_half(wx) + wy // 2
    return lhs == rhs
