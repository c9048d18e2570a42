"""Seed digit sources: a reproducible Gauss-measure sampler and a file reader.

The sampler stands in for a statistically typical partial-quotient
stream. Independent draws from the single-digit law would get pair
frequencies wrong (consecutive partial quotients are dependent), so the
stream is the stationary Markov chain matching the Gauss measure on
digit pairs: the invariance of the measure under the shift makes every
single-digit AND two-digit window frequency exact in expectation.

The stream is specified exactly so any implementation reproduces the
same digits from the same seed ("splitmix64-gauss-markov-v1"):

* PRNG: splitmix64 (Steele-Lea-Vigier), 64-bit state, golden-gamma
  increment; zero outputs are rejected, so each draw U lies in
  [1, 2**64 - 1] and encodes the uniform u = U / 2**64 in (0, 1).
* Fixed-point Gauss measures come from ``log2_fixed(num, den, 64)``,
  the deterministic truncating square-and-extract loop (48 guard bits).
* First digit: the largest k >= 1 with U <= T(k), where
  T(m) = log2_fixed(m + 1, m, 64). This inverts u = log2(1 + x) and
  applies floor(1/x), entirely in integers.
* Later digits, given the previous digit j: the largest k >= 1 with
  U * M(j) <= W(j, k) << 64, where M(j) is the fixed-point measure of
  the one-digit cylinder of j and W(j, m) the measure of its
  sub-interval on which the next digit is >= m, i.e. the interval from
  m/(j*m + 1) to 1/j. (W(j, 1) = M(j), so k >= 1 always.)
* Digits are clamped to a configurable cap (default 10**6) so that
  astronomically rare huge digits cannot bloat downstream convergents;
  the Markov state is the clamped digit.

Floating point appears only as a starting guess for the threshold walk;
the exact integer comparisons decide every digit.
"""

from __future__ import annotations

import math
from typing import Iterator

from .cf import log2_fixed
from .errors import InputFormatError

_MASK64 = (1 << 64) - 1
_GAMMA = 0x9E3779B97F4A7C15

SAMPLER_VERSION = "splitmix64-gauss-markov-v1"
DEFAULT_DIGIT_CAP = 10**6


class SplitMix64:
    """The splitmix64 generator; 64-bit outputs, splittable."""

    __slots__ = ("state",)

    def __init__(self, seed: int):
        self.state = seed & _MASK64

    def next_u64(self) -> int:
        self.state = (self.state + _GAMMA) & _MASK64
        z = self.state
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
        return z ^ (z >> 31)

    def split(self) -> "SplitMix64":
        """Independent child generator derived from the current stream."""
        return SplitMix64(self.next_u64())

    def next_unit(self) -> int:
        """Non-zero 64-bit draw: u = value / 2**64 lies in (0, 1)."""
        u = self.next_u64()
        while u == 0:
            u = self.next_u64()
        return u


def _interval_measure64(lo_num: int, lo_den: int, hi_num: int, hi_den: int) -> int:
    """2**64-scaled Gauss measure of (lo, hi): log2((1 + hi)/(1 + lo))."""
    num = (hi_den + hi_num) * lo_den
    den = hi_den * (lo_den + lo_num)
    return log2_fixed(num, den, 64)


_marginal: dict[int, int] = {}
_state_measure: dict[int, int] = {}
_conditional: dict[tuple[int, int], int] = {}
_CACHE_LIMIT = 1 << 20


def _threshold(m: int) -> int:
    """Marginal CDF boundary T(m): 2**64 * log2(1 + 1/m), truncated."""
    cached = _marginal.get(m)
    if cached is None:
        cached = log2_fixed(m + 1, m, 64)
        if len(_marginal) < _CACHE_LIMIT:
            _marginal[m] = cached
    return cached


def _measure_of_state(j: int) -> int:
    """Fixed-point Gauss measure of the one-digit cylinder of j."""
    cached = _state_measure.get(j)
    if cached is None:
        cached = _interval_measure64(1, j + 1, 1, j)
        if len(_state_measure) < _CACHE_LIMIT:
            _state_measure[j] = cached
    return cached


def _tail_weight(j: int, m: int) -> int:
    """Fixed-point measure of the part of j's cylinder with next digit >= m."""
    key = (j, m)
    cached = _conditional.get(key)
    if cached is None:
        cached = _interval_measure64(m, j * m + 1, 1, j)
        if len(_conditional) < _CACHE_LIMIT:
            _conditional[key] = cached
    return cached


def digit_from_unit(u_fixed: int, cap: int = DEFAULT_DIGIT_CAP) -> int:
    """Map a fixed-point uniform draw (u = u_fixed / 2**64, 0 < u < 1) to a digit.

    Implements k = floor(1/(2**u - 1)) clamped to [1, cap]: the inverse
    Gauss-measure CDF followed by the first-digit map.
    """
    if not 0 < u_fixed < 1 << 64:
        raise ValueError("u_fixed must lie strictly between 0 and 2**64")
    if cap < 1:
        raise ValueError("digit cap must be >= 1")
    u = u_fixed / 2.0**64
    x = 2.0**u - 1.0
    guess = int(1.0 / x) if x > 0 else cap
    k = max(1, min(guess, cap))
    while k < cap and u_fixed <= _threshold(k + 1):
        k += 1
    while k > 1 and u_fixed > _threshold(k):
        k -= 1
    return k


def conditional_digit(u_fixed: int, prev: int, cap: int = DEFAULT_DIGIT_CAP) -> int:
    """Next digit given the previous one, under the exact Gauss pair law."""
    if not 0 < u_fixed < 1 << 64:
        raise ValueError("u_fixed must lie strictly between 0 and 2**64")
    if prev < 1 or cap < 1:
        raise ValueError("previous digit and cap must be >= 1")
    measure = _measure_of_state(prev)
    scaled = u_fixed * measure
    # Float starting guess: invert the conditional CDF in the tail variable.
    q = u_fixed / 2.0**64
    lo = math.log2((prev + 2.0) / (prev + 1.0))
    hi = math.log2((prev + 1.0) / prev)
    target = hi - q * (hi - lo)  # log2(1 + x) at the conditional quantile
    ratio = 2.0**target
    tail = 1.0 / (ratio - 1.0) - prev if ratio > 1.0 else 0.0
    guess = int(1.0 / tail) if tail > 0 else cap
    k = max(1, min(guess, cap))
    while k < cap and scaled <= _tail_weight(prev, k + 1) << 64:
        k += 1
    while k > 1 and scaled > _tail_weight(prev, k) << 64:
        k -= 1
    return k


def gauss_kuzmin_digit(rng: SplitMix64, cap: int = DEFAULT_DIGIT_CAP) -> int:
    """Draw one partial quotient with the Gauss-Kuzmin single-digit law."""
    return digit_from_unit(rng.next_unit(), cap)


class RngDigitSource:
    """Reproducible stationary stream of partial quotients.

    The first digit follows the single-digit marginal; every later digit
    follows the exact conditional law given its predecessor.
    """

    def __init__(self, seed: int, cap: int = DEFAULT_DIGIT_CAP):
        self.seed = seed
        self.cap = cap
        self.position = 0
        self._rng = SplitMix64(seed)
        self._state: int | None = None

    def next_digits(self, count: int) -> list[int]:
        out = []
        state = self._state
        rng = self._rng
        cap = self.cap
        for _ in range(count):
            if state is None:
                state = digit_from_unit(rng.next_unit(), cap)
            else:
                state = conditional_digit(rng.next_unit(), state, cap)
            out.append(state)
        self._state = state
        self.position += count
        return out

    def descriptor(self) -> dict:
        return {"kind": "rng", "algorithm": SAMPLER_VERSION,
                "seed": str(self.seed), "digit_cap": self.cap}


def parse_digit_file(lines: Iterator[str]) -> list[int]:
    """Digits from file lines: one positive decimal integer per line.

    Blank lines and ``#`` comments are skipped. Malformed or
    non-positive entries raise :class:`InputFormatError` with the
    offending 1-based line number.
    """
    digits = []
    for lineno, raw in enumerate(lines, start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        try:
            value = int(line)
        except ValueError:
            raise InputFormatError(f"not an integer: {line!r}", line=lineno) from None
        if value < 1:
            raise InputFormatError(
                f"partial quotients must be >= 1, got {value}", line=lineno)
        digits.append(value)
    return digits


class FileDigitSource:
    """Seed digits read from a digit file (one per line, ``#`` comments allowed)."""

    def __init__(self, path):
        self.path = str(path)
        with open(path, "r", encoding="utf-8") as fh:
            self._digits = parse_digit_file(fh)
        self.position = 0

    def __len__(self) -> int:
        return len(self._digits)

    def next_digits(self, count: int) -> list[int]:
        if self.position + count > len(self._digits):
            raise InputFormatError(
                f"digit file {self.path} exhausted: needed {count} more digits "
                f"at position {self.position}, only "
                f"{len(self._digits) - self.position} remain")
        out = self._digits[self.position:self.position + count]
        self.position += count
        return out

    def descriptor(self) -> dict:
        import hashlib
        with open(self.path, "rb") as fh:
            digest = hashlib.sha256(fh.read()).hexdigest()
        return {"kind": "file", "path": self.path, "sha256": digest}


class ListDigitSource:
    """In-memory digit source, mainly for tests and library use."""

    def __init__(self, digits):
        self._digits = list(digits)
        if any(d < 1 for d in self._digits):
            raise ValueError("partial quotients must be >= 1")
        self.position = 0

    def __len__(self) -> int:
        return len(self._digits)

    def next_digits(self, count: int) -> list[int]:
        if self.position + count > len(self._digits):
            raise InputFormatError(
                f"digit list exhausted: needed {count} more digits at "
                f"position {self.position}")
        out = self._digits[self.position:self.position + count]
        self.position += count
        return out

    def descriptor(self) -> dict:
        return {"kind": "list", "length": len(self._digits)}
