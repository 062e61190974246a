"""Two-sided sequences over {1, 2}: the Fibonacci word, factors, slope and runs."""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

from .exceptions import PreconditionError, WindowError

__all__ = [
    "BiSequence",
    "fibonacci_word",
    "two_sided_fibonacci",
    "fibonacci_stage_radius",
    "language",
    "block_complexity",
    "slope_estimate",
    "has_unbounded_runs",
    "SequenceFormatError",
]

ALPHABET = "12"


class SequenceFormatError(ValueError):
    """Text that is not a valid ``left|right`` sequence over {1, 2}."""


@lru_cache(maxsize=None)
def fibonacci_word(n: int) -> str:
    """f_0 = 1, f_1 = 21, f_{n+1} = f_n f_{n-1}."""
    if n < 0:
        raise PreconditionError("generation must be >= 0")
    a, b = "1", "21"
    for _ in range(n):
        a, b = b, b + a
    return a


@dataclass(frozen=True)
class BiSequence:
    """Symbols x_-W .. x_W stored left to right; index 0 sits at position W."""

    symbols: str
    radius: int

    def __post_init__(self):
        if self.radius < 0:
            raise ValueError("radius must be >= 0")
        if len(self.symbols) != 2 * self.radius + 1:
            raise ValueError(f"radius {self.radius} needs {2 * self.radius + 1} symbols, got {len(self.symbols)}")
        bad = set(self.symbols) - set(ALPHABET)
        if bad:
            raise ValueError(f"symbols must be 1 or 2, found {sorted(bad)}")

    @classmethod
    def constant(cls, symbol: str | int, radius: int) -> "BiSequence":
        return cls(str(symbol) * (2 * radius + 1), radius)

    @classmethod
    def periodic(cls, pattern: str, radius: int) -> "BiSequence":
        """x_i = pattern[i mod len(pattern)]."""
        p = len(pattern)
        return cls("".join(pattern[i % p] for i in range(-radius, radius + 1)), radius)

    @classmethod
    def from_text(cls, text: str) -> "BiSequence":
        """Parse ``left|right`` where ``right`` starts at index 0 and is one longer than ``left``."""
        s = "".join(text.split())
        if s.count("|") != 1:
            raise SequenceFormatError("expected exactly one '|' marking index 0")
        left, right = s.split("|")
        if set(left + right) - set(ALPHABET):
            raise SequenceFormatError("symbols must be 1 or 2")
        if len(right) != len(left) + 1:
            raise SequenceFormatError(
                f"window must be symmetric: {len(left)} symbols left of '|' needs {len(left) + 1} to the right"
            )
        return cls(left + right, len(left))

    def to_text(self) -> str:
        return self.symbols[: self.radius] + "|" + self.symbols[self.radius:]

    def __getitem__(self, i: int) -> str:
        if abs(i) > self.radius:
            raise WindowError(f"index {i} is outside the window [-{self.radius}, {self.radius}]")
        return self.symbols[i + self.radius]

    def segment(self, lo: int, hi: int) -> str:
        """x_lo .. x_hi inclusive."""
        if lo < -self.radius or hi > self.radius:
            raise WindowError(f"[{lo}, {hi}] is outside the window")
        return self.symbols[lo + self.radius: hi + self.radius + 1]

    def shift(self, s: int) -> "BiSequence":
        """(T^s x)_i = x_{i+s}, on the largest symmetric window that fits."""
        r = self.radius - abs(s)
        if r < 0:
            raise WindowError("shift larger than the window")
        return BiSequence(self.segment(s - r, s + r), r)

    def __len__(self) -> int:
        return len(self.symbols)


def fibonacci_stage_radius(stage: int) -> int:
    r = 0
    for k in range(1, stage + 1):
        r += len(fibonacci_word(3 * k - 2))
    return r


def two_sided_fibonacci(stage: int) -> BiSequence:
    """Stage k is f_{3k} placed so that stage k-1 is its centred factor.

    From f_{n+3} = f_{n+1} f_n f_{n+1}, the middle f_{3k-3} of f_{3k} sits
    right after a prefix f_{3k-2}; aligning it with the previous stage moves
    the start left by |f_{3k-2}|.  Stage 1 reads 21|121.
    """
    if stage < 0:
        raise PreconditionError("stage must be >= 0")
    word = fibonacci_word(3 * stage)
    r = fibonacci_stage_radius(stage)
    return BiSequence(word, r)


def _require_window(x: BiSequence, k: int):
    if k < 1:
        raise PreconditionError("block length must be >= 1")
    if len(x) < 8 * k:
        raise WindowError(f"window of {len(x)} symbols is too short for length-{k} factors (need {8 * k})")


def language(x: BiSequence, k: int) -> set[str]:
    """All length-k factors seen in the window."""
    _require_window(x, k)
    s = x.symbols
    return {s[i:i + k] for i in range(len(s) - k + 1)}


def block_complexity(x: BiSequence, k: int) -> int:
    return len(language(x, k))


def slope_estimate(x: BiSequence, n: int) -> Fraction:
    """Share of 2s on [-n, n]."""
    if n < 1:
        raise PreconditionError("N must be >= 1")
    if n > x.radius:
        raise WindowError(f"N={n} exceeds the window radius {x.radius}")
    return Fraction(x.segment(-n, n).count("2"), 2 * n + 1)


def has_unbounded_runs(x: BiSequence, symbol: str | int) -> int:
    """Longest block of consecutive ``symbol`` inside the window."""
    symbol = str(symbol)
    if symbol not in ALPHABET:
        raise PreconditionError("symbol must be 1 or 2")
    return max((len(list(g)) for c, g in itertools.groupby(x.symbols) if c == symbol), default=0)
