"""Reduced words in F_2 and integer functions on its Gromov boundary.

Words are ASCII strings over ``a``, ``A`` (= a^-1), ``b``, ``B`` (= b^-1).
A function in C(dF_2, Z) that is constant on cylinders of length L is a
``BoundaryVector``: one integer per reduced word of length exactly L, in
lexicographic order with a < A < b < B.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable, Mapping, Sequence

LETTERS = "aAbB"
INVERSE = {"a": "A", "A": "a", "b": "B", "B": "b"}
_TOKENS = {
    "a": "a", "A": "A", "b": "b", "B": "B",
    "a^-1": "A", "b^-1": "B", "a⁻¹": "A", "b⁻¹": "B", "a-": "A", "b-": "B",
}

__all__ = [
    "LETTERS",
    "INVERSE",
    "reduce",
    "inverse",
    "is_reduced",
    "exponent_sums",
    "cylinders",
    "cylinder_index",
    "num_cylinders",
    "BoundaryVector",
    "refine",
    "act_generator",
    "minimality_witness",
    "infiniteness_witness",
]


def _letters(raw: str | Iterable[str]) -> list[str]:
    if isinstance(raw, str):
        toks = list(raw)
    else:
        toks = list(raw)
    out = []
    for t in toks:
        try:
            out.append(_TOKENS[t])
        except KeyError:
            raise ValueError(f"unknown letter {t!r}; expected one of a, A, b, B") from None
    return out


def reduce(raw: str | Iterable[str]) -> str:
    """Freely reduce a word, cancelling adjacent inverse pairs."""
    stack: list[str] = []
    for x in _letters(raw):
        if stack and stack[-1] == INVERSE[x]:
            stack.pop()
        else:
            stack.append(x)
    return "".join(stack)


def inverse(word: str) -> str:
    return "".join(INVERSE[x] for x in reversed(word))


def is_reduced(word: str) -> bool:
    return all(x in INVERSE for x in word) and all(
        word[i + 1] != INVERSE[word[i]] for i in range(len(word) - 1)
    )


def exponent_sums(word: str) -> tuple[int, int]:
    """Total exponent of a and of b in ``word``."""
    return (word.count("a") - word.count("A"), word.count("b") - word.count("B"))


@lru_cache(maxsize=None)
def cylinders(level: int) -> tuple[str, ...]:
    """All reduced words of length ``level``, lexicographic in a < A < b < B."""
    if level < 1:
        raise ValueError("cylinder level must be >= 1")
    if level == 1:
        return tuple(LETTERS)
    return tuple(w + x for w in cylinders(level - 1) for x in LETTERS if x != INVERSE[w[-1]])


@lru_cache(maxsize=None)
def _index(level: int) -> dict[str, int]:
    return {w: i for i, w in enumerate(cylinders(level))}


def cylinder_index(word: str) -> int:
    return _index(len(word))[word]


def num_cylinders(level: int) -> int:
    return 4 * 3 ** (level - 1)


@lru_cache(maxsize=None)
def _refined_words(word: str, levels: int) -> tuple[str, ...]:
    """Cylinders of length ``len(word) + levels`` inside the cylinder of ``word``."""
    words = (word,)
    for _ in range(levels):
        words = tuple(w + x for w in words for x in LETTERS if x != INVERSE[w[-1]])
    return words


@lru_cache(maxsize=None)
def cylinder_image(g: str, word: str) -> tuple[str, ...]:
    """Translate of the cylinder of ``word`` by the letter ``g``, as cylinders one level down.

    The result is a disjoint list of cylinders of length ``len(word) + 1``
    whose union is ``g . C(word)``.
    """
    if g not in INVERSE:
        raise ValueError(f"{g!r} is not a generator letter")
    if word[0] != INVERSE[g]:
        return (g + word,)
    rest = word[1:]
    if rest:
        # C(g^-1 w') -> C(w'), two refinement steps below |w'|
        return _refined_words(rest, 2)
    # single letter g^-1: every infinite word not starting with g
    return tuple(w for x in LETTERS if x != g for w in _refined_words(x, 1))


@dataclass(frozen=True)
class BoundaryVector:
    """Integer combination of the level-``level`` cylinder functions p_w."""

    level: int
    coeffs: tuple[int, ...]

    def __post_init__(self):
        if self.level < 1:
            raise ValueError("level must be >= 1")
        if len(self.coeffs) != num_cylinders(self.level):
            raise ValueError(
                f"level {self.level} needs {num_cylinders(self.level)} coefficients, got {len(self.coeffs)}"
            )

    @classmethod
    def zero(cls, level: int) -> "BoundaryVector":
        return cls(level, (0,) * num_cylinders(level))

    @classmethod
    def ones(cls, level: int) -> "BoundaryVector":
        return cls(level, (1,) * num_cylinders(level))

    @classmethod
    def cylinder(cls, word: str, level: int | None = None) -> "BoundaryVector":
        """The characteristic function p_word, refined to ``level`` if given."""
        if not word or not is_reduced(word):
            raise ValueError(f"{word!r} is not a nonempty reduced word")
        level = len(word) if level is None else level
        if level < len(word):
            raise ValueError("cannot express a cylinder below its own length")
        c = [0] * num_cylinders(level)
        for w in _refined_words(word, level - len(word)):
            c[cylinder_index(w)] = 1
        return cls(level, tuple(c))

    @classmethod
    def from_mapping(cls, level: int, coeffs: Mapping[str, int]) -> "BoundaryVector":
        c = [0] * num_cylinders(level)
        for w, x in coeffs.items():
            if len(w) != level or not is_reduced(w):
                raise ValueError(f"{w!r} is not a reduced word of length {level}")
            c[cylinder_index(w)] += int(x)
        return cls(level, tuple(c))

    def to_dict(self) -> dict:
        return {
            "level": self.level,
            "coeffs": {w: x for w, x in zip(cylinders(self.level), self.coeffs) if x},
        }

    @classmethod
    def from_dict(cls, d: Mapping) -> "BoundaryVector":
        return cls.from_mapping(int(d["level"]), d.get("coeffs", {}))

    def items(self):
        return ((w, x) for w, x in zip(cylinders(self.level), self.coeffs) if x)

    def __add__(self, other: "BoundaryVector") -> "BoundaryVector":
        a, b = _common_level(self, other)
        return BoundaryVector(a.level, tuple(x + y for x, y in zip(a.coeffs, b.coeffs)))

    def __neg__(self) -> "BoundaryVector":
        return BoundaryVector(self.level, tuple(-x for x in self.coeffs))

    def __sub__(self, other: "BoundaryVector") -> "BoundaryVector":
        return self + (-other)

    def __rmul__(self, k: int) -> "BoundaryVector":
        return BoundaryVector(self.level, tuple(k * x for x in self.coeffs))

    def refine_to(self, level: int) -> "BoundaryVector":
        v = self
        while v.level < level:
            v = refine(v)
        if v.level != level:
            raise ValueError("cannot coarsen a boundary vector")
        return v

    def evaluate(self, point: str) -> int:
        """Value at any infinite reduced word with the given prefix (length >= level)."""
        if len(point) < self.level or not is_reduced(point):
            raise ValueError(f"need a reduced prefix of length >= {self.level}")
        return self.coeffs[cylinder_index(point[: self.level])]


def _common_level(u: BoundaryVector, v: BoundaryVector):
    level = max(u.level, v.level)
    return u.refine_to(level), v.refine_to(level)


def refine(v: BoundaryVector) -> BoundaryVector:
    """Same function written on cylinders one level finer: p_w = sum of p_{wx}."""
    c = [0] * num_cylinders(v.level + 1)
    for w, x in v.items():
        for child in _refined_words(w, 1):
            c[cylinder_index(child)] += x
    return BoundaryVector(v.level + 1, tuple(c))


def act_generator(g: str, v: BoundaryVector) -> BoundaryVector:
    """Boundary action of a single letter; the output is always one level finer."""
    c = [0] * num_cylinders(v.level + 1)
    for w, x in v.items():
        for img in cylinder_image(g, w):
            c[cylinder_index(img)] += x
    return BoundaryVector(v.level + 1, tuple(c))


def _first_admissible(excluded: Iterable[str]) -> str:
    bad = set(excluded)
    for x in LETTERS:
        if x not in bad:
            return x
    raise AssertionError("no admissible letter")  # at most two exclusions


def minimality_witness(omega2_prefix: str, omega1_first: str, n: int) -> str:
    """Group element w2[m] s1 b a^N b s2 that moves w1 close to w2.

    ``s1`` avoids cancellation in ``w2[m] s1 b`` and ``s2`` avoids it in
    ``b s2 w1``; both are the first admissible letter in the order a, A, b, B.
    """
    if n == 0:
        raise ValueError("N must be nonzero")
    prefix = reduce(omega2_prefix)
    if prefix != omega2_prefix:
        raise ValueError(f"prefix {omega2_prefix!r} is not reduced")
    first = _letters(omega1_first)
    if len(first) != 1:
        raise ValueError("omega1_first must be a single letter")
    excl1 = {"B"} | ({INVERSE[prefix[-1]]} if prefix else set())
    s1 = _first_admissible(excl1)
    s2 = _first_admissible({"B", INVERSE[first[0]]})
    power = "a" * n if n > 0 else "A" * (-n)
    g = prefix + s1 + "b" + power + "b" + s2
    assert is_reduced(g) and g.startswith(prefix)
    return g


def infiniteness_witness(omega: str, sigma1: str | None = None, sigma2: str | None = None) -> str:
    """Group element w s1 b a^N b^M a s2 with zero exponent sums in a and in b.

    It maps the cylinder of ``omega`` strictly inside itself while acting
    trivially on any K-coordinate on which a and b act by commuting maps.
    Letters are tried first-admissible in the order a, A, b, B; a pair whose
    solved N or M vanishes is skipped.  For some omega every single-letter
    pair is degenerate (e.g. BAAbABa); then s1 is widened to a two-letter
    word.  Passing ``sigma1``/``sigma2`` pins them.
    """
    if not omega or not is_reduced(omega):
        raise ValueError(f"{omega!r} is not a nonempty reduced word")
    s1_opts = [x for x in LETTERS if x not in {INVERSE[omega[-1]], "B"}]
    s1_opts += [x + y for x in LETTERS if x != INVERSE[omega[-1]]
                for y in LETTERS if y not in {INVERSE[x], "B"}]
    s2_opts = [x for x in LETTERS if x not in {"A", INVERSE[omega[0]]}]
    if sigma1 is not None:
        if sigma1 not in s1_opts:
            raise ValueError(f"sigma1={sigma1!r} causes cancellation")
        s1_opts = [sigma1]
    if sigma2 is not None:
        if sigma2 not in s2_opts:
            raise ValueError(f"sigma2={sigma2!r} causes cancellation")
        s2_opts = [sigma2]
    for s1, s2 in itertools.product(s1_opts, s2_opts):
        ea, eb = exponent_sums(omega + s1 + "b" + "a" + s2)
        n, m = -ea, -eb
        if n == 0 or m == 0:
            continue
        g = (omega + s1 + "b" + ("a" * n if n > 0 else "A" * -n)
             + ("b" * m if m > 0 else "B" * -m) + "a" + s2)
        assert is_reduced(g) and exponent_sums(g) == (0, 0)
        return g
    raise ValueError("no admissible letters give nonzero exponents")
