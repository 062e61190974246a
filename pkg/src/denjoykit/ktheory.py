"""Truncated K-theory presentations for diagonal F_2 actions on K x dF_2.

The K-coordinate is a finite window of a clopen basis of C(K, Z) on which
alpha and beta act as partial integer maps (a basis vector whose image
leaves the window is simply undefined).  Two presentations of K_0 of the
crossed product are assembled from the same model:

* the direct one, ``C(K x dF_2, Z)`` modulo ``F - phi_g(F)``, written on
  K-basis x cylinder tensors, and
* the reduced one on ``C(K, Z)^2`` with the two relation families
  ``((2-a-a^-1)f, (a^-1-1)(b-1)f)`` and ``((b^-1-1)(a-1)f, (2-b-b^-1)f)``.

A relation is emitted only when every operator application it needs stays
inside the window; nothing is invented at the window edge.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from typing import Callable, Iterable, Mapping, Sequence

from . import freeboundary as fb
from .exceptions import WindowError
from .zlattice import (
    AbGroupInvariants,
    AbGroupPresentation,
    IntMatrix,
    RowLattice,
    cokernel_invariants,
    image_invariants,
    kernel_basis,
)

__all__ = [
    "PartialMap",
    "DiagonalActionModel",
    "QuadVector",
    "PairVector",
    "TensorVector",
    "direct_relations",
    "reduced_relations",
    "quad_relations",
    "direct_cokernel",
    "pv_k0_direct",
    "pv_k0_reduced",
    "example16_quotient",
    "phi_map",
    "psi_map",
    "gamma_map",
    "theta_map",
    "verify_reduction",
    "zeta_matrix",
    "pv_k1_kernel",
    "m_vectors",
    "stabilization_sweep",
]

COMPONENTS = "aAbB"  # order of the four C(K,Z) summands: f_a, f_{a^-1}, f_b, f_{b^-1}


@dataclass(frozen=True)
class PartialMap:
    """Integer matrix on a K-basis whose column i is the image of e_i.

    Columns with ``defined[i] == False`` are out of window; applying the map
    to a vector that uses them raises :class:`WindowError`.
    """

    matrix: IntMatrix
    defined: tuple[bool, ...]

    def __post_init__(self):
        if self.matrix.rows != self.matrix.cols or len(self.defined) != self.matrix.cols:
            raise ValueError("partial map must be square with one flag per column")
        cols = []
        for j in range(self.matrix.cols):
            cols.append(tuple((i, self.matrix[i, j]) for i in range(self.matrix.rows) if self.matrix[i, j]))
        object.__setattr__(self, "_cols", tuple(cols))

    @classmethod
    def from_images(cls, dim: int, images: Sequence[Mapping[int, int] | None]) -> "PartialMap":
        rows = [[0] * dim for _ in range(dim)]
        for j, img in enumerate(images):
            for i, x in (img or {}).items():
                rows[i][j] = x
        return cls(IntMatrix.from_rows(rows, cols=dim), tuple(img is not None for img in images))

    @classmethod
    def identity(cls, dim: int) -> "PartialMap":
        return cls(IntMatrix.identity(dim), (True,) * dim)

    def is_defined_on(self, vec: Sequence[int]) -> bool:
        return all(self.defined[i] for i, x in enumerate(vec) if x)

    def apply(self, vec: Sequence[int]) -> tuple[int, ...]:
        out = [0] * len(self.defined)
        for j, x in enumerate(vec):
            if not x:
                continue
            if not self.defined[j]:
                raise WindowError(f"basis vector {j} leaves the window")
            for i, y in self._cols[j]:
                out[i] += x * y
        return tuple(out)


def _unit(dim: int, i: int) -> tuple[int, ...]:
    v = [0] * dim
    v[i] = 1
    return tuple(v)


def _add(u, v, k=1):
    return tuple(x + k * y for x, y in zip(u, v))


def _coeffs(f) -> tuple[int, ...]:
    return tuple(getattr(f, "coeffs", f))


@dataclass(frozen=True)
class DiagonalActionModel:
    """phi_a = alpha x d_a, phi_b = beta x d_b at a finite truncation."""

    k_labels: tuple[str, ...]
    alpha: PartialMap
    alpha_inv: PartialMap
    beta: PartialMap
    beta_inv: PartialMap
    boundary_level: int
    k_depth: int = 0
    name: str = "custom"
    family: tuple = ()  # constructor arguments that rebuild the model at another depth

    def __post_init__(self):
        d = len(self.k_labels)
        for m in (self.alpha, self.alpha_inv, self.beta, self.beta_inv):
            if m.matrix.rows != d:
                raise ValueError("all K-maps must act on the same basis")
        if self.boundary_level < 1:
            raise ValueError("boundary_level must be >= 1")
        self._check_inverse(self.alpha, self.alpha_inv, "alpha")
        self._check_inverse(self.beta, self.beta_inv, "beta")
        self._check_commute()

    # -- construction -----------------------------------------------------

    @classmethod
    def point(cls, level: int) -> "DiagonalActionModel":
        """K a single point: alpha = beta = id, leaving only the boundary action."""
        i = PartialMap.identity(1)
        return cls(("1",), i, i, i, i, level, 0, "point")

    @classmethod
    def denjoy(cls, depth: int, level: int, beta: str = "id") -> "DiagonalActionModel":
        """Denjoy alpha on the arc basis {1, x_-n..x_n}; beta is ``"id"`` or ``"alpha"``."""
        if depth < 1:
            raise ValueError("depth must be >= 1")
        labels = ("1",) + tuple(f"x{j}" for j in range(-depth, depth + 1))
        d = len(labels)

        def shift(step):
            imgs = [{0: 1}]
            for k in range(1, d):
                t = k + step
                imgs.append({t: 1} if 1 <= t < d else None)
            return PartialMap.from_images(d, imgs)

        a, ai = shift(1), shift(-1)
        if beta == "id":
            b = bi = PartialMap.identity(d)
        elif beta == "alpha":
            b, bi = a, ai
        else:
            raise ValueError("beta must be 'id' or 'alpha'")
        return cls(labels, a, ai, b, bi, level, depth, f"denjoy-beta-{beta}", ("denjoy", beta))

    @classmethod
    def permutations(cls, alpha: Sequence[int], beta: Sequence[int], level: int) -> "DiagonalActionModel":
        """Finite K = {0..d-1} with alpha, beta commuting permutations (``alpha[i]`` is the image of i)."""
        d = len(alpha)
        if sorted(alpha) != list(range(d)) or sorted(beta) != list(range(d)):
            raise ValueError("alpha and beta must be permutations of the same set")

        def pm(p):
            inv = [0] * d
            for i, j in enumerate(p):
                inv[j] = i
            return (PartialMap.from_images(d, [{j: 1} for j in p]),
                    PartialMap.from_images(d, [{j: 1} for j in inv]))

        a, ai = pm(alpha)
        b, bi = pm(beta)
        return cls(tuple(f"p{i}" for i in range(d)), a, ai, b, bi, level, 0, "permutation")

    @classmethod
    def swap(cls, level: int) -> "DiagonalActionModel":
        """Two-point K with alpha the transposition and beta = id (has torsion)."""
        s = PartialMap.from_images(2, [{1: 1}, {0: 1}])
        i = PartialMap.identity(2)
        return cls(("p0", "p1"), s, s, i, i, level, 0, "swap")

    # -- checks -----------------------------------------------------------

    def _check_inverse(self, m: PartialMap, mi: PartialMap, name: str):
        d = len(self.k_labels)
        for j in range(d):
            e = _unit(d, j)
            if m.defined[j]:
                img = m.apply(e)
                if mi.is_defined_on(img) and mi.apply(img) != e:
                    raise ValueError(f"{name}^-1 does not invert {name} on basis vector {j}")

    def _check_commute(self):
        d = len(self.k_labels)
        for j in range(d):
            e = _unit(d, j)
            try:
                ab = self.alpha.apply(self.beta.apply(e))
                ba = self.beta.apply(self.alpha.apply(e))
            except WindowError:
                continue
            if ab != ba:
                raise ValueError("alpha and beta do not commute; the diagonal model requires it")

    # -- K-side arithmetic ------------------------------------------------

    @property
    def k_dim(self) -> int:
        return len(self.k_labels)

    @property
    def alpha_matrix(self) -> IntMatrix:
        return self.alpha.matrix

    @property
    def beta_matrix(self) -> IntMatrix:
        return self.beta.matrix

    def letter(self, x: str) -> PartialMap:
        return {"a": self.alpha, "A": self.alpha_inv, "b": self.beta, "B": self.beta_inv}[x]

    def apply_word(self, word: str, f: Sequence[int]) -> tuple[int, ...]:
        """Apply the group element ``word`` (rightmost letter first) to a K-vector."""
        v = _coeffs(f)
        for x in reversed(word):
            v = self.letter(x).apply(v)
        return v

    def unit(self, i: int) -> tuple[int, ...]:
        return _unit(self.k_dim, i)

    def with_level(self, level: int) -> "DiagonalActionModel":
        return DiagonalActionModel(self.k_labels, self.alpha, self.alpha_inv, self.beta,
                                   self.beta_inv, level, self.k_depth, self.name, self.family)

    def extended(self, margin: int) -> tuple["DiagonalActionModel", list[int]]:
        """Same model on a window ``margin`` steps wider, plus where our basis sits in it."""
        if margin == 0 or not self.family:
            return self, list(range(self.k_dim))
        if self.family[0] != "denjoy":
            raise ValueError(f"model {self.name!r} cannot be widened")
        n, big = self.k_depth, self.k_depth + margin
        wide = DiagonalActionModel.denjoy(big, self.boundary_level, self.family[1])
        return wide, [0] + [j + big + 1 for j in range(-n, n + 1)]

    def describe(self) -> dict:
        return {"name": self.name, "k_depth": self.k_depth, "k_dim": self.k_dim,
                "boundary_level": self.boundary_level}


# ---------------------------------------------------------------------------
# tensors  C(K,Z) (x) C(dF_2,Z)  at a fixed cylinder level


@dataclass(frozen=True)
class TensorVector:
    """Element of the K-basis x level-``level`` cylinder lattice (K-major order)."""

    k_dim: int
    level: int
    coeffs: tuple[int, ...]

    @classmethod
    def zero(cls, k_dim: int, level: int) -> "TensorVector":
        return cls(k_dim, level, (0,) * (k_dim * fb.num_cylinders(level)))

    @classmethod
    def from_terms(cls, k_dim: int, level: int, terms: Iterable[tuple[Sequence[int], str, int]]) -> "TensorVector":
        """Sum of ``coef * f (x) p_word``; each word must have length ``level``."""
        n = fb.num_cylinders(level)
        c = [0] * (k_dim * n)
        for f, word, coef in terms:
            j = fb.cylinder_index(word)
            for i, x in enumerate(_coeffs(f)):
                if x:
                    c[i * n + j] += coef * x
        return cls(k_dim, level, tuple(c))

    def terms(self):
        """Yield ``(k_index, word, coefficient)`` for the nonzero entries."""
        words = fb.cylinders(self.level)
        n = len(words)
        for idx, x in enumerate(self.coeffs):
            if x:
                yield idx // n, words[idx % n], x

    def __sub__(self, other: "TensorVector") -> "TensorVector":
        return TensorVector(self.k_dim, self.level, _add(self.coeffs, other.coeffs, -1))

    def __add__(self, other: "TensorVector") -> "TensorVector":
        return TensorVector(self.k_dim, self.level, _add(self.coeffs, other.coeffs))


def _refine_tensor_terms(i: int, word: str, coef: int, times: int = 1):
    for w in fb._refined_words(word, times):
        yield i, w, coef


def _act_tensor_terms(model: DiagonalActionModel, g: str, i: int, word: str, coef: int):
    """Terms of phi_g(e_i (x) p_word) one level down; raises WindowError if K leaves the window."""
    img = model.letter(g).apply(model.unit(i))
    for w in fb.cylinder_image(g, word):
        for k, x in enumerate(img):
            if x:
                yield k, w, coef * x


def _dense(k_dim: int, level: int, terms) -> list[int]:
    n = fb.num_cylinders(level)
    row = [0] * (k_dim * n)
    idx = fb._index(level)
    for i, w, x in terms:
        row[i * n + idx[w]] += x
    return row


# ---------------------------------------------------------------------------
# presentations


def direct_relations(model: DiagonalActionModel) -> list[list[int]]:
    """Rows ``refine(F) - phi_g(F)`` for F = e_i (x) p_w at the model level.

    All four letters g in {a, a^-1, b, b^-1} contribute; the inverse letters
    generate the same relation subgroup in the untruncated group but are
    needed for the truncation to see it.  Columns index level L+1 tensors.
    """
    d, level = model.k_dim, model.boundary_level
    rows = []
    for i in range(d):
        for w in fb.cylinders(level):
            for g in COMPONENTS:
                if not model.letter(g).defined[i]:
                    continue
                terms = list(_refine_tensor_terms(i, w, 1))
                terms += [(k, v, -x) for k, v, x in _act_tensor_terms(model, g, i, w, 1)]
                row = _dense(d, level + 1, terms)
                if any(row):
                    rows.append(row)
    return rows


def direct_cokernel(model: DiagonalActionModel) -> AbGroupInvariants:
    """Plain cokernel of ``F -> F - phi_g F`` on the whole truncated tensor lattice.

    Window-edge tensors carry no relations, so for a partial K-action this
    group is larger than the one seen by the reduced presentation.
    """
    ncols = model.k_dim * fb.num_cylinders(model.boundary_level + 1)
    return cokernel_invariants(AbGroupPresentation.from_relations(ncols, direct_relations(model)))


def pv_k0_direct(model: DiagonalActionModel, margin: int = 0) -> AbGroupInvariants:
    """Subgroup of the truncated direct quotient generated by ``f (x) p_a`` and ``f (x) p_b``.

    Every class of C(K x dF_2, Z) is equivalent to one of these in the full
    group, so they carry all of K_0; in the truncation they avoid the
    relation-free edge tensors.  ``margin`` rebuilds the relations on a
    K-window that many steps wider (window models only); the answer does
    not depend on it, which the tests use as a check.
    """
    if margin < 0:
        raise ValueError("margin must be >= 0")
    big, index = model.extended(margin)
    d, level = big.k_dim, model.boundary_level
    rows = direct_relations(big)
    gens = []
    for x in "ab":
        words = fb._refined_words(x, level)
        for i in index:
            gens.append(_dense(d, level + 1, [(i, w, 1) for w in words]))
    ngens = d * fb.num_cylinders(level + 1)
    return image_invariants(AbGroupPresentation.from_relations(ngens, rows), gens)


def _try(fn, *args):
    try:
        return fn(*args)
    except WindowError:
        return None


def reduced_relations(model: DiagonalActionModel) -> list[list[int]]:
    """The two relation families on C(K,Z)^2, one pair of rows per K-basis vector."""
    d = model.k_dim
    rows = []
    for i in range(d):
        f = model.unit(i)

        def r1():
            aw = model.apply_word
            first = _add(_add(_add(f, f), aw("a", f), -1), aw("A", f), -1)
            second = _add(_add(_add(aw("Ab", f), aw("A", f), -1), aw("b", f), -1), f)
            return first + second

        def r2():
            aw = model.apply_word
            first = _add(_add(_add(aw("Ba", f), aw("B", f), -1), aw("a", f), -1), f)
            second = _add(_add(_add(f, f), aw("b", f), -1), aw("B", f), -1)
            return first + second

        for rel in (r1, r2):
            row = _try(rel)
            if row is not None and any(row):
                rows.append(list(row))
    return rows


def pv_k0_reduced(model: DiagonalActionModel) -> AbGroupInvariants:
    return cokernel_invariants(
        AbGroupPresentation.from_relations(2 * model.k_dim, reduced_relations(model))
    )


def quad_relations(model: DiagonalActionModel) -> list[list[int]]:
    """Relations on C(K,Z)^4: x f_x = f_x + Delta_{other} f for each letter x."""
    d = model.k_dim
    other = {"a": "bB", "A": "bB", "b": "aA", "B": "aA"}
    rows = []
    for i in range(d):
        f = model.unit(i)
        for x in COMPONENTS:
            if not model.letter(x).defined[i]:
                continue
            q = QuadVector.single(x, model.letter(x).apply(f))
            q = q - QuadVector.single(x, f)
            for y in other[x]:
                q = q - QuadVector.single(y, f)
            rows.append(list(q.flat()))
    return rows


def example16_quotient(depth: int) -> AbGroupInvariants:
    """span{1, x_-n..x_n} modulo (alpha-1)^2 x_j = x_{j+2} - 2x_{j+1} + x_j."""
    if depth < 1:
        raise ValueError("depth must be >= 1")
    d = 2 * depth + 2  # column 0 is the unit, column j+depth+1 is x_j
    rows = []
    for j in range(-depth, depth - 1):
        r = [0] * d
        c = j + depth + 1
        r[c], r[c + 1], r[c + 2] = 1, -2, 1
        rows.append(r)
    return cokernel_invariants(AbGroupPresentation.from_relations(d, rows))


# ---------------------------------------------------------------------------
# reduction maps


@dataclass(frozen=True)
class QuadVector:
    """(f_a, f_{a^-1}, f_b, f_{b^-1}) in C(K,Z)^4."""

    components: tuple[tuple[int, ...], tuple[int, ...], tuple[int, ...], tuple[int, ...]]

    @classmethod
    def zero(cls, k_dim: int) -> "QuadVector":
        z = (0,) * k_dim
        return cls((z, z, z, z))

    @classmethod
    def single(cls, letter: str, f) -> "QuadVector":
        f = _coeffs(f)
        z = (0,) * len(f)
        comps = [z, z, z, z]
        comps[COMPONENTS.index(letter)] = f
        return cls(tuple(comps))

    def __add__(self, other: "QuadVector") -> "QuadVector":
        return QuadVector(tuple(_add(u, v) for u, v in zip(self.components, other.components)))

    def __sub__(self, other: "QuadVector") -> "QuadVector":
        return QuadVector(tuple(_add(u, v, -1) for u, v in zip(self.components, other.components)))

    def __rmul__(self, k: int) -> "QuadVector":
        return QuadVector(tuple(tuple(k * x for x in u) for u in self.components))

    def flat(self) -> tuple[int, ...]:
        return sum(self.components, ())

    def __getitem__(self, letter: str) -> tuple[int, ...]:
        return self.components[COMPONENTS.index(letter)]


@dataclass(frozen=True)
class PairVector:
    first: tuple[int, ...]
    second: tuple[int, ...]

    def __add__(self, other: "PairVector") -> "PairVector":
        return PairVector(_add(self.first, other.first), _add(self.second, other.second))

    def __sub__(self, other: "PairVector") -> "PairVector":
        return PairVector(_add(self.first, other.first, -1), _add(self.second, other.second, -1))

    def flat(self) -> tuple[int, ...]:
        return self.first + self.second


def phi_map(f, omega: str, model: DiagonalActionModel) -> QuadVector:
    """Send f (x) p_omega to the single-letter representative of its class.

    For omega = x_1 ... x_k this strips letters from the left with
    phi_{x_1^-1}, ..., phi_{x_{k-1}^-1}, leaving
    ``(x_{k-1}^-1 ... x_1^-1 f)`` in the x_k component.
    """
    if not omega or not fb.is_reduced(omega):
        raise ValueError(f"{omega!r} is not a nonempty reduced word")
    op = fb.inverse(omega[:-1])
    return QuadVector.single(omega[-1], model.apply_word(op, f))


def phi_tensor(t: TensorVector, model: DiagonalActionModel) -> QuadVector:
    out = QuadVector.zero(model.k_dim)
    for i, w, x in t.terms():
        out = out + x * phi_map(model.unit(i), w, model)
    return out


def psi_map(q: QuadVector) -> TensorVector:
    """f_x -> f (x) p_x, at cylinder level 1."""
    k_dim = len(q.components[0])
    return TensorVector.from_terms(k_dim, 1, [(q[x], x, 1) for x in COMPONENTS])


def gamma_map(q: QuadVector, model: DiagonalActionModel) -> PairVector:
    """f_a -> (f,0), f_b -> (0,f), f_{a^-1} -> (-f, (b-1)f), f_{b^-1} -> ((a-1)f, -f)."""
    fa, fA, fb_, fB = q.components
    out = PairVector(fa, fb_)
    out = out + PairVector(tuple(-x for x in fA), _add(model.apply_word("b", fA), fA, -1))
    return out + PairVector(_add(model.apply_word("a", fB), fB, -1), tuple(-x for x in fB))


def theta_map(p: PairVector) -> QuadVector:
    """(f, g) -> f_a + g_b."""
    return QuadVector.single("a", p.first) + QuadVector.single("b", p.second)


@dataclass
class Check:
    name: str
    passed: bool
    detail: str = ""

    def to_dict(self) -> dict:
        return {"name": self.name, "pass": self.passed, "detail": self.detail}


@dataclass
class ReductionReport:
    model: dict
    seed: int
    sampled: int
    skipped: int
    checks: list[Check] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def to_dict(self) -> dict:
        return {"model": self.model, "seed": self.seed, "sampled": self.sampled,
                "skipped": self.skipped, "checks": [c.to_dict() for c in self.checks]}


def verify_reduction(model: DiagonalActionModel, sample_count: int = 200, seed: int = 0,
                     corrupt: bool = False) -> ReductionReport:
    """Check the reduction maps against the truncated relation lattices.

    * Phi sends every sampled direct relation ``refine(F) - phi_g F`` into the
      row span of the four-component relations.
    * Phi o Psi = id and Gamma o Theta = id exactly on generators.
    * Theta o Gamma = id modulo the four-component relations.
    * Gamma and Theta carry each relation family into the other's span.

    ``corrupt=True`` doubles the four-component relation matrix, a negative
    control that must make some membership check fail.  Relations are drawn
    without replacement until ``sample_count`` have been checked; draws whose
    maps leave the window are counted as skipped, never as passes.
    """
    d, level = model.k_dim, model.boundary_level
    quad = quad_relations(model)
    if corrupt:
        quad = [[2 * x for x in r] for r in quad]
    quad_lat = RowLattice(IntMatrix.from_rows(quad, cols=4 * d))
    pair = reduced_relations(model)
    pair_lat = RowLattice(IntMatrix.from_rows(pair, cols=2 * d))

    pool = []
    for i in range(d):
        for w in fb.cylinders(level):
            for g in COMPONENTS:
                if model.letter(g).defined[i]:
                    pool.append((i, w, g))
    rng = random.Random(seed)
    rng.shuffle(pool)

    fails, skipped, done = [], 0, 0
    for i, w, g in pool:
        if done >= sample_count:
            break
        terms = list(_refine_tensor_terms(i, w, 1))
        terms += [(k, v, -x) for k, v, x in _act_tensor_terms(model, g, i, w, 1)]
        rel = TensorVector(d, level + 1, tuple(_dense(d, level + 1, terms)))
        try:
            image = phi_tensor(rel, model)
        except WindowError:
            skipped += 1
            continue
        done += 1
        if image.flat() not in quad_lat:
            fails.append(f"{model.k_labels[i]}(x)p_{w} via {g}")
    checks = [Check("phi-relation-membership", not fails and done > 0,
                    f"{done} checked, {skipped} skipped" + (f"; failed: {fails[:5]}" if fails else ""))]

    gens = [(x, i) for x in COMPONENTS for i in range(d)]
    bad = [f"{x}{i}" for x, i in gens
           if phi_tensor(psi_map(QuadVector.single(x, model.unit(i))), model)
           != QuadVector.single(x, model.unit(i))]
    checks.append(Check("phi-psi-identity", not bad, ", ".join(bad)))

    bad = []
    for i in range(d):
        e, z = model.unit(i), (0,) * d
        for p in (PairVector(e, z), PairVector(z, e)):
            if gamma_map(theta_map(p), model) != p:
                bad.append(str(p))
    checks.append(Check("gamma-theta-identity", not bad, ", ".join(bad)))

    bad, tg_skipped = [], 0
    for x, i in gens:
        q = QuadVector.single(x, model.unit(i))
        try:
            back = theta_map(gamma_map(q, model))
        except WindowError:
            tg_skipped += 1
            continue
        if (back - q).flat() not in quad_lat:
            bad.append(f"{x}{i}")
    checks.append(Check("theta-gamma-identity", not bad, f"{tg_skipped} skipped" + (f"; failed {bad}" if bad else "")))

    bad = []
    for r in quad:
        q = QuadVector(tuple(tuple(r[k * d:(k + 1) * d]) for k in range(4)))
        try:
            img = gamma_map(q, model)
        except WindowError:
            continue
        if img.flat() not in pair_lat:
            bad.append(r)
    checks.append(Check("gamma-maps-relations", not bad, f"{len(bad)} rows outside"))

    bad = [r for r in pair if theta_map(PairVector(tuple(r[:d]), tuple(r[d:]))).flat() not in quad_lat]
    checks.append(Check("theta-maps-relations", not bad, f"{len(bad)} rows outside"))

    return ReductionReport(model.describe(), seed, done, skipped, checks)


# ---------------------------------------------------------------------------
# K_1


def zeta_matrix(model: DiagonalActionModel) -> tuple[IntMatrix, tuple[bool, ...]]:
    """Truncated zeta(F, G) = (1 - phi_a)F + (1 - phi_b)G into level L+1.

    Domain is two copies of the level-L tensor lattice; a column is usable
    only if its generator's K-image is in window (the returned mask), and
    unusable columns are zero.
    """
    d, level = model.k_dim, model.boundary_level
    n = fb.num_cylinders(level)
    cols, mask = [], []
    for g in "ab":
        for i in range(d):
            ok = model.letter(g).defined[i]
            for w in fb.cylinders(level):
                mask.append(ok)
                if not ok:
                    cols.append([0] * (d * fb.num_cylinders(level + 1)))
                    continue
                terms = list(_refine_tensor_terms(i, w, 1))
                terms += [(k, v, -x) for k, v, x in _act_tensor_terms(model, g, i, w, 1)]
                cols.append(_dense(d, level + 1, terms))
    m = IntMatrix.from_rows(cols).transpose() if cols else IntMatrix.zeros(0, 0)
    assert m.cols == 2 * d * n
    return m, tuple(mask)


@dataclass(frozen=True)
class KernelResult:
    rank: int
    basis: tuple[tuple[int, ...], ...]


def pv_k1_kernel(model: DiagonalActionModel) -> KernelResult:
    """Integer kernel of the truncated zeta, restricted to usable columns."""
    z, mask = zeta_matrix(model)
    keep = [j for j, ok in enumerate(mask) if ok]
    sub = IntMatrix.from_rows([[r[j] for j in keep] for r in z.entries], cols=len(keep))
    basis = []
    for v in kernel_basis(sub):
        full = [0] * z.cols
        for j, x in zip(keep, v):
            full[j] = x
        basis.append(tuple(full))
    return KernelResult(len(basis), tuple(basis))


def m_vectors(model: DiagonalActionModel) -> list[tuple[int, ...]]:
    """(1 (x) (1-beta)f, 1 (x) (alpha-1)f) for K-basis f with every image in window.

    Coordinates match :func:`zeta_matrix`; ``1`` is the constant function on
    the boundary, i.e. every level-L cylinder with coefficient one.
    """
    d, level = model.k_dim, model.boundary_level
    n = fb.num_cylinders(level)
    out = []
    for i in range(d):
        f = model.unit(i)
        try:
            first = _add(f, model.apply_word("b", f), -1)
            second = _add(model.apply_word("a", f), f, -1)
            # zeta needs phi_a on the first slot and phi_b on the second
            model.apply_word("a", first)
            model.apply_word("b", second)
        except WindowError:
            continue
        if not any(first) and not any(second):
            continue
        v = []
        for comp in (first, second):
            for k in range(d):
                v.extend([comp[k]] * n)
        out.append(tuple(v))
    return out


# ---------------------------------------------------------------------------
# sweeps


@dataclass
class SweepRow:
    param: int
    invariants: AbGroupInvariants
    matches: bool | None

    def to_dict(self) -> dict:
        d = {"param": self.param, **self.invariants.to_dict()}
        if self.matches is not None:
            d["matches"] = self.matches
        return d


@dataclass
class SweepTable:
    rows: list[SweepRow]
    stable_from: int | None

    def to_dict(self) -> dict:
        return {"rows": [r.to_dict() for r in self.rows], "stable_from": self.stable_from}


def stabilization_sweep(compute: Callable[[int], AbGroupInvariants], params: Iterable[int],
                        predict: Callable[[int], AbGroupInvariants] | None = None) -> SweepTable:
    """Tabulate ``compute(p)`` over increasing ``params``.

    ``stable_from`` is the first parameter from which every later row equals
    the caller's ``predict(p)``; it is None without a prediction or if the
    last row disagrees.
    """
    params = list(params)
    if any(b <= a for a, b in zip(params, params[1:])):
        raise ValueError("params must be strictly increasing")
    rows = []
    for p in params:
        inv = compute(p)
        rows.append(SweepRow(p, inv, None if predict is None else inv == predict(p)))
    stable = None
    if predict is not None:
        for r in reversed(rows):
            if not r.matches:
                break
            stable = r.param
    return SweepTable(rows, stable)
