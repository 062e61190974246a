"""Exact integer lattice algebra.

Hermite and Smith normal forms over Z, integer kernels, cokernels of
relation matrices and row-span membership.  Entries are Python ints, so
nothing ever overflows or rounds.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Sequence

__all__ = [
    "IntMatrix",
    "SnfResult",
    "AbGroupPresentation",
    "AbGroupInvariants",
    "smith_normal_form",
    "hermite_normal_form",
    "cokernel_invariants",
    "kernel_basis",
    "image_invariants",
    "subgroup_membership",
    "RowLattice",
    "rank",
]


@dataclass(frozen=True)
class IntMatrix:
    """Immutable integer matrix stored row-major as nested tuples."""

    rows: int
    cols: int
    entries: tuple[tuple[int, ...], ...] = field(repr=False)

    def __post_init__(self):
        if self.rows < 0 or self.cols < 0:
            raise ValueError("matrix dimensions must be nonnegative")
        if len(self.entries) != self.rows or any(len(r) != self.cols for r in self.entries):
            raise ValueError("entries do not match the declared shape")

    @classmethod
    def from_rows(cls, rows: Iterable[Sequence[int]], cols: int | None = None) -> "IntMatrix":
        data = tuple(tuple(int(x) for x in r) for r in rows)
        if cols is None:
            if not data:
                raise ValueError("cols must be given for a matrix without rows")
            cols = len(data[0])
        return cls(len(data), cols, data)

    @classmethod
    def zeros(cls, rows: int, cols: int) -> "IntMatrix":
        return cls(rows, cols, tuple((0,) * cols for _ in range(rows)))

    @classmethod
    def identity(cls, n: int) -> "IntMatrix":
        return cls(n, n, tuple(tuple(int(i == j) for j in range(n)) for i in range(n)))

    @property
    def shape(self) -> tuple[int, int]:
        return (self.rows, self.cols)

    def tolist(self) -> list[list[int]]:
        return [list(r) for r in self.entries]

    def transpose(self) -> "IntMatrix":
        cols = tuple(tuple(r[j] for r in self.entries) for j in range(self.cols))
        return IntMatrix(self.cols, self.rows, cols)

    @property
    def T(self) -> "IntMatrix":
        return self.transpose()

    def __getitem__(self, idx):
        i, j = idx
        return self.entries[i][j]

    def __matmul__(self, other: "IntMatrix") -> "IntMatrix":
        if self.cols != other.rows:
            raise ValueError(f"shape mismatch {self.shape} @ {other.shape}")
        cols_of_other = list(zip(*other.entries)) if other.rows else [()] * other.cols
        out = []
        for r in self.entries:
            nz = [(k, x) for k, x in enumerate(r) if x]
            out.append(tuple(sum(x * c[k] for k, x in nz) for c in cols_of_other))
        return IntMatrix(self.rows, other.cols, tuple(out))

    def apply(self, v: Sequence[int]) -> tuple[int, ...]:
        """Matrix-vector product M v."""
        if len(v) != self.cols:
            raise ValueError(f"vector of length {len(v)} does not match {self.cols} columns")
        return tuple(sum(a * b for a, b in zip(r, v) if a) for r in self.entries)

    def append_rows(self, extra: Iterable[Sequence[int]]) -> "IntMatrix":
        more = tuple(tuple(int(x) for x in r) for r in extra)
        return IntMatrix(self.rows + len(more), self.cols, self.entries + more)

    def is_zero(self) -> bool:
        return not any(any(r) for r in self.entries)

    def determinant(self) -> int:
        """Exact determinant by fraction-free (Bareiss) elimination."""
        if self.rows != self.cols:
            raise ValueError("determinant of a non-square matrix")
        n = self.rows
        a = self.tolist()
        sign, prev = 1, 1
        for k in range(n - 1):
            if a[k][k] == 0:
                swap = next((i for i in range(k + 1, n) if a[i][k]), None)
                if swap is None:
                    return 0
                a[k], a[swap] = a[swap], a[k]
                sign = -sign
            for i in range(k + 1, n):
                for j in range(k + 1, n):
                    a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) // prev
            prev = a[k][k]
        return sign * a[n - 1][n - 1] if n else 1


@dataclass(frozen=True)
class SnfResult:
    """``U @ M @ V == S`` with unimodular ``U``, ``V``."""

    S: IntMatrix
    U: IntMatrix
    V: IntMatrix
    invariant_factors: tuple[int, ...]

    @property
    def rank(self) -> int:
        return len(self.invariant_factors)


@dataclass(frozen=True)
class AbGroupPresentation:
    """Abelian group on ``num_generators`` generators; one relation per row."""

    num_generators: int
    relations: IntMatrix

    def __post_init__(self):
        if self.relations.cols != self.num_generators:
            raise ValueError("relation matrix must have one column per generator")

    @classmethod
    def from_relations(cls, num_generators: int, rows: Iterable[Sequence[int]]) -> "AbGroupPresentation":
        return cls(num_generators, IntMatrix.from_rows(rows, cols=num_generators))


@dataclass(frozen=True)
class AbGroupInvariants:
    free_rank: int
    torsion: tuple[int, ...] = ()

    def __post_init__(self):
        t = self.torsion
        if any(d <= 1 for d in t) or any(t[i + 1] % t[i] for i in range(len(t) - 1)):
            raise ValueError(f"torsion {t} is not a divisibility chain of integers > 1")

    def to_dict(self) -> dict:
        return {"free_rank": self.free_rank, "torsion": list(self.torsion)}

    def __str__(self) -> str:
        parts = [f"Z^{self.free_rank}"] if self.free_rank else []
        parts += [f"Z/{d}" for d in self.torsion]
        return " + ".join(parts) or "0"


# ---------------------------------------------------------------------------
# dense elimination kernels (lists of lists, mutated in place)


def _swap_rows(a, i, j):
    a[i], a[j] = a[j], a[i]


def _swap_cols(a, i, j):
    for r in a:
        r[i], r[j] = r[j], r[i]


def _add_row(a, dst, src, q):
    """row[dst] += q * row[src]"""
    rs, rd = a[src], a[dst]
    for k, x in enumerate(rs):
        if x:
            rd[k] += q * x


def _add_col(a, dst, src, q):
    for r in a:
        x = r[src]
        if x:
            r[dst] += q * x


def _snf_inplace(a, nrows, ncols, u=None, v=None):
    """Diagonalise ``a`` in place; mirror row ops on ``u`` and column ops on ``v``."""
    t = 0
    while t < min(nrows, ncols):
        # smallest nonzero magnitude in the trailing block
        best = None
        for i in range(t, nrows):
            row = a[i]
            for j in range(t, ncols):
                x = row[j]
                if x and (best is None or abs(x) < best[0]):
                    best = (abs(x), i, j)
                    if best[0] == 1:
                        break
            if best is not None and best[0] == 1:
                break
        if best is None:
            break
        _, pi, pj = best
        if pi != t:
            _swap_rows(a, pi, t)
            if u is not None:
                _swap_rows(u, pi, t)
        if pj != t:
            _swap_cols(a, pj, t)
            if v is not None:
                _swap_cols(v, pj, t)
        while True:
            p = a[t][t]
            moved = False
            for i in range(t + 1, nrows):
                x = a[i][t]
                if x:
                    q = x // p
                    _add_row(a, i, t, -q)
                    if u is not None:
                        _add_row(u, i, t, -q)
                    if a[i][t] and abs(a[i][t]) < abs(a[t][t]):
                        _swap_rows(a, i, t)
                        if u is not None:
                            _swap_rows(u, i, t)
                        moved = True
                        break
            if moved:
                continue
            for j in range(t + 1, ncols):
                x = a[t][j]
                if x:
                    q = x // p
                    _add_col(a, j, t, -q)
                    if v is not None:
                        _add_col(v, j, t, -q)
                    if a[t][j] and abs(a[t][j]) < abs(a[t][t]):
                        _swap_cols(a, j, t)
                        if v is not None:
                            _swap_cols(v, j, t)
                        moved = True
                        break
            if moved:
                continue
            if any(a[i][t] for i in range(t + 1, nrows)) or any(a[t][j] for j in range(t + 1, ncols)):
                continue
            # divisibility: pull in a row whose entries the pivot does not divide
            bad = None
            if abs(p) != 1:
                for i in range(t + 1, nrows):
                    if any(x % p for x in a[i][t + 1:]):
                        bad = i
                        break
            if bad is None:
                break
            _add_row(a, t, bad, 1)
            if u is not None:
                _add_row(u, t, bad, 1)
        if a[t][t] < 0:
            a[t] = [-x for x in a[t]]
            if u is not None:
                u[t] = [-x for x in u[t]]
        t += 1
    return [a[i][i] for i in range(t)]


def smith_normal_form(m: IntMatrix) -> SnfResult:
    """Smith normal form with transforms, ``U @ M @ V == S``.

    Pivots are chosen by smallest magnitude, which keeps entries small on
    the sparse 0/+-1 relation matrices this package builds.
    """
    a = m.tolist()
    u = [[int(i == j) for j in range(m.rows)] for i in range(m.rows)]
    v = [[int(i == j) for j in range(m.cols)] for i in range(m.cols)]
    diag = _snf_inplace(a, m.rows, m.cols, u, v)
    factors = tuple(d for d in diag if d)
    return SnfResult(
        S=IntMatrix.from_rows(a, cols=m.cols),
        U=IntMatrix.from_rows(u, cols=m.rows),
        V=IntMatrix.from_rows(v, cols=m.cols),
        invariant_factors=factors,
    )


def hermite_normal_form(m: IntMatrix) -> tuple[IntMatrix, IntMatrix]:
    """Row-style Hermite normal form ``H = U @ M`` with unimodular ``U``.

    Nonzero rows of ``H`` come first, pivots are positive and strictly to
    the right of the previous row's pivot, and entries above each pivot lie
    in ``[0, pivot)``.
    """
    h = m.tolist()
    u = [[int(i == j) for j in range(m.rows)] for i in range(m.rows)]
    _hnf_inplace(h, u, m.rows, m.cols)
    return IntMatrix.from_rows(h, cols=m.cols), IntMatrix.from_rows(u, cols=m.rows)


def _hnf_inplace(h, u, nrows, ncols):
    r = 0
    pivots = []
    for c in range(ncols):
        if r == nrows:
            break
        while True:
            nz = [i for i in range(r, nrows) if h[i][c]]
            if not nz:
                break
            piv = min(nz, key=lambda i: abs(h[i][c]))
            if piv != r:
                _swap_rows(h, piv, r)
                if u is not None:
                    _swap_rows(u, piv, r)
            p = h[r][c]
            done = True
            for i in range(r + 1, nrows):
                x = h[i][c]
                if x:
                    q = x // p
                    _add_row(h, i, r, -q)
                    if u is not None:
                        _add_row(u, i, r, -q)
                    if h[i][c]:
                        done = False
            if done:
                break
        if not h[r][c]:
            continue
        if h[r][c] < 0:
            h[r] = [-x for x in h[r]]
            if u is not None:
                u[r] = [-x for x in u[r]]
        p = h[r][c]
        for i in range(r):
            q = h[i][c] // p
            if q:
                _add_row(h, i, r, -q)
                if u is not None:
                    _add_row(u, i, r, -q)
        pivots.append(c)
        r += 1
    return pivots


def rank(m: IntMatrix) -> int:
    return len(_sparse_invariants(m.entries, m.cols)[0])


def _sparse_invariants(rows: Iterable[Sequence[int]], ncols: int) -> tuple[list[int], int]:
    """Nonzero invariant factors of a relation matrix, plus its column count.

    Unit pivots are eliminated first on a sparse dict-of-rows copy (each one
    removes a generator and a relation without changing the quotient); the
    dense Smith reduction only sees what survives.
    """
    sparse: dict[int, dict[int, int]] = {}
    colmap: dict[int, set[int]] = {}
    for i, r in enumerate(rows):
        d = {j: int(x) for j, x in enumerate(r) if x}
        if d:
            sparse[i] = d
            for j in d:
                colmap.setdefault(j, set()).add(i)

    units = 0
    while True:
        pivot = None
        best = None
        for i, d in sparse.items():
            for j, x in d.items():
                if x in (1, -1):
                    cost = len(colmap[j])
                    if best is None or cost < best:
                        best, pivot = cost, (i, j)
                        if cost == 1:
                            break
            if best == 1:
                break
        if pivot is None:
            break
        pi, pj = pivot
        prow = sparse.pop(pi)
        for j in prow:
            colmap[j].discard(pi)
        s = prow[pj]
        for i in list(colmap[pj]):
            row = sparse[i]
            q = row[pj] * s
            for j, x in prow.items():
                nv = row.get(j, 0) - q * x
                if nv:
                    if j not in row:
                        colmap.setdefault(j, set()).add(i)
                    row[j] = nv
                else:
                    if j in row:
                        del row[j]
                        colmap[j].discard(i)
            if not row:
                del sparse[i]
        del colmap[pj]
        units += 1

    cols = sorted({j for d in sparse.values() for j in d})
    idx = {j: k for k, j in enumerate(cols)}
    dense = []
    for d in sparse.values():
        r = [0] * len(cols)
        for j, x in d.items():
            r[idx[j]] = x
        dense.append(r)
    diag = _snf_inplace(dense, len(dense), len(cols)) if dense else []
    return [1] * units + [x for x in diag if x], ncols


def cokernel_invariants(p: AbGroupPresentation) -> AbGroupInvariants:
    """Isomorphism type of ``Z^n / rowspan(relations)``."""
    factors, _ = _sparse_invariants(p.relations.entries, p.num_generators)
    return AbGroupInvariants(
        free_rank=p.num_generators - len(factors),
        torsion=tuple(sorted(d for d in factors if d > 1)),
    )


def image_invariants(p: AbGroupPresentation, vectors: Sequence[Sequence[int]]) -> AbGroupInvariants:
    """Isomorphism type of the subgroup of ``coker(p)`` generated by ``vectors``.

    Works on the stacked lattice ``[R | 0; S | I]``: once the generator
    columns are eliminated, the rows left with a zero generator part are
    exactly the relations ``c`` with ``c . S`` in the row span of ``R``.
    """
    n, k = p.num_generators, len(vectors)
    rows: list[dict[int, int]] = []
    for r in p.relations.entries:
        d = {j: x for j, x in enumerate(r) if x}
        if d:
            rows.append(d)
    for i, v in enumerate(vectors):
        if len(v) != n:
            raise ValueError("subgroup generators must have one entry per generator")
        d = {j: int(x) for j, x in enumerate(v) if x}
        d[n + i] = 1
        rows.append(d)

    colmap: dict[int, set[int]] = {}
    live = dict(enumerate(rows))
    for i, d in live.items():
        for j in d:
            if j < n:
                colmap.setdefault(j, set()).add(i)
    while True:
        pivot, best = None, None
        for j, owners in colmap.items():
            if best is not None and len(owners) >= best:
                continue
            for i in owners:
                if live[i][j] in (1, -1):
                    pivot, best = (i, j), len(owners)
                    break
        if pivot is None:
            break
        pi, pj = pivot
        prow = live.pop(pi)
        for j in prow:
            if j < n:
                colmap[j].discard(pi)
        s = prow[pj]
        for i in list(colmap[pj]):
            row = live[i]
            q = row[pj] * s
            for j, x in prow.items():
                nv = row.get(j, 0) - q * x
                if nv:
                    if j not in row and j < n:
                        colmap.setdefault(j, set()).add(i)
                    row[j] = nv
                elif j in row:
                    del row[j]
                    if j < n:
                        colmap[j].discard(i)
        del colmap[pj]
        for j in [j for j, o in colmap.items() if not o]:
            del colmap[j]

    relations = [[d.get(n + i, 0) for i in range(k)] for d in live.values() if all(j >= n for j in d)]
    rest = [d for d in live.values() if any(j < n for j in d)]
    if rest:
        left = sorted({j for d in rest for j in d if j < n})
        cols = left + list(range(n, n + k))
        dense = [[d.get(j, 0) for j in cols] for d in rest]
        _hnf_inplace(dense, None, len(dense), len(cols))
        nl = len(left)
        relations += [r[nl:] for r in dense if not any(r[:nl]) and any(r[nl:])]
    return cokernel_invariants(AbGroupPresentation.from_relations(k, relations))


def kernel_basis(m: IntMatrix) -> list[tuple[int, ...]]:
    """Basis of the integer lattice ``{v : M v = 0}``.

    Computed from the Hermite form of ``M^T``: the rows of the transform that
    land on zero rows are a basis of the left kernel of ``M^T``.
    """
    mt = [list(col) for col in zip(*m.entries)] if m.rows else [[] for _ in range(m.cols)]
    u = [[int(i == j) for j in range(m.cols)] for i in range(m.cols)]
    _hnf_inplace(mt, u, m.cols, m.rows)
    return [tuple(u[i]) for i in range(m.cols) if not any(mt[i])]


class RowLattice:
    """Row span of an integer matrix, reduced once for repeated membership tests."""

    def __init__(self, r: IntMatrix):
        self.cols = r.cols
        h = r.tolist()
        _hnf_inplace(h, None, r.rows, r.cols)
        self._rows = []
        for row in h:
            c = next((j for j, x in enumerate(row) if x), None)
            if c is None:
                break
            self._rows.append((c, [(j, x) for j, x in enumerate(row) if x]))

    @property
    def rank(self) -> int:
        return len(self._rows)

    def __contains__(self, v: Sequence[int]) -> bool:
        if len(v) != self.cols:
            raise ValueError(f"vector of length {len(v)} does not match {self.cols} columns")
        w = [int(x) for x in v]
        for c, row in self._rows:
            q, rem = divmod(w[c], row[0][1])
            if rem:
                return False
            if q:
                for j, x in row:
                    w[j] -= q * x
        return not any(w)


def subgroup_membership(r: IntMatrix, v: Sequence[int]) -> bool:
    """True iff ``v`` is an integer combination of the rows of ``r``."""
    if len(v) != r.cols:
        raise ValueError(f"vector of length {len(v)} does not match {r.cols} columns")
    return v in RowLattice(r)
