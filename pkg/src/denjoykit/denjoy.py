"""A finite model of the Denjoy Cantor set built from an irrational rotation.

The circle is cut at the orbit points a_j = a_0 + j*lam (mod 2 pi) and an
interval I_j of length 2^-|j| is glued in at each cut.  The Cantor set K is
what remains after removing the open interiors of the I_j, so each orbit
point survives as two points, its ``left`` and ``right`` sides.

Only orbit indices |j| <= depth are represented explicitly; everything
beyond that is summarised by an error bound.
"""

from __future__ import annotations

import ast
import math
import operator
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .exceptions import PreconditionError, WindowError
from .zlattice import IntMatrix, rank

TWO_PI = 2 * math.pi
PHI = (1 + math.sqrt(5)) / 2
GOLDEN_ANGLE = TWO_PI / PHI**2

_EPS = 1e-12

__all__ = [
    "DenjoySystem",
    "CutPoint",
    "ClopenVector",
    "Arc",
    "denjoy_distance",
    "induced_action",
    "measure_functional",
    "rotation_coding",
    "disjoint_orbit_neighborhoods",
    "evaluation_matrix",
    "independence_certificate",
    "parse_angle",
    "GOLDEN_ANGLE",
]


def _mod(t: float) -> float:
    r = math.fmod(t, TWO_PI)
    return r + TWO_PI if r < 0 else r


def _ccw(s: float, t: float) -> float:
    """Counterclockwise arc length from angle s to angle t, in [0, 2 pi)."""
    return _mod(t - s)


@dataclass(frozen=True)
class DenjoySystem:
    lam: float
    base_point: float = 0.0
    depth: int = 8

    def __post_init__(self):
        lam = float(self.lam)
        if not 0 < lam < math.pi:
            raise PreconditionError(f"rotation angle must lie in (0, pi), got {lam}")
        ratio = lam / math.pi
        approx = Fraction(ratio).limit_denominator(1000)
        if abs(ratio - approx) < _EPS:
            raise PreconditionError(f"lam/pi = {ratio!r} is numerically the rational {approx}")
        if self.depth < 0:
            raise PreconditionError("depth must be >= 0")
        pts = sorted(self.orbit_point(j) for j in range(-self.depth, self.depth + 1))
        gaps = [b - a for a, b in zip(pts, pts[1:])] + [pts[0] + TWO_PI - pts[-1]]
        if len(pts) > 1 and min(gaps) < _EPS:
            raise PreconditionError("orbit points within the window are not distinct")

    def orbit_point(self, j: int) -> float:
        return _mod(self.base_point + j * self.lam)

    @property
    def tail_bound(self) -> float:
        """Total length of the inserted intervals with |j| > depth."""
        return 2.0 * 2.0 ** (-self.depth)

    def window(self) -> range:
        return range(-self.depth, self.depth + 1)


@dataclass(frozen=True)
class CutPoint:
    """A point of K: a side of an orbit cut (``index``) or a non-orbit angle."""

    index: int | None = None
    angle: float | None = None
    side: str | None = None

    def __post_init__(self):
        if (self.index is None) == (self.angle is None):
            raise ValueError("give exactly one of index or angle")
        if self.index is not None and self.side not in ("left", "right"):
            raise ValueError("an orbit cut point needs side 'left' or 'right'")
        if self.angle is not None and self.side is not None:
            raise ValueError("side is only meaningful at orbit points")

    @classmethod
    def left(cls, j: int) -> "CutPoint":
        return cls(index=j, side="left")

    @classmethod
    def right(cls, j: int) -> "CutPoint":
        return cls(index=j, side="right")

    def position(self, sys: DenjoySystem) -> float:
        if self.index is not None:
            if abs(self.index) > sys.depth:
                raise WindowError(f"orbit index {self.index} is beyond depth {sys.depth}")
            return sys.orbit_point(self.index)
        t = _mod(self.angle)
        for j in sys.window():
            if abs(_mod(t - sys.orbit_point(j) + math.pi) - math.pi) < _EPS:
                raise PreconditionError(f"angle {self.angle} is the orbit point a_{j}; use index={j}")
        return t

    def to_dict(self) -> dict:
        if self.index is not None:
            return {"index": self.index, "side": self.side}
        return {"angle": self.angle}


def _one_way(x: CutPoint, y: CutPoint, sys: DenjoySystem) -> float:
    """m(x, y): arc length from x to y plus the inserted intervals it crosses."""
    tx, ty = x.position(sys), y.position(sys)
    if x.index is not None and x.index == y.index:
        # same cut: left -> right crosses I_j only, right -> left goes all the way round
        if x.side == "left":
            return 2.0 ** (-abs(x.index))
        length = TWO_PI
    else:
        length = _ccw(tx, ty)
    total = length
    for j in sys.window():
        if j == x.index:
            total += 2.0 ** (-abs(j)) if x.side == "left" else 0.0
            continue
        if j == y.index:
            total += 2.0 ** (-abs(j)) if y.side == "right" else 0.0
            continue
        if 0 < _ccw(tx, sys.orbit_point(j)) < length:
            total += 2.0 ** (-abs(j))
    return total


def denjoy_distance(x: CutPoint, y: CutPoint, sys: DenjoySystem) -> tuple[float, float]:
    """rho(x, y) = min(m(x,y), m(y,x)) and the bound on the omitted orbit terms."""
    if x == y:
        x.position(sys)
        return 0.0, 0.0
    return min(_one_way(x, y, sys), _one_way(y, x, sys)), sys.tail_bound


@dataclass(frozen=True)
class ClopenVector:
    """Coefficients on the basis 1, x_-n, ..., x_n, unit first."""

    depth: int
    coeffs: tuple[int, ...]

    def __post_init__(self):
        if self.depth < 0:
            raise ValueError("depth must be >= 0")
        if len(self.coeffs) != 2 * self.depth + 2:
            raise ValueError(f"depth {self.depth} needs {2 * self.depth + 2} coefficients")

    @classmethod
    def zero(cls, depth: int) -> "ClopenVector":
        return cls(depth, (0,) * (2 * depth + 2))

    @classmethod
    def unit(cls, depth: int) -> "ClopenVector":
        return cls(depth, (1,) + (0,) * (2 * depth + 1))

    @classmethod
    def arc(cls, j: int, depth: int) -> "ClopenVector":
        """x_j, the indicator of the arc from a_j to a_{j+1}."""
        if abs(j) > depth:
            raise WindowError(f"x_{j} is outside depth {depth}")
        c = [0] * (2 * depth + 2)
        c[j + depth + 1] = 1
        return cls(depth, tuple(c))

    @classmethod
    def from_terms(cls, depth: int, unit: int = 0, arcs: dict[int, int] | None = None) -> "ClopenVector":
        c = [0] * (2 * depth + 2)
        c[0] = unit
        for j, x in (arcs or {}).items():
            if abs(j) > depth:
                raise WindowError(f"x_{j} is outside depth {depth}")
            c[j + depth + 1] += x
        return cls(depth, tuple(c))

    @property
    def unit_coeff(self) -> int:
        return self.coeffs[0]

    def arc_coeffs(self) -> dict[int, int]:
        return {j: self.coeffs[j + self.depth + 1] for j in range(-self.depth, self.depth + 1)
                if self.coeffs[j + self.depth + 1]}

    def __add__(self, other: "ClopenVector") -> "ClopenVector":
        if other.depth != self.depth:
            raise ValueError("depth mismatch")
        return ClopenVector(self.depth, tuple(a + b for a, b in zip(self.coeffs, other.coeffs)))

    def __rmul__(self, k: int) -> "ClopenVector":
        return ClopenVector(self.depth, tuple(k * a for a in self.coeffs))

    def to_dict(self) -> dict:
        return {"depth": self.depth, "unit": self.unit_coeff,
                "arcs": {str(j): x for j, x in self.arc_coeffs().items()}}


def induced_action(v: ClopenVector, power: int) -> ClopenVector:
    """alpha^power: the unit is fixed and x_j moves to x_{j+power}."""
    out = [0] * len(v.coeffs)
    out[0] = v.unit_coeff
    for j, x in v.arc_coeffs().items():
        t = j + power
        if abs(t) > v.depth:
            raise WindowError(f"x_{j} shifted by {power} leaves depth {v.depth}")
        out[t + v.depth + 1] = x
    return ClopenVector(v.depth, tuple(out))


def measure_functional(v: ClopenVector, sys: DenjoySystem) -> float:
    return TWO_PI * v.unit_coeff + sys.lam * sum(v.coeffs[1:])


def rotation_coding(sys: DenjoySystem, start: float, length: int) -> str:
    """Itinerary of ``start`` under the rotation: '2' on [a_0, a_0 + lam), '1' elsewhere.

    If some visited point lands within 1e-12 of a partition endpoint the
    start is nudged by 1e-9 and the orbit recomputed.
    """
    if length < 0:
        raise PreconditionError("length must be >= 0")
    s = start
    for _ in range(100):
        phases = [_mod(s + k * sys.lam - sys.base_point) for k in range(length)]
        if all(min(p, abs(p - sys.lam), TWO_PI - p) > _EPS for p in phases):
            return "".join("2" if p < sys.lam else "1" for p in phases)
        s += 1e-9
    raise AssertionError("could not move the start off the partition endpoints")


@dataclass(frozen=True)
class Arc:
    """Clopen arc of K from the right side of a_p to the left side of a_q."""

    p: int
    q: int
    start: float
    end: float

    @property
    def length(self) -> float:
        return _ccw(self.start, self.end)

    def contains(self, t: float) -> bool:
        return _ccw(self.start, t) < self.length

    def disjoint(self, other: "Arc") -> bool:
        return not (self.contains(other.start) or other.contains(self.start))

    def to_dict(self) -> dict:
        return {"from_index": self.p, "to_index": self.q, "start": self.start, "end": self.end}


def disjoint_orbit_neighborhoods(sys: DenjoySystem, m: int, search: int = 100000) -> list[Arc]:
    """Arcs U_0, ..., U_m with U_j the j-th rotate of U_0 and a_j in U_j, pairwise disjoint.

    U_0 is cut out by two orbit points beyond the window, so each U_j is
    clopen in K and rotating it just shifts its endpoint indices.
    """
    if m < 0 or m > sys.depth:
        raise PreconditionError(f"m must lie in [0, depth={sys.depth}], got {m}")
    centers = [sys.orbit_point(j) for j in range(m + 1)]
    gap = TWO_PI
    for i in range(len(centers)):
        for k in range(i + 1, len(centers)):
            d = _ccw(centers[i], centers[k])
            gap = min(gap, d, TWO_PI - d)
    a0 = centers[0]
    best_l = best_r = None
    for k in range(sys.depth + 1, search):
        for j in (k, -k):
            t = sys.orbit_point(j)
            if best_r is None or _ccw(a0, t) < _ccw(a0, sys.orbit_point(best_r)):
                best_r = j
            if best_l is None or _ccw(t, a0) < _ccw(sys.orbit_point(best_l), a0):
                best_l = j
        width = _ccw(sys.orbit_point(best_l), sys.orbit_point(best_r))
        if width < gap / 2:
            break
    else:
        raise AssertionError("orbit search did not produce small enough arcs")
    arcs = [Arc(best_l + j, best_r + j, sys.orbit_point(best_l + j), sys.orbit_point(best_r + j))
            for j in range(m + 1)]
    for i, u in enumerate(arcs):
        if not u.contains(sys.orbit_point(i)):
            raise AssertionError(f"U_{i} misses a_{i}")
        for v in arcs[i + 1:]:
            if not u.disjoint(v):
                raise AssertionError("neighbourhoods overlap")
    return arcs


def evaluation_matrix(arcs: Sequence[Arc], points: Sequence[float]) -> IntMatrix:
    """Row i holds the values of the arc indicators at ``points[i]``."""
    return IntMatrix.from_rows([[int(a.contains(t)) for a in arcs] for t in points], cols=len(arcs))


def independence_certificate(sys: DenjoySystem) -> tuple[IntMatrix, int]:
    """Evaluate 1, x_-n, ..., x_n at one point of each elementary arc; return the matrix and its rank.

    The cuts a_-n, ..., a_{n+1} split the circle into 2n+2 elementary arcs on
    which every basis function is constant, so full rank 2n+2 means the
    basis is linearly independent.
    """
    n = sys.depth
    cuts = sorted(sys.orbit_point(j) for j in range(-n, n + 2))
    mids = [_mod(c + _ccw(c, d) / 2) for c, d in zip(cuts, cuts[1:] + cuts[:1])]
    rows = []
    for t in mids:
        row = [1]
        for j in range(-n, n + 1):
            row.append(int(_ccw(sys.orbit_point(j), t) < sys.lam))
        rows.append(row)
    mat = IntMatrix.from_rows(rows, cols=2 * n + 2)
    return mat, rank(mat)


_BINOPS = {ast.Add: operator.add, ast.Sub: operator.sub, ast.Mult: operator.mul,
           ast.Div: operator.truediv, ast.Pow: operator.pow}
_NAMES = {"pi": math.pi, "phi": PHI, "e": math.e}


def parse_angle(text: str) -> float:
    """Read an angle such as ``2pi/phi^2``, ``golden``, ``1.0`` or ``pi*sqrt(2)/3``."""
    s = text.strip().lower()
    if s == "golden":
        return GOLDEN_ANGLE
    s = s.replace("^", "**").replace("π", "pi").replace("φ", "phi")
    # allow implicit products like 2pi
    out, prev = [], ""
    for ch in s:
        if ch.isalpha() and (prev.isdigit() or prev == "."):
            out.append("*")
        out.append(ch)
        prev = ch
    s = "".join(out)
    try:
        tree = ast.parse(s, mode="eval")
    except SyntaxError:
        raise ValueError(f"cannot parse angle {text!r}") from None

    def ev(node):
        if isinstance(node, ast.Expression):
            return ev(node.body)
        if isinstance(node, ast.Constant) and isinstance(node.value, (int, float)):
            return float(node.value)
        if isinstance(node, ast.Name) and node.id in _NAMES:
            return _NAMES[node.id]
        if isinstance(node, ast.BinOp) and type(node.op) in _BINOPS:
            return _BINOPS[type(node.op)](ev(node.left), ev(node.right))
        if isinstance(node, ast.UnaryOp) and isinstance(node.op, (ast.USub, ast.UAdd)):
            v = ev(node.operand)
            return -v if isinstance(node.op, ast.USub) else v
        if (isinstance(node, ast.Call) and isinstance(node.func, ast.Name)
                and node.func.id == "sqrt" and len(node.args) == 1):
            return math.sqrt(ev(node.args[0]))
        raise ValueError(f"unsupported token in angle {text!r}")

    return ev(tree)
