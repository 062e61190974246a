"""Truncated weighted shifts on l^2(Z) and the spectral checks built on them.

A ``TruncOp`` is the compression of an operator to e_-W .. e_W.  Truncation
spoils the first and last row/column, so entrywise identities are compared
on the interior only.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

import numpy as np

from .exceptions import PreconditionError, WindowError
from .symdyn import BiSequence, has_unbounded_runs

__all__ = [
    "TruncOp",
    "JointPoint",
    "weighted_shift",
    "shift",
    "diagonal",
    "psd_sqrt",
    "polar_identity_check",
    "joint_spectrum_test",
    "joint_spectrum_grid",
    "b_gamma_matrix",
    "unimodular_witness",
    "periodic_spectrum",
    "rotation_weights",
    "rotation_weight_check",
    "nonsimplicity_scan",
]


@dataclass(frozen=True, eq=False)
class TruncOp:
    radius: int
    entries: np.ndarray

    def __post_init__(self):
        n = 2 * self.radius + 1
        if self.entries.shape != (n, n):
            raise ValueError(f"radius {self.radius} needs a {n}x{n} matrix, got {self.entries.shape}")
        if not np.all(np.isfinite(self.entries)):
            raise ValueError("entries must be finite")

    def __getitem__(self, ij: tuple[int, int]) -> complex:
        i, j = ij
        return self.entries[i + self.radius, j + self.radius]

    def __matmul__(self, other: "TruncOp") -> "TruncOp":
        return TruncOp(self.radius, self.entries @ other.entries)

    def __add__(self, other: "TruncOp") -> "TruncOp":
        return TruncOp(self.radius, self.entries + other.entries)

    def __sub__(self, other: "TruncOp") -> "TruncOp":
        return TruncOp(self.radius, self.entries - other.entries)

    def __rmul__(self, c: complex) -> "TruncOp":
        return TruncOp(self.radius, c * self.entries)

    @property
    def H(self) -> "TruncOp":
        return TruncOp(self.radius, self.entries.conj().T)

    def interior(self, margin: int = 1) -> np.ndarray:
        return self.entries[margin:-margin, margin:-margin] if margin else self.entries


def _weights(x) -> tuple[np.ndarray, int]:
    if isinstance(x, BiSequence):
        return np.array([float(c) for c in x.symbols]), x.radius
    w = np.asarray(x)
    if w.ndim != 1 or len(w) % 2 == 0:
        raise ValueError("weights need odd length 2W+1")
    return w, (len(w) - 1) // 2


def weighted_shift(x) -> TruncOp:
    """T_x e_i = x_i e_{i+1}; ``x`` is a BiSequence or 2W+1 numbers for indices -W..W."""
    w, r = _weights(x)
    m = np.zeros((2 * r + 1, 2 * r + 1), dtype=complex)
    idx = np.arange(2 * r)
    m[idx + 1, idx] = w[:-1]
    return TruncOp(r, m)


def shift(radius: int) -> TruncOp:
    return weighted_shift(np.ones(2 * radius + 1))


def diagonal(values) -> TruncOp:
    v = np.asarray(values, dtype=complex)
    return TruncOp((len(v) - 1) // 2, np.diag(v))


def psd_sqrt(a: np.ndarray) -> np.ndarray:
    """Square root of a Hermitian positive semidefinite matrix."""
    vals, vecs = np.linalg.eigh(a)
    vals = np.clip(vals, 0.0, None)
    return (vecs * np.sqrt(vals)) @ vecs.conj().T


def _resid(a: np.ndarray) -> float:
    return float(np.max(np.abs(a))) if a.size else 0.0


def polar_identity_check(x, tol: float = 1e-9) -> dict:
    """Residuals of T_x = T X_0 and X_0 = sqrt(T_x* T_x) on the window interior."""
    w, r = _weights(x)
    if np.any(np.iscomplex(w)) or np.any(w.real < 1) or np.any(w.real > 2):
        raise PreconditionError("weights must be real and lie in [1, 2]")
    tx = weighted_shift(w)
    x0 = diagonal(w)
    r1 = _resid((tx - shift(r) @ x0).interior())
    r2 = _resid(x0.interior() - psd_sqrt((tx.H @ tx).entries)[1:-1, 1:-1])
    worst = max(r1, r2)
    return {"radius": r, "shift_residual": r1, "sqrt_residual": r2,
            "max_residual": worst, "pass": worst <= tol}


# ---------------------------------------------------------------------------
# joint spectrum of the diagonal family X_i e_j = x_{i+j} e_j


def _exact(v) -> Fraction:
    if isinstance(v, float):
        return Fraction(repr(v))
    return Fraction(v)


@dataclass(frozen=True)
class JointPoint:
    """lambda_i for i in a finite index set; values may be complex."""

    indices: tuple[int, ...]
    values: tuple[complex, ...]

    def __post_init__(self):
        if not self.indices:
            raise ValueError("need at least one index")
        if len(self.indices) != len(self.values) or len(set(self.indices)) != len(self.indices):
            raise ValueError("one value per distinct index")

    def exact(self) -> list[tuple[int, Fraction, Fraction]]:
        out = []
        for i, v in zip(self.indices, self.values):
            if isinstance(v, complex):
                out.append((i, _exact(v.real), _exact(v.imag)))
            else:
                out.append((i, _exact(v), Fraction(0)))
        return out


def _reach(x: BiSequence, indices: Iterable[int]) -> range:
    lo, hi = min(indices), max(indices)
    js = range(-x.radius - lo, x.radius - hi + 1)
    if len(js) == 0:
        raise WindowError("index set does not fit in the window")
    return js


def joint_spectrum_test(x: BiSequence, point: JointPoint, tol: float | None = None) -> dict:
    """min over j of sum_i |x_{i+j} - lambda_i|^2, exactly.

    This is half the bottom of the diagonal operator B_Gamma; the point is
    reported as a member when the score is at most ``tol**2``.
    """
    terms = point.exact()
    best, arg = None, None
    for j in _reach(x, point.indices):
        s = Fraction(0)
        for i, re, im in terms:
            d = int(x[i + j]) - re
            s += d * d + im * im
        if best is None or s < best:
            best, arg = s, j
    out = {"indices": list(point.indices), "score": best, "argmin": arg}
    if tol is not None:
        out["member"] = best <= _exact(tol) ** 2
    return out


def b_gamma_matrix(x: BiSequence, point: JointPoint) -> np.ndarray:
    """Sum of (X_i - l_i)(X_i - l_i)* + (X_i - l_i)*(X_i - l_i) over the reachable window."""
    js = _reach(x, point.indices)
    b = np.zeros((len(js), len(js)), dtype=complex)
    for i, lam in zip(point.indices, point.values):
        d = np.diag([int(x[i + j]) - lam for j in js])
        b += d @ d.conj().T + d.conj().T @ d
    return b


def joint_spectrum_grid(x: BiSequence, indices: Sequence[int], axes: Sequence[Sequence]) -> list[tuple]:
    """Score every point of a product grid; one row ``(*lambda, score)`` per point."""
    if len(axes) != len(indices):
        raise ValueError("one axis per index")
    rows = []
    for lam in itertools.product(*axes):
        res = joint_spectrum_test(x, JointPoint(tuple(indices), tuple(lam)))
        rows.append((*lam, res["score"]))
    return rows


# ---------------------------------------------------------------------------
# unimodular weights


def unimodular_witness(x: Sequence[complex], lam: complex, n: int, tol: float = 1e-12) -> dict:
    """Approximate eigenvector of T_x for ``lam`` on the unit circle.

    ``x`` holds x_0, x_1, ...; chi = sum_{j<=n} alpha_j e_j with alpha_0 = 1
    and alpha_{j+1} = alpha_j x_j / lam.  Returns ||(T_x - lam) xi|| for the
    normalised xi and the bound sqrt(2/(n+1)).
    """
    w = np.asarray(x, dtype=complex)
    if n < 0:
        raise PreconditionError("n must be >= 0")
    if len(w) < n + 1:
        raise WindowError(f"need weights x_0..x_{n}, got {len(w)}")
    if np.any(np.abs(np.abs(w) - 1) > tol):
        raise PreconditionError("weights must have modulus 1")
    lam = complex(lam)
    if abs(abs(lam) - 1) > tol:
        raise PreconditionError("lambda must have modulus 1")
    alpha = np.empty(n + 1, dtype=complex)
    alpha[0] = 1
    for j in range(n):
        alpha[j + 1] = alpha[j] * w[j] / lam
    chi = alpha / np.linalg.norm(alpha)
    out = np.zeros(n + 2, dtype=complex)  # coordinates e_0 .. e_{n+1}
    out[1:] += w[: n + 1] * chi
    out[: n + 1] -= lam * chi
    res = float(np.linalg.norm(out))
    return {"n": n, "residual": res, "bound": math.sqrt(2 / (n + 1))}


# ---------------------------------------------------------------------------
# periodic weights


def periodic_spectrum(x, period: int, m: int, tol: float = 1e-9) -> dict:
    """Eigenvalues of the wrap-around truncation of size period*m.

    ``x`` is one period of positive weights, or a BiSequence that must have
    the given period across its window.
    """
    if period < 1 or m < 1:
        raise PreconditionError("period and m must be >= 1")
    if isinstance(x, BiSequence):
        w = [int(c) for c in x.symbols]
        if any(w[i] != w[i + period] for i in range(len(w) - period)):
            raise PreconditionError(f"sequence is not {period}-periodic")
        if x.radius + period > len(w):
            raise WindowError("window shorter than one period")
        pattern = [float(w[x.radius + k]) for k in range(period)]  # x_0 .. x_{p-1}
    else:
        pattern = [float(v) for v in x]
        if len(pattern) != period:
            raise PreconditionError("give exactly one period of weights")
    if any(v <= 0 for v in pattern):
        raise PreconditionError("weights must be positive")
    size = period * m
    c = np.zeros((size, size))
    for i in range(size):
        c[(i + 1) % size, i] = pattern[i % period]
    eig = np.linalg.eigvals(c)
    radius = math.prod(pattern) ** (1 / period)
    dev = float(np.max(np.abs(np.abs(eig) - radius)))
    order = np.lexsort((eig.imag, eig.real))
    return {"period": period, "m": m, "radius": radius, "eigenvalues": eig[order],
            "max_deviation": dev, "pass": dev <= tol}


# ---------------------------------------------------------------------------
# irrational rotation weights


def rotation_weights(theta: float, radius: int) -> np.ndarray:
    """x_n = 2 cos(2 pi n theta) + 3 for n = -W..W, phases reduced mod 1 first."""
    n = np.arange(-radius, radius + 1)
    phase = np.array([math.fmod(k * theta, 1.0) for k in n])
    return 2 * np.cos(2 * np.pi * phase) + 3


def rotation_weight_check(theta: float, radius: int, tol: float = 1e-9) -> dict:
    """Entrywise residuals of sqrt(T_x* T_x) - 3 = D + D*, T_x = T(D + D* + 3) and DT = e(theta) TD."""
    if not 0 < theta < 1:
        raise PreconditionError("theta must lie in (0, 1)")
    x = rotation_weights(theta, radius)
    n = np.arange(-radius, radius + 1)
    phase = np.array([math.fmod(k * theta, 1.0) for k in n])
    d = diagonal(np.exp(2j * np.pi * phase))
    t = shift(radius)
    tx = weighted_shift(x)
    eye = np.eye(2 * radius + 1)
    root = psd_sqrt((tx.H @ tx).entries)
    r_sqrt = _resid((root - 3 * eye - (d + d.H).entries)[1:-1, 1:-1])
    r_polar = _resid((tx - t @ (d + d.H + TruncOp(radius, 3 * eye))).interior())
    r_comm = _resid((d @ t - np.exp(2j * np.pi * theta) * (t @ d)).interior())
    worst = max(r_sqrt, r_polar, r_comm)
    return {"theta": theta, "radius": radius, "x0": float(x[radius]),
            "sqrt_residual": r_sqrt, "shift_residual": r_polar, "commutation_residual": r_comm,
            "max_residual": worst, "pass": worst <= tol}


# ---------------------------------------------------------------------------
# non-simplicity evidence

NOT_SIMPLE = "constant sequence in orbit closure, crossed product not simple"
INCONCLUSIVE = "runs bounded, criterion inconclusive"


def nonsimplicity_scan(x: BiSequence) -> dict:
    """Longest runs of 1 and 2 on sub-windows of radius 1, 2, 4, ... up to the full window.

    Runs that keep growing up to the full window, or fill it, point to a
    constant sequence in the orbit closure.
    """
    radii, r = [], 1
    while r < x.radius:
        radii.append(r)
        r *= 2
    radii.append(x.radius)
    rows = []
    for r in radii:
        sub = BiSequence(x.segment(-r, r), r)
        rows.append({"radius": r, "run1": has_unbounded_runs(sub, 1), "run2": has_unbounded_runs(sub, 2)})
    full = rows[-1]
    half = rows[-2] if len(rows) > 1 else rows[-1]
    flagged = []
    for s in ("1", "2"):
        key = "run" + s
        if full[key] == len(x) or (len(rows) > 1 and full[key] > half[key]):
            flagged.append(int(s))
    return {"rows": rows, "growing": flagged, "not_simple": bool(flagged),
            "verdict": NOT_SIMPLE if flagged else INCONCLUSIVE}
