"""Bilinear-form matrices of the algebra product and degeneracy analysis.

The product of two hypercomplex values can be written coefficientwise as
(x y)_j = [x]^T B_j [y] for n+1 square matrices B_0..B_n built from the
structure constants.  An algebra is non-degenerate exactly when every one
of these matrices is invertible; that classification is the hinge for the
universal-approximation property of the networks in `network`, so the
determinants are computed exactly whenever the constants are rational.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .algebra import Algebra, DimensionError, _as_coeffs

NON_DEGENERATE = "NonDegenerate"
DEGENERATE = "Degenerate"
METHOD_EXACT = "ExactRational"
METHOD_FLOAT = "FloatTolerance"

# singular iff |det| <= _FLOAT_TOL * (max |entry|)^size, float fallback only
_FLOAT_TOL = 1e-10


@dataclass(frozen=True)
class BilinearMatrixSet:
    """The n+1 product matrices; mats[j] gives coefficient j of x*y."""

    mats: np.ndarray  # (n+1, n+1, n+1)
    exact: tuple | None = None  # nested Fraction mirror, same shape

    @property
    def dim(self) -> int:
        return self.mats.shape[0]


def build_bilinear_matrices(alg: Algebra) -> BilinearMatrixSet:
    """Assemble B_0..B_n from the structure constants.

    B_0 has 1 at (0,0), zeros along the rest of row/column 0, and the
    gamma=0 constants inside.  B_j (j>=1) has 1 at (0,j) and (j,0), zeros
    elsewhere in row/column 0, and the gamma=j constants inside.
    """
    n = alg.sc.n
    d = n + 1
    mats = np.zeros((d, d, d))
    mats[0, 0, 0] = 1.0
    if n:
        mats[0, 1:, 1:] = alg.sc.p[:, :, 0]
        for j in range(1, d):
            mats[j, 0, j] = 1.0
            mats[j, j, 0] = 1.0
            mats[j, 1:, 1:] = alg.sc.p[:, :, j]
    mats.flags.writeable = False

    exact = None
    if alg.sc.exact is not None:
        ex = alg.sc.exact
        zero, one = Fraction(0), Fraction(1)
        planes = []
        for j in range(d):
            rows = []
            for r in range(d):
                row = []
                for c in range(d):
                    if r == 0 or c == 0:
                        hit = (r == 0 and c == j) or (c == 0 and r == j)
                        row.append(one if hit else zero)
                    else:
                        row.append(ex[r - 1][c - 1][j])
                rows.append(tuple(row))
            planes.append(tuple(rows))
        exact = tuple(planes)
    return BilinearMatrixSet(mats=mats, exact=exact)


def mul_bilinear(bms: BilinearMatrixSet, a, b) -> np.ndarray:
    """Hypercomplex product via the matrix forms: result j = a^T B_j b."""
    a, b = _as_coeffs(a), _as_coeffs(b)
    d = bms.dim
    if a.shape[0] != d or b.shape[0] != d:
        raise DimensionError(
            f"operands of length {a.shape[0]}, {b.shape[0]} for dimension {d}"
        )
    return (bms.mats @ b) @ a


def _det_bareiss_int(rows: list[list[int]]) -> int:
    """Exact determinant by fraction-free (single-step Bareiss) elimination.

    Every interior division is exact over the integers, so entries never
    leave Z and stay small for the 0/+-1 tables this package produces.
    """
    m = [row[:] for row in rows]
    size = len(m)
    sign = 1
    prev = 1
    for k in range(size - 1):
        if m[k][k] == 0:
            for r in range(k + 1, size):
                if m[r][k] != 0:
                    m[k], m[r] = m[r], m[k]
                    sign = -sign
                    break
            else:
                return 0
        pivot = m[k][k]
        for i in range(k + 1, size):
            row_i, row_k = m[i], m[k]
            lead = row_i[k]
            for j in range(k + 1, size):
                row_i[j] = (row_i[j] * pivot - lead * row_k[j]) // prev
            row_i[k] = 0
        prev = pivot
    return sign * m[size - 1][size - 1]


def det_exact(rows) -> Fraction:
    """Exact determinant of a square matrix of Fractions.

    Denominators are cleared row by row, the integer core runs Bareiss
    elimination, and the accumulated scale is divided back out.
    """
    size = len(rows)
    if size == 0:
        return Fraction(1)
    scale = 1
    int_rows = []
    for row in rows:
        if len(row) != size:
            raise ValueError("matrix must be square")
        frac_row = [Fraction(c) for c in row]
        lcm = 1
        for c in frac_row:
            lcm = math.lcm(lcm, c.denominator)
        int_rows.append([int(c * lcm) for c in frac_row])
        scale *= lcm
    return Fraction(_det_bareiss_int(int_rows), scale)


def det_float(mat: np.ndarray) -> float:
    """Float determinant via partially pivoted LU."""
    return float(np.linalg.det(np.asarray(mat, dtype=np.float64)))


@dataclass(frozen=True)
class MatrixVerdict:
    index: int
    det: Fraction | float
    singular: bool


@dataclass(frozen=True)
class DegeneracyReport:
    """Per-matrix determinants plus the overall classification."""

    algebra_name: str
    per_matrix: tuple[MatrixVerdict, ...]
    verdict: str  # NON_DEGENERATE or DEGENERATE
    method: str  # METHOD_EXACT or METHOD_FLOAT

    def to_machine(self) -> str:
        """Line-oriented machine rendering, stable across runs."""
        lines = [
            f"matrix {m.index} det {_fmt_det(m.det)} "
            f"singular {'true' if m.singular else 'false'}"
            for m in self.per_matrix
        ]
        lines.append(f"verdict {self.verdict}")
        return "\n".join(lines) + "\n"

    def to_text(self) -> str:
        """Human-readable rendering."""
        name = self.algebra_name or "(unnamed)"
        lines = [f"algebra: {name}", f"method: {self.method}"]
        for m in self.per_matrix:
            state = "SINGULAR" if m.singular else "invertible"
            lines.append(f"  B_{m.index}: det = {_fmt_det(m.det)}  [{state}]")
        lines.append(f"verdict: {self.verdict}")
        return "\n".join(lines) + "\n"

    def to_csv(self) -> str:
        lines = ["matrix,det,singular"]
        for m in self.per_matrix:
            lines.append(
                f"{m.index},{_fmt_det(m.det)},{'true' if m.singular else 'false'}"
            )
        lines.append(f"verdict,{self.verdict},")
        return "\n".join(lines) + "\n"


def _fmt_det(value) -> str:
    if isinstance(value, Fraction):
        return str(value)
    return repr(float(value))


def check_degeneracy(alg: Algebra, use_exact: bool | None = None) -> DegeneracyReport:
    """Classify an algebra as degenerate or non-degenerate.

    With rational constants the determinants are exact (singular iff
    exactly zero); otherwise a float determinant is compared against a
    tolerance scaled by the matrix magnitude.  `use_exact=False` forces
    the float path, e.g. to cross-check the two routes.
    """
    bms = build_bilinear_matrices(alg)
    if use_exact is None:
        use_exact = bms.exact is not None
    if use_exact and bms.exact is None:
        raise ValueError("algebra has no exact rational constants")

    entries = []
    if use_exact:
        for j in range(bms.dim):
            det = det_exact([list(row) for row in bms.exact[j]])
            entries.append(MatrixVerdict(index=j, det=det, singular=det == 0))
        method = METHOD_EXACT
    else:
        for j in range(bms.dim):
            mat = bms.mats[j]
            det = det_float(mat)
            bound = _FLOAT_TOL * float(np.max(np.abs(mat))) ** bms.dim
            entries.append(
                MatrixVerdict(index=j, det=det, singular=abs(det) <= bound)
            )
        method = METHOD_FLOAT
    verdict = (
        DEGENERATE if any(m.singular for m in entries) else NON_DEGENERATE
    )
    return DegeneracyReport(
        algebra_name=alg.name,
        per_matrix=tuple(entries),
        verdict=verdict,
        method=method,
    )
