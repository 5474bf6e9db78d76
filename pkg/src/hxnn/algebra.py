"""Hypercomplex numbers over an algebra defined by structure constants.

A hypercomplex value is stored as its coefficient vector (x0, ..., xn) in
the canonical ordering: real part first, then one coefficient per
hyperimaginary unit.  Values are plain 1-D float64 arrays; every operation
takes the Algebra explicitly, so the same vectors can be packed into batch
layouts without wrappers.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from fractions import Fraction

import numpy as np


class DimensionError(ValueError):
    """Coefficient vector length does not match the algebra dimension."""


class AlgebraParseError(ValueError):
    """Malformed algebra-spec text.  `line` is the 1-based offending line."""

    def __init__(self, message: str, line: int | None = None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line


ExactTensor = tuple  # nested (n, n, n+1) tuple of Fraction


@dataclass(frozen=True)
class StructureConstants:
    """Unit-product tensor of an algebra with n hyperimaginary units.

    p[a-1, b-1, g] is the coefficient of basis element g (0 = real part)
    in the product of units a and b, for 1-based a, b.  When every
    constant was given as an integer or a fraction, `exact` mirrors p
    with Fraction entries so degeneracy tests can be exact.
    """

    n: int
    p: np.ndarray
    exact: ExactTensor | None = None

    def __post_init__(self):
        if self.n < 0:
            raise ValueError("unit count must be non-negative")
        arr = np.ascontiguousarray(self.p, dtype=np.float64)
        if arr.shape != (self.n, self.n, self.n + 1):
            raise ValueError(
                f"structure constants must have shape "
                f"({self.n}, {self.n}, {self.n + 1}), got {arr.shape}"
            )
        arr.flags.writeable = False
        object.__setattr__(self, "p", arr)
        if self.exact is not None:
            exact = tuple(
                tuple(tuple(Fraction(c) for c in row) for row in plane)
                for plane in self.exact
            )
            if len(exact) != self.n or any(
                len(plane) != self.n or any(len(row) != self.n + 1 for row in plane)
                for plane in exact
            ):
                raise ValueError("exact tensor shape does not match n")
            for a in range(self.n):
                for b in range(self.n):
                    for g in range(self.n + 1):
                        if float(exact[a][b][g]) != arr[a, b, g]:
                            raise ValueError(
                                f"exact constant p[{a + 1}][{b + 1}][{g}] does not "
                                "round to its float entry"
                            )
            object.__setattr__(self, "exact", exact)


def structure_constants(entries) -> StructureConstants:
    """Build StructureConstants from a nested (n, n, n+1) sequence.

    Entries may be ints, Fractions, or floats; the exact mirror is kept
    iff every entry is an int or Fraction.
    """
    n = len(entries)
    all_rational = True
    p = np.zeros((n, n, n + 1))
    for a in range(n):
        if len(entries[a]) != n:
            raise ValueError("entries must form an (n, n, n+1) tensor")
        for b in range(n):
            row = entries[a][b]
            if len(row) != n + 1:
                raise ValueError("entries must form an (n, n, n+1) tensor")
            for g, c in enumerate(row):
                if not isinstance(c, (int, Fraction)):
                    all_rational = False
                p[a, b, g] = float(c)
    exact = None
    if all_rational:
        exact = tuple(
            tuple(tuple(Fraction(c) for c in row) for row in plane)
            for plane in entries
        )
    return StructureConstants(n=n, p=p, exact=exact)


@dataclass(frozen=True)
class Algebra:
    """A hypercomplex algebra: unit labels plus their product table."""

    name: str
    sc: StructureConstants
    unit_labels: tuple[str, ...]

    def __post_init__(self):
        labels = tuple(self.unit_labels)
        object.__setattr__(self, "unit_labels", labels)
        if len(labels) != self.sc.n:
            raise ValueError(
                f"expected {self.sc.n} unit labels, got {len(labels)}"
            )
        seen = set()
        for lab in labels:
            if not lab:
                raise ValueError("unit labels must be nonempty")
            if lab == "1":
                raise ValueError('unit label "1" is reserved for the real unit')
            if lab in seen:
                raise ValueError(f"duplicate unit label {lab!r}")
            seen.add(lab)

    @property
    def dim(self) -> int:
        """Dimension of the algebra as a real vector space (n + 1)."""
        return self.sc.n + 1


def embed(value: float, dim: int) -> np.ndarray:
    """Real number as a hypercomplex value: (value, 0, ..., 0)."""
    out = np.zeros(dim)
    out[0] = value
    return out


def _as_coeffs(x) -> np.ndarray:
    arr = np.asarray(x, dtype=np.float64)
    if arr.ndim != 1:
        raise DimensionError(f"expected a coefficient vector, got shape {arr.shape}")
    return arr


def add(a, b) -> np.ndarray:
    """Componentwise sum of two hypercomplex values."""
    a, b = _as_coeffs(a), _as_coeffs(b)
    if a.shape != b.shape:
        raise DimensionError(f"length mismatch: {a.shape[0]} vs {b.shape[0]}")
    return a + b


def scalar_mul(c: float, a) -> np.ndarray:
    """Product of a real scalar with a hypercomplex value."""
    return float(c) * _as_coeffs(a)


def mul_direct(alg: Algebra, a, b) -> np.ndarray:
    """Hypercomplex product, expanded directly from the structure constants.

    Accumulation order is fixed (unit-pair terms with the second index
    innermost, both ascending) so results are bit-reproducible.
    """
    a, b = _as_coeffs(a), _as_coeffs(b)
    d = alg.dim
    if a.shape[0] != d or b.shape[0] != d:
        raise DimensionError(
            f"operands of length {a.shape[0]}, {b.shape[0]} for a "
            f"{d}-dimensional algebra"
        )
    p = alg.sc.p
    out = np.empty(d)
    out[0] = a[0] * b[0]
    for k in range(1, d):
        out[k] = a[0] * b[k] + a[k] * b[0]
    for alpha in range(1, d):
        for beta in range(1, d):
            out += (a[alpha] * b[beta]) * p[alpha - 1, beta - 1]
    return out


def norm(a) -> float:
    """Absolute value: the Euclidean norm of the coefficient vector."""
    a = _as_coeffs(a)
    return math.sqrt(float(np.dot(a, a)))


_INT_RE = re.compile(r"[+-]?\d+\Z")
_FRAC_RE = re.compile(r"([+-]?\d+)/(\d+)\Z")


def _parse_coeff(token: str, lineno: int) -> tuple[float, Fraction | None]:
    if _INT_RE.match(token):
        v = Fraction(int(token))
        return float(v), v
    m = _FRAC_RE.match(token)
    if m:
        den = int(m.group(2))
        if den == 0:
            raise AlgebraParseError(f"zero denominator in {token!r}", lineno)
        v = Fraction(int(m.group(1)), den)
        return float(v), v
    try:
        f = float(token)
    except ValueError:
        raise AlgebraParseError(f"bad coefficient {token!r}", lineno) from None
    if not math.isfinite(f):
        raise AlgebraParseError(f"non-finite coefficient {token!r}", lineno)
    return f, None


def parse_algebra(text: str) -> Algebra:
    """Parse the line-oriented algebra-spec grammar.

    Grammar (UTF-8, '#' comments and blank lines ignored)::

        name: Quaternions              # optional
        units: i j k                   # required, may list zero labels
        prod 1 1 : -1 0 0 0            # one line per ordered unit pair

    Product lines name the two units by 1-based index or by label;
    coefficients are integers, fractions a/b, or decimals.  All n^2
    product lines are required when n >= 1.
    """
    name: str | None = None
    labels: list[str] | None = None
    label_index: dict[str, int] = {}
    prods: dict[tuple[int, int], tuple[list[float], list[Fraction] | None]] = {}

    def unit_index(token: str, lineno: int) -> int:
        assert labels is not None
        if _INT_RE.match(token):
            idx = int(token)
            if not 1 <= idx <= len(labels):
                raise AlgebraParseError(
                    f"unit index {idx} out of range 1..{len(labels)}", lineno
                )
            return idx
        if token in label_index:
            return label_index[token]
        raise AlgebraParseError(f"unknown unit label {token!r}", lineno)

    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if line.startswith("name:"):
            if name is not None:
                raise AlgebraParseError("duplicate name: line", lineno)
            name = line[len("name:"):].strip()
        elif line.startswith("units:"):
            if labels is not None:
                raise AlgebraParseError("duplicate units: line", lineno)
            labels = line[len("units:"):].split()
            for pos, lab in enumerate(labels, start=1):
                if lab == "1":
                    raise AlgebraParseError('unit label "1" is reserved', lineno)
                if lab in label_index:
                    raise AlgebraParseError(f"duplicate unit label {lab!r}", lineno)
                label_index[lab] = pos
        elif line.startswith("prod"):
            if labels is None:
                raise AlgebraParseError("prod line before units: line", lineno)
            head, sep, tail = line[len("prod"):].partition(":")
            if not sep:
                raise AlgebraParseError("prod line missing ':'", lineno)
            pair = head.split()
            if len(pair) != 2:
                raise AlgebraParseError(
                    "prod line needs exactly two unit indices", lineno
                )
            key = (unit_index(pair[0], lineno), unit_index(pair[1], lineno))
            if key in prods:
                raise AlgebraParseError(
                    f"duplicate product line for pair {key[0]} {key[1]}", lineno
                )
            tokens = tail.split()
            if len(tokens) != len(labels) + 1:
                raise AlgebraParseError(
                    f"expected {len(labels) + 1} coefficients, got {len(tokens)}",
                    lineno,
                )
            floats, fracs = [], []
            for tok in tokens:
                f, v = _parse_coeff(tok, lineno)
                floats.append(f)
                fracs.append(v)
            prods[key] = (floats, fracs if all(v is not None for v in fracs) else None)
        else:
            raise AlgebraParseError(f"unrecognized line {line!r}", lineno)

    if labels is None:
        raise AlgebraParseError("missing units: line")
    n = len(labels)
    for a in range(1, n + 1):
        for b in range(1, n + 1):
            if (a, b) not in prods:
                raise AlgebraParseError(f"missing product line for pair {a} {b}")

    p = np.zeros((n, n, n + 1))
    all_rational = True
    for (a, b), (floats, fracs) in prods.items():
        p[a - 1, b - 1] = floats
        if fracs is None:
            all_rational = False
    exact = None
    if all_rational and n:
        exact = tuple(
            tuple(tuple(prods[(a, b)][1]) for b in range(1, n + 1))
            for a in range(1, n + 1)
        )
    elif n == 0:
        exact = ()
    sc = StructureConstants(n=n, p=p, exact=exact)
    return Algebra(name=name or "", sc=sc, unit_labels=tuple(labels))


def _format_coeff(alg: Algebra, a: int, b: int, g: int) -> str:
    if alg.sc.exact is not None:
        return str(alg.sc.exact[a - 1][b - 1][g])
    return repr(float(alg.sc.p[a - 1, b - 1, g]))


def serialize_algebra(alg: Algebra) -> str:
    """Write the algebra-spec grammar deterministically (pairs row-major)."""
    lines = []
    if alg.name:
        lines.append(f"name: {alg.name}")
    lines.append(("units: " + " ".join(alg.unit_labels)).rstrip())
    n = alg.sc.n
    for a in range(1, n + 1):
        for b in range(1, n + 1):
            coeffs = " ".join(_format_coeff(alg, a, b, g) for g in range(n + 1))
            lines.append(f"prod {a} {b} : {coeffs}")
    return "\n".join(lines) + "\n"
