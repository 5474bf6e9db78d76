"""Constructors for the stock hypercomplex algebras.

Covers the named small algebras (complex, hyperbolic, dual, quaternion,
tessarine, Klein four-group, hyperbolic quaternion) plus two generative
families: iterated Cayley-Dickson doubling and Clifford algebras
Cl(p,q,r) built on blade bases.
"""

from __future__ import annotations

import itertools
import re
from dataclasses import dataclass
from functools import lru_cache

from .algebra import Algebra, structure_constants

MAX_DIM = 32


def _algebra(name, labels, table):
    """Assemble an Algebra from {(a, b): coefficient row} with int entries."""
    n = len(labels)
    entries = [[table[(a, b)] for b in range(1, n + 1)] for a in range(1, n + 1)]
    return Algebra(name=name, sc=structure_constants(entries), unit_labels=labels)


def _real():
    return Algebra(name="real", sc=structure_constants([]), unit_labels=())


def _two_dim(name, square):
    return _algebra(name, ("i",), {(1, 1): (square, 0)})


def _quaternion():
    return _algebra(
        "quaternion",
        ("i", "j", "k"),
        {
            (1, 1): (-1, 0, 0, 0), (1, 2): (0, 0, 0, 1), (1, 3): (0, 0, -1, 0),
            (2, 1): (0, 0, 0, -1), (2, 2): (-1, 0, 0, 0), (2, 3): (0, 1, 0, 0),
            (3, 1): (0, 0, 1, 0), (3, 2): (0, -1, 0, 0), (3, 3): (-1, 0, 0, 0),
        },
    )


def _tessarine():
    # commutative: ij = ji = k, j*j = +1
    return _algebra(
        "tessarine",
        ("i", "j", "k"),
        {
            (1, 1): (-1, 0, 0, 0), (1, 2): (0, 0, 0, 1), (1, 3): (0, 0, -1, 0),
            (2, 1): (0, 0, 0, 1), (2, 2): (1, 0, 0, 0), (2, 3): (0, 1, 0, 0),
            (3, 1): (0, 0, -1, 0), (3, 2): (0, 1, 0, 0), (3, 3): (-1, 0, 0, 0),
        },
    )


def _klein4():
    # self-inverse units, fully commutative
    return _algebra(
        "klein4",
        ("i", "j", "k"),
        {
            (1, 1): (1, 0, 0, 0), (1, 2): (0, 0, 0, 1), (1, 3): (0, 0, 1, 0),
            (2, 1): (0, 0, 0, 1), (2, 2): (1, 0, 0, 0), (2, 3): (0, 1, 0, 0),
            (3, 1): (0, 0, 1, 0), (3, 2): (0, 1, 0, 0), (3, 3): (1, 0, 0, 0),
        },
    )


def _hyperbolic_quaternion():
    # anticommutative with self-inverse units; not associative
    return _algebra(
        "hyperbolic-quaternion",
        ("i", "j", "k"),
        {
            (1, 1): (1, 0, 0, 0), (1, 2): (0, 0, 0, 1), (1, 3): (0, 0, -1, 0),
            (2, 1): (0, 0, 0, -1), (2, 2): (1, 0, 0, 0), (2, 3): (0, 1, 0, 0),
            (3, 1): (0, 0, 1, 0), (3, 2): (0, -1, 0, 0), (3, 3): (1, 0, 0, 0),
        },
    )


_BUILDERS = {
    "real": _real,
    "complex": lambda: _two_dim("complex", -1),
    "hyperbolic": lambda: _two_dim("hyperbolic", 1),
    "dual": lambda: _two_dim("dual", 0),
    "quaternion": _quaternion,
    "tessarine": _tessarine,
    "klein4": _klein4,
    "hyperbolic-quaternion": _hyperbolic_quaternion,
}

NAMES = tuple(_BUILDERS)


def named(name: str) -> Algebra:
    """One of the stock algebras by name; raises on unknown names."""
    try:
        return _BUILDERS[name]()
    except KeyError:
        raise ValueError(
            f"unknown algebra {name!r}; known: {', '.join(NAMES)}"
        ) from None


@lru_cache(maxsize=None)
def _cd_unit_product(dim: int, i: int, j: int) -> tuple[int, int]:
    """(index, sign) of e_i * e_j under doubling with product
    (a,b)(c,d) = (ac - conj(d) b, da + b conj(c))."""
    if i == 0:
        return j, 1
    if j == 0:
        return i, 1
    h = dim // 2
    if i < h and j < h:
        return _cd_unit_product(h, i, j)
    if i < h:  # (e_i, 0)(0, e_j') = (0, e_j' e_i)
        k, s = _cd_unit_product(h, j - h, i)
        return k + h, s
    if j < h:  # (0, e_i')(e_j, 0) = (0, e_i' conj(e_j)), j >= 1 here
        k, s = _cd_unit_product(h, i - h, j)
        return k + h, -s
    # (0, e_i')(0, e_j') = (-conj(e_j') e_i', 0)
    k, s = _cd_unit_product(h, j - h, i - h)
    return k, (-s if j - h == 0 else s)


def cayley_dickson(levels: int) -> Algebra:
    """Algebra of dimension 2**levels from iterated doubling.

    Level 0 is the reals; levels 1 and 2 reproduce the complex and
    quaternion tables exactly (asserted in tests), level 3 the octonions.
    """
    if not 0 <= levels <= 5:
        raise ValueError(f"levels must be in 0..5, got {levels}")
    dim = 2**levels
    n = dim - 1
    entries = []
    for a in range(1, n + 1):
        plane = []
        for b in range(1, n + 1):
            k, s = _cd_unit_product(dim, a, b)
            row = [0] * dim
            row[k] = s
            plane.append(row)
        entries.append(plane)
    return Algebra(
        name=f"cayley-dickson-{levels}",
        sc=structure_constants(entries),
        unit_labels=tuple(f"e{u}" for u in range(1, n + 1)),
    )


@dataclass(frozen=True)
class CliffordSignature:
    """Generator counts squaring to +1 (p), -1 (q), and 0 (r)."""

    p: int
    q: int
    r: int

    def __post_init__(self):
        if min(self.p, self.q, self.r) < 0:
            raise ValueError("signature counts must be non-negative")

    @property
    def n_generators(self) -> int:
        return self.p + self.q + self.r

    @property
    def dimension(self) -> int:
        return 2**self.n_generators


def _blade_product(a, b, squares):
    """Product of two blades: concatenate, sort counting transpositions,
    contract repeated generators by their squares."""
    seq = list(a) + list(b)
    sign = 1
    for i in range(len(seq)):
        for j in range(len(seq) - 1 - i):
            if seq[j] > seq[j + 1]:
                seq[j], seq[j + 1] = seq[j + 1], seq[j]
                sign = -sign
    out = []
    pos = 0
    while pos < len(seq):
        if pos + 1 < len(seq) and seq[pos] == seq[pos + 1]:
            sq = squares[seq[pos]]
            if sq == 0:
                return 0, ()
            sign *= sq
            pos += 2
        else:
            out.append(seq[pos])
            pos += 1
    return sign, tuple(out)


def clifford(sig: CliffordSignature) -> Algebra:
    """Clifford algebra Cl(p,q,r) as structure constants on a blade basis.

    Blades are ordered grade-ascending and lexicographically within each
    grade, scalar first, with labels like "e1", "e2", "e12".
    """
    m = sig.n_generators
    dim = sig.dimension
    if dim > MAX_DIM:
        raise ValueError(
            f"Cl({sig.p},{sig.q},{sig.r}) has dimension {dim} > {MAX_DIM}"
        )
    squares = {
        g: 1 if g <= sig.p else (-1 if g <= sig.p + sig.q else 0)
        for g in range(1, m + 1)
    }
    blades = [()]
    for grade in range(1, m + 1):
        blades.extend(itertools.combinations(range(1, m + 1), grade))
    index = {blade: pos for pos, blade in enumerate(blades)}

    n = dim - 1
    entries = []
    for a in range(1, n + 1):
        plane = []
        for b in range(1, n + 1):
            s, blade = _blade_product(blades[a], blades[b], squares)
            row = [0] * dim
            if s:
                row[index[blade]] = s
            plane.append(row)
        entries.append(plane)
    labels = tuple("e" + "".join(str(g) for g in blade) for blade in blades[1:])
    return Algebra(
        name=f"clifford({sig.p},{sig.q},{sig.r})",
        sc=structure_constants(entries),
        unit_labels=labels,
    )


_CLIFFORD_RE = re.compile(r"(?:clifford|cl)[(:]\s*(\d+)\s*,\s*(\d+)\s*,\s*(\d+)\s*\)?\Z")
_CD_RE = re.compile(r"(?:cayley-dickson-|cd-?)(\d+)\Z")


def from_spec_string(text: str) -> Algebra:
    """Resolve an algebra from a name: stock names, "cd<levels>", or
    "clifford(p,q,r)" (also accepted as "clifford:p,q,r")."""
    key = text.strip().lower()
    if key in _BUILDERS:
        return named(key)
    m = _CD_RE.match(key)
    if m:
        return cayley_dickson(int(m.group(1)))
    m = _CLIFFORD_RE.match(key)
    if m:
        return clifford(CliffordSignature(*(int(g) for g in m.groups())))
    raise ValueError(f"unknown algebra {text!r}")
