"""Built-in example structures.

Each entry rebuilds its structure from scratch so callers can mutate the
result freely.  The two solvable surfaces and the nilmanifold carry the full
golden data used in the tests; the torus and the twisted product of two round
3-spheres cover the extreme classes (Kaehler and nearly Kaehler).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Dict, List, Tuple

from .multilinear import Form, LieAlgebra, Matrix
from .scalars import Fraction, ONE, Scalar, ZERO
from .structure import AlmostHermitianStructure, build_structure

R = Scalar.rational


def _form(dim: int, entries: List[Tuple[Tuple[int, ...], Scalar]]) -> Form:
    """Form from 1-based index tuples."""
    degree = len(entries[0][0])
    return Form(
        dim, degree, {tuple(i - 1 for i in idx): c for idx, c in entries}
    )


@dataclass
class CatalogEntry:
    name: str
    description: str
    build: Callable[[], AlmostHermitianStructure]


def _solvable_surface() -> AlmostHermitianStructure:
    L = LieAlgebra(
        4,
        {
            (0, 3): {0: R(-1)},
            (1, 3): {2: R(-1)},
            (2, 3): {2: R(-1)},
        },
    )
    omega = _form(4, [((3, 1), ONE), ((4, 2), ONE)])
    psi_plus = _form(4, [((1, 2), ONE), ((4, 3), ONE)])
    return build_structure(L, omega, psi_plus=psi_plus, name="example-5.1")


def _inoue_surface() -> AlmostHermitianStructure:
    q = Scalar.parameter("q")
    L = LieAlgebra(
        4,
        {
            (1, 2): {0: R(-1)},
            (1, 3): {1: R(-1)},
            (2, 3): {0: -q, 2: ONE},
        },
        parameters=("q",),
    )
    omega = _form(4, [((2, 1), ONE), ((4, 3), ONE)])
    psi_plus = _form(4, [((1, 3), ONE), ((2, 4), R(-1))])
    return build_structure(L, omega, psi_plus=psi_plus, name="example-5.2")


def _hermitian_nilmanifold() -> AlmostHermitianStructure:
    r3 = Scalar.root(3)
    half = R(Fraction(1, 2))
    L = LieAlgebra(
        6,
        {
            (0, 1): {4: R(-1)},
            (0, 3): {5: R(-1)},
            (1, 2): {5: R(-1)},
        },
        extension_d=3,
    )
    omega = _form(
        6,
        [
            ((6, 5), ONE),
            ((3, 1), -half),
            ((4, 1), r3 * half),
            ((4, 2), half),
            ((3, 2), r3 * half),
        ],
    )
    psi_plus = _form(
        6,
        [
            ((1, 2, 5), ONE),
            ((3, 4, 5), ONE),
            ((1, 4, 6), -half),
            ((2, 3, 6), -half),
            ((2, 4, 6), r3 * half),
            ((1, 3, 6), -(r3 * half)),
        ],
    )
    return build_structure(L, omega, psi_plus=psi_plus, name="example-5.4")


def _flat_torus() -> AlmostHermitianStructure:
    L = LieAlgebra(4, {})
    omega = _form(4, [((1, 2), ONE), ((3, 4), ONE)])
    psi_plus = _form(4, [((1, 3), ONE), ((4, 2), ONE)])
    return build_structure(L, omega, psi_plus=psi_plus, name="flat-kaehler-torus")


def _nearly_kaehler_s3s3() -> AlmostHermitianStructure:
    """su(2) + su(2) with the twisted metric and canonical J.

    Basis (X1, X2, X3, Y1, Y2, Y3); the metric pairs X_i with Y_i through
    the off-diagonal block -1/2, and J X_i = (X_i + 2 Y_i)/sqrt(3).
    """
    r3 = Scalar.root(3)
    brackets: Dict[Tuple[int, int], Dict[int, Scalar]] = {}
    for base in (0, 3):
        for i, j, k in ((0, 1, 2), (1, 2, 0), (2, 0, 1)):
            brackets[(base + i, base + j)] = {base + k: ONE}
    L = LieAlgebra(6, brackets, extension_d=3)
    G: Matrix = [[ZERO] * 6 for _ in range(6)]
    mh = R(Fraction(-1, 2))
    for i in range(3):
        G[i][i] = ONE
        G[3 + i][3 + i] = ONE
        G[i][3 + i] = mh
        G[3 + i][i] = mh
    # omega(U, V) = <U, JV> in the (X, Y) basis
    J6: List[List[Scalar]] = [[ZERO] * 6 for _ in range(6)]
    inv3 = ONE / r3
    for i in range(3):
        J6[i][i] = inv3
        J6[3 + i][i] = R(2) * inv3
        J6[i][3 + i] = R(-2) * inv3
        J6[3 + i][3 + i] = -inv3
    coeffs = {}
    for a in range(6):
        for b in range(a + 1, 6):
            acc = ZERO
            for m in range(6):
                acc = acc + G[a][m] * J6[m][b]
            if not acc.is_zero():
                coeffs[(a, b)] = acc
    omega = Form(6, 2, coeffs)
    return build_structure(L, omega, metric=G, name="nearly-kaehler-s3s3")


ENTRIES: List[CatalogEntry] = [
    CatalogEntry(
        "example-5.1",
        "solvable 4-dimensional Lie algebra, locally conformal Kaehler (W4)",
        _solvable_surface,
    ),
    CatalogEntry(
        "example-5.2",
        "Inoue-surface algebra with parameter q, Hermitian of type W4",
        _inoue_surface,
    ),
    CatalogEntry(
        "example-5.4",
        "6-dimensional nilmanifold algebra, Hermitian of type W3 + W4",
        _hermitian_nilmanifold,
    ),
    CatalogEntry(
        "flat-kaehler-torus",
        "abelian algebra with the standard Kaehler structure",
        _flat_torus,
    ),
    CatalogEntry(
        "nearly-kaehler-s3s3",
        "su(2) + su(2) with the canonical nearly Kaehler structure (W1)",
        _nearly_kaehler_s3s3,
    ),
]


def names() -> List[str]:
    return [e.name for e in ENTRIES]


def get(name: str) -> CatalogEntry:
    for e in ENTRIES:
        if e.name == name:
            return e
    raise KeyError(f"no catalog entry named {name!r}; known: {', '.join(names())}")
