"""Almost Hermitian structures on Lie algebras and their natural connections.

The structure is always reduced to an orthonormal frame first (a general
constant metric is orthonormalized exactly or rejected), so the metric is the
identity throughout and musical isomorphisms act on raw components.
"""

from __future__ import annotations

import itertools
from typing import Dict, List, Optional, Sequence, Tuple

from .multilinear import (
    Form,
    GeometryError,
    LieAlgebra,
    Matrix,
    Tensor,
    exterior_derivative,
    identity_matrix,
    mat_inverse,
    gram_schmidt,
    sort_with_sign,
)
from .scalars import ONE, ZERO, Fraction, Scalar


class StructureError(GeometryError):
    pass


def transform_form(alpha: Form, M: Matrix) -> Form:
    """Express a form in the frame f_a = sum_j M[a][j] e_j (as coefficients on f)."""
    n = alpha.dim
    p = alpha.degree
    out = Form(n, p)
    for target in itertools.combinations(range(n), p):
        acc = ZERO
        for src, val in alpha.coeffs.items():
            # minor determinant of M on rows `target`, columns `src`
            det = ZERO
            for perm in itertools.permutations(range(p)):
                _, sign = sort_with_sign(perm)
                prod = ONE
                for t in range(p):
                    prod = prod * M[target[t]][src[perm[t]]]
                det = det + (prod if sign == 1 else -prod)
            acc = acc + val * det
        if not acc.is_zero():
            out.coeffs[target] = acc
    return out


def transform_algebra(L: LieAlgebra, M: Matrix) -> LieAlgebra:
    """Structure constants in the frame f_a = sum_j M[a][j] e_j."""
    n = L.dim
    Minv = mat_inverse(M)
    brackets: Dict[Tuple[int, int], Dict[int, Scalar]] = {}
    for a in range(n):
        for b in range(a + 1, n):
            acc = [ZERO] * n
            for i in range(n):
                if M[a][i].is_zero():
                    continue
                for j in range(n):
                    if M[b][j].is_zero():
                        continue
                    for k, v in L.bracket(i, j).items():
                        w = M[a][i] * M[b][j] * v
                        for c in range(n):
                            if not Minv[k][c].is_zero():
                                acc[c] = acc[c] + w * Minv[k][c]
            coeffs = {c: s for c, s in enumerate(acc) if not s.is_zero()}
            if coeffs:
                brackets[(a, b)] = coeffs
    return LieAlgebra(
        n, brackets, extension_d=L.extension_d, parameters=L.parameters
    )


class AlmostHermitianStructure:
    """(g, omega, J) on a Lie algebra, in an orthonormal frame."""

    def __init__(
        self,
        L: LieAlgebra,
        omega: Form,
        J: Matrix,
        vol: Form,
        psi_plus: Optional[Form] = None,
        psi_minus: Optional[Form] = None,
        name: str = "",
    ):
        self.L = L
        self.omega = omega
        self.J = J
        self.vol = vol
        self.psi_plus = psi_plus
        self.psi_minus = psi_minus
        self.name = name
        self.n = L.dim // 2

    # -- J action helpers ------------------------------------------------

    def J_vec(self, v: Sequence[Scalar]) -> List[Scalar]:
        n = self.L.dim
        return [
            sum((self.J[i][j] * v[j] for j in range(n) if not v[j].is_zero()), ZERO)
            for i in range(n)
        ]

    def J_oneform(self, alpha: Form) -> Form:
        """(J a)(X) = -a(JX)."""
        if alpha.degree != 1:
            raise StructureError("J_oneform expects a 1-form")
        n = self.L.dim
        out = Form(n, 1)
        for k in range(n):
            acc = ZERO
            for m in range(n):
                v = alpha.coeffs.get((m,))
                if v is not None and not self.J[m][k].is_zero():
                    acc = acc - v * self.J[m][k]
            if not acc.is_zero():
                out.coeffs[(k,)] = acc
        return out

    def rotate_two_form(self, alpha: Form) -> Form:
        """alpha(J., J.) as a 2-form."""
        if alpha.degree != 2:
            raise StructureError("rotate_two_form expects a 2-form")
        t = alpha.to_tensor().apply_J(0, self.J).apply_J(1, self.J)
        return t.antisymmetrize_to_form()

    def rotate_bilinear(self, b: Tensor) -> Tensor:
        """b(J., J.)."""
        return b.apply_J(0, self.J).apply_J(1, self.J)


def kaehler_volume(omega: Form, n: int) -> Form:
    """Vol = (-1)^(n(n+1)/2) omega^n / n!."""
    acc = omega
    fact = 1
    for k in range(2, n + 1):
        acc = acc.wedge(omega)
        fact *= k
    sign = -1 if (n * (n + 1) // 2) % 2 else 1
    return acc.scaled(Scalar.rational(Fraction(sign, fact)))


def build_structure(
    L: LieAlgebra,
    omega: Form,
    metric: Optional[Matrix] = None,
    psi_plus: Optional[Form] = None,
    name: str = "",
) -> AlmostHermitianStructure:
    """Validate and assemble the almost Hermitian structure.

    ``metric`` is None for the identity (the basis is declared orthonormal);
    otherwise it is orthonormalized exactly and every piece of data is
    rewritten in the new frame.
    """
    n2 = L.dim
    if metric is not None:
        P = gram_schmidt(metric, L.extension_d)
        L = transform_algebra(L, P)
        omega = transform_form(omega, P)
        if psi_plus is not None:
            psi_plus = transform_form(psi_plus, P)
    ok, witness = L.jacobi_check()
    if not ok:
        raise StructureError(f"Jacobi identity fails at indices {witness}")

    # J recovered by raising: in the orthonormal frame J^i_j = omega(e_i, e_j)
    J: Matrix = [[omega(i, j) for j in range(n2)] for i in range(n2)]

    # J^2 = -Id
    for i in range(n2):
        for j in range(n2):
            acc = ZERO
            for m in range(n2):
                acc = acc + J[i][m] * J[m][j]
            want = Scalar.rational(-1) if i == j else ZERO
            if acc != want:
                raise StructureError(
                    "omega does not define an almost complex structure (J^2 != -Id)"
                )
    # <JX, JY> = <X, Y>, i.e. J^T J = Id
    for i in range(n2):
        for j in range(n2):
            acc = ZERO
            for m in range(n2):
                acc = acc + J[m][i] * J[m][j]
            want = ONE if i == j else ZERO
            if acc != want:
                raise StructureError("J is not metric-compatible (<JX,JY> != <X,Y>)")

    n = n2 // 2
    vol = kaehler_volume(omega, n)
    from .multilinear import volume_coefficient

    volume_coefficient(vol)  # raises if degenerate

    S = AlmostHermitianStructure(L, omega, J, vol, name=name)
    if psi_plus is not None:
        attach_su_data(S, psi_plus)
    return S


def attach_su_data(S: AlmostHermitianStructure, psi_plus: Form):
    """Validate a complex volume form psi_+ + i psi_- with psi_- = J_(1) psi_+."""
    n = S.n
    if psi_plus.degree != n:
        raise StructureError(f"psi_plus must have degree {n}")
    try:
        psi_minus = psi_plus.to_tensor().apply_J(0, S.J).antisymmetrize_to_form()
    except GeometryError as exc:
        raise StructureError(f"J_(1) psi_plus is not a form: {exc}") from exc
    if n == 2:
        # psi+ ^ psi+ = psi- ^ psi- = -2 Vol and psi+ ^ psi- = 0
        want = S.vol.scaled(Scalar.rational(-2))
        if psi_plus.wedge(psi_plus) != want or psi_minus.wedge(psi_minus) != want:
            raise StructureError("psi_plus fails the volume relation psi^2 = -2 Vol")
        if not psi_plus.wedge(psi_minus).is_zero():
            raise StructureError("psi_plus ^ psi_minus must vanish")
    elif n == 3:
        if psi_plus.wedge(psi_minus).scaled(Scalar.rational(Fraction(-1, 4))) != S.vol:
            raise StructureError("psi fails the volume relation -1/4 psi+ ^ psi- = Vol")
    else:
        raise StructureError("SU data is supported for n = 2 and n = 3 only")
    S.psi_plus = psi_plus
    S.psi_minus = psi_minus


class Connection:
    """Metric-frame connection coefficients Gamma_ijk = <D_{e_i} e_j, e_k>."""

    def __init__(self, dim: int, gamma: Tensor, kind: str = "custom"):
        if gamma.rank != 3 or gamma.dim != dim:
            raise StructureError("connection coefficients must form a rank-3 tensor")
        self.dim = dim
        self.gamma = gamma
        self.kind = kind

    def g(self, i: int, j: int, k: int) -> Scalar:
        return self.gamma(i, j, k)

    def is_metric(self) -> bool:
        return self.gamma.is_antisymmetric_pair(1, 2)

    def derive_vector(self, i: int, v: Sequence[Scalar]) -> List[Scalar]:
        """D_{e_i} of an invariant vector field with constant components."""
        out = [ZERO] * self.dim
        for j in range(self.dim):
            if v[j].is_zero():
                continue
            for k in range(self.dim):
                w = self.gamma(i, j, k)
                if not w.is_zero():
                    out[k] = out[k] + v[j] * w
        return out

    def torsion(self, L: LieAlgebra) -> Tensor:
        """T_ijk = <D_{e_i} e_j - D_{e_j} e_i - [e_i, e_j], e_k>."""
        t = Tensor(self.dim, 3)
        for (i, j, k), v in self.gamma.coeffs.items():
            t.add_to((i, j, k), v)
            t.add_to((j, i, k), -v)
        for i in range(self.dim):
            for j in range(i + 1, self.dim):
                for k, v in L.bracket(i, j).items():
                    t.add_to((i, j, k), -v)
                    t.add_to((j, i, k), v)
        return t

    def covariant_derivative(self, t: Tensor) -> Tensor:
        """(Dt)_{i, j_1..j_s} for an invariant covariant tensor (constant components)."""
        # (Dt)_{i,K} = -sum_a sum_m Gamma_{i, K_a, m} t_{K[a -> m]}, scattered from
        # each stored entry of t.
        out = Tensor(self.dim, t.rank + 1)
        for i in range(self.dim):
            for idx, v in t.coeffs.items():
                for slot in range(t.rank):
                    m = idx[slot]
                    for j in range(self.dim):
                        g = self.gamma(i, j, m)
                        if g.is_zero():
                            continue
                        target = idx[:slot] + (j,) + idx[slot + 1 :]
                        out.add_to((i,) + target, -(g * v))
        return out

    def derive_endomorphism(self, A: Matrix) -> List[Matrix]:
        """(D_{e_i} A)^k_j for an invariant endomorphism; list indexed by i."""
        n = self.dim
        result = []
        for i in range(n):
            mat: Matrix = [[ZERO] * n for _ in range(n)]
            for j in range(n):
                for k in range(n):
                    acc = ZERO
                    for m in range(n):
                        acc = acc + A[m][j] * self.gamma(i, m, k)
                        acc = acc - self.gamma(i, j, m) * A[k][m]
                    mat[k][j] = acc
            result.append(mat)
        return result


def nijenhuis(S: AlmostHermitianStructure) -> Tensor:
    """N(X, Y) = [X, Y] + J[JX, Y] + J[X, JY] - [JX, JY], as N_ijk = <N(e_i,e_j), e_k>."""
    n = S.L.dim
    out = Tensor(n, 3)
    basis = [[ONE if a == b else ZERO for a in range(n)] for b in range(n)]
    for i in range(n):
        Ji = [S.J[a][i] for a in range(n)]
        for j in range(i + 1, n):
            Jj = [S.J[a][j] for a in range(n)]
            term = S.L.bracket_vectors(basis[i], basis[j])
            term2 = S.J_vec(S.L.bracket_vectors(Ji, basis[j]))
            term3 = S.J_vec(S.L.bracket_vectors(basis[i], Jj))
            term4 = S.L.bracket_vectors(Ji, Jj)
            for k in range(n):
                v = term[k] + term2[k] + term3[k] - term4[k]
                if not v.is_zero():
                    out.set((i, j, k), v)
                    out.set((j, i, k), -v)
    return out


def levi_civita(S: AlmostHermitianStructure) -> Connection:
    """Koszul in an orthonormal invariant frame:
    2 Gamma_ijk = c_ijk - c_jki + c_kij with c_ijk = <[e_i, e_j], e_k>."""
    n = S.L.dim
    half = Scalar.rational(Fraction(1, 2))
    gamma = Tensor(n, 3)
    for i in range(n):
        for j in range(n):
            for k in range(n):
                v = S.L.c(i, j, k) - S.L.c(j, k, i) + S.L.c(k, i, j)
                if not v.is_zero():
                    gamma.set((i, j, k), half * v)
    conn = Connection(n, gamma, kind="levi_civita")
    if not conn.is_metric():
        raise StructureError("Levi-Civita output is not metric")  # pragma: no cover
    if not conn.torsion(S.L).is_zero():
        raise StructureError("Levi-Civita output is not torsion-free")  # pragma: no cover
    return conn


def intrinsic_torsion(S: AlmostHermitianStructure, nabla: Connection) -> Tensor:
    """xi_X = -1/2 J (nabla_X J), as the 3-tensor xi_ijk = <xi_{e_i} e_j, e_k>."""
    if nabla.kind != "levi_civita":
        raise StructureError("intrinsic torsion must be taken from Levi-Civita")
    n = S.L.dim
    dJ = nabla.derive_endomorphism(S.J)
    half = Scalar.rational(Fraction(-1, 2))
    xi = Tensor(n, 3)
    for i in range(n):
        A = dJ[i]
        for j in range(n):
            for k in range(n):
                acc = ZERO
                for m in range(n):
                    if not A[m][j].is_zero() and not S.J[k][m].is_zero():
                        acc = acc + S.J[k][m] * A[m][j]
                if not acc.is_zero():
                    xi.set((i, j, k), half * acc)
    return xi


def check_torsion_tensor(S: AlmostHermitianStructure, xi: Tensor) -> Optional[str]:
    """Both membership invariants of an intrinsic-torsion tensor; None when fine."""
    if not xi.is_antisymmetric_pair(1, 2):
        return "xi_ijk is not antisymmetric in the last two slots"
    # J xi_X Y + xi_X (JY) = 0  <=>  sum_m xi_ijm J_km + xi_imk J_mj = 0
    n = S.L.dim
    for i in range(n):
        for j in range(n):
            for k in range(n):
                acc = ZERO
                for m in range(n):
                    acc = acc + xi(i, j, m) * S.J[k][m] + S.J[m][j] * xi(i, m, k)
                if not acc.is_zero():
                    return "xi does not anticommute with J in the target slot"
    return None


def minimal_connection(
    S: AlmostHermitianStructure, nabla: Connection, xi: Tensor
) -> Connection:
    conn = Connection(S.L.dim, nabla.gamma + xi, kind="minimal")
    omega_t = S.omega.to_tensor()
    if not conn.covariant_derivative(omega_t).is_zero():
        raise StructureError("minimal connection fails to annihilate omega")
    if not conn.is_metric():
        raise StructureError("minimal connection fails metricity")
    return conn


def chern_connection(
    S: AlmostHermitianStructure, nabla: Connection, xi: Tensor
) -> Tuple[Connection, bool]:
    """Chern connection nabla + xi^h; flag says whether it is a U(n)-connection."""
    n = S.L.dim
    xih = Tensor(n, 3)
    for i in range(n):
        for j in range(n):
            for k in range(n):
                v = xi(i, j, k) + xi(j, i, k) - xi(k, i, j)
                if not v.is_zero():
                    xih.set((i, j, k), v)
    conn = Connection(n, nabla.gamma + xih, kind="chern")
    dJ = conn.derive_endomorphism(S.J)
    is_unitary = all(
        all(all(entry.is_zero() for entry in row) for row in mat) for mat in dJ
    ) and conn.is_metric()
    return conn, is_unitary
