"""Curvature of the natural connections and its U(n)-decomposition.

The curvature operator convention is R(X, Y) = D_[X,Y] - [D_X, D_Y], so that
Ric(X, Y) = <R(X, e_i) Y, e_i> is the usual Ricci tensor (negative on the
solvable examples).  All three natural connections (Levi-Civita, minimal and
Chern) are handled by the same routines.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Dict, Optional, Tuple

from .decomposition import (
    BilinearSplit,
    DThetaReport,
    GHClass,
    TorsionDecomposition,
    classify,
    dtheta_report,
    lee_form,
    split_bilinear,
    split_torsion,
    split_two_form,
    TwoFormSplit,
)
from .multilinear import (
    Form,
    LieAlgebra,
    Tensor,
    codifferential,
    exterior_derivative,
    form_inner,
    hodge_star,
)
from .scalars import ONE, ZERO, Fraction, Scalar, scalar_sqrt
from .structure import (
    AlmostHermitianStructure,
    Connection,
    StructureError,
    attach_su_data,
    chern_connection,
    intrinsic_torsion,
    levi_civita,
    minimal_connection,
    nijenhuis,
)


class CurvatureError(StructureError):
    pass


def riemann(L: LieAlgebra, conn: Connection) -> Tensor:
    """Rm_ijkl = <R(e_i, e_j) e_k, e_l> for an invariant metric connection.

    On invariant fields R(X, Y) = D_[X,Y] - [D_X, D_Y] reduces to structure
    constants against connection coefficients.  The skew symmetries in both
    index pairs are asserted; they are cheap and catch bad input connections.
    """
    n = L.dim
    Rm = Tensor(n, 4)
    for i in range(n):
        for j in range(i + 1, n):
            br = L.bracket(i, j)
            for k in range(n):
                for l in range(n):
                    acc = sum((v * conn.g(m, k, l) for m, v in br.items()), ZERO)
                    for m in range(n):
                        acc = acc - conn.g(j, k, m) * conn.g(i, m, l)
                        acc = acc + conn.g(i, k, m) * conn.g(j, m, l)
                    if not acc.is_zero():
                        Rm.set((i, j, k, l), acc)
                        Rm.set((j, i, k, l), -acc)
    if not Rm.is_antisymmetric_pair(2, 3):
        raise CurvatureError("curvature of a metric connection must be skew in (k, l)")
    if conn.kind == "levi_civita":
        if Rm != Rm.transpose((2, 3, 0, 1)):
            raise CurvatureError("Levi-Civita curvature lost pair symmetry")
        for i in range(n):
            for j in range(i + 1, n):
                for k in range(j + 1, n):
                    for l in range(n):
                        v = Rm(i, j, k, l) + Rm(j, k, i, l) + Rm(k, i, j, l)
                        if not v.is_zero():
                            raise CurvatureError(
                                "Levi-Civita curvature fails the first Bianchi identity"
                            )
    return Rm


def ricci_pair(S: AlmostHermitianStructure, Rm: Tensor) -> Tuple[Tensor, Tensor]:
    """(Ric, Ric*) with Ric*(X, Y) = <R(X, e_i) JY, Je_i>."""
    dim = S.L.dim
    ric = Tensor(dim, 2)
    star = Tensor(dim, 2)
    for j in range(dim):
        for k in range(dim):
            a = sum((Rm(j, i, k, i) for i in range(dim)), ZERO)
            if not a.is_zero():
                ric.set((j, k), a)
    # Ric* scattered from the stored curvature entries
    for (j, i, m, l), v in Rm.coeffs.items():
        for k in range(dim):
            w = S.J[m][k]
            if w.is_zero():
                continue
            u = S.J[l][i]
            if not u.is_zero():
                star.add_to((j, k), v * w * u)
    return ric, star


def trace(b: Tensor) -> Scalar:
    return sum((b(i, i) for i in range(b.dim)), ZERO)


def ricci_form(S: AlmostHermitianStructure, Rm: Tensor) -> Form:
    """rho_D(X, Y) = -1/2 <R_D(e_i, Je_i) X, Y>."""
    dim = S.L.dim
    half = Scalar.rational(Fraction(-1, 2))
    out = Tensor(dim, 2)
    for (i, m, j, k), v in Rm.coeffs.items():
        w = S.J[m][i]
        if not w.is_zero():
            out.add_to((j, k), half * w * v)
    return out.antisymmetrize_to_form()


def transposed_ricci_form(S: AlmostHermitianStructure, Rm: Tensor) -> Form:
    """r_D(X, Y) = -1/2 <R_D(X, Y) e_i, Je_i>."""
    dim = S.L.dim
    half = Scalar.rational(Fraction(-1, 2))
    out = Tensor(dim, 2)
    for (j, k, i, m), v in Rm.coeffs.items():
        w = S.J[m][i]
        if not w.is_zero():
            out.add_to((j, k), half * w * v)
    return out.antisymmetrize_to_form()


def evaluate_on_J(S: AlmostHermitianStructure, b: Tensor) -> Tensor:
    """(X, Y) -> b(X, JY)."""
    dim = S.L.dim
    out = Tensor(dim, 2)
    for (j, m), v in b.coeffs.items():
        for k in range(dim):
            w = S.J[m][k]
            if not w.is_zero():
                out.add_to((j, k), v * w)
    return out


def form_to_tensor(alpha: Form) -> Tensor:
    return alpha.to_tensor()


@dataclass
class ConnectionCurvature:
    connection: Connection
    Rm: Tensor
    rho: Form
    r: Form


def connection_curvature(
    S: AlmostHermitianStructure, conn: Connection
) -> ConnectionCurvature:
    Rm = riemann(S.L, conn)
    return ConnectionCurvature(conn, Rm, ricci_form(S, Rm), transposed_ricci_form(S, Rm))


@dataclass
class CurvatureReport:
    Rm: Tensor
    ric: Tensor
    ric_star: Tensor
    s: Scalar
    s_star: Scalar
    s_from_torsion: Scalar
    s_star_from_torsion: Scalar
    rho: Form  # Ricci form of Levi-Civita
    r: Form
    minimal: ConnectionCurvature
    chern: Optional[ConnectionCurvature]
    chern_is_unitary: bool
    diff_split: BilinearSplit  # Ric - Ric*
    comb_split: BilinearSplit  # Ric + 3 Ric*
    ric_split: BilinearSplit
    ric_star_split: BilinearSplit
    dstar_theta: Scalar
    theta_norm2: Scalar


def norm2(t: Tensor) -> Scalar:
    return t.inner(t)


def scalar_curvatures_from_torsion(
    S: AlmostHermitianStructure,
    dec: TorsionDecomposition,
    r_minimal: Form,
    dstar_theta: Scalar,
) -> Tuple[Scalar, Scalar]:
    """The closed formulas for s and s* through the minimal connection.

    s  = 2<r, w> + 2(n-1) d*theta + (2n-3)(n-1)/2 |theta|^2
         + 5|xi1|^2 - |xi2|^2 - |xi3|^2
    s* = 2<r, w> - (n-1)/2 |theta|^2 + |xi1|^2 + |xi2|^2 - |xi3|^2

    The norms carry plain constants because the torsion-squared trace behind
    them is 2<q, w> = |xi1|^2 + |xi2|^2 - |xi3|^2 - |xi4|^2 together with
    |xi4|^2 = (n-1)/2 |theta|^2; both are checked by the identity audit.
    """
    n = S.n
    rw = form_inner(r_minimal, S.omega)
    tn = form_inner(dec.theta, dec.theta)
    n1, n2_, n3 = dec.norms["W1"], dec.norms["W2"], dec.norms["W3"]
    s = (
        Scalar.rational(2) * rw
        + Scalar.rational(2 * (n - 1)) * dstar_theta
        + Scalar.rational(Fraction((2 * n - 3) * (n - 1), 2)) * tn
        + Scalar.rational(5) * n1
        - n2_
        - n3
    )
    s_star = (
        Scalar.rational(2) * rw
        - Scalar.rational(Fraction(n - 1, 2)) * tn
        + n1
        + n2_
        - n3
    )
    return s, s_star


def chern_ricci_forms(
    S: AlmostHermitianStructure, chern: Optional[ConnectionCurvature]
) -> Tuple[Form, Form]:
    if chern is None:
        raise CurvatureError("Chern connection not unitary")
    return chern.rho, chern.r


def curvature_report(
    S: AlmostHermitianStructure,
    nabla: Connection,
    minimal: Connection,
    dec: TorsionDecomposition,
) -> CurvatureReport:
    Rm = riemann(S.L, nabla)
    ric, ric_star = ricci_pair(S, Rm)
    s = trace(ric)
    s_star = trace(ric_star)
    min_cc = connection_curvature(S, minimal)

    xi = dec.xi1 + dec.xi2 + dec.xi3 + dec.xi4
    chern_conn, unitary = chern_connection(S, nabla, xi)
    chern_cc = connection_curvature(S, chern_conn) if unitary else None

    dstar_theta_form = codifferential(S.L, dec.theta, S.vol)
    dstar_theta = dstar_theta_form.coeffs.get((), ZERO)
    theta_norm2 = form_inner(dec.theta, dec.theta)
    s_t, s_star_t = scalar_curvatures_from_torsion(S, dec, min_cc.r, dstar_theta)

    diff = ric - ric_star
    comb = ric + ric_star.scaled(Scalar.rational(3))
    return CurvatureReport(
        Rm=Rm,
        ric=ric,
        ric_star=ric_star,
        s=s,
        s_star=s_star,
        s_from_torsion=s_t,
        s_star_from_torsion=s_star_t,
        rho=ricci_form(S, Rm),
        r=transposed_ricci_form(S, Rm),
        minimal=min_cc,
        chern=chern_cc,
        chern_is_unitary=unitary,
        diff_split=split_bilinear(S, diff),
        comb_split=split_bilinear(S, comb),
        ric_split=split_bilinear(S, ric),
        ric_star_split=split_bilinear(S, ric_star),
        dstar_theta=dstar_theta,
        theta_norm2=theta_norm2,
    )


# -- SU refinement ------------------------------------------------------------


def three_form_pure_part(S: AlmostHermitianStructure, alpha: Form) -> Form:
    """[[lambda^{3,0}]] part: 1/4 (alpha - sum over slot pairs of alpha(J., J.))."""
    if alpha.degree != 3:
        raise CurvatureError("pure-part projection expects a 3-form")
    t = alpha.to_tensor()
    acc = t
    for a, b in ((0, 1), (0, 2), (1, 2)):
        acc = acc - t.apply_J(a, S.J).apply_J(b, S.J)
    return acc.scaled(Scalar.rational(Fraction(1, 4))).antisymmetrize_to_form()


@dataclass
class SURefinement:
    psi_plus: Form
    psi_minus: Form
    w1_plus: Scalar
    eta: Form
    eta_hat: Form
    auto_built: bool


def su_refinement(
    S: AlmostHermitianStructure, theta: Form
) -> Optional[SURefinement]:
    """eta and the function w1+ of the SU(n)-refined structure, n = 2 or 3.

    When psi_plus was not supplied and n = 3, a complex volume form is built
    from the pure part of d omega whenever that part is nonzero and its norm
    has a square root in the scalar ring.  Returns None when no SU data is
    available.
    """
    n = S.n
    auto = False
    if S.psi_plus is None:
        if n != 3:
            return None
        domega = exterior_derivative(S.L, S.omega)
        pure = three_form_pure_part(S, domega)
        if pure.is_zero():
            return None
        norm = scalar_sqrt(form_inner(pure, pure))
        if norm is None:
            return None
        # d omega = 3 w1+ psi+ + ... with |psi+|^2 = 4, so |pure| = 6 w1+
        w1p = norm * Scalar.rational(Fraction(1, 6))
        psi_plus = pure.scaled(ONE / (Scalar.rational(3) * w1p))
        attach_su_data(S, psi_plus)
        auto = True
    psi_plus = S.psi_plus
    psi_minus = S.psi_minus
    assert psi_plus is not None and psi_minus is not None

    if n == 3:
        w1p = form_inner(exterior_derivative(S.L, S.omega), psi_plus) * Scalar.rational(
            Fraction(1, 12)
        )
    else:
        w1p = ZERO

    sum_form = Form(S.L.dim, 1)
    for psi in (psi_plus, psi_minus):
        dpsi = exterior_derivative(S.L, psi)
        sum_form = sum_form + hodge_star(
            hodge_star(dpsi, S.vol).wedge(psi), S.vol
        )
    if n == 2:
        eta = (theta + sum_form).scaled(Scalar.rational(Fraction(1, 4)))
    else:
        eta = sum_form.scaled(Scalar.rational(Fraction(1, 12))) + theta.scaled(
            Scalar.rational(Fraction(1, 3))
        )
    eta_hat = S.J_oneform(eta)
    return SURefinement(psi_plus, psi_minus, w1p, eta, eta_hat, auto)


# -- full analysis bundle ------------------------------------------------------


@dataclass
class Analysis:
    structure: AlmostHermitianStructure
    nabla: Connection
    minimal: Connection
    xi: Tensor
    nijenhuis_tensor: Tensor
    theta: Form
    torsion: TorsionDecomposition
    gh_class: GHClass
    dtheta: DThetaReport
    domega: Form
    domega_split: Dict[str, Form]
    curvature: CurvatureReport
    su: Optional[SURefinement]


def analyze(S: AlmostHermitianStructure) -> Analysis:
    """Everything the reports and the identity audit need, computed once."""
    nabla = levi_civita(S)
    xi = intrinsic_torsion(S, nabla)
    theta = lee_form(S, xi)
    dec = split_torsion(S, xi, theta)
    minimal = minimal_connection(S, nabla, xi)
    gh = classify(dec)
    rep = dtheta_report(S, theta, dec, minimal)
    domega = exterior_derivative(S.L, S.omega)
    w4_part = theta.wedge(S.omega)
    domega_split = {"W4": w4_part, "rest": domega - w4_part}
    curv = curvature_report(S, nabla, minimal, dec)
    su = su_refinement(S, theta) if S.n in (2, 3) else None
    return Analysis(
        structure=S,
        nabla=nabla,
        minimal=minimal,
        xi=xi,
        nijenhuis_tensor=nijenhuis(S),
        theta=theta,
        torsion=dec,
        gh_class=gh,
        dtheta=rep,
        domega=domega,
        domega_split=domega_split,
        curvature=curv,
        su=su,
    )
