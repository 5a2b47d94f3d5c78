"""Type decomposition of the intrinsic torsion and U(n)-splits of small tensors.

Everything here is linear algebra over the exact scalar ring: eigenspace
projections for the four torsion classes, the Lee form by two independent
routes, and the J-eigenspace splits of 2-forms and bilinear forms that the
curvature identities are phrased in.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Dict, List, Optional, Tuple

from .multilinear import Form, Tensor, codifferential, exterior_derivative, form_inner
from .scalars import ONE, ZERO, Fraction, Scalar, format_scalar, rational_roots
from .structure import AlmostHermitianStructure, Connection, StructureError


class DecompositionError(StructureError):
    pass


# -- Lee form ---------------------------------------------------------------


def lee_form(S: AlmostHermitianStructure, xi: Tensor) -> Form:
    """theta = -(1/(n-1)) J d*omega, cross-checked against the torsion trace.

    The trace route uses sum_i (xi_{e_i} e_i)^flat = ((n-1)/2) theta.  Both
    routes must agree exactly; a mismatch means a sign convention is broken
    somewhere upstream, which is worth a hard stop rather than bad output.
    """
    n = S.n
    if n < 2:
        raise DecompositionError("the Lee form needs dimension at least 4")
    dstar = codifferential(S.L, S.omega, S.vol)
    inv = Scalar.rational(Fraction(-1, n - 1))
    theta = S.J_oneform(dstar).scaled(inv)

    two = Scalar.rational(Fraction(2, n - 1))
    dim = S.L.dim
    trace = Form(dim, 1)
    for k in range(dim):
        acc = sum((xi(i, i, k) for i in range(dim)), ZERO)
        if not acc.is_zero():
            trace.coeffs[(k,)] = two * acc
    if theta != trace:
        raise DecompositionError(
            "Lee form routes disagree: "
            f"codifferential gives {sorted(theta.coeffs.items())}, "
            f"torsion trace gives {sorted(trace.coeffs.items())}"
        )
    return theta


# -- Gray-Hervella split ----------------------------------------------------


def _t_involution(S: AlmostHermitianStructure, xi: Tensor) -> Tensor:
    """(T xi)_X Y = -J xi_{JX} Y; the +1 eigenspace is the Hermitian half."""
    dim = S.L.dim
    out = Tensor(dim, 3)
    for (l, j, m), v in xi.coeffs.items():
        for i in range(dim):
            a = S.J[l][i]
            if a.is_zero():
                continue
            for k in range(dim):
                b = S.J[m][k]
                if not b.is_zero():
                    out.add_to((i, j, k), a * b * v)
    return out


def _xi4_tensor(S: AlmostHermitianStructure, theta: Form) -> Tensor:
    """Closed-form W4 component:

    4 xi_(4)X Y = <X,Y> theta# - theta(Y) X - <JX,Y> J theta# + (J theta)(Y) JX.
    """
    dim = S.L.dim
    th = [theta.coeffs.get((k,), ZERO) for k in range(dim)]
    jth_form = S.J_oneform(theta)
    jth = [jth_form.coeffs.get((k,), ZERO) for k in range(dim)]
    quarter = Scalar.rational(Fraction(1, 4))
    out = Tensor(dim, 3)
    for i in range(dim):
        for j in range(dim):
            gij = ONE if i == j else ZERO
            kij = S.J[j][i]  # <J e_i, e_j>
            for k in range(dim):
                gik = ONE if i == k else ZERO
                kik = S.J[k][i]
                v = gij * th[k] - th[j] * gik - kij * jth[k] + jth[j] * kik
                if not v.is_zero():
                    out.set((i, j, k), quarter * v)
    return out


def _cyclic_part(t: Tensor) -> Tensor:
    third = Scalar.rational(Fraction(1, 3))
    out = Tensor(t.dim, 3)
    for i in range(t.dim):
        for j in range(t.dim):
            for k in range(t.dim):
                v = t(i, j, k) + t(j, k, i) + t(k, i, j)
                if not v.is_zero():
                    out.set((i, j, k), third * v)
    return out


@dataclass
class TorsionDecomposition:
    xi1: Tensor
    xi2: Tensor
    xi3: Tensor
    xi4: Tensor
    theta: Form
    norms: Dict[str, Scalar]

    def parts(self) -> List[Tuple[str, Tensor]]:
        return [("W1", self.xi1), ("W2", self.xi2), ("W3", self.xi3), ("W4", self.xi4)]


def split_torsion(
    S: AlmostHermitianStructure, xi: Tensor, theta: Form
) -> TorsionDecomposition:
    """Split xi into the four irreducible pieces and verify the split."""
    from .structure import check_torsion_tensor

    half = Scalar.rational(Fraction(1, 2))
    t_xi = _t_involution(S, xi)
    plus = (xi + t_xi).scaled(half)
    minus = (xi - t_xi).scaled(half)

    xi4 = _xi4_tensor(S, theta)
    xi3 = plus - xi4
    xi1 = _cyclic_part(minus)
    xi2 = minus - xi1

    dec = TorsionDecomposition(
        xi1,
        xi2,
        xi3,
        xi4,
        theta,
        norms={
            "W1": xi1.inner(xi1),
            "W2": xi2.inner(xi2),
            "W3": xi3.inner(xi3),
            "W4": xi4.inner(xi4),
        },
    )

    # Structural checks: reconstruction, membership, pairwise orthogonality,
    # and the degenerate classes in dimension four.
    if xi1 + xi2 + xi3 + xi4 != xi:
        raise DecompositionError("torsion components do not sum back to xi")
    for label, part in dec.parts():
        msg = check_torsion_tensor(S, part)
        if msg is not None:
            raise DecompositionError(f"component {label}: {msg}")
    labelled = dec.parts()
    for a in range(4):
        for b in range(a + 1, 4):
            if not labelled[a][1].inner(labelled[b][1]).is_zero():
                raise DecompositionError(
                    f"components {labelled[a][0]} and {labelled[b][0]} "
                    "are not orthogonal"
                )
    if S.n == 2 and (not xi1.is_zero() or not xi3.is_zero()):
        raise DecompositionError("W1 and W3 must vanish in dimension four")
    return dec


@dataclass
class GHClass:
    nonzero: Tuple[str, ...]
    label: str
    special_parameters: Dict[str, List[Fraction]]


_NAMED = {
    (): "Kaehler",
    ("W1",): "nearly Kaehler",
    ("W2",): "almost Kaehler",
    ("W3",): "balanced Hermitian",
    ("W4",): "locally conformal Kaehler",
    ("W3", "W4"): "Hermitian",
    ("W1", "W2"): "quasi-Kaehler",
}


def classify(dec: TorsionDecomposition) -> GHClass:
    nonzero = tuple(label for label, part in dec.parts() if not part.is_zero())
    label = _NAMED.get(nonzero)
    if label is None:
        label = " + ".join(nonzero)
        if "W1" not in nonzero and "W2" not in nonzero:
            label += " (Hermitian)"
    # Parameter values at which a nonzero component degenerates: roots of the
    # squared-norm polynomials.  Only rational roots can occur for a sum of
    # squares with rational data, so the exact listing is complete.
    special: Dict[str, List[Fraction]] = {}
    for name, norm in dec.norms.items():
        if norm.is_zero():
            continue
        roots = rational_roots(norm)
        if roots:
            for r in roots:
                special.setdefault(format_scalar(Scalar.rational(r)), []).append(name)
    merged = {k: sorted(v) for k, v in special.items()}
    return GHClass(nonzero, label, merged)


# -- U(n)-splits of 2-forms and bilinear forms ------------------------------


@dataclass
class TwoFormSplit:
    r_omega_part: Form
    lambda0_part: Form
    lambda20_part: Form

    def pieces(self) -> List[Tuple[str, Form]]:
        return [
            ("R omega", self.r_omega_part),
            ("lambda_0^{1,1}", self.lambda0_part),
            ("[[lambda^{2,0}]]", self.lambda20_part),
        ]


def split_two_form(S: AlmostHermitianStructure, alpha: Form) -> TwoFormSplit:
    if alpha.degree != 2:
        raise DecompositionError("split_two_form expects a 2-form")
    half = Scalar.rational(Fraction(1, 2))
    rotated = S.rotate_two_form(alpha)
    invariant = (alpha + rotated).scaled(half)
    anti = (alpha - rotated).scaled(half)
    trace = form_inner(alpha, S.omega) * Scalar.rational(Fraction(1, S.n))
    r_part = S.omega.scaled(trace)
    lam0 = invariant - r_part
    if r_part + lam0 + anti != alpha:
        raise DecompositionError("2-form split lost mass")  # pragma: no cover
    return TwoFormSplit(r_part, lam0, anti)


@dataclass
class BilinearSplit:
    trace_part: Tensor
    sym_invariant_part: Tensor  # [lambda_0^{1,1}] as a symmetric tensor
    sym_anti_part: Tensor  # [[sigma^{2,0}]]
    skew_invariant_part: Tensor  # [lambda^{1,1}] as a 2-form-shaped tensor
    skew_anti_part: Tensor  # [[lambda^{2,0}]]


def split_bilinear(S: AlmostHermitianStructure, b: Tensor) -> BilinearSplit:
    """Full U(n)-split of a rank-2 tensor (not necessarily symmetric)."""
    if b.rank != 2:
        raise DecompositionError("split_bilinear expects a rank-2 tensor")
    dim = S.L.dim
    half = Scalar.rational(Fraction(1, 2))
    flipped = b.transpose((1, 0))
    sym = (b + flipped).scaled(half)
    skew = (b - flipped).scaled(half)

    sym_rot = S.rotate_bilinear(sym)
    sym_inv = (sym + sym_rot).scaled(half)
    sym_anti = (sym - sym_rot).scaled(half)
    tr = sum((sym_inv(i, i) for i in range(dim)), ZERO)
    trace_part = Tensor(dim, 2)
    coeff = tr * Scalar.rational(Fraction(1, dim))
    if not coeff.is_zero():
        for i in range(dim):
            trace_part.set((i, i), coeff)
    sym_inv0 = sym_inv - trace_part

    skew_rot = S.rotate_bilinear(skew)
    skew_inv = (skew + skew_rot).scaled(half)
    skew_anti = (skew - skew_rot).scaled(half)
    return BilinearSplit(trace_part, sym_inv0, sym_anti, skew_inv, skew_anti)


def split_symmetric(
    S: AlmostHermitianStructure, b: Tensor
) -> Tuple[Tensor, Tensor, Tensor]:
    """(trace part, J-invariant traceless part, J-anti-invariant part)."""
    if b != b.transpose((1, 0)):
        raise DecompositionError("split_symmetric expects a symmetric tensor")
    full = split_bilinear(S, b)
    return full.trace_part, full.sym_invariant_part, full.sym_anti_part


def two_form_to_bilinear(alpha: Form) -> Tensor:
    return alpha.to_tensor()


# -- dtheta and the three displayed component identities ---------------------


def contract_trace_vector(xi_part: Tensor) -> List[Scalar]:
    """sum_i xi_{e_i} e_i as a component vector."""
    dim = xi_part.dim
    return [sum((xi_part(i, i, k) for i in range(dim)), ZERO) for k in range(dim)]


def pair_vectors(u: List[Scalar], v: List[Scalar]) -> Scalar:
    return sum((a * b for a, b in zip(u, v)), ZERO)


@dataclass
class DThetaReport:
    dtheta: Form
    split: TwoFormSplit
    trivial_at_n2: bool
    lambda0_residual: Optional[Tensor]
    lambda20_residual: Optional[Tensor]


def _div_trace(Dxi: Tensor, j: int, k: int, dim: int) -> Scalar:
    """sum_i <(nabla^{U(n)}_{e_i} xi_part)_X Y, e_i> at X = e_j, Y = e_k."""
    return sum((Dxi(i, j, k, i) for i in range(dim)), ZERO)


def _trace_slot(Dxi: Tensor, j: int, k: int, dim: int) -> Scalar:
    """sum_i <(nabla^{U(n)}_{e_i} xi_part)_{e_i} X, Y> at X = e_j, Y = e_k."""
    return sum((Dxi(i, i, j, k) for i in range(dim)), ZERO)


def _pair_xi(a: Tensor, b: Tensor, j: int, k: int, dim: int) -> Scalar:
    """<a_X e_i, b_Y e_i> summed over i, at X = e_j, Y = e_k."""
    acc = ZERO
    for (x, i, m), v in a.coeffs.items():
        if x != j:
            continue
        w = b(k, i, m)
        if not w.is_zero():
            acc = acc + v * w
    return acc


def _xi_at_vector(xi_part: Tensor, vec: List[Scalar], j: int, k: int) -> Scalar:
    """<xi_part_{vec} e_j, e_k>."""
    return sum(
        (vec[t] * xi_part(t, j, k) for t in range(len(vec)) if not vec[t].is_zero()),
        ZERO,
    )


def dtheta_report(
    S: AlmostHermitianStructure,
    theta: Form,
    dec: TorsionDecomposition,
    minimal: Connection,
) -> DThetaReport:
    """Components of dtheta and the two torsion-side expressions for them.

    The R-omega component must vanish on every structure; this is asserted
    here, in the pipeline, not only in tests.  For n = 2 the two displayed
    right sides carry the factor (n-2)/2 = 0 and the report flags them
    trivial instead of dividing by zero.
    """
    dim = S.L.dim
    n = S.n
    dtheta = exterior_derivative(S.L, theta)
    split = split_two_form(S, dtheta)
    if not split.r_omega_part.is_zero():
        raise DecompositionError(
            "the R omega component of dtheta must vanish identically"
        )

    theta_sharp = [theta.coeffs.get((k,), ZERO) for k in range(dim)]
    Dxi1 = minimal.covariant_derivative(dec.xi1)
    Dxi3 = minimal.covariant_derivative(dec.xi3)

    half_nm2 = Scalar.rational(Fraction(n - 2, 2))
    lam0_res = Tensor(dim, 2)
    lam20_res = Tensor(dim, 2)
    lam0_t = split.lambda0_part.to_tensor()
    lam20_t = split.lambda20_part.to_tensor()
    for j in range(dim):
        for k in range(dim):
            # [lambda_0^{1,1}] identity of the dtheta proposition
            rhs = -_div_trace(Dxi3, j, k, dim) + _div_trace(Dxi3, k, j, dim)
            xi3_jk = sum(
                (
                    (dec.xi3(j, k, t) - dec.xi3(k, j, t)) * theta_sharp[t]
                    for t in range(dim)
                ),
                ZERO,
            )
            rhs = rhs + half_nm2 * xi3_jk
            cross = _pair_xi(dec.xi1, dec.xi2, j, k, dim)
            cross_rev = _pair_xi(dec.xi1, dec.xi2, k, j, dim)
            rhs = rhs + Scalar.rational(Fraction(-3, 2)) * cross
            rhs = rhs + Scalar.rational(Fraction(3, 2)) * cross_rev
            v = half_nm2 * lam0_t(j, k) - rhs
            if not v.is_zero():
                lam0_res.set((j, k), v)

            # [[lambda^{2,0}]] identity
            rhs2 = (
                Scalar.rational(-3) * _trace_slot(Dxi1, j, k, dim)
                + _trace_slot(Dxi3, j, k, dim)
                + _pair_xi(dec.xi3, dec.xi1, j, k, dim)
                - _pair_xi(dec.xi3, dec.xi1, k, j, dim)
                - Scalar.rational(Fraction(1, 2)) * _pair_xi(dec.xi3, dec.xi2, j, k, dim)
                + Scalar.rational(Fraction(1, 2)) * _pair_xi(dec.xi3, dec.xi2, k, j, dim)
            )
            rhs2 = rhs2 + Scalar.rational(
                Fraction(3 * (n - 3), 2)
            ) * _xi_at_vector(dec.xi1, theta_sharp, j, k)
            rhs2 = rhs2 - Scalar.rational(Fraction(n - 1, 2)) * _xi_at_vector(
                dec.xi3, theta_sharp, j, k
            )
            v2 = half_nm2 * lam20_t(j, k) - rhs2
            if not v2.is_zero():
                lam20_res.set((j, k), v2)

    trivial = n == 2
    return DThetaReport(
        dtheta,
        split,
        trivial,
        None if trivial else lam0_res,
        None if trivial else lam20_res,
    )


# -- characterization helpers ------------------------------------------------


def domega_from_torsion(S: AlmostHermitianStructure, xi: Tensor) -> Form:
    """Reconstruct d omega from 1/2 domega(Y,Z,W) = <xi_Y Z, JW> + cyclic."""
    dim = S.L.dim
    out = Form(dim, 3)
    two = Scalar.rational(2)
    for idx in itertools.combinations(range(dim), 3):
        y, z, w = idx
        acc = ZERO
        for (a, b, c) in ((y, z, w), (w, y, z), (z, w, y)):
            for m in range(dim):
                v = xi(a, b, m)
                if not v.is_zero():
                    acc = acc + v * S.J[m][c]
        if not acc.is_zero():
            out.coeffs[idx] = two * acc
    return out
