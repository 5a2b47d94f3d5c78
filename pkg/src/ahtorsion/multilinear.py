"""Lie algebras by structure constants and exact invariant tensor calculus.

Everything is expressed in a fixed basis that is declared orthonormal for the
metric; forms are stored on strictly increasing index tuples and tensors as
dense maps from index tuples to Scalars.  Indices are 0-based internally.
"""

from __future__ import annotations

import itertools
from typing import Dict, List, Optional, Sequence, Tuple

from .scalars import ONE, ZERO, Scalar, scalar_sqrt


class GeometryError(ValueError):
    pass


def sort_with_sign(indices: Sequence[int]) -> Tuple[Tuple[int, ...], int]:
    """Sorted tuple and permutation sign; sign 0 on repeated indices."""
    idx = list(indices)
    if len(set(idx)) != len(idx):
        return tuple(sorted(idx)), 0
    sign = 1
    for i in range(len(idx)):
        for j in range(i + 1, len(idx)):
            if idx[i] > idx[j]:
                sign = -sign
    return tuple(sorted(idx)), sign


def perm_sign(perm: Sequence[int]) -> int:
    _, s = sort_with_sign(perm)
    return s


class LieAlgebra:
    """Even-dimensional Lie algebra given by structure constants.

    ``c[k][(i, j)]`` would be awkward; we store brackets as a map
    (i, j) with i < j -> {k: Scalar} so that [e_i, e_j] = sum_k c^k_ij e_k.
    """

    def __init__(
        self,
        dim: int,
        brackets: Dict[Tuple[int, int], Dict[int, Scalar]],
        basis_names: Optional[List[str]] = None,
        extension_d: int = 0,
        parameters: Sequence[str] = (),
    ):
        if dim <= 0 or dim % 2 != 0:
            raise GeometryError(f"dimension must be even and positive, got {dim}")
        self.dim = dim
        self.extension_d = extension_d
        self.parameters = tuple(parameters)
        self.basis_names = basis_names or [f"e{i+1}" for i in range(dim)]
        self._brackets: Dict[Tuple[int, int], Dict[int, Scalar]] = {}
        for (i, j), coeffs in brackets.items():
            if not (0 <= i < dim and 0 <= j < dim):
                raise GeometryError(f"bracket index out of range: ({i}, {j})")
            if i == j:
                raise GeometryError(f"bracket [e_{i}, e_{i}] must vanish")
            if i > j:
                i, j, coeffs = j, i, {k: -v for k, v in coeffs.items()}
            tgt = self._brackets.setdefault((i, j), {})
            for k, v in coeffs.items():
                if not (0 <= k < dim):
                    raise GeometryError(f"bracket target out of range: {k}")
                s = tgt.get(k, ZERO) + v
                if s.is_zero():
                    tgt.pop(k, None)
                else:
                    tgt[k] = s

    def c(self, i: int, j: int, k: int) -> Scalar:
        """Structure constant c^k_ij."""
        if i == j:
            return ZERO
        if i < j:
            return self._brackets.get((i, j), {}).get(k, ZERO)
        return -self._brackets.get((j, i), {}).get(k, ZERO)

    def bracket(self, i: int, j: int) -> Dict[int, Scalar]:
        """[e_i, e_j] as a sparse coefficient map."""
        if i == j:
            return {}
        if i < j:
            return dict(self._brackets.get((i, j), {}))
        return {k: -v for k, v in self._brackets.get((j, i), {}).items()}

    def bracket_vectors(self, x: Sequence[Scalar], y: Sequence[Scalar]) -> List[Scalar]:
        out = [ZERO] * self.dim
        for i in range(self.dim):
            if x[i].is_zero():
                continue
            for j in range(self.dim):
                if y[j].is_zero():
                    continue
                for k, v in self.bracket(i, j).items():
                    out[k] = out[k] + x[i] * y[j] * v
        return out

    def jacobi_check(self) -> Tuple[bool, Optional[Tuple[int, int, int, int]]]:
        """Exact Jacobi test; on failure returns the offending (i, j, k, l)."""
        n = self.dim
        for i, j, k in itertools.combinations(range(n), 3):
            acc = [ZERO] * n
            for a, b, c in ((i, j, k), (j, k, i), (k, i, j)):
                for m, v in self.bracket(a, b).items():
                    for l, w in self.bracket(m, c).items():
                        acc[l] = acc[l] + v * w
            for l in range(n):
                if not acc[l].is_zero():
                    return False, (i, j, k, l)
        return True, None


class Form:
    """Invariant p-form stored on strictly increasing index tuples."""

    def __init__(self, dim: int, degree: int, coeffs: Optional[Dict[Tuple[int, ...], Scalar]] = None):
        # degree > dim is allowed as a representation of the zero form
        if degree < 0:
            raise GeometryError(f"bad form degree {degree} in dimension {dim}")
        if degree > dim and coeffs:
            raise GeometryError(f"nonzero form of degree {degree} in dimension {dim}")
        self.dim = dim
        self.degree = degree
        self.coeffs: Dict[Tuple[int, ...], Scalar] = {}
        if coeffs:
            for idx, val in coeffs.items():
                key, sign = sort_with_sign(idx)
                if sign == 0 or val.is_zero():
                    continue
                v = val if sign == 1 else -val
                s = self.coeffs.get(key, ZERO) + v
                if s.is_zero():
                    self.coeffs.pop(key, None)
                else:
                    self.coeffs[key] = s

    @classmethod
    def basis(cls, dim: int, indices: Sequence[int], coeff: Scalar = ONE) -> "Form":
        return cls(dim, len(indices), {tuple(indices): coeff})

    def __call__(self, *indices: int) -> Scalar:
        if len(indices) != self.degree:
            raise GeometryError("wrong number of arguments for form evaluation")
        key, sign = sort_with_sign(indices)
        if sign == 0:
            return ZERO
        val = self.coeffs.get(key, ZERO)
        return val if sign == 1 else -val

    def _check_like(self, other: "Form"):
        if self.dim != other.dim or self.degree != other.degree:
            raise GeometryError("degree mismatch")

    def __add__(self, other: "Form") -> "Form":
        self._check_like(other)
        out = dict(self.coeffs)
        for k, v in other.coeffs.items():
            s = out.get(k, ZERO) + v
            if s.is_zero():
                out.pop(k, None)
            else:
                out[k] = s
        f = Form(self.dim, self.degree)
        f.coeffs = out
        return f

    def __neg__(self) -> "Form":
        f = Form(self.dim, self.degree)
        f.coeffs = {k: -v for k, v in self.coeffs.items()}
        return f

    def __sub__(self, other: "Form") -> "Form":
        return self + (-other)

    def scaled(self, s) -> "Form":
        s = s if isinstance(s, Scalar) else Scalar.rational(s)
        f = Form(self.dim, self.degree)
        if not s.is_zero():
            f.coeffs = {k: s * v for k, v in self.coeffs.items()}
        return f

    def __eq__(self, other) -> bool:
        if not isinstance(other, Form):
            return NotImplemented
        return self.dim == other.dim and self.degree == other.degree and self.coeffs == other.coeffs

    def __hash__(self):
        return hash((self.dim, self.degree, frozenset(self.coeffs.items())))

    def is_zero(self) -> bool:
        return not self.coeffs

    def wedge(self, other: "Form") -> "Form":
        if self.dim != other.dim:
            raise GeometryError("dimension mismatch in wedge")
        deg = self.degree + other.degree
        if deg > self.dim:
            return Form(self.dim, deg)
        out: Dict[Tuple[int, ...], Scalar] = {}
        for i1, v1 in self.coeffs.items():
            for i2, v2 in other.coeffs.items():
                key, sign = sort_with_sign(i1 + i2)
                if sign == 0:
                    continue
                v = v1 * v2
                if sign == -1:
                    v = -v
                s = out.get(key, ZERO) + v
                if s.is_zero():
                    out.pop(key, None)
                else:
                    out[key] = s
        f = Form(self.dim, deg)
        f.coeffs = out
        return f

    def interior(self, vector: Sequence[Scalar]) -> "Form":
        """X contracted into the first slot."""
        if self.degree == 0:
            raise GeometryError("interior product needs degree >= 1")
        out: Dict[Tuple[int, ...], Scalar] = {}
        for idx, val in self.coeffs.items():
            for pos, i in enumerate(idx):
                if vector[i].is_zero():
                    continue
                rest = idx[:pos] + idx[pos + 1 :]
                sign = -1 if pos % 2 else 1
                v = vector[i] * val
                if sign == -1:
                    v = -v
                s = out.get(rest, ZERO) + v
                if s.is_zero():
                    out.pop(rest, None)
                else:
                    out[rest] = s
        f = Form(self.dim, self.degree - 1)
        f.coeffs = out
        return f

    def to_tensor(self) -> "Tensor":
        coeffs: Dict[Tuple[int, ...], Scalar] = {}
        for key, val in self.coeffs.items():
            for perm in itertools.permutations(key):
                coeffs[perm] = val if perm_sign_of(key, perm) == 1 else -val
        return Tensor(self.dim, self.degree, coeffs)

    def evaluate_parameters(self, bindings) -> "Form":
        f = Form(self.dim, self.degree)
        for k, v in self.coeffs.items():
            ev = v.evaluate(bindings)
            if not ev.is_zero():
                f.coeffs[k] = ev
        return f

    def __repr__(self) -> str:
        from .render import format_form

        return f"Form({format_form(self)})"


def perm_sign_of(base: Sequence[int], perm: Sequence[int]) -> int:
    """Sign of the permutation carrying ``base`` to ``perm`` (both repeat-free)."""
    pos = {v: i for i, v in enumerate(base)}
    return perm_sign([pos[v] for v in perm])


class Tensor:
    """Dense covariant tensor over the fixed orthonormal basis."""

    def __init__(self, dim: int, rank: int, coeffs: Optional[Dict[Tuple[int, ...], Scalar]] = None):
        self.dim = dim
        self.rank = rank
        self.coeffs: Dict[Tuple[int, ...], Scalar] = {}
        if coeffs:
            for k, v in coeffs.items():
                if not v.is_zero():
                    self.coeffs[tuple(k)] = v

    def __call__(self, *indices: int) -> Scalar:
        if len(indices) != self.rank:
            raise GeometryError("wrong number of tensor arguments")
        return self.coeffs.get(tuple(indices), ZERO)

    def set(self, indices: Tuple[int, ...], value: Scalar):
        if value.is_zero():
            self.coeffs.pop(tuple(indices), None)
        else:
            self.coeffs[tuple(indices)] = value

    def add_to(self, indices: Tuple[int, ...], value: Scalar):
        self.set(indices, self(*indices) + value)

    def _check_like(self, other: "Tensor"):
        if self.dim != other.dim or self.rank != other.rank:
            raise GeometryError("rank mismatch")

    def __add__(self, other: "Tensor") -> "Tensor":
        self._check_like(other)
        t = Tensor(self.dim, self.rank, dict(self.coeffs))
        for k, v in other.coeffs.items():
            t.add_to(k, v)
        return t

    def __neg__(self) -> "Tensor":
        return Tensor(self.dim, self.rank, {k: -v for k, v in self.coeffs.items()})

    def __sub__(self, other: "Tensor") -> "Tensor":
        return self + (-other)

    def scaled(self, s) -> "Tensor":
        s = s if isinstance(s, Scalar) else Scalar.rational(s)
        if s.is_zero():
            return Tensor(self.dim, self.rank)
        return Tensor(self.dim, self.rank, {k: s * v for k, v in self.coeffs.items()})

    def __eq__(self, other) -> bool:
        if not isinstance(other, Tensor):
            return NotImplemented
        return self.dim == other.dim and self.rank == other.rank and self.coeffs == other.coeffs

    def is_zero(self) -> bool:
        return not self.coeffs

    def tensor(self, other: "Tensor") -> "Tensor":
        if self.dim != other.dim:
            raise GeometryError("dimension mismatch in tensor product")
        out = Tensor(self.dim, self.rank + other.rank)
        for k1, v1 in self.coeffs.items():
            for k2, v2 in other.coeffs.items():
                out.add_to(k1 + k2, v1 * v2)
        return out

    def contract(self, slot_a: int, slot_b: int) -> "Tensor":
        """Metric trace over two slots (orthonormal frame: equal indices)."""
        r = self.rank
        if not (0 <= slot_a < r and 0 <= slot_b < r) or slot_a == slot_b:
            raise GeometryError(f"invalid contraction slots ({slot_a}, {slot_b})")
        a, b = min(slot_a, slot_b), max(slot_a, slot_b)
        out = Tensor(self.dim, r - 2)
        for k, v in self.coeffs.items():
            if k[a] != k[b]:
                continue
            rest = k[:a] + k[a + 1 : b] + k[b + 1 :]
            out.add_to(rest, v)
        return out

    def apply_J(self, slot: int, J: "Matrix") -> "Tensor":
        """The J_(i) operator: (J_(i) t)(..., X_i, ...) = -t(..., J X_i, ...)."""
        out = Tensor(self.dim, self.rank)
        for k, v in self.coeffs.items():
            m = k[slot]
            # t has index m in this slot; J X with X = e_j hits m with weight J[m][j]
            for j in range(self.dim):
                w = J[m][j]
                if w.is_zero():
                    continue
                idx = k[:slot] + (j,) + k[slot + 1 :]
                out.add_to(idx, -(w * v))
        return out

    def transpose(self, perm: Sequence[int]) -> "Tensor":
        """Reorder slots: result(i_perm[0], ..., i_perm[r-1]) = self(i_0, ..., i_{r-1})."""
        out = Tensor(self.dim, self.rank)
        for k, v in self.coeffs.items():
            idx = [0] * self.rank
            for src, dst in enumerate(perm):
                idx[dst] = k[src]
            out.add_to(tuple(idx), v)
        return out

    def is_symmetric_pair(self, a: int, b: int) -> bool:
        for k, v in self.coeffs.items():
            kk = list(k)
            kk[a], kk[b] = kk[b], kk[a]
            if self(*kk) != v:
                return False
        return True

    def is_antisymmetric_pair(self, a: int, b: int) -> bool:
        for k, v in self.coeffs.items():
            kk = list(k)
            kk[a], kk[b] = kk[b], kk[a]
            if self(*kk) != -v:
                return False
        return True

    def inner(self, other: "Tensor") -> Scalar:
        """Full index-wise contraction <t, u> = sum t_I u_I."""
        self._check_like(other)
        acc = ZERO
        small, big = (self, other) if len(self.coeffs) <= len(other.coeffs) else (other, self)
        for k, v in small.coeffs.items():
            w = big.coeffs.get(k)
            if w is not None:
                acc = acc + v * w
        return acc

    def evaluate_parameters(self, bindings) -> "Tensor":
        t = Tensor(self.dim, self.rank)
        for k, v in self.coeffs.items():
            ev = v.evaluate(bindings)
            if not ev.is_zero():
                t.coeffs[k] = ev
        return t

    def antisymmetrize_to_form(self) -> Form:
        """Project a fully antisymmetric tensor back onto its form; exact check."""
        f = Form(self.dim, self.rank)
        seen = set()
        for k, v in self.coeffs.items():
            key, sign = sort_with_sign(k)
            if sign == 0:
                raise GeometryError("repeated index with nonzero coefficient")
            if key in seen:
                continue
            seen.add(key)
            f.coeffs[key] = v if sign == 1 else -v
        # verify full antisymmetry
        for key, v in f.coeffs.items():
            for perm in itertools.permutations(key):
                if self(*perm) != (v if perm_sign_of(key, perm) == 1 else -v):
                    raise GeometryError("tensor is not antisymmetric")
        return f


Matrix = List[List[Scalar]]


def identity_matrix(dim: int) -> Matrix:
    return [[ONE if i == j else ZERO for j in range(dim)] for i in range(dim)]


def mat_mul(a: Matrix, b: Matrix) -> Matrix:
    n = len(a)
    return [
        [sum((a[i][k] * b[k][j] for k in range(n)), ZERO) for j in range(n)]
        for i in range(n)
    ]


def mat_vec(a: Matrix, v: Sequence[Scalar]) -> List[Scalar]:
    n = len(a)
    return [sum((a[i][k] * v[k] for k in range(n)), ZERO) for i in range(n)]


def mat_inverse(a: Matrix) -> Matrix:
    """Exact inverse by Gaussian elimination; entries must be parameter-free."""
    n = len(a)
    m = [[a[i][j] for j in range(n)] + [ONE if i == j else ZERO for j in range(n)] for i in range(n)]
    for col in range(n):
        piv = None
        for r in range(col, n):
            if not m[r][col].is_zero():
                piv = r
                break
        if piv is None:
            raise GeometryError("singular matrix")
        m[col], m[piv] = m[piv], m[col]
        inv = ONE / m[col][col]
        m[col] = [x * inv for x in m[col]]
        for r in range(n):
            if r != col and not m[r][col].is_zero():
                f = m[r][col]
                m[r] = [x - f * y for x, y in zip(m[r], m[col])]
    return [row[n:] for row in m]


# -- exterior calculus ---------------------------------------------------------


def exterior_derivative(L: LieAlgebra, alpha: Form) -> Form:
    """Invariant d: d a(X_0..X_p) = sum_{i<j} (-1)^(i+j) a([X_i, X_j], ..hats..)."""
    p = alpha.degree
    n = L.dim
    if p >= n:
        return Form(n, p + 1)
    out = Form(n, p + 1)
    for idx in itertools.combinations(range(n), p + 1):
        acc = ZERO
        for a in range(p + 1):
            for b in range(a + 1, p + 1):
                rest = idx[:a] + idx[a + 1 : b] + idx[b + 1 :]
                for k, v in L.bracket(idx[a], idx[b]).items():
                    val = alpha(k, *rest)
                    if val.is_zero():
                        continue
                    term = v * val
                    if (a + b) % 2 == 1:
                        term = -term
                    acc = acc + term
        if not acc.is_zero():
            out.coeffs[idx] = acc
    return out


def form_inner(alpha: Form, beta: Form) -> Scalar:
    """<a, b> = (1/p!) sum over tuples, i.e. sum over sorted tuples (orthonormal)."""
    if alpha.degree != beta.degree or alpha.dim != beta.dim:
        raise GeometryError("degree mismatch in form inner product")
    acc = ZERO
    for k, v in alpha.coeffs.items():
        w = beta.coeffs.get(k)
        if w is not None:
            acc = acc + v * w
    return acc


def volume_coefficient(vol: Form) -> Scalar:
    if vol.degree != vol.dim or len(vol.coeffs) != 1:
        raise GeometryError("volume form must be a single top-degree term")
    v = vol.coeffs.get(tuple(range(vol.dim)), ZERO)
    if v.is_zero() or v.parameters():
        raise GeometryError("volume coefficient must be an invertible constant")
    return v


def hodge_star(alpha: Form, vol: Form) -> Form:
    """Defined by a ^ *b = <a, b> Vol for same-degree a, b."""
    v = volume_coefficient(vol)
    n = alpha.dim
    out = Form(n, n - alpha.degree)
    full = set(range(n))
    for idx, val in alpha.coeffs.items():
        comp = tuple(sorted(full - set(idx)))
        _, sign = sort_with_sign(idx + comp)
        coeff = v * val
        if sign == -1:
            coeff = -coeff
        s = out.coeffs.get(comp, ZERO) + coeff
        if s.is_zero():
            out.coeffs.pop(comp, None)
        else:
            out.coeffs[comp] = s
    return out


def codifferential(L: LieAlgebra, alpha: Form, vol: Form) -> Form:
    """d* = -*d* on all degrees in even dimension."""
    if alpha.degree == 0:
        raise GeometryError("codifferential needs degree >= 1")
    return -hodge_star(exterior_derivative(L, hodge_star(alpha, vol)), vol)


def flat(vector: Sequence[Scalar]) -> Form:
    """Musical flat; the basis is orthonormal, so components carry over."""
    dim = len(vector)
    return Form(dim, 1, {(i,): v for i, v in enumerate(vector) if not v.is_zero()})


def sharp(alpha: Form) -> List[Scalar]:
    if alpha.degree != 1:
        raise GeometryError("sharp expects a 1-form")
    return [alpha.coeffs.get((i,), ZERO) for i in range(alpha.dim)]


def gram_schmidt(G: Matrix, ambient_d: int = 0) -> Matrix:
    """Rows P[i] of the result express an orthonormal basis in the input basis.

    Requires every square root encountered to lie in Q(sqrt(d)); otherwise the
    metric is rejected.
    """
    n = len(G)
    for i in range(n):
        for j in range(n):
            if G[i][j] != G[j][i]:
                raise GeometryError("metric matrix must be symmetric")
            if G[i][j].parameters():
                raise GeometryError("metric matrix must be parameter-free")

    def g(u: Sequence[Scalar], w: Sequence[Scalar]) -> Scalar:
        acc = ZERO
        for a in range(n):
            if u[a].is_zero():
                continue
            for b in range(n):
                acc = acc + u[a] * w[b] * G[a][b]
        return acc

    basis: List[List[Scalar]] = []
    for i in range(n):
        u = [ONE if j == i else ZERO for j in range(n)]
        for prev in basis:
            proj = g(u, prev)
            if not proj.is_zero():
                u = [x - proj * y for x, y in zip(u, prev)]
        norm2 = g(u, u)
        if norm2.is_zero():
            raise GeometryError("metric is degenerate")
        norm = scalar_sqrt(norm2, ambient_d)
        if norm is None:
            raise GeometryError(
                f"orthonormalization requires sqrt({norm2}) outside the scalar ring"
            )
        inv = ONE / norm
        basis.append([inv * x for x in u])
    return basis
