"""Exterior algebra, differentials, and Hodge duality on Lie algebras."""

import random

import pytest

from ahtorsion.catalog import get, names
from ahtorsion.multilinear import (
    Form,
    GeometryError,
    LieAlgebra,
    codifferential,
    exterior_derivative,
    form_inner,
    hodge_star,
)
from ahtorsion.scalars import ONE, Scalar

R = Scalar.rational


def random_form(L, degree, rng):
    import itertools

    out = Form(L.dim, degree)
    for idx in itertools.combinations(range(L.dim), degree):
        if rng.random() < 0.5:
            c = R(rng.randrange(-3, 4))
            if not c.is_zero():
                out.coeffs[idx] = c
    return out


@pytest.fixture(params=names())
def structure(request):
    return get(request.param).build()


class TestWedge:
    def test_graded_anticommutativity(self):
        rng = random.Random(11)
        L = get("example-5.4").build().L
        for p, q in ((1, 1), (1, 2), (2, 2), (2, 3)):
            a = random_form(L, p, rng)
            b = random_form(L, q, rng)
            sign = R((-1) ** (p * q))
            assert a.wedge(b) == b.wedge(a).scaled(sign)

    def test_wedge_associative(self):
        rng = random.Random(12)
        L = get("example-5.4").build().L
        a, b, c = (random_form(L, 1, rng) for _ in range(3))
        assert a.wedge(b).wedge(c) == a.wedge(b.wedge(c))


class TestDifferential:
    def test_d_squared_is_zero(self, structure):
        rng = random.Random(13)
        L = structure.L
        for degree in (1, 2):
            alpha = random_form(L, degree, rng)
            dd = exterior_derivative(L, exterior_derivative(L, alpha))
            assert dd.is_zero()

    def test_leibniz_rule(self, structure):
        rng = random.Random(14)
        L = structure.L
        a = random_form(L, 1, rng)
        b = random_form(L, 2, rng)
        lhs = exterior_derivative(L, a.wedge(b))
        rhs = exterior_derivative(L, a).wedge(b) - a.wedge(
            exterior_derivative(L, b)
        )
        assert lhs == rhs


class TestHodge:
    def test_wedge_with_star_gives_inner_product(self, structure):
        rng = random.Random(15)
        vol = structure.vol
        L = structure.L
        for degree in (1, 2):
            a = random_form(L, degree, rng)
            b = random_form(L, degree, rng)
            assert a.wedge(hodge_star(b, vol)) == vol.scaled(form_inner(a, b))

    def test_star_is_involutive_up_to_sign(self, structure):
        rng = random.Random(16)
        vol = structure.vol
        dim = structure.L.dim
        for degree in (1, 2, 3):
            if degree > dim - 1:
                continue
            a = random_form(structure.L, degree, rng)
            sign = R((-1) ** (degree * (dim - degree)))
            assert hodge_star(hodge_star(a, vol), vol) == a.scaled(sign)

    def test_codifferential_is_minus_star_d_star(self, structure):
        rng = random.Random(17)
        L, vol = structure.L, structure.vol
        a = random_form(L, 2, rng)
        direct = codifferential(L, a, vol)
        by_hand = hodge_star(
            exterior_derivative(L, hodge_star(a, vol)), vol
        ).scaled(R(-1))
        assert direct == by_hand


class TestLieAlgebra:
    def test_jacobi_failure_has_witness(self):
        # "anti" sphere relations do not close into a Lie algebra
        L = LieAlgebra(
            4,
            {
                (0, 1): {0: ONE},
                (1, 2): {1: ONE},
                (0, 2): {2: -ONE},
            },
        )
        ok, witness = L.jacobi_check()
        assert not ok and witness is not None

    def test_bracket_antisymmetry(self):
        L = get("nearly-kaehler-s3s3").build().L
        for i in range(6):
            for j in range(6):
                assert L.bracket(i, j) == {
                    k: -v for k, v in L.bracket(j, i).items()
                }

    def test_odd_dimension_rejected(self):
        with pytest.raises(GeometryError):
            LieAlgebra(3, {})


class TestTensor:
    def test_form_tensor_round_trip(self):
        rng = random.Random(18)
        L = get("example-5.1").build().L
        a = random_form(L, 2, rng)
        assert a.to_tensor().antisymmetrize_to_form() == a

    def test_inner_matches_form_inner_on_one_forms(self):
        rng = random.Random(19)
        L = get("example-5.1").build().L
        a = random_form(L, 1, rng)
        b = random_form(L, 1, rng)
        assert a.to_tensor().inner(b.to_tensor()) == form_inner(a, b)
