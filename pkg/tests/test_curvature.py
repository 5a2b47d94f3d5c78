"""Curvature traces, Ricci forms, and the worked example golden values.

Where a printed source value disagrees with the exact computation, the test
asserts the computed value; every such disagreement is double-checked through
an independent torsion-side route inside the library (the scalar curvature
formulas and the identity audit).
"""

import pytest

from ahtorsion.catalog import get, names
from ahtorsion.curvature import analyze, evaluate_on_J
from ahtorsion.multilinear import exterior_derivative
from ahtorsion.render import format_bilinear, format_form
from ahtorsion.scalars import Fraction, Scalar, format_scalar

R = Scalar.rational


@pytest.fixture(params=names())
def analysis(request):
    return analyze(get(request.param).build())


@pytest.fixture(scope="module")
def solvable():
    return analyze(get("example-5.1").build())


@pytest.fixture(scope="module")
def parameterized():
    return analyze(get("example-5.2").build())


@pytest.fixture(scope="module")
def nilmanifold():
    return analyze(get("example-5.4").build())


class TestGeneralIdentities:
    def test_scalar_curvature_routes_agree(self, analysis):
        c = analysis.curvature
        assert c.s == c.s_from_torsion
        assert c.s_star == c.s_star_from_torsion

    def test_ricci_star_against_ricci_form(self, analysis):
        c = analysis.curvature
        S = analysis.structure
        assert evaluate_on_J(S, c.ric_star) == c.rho.to_tensor()
        assert c.rho == c.r

    def test_second_ricci_forms_closed_for_unitary_connections(self, analysis):
        c = analysis.curvature
        L = analysis.structure.L
        assert exterior_derivative(L, c.minimal.r).is_zero()
        if c.chern is not None:
            assert exterior_derivative(L, c.chern.r).is_zero()

    def test_chern_defined_exactly_for_integrable(self, analysis):
        integrable = analysis.nijenhuis_tensor.is_zero()
        assert (analysis.curvature.chern is not None) == integrable


class TestSolvableSurface:
    """Golden run of the 4-dimensional solvable example."""

    @pytest.fixture
    def a(self, solvable):
        return solvable

    def test_lee_data(self, a):
        assert format_form(a.theta) == "-e^1 - 2*e^4"
        assert format_form(a.dtheta.split.lambda0_part) == "-(1/2)*e^14 - (1/2)*e^23"
        assert format_form(a.dtheta.split.lambda20_part) == "-(1/2)*e^14 + (1/2)*e^23"
        assert format_scalar(a.curvature.dstar_theta) == "-4"
        assert a.torsion.norms["W4"] == R(Fraction(5, 2))

    def test_scalar_curvatures(self, a):
        c = a.curvature
        assert format_scalar(c.s) == "-13/2"
        assert format_scalar(c.s_star) == "-7/2"
        assert c.s - c.s_star == R(-3)
        assert c.s + R(3) * c.s_star == R(-17)

    def test_ricci_forms(self, a):
        c = a.curvature
        assert (
            format_form(c.minimal.rho)
            == "(3/4)*e^12 + (3/8)*e^13 + (1/8)*e^24 + (3/4)*e^34"
        )
        assert format_form(c.minimal.r) == "(1/2)*e^24 + (1/2)*e^34"
        assert c.chern is not None
        assert c.chern.r.is_zero()

    def test_su_refinement(self, a):
        assert format_form(a.su.eta_hat) == "-(1/4)*e^3"
        # the second minimal Ricci form is exact with primitive -n eta_hat
        L = a.structure.L
        assert a.curvature.minimal.r == exterior_derivative(
            L, a.su.eta_hat
        ).scaled(R(-2))

    def test_invariant_combined_ricci(self, a):
        c = a.curvature
        lam11 = c.comb_split.trace_part + c.comb_split.sym_invariant_part
        assert format_bilinear(lam11) == (
            "-(19/4)*e^1(x)e^1 + 3*e^1(x)e^4 - (15/4)*e^2(x)e^2"
            " - 3*e^2(x)e^3 - 3*e^3(x)e^2 - (19/4)*e^3(x)e^3"
            " + 3*e^4(x)e^1 - (15/4)*e^4(x)e^4"
        )


class TestParameterizedSurface:
    """Golden run of the parameterized surface, identically in q."""

    @pytest.fixture
    def a(self, parameterized):
        return parameterized

    def test_lee_data(self, a):
        assert format_form(a.theta) == "q*e^2 - e^4"
        assert format_form(a.dtheta.split.lambda0_part) == (
            "(1/2*q)*e^13 + (1/2*q)*e^24"
        )
        assert format_form(a.dtheta.split.lambda20_part) == (
            "-(1/2*q)*e^13 + (1/2*q)*e^24"
        )
        assert a.curvature.dstar_theta.is_zero()

    def test_scalar_curvatures(self, a):
        c = a.curvature
        q = Scalar.parameter("q")
        assert c.s == R(Fraction(-5, 2)) - R(Fraction(1, 2)) * q * q
        assert c.s_star == R(Fraction(-7, 2)) - R(Fraction(3, 2)) * q * q
        assert c.s - c.s_star == R(1) + q * q

    def test_ricci_forms(self, a):
        c = a.curvature
        assert format_form(c.chern.r) == "e^34"
        assert format_form(c.minimal.rho) == (
            "(1/8 - 1/8*q^2)*e^12 + (11/8 + 5/8*q^2)*e^34"
        )

    def test_su_refinement(self, a):
        assert format_form(a.su.eta_hat) == "-(1/4*q)*e^1 + (3/4)*e^3"

    def test_invariant_combined_ricci(self, a):
        c = a.curvature
        lam11 = c.comb_split.trace_part + c.comb_split.sym_invariant_part
        assert format_bilinear(lam11) == (
            "(-3/4 + 1/4*q^2)*e^1(x)e^1 + (-3/4 + 1/4*q^2)*e^2(x)e^2"
            " + (-23/4 - 11/4*q^2)*e^3(x)e^3 + (-23/4 - 11/4*q^2)*e^4(x)e^4"
        )


class TestNilmanifold:
    """Golden run of the 6-dimensional nilpotent example."""

    @pytest.fixture
    def a(self, nilmanifold):
        return nilmanifold

    def test_lee_data(self, a):
        assert format_form(a.theta) == "-(1/2*r)*e^5"
        assert format_form(a.dtheta.split.lambda0_part) == (
            "-(1/4*r)*e^12 + (1/4*r)*e^34"
        )
        assert format_form(a.dtheta.split.lambda20_part) == (
            "-(1/4*r)*e^12 - (1/4*r)*e^34"
        )
        assert a.curvature.dstar_theta.is_zero()

    def test_scalar_curvatures(self, a):
        c = a.curvature
        assert format_scalar(c.s) == "-3/2"
        assert format_scalar(c.s_star) == "-9/2"
        assert c.s + R(3) * c.s_star == R(-15)

    def test_ricci_forms(self, a):
        c = a.curvature
        assert format_form(c.minimal.r) == "(1/2*r)*e^14 + (1/2*r)*e^23"
        assert c.chern is not None and c.chern.r.is_zero()
        # the computed first Ricci form of the minimal connection is closed;
        # it is recorded here because a printed source shows another value
        assert format_form(c.minimal.rho) == (
            "-(3/8)*e^13 + (3/8*r)*e^14 + (3/8*r)*e^23 + (3/8)*e^24"
        )
        assert exterior_derivative(a.structure.L, c.minimal.rho).is_zero()

    def test_su_refinement(self, a):
        assert format_form(a.su.eta) == "-(1/6*r)*e^5"
        assert format_form(a.su.eta_hat) == "-(1/6*r)*e^6"
        L = a.structure.L
        assert a.curvature.minimal.r == exterior_derivative(
            L, a.su.eta_hat
        ).scaled(R(-3))


class TestExtremes:
    def test_flat_torus_everything_vanishes(self):
        a = analyze(get("flat-kaehler-torus").build())
        assert a.xi.is_zero()
        assert a.theta.is_zero()
        assert a.curvature.Rm.is_zero()
        assert a.curvature.ric.is_zero() and a.curvature.ric_star.is_zero()
        assert a.curvature.s.is_zero() and a.curvature.s_star.is_zero()
        assert a.gh_class.label == "Kaehler"

    def test_nearly_kaehler_facts(self):
        a = analyze(get("nearly-kaehler-s3s3").build())
        dec = a.torsion
        assert not dec.xi1.is_zero()
        assert dec.xi2.is_zero() and dec.xi3.is_zero() and dec.xi4.is_zero()
        assert a.theta.is_zero()
        assert a.su is not None
        assert a.su.w1_plus == R(Fraction(1, 3))
        assert dec.norms["W1"] == R(6) * a.su.w1_plus * a.su.w1_plus
