import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from k3lab import cdfamily
from k3lab.cdfamily import (T9, T12, T16, GKZOperator, MonomialMap, MultiSeries, MultiSeries3,
                            annihilation_residuals, cd_coeff, cd_gram_data, cd_operators, cd_w0,
                            orbifold_exponent_solve, parse_poly, red_coeff, red_identity_check, red_tau_check)
from k3lab.exactalg import Q, RatMatrix
from k3lab.qseries import PuiseuxSeries

PRINTED_D3 = ("(2*tx - ty)*(3*ty - tz) + 2*y*z*(tx - 2*ty - 1)*(tx - 3*ty + tz)"
              " + 2*y*z^2*(2*tz + 1)*(3*tx - 6*ty + 2*tz)")


def test_coefficients():
    assert cd_coeff(0, 0, 0) == 1
    assert cd_coeff(0, 1, 3) == 60
    assert cd_coeff(1, 0, 0) == 0


def test_operators_parse():
    ops = cd_operators()
    assert [D.name for D in ops] == ["D1", "D2", "D3", "D4", "D5"]
    w = MultiSeries3({(0, 0, 0): 1}, 0)
    assert ops[1].apply(w)[(0, 0, 0)] == 0


def test_annihilation():
    res = annihilation_residuals(10)
    assert all(not r for r in res.values())


def test_mutated_coefficient_is_detected():
    def mutated(l, m, n):
        return Q(61) if (l, m, n) == (0, 1, 3) else cd_coeff(l, m, n)

    res = annihilation_residuals(8, w=cd_w0(8, coeff=mutated))
    # D2 multiplies c(0,1,3) by factors vanishing at (0,1,3); D4 and D5 see it
    assert not res["D2"]
    assert res["D4"] and res["D5"]
    assert not cdfamily.verify_annihilation(8, cd_w0(8, coeff=mutated))


def test_printed_D3_fails_from_degree_11():
    D3 = GKZOperator.parse("D3", PRINTED_D3)
    assert not annihilation_residuals(10, ops=[D3])["D3"]
    bad = annihilation_residuals(11, ops=[D3])["D3"]
    assert bad == {(1, 3, 7): -110880}


def test_orbifold_exponents():
    assert orbifold_exponent_solve(T12, (Q(1, 5), Q(1, 10), 0)) == [Q(-1, 10), Q(-1, 5), Q(-1, 2)]
    assert orbifold_exponent_solve(T16, (Q(1, 5), 0, Q(1, 2))) == [Q(-1, 10), Q(-1, 5), Q(-1, 2)]
    assert orbifold_exponent_solve(T9, (Q(5, 12), Q(1, 3), Q(1, 3))) == [Q(-1, 12), Q(-1, 6), Q(-1, 2)]
    ident = MonomialMap(((1, 0, 0), (0, 1, 0), (0, 0, 1)), "id")
    rho = (Q(2, 7), Q(-1, 3), Q(5))
    assert orbifold_exponent_solve(ident, rho) == list(rho)
    with pytest.raises(ValueError):
        MonomialMap(((1, 1, 0), (1, 1, 0), (0, 0, 1)), "bad").pull_back(rho)


@settings(max_examples=50, deadline=None)
@given(st.lists(st.fractions(min_value=-3, max_value=3, max_denominator=12), min_size=3, max_size=3))
def test_pull_push_inverse(rho):
    for mmap in (T9, T12, T16):
        assert mmap.push_forward(mmap.pull_back(rho)) == [Q(r.numerator, r.denominator) for r in rho]


def test_gram_data():
    g = cd_gram_data()
    assert g.K[2, 2] == 16
    assert g.factorization()
    assert not g.literal_factorization()
    Q_ = RatMatrix([[1, 1, 3], [0, 1, 3], [0, 0, 1]])
    assert Q_.transpose() * g.U * Q_ == g.K
    assert parse_poly("1 - 4*x + 4*z")[(0,) * 6] == 1
    assert g.dis0[(0, 0, 0)] == 1


def test_multiseries_arithmetic():
    a = MultiSeries({(0, 0): 1, (1, 0): 2, (0, 1): -1}, 6, 2)
    inv = a.inverse()
    assert (a * inv) == MultiSeries.constant(1, 6, 2)
    h = a.pow_unit(Q(1, 3))
    assert h * h * h == a


def test_multiseries_tensor():
    f = PuiseuxSeries.from_coeffs([1, 1], 5)
    t = MultiSeries.tensor([f, f], 4)
    assert t[(1, 1)] == 1 and t[(2, 0)] == 0


@settings(max_examples=40, deadline=None)
@given(st.dictionaries(st.tuples(st.integers(0, 3), st.integers(0, 3)), st.integers(-4, 4), max_size=6),
       st.sampled_from([Q(1, 2), Q(-1, 12), Q(2, 3), Q(-3)]))
def test_multiseries_powers(terms, r):
    terms = {k: v for k, v in terms.items() if k != (0, 0)}
    terms[(0, 0)] = 1
    a = MultiSeries(terms, 5, 2)
    assert (a.pow_unit(r) * a.pow_unit(-r)) == MultiSeries.constant(1, 5, 2)


def test_reduced_coefficients():
    # (6n)!/((3n)!(2n)!(n-2m)!(m!)^2): n=2, m=1 gives 12!/(6! 4! 0! 1)
    assert red_coeff(2, 1) == Q(479001600, 720 * 24)
    assert red_coeff(1, 1) == 0
    assert red_coeff(0, 0, "literal") == 1


def test_reduced_identity_small_box():
    assert red_identity_check(3) == (True, None)
    ok, bad = red_identity_check(3, "literal", "squared")
    assert not ok and bad == (0, 2)
    ok, bad = red_identity_check(3, "corrected", "literal")
    assert not ok and bad == (1, 1)
    assert red_tau_check(3) == (True, 1)
