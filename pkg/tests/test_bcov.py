import pytest

from k3lab import recover
from k3lab.bcov import (BcovExponents, check_conjecture, compare_up_to_constant, conifold_check,
                        coupling_identity, identity_holds, orbifold_a, regular_exponent, tau_bcov_rank1)
from k3lab.elliptic import weier_pf
from k3lab.etaprod import EtaQuotient, eta_bcov
from k3lab.exactalg import Q, UniPoly
from k3lab.pfode import INF, ThetaOperator
from k3lab.qseries import PuiseuxSeries

TH = UniPoly([0, 1])
NO_ETA = {25, 27, 49, 50, 54}


def theta3():
    return ThetaOperator([TH**3], 3)


def deg20():
    return ThetaOperator([TH**3, (TH * 2 + 1) * (TH * TH * 3 + TH * 3 + 1) * (-2),
                          (TH * 4 + 3) * (TH * 4 + 4) * (TH * 4 + 5) * (-1)], 3, n=10)


def deg24():
    return ThetaOperator([TH**3, (TH * 2 + 1) * (TH * TH * 5 + TH * 5 + 2) * (-2), (TH + 1) ** 3 * 64], 3, n=12)


def test_tau_trivial_operator():
    tau = tau_bcov_rank1(theta3(), BcovExponents([], Q(0)), 10)
    assert tau.agrees(PuiseuxSeries.one(), 10)


def test_tau_needs_a():
    with pytest.raises(ValueError):
        tau_bcov_rank1(theta3(), BcovExponents(), 5)


def test_deg20_tau():
    L = deg20()
    tau = tau_bcov_rank1(L, BcovExponents.regular(L, Q(-3, 4)), 30)
    ok, c = compare_up_to_constant(tau.inverse(30), EtaQuotient.parse("1 2 5 10").expand(32), Q(3, 4) + 30)
    assert ok and c == 1


def test_deg24_tau():
    L = deg24()
    tau = tau_bcov_rank1(L, BcovExponents.regular(L, Q(-5, 6)), 30)
    x = L.mirror_map(32)
    rhs = x.pow_rat(Q(1, 6)) * EtaQuotient.parse("2^2 6^2 / 1^2 3^2 4^2 12^2").expand(32)
    assert compare_up_to_constant(tau, rhs, tau.valuation() + 30)[0]


def test_conifold_checks():
    assert conifold_check(deg20(), 20, 20) == (True, 20)
    assert conifold_check(theta3(), 2, 10, dis=UniPoly([1])) == (True, 2)
    ok, _ = conifold_check(deg20(), 20, 20, dis=UniPoly([1, 4]))
    assert not ok
    assert coupling_identity(deg20(), 20, 20) == (True, 20)


def test_regular_exponents():
    for p in deg20().pscheme.points:
        if not p.is_infinity and p.location_text() != "0":
            assert regular_exponent(p) == Q(-1, 2)


def test_orbifold_exponent():
    assert orbifold_a(deg20()) == Q(-3, 4)
    with pytest.raises(ValueError, match="not an orbifold point"):
        orbifold_a(deg24())
    assert sorted(weier_pf().pscheme.at(INF).exponents) == [Q(1, 6), Q(5, 6)]


def test_conjecture_examples():
    r10 = check_conjecture(deg20(), 10)
    assert r10.passed and r10.a == "-3/4"
    r12 = check_conjecture(deg24(), 12)
    assert r12.passed and r12.a == "-5/6"
    L2 = recover.load_operator("2A")
    assert eta_bcov(2) == EtaQuotient.parse("1^2 2^2")
    assert check_conjecture(L2).passed


def test_wrong_exponent_fails():
    L = deg20()
    assert not identity_holds(L, 10, Q(-1, 2), 0, 20)[0]


def test_whole_table():
    verdicts = {L.n: check_conjecture(L).verdict for L in recover.all_operators()}
    assert {n for n, v in verdicts.items() if v != "verified"} == NO_ETA
    assert all(verdicts[n] == "not found within bounds" for n in NO_ETA)


def test_report_round_trip():
    import json

    d = check_conjecture(deg20(), 10).to_dict()
    assert json.loads(json.dumps(d, sort_keys=True)) == d
