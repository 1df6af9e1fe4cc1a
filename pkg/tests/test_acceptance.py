"""Acceptance criteria 1-10, one test each.

Every test records its outcome before asserting, so the terminal summary shows
one PASS/FAIL line per criterion. Run standalone with
``python3 tests/test_acceptance.py`` for the same lines without pytest.
"""
import time
from math import factorial

import pytest
from hypothesis import HealthCheck, given, settings
from hypothesis import strategies as st

from k3lab import bcov, cdfamily, elliptic, latticegrp, recover
from k3lab.etaprod import CUSP_FORM, EtaQuotient, all_thompson, classify, eta_bcov, groups
from k3lab.exactalg import Q, UniPoly
from k3lab.pfode import ThetaOperator
from k3lab.qseries import PuiseuxSeries

try:
    from conftest import record
except ImportError:  # standalone run
    def record(num, title, ok, detail=""):
        print(f"[{'PASS' if ok else 'FAIL'}] {num:>2}. {title}" + (f" -- {detail}" if detail else ""))

TH = UniPoly([0, 1])


def deg20_operator() -> ThetaOperator:
    return ThetaOperator([TH**3, (TH * 2 + 1) * (TH * TH * 3 + TH * 3 + 1) * (-2),
                          (TH * 4 + 3) * (TH * 4 + 4) * (TH * 4 + 5) * (-1)], 3, n=10)


def deg24_operator() -> ThetaOperator:
    return ThetaOperator([TH**3, (TH * 2 + 1) * (TH * TH * 5 + TH * 5 + 2) * (-2), (TH + 1) ** 3 * 64], 3, n=12)


def coeffs(s: PuiseuxSeries, start: int, stop: int) -> list:
    return [int(s.coeff(k)) for k in range(start, stop)]


# ---------------------------------------------------------------- 1


def test_c01_derivation_36A():
    title = "36A derivation from eta_BCOV(36) and the c=2 eta product"
    record(1, title, False)
    t0 = time.perf_counter()
    d = recover.derive_k3_operator(36, c=2, cfg=recover.GuessConfig(3, 16, 12), T=80)
    elapsed = time.perf_counter() - t0

    E = eta_bcov(36).expand(8)
    assert E.valuation() == Q(-3, 2)
    assert [int(E.coeff(Q(-3, 2) + k)) for k in range(4)] == [1, 4, 10, 20]
    assert coeffs(d.q_of_x, 1, 7) == [1, 2, 7, 28, 125, 598]
    assert coeffs(d.w0, 0, 7) == [1, 1, 3, 15, 75, 387, 2037]
    assert d.c == 2
    printed = recover.load_operator("36A")
    assert d.operator.rows == printed.rows
    assert elapsed < 60
    record(1, title, True, f"operator equal coefficient by coefficient, {elapsed:.1f}s at T=80")


# ---------------------------------------------------------------- 2


def test_c02_corpus():
    title = "operator corpus: annihilation, eta identity, LCSL count, c0"
    record(2, title, False)
    t0 = time.perf_counter()
    rows = recover.addendum()
    fails = []
    for L in recover.all_operators():
        row = rows[L.type_name]
        rep = recover.verify_k3_operator(L, T=30)
        ok = (recover.frobenius_annihilated(L, 30) and rep.identity == recover.PASS
              and rep.lcsl == recover.PASS and rep.n_lcsl == groups()[L.n].n_cusps)
        if not row.dagger:
            ok = ok and rep.c_status == recover.PASS and rep.c == str(row.c0)
        if not ok:
            fails.append(L.type_name)
    elapsed = time.perf_counter() - t0
    assert not fails, fails
    assert elapsed < 1800
    record(2, title, True, f"{len(rows)} operators, {elapsed:.0f}s")


# ---------------------------------------------------------------- 3


def test_c03_gamma0_10():
    title = "Gamma0(10)+ suite"
    record(3, title, False)
    L = deg20_operator()
    w0 = L.frobenius_mum(22)[0]
    ref = [sum(Q(factorial(k) ** 4, factorial(n) ** 4 * factorial(k - n) ** 4) for n in range(k + 1))
           for k in range(21)]
    assert [w0.coeff(k) for k in range(21)] == ref
    x = L.mirror_map(32)
    assert coeffs(x, 1, 8) == [1, -4, -6, 56, -45, -360, 894]
    C = L.yukawa(20, 21)
    target = (PuiseuxSeries.from_coeffs([1, -12, -64]).mul_monomial(2).inverse(21)).scale(20)
    assert C.agrees(target, 19)
    ok, const = bcov.conifold_check(L, 20, 20)
    assert ok and const == 20
    a = bcov.orbifold_a(L)
    assert a == Q(-3, 4)
    tau = bcov.tau_bcov_rank1(L, bcov.BcovExponents.regular(L, a), 30)
    ok, c = bcov.compare_up_to_constant(tau.inverse(30), EtaQuotient.parse("1 2 5 10").expand(32), tau.valuation() * -1 + 30)
    assert ok
    t10c = EtaQuotient.parse("1^2 2^2 / 5^2 10^2").expand(22)
    assert (x.inverse(22) - 6).agrees(t10c + t10c.inverse(22).scale(25), 20)
    record(3, title, True, f"conifold constant 20, a = -3/4, tau^-1 = {c} eta1 eta2 eta5 eta10")


# ---------------------------------------------------------------- 4


def test_c04_gamma0_12():
    title = "Gamma0(12)+ suite"
    record(4, title, False)
    L = deg24_operator()
    a = Q(-5, 6)
    tau = bcov.tau_bcov_rank1(L, bcov.BcovExponents.regular(L, a), 30)
    x = L.mirror_map(32)
    rhs = x.pow_rat(1 + a) * EtaQuotient.parse("2^2 6^2 / 1^2 3^2 4^2 12^2").expand(32)
    ok, c = bcov.compare_up_to_constant(tau, rhs, tau.valuation() + 30)
    assert ok
    assert classify(EtaQuotient.parse("1^2 3^2 4^2 12^2 / 2^2 6^2") * EtaQuotient.parse("1^6 3^6 4^6 12^6 / 2^12 6^12") ** Q(-1, 6)) == CUSP_FORM
    assert x.agrees(EtaQuotient.parse("1^6 3^6 4^6 12^6 / 2^12 6^12").expand(32), 31)
    record(4, title, True, f"tau = {c} x^(1/6) (eta2 eta6/(eta1 eta3 eta4 eta12))^2, mirror map an eta product")


# ---------------------------------------------------------------- 5


def test_c05_eta_combinatorics():
    title = "eta combinatorics: weights, N_c=1 cusp forms, Thompson rows with b"
    record(5, title, False)
    g = groups()
    assert all(eta_bcov(n).weight == 2 for n in g)
    single = [n for n, r in g.items() if r.n_cusps == 1]
    assert all(classify(eta_bcov(n)) == CUSP_FORM for n in single)
    with_b = [r for r in all_thompson() if r.b is not None]
    for r in with_b:
        combined = r.quotient ** r.b * eta_bcov(r.n)
        assert classify(combined) == CUSP_FORM, r.n
        assert combined == r.cusp_form, r.n
    record(5, title, True, f"{len(g)} levels, {len(single)} with one cusp, {len(with_b)} rows with b")


# ---------------------------------------------------------------- 6


def test_c06_gkz_family():
    title = "GKZ family: annihilation, orbifold exponents, Gram factorization"
    record(6, title, False)
    res = cdfamily.annihilation_residuals(12)
    assert len(res) == 5 and not any(res.values())
    expect = {"T12": (Q(-1, 10), Q(-1, 5), Q(-1, 2)), "T16": (Q(-1, 10), Q(-1, 5), Q(-1, 2)),
              "T9": (Q(-1, 12), Q(-1, 6), Q(-1, 2))}
    for name, a in expect.items():
        mmap, rho = cdfamily.ORBIFOLD_POINTS[name]
        assert tuple(cdfamily.orbifold_exponent_solve(mmap, rho)) == a
    g = cdfamily.cd_gram_data()
    # K and U+<-2> are related by the printed P used as tP K P; the direction
    # K = tP (U+<-2>) P does not hold for the printed entries
    assert g.factorization()
    assert not g.literal_factorization()
    record(6, title, True, "corrected D3 coefficient; Gram relation holds as tP K P = U+<-2>")


# ---------------------------------------------------------------- 7


def test_c07_reduced_family():
    title = "reduced family through bidegree (6, 6)"
    record(7, title, False)
    rep = cdfamily.red_select(6)
    assert rep.identity and rep.tau
    record(7, title, True, f"{rep.coefficient_variant} coefficients, {rep.v_variant} v, constant {rep.tau_constant}")


# ---------------------------------------------------------------- 8


def test_c08_elliptic():
    title = "elliptic pipeline checks (i)-(iv) and x -> 1/432 - x symmetry"
    record(8, title, False)
    rep = elliptic.elliptic_checks(30)
    assert rep.period and rep.tau_bcov and rep.j_relation and rep.symmetry
    assert elliptic.symmetry_check()
    record(8, title, True, f"tau constant {rep.tau_constant}")


# ---------------------------------------------------------------- 9


def test_c09_lattice():
    title = "lattice maps on 100 random instances"
    record(9, title, False)
    rep = latticegrp.lattice_checks(100, seed=1)
    assert rep.instances >= 100 and rep.passed, rep
    record(9, title, True, f"{rep.instances} instances, every identity exact")


# ---------------------------------------------------------------- 10

small = st.fractions(min_value=-20, max_value=20, max_denominator=12)
series_body = st.lists(small, min_size=8, max_size=8)

_prop_ok = {"revert": False, "compose": False, "power": False}


@settings(max_examples=1000, deadline=None, suppress_health_check=[HealthCheck.too_slow])
@given(series_body)
def test_c10a_revert_round_trip(body):
    f = PuiseuxSeries.from_coeffs([0, 1] + body, 10)
    g = f.revert()
    assert f.compose(g).agrees(PuiseuxSeries.monomial(1), 10)
    assert g.compose(f).agrees(PuiseuxSeries.monomial(1), 10)
    _prop_ok["revert"] = True


@settings(max_examples=1000, deadline=None, suppress_health_check=[HealthCheck.too_slow])
@given(series_body, series_body)
def test_c10b_compose_associative(a, b):
    f = PuiseuxSeries.from_coeffs([1] + a, 9)
    g = PuiseuxSeries.from_coeffs([0, 1] + b[:7], 9)
    h = PuiseuxSeries.from_coeffs([0, 2] + a[:7], 9)
    assert f.compose(g).compose(h).agrees(f.compose(g.compose(h)), 9)
    _prop_ok["compose"] = True


@settings(max_examples=1000, deadline=None, suppress_health_check=[HealthCheck.too_slow])
@given(series_body, st.fractions(min_value=-3, max_value=3, max_denominator=6).filter(lambda r: r != 0))
def test_c10c_power_round_trip(body, r):
    f = PuiseuxSeries.from_coeffs([1] + body, 9)
    assert f.pow_rat(r).pow_rat(1 / r).agrees(f, 9)
    assert (f.pow_rat(r) * f.pow_rat(-r)).agrees(PuiseuxSeries.one(), 9)
    _prop_ok["power"] = True


def test_c10d_guess_round_trip_and_guard_stability():
    title = "property suites: series round trips, guesser round trip, guard +20"
    record(10, title, False)
    base, wide = recover.GuessConfig(3, 16, 12), recover.GuessConfig(3, 16, 32)
    fails = []
    for L in recover.all_operators():
        w = L.frobenius_mum(wide.T)[0]
        M = recover.guess_operator(w.truncate(base.T), base)
        M2 = recover.guess_operator(w, wide)
        if M is None or M2 is None or M2.rows != M.rows or recover.canonical_multiple(M, L.degree).rows != L.rows:
            fails.append(L.type_name)
    assert not fails, fails
    assert all(_prop_ok.values()), _prop_ok
    record(10, title, True, "1000 inputs per series property; corpus round trip and guard stability exact")


if __name__ == "__main__":
    import sys

    sys.exit(pytest.main([__file__, "-q", "-p", "no:cacheprovider"]))
