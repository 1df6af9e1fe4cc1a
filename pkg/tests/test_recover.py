import pytest

from k3lab import recover
from k3lab.exactalg import UniPoly
from k3lab.pfode import ThetaOperator
from k3lab.qseries import PuiseuxSeries
from k3lab.recover import (FAIL, PASS, GuessConfig, OperatorGuesser, canonical_multiple, derive_k3_operator,
                           guess_operator, left_multiply, load_operator, read_thompson_file, verify_k3_operator)

TH = UniPoly([0, 1])


def test_config_lengths():
    cfg = GuessConfig()
    assert cfg.length(16) == 80 and cfg.T == 80
    with pytest.raises(ValueError):
        GuessConfig(guard=-1)


def test_first_order_guess():
    w = PuiseuxSeries.from_coeffs([1] * 30, 30)
    L = guess_operator(w, GuessConfig(1, 4, 6))
    assert L == ThetaOperator([TH, -(TH + 1)], 1)


def test_36A_least_degree_and_cofactor():
    L36 = load_operator("36A")
    w = L36.frobenius_mum(80)[0]
    Lmin = guess_operator(w)
    assert Lmin.degree == 8
    # frozen cofactor: the tabulated operator is f(x) L_min
    f = UniPoly([1, 3, -72, -432, 4446])
    assert left_multiply(f, Lmin).rows == L36.rows
    assert canonical_multiple(Lmin, 12).rows == L36.rows


def test_1A_round_trip():
    L1 = load_operator("1A")
    w = L1.frobenius_mum(40)[0]
    assert guess_operator(w).rows == L1.rows


def test_series_too_short():
    with pytest.raises(ValueError, match="too short"):
        guess_operator(PuiseuxSeries.from_coeffs([1, 2, 3], 3))
    with pytest.raises(ValueError, match="start with 1"):
        guess_operator(PuiseuxSeries.from_coeffs([2, 1] * 20, 40))


def test_estimator_wrapper():
    g = OperatorGuesser().set_params(guard=14)
    assert g.get_params() == {"order": 3, "max_degree": 16, "guard": 14}
    w = load_operator("4A").frobenius_mum(60)[0]
    assert g.fit(w).operator_.rows == load_operator("4A").rows
    with pytest.raises(ValueError):
        g.set_params(depth=2)


def test_canonical_multiple_below_least_degree():
    with pytest.raises(ValueError):
        canonical_multiple(load_operator("36A"), 3)


def test_derive_small_levels():
    d4 = derive_k3_operator(4)
    assert d4.operator.rows == ThetaOperator([TH**3, (TH * 2 + 1) ** 3 * -8], 3).rows
    assert d4.c == 24
    d9 = derive_k3_operator(9)
    assert d9.operator.rows == load_operator("9A").rows


def test_derive_without_eta_product():
    with pytest.raises(LookupError, match="no eta product; supply q-expansion data"):
        derive_k3_operator(7)


def test_derive_from_thompson_file(tmp_path):
    L7 = load_operator("7A")
    c = recover.addendum_for_level(7).c0
    inv = L7.mirror_map(84).inverse(82) - c
    path = tmp_path / "t7.txt"
    path.write_text("# level exponent coefficient\n" + "".join(
        f"7 {e} {inv.coeff(e)}\n" for e in range(-1, 81) if inv.coeff(e)))
    s = read_thompson_file(path, 7, 80)
    assert s.coeff(-1) == 1 and s.coeff(0) == 0
    d = derive_k3_operator(7, thompson=path)
    assert d.operator.rows == L7.rows


def test_verify_examples():
    r = verify_k3_operator(load_operator("36A"))
    assert (r.identity, r.lcsl, r.integrality) == (PASS, PASS, PASS) and r.c == "2"
    r1 = verify_k3_operator(load_operator("1A"))
    assert r1.passed and r1.c == "744"


def test_verify_corrupted():
    L = load_operator("36A")
    m = L.matrix()
    m[3][1] += 1
    bad = ThetaOperator(m, 3, n=36, type_name="36A")
    r = verify_k3_operator(bad)
    assert r.identity == FAIL and not r.passed
    assert r.identity_mismatch is not None


def test_frozen_addendum_rows():
    rows = recover.addendum()
    assert len(rows) == 65
    assert rows["36A"].c0 == 2 and rows["1A"].c0 == 744
    assert [L.n for L in recover.all_operators()] == sorted(L.n for L in recover.all_operators())


def test_25A_lead_correction():
    L = load_operator("25A")
    assert L.is_mum()
    assert verify_k3_operator(L).passed
