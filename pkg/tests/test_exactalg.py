import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from k3lab.exactalg import (Q, RatMatrix, UniPoly, binomial, fmt, nullspace, nullspace_modular,
                            numeric_roots, poly_gcd, q, rational_power, rational_reconstruct,
                            rational_roots, ratrec_mod, squarefree_decomposition)

X = UniPoly([0, 1])


def test_coercion():
    assert q("3/4") == Q(3, 4)
    assert q(2) == 2
    with pytest.raises(TypeError):
        q(0.5)
    assert fmt(Q(6, 3)) == "2" and fmt(Q(-1, 6)) == "-1/6"


def test_nullspace_examples():
    assert nullspace(RatMatrix([[1, -1]])) == [[1, 1]]
    assert nullspace(RatMatrix.identity(3)) == []
    M = RatMatrix([[1, 2, 3], [2, 4, 6]])
    basis = nullspace(M)
    assert len(basis) == 2
    for v in basis:
        assert M * v == [0, 0]


def test_nullspace_one_dimensional():
    M = RatMatrix([[1, 2, 3], [4, 5, 6]])
    (v,) = nullspace(M)
    assert v == [1, -2, 1]
    assert nullspace_modular([[1, 2, 3], [4, 5, 6]], 3) == [1, -2, 1]


def test_nullspace_modular_trivial_kernel():
    assert nullspace_modular([[1, 0], [0, 1]], 2) is None


@settings(max_examples=60, deadline=None)
@given(st.lists(st.lists(st.integers(-9, 9), min_size=5, max_size=5), min_size=1, max_size=4))
def test_nullspace_property(rows):
    M = RatMatrix(rows)
    basis = nullspace(M)
    assert len(basis) == 5 - M.rank()
    for v in basis:
        assert all(e == 0 for e in M * v)


def test_gcd_examples():
    assert poly_gcd(X * X - 1, X - 1) == X - 1
    assert poly_gcd(X * X + 3, UniPoly([1])) == UniPoly([1])
    a = (X * 4 + 1) * (X * -16 + 1)
    b = (X * -16 + 1) ** 2
    assert poly_gcd(a, b) == X - Q(1, 16)


def test_squarefree():
    p = (X - 1) ** 2 * (X + 2)
    parts = squarefree_decomposition(p)
    prod = UniPoly([1])
    for f, m in parts:
        prod = prod * f**m
    assert prod.monic() == p.monic()


def test_rational_reconstruct():
    assert rational_reconstruct(0.75, 60) == Q(3, 4)
    assert rational_reconstruct(0.8333333333, 60) == Q(5, 6)
    assert rational_reconstruct(0.123456, 4) is None


def test_ratrec_mod():
    p = 2**61 - 1
    a = 5 * pow(7, -1, p) % p
    assert ratrec_mod(a, p) == Q(5, 7)


def test_rational_power_and_binomial():
    assert rational_power(Q(27, 8), Q(2, 3)) == Q(9, 4)
    with pytest.raises(ValueError):
        rational_power(Q(2), Q(1, 2))
    # coefficient of x in (1 - 432 x)^(-13/12)
    assert binomial(Q(-13, 12), 1) * -432 == 468


def test_roots():
    p = (X * 3 - 1) * (X + 1) * (X * X - Q(4, 3) * X - Q(1, 3))
    assert sorted(rational_roots(p)) == [-1, Q(1, 3)]
    approx = sorted(float(z.real) for z in numeric_roots(p))
    assert approx == pytest.approx([-1, 2 / 3 - 7**0.5 / 3, Q(1, 3), 2 / 3 + 7**0.5 / 3], abs=1e-12)
    reals = sorted(float(z.real) for z in numeric_roots(X * X + 2 * X - Q(1, 3)))
    assert reals == pytest.approx([-1 - 2 / 3**0.5, -1 + 2 / 3**0.5], abs=1e-12)


def test_matrix_inverse_det():
    rng = random.Random(3)
    for _ in range(20):
        M = RatMatrix([[rng.randint(-5, 5) for _ in range(3)] for _ in range(3)])
        if M.det() == 0:
            continue
        assert M * M.inverse() == RatMatrix.identity(3)
