import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from k3lab.exactalg import Q, RatMatrix
from k3lab.latticegrp import (GRAM5, SP4_GENERATORS, Psi, Psi_literal, gamma0_element,
                              is_symplectic, lattice_checks, mat2_mul, phi_equivariance_check, phi_tau, preserves,
                              projectively_equal, psi, psi_embed, random_symmetric, random_symplectic,
                              siegel_action, sigma, wedge_rep)


def test_psi_examples():
    assert psi(((1, 0), (0, 1)), 7) == RatMatrix.identity(3)
    for n in (1, 2, 5):
        M = psi(((1, 1), (0, 1)), n)
        assert M == RatMatrix([[1, 0, 0], [-n, 1, -2 * n], [1, 0, 1]])
        assert preserves(M, sigma(n))
    with pytest.raises(ValueError):
        psi_embed(2, 0, 0, 1, 3)


def test_psi_homomorphism_gamma0_6():
    rng = random.Random(6)
    for _ in range(30):
        A, B = gamma0_element(6, rng), gamma0_element(6, rng)
        assert psi(mat2_mul(A, B), 6) == psi(A, 6) * psi(B, 6)


def test_phi_equivariance():
    assert phi_equivariance_check(((1, 0), (0, 1)), 3, Q(2, 7))
    assert phi_equivariance_check(((1, 1), (0, 1)), 5, Q(1, 3))

    def corrupted(A, n):
        M = psi(A, n)
        rows = [[M[i, j] for j in range(3)] for i in range(3)]
        rows[0][1] += 1
        return RatMatrix(rows)

    assert not phi_equivariance_check(((1, 1), (0, 1)), 5, Q(1, 3), embed=corrupted)


def test_wedge_identity_and_gram():
    assert wedge_rep(RatMatrix.identity(4)) == RatMatrix.identity(5)
    for g in SP4_GENERATORS:
        assert is_symplectic(g)
        P = Psi(g)
        assert P.transpose() * GRAM5 * P == GRAM5


def test_literal_twist_is_not_equivariant():
    rng = random.Random(0)
    misses = 0
    for _ in range(100):
        g = random_symplectic(rng)
        tau = random_symmetric(rng)
        try:
            image = siegel_action(g, tau)
        except ZeroDivisionError:
            continue
        assert projectively_equal(Psi(g) * phi_tau(tau), phi_tau(image))
        if not projectively_equal(Psi_literal(g) * phi_tau(tau), phi_tau(image)):
            misses += 1
    assert misses > 0


def test_literal_twist_keeps_form_and_products():
    rng = random.Random(2)
    g, h = random_symplectic(rng), random_symplectic(rng)
    P = Psi_literal(g)
    assert P.transpose() * GRAM5 * P == GRAM5
    assert Psi_literal(g * h) == Psi_literal(g) * Psi_literal(h)


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10**6))
def test_Psi_homomorphism(seed):
    rng = random.Random(seed)
    g, h = random_symplectic(rng, 4), random_symplectic(rng, 4)
    assert is_symplectic(g * h)
    assert Psi(g * h) == Psi(g) * Psi(h)


def test_report():
    rep = lattice_checks(20, seed=3)
    assert rep.passed and rep.to_dict()["passed"]
