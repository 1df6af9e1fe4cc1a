"""Explicit lattice realisations of Gamma0(n) and Sp(4, Z).

psi sends Gamma0(n) into O(U + <2n>); the wedge representation sends Sp(4, Z)
to SO(U + U + <-2>) on the orthogonal complement of W = e1^e3 - e2^e4.
"""
from __future__ import annotations

import random
from dataclasses import asdict, dataclass
from math import gcd
from typing import Sequence

from .exactalg import ONE, Q, RatMatrix, Rational, q

# ---------------------------------------------------------------- Gamma0(n)


def sigma(n: int) -> RatMatrix:
    return RatMatrix([[0, 1, 0], [1, 0, 0], [0, 0, 2 * n]])


def psi_embed(a, b, c, d, n: int) -> RatMatrix:
    a, b, c, d = (q(v) for v in (a, b, c, d))
    if a * d - b * c != 1:
        raise ValueError("psi needs a determinant-one matrix")
    return RatMatrix([
        [d * d, -c * c / n, 2 * c * d],
        [-n * b * b, a * a, -2 * n * a * b],
        [b * d, -a * c / n, a * d + b * c],
    ])


def psi(A: Sequence[Sequence], n: int) -> RatMatrix:
    (a, b), (c, d) = A
    return psi_embed(a, b, c, d, n)


def preserves(M: RatMatrix, G: RatMatrix) -> bool:
    return M.transpose() * G * M == G


def phi_t(t, n: int) -> list:
    t = q(t)
    return [ONE, -n * t * t, t]


def phi_equivariance_check(A: Sequence[Sequence], n: int, t, embed=psi) -> bool:
    """psi(A) phi(t) = ((ct+d)^2, -n(at+b)^2, (ct+d)(at+b)) exactly."""
    (a, b), (c, d) = ((q(v) for v in row) for row in A)
    t = q(t)
    den = c * t + d
    if den == 0:
        raise ZeroDivisionError("ct + d = 0")
    lhs = embed(A, n) * phi_t(t, n)
    num = a * t + b
    return lhs == [den * den, -n * num * num, den * num]


def gamma0_element(n: int, rng: random.Random, size: int = 30) -> tuple:
    """Random ((a, b), (c, d)) in Gamma0(n)."""
    while True:
        c = n * rng.randint(-size, size)
        d = rng.randint(-size, size)
        if d == 0 or gcd(c, d) != 1:
            continue
        # a d - b c = 1
        g, s, t = _egcd(d, -c)
        a, b = s, t
        k = rng.randint(-3, 3)
        a, b = a + k * c, b + k * d  # keeps a d - b c = 1
        return ((a, b), (c, d))


def _egcd(x: int, y: int):
    """(g, s, t) with s x + t y = g = +-1 handled so that g = 1."""
    old_r, r = x, y
    old_s, s = 1, 0
    old_t, t = 0, 1
    while r:
        k = old_r // r
        old_r, r = r, old_r - k * r
        old_s, s = s, old_s - k * s
        old_t, t = t, old_t - k * t
    if old_r < 0:
        old_r, old_s, old_t = -old_r, -old_s, -old_t
    return old_r, old_s, old_t


def mat2_mul(A, B) -> tuple:
    (a, b), (c, d) = A
    (e, f), (g, h) = B
    return ((a * e + b * g, a * f + b * h), (c * e + d * g, c * f + d * h))


# ---------------------------------------------------------------- wedge representation

I4 = RatMatrix([[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 1, 0], [0, 0, 0, -1]])
J4 = RatMatrix([[0, 0, 1, 0], [0, 0, 0, 1], [-1, 0, 0, 0], [0, -1, 0, 0]])
# Basis of W-perp: E1, F1, E2, F2, A = e12, e34, e23, e14, e13 + e24.
_PAIRS = ((0, 1), (2, 3), (1, 2), (0, 3))
GRAM5 = RatMatrix([
    [0, 1, 0, 0, 0],
    [1, 0, 0, 0, 0],
    [0, 0, 0, 1, 0],
    [0, 0, 1, 0, 0],
    [0, 0, 0, 0, -2],
])


def _wedge(i: int, j: int) -> RatMatrix:
    m = [[0] * 4 for _ in range(4)]
    m[i][j], m[j][i] = 1, -1
    return RatMatrix(m)


def _basis() -> list:
    out = [_wedge(i, j) for i, j in _PAIRS]
    out.append(_wedge(0, 2) + _wedge(1, 3))
    return out


W_ELEMENT = _wedge(0, 2) - _wedge(1, 3)


def _coords(X: RatMatrix) -> list:
    """Coordinates of an antisymmetric X in the W-perp basis; X must lie in W-perp."""
    if X[0, 2] != X[1, 3]:
        raise ValueError("W not preserved")
    return [X[0, 1], X[2, 3], X[1, 2], X[0, 3], X[0, 2]]


def wedge_pairing(X: RatMatrix, Y: RatMatrix) -> Rational:
    """X ^ Y = (X, Y) e1^e2^e3^e4 for antisymmetric X, Y (x_ij = X[i][j], i < j)."""
    x = lambda i, j: X[i, j]
    y = lambda i, j: Y[i, j]
    return (x(0, 1) * y(2, 3) + x(2, 3) * y(0, 1) - x(0, 2) * y(1, 3) - x(1, 3) * y(0, 2)
            + x(0, 3) * y(1, 2) + x(1, 2) * y(0, 3))


def rho_wedge(g: RatMatrix, X: RatMatrix) -> RatMatrix:
    return g * X * g.transpose()


def wedge_rep(g) -> RatMatrix:
    """5x5 matrix (acting on column coordinates) of X -> g X tg on W-perp."""
    g = g if isinstance(g, RatMatrix) else RatMatrix(g)
    if g.det() != 1:
        raise ValueError("wedge_rep needs det g = 1")
    if rho_wedge(g, W_ELEMENT) != W_ELEMENT:
        raise ValueError("W not preserved")
    cols = [_coords(rho_wedge(g, B)) for B in _basis()]
    return RatMatrix([[cols[j][i] for j in range(5)] for i in range(5)])


def is_symplectic(g: RatMatrix) -> bool:
    return g.transpose() * J4 * g == J4


SWAP = RatMatrix([[0, 0, 1, 0], [0, 0, 0, 1], [1, 0, 0, 0], [0, 1, 0, 0]])


def _symplectic(g) -> RatMatrix:
    g = g if isinstance(g, RatMatrix) else RatMatrix(g)
    if not is_symplectic(g):
        raise ValueError("Psi needs a symplectic matrix")
    return g


def Psi(g) -> RatMatrix:
    """rho_wedge(I S g S I), S swapping the two 2x2 blocks; compatible with phi.

    phi(tau) is the Pluecker vector of the rows of [1 | tau] I, and g moves the
    column span of (tau; 1), so the twist S g S carries one plane to the other.
    """
    g = _symplectic(g)
    return wedge_rep(I4 * SWAP * g * SWAP * I4)


def Psi_literal(g) -> RatMatrix:
    """rho_wedge(I g I): an isometric homomorphism, but not phi-equivariant."""
    return wedge_rep(I4 * _symplectic(g) * I4)


def _blocks(g: RatMatrix):
    A = RatMatrix([[g[i, j] for j in (0, 1)] for i in (0, 1)])
    B = RatMatrix([[g[i, j] for j in (2, 3)] for i in (0, 1)])
    C = RatMatrix([[g[i, j] for j in (0, 1)] for i in (2, 3)])
    D = RatMatrix([[g[i, j] for j in (2, 3)] for i in (2, 3)])
    return A, B, C, D


def siegel_action(g: RatMatrix, tau: RatMatrix) -> RatMatrix:
    """(A tau + B)(C tau + D)^-1."""
    A, B, C, D = _blocks(g)
    den = C * tau + D
    if den.det() == 0:
        raise ZeroDivisionError("C tau + D is singular")
    return (A * tau + B) * den.inverse()


def phi_tau(tau: RatMatrix) -> list:
    return [ONE, -tau.det(), -tau[0, 0], -tau[1, 1], tau[0, 1]]


def projectively_equal(u: Sequence, v: Sequence) -> bool:
    """u = c v for one nonzero rational c."""
    u, v = [q(a) for a in u], [q(a) for a in v]
    k = next((i for i, a in enumerate(v) if a), None)
    if k is None or not u[k]:
        return False
    c = u[k] / v[k]
    return all(a == c * b for a, b in zip(u, v))


def h2_equivariance_check(g: RatMatrix, tau: RatMatrix) -> bool:
    """Psi(g) phi(tau) is proportional to phi(g * tau)."""
    return projectively_equal(Psi(g) * phi_tau(tau), phi_tau(siegel_action(g, tau)))


def equal_up_to_sign(M: RatMatrix, N: RatMatrix) -> bool:
    return M == N or M == -N


# ---------------------------------------------------------------- random symplectic matrices


def _sym_translation(b11: int, b12: int, b22: int) -> RatMatrix:
    return RatMatrix([[1, 0, b11, b12], [0, 1, b12, b22], [0, 0, 1, 0], [0, 0, 0, 1]])


def _gl2_block(a: Sequence[Sequence[int]]) -> RatMatrix:
    A = RatMatrix(a)
    Ait = A.inverse().transpose()
    m = [[0] * 4 for _ in range(4)]
    for i in range(2):
        for j in range(2):
            m[i][j] = A[i, j]
            m[i + 2][j + 2] = Ait[i, j]
    return RatMatrix(m)


SP4_GENERATORS = (
    J4,
    _sym_translation(1, 0, 0),
    _sym_translation(0, 1, 0),
    _sym_translation(0, 0, 1),
    _gl2_block([[1, 1], [0, 1]]),
    _gl2_block([[0, 1], [1, 0]]),
    _gl2_block([[1, 0], [0, -1]]),
)


def random_symplectic(rng: random.Random, length: int = 8) -> RatMatrix:
    g = RatMatrix.identity(4)
    for _ in range(length):
        h = rng.choice(SP4_GENERATORS)
        if rng.random() < 0.5:
            h = h.inverse()
        g = g * h
    return g


def random_symmetric(rng: random.Random, size: int = 20) -> RatMatrix:
    r = lambda: Q(rng.randint(-size, size), rng.randint(1, size))
    a, b, c = r(), r(), r()
    return RatMatrix([[a, b], [b, c]])


# ---------------------------------------------------------------- batch report


@dataclass
class LatticeReport:
    instances: int
    psi_orthogonal: int
    psi_homomorphism: int
    phi_equivariant: int
    wedge_gram: int
    wedge_homomorphism: int
    h2_equivariant: int

    @property
    def passed(self) -> bool:
        return all(getattr(self, k) == self.instances for k in
                   ("psi_orthogonal", "psi_homomorphism", "phi_equivariant", "wedge_gram",
                    "wedge_homomorphism", "h2_equivariant"))

    def to_dict(self) -> dict:
        d = asdict(self)
        d["passed"] = self.passed
        return d


def lattice_checks(instances: int = 100, seed: int = 0, levels=(2, 5, 10, 36)) -> LatticeReport:
    """Count the exact successes of each identity on random inputs."""
    rng = random.Random(seed)
    counts = dict.fromkeys(("orth", "hom", "phi", "gram", "whom", "h2"), 0)
    for i in range(instances):
        n = levels[i % len(levels)]
        A, B = gamma0_element(n, rng), gamma0_element(n, rng)
        pA = psi(A, n)
        counts["orth"] += preserves(pA, sigma(n))
        counts["hom"] += psi(mat2_mul(A, B), n) == pA * psi(B, n)
        (a, b), (c, d) = A
        while True:
            t = Q(rng.randint(-50, 50), rng.randint(1, 50))
            if c * t + d != 0:
                break
        counts["phi"] += phi_equivariance_check(A, n, t)
        g, h = random_symplectic(rng), random_symplectic(rng)
        Pg = Psi(g)
        counts["gram"] += preserves(Pg, GRAM5)
        counts["whom"] += equal_up_to_sign(Psi(g * h), Pg * Psi(h))
        while True:
            tau = random_symmetric(rng)
            _, _, C, D = _blocks(g)
            if (C * tau + D).det() != 0:
                break
        counts["h2"] += h2_equivariance_check(g, tau)
    return LatticeReport(instances, counts["orth"], counts["hom"], counts["phi"], counts["gram"],
                         counts["whom"], counts["h2"])
