"""Eisenstein series and the Weierstrass family pipeline.

The family x = a1^3 a2^2 a3 / a0^6 of plane cubics has the second-order
Picard-Fuchs operator theta^2 - 12x(6 theta + 5)(6 theta + 1). Its mirror map,
period and BCOV combination are compared with E4, eta and j below.
"""
from __future__ import annotations

from dataclasses import asdict, dataclass, field

from .bcov import compare_up_to_constant
from .etaprod import EtaQuotient
from .exactalg import Q, RatMatrix, Rational, UniPoly, fmt
from .pfode import INF, ThetaOperator
from .qseries import PuiseuxSeries

CONIFOLD = Q(1, 432)
# Exponent of 1/w0 in the BCOV combination: r + 1 for a rank-one family of
# curves once h11 and the Euler number are set to zero.
W0_POWER = 3
# (1 - 432x)^(-1-1/12) x^(-1-1/12)
DIS_POWER = Q(-13, 12)


def divisor_sigma(n: int, k: int) -> int:
    return sum(d**k for d in range(1, n + 1) if n % d == 0)


_EIS = {2: (-24, 1), 4: (240, 3), 6: (-504, 5)}


@dataclass(frozen=True)
class EisensteinSeries:
    weight: int
    expansion: PuiseuxSeries

    def __post_init__(self):
        if self.expansion.coeff(0) != 1:
            raise ValueError("Eisenstein series are normalised to constant term 1")


def eisenstein(k: int, T: int = 100) -> EisensteinSeries:
    """E_k = 1 + c_k sum sigma_{k-1}(n) q^n with coefficients through q^T."""
    if k not in _EIS:
        raise ValueError("weight must be 2, 4 or 6")
    c, s = _EIS[k]
    coeffs = [Q(1)] + [Q(c * divisor_sigma(n, s)) for n in range(1, T + 1)]
    return EisensteinSeries(k, PuiseuxSeries.from_coeffs(coeffs, T + 1))


def E4(T: int = 100) -> PuiseuxSeries:
    return eisenstein(4, T).expansion


def E6(T: int = 100) -> PuiseuxSeries:
    return eisenstein(6, T).expansion


def eta_power(k: int, T: int = 100) -> PuiseuxSeries:
    """eta(tau)^k, relative order T + 1."""
    return EtaQuotient({1: k}).expand(T + 1)


def delta(T: int = 100) -> PuiseuxSeries:
    return eta_power(24, T)


def weier_pf() -> ThetaOperator:
    """theta^2 - 12x(6 theta + 5)(6 theta + 1)."""
    th = UniPoly([0, 1])
    p1 = (th * 6 + 5) * (th * 6 + 1) * (-12)
    return ThetaOperator([th * th, p1], 2, type_name="E")


def weier_w0_coeff(n: int) -> Rational:
    from math import factorial

    return Q(factorial(6 * n), factorial(3 * n) * factorial(2 * n) * factorial(n))


# ---------------------------------------------------------------- symmetry


def reflect_dform(A: list, c) -> list:
    """d-form coefficients after x = c - u: B_j(u) = (-1)^j A_j(c - u)."""
    return [a.shift(c).reflect(-1) * (-1) ** j for j, a in enumerate(A)]


def proportional_dforms(A: list, B: list) -> bool:
    """A and B define the same equation: A_j B_r = B_j A_r for every j."""
    r = len(A) - 1
    if len(B) != len(A) or A[r].is_zero() or B[r].is_zero():
        return False
    return all(A[j] * B[r] == B[j] * A[r] for j in range(r + 1))


def symmetry_check(L: ThetaOperator | None = None, c=CONIFOLD) -> bool:
    L = weier_pf() if L is None else L
    A = L.to_dform()
    return proportional_dforms(A, reflect_dform(A, c))


# ---------------------------------------------------------------- monodromy

M0 = RatMatrix([[1, 1], [0, 1]])
M1 = RatMatrix([[1, 0], [-1, 1]])
M_INF = RatMatrix([[1, -1], [1, 0]])


def monodromy_consistent() -> bool:
    """M0 M1 M_inf is +-1."""
    prod = M0 * M1 * M_INF
    one = RatMatrix.identity(2)
    return prod == one or prod == -one


def infinity_order(L: ThetaOperator | None = None) -> Rational:
    """Order in 1/x of the BCOV combination near infinity; zero means regular.

    With exponents rho1 < rho2 at infinity, w0 ~ x~^rho1, dx~/dtau ~ x~^(1 + rho1 - rho2)
    and dx = -x~^-2 dx~.
    """
    L = weier_pf() if L is None else L
    rho = sorted(L.pscheme.at(INF).exponents)
    r1, r2 = rho[0], rho[-1]
    return -W0_POWER * r1 + (1 + r1 - r2) - 2 - 2 * DIS_POWER


# ---------------------------------------------------------------- checks


@dataclass
class EllipticReport:
    order: int
    period: bool
    tau_bcov: bool
    tau_constant: str | None
    symmetry: bool
    j_relation: bool
    monodromy: bool
    infinity_order: str
    notes: list = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return self.period and self.tau_bcov and self.symmetry and self.j_relation and self.monodromy

    def to_dict(self) -> dict:
        d = asdict(self)
        d["passed"] = self.passed
        return d


def mirror_map(T: int = 30) -> PuiseuxSeries:
    return weier_pf().mirror_map(T + 2)


def period_check(T: int = 30, x: PuiseuxSeries | None = None):
    """(ok, first differing exponent) for w0(x(q)) = E4^(1/4)."""
    L = weier_pf()
    x = mirror_map(T) if x is None else x
    w0 = L.frobenius_mum(T + 2)[0]
    lhs = w0.compose(x)
    rhs = E4(T + 1).pow_rat(Q(1, 4))
    ok = lhs.agrees(rhs, T + 1)
    return ok, None if ok else lhs.first_difference(rhs)


def tau_bcov(T: int = 30, x: PuiseuxSeries | None = None) -> PuiseuxSeries:
    """(1/w0)^3 (q dx/dq) (1 - 432x)^(-13/12) x^(-13/12)."""
    L = weier_pf()
    N = T + 2
    x = mirror_map(T) if x is None else x
    w0 = L.frobenius_mum(N)[0].compose(x)
    dis = (PuiseuxSeries.one() - x.scale(432)).pow_rat(DIS_POWER)
    tau = x.theta() * dis * x.pow_rat(DIS_POWER) / w0.pow_rat(W0_POWER)
    return tau.truncate(tau.valuation() + T + 1)


def tau_check(T: int = 30, x: PuiseuxSeries | None = None):
    tau = tau_bcov(T, x)
    ok, c = compare_up_to_constant(tau, eta_power(-2, T), tau.valuation() + T + 1)
    return ok, c


def j_check(T: int = 30, x: PuiseuxSeries | None = None) -> bool:
    """1/(x(1 - 432x)) = E4^3/eta^24."""
    x = mirror_map(T) if x is None else x
    lhs = (x * (PuiseuxSeries.one() - x.scale(432))).inverse(T + 2)
    rhs = E4(T + 1).pow_rat(3) * delta(T + 1).inverse(T + 2)
    return lhs.agrees(rhs, T)


def elliptic_checks(T: int = 30) -> EllipticReport:
    x = mirror_map(T)
    per, _ = period_check(T, x)
    ok_tau, c = tau_check(T, x)
    notes = ["j relation tested as 1/(x(1-432x)) = E4^3/Delta, i.e. j itself rather than 1/j"]
    return EllipticReport(
        T, per, ok_tau, None if c is None else fmt(c), symmetry_check(), j_check(T, x),
        monodromy_consistent(), fmt(infinity_order()), notes,
    )
