"""Rank-one BCOV formula, its boundary conditions, and the eta-product comparison."""
from __future__ import annotations

from dataclasses import asdict, dataclass, field
from fractions import Fraction

import mpmath

from .etaprod import CUSP_FORM, classify, eta_bcov, group, thompson_rows
from .exactalg import ZERO, Q, Rational, UniPoly, fmt, q
from .pfode import INF, MP_DPS, SingularPoint, ThetaOperator
from .qseries import PuiseuxSeries

PASS, FAIL = "PASS", "FAIL"


# ---------------------------------------------------------------- discriminant components


def regular_exponent(point: SingularPoint) -> Rational:
    """Exponent of (x - rho) making tau regular at a finite point: (sum of exponents - 3)/3."""
    if not point.rational_exponents:
        raise ValueError(f"non-rational exponents at {point.location_text()}")
    return (sum(point.exponents, ZERO) - 3) / 3


def _rationalize(z, max_den: int = 10**15) -> Rational:
    with mpmath.workdps(MP_DPS):
        frac = Fraction(mpmath.nstr(mpmath.re(z), MP_DPS - 10, strip_zeros=False)).limit_denominator(max_den)
    return q(frac)


def discriminant_components(L: ThetaOperator) -> list:
    """[(D_i(x), r_i)]: D_i(0) = 1 collects the finite nonzero singular points sharing r_i != 0."""
    groups: dict = {}
    for p in L.pscheme.points:
        if p.is_infinity or (p.is_exact and p.location == 0):
            continue
        r = regular_exponent(p)
        if r:
            groups.setdefault(r, []).append(p)
    out = []
    for r, pts in sorted(groups.items()):
        exact = UniPoly([1])
        with mpmath.workdps(MP_DPS):
            num = [mpmath.mpc(1)]
            for p in pts:
                if p.is_exact:
                    exact = exact * UniPoly([1, -1 / p.location])
                else:
                    inv = 1 / mpmath.mpc(p.location)
                    new = [mpmath.mpc(0)] * (len(num) + 1)
                    for i, c in enumerate(num):
                        new[i] += c
                        new[i + 1] -= c * inv
                    num = new
        D = exact * UniPoly([_rationalize(c) for c in num])
        out.append((D, r))
    _check_components(L, out)
    return out


def _check_components(L: ThetaOperator, comps: list) -> None:
    P = UniPoly([L.coeff(k, L.order) for k in range(L.degree + 1)])
    for D, r in comps:
        if not (P % D).is_zero():
            raise ArithmeticError(f"component {D} does not divide the leading coefficient")


def conifold_discriminant(L: ThetaOperator) -> UniPoly:
    """Product of the components with exponent -1/2."""
    out = UniPoly([1])
    for D, r in discriminant_components(L):
        if r == Q(-1, 2):
            out = out * D
    return out


# ---------------------------------------------------------------- exponents


@dataclass
class BcovExponents:
    components: list = field(default_factory=list)  # [(UniPoly, Rational)]
    a: Rational | None = None

    @classmethod
    def regular(cls, L: ThetaOperator, a=None) -> "BcovExponents":
        return cls(discriminant_components(L), None if a is None else q(a))

    @classmethod
    def conifold_only(cls, dis: UniPoly, a=None) -> "BcovExponents":
        return cls([(dis, Q(-1, 2))], None if a is None else q(a))


def _dis_factor(e: BcovExponents, x: PuiseuxSeries, T: int) -> PuiseuxSeries:
    out = PuiseuxSeries.one()
    for D, r in e.components:
        Dx = PuiseuxSeries.from_coeffs(D.c).compose(x).truncate(T)
        out = out * Dx.pow_rat(r)
    return out


def tau_bcov_rank1(L: ThetaOperator, e: BcovExponents, T: int = 30) -> PuiseuxSeries:
    """(1/w0^2) (q dx/dq) prod D_i(x)^(r_i) x^(-1+a), as a q-series."""
    if e.a is None:
        raise ValueError("exponent a unresolved")
    N = T + 2
    x = L.mirror_map(N)
    w0, _, _ = L.frobenius_mum(N)
    w0q = w0.compose(x)
    tau = x.theta() * _dis_factor(e, x, N) * x.pow_rat(e.a - 1) / (w0q * w0q)
    return tau.truncate(tau.valuation() + T)


def compare_up_to_constant(s: PuiseuxSeries, t: PuiseuxSeries, upto=None):
    """(True, c) when s = c t to the common precision (or to exponent upto)."""
    if s.is_zero() or t.is_zero():
        return (s.is_zero() and t.is_zero(), None)
    if s.valuation() != t.valuation():
        return False, None
    c = s.leading_coefficient() / t.leading_coefficient()
    return s.agrees(t.scale(c), upto), c


# ---------------------------------------------------------------- boundary conditions


def conifold_check(L: ThetaOperator, kappa, T: int = 30, dis: UniPoly | None = None):
    """(True, const) iff C(x) dis(x) x^2 is constant to order T."""
    dis = conifold_discriminant(L) if dis is None else dis
    C = L.yukawa(kappa, T)
    prod = (C * PuiseuxSeries.from_coeffs(dis.c)).mul_monomial(2).truncate(T)
    c0 = prod.coeff(0)
    return prod.agrees(PuiseuxSeries([c0]), T), c0


def coupling_identity(L: ThetaOperator, kappa, T: int = 30):
    """C x^2 prod D_i^(-2 r_i) constant: the general form of the conifold identity."""
    C = L.yukawa(kappa, T)
    prod = C.mul_monomial(2)
    for D, r in discriminant_components(L):
        prod = prod * PuiseuxSeries.from_coeffs(D.c).with_default_prec(T).pow_rat(-2 * r)
    prod = prod.truncate(T)
    c0 = prod.coeff(0)
    return prod.agrees(PuiseuxSeries([c0]), T), c0


def orbifold_a(L: ThetaOperator, point=INF) -> Rational:
    """a = -rho with rho the least exponent at infinity (x~ = 1/x)."""
    ps = L.pscheme
    pt = ps.at(point) if not isinstance(point, SingularPoint) else point
    if not pt.is_infinity:
        raise ValueError("the x-exponent a is fixed by the boundary point at infinity")
    if pt.is_lcsl or pt.is_conifold or not pt.is_orbifold_candidate:
        raise ValueError("not an orbifold point")
    return -min(pt.exponents)


def orbifold_regular(L: ThetaOperator, a) -> bool:
    """tau ~ x~^(-a - rho) near infinity; regular and nonvanishing only for a = -rho_min."""
    pt = L.pscheme.at(INF)
    return -q(a) - min(pt.exponents) == 0


# ---------------------------------------------------------------- conjecture


@dataclass
class ConjectureReport:
    label: str
    n: int
    n_cusps: int
    gamma: str
    a: str | None
    b: str | None
    b_source: str | None
    identity: str
    constant: str | None
    cusp: str | None
    verdict: str
    notes: list = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return self.verdict == "verified"

    def to_dict(self) -> dict:
        d = asdict(self)
        d["passed"] = self.passed
        return d


def _thompson_for(n: int, c: Rational):
    try:
        rows = thompson_rows(n)
    except LookupError:
        return None
    return next((r for r in rows if r.c == c), None)


def b_candidates(table_b=None, max_den: int = 12, max_num: int = 24):
    seen = set()
    if table_b is not None:
        seen.add(table_b)
        yield table_b
    for d in range(1, max_den + 1):
        for m in range(0, max_num + 1):
            for s in ((m,) if m == 0 else (m, -m)):
                b = Q(s, d)
                if b not in seen:
                    seen.add(b)
                    yield b


def identity_holds(L: ThetaOperator, n: int, a, b, T: int = 30):
    """tau(a)^(-1) = const x^(-b) eta_bcov to relative order T."""
    e = BcovExponents.regular(L, a)
    tau = tau_bcov_rank1(L, e, T)
    x = L.mirror_map(T + 2)
    rhs = x.pow_rat(-q(b)) * eta_bcov(n).expand(T + 2)
    inv = tau.inverse(T)
    return compare_up_to_constant(inv, rhs, inv.valuation() + T)


def check_conjecture(L: ThetaOperator, n: int | None = None, T: int = 30, max_den: int = 12, max_num: int = 24):
    n = n or L.n
    g = group(n)
    E = eta_bcov(n)
    gam = E.leading_exponent
    label = L.type_name or str(n)
    notes = []
    if g.n_cusps == 1:
        inf = L.pscheme.at(INF)
        if inf.is_orbifold_candidate:
            a = orbifold_a(L)
            src = "orbifold"
        else:
            a = -min(inf.exponents)
            src = "infinity"
            notes.append("no orbifold point; a from the least exponent at infinity")
        b = gam + a
        ok, const = identity_holds(L, n, a, 0, T)
        cusp = classify(E)
        verdict = "verified" if ok and b == 0 and cusp == CUSP_FORM else "failed"
        if b != 0:
            notes.append(f"gamma + a = {fmt(b)} != 0")
        return ConjectureReport(label, n, 1, fmt(gam), fmt(a), fmt(b), src, PASS if ok else FAIL,
                                None if const is None else fmt(const), cusp, verdict, notes)
    # several cusps: a is free; look for b with x^(-b) eta_bcov a cusp form
    c = L.mirror_map(3).inverse(3).coeff(0)
    row = _thompson_for(n, c)
    table_b = row.b if row is not None else None
    found, cusp = None, None
    if row is None:
        notes.append("no eta product for the hauptmodul with this constant")
        if table_b is not None:
            found = table_b
    else:
        for b in b_candidates(table_b, max_den, max_num):
            kind = classify(row.quotient ** b * E)
            if kind == CUSP_FORM:
                found, cusp = b, kind
                break
    if found is None:
        return ConjectureReport(label, n, g.n_cusps, fmt(gam), None, None, None, "n/a", None, None,
                                "not found within bounds", notes)
    a = found - gam
    ok, const = identity_holds(L, n, a, found, T)
    src = "table" if table_b is not None and found == table_b else "search"
    return ConjectureReport(label, n, g.n_cusps, fmt(gam), fmt(a), fmt(found), src, PASS if ok else FAIL,
                            None if const is None else fmt(const), cusp, "verified" if ok else "failed", notes)
