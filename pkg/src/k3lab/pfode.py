"""Picard-Fuchs operators in theta form.

An operator is sum_k x^k p_k(theta) with theta = x d/dx. This module applies
operators to (log-)series, builds Frobenius solutions at a point of maximal
unipotent monodromy, computes mirror maps, local exponents, Riemann schemes
and the Yukawa coupling.
"""
from __future__ import annotations

import re
from dataclasses import dataclass, field
from functools import cached_property
from pathlib import Path
from typing import Sequence

import mpmath

from .exactalg import (
    ONE,
    ZERO,
    Q,
    Rational,
    UniPoly,
    fmt,
    mp_eval,
    numeric_roots,
    poly_gcd,
    q,
    rational_reconstruct,
    rational_roots,
    squarefree_decomposition,
)
from .qseries import LogSeries, PuiseuxSeries

MP_DPS = 60
EXP_TOL = 1e-10


def stirling2(j: int, i: int) -> int:
    """Stirling numbers of the second kind."""
    if j == i:
        return 1
    if i == 0 or i > j:
        return 0
    return i * stirling2(j - 1, i) + stirling2(j - 1, i - 1)


class ThetaOperator:
    """sum_k x^k p_k(theta)."""

    def __init__(self, rows: Sequence, order: int | None = None, n: int | None = None, type_name: str | None = None):
        polys = [r if isinstance(r, UniPoly) else UniPoly(r) for r in rows]
        while len(polys) > 1 and polys[-1].is_zero():
            polys.pop()
        self.rows = tuple(polys)
        self.order = order if order is not None else max(p.degree for p in polys)
        if any(p.degree > self.order for p in polys):
            raise ValueError("a coefficient polynomial exceeds the operator order")
        self.n = n
        self.type_name = type_name

    # basic data ---------------------------------------------------------
    @property
    def degree(self) -> int:
        return len(self.rows) - 1

    def coeff(self, k: int, j: int) -> Rational:
        return self.rows[k][j] if k < len(self.rows) else ZERO

    def matrix(self) -> list:
        return [[self.coeff(k, j) for j in range(self.order + 1)] for k in range(len(self.rows))]

    def is_mum(self) -> bool:
        return self.rows[0] == UniPoly([0] * self.order + [1])

    def normalized(self) -> "ThetaOperator":
        lead = self.rows[0].lc()
        if not lead:
            raise ValueError("p_0 vanishes")
        return ThetaOperator([p * (ONE / lead) for p in self.rows], self.order, self.n, self.type_name)

    def __eq__(self, other) -> bool:
        return isinstance(other, ThetaOperator) and self.order == other.order and self.rows == other.rows

    def __hash__(self):
        return hash((self.order, self.rows))

    def __repr__(self) -> str:
        tag = f" {self.type_name}" if self.type_name else ""
        return f"<ThetaOperator{tag} order={self.order} degree={self.degree}>"

    def render(self) -> str:
        parts = []
        for k, p in enumerate(self.rows):
            if p.is_zero():
                continue
            body = p.pretty("θ")
            mono = "" if k == 0 else ("x" if k == 1 else f"x^{k}")
            parts.append(f"{mono}*({body})" if mono else f"({body})")
        return " + ".join(parts)

    # file format ---------------------------------------------------------
    def to_text(self) -> str:
        head = f"pfo order={self.order} n={self.n if self.n is not None else 0} type={self.type_name or '-'}"
        lines = [head]
        for k in range(len(self.rows)):
            lines.append(f"x^{k} : " + " ".join(fmt(self.coeff(k, j)) for j in range(self.order + 1)))
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text: str) -> "ThetaOperator":
        lines = [ln.strip() for ln in text.splitlines() if ln.strip() and not ln.lstrip().startswith("#")]
        m = re.fullmatch(r"pfo\s+order=(\d+)\s+n=(\d+)\s+type=(\S+)", lines[0])
        if not m:
            raise ValueError("bad pfo header")
        order, n, label = int(m.group(1)), int(m.group(2)), m.group(3)
        rows: dict = {}
        for ln in lines[1:]:
            mm = re.fullmatch(r"x\^(\d+)\s*:\s*(.*)", ln)
            if not mm:
                raise ValueError(f"bad pfo line {ln!r}")
            vals = mm.group(2).split()
            if len(vals) != order + 1:
                raise ValueError(f"expected {order + 1} coefficients in {ln!r}")
            rows[int(mm.group(1))] = [q(v) for v in vals]
        deg = max(rows)
        mat = [rows.get(k, [ZERO] * (order + 1)) for k in range(deg + 1)]
        return cls(mat, order, n or None, None if label == "-" else label)

    @classmethod
    def load(cls, path) -> "ThetaOperator":
        return cls.from_text(Path(path).read_text())

    def save(self, path) -> None:
        Path(path).write_text(self.to_text())

    # action --------------------------------------------------------------
    def apply(self, f):
        """sum_k x^k p_k(theta) f for a PuiseuxSeries or LogSeries."""
        log = isinstance(f, LogSeries)
        powers = [f]
        for _ in range(self.order):
            powers.append(powers[-1].theta())
        out = None
        for k, p in enumerate(self.rows):
            term = None
            for j, c in enumerate(p.c):
                if c:
                    t = powers[j] * c
                    term = t if term is None else term + t
            if term is None:
                continue
            term = term.mul_monomial(k)
            out = term if out is None else out + term
        if out is None:
            return LogSeries(PuiseuxSeries.zero()) if log else PuiseuxSeries.zero()
        return out

    # Frobenius at 0 -------------------------------------------------------
    def _require_mum(self):
        if not self.is_mum():
            raise ValueError("indicial at 0 is not theta^r")

    def frobenius_eps(self, T: int) -> list:
        """a_n(eps) for n < T, each a list of length r (eps-truncated)."""
        self._require_mum()
        r = self.order
        taylor = {}
        out = [[ONE] + [ZERO] * (r - 1)]
        for nn in range(1, T):
            acc = [ZERO] * r
            for k in range(1, min(nn, self.degree) + 1):
                prev = out[nn - k]
                tk = taylor.get((k, nn - k))
                if tk is None:
                    tk = (self.rows[k].taylor(nn - k) + [ZERO] * r)[:r]
                    taylor[(k, nn - k)] = tk
                for i in range(r):
                    if not tk[i]:
                        continue
                    for jj in range(r - i):
                        if prev[jj]:
                            acc[i + jj] += tk[i] * prev[jj]
            inv = _inv_shift_power(nn, r)
            a = [ZERO] * r
            for i in range(r):
                if acc[i]:
                    for jj in range(r - i):
                        a[i + jj] -= acc[i] * inv[jj]
            out.append(a)
        return out

    def w0_coeffs(self, T: int) -> list:
        return [a[0] for a in self.frobenius_eps(T)]

    def frobenius_mum(self, T: int = 100):
        """(w0, w1, w2) with w1 = w0 L + g, w2 = w0 L^2/2 + g L + h."""
        eps = self.frobenius_eps(T)
        ser = [PuiseuxSeries.from_coeffs([a[i] for a in eps], T) for i in range(self.order)]
        w0 = ser[0]
        w1 = LogSeries(ser[1], w0)
        w2 = LogSeries(ser[2], ser[1], w0.scale(Q(1, 2))) if self.order >= 3 else None
        return w0, w1, w2

    def mirror_q(self, T: int = 100) -> PuiseuxSeries:
        """q(x) = x exp(g/w0)."""
        eps = self.frobenius_eps(T)
        w0 = PuiseuxSeries.from_coeffs([a[0] for a in eps], T)
        g = PuiseuxSeries.from_coeffs([a[1] for a in eps], T)
        return (g / w0).exp().mul_monomial(1)

    def mirror_map(self, T: int = 100) -> PuiseuxSeries:
        """x(q), the inverse of q(x)."""
        return self.mirror_q(T).revert()

    # d-form ---------------------------------------------------------------
    def to_dform(self) -> list:
        """Coefficients A_j(x) with L = sum_j A_j(x) (d/dx)^j."""
        r = self.order
        out = []
        for i in range(r + 1):
            c = [ZERO] * (self.degree + i + 1)
            for k, p in enumerate(self.rows):
                s = ZERO
                for j in range(i, r + 1):
                    if p[j]:
                        s += p[j] * stirling2(j, i)
                c[k + i] += s
            out.append(UniPoly(c))
        return out

    def discriminant(self) -> UniPoly:
        """Leading d-form coefficient with x^r removed, scaled to constant term 1."""
        P = UniPoly([self.coeff(k, self.order) for k in range(len(self.rows))])
        if P[0] == 0:
            raise ValueError("leading coefficient vanishes at 0")
        return P * (ONE / P[0])

    # local exponents -------------------------------------------------------
    def indicial_at_zero(self) -> UniPoly:
        for p in self.rows:
            if not p.is_zero():
                return p
        return UniPoly()

    def indicial_at_infinity(self) -> UniPoly:
        """Indicial polynomial in u = 1/x: p_D(-s)."""
        return self.rows[-1].reflect(-1)

    def indicial_at(self, point) -> list:
        """Exponents at 0, 'inf' or a rational root of the discriminant."""
        if point == "inf" or point is INF:
            return _exponents_from_poly(self.indicial_at_infinity())
        point = q(point)
        if point == 0:
            return _exponents_from_poly(self.indicial_at_zero())
        return _exact_local(self.to_dform(), point).exponents

    @cached_property
    def pscheme(self) -> "PScheme":
        return pscheme(self)

    def singular_points(self) -> list:
        return list(self.pscheme.points)

    def lcsl_points(self) -> list:
        return [p for p in self.pscheme.points if p.is_lcsl]

    # Yukawa coupling ---------------------------------------------------------
    def yukawa(self, kappa=1, T: int = 100) -> PuiseuxSeries:
        """C(x) with C'/C = -(2/3) A_2/A_3 and C = kappa/x^2 (1 + O(x))."""
        if self.order != 3:
            raise ValueError("Yukawa coupling is implemented for order 3")
        self._require_mum()
        P = PuiseuxSeries.from_coeffs([self.coeff(k, 3) for k in range(len(self.rows))])
        Qp = PuiseuxSeries.from_coeffs(
            [3 * self.coeff(k, 3) + self.coeff(k, 2) for k in range(len(self.rows))]
        )
        ratio = (Qp.with_default_prec(T + 1) / P.with_default_prec(T + 1)) - 3
        h = ratio.mul_monomial(-1)
        integral = PuiseuxSeries(
            [c / (h.v + k + 1) for k, c in enumerate(h.c)], h.v + 1, 1, None if h.p is None else h.p + 1
        ) if h.c else PuiseuxSeries.zero(T)
        body = (integral * Q(-2, 3)).exp().truncate(T)
        return body.mul_monomial(-2, q(kappa))

    def gram_check(self, kappa, T: int = 30) -> bool:
        """The pulled-back coupling is the constant kappa to order T.

        The coupling is normalised by the rank-one Gram entry 2n when the level
        is known, so a wrong kappa fails; without a level only constancy is tested.
        """
        norm = 2 * self.n if self.n else kappa
        return gram_value(self, norm, T).agrees(PuiseuxSeries([q(kappa)]), T)


def _inv_shift_power(n: int, r: int) -> list:
    """Coefficients of (n + eps)^(-r) in eps, truncated at eps^r."""
    out = []
    for i in range(r):
        # (-1)^i C(r+i-1, i) n^(-r-i)
        c = Q(1)
        for t in range(i):
            c = c * (r + t) / (t + 1)
        out.append((-1) ** i * c / Q(n) ** (r + i))
    return out


def gram_value(L: ThetaOperator, kappa, T: int = 30) -> PuiseuxSeries:
    """(1/w0^2) C(x(q)) (q dx/dq)^2 as a q-series."""
    x = L.mirror_map(T + 2)
    w0, _, _ = L.frobenius_mum(T + 2)
    C = L.yukawa(kappa, T + 2)
    Cq = C.mul_monomial(2).compose(x) * x.pow_rat(-2)
    dx = x.theta()
    return (Cq * dx * dx / (w0.compose(x) ** 2)).truncate(T)


# ---------------------------------------------------------------- P-schemes


class _Inf:
    def __repr__(self):
        return "inf"

    def __str__(self):
        return "∞"


INF = _Inf()


@dataclass
class SingularPoint:
    location: object  # Rational, INF, or mpmath number
    exponents: list  # Rationals or mpmath numbers
    defining_poly: UniPoly | None = None
    note: str = ""

    @property
    def is_infinity(self) -> bool:
        return self.location is INF

    @property
    def is_exact(self) -> bool:
        return self.is_infinity or isinstance(self.location, Rational)

    @property
    def rational_exponents(self) -> bool:
        return all(isinstance(e, Rational) for e in self.exponents)

    @property
    def is_lcsl(self) -> bool:
        return self.rational_exponents and len(self.exponents) >= 2 and len(set(self.exponents)) == 1

    @property
    def is_conifold(self) -> bool:
        return (
            not self.is_infinity
            and self.rational_exponents
            and sorted(self.exponents) == [ZERO, Q(1, 2), ONE]
        )

    @property
    def is_orbifold_candidate(self) -> bool:
        ex = self.exponents
        return (
            self.rational_exponents
            and len(set(ex)) == len(ex)
            and any(e.denominator != 1 for e in ex)
            and not self.is_conifold
        )

    @property
    def is_apparent_like(self) -> bool:
        ex = self.exponents
        return (
            not self.is_infinity
            and self.rational_exponents
            and len(set(ex)) == len(ex)
            and all(e.denominator == 1 for e in ex)
        )

    def kind(self) -> str:
        if self.is_lcsl:
            return "LCSL"
        if self.is_conifold:
            return "conifold"
        if self.is_orbifold_candidate:
            return "orbifold"
        if self.is_apparent_like:
            return "integral"
        return "other"

    def location_text(self) -> str:
        if self.is_infinity:
            return "inf"
        if isinstance(self.location, Rational):
            return fmt(self.location)
        return "~" + _num_text(self.location)

    def exponent_texts(self) -> list:
        return [fmt(e) if isinstance(e, Rational) else "~" + _num_text(e) for e in self.exponents]

    def sort_key(self):
        if self.is_infinity:
            return (2, 0.0, 0.0)
        z = complex(self.location) if not isinstance(self.location, Rational) else complex(float(self.location))
        return (0 if abs(z.imag) < 1e-30 else 1, z.real, z.imag)


def _num_text(z) -> str:
    if isinstance(z, mpmath.mpc) and abs(z.imag) > mpmath.mpf(10) ** -30:
        return mpmath.nstr(z, 12)
    return mpmath.nstr(mpmath.re(z), 12)


@dataclass
class PScheme:
    points: list = field(default_factory=list)
    order: int = 3

    def fuchs_sum(self):
        """sum over points of (exponent sum - r(r-1)/2); equals -r(r-1)."""
        r = self.order
        tot = ZERO
        num = mpmath.mpf(0)
        exact = True
        for p in self.points:
            for e in p.exponents:
                if isinstance(e, Rational):
                    tot += e
                else:
                    exact = False
                    num += e
            tot -= Q(r * (r - 1), 2)
        return tot if exact else mpmath.re(num) + mpmath.mpf(int(tot.numerator)) / int(tot.denominator)

    def fuchs_ok(self) -> bool:
        r = self.order
        s = self.fuchs_sum()
        if isinstance(s, Rational):
            return s == -r * (r - 1)
        return abs(s + r * (r - 1)) < 1e-9

    def lcsl(self) -> list:
        return [p for p in self.points if p.is_lcsl]

    def at(self, location):
        for p in self.points:
            if location is INF or location == "inf":
                if p.is_infinity:
                    return p
            elif isinstance(p.location, Rational) and p.location == q(location):
                return p
        raise KeyError(location)

    def table(self) -> str:
        cols = [[p.location_text()] + p.exponent_texts() for p in self.points]
        width = [max(len(c) for c in col) for col in cols]
        lines = []
        for i in range(max(len(c) for c in cols)):
            cells = [col[i].rjust(w) if i < len(col) else " " * w for col, w in zip(cols, width)]
            lines.append("  ".join(cells))
        lines.insert(1, "-" * len(lines[0]))
        return "\n".join(lines)


def _exponents_from_poly(p: UniPoly) -> list:
    """Roots of an exact indicial polynomial with multiplicity."""
    out = []
    for f, mult in squarefree_decomposition(p):
        rr = rational_roots(f)
        g = f
        for r in rr:
            out.extend([r] * mult)
            g = g // UniPoly([-r, 1])
        if g.degree >= 1:
            for z in numeric_roots(g, MP_DPS):
                out.extend([_maybe_rational(z)] * mult)
    return sorted(out, key=_exp_key)


def _exp_key(e):
    if isinstance(e, Rational):
        return (float(e), 0.0)
    z = complex(e)
    return (z.real, z.imag)


def _maybe_rational(z):
    if isinstance(z, mpmath.mpc) and abs(z.imag) > EXP_TOL:
        return z
    x = float(mpmath.re(z))
    r = rational_reconstruct(x, 60)
    if r is not None and abs(mpmath.re(z) - mpmath.mpf(int(r.numerator)) / int(r.denominator)) < EXP_TOL:
        return r
    return z


@dataclass
class _Local:
    exponents: list
    note: str = ""


def _exact_local(A: list, rho: Rational) -> _Local:
    """Local exponents at a rational point from the d-form coefficients."""
    r = len(A) - 1
    vals, lcs = [], []
    lin = UniPoly([-rho, 1])
    for a in A:
        if a.is_zero():
            vals.append(None)
            lcs.append(ZERO)
            continue
        v, cur = 0, a
        while True:
            quo, rem = cur.divmod(lin)
            if not rem.is_zero():
                break
            cur, v = quo, v + 1
        vals.append(v)
        lcs.append(cur(rho))
    return _local_from_orders(vals, lcs, r, exact=True)


def _local_from_orders(vals, lcs, r, exact):
    m = min(v - j for j, v in enumerate(vals) if v is not None)
    note = ""
    if vals[r] is None or vals[r] - r != m:
        note = "irregular"
    if exact:
        ind = UniPoly()
        for j, v in enumerate(vals):
            if v is not None and v - j == m:
                falling = UniPoly([1])
                for t in range(j):
                    falling = falling * UniPoly([-t, 1])
                ind = ind + falling * lcs[j]
        return _Local(_exponents_from_poly(ind), note)
    coeffs = [mpmath.mpc(0)] * (r + 1)
    for j, v in enumerate(vals):
        if v is not None and v - j == m:
            falling = UniPoly([1])
            for t in range(j):
                falling = falling * UniPoly([-t, 1])
            for i, c in enumerate(falling.c):
                coeffs[i] += lcs[j] * (mpmath.mpf(int(c.numerator)) / int(c.denominator))
    while len(coeffs) > 1 and abs(coeffs[-1]) < mpmath.mpf(10) ** (-40):
        coeffs.pop()
    with mpmath.workdps(MP_DPS):
        roots = mpmath.polyroots(list(reversed(coeffs)), maxsteps=400, extraprec=200) if len(coeffs) > 1 else []
    ex = sorted((_maybe_rational(z) for z in roots), key=_exp_key)
    return _Local(ex, note)


def _mp_taylor_lead(a: UniPoly, z, v: int):
    p = a
    fact = 1
    for t in range(v):
        p = p.derivative()
        fact *= t + 1
    return mp_eval(p, z) / fact


def _is_root(g: UniPoly, z) -> bool:
    if g.degree < 1:
        return False
    val = abs(mp_eval(g, z))
    scale = sum(abs(mpmath.mpf(int(c.numerator)) / int(c.denominator)) * abs(z) ** i for i, c in enumerate(g.c))
    return val <= scale * mpmath.mpf(10) ** (-(MP_DPS // 2))


def _numeric_local(A: list, S: UniPoly, z) -> _Local:
    r = len(A) - 1
    vals, lcs = [], []
    with mpmath.workdps(MP_DPS):
        for a in A:
            if a.is_zero():
                vals.append(None)
                lcs.append(mpmath.mpf(0))
                continue
            v, cur = 0, a
            while True:
                g = poly_gcd(S, cur)
                if not _is_root(g, z):
                    break
                cur = cur // g
                v += 1
            vals.append(v)
            lcs.append(_mp_taylor_lead(a, z, v))
        return _local_from_orders(vals, lcs, r, exact=False)


def _cancel_common(A: list) -> list:
    """Divide out a polynomial factor shared by every d-form coefficient (x excluded)."""
    g = None
    for a in A:
        if a.is_zero():
            continue
        k = next(i for i, c in enumerate(a.c) if c)
        core = UniPoly(a.c[k:])
        g = core if g is None else poly_gcd(g, core)
    if g is None or g.degree < 1:
        return A
    return [a // g for a in A]


def pscheme(L: ThetaOperator) -> PScheme:
    """Riemann scheme: 0, the roots of the discriminant, and infinity."""
    pts = [SingularPoint(ZERO, _exponents_from_poly(L.indicial_at_zero()))]
    A = _cancel_common(L.to_dform())
    r = L.order
    P = UniPoly(A[r].c[r:])  # A_r / x^r
    if P.degree >= 1:
        for S, _mult in squarefree_decomposition(P):
            rest = S
            for rho in rational_roots(S):
                if rho == 0:
                    continue
                loc = _exact_local(A, rho)
                pts.append(SingularPoint(rho, loc.exponents, UniPoly([-rho, 1]), loc.note))
                rest = rest // UniPoly([-rho, 1])
            if rest.degree >= 1:
                for z in numeric_roots(rest, MP_DPS):
                    loc = _numeric_local(A, rest, z)
                    pts.append(SingularPoint(z, loc.exponents, rest, loc.note))
    inf_ex = _exponents_from_poly(L.indicial_at_infinity())
    note = "" if L.rows[-1].degree == r else "irregular"
    pts.append(SingularPoint(INF, inf_ex, None, note))
    pts.sort(key=lambda p: p.sort_key())
    return PScheme(pts, r)


def lcsl_points(L: ThetaOperator) -> list:
    return L.lcsl_points()


def yukawa(L: ThetaOperator, kappa, T: int = 100) -> PuiseuxSeries:
    return L.yukawa(kappa, T)


def gram_check(L: ThetaOperator, kappa, T: int = 30) -> bool:
    return L.gram_check(kappa, T)


def theta_operator(spec: dict, order: int = 3, **meta) -> ThetaOperator:
    """Build an operator from {k: UniPoly-in-theta}."""
    deg = max(spec)
    rows = [spec.get(k, UniPoly()) for k in range(deg + 1)]
    return ThetaOperator(rows, order, **meta)


THETA = UniPoly([0, 1])
