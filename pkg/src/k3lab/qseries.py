"""Truncated Puiseux series with exact rational coefficients.

A series lives on the exponent grid (1/s)Z. It stores the grid index of its
first coefficient, the coefficients themselves, and an absolute precision:
the grid index below which every coefficient is known. ``prec=None`` marks an
exact (finite) series such as a polynomial or a constant.

Precision bookkeeping follows the usual power-series rules (absolute for sums,
relative for products and powers), so every result only reports coefficients
that are determined by its inputs.
"""
from __future__ import annotations

from fractions import Fraction
from math import gcd
from typing import Iterable, Sequence

from .exactalg import ONE, ZERO, Q, Rational, fmt, q, rational_power

DEFAULT_TRUNC = 100


def _lcm(a: int, b: int) -> int:
    return a * b // gcd(a, b)


def _frac(e) -> Fraction:
    if isinstance(e, Fraction):
        return e
    e = q(e)
    return Fraction(int(e.numerator), int(e.denominator))


def _min_prec(*ps):
    vals = [p for p in ps if p is not None]
    return min(vals) if vals else None


# --------------------------------------------------------- plain list kernels
# Lists are coefficient sequences in an auxiliary variable t, truncated to n.


def mul_trunc(a: Sequence, b: Sequence, n: int) -> list:
    out = [ZERO] * n
    nb = len(b)
    for i, x in enumerate(a[:n]):
        if not x:
            continue
        lim = min(nb, n - i)
        for j in range(lim):
            y = b[j]
            if y:
                out[i + j] += x * y
    return out


def inv_trunc(a: Sequence, n: int) -> list:
    a0 = a[0]
    if not a0:
        raise ZeroDivisionError("series with zero constant term is not invertible")
    inv0 = ONE / a0
    out = [ZERO] * n
    if n:
        out[0] = inv0
    for k in range(1, n):
        s = ZERO
        for j in range(1, min(k, len(a) - 1) + 1):
            if a[j]:
                s += a[j] * out[k - j]
        out[k] = -s * inv0
    return out


def pow_unit(a: Sequence, r, n: int) -> list:
    """(a)^r for a[0] = 1 via the J.C.P. Miller recurrence."""
    r = q(r)
    out = [ZERO] * n
    if not n:
        return out
    out[0] = ONE
    la = len(a)
    for m in range(1, n):
        s = ZERO
        for k in range(1, min(m, la - 1) + 1):
            if a[k]:
                s += ((r + 1) * k - m) * a[k] * out[m - k]
        out[m] = s / m
    return out


def exp_trunc(a: Sequence, n: int) -> list:
    """exp(a) for a[0] = 0."""
    out = [ZERO] * n
    if not n:
        return out
    out[0] = ONE
    la = len(a)
    for m in range(1, n):
        s = ZERO
        for k in range(1, min(m, la - 1) + 1):
            if a[k]:
                s += k * a[k] * out[m - k]
        out[m] = s / m
    return out


def log_trunc(a: Sequence, n: int) -> list:
    """log(a) for a[0] = 1."""
    out = [ZERO] * n
    la = len(a)
    for m in range(1, n):
        s = m * a[m] if m < la else ZERO
        for k in range(1, m):
            if out[k] and m - k < la and a[m - k]:
                s -= k * out[k] * a[m - k]
        out[m] = s / m
    return out


# -------------------------------------------------------------- the series


class PuiseuxSeries:
    """Series sum_k c_k q^((v+k)/s), known below q^(prec/s)."""

    __slots__ = ("s", "v", "c", "p")

    def __init__(self, coeffs: Iterable = (), offset: int = 0, ram: int = 1, prec: int | None = None):
        if ram < 1:
            raise ValueError("ramification must be >= 1")
        c = [q(a) for a in coeffs]
        v = int(offset)
        if prec is not None:
            prec = int(prec)
            c = c[: max(0, prec - v)]
        k = 0
        while k < len(c) and not c[k]:
            k += 1
        c = c[k:]
        v += k
        if prec is None:
            while c and not c[-1]:
                c.pop()
        elif c and prec > v:
            c += [ZERO] * (prec - v - len(c))
        if not c:
            v = prec if prec is not None else 0
        self.s, self.v, self.c, self.p = int(ram), v, c, prec

    # construction -------------------------------------------------------
    @classmethod
    def one(cls) -> "PuiseuxSeries":
        return cls([1])

    @classmethod
    def zero(cls, prec=None, ram: int = 1) -> "PuiseuxSeries":
        return cls([], 0, ram, prec)

    @classmethod
    def monomial(cls, exponent, coeff=1) -> "PuiseuxSeries":
        e = _frac(exponent)
        return cls([coeff], e.numerator, e.denominator)

    @classmethod
    def from_coeffs(cls, coeffs: Sequence, prec: int | None = None, offset: int = 0) -> "PuiseuxSeries":
        """Integer-exponent series sum_k coeffs[k] q^(offset+k), known below q^prec."""
        return cls(coeffs, offset, 1, prec)

    # inspection ---------------------------------------------------------
    @property
    def ram(self) -> int:
        return self.s

    @property
    def offset(self) -> int:
        return self.v

    @property
    def coeffs(self) -> list:
        return list(self.c)

    @property
    def trunc(self) -> int | None:
        """Number of known grid coefficients from the leading one on."""
        return None if self.p is None else self.p - self.v

    def is_exact(self) -> bool:
        return self.p is None

    def is_zero(self) -> bool:
        return not self.c

    def valuation(self) -> Fraction | None:
        """Leading exponent, or None for a (truncated) zero series."""
        return Fraction(self.v, self.s) if self.c else None

    def precision(self) -> Fraction | None:
        return None if self.p is None else Fraction(self.p, self.s)

    def leading_coefficient(self) -> Rational:
        return self.c[0] if self.c else ZERO

    def coeff(self, exponent) -> Rational:
        e = _frac(exponent) * self.s
        if e.denominator != 1:
            return ZERO
        k = int(e) - self.v
        if self.p is not None and int(e) >= self.p:
            raise IndexError(f"coefficient of q^{exponent} beyond precision {self.precision()}")
        if 0 <= k < len(self.c):
            return self.c[k]
        return ZERO

    def __getitem__(self, exponent) -> Rational:
        return self.coeff(exponent)

    def terms(self) -> list:
        """(exponent, coefficient) pairs of nonzero known terms."""
        return [(Fraction(self.v + k, self.s), a) for k, a in enumerate(self.c) if a]

    def int_coeffs(self, start: int, stop: int) -> list:
        """Coefficients of q^start .. q^(stop-1) (integer exponents)."""
        return [self.coeff(k) for k in range(start, stop)]

    # grid handling -------------------------------------------------------
    def regrid(self, s2: int) -> "PuiseuxSeries":
        if s2 == self.s:
            return self
        f, r = divmod(s2, self.s)
        if r:
            raise ValueError("new grid must refine the old one")
        c = []
        for a in self.c:
            c.append(a)
            c.extend([ZERO] * (f - 1))
        c = c[: len(c) - (f - 1)] if c else c
        p = None if self.p is None else self.p * f
        return PuiseuxSeries(c, self.v * f, s2, p)

    def reduced(self) -> "PuiseuxSeries":
        """Same series on the coarsest grid that carries it."""
        g = self.s
        for k, a in enumerate(self.c):
            if a:
                g = gcd(g, self.v + k)
        if self.p is not None:
            g = gcd(g, self.p)
        if self.c:
            g = gcd(g, self.v)
        if g <= 1:
            return self
        c = [a for k, a in enumerate(self.c) if (self.v + k) % g == 0]
        return PuiseuxSeries(c, self.v // g, self.s // g, None if self.p is None else self.p // g)

    @staticmethod
    def _common(a: "PuiseuxSeries", b: "PuiseuxSeries"):
        s = _lcm(a.s, b.s)
        return a.regrid(s), b.regrid(s)

    def _wrap(self, other) -> "PuiseuxSeries":
        if isinstance(other, PuiseuxSeries):
            return other
        return PuiseuxSeries([other])

    # arithmetic ----------------------------------------------------------
    def __add__(self, other):
        a, b = PuiseuxSeries._common(self, self._wrap(other))
        p = _min_prec(a.p, b.p)
        if not a.c:
            lo = b.v
        elif not b.c:
            lo = a.v
        else:
            lo = min(a.v, b.v)
        hi = max(a.v + len(a.c), b.v + len(b.c))
        if p is not None:
            hi = min(hi, p)
            lo = min(lo, p)
        c = [ZERO] * max(0, hi - lo)
        for src in (a, b):
            for k, x in enumerate(src.c):
                i = src.v + k - lo
                if 0 <= i < len(c):
                    c[i] += x
        return PuiseuxSeries(c, lo, a.s, p)

    __radd__ = __add__

    def __neg__(self):
        return PuiseuxSeries([-x for x in self.c], self.v, self.s, self.p)

    def __sub__(self, other):
        return self + (-self._wrap(other))

    def __rsub__(self, other):
        return self._wrap(other) - self

    def scale(self, k) -> "PuiseuxSeries":
        k = q(k)
        return PuiseuxSeries([x * k for x in self.c], self.v, self.s, self.p)

    def __mul__(self, other):
        if not isinstance(other, PuiseuxSeries):
            return self.scale(other)
        a, b = PuiseuxSeries._common(self, other)
        if (not a.c and a.p is None) or (not b.c and b.p is None):
            return PuiseuxSeries.zero(None, a.s)
        p = _min_prec(None if a.p is None else a.p + b.v, None if b.p is None else b.p + a.v)
        if not a.c or not b.c:
            return PuiseuxSeries.zero(p, a.s)
        v = a.v + b.v
        n = len(a.c) + len(b.c) - 1 if p is None else max(0, p - v)
        return PuiseuxSeries(mul_trunc(a.c, b.c, n), v, a.s, p)

    __rmul__ = __mul__

    def mul_monomial(self, exponent, coeff=1) -> "PuiseuxSeries":
        """Exact multiplication by coeff * q^exponent."""
        e = _frac(exponent)
        s = _lcm(self.s, e.denominator)
        a = self.regrid(s)
        sh = e.numerator * (s // e.denominator)
        k = q(coeff)
        return PuiseuxSeries([x * k for x in a.c], a.v + sh, s, None if a.p is None else a.p + sh)

    def truncate(self, exponent) -> "PuiseuxSeries":
        """Forget everything at and above q^exponent."""
        e = _frac(exponent)
        s = _lcm(self.s, e.denominator)
        a = self.regrid(s)
        p = e.numerator * (s // e.denominator)
        if a.p is not None:
            p = min(p, a.p)
        return PuiseuxSeries(a.c, a.v, s, p)

    def with_default_prec(self, rel: int | None = None) -> "PuiseuxSeries":
        """Give an exact series a finite relative precision."""
        if self.p is not None:
            return self
        rel = DEFAULT_TRUNC if rel is None else rel
        return PuiseuxSeries(self.c, self.v, self.s, self.v + rel)

    def inverse(self, rel: int | None = None) -> "PuiseuxSeries":
        if not self.c:
            raise ZeroDivisionError("inverse of a zero series")
        if self.p is None and len(self.c) == 1:
            return PuiseuxSeries([ONE / self.c[0]], -self.v, self.s)
        a = self.with_default_prec(rel)
        n = a.p - a.v
        return PuiseuxSeries(inv_trunc(a.c, n), -a.v, a.s, -a.v + n)

    def __truediv__(self, other):
        if not isinstance(other, PuiseuxSeries):
            return self.scale(ONE / q(other))
        return self * other.inverse()

    def __rtruediv__(self, other):
        return self._wrap(other) * self.inverse()

    def __pow__(self, r):
        return self.pow_rat(r)

    def pow_rat(self, r, rel: int | None = None) -> "PuiseuxSeries":
        """Rational power; the leading coefficient must have a rational r-th power."""
        r = _frac(r)
        if not self.c:
            if r > 0:
                return self
            raise ZeroDivisionError("zero series to a non-positive power")
        if r == 0:
            return PuiseuxSeries.one()
        if self.p is None and len(self.c) == 1:
            lead = rational_power(self.c[0], q(r))
            return PuiseuxSeries.monomial(Fraction(self.v, self.s) * r, lead)
        if r.denominator == 1 and r > 0 and self.p is None:
            out = PuiseuxSeries.one()
            base = self
            k = int(r)
            while k:
                if k & 1:
                    out = out * base
                base = base * base
                k >>= 1
            return out
        a = self.with_default_prec(rel)
        try:
            lead = rational_power(a.c[0], q(r))
        except ValueError:
            raise ValueError("irrational scalar power") from None
        n = a.p - a.v
        inv0 = ONE / a.c[0]
        unit = [x * inv0 for x in a.c]
        body = pow_unit(unit, q(r), n)
        return _from_unit(Fraction(a.v, a.s) * r, lead, body, a.s, n)

    def sqrt(self) -> "PuiseuxSeries":
        return self.pow_rat(Fraction(1, 2))

    def exp(self) -> "PuiseuxSeries":
        if self.c and self.v <= 0:
            raise ValueError("exp needs positive valuation")
        if not self.c:
            return PuiseuxSeries([1], 0, self.s, self.p if self.p is None else max(self.p, 0))
        a = self.with_default_prec()
        n = a.p
        lst = [ZERO] * n
        for k, x in enumerate(a.c):
            lst[a.v + k] = x
        return PuiseuxSeries(exp_trunc(lst, n), 0, a.s, n)

    def log(self) -> "PuiseuxSeries":
        if not self.c or self.v != 0 or self.c[0] != 1:
            raise ValueError("log needs leading term 1")
        a = self.with_default_prec()
        n = a.p
        return PuiseuxSeries(log_trunc(a.c, n), 0, a.s, n)

    def theta(self) -> "PuiseuxSeries":
        """q d/dq."""
        return PuiseuxSeries([x * Q(self.v + k, self.s) for k, x in enumerate(self.c)], self.v, self.s, self.p)

    def theta_inverse(self) -> "PuiseuxSeries":
        """Antiderivative for q d/dq; the constant term must vanish."""
        if self.coeff_grid(0):
            raise ValueError("theta^-1 of a series with a constant term")
        return PuiseuxSeries(
            [x / Q(self.v + k, self.s) if self.v + k else ZERO for k, x in enumerate(self.c)], self.v, self.s, self.p
        )

    def derivative(self) -> "PuiseuxSeries":
        """d/dq."""
        return self.theta().mul_monomial(-1)

    def coeff_grid(self, idx: int) -> Rational:
        k = idx - self.v
        return self.c[k] if 0 <= k < len(self.c) else ZERO

    # composition ---------------------------------------------------------
    def compose(self, g: "PuiseuxSeries") -> "PuiseuxSeries":
        """self(g)."""
        f = self
        if not f.c:
            if f.p is None:
                return f
            gv = g.valuation()
            if gv is None or gv <= 0:
                raise ValueError("ill-defined composition")
            return PuiseuxSeries.zero().truncate(f.precision() * gv)
        gval = g.valuation()
        if f.p is None and all(e.denominator == 1 for e, _ in f.terms()):
            if gval is None or gval <= 0:
                out = PuiseuxSeries.zero()
                for e, a in f.terms():
                    out = out + g.pow_rat(e) * a
                return out
        if gval is None or gval <= 0:
            raise ValueError("ill-defined composition: inner series needs positive valuation")
        unit = [x / f.c[0] for x in f.c]
        h = g.pow_rat(Fraction(1, f.s))
        hv = h.valuation()
        acc = PuiseuxSeries([unit[-1]])
        for a in reversed(unit[:-1]):
            acc = acc * h + a
        if f.p is not None:
            acc = acc.truncate(hv * (f.p - f.v))
        return acc * g.pow_rat(Fraction(f.v, f.s)) * f.c[0]

    def __call__(self, g: "PuiseuxSeries") -> "PuiseuxSeries":
        return self.compose(g)

    def revert(self) -> "PuiseuxSeries":
        """Compositional inverse of c1 q + O(q^2) (integer exponents)."""
        a = self.reduced()
        if a.s != 1 or a.v != 1 or not a.c:
            raise ValueError("revert needs a series of the form c1*q + O(q^2)")
        if a.p is None:
            raise ValueError("revert needs a finite precision")
        n = a.p - 1
        u = inv_trunc(a.c, n)
        out = [ZERO] * n
        pw = list(u)
        for m in range(1, n + 1):
            out[m - 1] = pw[m - 1] / m
            if m < n:
                pw = mul_trunc(pw, u, n)
        return PuiseuxSeries(out, 1, 1, a.p)

    # comparison ----------------------------------------------------------
    def agrees(self, other: "PuiseuxSeries", upto=None) -> bool:
        """Equal on every exponent below ``upto`` and both precisions."""
        d = self - other
        bound = d.precision()
        if upto is not None:
            u = _frac(upto)
            if bound is not None and bound < u:
                return False
            d = d.truncate(u)
        return not d.c

    def first_difference(self, other: "PuiseuxSeries") -> Fraction | None:
        d = self - other
        return d.valuation()

    def __eq__(self, other) -> bool:
        if not isinstance(other, PuiseuxSeries):
            other = PuiseuxSeries([other])
        a, b = PuiseuxSeries._common(self, other)
        return a.v == b.v and a.c == b.c and a.p == b.p

    def __hash__(self):
        r = self.reduced()
        return hash((r.s, r.v, tuple(r.c), r.p))

    def __repr__(self) -> str:
        return f"PuiseuxSeries({self.render()})"

    def render(self, var: str = "q", max_terms: int | None = None) -> str:
        """``q^(a/b) * (c0 + c1*q^(1/s) + ...)`` with exact rationals."""
        a = self.reduced()

        def mono(e: Fraction) -> str:
            if e == 0:
                return ""
            if e == 1:
                return var
            if e.denominator == 1:
                return f"{var}^{e.numerator}"
            return f"{var}^({e.numerator}/{e.denominator})"

        if not a.c:
            return f"O({mono(a.precision())})" if a.p is not None else "0"
        lead = Fraction(a.v, a.s)
        parts = []
        shown = 0
        for k, x in enumerate(a.c):
            if not x:
                continue
            if max_terms is not None and shown >= max_terms:
                parts.append("...")
                break
            e = Fraction(k, a.s)
            m = mono(e)
            coef = fmt(x)
            if not m:
                parts.append(coef)
            elif x == 1:
                parts.append(m)
            elif x == -1:
                parts.append("-" + m)
            else:
                parts.append(f"{coef}*{m}")
            shown += 1
        if a.p is not None and (max_terms is None or shown < max_terms):
            parts.append(f"O({mono(Fraction(a.p - a.v, a.s)) or '1'})")
        body = " + ".join(parts).replace("+ -", "- ")
        if lead == 0:
            return body
        return f"{mono(lead)} * ({body})"

    def __str__(self) -> str:
        return self.render()


def _from_unit(lead_exp: Fraction, lead, body: list, s: int, n: int) -> PuiseuxSeries:
    """lead * q^lead_exp * sum_k body[k] q^(k/s), with n known body terms."""
    s2 = _lcm(s, lead_exp.denominator)
    f = s2 // s
    c = []
    for x in body:
        c.append(x * lead)
        c.extend([ZERO] * (f - 1))
    v = lead_exp.numerator * (s2 // lead_exp.denominator)
    return PuiseuxSeries(c, v, s2, v + n * f)


def series(coeffs: Sequence, prec: int | None = None) -> PuiseuxSeries:
    """Shorthand for an integer-exponent series starting at q^0."""
    return PuiseuxSeries.from_coeffs(coeffs, prec)


def X(exponent=1) -> PuiseuxSeries:
    return PuiseuxSeries.monomial(exponent)


# ---------------------------------------------------------------- log series


class LogSeries:
    """f0 + f1 L + f2 L^2 with L = log of the series variable."""

    __slots__ = ("f",)

    def __init__(self, f0: PuiseuxSeries, f1: PuiseuxSeries | None = None, f2: PuiseuxSeries | None = None):
        z = PuiseuxSeries.zero()
        self.f = (f0, f1 if f1 is not None else z, f2 if f2 is not None else z)

    @property
    def f0(self):
        return self.f[0]

    @property
    def f1(self):
        return self.f[1]

    @property
    def f2(self):
        return self.f[2]

    @classmethod
    def lift(cls, s) -> "LogSeries":
        return s if isinstance(s, LogSeries) else cls(s)

    @classmethod
    def log(cls) -> "LogSeries":
        return cls(PuiseuxSeries.zero(), PuiseuxSeries.one())

    def __add__(self, other):
        o = LogSeries.lift(other)
        return LogSeries(*(a + b for a, b in zip(self.f, o.f)))

    __radd__ = __add__

    def __neg__(self):
        return LogSeries(*(-a for a in self.f))

    def __sub__(self, other):
        return self + (-LogSeries.lift(other))

    def __mul__(self, other):
        if isinstance(other, LogSeries):
            raise TypeError("LogSeries products are not supported; multiply by a PuiseuxSeries")
        return LogSeries(*(a * other for a in self.f))

    __rmul__ = __mul__

    def mul_monomial(self, exponent, coeff=1) -> "LogSeries":
        return LogSeries(*(a.mul_monomial(exponent, coeff) for a in self.f))

    def theta(self) -> "LogSeries":
        f0, f1, f2 = self.f
        return LogSeries(f0.theta() + f1, f1.theta() + f2.scale(2), f2.theta())

    def is_zero(self) -> bool:
        return all(a.is_zero() for a in self.f)

    def precision(self):
        ps = [a.precision() for a in self.f if a.precision() is not None]
        return min(ps) if ps else None

    def truncate(self, exponent) -> "LogSeries":
        return LogSeries(*(a.truncate(exponent) for a in self.f))

    def __eq__(self, other) -> bool:
        o = LogSeries.lift(other)
        return all(a == b for a, b in zip(self.f, o.f))

    def __repr__(self) -> str:
        return f"LogSeries({self.f[0].render('x')}; L:{self.f[1].render('x')}; L^2:{self.f[2].render('x')})"


def theta_apply(f):
    """theta = x d/dx on a PuiseuxSeries or LogSeries."""
    if isinstance(f, LogSeries):
        return f.theta()
    return f.theta()
