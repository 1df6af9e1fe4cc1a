"""Exact rationals, dense univariate polynomials and exact linear algebra.

Rationals are ``gmpy2.mpq`` values throughout; they are kept in lowest terms
with a positive denominator by construction.
"""
from __future__ import annotations

import random
from fractions import Fraction
from typing import Iterable, Sequence

import gmpy2
import mpmath

Q = gmpy2.mpq
Rational = type(Q(0))
ZERO = Q(0)
ONE = Q(1)


def q(x) -> Rational:
    """Coerce ints, Fractions, mpq values and "p/q" strings to a rational."""
    if isinstance(x, Rational):
        return x
    if isinstance(x, str):
        return Q(x.strip())
    if isinstance(x, Fraction):
        return Q(x.numerator, x.denominator)
    if isinstance(x, float):
        raise TypeError("refusing to coerce a float to an exact rational")
    return Q(x)


def fmt(x) -> str:
    """Render a rational as ``p`` or ``p/q``."""
    x = q(x)
    if x.denominator == 1:
        return str(x.numerator)
    return f"{x.numerator}/{x.denominator}"


def to_fraction(x) -> Fraction:
    x = q(x)
    return Fraction(int(x.numerator), int(x.denominator))


def rational_root(x: Rational, k: int) -> Rational | None:
    """Exact k-th root of a rational, or None when it is irrational."""
    x = q(x)
    if k == 1:
        return x
    if x < 0:
        if k % 2 == 0:
            return None
        r = rational_root(-x, k)
        return None if r is None else -r
    num, ok1 = gmpy2.iroot(gmpy2.mpz(x.numerator), k)
    den, ok2 = gmpy2.iroot(gmpy2.mpz(x.denominator), k)
    if ok1 and ok2:
        return Q(num, den)
    return None


def rational_power(x: Rational, r: Rational) -> Rational:
    """x**r for rational r when the result is rational; ValueError otherwise."""
    x, r = q(x), q(r)
    root = rational_root(x, int(r.denominator))
    if root is None:
        raise ValueError("irrational scalar power")
    if r.numerator < 0 and root == 0:
        raise ZeroDivisionError("zero to a negative power")
    return root ** int(r.numerator) if r.numerator >= 0 else ONE / root ** int(-r.numerator)


def binomial(r: Rational, k: int) -> Rational:
    """Generalised binomial coefficient C(r, k) for rational r."""
    out = ONE
    r = q(r)
    for i in range(k):
        out = out * (r - i) / (i + 1)
    return out


def lcm_denominators(values: Iterable) -> int:
    out = gmpy2.mpz(1)
    for v in values:
        out = gmpy2.lcm(out, q(v).denominator)
    return int(out)


def rational_reconstruct(v: float, max_den: int) -> Rational | None:
    """Closest p/q with q <= max_den, accepted only within 1/(2 max_den^2)."""
    if max_den < 1:
        raise ValueError("max_den must be >= 1")
    frac = Fraction(float(v)).limit_denominator(max_den)
    if abs(float(v) - float(frac)) < 1.0 / (2.0 * max_den * max_den):
        return Q(frac.numerator, frac.denominator)
    return None


def ratrec_mod(a: int, m: int) -> Rational | None:
    """Rational p/q with p = a*q mod m and |p|, q <= sqrt(m/2), if it exists."""
    a %= m
    bound = gmpy2.isqrt(m // 2)
    r0, r1 = m, a
    s0, s1 = 0, 1
    while r1 > bound:
        qq = r0 // r1
        r0, r1 = r1, r0 - qq * r1
        s0, s1 = s1, s0 - qq * s1
    if s1 == 0 or abs(s1) > bound:
        return None
    if gmpy2.gcd(r1, s1) != 1:
        return None
    return Q(r1, s1)


# ---------------------------------------------------------------- polynomials


class UniPoly:
    """Dense polynomial with rational coefficients, lowest degree first."""

    __slots__ = ("c",)

    def __init__(self, coeffs: Iterable = ()):
        c = [q(a) for a in coeffs]
        while c and c[-1] == 0:
            c.pop()
        self.c = tuple(c)

    @classmethod
    def x(cls) -> "UniPoly":
        return cls([0, 1])

    @classmethod
    def const(cls, a) -> "UniPoly":
        return cls([a])

    @property
    def degree(self) -> int:
        return len(self.c) - 1

    def is_zero(self) -> bool:
        return not self.c

    def lc(self) -> Rational:
        return self.c[-1] if self.c else ZERO

    def __getitem__(self, i: int) -> Rational:
        return self.c[i] if 0 <= i < len(self.c) else ZERO

    def __eq__(self, other) -> bool:
        if not isinstance(other, UniPoly):
            other = UniPoly([other])
        return self.c == other.c

    def __hash__(self):
        return hash(self.c)

    def __repr__(self) -> str:
        return f"UniPoly({self.pretty()})"

    def pretty(self, var: str = "x") -> str:
        if not self.c:
            return "0"
        terms = []
        for i, a in enumerate(self.c):
            if a == 0:
                continue
            mono = "" if i == 0 else (var if i == 1 else f"{var}^{i}")
            if mono and a == 1:
                terms.append(mono)
            elif mono and a == -1:
                terms.append("-" + mono)
            else:
                terms.append(fmt(a) + ("*" + mono if mono else ""))
        return " + ".join(terms).replace("+ -", "- ")

    def _coerce(self, other) -> "UniPoly":
        return other if isinstance(other, UniPoly) else UniPoly([other])

    def __add__(self, other):
        other = self._coerce(other)
        n = max(len(self.c), len(other.c))
        return UniPoly(self[i] + other[i] for i in range(n))

    __radd__ = __add__

    def __neg__(self):
        return UniPoly(-a for a in self.c)

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return self._coerce(other) - self

    def __mul__(self, other):
        other = self._coerce(other)
        if not self.c or not other.c:
            return UniPoly()
        out = [ZERO] * (len(self.c) + len(other.c) - 1)
        for i, a in enumerate(self.c):
            if a == 0:
                continue
            for j, b in enumerate(other.c):
                out[i + j] += a * b
        return UniPoly(out)

    __rmul__ = __mul__

    def __pow__(self, k: int):
        out, base = UniPoly([1]), self
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    def divmod(self, other: "UniPoly"):
        if other.is_zero():
            raise ZeroDivisionError("polynomial division by zero")
        rem = list(self.c)
        dq = len(rem) - len(other.c)
        if dq < 0:
            return UniPoly(), self
        quo = [ZERO] * (dq + 1)
        inv = ONE / other.lc()
        for k in range(dq, -1, -1):
            f = rem[k + other.degree] * inv
            quo[k] = f
            if f:
                for j, b in enumerate(other.c):
                    rem[k + j] -= f * b
        return UniPoly(quo), UniPoly(rem[: other.degree])

    def __floordiv__(self, other):
        return self.divmod(self._coerce(other))[0]

    def __mod__(self, other):
        return self.divmod(self._coerce(other))[1]

    def monic(self) -> "UniPoly":
        if self.is_zero():
            return self
        inv = ONE / self.lc()
        return UniPoly(a * inv for a in self.c)

    def __call__(self, t):
        if isinstance(t, (int, Rational, Fraction)):
            t = q(t)
            acc = ZERO
            for a in reversed(self.c):
                acc = acc * t + a
            return acc
        return _mp_eval(self, t)

    def derivative(self) -> "UniPoly":
        return UniPoly(i * a for i, a in enumerate(self.c) if i)

    def shift(self, a) -> "UniPoly":
        """p(x + a)."""
        a = q(a)
        out = UniPoly()
        lin = UniPoly([a, 1])
        for coeff in reversed(self.c):
            out = out * lin + coeff
        return out

    def reflect(self, sign) -> "UniPoly":
        """p(sign * x)."""
        s = q(sign)
        return UniPoly(a * s**i for i, a in enumerate(self.c))

    def taylor(self, a) -> list:
        """Coefficients of p(a + e) in powers of e."""
        return list(self.shift(a).c)

    def primitive_integer(self) -> list:
        """Integer coefficient list proportional to self."""
        den = lcm_denominators(self.c)
        ints = [int(a * den) for a in self.c]
        g = 0
        for v in ints:
            g = int(gmpy2.gcd(g, v))
        return [v // g for v in ints] if g else ints


def poly_gcd(a: UniPoly, b: UniPoly) -> UniPoly:
    """Monic gcd by the Euclidean algorithm."""
    if a.is_zero() and b.is_zero():
        raise ValueError("gcd of two zero polynomials")
    while not b.is_zero():
        a, b = b, a % b
    return a.monic()


def squarefree_decomposition(p: UniPoly) -> list:
    """Yun's algorithm: list of (factor, multiplicity), factors squarefree, coprime."""
    if p.degree < 1:
        return []
    p = p.monic()
    out = []
    dp = p.derivative()
    a = poly_gcd(p, dp)
    b = p // a
    c = dp // a
    d = c - b.derivative()
    i = 1
    while b.degree > 0:
        a = poly_gcd(b, d)
        b, c = b // a, d // a
        if a.degree > 0:
            out.append((a, i))
        d = c - b.derivative()
        i += 1
    return out


def numeric_roots(p: UniPoly, dps: int = 60) -> list:
    """All complex roots of a squarefree polynomial, polished to ``dps`` digits."""
    import numpy as np

    if p.degree < 1:
        return []
    coeffs = [float(a) for a in reversed(p.c)]
    scale = max(abs(v) for v in coeffs)
    approx = np.roots([v / scale for v in coeffs])
    dp = p.derivative()
    out = []
    with mpmath.workdps(dps):
        for z in approx:
            r = mpmath.mpc(complex(z))
            for _ in range(200):
                fz, dfz = _mp_eval(p, r), _mp_eval(dp, r)
                if dfz == 0:
                    break
                step = fz / dfz
                r -= step
                if abs(step) < mpmath.mpf(10) ** (-dps + 5) * max(1, abs(r)):
                    break
            if abs(r.imag) < mpmath.mpf(10) ** (-dps // 2):
                r = mpmath.mpf(r.real)
            out.append(r)
    return out


def _mp_eval(p: UniPoly, z):
    acc = mpmath.mpf(0)
    for a in reversed(p.c):
        acc = acc * z + mpmath.mpf(int(a.numerator)) / int(a.denominator)
    return acc


def mp_eval(p: UniPoly, z):
    """Evaluate at an mpmath number."""
    return _mp_eval(p, z)


def rational_roots(p: UniPoly) -> list:
    """Exact rational roots (distinct), found numerically and verified exactly."""
    out = []
    for f, _ in squarefree_decomposition(p):
        for r in numeric_roots(f, dps=30):
            if isinstance(r, mpmath.mpc):
                continue
            for den_bound in (10**6,):
                cand = Fraction(str(mpmath.nstr(r, 25))).limit_denominator(den_bound)
                cq = Q(cand.numerator, cand.denominator)
                if f(cq) == 0 and cq not in out:
                    out.append(cq)
    return sorted(out)


# ---------------------------------------------------------------- matrices


class RatMatrix:
    """Row-major rational matrix."""

    __slots__ = ("rows", "cols", "a")

    def __init__(self, entries: Sequence[Sequence], cols: int | None = None):
        self.a = [[q(v) for v in row] for row in entries]
        self.rows = len(self.a)
        self.cols = cols if cols is not None else (len(self.a[0]) if self.a else 0)
        if any(len(r) != self.cols for r in self.a):
            raise ValueError("ragged matrix")

    @classmethod
    def identity(cls, n: int) -> "RatMatrix":
        return cls([[1 if i == j else 0 for j in range(n)] for i in range(n)])

    def __getitem__(self, ij):
        i, j = ij
        return self.a[i][j]

    def __eq__(self, other) -> bool:
        return isinstance(other, RatMatrix) and self.a == other.a

    def __repr__(self) -> str:
        return "RatMatrix([" + ", ".join("[" + ", ".join(fmt(v) for v in r) + "]" for r in self.a) + "])"

    def transpose(self) -> "RatMatrix":
        return RatMatrix([[self.a[i][j] for i in range(self.rows)] for j in range(self.cols)], self.rows)

    def __mul__(self, other):
        if isinstance(other, RatMatrix):
            if self.cols != other.rows:
                raise ValueError("shape mismatch")
            bt = other.transpose().a
            return RatMatrix([[sum((x * y for x, y in zip(r, c)), ZERO) for c in bt] for r in self.a], other.cols)
        if isinstance(other, (list, tuple)):
            return [sum((x * q(y) for x, y in zip(r, other)), ZERO) for r in self.a]
        s = q(other)
        return RatMatrix([[v * s for v in r] for r in self.a], self.cols)

    def __rmul__(self, s):
        return self * s

    def __add__(self, other: "RatMatrix") -> "RatMatrix":
        return RatMatrix([[x + y for x, y in zip(r, s)] for r, s in zip(self.a, other.a)], self.cols)

    def __neg__(self):
        return self * -1

    def __sub__(self, other):
        return self + (-other)

    def det(self) -> Rational:
        if self.rows != self.cols:
            raise ValueError("det of non-square matrix")
        rows = [r[:] for r in self.a]
        n, sign, out = self.rows, 1, ONE
        for k in range(n):
            piv = next((i for i in range(k, n) if rows[i][k] != 0), None)
            if piv is None:
                return ZERO
            if piv != k:
                rows[k], rows[piv] = rows[piv], rows[k]
                sign = -sign
            out *= rows[k][k]
            inv = ONE / rows[k][k]
            for i in range(k + 1, n):
                f = rows[i][k] * inv
                if f:
                    rows[i] = [x - f * y for x, y in zip(rows[i], rows[k])]
        return out * sign

    def inverse(self) -> "RatMatrix":
        n = self.rows
        aug = [r[:] + [ONE if i == j else ZERO for j in range(n)] for i, r in enumerate(self.a)]
        for k in range(n):
            piv = next((i for i in range(k, n) if aug[i][k] != 0), None)
            if piv is None:
                raise ZeroDivisionError("singular matrix")
            aug[k], aug[piv] = aug[piv], aug[k]
            inv = ONE / aug[k][k]
            aug[k] = [v * inv for v in aug[k]]
            for i in range(n):
                if i != k and aug[i][k] != 0:
                    f = aug[i][k]
                    aug[i] = [x - f * y for x, y in zip(aug[i], aug[k])]
        return RatMatrix([r[n:] for r in aug], n)

    def solve(self, b: Sequence) -> list:
        return self.inverse() * list(b)

    def integer_rows(self) -> list:
        """Each row scaled by the lcm of its denominators."""
        out = []
        for r in self.a:
            den = lcm_denominators(r)
            out.append([int(v * den) for v in r])
        return out

    def rank(self) -> int:
        _, pivots = _bareiss_echelon(self.integer_rows(), self.cols)
        return len(pivots)


def _bareiss_echelon(rows: list, cols: int):
    """Fraction-free forward elimination. Returns (echelon rows, pivot columns)."""
    m = [list(map(gmpy2.mpz, r)) for r in rows]
    nrows = len(m)
    pivots = []
    prev = gmpy2.mpz(1)
    r = 0
    for c in range(cols):
        if r >= nrows:
            break
        piv = next((i for i in range(r, nrows) if m[i][c] != 0), None)
        if piv is None:
            continue
        m[r], m[piv] = m[piv], m[r]
        prow = m[r]
        pv = prow[c]
        for i in range(r + 1, nrows):
            row = m[i]
            f = row[c]
            if f == 0:
                if pv != prev:
                    m[i] = [gmpy2.divexact(v * pv, prev) for v in row]
                continue
            m[i] = [gmpy2.divexact(v * pv - f * w, prev) for v, w in zip(row, prow)]
        prev = pv
        pivots.append(c)
        r += 1
    return m[:r], pivots


def _kernel_from_echelon(ech: list, pivots: list, cols: int) -> list:
    free = [c for c in range(cols) if c not in set(pivots)]
    basis = []
    for f in free:
        x = [ZERO] * cols
        x[f] = ONE
        for i in range(len(pivots) - 1, -1, -1):
            row, pc = ech[i], pivots[i]
            s = sum((row[j] * x[j] for j in range(pc + 1, cols) if x[j]), ZERO)
            x[pc] = -s / row[pc]
        basis.append(_normalize_first(x))
    return basis


def _normalize_first(v: list) -> list:
    lead = next((a for a in v if a != 0), None)
    if lead is None:
        return v
    inv = ONE / lead
    return [a * inv for a in v]


def nullspace(m: RatMatrix) -> list:
    """Exact right-kernel basis; each vector scaled so its first nonzero entry is 1."""
    if m.cols == 0:
        return []
    if m.rows == 0:
        return [[ONE if i == j else ZERO for i in range(m.cols)] for j in range(m.cols)]
    ech, pivots = _bareiss_echelon(m.integer_rows(), m.cols)
    return _kernel_from_echelon(ech, pivots, m.cols)


# ---------------------------------------------------------------- modular linear algebra

PRIMES = (
    4611686018427387847,
    4611686018427387817,
    4611686018427387787,
    4611686018427387733,
    4611686018427387709,
    4611686018427387631,
    4611686018427387623,
    4611686018427387587,
)


def _rref_mod(rows: list, cols: int, p: int):
    m = [[v % p for v in r] for r in rows]
    pivots = []
    r = 0
    for c in range(cols):
        piv = next((i for i in range(r, len(m)) if m[i][c]), None)
        if piv is None:
            continue
        m[r], m[piv] = m[piv], m[r]
        inv = pow(m[r][c], -1, p)
        m[r] = [v * inv % p for v in m[r]]
        prow = m[r]
        for i in range(len(m)):
            if i != r and m[i][c]:
                f = m[i][c]
                m[i] = [(v - f * w) % p for v, w in zip(m[i], prow)]
        pivots.append(c)
        r += 1
        if r == len(m):
            break
    return m[:r], pivots


def kernel_dim_mod(rows: list, cols: int, p: int = PRIMES[0]) -> int:
    """Kernel dimension modulo p; an upper bound for the rational kernel dimension."""
    _, pivots = _rref_mod(rows, cols, p)
    return cols - len(pivots)


def _kernel_mod(rows, cols, p):
    m, pivots = _rref_mod(rows, cols, p)
    free = [c for c in range(cols) if c not in set(pivots)]
    basis = []
    for f in free:
        x = [0] * cols
        x[f] = 1
        for i, pc in enumerate(pivots):
            x[pc] = (-m[i][f]) % p
        basis.append(x)
    return pivots, basis


def nullspace_modular(rows: list, cols: int, max_primes: int = 64):
    """Kernel of an integer matrix when it is one-dimensional mod p.

    Works prime by prime, combines by CRT and reconstructs rationals; the
    result is checked exactly. Returns the normalised vector, or None when the
    kernel is trivial, or raises LookupError when it is not one-dimensional.
    """
    modulus, acc, pivots0 = 1, None, None
    last = None
    rng = random.Random(12345)
    primes = list(PRIMES)
    for k in range(max_primes):
        if k < len(primes):
            p = primes[k]
        else:
            p = int(gmpy2.next_prime(rng.getrandbits(62) | (1 << 61)))
        pivots, basis = _kernel_mod(rows, cols, p)
        if not basis:
            return None
        if len(basis) > 1:
            raise LookupError("kernel dimension > 1")
        if pivots0 is None:
            pivots0 = pivots
        elif pivots != pivots0:
            # unlucky prime: pivot pattern differs, restart from the better one
            if len(pivots) > len(pivots0) or pivots < pivots0:
                modulus, acc, pivots0 = 1, None, pivots
            else:
                continue
        v = basis[0]
        lead = next(i for i, a in enumerate(v) if a)
        inv = pow(v[lead], -1, p)
        v = [a * inv % p for a in v]
        if acc is None:
            acc, modulus = v, p
        else:
            acc = [_crt(a, modulus, b, p) for a, b in zip(acc, v)]
            modulus *= p
        cand = [ratrec_mod(a, modulus) for a in acc]
        if all(c is not None for c in cand):
            if cand == last or k >= 1:
                if _is_kernel(rows, cand):
                    return _normalize_first(cand)
            last = cand
    raise ArithmeticError("modular reconstruction did not converge")


def _crt(a, m, b, p):
    t = (b - a) * pow(m, -1, p) % p
    return a + m * t


def _is_kernel(rows, v) -> bool:
    den = lcm_denominators(v)
    iv = [int(a * den) for a in v]
    for r in rows:
        s = 0
        for x, y in zip(r, iv):
            if x and y:
                s += x * y
        if s:
            return False
    return True
