"""The Clingher-Doran family: GKZ series, extended GKZ operators and the reduced family.

Multivariate series are sparse maps from exponent tuples to rationals, kept up
to a total degree. Operators are sums of monomial * polynomial(theta) terms,
with the monomial acting after the Euler operators.
"""
from __future__ import annotations

import ast
from dataclasses import asdict, dataclass, field
from functools import lru_cache
from math import factorial
from pathlib import Path
from typing import Iterable, Mapping

from .etaprod import EtaQuotient, data_dir
from .exactalg import ONE, ZERO, Q, RatMatrix, Rational, fmt, q
from .qseries import PuiseuxSeries

# ---------------------------------------------------------------- multivariate series


class MultiSeries:
    """sum c_e X^e over exponent tuples e with |e| <= total_degree."""

    __slots__ = ("nvars", "total_degree", "c")

    def __init__(self, coeffs: Mapping, total_degree: int, nvars: int | None = None):
        if nvars is None:
            nvars = len(next(iter(coeffs))) if coeffs else 3
        self.nvars = nvars
        self.total_degree = total_degree
        self.c = {}
        for e, v in coeffs.items():
            e = tuple(int(i) for i in e)
            if len(e) != nvars:
                raise ValueError("exponent tuple has the wrong length")
            if min(e) < 0:
                raise ValueError("negative exponent")
            v = q(v)
            if v and sum(e) <= total_degree:
                self.c[e] = v

    @classmethod
    def constant(cls, a, total_degree: int, nvars: int) -> "MultiSeries":
        return cls({(0,) * nvars: a}, total_degree, nvars)

    @classmethod
    def tensor(cls, factors: Iterable[PuiseuxSeries], total_degree: int) -> "MultiSeries":
        """prod_i f_i(X_i) for univariate integer-exponent series f_i."""
        factors = list(factors)
        out = cls.constant(1, total_degree, len(factors))
        for i, f in enumerate(factors):
            g = {}
            for k in range(total_degree + 1):
                a = f.coeff(k)
                if a:
                    e = [0] * len(factors)
                    e[i] = k
                    g[tuple(e)] = a
            p = f.precision()
            if p is not None and p <= total_degree:
                raise ValueError("univariate factor known to too low an order")
            out = out * cls(g, total_degree, len(factors))
        return out

    def __getitem__(self, e) -> Rational:
        return self.c.get(tuple(e), ZERO)

    def _check(self, other: "MultiSeries"):
        if self.nvars != other.nvars:
            raise ValueError("series in different numbers of variables")
        return min(self.total_degree, other.total_degree)

    def __add__(self, other):
        if not isinstance(other, MultiSeries):
            other = MultiSeries.constant(other, self.total_degree, self.nvars)
        N = self._check(other)
        out = dict(self.c)
        for e, v in other.c.items():
            out[e] = out.get(e, ZERO) + v
        return MultiSeries(out, N, self.nvars)

    __radd__ = __add__

    def __neg__(self):
        return MultiSeries({e: -v for e, v in self.c.items()}, self.total_degree, self.nvars)

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def scale(self, k) -> "MultiSeries":
        k = q(k)
        return MultiSeries({e: v * k for e, v in self.c.items()}, self.total_degree, self.nvars)

    def __mul__(self, other):
        if not isinstance(other, MultiSeries):
            return self.scale(other)
        N = self._check(other)
        out: dict = {}
        items = list(other.c.items())
        for e, v in self.c.items():
            de = sum(e)
            for f, w in items:
                if de + sum(f) > N:
                    continue
                g = tuple(a + b for a, b in zip(e, f))
                out[g] = out.get(g, ZERO) + v * w
        return MultiSeries(out, N, self.nvars)

    __rmul__ = __mul__

    def valuation(self) -> int | None:
        return min((sum(e) for e in self.c), default=None)

    def homogeneous(self, k: int) -> dict:
        return {e: v for e, v in self.c.items() if sum(e) == k}

    def pow_unit(self, r) -> "MultiSeries":
        """self^r for constant term 1, by the graded Miller recurrence k g_k = sum (r j - k + j) f_j g_(k-j)."""
        r = q(r)
        if self[(0,) * self.nvars] != 1:
            raise ValueError("pow_unit needs constant term 1")
        N = self.total_degree
        fparts = [MultiSeries(self.homogeneous(k), N, self.nvars) for k in range(N + 1)]
        gparts = [MultiSeries.constant(1, N, self.nvars)]
        for k in range(1, N + 1):
            acc = MultiSeries({}, N, self.nvars)
            for j in range(1, k + 1):
                if fparts[j].c:
                    acc = acc + (fparts[j] * gparts[k - j]).scale(r * j - (k - j))
            gparts.append(acc.scale(Q(1, k)))
        out = MultiSeries({}, N, self.nvars)
        for g in gparts:
            out = out + g
        return out

    def inverse(self) -> "MultiSeries":
        c0 = self[(0,) * self.nvars]
        if not c0:
            raise ZeroDivisionError("constant term vanishes")
        return self.scale(ONE / c0).pow_unit(-1).scale(ONE / c0)

    def divide_monomial(self, e) -> "MultiSeries":
        """self / X^e; every term must be divisible."""
        e = tuple(e)
        out = {}
        for f, v in self.c.items():
            g = tuple(a - b for a, b in zip(f, e))
            if min(g) < 0:
                raise ArithmeticError(f"term X^{f} is not divisible by X^{e}")
            out[g] = v
        return MultiSeries(out, self.total_degree - sum(e), self.nvars)

    def truncate(self, total_degree: int) -> "MultiSeries":
        return MultiSeries(self.c, min(total_degree, self.total_degree), self.nvars)

    def box(self, bound: int) -> dict:
        """Coefficients with every exponent <= bound; needs nvars * bound <= total_degree."""
        if self.nvars * bound > self.total_degree:
            raise ValueError("box exceeds the known total degree")
        return {e: v for e, v in self.c.items() if max(e) <= bound}

    def __eq__(self, other) -> bool:
        return isinstance(other, MultiSeries) and self.nvars == other.nvars and \
            self.total_degree == other.total_degree and self.c == other.c

    def __repr__(self) -> str:
        return f"<MultiSeries vars={self.nvars} deg<={self.total_degree} terms={len(self.c)}>"


def MultiSeries3(coeffs: Mapping, total_degree: int) -> MultiSeries:
    return MultiSeries(coeffs, total_degree, 3)


def first_box_difference(a: MultiSeries, b: MultiSeries, bound: int):
    """Least (by total degree, then lexicographic) exponent in the box where a and b differ."""
    da, db = a.box(bound), b.box(bound)
    bad = [e for e in set(da) | set(db) if da.get(e, ZERO) != db.get(e, ZERO)]
    return min(bad, key=lambda e: (sum(e), e)) if bad else None


# ---------------------------------------------------------------- polynomial text


_VARS = ("x", "y", "z", "tx", "ty", "tz")


class _Poly(dict):
    """Sparse polynomial in the six symbols above: exponent tuple -> Rational."""

    @staticmethod
    def var(name: str) -> "_Poly":
        e = [0] * len(_VARS)
        e[_VARS.index(name)] = 1
        return _Poly({tuple(e): ONE})

    @staticmethod
    def const(a) -> "_Poly":
        return _Poly({(0,) * len(_VARS): q(a)})

    def add(self, other: "_Poly", sign: int = 1) -> "_Poly":
        out = _Poly(self)
        for e, v in other.items():
            out[e] = out.get(e, ZERO) + sign * v
            if not out[e]:
                del out[e]
        return out

    def mul(self, other: "_Poly") -> "_Poly":
        out = _Poly()
        for e, v in self.items():
            for f, w in other.items():
                g = tuple(a + b for a, b in zip(e, f))
                out[g] = out.get(g, ZERO) + v * w
        return _Poly({e: v for e, v in out.items() if v})


def _eval_ast(node) -> _Poly:
    if isinstance(node, ast.Expression):
        return _eval_ast(node.body)
    if isinstance(node, ast.Constant) and isinstance(node.value, int):
        return _Poly.const(node.value)
    if isinstance(node, ast.Name):
        if node.id not in _VARS:
            raise ValueError(f"unknown symbol {node.id!r}")
        return _Poly.var(node.id)
    if isinstance(node, ast.UnaryOp) and isinstance(node.op, (ast.USub, ast.UAdd)):
        p = _eval_ast(node.operand)
        return p if isinstance(node.op, ast.UAdd) else _Poly.const(0).add(p, -1)
    if isinstance(node, ast.BinOp):
        if isinstance(node.op, ast.Pow):
            if not (isinstance(node.right, ast.Constant) and isinstance(node.right.value, int) and node.right.value >= 0):
                raise ValueError("exponents must be non-negative integers")
            base, out = _eval_ast(node.left), _Poly.const(1)
            for _ in range(node.right.value):
                out = out.mul(base)
            return out
        a, b = _eval_ast(node.left), _eval_ast(node.right)
        if isinstance(node.op, ast.Add):
            return a.add(b)
        if isinstance(node.op, ast.Sub):
            return a.add(b, -1)
        if isinstance(node.op, ast.Mult):
            return a.mul(b)
        if isinstance(node.op, ast.Div) and len(b) == 1 and (0,) * len(_VARS) in b:
            return a.mul(_Poly.const(ONE / b[(0,) * len(_VARS)]))
    raise ValueError(f"unsupported expression: {ast.dump(node)}")


def parse_poly(text: str) -> _Poly:
    return _eval_ast(ast.parse(text.replace("^", "**"), mode="eval"))


def _read_assignments(path: Path) -> dict:
    out = {}
    for ln in path.read_text().splitlines():
        ln = ln.strip()
        if not ln or ln.startswith("#"):
            continue
        name, _, rhs = ln.partition("=")
        out[name.strip()] = rhs.strip()
    return out


# ---------------------------------------------------------------- operators


@dataclass(frozen=True)
class GKZOperator:
    """sum over monomials X^s of X^s * P_s(theta_x, theta_y, theta_z)."""

    name: str
    terms: tuple  # ((shift, {theta exponent: coeff}), ...)

    @classmethod
    def parse(cls, name: str, text: str) -> "GKZOperator":
        poly = parse_poly(text)
        groups: dict = {}
        for e, v in poly.items():
            groups.setdefault(e[:3], {})[e[3:]] = v
        return cls(name, tuple(sorted((s, tuple(sorted(p.items()))) for s, p in groups.items())))

    def max_shift(self) -> int:
        return max(sum(s) for s, _ in self.terms)

    def coefficient(self, w: MultiSeries, target) -> Rational:
        """Coefficient of X^target in (self w)."""
        out = ZERO
        for s, poly in self.terms:
            src = tuple(t - a for t, a in zip(target, s))
            if min(src) < 0:
                continue
            c = w[src]
            if not c:
                continue
            val = ZERO
            for e, v in poly:
                val += v * src[0] ** e[0] * src[1] ** e[1] * src[2] ** e[2]
            out += val * c
        return out

    def apply(self, w: MultiSeries) -> MultiSeries:
        N = w.total_degree
        out = {}
        for t in _exponents(N):
            v = self.coefficient(w, t)
            if v:
                out[t] = v
        return MultiSeries(out, N, 3)


def _exponents(N: int):
    for d in range(N + 1):
        for l in range(d + 1):
            for m in range(d - l + 1):
                yield (l, m, d - l - m)


@lru_cache(maxsize=4)
def _cd_operators(base: str) -> tuple:
    defs = _read_assignments(Path(base) / "cd_operators.txt")
    return tuple(GKZOperator.parse(k, v) for k, v in defs.items())


def cd_operators(base: Path | None = None) -> list:
    return list(_cd_operators(str(base or data_dir())))


def _fact(k: int):
    """k! with 1/k! = 0 for negative k."""
    return None if k < 0 else factorial(k)


def cd_coeff(l: int, m: int, n: int) -> Rational:
    """(2n)! / (n! l! (n-m)! (3m-n)! (l-3m+n)! (m-2l)!), zero when any argument is negative."""
    den = 1
    for k in (n, l, n - m, 3 * m - n, l - 3 * m + n, m - 2 * l):
        f = _fact(k)
        if f is None:
            return ZERO
        den *= f
    return Q(factorial(2 * n), den)


def cd_w0(total_degree: int, coeff=cd_coeff) -> MultiSeries:
    return MultiSeries3({e: coeff(*e) for e in _exponents(total_degree)}, total_degree)


def annihilation_residuals(total_degree: int, w: MultiSeries | None = None, ops=None) -> dict:
    """{operator name: {exponent: nonzero residual}} through total_degree."""
    w = cd_w0(total_degree) if w is None else w
    ops = cd_operators() if ops is None else ops
    out = {}
    for D in ops:
        r = D.apply(w)
        out[D.name] = dict(r.c)
    return out


def verify_annihilation(total_degree: int = 12, w: MultiSeries | None = None) -> bool:
    return all(not r for r in annihilation_residuals(total_degree, w).values())


# ---------------------------------------------------------------- orbifold exponents


@dataclass(frozen=True)
class MonomialMap:
    """(x~_1, x~_2, x~_3) with x~_i = prod_j x_j^M[i][j]."""

    M: tuple
    name: str = ""

    def __post_init__(self):
        object.__setattr__(self, "M", tuple(tuple(int(v) for v in r) for r in self.M))

    @property
    def matrix(self) -> RatMatrix:
        return RatMatrix(self.M)

    def pull_back(self, rho) -> list:
        """Exponents a with x^a = x~^rho: a = M^t rho."""
        Mt = self.matrix
        if Mt.det() == 0:
            raise ValueError("singular monomial map")
        return Mt.transpose() * [q(r) for r in rho]

    def push_forward(self, a) -> list:
        """Exponents rho with x~^rho = x^a."""
        return self.matrix.transpose().inverse() * [q(v) for v in a]


T9 = MonomialMap(((-1, -2, -2), (0, 1, 1), (1, 1, 0)), "T9")
T12 = MonomialMap(((0, -1, -2), (-1, 0, -1), (0, 0, 1)), "T12")
T16 = MonomialMap(((-3, -1, 0), (1, 0, 0), (1, 0, -1)), "T16")

ORBIFOLD_POINTS = {
    "T9": (T9, (Q(5, 12), Q(1, 3), Q(1, 3))),
    "T12": (T12, (Q(1, 5), Q(1, 10), ZERO)),
    "T16": (T16, (Q(1, 5), ZERO, Q(1, 2))),
}


def orbifold_exponent_solve(mmap: MonomialMap, rho) -> list:
    """a with x^a = x~^rho: the leading monomial of w0 at the orbifold point."""
    return mmap.pull_back(rho)


# ---------------------------------------------------------------- Gram data


@dataclass(frozen=True)
class GramData:
    K: RatMatrix
    P: RatMatrix
    U: RatMatrix
    dis0: dict
    C11_numerator: dict

    def literal_factorization(self) -> bool:
        """K = tP U P with the transcribed P."""
        return self.P.transpose() * self.U * self.P == self.K

    def factorization(self) -> bool:
        """tP K P = U, equivalently K = tQ U Q with Q = P^-1."""
        return self.P.transpose() * self.K * self.P == self.U

    def factor(self) -> RatMatrix:
        return self.P.inverse()


def _xyz_poly(text: str) -> dict:
    p = parse_poly(text)
    if any(any(e[3:]) for e in p):
        raise ValueError("Euler operators in a coordinate polynomial")
    return {e[:3]: v for e, v in p.items()}


def _matrix(text: str) -> RatMatrix:
    return RatMatrix(ast.literal_eval(text))


def cd_gram_data(base: Path | None = None) -> GramData:
    d = _read_assignments((base or data_dir()) / "cd_yukawa.txt")
    return GramData(_matrix(d["K"]), _matrix(d["P"]), _matrix(d["U"]), _xyz_poly(d["dis0"]), _xyz_poly(d["C11t"]))


# ---------------------------------------------------------------- reduced family

COEFF_VARIANTS = ("literal", "corrected")
V_VARIANTS = ("literal", "squared")


def red_coeff(n: int, m: int, variant: str = "corrected") -> Rational:
    """(6n)!/((3n)!(2n)!(n-2m)! D) with D = (n!)^2 ("literal") or (m!)^2 ("corrected")."""
    if n - 2 * m < 0 or m < 0:
        return ZERO
    if variant == "literal":
        D = factorial(n) ** 2
    elif variant == "corrected":
        D = factorial(m) ** 2
    else:
        raise ValueError(f"unknown coefficient variant {variant!r}")
    return Q(factorial(6 * n), factorial(3 * n) * factorial(2 * n) * factorial(n - 2 * m) * D)


def red_w0(du: int, dv: int, variant: str = "corrected") -> dict:
    """{(n, m): coefficient of u^n v^m} for n <= du, m <= dv."""
    return {(n, m): red_coeff(n, m, variant) for n in range(du + 1) for m in range(dv + 1) if red_coeff(n, m, variant)}


def _eis(k: int, T: int) -> PuiseuxSeries:
    from .elliptic import eisenstein

    return eisenstein(k, T).expansion


@dataclass
class ReducedMirror:
    """u and W = u^2 v as series in (q1, q2); v itself has a pole along q1 + q2 = 0."""

    u: MultiSeries
    W: MultiSeries
    v_variant: str


def red_mirror(N: int, v_variant: str = "squared") -> ReducedMirror:
    """Mirror map through total degree N.

    u = (1/864)(E^(3/2) - F)/E^(3/2) and v = 864^2 Delta~Delta / (E^(3/2) - F)^k with
    E = E4 E4~, F = E6 E6~ and k = 1 ("literal") or 2 ("squared").
    """
    if v_variant not in V_VARIANTS:
        raise ValueError(f"unknown v variant {v_variant!r}")
    M = N + 2
    e4 = _eis(4, M)
    e32 = e4.pow_rat(Q(3, 2))
    e6 = _eis(6, M)
    E32 = MultiSeries.tensor([e32, e32], M)
    inv_E32 = MultiSeries.tensor([e32.inverse(M + 1)] * 2, M)
    F = MultiSeries.tensor([e6, e6], M)
    num = E32 - F
    u = (num * inv_E32).scale(Q(1, 864))
    delta = EtaQuotient({1: 24}).expand(M + 1)
    dd = MultiSeries.tensor([delta, delta], M)
    # W = u^2 v = dd E^-3 num^(2-k)
    W = dd * inv_E32 * inv_E32
    if v_variant == "literal":
        W = W * num
    return ReducedMirror(u.truncate(N), W.truncate(N), v_variant)


def red_compose(mirror: ReducedMirror, variant: str = "corrected") -> MultiSeries:
    """w0_red(u, v) = sum c_nm u^(n-2m) W^m, a power series in (q1, q2)."""
    u, W = mirror.u, mirror.W
    N = min(u.total_degree, W.total_degree)
    upow = [MultiSeries.constant(1, N, 2)]
    for _ in range(N):
        upow.append(upow[-1] * u)
    out = MultiSeries({}, N, 2)
    Wm = MultiSeries.constant(1, N, 2)
    for m in range(N // 2 + 1):
        for k in range(N + 1 - 2 * m):
            c = red_coeff(k + 2 * m, m, variant)
            if c:
                out = out + (upow[k] * Wm).scale(c)
        Wm = Wm * W
    return out


def _e4_quarter(N: int) -> MultiSeries:
    f = _eis(4, N + 1).pow_rat(Q(1, 4))
    return MultiSeries.tensor([f, f], N)


@dataclass
class ReducedReport:
    bidegree: int
    coefficient_variant: str
    v_variant: str
    identity: bool
    first_mismatch: tuple | None
    tau: bool | None = None
    tau_constant: str | None = None
    tried: list = field(default_factory=list)

    def to_dict(self) -> dict:
        return asdict(self)


def red_identity_check(T: int = 6, variant: str = "corrected", v_variant: str = "squared"):
    """(ok, first offending bidegree) for w0_red(u, v) = E4^(1/4) E4~^(1/4) in the box T x T."""
    N = 2 * T
    lhs = red_compose(red_mirror(N, v_variant), variant)
    bad = first_box_difference(lhs, _e4_quarter(N), T)
    return bad is None, bad


def red_tau_series(T: int = 6, variant: str = "corrected", v_variant: str = "squared", a=Q(-1, 6), b=Q(-1, 12)):
    """(q1 q2)^(1/12) u^a v^b / w0_red as a series in (q1, q2); needs a = 2b."""
    a, b = q(a), q(b)
    if a != 2 * b:
        raise ValueError("u^a v^b is a power series in q only for a = 2b")
    N = 2 * T + 2
    mir = red_mirror(N, v_variant)
    w0 = red_compose(mir, variant)
    unit = mir.W.divide_monomial((1, 1))
    c0 = unit[(0, 0)]
    if c0 != 1:
        raise ArithmeticError("W / (q1 q2) does not start with 1")
    return unit.pow_unit(b) * w0.inverse()


def red_tau_check(T: int = 6, variant: str = "corrected", v_variant: str = "squared"):
    """(ok, constant) for u^(-1/6) v^(-1/12) / w0_red = const / (eta^2 eta~^2)."""
    lhs = red_tau_series(T, variant, v_variant)
    N = lhs.total_degree
    prod = EtaQuotient({1: -2}).expand(N + 2).mul_monomial(Q(1, 12))
    rhs = MultiSeries.tensor([prod, prod], N)
    c = lhs[(0, 0)] / rhs[(0, 0)]
    bad = first_box_difference(lhs, rhs.scale(c), T)
    return bad is None, c


def red_select(T: int = 6) -> ReducedReport:
    """Try every formula variant; report the first that satisfies the period identity."""
    tried = []
    pick = None
    for cv in ("corrected", "literal"):
        for vv in ("squared", "literal"):
            ok, bad = red_identity_check(T, cv, vv)
            tried.append({"coefficient": cv, "v": vv, "identity": ok, "first_mismatch": bad})
            if ok and pick is None:
                pick = (cv, vv)
    if pick is None:
        return ReducedReport(T, "none", "none", False, tried[0]["first_mismatch"], tried=tried)
    cv, vv = pick
    ok_tau, c = red_tau_check(T, cv, vv)
    return ReducedReport(T, cv, vv, True, None, ok_tau, fmt(c), tried)
