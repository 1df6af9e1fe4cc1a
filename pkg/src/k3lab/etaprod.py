"""Dedekind eta quotients, cusp-order analysis and the level tables."""
from __future__ import annotations

import csv
import os
import re
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from math import gcd
from pathlib import Path
from typing import Mapping

from .exactalg import ONE, ZERO, Q, Rational, fmt, q
from .qseries import PuiseuxSeries, exp_trunc

DATA_ENV = "K3LAB_DATA"


def data_dir() -> Path:
    env = os.environ.get(DATA_ENV)
    if env:
        return Path(env)
    return Path(__file__).resolve().parent / "data"


def divisors(n: int) -> list:
    return [d for d in range(1, n + 1) if n % d == 0]


def _lcm(a: int, b: int) -> int:
    return a * b // gcd(a, b)


# ---------------------------------------------------------------- eta series


@lru_cache(maxsize=None)
def _euler_log(n: int) -> tuple:
    """Coefficients of log prod_{k>=1} (1 - q^k) = -sum sigma(N)/N q^N, N < n."""
    out = [ZERO] * n
    for d in range(1, n):
        for mult in range(d, n, d):
            out[mult] -= Q(d, mult)
    return tuple(out)


def dedekind_eta(m: int, T: int = 100) -> PuiseuxSeries:
    """q^(m/24) prod (1 - q^(mk)), known to relative order T in q."""
    if m < 1:
        raise ValueError("eta(m*tau) needs m >= 1")
    return EtaQuotient({m: 1}).expand(T)


# ---------------------------------------------------------------- quotients

_FACTOR = re.compile(r"^(\d+)(?:\^\(?(-?\d+(?:/\d+)?)\)?)?$")


@dataclass(frozen=True)
class EtaQuotient:
    """prod_m eta(m tau)^(d_m) with rational d_m."""

    exps: Mapping[int, Rational] = field(default_factory=dict)

    def __post_init__(self):
        clean = {}
        for m, d in dict(self.exps).items():
            m = int(m)
            if m < 1:
                raise ValueError("eta index must be positive")
            d = q(d)
            if d:
                clean[m] = clean.get(m, ZERO) + d
        object.__setattr__(self, "exps", {m: d for m, d in sorted(clean.items()) if d})

    # text form -----------------------------------------------------------
    @classmethod
    def parse(cls, text: str) -> "EtaQuotient":
        """Parse ``2^48 / 1^24 4^24``; exponents may be rationals like 1/2 or (8/3)."""
        exps: dict = {}
        sign = 1
        text = text.replace("/ ", " / ").replace(" /", " / ")
        for tok in text.split():
            if tok == "/":
                if sign == -1:
                    raise ValueError("more than one '/' in eta quotient")
                sign = -1
                continue
            m = _FACTOR.match(tok)
            if not m:
                raise ValueError(f"bad eta factor {tok!r}")
            e = q(m.group(2)) if m.group(2) else ONE
            k = int(m.group(1))
            exps[k] = exps.get(k, ZERO) + sign * e
        return cls(exps)

    def render(self) -> str:
        def one(m, d):
            return str(m) if d == 1 else (f"{m}^{fmt(d)}" if d.denominator == 1 else f"{m}^({fmt(d)})")

        num = [one(m, d) for m, d in self.exps.items() if d > 0]
        den = [one(m, -d) for m, d in self.exps.items() if d < 0]
        if not num and not den:
            return "1"
        s = " ".join(num) if num else "1"
        if den:
            s += " / " + " ".join(den)
        return s

    def __str__(self):
        return self.render()

    # algebra -------------------------------------------------------------
    def __mul__(self, other: "EtaQuotient") -> "EtaQuotient":
        out = dict(self.exps)
        for m, d in other.exps.items():
            out[m] = out.get(m, ZERO) + d
        return EtaQuotient(out)

    def __pow__(self, r) -> "EtaQuotient":
        r = q(r)
        return EtaQuotient({m: d * r for m, d in self.exps.items()})

    def inverse(self) -> "EtaQuotient":
        return self ** -1

    def __truediv__(self, other):
        return self * other.inverse()

    def __eq__(self, other) -> bool:
        return isinstance(other, EtaQuotient) and self.exps == other.exps

    def __hash__(self):
        return hash(tuple(self.exps.items()))

    # invariants ----------------------------------------------------------
    @property
    def level(self) -> int:
        n = 1
        for m in self.exps:
            n = _lcm(n, m)
        return n

    @property
    def weight(self) -> Rational:
        return sum(self.exps.values(), ZERO) / 2

    @property
    def leading_exponent(self) -> Rational:
        return sum((m * d for m, d in self.exps.items()), ZERO) / 24

    # expansion -----------------------------------------------------------
    def expand(self, T: int = 100) -> PuiseuxSeries:
        """q-expansion to relative order T (in integer powers of q)."""
        lg = [ZERO] * T
        base = _euler_log(T)
        for m, d in self.exps.items():
            for k in range(1, (T - 1) // m + 1):
                lg[k * m] += d * base[k]
        body = exp_trunc(lg, T)
        lead = Fraction(int(self.leading_exponent.numerator), int(self.leading_exponent.denominator))
        s = lead.denominator
        c = []
        for x in body:
            c.append(x)
            c.extend([ZERO] * (s - 1))
        return PuiseuxSeries(c, lead.numerator, s, lead.numerator + T * s)


def cusp_order_sum(E: EtaQuotient, D: int, N: int | None = None) -> Rational:
    """sum_m gcd(D, m)^2 / m * d_m for a divisor D of the level."""
    N = E.level if N is None else N
    if N % D:
        raise ValueError(f"{D} does not divide the level {N}")
    if any(N % m for m in E.exps):
        raise ValueError(f"level {N} is not a multiple of every eta index")
    return sum((Q(gcd(D, m) ** 2, m) * d for m, d in E.exps.items()), ZERO)


def cusp_orders(E: EtaQuotient, N: int | None = None) -> dict:
    N = E.level if N is None else N
    return {D: cusp_order_sum(E, D, N) for D in divisors(N)}


CUSP_FORM = "cusp_form"
HOLOMORPHIC = "holomorphic_noncusp"
NONHOLOMORPHIC = "nonholomorphic"


def classify(E: EtaQuotient, N: int | None = None) -> str:
    vals = cusp_orders(E, N).values()
    if all(v > 0 for v in vals):
        return CUSP_FORM
    if all(v >= 0 for v in vals):
        return HOLOMORPHIC
    return NONHOLOMORPHIC


# ---------------------------------------------------------------- tables


@dataclass(frozen=True)
class GroupRecord:
    n: int
    type_name: str
    n_cusps: int


@dataclass(frozen=True)
class ThompsonEta:
    n: int
    quotient: EtaQuotient
    c: Rational
    b: Rational | None
    cusp_form: EtaQuotient | None


def _read_tsv(name: str, base: Path | None = None) -> list:
    path = (base or data_dir()) / name
    with open(path, newline="") as fh:
        rows = [r for r in csv.DictReader((ln for ln in fh if not ln.startswith("#")), delimiter="\t")]
    return rows


@lru_cache(maxsize=8)
def _groups(base: str) -> dict:
    return {
        int(r["n"]): GroupRecord(int(r["n"]), r["type"], int(r["N_c"]))
        for r in _read_tsv("groups.tsv", Path(base))
    }


def groups(base: Path | None = None) -> dict:
    return _groups(str(base or data_dir()))


def group(n: int, base: Path | None = None) -> GroupRecord:
    g = groups(base).get(n)
    if g is None:
        raise KeyError(f"level {n} is not a genus-zero level in the table")
    return g


@lru_cache(maxsize=8)
def _thompson(base: str) -> dict:
    out: dict = {}
    for r in _read_tsv("thompson_eta.tsv", Path(base)):
        n = int(r["n"])
        out.setdefault(n, []).append(
            ThompsonEta(
                n,
                EtaQuotient.parse(r["quotient"]),
                q(r["c"]),
                q(r["b"]) if r["b"].strip() else None,
                EtaQuotient.parse(r["cusp_form"]) if r["cusp_form"].strip() else None,
            )
        )
    return out


def thompson_rows(n: int, base: Path | None = None) -> list:
    rows = _thompson(str(base or data_dir())).get(n)
    if not rows:
        raise LookupError("no eta product; supply q-expansion data")
    return list(rows)


def thompson_eta(n: int, which: int | None = None, base: Path | None = None):
    """(eta quotient of T_n + c_n, c_n). Defaults to the row carrying a recorded b."""
    rows = thompson_rows(n, base)
    if which is None:
        pick = next((r for r in rows if r.b is not None), rows[0])
    else:
        pick = rows[which]
    return pick.quotient, pick.c


def all_thompson(base: Path | None = None) -> list:
    out = []
    for rows in _thompson(str(base or data_dir())).values():
        out.extend(rows)
    return out


@lru_cache(maxsize=8)
def _exceptions(base: str) -> dict:
    return {int(r["n"]): EtaQuotient.parse(r["quotient"]) for r in _read_tsv("bcov_exceptions.tsv", Path(base))}


def _sign_counts(n: int):
    plus = [r for r in divisors(n) if gcd(r, n // r) != 1]
    minus = [r for r in divisors(n) if gcd(r, n // r) == 1]
    return plus, minus


def eta_bcov(n: int, base: Path | None = None) -> EtaQuotient:
    """The weight-two eta product attached to the genus-zero level n."""
    group(n, base)
    plus, minus = _sign_counts(n)
    exc = _exceptions(str(base or data_dir()))
    balanced = len(plus) == len(minus)
    if n in exc:
        if not balanced:
            raise AssertionError(f"level {n} is tabulated as exceptional but n+ != n-")
        E = exc[n]
    else:
        if balanced:
            raise AssertionError(f"level {n} has n+ = n- but no tabulated quotient")
        w = Q(4, len(plus) - len(minus))
        E = EtaQuotient({**{r: w for r in plus}, **{r: -w for r in minus}})
    if E.weight != 2:
        raise AssertionError(f"eta_bcov({n}) has weight {E.weight}")
    return E


def gamma(n: int) -> Rational:
    """Leading q-exponent of eta_bcov(n)."""
    return eta_bcov(n).leading_exponent
