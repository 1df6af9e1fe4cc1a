"""Transcribe the LaTeX operator table into .pfo files.

Development-time helper; needs sympy. Usage:

    python3 tools/transcribe_addendum.py SOURCE.md src/k3lab/data
"""
import re
import sys
from fractions import Fraction
from pathlib import Path

import sympy as sp
from sympy.parsing.sympy_parser import (
    convert_xor,
    implicit_multiplication_application,
    parse_expr,
    standard_transformations,
)

ROW = re.compile(
    r"\$\{\}\{(?P<label>[0-9]+[A-Z]+)\}\$(?P<body>.*?)"
    r"&\s*\$\\begin\{matrix\}\s*(?P<nl>\d+)(?:\\;)?\s*\\\\\s*(?P<c0>.*?)\\end\{matrix\}\s*\$",
    re.S,
)
# Leading theta^3 factors missing from the printed rows. For 25A the rows k >= 1
# match the level-25 operator derived from eta(t)/eta(25t) + 1 + 5 eta(25t)/eta(t)
# only for the leading term 24 theta^3.
LEAD_CORRECTION = {"25A": 24}
TRANSFORMS = standard_transformations + (implicit_multiplication_application, convert_xor)


def clean(body):
    body = re.sub(r"\\(begin|end)\{matrix\}", " ", body)
    for tok in ("\\\\", "$", "&", "\\left", "\\right", "\\big", "\\;"):
        body = body.replace(tok, " ")
    body = body.replace("\\theta", " t ")
    body = re.sub(r"\{(\d+)\}", r"\1", body)
    return " ".join(body.split())


def parse_c0(s):
    dagger = "dagger" in s
    s = s.replace("^\\dagger", "").replace("\\dagger", "")
    m = re.search(r"\\frac\{(\d+)\}\{(\d+)\}", s)
    if m:
        return Fraction(int(m.group(1)), int(m.group(2))), dagger
    return Fraction(int(re.search(r"\d+", s).group(0))), dagger


def main(src, out):
    text = Path(src).read_text()
    start = text.index("K3 differential operators for genus zero groups")
    text = text[start:]
    t, x = sp.symbols("t x")
    out = Path(out)
    (out / "operators").mkdir(parents=True, exist_ok=True)
    meta = ["type\tn\tN_L\tc0\tdagger"]
    for m in ROW.finditer(text):
        label = m.group("label")
        expr = sp.expand(parse_expr(clean(m.group("body")), local_dict={"t": t, "x": x},
                                    transformations=TRANSFORMS))
        poly = sp.Poly(expr, x, t)
        lead = poly.coeff_monomial(t**3) * LEAD_CORRECTION.get(label, 1)
        deg = sp.degree(expr, x)
        n = re.match(r"\d+", label).group(0)
        lines = [f"pfo order=3 n={n} type={label}"]
        for k in range(deg + 1):
            scale = lead if k else poly.coeff_monomial(t**3)
            row = [sp.Rational(poly.coeff_monomial(x**k * t**j)) / scale for j in range(4)]
            lines.append(f"x^{k} : " + " ".join(str(c) for c in row))
        (out / "operators" / f"{label}.pfo").write_text("\n".join(lines) + "\n")
        c0, dagger = parse_c0(m.group("c0"))
        meta.append(f"{label}\t{n}\t{m.group('nl')}\t{c0}\t{'1' if dagger else '0'}")
    (out / "addendum.tsv").write_text("\n".join(meta) + "\n")
    print(len(meta) - 1, "operators")


if __name__ == "__main__":
    main(*sys.argv[1:3])
