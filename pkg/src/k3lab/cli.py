"""Command-line entry point: ``k3lab <command> ...``.

Exit status is 0 when every check in the report passes, 1 when a check fails
and 2 for bad input (unknown level, missing data, unreadable file).
"""
from __future__ import annotations

import argparse
import json
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from pathlib import Path

from . import bcov, cdfamily, elliptic, latticegrp, recover
from .etaprod import DATA_ENV, CUSP_FORM, EtaQuotient, classify, cusp_orders, data_dir
from .exactalg import fmt, q
from .pfode import ThetaOperator

EXIT_OK, EXIT_FAIL, EXIT_INPUT = 0, 1, 2


class InputError(Exception):
    pass


@dataclass(frozen=True)
class RunConfig:
    trunc: int = 100
    max_degree: int = 16
    guard: int = 12
    data: Path | None = None
    fmt: str = "text"

    def __post_init__(self):
        if self.trunc < 1 or self.max_degree < 1 or self.guard < 0:
            raise InputError("--trunc and --max-degree must be positive, --guard non-negative")
        if self.data is not None and not (Path(self.data) / "groups.tsv").is_file():
            raise InputError(f"data directory {self.data} has no groups.tsv")

    @property
    def guess(self) -> recover.GuessConfig:
        return recover.GuessConfig(3, self.max_degree, self.guard)

    @property
    def base(self) -> Path:
        return Path(self.data) if self.data else data_dir()


# ---------------------------------------------------------------- output


def emit(cfg: RunConfig, report: dict, text: str) -> None:
    if cfg.fmt == "json":
        print(json.dumps(report, indent=2, sort_keys=True))
    else:
        print(text)


def _table(rows: list, header: list) -> str:
    cells = [header] + [[str(c) for c in r] for r in rows]
    width = [max(len(r[i]) for r in cells) for i in range(len(header))]
    lines = ["  ".join(c.ljust(w) for c, w in zip(r, width)).rstrip() for r in cells]
    lines.insert(1, "  ".join("-" * w for w in width))
    return "\n".join(lines)


def _load(path: str, cfg: RunConfig) -> ThetaOperator:
    p = Path(path)
    if not p.is_file():
        cand = recover.operator_path(path, cfg.base)
        if cand.is_file():
            p = cand
        else:
            raise InputError(f"no operator file {path}")
    try:
        return ThetaOperator.load(p)
    except ValueError as e:
        raise InputError(f"{p}: {e}") from None


# ---------------------------------------------------------------- commands


def cmd_derive(args, cfg: RunConfig) -> int:
    T = args.trunc_series or args.trunc_given or cfg.guess.T
    if args.degree in (None, "table"):
        degree = "table"
    elif args.degree == "min":
        degree = None
    else:
        degree = int(args.degree)
    try:
        d = recover.derive_k3_operator(args.n, c=args.c, thompson=args.thompson, cfg=cfg.guess, T=T,
                                       degree=degree, base=cfg.base)
    except LookupError as e:
        raise InputError(str(e).strip("'\"")) from None
    except KeyError as e:
        raise InputError(str(e).strip("'\"")) from None
    except ValueError as e:
        raise InputError(str(e)) from None
    if d.operator is None:
        emit(cfg, {"n": args.n, "found": False}, f"no operator of degree <= {cfg.max_degree} found")
        return EXIT_FAIL
    text = d.operator.to_text()
    if args.output:
        Path(args.output).write_text(text)
    match = None
    if d.operator.type_name:
        path = recover.operator_path(d.operator.type_name, cfg.base)
        if path.is_file():
            match = ThetaOperator.load(path).rows == d.operator.rows
    report = {
        "n": args.n, "found": True, "c": fmt(d.c), "gamma": fmt(d.gamma), "eta_bcov": d.eta_bcov.render(),
        "least_degree": d.minimal.degree, "degree": d.operator.degree,
        "matches_table": match, "operator": text,
    }
    lines = [f"level {args.n}: c = {fmt(d.c)}, gamma = {fmt(d.gamma)}, eta_bcov = {d.eta_bcov.render()}",
             f"least degree {d.minimal.degree}, presented degree {d.operator.degree}"]
    if match is not None:
        lines.append("matches the tabulated operator" if match else "differs from the tabulated operator")
    if not args.output:
        lines.append(text.rstrip())
    else:
        lines.append(f"written to {args.output}")
    emit(cfg, report, "\n".join(lines))
    return EXIT_OK if match in (None, True) else EXIT_FAIL


def _verify_one(job):
    path, T = job
    L = ThetaOperator.load(path)
    return recover.verify_k3_operator(L, T=T).to_dict()


def cmd_verify(args, cfg: RunConfig) -> int:
    T = args.order
    if args.all:
        rows = sorted(recover.addendum(cfg.base).values(), key=lambda r: (r.n, r.type_name))
        jobs = [(recover.operator_path(r.type_name, cfg.base), T) for r in rows]
    else:
        if not args.path:
            raise InputError("verify needs a path or --all")
        jobs = []
        for p in args.path:
            L = _load(p, cfg)
            if L.n is None:
                raise InputError(f"{p}: operator has no level")
            jobs.append((None, T, L))
    if args.all and args.jobs > 1:
        with ProcessPoolExecutor(args.jobs) as ex:
            reports = list(ex.map(_verify_one, jobs))
    elif args.all:
        reports = [_verify_one(j) for j in jobs]
    else:
        reports = [recover.verify_k3_operator(L, T=T, base=cfg.base).to_dict() for _, _, L in jobs]
    tab = []
    for r in reports:
        status = "FAIL" if not r["passed"] else ("WARN" if "WARN" in (r["integrality"], r["c_status"]) else "PASS")
        tab.append([r["label"], r["n"], r["identity"] + ("" if not r["identity_mismatch"] else f" (q^{r['identity_mismatch']})"),
                    f"{r['lcsl']} {r['n_lcsl']}/{r['n_cusps']}", r["integrality"], r["c"], r["c_expected"] or "-", status])
    text = _table(tab, ["type", "n", "identity", "lcsl", "integral", "c", "c0", "status"])
    n_fail = sum(not r["passed"] for r in reports)
    text += f"\n{len(reports)} operators, {n_fail} failed"
    emit(cfg, {"order": T, "reports": reports, "failed": n_fail}, text)
    return EXIT_OK if n_fail == 0 else EXIT_FAIL


def cmd_pscheme(args, cfg: RunConfig) -> int:
    L = _load(args.path, cfg)
    ps = L.pscheme
    report = {
        "points": [{"location": p.location_text(), "exponents": p.exponent_texts(), "kind": p.kind()} for p in ps.points],
        "fuchs": ps.fuchs_ok(),
        "lcsl": len(ps.lcsl()),
    }
    text = ps.table() + f"\nFuchs relation {'holds' if ps.fuchs_ok() else 'fails'}; {len(ps.lcsl())} LCSL point(s)"
    emit(cfg, report, text)
    return EXIT_OK if ps.fuchs_ok() else EXIT_FAIL


_KIND_TEXT = {"cusp_form": "cusp form", "holomorphic_noncusp": "holomorphic, not a cusp form",
              "nonholomorphic": "not holomorphic"}


def cmd_cusp(args, cfg: RunConfig) -> int:
    try:
        E = EtaQuotient.parse(args.spec)
    except ValueError as e:
        raise InputError(str(e)) from None
    N = args.level or E.level
    try:
        orders = cusp_orders(E, N)
    except ValueError as e:
        raise InputError(str(e)) from None
    kind = classify(E, N)
    report = {"quotient": E.render(), "level": N, "weight": fmt(E.weight), "kind": kind,
              "orders": {str(k): fmt(v) for k, v in orders.items()}}
    text = f"{_KIND_TEXT[kind]}, weight {fmt(E.weight)}\n" + "  ".join(f"D={k}: {fmt(v)}" for k, v in orders.items())
    emit(cfg, report, text)
    return EXIT_OK if kind == CUSP_FORM else EXIT_FAIL


def _family(name: str, cfg: RunConfig) -> ThetaOperator:
    if name.isdigit():
        try:
            row = recover.addendum_for_level(int(name), cfg.base)
        except KeyError as e:
            raise InputError(str(e).strip("'\"")) from None
        return recover.load_operator(row.type_name, cfg.base)
    return _load(name, cfg)


def cmd_bcov(args, cfg: RunConfig) -> int:
    L = _family(args.family, cfg)
    rep = bcov.check_conjecture(L, L.n, T=args.order)
    d = rep.to_dict()
    text = (f"{rep.label} (n={rep.n}, cusps={rep.n_cusps}): gamma={rep.gamma} a={rep.a} b={rep.b} "
            f"[{rep.b_source}] identity {rep.identity} const={rep.constant} -> {rep.verdict}")
    for note in rep.notes:
        text += f"\n  note: {note}"
    emit(cfg, d, text)
    if rep.verdict == "not found within bounds":
        return EXIT_OK
    return EXIT_OK if rep.passed else EXIT_FAIL


def cmd_gkz(args, cfg: RunConfig) -> int:
    if args.action == "verify":
        res = cdfamily.annihilation_residuals(args.degree)
        bad = {k: len(v) for k, v in res.items() if v}
        ok = not bad
        text = (f"all {len(res)} operators annihilate w0 (exact) through total degree {args.degree}" if ok
                else "nonzero residuals: " + ", ".join(f"{k} ({v} coefficients)" for k, v in bad.items()))
        emit(cfg, {"degree": args.degree, "ok": ok, "nonzero": bad}, text)
        return EXIT_OK if ok else EXIT_FAIL
    out = {}
    for name, (mmap, rho) in cdfamily.ORBIFOLD_POINTS.items():
        out[name] = {"rho": [fmt(r) for r in rho], "a": [fmt(a) for a in cdfamily.orbifold_exponent_solve(mmap, rho)]}
    g = cdfamily.cd_gram_data()
    out["gram"] = {"tPKP": g.factorization(), "K=tPUP as printed": g.literal_factorization()}
    lines = [f"{k}: rho=({', '.join(v['rho'])}) -> a=({', '.join(v['a'])})" for k, v in out.items() if k != "gram"]
    lines.append(f"Gram: tP K P = U+<-2>: {g.factorization()}; printed K = tP (U+<-2>) P: {g.literal_factorization()}")
    emit(cfg, out, "\n".join(lines))
    return EXIT_OK if g.factorization() else EXIT_FAIL


def cmd_reduced(args, cfg: RunConfig) -> int:
    rep = cdfamily.red_select(args.bidegree)
    lines = [f"{t['coefficient']:>9} coefficients, {t['v']:>7} v: identity "
             f"{'holds' if t['identity'] else 'fails at ' + str(t['first_mismatch'])}" for t in rep.tried]
    if rep.identity:
        lines.append(f"selected {rep.coefficient_variant}/{rep.v_variant}; tau check "
                     f"{'holds' if rep.tau else 'fails'} with constant {rep.tau_constant}")
    emit(cfg, rep.to_dict(), "\n".join(lines))
    return EXIT_OK if rep.identity and rep.tau else EXIT_FAIL


def cmd_elliptic(args, cfg: RunConfig) -> int:
    rep = elliptic.elliptic_checks(args.order)
    d = rep.to_dict()
    names = [("period", "(i) w0(x(q)) = E4^(1/4)"), ("tau_bcov", "(ii) tau_BCOV ~ 1/eta^2"),
             ("symmetry", "(iii) invariance under x -> 1/432 - x"),
             ("j_relation", "(iv) 1/(x(1-432x)) = E4^3/eta^24"), ("monodromy", "M0 M1 Minf = +-1")]
    lines = [f"{'PASS' if d[k] else 'FAIL'}  {label}" for k, label in names]
    lines.append(f"tau constant {rep.tau_constant}; order at infinity {rep.infinity_order}")
    emit(cfg, d, "\n".join(lines))
    return EXIT_OK if rep.passed else EXIT_FAIL


def cmd_lattice(args, cfg: RunConfig) -> int:
    rep = latticegrp.lattice_checks(args.instances, args.seed)
    d = rep.to_dict()
    keys = ["psi_orthogonal", "psi_homomorphism", "phi_equivariant", "wedge_gram", "wedge_homomorphism", "h2_equivariant"]
    text = "\n".join(f"{k}: {d[k]}/{rep.instances}" for k in keys)
    emit(cfg, d, text)
    return EXIT_OK if rep.passed else EXIT_FAIL


# ---------------------------------------------------------------- parser


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="k3lab", description="K3 differential operators, eta products and BCOV checks")
    p.add_argument("--trunc", type=int, default=None, help="series truncation order (default 100; derive uses the guesser length)")
    p.add_argument("--max-degree", type=int, default=16, help="largest x-degree tried by the guesser")
    p.add_argument("--guard", type=int, default=12, help="extra equations beyond the unknown count")
    p.add_argument("--data", type=Path, default=None, help=f"data directory (default ${DATA_ENV} or the packaged data)")
    p.add_argument("--format", choices=("text", "json"), default="text")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("derive", help="recover the K3 operator of a level")
    s.add_argument("n", type=int)
    s.add_argument("--c", type=q, default=None, help="constant c with 1/x = T_n + c")
    s.add_argument("--thompson", type=Path, default=None, help="file of 'n exponent coefficient' lines")
    s.add_argument("--degree", default="table", help="'table', 'min' or an integer x-degree")
    s.add_argument("--series-length", dest="trunc_series", type=int, default=None)
    s.add_argument("-o", "--output", default=None)
    s.set_defaults(func=cmd_derive)

    s = sub.add_parser("verify", help="check operator files against eta_bcov")
    s.add_argument("path", nargs="*")
    s.add_argument("--all", action="store_true")
    s.add_argument("--order", type=int, default=30)
    s.add_argument("--jobs", type=int, default=1)
    s.set_defaults(func=cmd_verify)

    s = sub.add_parser("pscheme", help="Riemann scheme of an operator")
    s.add_argument("path")
    s.set_defaults(func=cmd_pscheme)

    s = sub.add_parser("cusp", help="classify an eta quotient such as '1 2 5 10' or '2^2 / 1 4'")
    s.add_argument("spec")
    s.add_argument("--level", type=int, default=None)
    s.set_defaults(func=cmd_cusp)

    s = sub.add_parser("bcov", help="BCOV identity for an operator (type, level or file)")
    s.add_argument("family")
    s.add_argument("--order", type=int, default=30)
    s.set_defaults(func=cmd_bcov)

    s = sub.add_parser("gkz", help="Clingher-Doran GKZ checks")
    s.add_argument("action", choices=("verify", "orbifold"))
    s.add_argument("--degree", type=int, default=12)
    s.set_defaults(func=cmd_gkz)

    s = sub.add_parser("reduced", help="reduced-family identities")
    s.add_argument("action", choices=("check",))
    s.add_argument("--bidegree", type=int, default=6)
    s.set_defaults(func=cmd_reduced)

    s = sub.add_parser("elliptic", help="Weierstrass-family checks")
    s.add_argument("action", choices=("check",))
    s.add_argument("--order", type=int, default=30)
    s.set_defaults(func=cmd_elliptic)

    s = sub.add_parser("lattice", help="psi and Psi identities on random inputs")
    s.add_argument("action", choices=("check",))
    s.add_argument("--instances", type=int, default=100)
    s.add_argument("--seed", type=int, default=0)
    s.set_defaults(func=cmd_lattice)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        args.trunc_given = args.trunc
        cfg = RunConfig(args.trunc or 100, args.max_degree, args.guard, args.data, args.format)
        if cfg.data is not None:
            os.environ[DATA_ENV] = str(cfg.data)
        return args.func(args, cfg)
    except InputError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_INPUT
    except (FileNotFoundError, KeyError) as e:
        print(f"error: {str(e).strip(chr(39))}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
