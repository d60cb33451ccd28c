"""Command-line interface.

Exit codes: 0 success (or VERIFIED), 1 refuted or mismatch, 2 input error,
3 refusal because an instance exceeds the size budget.
"""
from __future__ import annotations

import argparse
import json
import re
import sys

from . import certificates as cert

EXIT_OK, EXIT_REFUTED, EXIT_INPUT, EXIT_BUDGET = 0, 1, 2, 3


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.format_usage()}{self.prog}: error: {message}")


def parse_module(text: str, m: int):
    """``Z``, ``ZG``/``Z(m)``, ``I``/``I(m)`` or a tensor power such as ``I^3``.

    Inside the parentheses either the letter ``m`` or the value of ``m`` is accepted.
    """
    from .groupring import aug_ideal, regular_module, tensor_power, trivial_module

    t = text.replace(" ", "")
    mo = re.fullmatch(r"(Z|ZG|I)(?:\((m|\d+)\))?(?:\^(\d+))?", t)
    if not mo or (mo.group(1) == "ZG" and mo.group(2)):
        raise UsageError(f"unknown module {text!r}; use Z, ZG, Z(m), I, I(m) or a power like I^2")
    kind, arg = mo.group(1), mo.group(2)
    if arg is not None and arg != "m" and int(arg) != m:
        raise UsageError(f"module {text!r} does not match --m {m}")
    if kind == "Z" and arg is not None:
        kind = "ZG"
    base = {"Z": trivial_module, "ZG": regular_module, "I": aug_ideal}[kind](m)
    k = int(mo.group(3)) if mo.group(3) else 1
    if k < 1:
        raise UsageError("tensor power must be at least 1")
    return tensor_power(base, k)


def _int_at_least(lo):
    def conv(s):
        try:
            v = int(s)
        except ValueError:
            raise argparse.ArgumentTypeError(f"{s!r} is not an integer") from None
        if v < lo:
            raise argparse.ArgumentTypeError(f"{v} is below the minimum {lo}")
        return v
    return conv


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--max-degree", type=_int_at_least(0), default=8,
                        help="largest degree any command may touch (default 8)")
    common.add_argument("--budget", type=_int_at_least(0), default=5000,
                        help="column cap for brute-force solving (default 5000)")
    common.add_argument("--cache-dir", default=None, help="directory for verified diagonals")
    common.add_argument("--json", action="store_true", help="print the certificate as JSON")
    common.add_argument("--out", default=None, help="also write the certificate to this file")

    P = _Parser(prog="bscat", description="Berstein-Schwarz class computations with certificates")
    sub = P.add_subparsers(dest="command", parser_class=_Parser)
    sub.required = True
    pos = _int_at_least(1)
    mod = _int_at_least(2)

    s = sub.add_parser("cohom", parents=[common], help="H^n(Z_m; M)")
    s.add_argument("--m", type=mod, required=True)
    s.add_argument("--module", default="Z")
    s.add_argument("--deg", type=_int_at_least(0), required=True)

    s = sub.add_parser("homology", parents=[common], help="H_n(Z_m; M)")
    s.add_argument("--m", type=mod, required=True)
    s.add_argument("--module", default="Z")
    s.add_argument("--deg", type=_int_at_least(0), required=True)

    s = sub.add_parser("bs", parents=[common], help="the class beta_m by both definitions")
    s.add_argument("--m", type=mod, required=True)

    s = sub.add_parser("bs-power", parents=[common], help="nonvanishing of beta_m^k")
    s.add_argument("--m", type=mod, required=True)
    s.add_argument("--k", type=pos, required=True)
    s.add_argument("--convention", choices=["koszul", "plain"], default="koszul")

    s = sub.add_parser("bs-order", parents=[common], help="order and divisibility of beta_m")
    s.add_argument("--m", type=mod, required=True)

    s = sub.add_parser("decompose", parents=[common], help="beta_pq through phi")
    s.add_argument("--p", type=mod, required=True)
    s.add_argument("--q", type=mod, required=True)

    s = sub.add_parser("vanish", parents=[common], help="u*(beta_pq^(n+1)) = 0 on L^n_p x L^n_q")
    s.add_argument("--n", type=pos, required=True)
    s.add_argument("--p", type=mod, required=True)
    s.add_argument("--q", type=mod, required=True)
    s.add_argument("--method", choices=["structured", "bruteforce", "both"], default="structured")
    s.add_argument("--convention", choices=["koszul", "plain"], default="plain")

    s = sub.add_parser("cup-length", parents=[common], help="certified cup-length lower bound")
    s.add_argument("--n", type=pos, required=True)
    s.add_argument("--p", type=mod, required=True)
    s.add_argument("--q", type=mod, default=None)
    s.add_argument("--menu", default="Z,I", help="comma list drawn from Z and I")

    s = sub.add_parser("bounds", parents=[common], help="LS-category bounds table")
    s.add_argument("--n", type=pos, required=True)
    s.add_argument("--p", type=mod, required=True)
    s.add_argument("--q", type=mod, required=True)

    s = sub.add_parser("essential", parents=[common], help="pushforward of the fundamental class")
    s.add_argument("--n", type=pos, required=True)
    s.add_argument("--p", type=mod, required=True)
    s.add_argument("--q", type=mod, default=None)

    s = sub.add_parser("olum", parents=[common], help="homotopy equivalence of two lens spaces")
    s.add_argument("a")
    s.add_argument("b")

    s = sub.add_parser("emss", parents=[common], help="stable parallelizability of a lens space")
    s.add_argument("spec")

    s = sub.add_parser("bezout", parents=[common], help="k p + l q = 1")
    s.add_argument("--p", type=pos, required=True)
    s.add_argument("--q", type=pos, required=True)

    s = sub.add_parser("recheck", parents=[common], help="re-validate a certificate file")
    s.add_argument("file")
    return P


def _cap(args, *degrees):
    for d in degrees:
        if d > args.max_degree:
            raise UsageError(f"degree {d} exceeds --max-degree {args.max_degree}")


def _emit(args, c: cert.Certificate, human: str, out) -> int:
    if args.out:
        c.save(args.out)
    if args.json:
        print(c.to_json(indent=1), file=out)
    else:
        print(human, file=out)
        for desc, ok in c.checks:
            print(f"  [{'ok' if ok else 'FAIL'}] {desc}", file=out)
        print(f"status: {c.status}", file=out)
    return {cert.VERIFIED: EXIT_OK, cert.REFUTED: EXIT_REFUTED}.get(c.status, EXIT_OK)


def _group_cmd(args, out, homology: bool) -> int:
    from .cohomology import cohomology_group, homology_group
    from .complexes import periodic_resolution

    _cap(args, args.deg)
    M = parse_module(args.module, args.m)
    W = periodic_resolution(args.m, args.deg + 1, homotopy=None)
    G = (homology_group if homology else cohomology_group)(W, M, args.deg)
    if args.json:
        kind = "homology" if homology else "cohomology"
        print(json.dumps({"group": kind, "m": str(args.m), "module": M.name, "degree": str(args.deg),
                          "invariant_factors": [str(d) for d in G.invariant_factors]}, sort_keys=True),
              file=out)
    else:
        print(str(G), file=out)
    return EXIT_OK


def dispatch(args, out) -> int:
    from . import berstein as B
    from . import lensarith as L

    cmd = args.command
    if cmd == "cohom":
        return _group_cmd(args, out, False)
    if cmd == "homology":
        return _group_cmd(args, out, True)
    if cmd == "bs":
        c = B.bs_equal(args.m)
        return _emit(args, c, f"beta_{args.m}: Cayley cocycle and connecting image", out)
    if cmd == "bs-order":
        c = B.order_certificate(args.m)
        return _emit(args, c, f"order of beta_{args.m}: {c.parameters['order']}", out)
    if cmd == "bs-power":
        _cap(args, args.k)
        from .complexes import cached_diagonal

        D = cached_diagonal(args.m, args.k + 1, args.cache_dir)
        c = B.power_certificate(args.m, args.k, Delta=D, convention=args.convention)
        verdict = "nonzero" if c.status == cert.VERIFIED else "not shown nonzero"
        return _emit(args, c, f"beta_{args.m}^{args.k}: {verdict}", out)
    if cmd == "decompose":
        c = B.decompose_certificate(args.p, args.q)
        P = c.parameters
        return _emit(args, c, f"beta_{args.p * args.q} = phi_*(beta_{args.p} x {P['l']} t_{args.q}, "
                              f"{P['k']} t_{args.p} x beta_{args.q})", out)
    if cmd == "vanish":
        _cap(args, args.n + 1)
        methods = ["structured", "bruteforce"] if args.method == "both" else [args.method]
        certs = []
        for meth in methods:
            if meth == "structured":
                certs.append(B.vanish_structured(args.n, args.p, args.q, args.convention, args.cache_dir))
            else:
                certs.append(B.vanish_bruteforce(args.n, args.p, args.q, args.budget, args.convention,
                                                 args.cache_dir))
        if len(certs) == 2:
            agree = certs[0].parameters["conclusion"] == certs[1].parameters["conclusion"]
            c = cert.Certificate("ber-nul", dict(certs[0].parameters, method="both"), cert.INCOMPLETE)
            c.check("structured route verified", certs[0].status == cert.VERIFIED)
            c.check("brute-force route verified", certs[1].status == cert.VERIFIED)
            c.check("routes agree", agree)
            c.witness = {"x": certs[1].witness.get("x", []),
                         "structured": certs[0].to_dict(), "bruteforce": certs[1].to_dict()}
            c.status = cert.VERIFIED if c.all_passed else cert.REFUTED
            c.parameters["conclusion"] = certs[0].parameters["conclusion"]
        else:
            c = certs[0]
        return _emit(args, c, f"u*(beta^{args.n + 1}) on L^{args.n}_{args.p} x L^{args.n}_{args.q}: "
                              f"{c.parameters['conclusion']}", out)
    if cmd == "cup-length":
        _cap(args, 2 * args.n if args.q else args.n)
        menu = tuple(x.strip() for x in args.menu.split(",") if x.strip())
        if any(x not in ("Z", "I") for x in menu):
            raise UsageError("menu entries must be Z or I")
        s, c = L.cup_length_lower(args.n, args.p, args.q, menu, args.budget, args.cache_dir)
        label = c.parameters.get("product", "none")
        return _emit(args, c, f"cup-length lower bound: {s} ({label})", out)
    if cmd == "bounds":
        _cap(args, 2 * args.n)
        rep = L.bounds_report(args.n, args.p, args.q, args.budget, args.cache_dir)
        return _emit(args, L.bounds_certificate(rep), rep.table(), out)
    if cmd == "essential":
        _cap(args, 2 * args.n if args.q else args.n)
        c = L.essential_certificate(args.n, args.p, args.q)
        return _emit(args, c, f"fundamental class image coordinates: {c.witness['coordinates']}", out)
    if cmd == "olum":
        a, b = L.LensSpec.parse(args.a), L.LensSpec.parse(args.b)
        c = L.olum_certificate(a, b)
        w = c.witness
        text = (f"{a} ~ {b}: a0 = {w['a0']}, sign {w['sign']:+d}" if w["equivalent"]
                else f"{a} and {b} are not homotopy equivalent")
        return _emit(args, c, text, out)
    if cmd == "emss":
        spec = L.LensSpec.parse(args.spec)
        c = L.emss_certificate(spec)
        w = c.witness
        res = ", ".join(f"j={j}: {v}" for j, v in w["residues"].items()) or "no j"
        return _emit(args, c, f"{spec}: stably parallelizable = {w['parallelizable']} "
                              f"(p >= k: {w['p_at_least_k']}; {res})", out)
    if cmd == "bezout":
        c = L.bezout_certificate(args.p, args.q)
        return _emit(args, c, f"k = {c.witness['k']}, l = {c.witness['l']}", out)
    if cmd == "recheck":
        from .replay import recheck

        doc = cert.load(args.file)
        status, results = recheck(doc)
        if args.json:
            print(json.dumps({"status": status, "checks": [{"identity": d, "passed": ok} for d, ok in results]},
                             sort_keys=True, indent=1), file=out)
        else:
            for desc, ok in results:
                print(f"  [{'ok' if ok else 'FAIL'}] {desc}", file=out)
            print(status, file=out)
        return EXIT_OK if status == cert.VERIFIED else EXIT_REFUTED
    raise UsageError(f"unknown command {cmd!r}")


def run(argv=None, out=None, err=None) -> int:
    from .berstein import BudgetExceeded
    from .exactla import InputError

    out = sys.stdout if out is None else out
    err = sys.stderr if err is None else err
    try:
        args = build_parser().parse_args(argv)
        return dispatch(args, out)
    except UsageError as exc:
        print(str(exc), file=err)
        return EXIT_INPUT
    except (InputError, cert.SchemaError) as exc:
        print(f"input error: {exc}", file=err)
        return EXIT_INPUT
    except BudgetExceeded as exc:
        print(f"refused: {exc}", file=err)
        return EXIT_BUDGET


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
