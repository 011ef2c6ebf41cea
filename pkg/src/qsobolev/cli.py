"""Command-line front end: ``qsobolev eval|zeros|n0|table|verify``."""
from __future__ import annotations

import argparse
import csv
import io
import json
import sys

from . import __version__
from .errors import QSobolevError
from .families import asci, family_eval, stieltjes_wigert
from .sobolev import SobolevSpec, sobolev_eval, sobolev_eval_hypergeometric
from .tables import DEFAULT_BITS, TABLE_IDS, compute_table, table_records
from .verify import GROUPS, run_groups
from .zeros import n0_critical, zeros_classical, zeros_rn, zeros_sobolev


class UsageError(Exception):
    pass


def _build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--family", choices=["asci", "sw"], default="asci")
    common.add_argument("--a", default=None, help="ASCI parameter (a < 0)")
    common.add_argument("--q", default="0.5")
    common.add_argument("--alpha", default=None, help="mass point")
    common.add_argument("--N", default=None, help="mass (>= 0)")
    common.add_argument("--n", type=int, default=None, help="degree")
    common.add_argument("--precision", type=int, default=None, help="significand bits")
    common.add_argument("--format", choices=["csv", "json", "text"], default="text")

    p = argparse.ArgumentParser(prog="qsobolev", description=__doc__)
    p.add_argument("--version", action="version", version=__version__)
    sub = p.add_subparsers(dest="command", required=True)
    e = sub.add_parser("eval", parents=[common], help="evaluate p_n or s_n")
    e.add_argument("--x", action="append", required=True)
    z = sub.add_parser("zeros", parents=[common], help="zeros of p_n, r_n or s_n")
    z.add_argument("--limit", action="store_true", help="zeros of r_n instead of s_n")
    c = sub.add_parser("n0", parents=[common], help="critical mass")
    c.add_argument("--endpoint", default=None)
    t = sub.add_parser("table", parents=[common], help="reproduce a named table")
    t.add_argument("--table", choices=TABLE_IDS, required=True)
    v = sub.add_parser("verify", parents=[common], help="run invariant groups")
    v.add_argument("--only", action="append", choices=sorted(GROUPS), default=None)
    v.add_argument("--n-max", type=int, default=8)
    return p


def _family(args, bits):
    try:
        if args.family == "asci":
            if args.a is None:
                raise UsageError("--a is required for --family asci")
            return asci(args.a, args.q, bits)
        if args.a is not None:
            raise UsageError("--a is not used by --family sw")
        return stieltjes_wigert(args.q, bits)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc


def _need_n(args, minimum=0):
    if args.n is None or args.n < minimum:
        raise UsageError(f"--n must be an integer >= {minimum}")
    return args.n


def _spec(fam, args):
    if args.N is None and args.alpha is None:
        return None
    if args.N is None or args.alpha is None:
        raise UsageError("--N and --alpha go together")
    try:
        return SobolevSpec(fam, args.N, args.alpha)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc


def _provenance(ctx):
    return {
        "precision_bits": ctx.sig_bits,
        "truncation_tolerance": ctx.mp.nstr(ctx.eps_trunc, 6),
        "version": __version__,
    }


def _emit(fmt, header, rows, provenance, out):
    if fmt == "json":
        records = [dict(zip(header, r)) for r in rows]
        json.dump({"provenance": provenance, "records": records}, out, indent=2)
        out.write("\n")
    elif fmt == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(header)
        w.writerows(rows)
        out.write(buf.getvalue())
    else:
        for r in rows:
            out.write(" ".join(str(v) for v in r) + "\n")


def cmd_eval(args, out):
    fam = _family(args, args.precision or 384)
    n = _need_n(args)
    spec = _spec(fam, args)
    mp, ctx = fam.mp, fam.ctx
    nice = lambda v: mp.nstr(v, 20).removesuffix(".0")  # noqa: E731
    header = ["x", "value", "alternative", "rel_diff"]
    rows = []
    for xs in args.x:
        try:
            x = fam.real(xs)
        except (ValueError, TypeError) as exc:
            raise UsageError(f"bad --x value {xs!r}") from exc
        if spec is None:
            v = family_eval(fam, n, x)
            alt = family_eval(fam, n, x, "hypergeometric")
        else:
            v = sobolev_eval(spec, n, x)
            try:
                alt = sobolev_eval_hypergeometric(spec, n, x)
            except QSobolevError:
                alt = None
        rel = None if alt is None else abs(v - alt) / max(abs(v), abs(alt), mp.ldexp(1, -ctx.sig_bits))
        rows.append([nice(x), nice(v), "" if alt is None else nice(alt),
                     "" if rel is None else mp.nstr(rel, 3)])
    if args.format == "text":
        for r in rows:
            out.write(r[1] + "\n")
    else:
        _emit(args.format, header, rows, _provenance(ctx), out)


def cmd_zeros(args, out):
    fam = _family(args, args.precision or 384)
    n = _need_n(args, 1)
    if args.limit:
        if args.alpha is None:
            raise UsageError("--limit needs --alpha")
        try:
            zs = zeros_rn(fam, args.alpha, n)
        except ValueError as exc:
            raise UsageError(str(exc)) from exc
    else:
        spec = _spec(fam, args)
        zs = zeros_classical(fam, n) if spec is None else zeros_sobolev(spec, n)
    mp = fam.mp
    digits = mp.dps - 20
    rows = [[k + 1, mp.nstr(z, digits), mp.nstr(lo, digits), mp.nstr(hi, digits)]
            for k, (z, (lo, hi)) in enumerate(zip(zs.zeros, zs.brackets))]
    _emit(args.format, ["k", "zero", "bracket_lo", "bracket_hi"], rows, _provenance(fam.ctx), out)


def cmd_n0(args, out):
    fam = _family(args, args.precision or DEFAULT_BITS)
    n = _need_n(args, 1)
    if args.alpha is None:
        raise UsageError("--alpha is required")
    N0 = n0_critical(fam, n, args.alpha, args.endpoint)
    val = fam.mp.nstr(N0, 12)
    if args.format == "text":
        out.write(val + "\n")
    else:
        _emit(args.format, ["n", "alpha", "N0"], [[n, args.alpha, val]], _provenance(fam.ctx), out)


def cmd_table(args, out):
    bits = args.precision or DEFAULT_BITS
    table = compute_table(args.table, bits)
    mp = asci(-1, "1/2", bits).mp
    header, rows = table_records(table, mp)
    fmt = "csv" if args.format == "text" else args.format
    prov = {"precision_bits": bits, "truncation_tolerance": mp.nstr(table.eps_trunc, 6),
            "version": __version__, "table": args.table}
    _emit(fmt, header, rows, prov, out)


def cmd_verify(args, out):
    results = run_groups(args.only, args.precision, args.n_max)
    rows = [[r.name, "pass" if r.ok else "FAIL", r.detail] for r in results]
    if args.format == "text":
        for name, status, detail in rows:
            out.write(f"{status:4s} {name}: {detail}\n")
    else:
        prov = {"precision_bits": args.precision or "default", "version": __version__}
        _emit(args.format, ["group", "status", "detail"], rows, prov, out)
    return 0 if all(r.ok for r in results) else 1


COMMANDS = {"eval": cmd_eval, "zeros": cmd_zeros, "n0": cmd_n0, "table": cmd_table, "verify": cmd_verify}


def main(argv=None, out=None) -> int:
    out = sys.stdout if out is None else out
    parser = _build_parser()
    args = parser.parse_args(argv)
    if args.precision is not None and args.precision < 64:
        parser.print_usage(sys.stderr)
        print("qsobolev: error: --precision must be >= 64", file=sys.stderr)
        return 2
    try:
        code = COMMANDS[args.command](args, out)
    except UsageError as exc:
        parser.print_usage(sys.stderr)
        print(f"qsobolev: error: {exc}", file=sys.stderr)
        return 2
    except QSobolevError as exc:
        print(f"qsobolev: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1
    return code or 0


if __name__ == "__main__":
    sys.exit(main())
