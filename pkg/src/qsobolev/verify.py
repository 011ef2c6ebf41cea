"""Invariant groups run by ``qsobolev verify``.

Each group returns a GroupResult; the first failing check of a group is
named in its detail string.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

from .errors import QSobolevError
from .families import (
    asci,
    family_eval,
    family_norm_sq,
    family_polys,
    functional_inner,
    stieltjes_wigert,
)
from .kernels import kernel, kernel01, reproducing_check
from .qcalc import PrecisionContext, q_factorial, q_number, q_pochhammer, jackson_integral
from .sobolev import (
    SobolevSpec,
    five_term_a,
    five_term_a_projection,
    five_term_lambda,
    five_term_lambda_projection,
    normalized_identity_check,
    qsode_fit,
    sobolev_eval,
    sobolev_eval_hypergeometric,
    sobolev_inner,
    sobolev_norm_sq,
    sobolev_poly,
)
from .tables import TABLE_IDS, compare_to_reference, guarded_table
from .zeros import interlacing_report, zeros_kernel01


@dataclass(frozen=True)
class GroupResult:
    name: str
    ok: bool
    detail: str


class CheckFailed(Exception):
    pass


def _close(a, b, tol, what, scale=None):
    scale = max(abs(a), abs(b)) if scale is None else scale
    if abs(a - b) > tol * max(scale, 1e-300):
        raise CheckFailed(f"{what}: {a} vs {b}")


def _families(bits):
    return [asci(-1, "1/2", bits), asci("-2.5", "0.3", bits), stieltjes_wigert("1/2", bits)]


def _sample_x(fam):
    return [fam.real(v) for v in ("-3.5", "-0.7", "0.15", "0.9", "2.25", "7")]


def g_qcalc(bits, n_max):
    for q in ("0.3", "0.5", "0.9"):
        ctx = PrecisionContext(q=q, sig_bits=bits)
        acc = ctx.mp.one
        for n in range(1, 31):
            acc *= q_number(n, ctx)
            _close(q_factorial(n, ctx), acc, ctx.mp.ldexp(1, -bits + 8), f"q-factorial n={n} q={q}")
        for n, m in ((3, 4), (7, 11), (20, 0)):
            a = ctx.real("0.37")
            lhs = q_pochhammer(a, n + m, ctx)
            rhs = q_pochhammer(a, n, ctx) * q_pochhammer(a * ctx.mp.power(ctx.q, n), m, ctx)
            _close(lhs, rhs, 1e-30, f"Pochhammer split n={n} m={m}")
    ctx = PrecisionContext(q="1/2", sig_bits=bits)
    _close(jackson_integral(lambda t: t, 0, 1, ctx), ctx.real("2/3"), 1e-30, "Jackson integral of t")
    return "q-numbers, factorials, Pochhammer splitting, Jackson integral"


def g_dual_path(bits, n_max):
    tol = 2.0 ** (-bits // 2)
    for fam in _families(bits):
        for n in range(0, 16):
            for x in _sample_x(fam):
                a = family_eval(fam, n, x)
                b = family_eval(fam, n, x, "hypergeometric")
                _close(a, b, tol, f"{fam} n={n} x={x}")
    return "recurrence and hypergeometric evaluation agree for n <= 15"


def g_orthogonality(bits, n_max):
    for fam in _families(bits):
        P = family_polys(fam, n_max)
        for i in range(n_max + 1):
            for j in range(i + 1):
                g = functional_inner(fam, P[i], P[j])
                if i == j:
                    _close(g, family_norm_sq(fam, i), 1e-15, f"{fam} norm {i}")
                else:
                    scale = (family_norm_sq(fam, i) * family_norm_sq(fam, j)) ** 0.5
                    _close(g, 0, 1e-15, f"{fam} Gram ({i},{j})", scale)
    fam = asci(-1, "1/2", bits)
    P = family_polys(fam, 6)
    for i in range(7):
        _close(functional_inner(fam, P[i], P[i], "moments"), functional_inner(fam, P[i], P[i]),
               1e-15, f"moment vs Jackson path {i}")
    return f"Gram matrices diagonal for n <= {n_max}"


def g_kernels(bits, n_max):
    tol = 2.0 ** (-bits // 2)
    for fam in _families(bits):
        for n in range(1, 13):
            for x, y in (("0.3", "-0.4"), ("1.7", "-3"), ("5", "0.25")):
                _close(kernel(fam, n, x, y), kernel(fam, n, x, y, "closed"), tol, f"K_{n} {fam}")
                if n > 1:  # K^(0,1)_1 vanishes identically
                    _close(kernel01(fam, n, x, y), kernel01(fam, n, x, y, "closed"), tol, f"K01_{n} {fam}")
        for n in range(2, n_max + 1):
            P = family_polys(fam, n - 1)
            for j in (0, 1):
                for p in P:
                    lhs, rhs = reproducing_check(fam, n, j, p, "-2")
                    _close(lhs, rhs, 1e-20, f"reproducing j={j} n={n} {fam}", max(abs(rhs), 1))
    return "kernel closed forms and reproducing identities"


def _specs(bits):
    fam = asci(-1, "1/2", bits)
    out = [SobolevSpec(fam, N, -3) for N in ("1e-3", "1", "1e-40")]
    out.append(SobolevSpec(stieltjes_wigert("1/2", bits), "1e-3", -1))
    return out


def g_sobolev_orthogonality(bits, n_max):
    for spec in _specs(bits):
        S = [sobolev_poly(spec, k) for k in range(n_max + 1)]
        norms = [sobolev_norm_sq(spec, k) for k in range(n_max + 1)]
        for i in range(n_max + 1):
            for j in range(i + 1):
                g = sobolev_inner(spec, S[i], S[j])
                if i == j:
                    _close(g, norms[i], 1e-15, f"Sobolev norm {i} {spec.fam} N={spec.N}")
                else:
                    _close(g, 0, 1e-15, f"Sobolev Gram ({i},{j})", (norms[i] * norms[j]) ** 0.5)
    return f"Sobolev Gram matrices diagonal for n <= {n_max}"


def g_sobolev_identities(bits, n_max):
    for spec in _specs(bits):
        fam = spec.fam
        for n in range(2, n_max + 1):
            for x in ("-0.45", "0.6", "3.3"):
                lhs, rhs = normalized_identity_check(spec, n, x)
                _close(lhs, rhs, 1e-15, f"normalized identity n={n}")
                _close(sobolev_eval_hypergeometric(spec, n, x), sobolev_eval(spec, n, x), 1e-15,
                       f"hypergeometric representation n={n} x={x} {fam}")
            a, ap = five_term_a(spec, n), five_term_a_projection(spec, n)
            for k in a:
                _close(a[k], ap[k], 1e-15, f"a_{n},{k}", max(abs(v) for v in ap.values()))
            lam, lp = five_term_lambda(spec, n), five_term_lambda_projection(spec, n)
            for k in lam:
                _close(lam[k], lp[k], 1e-15, f"lambda_{n},{k}", max(abs(v) for v in lp.values()))
            _close(lam[n - 2], sobolev_norm_sq(spec, n) / sobolev_norm_sq(spec, n - 2), 1e-15,
                   f"lambda_{n},{n - 2} norm ratio")
            nxt = five_term_lambda(spec, n + 1) if n + 1 <= n_max else None
            if nxt is not None:
                _close(lam[n + 1] * sobolev_norm_sq(spec, n + 1), nxt[n] * sobolev_norm_sq(spec, n),
                       1e-15, f"lambda symmetry n={n}")
    return "normalized identity, hypergeometric forms, five-term coefficients"


def g_interlacing(bits, n_max):
    cases = [(asci(-1, "1/2", bits), -3, ["1e-42", "1e-3", "1"]),
             (asci(-1, "1/2", bits), 21, ["1e-60", "1e-3"]),
             (stieltjes_wigert("1/2", bits), -1, ["1e-2", "1"])]
    for fam, alpha, masses in cases:
        for n in range(2, n_max + 1):
            zeros_kernel01(fam, n, alpha)
            for N in masses:
                interlacing_report(fam, alpha, n, N)
    return f"zero interlacing for n = 2..{n_max}"


def g_qsode(bits, n_max):
    spec = SobolevSpec(asci(-1, "1/2", bits), "1e-40", -3)
    fit = qsode_fit(spec, 4)
    return f"q-difference equation of degree {fit.degree}, residual {float(fit.residual):.2e}"


def _table_group(table_id):
    def run(bits, n_max):
        table = guarded_table(table_id, bits)
        bad = [c for c in compare_to_reference(table) if not c[4]]
        if bad:
            i, col, v, r, _ = bad[0]
            raise CheckFailed(f"row {i} column {col}: computed {float(v):.7g}, reference {r}")
        return f"{len(compare_to_reference(table))} reference values reproduced"
    return run


GROUPS: dict[str, Callable] = {
    "qcalc": g_qcalc,
    "families-dual-path": g_dual_path,
    "families-orthogonality": g_orthogonality,
    "kernels": g_kernels,
    "sobolev-orthogonality": g_sobolev_orthogonality,
    "sobolev-identities": g_sobolev_identities,
    "interlacing": g_interlacing,
    "qsode": g_qsode,
}
GROUPS.update({f"table-{t}": _table_group(t) for t in TABLE_IDS})
TABLE_GROUP_BITS = 512


def run_groups(names=None, bits=None, n_max: int = 8) -> list:
    out = []
    for name in names or list(GROUPS):
        if name not in GROUPS:
            raise KeyError(name)
        b = bits or (TABLE_GROUP_BITS if name.startswith("table-") else 384)
        try:
            out.append(GroupResult(name, True, GROUPS[name](b, n_max)))
        except (CheckFailed, QSobolevError) as exc:
            out.append(GroupResult(name, False, f"{type(exc).__name__}: {exc}"))
    return out
