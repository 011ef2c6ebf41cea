"""Acceptance criteria 1-8, each at its stated tolerance.

A summary with one PASS/FAIL line per criterion (and its parts) is printed
at the end of the pytest run.
"""
import gc
import sys
import time
from functools import _lru_cache_wrapper

import mpmath
import pytest

import qsobolev.families
import qsobolev.sobolev
import qsobolev.zeros
from qsobolev.families import (
    asci,
    family_eval,
    family_norm_sq,
    family_polys,
    functional_inner,
    stieltjes_wigert,
)
from qsobolev.kernels import kernel, kernel01, kernel11
from qsobolev.sobolev import (
    SobolevSpec,
    five_term_a,
    five_term_a_projection,
    five_term_lambda,
    five_term_lambda_projection,
    normalized_identity_check,
    phi_poly,
    qsode_fit,
    rn_poly,
    sobolev_eval,
    sobolev_eval_hypergeometric,
    sobolev_inner,
    sobolev_norm_sq,
    sobolev_poly,
    v_functional_inner,
    v_mops,
)
from qsobolev.tables import compare_to_reference, compute_table
from qsobolev.zeros import (
    interlacing_report,
    speed_of_convergence,
    trichotomy,
    zero_trajectory,
    zeros_classical,
)

from conftest import record


def _clear_caches():
    for mod in (qsobolev.families, qsobolev.sobolev, qsobolev.zeros):
        for obj in vars(mod).values():
            if isinstance(obj, _lru_cache_wrapper):
                obj.cache_clear()
    gc.collect()


def _timed_table(table_id):
    _clear_caches()
    t0 = time.perf_counter()
    table = compute_table(table_id, 512)
    return table, time.perf_counter() - t0


def _table_part(crit, table_id):
    table, secs = _timed_table(table_id)
    checks = compare_to_reference(table)
    bad = [c for c in checks if not c[4]]
    detail = f"{len(checks) - len(bad)}/{len(checks)} reference values reproduced"
    if bad:
        i, col, v, r, _ = bad[0]
        detail += f"; first miss row {i} {col}: {float(v):.7g} vs {r}"
    record(crit, f"{table_id} values", not bad, detail)
    return not bad, secs


def test_criterion_1_asci_n20():
    ok, secs = _table_part(1, "asci-n20")
    fast = record(1, "runtime at 512 bits", secs < 30, f"{secs:.1f} s (limit 30 s)")
    assert ok and fast


def test_criterion_2_asci_n11():
    ok, _ = _table_part(2, "asci-n11")
    record(2, "q assumption", ok, "q = 1/2 reproduces the table; no q sweep needed")
    assert ok


def test_criterion_3_asci_n14():
    ok_l, _ = _table_part(3, "asci-n14-left")
    ok_r, _ = _table_part(3, "asci-n14-right")
    fam = asci(-1, "1/2", 512)
    tri_ok = True
    for alpha in (-3, 21):
        t = trichotomy(fam, 14, alpha)
        offs = " / ".join(mpmath.nstr(z - t.endpoint, 3) for z in (t.below, t.at, t.above))
        detail = f"N0={mpmath.nstr(t.N0, 6)}, extreme zero minus endpoint at N0/2, N0, 2N0: {offs}"
        tri_ok &= record(3, f"trichotomy alpha={alpha}", t.ok, detail)
    assert ok_l and ok_r and tri_ok


def test_criterion_4_sw_n14():
    ok, secs = _table_part(4, "sw-n14")
    fast = record(4, "runtime at 512 bits", secs < 120, f"{secs:.1f} s (limit 120 s)")
    assert ok and fast


class _Worst:
    def __init__(self):
        self.err = mpmath.mpf(0)
        self.where = ""

    def add(self, a, b, where, scale=None):
        s = max(abs(a), abs(b)) if scale is None else scale
        e = abs(a - b) / s if s else abs(a - b)
        if e > self.err:
            self.err, self.where = e, where


def _identity_families():
    return [asci(-1, "1/2"), asci("-2.5", "0.3"), stieltjes_wigert("1/2")]


def _identity_specs():
    h = asci(-1, "1/2")
    return [SobolevSpec(h, "1e-40", -3), SobolevSpec(h, "1e-3", -3), SobolevSpec(h, 1, 21),
            SobolevSpec(asci("-2.5", "0.3"), "0.2", 4), SobolevSpec(stieltjes_wigert("1/2"), "1e-3", -1)]


PTS = ("-3.3", "-0.45", "0.15", "0.6", "1.7", "3.3")


def test_criterion_5_identities():
    tol = 1e-15
    parts = {}

    w = parts["dual-path evaluation"] = _Worst()
    for fam in _identity_families():
        for n in range(9):
            for x in PTS:
                w.add(family_eval(fam, n, x), family_eval(fam, n, x, "hypergeometric"), f"{fam} n={n} x={x}")

    w = parts["kernel sum vs closed form"] = _Worst()
    for fam in _identity_families():
        for n in range(1, 9):
            for x, y in (("0.3", "-0.4"), ("1.7", "-3"), ("5", "0.25")):
                w.add(kernel(fam, n, x, y), kernel(fam, n, x, y, "closed"), f"K {fam} n={n}")
                if n > 1:
                    w.add(kernel01(fam, n, x, y), kernel01(fam, n, x, y, "closed"), f"K01 {fam} n={n}")

    hyp = parts["connection formula vs hypergeometric representation"] = _Worst()
    nid = parts["normalized identity"] = _Worst()
    ft = parts["five-term residuals"] = _Worst()
    rem = parts["norm-ratio and symmetry identities of lambda"] = _Worst()
    nrm = parts["Sobolev norm closed form vs inner product"] = _Worst()
    for spec in _identity_specs():
        fam = spec.fam
        phi = phi_poly(fam, spec.alpha)
        P = family_polys(fam, 10)
        S = [sobolev_poly(spec, k) for k in range(11)]
        norms = [sobolev_norm_sq(spec, k) for k in range(11)]
        for n in range(9):
            nrm.add(sobolev_inner(spec, S[n], S[n]), norms[n], f"{fam} n={n}")
        for n in range(2, 9):
            a, lam = five_term_a(spec, n), five_term_lambda(spec, n)
            ap, lp = five_term_a_projection(spec, n), five_term_lambda_projection(spec, n)
            for k in a:
                ft.add(a[k], ap[k], f"a_{n},{k} {fam}", max(abs(v) for v in ap.values()))
                ft.add(lam[k], lp[k], f"lambda_{n},{k} {fam}", max(abs(v) for v in lp.values()))
            for x in PTS:
                if fam.real(x) in (spec.alpha, spec.q * spec.alpha):
                    continue
                lhs = phi(fam.real(x)) * sobolev_eval(spec, n, x)
                sum_a = fam.mp.fsum(a[k] * P[k](fam.real(x)) for k in a)
                sum_l = fam.mp.fsum(lam[k] * S[k](fam.real(x)) for k in lam)
                scale_a = fam.mp.fsum(abs(a[k] * P[k](fam.real(x))) for k in a)
                scale_l = fam.mp.fsum(abs(lam[k] * S[k](fam.real(x))) for k in lam)
                ft.add(lhs, sum_a, f"a-expansion n={n} x={x} {fam}", scale_a)
                ft.add(lhs, sum_l, f"lambda-expansion n={n} x={x} {fam}", scale_l)
                hyp.add(sobolev_eval_hypergeometric(spec, n, x), sobolev_eval(spec, n, x), f"n={n} x={x} {fam}")
                l_, r_ = normalized_identity_check(spec, n, x)
                nid.add(l_, r_, f"n={n} x={x} {fam}")
            rem.add(lam[n - 2], norms[n] / norms[n - 2], f"lambda_{n},{n - 2} {fam}")
            rem.add(lam[n + 1] * norms[n + 1], five_term_lambda(spec, n + 1)[n] * norms[n], f"symmetry n={n} {fam}")

    ok = True
    for name, w in parts.items():
        ok &= record(5, name, w.err <= tol, f"max relative error {mpmath.nstr(w.err, 3)}"
                     + (f" at {w.where}" if w.err > tol else ""))
    assert ok


def test_criterion_6_orthogonality():
    tol = 1e-15
    ok = True
    for fam in (asci(-1, "1/2"), stieltjes_wigert("1/2")):
        P = family_polys(fam, 8)
        w = _Worst()
        for i in range(9):
            w.add(functional_inner(fam, P[i], P[i]), family_norm_sq(fam, i), f"norm {i}")
            for j in range(i):
                w.add(functional_inner(fam, P[i], P[j]), 0, f"({i},{j})",
                      fam.mp.sqrt(family_norm_sq(fam, i) * family_norm_sq(fam, j)))
        ok &= record(6, f"Gram of p_n under u, {fam}", w.err <= tol, f"max relative {mpmath.nstr(w.err, 3)}")
        alpha = -3 if fam.a is not None else -1
        for N in ("1e-3", "1"):
            spec = SobolevSpec(fam, N, alpha)
            S = [sobolev_poly(spec, k) for k in range(9)]
            nr = [sobolev_norm_sq(spec, k) for k in range(9)]
            w = _Worst()
            for i in range(9):
                for j in range(i):
                    w.add(sobolev_inner(spec, S[i], S[j]), 0, f"({i},{j})", fam.mp.sqrt(nr[i] * nr[j]))
            ok &= record(6, f"Gram of s_n under the Sobolev product, {fam} N={N}", w.err <= tol,
                         f"max relative off-diagonal {mpmath.nstr(w.err, 3)}")
        w = _Worst()
        av = fam.real(alpha)
        V = v_mops(fam, av, 8)
        for n in range(3, 9):
            r = rn_poly(fam, av, n)
            rs = fam.mp.sqrt(abs(v_functional_inner(fam, av, r, r)))
            for j in range(n - 2):
                size = fam.mp.sqrt(abs(v_functional_inner(fam, av, V[j], V[j])))
                w.add(v_functional_inner(fam, av, r, V[j]), 0, f"n={n} j={j}", rs * size)
        ok &= record(6, f"quasi-orthogonality of r_n, {fam}", w.err <= tol,
                     f"max relative <v, P_j r_n>, j <= n-3: {mpmath.nstr(w.err, 3)}")
    assert ok


GRIDS = [("ASCI a=-1 q=1/2", asci(-1, "1/2"), -3, ["1e-42", "1e-3", "1"]),
         ("ASCI a=-1 q=1/2", asci(-1, "1/2"), 21, ["1e-60", "1e-3"]),
         ("SW q=1/2", stieltjes_wigert("1/2"), -1, ["1e-2", "1"])]


def test_criterion_7_orderings():
    ok = True
    for label, fam, alpha, masses in GRIDS:
        bad = []
        for n in range(2, 11):
            for N in masses:
                if not interlacing_report(fam, alpha, n, N, check=False).ok:
                    bad.append((n, N))
        ok &= record(7, f"orderings {label} alpha={alpha}", not bad,
                     f"n=2..10, N in {masses}" + (f"; violated at {bad[:3]}" if bad else ""))
    assert ok


def _trajectory(fam, alpha, n=6):
    k11 = kernel11(fam, n, alpha)
    masses = [mpmath.mpf(10) ** e / k11 for e in (-10, -5, 0, 5, 10, 40)]
    return zero_trajectory(fam, alpha, n, masses, check=False)


def test_criterion_7_trajectories_and_limits():
    ok = True
    for label, fam, alpha, _ in GRIDS:
        tr = _trajectory(fam, alpha)
        x = zeros_classical(fam, 6).zeros
        small = max(abs(a - b) / max(1, abs(b)) for a, b in zip(tr.zeros[0].zeros, x))
        large = max(abs(a - b) / max(1, abs(b)) for a, b in zip(tr.zeros[-1].zeros, tr.y))
        ok &= record(7, f"monotone trajectory {label} alpha={alpha}", tr.monotone, "n=6, N K11 = 1e-10..1e40")
        ok &= record(7, f"limits eta_k -> x_k (N -> 0) and eta_k -> y_k (N -> oo) {label} alpha={alpha}",
                     small < 1e-8 and large < 1e-30,
                     f"relative gaps {mpmath.nstr(small, 3)} and {mpmath.nstr(large, 3)} (k = 1..n)")
    assert ok


def test_criterion_7_escaping_zero_tends_to_alpha_literal():
    # literal reading: the zero leaving the support converges to alpha itself
    ok = True
    for label, fam, alpha, _ in GRIDS:
        tr = _trajectory(fam, alpha)
        eta = tr.zeros[-1].zeros[0] if alpha < 0 else tr.zeros[-1].zeros[-1]
        y = tr.y[0] if alpha < 0 else tr.y[-1]
        gap = abs(eta - alpha)
        ok &= record(7, f"literal limit of the escaping zero equals alpha, {label} alpha={alpha}",
                     gap < 1e-30 * abs(alpha),
                     f"at N K11 = 1e40 the zero is {mpmath.nstr(eta, 10)} = y (gap to y "
                     f"{mpmath.nstr(abs(eta - y), 2)}), |eta - alpha| = {mpmath.nstr(gap, 5)}")
    assert ok


def _speed(scaled):
    ok = True
    for label, fam, alpha, _ in GRIDS:
        recs = speed_of_convergence(fam, alpha, 6)
        worst = max(abs((r.scaled if scaled else r.literal) - r.target) / abs(r.target) for r in recs)
        name = "N K11 (eta - y)" if scaled else "N (eta - y) (literal)"
        ok &= record(7, f"speed {name} vs -p_n(y)/r_n'(y), {label} alpha={alpha}", worst < 1e-2,
                     f"n=6, N = 1e6/K11, K11 = {mpmath.nstr(kernel11(fam, 6, alpha), 4)}, "
                     f"max relative error {mpmath.nstr(worst, 3)} (limit 1e-2)")
    return ok


def test_criterion_7_speed_literal():
    assert _speed(False)


def test_criterion_7_speed_kernel_scaled():
    assert _speed(True)


@pytest.mark.parametrize("n", [4, 6, 8])
def test_criterion_8_qsode(n):
    spec = SobolevSpec(asci(-1, "1/2"), "1e-40", -3)
    fit = qsode_fit(spec, n)
    ok = record(8, f"n={n}", fit.residual < 1e-20,
                f"degree {fit.degree}, held-out residual {mpmath.nstr(fit.residual, 3)} (limit 1e-20)")
    assert ok


if __name__ == "__main__":
    sys.exit(pytest.main([__file__, "-q"]))
