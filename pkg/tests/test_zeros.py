import mpmath
import pytest

from qsobolev.errors import MonotonicityViolation, NegativeN0
from qsobolev.families import asci, recurrence_coeffs, stieltjes_wigert, values_and_derivs
from qsobolev.kernels import kernel11
from qsobolev.sobolev import SobolevSpec, sobolev_poly
from qsobolev.zeros import (
    chord_localization,
    extreme_zero,
    interlacing_report,
    n0_critical,
    outside_count,
    speed_of_convergence,
    trichotomy,
    zero_trajectory,
    zeros_classical,
    zeros_kernel01,
    zeros_rn,
    zeros_sobolev,
)

from conftest import rel

H = asci(-1, "1/2")
SW = stieltjes_wigert("1/2")
CASES = [(H, -3), (H, 21), (SW, -1)]


def _jacobi_eigenvalues(fam, n):
    with mpmath.workprec(fam.ctx.sig_bits):
        J = mpmath.zeros(n, n)
        for k in range(n):
            b, _ = recurrence_coeffs(fam, k)
            J[k, k] = mpmath.mpf(b)
            if k + 1 < n:
                g = recurrence_coeffs(fam, k + 1)[1]
                J[k, k + 1] = J[k + 1, k] = mpmath.sqrt(mpmath.mpf(g))
        return sorted(mpmath.eigsy(J, eigvals_only=True))


def test_small_classical_zero_sets():
    assert zeros_classical(H, 1).zeros == (0,)
    z = zeros_classical(H, 2).zeros
    assert rel(z[0], -H.mp.sqrt(H.real("0.5"))) < 1e-100 and rel(z[1], -z[0]) < 1e-100
    assert zeros_classical(SW, 1).zeros == (2,)


@pytest.mark.parametrize("fam", [H, asci(-5, "1/2"), asci("-2.5", "0.3"), SW], ids=str)
def test_classical_zeros_match_jacobi_eigenvalues(fam):
    for n in (3, 8, 15):
        got = zeros_classical(fam, n).zeros
        ref = _jacobi_eigenvalues(fam, n)
        for a, b in zip(got, ref):
            assert abs(a - b) < 1e-60 * max(abs(b), 1)
        for z, (lo, hi) in zip(got, zeros_classical(fam, n).brackets):
            assert lo <= z <= hi
        for z in got:  # the Newton correction left at each zero is negligible
            v, d = values_and_derivs(fam, n, z)
            assert abs(v[n] / d[n]) < 1e-80 * max(1, abs(z))


def test_rn_ordering_low_degree():
    y = zeros_rn(H, -3, 2).zeros
    x = zeros_classical(H, 2).zeros
    assert y[0] < -3 < x[0] < y[1] < x[1]


@pytest.mark.parametrize("fam,alpha", CASES, ids=str)
def test_zero_counts(fam, alpha):
    for n in range(2, 11):
        assert zeros_rn(fam, alpha, n).count == n
        assert zeros_sobolev(SobolevSpec(fam, "1e-3", alpha), n).count == n


@pytest.mark.parametrize("fam,alpha,N", [(H, -3, "0.01"), (H, 21, "1e-5"), (SW, -1, "0.5"),
                                         (asci("-2.5", "0.3"), 4, "2")], ids=str)
def test_sobolev_zeros_match_polyroots(fam, alpha, N):
    spec = SobolevSpec(fam, N, alpha)
    for n in (3, 6, 8):
        got = zeros_sobolev(spec, n).zeros
        with mpmath.workprec(fam.ctx.sig_bits):
            coeffs = [mpmath.mpf(c) for c in reversed(sobolev_poly(spec, n).coeffs)]
            ref = sorted(mpmath.re(r) for r in mpmath.polyroots(coeffs, maxsteps=400, extraprec=400))
        for a, b in zip(got, ref):
            assert abs(a - b) < 1e-40 * max(abs(b), 1)


def test_zero_mass_gives_classical_zeros():
    assert zeros_sobolev(SobolevSpec(H, 0, -3), 7).zeros == zeros_classical(H, 7).zeros


def test_mass_inside_support_uses_scan():
    spec = SobolevSpec(H, "0.3", "0.2")
    zs = zeros_sobolev(spec, 6)
    assert zs.count >= 4
    assert all(abs(sobolev_poly(spec, 6)(z)) < 1e-60 for z in zs)


def test_zero_sets_are_deterministic():
    spec = SobolevSpec(H, "1e-20", -3)
    a = zeros_sobolev(spec, 9)
    b = zeros_sobolev(SobolevSpec(H, "1e-20", -3), 9)
    assert a.zeros == b.zeros and a.brackets == b.brackets


def test_sample_zeros_from_tables():
    fam = asci(-1, "1/2", 512)
    eta = extreme_zero(SobolevSpec(fam, "7e-120", -75), 20)
    assert abs(eta - mpmath.mpf("-63.6640")) < 5e-4
    fam5 = asci(-5, "1/2", 512)
    eta = extreme_zero(SobolevSpec(fam5, "7e-30", 45), 11)
    assert abs(eta - mpmath.mpf("45.0257")) < 5e-4


def test_critical_masses():
    fam = asci(-1, "1/2", 512)
    assert rel(n0_critical(fam, 20, -75), mpmath.mpf("3.12758e-128")) < 5e-5
    assert rel(n0_critical(fam, 14, 21), mpmath.mpf("4.03796e-62")) < 5e-5
    assert rel(n0_critical(stieltjes_wigert("0.9", 512), 14, -1), mpmath.mpf("8.29261e-17")) < 5e-4


def test_critical_mass_sign_errors():
    with pytest.raises(NegativeN0):
        n0_critical(H, 6, -3, endpoint=1)
    with pytest.raises(NegativeN0):
        n0_critical(H, 6, "0.5")


@pytest.mark.parametrize("alpha", [-3, 21])
def test_trichotomy_at_critical_mass(alpha):
    t = trichotomy(asci(-1, "1/2", 512), 14, alpha)
    assert t.ok


def test_one_zero_leaves_support_past_critical_mass():
    N0 = n0_critical(H, 6, -3)
    assert outside_count(SobolevSpec(H, N0 / 3, -3), 6) == 0
    assert outside_count(SobolevSpec(H, N0 * 3, -3), 6) == 1
    assert outside_count(SobolevSpec(H, N0 * 10 ** 20, -3), 6) == 1


@pytest.mark.parametrize("fam,alpha", CASES, ids=str)
def test_trajectory_monotone_and_limits(fam, alpha):
    n = 6
    k11 = kernel11(fam, n, alpha)
    masses = [mpmath.mpf(10) ** e / k11 for e in (-8, -4, 0, 4, 8, 40)]
    tr = zero_trajectory(fam, alpha, n, masses)
    assert tr.monotone
    x = zeros_classical(fam, n).zeros
    lo, hi = tr.zeros[0].zeros, tr.zeros[-1].zeros
    for k in range(n):
        assert abs(lo[k] - x[k]) < 1e-6 * max(1, abs(x[k]))  # small mass: near x_k
        assert abs(hi[k] - tr.y[k]) < 1e-30 * max(1, abs(tr.y[k]))  # large mass: near y_k


def test_trajectory_rejects_bad_masses():
    with pytest.raises(ValueError):
        zero_trajectory(H, -3, 4, ["1", "0.5"])
    with pytest.raises(ValueError):
        zero_trajectory(H, "0.5", 4, ["1", "2"])


def test_trajectory_direction_violation_is_reported(monkeypatch):
    import qsobolev.zeros as zmod

    real = zmod.zeros_sobolev
    calls = []

    def swapped(spec, n):
        calls.append(spec.N)
        # feed the masses in reverse so the zeros move the wrong way
        other = spec.with_mass(1 / spec.N)
        return real(other, n)

    monkeypatch.setattr(zmod, "zeros_sobolev", swapped)
    with pytest.raises(MonotonicityViolation):
        zero_trajectory(H, -3, 4, ["1e-3", "1e3"])
    assert not zero_trajectory(H, -3, 4, ["1e-3", "1e3"], check=False).monotone


@pytest.mark.parametrize("fam,alpha", CASES, ids=str)
def test_speed_of_convergence(fam, alpha):
    recs = speed_of_convergence(fam, alpha, 6)
    assert len(recs) == 5
    k11 = kernel11(fam, 6, alpha)
    for r in recs:
        assert rel(r.scaled, r.target) < 1e-2
        assert rel(r.scaled / r.literal, k11) < 1e-60


def test_limit_of_escaping_zero_is_y_not_alpha():
    y1 = zeros_rn(asci(-1, "1/2", 512), -75, 20).zeros[0]
    assert -75.0001 < y1 < -75.00005


@pytest.mark.parametrize("fam,alpha,masses", [(H, -3, ["1e-42", "1e-3", "1"]), (H, 21, ["1e-60", "1e-3"]),
                                              (SW, -1, ["1e-2", "1"])], ids=str)
def test_interlacing_chains(fam, alpha, masses):
    for n in range(2, 11):
        for N in masses:
            rep = interlacing_report(fam, alpha, n, N)
            assert rep.ok and len(rep.chain) == 3 * n


def test_kernel01_zeros_interlace_classical():
    for n in range(3, 9):
        kz = zeros_kernel01(H, n, -3).zeros
        x = zeros_classical(H, n).zeros
        assert len(kz) == n - 1
        assert all(x[k] < kz[k] < x[k + 1] for k in range(n - 1))


def test_chord_diagnostic_generic():
    rep = chord_localization(SobolevSpec(H, "1e-3", -3), 6)
    assert rep.hypothesis_holds and len(rep.predicted) >= 4 and rep.n_confirmed == len(rep.predicted)
    assert not chord_localization(SobolevSpec(H, "1e-3", -3), 6, require_vanishing_derivative=True).hypothesis_holds


def test_chord_horizontal():
    rep = chord_localization(SobolevSpec(H, "1e-3", 0), 2)
    assert rep.intercept is None and rep.predicted == []


def test_chord_zero_between_alpha_and_q_alpha():
    x = zeros_classical(H, 6).zeros
    rep = chord_localization(SobolevSpec(H, "0.5", x[4] * H.real("1.5")), 6)
    rules = [p[2] for p in rep.predicted]
    assert "intercept before inner zero" in rules
    assert all(rep.confirmed)
