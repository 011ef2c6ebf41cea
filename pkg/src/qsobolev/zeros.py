"""Real zeros of p_n, r_n and s_n with sign-change brackets.

Every zero is isolated in a bracket whose endpoints have opposite signs,
shrunk by bisection to relative width 2^(-bits/4) and then polished by
Newton steps that never leave the bracket.  Brackets come from the
interlacing theory whenever it applies; otherwise a dense sign scan is
used and the number of zeros found is reported.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache

from .errors import (
    BracketFailure,
    InterlacingViolation,
    MonotonicityViolation,
    NegativeN0,
    PartialZeroSet,
)
from .families import FamilySpec, recurrence_coeffs, values, values_and_derivs
from .kernels import kernel01, kernel11
from .sobolev import (
    SobolevSpec,
    alpha_data,
    rn_eval_with_derivative,
    sobolev_eval_normalized,
)


@dataclass(frozen=True)
class ZeroSet:
    degree: int
    zeros: tuple
    brackets: tuple
    refine_tol: object

    @property
    def count(self) -> int:
        return len(self.zeros)

    def __iter__(self):
        return iter(self.zeros)

    def __getitem__(self, k):
        return self.zeros[k]


def default_tol(ctx):
    return ctx.mp.ldexp(1, -ctx.sig_bits + 64)


def _sign(v) -> int:
    return (v > 0) - (v < 0)


def _refine(f, fd, lo, hi, flo, fhi, ctx, tol):
    """Zero of f inside [lo, hi] where f(lo), f(hi) differ in sign."""
    mp = ctx.mp
    if flo == 0:
        return lo, (lo, lo)
    if fhi == 0:
        return hi, (hi, hi)
    if _sign(flo) == _sign(fhi):
        raise BracketFailure("no sign change on bracket", (lo, hi))
    width = mp.ldexp(1, -(ctx.sig_bits // 4))
    s_lo = _sign(flo)
    while hi - lo > width * max(abs(lo), abs(hi), 1):
        mid = (lo + hi) / 2
        fm = f(mid)
        if fm == 0:
            return mid, (lo, hi)
        if _sign(fm) == s_lo:
            lo = mid
        else:
            hi = mid
    bracket = (lo, hi)
    x = (lo + hi) / 2
    last = None
    for _ in range(80):
        v, d = fd(x)
        if v == 0:
            break
        if _sign(v) == s_lo:
            lo = x
        else:
            hi = x
        if not d:
            x = (lo + hi) / 2
            continue
        step = v / d
        xn = x - step
        inside = lo < xn < hi
        if abs(step) <= tol * max(abs(x), 1):
            # converged; at the noise floor the sign of v may be unreliable
            if inside:
                x = xn
            break
        if not inside:
            x = (lo + hi) / 2
            last = None
            continue
        x = xn
        # stagnation at the noise floor of the evaluation
        if last is not None and abs(step) >= last:
            break
        last = abs(step)
    return x, bracket


def _outer_bracket(f, start, direction, width, ctx, limit=400):
    """Expand from ``start`` in ``direction`` until f changes sign."""
    f0 = f(start)
    w = width
    for _ in range(limit):
        end = start + direction * w
        fe = f(end)
        if _sign(fe) != _sign(f0) or fe == 0:
            return (end, start) if direction < 0 else (start, end)
        w *= 2
    raise BracketFailure("outer bracket did not find a sign change", (start, start + direction * w))


def _solve_brackets(f, fd, brackets, ctx, tol):
    zeros, out = [], []
    for lo, hi in brackets:
        flo, fhi = f(lo), f(hi)
        if _sign(flo) == _sign(fhi) and flo != 0:
            raise BracketFailure(f"no sign change on ({ctx.fmt(lo, 10)}, {ctx.fmt(hi, 10)})", (lo, hi))
        z, br = _refine(f, fd, lo, hi, flo, fhi, ctx, tol)
        zeros.append(z)
        out.append(br)
    return zeros, out


# -- classical -------------------------------------------------------------------


def _classical_fns(fam, n):
    return (lambda x: values(fam, n, x)[n],
            lambda x: tuple(v[n] for v in values_and_derivs(fam, n, x)))


@lru_cache(maxsize=256)
def _classical(fam: FamilySpec, n: int) -> ZeroSet:
    ctx = fam.ctx
    tol = default_tol(ctx)
    if n == 1:
        b0 = recurrence_coeffs(fam, 0)[0]
        return ZeroSet(1, (b0,), ((b0 - 1, b0 + 1),), tol)
    prev = _classical(fam, n - 1).zeros
    f, fd = _classical_fns(fam, n)
    spread = max(prev[-1] - prev[0], abs(prev[0]), abs(prev[-1]), 1) if len(prev) > 1 else 1
    brackets = [_outer_bracket(f, prev[0], -1, spread / 64, ctx)]
    brackets += [(prev[i], prev[i + 1]) for i in range(len(prev) - 1)]
    brackets.append(_outer_bracket(f, prev[-1], 1, spread / 64, ctx))
    zeros, brs = _solve_brackets(f, fd, brackets, ctx, tol)
    return ZeroSet(n, tuple(zeros), tuple(brs), tol)


def zeros_classical(fam: FamilySpec, n: int) -> ZeroSet:
    """All n zeros of p_n, with brackets from the zeros of p_{n-1}."""
    if n < 1:
        raise ValueError("n must be >= 1")
    for g in (recurrence_coeffs(fam, k)[1] for k in range(1, n)):
        if not g > 0:
            raise ValueError("zero bracketing needs gamma_k > 0")
    return _classical(fam, n)


# -- limit polynomial r_n --------------------------------------------------------


def _side(fam, alpha):
    """-1 if alpha lies below the support, +1 above, 0 inside."""
    lo, hi = fam.support
    if alpha < lo:
        return -1
    if alpha > hi:
        return 1
    return 0


@lru_cache(maxsize=256)
def _rn_zeros(fam, alpha, n):
    ctx = fam.ctx
    tol = default_tol(ctx)
    x = zeros_classical(fam, n).zeros
    f = lambda t: rn_eval_with_derivative(fam, alpha, n, t)[0]  # noqa: E731
    fd = lambda t: rn_eval_with_derivative(fam, alpha, n, t)  # noqa: E731
    side = _side(fam, alpha)
    width = max(abs(alpha), 1) / 64
    if side < 0:
        brackets = [_outer_bracket(f, alpha, -1, width, ctx)]
        brackets += [(x[i], x[i + 1]) for i in range(n - 1)]
    else:
        brackets = [(x[i], x[i + 1]) for i in range(n - 1)]
        brackets.append(_outer_bracket(f, alpha, 1, width, ctx))
    try:
        zeros, brs = _solve_brackets(f, fd, brackets, ctx, tol)
    except BracketFailure as exc:
        raise InterlacingViolation(f"r_n zeros do not follow the expected ordering: {exc}") from exc
    return ZeroSet(n, tuple(zeros), tuple(brs), tol)


def zeros_rn(fam: FamilySpec, alpha, n: int) -> ZeroSet:
    """All n zeros of r_n; alpha must lie strictly outside the support.

    Below the support the ordering is y_1 < alpha < x_1 < y_2 < ... < y_n < x_n,
    above it x_1 < y_1 < ... < x_n < alpha < y_n.
    """
    if n < 2:
        raise ValueError("n must be >= 2")
    alpha = fam.real(alpha)
    side = _side(fam, alpha)
    if side == 0:
        raise ValueError("alpha must lie outside the support")
    zs = _rn_zeros(fam, alpha, n)
    x = zeros_classical(fam, n).zeros
    y = zs.zeros
    chain = [y[0], alpha] if side < 0 else []
    for k in range(n):
        if side < 0:
            chain += [x[k]] + ([y[k + 1]] if k + 1 < n else [])
        else:
            chain += [x[k], y[k]] if k < n - 1 else [x[k], alpha, y[k]]
    _assert_increasing(chain, "r_n / p_n interlacing")
    return zs


def _assert_increasing(chain, what):
    for i in range(len(chain) - 1):
        if not chain[i] < chain[i + 1]:
            raise InterlacingViolation(f"{what} broken at position {i}")


# -- Sobolev polynomial ------------------------------------------------------------


def _sobolev_fns(spec, n):
    return (lambda x: sobolev_eval_normalized(spec, n, x),
            lambda x: sobolev_eval_normalized(spec, n, x, with_derivative=True))


def _scan_points(spec, n):
    fam, mp, q = spec.fam, spec.mp, spec.q
    x = list(zeros_classical(fam, n).zeros)
    anchors = sorted(set(x + [spec.alpha, q * spec.alpha]))
    lo, hi = anchors[0], anchors[-1]
    span = max(hi - lo, 1)
    pts = []
    for i in range(len(anchors) - 1):
        a, b = anchors[i], anchors[i + 1]
        pts += [a + (b - a) * j / 32 for j in range(32)]
    pts.append(hi)
    for j in range(1, 40):
        pts.append(hi + span * mp.ldexp(1, j - 6))
        pts.insert(0, lo - span * mp.ldexp(1, j - 6))
    return pts


def _dense_scan(f, fd, pts, ctx, tol):
    zeros, brs = [], []
    prev_x, prev_v = pts[0], f(pts[0])
    for t in pts[1:]:
        v = f(t)
        if _sign(v) != _sign(prev_v) and prev_v != 0:
            z, br = _refine(f, fd, prev_x, t, prev_v, v, ctx, tol)
            zeros.append(z)
            brs.append(br)
        prev_x, prev_v = t, v
    return zeros, brs


def zeros_sobolev(spec: SobolevSpec, n: int) -> ZeroSet:
    """Zeros of s_n(N; x).

    With N > 0 and alpha outside the support every eta_k is bracketed by
    y_k and x_k.  Otherwise a dense sign scan is used and at least n - 2
    zeros must be found.
    """
    if n < 2:
        raise ValueError("n must be >= 2")
    fam = spec.fam
    if spec.N == 0:
        return zeros_classical(fam, n)
    ctx = fam.ctx
    tol = default_tol(ctx)
    f, fd = _sobolev_fns(spec, n)
    side = _side(fam, spec.alpha)
    if side != 0 and alpha_data(fam, spec.alpha, n).k11[n] > 0:
        x = zeros_classical(fam, n).zeros
        y = zeros_rn(fam, spec.alpha, n).zeros
        brackets = [(min(a, b), max(a, b)) for a, b in zip(x, y)]
        zeros, brs = _solve_brackets(f, fd, brackets, ctx, tol)
        return ZeroSet(n, tuple(zeros), tuple(brs), tol)
    zeros, brs = _dense_scan(f, fd, _scan_points(spec, n), ctx, tol)
    if n >= 3 and len(zeros) < n - 2:
        raise PartialZeroSet(f"found {len(zeros)} real zeros of s_{n}, fewer than n - 2")
    return ZeroSet(n, tuple(zeros), tuple(brs), tol)


# -- critical mass --------------------------------------------------------------------


def default_endpoint(fam: FamilySpec, alpha):
    side = _side(fam, alpha)
    lo, hi = fam.support
    if side < 0:
        return lo
    if side > 0:
        return hi
    raise NegativeN0("alpha inside the support has no critical mass")


def n0_critical(fam: FamilySpec, n: int, alpha, endpoint=None):
    """Mass at which s_n vanishes at the support endpoint nearest alpha.

    N_0 = ( (D_q p_n)(alpha) / p_n(tau) * K^(0,1)_n(tau, alpha) - K^(1,1)_n(alpha, alpha) )^(-1)
    """
    alpha = fam.real(alpha)
    tau = default_endpoint(fam, alpha) if endpoint is None else fam.real(endpoint)
    d = alpha_data(fam, alpha, n)
    inv = d.dp[n] / values(fam, n, tau)[n] * kernel01(fam, n, tau, alpha) - kernel11(fam, n, alpha)
    if not inv > 0:
        raise NegativeN0(f"critical mass is not positive (1/N0 = {fam.ctx.fmt(inv, 10)})")
    return 1 / inv


def extreme_zero(spec: SobolevSpec, n: int):
    """The zero that escapes toward alpha: eta_1 below the support, eta_n above."""
    zs = zeros_sobolev(spec, n)
    return zs.zeros[0] if _side(spec.fam, spec.alpha) <= 0 else zs.zeros[-1]


@dataclass(frozen=True)
class Trichotomy:
    N0: object
    endpoint: object
    below: object
    at: object
    above: object
    ok: bool


def trichotomy(fam: FamilySpec, n: int, alpha, tol=None) -> Trichotomy:
    """Extreme zero at N0/2, N0, 2 N0 against the endpoint."""
    alpha = fam.real(alpha)
    tau = default_endpoint(fam, alpha)
    N0 = n0_critical(fam, n, alpha, tau)
    ez = [extreme_zero(SobolevSpec(fam, m, alpha), n) for m in (N0 / 2, N0, 2 * N0)]
    tol = fam.mp.ldexp(1, -fam.ctx.sig_bits // 2) if tol is None else tol
    side = _side(fam, alpha)
    inside = (lambda z: z > tau) if side < 0 else (lambda z: z < tau)
    ok = inside(ez[0]) and abs(ez[1] - tau) <= tol * max(abs(tau), 1) and not inside(ez[2])
    return Trichotomy(N0, tau, ez[0], ez[1], ez[2], bool(ok))


def outside_count(spec: SobolevSpec, n: int) -> int:
    return sum(1 for z in zeros_sobolev(spec, n).zeros if spec.fam.outside_support(z))


# -- trajectories and limits ----------------------------------------------------------


@dataclass
class Trajectory:
    masses: list
    zeros: list  # zeros[i] is the ZeroSet at masses[i]
    y: tuple
    direction: int  # -1 decreasing in N, +1 increasing
    monotone: bool = True


def zero_trajectory(fam: FamilySpec, alpha, n: int, masses, check: bool = True) -> Trajectory:
    """Zeros of s_n along increasing masses; eta_k must move away from x_k
    toward y_k (decreasing when alpha is below the support)."""
    alpha = fam.real(alpha)
    masses = [fam.real(m) for m in masses]
    if any(not masses[i] < masses[i + 1] for i in range(len(masses) - 1)) or masses[0] <= 0:
        raise ValueError("masses must be positive and strictly increasing")
    side = _side(fam, alpha)
    if side == 0:
        raise ValueError("alpha must lie outside the support")
    sets = [zeros_sobolev(SobolevSpec(fam, m, alpha), n) for m in masses]
    direction = -1 if side < 0 else 1
    monotone = True
    for i in range(len(sets) - 1):
        for a, b in zip(sets[i].zeros, sets[i + 1].zeros):
            if not (b < a if direction < 0 else b > a):
                monotone = False
    if check and not monotone:
        raise MonotonicityViolation("a zero of s_n moved against the predicted direction")
    return Trajectory(masses, sets, zeros_rn(fam, alpha, n).zeros, direction, monotone)


@dataclass(frozen=True)
class SpeedRecord:
    k: int
    y: object
    eta: object
    literal: object  # N (eta - y)
    scaled: object  # N K^(1,1) (eta - y)
    target: object  # -p_n(y) / r_n'(y)


def speed_of_convergence(fam: FamilySpec, alpha, n: int, scaled_mass=10**6) -> list:
    """Zeros at N = scaled_mass / K^(1,1)_n(alpha, alpha) against their limits.

    Returns one record per zero with a finite limit (all but the one that
    escapes toward alpha).
    """
    alpha = fam.real(alpha)
    k11 = kernel11(fam, n, alpha)
    N = fam.real(scaled_mass) / k11
    eta = zeros_sobolev(SobolevSpec(fam, N, alpha), n).zeros
    y = zeros_rn(fam, alpha, n).zeros
    ks = range(1, n) if _side(fam, alpha) < 0 else range(0, n - 1)
    out = []
    for k in ks:
        r, dr = rn_eval_with_derivative(fam, alpha, n, y[k])
        pn = values(fam, n, y[k])[n]
        diff = eta[k] - y[k]
        out.append(SpeedRecord(k + 1, y[k], eta[k], N * diff, N * k11 * diff, -pn / dr))
    return out


# -- interlacing -----------------------------------------------------------------------


def zeros_kernel01(fam: FamilySpec, n: int, alpha) -> ZeroSet:
    """The n - 1 zeros of x -> K^(0,1)_n(x, alpha), bracketed by the zeros of p_n."""
    if n < 2:
        raise ValueError("n must be >= 2")
    alpha = fam.real(alpha)
    ctx, mp = fam.ctx, fam.mp
    tol = default_tol(ctx)
    d = alpha_data(fam, alpha, n)
    w = [d.dp[k] / d.h[k] for k in range(n)]

    def fd(x):
        pv, pd = values_and_derivs(fam, n, x)
        return (mp.fsum(pv[k] * w[k] for k in range(n)), mp.fsum(pd[k] * w[k] for k in range(n)))

    f = lambda x: fd(x)[0]  # noqa: E731
    x = zeros_classical(fam, n).zeros
    try:
        zeros, brs = _solve_brackets(f, fd, [(x[i], x[i + 1]) for i in range(n - 1)], ctx, tol)
    except BracketFailure as exc:
        raise InterlacingViolation(f"K^(0,1) zeros do not interlace with p_n zeros: {exc}") from exc
    return ZeroSet(n - 1, tuple(zeros), tuple(brs), tol)


@dataclass
class InterlacingReport:
    x: tuple
    y: tuple
    eta: tuple
    kernel_zeros: tuple
    chain: list = field(default_factory=list)
    ok: bool = True


def interlacing_report(fam: FamilySpec, alpha, n: int, N, check: bool = True) -> InterlacingReport:
    """Merge the zeros of p_n, r_n, s_n and K^(0,1)_n(., alpha) and check
    y_k < eta_k < x_k (alpha below the support; mirrored above) together
    with x_k < z_k < x_{k+1} for the kernel zeros z_k."""
    alpha = fam.real(alpha)
    side = _side(fam, alpha)
    if side == 0:
        raise ValueError("alpha must lie outside the support")
    spec = SobolevSpec(fam, N, alpha)
    if not spec.N > 0:
        raise ValueError("N must be positive")
    x = zeros_classical(fam, n).zeros
    y = zeros_rn(fam, alpha, n).zeros
    eta = zeros_sobolev(spec, n).zeros
    kz = zeros_kernel01(fam, n, alpha).zeros
    chain = []
    for k in range(n):
        triple = [y[k], eta[k], x[k]] if side < 0 else [x[k], eta[k], y[k]]
        chain += [(name, v) for name, v in zip(("y", "eta", "x") if side < 0 else ("x", "eta", "y"), triple)]
    ok = all(chain[i][1] < chain[i + 1][1] for i in range(len(chain) - 1))
    kchain = [x[0]]
    for k in range(n - 1):
        kchain += [kz[k], x[k + 1]]
    ok = ok and all(kchain[i] < kchain[i + 1] for i in range(len(kchain) - 1))
    report = InterlacingReport(x, y, eta, kz, chain, ok)
    if check and not ok:
        raise InterlacingViolation("zero ordering of p_n, r_n, s_n or K^(0,1) violated")
    return report


# -- chord localization (diagnostic) -------------------------------------------------


@dataclass
class ChordReport:
    intercept: object  # None when the chord is horizontal
    predicted: list  # (lo, hi, rule) intervals predicted to hold a zero of s_n
    confirmed: list  # bools, one per prediction
    hypothesis_holds: bool
    note: str = ""

    @property
    def n_confirmed(self) -> int:
        return sum(self.confirmed)


def chord_localization(spec: SobolevSpec, n: int, require_vanishing_derivative: bool = False) -> ChordReport:
    """Zeros of s_n predicted from the chord through (alpha, p_n(alpha)) and
    (q alpha, p_n(q alpha)).

    The localisation statement is stated under a condition on (D_q p_n)(alpha)
    whose intended sign is ambiguous; ``require_vanishing_derivative`` selects
    the literal reading.  Predictions are checked against sign changes of s_n
    and never raise.
    """
    fam, q, alpha = spec.fam, spec.q, spec.alpha
    d = alpha_data(fam, alpha, n)
    holds = (d.dp[n] == 0) if require_vanishing_derivative else (d.dp[n] != 0)
    pa, pqa = values(fam, n, alpha)[n], values(fam, n, q * alpha)[n]
    x = zeros_classical(fam, n).zeros
    lo_ab, hi_ab = min(alpha, q * alpha), max(alpha, q * alpha)
    if pa == pqa:
        return ChordReport(None, [], [], holds, "NoIntercept: horizontal chord")
    k = alpha - pa * (q * alpha - alpha) / (pqa - pa)
    predicted = []
    inside = [i for i in range(n) if lo_ab < x[i] < hi_ab]
    for i in range(n - 1):
        a, b = x[i], x[i + 1]
        if a <= k <= b:
            continue
        if lo_ab <= a <= hi_ab or lo_ab <= b <= hi_ab:
            continue
        predicted.append((a, b, "chord outside interval"))
    if len(inside) == 1:
        i = inside[0]
        if k < x[i] and i > 0:
            predicted.append((x[i - 1], x[i], "intercept before inner zero"))
        elif k > x[i] and i < n - 1:
            predicted.append((x[i], x[i + 1], "intercept after inner zero"))
    f = lambda t: sobolev_eval_normalized(spec, n, t)  # noqa: E731
    confirmed = []
    for a, b, _ in predicted:
        pts = [a + (b - a) * j / 64 for j in range(65)]
        vals = [f(t) for t in pts]
        confirmed.append(any(_sign(vals[j]) != _sign(vals[j + 1]) for j in range(64)))
    return ChordReport(k, predicted, confirmed, holds)
