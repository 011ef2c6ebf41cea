"""Al-Salam-Carlitz I and Stieltjes-Wigert polynomials.

Both families are monic and satisfy x p_n = p_{n+1} + beta_n p_n +
gamma_n p_{n-1} with gamma_0 = 0.  Each family offers a recurrence and a
basic-hypergeometric evaluation path, norms, weights, forward shifts and
the moment functional u.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass
from functools import lru_cache

from .qcalc import (
    INFINITY,
    Poly,
    PrecisionContext,
    QPower,
    basic_hypergeometric,
    jackson_integral,
    moments_from_recurrence,
    polys_from_recurrence,
    q_number,
    q_pochhammer,
    recurrence_values,
)


class Kind(str, enum.Enum):
    ASCI = "asci"
    SW = "sw"


class Method(str, enum.Enum):
    RECURRENCE = "recurrence"
    HYPERGEOMETRIC = "hypergeometric"


@dataclass(frozen=True)
class FamilySpec:
    kind: Kind
    ctx: PrecisionContext
    a: object = None

    def __post_init__(self):
        object.__setattr__(self, "kind", Kind(self.kind))
        if self.kind is Kind.ASCI:
            if self.a is None:
                raise ValueError("ASCI needs the parameter a")
            a = self.ctx.real(self.a)
            if not a < 0:
                raise ValueError(f"ASCI orthogonality requires a < 0, got {a}")
            object.__setattr__(self, "a", a)
        elif self.a is not None:
            raise ValueError("Stieltjes-Wigert takes no parameter a")

    @property
    def q(self):
        return self.ctx.q

    @property
    def mp(self):
        return self.ctx.mp

    @property
    def support(self):
        """(lower, upper) end of the orthogonality interval."""
        mp = self.mp
        if self.kind is Kind.ASCI:
            return self.a, mp.one
        return mp.zero, mp.inf

    def outside_support(self, x) -> bool:
        lo, hi = self.support
        return x < lo or x > hi

    def real(self, value):
        return self.ctx.real(value)

    def __str__(self):
        if self.kind is Kind.ASCI:
            return f"ASCI(a={self.mp.nstr(self.a, 8)}, q={self.mp.nstr(self.q, 8)})"
        return f"SW(q={self.mp.nstr(self.q, 8)})"


def asci(a, q, sig_bits: int = 384) -> FamilySpec:
    return FamilySpec(Kind.ASCI, PrecisionContext(q=q, sig_bits=sig_bits), a)


def stieltjes_wigert(q, sig_bits: int = 384) -> FamilySpec:
    return FamilySpec(Kind.SW, PrecisionContext(q=q, sig_bits=sig_bits))


def recurrence_coeffs(fam: FamilySpec, n: int):
    """(beta_n, gamma_n); gamma_0 = 0."""
    if n < 0:
        raise ValueError("n must be nonnegative")
    mp, q = fam.mp, fam.q
    if fam.kind is Kind.ASCI:
        beta = (fam.a + 1) * mp.power(q, n)
        gamma = -fam.a * mp.power(q, n - 1) * (1 - mp.power(q, n)) if n else mp.zero
    else:
        beta = mp.power(q, -2 * n - 1) * (1 + q - mp.power(q, n + 1))
        gamma = mp.power(q, -4 * n + 1) * (1 - mp.power(q, n)) if n else mp.zero
    return beta, gamma


@lru_cache(maxsize=256)
def _coeff_table(fam: FamilySpec, n: int):
    pairs = [recurrence_coeffs(fam, k) for k in range(n + 1)]
    return tuple(b for b, _ in pairs), tuple(g for _, g in pairs)


def coeff_table(fam: FamilySpec, n: int):
    """(betas, gammas) for indices 0..n, memoised in steps of 32."""
    size = max(32, -(-(n + 1) // 32) * 32)
    betas, gammas = _coeff_table(fam, size)
    return betas, gammas


def values(fam: FamilySpec, n: int, x) -> list:
    """[p_0(x), ..., p_n(x)] by forward recursion."""
    betas, gammas = coeff_table(fam, n)
    return recurrence_values(betas, gammas, n, fam.real(x))


def values_and_derivs(fam: FamilySpec, n: int, x):
    """Values and ordinary derivatives of p_0..p_n at x."""
    betas, gammas = coeff_table(fam, n)
    return recurrence_values(betas, gammas, n, fam.real(x), with_derivative=True)


def _asci_hyper(fam, n, x):
    mp, q, a = fam.mp, fam.q, fam.a
    # (x^-1; q)_k x^k is expanded as prod (x - q^j), so x = 0 is harmless.
    z = q / a
    term = mp.one
    total = mp.one
    qk = mp.one
    for k in range(n):
        term *= (1 - mp.power(q, k - n)) / (1 - qk * q) * (x - qk) * z
        total += term
        qk *= q
    return (-a) ** n * mp.power(q, n * (n - 1) // 2) * total


def family_eval(fam: FamilySpec, n: int, x, method=Method.RECURRENCE):
    """Monic p_n(x) by the chosen evaluation path."""
    if n < 0:
        raise ValueError("n must be nonnegative")
    x = fam.real(x)
    method = Method(method)
    if method is Method.RECURRENCE:
        return values(fam, n, x)[n]
    mp, q = fam.mp, fam.q
    if fam.kind is Kind.ASCI:
        return _asci_hyper(fam, n, x)
    phi = basic_hypergeometric([QPower(-n)], [0], -mp.power(q, n + 1) * x, fam.ctx)
    return (-1) ** n * mp.power(q, -n * n) * phi


def qderiv_values(fam: FamilySpec, n: int, x) -> list:
    """[(D_q p_0)(x), ..., (D_q p_n)(x)] from the forward shift rules."""
    mp, q = fam.mp, fam.q
    x = fam.real(x)
    if fam.kind is Kind.ASCI:
        base = values(fam, n, x)
        return [mp.zero] + [q_number(k, fam.ctx) * base[k - 1] for k in range(1, n + 1)]
    base = values(fam, n, q * q * x)
    return [mp.zero] + [mp.power(q, -2 * (k - 1)) * q_number(k, fam.ctx) * base[k - 1]
                        for k in range(1, n + 1)]


def family_qderiv_at(fam: FamilySpec, n: int, x):
    """(D_q p_n)(x) via the forward shift operator."""
    if n < 0:
        raise ValueError("n must be nonnegative")
    return qderiv_values(fam, n, x)[n]


@lru_cache(maxsize=64)
def _infinite_constants(fam: FamilySpec):
    ctx = fam.ctx
    qq = q_pochhammer(fam.q, INFINITY, ctx)
    if fam.kind is Kind.ASCI:
        return qq * q_pochhammer(fam.a, INFINITY, ctx) * q_pochhammer(fam.q / fam.a, INFINITY, ctx)
    return qq


def family_norm_sq(fam: FamilySpec, n: int):
    """<u, p_n^2> from the closed-form norm."""
    if n < 0:
        raise ValueError("n must be nonnegative")
    mp, q, ctx = fam.mp, fam.q, fam.ctx
    qqn = q_pochhammer(q, n, ctx)
    if fam.kind is Kind.ASCI:
        return ((1 - q) * (-fam.a) ** n * mp.power(q, n * (n - 1) // 2) * qqn
                * _infinite_constants(fam))
    return -mp.power(q, -n * (2 * n + 1)) * _infinite_constants(fam) * qqn * mp.log(q)


@lru_cache(maxsize=256)
def norms(fam: FamilySpec, n: int) -> tuple:
    """(||p_0||^2, ..., ||p_n||^2)."""
    return tuple(family_norm_sq(fam, k) for k in range(n + 1))


def family_weight(fam: FamilySpec, x):
    """Weight of the orthogonality relation, by direct infinite products."""
    ctx, q = fam.ctx, fam.q
    x = fam.real(x)
    if fam.kind is Kind.ASCI:
        return q_pochhammer(q * x, INFINITY, ctx) * q_pochhammer(q * x / fam.a, INFINITY, ctx)
    return 1 / (q_pochhammer(-x, INFINITY, ctx) * q_pochhammer(-q / x, INFINITY, ctx))


@lru_cache(maxsize=64)
def jackson_nodes(fam: FamilySpec):
    """Nodes and weights of the ASCI Jackson integral over [a, 1].

    The weights use the ratio form (q^(n+1); q)_inf = (q; q)_inf / (q; q)_n
    and are truncated where q^n drops below the tail tolerance.
    """
    if fam.kind is not Kind.ASCI:
        raise ValueError("Jackson nodes exist only for the ASCI functional")
    mp, q, a, ctx = fam.mp, fam.q, fam.a, fam.ctx
    cut = ctx.tail_eps * (1 - q)
    p_q = q_pochhammer(q, INFINITY, ctx)
    p_qa = q_pochhammer(q / a, INFINITY, ctx)
    p_aq = q_pochhammer(a * q, INFINITY, ctx)
    nodes, weights = [], []
    qn = mp.one
    n = 0
    while qn > cut:
        if n:
            p_q /= 1 - qn
            p_qa /= 1 - qn / a
            p_aq /= 1 - a * qn
        nodes.append(qn)
        weights.append((1 - q) * qn * p_q * p_qa)
        nodes.append(a * qn)
        weights.append((1 - q) * (-a) * qn * p_aq * p_q)
        n += 1
        qn *= q
        if n > ctx.max_terms:
            break
    return tuple(nodes), tuple(weights)


@lru_cache(maxsize=128)
def family_polys(fam: FamilySpec, n: int) -> tuple:
    """Dense monic p_0..p_n built from the recurrence."""
    betas, gammas = coeff_table(fam, n)
    return tuple(polys_from_recurrence(lambda k: betas[k], lambda k: gammas[k], n, fam.ctx))


@lru_cache(maxsize=64)
def moments(fam: FamilySpec, m: int) -> tuple:
    """u_0..u_m seeded with u_0 = ||p_0||^2."""
    betas, gammas = coeff_table(fam, m + 2)
    return tuple(moments_from_recurrence(lambda k: betas[k], lambda k: gammas[k],
                                         family_norm_sq(fam, 0), m))


def functional(fam: FamilySpec, f: Poly, path: str | None = None):
    """<u, f>.

    ``path`` is "jackson" (ASCI only, the default there) or "moments"
    (monomial expansion against recurrence moments; the only path for SW).
    """
    mp = fam.mp
    if f.degree < 0:
        return mp.zero
    if path is None:
        path = "jackson" if fam.kind is Kind.ASCI else "moments"
    if path == "jackson":
        nodes, weights = jackson_nodes(fam)
        return mp.fsum(w * f(x) for x, w in zip(nodes, weights))
    if path != "moments":
        raise ValueError(f"unknown functional path {path!r}")
    mom = moments(fam, -(-max(f.degree, 1) // 16) * 16)
    return mp.fsum(c * mom[k] for k, c in enumerate(f.coeffs))


def functional_inner(fam: FamilySpec, f: Poly, g: Poly, path: str | None = None):
    """<u, f g>."""
    return functional(fam, f * g, path)


def jackson_weight_integral(fam: FamilySpec, f=None):
    """Generic Jackson integral of f * weight over [a, 1] (ASCI oracle path)."""
    if fam.kind is not Kind.ASCI:
        raise ValueError("only the ASCI functional is a Jackson integral")
    if f is None:
        integrand = lambda t: family_weight(fam, t)  # noqa: E731
    else:
        integrand = lambda t: f(t) * family_weight(fam, t)  # noqa: E731
    return jackson_integral(integrand, fam.a, 1, fam.ctx)
