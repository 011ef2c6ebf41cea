"""Extended-precision context and the q-calculus primitive layer.

Every real in the package is an ``mpf`` belonging to the private mpmath
context owned by a :class:`PrecisionContext`.  Contexts are immutable once
built, so functions taking one are pure and can be called from several
threads at once.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Sequence

import mpmath

from .errors import (
    DivergentSeries,
    MaxTermsExceeded,
    NonconvergentTail,
    PoleInLowerParameter,
)

INFINITY = math.inf

# Truncation of infinite sums/products: stop once the geometric tail bound
# is below eps_trunc / SAFETY.
SAFETY = 2

# Consecutive growing terms after which a bilateral Jackson tail is declared
# nonconvergent.
_GROWTH_LIMIT = 4096


@dataclass(frozen=True)
class PrecisionContext:
    """Numeric configuration: significand width, q and truncation limits.

    ``q`` and ``eps_trunc`` may be given as strings, ints, floats, Fractions
    or mpf values; they are stored as mpf numbers at ``sig_bits`` precision.
    """

    q: object
    sig_bits: int = 384
    eps_trunc: object = None
    max_terms: int = 10**6
    mp: mpmath.ctx_mp.MPContext = field(init=False, repr=False, compare=False)
    q_input: object = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        if self.sig_bits < 64:
            raise ValueError(f"sig_bits must be >= 64, got {self.sig_bits}")
        if self.max_terms <= 0:
            raise ValueError("max_terms must be positive")
        mp = mpmath.MPContext()
        mp.prec = self.sig_bits
        object.__setattr__(self, "mp", mp)
        object.__setattr__(self, "q_input", self.q)
        q = self.real(self.q)
        if not 0 < q < 1:
            raise ValueError(f"q must lie in (0, 1), got {q}")
        object.__setattr__(self, "q", q)
        eps = self.eps_trunc
        eps = mp.ldexp(mp.one, -self.sig_bits + 16) if eps is None else self.real(eps)
        if not eps > 0:
            raise ValueError("eps_trunc must be positive")
        object.__setattr__(self, "eps_trunc", eps)

    def real(self, value):
        """Convert ``value`` to an mpf of this context."""
        mp = self.mp
        if isinstance(value, Fraction):
            return mp.mpf(value.numerator) / value.denominator
        if isinstance(value, str):
            value = value.strip()
            if "/" in value:
                num, den = value.split("/")
                return mp.mpf(num) / mp.mpf(den)
        return mp.mpf(value)

    def with_bits(self, sig_bits: int) -> "PrecisionContext":
        """Same q at another precision; q is re-rounded from its exact value."""
        return PrecisionContext(q=self.q_input, sig_bits=sig_bits,
                                max_terms=self.max_terms)

    @property
    def tail_eps(self):
        return self.eps_trunc / SAFETY

    def fmt(self, x, digits=None) -> str:
        """Locale-independent decimal rendering (full precision by default)."""
        if digits is None:
            digits = self.mp.dps
        return self.mp.nstr(x, digits, strip_zeros=False, min_fixed=-4, max_fixed=8)


@dataclass(frozen=True)
class QPower:
    """The exact parameter q**exponent.

    Used for Pochhammer and hypergeometric parameters such as q^(-n) so that
    terminating factors ``1 - q^(-n) q^n`` vanish exactly.
    """

    exponent: int


def _factor(param, qk, k, ctx):
    """The factor 1 - param*q^k."""
    if isinstance(param, QPower):
        return ctx.mp.one - ctx.mp.power(ctx.q, param.exponent + k)
    return ctx.mp.one - param * qk


def _value(param, ctx):
    if isinstance(param, QPower):
        return ctx.mp.power(ctx.q, param.exponent)
    return ctx.real(param)


def q_number(z, ctx: PrecisionContext):
    """[z]_q = (1 - q^z)/(1 - q)."""
    mp = ctx.mp
    return (mp.one - mp.power(ctx.q, z)) / (mp.one - ctx.q)


def q_factorial(n: int, ctx: PrecisionContext):
    if n < 0:
        raise ValueError("n must be nonnegative")
    result = ctx.mp.one
    for k in range(1, n + 1):
        result *= q_number(k, ctx)
    return result


def q_pochhammer(a, n, ctx: PrecisionContext):
    """(a; q)_n for integer n >= 0 or n = INFINITY.

    The infinite product is truncated once |a q^j| / (1 - q) falls below
    eps_trunc / 2, which bounds the relative error of the dropped tail.
    """
    mp = ctx.mp
    q = ctx.q
    if n == INFINITY:
        if isinstance(a, QPower) and a.exponent <= 0:
            return mp.zero
        a = _value(a, ctx)
        if a == 0:
            return mp.one
        bound = ctx.tail_eps * (1 - q)
        result = mp.one
        term = a
        for _ in range(ctx.max_terms):
            if abs(term) < bound:
                return result
            result *= 1 - term
            term *= q
        raise MaxTermsExceeded(f"(a;q)_inf did not converge within {ctx.max_terms} factors")
    if n < 0:
        raise ValueError("n must be nonnegative or INFINITY")
    if not isinstance(a, QPower):
        a = ctx.real(a)
    result = mp.one
    qk = mp.one
    for k in range(n):
        result *= _factor(a, qk, k, ctx)
        qk *= q
    return result


def q_pochhammer_multi(params: Sequence, n, ctx: PrecisionContext):
    """(a_1, ..., a_r; q)_n."""
    result = ctx.mp.one
    for a in params:
        result *= q_pochhammer(a, n, ctx)
    return result


def _terminating_index(upper):
    stops = [-p.exponent for p in upper if isinstance(p, QPower) and p.exponent <= 0]
    return min(stops) if stops else None


def basic_hypergeometric(upper: Sequence, lower: Sequence, z, ctx: PrecisionContext,
                         n_terms: int | None = None):
    """The series r_phi_s(upper; lower; q, z).

    Terms are built from running products.  ``n_terms=None`` means AUTO:
    terminating series (an upper parameter ``QPower(-n)``) are summed
    exactly, other series until the terms drop below eps_trunc relative to
    the partial sum.
    """
    mp = ctx.mp
    q = ctx.q
    z = ctx.real(z)
    power = 1 + len(lower) - len(upper)
    stop = _terminating_index(upper)
    if n_terms is not None:
        limit = n_terms
    elif stop is not None:
        limit = stop + 1
    else:
        limit = ctx.max_terms
    upper_v = [p if isinstance(p, QPower) else ctx.real(p) for p in upper]
    lower_v = [p if isinstance(p, QPower) else ctx.real(p) for p in lower]

    term = mp.one
    total = mp.zero
    qk = mp.one
    quiet = 0
    for k in range(limit):
        total += term
        if n_terms is None and stop is None:
            if abs(term) <= ctx.eps_trunc * abs(total):
                quiet += 1
                if quiet >= 2:
                    return total
            else:
                quiet = 0
        if k == limit - 1:
            break
        num = mp.one
        for a in upper_v:
            num *= _factor(a, qk, k, ctx)
        if num == 0:
            return total
        den = mp.one
        for b in lower_v:
            den *= _factor(b, qk, k, ctx)
        if den == 0:
            raise PoleInLowerParameter(f"lower parameter hits q^(-{k}) at term {k + 1}")
        ratio = num / den * z / (1 - qk * q)
        if power:
            ratio *= (-qk) ** power
        term *= ratio
        qk *= q
    if n_terms is None and stop is None:
        raise DivergentSeries(f"series did not converge within {ctx.max_terms} terms")
    return total


def q_derivative(f, x, ctx: PrecisionContext):
    """Euler-Jackson q-derivative of ``f`` at ``x``.

    At x = 0 the ordinary derivative is required, which is only available
    when ``f`` is a :class:`Poly`.
    """
    x = ctx.real(x)
    if x == 0:
        if not isinstance(f, Poly):
            raise ValueError("q-derivative at 0 needs a Poly (coefficient form)")
        return f.coeffs[1] if f.degree >= 1 else ctx.mp.zero
    q = ctx.q
    return (f(q * x) - f(x)) / ((q - 1) * x)


def _jackson_from_zero(f, c, ctx):
    """int_0^c f d_q t = c (1-q) sum_n f(q^n c) q^n (valid for either sign of c)."""
    mp = ctx.mp
    if c == 0:
        return mp.zero
    q = ctx.q
    total = mp.zero
    qn = mp.one
    quiet = 0
    for _ in range(ctx.max_terms):
        term = f(qn * c) * qn
        total += term
        if abs(term) <= ctx.tail_eps * abs(total):
            quiet += 1
            if quiet >= 3:
                return c * (1 - q) * total
        else:
            quiet = 0
        qn *= q
    raise MaxTermsExceeded("Jackson integral did not converge")


def _bilateral_tail(f, ctx, step):
    mp = ctx.mp
    total = mp.zero
    qn = mp.one if step > 0 else 1 / ctx.q
    mult = ctx.q if step > 0 else 1 / ctx.q
    quiet = 0
    growing = 0
    prev = None
    for _ in range(ctx.max_terms):
        term = f(qn) * qn
        total += term
        if abs(term) <= ctx.tail_eps * abs(total):
            quiet += 1
            if quiet >= 3:
                return total
        else:
            quiet = 0
        if prev is not None and abs(term) > abs(prev):
            growing += 1
            if growing >= _GROWTH_LIMIT:
                raise NonconvergentTail("tail terms of the improper Jackson integral keep growing")
        else:
            growing = 0
        prev = term
        qn *= mult
    raise NonconvergentTail(f"improper Jackson integral not converged in {ctx.max_terms} terms")


def jackson_integral(f: Callable, a, b, ctx: PrecisionContext):
    """Jackson q-integral of ``f`` over [a, b].

    ``b = INFINITY`` (with a = 0) selects the bilateral improper integral
    (1-q) sum_{n in Z} f(q^n) q^n.
    """
    mp = ctx.mp
    a = ctx.real(a)
    if b == INFINITY:
        if a != 0:
            raise ValueError("improper Jackson integral is defined on [0, inf)")
        q = ctx.q
        return (1 - q) * (_bilateral_tail(f, ctx, +1) + _bilateral_tail(f, ctx, -1))
    b = ctx.real(b)
    if mp.isinf(b):
        return jackson_integral(f, a, INFINITY, ctx)
    if a > b:
        raise ValueError("jackson_integral requires a <= b")
    if a == b:
        return mp.zero
    return _jackson_from_zero(f, b, ctx) - _jackson_from_zero(f, a, ctx)


class Poly:
    """Dense real polynomial, coefficients lowest degree first.

    Trailing zero coefficients are stripped, so the leading coefficient is
    nonzero; the zero polynomial has no coefficients and degree -1.
    """

    __slots__ = ("coeffs",)

    def __init__(self, coeffs):
        coeffs = list(coeffs)
        while coeffs and coeffs[-1] == 0:
            coeffs.pop()
        self.coeffs = tuple(coeffs)

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    @property
    def lead(self):
        return self.coeffs[-1] if self.coeffs else 0

    @property
    def is_monic(self) -> bool:
        return bool(self.coeffs) and self.coeffs[-1] == 1

    def __call__(self, x):
        acc = 0 * x
        for c in reversed(self.coeffs):
            acc = acc * x + c
        return acc

    def __repr__(self):
        return f"Poly({[str(c) for c in self.coeffs]})"

    def __eq__(self, other):
        return isinstance(other, Poly) and self.coeffs == other.coeffs

    __hash__ = None

    def __add__(self, other):
        if not isinstance(other, Poly):
            other = Poly([other])
        a, b = self.coeffs, other.coeffs
        if len(a) < len(b):
            a, b = b, a
        return Poly([x + (b[i] if i < len(b) else 0) for i, x in enumerate(a)])

    __radd__ = __add__

    def __neg__(self):
        return Poly([-c for c in self.coeffs])

    def __sub__(self, other):
        return self + (-other if isinstance(other, Poly) else -other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if not isinstance(other, Poly):
            return Poly([c * other for c in self.coeffs])
        a, b = self.coeffs, other.coeffs
        if not a or not b:
            return Poly([])
        out = [0 * a[0]] * (len(a) + len(b) - 1)
        for i, x in enumerate(a):
            for j, y in enumerate(b):
                out[i + j] += x * y
        return Poly(out)

    __rmul__ = __mul__

    def deriv(self) -> "Poly":
        return Poly([k * c for k, c in enumerate(self.coeffs)][1:])

    def qderiv(self, ctx: PrecisionContext) -> "Poly":
        """Coefficient-level q-derivative: c_k x^k -> c_k [k]_q x^(k-1)."""
        return Poly([c * q_number(k, ctx) for k, c in enumerate(self.coeffs)][1:])

    def dilate(self, c) -> "Poly":
        """The polynomial x -> p(c x)."""
        out = []
        ck = 1
        for a in self.coeffs:
            out.append(a * ck)
            ck = ck * c
        return Poly(out)

    @classmethod
    def x(cls, ctx: PrecisionContext) -> "Poly":
        return cls([ctx.mp.zero, ctx.mp.one])


def polys_from_recurrence(beta: Callable[[int], object], gamma: Callable[[int], object],
                          n: int, ctx: PrecisionContext) -> list[Poly]:
    """Monic p_0..p_n from x p_k = p_{k+1} + beta_k p_k + gamma_k p_{k-1}."""
    mp = ctx.mp
    x = Poly.x(ctx)
    prev, cur = Poly([]), Poly([mp.one])
    out = [cur]
    for k in range(n):
        nxt = x * cur - cur * beta(k)
        if k > 0:
            nxt = nxt - prev * gamma(k)
        prev, cur = cur, nxt
        out.append(cur)
    return out


def poly_from_recurrence(beta, gamma, n: int, ctx: PrecisionContext) -> Poly:
    if n < 0:
        raise ValueError("n must be nonnegative")
    return polys_from_recurrence(beta, gamma, n, ctx)[-1]


def moments_from_recurrence(beta, gamma, u0, m: int) -> list:
    """Moments u_0..u_m of the functional whose MOPS has the given recurrence.

    u_k = u_0 * (e_0^T J^k e_0) for the tridiagonal matrix with J[k][k] =
    beta_k, J[k][k+1] = 1, J[k][k-1] = gamma_k.  The vector c holds the
    coefficients of x^k in the p-basis; the moment is u_0 times c_0.
    """
    if m < 0:
        raise ValueError("m must be nonnegative")
    size = m + 2
    b = [beta(k) for k in range(size)]
    g = [0 * u0] + [gamma(k) for k in range(1, size)]
    c = [u0 * 0 + 1] + [0 * u0] * (size - 1)
    out = [u0]
    for k in range(1, m + 1):
        new = []
        for j in range(min(k, size - 1) + 1):
            v = b[j] * c[j]
            if j > 0:
                v += c[j - 1]
            if j + 1 < size:
                v += g[j + 1] * c[j + 1]
            new.append(v)
        c = new + [0 * u0] * (size - len(new))
        out.append(u0 * c[0])
    return out


def recurrence_values(betas: Sequence, gammas: Sequence, n: int, x, with_derivative=False):
    """Values p_0(x)..p_n(x) by forward recursion (and p_k'(x) if requested).

    ``betas[k]``, ``gammas[k]`` hold the recurrence coefficients; gammas[0]
    is unused.
    """
    one = x * 0 + 1
    vals = [one]
    prev, cur = 0 * x, one
    if not with_derivative:
        for k in range(n):
            nxt = (x - betas[k]) * cur
            if k:
                nxt -= gammas[k] * prev
            prev, cur = cur, nxt
            vals.append(cur)
        return vals
    ders = [0 * x]
    dprev, dcur = 0 * x, 0 * x
    for k in range(n):
        nxt = (x - betas[k]) * cur
        dnxt = cur + (x - betas[k]) * dcur
        if k:
            nxt -= gammas[k] * prev
            dnxt -= gammas[k] * dprev
        prev, cur = cur, nxt
        dprev, dcur = dcur, dnxt
        vals.append(cur)
        ders.append(dcur)
    return vals, ders
