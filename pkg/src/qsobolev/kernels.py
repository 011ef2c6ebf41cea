"""Christoffel-Darboux kernel and its q-derivative kernels.

``kernel`` is K_n(x, y) = sum_{k<n} p_k(x) p_k(y) / ||p_k||^2.  The
derivative kernels apply D_q in the second argument (``kernel01``) or in
both (``kernel11``).  Each has a summation path and, where one exists, a
closed form; the sum is treated as ground truth.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Callable

from .errors import DegenerateArguments, DegreeTooHigh
from .families import (
    FamilySpec,
    family_polys,
    functional_inner,
    norms,
    qderiv_values,
    values,
)
from .qcalc import Poly, q_derivative


class KernelMethod(str, enum.Enum):
    SUM = "sum"
    CLOSED = "closed"


def kernel(fam: FamilySpec, n: int, x, y, method=KernelMethod.SUM):
    """K_n(x, y)."""
    if n < 1:
        raise ValueError("kernel needs n >= 1")
    x, y = fam.real(x), fam.real(y)
    h = norms(fam, n)
    px, py = values(fam, n, x), values(fam, n, y)
    if KernelMethod(method) is KernelMethod.SUM:
        return fam.mp.fsum(px[k] * py[k] / h[k] for k in range(n))
    if x == y:
        raise DegenerateArguments("closed Christoffel-Darboux form needs x != y")
    return (px[n] * py[n - 1] - py[n] * px[n - 1]) / (h[n - 1] * (x - y))


def kernel01(fam: FamilySpec, n: int, x, alpha, method=KernelMethod.SUM):
    """K^(0,1)_n(x, alpha) = sum_{k<n} p_k(x) (D_q p_k)(alpha) / ||p_k||^2."""
    if n < 1:
        raise ValueError("kernel01 needs n >= 1")
    x, alpha = fam.real(x), fam.real(alpha)
    h = norms(fam, n)
    px = values(fam, n, x)
    dpa = qderiv_values(fam, n, alpha)
    if KernelMethod(method) is KernelMethod.SUM:
        return fam.mp.fsum(px[k] * dpa[k] / h[k] for k in range(n))
    qa = fam.q * alpha
    if x == alpha or x == qa:
        raise DegenerateArguments("closed K^(0,1) form excludes x = alpha and x = q alpha")
    pa = values(fam, n, alpha)
    first = (px[n] * pa[n - 1] - px[n - 1] * pa[n]) / ((x - alpha) * (x - qa))
    second = (px[n] * dpa[n - 1] - px[n - 1] * dpa[n]) / (x - qa)
    return (first + second) / h[n - 1]


def kernel11(fam: FamilySpec, n: int, alpha):
    """K^(1,1)_n(alpha, alpha) = sum_{k<n} (D_q p_k)(alpha)^2 / ||p_k||^2."""
    if n < 1:
        raise ValueError("kernel11 needs n >= 1")
    h = norms(fam, n)
    dpa = qderiv_values(fam, n, fam.real(alpha))
    return fam.mp.fsum(dpa[k] ** 2 / h[k] for k in range(n))


def kernel11_table(fam: FamilySpec, n: int, alpha) -> list:
    """[K^(1,1)_0, ..., K^(1,1)_n] at (alpha, alpha) as partial sums (K_0 = 0)."""
    h = norms(fam, n)
    dpa = qderiv_values(fam, n, fam.real(alpha))
    out = [fam.mp.zero]
    for k in range(n):
        out.append(out[-1] + dpa[k] ** 2 / h[k])
    return out


def p_combination(fam: FamilySpec, coeffs) -> Poly:
    """sum_k coeffs[k] p_k as a dense polynomial."""
    polys = family_polys(fam, len(coeffs) - 1)
    acc = Poly([])
    for c, p in zip(coeffs, polys):
        acc = acc + p * c
    return acc


def kernel_poly(fam: FamilySpec, n: int, y, j: int = 0) -> Poly:
    """K^(0,j)_n(x, y) as a dense polynomial in x (j in {0, 1})."""
    if j not in (0, 1):
        raise ValueError("j must be 0 or 1")
    h = norms(fam, n)
    y = fam.real(y)
    weights = values(fam, n, y) if j == 0 else qderiv_values(fam, n, y)
    return p_combination(fam, [weights[k] / h[k] for k in range(n)])


def reproducing_check(fam: FamilySpec, n: int, j: int, pi: Poly, y):
    """(<u, K^(0,j)_n(., y) pi>, (D_q^j pi)(y))."""
    if pi.degree >= n:
        raise DegreeTooHigh(f"deg(pi) = {pi.degree} must be below n = {n}")
    y = fam.real(y)
    lhs = functional_inner(fam, kernel_poly(fam, n, y, j), pi)
    rhs = pi(y) if j == 0 else q_derivative(pi, y, fam.ctx)
    return lhs, rhs


@dataclass(frozen=True)
class KernelBundle:
    n: int
    alpha: object
    k11: object
    k01_at: Callable
    k00_at: Callable


def kernel_bundle(fam: FamilySpec, n: int, alpha) -> KernelBundle:
    alpha = fam.real(alpha)
    return KernelBundle(
        n=n,
        alpha=alpha,
        k11=kernel11(fam, n, alpha),
        k01_at=lambda x: kernel01(fam, n, x, alpha),
        k00_at=lambda x, y: kernel(fam, n, x, y),
    )
