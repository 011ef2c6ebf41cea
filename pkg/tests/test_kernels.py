import mpmath
import pytest
from hypothesis import given, strategies as st

from qsobolev.errors import DegenerateArguments, DegreeTooHigh
from qsobolev.families import asci, family_norm_sq, family_polys, stieltjes_wigert
from qsobolev.kernels import (
    kernel,
    kernel01,
    kernel11,
    kernel11_table,
    kernel_bundle,
    reproducing_check,
)
from qsobolev.qcalc import Poly, q_derivative

from conftest import rel

FAMILIES = [asci(-1, "1/2"), asci("-2.5", "0.3"), stieltjes_wigert("1/2")]
coord = st.floats(-5, 5, allow_nan=False)


def test_trivial_orders(hermite_like):
    h0, h1 = family_norm_sq(hermite_like, 0), family_norm_sq(hermite_like, 1)
    assert rel(kernel(hermite_like, 1, "0.2", 4), 1 / h0) < 1e-100
    assert kernel01(hermite_like, 1, "0.7", -3) == 0
    assert rel(kernel01(hermite_like, 2, "0.7", -3), hermite_like.real("0.7") / h1) < 1e-100
    assert kernel11(hermite_like, 1, -3) == 0
    assert rel(kernel11(hermite_like, 2, -3), 1 / h1) < 1e-100


def test_closed_forms_at_documented_points(hermite_like):
    assert rel(kernel(hermite_like, 3, "0.3", "-0.4"), kernel(hermite_like, 3, "0.3", "-0.4", "closed")) < 1e-30
    assert rel(kernel01(hermite_like, 5, "0.7", -3), kernel01(hermite_like, 5, "0.7", -3, "closed")) < 1e-30


@pytest.mark.parametrize("fam", FAMILIES, ids=str)
@given(n=st.integers(1, 14), x=coord, y=coord)
def test_kernel_sum_matches_closed(fam, n, x, y):
    if abs(x - y) < 1e-6:
        return
    a, b = kernel(fam, n, x, y), kernel(fam, n, x, y, "closed")
    assert abs(a - b) <= mpmath.mpf(2) ** -250 * (1 + abs(a)) / abs(fam.real(x) - fam.real(y))
    assert kernel(fam, n, x, y) == kernel(fam, n, y, x)


@pytest.mark.parametrize("fam", FAMILIES, ids=str)
@given(n=st.integers(2, 14), x=coord, alpha=st.floats(-6, 6).filter(lambda v: abs(v) > 0.1))
def test_kernel01_sum_matches_closed(fam, n, x, alpha):
    xv, av = fam.real(x), fam.real(alpha)
    gap = min(abs(xv - av), abs(xv - fam.q * av))
    if gap < 1e-4:
        return
    a, b = kernel01(fam, n, x, alpha), kernel01(fam, n, x, alpha, "closed")
    assert abs(a - b) <= mpmath.mpf(2) ** -250 * (1 + abs(a)) / gap ** 2


@pytest.mark.parametrize("fam", FAMILIES, ids=str)
def test_kernel01_is_q_derivative_of_kernel(fam):
    for n in (3, 6, 9):
        for x, alpha in (("0.4", -3), ("2.5", "1.7")):
            ref = q_derivative(lambda y: kernel(fam, n, x, y), alpha, fam.ctx)
            assert rel(kernel01(fam, n, x, alpha), ref) < 1e-60


@pytest.mark.parametrize("fam", FAMILIES, ids=str)
def test_kernel11_is_q_derivative_of_kernel01(fam):
    for n in (2, 5, 8):
        ref = q_derivative(lambda x: kernel01(fam, n, x, -3), -3, fam.ctx)
        assert rel(kernel11(fam, n, -3), ref) < 1e-60
        assert rel(kernel11_table(fam, n, -3)[n], kernel11(fam, n, -3)) < 1e-100


def test_closed_forms_reject_degenerate_points(hermite_like):
    with pytest.raises(DegenerateArguments):
        kernel(hermite_like, 3, 1, 1, "closed")
    with pytest.raises(DegenerateArguments):
        kernel01(hermite_like, 3, "-1.5", -3, "closed")


def test_reproducing_trivial_cases(hermite_like):
    one = Poly([hermite_like.mp.one])
    lhs, rhs = reproducing_check(hermite_like, 4, 0, one, "0.3")
    assert rel(lhs, 1) < 1e-30 and rhs == 1
    p3 = family_polys(hermite_like, 3)[3]
    lhs, rhs = reproducing_check(hermite_like, 4, 0, p3, "-2.2")
    assert rel(lhs, rhs) < 1e-30


@given(st.lists(st.integers(-9, 9), min_size=6, max_size=6))
def test_reproducing_derivative_kernel(coeffs):
    fam = asci(-1, "1/2")
    pi = Poly([fam.real(c) for c in coeffs])
    if pi.degree < 1:
        return
    lhs, rhs = reproducing_check(fam, 6, 1, pi, -2)
    assert abs(lhs - rhs) <= 1e-20 * max(1, abs(rhs))


def test_reproducing_rejects_high_degree(hermite_like):
    with pytest.raises(DegreeTooHigh):
        reproducing_check(hermite_like, 3, 0, family_polys(hermite_like, 3)[3], 0)


def test_bundle(hermite_like):
    b = kernel_bundle(hermite_like, 5, -3)
    assert b.k11 == kernel11(hermite_like, 5, -3)
    assert b.k01_at(1) == kernel01(hermite_like, 5, 1, -3)
