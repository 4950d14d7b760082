"""Tests for the truncated power-series ring, cyclotomic layer polynomials,
Weierstrass preparation, and presentation determinants."""

import pytest
import sympy
from hypothesis import given, settings
from hypothesis import strategies as st

from iwalog.series import (
    DegreeOverflowError,
    DistinguishedPoly,
    LambdaElem,
    PrecisionExhaustedError,
    SingularPresentationError,
    WeierstrassFactorization,
    ZeroSeriesError,
    char_poly,
    cyclotomic_quotient_poly,
    divmod_poly,
    invariants_from_charpoly,
    omega,
    omega_int,
    omega_quotient,
    omega_quotient_int,
    weierstrass,
)

odd_primes = st.sampled_from((3, 5, 7))
coeff_lists = st.lists(st.integers(min_value=-(10**4), max_value=10**4), min_size=0, max_size=6)


# ---------------------------------------------------------------------------
# LambdaElem ring structure
# ---------------------------------------------------------------------------


def test_constructors_and_canonical_form():
    x = LambdaElem.from_ints((1, 2, 3), 3, prec=2)
    assert x.order == 3
    assert x.coeffs == (1, 2, 3)
    assert LambdaElem.from_ints((), 3).order == 1
    assert LambdaElem.zero(3, 4, 5).coeffs == (0,) * 5
    assert LambdaElem.one(3, 4, 5).coeffs == (1, 0, 0, 0, 0)
    # coefficients are reduced and the tuple padded to the stated order
    y = LambdaElem(3, 2, 4, (-1, 10))
    assert y.coeffs == (8, 1, 0, 0)


def test_validation():
    with pytest.raises(ValueError):
        LambdaElem(2, 4, 4, (1,))
    with pytest.raises(ValueError):
        LambdaElem(3, 0, 4, (1,))
    with pytest.raises(ValueError):
        LambdaElem(3, 4, 0, (1,))
    with pytest.raises(ValueError):
        LambdaElem.one(3) + LambdaElem.one(5)
    with pytest.raises(TypeError):
        LambdaElem.one(3) + 1


def test_operations_meet_at_smaller_precision_and_order():
    a = LambdaElem.from_ints((1, 1, 1, 1), 3, prec=5)
    b = LambdaElem.from_ints((1, 2), 3, prec=3)
    for result in (a + b, a - b, a * b):
        assert result.prec == 3
        assert result.order == 2


@settings(max_examples=120)
@given(odd_primes, coeff_lists, coeff_lists, coeff_lists)
def test_ring_laws(ell, xs, ys, zs):
    prec, order = 5, 6
    A = LambdaElem.from_ints(xs, ell, prec, order)
    B = LambdaElem.from_ints(ys, ell, prec, order)
    C = LambdaElem.from_ints(zs, ell, prec, order)
    assert A + B == B + A
    assert A * B == B * A
    assert (A + B) + C == A + (B + C)
    assert (A * B) * C == A * (B * C)
    assert A * (B + C) == A * B + A * C
    assert A + (-A) == LambdaElem.zero(ell, prec, order)
    assert A * LambdaElem.one(ell, prec, order) == A


def test_degree_and_predicates():
    assert LambdaElem.from_ints((0, 0, 2), 3, order=5).degree() == 2
    assert LambdaElem.zero(3).degree() is None
    assert LambdaElem.zero(3).is_zero
    assert LambdaElem.from_ints((2, 3), 3).is_unit
    assert not LambdaElem.from_ints((3, 1), 3).is_unit


def test_scale_and_pow():
    x = LambdaElem.from_ints((1, 1), 3, prec=4, order=4)
    assert x.scale(3).coeffs == (3, 3, 0, 0)
    assert x**3 == x * x * x
    assert x**0 == LambdaElem.one(3, 4, 4)
    assert x**-1 == x.inverse()


def test_at_precision_only_reduces():
    x = LambdaElem.from_ints((1, 4), 3, prec=3)
    assert x.at_precision(2).prec == 2
    assert x.at_precision(2, order=5).order == 5
    with pytest.raises(ValueError):
        x.at_precision(4)


def test_shift_down():
    x = LambdaElem.from_ints((1, 2, 3), 3, prec=4, order=3)
    assert x.shift_down(1).coeffs == (2, 3, 0)
    assert x.shift_down(0) == x


def test_inverse_round_trip_and_failure():
    u = LambdaElem.from_ints((2, 5, 1, 7), 3, prec=6, order=8)
    assert u * u.inverse() == LambdaElem.one(3, 6, 8)
    assert u.inverse() * u == LambdaElem.one(3, 6, 8)
    with pytest.raises(PrecisionExhaustedError):
        LambdaElem.from_ints((3, 1), 3).inverse()


@given(odd_primes, st.lists(st.integers(min_value=0, max_value=10**3), min_size=1, max_size=5))
def test_inverse_property(ell, cs):
    if cs[0] % ell == 0:
        cs[0] += 1
    u = LambdaElem.from_ints(cs, ell, prec=5, order=7)
    assert u * u.inverse() == LambdaElem.one(ell, 5, 7)


def test_min_valuation():
    assert LambdaElem.from_ints((9, 3, 27), 3, prec=5).min_valuation() == 1
    assert LambdaElem.from_ints((9, 2), 3, prec=5).min_valuation() == 0
    assert LambdaElem.zero(3, 5).min_valuation() == 5


def test_repr_and_json():
    x = LambdaElem.from_ints((3, 1, 2), 3, prec=2, order=4)
    assert repr(x) == "(3 + T + 2*T^2) + O(3^2, T^4)"
    assert repr(LambdaElem.zero(3, 2)) == "(0) + O(3^2, T^1)"
    assert x.to_json_list() == ["3", "1", "2", "0"]


# ---------------------------------------------------------------------------
# distinguished polynomials
# ---------------------------------------------------------------------------


def test_distinguished_poly_validation():
    p = DistinguishedPoly(3, (3, 6, 1))
    assert p.degree == 2
    with pytest.raises(ValueError):
        DistinguishedPoly(3, (3, 6, 2))  # not monic
    with pytest.raises(ValueError):
        DistinguishedPoly(3, (2, 1))  # constant term not divisible by 3
    with pytest.raises(ValueError):
        DistinguishedPoly(3, ())


def test_distinguished_poly_neutral_constant():
    one = DistinguishedPoly(3, (1,))
    p = DistinguishedPoly(3, (3, 1))
    assert one.degree == 0
    assert (one * p).coeffs == p.coeffs
    assert (p * one).coeffs == p.coeffs


def test_distinguished_poly_product():
    p = DistinguishedPoly(3, (3, 1))
    q = DistinguishedPoly(3, (6, 3, 1))
    assert (p * q).coeffs == (18, 15, 6, 1)
    with pytest.raises(TypeError):
        p * DistinguishedPoly(5, (5, 1))


def test_to_lambda_and_overflow():
    p = DistinguishedPoly(3, (3, 3, 1))
    x = p.to_lambda(prec=4)
    assert x.coeffs == (3, 3, 1)
    with pytest.raises(DegreeOverflowError):
        p.to_lambda(prec=4, order=2)


# ---------------------------------------------------------------------------
# cyclotomic layer polynomials
# ---------------------------------------------------------------------------


def test_omega_int_frozen():
    # (1+T)^3 - 1 = 3T + 3T^2 + T^3, divided by T
    assert omega_int(1, 3) == (3, 3, 1)
    assert omega_int(0, 3) == (1,)
    with pytest.raises(ValueError):
        omega_int(-1, 3)


def test_layer_quotient_frozen():
    assert omega_quotient_int(1, 0, 3) == (3, 3, 1)  # T^2 + 3T + 3
    assert omega_quotient_int(2, 2, 3) == (1,)
    assert cyclotomic_quotient_poly(1, 0, 3).coeffs == (3, 3, 1)
    with pytest.raises(ValueError):
        omega_quotient_int(1, 2, 3)


@pytest.mark.parametrize("ell,k", [(3, 1), (3, 2), (5, 1), (7, 1)])
def test_layer_quotient_is_shifted_cyclotomic(ell, k):
    # independent route: the k-th layer quotient is the ell**k-th cyclotomic
    # polynomial evaluated at 1 + T
    T = sympy.symbols("T")
    expected = sympy.Poly(sympy.cyclotomic_poly(ell**k, 1 + T), T).all_coeffs()[::-1]
    assert list(cyclotomic_quotient_poly(k, k - 1, ell).coeffs) == [int(c) for c in expected]


@pytest.mark.parametrize("ell,n", [(3, 2), (3, 3), (5, 2)])
def test_layer_quotients_telescope(ell, n):
    product = DistinguishedPoly(ell, (1,))
    for k in range(1, n + 1):
        product = product * cyclotomic_quotient_poly(k, k - 1, ell)
    assert product.coeffs == omega_quotient_int(n, 0, ell)


def test_omega_in_truncated_ring():
    w = omega(1, 3, prec=4)
    assert w.coeffs[:4] == (0, 3, 3, 1)
    assert omega_quotient(1, 0, 3, prec=4).coeffs[:3] == (3, 3, 1)
    with pytest.raises(DegreeOverflowError):
        omega(3, 3, order=10)
    with pytest.raises(DegreeOverflowError):
        omega_quotient(3, 0, 3, order=10)


# ---------------------------------------------------------------------------
# polynomial long division
# ---------------------------------------------------------------------------


def test_divmod_poly_exact_and_modular():
    quo, rem = divmod_poly((6, 11, 6, 1), (2, 1))  # (x+1)(x+2)(x+3) / (x+2)
    assert quo == (3, 4, 1)
    assert rem == (0,)  # remainder keeps deg(den) slots
    quo, rem = divmod_poly((1, 0, 1), (1, 1), modulus=9)
    assert rem == (2,)  # x^2 + 1 = (x - 1)(x + 1) + 2
    assert quo == (8, 1)


def test_divmod_poly_errors():
    with pytest.raises(ZeroDivisionError):
        divmod_poly((1, 1), (0,))
    with pytest.raises(ValueError):
        divmod_poly((1, 1), (1, 2))  # non-monic divisor


@settings(max_examples=80)
@given(
    st.lists(st.integers(min_value=-50, max_value=50), min_size=0, max_size=8),
    st.lists(st.integers(min_value=-50, max_value=50), min_size=1, max_size=4),
)
def test_divmod_poly_reconstruction(num, den_low):
    den = tuple(den_low) + (1,)  # force monic
    quo, rem = divmod_poly(num, den)
    assert len(rem) < len(den)
    rebuilt = list(rem) + [0] * (len(num) - len(rem))
    for i, q in enumerate(quo):
        for j, d in enumerate(den):
            rebuilt[i + j] += q * d
    trimmed = list(num)
    while len(rebuilt) < len(trimmed):
        rebuilt.append(0)
    while len(trimmed) < len(rebuilt):
        trimmed.append(0)
    assert rebuilt == trimmed


# ---------------------------------------------------------------------------
# Weierstrass preparation
# ---------------------------------------------------------------------------


def test_weierstrass_frozen_unit_times_ell():
    f = LambdaElem.from_ints((3, 3), 3, prec=5, order=4)
    fact = weierstrass(f)
    assert fact.mu == 1
    assert fact.lam == 0
    assert fact.poly.coeffs == (1,)
    assert fact.unit == LambdaElem.from_ints((1, 1), 3, prec=4, order=4)


def test_weierstrass_frozen_already_distinguished():
    f = LambdaElem.from_ints((3, 0, 1), 3, prec=5, order=6)
    fact = weierstrass(f)
    assert fact.mu == 0
    assert fact.poly.coeffs == (3, 0, 1)
    assert fact.unit == LambdaElem.one(3, 5, 6)


def test_weierstrass_of_layer_quotient():
    f = omega_quotient(1, 0, 3, prec=8, order=6)
    fact = weierstrass(f)
    assert (fact.mu, fact.lam) == (0, 2)
    assert fact.poly.coeffs == (3, 3, 1)


def test_weierstrass_zero_rejected():
    with pytest.raises(ZeroSeriesError):
        weierstrass(LambdaElem.zero(3, 4, 4))


@settings(max_examples=60, deadline=None)
@given(
    odd_primes,
    st.integers(min_value=0, max_value=2),  # mu
    st.lists(st.integers(min_value=0, max_value=2), min_size=0, max_size=3),  # poly // ell
    st.lists(st.integers(min_value=0, max_value=10**3), min_size=1, max_size=4),  # unit
)
def test_weierstrass_round_trip(ell, mu, low, unit_cs):
    prec, order = 6, 10
    if unit_cs[0] % ell == 0:
        unit_cs[0] += 1
    poly = DistinguishedPoly(ell, tuple(ell * c for c in low) + (1,))
    unit = LambdaElem.from_ints(unit_cs, ell, prec, order)
    f = (poly.to_lambda(prec, order) * unit).scale(ell**mu)

    fact = weierstrass(f)
    assert isinstance(fact, WeierstrassFactorization)
    # mu and the Weierstrass degree are uniquely determined by f ...
    assert fact.mu == mu
    assert fact.lam == poly.degree
    assert fact.unit.is_unit
    # ... while (P, U) itself is unique only in the full ring: truncation at
    # T^order admits equivalent pairs, so check exact reconstruction instead
    # of literal coefficient equality.
    product = fact.poly.to_lambda(prec - mu, order) * fact.unit
    reduced = LambdaElem(ell, prec - mu, order, tuple(c // ell**mu for c in f.coeffs))
    assert product == reduced


# ---------------------------------------------------------------------------
# presentation determinants
# ---------------------------------------------------------------------------


def _elem(coeffs, ell=3, prec=6, order=8):
    return LambdaElem.from_ints(coeffs, ell, prec, order)


def test_char_poly_one_by_one():
    f = _elem((3, 1))
    assert char_poly([[f]]) == f


def test_char_poly_matches_sympy_determinant():
    T = sympy.symbols("T")
    entries = [
        [(3, 1), (1,)],
        [(0, 3), (3, 0, 1)],
    ]
    mat = [[_elem(c) for c in row] for row in entries]
    sym = sympy.Matrix(
        [[sympy.Poly(list(reversed(c)), T).as_expr() for c in row] for row in entries]
    )
    det = sympy.Poly(sym.det(), T).all_coeffs()[::-1]
    expected = _elem(tuple(int(c) for c in det))
    assert char_poly(mat) == expected


def test_char_poly_three_by_three_against_sympy():
    T = sympy.symbols("T")
    entries = [
        [(3, 1), (2,), (0, 1)],
        [(1,), (3, 0, 1), (0,)],
        [(0, 2), (5,), (6, 1)],
    ]
    mat = [[_elem(c) for c in row] for row in entries]
    sym = sympy.Matrix(
        [[sympy.Poly(list(reversed(c)) or [0], T).as_expr() for c in row] for row in entries]
    )
    det = sympy.Poly(sym.det(), T).all_coeffs()[::-1]
    expected = _elem(tuple(int(c) for c in det))
    assert char_poly(mat) == expected


def test_char_poly_rejects_bad_inputs():
    with pytest.raises(ValueError):
        char_poly([])
    with pytest.raises(ValueError):
        char_poly([[_elem((1,)), _elem((1,))]])
    with pytest.raises(ValueError):
        char_poly([[_elem((1,), ell=3), _elem((1,), ell=3)],
                   [_elem((1,), ell=5), _elem((1,), ell=5)]])


def test_char_poly_singular():
    t = _elem((0, 1))
    with pytest.raises(SingularPresentationError):
        char_poly([[t, t], [t, t]])


def test_invariants_from_charpoly():
    # diagonal presentation diag(T - 3, T^2 + 3): no ell part, degree 3
    diag = char_poly([[_elem((-3, 1)), LambdaElem.zero(3, 6, 8)],
                      [LambdaElem.zero(3, 6, 8), _elem((3, 0, 1))]])
    assert invariants_from_charpoly(diag) == (0, 3)
    assert invariants_from_charpoly(diag.scale(3)) == (1, 3)
