"""Truncated power-series arithmetic over Z_ell: the ring Lambda = Z_ell[[T]]
cut off at (ell**prec, T**order).

Provides the cyclotomic polynomials omega_n = (1+T)**(ell**n) - 1 and their
quotients, Weierstrass preparation (f = ell**mu * P * U with P a
distinguished polynomial and U a unit), and determinants of presentation
matrices.  Exact integer lifts of the cyclotomic objects are exposed
separately so that downstream order computations can avoid precision
analysis entirely.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Sequence

from .padic import DEFAULT_PRECISION, require_odd_prime

__all__ = [
    "SeriesError",
    "DegreeOverflowError",
    "ZeroSeriesError",
    "PrecisionExhaustedError",
    "SingularPresentationError",
    "LambdaElem",
    "DistinguishedPoly",
    "WeierstrassFactorization",
    "omega_int",
    "omega_quotient_int",
    "cyclotomic_quotient_poly",
    "omega",
    "omega_quotient",
    "weierstrass",
    "char_poly",
    "invariants_from_charpoly",
    "divmod_poly",
]


class SeriesError(Exception):
    """Base class for series-arithmetic errors."""


class DegreeOverflowError(SeriesError):
    """A cyclotomic polynomial does not fit under the degree truncation."""


class ZeroSeriesError(SeriesError):
    """Weierstrass preparation was asked for the zero series."""


class PrecisionExhaustedError(SeriesError):
    """An operation could not be completed within the coefficient precision."""


class SingularPresentationError(SeriesError):
    """A presentation matrix has determinant zero to working precision,
    i.e. the presented module has positive free rank."""


def _default_order(n: int, ell: int) -> int:
    # enough room for omega_n plus slack for units and remainders
    return ell**n + 8


@dataclass(frozen=True)
class LambdaElem:
    """An element of Z_ell[[T]] / (ell**prec, T**order).

    ``coeffs[i]`` is the coefficient of T**i, kept as the canonical residue
    in [0, ell**prec); the tuple always has length ``order``.
    """

    ell: int
    prec: int
    order: int
    coeffs: tuple

    def __post_init__(self) -> None:
        require_odd_prime(self.ell)
        if self.prec < 1 or self.order < 1:
            raise ValueError("precision and order must be positive")
        mod = self.ell ** self.prec
        cs = tuple(int(c) % mod for c in self.coeffs[: self.order])
        cs = cs + (0,) * (self.order - len(cs))
        object.__setattr__(self, "coeffs", cs)

    # -- constructors ----------------------------------------------------

    @classmethod
    def from_ints(cls, coeffs: Iterable[int], ell: int,
                  prec: int = DEFAULT_PRECISION, order: int | None = None) -> "LambdaElem":
        cs = tuple(coeffs)
        if order is None:
            order = max(len(cs), 1)
        return cls(ell, prec, order, cs)

    @classmethod
    def zero(cls, ell: int, prec: int = DEFAULT_PRECISION, order: int = 1) -> "LambdaElem":
        return cls(ell, prec, order, ())

    @classmethod
    def one(cls, ell: int, prec: int = DEFAULT_PRECISION, order: int = 1) -> "LambdaElem":
        return cls(ell, prec, order, (1,))

    # -- ring structure ---------------------------------------------------

    def _meet(self, other: "LambdaElem") -> tuple:
        if not isinstance(other, LambdaElem):
            raise TypeError(f"cannot combine LambdaElem with {type(other).__name__}")
        if other.ell != self.ell:
            raise ValueError(f"mixed primes {self.ell} and {other.ell}")
        return min(self.prec, other.prec), min(self.order, other.order)

    def __add__(self, other: "LambdaElem") -> "LambdaElem":
        prec, order = self._meet(other)
        cs = [a + b for a, b in zip(self.coeffs, other.coeffs)]
        return LambdaElem(self.ell, prec, order, tuple(cs))

    def __sub__(self, other: "LambdaElem") -> "LambdaElem":
        prec, order = self._meet(other)
        cs = [a - b for a, b in zip(self.coeffs, other.coeffs)]
        return LambdaElem(self.ell, prec, order, tuple(cs))

    def __neg__(self) -> "LambdaElem":
        return LambdaElem(self.ell, self.prec, self.order, tuple(-c for c in self.coeffs))

    def __mul__(self, other: "LambdaElem") -> "LambdaElem":
        prec, order = self._meet(other)
        out = [0] * order
        for i, a in enumerate(self.coeffs[:order]):
            if a == 0:
                continue
            for j, b in enumerate(other.coeffs[: order - i]):
                if b:
                    out[i + j] += a * b
        return LambdaElem(self.ell, prec, order, tuple(out))

    def scale(self, k: int) -> "LambdaElem":
        return LambdaElem(self.ell, self.prec, self.order, tuple(k * c for c in self.coeffs))

    def __pow__(self, n: int) -> "LambdaElem":
        if n < 0:
            return self.inverse() ** (-n)
        result = LambdaElem.one(self.ell, self.prec, self.order)
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    @property
    def is_zero(self) -> bool:
        return all(c == 0 for c in self.coeffs)

    @property
    def is_unit(self) -> bool:
        return self.coeffs[0] % self.ell != 0

    def degree(self) -> int | None:
        """Largest index with a nonzero coefficient, or None for zero."""
        for i in range(self.order - 1, -1, -1):
            if self.coeffs[i]:
                return i
        return None

    def at_precision(self, prec: int, order: int | None = None) -> "LambdaElem":
        if prec > self.prec:
            raise ValueError("cannot increase coefficient precision of a truncated series")
        return LambdaElem(self.ell, prec, order or self.order, self.coeffs)

    def shift_down(self, k: int) -> "LambdaElem":
        """Drop the first k coefficients (divide by T**k, discarding the
        polynomial part below T**k)."""
        return LambdaElem(self.ell, self.prec, self.order, self.coeffs[k:] + (0,) * k)

    def inverse(self) -> "LambdaElem":
        """Multiplicative inverse of a unit series, term by term."""
        if not self.is_unit:
            raise PrecisionExhaustedError("series with non-unit constant term is not invertible")
        mod = self.ell ** self.prec
        c0_inv = pow(self.coeffs[0], -1, mod)
        out = [0] * self.order
        out[0] = c0_inv
        for k in range(1, self.order):
            acc = 0
            for i in range(1, k + 1):
                if self.coeffs[i]:
                    acc += self.coeffs[i] * out[k - i]
            out[k] = (-c0_inv * acc) % mod
        return LambdaElem(self.ell, self.prec, self.order, tuple(out))

    def min_valuation(self) -> int:
        """Smallest ell-adic valuation over all coefficients (prec if zero)."""
        best = self.prec
        for c in self.coeffs:
            if c == 0:
                continue
            v, rest = 0, c
            while rest % self.ell == 0:
                rest //= self.ell
                v += 1
            best = min(best, v)
            if best == 0:
                break
        return best

    def __repr__(self) -> str:
        terms = []
        for i, c in enumerate(self.coeffs):
            if c == 0:
                continue
            if i == 0:
                terms.append(str(c))
            else:
                head = "" if c == 1 else f"{c}*"
                terms.append(f"{head}T^{i}" if i > 1 else f"{head}T")
        body = " + ".join(terms) or "0"
        return f"({body}) + O({self.ell}^{self.prec}, T^{self.order})"

    def to_json_list(self) -> list:
        return [str(c) for c in self.coeffs]


@dataclass(frozen=True)
class DistinguishedPoly:
    """A monic integer polynomial whose non-leading coefficients are all
    divisible by ell.  Degree 0 (the constant 1) is allowed and acts as a
    neutral factor."""

    ell: int
    coeffs: tuple  # low to high, exact integers, leading coefficient 1

    def __post_init__(self) -> None:
        require_odd_prime(self.ell)
        cs = tuple(int(c) for c in self.coeffs)
        if not cs or cs[-1] != 1:
            raise ValueError("distinguished polynomial must be monic")
        for c in cs[:-1]:
            if c % self.ell != 0:
                raise ValueError(
                    f"coefficient {c} of a distinguished polynomial must be divisible by {self.ell}")
        object.__setattr__(self, "coeffs", cs)

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def to_lambda(self, prec: int = DEFAULT_PRECISION, order: int | None = None) -> LambdaElem:
        if order is None:
            order = max(self.degree + 1, 1)
        if self.degree >= order:
            raise DegreeOverflowError(f"degree {self.degree} does not fit below T^{order}")
        return LambdaElem.from_ints(self.coeffs, self.ell, prec, order)

    def __mul__(self, other: "DistinguishedPoly") -> "DistinguishedPoly":
        if not isinstance(other, DistinguishedPoly) or other.ell != self.ell:
            raise TypeError("can only multiply distinguished polynomials over the same prime")
        out = [0] * (len(self.coeffs) + len(other.coeffs) - 1)
        for i, a in enumerate(self.coeffs):
            for j, b in enumerate(other.coeffs):
                out[i + j] += a * b
        return DistinguishedPoly(self.ell, tuple(out))

    def __repr__(self) -> str:
        return f"DistinguishedPoly({_poly_str(self.coeffs)}, ell={self.ell})"


def _poly_str(coeffs: Sequence[int]) -> str:
    terms = []
    for i in range(len(coeffs) - 1, -1, -1):
        c = coeffs[i]
        if c == 0:
            continue
        if i == 0:
            terms.append(str(c))
        elif i == 1:
            terms.append("T" if c == 1 else f"{c}*T")
        else:
            terms.append(f"T^{i}" if c == 1 else f"{c}*T^{i}")
    return " + ".join(terms) or "0"


@dataclass(frozen=True)
class WeierstrassFactorization:
    """f = ell**mu * poly * unit, valid modulo (ell**(prec of unit + mu), T**order)."""

    mu: int
    poly: DistinguishedPoly
    unit: LambdaElem

    @property
    def lam(self) -> int:
        return self.poly.degree


# ---------------------------------------------------------------------------
# Cyclotomic polynomials omega_n and quotients (exact integer layer)
# ---------------------------------------------------------------------------


def omega_int(n: int, ell: int) -> tuple:
    """Exact integer coefficients of omega_n / T, low to high.

    omega_n = (1+T)**(ell**n) - 1 has zero constant term, so dividing by T
    loses nothing; quotients omega_n/omega_d are then plain polynomial
    divisions of these reduced forms (the T factors cancel).
    """
    require_odd_prime(ell)
    if n < 0:
        raise ValueError("layer index must be nonnegative")
    q = ell**n
    return tuple(math.comb(q, i) for i in range(1, q + 1))


def divmod_poly(num: Sequence[int], den: Sequence[int], modulus: int | None = None) -> tuple:
    """Long division of coefficient lists (low to high) by a monic divisor.

    Exact over the integers when modulus is None, otherwise over
    Z/modulus.  Returns (quotient, remainder) with deg r < deg den.
    """
    den = list(den)
    while den and den[-1] == 0:
        den.pop()
    if not den:
        raise ZeroDivisionError("division by the zero polynomial")
    if den[-1] != 1:
        raise ValueError("divisor must be monic")
    rem = list(num)
    d = len(den) - 1
    quo = [0] * max(len(rem) - d, 0)
    for k in range(len(rem) - 1, d - 1, -1):
        c = rem[k] % modulus if modulus else rem[k]
        if c:
            quo[k - d] = c
            for i, dc in enumerate(den):
                rem[k - d + i] -= c * dc
                if modulus:
                    rem[k - d + i] %= modulus
    rem = rem[:d] if d else []
    if modulus:
        rem = [r % modulus for r in rem]
    return tuple(quo), tuple(rem)


def omega_quotient_int(n: int, d: int, ell: int) -> tuple:
    """Exact integer coefficients of omega_n / omega_d, with the zero
    remainder verified rather than assumed."""
    if not 0 <= d <= n:
        raise ValueError(f"need n >= d >= 0, got n={n}, d={d}")
    if n == d:
        return (1,)
    quo, rem = divmod_poly(omega_int(n, ell), omega_int(d, ell))
    if any(rem):
        raise ArithmeticError("omega_d does not divide omega_n")  # pragma: no cover
    return quo


def cyclotomic_quotient_poly(n: int, d: int, ell: int) -> DistinguishedPoly:
    """omega_n / omega_d as a distinguished polynomial (exact integers)."""
    return DistinguishedPoly(ell, omega_quotient_int(n, d, ell))


def omega(n: int, ell: int, prec: int = DEFAULT_PRECISION,
          order: int | None = None) -> LambdaElem:
    """omega_n = (1+T)**(ell**n) - 1 reduced into the truncated ring."""
    require_odd_prime(ell)
    if order is None:
        order = _default_order(n, ell)
    if ell**n + 1 > order:
        raise DegreeOverflowError(
            f"omega_{n} has degree {ell**n}, which does not fit below T^{order}")
    return LambdaElem.from_ints((0,) + omega_int(n, ell), ell, prec, order)


def omega_quotient(n: int, d: int, ell: int, prec: int = DEFAULT_PRECISION,
                   order: int | None = None) -> LambdaElem:
    """omega_n / omega_d in the truncated ring (exact division, verified)."""
    if order is None:
        order = _default_order(n, ell)
    if ell**n + 1 > order:
        raise DegreeOverflowError(
            f"omega_{n} has degree {ell**n}, which does not fit below T^{order}")
    return LambdaElem.from_ints(omega_quotient_int(n, d, ell), ell, prec, order)


# ---------------------------------------------------------------------------
# Weierstrass preparation
# ---------------------------------------------------------------------------


def weierstrass(f: LambdaElem) -> WeierstrassFactorization:
    """Factor f as ell**mu * P * U with P distinguished and U a unit.

    mu is the minimum coefficient valuation; after pulling out ell**mu the
    Weierstrass degree lam is the first unit-coefficient index.  The unit is
    found by the classical division iteration q -> V^{-1} * tau(T^lam - q*P0),
    which contracts by a factor of ell per step because the low part P0 of
    the normalized series has all coefficients divisible by ell; prec - mu
    iterations therefore determine q exactly at the reduced precision.

    P and U are only determined modulo ell**(prec - mu); P is returned with
    canonically lifted integer coefficients at that precision.
    """
    if f.is_zero:
        raise ZeroSeriesError("the zero series has no Weierstrass factorization")
    mu = f.min_valuation()
    prec = f.prec - mu
    scale = f.ell**mu
    g = LambdaElem(f.ell, prec, f.order, tuple(c // scale for c in f.coeffs))
    lam = next(i for i, c in enumerate(g.coeffs) if c % f.ell != 0)

    low = LambdaElem(f.ell, prec, f.order, g.coeffs[:lam])          # P0: everything below T^lam
    v = g.shift_down(lam)                                           # unit part: g = P0 + T^lam * V
    v_inv = v.inverse()
    t_lam = LambdaElem(f.ell, prec, f.order, (0,) * lam + (1,))

    q = v_inv
    for _ in range(prec):
        q = v_inv * (t_lam - q * low).shift_down(lam)
    remainder = t_lam - q * g
    if any(remainder.coeffs[lam:]) or any(c % f.ell for c in remainder.coeffs[:lam]):
        raise PrecisionExhaustedError(
            "Weierstrass division failed to converge at this precision")  # pragma: no cover
    poly = DistinguishedPoly(
        f.ell, tuple((-c) % f.ell**prec for c in remainder.coeffs[:lam]) + (1,))
    unit = q.inverse()
    if poly.to_lambda(prec, f.order) * unit != g:
        raise PrecisionExhaustedError(
            "Weierstrass round-trip check failed")  # pragma: no cover
    return WeierstrassFactorization(mu, poly, unit)


# ---------------------------------------------------------------------------
# Determinants of presentation matrices
# ---------------------------------------------------------------------------


def char_poly(matrix: Sequence[Sequence[LambdaElem]]) -> LambdaElem:
    """Determinant of a square matrix over the truncated ring, by minor
    expansion memoized on column subsets.

    Expansion is division-free, which matters here: the ring is local, so
    elimination would routinely hit non-unit pivots.  A zero determinant
    means the presented module has positive free rank and is rejected.
    """
    rows = [list(row) for row in matrix]
    r = len(rows)
    if r == 0 or any(len(row) != r for row in rows):
        raise ValueError("presentation matrix must be square and nonempty")
    ell = rows[0][0].ell
    prec = min(e.prec for row in rows for e in row)
    order = min(e.order for row in rows for e in row)
    for row in rows:
        for e in row:
            if e.ell != ell:
                raise ValueError("matrix entries live over different primes")

    one = LambdaElem.one(ell, prec, order)
    memo: dict = {frozenset(): one}

    def minor(cols: frozenset) -> LambdaElem:
        if cols in memo:
            return memo[cols]
        k = r - len(cols)
        total = LambdaElem.zero(ell, prec, order)
        for idx, c in enumerate(sorted(cols)):
            entry = rows[k][c]
            if entry.is_zero:
                continue
            term = entry * minor(cols - {c})
            total = total + term if idx % 2 == 0 else total - term
        memo[cols] = total
        return total

    det = minor(frozenset(range(r)))
    if det.is_zero:
        raise SingularPresentationError(
            "presentation matrix is singular to working precision")
    return det


def invariants_from_charpoly(chi: LambdaElem) -> tuple:
    """(mu, lambda) of a characteristic series, read off its Weierstrass
    factorization: mu is the power of ell pulled out, lambda the degree of
    the distinguished part."""
    fact = weierstrass(chi)
    return fact.mu, fact.lam
