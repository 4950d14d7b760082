"""Truncated l-adic arithmetic, the Iwasawa logarithm, and logarithmic
valuations of rational numbers.

Everything here is exact: an ``PadicInt`` is a residue modulo ``ell**prec``,
and every published operation states which residue ring its output lives in.
The interesting part is the valuation theory at the *wild* prime p = ell,
where the classical valuation is replaced by a functional built from the
Iwasawa logarithm, normalized so that principal divisors of rationals have
degree zero.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator, Mapping, Union

import sympy

__all__ = [
    "DEFAULT_PRECISION",
    "PadicError",
    "NonUnitError",
    "ZeroArgumentError",
    "DegenerateAtPrecisionError",
    "PadicInt",
    "PadicValue",
    "LogDivisor",
    "require_odd_prime",
    "teichmuller",
    "iwasawa_log",
    "normalized_log",
    "deg_prime",
    "log_valuation",
    "principal_divisor",
    "divisor_degree",
]

DEFAULT_PRECISION = 32

RationalLike = Union[int, Fraction]


class PadicError(Exception):
    """Base class for the arithmetic errors raised by this module."""


class NonUnitError(PadicError):
    """An operation that needs an l-adic unit received a non-unit."""


class ZeroArgumentError(PadicError):
    """The Iwasawa logarithm (or a valuation) was asked for at zero."""


class DegenerateAtPrecisionError(PadicError):
    """A degree value vanishes to the working precision, so ratios built from
    it are meaningless at this precision."""


def require_odd_prime(ell: int) -> int:
    """Validate the structural prime.  The whole theory is developed away
    from 2 (the dyadic case needs separate treatment), so ell = 2 is refused
    outright rather than half-supported."""
    if not isinstance(ell, int) or ell < 3 or not sympy.isprime(ell):
        raise ValueError(f"ell must be an odd prime >= 3, got {ell!r}")
    return ell


def _as_fraction(x: RationalLike) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, int):
        return Fraction(x)
    raise TypeError(f"expected an integer or Fraction, got {type(x).__name__}")


@dataclass(frozen=True)
class PadicInt:
    """An element of Z_ell known modulo ell**prec.

    The canonical representative is kept in ``[0, ell**prec)``.  Arithmetic
    between operands requires equal ``ell``; mixed precisions meet at the
    smaller one, mirroring how precision actually propagates.
    """

    ell: int
    prec: int
    value: int

    def __post_init__(self) -> None:
        require_odd_prime(self.ell)
        if self.prec < 1:
            raise ValueError(f"precision must be >= 1, got {self.prec}")
        object.__setattr__(self, "value", self.value % self.modulus)

    @property
    def modulus(self) -> int:
        return self.ell ** self.prec

    @classmethod
    def from_rational(cls, x: RationalLike, ell: int, prec: int = DEFAULT_PRECISION) -> "PadicInt":
        """Embed a rational with denominator prime to ell."""
        frac = _as_fraction(x)
        require_odd_prime(ell)
        if frac.denominator % ell == 0:
            raise NonUnitError(f"{frac} has negative {ell}-adic valuation; not in Z_{ell}")
        mod = ell ** prec
        return cls(ell, prec, frac.numerator * pow(frac.denominator, -1, mod) % mod)

    # -- ring structure -------------------------------------------------

    def _coerce(self, other: Union["PadicInt", int]) -> "PadicInt":
        if isinstance(other, PadicInt):
            if other.ell != self.ell:
                raise ValueError(f"mixed primes {self.ell} and {other.ell}")
            return other
        if isinstance(other, int):
            return PadicInt(self.ell, self.prec, other)
        raise TypeError(f"cannot combine PadicInt with {type(other).__name__}")

    def __add__(self, other: Union["PadicInt", int]) -> "PadicInt":
        o = self._coerce(other)
        prec = min(self.prec, o.prec)
        return PadicInt(self.ell, prec, self.value + o.value)

    __radd__ = __add__

    def __sub__(self, other: Union["PadicInt", int]) -> "PadicInt":
        o = self._coerce(other)
        prec = min(self.prec, o.prec)
        return PadicInt(self.ell, prec, self.value - o.value)

    def __rsub__(self, other: int) -> "PadicInt":
        return self._coerce(other) - self

    def __mul__(self, other: Union["PadicInt", int]) -> "PadicInt":
        o = self._coerce(other)
        prec = min(self.prec, o.prec)
        return PadicInt(self.ell, prec, self.value * o.value)

    __rmul__ = __mul__

    def __neg__(self) -> "PadicInt":
        return PadicInt(self.ell, self.prec, -self.value)

    def __pow__(self, n: int) -> "PadicInt":
        if n < 0:
            return self.inverse() ** (-n)
        return PadicInt(self.ell, self.prec, pow(self.value, n, self.modulus))

    def __eq__(self, other: object) -> bool:
        if isinstance(other, PadicInt):
            return (self.ell, self.prec, self.value) == (other.ell, other.prec, other.value)
        if isinstance(other, int):
            return self.value == other % self.modulus
        return NotImplemented

    def __hash__(self) -> int:
        return hash((self.ell, self.prec, self.value))

    def __repr__(self) -> str:
        return f"{self.value} + O({self.ell}^{self.prec})"

    # -- valuation structure --------------------------------------------

    @property
    def is_zero(self) -> bool:
        return self.value == 0

    @property
    def is_unit(self) -> bool:
        return self.value % self.ell != 0

    def valuation(self) -> int:
        """ell-adic valuation of the representative; a zero residue returns
        ``prec`` (meaning: valuation at least prec)."""
        if self.value == 0:
            return self.prec
        v, rest = 0, self.value
        while rest % self.ell == 0:
            rest //= self.ell
            v += 1
        return v

    def inverse(self) -> "PadicInt":
        if not self.is_unit:
            raise NonUnitError(f"{self!r} is not invertible")
        return PadicInt(self.ell, self.prec, pow(self.value, -1, self.modulus))

    def decompose(self) -> "PadicValue":
        """Split into ell**v * unit.  The unit is only determined modulo
        ell**(prec - v), and is returned at that reduced precision."""
        if self.value == 0:
            raise ZeroArgumentError("cannot decompose a residue that is zero to working precision")
        v = self.valuation()
        unit = PadicInt(self.ell, self.prec - v, self.value // self.ell**v)
        return PadicValue(v, unit)

    def exact_divide(self, power: int) -> "PadicInt":
        """Divide by ell**power, which must divide the representative.
        Precision drops by ``power``."""
        if power == 0:
            return self
        if power < 0 or power >= self.prec:
            raise ValueError(f"cannot divide precision-{self.prec} value by ell^{power}")
        if self.value % self.ell**power != 0:
            raise NonUnitError(f"{self!r} is not divisible by {self.ell}^{power}")
        return PadicInt(self.ell, self.prec - power, self.value // self.ell**power)

    def to_json_dict(self) -> dict:
        return {"ell": self.ell, "prec": self.prec, "value": str(self.value)}


@dataclass(frozen=True)
class PadicValue:
    """A nonzero l-adic number written as ell**valuation * unit."""

    valuation: int
    unit: PadicInt

    def __post_init__(self) -> None:
        if not self.unit.is_unit:
            raise NonUnitError("unit part of a PadicValue must be a unit")


class LogDivisor:
    """A finite formal sum of places with PadicInt multiplicities.

    Tame places carry their classical valuations; the wild place ell carries
    the logarithm-based valuation.  Entries that are zero to working
    precision are dropped on construction.
    """

    def __init__(self, ell: int, prec: int, entries: Mapping[int, PadicInt]):
        require_odd_prime(ell)
        self.ell = ell
        self.prec = prec
        cleaned = {}
        for p, mult in sorted(entries.items()):
            if mult.ell != ell:
                raise ValueError("divisor multiplicity has mismatched prime")
            if not mult.is_zero:
                cleaned[p] = mult
        self._entries = cleaned

    def primes(self) -> tuple:
        return tuple(self._entries)

    def items(self) -> Iterator[tuple]:
        return iter(self._entries.items())

    def __getitem__(self, p: int) -> PadicInt:
        return self._entries.get(p, PadicInt(self.ell, self.prec, 0))

    def __len__(self) -> int:
        return len(self._entries)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, LogDivisor):
            return NotImplemented
        return (self.ell, self.prec, self._entries) == (other.ell, other.prec, other._entries)

    def __repr__(self) -> str:
        body = " + ".join(f"({m.value})*[{p}]" for p, m in self._entries.items()) or "0"
        return f"LogDivisor({body} mod {self.ell}^{self.prec})"

    def to_json_list(self) -> list:
        return [{"p": p, "v": str(m.value)} for p, m in self._entries.items()]


# ---------------------------------------------------------------------------
# Teichmuller lift and the Iwasawa logarithm
# ---------------------------------------------------------------------------


def teichmuller(u: PadicInt) -> PadicInt:
    """The unique (ell-1)-st root of unity congruent to u mod ell.

    Computed as the limit of u**(ell**k); after ``prec`` squarings-by-ell the
    value is an exact fixed point of x -> x**ell in the truncated ring, which
    we assert rather than trust.
    """
    if not u.is_unit:
        raise NonUnitError("Teichmuller lift needs an l-adic unit")
    mod = u.modulus
    x = u.value
    for _ in range(u.prec):
        x = pow(x, u.ell, mod)
    if pow(x, u.ell, mod) != x:
        raise ArithmeticError("Teichmuller iteration failed to stabilize")  # pragma: no cover
    return PadicInt(u.ell, u.prec, x)


def _log_one_unit(z: int, ell: int, prec: int) -> int:
    """log(1 + z) mod ell**prec for v_ell(z) >= 1, via the alternating series.

    Terms are z**n / n.  Since v(z**n/n) >= n - log_ell(n), and that bound is
    nondecreasing in n, we stop at the first index where it clears ``prec``.
    Dividing by n is done exactly: v = v_ell(n) is peeled off z**n (computed
    at precision prec+v so the quotient is still good mod ell**prec) and the
    prime-to-ell part of n is inverted.
    """
    if z % ell != 0:
        raise NonUnitError("series argument must be congruent to 1 mod ell")
    mod = ell ** prec
    total = 0
    n = 1
    while True:
        # stop once every remaining term is 0 mod ell**prec
        bound = n
        k, acc = 0, 1
        while acc * ell <= n:
            acc *= ell
            k += 1
        if bound - k >= prec:
            break
        v, m = 0, n
        while m % ell == 0:
            m //= ell
            v += 1
        power = pow(z, n, mod * ell**v)
        term = (power // ell**v) * pow(m, -1, mod) % mod
        if n % 2 == 0:
            total -= term
        else:
            total += term
        n += 1
    return total % mod


def _log_unit_residue(a: int, ell: int, prec: int) -> int:
    """Iwasawa log of a unit residue a mod ell**prec, as an integer residue."""
    mod = ell ** prec
    a %= mod
    omega = teichmuller(PadicInt(ell, prec, a)).value
    principal = a * pow(omega, -1, mod) % mod
    return _log_one_unit(principal - 1, ell, prec)


def iwasawa_log(x: Union[RationalLike, PadicInt], ell: int | None = None,
                prec: int = DEFAULT_PRECISION) -> PadicInt:
    """The branch of the l-adic logarithm with Log(ell) = 0.

    It kills roots of unity and ell itself, so on all of Q* it only sees the
    principal-unit part of its argument.  Rational input may have any
    ell-adic valuation; PadicInt input must be a unit (a truncated non-unit
    residue does not pin down its own unit part to full precision).
    """
    if isinstance(x, PadicInt):
        if ell is not None and ell != x.ell:
            raise ValueError("conflicting primes")
        if not x.is_unit:
            raise NonUnitError("Iwasawa log of a truncated non-unit is not determined; pass a rational instead")
        return PadicInt(x.ell, x.prec, _log_unit_residue(x.value, x.ell, x.prec))

    frac = _as_fraction(x)
    if frac == 0:
        raise ZeroArgumentError("Iwasawa log is undefined at 0")
    if ell is None:
        raise ValueError("ell is required for rational input")
    require_odd_prime(ell)
    num, den = abs(frac.numerator), frac.denominator
    while num % ell == 0:
        num //= ell
    while den % ell == 0:
        den //= ell
    log_num = _log_unit_residue(num, ell, prec)
    log_den = _log_unit_residue(den, ell, prec)
    return PadicInt(ell, prec, log_num - log_den)


def normalized_log(x: Union[RationalLike, PadicInt], ell: int | None = None,
                   prec: int = DEFAULT_PRECISION) -> PadicInt:
    """Iwasawa log rescaled so that 1 + ell maps to exactly 1.

    Log values of units land in ell*Z_ell and Log(1+ell) has valuation
    exactly 1, so the quotient Log(x)/Log(1+ell) is integral.  Computed at
    one guard digit and divided exactly.
    """
    if isinstance(x, PadicInt):
        ell = x.ell
        if x.prec <= prec:
            # re-run at a guard digit is impossible for truncated input
            raise ValueError("PadicInt input needs precision at least prec+1 for the normalized log")
    if ell is None:
        raise ValueError("ell is required for rational input")
    lx = iwasawa_log(x if not isinstance(x, PadicInt) else PadicInt(ell, prec + 1, x.value),
                     ell, prec + 1)
    scale = iwasawa_log(1 + ell, ell, prec + 1)
    num = lx.exact_divide(1)
    den = scale.exact_divide(1)
    return num * den.inverse()


# ---------------------------------------------------------------------------
# Degrees, logarithmic valuations, divisors
# ---------------------------------------------------------------------------


def deg_prime(p: int, ell: int, prec: int = DEFAULT_PRECISION) -> PadicInt:
    """Degree of the place p: the normalizing multiplier that makes the
    divisor of any rational sum to zero.

    For tame p this is Log(p); for the wild place it is Log(1 + ell).  A
    degree that vanishes to working precision is unusable as a normalizer,
    which is reported rather than silently returned.
    """
    require_odd_prime(ell)
    if not sympy.isprime(p):
        raise ValueError(f"{p} is not prime")
    d = iwasawa_log(1 + ell, ell, prec) if p == ell else iwasawa_log(p, ell, prec)
    if d.is_zero:
        raise DegenerateAtPrecisionError(
            f"deg({p}) is 0 mod {ell}^{prec}; increase the working precision")
    return d


def log_valuation(x: RationalLike, p: int, ell: int, prec: int = DEFAULT_PRECISION) -> PadicInt:
    """Logarithmic valuation of a nonzero rational at the place p.

    At tame places this is the classical valuation v_p(x), embedded in
    Z_ell.  At the wild place it is -Log(x)/Log(1+ell): the sign makes the
    degree of a principal divisor vanish, which is the defining property
    everything downstream relies on.
    """
    frac = _as_fraction(x)
    if frac == 0:
        raise ZeroArgumentError("valuation of 0 is undefined")
    require_odd_prime(ell)
    if not sympy.isprime(p):
        raise ValueError(f"{p} is not prime")
    if p != ell:
        v = 0
        num, den = abs(frac.numerator), frac.denominator
        while num % p == 0:
            num //= p
            v += 1
        while den % p == 0:
            den //= p
            v -= 1
        return PadicInt(ell, prec, v)
    return -normalized_log(frac, ell, prec)


def principal_divisor(x: RationalLike, ell: int, prec: int = DEFAULT_PRECISION) -> LogDivisor:
    """The logarithmic divisor of a nonzero rational.

    Tame entries are the classical valuations read off the factorization of
    numerator and denominator; the wild place gets its logarithmic
    valuation, which is generically nonzero even when ell does not divide x.
    Zero entries (to working precision) are dropped.
    """
    frac = _as_fraction(x)
    if frac == 0:
        raise ZeroArgumentError("the zero element has no divisor")
    require_odd_prime(ell)
    entries: dict[int, PadicInt] = {}
    for p, e in sympy.factorint(abs(frac.numerator)).items():
        if p != ell:
            entries[p] = PadicInt(ell, prec, e)
    for p, e in sympy.factorint(frac.denominator).items():
        if p != ell:
            entries[p] = entries.get(p, PadicInt(ell, prec, 0)) - e
    entries[ell] = log_valuation(frac, ell, ell, prec)
    return LogDivisor(ell, prec, entries)


def divisor_degree(div: LogDivisor) -> PadicInt:
    """Sum of multiplicity * deg(p) over the divisor's support.

    Principal divisors of rationals have degree 0 mod ell**prec; that is the
    product formula this module is normalized around.
    """
    total = PadicInt(div.ell, div.prec, 0)
    for p, mult in div.items():
        total = total + mult * deg_prime(p, div.ell, div.prec)
    return total
