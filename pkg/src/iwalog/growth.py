"""Orders of layer quotients of torsion Iwasawa modules and the growth law
that governs them.

Two deliberately independent routes compute the exponent e_n of
|M / omega_n M|:

* ``quotient_order_exponent`` works over the exact integers, via
  determinants of omega_n evaluated at companion matrices (a resultant in
  disguise) — no precision analysis at all;
* ``quotient_order_snf`` builds the quotient as linear algebra over
  Z/ell**B and reads elementary divisors off a two-sided elimination.

Their agreement is a property test, not an assumption.  On top of the
exponent sequences sit the fitting routines that recover (mu, lambda, nu)
from observed orders, the Gold-style shortcut for lambda, codescent
quotients for modules presented by a single distinguished polynomial, and
arithmetic consistency checks between families of invariants.
"""

from __future__ import annotations

from dataclasses import dataclass, fields
from typing import Optional, Sequence, Union

import sympy

from .padic import require_odd_prime
from .series import (
    DistinguishedPoly,
    LambdaElem,
    ZeroSeriesError,
    divmod_poly,
    omega_int,
    omega_quotient_int,
    weierstrass,
)

__all__ = [
    "GrowthError",
    "InfiniteQuotientError",
    "PrecisionSaturatedError",
    "InconsistentSequenceError",
    "NegativeLambdaError",
    "ElementaryModule",
    "CodescentData",
    "InvariantTriple",
    "InvariantRelations",
    "quotient_order_exponent",
    "quotient_order_snf",
    "codescent_quotient",
    "fit_invariants",
    "fit_with_known_mu",
    "gold_lambda",
    "check_relations",
    "cyclotomic_factor_difference",
]

_PRECISION_SCHEDULE = (32, 64, 128, 256, 512)
_GUARD_DIGITS = 4


class GrowthError(Exception):
    """Base class for growth-law errors."""


class InfiniteQuotientError(GrowthError):
    """The layer quotient is infinite: omega_n shares a factor with the
    module's characteristic polynomial."""


class PrecisionSaturatedError(GrowthError):
    """An elementary divisor reached the working modulus, so the computed
    exponent cannot be trusted at this precision."""


class InconsistentSequenceError(GrowthError):
    """No admissible (mu, lambda, nu) fits the observed exponents."""


class NegativeLambdaError(GrowthError):
    """A fit produced lambda < 0, which the growth law forbids."""


# ---------------------------------------------------------------------------
# Module presentations
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ElementaryModule:
    """A torsion module in elementary form: a direct sum of Lambda/(ell**m_i)
    and Lambda/(P_j) with each P_j distinguished.  No divisibility ordering
    among the P_j is required; none of the computations here need it."""

    ell: int
    ell_parts: tuple
    poly_parts: tuple

    def __post_init__(self) -> None:
        require_odd_prime(self.ell)
        parts = tuple(int(m) for m in self.ell_parts)
        if any(m < 1 for m in parts):
            raise ValueError("ell-power exponents must be >= 1")
        for p in self.poly_parts:
            if not isinstance(p, DistinguishedPoly) or p.ell != self.ell:
                raise ValueError("poly_parts must be DistinguishedPoly over the same prime")
        object.__setattr__(self, "ell_parts", parts)
        object.__setattr__(self, "poly_parts", tuple(self.poly_parts))

    @property
    def mu(self) -> int:
        return sum(self.ell_parts)

    @property
    def lam(self) -> int:
        return sum(p.degree for p in self.poly_parts)


@dataclass(frozen=True)
class CodescentData:
    """A module C = Lambda/(f) together with auxiliary layer-zero generators.

    ``aux_generators`` are coefficient vectors on the basis
    1, T, ..., T^(deg f - 1); the layer-zero submodule Y_0 is spanned by them
    together with omega_0*C, and higher layers are Y_n = (omega_n/omega_0)Y_0.
    The generators are inputs here: nothing in this package derives them.
    """

    f: DistinguishedPoly
    aux_generators: tuple = ()

    def __post_init__(self) -> None:
        gens = tuple(tuple(int(c) for c in g) for g in self.aux_generators)
        for g in gens:
            if len(g) != self.f.degree:
                raise ValueError(
                    f"generator {g} does not match the module rank {self.f.degree}")
        object.__setattr__(self, "aux_generators", gens)

    @property
    def ell(self) -> int:
        return self.f.ell


@dataclass(frozen=True)
class InvariantTriple:
    """Growth-law parameters: e_n = mu*ell**n + lambda*n + nu for n >= n0."""

    mu: int
    lambda_: int
    nu: int
    n0: int

    def astuple(self) -> tuple:
        return (self.mu, self.lambda_, self.nu, self.n0)

    def exponent_at(self, n: int, ell: int) -> int:
        return self.mu * ell**n + self.lambda_ * n + self.nu

    def to_json_dict(self) -> dict:
        return {"mu": str(self.mu), "lambda": str(self.lambda_),
                "nu": str(self.nu), "n0": str(self.n0)}


@dataclass(frozen=True)
class InvariantRelations:
    """A record of whichever invariants of one arithmetic situation are
    known: the classical pair (mu, lambda), its prime-to-ell and wild parts,
    the logarithmic pair (mu_tilde, lambda_tilde), and the compositum
    variants (starred).  All fields optional; checks skip missing operands."""

    mu: Optional[int] = None
    lambda_: Optional[int] = None
    mu_prime: Optional[int] = None
    lambda_prime: Optional[int] = None
    mu_ell: Optional[int] = None
    lambda_ell: Optional[int] = None
    mu_tilde: Optional[int] = None
    lambda_tilde: Optional[int] = None
    lambda_tilde_ell: Optional[int] = None
    mu_star: Optional[int] = None
    lambda_star: Optional[int] = None

    @classmethod
    def from_dict(cls, data: dict) -> "InvariantRelations":
        kwargs = {}
        for key, value in data.items():
            field = "lambda_" if key == "lambda" else key
            if field not in cls._field_names():
                raise ValueError(f"unknown invariant name {key!r}")
            kwargs[field] = int(value)
        return cls(**kwargs)

    @classmethod
    def _field_names(cls) -> frozenset:
        return frozenset(f.name for f in fields(cls))

    def as_dict(self) -> dict:
        out = {}
        for f in fields(self):
            value = getattr(self, f.name)
            if value is not None:
                out["lambda" if f.name == "lambda_" else f.name] = value
        return out


# ---------------------------------------------------------------------------
# Small exact-integer matrix helpers
# ---------------------------------------------------------------------------


def _companion(poly: DistinguishedPoly) -> list:
    """Matrix of multiplication by T on the basis 1, T, ..., T^(deg-1)."""
    r = poly.degree
    mat = [[0] * r for _ in range(r)]
    for j in range(r - 1):
        mat[j + 1][j] = 1
    for i in range(r):
        mat[i][r - 1] = -poly.coeffs[i]
    return mat


def _mat_mul(a: list, b: list, mod: int | None = None) -> list:
    n = len(a)
    out = [[0] * n for _ in range(n)]
    for i in range(n):
        ai = a[i]
        oi = out[i]
        for k in range(n):
            x = ai[k]
            if x:
                bk = b[k]
                for j in range(n):
                    oi[j] += x * bk[j]
        if mod:
            out[i] = [v % mod for v in oi]
    return out


def _mat_pow(a: list, e: int, mod: int | None = None) -> list:
    n = len(a)
    result = [[int(i == j) for j in range(n)] for i in range(n)]
    base = [row[:] for row in a]
    while e:
        if e & 1:
            result = _mat_mul(result, base, mod)
        base = _mat_mul(base, base, mod)
        e >>= 1
    return result


def _omega_at_companion(n: int, poly: DistinguishedPoly, mod: int | None = None) -> list:
    """omega_n evaluated at the companion matrix of poly: (I+C)**(ell**n) - I."""
    r = poly.degree
    c = _companion(poly)
    for i in range(r):
        c[i][i] += 1
    power = _mat_pow(c, poly.ell**n, mod)
    for i in range(r):
        power[i][i] -= 1
        if mod:
            power[i] = [v % mod for v in power[i]]
    return power


def _poly_at_companion(coeffs: Sequence[int], poly: DistinguishedPoly,
                       mod: int | None = None) -> list:
    """Horner evaluation of an integer polynomial at the companion matrix."""
    r = poly.degree
    c = _companion(poly)
    out = [[0] * r for _ in range(r)]
    for coeff in reversed(coeffs):
        out = _mat_mul(out, c, mod)
        for i in range(r):
            out[i][i] += coeff
    if mod:
        out = [[v % mod for v in row] for row in out]
    return out


def _det_bareiss(mat: list) -> int:
    """Fraction-free determinant of an exact integer matrix."""
    n = len(mat)
    if n == 0:
        return 1
    a = [row[:] for row in mat]
    sign, prev = 1, 1
    for k in range(n - 1):
        piv = next((i for i in range(k, n) if a[i][k] != 0), None)
        if piv is None:
            return 0
        if piv != k:
            a[k], a[piv] = a[piv], a[k]
            sign = -sign
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) // prev
            a[i][k] = 0
        prev = a[k][k]
    return sign * a[n - 1][n - 1]


def _int_valuation(x: int, ell: int) -> int:
    v = 0
    while x % ell == 0:
        x //= ell
        v += 1
    return v


# ---------------------------------------------------------------------------
# Route 1: exact resultants
# ---------------------------------------------------------------------------


def quotient_order_exponent(module: ElementaryModule, n: int) -> int:
    """Exponent e_n of |M / omega_n M| via exact integer arithmetic.

    Each Lambda/(ell**m) summand contributes m*ell**n.  Each Lambda/(P)
    summand contributes the ell-valuation of Res(P, omega_n), computed as
    det((I+C_P)**(ell**n) - I) with no reduction anywhere; a zero determinant
    means omega_n and P share a factor and the quotient is infinite.
    """
    if n < 0:
        raise ValueError("layer index must be nonnegative")
    total = sum(m * module.ell**n for m in module.ell_parts)
    for poly in module.poly_parts:
        if poly.degree == 0:
            continue
        det = _det_bareiss(_omega_at_companion(n, poly))
        if det == 0:
            raise InfiniteQuotientError(
                f"omega_{n} shares a factor with {poly!r}; the quotient is infinite")
        total += _int_valuation(det, module.ell)
    return total


# ---------------------------------------------------------------------------
# Route 2: elementary divisors over Z/ell**B
# ---------------------------------------------------------------------------


def _divisor_valuations(rows: list, ell: int, prec: int) -> tuple:
    """Two-sided elimination over Z/ell**prec with minimal-valuation pivots.

    Returns (valuations, complete): ``complete`` is False when the matrix ran
    out of nonzero entries (or admissible pivots) before produciing one pivot
    per row — the caller decides between "infinite quotient" and "raise the
    working precision".
    """
    mod = ell**prec
    a = [[x % mod for x in row] for row in rows]
    nrows = len(a)
    ncols = len(a[0]) if nrows else 0
    vals: list = []
    k = 0
    while k < min(nrows, ncols):
        best, best_v = None, prec
        for i in range(k, nrows):
            for j in range(k, ncols):
                x = a[i][j]
                if x:
                    v = _int_valuation(x, ell)
                    if v < best_v:
                        best, best_v = (i, j), v
                        if v == 0:
                            break
            if best_v == 0:
                break
        if best is None or best_v > prec - _GUARD_DIGITS:
            return vals, False
        i0, j0 = best
        a[k], a[i0] = a[i0], a[k]
        for row in a:
            row[k], row[j0] = row[j0], row[k]
        unit_inv = pow(a[k][k] // ell**best_v, -1, mod)
        for i in range(k + 1, nrows):
            x = a[i][k]
            if x:
                mult = (x // ell**best_v) * unit_inv % mod
                a[i] = [(y - mult * z) % mod for y, z in zip(a[i], a[k])]
        for j in range(k + 1, ncols):
            x = a[k][j]
            if x:
                mult = (x // ell**best_v) * unit_inv % mod
                for i in range(k, nrows):
                    a[i][j] = (a[i][j] - mult * a[i][k]) % mod
        vals.append(best_v)
        k += 1
    return vals, len(vals) == nrows


def _cokernel_exponent(column_builder, exact_builder, nrows: int, ell: int,
                       prec: int | None) -> int:
    """Shared endgame for the mod-ell**B route: eliminate, escalate the
    working precision if saturated, and tell a genuinely infinite quotient
    apart from one that merely overflows the modulus."""
    schedule = (prec,) if prec is not None else _PRECISION_SCHEDULE
    rank_checked = False
    for b in schedule:
        vals, complete = _divisor_valuations(column_builder(b), ell, b)
        if complete and sum(vals) <= b - _GUARD_DIGITS:
            return sum(vals)
        if not rank_checked:
            rank_checked = True
            if sympy.Matrix(exact_builder()).rank() < nrows:
                raise InfiniteQuotientError(
                    "the relation matrix is rank-deficient; the quotient is infinite")
    raise PrecisionSaturatedError(
        f"elementary divisors exceed the working modulus {ell}^{schedule[-1]}")


def _transpose_columns(cols: list, nrows: int) -> list:
    return [[col[i] for col in cols] for i in range(nrows)]


def _codescent_columns(data: CodescentData, n: int, base_layer: int,
                       mod: int | None) -> list:
    """Relation matrix (as rows) for C/Y_n on the basis of Lambda/(f):
    one column (omega_n/omega_0)*a per auxiliary generator — computed through
    layer ``base_layer`` to exercise Y_n = (omega_n/omega_d) Y_d — plus the
    columns of omega_n at the companion matrix."""
    ell = data.ell
    r = data.f.degree
    lift = _poly_at_companion(omega_quotient_int(n, base_layer, ell), data.f, mod)
    to_base = _poly_at_companion(omega_quotient_int(base_layer, 0, ell), data.f, mod)
    w = _mat_mul(lift, to_base, mod)
    cols = []
    for gen in data.aux_generators:
        col = [sum(w[i][j] * gen[j] for j in range(r)) for i in range(r)]
        cols.append([c % mod for c in col] if mod else col)
    om = _omega_at_companion(n, data.f, mod)
    cols.extend([om[i][j] for i in range(r)] for j in range(r))
    return _transpose_columns(cols, r)


def quotient_order_snf(target: Union[ElementaryModule, CodescentData], n: int,
                       prec: int | None = None) -> int:
    """Exponent of the layer-n quotient via elementary divisors mod ell**B.

    For an ElementaryModule the quotient splits into blocks.  A
    Lambda/(ell**m) block presents as ell**m times the identity on the
    omega_n basis — already diagonal, contributing m*ell**n exactly with no
    elimination and no precision dependence.  Each Lambda/(P) block is
    omega_n at the companion matrix of P, eliminated over Z/ell**B; B starts
    at 32 and escalates when divisors saturate it, unless ``prec`` pins it.

    A CodescentData target is handled by ``codescent_quotient`` semantics
    with base layer 0.
    """
    if n < 0:
        raise ValueError("layer index must be nonnegative")
    if isinstance(target, CodescentData):
        return codescent_quotient(target, n, prec=prec)
    total = sum(m * target.ell**n for m in target.ell_parts)
    for poly in target.poly_parts:
        if poly.degree == 0:
            continue
        total += _cokernel_exponent(
            lambda b, p=poly: _omega_at_companion(n, p, p.ell**b),
            lambda p=poly: _omega_at_companion(n, p),
            poly.degree, target.ell, prec)
    return total


def codescent_quotient(data: CodescentData, n: int, base_layer: int = 0,
                       prec: int | None = None) -> int:
    """Exponent of |C / Y_n| for C = Lambda/(f) with layered submodules
    Y_n = (omega_n/omega_d) Y_d, expanded at ``base_layer`` = d.

    Because omega_0 = T, the layer-zero submodule spanned by the auxiliary
    generators and omega_0*C is already a Lambda-submodule, so its higher
    layers are plain matrix images; the quotient is read off the elementary
    divisors of [ (omega_n/omega_0)*a_i | omega_n(C_f) ].
    """
    if not 0 <= base_layer <= n:
        raise ValueError("need 0 <= base_layer <= n")
    r = data.f.degree
    if r == 0:
        return 0
    return _cokernel_exponent(
        lambda b: _codescent_columns(data, n, base_layer, data.ell**b),
        lambda: _codescent_columns(data, n, base_layer, None),
        r, data.ell, prec)


# ---------------------------------------------------------------------------
# Fitting observed exponents
# ---------------------------------------------------------------------------


def _fit_start(e: Sequence[int], ell: int, mu: int, lam: int, nu: int) -> int:
    """Smallest n0 such that every point from n0 on matches the law."""
    n0 = len(e)
    for j in range(len(e) - 1, -1, -1):
        if e[j] != mu * ell**j + lam * j + nu:
            break
        n0 = j
    return n0


def fit_invariants(e: Sequence[int], ell: int) -> InvariantTriple:
    """Recover (mu, lambda, nu, n0) from a run of exponents e_0, e_1, ....

    The trailing three points determine the parameters: mu from the second
    difference (divided by ell**(L-2) * (ell-1)**2), then lambda and nu by
    back-substitution.  When that mu is not a nonnegative integer, the
    mu = 0 fit through the last two points is tried instead — sequences
    whose mu-growth has not yet switched on look exactly linear at the end.
    Whichever admissible candidate explains the longer tail wins (the
    three-point solution on ties); n0 reports where its law starts holding.
    """
    e = [int(x) for x in e]
    if len(e) < 3:
        raise ValueError("need at least three exponents to fit all three parameters")
    require_odd_prime(ell)
    top = len(e) - 1
    d1 = e[top - 1] - e[top - 2]
    d2 = e[top] - e[top - 1]

    candidates = []
    denom = ell ** (top - 2) * (ell - 1) ** 2
    if (d2 - d1) % denom == 0:
        mu = (d2 - d1) // denom
        lam = d2 - mu * (ell**top - ell ** (top - 1))
        if mu >= 0 and lam >= 0:
            nu = e[top] - mu * ell**top - lam * top
            candidates.append((mu, lam, nu))
    if not candidates or candidates[0][0] != 0:
        if d2 >= 0:
            candidates.append((0, d2, e[top] - d2 * top))

    fits = [(mu, lam, nu, _fit_start(e, ell, mu, lam, nu)) for mu, lam, nu in candidates]
    fits = [f for f in fits if f[3] <= top - 1]
    if not fits:
        raise InconsistentSequenceError(
            f"no admissible growth law fits the tail of {e}")
    best = min(fits, key=lambda f: f[3])
    return InvariantTriple(best[0], best[1], best[2], best[3])


def fit_with_known_mu(e: Sequence[int], ell: int, mu: int,
                      stabilization_layer: int = 0) -> InvariantTriple:
    """Fit (lambda, nu) when mu is known from outside.

    ``stabilization_layer`` is the first layer at which the law is assumed
    exact; all provided points from it onward are checked and any mismatch
    is an error, never silently absorbed.
    """
    e = [int(x) for x in e]
    if len(e) < 2:
        raise ValueError("need at least two exponents to fit lambda and nu")
    require_odd_prime(ell)
    if mu < 0:
        raise ValueError("mu must be nonnegative")
    if not 0 <= stabilization_layer < len(e):
        raise ValueError("stabilization layer must index into the sequence")
    top = len(e) - 1
    lam = (e[top] - e[top - 1]) - mu * (ell**top - ell ** (top - 1))
    if lam < 0:
        raise NegativeLambdaError(
            f"difference {e[top]} - {e[top-1]} is below the mu-growth alone")
    nu = e[top] - mu * ell**top - lam * top
    for j in range(stabilization_layer, len(e)):
        if e[j] != mu * ell**j + lam * j + nu:
            raise InconsistentSequenceError(
                f"exponent e_{j} = {e[j]} violates the fitted law "
                f"{mu}*{ell}^n + {lam}*n + {nu}")
    return InvariantTriple(mu, lam, nu, stabilization_layer)


def gold_lambda(e_prime: Sequence[int], ell: int) -> Optional[int]:
    """Early read of lambda from consecutive orders: the first layer whose
    increment falls below phi(ell**n) = ell**n - ell**(n-1) has already
    reached linear growth, and that increment is lambda.  Returns None when
    no increment has dropped below the threshold yet."""
    e = [int(x) for x in e_prime]
    require_odd_prime(ell)
    for n in range(1, len(e)):
        diff = e[n] - e[n - 1]
        if diff < ell**n - ell ** (n - 1):
            return diff
    return None


# ---------------------------------------------------------------------------
# Invariant relations
# ---------------------------------------------------------------------------

_RELATIONS = (
    ("mu_star == mu_tilde", ("mu_star",), ("mu_tilde",)),
    ("lambda_star == lambda_tilde + 1", ("lambda_star",), ("lambda_tilde", 1)),
    ("mu == mu_prime + mu_ell", ("mu",), ("mu_prime", "mu_ell")),
    ("lambda == lambda_prime + lambda_ell", ("lambda_",), ("lambda_prime", "lambda_ell")),
    ("mu == mu_tilde", ("mu",), ("mu_tilde",)),
    ("lambda_tilde == lambda_prime + lambda_tilde_ell",
     ("lambda_tilde",), ("lambda_prime", "lambda_tilde_ell")),
)


def check_relations(record: InvariantRelations) -> list:
    """Evaluate every linear relation between invariants whose operands are
    all present in the record.

    Returns a list (one entry per evaluated relation) of dicts with the
    relation text, the operand values used, the two sides, and a pass flag.
    Relations with any missing operand are skipped entirely.
    """
    report = []
    for text, lhs_terms, rhs_terms in _RELATIONS:
        operands = {}
        sides = []
        ok = True
        for terms in (lhs_terms, rhs_terms):
            total = 0
            for term in terms:
                if isinstance(term, int):
                    total += term
                    continue
                value = getattr(record, term)
                if value is None:
                    ok = False
                    break
                operands["lambda" if term == "lambda_" else term] = value
                total += value
            if not ok:
                break
            sides.append(total)
        if not ok:
            continue
        actual, expected = sides
        report.append({
            "relation": text,
            "operands": operands,
            "expected": expected,
            "actual": actual,
            "pass": actual == expected,
        })
    return report


# ---------------------------------------------------------------------------
# Cyclotomic factor comparison
# ---------------------------------------------------------------------------


def _strip_trailing_zeros(coeffs: tuple) -> tuple:
    cs = list(coeffs)
    while cs and cs[-1] == 0:
        cs.pop()
    return tuple(cs)


def cyclotomic_factor_difference(chi1: LambdaElem, chi2: LambdaElem) -> Optional[list]:
    """If chi1 and chi2 agree up to a unit and a product of cyclotomic
    factors, return that product as [(level, multiplicity), ...] where level
    0 stands for omega_0 = T and level k for omega_k/omega_{k-1}.

    Equal series give []; series whose ratio is not such a product give
    None.  The comparison works on Weierstrass data, so units never matter.
    """
    if chi1.ell != chi2.ell:
        raise ValueError("series live over different primes")
    ell = chi1.ell
    try:
        w1, w2 = weierstrass(chi1), weierstrass(chi2)
    except ZeroSeriesError:
        raise ZeroSeriesError("cyclotomic comparison needs nonzero series") from None
    if w1.mu != w2.mu:
        return None
    b = min(chi1.prec, chi2.prec) - w1.mu
    mod = ell**b
    p1 = _strip_trailing_zeros(tuple(c % mod for c in w1.poly.coeffs))
    p2 = _strip_trailing_zeros(tuple(c % mod for c in w2.poly.coeffs))
    if len(p1) == len(p2):
        return [] if p1 == p2 else None
    big, small = (p1, p2) if len(p1) > len(p2) else (p2, p1)
    quo, rem = divmod_poly(big, small, mod)
    if any(rem):
        return None
    quo = _strip_trailing_zeros(tuple(c % mod for c in quo))

    factors = []
    count = 0
    while len(quo) > 1 and quo[0] == 0:
        quo = quo[1:]
        count += 1
    if count:
        factors.append((0, count))
    level = 1
    while True:
        nu = omega_quotient_int(level, level - 1, ell)
        if len(nu) > len(quo):
            break
        count = 0
        while len(quo) >= len(nu):
            q, r = divmod_poly(quo, nu, mod)
            if any(r):
                break
            quo = _strip_trailing_zeros(tuple(c % mod for c in q))
            count += 1
        if count:
            factors.append((level, count))
        level += 1
    if quo == (1,):
        return factors
    return None
