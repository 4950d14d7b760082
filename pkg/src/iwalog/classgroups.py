"""Class groups of imaginary quadratic fields via reduced binary quadratic
forms, as an independent desk-scale oracle.

The objects of interest downstream are the ell-part of the class group and
its quotient by the subgroup generated by the classes of primes above ell
(split: a conjugate pair; ramified: one class; inert: none).  Everything is
computed by exhaustive element arithmetic — enumeration of reduced forms,
Gauss composition, brute-force order analysis — which is entirely adequate
for the class numbers that occur here and keeps the oracle independent of
any number-theory package's class-group machinery.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import isqrt
from typing import Iterable, Optional

import sympy
from sympy.ntheory.residue_ntheory import sqrt_mod

from .padic import require_odd_prime

__all__ = [
    "ClassGroupError",
    "NotSquarefreeError",
    "PositiveDError",
    "QuadForm",
    "AbelianLGroup",
    "ClassGroup",
    "class_group",
    "primes_above_ell_classes",
    "cl_prime",
]

MAX_ABS_DISCRIMINANT = 10**6


class ClassGroupError(Exception):
    """Base class for form/class-group errors."""


class NotSquarefreeError(ClassGroupError):
    """The field label d must be squarefree."""


class PositiveDError(ClassGroupError):
    """Only imaginary quadratic fields (d < 0) are supported by the oracle."""


@dataclass(frozen=True)
class QuadForm:
    """A positive-definite integral binary quadratic form a x^2 + b xy + c y^2."""

    a: int
    b: int
    c: int

    def __post_init__(self) -> None:
        if self.a <= 0:
            raise ValueError("form must have a > 0")
        if self.discriminant >= 0:
            raise ValueError("form must be positive definite (negative discriminant)")

    @property
    def discriminant(self) -> int:
        return self.b * self.b - 4 * self.a * self.c

    @property
    def is_reduced(self) -> bool:
        ok = abs(self.b) <= self.a <= self.c
        if ok and (abs(self.b) == self.a or self.a == self.c):
            ok = self.b >= 0
        return ok

    def reduced(self) -> "QuadForm":
        """The unique reduced representative of this form's class."""
        a, b, c = self.a, self.b, self.c
        while True:
            if c < a:
                a, b, c = c, -b, a
                continue
            if b > a or b <= -a:
                r = b % (2 * a)
                if r > a:
                    r -= 2 * a
                c += (r * r - b * b) // (4 * a)
                b = r
                continue
            break
        if b < 0 and a == c:
            b = -b
        return QuadForm(a, b, c)

    def inverse(self) -> "QuadForm":
        return QuadForm(self.a, -self.b, self.c).reduced()


def principal_form(disc: int) -> QuadForm:
    if disc % 4 == 0:
        return QuadForm(1, 0, -disc // 4)
    if disc % 4 == 1:
        return QuadForm(1, 1, (1 - disc) // 4)
    raise ValueError(f"{disc} is not a discriminant")


def compose(f1: QuadForm, f2: QuadForm) -> QuadForm:
    """Gauss composition of two forms of the same discriminant, reduced.

    This is the classical gcd-based composition: after aligning the forms,
    solve for the shift r that makes the product form integral, giving the
    composite (a1*a2/d1^2, ...).
    """
    if f1.discriminant != f2.discriminant:
        raise ValueError("forms must share a discriminant")
    if f1.a > f2.a:
        f1, f2 = f2, f1
    a1, b1, c1 = f1.a, f1.b, f1.c
    a2, b2, c2 = f2.a, f2.b, f2.c
    s = (b1 + b2) // 2
    n = b2 - s
    if a2 % a1 == 0:
        y1, d = 0, a1
    else:
        u, _, g = sympy.gcdex(a2, a1)
        y1, d = int(u), int(g)
    if s % d == 0:
        x2, y2, d1 = 0, -1, d
    else:
        u, v, g = sympy.gcdex(s, d)
        x2, y2, d1 = int(u), -int(v), int(g)
    v1 = a1 // d1
    v2 = a2 // d1
    r = (y1 * y2 * n - x2 * c2) % v1
    a3 = v1 * v2
    b3 = b2 + 2 * v2 * r
    c3 = (c2 * d1 + r * (b2 + v2 * r)) // v1
    return QuadForm(a3, b3, c3).reduced()


def _enumerate_reduced(disc: int) -> list:
    """All reduced forms of a negative discriminant."""
    forms = []
    b = disc & 1
    while b * b <= -disc // 3:
        n4 = b * b - disc
        if n4 % 4 == 0:
            n = n4 // 4
            a = max(b, 1)
            while a * a <= n:
                if n % a == 0:
                    c = n // a
                    forms.append(QuadForm(a, b, c))
                    if 0 < b < a < c:
                        forms.append(QuadForm(a, -b, c))
                a += 1
        b += 2
    return sorted(forms, key=lambda f: (f.a, f.b, f.c))


@dataclass(frozen=True)
class AbelianLGroup:
    """A finite abelian ell-group by invariant factors: a nonincreasing
    tuple of ell-power orders.  Empty tuple = trivial group."""

    ell: int
    factors: tuple

    def __post_init__(self) -> None:
        require_odd_prime(self.ell)
        fs = tuple(int(f) for f in self.factors)
        for prev, cur in zip(fs, fs[1:]):
            if cur > prev:
                raise ValueError("invariant factors must be nonincreasing")
        for f in fs:
            if f < self.ell or _log_int(f, self.ell) < 1:
                raise ValueError(f"{f} is not a power of {self.ell} (>= {self.ell})")
        object.__setattr__(self, "factors", fs)

    @classmethod
    def from_exponents(cls, ell: int, exponents: Iterable[int]) -> "AbelianLGroup":
        exps = sorted((int(e) for e in exponents), reverse=True)
        return cls(ell, tuple(ell**e for e in exps))

    @property
    def order_exponent(self) -> int:
        return sum(_log_int(f, self.ell) for f in self.factors)

    @property
    def order(self) -> int:
        return self.ell**self.order_exponent

    def to_list(self) -> list:
        return list(self.factors)


def _log_int(x: int, base: int) -> int:
    e = 0
    while x > 1:
        if x % base:
            return -1  # not a power; caller validates
        x //= base
        e += 1
    return e


class ClassGroup:
    """The form class group of an imaginary quadratic field, with just
    enough element arithmetic to dissect its ell-part."""

    def __init__(self, d: int):
        if not isinstance(d, int) or d >= 0:
            raise PositiveDError(f"need a negative integer, got {d}")
        if d % 4 in (0, 1):
            disc = d
        else:
            disc = 4 * d
        if abs(disc) > MAX_ABS_DISCRIMINANT:
            raise ValueError(f"|discriminant| is limited to {MAX_ABS_DISCRIMINANT}")
        if any(e > 1 for e in sympy.factorint(-d).values()):
            raise NotSquarefreeError(f"{d} is not squarefree")
        self.d = d
        self.discriminant = disc
        self.forms = tuple(_enumerate_reduced(disc))
        self.h = len(self.forms)
        self.identity = principal_form(disc)

    def power(self, form: QuadForm, n: int) -> QuadForm:
        if n < 0:
            return self.power(form.inverse(), -n)
        result = self.identity
        base = form.reduced()
        while n:
            if n & 1:
                result = compose(result, base)
            base = compose(base, base)
            n >>= 1
        return result

    def order_of(self, form: QuadForm) -> int:
        k, x = 1, form.reduced()
        while x != self.identity:
            x = compose(x, form)
            k += 1
        return k

    def ell_sylow(self, ell: int) -> frozenset:
        """The full ell-Sylow subgroup, by projecting every class."""
        require_odd_prime(ell)
        cofactor = self.h
        while cofactor % ell == 0:
            cofactor //= ell
        return frozenset(self.power(f, cofactor) for f in self.forms)

    def ell_part(self, ell: int) -> AbelianLGroup:
        """Invariant-factor shape of the ell-Sylow subgroup."""
        sylow = self.ell_sylow(ell)
        return _structure(sylow, compose, ell)

    def subgroup_generated(self, generators: Iterable[QuadForm]) -> frozenset:
        closure = {self.identity}
        frontier = [self.identity]
        gens = [g.reduced() for g in generators]
        while frontier:
            x = frontier.pop()
            for g in gens:
                y = compose(x, g)
                if y not in closure:
                    closure.add(y)
                    frontier.append(y)
        return frozenset(closure)


def _structure(elements: frozenset, op, ell: int) -> AbelianLGroup:
    """Invariant factors of a finite abelian ell-group given as an element
    set: the size of the image of the ell^i-th power map determines how
    many factors have exponent > i."""
    sizes = []
    current = set(elements)
    while len(current) > 1:
        sizes.append(_log_int(len(current), ell))
        current = {_pow_in(op, x, ell) for x in current}
    sizes.append(0)
    diffs = [sizes[i] - sizes[i + 1] for i in range(len(sizes) - 1)]
    if not diffs:
        return AbelianLGroup(ell, ())
    exponents = []
    for j in range(1, diffs[0] + 1):
        exponents.append(sum(1 for dd in diffs if dd >= j))
    return AbelianLGroup.from_exponents(ell, exponents)


def _pow_in(op, x, n: int):
    result = None
    base = x
    while n:
        if n & 1:
            result = base if result is None else op(result, base)
        base = op(base, base)
        n >>= 1
    return result


def class_group(d: int) -> ClassGroup:
    """Enumerate the form class group of Q(sqrt(d)) for squarefree d < 0."""
    return ClassGroup(d)


def primes_above_ell_classes(d: int, ell: int) -> list:
    """Classes of the primes above ell, as reduced forms of norm ell.

    Split ell gives the conjugate pair (ell, +-b, c); ramified ell gives a
    single class; inert ell gives nothing (no form of norm ell exists).
    """
    require_odd_prime(ell)
    group = ClassGroup(d)
    disc = group.discriminant
    if disc % ell == 0:
        b = 0 if disc % 2 == 0 else ell
        c = (b * b - disc) // (4 * ell)
        return [QuadForm(ell, b, c).reduced()]
    root = sqrt_mod(disc % ell, ell)
    if root is None:
        return []
    b = root if (root - disc) % 2 == 0 else root + ell
    c = (b * b - disc) // (4 * ell)
    form = QuadForm(ell, b, c)
    return [form.reduced(), form.inverse()]


def cl_prime(d: int, ell: int) -> AbelianLGroup:
    """ell-part of the class group modulo the classes of primes above ell.

    Killing the prime classes is exact on ell-parts, so the answer is the
    ell-Sylow subgroup divided by the ell-projections of the prime classes;
    the quotient's shape comes out of coset arithmetic.
    """
    group = ClassGroup(d)
    sylow = group.ell_sylow(ell)
    cofactor = group.h
    while cofactor % ell == 0:
        cofactor //= ell
    projected = [group.power(f, cofactor) for f in primes_above_ell_classes(d, ell)]
    killed = group.subgroup_generated(projected)

    def coset_id(form: QuadForm) -> tuple:
        best = None
        for t in killed:
            g = compose(form, t)
            key = (g.a, g.b, g.c)
            if best is None or key < best:
                best = key
        return best

    id_of = {form: coset_id(form) for form in sylow}
    rep_of = {}
    for form, cid in id_of.items():
        rep_of.setdefault(cid, form)
    cosets = frozenset(rep_of)

    def op(x: tuple, y: tuple) -> tuple:
        return id_of[compose(rep_of[x], rep_of[y])]

    return _structure(cosets, op, ell)
