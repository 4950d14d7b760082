"""Classical and logarithmic ramification indices of abelian extensions of
Q_p, for odd p.

An abelian local field is presented as a subgroup H of the decomposition
group D inside (Z/m)^x, the Galois group of the local cyclotomic field of
conductor dividing m.  Everything is computed on explicit element sets —
indices are literal counting, which keeps the arithmetic obviously correct
at the moduli this supports (m <= 10^4).

The logarithmic indices replace the inertia subgroup I with the smaller
torsion subgroup of I (order p-1): its fixed field is the intersection of
the cyclotomic field with the composite Z-hat cyclotomic extension of Q_p,
which is the reference tower the logarithmic theory measures against.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable

import sympy
from sympy.ntheory import n_order, primitive_root

__all__ = [
    "LocalFieldError",
    "EvenPrimeError",
    "AbelianLocalField",
    "IndexQuadruple",
    "decomposition_group",
    "inertia_group",
    "torsion_inertia_group",
    "subgroup_from_generators",
    "all_subgroups",
    "indices",
    "relative_indices",
]

MAX_MODULUS = 10_000


class LocalFieldError(Exception):
    """Base class for local-field errors."""


class EvenPrimeError(LocalFieldError):
    """p = 2 is not supported: the torsion structure of Z_2^x differs and
    the whole logarithmic theory here assumes an odd prime."""


def _validate(p: int, m: int) -> None:
    if p == 2:
        raise EvenPrimeError("p = 2 is not supported")
    if not sympy.isprime(p):
        raise ValueError(f"{p} is not prime")
    if not 1 <= m <= MAX_MODULUS:
        raise ValueError(f"modulus must be in [1, {MAX_MODULUS}], got {m}")


def _crt_pair(res1: int, mod1: int, res2: int, mod2: int) -> int:
    """x with x = res1 (mod mod1), x = res2 (mod mod2), for coprime moduli."""
    if mod1 == 1:
        return res2 % max(mod2, 1)
    if mod2 == 1:
        return res1 % mod1
    inv = pow(mod1, -1, mod2)
    return (res1 + mod1 * ((res2 - res1) * inv % mod2)) % (mod1 * mod2)


@dataclass(frozen=True)
class _GroupData:
    """Cached structure of D = <Frobenius> x inertia inside (Z/m)^x."""

    p: int
    m: int
    frobenius: int       # acts as p on the prime-to-p part, trivially on inertia
    frobenius_order: int
    inertia_gen: int
    inertia_order: int
    elements: frozenset
    inertia: frozenset
    torsion: frozenset   # the order-(p-1) subgroup of inertia


@lru_cache(maxsize=None)
def _group_data(p: int, m: int) -> _GroupData:
    _validate(p, m)
    m_prime, k = m, 0
    while m_prime % p == 0:
        m_prime //= p
        k += 1
    pk = p**k

    frob = _crt_pair(p % m_prime if m_prime > 1 else 0, m_prime, 1 % pk, pk) % m
    o1 = n_order(p, m_prime) if m_prime > 1 else 1
    if k:
        gen = _crt_pair(1 % m_prime, m_prime, primitive_root(pk), pk) % m
        o2 = pk - pk // p
    else:
        gen = 1 % m
        o2 = 1

    inertia = frozenset(pow(gen, j, m) for j in range(o2))
    elements = frozenset(pow(frob, i, m) * x % m for i in range(o1) for x in inertia)
    if k:
        torsion_gen = pow(gen, pk // p, m)
        torsion = frozenset(pow(torsion_gen, j, m) for j in range(p - 1))
    else:
        torsion = frozenset({1 % m})
    return _GroupData(p, m, frob, o1, gen, o2, elements, inertia, torsion)


def decomposition_group(p: int, m: int) -> frozenset:
    """The decomposition group of p in the cyclotomic field of conductor m,
    as an explicit subset of (Z/m)^x: the classes congruent to a power of p
    modulo the prime-to-p part of m."""
    return _group_data(p, m).elements


def inertia_group(p: int, m: int) -> frozenset:
    """The inertia subgroup: classes congruent to 1 modulo the prime-to-p
    part of m."""
    return _group_data(p, m).inertia


def torsion_inertia_group(p: int, m: int) -> frozenset:
    """The order-(p-1) subgroup of inertia.  Its fixed field is the part of
    the cyclotomic field lying in the composite Z-hat cyclotomic extension,
    so it plays the role inertia plays classically, on the logarithmic side."""
    return _group_data(p, m).torsion


@dataclass(frozen=True)
class AbelianLocalField:
    """An abelian extension of Q_p cut out of the conductor-m cyclotomic
    field: the fixed field of ``subgroup`` ⊆ decomposition group."""

    p: int
    m: int
    subgroup: frozenset

    def __post_init__(self) -> None:
        data = _group_data(self.p, self.m)
        h = frozenset(int(x) % self.m for x in self.subgroup)
        if not h or not h <= data.elements:
            raise ValueError("subgroup must be a nonempty subset of the decomposition group")
        for a in h:
            for b in h:
                if a * b % self.m not in h:
                    raise ValueError(f"{set(h)} is not closed under multiplication mod {self.m}")
        object.__setattr__(self, "subgroup", h)

    @property
    def degree(self) -> int:
        return len(_group_data(self.p, self.m).elements) // len(self.subgroup)


@dataclass(frozen=True)
class IndexQuadruple:
    """Ramification e, residue degree f, and their logarithmic counterparts."""

    e: int
    f: int
    e_log: int
    f_log: int

    def __post_init__(self) -> None:
        if min(self.e, self.f, self.e_log, self.f_log) < 1:
            raise ValueError("indices must be positive")

    def to_json_dict(self) -> dict:
        return {"e": str(self.e), "f": str(self.f),
                "e_log": str(self.e_log), "f_log": str(self.f_log)}


def subgroup_from_generators(p: int, m: int, generators: Iterable[int]) -> frozenset:
    """Close a set of classes mod m under multiplication, inside D."""
    data = _group_data(p, m)
    seed = {int(g) % m for g in generators} | {1 % m}
    bad = seed - data.elements
    if bad:
        raise ValueError(f"generators {sorted(bad)} are outside the decomposition group")
    closure = set(seed)
    frontier = list(closure)
    while frontier:
        x = frontier.pop()
        for g in seed:
            y = x * g % m
            if y not in closure:
                closure.add(y)
                frontier.append(y)
    return frozenset(closure)


def all_subgroups(p: int, m: int) -> list:
    """Every subgroup of the decomposition group, as explicit element sets.

    D is a direct product of two cyclic groups (Frobenius part of order o1,
    inertia of order o2), so its subgroups are enumerated by triples
    (a, b, c): a | o1 and c | o2 give the projections, and b picks how the
    Frobenius-part generator twists into inertia, constrained so the twist
    closes up.  Each triple yields a distinct subgroup.
    """
    data = _group_data(p, m)
    o1, o2 = data.frobenius_order, data.inertia_order
    out = []
    for a in sympy.divisors(o1):
        cofactor = o1 // a
        for c in sympy.divisors(o2):
            for b in range(c):
                if (cofactor * b) % c:
                    continue
                g_mixed = pow(data.frobenius, a, m) * pow(data.inertia_gen, b, m) % m
                g_pure = pow(data.inertia_gen, c, m)
                elems = frozenset(
                    pow(g_mixed, i, m) * pow(g_pure, j, m) % m
                    for i in range(cofactor)
                    for j in range(o2 // c))
                out.append(elems)
    return out


def _product_set(h: frozenset, k: frozenset, m: int) -> frozenset:
    return frozenset(a * b % m for a in h for b in k)


def indices(field: AbelianLocalField) -> IndexQuadruple:
    """The quadruple (e, f, e_log, f_log) of the field, by counting cosets.

    e is the index of H in H*inertia; on the logarithmic side inertia is
    replaced by its torsion subgroup.  The complementary degrees f and
    f_log are what remains of [D : H].
    """
    data = _group_data(field.p, field.m)
    h = field.subgroup
    n = len(data.elements) // len(h)
    e = len(_product_set(h, data.inertia, field.m)) // len(h)
    e_log = len(_product_set(h, data.torsion, field.m)) // len(h)
    return IndexQuadruple(e, n // e, e_log, n // e_log)


def relative_indices(p: int, m: int, outer: frozenset, inner: frozenset) -> IndexQuadruple:
    """Indices of the relative extension between the fixed fields of two
    nested subgroups (inner ⊆ outer: the inner subgroup fixes the larger
    field).  The reference subgroups are cut down to the outer group, since
    the base field's own towers are what the relative indices measure."""
    if not inner <= outer:
        raise ValueError("inner subgroup must be contained in the outer one")
    data = _group_data(p, m)
    n = len(outer) // len(inner)
    e = len(_product_set(inner, outer & data.inertia, m)) // len(inner)
    e_log = len(_product_set(inner, outer & data.torsion, m)) // len(inner)
    return IndexQuadruple(e, n // e, e_log, n // e_log)
