"""Finitely generated abelian groups Z^r + Z/m_1 + ... + Z/m_t and their duals.

A group is described by a :class:`GroupSpec`.  Its elements are integer
coordinate vectors whose torsion entries are kept reduced.  The dual group is
T^r + Z/m_1 + ... + Z/m_t; rational points of it are :class:`DualPoint`
objects, and the pairing between the two is :func:`eval_pair`, which returns
the exact rational q in [0, 1) standing for the circle point exp(2 pi i q).

Everything is written additively: the multiplicative power gamma^m is the
scalar multiple ``m * gamma``.

>>> G = parse_group_spec("Z/4 * Z/2 * Z/2")
>>> g = canonicalize(G, [5, 3, 0])
>>> g.coords
(1, 1, 0)
>>> order(g)
4
"""

from __future__ import annotations

import itertools
import math
import re
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Iterator, Sequence

from .errors import GroupSpecError, SpecMismatchError

INFINITE = math.inf

_FACTOR_RE = re.compile(r"^Z(?:\^(\d+)|/(\d+))?$")


@dataclass(frozen=True)
class GroupSpec:
    """The group Z^rank + Z/m_1 + ... + Z/m_t."""

    rank: int = 0
    torsion_orders: tuple[int, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "torsion_orders", tuple(int(m) for m in self.torsion_orders))
        if self.rank < 0:
            raise GroupSpecError(f"negative rank {self.rank}")
        for m in self.torsion_orders:
            if m < 2:
                raise GroupSpecError(f"modulus {m} is below 2")

    @property
    def dim(self) -> int:
        return self.rank + len(self.torsion_orders)

    @property
    def is_finite(self) -> bool:
        return self.rank == 0

    @property
    def size(self):
        """Number of elements, ``INFINITE`` when rank > 0."""
        if self.rank:
            return INFINITE
        return math.prod(self.torsion_orders)

    def identity(self) -> Element:
        return Element(self, (0,) * self.dim)

    def elements(self) -> Iterator[Element]:
        """Iterate over all elements of a finite group in lexicographic order."""
        if self.rank:
            raise GroupSpecError("cannot enumerate a group with free part")
        for coords in itertools.product(*(range(m) for m in self.torsion_orders)):
            yield Element(self, coords)

    def __str__(self):
        parts = []
        if self.rank == 1:
            parts.append("Z")
        elif self.rank > 1 or not self.torsion_orders:
            parts.append(f"Z^{self.rank}")
        parts.extend(f"Z/{m}" for m in self.torsion_orders)
        return " * ".join(parts)


def parse_group_spec(text: str) -> GroupSpec:
    """Parse strings such as ``"Z^2 * Z/4 * Z/2"`` or ``"Z/6"``.

    Free factors (``Z`` or ``Z^k``) must precede the cyclic ones.
    """
    if not isinstance(text, str):
        raise GroupSpecError("group spec must be a string")
    pieces = [p.strip() for p in text.split("*")]
    if not text.strip() or any(not p for p in pieces):
        raise GroupSpecError(f"empty factor in group spec {text!r}")
    rank = 0
    torsion = []
    for piece in pieces:
        m = _FACTOR_RE.match(piece.replace(" ", ""))
        if m is None:
            raise GroupSpecError(f"cannot parse factor {piece!r}")
        power, modulus = m.groups()
        if modulus is not None:
            if int(modulus) < 2:
                raise GroupSpecError(f"modulus {modulus} is below 2")
            torsion.append(int(modulus))
        else:
            if torsion:
                raise GroupSpecError("free factors must come before cyclic factors")
            rank += 1 if power is None else int(power)
    return GroupSpec(rank, tuple(torsion))


@dataclass(frozen=True)
class Element:
    """An element of ``spec`` with canonical (reduced) torsion coordinates."""

    spec: GroupSpec
    coords: tuple[int, ...]

    def __post_init__(self):
        coords = tuple(int(c) for c in self.coords)
        object.__setattr__(self, "coords", coords)
        if len(coords) != self.spec.dim:
            raise GroupSpecError(
                f"element has {len(coords)} coordinates, group {self.spec} needs {self.spec.dim}"
            )
        for c, m in zip(coords[self.spec.rank:], self.spec.torsion_orders):
            if not 0 <= c < m:
                raise GroupSpecError(f"torsion coordinate {c} not reduced modulo {m}")

    @property
    def free(self) -> tuple[int, ...]:
        return self.coords[: self.spec.rank]

    @property
    def torsion(self) -> tuple[int, ...]:
        return self.coords[self.spec.rank:]

    def is_identity(self) -> bool:
        return not any(self.coords)

    def __add__(self, other):
        return combine(self, other, 1)

    def __sub__(self, other):
        return combine(self, other, -1)

    def __neg__(self):
        return canonicalize(self.spec, [-c for c in self.coords])

    def __mul__(self, k: int):
        return canonicalize(self.spec, [k * c for c in self.coords])

    __rmul__ = __mul__

    def __repr__(self):
        return f"Element({list(self.coords)})"


def canonicalize(spec: GroupSpec, raw: Sequence[int]) -> Element:
    """Reduce the torsion coordinates of ``raw`` into ``[0, m_i)``."""
    raw = list(raw)
    if len(raw) != spec.dim:
        raise GroupSpecError(f"expected {spec.dim} coordinates for {spec}, got {len(raw)}")
    reduced = raw[: spec.rank] + [int(c) % m for c, m in zip(raw[spec.rank:], spec.torsion_orders)]
    return Element(spec, tuple(reduced))


def combine(a: Element, b: Element, sign: int = 1) -> Element:
    """Return ``a + sign * b``."""
    if a.spec != b.spec:
        raise SpecMismatchError(f"elements of {a.spec} and {b.spec} cannot be combined")
    if sign not in (1, -1):
        raise ValueError("sign must be +1 or -1")
    return canonicalize(a.spec, [x + sign * y for x, y in zip(a.coords, b.coords)])


def order(g: Element):
    """Order of ``g``: a positive integer, or ``INFINITE``."""
    if any(g.free):
        return INFINITE
    n = 1
    for c, m in zip(g.torsion, g.spec.torsion_orders):
        n = math.lcm(n, m // math.gcd(c, m))
    return n


@dataclass(frozen=True)
class ElementSet:
    """An ordered set of pairwise distinct elements of one group."""

    spec: GroupSpec
    elements: tuple[Element, ...] = ()

    def __post_init__(self):
        elements = tuple(self.elements)
        object.__setattr__(self, "elements", elements)
        seen = {}
        for i, g in enumerate(elements):
            if g.spec != self.spec:
                raise SpecMismatchError(f"element {i} belongs to {g.spec}, not {self.spec}")
            if g in seen:
                raise GroupSpecError(f"elements {seen[g]} and {i} coincide: {list(g.coords)}")
            seen[g] = i

    @classmethod
    def from_coords(cls, spec: GroupSpec, rows: Iterable[Sequence[int]]) -> ElementSet:
        return cls(spec, tuple(canonicalize(spec, r) for r in rows))

    def __len__(self):
        return len(self.elements)

    def __iter__(self):
        return iter(self.elements)

    def __getitem__(self, i):
        return self.elements[i]

    def subset(self, indices: Iterable[int]) -> ElementSet:
        return ElementSet(self.spec, tuple(self.elements[i] for i in indices))

    def coords(self) -> list[list[int]]:
        return [list(g.coords) for g in self.elements]


def to_unit(q) -> Fraction:
    """Reduce a rational into [0, 1)."""
    q = Fraction(q)
    return q - math.floor(q)


@dataclass(frozen=True)
class DualPoint:
    """A rational point of the dual group T^rank + Z/m_1 + ... + Z/m_t."""

    spec: GroupSpec
    free: tuple[Fraction, ...] = ()
    torsion: tuple[int, ...] = ()

    def __post_init__(self):
        free = tuple(Fraction(q) for q in self.free)
        torsion = tuple(int(y) for y in self.torsion)
        if len(free) != self.spec.rank or len(torsion) != len(self.spec.torsion_orders):
            raise GroupSpecError(f"dual point has the wrong shape for {self.spec}")
        for q in free:
            if not 0 <= q < 1:
                raise GroupSpecError(f"free coordinate {q} outside [0, 1)")
        for y, m in zip(torsion, self.spec.torsion_orders):
            if not 0 <= y < m:
                raise GroupSpecError(f"torsion coordinate {y} not reduced modulo {m}")
        object.__setattr__(self, "free", free)
        object.__setattr__(self, "torsion", torsion)

    @classmethod
    def make(cls, spec: GroupSpec, free=(), torsion=()) -> DualPoint:
        """Build a point from unreduced data."""
        return cls(
            spec,
            tuple(to_unit(q) for q in free),
            tuple(int(y) % m for y, m in zip(torsion, spec.torsion_orders)),
        )

    def __add__(self, other: DualPoint) -> DualPoint:
        if self.spec != other.spec:
            raise SpecMismatchError("dual points of different groups")
        return DualPoint.make(
            self.spec,
            [a + b for a, b in zip(self.free, other.free)],
            [a + b for a, b in zip(self.torsion, other.torsion)],
        )


def eval_pair(g: Element, x: DualPoint) -> Fraction:
    """The character value g(x), as the rational q with g(x) = exp(2 pi i q)."""
    if g.spec != x.spec:
        raise SpecMismatchError(f"element of {g.spec} paired with point of {x.spec}")
    q = sum((a * xi for a, xi in zip(g.free, x.free)), Fraction(0))
    for b, y, m in zip(g.torsion, x.torsion, g.spec.torsion_orders):
        q += Fraction(b * y, m)
    return to_unit(q)


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    d = 3
    while d * d <= n:
        if n % d == 0:
            return False
        d += 2
    return True


def factorize(n: int) -> dict[int, int]:
    """Prime factorisation by trial division, primes in increasing order."""
    if n < 1:
        raise ValueError(f"cannot factor {n}")
    out = {}
    d = 2
    while d * d <= n:
        while n % d == 0:
            out[d] = out.get(d, 0) + 1
            n //= d
        d += 1 if d == 2 else 2
    if n > 1:
        out[n] = out.get(n, 0) + 1
    return out


def prime_power(m: int):
    """Return ``(p, e)`` if ``m = p**e`` with e >= 1, else None."""
    f = factorize(m) if m > 1 else {}
    if len(f) != 1:
        return None
    return next(iter(f.items()))


def crt(residues: Sequence[int], moduli: Sequence[int]) -> int:
    """Combine residues modulo pairwise coprime moduli into one residue."""
    x, mod = 0, 1
    for r, m in zip(residues, moduli):
        t = ((r - x) * pow(mod, -1, m)) % m
        x += mod * t
        mod *= m
    return x % mod


@dataclass(frozen=True)
class PrimaryDecomposition:
    """Isomorphism from ``source`` onto its primary decomposition ``target``.

    ``slots[k] = (source_coord, p, e)`` describes the k-th torsion factor of
    ``target``: it is Z/p^e and receives ``source_coord mod p^e``.  Target
    factors are grouped by increasing prime, then by source coordinate.
    """

    source: GroupSpec
    target: GroupSpec
    slots: tuple[tuple[int, int, int], ...] = field(default=())

    def forward(self, g: Element) -> Element:
        if g.spec != self.source:
            raise SpecMismatchError(f"element of {g.spec} given to decomposition of {self.source}")
        r = self.source.rank
        tors = [g.coords[r + i] % (p ** e) for i, p, e in self.slots]
        return Element(self.target, g.free + tuple(tors))

    def inverse(self, h: Element) -> Element:
        if h.spec != self.target:
            raise SpecMismatchError(f"element of {h.spec} given to inverse of {self.target}")
        r = self.source.rank
        residues: dict[int, list[tuple[int, int]]] = {}
        for (i, p, e), v in zip(self.slots, h.coords[r:]):
            residues.setdefault(i, []).append((v, p ** e))
        tors = []
        for i in range(len(self.source.torsion_orders)):
            vals = residues.get(i, [])
            tors.append(crt([v for v, _ in vals], [m for _, m in vals]))
        return Element(self.source, h.free + tuple(tors))

    def primes(self) -> list[int]:
        return sorted({p for _, p, _ in self.slots})

    def coordinates_of(self, p: int) -> list[int]:
        """Target coordinate indices of the p-primary factors."""
        r = self.source.rank
        return [r + k for k, (_, q, _) in enumerate(self.slots) if q == p]


def primary_decompose(spec: GroupSpec) -> PrimaryDecomposition:
    """Split each Z/m into its Z/p^e factors by the Chinese remainder theorem."""
    slots = []
    for i, m in enumerate(spec.torsion_orders):
        for p, e in factorize(m).items():
            slots.append((i, p, e))
    slots.sort(key=lambda s: (s[1], s[0]))
    target = GroupSpec(spec.rank, tuple(p ** e for _, p, e in slots))
    return PrimaryDecomposition(spec, target, tuple(slots))
