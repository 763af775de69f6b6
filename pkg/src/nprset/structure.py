"""Quotient maps, primary projections and the structural correspondences.

The two quotients that matter are by the torsion subgroup and by
Gamma_{p^n}, the torsion elements whose order is not divisible by p^n.  Both
are computed on the primary decomposition of the group, where they act
coordinate by coordinate: a Z/p^e factor is dropped when e < n and otherwise
reduced modulo p^(e-n+1); factors for other primes are dropped; free
coordinates pass through.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

from .certify import NprCertificate, is_npr
from .errors import (CertificationError, CollisionError, InsufficientDivisibility,
                     PreconditionError, SpecMismatchError)
from .groups import (Element, ElementSet, GroupSpec, PrimaryDecomposition, factorize,
                     is_prime, prime_power, primary_decompose)


@dataclass(frozen=True)
class QuotientMap:
    """A surjective homomorphism given by per-coordinate rules on the primary decomposition.

    ``rules[k]`` acts on coordinate k of ``decomposition.target`` and is one
    of ``("pass",)``, ``("drop",)`` or ``("reduce", modulus)``.
    """

    source: GroupSpec
    target: GroupSpec
    decomposition: PrimaryDecomposition
    rules: tuple[tuple, ...]
    kernel: str

    def apply(self, g: Element) -> Element:
        if g.spec != self.source:
            raise SpecMismatchError(f"element of {g.spec} given to a quotient of {self.source}")
        out = []
        for c, rule in zip(self.decomposition.forward(g).coords, self.rules):
            if rule[0] == "pass":
                out.append(c)
            elif rule[0] == "reduce":
                out.append(c % rule[1])
        return Element(self.target, tuple(out))

    __call__ = apply

    def to_json(self) -> dict:
        factors = ["Z"] * self.source.rank + [f"Z/{m}" for m in self.decomposition.target.torsion_orders]
        rules = []
        for k, (factor, rule) in enumerate(zip(factors, self.rules)):
            entry = {"coordinate": k, "factor": factor, "rule": rule[0]}
            if rule[0] == "reduce":
                entry["modulus"] = rule[1]
            if k >= self.source.rank:
                entry["source_coordinate"] = self.decomposition.slots[k - self.source.rank][0]
            rules.append(entry)
        return {"source": str(self.source), "target": str(self.target),
                "kernel": self.kernel, "rules": rules}


def _build(spec: GroupSpec, torsion_rule, kernel: str, keep_free: bool = True) -> QuotientMap:
    D = primary_decompose(spec)
    rules = [("pass",) if keep_free else ("drop",)] * spec.rank
    rules += [torsion_rule(p, e) for _, p, e in D.slots]
    rank = sum(1 for r in rules[: spec.rank] if r[0] == "pass")
    mods = tuple(r[1] for r in rules[spec.rank:] if r[0] == "reduce")
    return QuotientMap(spec, GroupSpec(rank, mods), D, tuple(rules), kernel)


def quotient_by_torsion(spec: GroupSpec) -> QuotientMap:
    """Gamma -> Gamma / Gamma_0: keep the free coordinates only."""
    return _build(spec, lambda p, e: ("drop",), "torsion subgroup")


def quotient_pn(spec: GroupSpec, p: int, n: int) -> QuotientMap:
    """Gamma -> Gamma / Gamma_{p^n}."""
    if not is_prime(p):
        raise PreconditionError(f"{p} is not prime")
    if n < 1:
        raise PreconditionError(f"exponent n must be at least 1, got {n}")

    def rule(q, e):
        if q != p or e < n:
            return ("drop",)
        return ("reduce", p ** (e - n + 1))

    return _build(spec, rule, f"elements of finite order not divisible by {p}^{n}")


def primary_component(spec: GroupSpec, p: int) -> QuotientMap:
    """Projection onto the p-primary torsion coordinates."""
    if not is_prime(p):
        raise PreconditionError(f"{p} is not prime")

    def rule(q, e):
        if q == p:
            return ("reduce", p ** e)
        return ("drop",)

    return _build(spec, rule, f"free part and primary parts for primes other than {p}", keep_free=False)


@dataclass(frozen=True)
class MappedSet:
    """Image of an element set under a quotient, with multiplicity."""

    images: tuple[Element, ...]
    target: GroupSpec

    @property
    def distinct(self) -> int:
        return len(set(self.images))

    @property
    def injective(self) -> bool:
        return self.distinct == len(self.images)

    def first_preimages(self, skip_identity: bool = False) -> list[int]:
        """Index of the first element reaching each distinct image, in input order."""
        seen, out = set(), []
        for i, h in enumerate(self.images):
            if h in seen or (skip_identity and h.is_identity()):
                continue
            seen.add(h)
            out.append(i)
        return out

    def image_set(self, skip_identity: bool = False) -> ElementSet:
        return ElementSet(self.target, tuple(self.images[i] for i in self.first_preimages(skip_identity)))

    def to_json(self) -> dict:
        return {"target": str(self.target), "images": [list(h.coords) for h in self.images],
                "distinct": self.distinct, "injective": self.injective}


def map_set(Q: QuotientMap, E: ElementSet) -> MappedSet:
    if E.spec != Q.source:
        raise SpecMismatchError(f"set in {E.spec} mapped by a quotient of {Q.source}")
    return MappedSet(tuple(Q.apply(g) for g in E), Q.target)


def proj_coordinate(D: PrimaryDecomposition, g: Element, i: int) -> Element:
    """The i-th coordinate of the primary decomposition of g, as an element of its factor."""
    if not 0 <= i < D.target.dim:
        raise IndexError(f"coordinate {i} out of range for {D.target}")
    h = D.forward(g)
    if i < D.target.rank:
        return Element(GroupSpec(1), (h.coords[i],))
    return Element(GroupSpec(0, (D.target.torsion_orders[i - D.target.rank],)), (h.coords[i],))


def is_p_group(spec: GroupSpec, p: int) -> bool:
    return spec.rank == 0 and all(
        (pp := prime_power(m)) is not None and pp[0] == p for m in spec.torsion_orders
    )


def _require_p_group(spec: GroupSpec, p: int):
    if not is_prime(p):
        raise PreconditionError(f"{p} is not prime")
    if not is_p_group(spec, p):
        raise PreconditionError(f"{spec} is not a {p}-group")


def power_map(E: ElementSet, p: int, n: int) -> ElementSet:
    """{p^(n-1) g : g in E}; refuses when two images coincide or one is trivial."""
    _require_p_group(E.spec, p)
    if n < 1:
        raise PreconditionError(f"exponent n must be at least 1, got {n}")
    k = p ** (n - 1)
    images = [k * g for g in E]
    seen = {}
    for i, h in enumerate(images):
        if h.is_identity():
            raise CollisionError(f"element {i} is sent to the identity, so E is not {p}^{n}-PR", (i,))
        if h in seen:
            raise CollisionError(f"elements {seen[h]} and {i} have the same image, so E is not {p}^{n}-PR",
                                 (seen[h], i))
        seen[h] = i
    return ElementSet(E.spec, tuple(images))


def _smallest_root(a: int, k: int, mod: int):
    # least x in [0, mod) with k*x = a (mod mod), or None
    g = math.gcd(k, mod)
    if a % g:
        return None
    m = mod // g
    return (a // g) * pow(k // g, -1, m) % m if m > 1 else 0


def root_map(E: ElementSet, p: int, n: int) -> ElementSet:
    """For each g the lexicographically least xi with p^(n-1) xi = g."""
    _require_p_group(E.spec, p)
    if n < 1:
        raise PreconditionError(f"exponent n must be at least 1, got {n}")
    k = p ** (n - 1)
    roots = []
    for i, g in enumerate(E):
        xi = []
        for a, m in zip(g.coords, E.spec.torsion_orders):
            x = _smallest_root(a, k, m)
            if x is None:
                raise InsufficientDivisibility(
                    f"element {i} = {list(g.coords)} has no {k}-th root in {E.spec}", i)
            xi.append(x)
        roots.append(Element(E.spec, tuple(xi)))
    return ElementSet(E.spec, tuple(roots))


@dataclass(frozen=True)
class Prop35Decomposition:
    """Primary components E_i of an N-PR torsion set, index-aligned with E.

    ``components[i][j]`` and ``residuals[j]`` are the pieces of ``E[j]``;
    the pairing f_i sends ``components[0][j]`` to ``components[i][j]``.
    """

    source: ElementSet
    primes: tuple[int, ...]
    exponents: tuple[int, ...]
    decomposition: PrimaryDecomposition
    components: tuple[ElementSet, ...]
    residual_spec: GroupSpec
    residuals: tuple[Element, ...]
    certificates: tuple[NprCertificate, ...]

    def pairing(self, i: int) -> list[tuple[int, int]]:
        return [(j, j) for j in range(len(self.source))]

    def reconstruct(self) -> list[Element]:
        D = self.decomposition
        slots = {p: D.coordinates_of(p) for p in D.primes()}
        out = []
        for j in range(len(self.source)):
            coords = [0] * D.target.dim
            for p, comp in zip(self.primes, self.components):
                for k, c in zip(slots[p], comp[j].coords):
                    coords[k] = c
            res_coords = [k for q in D.primes() if q not in self.primes for k in slots[q]]
            for k, c in zip(res_coords, self.residuals[j].coords):
                coords[k] = c
            out.append(D.inverse(Element(D.target, tuple(coords))))
        return out

    def to_json(self) -> dict:
        return {
            "primes": list(self.primes),
            "exponents": list(self.exponents),
            "components": [{"group": str(c.spec), "elements": c.coords(), "certificate": cert.to_json()}
                           for c, cert in zip(self.components, self.certificates)],
            "residual_group": str(self.residual_spec),
            "residuals": [list(b.coords) for b in self.residuals],
        }


def _subspec(D: PrimaryDecomposition, coords: Sequence[int]) -> GroupSpec:
    r = D.target.rank
    return GroupSpec(0, tuple(D.target.torsion_orders[k - r] for k in coords))


def decompose_prop35(E: ElementSet, N: int) -> Prop35Decomposition:
    """Split an N-PR torsion set into its primary components for the primes of N."""
    if any(any(g.free) for g in E):
        raise PreconditionError("every element must be torsion")
    cert = is_npr(E, N)
    if not cert.holds:
        raise CertificationError(f"E is not {N}-PR", cert)
    D = primary_decompose(E.spec)
    fac = factorize(N)
    primes = tuple(fac)
    comps, certs = [], []
    for p in primes:
        coords = D.coordinates_of(p)
        spec = _subspec(D, coords)
        Ei = ElementSet(spec, tuple(Element(spec, tuple(D.forward(g).coords[k] for k in coords)) for g in E))
        c = is_npr(Ei, p ** fac[p])
        if not c.holds:
            raise CertificationError(f"component for {p} is not {p}^{fac[p]}-PR", c)
        comps.append(Ei)
        certs.append(c)
    rest = [k for q in D.primes() if q not in fac for k in D.coordinates_of(q)]
    rspec = _subspec(D, rest)
    residuals = tuple(Element(rspec, tuple(D.forward(g).coords[k] for k in rest)) for g in E)
    return Prop35Decomposition(E, primes, tuple(fac.values()), D, tuple(comps), rspec,
                               residuals, tuple(certs))


def dimension_bound(E: ElementSet, p: int) -> tuple[int, bool]:
    """Size bound rank + #(p-power factors) for p-PR sets, and whether E respects it."""
    if not is_prime(p):
        raise PreconditionError(f"{p} is not prime")
    D = primary_decompose(E.spec)
    other = [k for q in D.primes() if q != p for k in D.coordinates_of(q)]
    for i, g in enumerate(E):
        h = D.forward(g)
        if any(h.coords[k] for k in other):
            raise PreconditionError(f"element {i} has a nontrivial component for a prime other than {p}")
    bound = E.spec.rank + len(D.coordinates_of(p))
    return bound, (not is_npr(E, p).holds) or len(E) <= bound
