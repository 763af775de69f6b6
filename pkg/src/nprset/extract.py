"""Finite-scale extraction of certified p-PR and independent subsets.

Every function here returns a subset that has been re-checked with
:func:`nprset.certify.is_npr` (or :func:`is_independent` for free-part
extractions).  None of them claims maximality; the ``trace`` on each report
records which stages ran and what they decided.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

from .certify import IndependenceCertificate, NprCertificate, is_independent, is_npr
from .errors import BoundExceeded, CertificationError, CollisionError, PreconditionError
from .groups import Element, ElementSet, GroupSpec, factorize, is_prime, order, prime_power
from .lattice import IntMatrix, hnf_basis, relation_lattice
from .structure import (is_p_group, map_set, primary_component, primary_decompose,
                        quotient_by_torsion, quotient_pn)

FREE = None


@dataclass(frozen=True)
class ExtractionReport:
    """A certified subset of the input.

    ``modulus`` is the N for which the subset is certified N-PR; 0 means the
    subset is independent with infinite-order elements, hence N-PR for all N.
    ``prime`` is the prime whose component was used, or ``FREE``.
    """

    prime: int | None
    modulus: int
    subset: ElementSet
    indices: tuple[int, ...]
    certificate: NprCertificate | IndependenceCertificate
    trace: tuple[dict, ...] = field(default=())

    def to_json(self) -> dict:
        return {
            "prime": "free" if self.prime is FREE else self.prime,
            "modulus": self.modulus,
            "indices": list(self.indices),
            "subset": self.subset.coords(),
            "certificate": self.certificate.to_json(),
            "trace": list(self.trace),
        }


def _certify(subset: ElementSet, modulus: int):
    if modulus == 0:
        cert = is_independent(subset) if len(subset) else IndependenceCertificate(True)
        if cert.holds and relation_lattice(subset).rank:
            raise CertificationError("free extraction has a nontrivial relation")
    else:
        cert = is_npr(subset, modulus)
    if not cert.holds:
        raise CertificationError(f"extracted subset failed certification for modulus {modulus}", cert)
    return cert


def _augment(E: ElementSet, chosen: Sequence[int], accept: Callable[[ElementSet], bool]) -> list[int]:
    # greedily add the remaining elements of E, in input order, while ``accept`` holds
    chosen = list(chosen)
    for i in range(len(E)):
        if i not in chosen and accept(E.subset(sorted(chosen + [i]))):
            chosen.append(i)
    return sorted(chosen)


def _report(E, prime, modulus, indices, trace) -> ExtractionReport:
    indices = tuple(sorted(indices))
    subset = E.subset(indices)
    return ExtractionReport(prime, modulus, subset, indices, _certify(subset, modulus), tuple(trace))


def _staircase(E: ElementSet) -> tuple[list[int], list[int]]:
    kept, fresh = [], []
    for i, g in enumerate(E):
        for beta, c in enumerate(g.coords):
            if c and all(E[j].coords[beta] == 0 for j in kept):
                kept.append(i)
                fresh.append(beta)
                break
    return kept, fresh


def staircase_extract(E: ElementSet, p: int) -> ExtractionReport:
    """Greedy triangular selection among elements of order p.

    An element is kept when some coordinate is nonzero on it and zero on
    every element kept before it.  The kept elements form a triangular
    system, so they are independent and therefore p-PR.
    """
    if not is_prime(p):
        raise PreconditionError(f"{p} is not prime")
    if not is_p_group(E.spec, p):
        raise PreconditionError(f"{E.spec} is not a {p}-group")
    for i, g in enumerate(E):
        if order(g) != p:
            raise PreconditionError(f"element {i} has order {order(g)}, not {p}")
    kept, fresh = _staircase(E)
    trace = [{"stage": "staircase", "kept": kept, "fresh_coordinates": fresh,
              "dropped": [i for i in range(len(E)) if i not in kept]}]
    report = _report(E, p, p, kept, trace)
    if len(report.subset) and not is_independent(report.subset).holds:
        raise CertificationError("staircase output is not independent", is_independent(report.subset))
    return report


def extract_ppr(E: ElementSet, p: int) -> ExtractionReport:
    """Certified p-PR subset of a set in a finite p-group.

    Stages: split by order class p^k and take the largest class (ties to the
    smaller k); find the largest n0 <= K with the quotient by Gamma_{p^n0}
    injective on that class; discard the coordinates where the class reaches
    order p^(n0+1); run the staircase on the resulting order-p images and
    pull back.  A final pass adds further input elements, in order, while the
    set stays p-PR.
    """
    if not is_prime(p):
        raise PreconditionError(f"{p} is not prime")
    if not is_p_group(E.spec, p):
        raise PreconditionError(f"{E.spec} is not a {p}-group")
    trace = []
    classes: dict[int, list[int]] = {}
    for i, g in enumerate(E):
        o = order(g)
        if o > 1:
            classes.setdefault(prime_power(o)[1], []).append(i)
    trace.append({"stage": "order_classes", "classes": {str(k): v for k, v in sorted(classes.items())}})
    chosen: list[int] = []
    if classes:
        K = max(sorted(classes), key=lambda k: len(classes[k]))
        EK = E.subset(classes[K])
        n0 = max(n for n in range(1, K + 1) if map_set(quotient_pn(E.spec, p, n), EK).injective)
        Q = quotient_pn(E.spec, p, n0)
        high = sorted({b for g in EK for b, (c, m) in enumerate(zip(g.coords, E.spec.torsion_orders))
                       if m // math.gcd(c, m) >= p ** (n0 + 1)})
        # target coordinate of each source coordinate that survives the quotient
        target_of, t = {}, 0
        for (src, _, _), rule in zip(Q.decomposition.slots, Q.rules):
            if rule[0] != "drop":
                target_of[src] = t
                t += 1
        keep = [target_of[b] for b in sorted(target_of) if b not in high]
        pspec = GroupSpec(0, tuple(Q.target.torsion_orders[k] for k in keep))
        projected = [Element(pspec, tuple(Q.apply(g).coords[k] for k in keep)) for g in EK]
        seen, pre = set(), []
        for j, h in enumerate(projected):
            if not h.is_identity() and h not in seen:
                seen.add(h)
                pre.append(j)
        images = ElementSet(pspec, tuple(projected[j] for j in pre))
        kept, fresh = _staircase(images)
        chosen = [classes[K][pre[j]] for j in kept]
        trace.append({"stage": "quotient", "K": K, "n0": n0, "target": str(Q.target),
                      "discarded_coordinates": high, "projected_group": str(pspec),
                      "distinct_nontrivial_images": len(images)})
        trace.append({"stage": "staircase", "kept": chosen, "fresh_coordinates": fresh})
    final = _augment(E, chosen, lambda S: is_npr(S, p).holds)
    trace.append({"stage": "augment", "added": [i for i in final if i not in chosen]})
    return _report(E, p, p, final, trace)


def _rank(vectors: Sequence[Sequence[int]], ncols: int) -> int:
    return hnf_basis(IntMatrix.of(vectors, ncols)).nrows


def _extract_free(E: ElementSet, trace: list) -> list[int]:
    Q = quotient_by_torsion(E.spec)
    chosen, vecs = [], []
    for i, g in enumerate(E):
        v = list(Q.apply(g).coords)
        if _rank(vecs + [v], Q.target.rank) > len(vecs):
            vecs.append(v)
            chosen.append(i)
    trace.append({"stage": "free_rank_greedy", "kept": chosen})
    return chosen


def _component_sizes(E: ElementSet):
    D = primary_decompose(E.spec)
    sizes = [(len(map_set(primary_component(E.spec, q), E).first_preimages(True)), q) for q in D.primes()]
    if E.spec.rank:
        sizes.append((len(map_set(quotient_by_torsion(E.spec), E).first_preimages(True)), FREE))
    return sizes


def extract_any(E: ElementSet) -> ExtractionReport:
    """Pick the primary component (or the free part) with the most distinct images and extract there."""
    if not len(E):
        return _report(E, FREE, 0, [], [{"stage": "empty"}])
    sizes = _component_sizes(E)
    trace = [{"stage": "component_sizes",
              "sizes": {("free" if q is FREE else str(q)): n for n, q in sizes}}]
    if not sizes:
        return _report(E, FREE, 0, [], trace + [{"stage": "trivial_group"}])
    best = max(n for n, _ in sizes)
    prime = next(q for n, q in sizes if n == best)
    trace.append({"stage": "choose", "component": "free" if prime is FREE else prime})
    if prime is FREE:
        chosen = _extract_free(E, trace)
        final = _augment(E, chosen, lambda S: relation_lattice(S).rank == 0)
        trace.append({"stage": "augment", "added": [i for i in final if i not in chosen]})
        return _report(E, FREE, 0, final, trace)
    M = map_set(primary_component(E.spec, prime), E)
    pre = M.first_preimages(skip_identity=True)
    inner = extract_ppr(ElementSet(M.target, tuple(M.images[i] for i in pre)), prime)
    chosen = [pre[j] for j in inner.indices]
    trace.append({"stage": "component_extraction", "prime": prime, "kept": chosen,
                  "inner_trace": list(inner.trace)})
    final = _augment(E, chosen, lambda S: is_npr(S, prime).holds)
    trace.append({"stage": "augment", "added": [i for i in final if i not in chosen]})
    return _report(E, prime, prime, final, trace)


@dataclass(frozen=True)
class CardinalityDiagnostic:
    """Image size under the quotient by Gamma_{p^n} against |E|, plus an extraction attempt.

    ``image_size == size`` is necessary for E itself to be p^n-PR; for finite
    sets it is not sufficient, and ``extraction`` supplies the constructive
    side: a certified p^n-PR subset built from the injective part of the image.
    """

    p: int
    n: int
    size: int
    image_size: int
    set_is_npr: bool
    extraction: ExtractionReport

    @property
    def condition_met(self) -> bool:
        return self.image_size == self.size

    def to_json(self) -> dict:
        return {
            "p": self.p, "n": self.n, "size": self.size, "image_size": self.image_size,
            "condition_met": self.condition_met, "set_is_npr": self.set_is_npr,
            "extraction": self.extraction.to_json(),
            "note": "finite analog: equal image size is necessary, not sufficient",
        }


def cardinality_diagnostic(E: ElementSet, p: int, n: int) -> CardinalityDiagnostic:
    if not is_prime(p):
        raise PreconditionError(f"{p} is not prime")
    N = p ** n
    Q = quotient_pn(E.spec, p, n)
    M = map_set(Q, E)
    pre = M.first_preimages(skip_identity=True)
    trace = [{"stage": "quotient", "target": str(Q.target), "image_size": M.distinct}]
    chosen: list[int] = []
    if pre:
        inner = extract_any(ElementSet(Q.target, tuple(M.images[i] for i in pre)))
        chosen = [pre[j] for j in inner.indices]
        trace.append({"stage": "image_extraction", "kept": chosen, "inner_trace": list(inner.trace)})
    final = _augment(E, chosen, lambda S: is_npr(S, N).holds)
    trace.append({"stage": "augment", "added": [i for i in final if i not in chosen]})
    report = _report(E, p, N, final, trace)
    return CardinalityDiagnostic(p, n, len(E), M.distinct, is_npr(E, N).holds, report)


def compose_npr(components: Sequence[tuple[ElementSet, int, int]],
                pairings: Sequence[Sequence[int]] | None = None) -> ElementSet:
    """Sum paired elements of primary sets J_i into one (prod p_i^m_i)-PR set.

    ``components`` holds ``(J_i, p_i, m_i)``.  ``pairings[i-1][j]`` is the
    index in J_i matched with ``J_1[j]``; the default pairs equal indices.
    """
    if not components:
        raise PreconditionError("at least one component is required")
    spec = components[0][0].spec
    primes = [p for _, p, _ in components]
    if len(set(primes)) != len(primes):
        raise PreconditionError(f"primes must be distinct, got {primes}")
    size = len(components[0][0])
    for J, p, m in components:
        if J.spec != spec:
            raise PreconditionError("all components must live in the same group")
        if not is_prime(p) or m < 1:
            raise PreconditionError(f"bad prime power {p}^{m}")
        if len(J) != size:
            raise PreconditionError(f"component sizes differ: {len(J)} != {size}")
        for i, g in enumerate(J):
            o = order(g)
            if o != 1 and (o == math.inf or (pp := prime_power(o)) is None or pp[0] != p):
                raise PreconditionError(f"element {i} of the {p}-component has order {o}")
        image = map_set(quotient_pn(spec, p, m), J)
        if not image.injective:
            raise CollisionError(f"quotient by Gamma_{{{p}^{m}}} is not injective on the {p}-component")
        cert = is_npr(image.image_set(), p)
        if not cert.holds:
            raise CertificationError(f"image of the {p}-component is not {p}-PR", cert)
    if pairings is None:
        pairings = [list(range(size)) for _ in components[1:]]
    if len(pairings) != len(components) - 1:
        raise PreconditionError("one pairing per component after the first is required")
    for perm in pairings:
        if sorted(perm) != list(range(size)):
            raise PreconditionError(f"pairing {list(perm)} is not a bijection")
    out = []
    for j in range(size):
        g = components[0][0][j]
        for (J, _, _), perm in zip(components[1:], pairings):
            g = g + J[perm[j]]
        out.append(g)
    E = ElementSet(spec, tuple(out))
    N = math.prod(p ** m for _, p, m in components)
    for _, p, m in components:
        image = map_set(quotient_pn(spec, p, m), E)
        cert = is_npr(image.image_set(), p)
        if not image.injective or not cert.holds:
            raise CertificationError(f"composed set fails the {p}^{m} condition", cert)
    cert = is_npr(E, N)
    if not cert.holds:
        raise CertificationError(f"composed set is not {N}-PR", cert)
    return E


def _max_hereditary(E: ElementSet, accept: Callable[[ElementSet], bool], limit: int) -> tuple[int, ...]:
    # depth-first search in lexicographic order of index tuples; accept() must be
    # closed under subsets so that rejected prefixes can be pruned
    if len(E) > limit:
        raise BoundExceeded(f"exhaustive search limited to {limit} elements, got {len(E)}")
    n = len(E)
    best: tuple[int, ...] = ()

    def dfs(start, current):
        nonlocal best
        if len(current) > len(best):
            best = tuple(current)
        for i in range(start, n):
            if len(current) + (n - i) <= len(best):
                break
            cand = current + [i]
            if accept(E.subset(cand)):
                dfs(i + 1, cand)

    dfs(0, [])
    return best


def max_independent_subset(E: ElementSet, limit: int = 20) -> ElementSet:
    """Largest independent subset, ties broken by the lexicographically least index set."""
    def accept(S):
        return not any(g.is_identity() for g in S) and is_independent(S).holds
    return E.subset(_max_hereditary(E, accept, limit))


def largest_npr_subset(E: ElementSet, N: int, limit: int = 64) -> ElementSet:
    """Largest N-PR subset by exhaustive search (N-PR is inherited by subsets)."""
    return E.subset(_max_hereditary(E, lambda S: is_npr(S, N).holds, limit))
