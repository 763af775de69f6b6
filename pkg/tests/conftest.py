import math
import random

import pytest
from hypothesis import settings
from hypothesis import strategies as st

from nprset.groups import ElementSet, GroupSpec, canonicalize, is_prime, order


# several properties enumerate whole groups, so per-example time varies widely
settings.register_profile("nprset", deadline=None)
settings.load_profile("nprset")


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(n, text): acceptance criterion")
    config._acceptance = []


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    marker = item.get_closest_marker("criterion")
    if marker and rep.when == "call":
        item.config._acceptance.append((marker.args[0], marker.args[1], rep.outcome))


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    merged = {}
    for n, text, outcome in config._acceptance:
        ok = merged.get(n, (text, True))[1] and outcome == "passed"
        merged[n] = (text, ok)
    if not merged:
        return
    terminalreporter.section("acceptance criteria")
    for n, (text, ok) in sorted(merged.items()):
        terminalreporter.write_line(f"[{'PASS' if ok else 'FAIL'}] criterion {n:>2}: {text}")


# --- random instances -------------------------------------------------------

def random_torsion(rng, max_size=2000, max_factors=4, max_modulus=30):
    orders = []
    size = 1
    for _ in range(rng.randint(1, max_factors)):
        m = rng.randint(2, max_modulus)
        if size * m > max_size:
            break
        orders.append(m)
        size *= m
    return tuple(orders) or (rng.randint(2, max_modulus),)


def random_set(rng, spec, s, free_range=3):
    seen = []
    for _ in range(50 * (s + 1)):
        if len(seen) == s:
            break
        raw = [rng.randint(-free_range, free_range) for _ in range(spec.rank)]
        raw += [rng.randrange(m) for m in spec.torsion_orders]
        g = canonicalize(spec, raw)
        if g not in seen:
            seen.append(g)
    return ElementSet(spec, tuple(seen))


def random_p_group(rng, p, max_size=2000, max_factors=3, max_exp=4):
    orders = []
    size = 1
    for _ in range(rng.randint(1, max_factors)):
        m = p ** rng.randint(1, max_exp)
        if size * m > max_size:
            continue
        orders.append(m)
        size *= m
    return GroupSpec(0, tuple(orders) or (p,))


@pytest.fixture
def rng():
    return random.Random(20261015)


# --- hypothesis strategies --------------------------------------------------

@st.composite
def finite_specs(draw, max_size=1000, max_factors=3):
    orders = []
    size = 1
    for _ in range(draw(st.integers(1, max_factors))):
        m = draw(st.integers(2, 12))
        if size * m > max_size:
            break
        orders.append(m)
        size *= m
    return GroupSpec(0, tuple(orders) or (2,))


@st.composite
def specs(draw):
    rank = draw(st.integers(0, 2))
    torsion = draw(st.lists(st.integers(2, 12), max_size=3))
    return GroupSpec(rank, tuple(torsion))


@st.composite
def elements_of(draw, spec):
    raw = [draw(st.integers(-20, 20)) for _ in range(spec.rank)]
    raw += [draw(st.integers(0, m - 1)) for m in spec.torsion_orders]
    return canonicalize(spec, raw)


@st.composite
def element_sets(draw, spec, max_size=3):
    items = draw(st.lists(elements_of(spec), max_size=max_size, unique=True))
    return ElementSet(spec, tuple(items))


# --- independent oracles ----------------------------------------------------

def generated_subgroup(E):
    """Breadth-first closure of the subgroup generated by E (finite groups)."""
    zero = E.spec.identity()
    seen = {zero}
    frontier = [zero]
    while frontier:
        nxt = []
        for h in frontier:
            for g in E:
                k = h + g
                if k not in seen:
                    seen.add(k)
                    nxt.append(k)
        frontier = nxt
    return seen


def schreier_relations(E):
    """Relations generating the kernel of Z^s -> <E>, from a spanning tree of the Cayley graph."""
    s = len(E)
    zero = E.spec.identity()
    rep = {zero: (0,) * s}
    frontier = [zero]
    while frontier:
        nxt = []
        for h in frontier:
            for j, g in enumerate(E):
                k = h + g
                if k not in rep:
                    v = list(rep[h])
                    v[j] += 1
                    rep[k] = tuple(v)
                    nxt.append(k)
        frontier = nxt
    gens = []
    for h, v in rep.items():
        for j, g in enumerate(E):
            w = list(v)
            w[j] += 1
            gens.append(tuple(a - b for a, b in zip(w, rep[h + g])))
    return [g for g in gens if any(g)]


def divisors(n):
    return [d for d in range(1, n + 1) if n % d == 0]


def primes_upto(n):
    return [p for p in range(2, n + 1) if is_prime(p)]


def chord_bound(N):
    return 2 * math.sin(math.pi / (2 * N))


def box_relations(E):
    """Relations found by enumerating the box prod [0, o_j) one coordinate at a time.

    Prefix vectors reaching an already-seen element contribute their
    difference with the stored representative.  Every box vector reduces to
    its representative modulo these differences, so together with the
    vectors o_j e_j they generate the whole relation lattice.  A prefix whose
    element lies in an already-walked coset of <g_j> adds nothing new, which
    keeps the work proportional to |<E>| * s.
    """
    s, mods = len(E), E.spec.torsion_orders
    orders = [order(g) for g in E]
    rels = [tuple(o if k == j else 0 for k in range(s)) for j, o in enumerate(orders)]
    reps = {(0,) * len(mods): (0,) * s}
    for j, g in enumerate(E):
        walked = set()
        for h, v in list(reps.items()):
            if h in walked:
                continue
            x = h
            for a in range(orders[j]):
                walked.add(x)
                w = v[:j] + (a,) + v[j + 1:]
                if x not in reps:
                    reps[x] = w
                elif a:
                    rels.append(tuple(p - q for p, q in zip(w, reps[x])))
                x = tuple((c + d) % m for c, d, m in zip(x, g.coords, mods))
    return rels


def saturate(vectors, s):
    """HNF basis of the lattice spanned by ``vectors``, reducing each against the running basis first."""
    from nprset.lattice import IntMatrix, hnf_basis

    basis = []
    for v in vectors:
        v = list(v)
        for row in basis:
            c = next(k for k, x in enumerate(row) if x)
            q = v[c] // row[c]
            v = [a - q * b for a, b in zip(v, row)]
        if any(v):
            basis = [list(r) for r in hnf_basis(IntMatrix.of(basis + [v], s)).rows]
    return IntMatrix.of(basis, s)
