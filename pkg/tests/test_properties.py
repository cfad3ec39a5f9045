"""Randomized invariants, 1000 cases per suite."""

import itertools

from hypothesis import HealthCheck, given, settings
from hypothesis import strategies as st

from zsf.arithmetic import length_set
from zsf.atoms import _Job, _prepare, _scan, atom_census, is_atom, known_davenport
from zsf.group import abelian, cyclic, dicyclic, dihedral
from zsf.sequence import ProductTable, Sequence

CASES = settings(max_examples=1000, deadline=None, suppress_health_check=list(HealthCheck))

GROUPS = [dihedral(3), dihedral(4), dicyclic(2), dicyclic(3), dihedral(5), cyclic(6), abelian(2, 4)]
NONABELIAN = [G for G in GROUPS if not G.is_abelian]


def sequences(groups, max_len):
    return st.sampled_from(groups).flatmap(
        lambda G: st.lists(st.integers(0, G.order - 1), max_size=max_len).map(lambda t: Sequence.from_terms(G, t))
    )


def product_one(groups, max_len):
    """Random product-one sequences: a random word followed by the inverse of its product."""
    def build(G, t):
        return Sequence.from_terms(G, t + [G.inverses[G.product(t)]])
    return st.sampled_from(groups).flatmap(
        lambda G: st.lists(st.integers(0, G.order - 1), max_size=max_len).map(lambda t: build(G, t))
    )


@CASES
@given(sequences(GROUPS, 8))
def test_dp_recurrence(S):
    G = S.group
    t = ProductTable(S)
    assert t.pi[0] == 1 << G.identity
    for r in range(1, t.size):
        want = 0
        for j, g in enumerate(t.support):
            if t.digits(r)[j]:
                for x in range(G.order):
                    if t.pi[r - t.strides[j]] >> x & 1:
                        want |= 1 << G.multiply(x, g)
        assert t.pi[r] == want
    if len(S) <= 5:
        brute = {G.product(p) for p in itertools.permutations(S.terms())} if len(S) else {G.identity}
        assert set(S.product_set()) == brute


@CASES
@given(sequences(NONABELIAN, 8))
def test_coset_confinement(S):
    G = S.group
    comm = G.commutator_subgroup()
    _, phi = G.quotient(comm)
    assert len({phi.images[x] for x in S.product_set()}) == 1


@CASES
@given(sequences(GROUPS, 8))
def test_inversion(S):
    G = S.group
    assert set(S.inverse().product_set()) == {G.inverses[x] for x in S.product_set()}


def normal_subgroups(G):
    seen = set()
    for x in range(G.order):
        N = G.generated_subgroup(G.element_set([x]))
        if N.mask not in seen and G.is_normal(N):
            seen.add(N.mask)
            yield N
    comm = G.commutator_subgroup()
    if comm.mask not in seen:
        yield comm


NORMALS = {G.label(): list(normal_subgroups(G)) for G in GROUPS}


@CASES
@given(sequences(GROUPS, 8), st.integers(0, 100))
def test_homomorphism_criterion(S, pick):
    G = S.group
    subs = NORMALS[G.label()]
    N = subs[pick % len(subs)]
    Q, phi = G.quotient(N)
    image = S.transform(phi)
    po = bool(image.product_set().mask >> Q.identity & 1)
    assert po == bool(S.product_set().mask & N.mask)


@CASES
@given(product_one([dihedral(3), dicyclic(2), cyclic(5), abelian(2, 2)], 4), st.data())
def test_superadditivity(A, data):
    G = A.group
    t = data.draw(st.lists(st.integers(0, G.order - 1), max_size=4))
    B = Sequence.from_terms(G, t + [G.inverses[G.product(t)]])
    LA, LB, LAB = length_set(A), length_set(B), length_set(A * B)
    assert {a + b for a in LA for b in LB} <= LAB.lengths


@CASES
@given(product_one([dihedral(3), dihedral(4), dicyclic(2), cyclic(5)], 9))
def test_elasticity_cap(B):
    G = B.group
    L = length_set(B)
    D = known_davenport(G)
    assert 2 * L.max <= D * L.min
    assert L.min >= 1


@CASES
@given(st.sampled_from([(dihedral(3), 4), (dihedral(3), 6), (dicyclic(2), 5), (dihedral(4), 4), (cyclic(6), 4)]),
       st.randoms(use_true_random=False))
def test_determinism_across_scheduling(case, rnd):
    """Work units finishing in any order give the same census."""
    G, length = case
    alpha, perms = _prepare(G, length, None, None)
    jobs = [_Job(G, length, alpha, perms, None, u, False, 1 << 24) for u in range(len(alpha))]
    order = list(range(len(jobs)))
    rnd.shuffle(order)
    found = []
    for i in order:
        found += _scan(jobs[i])[0]
    found.sort(key=lambda item: item[0])
    reference = atom_census(G, length)
    assert [c for c, _ in found] == [s.counts for s in reference.canonical_atoms]
    assert [Sequence(G, c) for c, _ in found] == reference.canonical_atoms


@settings(max_examples=200, deadline=None)
@given(st.integers(3, 12), st.data())
def test_smooth_progressions(n, data):
    """Sequences (n_1 g) ... (n_l g) with l >= k/2 and sum m < k <= ord(g) are g-smooth."""
    from math import gcd

    from zsf.sequence import smoothness

    G = cyclic(n)
    g = data.draw(st.sampled_from([x for x in range(1, n) if gcd(x, n) == 1]))
    k = data.draw(st.integers(2, n))
    l = data.draw(st.integers((k + 1) // 2, k))
    coeffs = [1] * l
    budget = k - 1 - l
    if budget < 0:
        return
    for _ in range(data.draw(st.integers(0, budget))):
        coeffs[data.draw(st.integers(0, l - 1))] += 1
    coeffs.sort()
    if coeffs[0] != 1:
        return
    S = Sequence.from_terms(G, [c * g % n for c in coeffs])
    m = sum(coeffs)
    assert set(S.sigma()) == {i * g % n for i in range(1, m + 1)}
    assert smoothness(S, g) is not None


@CASES
@given(sequences([cyclic(6), abelian(2, 4), abelian(3, 3), cyclic(7)], 8), st.integers(1, 8))
def test_abelian_agreement(S, n):
    if len(S):
        assert S.sigma() == S.subsequence_products()
    if 1 <= n <= len(S):
        assert S.sigma(n) == S.subsequence_products(n)


@CASES
@given(sequences([dihedral(3), dicyclic(2), cyclic(5)], 6), st.integers(0, 1000))
def test_orbit_closure(S, pick):
    G = S.group
    p = G.automorphisms[pick % len(G.automorphisms)]
    assert is_atom(S).is_atom == is_atom(S.permute(p)).is_atom


def test_duality_on_bounded_unions():
    """k in U_m iff m in U_k; both sides come from the same sequences, so this
    holds for the bounded unions too."""
    from zsf.arithmetic import unions_bounded

    for G in (dihedral(3), dicyclic(2)):
        U = {k: unions_bounded(G, k, 8).lengths for k in range(1, 9)}
        for k in U:
            for m in U:
                assert (k in U[m]) == (m in U[k])
