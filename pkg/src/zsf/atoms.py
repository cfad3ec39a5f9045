"""Minimal product-one sequences (atoms), Davenport constants and censuses.

Censuses enumerate multisets of a fixed length as sorted element tuples and
run three filters before the product-set DP:

1. the product of the terms in the abelianization ``G/G'`` must be trivial,
2. the tuple must be the canonical member of its automorphism orbit,
3. the sequence must be product-one with no product-one split.

The canonical member of an orbit is the one with the lexicographically least
counts vector.  For sorted element tuples that is the lexicographically
greatest tuple, which is what the inner loop compares.
"""

from __future__ import annotations

import itertools
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable

from .errors import CapacityError, DomainError
from .group import MAX_ORDER, ElementSet, FiniteGroup
from .sequence import ProductTable, Sequence, default_budget

# multisets examined per census call before giving up
DEFAULT_CANDIDATE_LIMIT = 50_000_000


@dataclass(frozen=True)
class AtomVerdict:
    is_product_one: bool
    split: tuple[Sequence, Sequence] | None
    length: int

    @property
    def is_atom(self) -> bool:
        return self.is_product_one and self.length >= 1 and self.split is None


def is_atom(seq: Sequence, budget: int | None = None) -> AtomVerdict:
    """Decide minimality; a non-minimal product-one sequence comes with a split.

    The split ``(T, S T^-1)`` uses the least-rank qualifying ``T``.
    """
    table = ProductTable(seq, budget)
    po = table.contains_identity(table.full)
    split = None
    if po and len(seq) >= 2:
        found = table.split()
        if found is not None:
            split = (table.subsequence(found[0]), table.subsequence(found[1]))
    return AtomVerdict(po, split, len(seq))


def _atom_counts(G: FiniteGroup, counts: tuple[int, ...], budget: int) -> bool:
    table = ProductTable(Sequence(G, counts), budget)
    if not table.contains_identity(table.full):
        return False
    return len(table.seq) == 1 or table.split() is None


# -- canonical forms ----------------------------------------------------------


def canonicalize(seq: Sequence, perms: Iterable[tuple[int, ...]] | None = None) -> Sequence:
    """Least counts vector over the automorphism orbit of ``seq``."""
    perms = seq.group.automorphisms if perms is None else perms
    return min((seq.permute(p) for p in perms), key=lambda s: s.counts)


def orbit(seq: Sequence, perms: Iterable[tuple[int, ...]] | None = None) -> list[Sequence]:
    perms = seq.group.automorphisms if perms is None else perms
    return sorted({seq.permute(p) for p in perms}, key=lambda s: s.counts)


def _counts(order: int, tup: tuple[int, ...]) -> tuple[int, ...]:
    c = [0] * order
    for x in tup:
        c[x] += 1
    return tuple(c)


# -- census -------------------------------------------------------------------


@dataclass(frozen=True)
class _Job:
    group: FiniteGroup
    length: int
    alphabet: tuple[int, ...]
    perms: tuple[tuple[int, ...], ...]
    constraint: tuple[int, int] | None  # (mask, minimum number of terms inside mask)
    unit: int  # index of the smallest term, or the number of terms inside the mask
    stop_at_first: bool
    budget: int


def _tuples(job: _Job):
    """Sorted element tuples belonging to one work unit."""
    alpha, length = job.alphabet, job.length
    if job.constraint is None:
        head = alpha[job.unit]
        for rest in itertools.combinations_with_replacement(alpha[job.unit:], length - 1):
            yield (head, *rest)
        return
    mask = job.constraint[0]
    inside = [x for x in alpha if mask >> x & 1]
    outside = [x for x in alpha if not mask >> x & 1]
    r = job.unit
    outs = list(itertools.combinations_with_replacement(outside, length - r))
    for a in itertools.combinations_with_replacement(inside, r):
        for b in outs:
            yield tuple(sorted(a + b))


def _scan(job: _Job) -> tuple[list[tuple[tuple[int, ...], float]], int]:
    """Canonical atoms among the tuples of one work unit."""
    G = job.group
    comm = G.commutator_subgroup()
    quo, phi = G.quotient(comm)
    cls = phi.images
    qt = quo.table
    qe = quo.identity
    ident = tuple(range(G.order))
    perms = [p for p in job.perms if p != ident]
    out = []
    seen = 0
    for t in _tuples(job):
        seen += 1
        q = qe
        for x in t:
            q = qt[q][cls[x]]
        if q != qe:
            continue
        canonical = True
        for p in perms:
            if tuple(sorted(map(p.__getitem__, t))) > t:
                canonical = False
                break
        if not canonical:
            continue
        counts = _counts(G.order, t)
        start = time.perf_counter()
        if not _atom_counts(G, counts, job.budget):
            continue
        out.append((counts, (time.perf_counter() - start) * 1e3))
        if job.stop_at_first:
            break
    return out, seen


def _run_jobs(jobs: list[_Job], workers: int) -> tuple[list[tuple[tuple[int, ...], float]], int]:
    found, seen = [], 0
    if workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            for part, n in pool.map(_scan, jobs):
                found += part
                seen += n
    else:
        for job in jobs:
            part, n = _scan(job)
            found += part
            seen += n
    found.sort(key=lambda item: item[0])
    return found, seen


def _multiset_count(k: int, length: int) -> int:
    from math import comb

    return comb(k + length - 1, length) if k else int(length == 0)


@dataclass
class CensusResult:
    """Atoms of one length, stored as orbit representatives.

    ``canonical_atoms`` holds one sequence per orbit of the automorphism
    group ``perms`` (lexicographically least counts vector), sorted by
    counts.  ``orbit_expansion`` and ``all_atoms`` expand them to literal
    sequences.
    """

    group: FiniteGroup
    length: int
    canonical_atoms: list[Sequence]
    perms: tuple[tuple[int, ...], ...] = field(repr=False)
    alphabet: tuple[int, ...] = field(repr=False, default=())
    verdict_ms: dict = field(default_factory=dict, repr=False)
    candidates_seen: int = 0

    @cached_property
    def orbit_expansion(self) -> dict[Sequence, list[Sequence]]:
        return {rep: orbit(rep, self.perms) for rep in self.canonical_atoms}

    def all_atoms(self) -> set[Sequence]:
        out: set[Sequence] = set()
        for members in self.orbit_expansion.values():
            out.update(members)
        return out

    def records(self, expand: bool = False, timings: bool = False) -> list[dict]:
        """One JSON-ready row per representative.  Timings are opt-in since
        they break byte-for-byte reproducibility."""
        rows = []
        for rep in self.canonical_atoms:
            members = self.orbit_expansion[rep]
            row = {
                "counts": list(rep.counts),
                "sequence": str(rep),
                "orbit_size": len(members),
            }
            if timings:
                row["verdict_time_ms"] = round(self.verdict_ms.get(rep.counts, 0.0), 3)
            if expand:
                row["orbit"] = [str(s) for s in members]
            rows.append(row)
        return rows


def _prepare(G: FiniteGroup, length: int, alphabet, constraint) -> tuple[tuple[int, ...], tuple]:
    if G.order > MAX_ORDER:
        raise CapacityError(f"order {G.order} exceeds {MAX_ORDER}")
    if alphabet is None:
        alpha = tuple(range(G.order))
    else:
        alpha = tuple(sorted(set(alphabet.members() if isinstance(alphabet, ElementSet) else alphabet)))
    if length >= 2:
        # an atom of length >= 2 never contains the identity
        alpha = tuple(x for x in alpha if x != G.identity)
    keep = G.element_set(alpha)
    perms = G.automorphisms_preserving(keep)
    if constraint is not None:
        cset = ElementSet(constraint[0], G.order)
        perms = tuple(p for p in perms if all(cset.mask >> p[x] & 1 for x in cset))
    return alpha, perms


def atom_census(
    G: FiniteGroup,
    length: int,
    *,
    alphabet: ElementSet | Iterable[int] | None = None,
    min_inside: tuple[ElementSet, int] | None = None,
    jobs: int = 1,
    budget: int | None = None,
    limit: int = DEFAULT_CANDIDATE_LIMIT,
    stop_at_first: bool = False,
) -> CensusResult:
    """All atoms of ``length`` with terms from ``alphabet``.

    ``min_inside=(subset, k)`` keeps only sequences with at least ``k`` terms
    from ``subset``.  Orbits are taken under the automorphisms that preserve
    the alphabet (and ``subset``), so restricted censuses stay closed.
    """
    if length < 1:
        raise DomainError("census length must be positive")
    budget = default_budget() if budget is None else budget
    constraint = None
    if min_inside is not None:
        constraint = (min_inside[0].mask, int(min_inside[1]))
    alpha, perms = _prepare(G, length, alphabet, constraint)
    total = _multiset_count(len(alpha), length)
    if total > limit:
        raise CapacityError(f"{total} multisets of length {length} exceed the limit {limit}")
    if constraint is None:
        units = range(len(alpha))
    else:
        units = range(max(constraint[1], 0), length + 1)
    work = [_Job(G, length, alpha, perms, constraint, u, stop_at_first, budget) for u in units]
    found, seen = _run_jobs(work, jobs)
    if stop_at_first:
        found = found[:1]
    reps = [Sequence(G, c) for c, _ in found]
    return CensusResult(G, length, reps, perms, alpha, {c: ms for c, ms in found}, seen)


def reference_atoms(G: FiniteGroup, length: int, alphabet: Iterable[int] | None = None) -> set[Sequence]:
    """Every atom of ``length``, by testing each multiset with no pruning."""
    alpha = tuple(range(G.order)) if alphabet is None else tuple(sorted(set(alphabet)))
    out = set()
    for t in itertools.combinations_with_replacement(alpha, length):
        s = Sequence.from_terms(G, t)
        if is_atom(s).is_atom:
            out.add(s)
    return out


def known_davenport(G: FiniteGroup) -> int | None:
    """Closed-form large Davenport constant for the presented families."""
    kind = G.kind[0]
    if kind == "cyclic":
        return G.kind[1]
    if kind == "dicyclic":
        return 3 * G.kind[1]
    if kind == "dihedral":
        n = G.kind[1]
        if n == 2:
            return 3  # Klein four-group: d + 1 = 2 + 1
        return 2 * n if n % 2 else 3 * n // 2
    if kind == "abelian" and len(G.kind) == 3:
        a, b = sorted(G.kind[1:])
        if b % a == 0:
            return a + b - 1
    return None


def max_atom_census(G: FiniteGroup, length: int | None = None, **kwargs) -> CensusResult:
    """Census of atoms of length ``D(G)`` (or the given length)."""
    if length is None:
        length = known_davenport(G)
        if length is None:
            length = large_davenport(G, jobs=kwargs.get("jobs", 1))[0]
    return atom_census(G, length, **kwargs)


def large_davenport(
    G: FiniteGroup, *, strategy: str = "descending", jobs: int = 1, budget: int | None = None
) -> tuple[int, Sequence]:
    """Maximal atom length and a witness atom.

    ``descending`` scans lengths ``|G|, |G|-1, ...`` and stops at the first
    length that has an atom.  ``ascending`` scans up from 1 and stops at the
    first empty length: merging two adjacent factors of a product-one
    ordering turns an atom of length ``l >= 3`` into one of length ``l - 1``,
    so an empty length bounds every longer one.
    """
    if strategy not in ("descending", "ascending"):
        raise DomainError(f"unknown strategy {strategy!r}")
    if G.order == 1:
        return 1, Sequence.from_terms(G, [G.identity])
    if strategy == "descending":
        for length in range(G.order, 0, -1):
            res = atom_census(G, length, jobs=jobs, budget=budget, stop_at_first=True)
            if res.canonical_atoms:
                return length, res.canonical_atoms[0]
        raise AssertionError("the identity is always an atom")
    best = Sequence.from_terms(G, [G.identity])
    for length in range(2, G.order + 2):
        res = atom_census(G, length, jobs=jobs, budget=budget, stop_at_first=True)
        if not res.canonical_atoms:
            return length - 1, best
        best = res.canonical_atoms[0]
    raise AssertionError("atoms longer than |G| cannot exist")


def small_davenport(G: FiniteGroup) -> tuple[int, Sequence]:
    """Longest product-one free sequence, by depth-first extension.

    Terms are added in non-decreasing index order.  Appending ``g`` to a free
    sequence ``S`` keeps it free iff ``g^-1`` is not in ``Pi(S) + {1}``,
    because product-one orderings are closed under rotation.
    """
    if G.order > MAX_ORDER:
        raise CapacityError(f"order {G.order} exceeds {MAX_ORDER}")
    lat = Lattice(G)
    best: list[int] = []
    path: list[int] = []
    inv = G.inverses
    e = G.identity

    def dfs(start: int) -> None:
        nonlocal best
        if len(path) > len(best):
            best = path.copy()
        avail = lat.all_products | (1 << e)
        for g in range(start, G.order):
            if avail >> inv[g] & 1:
                continue
            lat.push(g)
            path.append(g)
            dfs(g)
            path.pop()
            lat.pop()

    dfs(0)
    return len(best), Sequence.from_terms(G, best)


class Lattice:
    """Incrementally maintained product sets of all sub-multisets.

    Terms are pushed in non-decreasing index order, so the newest term is
    always the most significant mixed-radix digit and older ranks keep their
    meaning.  ``pop`` undoes the last ``push``.
    """

    def __init__(self, G: FiniteGroup):
        self.G = G
        self.support: list[int] = []
        self.radices: list[int] = []
        self.strides: list[int] = []
        self.pi = [1 << G.identity]
        self.lengths = [0]
        self._all = [0]
        self._undo: list[int] = []

    @property
    def all_products(self) -> int:
        """Mask of products of non-empty sub-multisets."""
        return self._all[-1]

    @property
    def size(self) -> int:
        return len(self.pi)

    def push(self, g: int) -> int:
        """Add one copy of ``g``; returns the first new rank."""
        if self.support and g < self.support[-1]:
            raise DomainError("Lattice terms must be pushed in non-decreasing order")
        G = self.G
        old = len(self.pi)
        if self.support and self.support[-1] == g:
            self.radices[-1] += 1
            block = self.strides[-1]
            self._undo.append(0)
        else:
            self.support.append(g)
            self.radices.append(2)
            self.strides.append(old)
            block = old
            self._undo.append(1)
        top = len(self.support) - 1
        strides, support, radices = self.strides, self.support, self.radices
        rmul = G.right_multiply
        pi, lengths = self.pi, self.lengths
        acc = self._all[-1]
        digits = [0] * top
        for low in range(block):
            if low:
                i = 0
                while digits[i] == radices[i] - 1:
                    digits[i] = 0
                    i += 1
                digits[i] += 1
            r = old + low
            mask = rmul(pi[r - strides[top]], g)
            for j in range(top):
                if digits[j]:
                    mask |= rmul(pi[r - strides[j]], support[j])
            pi.append(mask)
            lengths.append(lengths[r - strides[top]] + 1)
            acc |= mask
        self._all.append(acc)
        return old

    def pop(self) -> None:
        added = self._undo.pop()
        self._all.pop()
        if added:
            keep = self.strides.pop()
            self.support.pop()
            self.radices.pop()
        else:
            self.radices[-1] -= 1
            keep = self.strides[-1] * self.radices[-1]
        del self.pi[keep:]
        del self.lengths[keep:]
