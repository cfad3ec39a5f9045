"""Factorization arithmetic of the monoid of product-one sequences.

Sets of lengths are computed over the sub-multiset lattice of one
``ProductTable``.  A sub-multiset is addressed by its mixed-radix rank, so a
factor ``A`` of ``T`` is removed by subtracting ranks.  Every factorization
is counted once by insisting that the first factor contains the least
element of the remaining support (the pivot).
"""

from __future__ import annotations

import itertools
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

from .atoms import is_atom, known_davenport, large_davenport
from .errors import CapacityError, DomainError
from .group import FiniteGroup
from .sequence import ProductTable, Sequence, default_budget


@dataclass(frozen=True)
class LengthSet:
    lengths: frozenset[int]

    @classmethod
    def from_mask(cls, mask: int) -> "LengthSet":
        return cls(frozenset(i for i in range(mask.bit_length()) if mask >> i & 1))

    @property
    def min(self) -> int:
        return min(self.lengths)

    @property
    def max(self) -> int:
        return max(self.lengths)

    def __contains__(self, k: int) -> bool:
        return k in self.lengths

    def __iter__(self):
        return iter(sorted(self.lengths))

    def __len__(self) -> int:
        return len(self.lengths)

    def __str__(self) -> str:
        return "{" + ", ".join(map(str, self)) + "}"


class Factorizer:
    """Lengths and explicit factorizations for sub-multisets of one sequence."""

    def __init__(self, seq: Sequence, budget: int | None = None):
        self.seq = seq
        self.table = ProductTable(seq, budget)
        self._e = seq.group.identity
        self._atom: dict[int, bool] = {}
        self._lengths: dict[int, int] = {0: 1}
        # sub-rank enumeration touches at most prod (c+1)(c+2)/2 ranks
        work = 1
        for rad in self.table.radices:
            work *= rad * (rad + 1) // 2
        budget = default_budget() if budget is None else budget
        if work > 4 * budget:
            raise CapacityError(f"factorization search needs about {work} steps, budget is {budget}")

    def _po(self, r: int) -> bool:
        return bool(self.table.pi[r] >> self._e & 1)

    def _subranks(self, r: int, pivot_first: bool) -> list[int]:
        t = self.table
        ranks = [0]
        seen_pivot = not pivot_first
        for rad, stride in zip(t.radices, t.strides):
            d = r // stride % rad
            if not d:
                continue
            lo = 0
            if not seen_pivot:
                lo, seen_pivot = 1, True
            ranks = [x + e * stride for e in range(lo, d + 1) for x in ranks]
        return ranks

    def is_atom(self, r: int) -> bool:
        hit = self._atom.get(r)
        if hit is None:
            hit = self._po(r)
            if hit and self.table.lengths[r] > 1:
                for s in self._subranks(r, False):
                    if 0 < s < r and self._po(s) and self._po(r - s):
                        hit = False
                        break
            self._atom[r] = hit
        return hit

    def _atoms_with_pivot(self, r: int):
        for a in self._subranks(r, True):
            if self._po(r - a) and self.is_atom(a):
                yield a

    def lengths_mask(self, r: int | None = None) -> int:
        """Bit ``i`` is set iff sub-multiset ``r`` has a factorization of length ``i``."""
        r = self.table.full if r is None else r
        memo = self._lengths
        if r in memo:
            return memo[r]
        mask = 0
        if self._po(r):
            for a in self._atoms_with_pivot(r):
                mask |= self.lengths_mask(r - a) << 1
        memo[r] = mask
        return mask

    def factorization(self, length: int, r: int | None = None) -> list[Sequence] | None:
        """Atoms of one factorization of the given length, pivot factor first."""
        r = self.table.full if r is None else r
        if not self.lengths_mask(r) >> length & 1:
            return None
        out = []
        while r:
            for a in self._atoms_with_pivot(r):
                if self.lengths_mask(r - a) >> (length - 1) & 1:
                    out.append(self.table.subsequence(a))
                    r -= a
                    length -= 1
                    break
        return out


def _recursion_guard(seq: Sequence) -> None:
    need = 4 * len(seq) + 200
    if sys.getrecursionlimit() < need:
        sys.setrecursionlimit(need)


def length_set(seq: Sequence, budget: int | None = None) -> LengthSet:
    """``L(B)``: lengths of all factorizations of ``B`` into atoms."""
    if len(seq) == 0:
        return LengthSet(frozenset({0}))
    f = Factorizer(seq, budget)
    if not f._po(f.table.full):
        raise DomainError(f"{seq} is not a product-one sequence")
    _recursion_guard(seq)
    return LengthSet.from_mask(f.lengths_mask())


# -- certificates -----------------------------------------------------------------


@dataclass(frozen=True)
class Factorization:
    factors: tuple[Sequence, ...]

    @property
    def length(self) -> int:
        return len(self.factors)

    def product(self, group: FiniteGroup) -> Sequence:
        out = Sequence.empty(group)
        for f in self.factors:
            out = out * f
        return out

    def __str__(self) -> str:
        return " | ".join(str(f) for f in self.factors)


@dataclass(frozen=True)
class Witness:
    """A sequence ``B`` together with factorizations of two lengths."""

    seq: Sequence
    short: Factorization
    long: Factorization

    @property
    def lengths(self) -> tuple[int, int]:
        return self.short.length, self.long.length

    def check(self) -> bool:
        G = self.seq.group
        for fac in (self.short, self.long):
            if fac.product(G) != self.seq:
                return False
            if not all(is_atom(a).is_atom for a in fac.factors):
                return False
        return True

    def __str__(self) -> str:
        a, b = self.lengths
        return f"{self.seq} has factorizations of lengths {a} and {b}"

    def to_json(self) -> dict:
        return {
            "sequence": str(self.seq),
            "lengths": list(self.lengths),
            "short": [str(f) for f in self.short.factors],
            "long": [str(f) for f in self.long.factors],
        }


def _pairs(A: Sequence) -> list[Sequence]:
    G = A.group
    return [Sequence.from_terms(G, [g, G.inverses[g]]) for g in A.terms()]


def _fact(*parts) -> Factorization:
    out = []
    for p in parts:
        out.extend(p)
    return Factorization(tuple(out))


def _searched(seq: Sequence, short: int, long: int, budget: int | None = None) -> Witness:
    f = Factorizer(seq, budget)
    _recursion_guard(seq)
    a = f.factorization(short)
    b = f.factorization(long)
    if a is None or b is None:
        raise DomainError(f"{seq} has no factorizations of lengths {short} and {long}")
    return Witness(seq, Factorization(tuple(a)), Factorization(tuple(b)))


# -- Davenport data ---------------------------------------------------------------


def _presented(G: FiniteGroup):
    kind = G.kind[0]
    if kind == "dihedral" and G.kind[1] >= 3:
        return "dihedral", G.kind[1]
    if kind == "dicyclic":
        return "dicyclic", G.kind[1]
    return None, None


def maximal_atom(G: FiniteGroup) -> Sequence:
    """One atom of length ``D(G)``, written in the canonical presentation when there is one."""
    kind, n = _presented(G)
    if kind is not None:
        from .verify import family_seeds

        tag = "thm43" if kind == "dicyclic" else ("thm41a" if n % 2 else "thm42")
        return family_seeds(G, tag)[0]
    if G.is_cyclic:
        g = next(x for x in range(G.order) if G.element_order(x) == G.order)
        return Sequence.from_terms(G, [g] * G.order)
    return large_davenport(G)[1]


def davenport(G: FiniteGroup) -> int:
    D = known_davenport(G)
    return D if D is not None else large_davenport(G)[0]


# -- sequences with two and j factors -------------------------------------------


def truncated_atom(A: Sequence, j: int) -> Sequence:
    """Length-``j`` atom from an atom of length at least ``j``: keep ``j-1``
    terms of a product-one ordering and merge the rest into one term."""
    G = A.group
    if not 1 <= j <= len(A):
        raise DomainError(f"j must lie in [1, {len(A)}]")
    order = ProductTable(A).ordering()
    tail = G.product(order[j - 1:])
    return Sequence.from_terms(G, order[: j - 1] + [tail])


def witness_pair(G: FiniteGroup, j: int) -> Witness:
    """``B = V V^-1`` with ``{2, j}`` in ``L(B)``, for ``2 <= j <= D(G)``."""
    D = davenport(G)
    if j < 2:
        raise DomainError("j must be at least 2")
    if j > D:
        raise DomainError(f"no such B exists for j = {j} > D(G) = {D}")
    V = truncated_atom(maximal_atom(G), j)
    Vi = V.inverse()
    w = Witness(V * Vi, Factorization((V, Vi)), Factorization(tuple(_pairs(V))))
    if not {2, j} <= length_set(w.seq).lengths:
        raise AssertionError(f"construction failed for j = {j}")
    return w


@dataclass
class PairSearchResult:
    group: str
    j: int
    max_len: int
    sequences: int
    pruned: int
    computed: int
    found: list[Sequence] = field(default_factory=list)


def _pair_job(args):
    G, items, j, prune = args
    found, pruned, computed = [], 0, 0
    ident = G.identity
    for B in items:
        e = B.counts[ident]
        # a length-j factorization uses e copies of 1 and j-e atoms of length >= 2
        if prune and len(B) < e + 2 * (j - e):
            pruned += 1
            continue
        computed += 1
        if j in length_set(B):
            found.append(B)
    return found, pruned, computed


def pair_search(G: FiniteGroup, j: int, max_len: int, *, prune: bool = True, jobs: int = 1) -> PairSearchResult:
    """All ``B = A1 A2`` with ``A1, A2`` atoms, ``|B| <= max_len`` and ``j`` in ``L(B)``.

    ``2`` lies in ``L(B)`` exactly when ``B`` is a product of two atoms, so
    this covers every ``B`` with ``{2, j}`` in ``L(B)``.  Pairs are reduced
    modulo automorphisms.  With ``prune`` set, a pair is discarded without
    computing ``L(B)`` when it is too short to have ``j`` factors.
    """
    from .atoms import atom_census, canonicalize

    reps, every = {}, {}
    for length in range(1, max_len):
        res = atom_census(G, length)
        reps[length] = res.canonical_atoms
        every[length] = sorted(res.all_atoms(), key=lambda s: s.counts)
    seen = set()
    for l1 in range(1, max_len):
        for l2 in range(1, min(l1, max_len - l1) + 1):
            for A1 in reps[l1]:
                for A2 in every[l2]:
                    seen.add(canonicalize(A1 * A2))
    items = sorted(seen, key=lambda s: (len(s), s.counts))
    width = max(1, jobs)
    tasks = [(G, items[i::width], j, prune) for i in range(width)]
    if width > 1:
        with ProcessPoolExecutor(width) as ex:
            results = list(ex.map(_pair_job, tasks))
    else:
        results = [_pair_job(tasks[0])]
    found, pruned, computed = [], 0, 0
    for f, p, c in results:
        found += f
        pruned += p
        computed += c
    found.sort(key=lambda s: s.counts)
    return PairSearchResult(G.label(), j, max_len, len(items), pruned, computed, found)


# -- unions of sets of lengths ----------------------------------------------------


@dataclass
class UnionsResult:
    """``U_k`` restricted to sequences of length at most ``max_len``.

    This is an under-approximation of the true union; it only grows with
    ``max_len``.
    """

    group: str
    k: int
    max_len: int
    lengths: set[int]
    sequences: int

    def to_json(self) -> dict:
        return {"group": self.group, "k": self.k, "max_len": self.max_len,
                "lengths": sorted(self.lengths), "sequences_examined": self.sequences}


def _product_one_sequences(G: FiniteGroup, max_len: int):
    """Canonical product-one sequences of length ``1..max_len``."""
    from .atoms import _counts

    quo, phi = G.quotient(G.commutator_subgroup())
    cls, qt, qe = phi.images, quo.table, quo.identity
    perms = [p for p in G.automorphisms if p != tuple(range(G.order))]
    for length in range(1, max_len + 1):
        for tup in itertools.combinations_with_replacement(range(G.order), length):
            x = qe
            for g in tup:
                x = qt[x][cls[g]]
            if x != qe:
                continue
            if any(tuple(sorted(map(p.__getitem__, tup))) > tup for p in perms):
                continue
            seq = Sequence(G, _counts(G.order, tup))
            t = ProductTable(seq)
            if t.contains_identity(t.full):
                yield seq


def _unions_job(args):
    seqs, k = args
    out, n = set(), 0
    for seq in seqs:
        n += 1
        L = length_set(seq)
        if k in L:
            out |= L.lengths
    return out, n


def unions_bounded(G: FiniteGroup, k: int, max_len: int, *, jobs: int = 1) -> UnionsResult:
    """Union of ``L(B)`` over product-one ``B`` with ``|B| <= max_len`` and ``k`` in ``L(B)``.

    Lengths are invariant under automorphisms, so only canonical ``B`` are
    visited.
    """
    if k < 1:
        raise DomainError("k must be positive")
    seqs = list(_product_one_sequences(G, max_len))
    width = max(1, jobs)
    tasks = [(seqs[i::width], k) for i in range(width)]
    if width > 1:
        with ProcessPoolExecutor(width) as ex:
            results = list(ex.map(_unions_job, tasks))
    else:
        results = [_unions_job(tasks[0])]
    lengths, n = set(), 0
    for part, m in results:
        lengths |= part
        n += m
    return UnionsResult(G.label(), k, max_len, lengths, n)


# -- rho and lambda ---------------------------------------------------------------


@dataclass
class RhoLambdaReport:
    """Bracket ``[lower, upper]`` for ``rho_k`` or ``lambda_k``.

    ``exact`` is set only when the two ends meet.  For ``rho`` the witness
    realizes the lower end; for ``lambda`` it realizes the upper end.
    """

    quantity: str
    group: str
    k: int
    lower: int
    upper: int
    witness: Witness | None = None
    source: str = ""

    @property
    def exact(self) -> int | None:
        return self.lower if self.lower == self.upper else None

    @property
    def formula_value(self) -> int | None:
        return self.exact

    def to_json(self) -> dict:
        return {
            "quantity": self.quantity, "group": self.group, "k": self.k,
            "lower": self.lower, "upper": self.upper, "exact": self.exact,
            "source": self.source,
            "witness": None if self.witness is None else self.witness.to_json(),
        }


def _doubled(A: Sequence, copies: int) -> Witness:
    """``(A A^-1)^copies`` factored as ``2 copies`` atoms and as ``|A| copies`` pairs."""
    G = A.group
    Ai = A.inverse()
    seq = Sequence.empty(G)
    for _ in range(copies):
        seq = seq * A * Ai
    return Witness(seq, _fact([A, Ai] * copies), _fact(_pairs(A) * copies))


def _join(*ws: Witness) -> Witness:
    G = ws[0].seq.group
    seq = Sequence.empty(G)
    for w in ws:
        seq = seq * w.seq
    return Witness(seq, _fact(*(w.short.factors for w in ws)), _fact(*(w.long.factors for w in ws)))


def _three_atoms(G: FiniteGroup) -> tuple[Witness, int] | None:
    """``U V W`` with ``3`` and a long length in ``L``; the long length is returned."""
    from .verify import _Presentation

    kind, n = _presented(G)
    if kind is None:
        return None
    P = _Presentation(G)
    a, at, seq = P.a, P.at, P.seq
    if kind == "dihedral" and n % 2:
        U = seq((at(1), n), (at(0), n))
        V = seq((at(2), n), (at(1), n))
        W = seq((at(2), n), (at(0), n))
        long = 3 * n
    elif kind == "dihedral":
        h = n // 2
        U = seq((a(1), n + h - 2), (at(0), 1), (at(h), 1))
        V = seq((a(-1), n + h - 2), (at(1), 1), (at(h + 1), 1))
        W = seq((at(0), 1), (at(h), 1), (at(1), 1), (at(h + 1), 1))
        long = n + h + 2
    else:
        U = seq((a(1), 3 * n - 2), (at(0), 2))
        V = seq((a(-1), 3 * n - 2), (at(1), 2))
        W = seq((at(n), 2), (at(n + 1), 2))
        long = 3 * n + 2
    B = U * V * W
    w = _searched(B, 3, long)
    return Witness(B, Factorization((U, V, W)), w.long), long


def rho(G: FiniteGroup, k: int) -> RhoLambdaReport:
    """``rho_k(G)``, the largest length in a set of lengths containing ``k``."""
    if k < 1:
        raise DomainError("k must be positive")
    label = G.label()
    if G.order <= 2:
        one = Sequence.from_terms(G, [G.identity])
        w = Witness(one ** k, Factorization((one,) * k), Factorization((one,) * k))
        return RhoLambdaReport("rho", label, k, k, k, w, "groups of order at most 2 are half-factorial")
    D = davenport(G)
    A = maximal_atom(G)
    if k == 1:
        w = Witness(A, Factorization((A,)), Factorization((A,)))
        return RhoLambdaReport("rho", label, 1, 1, 1, w, "an atom factors only as itself")
    t, odd = divmod(k, 2)
    if not odd:
        return RhoLambdaReport("rho", label, k, t * D, t * D, _doubled(A, t), "even index: (k/2) D")
    kind, n = _presented(G)
    upper = k * D // 2
    if kind == "dihedral" and n % 2:
        base, long = _three_atoms(G)
        lower, source = k * n, "odd dihedral: k n"
    elif kind is not None:
        base, long = _three_atoms(G)
        lower = t * D + 2
        upper = t * D + D // 2 - 1
        source = "even dihedral / dicyclic: [tD + 2, tD + D/2 - 1]"
    else:
        one = Sequence.from_terms(G, [G.identity])
        base = _join(_doubled(A, 1), Witness(one, Factorization((one,)), Factorization((one,))))
        lower, source = t * D + 1, "generic: [tD + 1, floor(kD/2)]"
        w = base if t == 1 else _join(base, _doubled(A, t - 1))
        return RhoLambdaReport("rho", label, k, lower, upper, w, source)
    w = base if t == 1 else _join(base, _doubled(A, t - 1))
    if w.lengths != (k, lower):
        raise AssertionError(f"witness lengths {w.lengths} do not match ({k}, {lower})")
    return RhoLambdaReport("rho", label, k, lower, upper, w, source)


def lambda_(G: FiniteGroup, k: int) -> RhoLambdaReport:
    """``lambda_k(G)``, the least length in a set of lengths containing ``k``.

    With ``k = l D + j`` and ``0 <= j < D`` the value is ``2l`` for ``j = 0``,
    ``2l + 1`` for ``1 <= j <= rho_{2l+1} - l D`` and ``2l + 2`` beyond.
    When only bounds on ``rho_{2l+1}`` are known the middle range is
    reported as the bracket ``[2l + 1, 2l + 2]``.
    """
    if k < 1:
        raise DomainError("k must be positive")
    label = G.label()
    if G.order <= 2:
        r = rho(G, k)
        return RhoLambdaReport("lambda", label, k, k, k, r.witness, r.source)
    D = davenport(G)
    A = maximal_atom(G)
    l, j = divmod(k, D)
    if j == 0:
        return RhoLambdaReport("lambda", label, k, 2 * l, 2 * l, _doubled(A, l), "k = l D: 2l")
    if l == 0:
        if j == 1:
            w = Witness(A, Factorization((A,)), Factorization((A,)))
            return RhoLambdaReport("lambda", label, k, 1, 1, w, "k = 1")
        return RhoLambdaReport("lambda", label, k, 2, 2, witness_pair(G, j), "l = 0, j >= 2: 2")
    r = rho(G, 2 * l + 1)
    source = f"rho_{2 * l + 1} in [{r.lower}, {r.upper}]"
    if j <= r.lower - l * D:
        # k lies in U_{2l+1}, which is an interval from 2l+1 to rho_{2l+1}
        return RhoLambdaReport("lambda", label, k, 2 * l + 1, 2 * l + 1, None, source + ": 2l + 1")
    top = _join(_doubled(A, l), witness_pair(G, j))
    if j > r.upper - l * D:
        return RhoLambdaReport("lambda", label, k, 2 * l + 2, 2 * l + 2, top, source + ": 2l + 2")
    return RhoLambdaReport("lambda", label, k, 2 * l + 1, 2 * l + 2, top, source + ": undetermined")


def lambda_odd_dihedral(n: int, k: int) -> int:
    """The closed form for dihedral groups of order ``2n`` with ``n`` odd."""
    l, j = divmod(k, 2 * n)
    if j <= 1:
        return 2 * l + j
    if l == 0:
        return 2
    return 2 * l + 1 if j <= n else 2 * l + 2
