"""Closed-form families of maximal atoms and checks against exhaustive censuses.

Family tags name the statement they encode:

========  ==============================================================
thm41a    ``a^[2n-2] t^[2]`` over dihedral, n odd
thm41b    ``(a^i t)^[n] (a^j t)^[n]``, gcd(i-j, n) = 1, dihedral n odd
thm42     ``a^[3n/2-2] t (a^(n/2) t)`` over dihedral, n even
thm43     ``a^[3n-2] t^[2]`` over dicyclic
prop32a   reflection atoms of length 4 over dihedral n = 4
prop32b   reflection atoms of length n over dihedral n >= 6 even
prop33a   reflection atoms of length 2n+2 over dicyclic, n >= 3, mixed tail
prop33b   reflection atoms of length 2n+2 over dicyclic, two-value tail
========  ==============================================================

"There exist a, t" is realized by pushing the canonical presentation through
every automorphism.  The reflection-coset families are pushed only through
automorphisms that keep the rotation subgroup in place, since their
hypothesis fixes it.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass, field
from math import gcd

from .atoms import atom_census, known_davenport, max_atom_census
from .errors import CapacityError, DomainError
from .group import ElementSet, FiniteGroup, abelian
from .sequence import Sequence, smoothness

FAMILY_TAGS = ("thm41a", "thm41b", "thm42", "thm43", "prop32a", "prop32b", "prop33a", "prop33b")

STATEMENTS = {
    "thm4.1": ("thm41a", "thm41b"),
    "thm4.2": ("thm42",),
    "thm4.3": ("thm43",),
    "prop3.2": ("prop32a", "prop32b"),
    "prop3.3": ("prop33a", "prop33b"),
}

_ALIASES = {
    "thm41": "thm4.1", "thm42": "thm4.2", "thm43": "thm4.3",
    "prop32": "prop3.2", "prop33": "prop3.3",
    "prop3.2-inparticular": "prop3.2", "prop3.3-inparticular": "prop3.3",
}


@dataclass(frozen=True)
class FamilySpec:
    statement: str
    params: dict = field(default_factory=dict)


class _Presentation:
    """Index arithmetic for ``a^i t^e`` in the canonical encoding."""

    def __init__(self, G: FiniteGroup):
        kind = G.kind[0]
        if kind not in ("dihedral", "dicyclic"):
            raise DomainError(f"{G.label()} has no dihedral/dicyclic presentation")
        self.G = G
        self.kind = kind
        self.n = G.kind[1]
        self.rot = self.n if kind == "dihedral" else 2 * self.n

    def a(self, i: int) -> int:
        return i % self.rot

    def at(self, i: int) -> int:
        return self.rot + i % self.rot

    def seq(self, *parts: tuple[int, int]) -> Sequence:
        counts = [0] * self.G.order
        for x, k in parts:
            counts[x] += k
        return Sequence(self.G, tuple(counts))

    @property
    def rotations(self) -> ElementSet:
        return self.G.element_set(range(self.rot))

    @property
    def reflections(self) -> ElementSet:
        return self.G.element_set(range(self.rot, 2 * self.rot))


def _require(cond: bool, msg: str) -> None:
    if not cond:
        raise DomainError(msg)


def family_seeds(G: FiniteGroup, tag: str) -> list[Sequence]:
    """Family members written in the canonical presentation only."""
    P = _Presentation(G)
    n = P.n
    a, at, seq = P.a, P.at, P.seq
    out = []
    if tag == "thm41a":
        _require(P.kind == "dihedral" and n >= 3 and n % 2, "thm41a needs dihedral with odd n >= 3")
        out.append(seq((a(1), 2 * n - 2), (at(0), 2)))
    elif tag == "thm41b":
        _require(P.kind == "dihedral" and n >= 3 and n % 2, "thm41b needs dihedral with odd n >= 3")
        for i in range(n):
            for j in range(n):
                if gcd(i - j, n) == 1:
                    out.append(seq((at(i), n), (at(j), n)))
    elif tag == "thm42":
        _require(P.kind == "dihedral" and n >= 4 and n % 2 == 0, "thm42 needs dihedral with even n >= 4")
        out.append(seq((a(1), n + n // 2 - 2), (at(0), 1), (at(n // 2), 1)))
    elif tag == "thm43":
        _require(P.kind == "dicyclic" and n >= 2, "thm43 needs dicyclic with n >= 2")
        out.append(seq((a(1), 3 * n - 2), (at(0), 2)))
    elif tag == "prop32a":
        _require(P.kind == "dihedral" and n == 4, "prop32a needs dihedral with n = 4")
        out.append(seq((at(0), 1), (at(1), 1), (at(2), 1), (at(3), 1)))
        for x in range(4):
            for y in range(4):
                if (x - y - 1) % 2 == 0:
                    out.append(seq((at(x), 2), (at(y), 1), (at(y + 2), 1)))
    elif tag == "prop32b":
        _require(P.kind == "dihedral" and n >= 6 and n % 2 == 0, "prop32b needs dihedral with even n >= 6")
        h = n // 2
        for x in range(n):
            for y in range(n):
                if (2 * x - 2 * y) % n == 0 or gcd(x - y, h) != 1:
                    continue
                for v in range(h + 1):
                    for w in range(h + 1):
                        if (x - y - v + w) % 2:
                            continue
                        out.append(seq((at(x), v), (at(h + x), h - v), (at(y), w), (at(h + y), h - w)))
    elif tag == "prop33a":
        _require(P.kind == "dicyclic" and n >= 3, "prop33a needs dicyclic with n >= 3")
        m = 2 * n
        for x in range(m):
            free = [y for y in range(m) if (2 * y - 2 * x) % m]
            for y in free:
                for tail in itertools.combinations_with_replacement(free, n - 3):
                    if (sum(tail) + 3 * y + n + x - (n + 1) * (x + n)) % m:
                        continue
                    parts = [(at(x), n + 2), (at(y), 2), (at(y + n), 1)]
                    parts += [(at(yi), 1) for yi in tail]
                    out.append(seq(*parts))
    elif tag == "prop33b":
        _require(P.kind == "dicyclic" and n >= 2, "prop33b needs dicyclic with n >= 2")
        m = 2 * n
        for x in range(m):
            for y in range(m):
                if (2 * y - 2 * x) % m == 0:
                    continue
                if (n * y + x - (n + 1) * (x + n)) % m:
                    continue
                out.append(seq((at(x), n + 2), (at(y), n)))
    else:
        raise DomainError(f"unknown family {tag!r}")
    return out


def _family_perms(G: FiniteGroup, tag: str) -> tuple[tuple[int, ...], ...]:
    if tag.startswith("prop"):
        return G.automorphisms_preserving(_Presentation(G).rotations)
    return G.automorphisms


def generate_family(G: FiniteGroup, spec: FamilySpec | str) -> set[Sequence]:
    """Every sequence of the family, over all admissible presentations."""
    tag = spec.statement if isinstance(spec, FamilySpec) else spec
    seeds = family_seeds(G, tag)
    perms = _family_perms(G, tag)
    return {s.permute(p) for s in seeds for p in perms}


def applicable_families(G: FiniteGroup, statement: str) -> tuple[str, ...]:
    statement = normalize_statement(statement)
    P = _Presentation(G)
    n = P.n
    if statement == "thm4.1":
        _require(P.kind == "dihedral" and n >= 3 and n % 2, "thm4.1 needs dihedral with odd n >= 3")
        return ("thm41a", "thm41b")
    if statement == "thm4.2":
        _require(P.kind == "dihedral" and n >= 4 and n % 2 == 0, "thm4.2 needs dihedral with even n >= 4")
        return ("thm42",)
    if statement == "thm4.3":
        _require(P.kind == "dicyclic", "thm4.3 needs a dicyclic group")
        return ("thm43",)
    if statement == "prop3.2":
        _require(P.kind == "dihedral" and n >= 4 and n % 2 == 0, "prop3.2 needs dihedral with even n >= 4")
        return ("prop32a",) if n == 4 else ("prop32b",)
    _require(P.kind == "dicyclic", "prop3.3 needs a dicyclic group")
    return ("prop33a", "prop33b") if n >= 3 else ("prop33b",)


def normalize_statement(statement: str) -> str:
    s = statement.strip().lower()
    s = _ALIASES.get(s, s)
    if s not in STATEMENTS:
        raise DomainError(f"unknown statement {statement!r}; expected one of {sorted(STATEMENTS)}")
    return s


@dataclass
class CharacterizationReport:
    statement: str
    group: str
    family_size: int
    census_size: int
    equal: bool
    missing: list[str]
    extra: list[str]
    length: int
    longer_free: bool | None = None
    longer_checked: list[int] = field(default_factory=list)
    longer_found: list[str] = field(default_factory=list)

    def to_json(self) -> dict:
        out = {
            "statement": self.statement,
            "group": self.group,
            "length": self.length,
            "family_size": self.family_size,
            "census_size": self.census_size,
            "equal": self.equal,
            "missing": self.missing,
            "extra": self.extra,
        }
        if self.longer_free is not None:
            out["longer_free"] = self.longer_free
            out["longer_lengths_checked"] = self.longer_checked
            out["longer_found"] = self.longer_found
        return out


def _diff(family: set[Sequence], census: set[Sequence]) -> tuple[list[str], list[str]]:
    key = lambda s: s.counts  # noqa: E731
    missing = [str(s) for s in sorted(family - census, key=key)]
    extra = [str(s) for s in sorted(census - family, key=key)]
    return missing, extra


def verify_characterization(G: FiniteGroup, statement: str, *, jobs: int = 1) -> CharacterizationReport:
    """Compare a family with the exhaustive census it is claimed to describe.

    Maximal-atom statements compare against the full census at ``D(G)``.
    Reflection-coset statements compare against the census restricted to the
    reflection coset at their stated length, and additionally check that no
    atom has more reflection terms than that: reflection-only atoms of any
    longer length, and mixed atoms with at least ``length + 2`` reflection
    terms, up to ``|G|``.
    """
    statement = normalize_statement(statement)
    tags = applicable_families(G, statement)
    family: set[Sequence] = set()
    for tag in tags:
        family |= generate_family(G, tag)
    P = _Presentation(G)
    if statement.startswith("thm"):
        length = known_davenport(G)
        census = max_atom_census(G, length, jobs=jobs).all_atoms()
        missing, extra = _diff(family, census)
        return CharacterizationReport(
            statement, G.label(), len(family), len(census), not missing and not extra, missing, extra, length
        )
    length = P.n if statement == "prop3.2" else 2 * P.n + 2
    refl = P.reflections
    census = atom_census(G, length, alphabet=refl, jobs=jobs).all_atoms()
    missing, extra = _diff(family, census)
    checked, found = [], []
    for longer in range(length + 1, G.order + 1):
        res = atom_census(G, longer, alphabet=refl, jobs=jobs)
        checked.append(longer)
        found += [str(s) for s in res.canonical_atoms]
    for longer in range(length + 2, G.order + 1):
        res = atom_census(G, longer, min_inside=(refl, length + 2), jobs=jobs)
        found += [str(s) for s in res.canonical_atoms]
    equal = not missing and not extra and not found
    return CharacterizationReport(
        statement, G.label(), len(family), len(census), equal, missing, extra, length,
        longer_free=not found, longer_checked=checked, longer_found=found,
    )


# -- abelian checks ------------------------------------------------------------


@dataclass(frozen=True)
class DgmResult:
    lhs: int
    rhs: int
    holds: bool
    stabilizer: ElementSet


def check_dgm_bound(seq: Sequence, n: int) -> DgmResult:
    """Compare ``|Sigma_n(S)|`` with its lower bound over ``G/H``.

    ``H`` is the stabilizer of ``Sigma_n(S)``; the bound is
    ``(sum over cosets of min(n, multiplicity) - n + 1) * |H|``.
    """
    G = seq.group
    if not G.is_abelian:
        raise DomainError("the n-sum bound is for abelian groups")
    if not 1 <= n <= len(seq):
        raise DomainError(f"n must lie in [1, {len(seq)}]")
    sums = seq.sigma(n)
    H = G.left_stabilizer(sums)
    _, phi = G.quotient(H)
    image = seq.transform(phi)
    rhs = (sum(min(n, c) for c in image.counts) - n + 1) * len(H)
    lhs = len(sums)
    return DgmResult(lhs, rhs, lhs >= rhs, H)


def random_dgm_draws(count: int, seed: int = 0, max_order: int = 16, max_len: int = 8):
    """Random ``(S, n)`` over ``C_a + C_b`` with ``|G| <= max_order``."""
    rng = random.Random(seed)
    groups = []
    for a_ in range(1, max_order + 1):
        for b_ in range(a_, max_order + 1):
            if a_ * b_ <= max_order and (a_ > 1 or b_ > 1):
                groups.append((a_, b_))
    cache: dict = {}
    for _ in range(count):
        a_, b_ = rng.choice(groups)
        if (a_, b_) not in cache:
            cache[(a_, b_)] = abelian(b_) if a_ == 1 else abelian(a_, b_)
        G = cache[(a_, b_)]
        length = rng.randint(1, max_len)
        seq = Sequence.from_terms(G, [rng.randrange(G.order) for _ in range(length)])
        yield seq, rng.randint(1, length)


def egz_constant(G: FiniteGroup, limit_order: int = 9) -> int:
    """Least ``l`` such that every length-``l`` sequence has a product-one
    subsequence of length ``exp(G)``.

    Depth-first over non-decreasing sequences that avoid such a subsequence;
    the property is inherited by subsequences, so the longest survivor plus
    one is the answer.
    """
    from .atoms import Lattice

    if not G.is_abelian:
        raise DomainError("the constant is computed for abelian groups")
    if G.order > limit_order:
        raise CapacityError(f"order {G.order} above the exhaustive limit {limit_order}")
    e = G.exponent
    ident = G.identity
    lat = Lattice(G)
    best = 0
    depth = 0

    def dfs(start: int) -> None:
        nonlocal best, depth
        best = max(best, depth)
        for g in range(start, G.order):
            first = lat.push(g)
            bad = any(
                lat.lengths[r] == e and lat.pi[r] >> ident & 1 for r in range(first, lat.size)
            )
            if not bad:
                depth += 1
                dfs(g)
                depth -= 1
            lat.pop()

    dfs(0)
    return best + 1


@dataclass
class SmoothStructureReport:
    n: int
    examined: int
    violations: list[str]

    @property
    def ok(self) -> bool:
        return not self.violations


def _zero_sum_free(n: int):
    """All zero-sum free sequences over ``C_n`` as sorted tuples with sum sets."""
    full = (1 << n) - 1

    def shift(mask: int, g: int) -> int:
        return ((mask << g) | (mask >> (n - g))) & full

    def dfs(start: int, terms: list[int], sums: int):
        yield tuple(terms), sums
        for g in range(max(start, 1), n):
            new = sums | shift(sums, g) | (1 << g)
            if new & 1:
                continue
            terms.append(g)
            yield from dfs(g, terms, new)
            terms.pop()

    yield from dfs(1, [], 0)


def verify_smooth_structure(n: int) -> SmoothStructureReport:
    """Exhaustive check of the structure of long zero-sum free sequences
    over ``C_n``: smoothness with a generator ``g``, every subsequence sum
    reachable through a subsequence containing ``g``, the shapes at lengths
    ``n-1`` and ``n-2``, and ``g`` dividing every subsequence of length at
    least ``n/2 - 1``.
    """
    from .group import cyclic

    if n < 3:
        raise DomainError("needs n >= 3")
    G = cyclic(n)
    examined = 0
    violations = []
    for terms, sums in _zero_sum_free(n):
        if 2 * len(terms) < n + 1:
            continue
        examined += 1
        seq = Sequence.from_terms(G, terms)
        certs = [c for g in range(1, n) if gcd(g, n) == 1 for c in [smoothness(seq, g)] if c]
        if not certs:
            violations.append(f"{seq}: no smooth certificate with a generator")
            continue
        problems = None
        for cert in certs:
            problems = _smooth_parts(G, seq, cert.g, sums)
            if not problems:
                break
        if problems:
            violations.append(f"{seq}: " + "; ".join(problems))
    return SmoothStructureReport(n, examined, violations)


def _smooth_parts(G: FiniteGroup, seq: Sequence, g: int, sums: int) -> list[str]:
    n = G.order
    problems = []
    rest = seq.remove(Sequence.from_terms(G, [g]))
    reach = 1 << g
    if len(rest):
        for h in rest.subsequence_products():
            reach |= 1 << G.table[h][g]
    if reach & sums != sums:
        problems.append("some sum is not reachable through a subsequence containing g")
    length = len(seq)
    if length == n - 1 and seq.counts[g] != n - 1:
        problems.append("length n-1 but not g^[n-1]")
    if length == n - 2:
        two_g = G.table[g][g]
        shapes = (
            Sequence.from_terms(G, [g] * (n - 2)),
            Sequence.from_terms(G, [two_g] + [g] * (n - 3)),
        )
        if seq not in shapes:
            problems.append("length n-2 but neither g^[n-2] nor (2g) g^[n-3]")
    if n >= 4:
        # every W with |W| >= n/2 - 1 contains g  <=>  fewer than n/2 - 1 terms differ from g
        others = length - seq.counts[g]
        if 2 * others >= n - 2:
            problems.append("a long subsequence avoids g")
    return problems
