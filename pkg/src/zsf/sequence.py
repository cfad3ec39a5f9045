"""Sequences (finite multisets) over a group and their product sets.

The central object is :class:`ProductTable`: for a sequence ``S`` it stores
the set of ordered products of every sub-multiset ``T | S``, indexed by the
mixed-radix rank of ``T``'s counts vector.  Subsequence products by length,
the product-one tests and atom checks all read from one table.
"""

from __future__ import annotations

import json
import os
import re
from dataclasses import dataclass
from typing import Iterable, Iterator

from .errors import CapacityError, DomainError, ValidationError
from .group import ElementSet, FiniteGroup, Homomorphism, build_group

DEFAULT_BUDGET = 1 << 24


def default_budget() -> int:
    env = os.environ.get("ZSF_BUDGET")
    if env:
        try:
            return int(env)
        except ValueError:
            raise ValidationError(f"ZSF_BUDGET must be an integer, got {env!r}") from None
    return DEFAULT_BUDGET


@dataclass(frozen=True)
class Sequence:
    """An unordered sequence over ``group``: a multiplicity per element."""

    group: FiniteGroup
    counts: tuple[int, ...]

    def __post_init__(self):
        if len(self.counts) != self.group.order:
            raise ValidationError("counts vector must have one entry per group element")
        if any(c < 0 for c in self.counts):
            raise ValidationError("multiplicities must be non-negative")

    # -- constructors ---------------------------------------------------------

    @classmethod
    def empty(cls, group: FiniteGroup) -> "Sequence":
        return cls(group, (0,) * group.order)

    @classmethod
    def from_terms(cls, group: FiniteGroup, terms: Iterable[int]) -> "Sequence":
        counts = [0] * group.order
        for x in terms:
            group._check(x)
            counts[x] += 1
        return cls(group, tuple(counts))

    @classmethod
    def from_counts(cls, group: FiniteGroup, counts: Iterable[int]) -> "Sequence":
        return cls(group, tuple(int(c) for c in counts))

    @classmethod
    def parse(cls, group: FiniteGroup, text: str) -> "Sequence":
        """Parse the text form, e.g. ``"a^[4] t^[2]"`` or ``"t (a t)"``."""
        counts = [0] * group.order
        for name, k in _tokenize(group, text):
            counts[group.element(name)] += k
        return cls(group, tuple(counts))

    # -- basic notation -------------------------------------------------------

    def __len__(self) -> int:
        return sum(self.counts)

    def multiplicity(self, g: int) -> int:
        return self.counts[g]

    @property
    def support(self) -> tuple[int, ...]:
        return tuple(g for g, c in enumerate(self.counts) if c)

    @property
    def max_multiplicity(self) -> int:
        return max(self.counts, default=0)

    def terms(self) -> list[int]:
        return [g for g, c in enumerate(self.counts) for _ in range(c)]

    def divides(self, other: "Sequence") -> bool:
        return all(a <= b for a, b in zip(self.counts, other.counts))

    def __mul__(self, other: "Sequence") -> "Sequence":
        self._same_group(other)
        return Sequence(self.group, tuple(a + b for a, b in zip(self.counts, other.counts)))

    def __pow__(self, k: int) -> "Sequence":
        return Sequence(self.group, tuple(c * k for c in self.counts))

    def remove(self, other: "Sequence") -> "Sequence":
        """``S * T^[-1]``; requires ``T | S``."""
        self._same_group(other)
        if not other.divides(self):
            raise DomainError("can only remove a subsequence")
        return Sequence(self.group, tuple(a - b for a, b in zip(self.counts, other.counts)))

    def restrict(self, subset: ElementSet) -> "Sequence":
        return Sequence(self.group, tuple(c if g in subset else 0 for g, c in enumerate(self.counts)))

    def inverse(self) -> "Sequence":
        counts = [0] * self.group.order
        for g, c in enumerate(self.counts):
            counts[self.group.inverses[g]] += c
        return Sequence(self.group, tuple(counts))

    def transform(self, theta: Homomorphism | str) -> "Sequence":
        """Termwise image under a homomorphism, or ``"inverse"``."""
        if isinstance(theta, str):
            if theta != "inverse":
                raise DomainError(f"unknown transform {theta!r}")
            return self.inverse()
        if theta.source != self.group:
            raise DomainError("homomorphism source is not this sequence's group")
        counts = [0] * theta.target.order
        for g, c in enumerate(self.counts):
            counts[theta.images[g]] += c
        return Sequence(theta.target, tuple(counts))

    def permute(self, perm: tuple[int, ...]) -> "Sequence":
        """Image under an element permutation (e.g. an automorphism)."""
        counts = [0] * self.group.order
        for g, c in enumerate(self.counts):
            counts[perm[g]] += c
        return Sequence(self.group, tuple(counts))

    def _same_group(self, other: "Sequence") -> None:
        if other.group != self.group:
            raise DomainError("sequences live over different groups")

    # -- formatting -----------------------------------------------------------

    def term_strings(self) -> list[str]:
        out = []
        for g, c in enumerate(self.counts):
            if c:
                name = self.group.names[g]
                if " " in name or ("^" in name and c > 1):
                    name = f"({name})"
                out.append(name if c == 1 else f"{name}^[{c}]")
        return out

    def __str__(self) -> str:
        return " ".join(self.term_strings()) or "1_F"

    def to_json(self) -> dict:
        return {"group": self.group.to_json(), "terms": self.term_strings()}

    @classmethod
    def from_json(cls, data: dict, group: FiniteGroup | None = None) -> "Sequence":
        if group is None:
            if "group" not in data:
                raise ValidationError("sequence JSON needs a 'group'")
            group = build_group(data["group"])
        if "counts" in data:
            return cls.from_counts(group, data["counts"])
        terms = data.get("terms")
        if not isinstance(terms, list):
            raise ValidationError("sequence JSON needs a 'terms' list")
        counts = [0] * group.order
        for term in terms:
            name, k = _parse_term(group, str(term).strip())
            counts[group.element(name)] += k
        return cls(group, tuple(counts))

    # -- product sets ---------------------------------------------------------

    def table(self, budget: int | None = None) -> "ProductTable":
        return ProductTable(self, budget)

    def product_set(self, budget: int | None = None) -> ElementSet:
        return self.table(budget).product_set()

    def subsequence_products(self, n: int | None = None, budget: int | None = None) -> ElementSet:
        return self.table(budget).subsequence_products(n)

    def sigma(self, n: int | None = None, budget: int | None = None) -> ElementSet:
        return sigma_variants(self, n, budget)

    def classify(self, budget: int | None = None) -> dict:
        return classify(self, budget)


def _parse_term(group: FiniteGroup, tok: str) -> tuple[str, int]:
    """``name^[k]`` is always a multiplicity; a bare ``name^k`` is the element
    of that name if one exists, otherwise ``name`` repeated ``k`` times."""
    m = re.fullmatch(r"\(?(.+?)\)?\^\[(\d+)\]", tok)
    if m:
        return " ".join(m.group(1).split()), int(m.group(2))
    if tok.startswith("(") and tok.endswith(")"):
        tok = tok[1:-1]
    tok = " ".join(tok.split())
    if tok in group._name_index:
        return tok, 1
    m = re.fullmatch(r"\(?(.+?)\)?\^(\d+)", tok)
    if m and m.group(1) in group._name_index:
        return m.group(1), int(m.group(2))
    raise ValidationError(f"unknown term {tok!r}")


_TOKEN_RE = re.compile(r"\(([^()]*)\)(?:\^\[?(\d+)\]?)?|(\S+)")


def _tokenize(group: FiniteGroup, text: str) -> Iterator[tuple[str, int]]:
    """Yield ``(element name, multiplicity)`` pairs from the text form.

    Names containing spaces are parenthesized: ``(a t)^[3]``.  A
    parenthesized name followed by ``^k`` is always a multiplicity.
    """
    for m in _TOKEN_RE.finditer(text):
        if m.group(1) is not None:
            name = " ".join(m.group(1).split())
            yield name, int(m.group(2)) if m.group(2) else 1
            continue
        tok = m.group(3)
        if tok in ("·", "*", "."):
            continue
        yield _parse_term(group, tok)


class ProductTable:
    """Product sets of every sub-multiset of a sequence.

    ``pi[r]`` is the bit mask of ordered products of the sub-multiset with
    mixed-radix rank ``r`` (digit ``i`` = multiplicity of ``support[i]``).
    Ranks are visited in increasing order, so each ``T - g`` is ready before
    ``T``.  The per-length unions ``pi_n`` are filled during the same pass.
    """

    def __init__(self, seq: Sequence, budget: int | None = None):
        self.seq = seq
        self.group = seq.group
        self.support = seq.support
        self.radices = tuple(seq.counts[g] + 1 for g in self.support)
        strides, size = [], 1
        for r in self.radices:
            strides.append(size)
            size *= r
        self.strides = tuple(strides)
        self.size = size
        budget = default_budget() if budget is None else budget
        if size > budget:
            raise CapacityError(f"sequence has {size} sub-multisets, budget is {budget}")
        self.full = size - 1
        self._build()

    def _build(self) -> None:
        G = self.group
        ident = 1 << G.identity
        width, tables = G.right_mul_tables
        single = all(len(t) == 1 for t in tables)
        support, radices, strides = self.support, self.radices, self.strides
        k = len(support)
        pi = [0] * self.size
        lengths = [0] * self.size
        pi_n = [0] * (len(self.seq) + 1)
        pi[0] = ident
        pi_n[0] = ident
        if single:
            tabs = [tables[g][0] for g in support]
            rmul = None
        else:
            rmul = G.right_multiply
        digits = [0] * k
        for r in range(1, self.size):
            i = 0
            while digits[i] == radices[i] - 1:
                digits[i] = 0
                i += 1
            digits[i] += 1
            lengths[r] = lengths[r - strides[i]] + 1
            mask = 0
            for j in range(k):
                if digits[j]:
                    prev = pi[r - strides[j]]
                    mask |= tabs[j][prev] if rmul is None else rmul(prev, support[j])
            pi[r] = mask
            pi_n[lengths[r]] |= mask
        self.pi = pi
        self.lengths = lengths
        self.pi_n = pi_n

    # -- rank helpers ---------------------------------------------------------

    def rank(self, sub: Sequence) -> int:
        if not sub.divides(self.seq):
            raise DomainError("not a subsequence")
        return sum(sub.counts[g] * s for g, s in zip(self.support, self.strides))

    def digits(self, r: int) -> list[int]:
        out = []
        for rad in self.radices:
            r, d = divmod(r, rad)
            out.append(d)
        return out

    def subsequence(self, r: int) -> Sequence:
        counts = [0] * self.group.order
        for g, d in zip(self.support, self.digits(r)):
            counts[g] = d
        return Sequence(self.group, tuple(counts))

    def contains_identity(self, r: int) -> bool:
        return bool(self.pi[r] >> self.group.identity & 1)

    # -- queries --------------------------------------------------------------

    def _set(self, mask: int) -> ElementSet:
        return ElementSet(mask, self.group.order)

    def product_set(self, sub: Sequence | None = None) -> ElementSet:
        return self._set(self.pi[self.full if sub is None else self.rank(sub)])

    def subsequence_products(self, n: int | None = None) -> ElementSet:
        if n is None:
            mask = 0
            for m in self.pi_n[1:]:
                mask |= m
            return self._set(mask)
        if not 1 <= n <= len(self.seq):
            raise DomainError(f"n must lie in [1, {len(self.seq)}]")
        return self._set(self.pi_n[n])

    def split(self) -> tuple[int, int] | None:
        """Least-rank ``r`` with ``T_r`` and its complement both product-one."""
        e = self.group.identity
        pi, full = self.pi, self.full
        for r in range(1, full):
            if pi[r] >> e & 1 and pi[full - r] >> e & 1:
                return r, full - r
        return None

    def ordering(self, r: int | None = None, target: int | None = None) -> list[int] | None:
        """An explicit ordering of ``T_r`` whose product is ``target``.

        Defaults to the whole sequence and the identity.  Walks the table
        backwards, peeling off a last factor each step.
        """
        G = self.group
        r = self.full if r is None else r
        target = G.identity if target is None else target
        if not self.pi[r] >> target & 1:
            return None
        out = []
        while r:
            for j, g in enumerate(self.support):
                d = (r // self.strides[j]) % self.radices[j]
                if not d:
                    continue
                prev = G.table[target][G.inverses[g]]
                if self.pi[r - self.strides[j]] >> prev & 1:
                    out.append(g)
                    r -= self.strides[j]
                    target = prev
                    break
        out.reverse()
        return out


def product_set(seq: Sequence, budget: int | None = None) -> ElementSet:
    return seq.product_set(budget)


def subsequence_products(seq: Sequence, n: int | None = None, budget: int | None = None) -> ElementSet:
    return seq.subsequence_products(n, budget)


def sigma_variants(seq: Sequence, n: int | None = None, budget: int | None = None) -> ElementSet:
    """Subsequence sums over an abelian group (all, or those of length n)."""
    if not seq.group.is_abelian:
        raise DomainError("sums are only defined over abelian groups")
    if n is not None and n < 1:
        raise DomainError("n must be positive")
    return seq.table(budget).subsequence_products(n)


def classify(seq: Sequence, budget: int | None = None) -> dict:
    t = seq.table(budget)
    e = seq.group.identity
    return {
        "product_one": bool(t.pi[t.full] >> e & 1),
        "product_one_free": not any(m >> e & 1 for m in t.pi_n[1:]),
        "squarefree": seq.max_multiplicity <= 1,
    }


@dataclass(frozen=True)
class SmoothCertificate:
    """``S = (n_1 g) ... (n_l g)`` with sums filling ``{g, 2g, ..., m g}``."""

    g: int
    coefficients: tuple[int, ...]
    m: int


def _cyclic_logs(G: FiniteGroup, g: int) -> dict[int, int]:
    logs, x = {}, G.identity
    for k in range(G.orders[g]):
        logs[x] = k
        x = G.table[x][g]
    return logs


def smoothness(seq: Sequence, g: int | None = None) -> SmoothCertificate | None:
    """Smoothness certificate over a cyclic group.

    With ``g`` given, test whether ``seq`` is ``g``-smooth; otherwise try the
    generators of the group in increasing index order.
    """
    G = seq.group
    if not (G.is_abelian and G.is_cyclic):
        raise DomainError("smoothness is defined over cyclic groups")
    if len(seq) < 1:
        raise DomainError("smoothness needs a non-empty sequence")
    if g is None:
        for h in range(G.order):
            if G.orders[h] == G.order:
                cert = smoothness(seq, h)
                if cert is not None:
                    return cert
        return None
    G._check(g)
    logs = _cyclic_logs(G, g)
    coeffs = []
    for x, c in enumerate(seq.counts):
        if c:
            k = logs.get(x)
            if not k:
                return None
            coeffs += [k] * c
    coeffs.sort()
    m = sum(coeffs)
    if coeffs[0] != 1 or m >= G.orders[g]:
        return None
    want = 0
    x = G.identity
    for _ in range(m):
        x = G.table[x][g]
        want |= 1 << x
    if seq.subsequence_products().mask != want:
        return None
    return SmoothCertificate(g, tuple(coeffs), m)


def load_sequence(group: FiniteGroup | None, text: str) -> Sequence:
    """Parse text form, or JSON (``{"group":..., "terms": [...]}``)."""
    text = text.strip()
    if text.startswith("{"):
        try:
            data = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ValidationError(f"bad sequence JSON: {exc}") from None
        if group is not None and "group" in data:
            other = build_group(data["group"])
            if other.table != group.table:
                raise ValidationError("sequence JSON group differs from --group")
        return Sequence.from_json(data, group)
    if group is None:
        raise ValidationError("a text sequence needs a group")
    return Sequence.parse(group, text)
