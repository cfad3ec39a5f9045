"""Finite groups given by Cayley tables.

Elements are the integers ``0 .. order-1``.  Cyclic, dihedral and dicyclic
groups use a fixed encoding so that a word such as ``a^i t`` always maps to
the same index:

* cyclic(n):   ``i`` is the residue ``i`` (additive model)
* dihedral(n): ``i < n`` is ``a^i``, ``n <= i < 2n`` is ``a^(i-n) t``
* dicyclic(n): ``i < 2n`` is ``a^i``, ``2n <= i < 4n`` is ``a^(i-2n) t``
"""

from __future__ import annotations

import itertools
import json
import re
from collections import deque
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Iterator, Sequence

from .errors import CapacityError, DomainError, ValidationError

MAX_ORDER = 64


@dataclass(frozen=True)
class ElementSet:
    """A subset of a group's elements stored as a bit mask."""

    mask: int
    order: int

    def __post_init__(self):
        if self.mask < 0 or self.mask >> self.order:
            raise ValidationError(f"mask {self.mask:#x} has bits beyond order {self.order}")

    @classmethod
    def of(cls, order: int, members: Iterable[int]) -> "ElementSet":
        mask = 0
        for x in members:
            if not 0 <= x < order:
                raise ValidationError(f"element {x} out of range for order {order}")
            mask |= 1 << x
        return cls(mask, order)

    def __contains__(self, x: int) -> bool:
        return bool(self.mask >> x & 1)

    def __iter__(self) -> Iterator[int]:
        m = self.mask
        while m:
            low = m & -m
            yield low.bit_length() - 1
            m ^= low

    def __len__(self) -> int:
        return self.mask.bit_count()

    def __or__(self, other: "ElementSet") -> "ElementSet":
        return ElementSet(self.mask | other.mask, self.order)

    def __and__(self, other: "ElementSet") -> "ElementSet":
        return ElementSet(self.mask & other.mask, self.order)

    def issubset(self, other: "ElementSet") -> bool:
        return self.mask & ~other.mask == 0

    def members(self) -> list[int]:
        return list(self)


@dataclass(frozen=True, eq=False)
class Homomorphism:
    """A group homomorphism given by the image of every element."""

    source: "FiniteGroup"
    target: "FiniteGroup"
    images: tuple[int, ...]

    def __post_init__(self):
        src, dst = self.source, self.target
        if len(self.images) != src.order:
            raise DomainError("homomorphism must give one image per source element")
        if any(not 0 <= y < dst.order for y in self.images):
            raise DomainError("homomorphism image out of range")
        img = self.images
        for x in range(src.order):
            row = src.table[x]
            trow = dst.table[img[x]]
            for y in range(src.order):
                if img[row[y]] != trow[img[y]]:
                    raise DomainError(f"map is not a homomorphism at ({x}, {y})")

    def __call__(self, x: int) -> int:
        return self.images[x]

    def kernel(self) -> ElementSet:
        e = self.target.identity
        return ElementSet.of(self.source.order, (x for x, y in enumerate(self.images) if y == e))


@dataclass(frozen=True, eq=False)
class FiniteGroup:
    """A validated finite group.  Immutable; safe to share between workers."""

    table: tuple[tuple[int, ...], ...]
    identity: int
    inverses: tuple[int, ...]
    names: tuple[str, ...]
    kind: tuple = ("generic",)
    _name_index: dict = field(default=None, repr=False, compare=False)

    @property
    def order(self) -> int:
        return len(self.table)

    def __eq__(self, other) -> bool:
        if self is other:
            return True
        return isinstance(other, FiniteGroup) and self.table == other.table and self.names == other.names

    def __hash__(self) -> int:
        return hash(self.names)

    # -- element operations -------------------------------------------------

    def multiply(self, x: int, y: int) -> int:
        self._check(x)
        self._check(y)
        return self.table[x][y]

    def inverse(self, x: int) -> int:
        self._check(x)
        return self.inverses[x]

    def element_order(self, x: int) -> int:
        self._check(x)
        k, y = 1, x
        while y != self.identity:
            y = self.table[y][x]
            k += 1
        return k

    def power(self, x: int, k: int) -> int:
        self._check(x)
        if k < 0:
            x, k = self.inverses[x], -k
        y = self.identity
        for _ in range(k):
            y = self.table[y][x]
        return y

    def product(self, xs: Iterable[int]) -> int:
        y = self.identity
        for x in xs:
            y = self.table[y][x]
        return y

    def element(self, name: str) -> int:
        try:
            return self._name_index[name]
        except KeyError:
            raise ValidationError(f"unknown element name {name!r}") from None

    def _check(self, x: int) -> None:
        if not (isinstance(x, int) and 0 <= x < self.order):
            raise ValidationError(f"element index {x!r} out of range for order {self.order}")

    # -- structure ----------------------------------------------------------

    @cached_property
    def is_abelian(self) -> bool:
        t = self.table
        return all(t[x][y] == t[y][x] for x in range(self.order) for y in range(x))

    @cached_property
    def orders(self) -> tuple[int, ...]:
        return tuple(self.element_order(x) for x in range(self.order))

    @cached_property
    def exponent(self) -> int:
        from math import lcm

        return lcm(*self.orders)

    @cached_property
    def right_mul_tables(self) -> tuple[int, tuple[tuple[tuple[int, ...], ...], ...]]:
        """Lookup tables for ``mask -> {x*g : x in mask}``.

        Returns ``(width, tables)`` where ``tables[g][c][chunk]`` is the image
        of the ``c``-th ``width``-bit chunk.  Small groups get one chunk.
        """
        n = self.order
        width = n if n <= 12 else 8
        nchunks = -(-n // width)
        tables = []
        for g in range(n):
            col = [self.table[x][g] for x in range(n)]
            per_chunk = []
            for c in range(nchunks):
                base = c * width
                span = min(width, n - base)
                bits = [1 << col[base + i] for i in range(span)]
                tab = [0] * (1 << span)
                for m in range(1, 1 << span):
                    low = m & -m
                    tab[m] = tab[m ^ low] | bits[low.bit_length() - 1]
                per_chunk.append(tuple(tab))
            tables.append(tuple(per_chunk))
        return width, tuple(tables)

    def right_multiply(self, mask: int, g: int) -> int:
        """``{x*g : x in mask}`` for a raw bit mask."""
        width, tables = self.right_mul_tables
        tabs = tables[g]
        if len(tabs) == 1:
            return tabs[0][mask]
        full = (1 << width) - 1
        out = 0
        for tab in tabs:
            out |= tab[mask & full]
            mask >>= width
        return out

    @property
    def is_cyclic(self) -> bool:
        return self.order in self.orders

    @property
    def presentation(self) -> tuple[int, int] | None:
        """Canonical ``(a, t)`` for dihedral and dicyclic groups, else ``None``."""
        kind = self.kind[0]
        if kind == "dihedral":
            return 1, self.kind[1]
        if kind == "dicyclic":
            return 1, 2 * self.kind[1]
        return None

    def full_set(self) -> ElementSet:
        return ElementSet((1 << self.order) - 1, self.order)

    def element_set(self, members: Iterable[int]) -> ElementSet:
        return ElementSet.of(self.order, members)

    def generated_subgroup(self, seed: ElementSet | Iterable[int]) -> ElementSet:
        seed = seed if isinstance(seed, ElementSet) else self.element_set(seed)
        if not len(seed):
            raise DomainError("generated_subgroup needs a non-empty seed")
        gens = seed.members()
        members = {self.identity}
        frontier = [self.identity]
        while frontier:
            nxt = []
            for x in frontier:
                for g in gens:
                    y = self.table[x][g]
                    if y not in members:
                        members.add(y)
                        nxt.append(y)
            frontier = nxt
        # finite group: closure under multiplication already contains inverses
        return self.element_set(members)

    def left_stabilizer(self, subset: ElementSet | Iterable[int]) -> ElementSet:
        subset = subset if isinstance(subset, ElementSet) else self.element_set(subset)
        if not len(subset):
            raise DomainError("the stabilizer of the empty set is the whole group; refusing")
        members = subset.members()
        mask = subset.mask
        stab = []
        for g in range(self.order):
            row = self.table[g]
            if all(mask >> row[x] & 1 for x in members):
                stab.append(g)
        return self.element_set(stab)

    def commutator_subgroup(self) -> ElementSet:
        t, inv = self.table, self.inverses
        comms = {
            t[t[inv[g]][inv[h]]][t[g][h]] for g in range(self.order) for h in range(self.order)
        }
        return self.generated_subgroup(comms)

    def is_normal(self, sub: ElementSet) -> bool:
        t, inv = self.table, self.inverses
        mask = sub.mask
        for g in range(self.order):
            for n in sub:
                if not mask >> t[t[g][n]][inv[g]] & 1:
                    return False
        return True

    def is_subgroup(self, sub: ElementSet) -> bool:
        if self.identity not in sub:
            return False
        mask = sub.mask
        return all(mask >> self.table[x][y] & 1 for x in sub for y in sub)

    def quotient(self, normal: ElementSet | Iterable[int]) -> tuple["FiniteGroup", Homomorphism]:
        """``G/N`` together with the coset projection."""
        normal = normal if isinstance(normal, ElementSet) else self.element_set(normal)
        if not self.is_subgroup(normal):
            raise DomainError("quotient needs a subgroup")
        if not self.is_normal(normal):
            raise DomainError("quotient needs a normal subgroup")
        coset_of = [-1] * self.order
        reps = []
        for g in range(self.order):
            if coset_of[g] < 0:
                idx = len(reps)
                reps.append(g)
                for n in normal:
                    coset_of[self.table[g][n]] = idx
        table = [[coset_of[self.table[a][b]] for b in reps] for a in reps]
        names = ["{" + ", ".join(self.names[self.table[r][n]] for n in normal) + "}" for r in reps]
        q = from_table(table, names=names)
        return q, Homomorphism(self, q, tuple(coset_of))

    @cached_property
    def _generators(self) -> tuple[int, ...]:
        """A small generating set, chosen greedily by decreasing element order."""
        pres = self.presentation
        if pres is not None:
            return pres
        if self.order == 1:
            return ()
        gens: list[int] = []
        span = self.element_set([self.identity])
        by_order = sorted(range(self.order), key=lambda x: (-self.orders[x], x))
        for g in by_order:
            if g not in span:
                gens.append(g)
                span = self.generated_subgroup(gens)
                if len(span) == self.order:
                    break
        return tuple(gens)

    @cached_property
    def automorphisms(self) -> tuple[tuple[int, ...], ...]:
        """All automorphisms as image tuples, identity first, then sorted.

        Backtracks over images of a small generating set; each candidate is
        extended along a BFS spanning tree and checked on the generators.
        """
        if self.order > MAX_ORDER:
            raise CapacityError(f"automorphisms limited to order <= {MAX_ORDER}")
        gens = self._generators
        if not gens:
            return (tuple(range(self.order)),)
        # spanning tree: every element as parent * generator
        parent = {self.identity: None}
        queue = deque([self.identity])
        bfs = []
        while queue:
            x = queue.popleft()
            for k, g in enumerate(gens):
                y = self.table[x][g]
                if y not in parent:
                    parent[y] = (x, k)
                    bfs.append(y)
                    queue.append(y)
        t = self.table
        orders = self.orders
        candidates = [[y for y in range(self.order) if orders[y] == orders[g]] for g in gens]
        found = []
        for imgs in itertools.product(*candidates):
            phi = [-1] * self.order
            phi[self.identity] = self.identity
            for y in bfs:
                x, k = parent[y]
                phi[y] = t[phi[x]][imgs[k]]
            if len(set(phi)) != self.order:
                continue
            if all(phi[t[x][g]] == t[phi[x]][imgs[k]] for x in range(self.order) for k, g in enumerate(gens)):
                found.append(tuple(phi))
        ident = tuple(range(self.order))
        found.sort()
        found.remove(ident)
        return (ident, *found)

    def automorphisms_preserving(self, subset: ElementSet) -> tuple[tuple[int, ...], ...]:
        """Automorphisms mapping ``subset`` onto itself."""
        mask = subset.mask
        return tuple(p for p in self.automorphisms if all(mask >> p[x] & 1 for x in subset))

    # -- serialization ------------------------------------------------------

    def to_json(self) -> dict:
        if self.kind[0] in ("cyclic", "dihedral", "dicyclic"):
            return {"kind": self.kind[0], "n": self.kind[1]}
        if self.kind[0] == "abelian":
            return {"kind": "abelian", "moduli": list(self.kind[1:])}
        return {
            "order": self.order,
            "identity": self.identity,
            "names": list(self.names),
            "table": [x for row in self.table for x in row],
        }

    def label(self) -> str:
        kind = self.kind[0]
        if kind in ("cyclic", "dihedral", "dicyclic"):
            return f"{kind}:{self.kind[1]}"
        if kind == "abelian":
            return "abelian:" + "x".join(map(str, self.kind[1:]))
        return f"generic:{self.order}"

    def __repr__(self) -> str:
        return f"FiniteGroup({self.label()})"


def _validate(table: Sequence[Sequence[int]]) -> tuple[int, tuple[int, ...]]:
    n = len(table)
    if n == 0:
        raise ValidationError("empty Cayley table")
    if n > MAX_ORDER:
        raise CapacityError(f"groups of order > {MAX_ORDER} are not supported")
    full = set(range(n))
    for row in table:
        if len(row) != n or set(row) != full:
            raise ValidationError("Cayley table is not a Latin square")
    for c in range(n):
        if {table[r][c] for r in range(n)} != full:
            raise ValidationError("Cayley table is not a Latin square")
    ids = [e for e in range(n) if all(table[e][x] == x and table[x][e] == x for x in range(n))]
    if len(ids) != 1:
        raise ValidationError("Cayley table has no two-sided identity")
    e = ids[0]
    for x in range(n):
        tx = table[x]
        for y in range(n):
            txy = table[tx[y]]
            ty = table[y]
            for z in range(n):
                if txy[z] != tx[ty[z]]:
                    raise ValidationError(f"Cayley table is not associative at ({x}, {y}, {z})")
    inverses = tuple(table[x].index(e) for x in range(n))
    return e, inverses


def from_table(table: Sequence[Sequence[int]], names: Sequence[str] | None = None, kind: tuple = ("generic",)) -> FiniteGroup:
    """Validate a Cayley table and wrap it as a group."""
    table = tuple(tuple(int(x) for x in row) for row in table)
    e, inverses = _validate(table)
    if names is None:
        names = [str(i) for i in range(len(table))]
    names = tuple(str(s) for s in names)
    if len(names) != len(table) or len(set(names)) != len(names):
        raise ValidationError("element names must be unique, one per element")
    return FiniteGroup(table, e, inverses, names, kind, {s: i for i, s in enumerate(names)})


def _rotation_name(i: int) -> str:
    return "1" if i == 0 else "a" if i == 1 else f"a^{i}"


def _reflection_name(i: int) -> str:
    return "t" if i == 0 else "a t" if i == 1 else f"a^{i} t"


def cyclic(n: int) -> FiniteGroup:
    if n < 1:
        raise DomainError("cyclic groups need n >= 1")
    table = [[(i + j) % n for j in range(n)] for i in range(n)]
    return from_table(table, [str(i) for i in range(n)], ("cyclic", n))


def dihedral(n: int) -> FiniteGroup:
    """The dihedral group of order 2n: a^n = t^2 = 1, t a = a^-1 t."""
    if n < 2:
        raise DomainError("dihedral groups need n >= 2")

    def mul(x, y):
        a, e = x % n, x // n
        b, f = y % n, y // n
        return (a + (b if e == 0 else -b)) % n + n * ((e + f) % 2)

    table = [[mul(x, y) for y in range(2 * n)] for x in range(2 * n)]
    names = [_rotation_name(i) for i in range(n)] + [_reflection_name(i) for i in range(n)]
    return from_table(table, names, ("dihedral", n))


def dicyclic(n: int) -> FiniteGroup:
    """The dicyclic group of order 4n: a^2n = 1, t^2 = a^n, t a = a^-1 t."""
    if n < 2:
        raise DomainError("dicyclic groups need n >= 2")
    m = 2 * n

    def mul(x, y):
        a, e = x % m, x // m
        b, f = y % m, y // m
        c = a + (b if e == 0 else -b)
        if e and f:
            return (c + n) % m
        return c % m + m * (e + f)

    table = [[mul(x, y) for y in range(2 * m)] for x in range(2 * m)]
    names = [_rotation_name(i) for i in range(m)] + [_reflection_name(i) for i in range(m)]
    return from_table(table, names, ("dicyclic", n))


def abelian(*moduli: int) -> FiniteGroup:
    """Direct sum of cyclic groups, elements named ``(i,j,...)``."""
    if not moduli or any(m < 1 for m in moduli):
        raise DomainError("abelian groups need positive moduli")
    if len(moduli) == 1:
        return cyclic(moduli[0])
    elems = list(itertools.product(*(range(m) for m in moduli)))
    index = {v: i for i, v in enumerate(elems)}
    table = [
        [index[tuple((a + b) % m for a, b, m in zip(u, v, moduli))] for v in elems] for u in elems
    ]
    names = ["(" + ",".join(map(str, v)) + ")" for v in elems]
    return from_table(table, names, ("abelian", *moduli))


_SPEC_RE = re.compile(r"^\s*(cyclic|dihedral|dicyclic|abelian|C|D|Q)\s*[:_]?\s*([0-9x, ]+)\s*$", re.I)


def build_group(spec) -> FiniteGroup:
    """Build a group from ``"dihedral:5"``, a JSON-style dict, or a raw table.

    Accepted string forms: ``cyclic:n``, ``dihedral:n``, ``dicyclic:n``,
    ``abelian:2x2``.  Dicts follow the group file format.
    """
    if isinstance(spec, FiniteGroup):
        return spec
    if isinstance(spec, str):
        m = _SPEC_RE.match(spec)
        if not m:
            raise ValidationError(f"unrecognized group spec {spec!r}")
        kind, arg = m.group(1).lower(), m.group(2)
        kind = {"c": "cyclic", "d": "dihedral", "q": "dicyclic"}.get(kind, kind)
        try:
            nums = [int(p) for p in re.split(r"[x, ]+", arg.strip()) if p]
        except ValueError:
            raise ValidationError(f"bad group parameters in {spec!r}") from None
        if kind == "abelian":
            return abelian(*nums)
        if len(nums) != 1:
            raise ValidationError(f"{kind} takes one parameter")
        return {"cyclic": cyclic, "dihedral": dihedral, "dicyclic": dicyclic}[kind](nums[0])
    if isinstance(spec, dict):
        if "kind" in spec:
            kind = spec["kind"]
            if kind == "abelian":
                return abelian(*spec["moduli"])
            if kind not in ("cyclic", "dihedral", "dicyclic"):
                raise ValidationError(f"unknown group kind {kind!r}")
            return build_group(f"{kind}:{int(spec['n'])}")
        try:
            n = int(spec["order"])
            flat = list(spec["table"])
        except (KeyError, TypeError, ValueError):
            raise ValidationError("group JSON needs 'order' and 'table'") from None
        if len(flat) != n * n:
            raise ValidationError("table must have order*order entries")
        g = from_table([flat[i * n:(i + 1) * n] for i in range(n)], spec.get("names"))
        if "identity" in spec and int(spec["identity"]) != g.identity:
            raise ValidationError("declared identity does not match the table")
        return g
    if isinstance(spec, (list, tuple)):
        return from_table(spec)
    raise ValidationError(f"cannot build a group from {type(spec).__name__}")


def load_group(text: str) -> FiniteGroup:
    """Parse either a group spec string or JSON text."""
    text = text.strip()
    if text.startswith("{") or text.startswith("["):
        try:
            return build_group(json.loads(text))
        except json.JSONDecodeError as exc:
            raise ValidationError(f"bad group JSON: {exc}") from None
    return build_group(text)
