"""Concrete finite p-groups and subgroup-level queries.

Elements are dense indices ``0..n-1`` with the identity at index 0.
Subgroups are bitmasks over element indices, so all set operations are
machine-word AND/OR on Python ints.
"""
from __future__ import annotations

import functools
import itertools
from dataclasses import dataclass, field

import numpy as np

from .errors import BadFile, BadSpec, NotAGroup, NotAPGroup, SizeLimit

MAX_ORDER = 256


def _smallest_prime_factor(n: int) -> int:
    d = 2
    while d * d <= n:
        if n % d == 0:
            return d
        d += 1
    return n


class FiniteGroup:
    """A finite p-group given by its multiplication table.

    Attributes:
        order: number of elements.
        table: order x order numpy array, ``table[g, h]`` = index of g*h.
        identity: always 0.
        inverse: inverse[g] = index of g^-1.
        prime: the prime p with order = p^k.
        element_order: element_order[g] = multiplicative order of g.
        exponent: max element order.
        names: optional printable names, for CLI output only.
    """

    identity = 0

    def __init__(self, table, names=None, check: bool = True):
        table = np.asarray(table, dtype=np.int16)
        if table.ndim != 2 or table.shape[0] != table.shape[1]:
            raise NotAGroup("multiplication table must be square")
        n = table.shape[0]
        if n < 1:
            raise NotAGroup("empty table")
        if n > MAX_ORDER:
            raise SizeLimit(f"group order {n} exceeds the supported maximum {MAX_ORDER}")
        self.order = n
        self.table = table
        self.names = list(names) if names is not None else [str(i) for i in range(n)]
        if check:
            self._validate()
        self.inverse = np.empty(n, dtype=np.int16)
        for g in range(n):
            self.inverse[g] = int(np.nonzero(table[g] == 0)[0][0])
        self.element_order = np.array([self._order_of(g) for g in range(n)], dtype=np.int64)
        self.exponent = int(self.element_order.max())
        if n == 1:
            self.prime = None
        else:
            p = _smallest_prime_factor(n)
            m = n
            while m % p == 0:
                m //= p
            if m != 1:
                raise NotAPGroup(f"order {n} is not a power of a prime")
            self.prime = p
        self.full_mask = (1 << n) - 1
        self._pow_cache: dict[int, list[int]] = {}

    def _validate(self) -> None:
        t = self.table
        n = self.order
        if t.min() < 0 or t.max() >= n:
            raise NotAGroup("table entries out of range")
        if not (np.array_equal(t[0], np.arange(n)) and np.array_equal(t[:, 0], np.arange(n))):
            raise NotAGroup("element 0 is not a two-sided identity")
        for g in range(n):
            if len(set(t[g].tolist())) != n or len(set(t[:, g].tolist())) != n:
                raise NotAGroup(f"row or column {g} is not a permutation")
            if 0 not in t[g]:
                raise NotAGroup(f"element {g} has no inverse")
        # (gh)k == g(hk), vectorized over all triples
        left = t[t, :]
        right = t[:, t]
        if not np.array_equal(left, right):
            bad = np.argwhere(left != right)[0]
            raise NotAGroup(f"associativity fails at triple {tuple(int(x) for x in bad)}")

    def _order_of(self, g: int) -> int:
        k, x = 1, g
        while x != 0:
            x = int(self.table[x, g])
            k += 1
        return k

    def mul(self, a: int, b: int) -> int:
        return int(self.table[a, b])

    def inv(self, a: int) -> int:
        return int(self.inverse[a])

    def power(self, g: int, k: int) -> int:
        """g^k for any integer k >= 0."""
        powers = self.powers(g)
        return powers[k % len(powers)]

    def powers(self, g: int) -> list[int]:
        """[e, g, g^2, ...] up to order(g) - 1."""
        cached = self._pow_cache.get(g)
        if cached is None:
            cached = [0]
            x = g
            while x != 0:
                cached.append(x)
                x = int(self.table[x, g])
            self._pow_cache[g] = cached
        return cached

    def commutes(self, a: int, b: int) -> bool:
        return self.table[a, b] == self.table[b, a]

    def is_abelian(self) -> bool:
        return bool(np.array_equal(self.table, self.table.T))

    def closure_mask(self, gens) -> int:
        """Bitmask of the subgroup generated by the given element indices."""
        mask = 1
        frontier = [0]
        pending = [g for g in gens]
        members = [0]
        for g in pending:
            if not (mask >> g) & 1:
                mask |= 1 << g
                members.append(g)
                frontier.append(g)
        changed = True
        while changed:
            changed = False
            for a in list(members):
                for b in list(members):
                    c = int(self.table[a, b])
                    if not (mask >> c) & 1:
                        mask |= 1 << c
                        members.append(c)
                        changed = True
        return mask

    def elements_of(self, mask: int) -> list[int]:
        return [i for i in range(self.order) if (mask >> i) & 1]

    def __repr__(self) -> str:
        return f"FiniteGroup(order={self.order}, prime={self.prime}, exponent={self.exponent})"


@functools.total_ordering
class Subgroup:
    """A subgroup of a parent group, canonically a bitmask of member indices."""

    def __init__(self, parent: FiniteGroup, members: int):
        self.parent = parent
        self.members = members
        self.order = members.bit_count()

    @classmethod
    def generated(cls, parent: FiniteGroup, gens) -> "Subgroup":
        return cls(parent, parent.closure_mask(gens))

    def elements(self) -> list[int]:
        return self.parent.elements_of(self.members)

    def contains(self, g: int) -> bool:
        return bool((self.members >> g) & 1)

    def issubset(self, other: "Subgroup") -> bool:
        return self.members & other.members == self.members

    @functools.cached_property
    def is_cyclic(self) -> bool:
        return any(
            self.parent.element_order[g] == self.order for g in self.elements()
        )

    @functools.cached_property
    def is_abelian(self) -> bool:
        els = self.elements()
        return all(
            self.parent.commutes(a, b) for a, b in itertools.combinations(els, 2)
        )

    @functools.cached_property
    def is_elementary_p2(self) -> bool:
        p = self.parent.prime
        if p is None or self.order != p * p:
            return False
        return all(
            self.parent.element_order[g] == p for g in self.elements() if g != 0
        ) and self.is_abelian

    def generator(self) -> int:
        """Smallest element generating the subgroup; requires cyclicity."""
        for g in self.elements():
            if self.parent.element_order[g] == self.order:
                return g
        raise ValueError("subgroup is not cyclic")

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, Subgroup)
            and self.parent is other.parent
            and self.members == other.members
        )

    def __lt__(self, other: "Subgroup") -> bool:
        return self.members < other.members

    def __hash__(self) -> int:
        return hash((id(self.parent), self.members))

    def __repr__(self) -> str:
        return f"Subgroup(order={self.order}, members={self.elements()})"


# ---------------------------------------------------------------------------
# group constructors


def cyclic_group(p: int, n: int) -> FiniteGroup:
    if p < 2 or n < 1:
        raise BadSpec("cyclic(p, n) needs p >= 2 and n >= 1")
    m = p**n
    table = (np.arange(m)[:, None] + np.arange(m)[None, :]) % m
    names = [f"g^{i}" if i else "e" for i in range(m)]
    return FiniteGroup(table, names=names)


def elementary_group(p: int, k: int) -> FiniteGroup:
    if p < 2 or k < 1:
        raise BadSpec("elementary(p, k) needs p >= 2 and k >= 1")
    m = p**k
    digits = np.array([[(i // p**j) % p for j in range(k)] for i in range(m)])
    table = np.zeros((m, m), dtype=np.int64)
    for i in range(m):
        s = (digits[i] + digits) % p
        table[i] = s @ np.array([p**j for j in range(k)])
    names = ["(" + ",".join(str(d) for d in digits[i]) + ")" for i in range(m)]
    return FiniteGroup(table, names=names)


_Q8_UNITS = {
    # quaternion units as (sign, axis) with axis in {1:1, i, j, k}
    0: (1, "1"), 1: (-1, "1"), 2: (1, "i"), 3: (-1, "i"),
    4: (1, "j"), 5: (-1, "j"), 6: (1, "k"), 7: (-1, "k"),
}

_QUAT_MUL = {
    ("1", "1"): (1, "1"), ("1", "i"): (1, "i"), ("1", "j"): (1, "j"), ("1", "k"): (1, "k"),
    ("i", "1"): (1, "i"), ("i", "i"): (-1, "1"), ("i", "j"): (1, "k"), ("i", "k"): (-1, "j"),
    ("j", "1"): (1, "j"), ("j", "i"): (-1, "k"), ("j", "j"): (-1, "1"), ("j", "k"): (1, "i"),
    ("k", "1"): (1, "k"), ("k", "i"): (1, "j"), ("k", "j"): (-1, "i"), ("k", "k"): (-1, "1"),
}


def quaternion8() -> FiniteGroup:
    idx = {(s, a): i for i, (s, a) in _Q8_UNITS.items()}
    table = np.zeros((8, 8), dtype=np.int64)
    for a in range(8):
        for b in range(8):
            sa, xa = _Q8_UNITS[a]
            sb, xb = _Q8_UNITS[b]
            s, x = _QUAT_MUL[(xa, xb)]
            table[a, b] = idx[(s * sa * sb, x)]
    names = ["1", "-1", "i", "-i", "j", "-j", "k", "-k"]
    return FiniteGroup(table, names=names)


def dihedral8() -> FiniteGroup:
    # presentation x^4 = 1, y^2 = 1, y x y^-1 = x^-1; element x^a y^b
    def idx(a: int, b: int) -> int:
        return (a % 4) * 2 + (b % 2)

    table = np.zeros((8, 8), dtype=np.int64)
    for a, b in itertools.product(range(4), range(2)):
        for c, d in itertools.product(range(4), range(2)):
            # (x^a y^b)(x^c y^d) = x^(a + c*(-1)^b) y^(b+d)
            aa = a + (c if b == 0 else -c)
            table[idx(a, b), idx(c, d)] = idx(aa, b + d)
    names = [f"x^{a}y^{b}" for a in range(4) for b in range(2)]
    return FiniteGroup(table, names=names)


def heisenberg(p: int) -> FiniteGroup:
    """Upper unitriangular 3x3 matrices over Z_p; order p^3, exponent p for odd p."""
    if p < 2:
        raise BadSpec("heisenberg(p) needs a prime p")
    els = [(a, b, c) for a in range(p) for b in range(p) for c in range(p)]
    # put the identity (0,0,0) first; enumeration above already does
    pos = {e: i for i, e in enumerate(els)}
    m = p**3
    table = np.zeros((m, m), dtype=np.int64)
    for i, (a, b, c) in enumerate(els):
        for j, (a2, b2, c2) in enumerate(els):
            table[i, j] = pos[((a + a2) % p, (b + b2) % p, (c + c2 + a * b2) % p)]
    names = [f"({a},{b},{c})" for a, b, c in els]
    return FiniteGroup(table, names=names)


def direct_product(g1: FiniteGroup, g2: FiniteGroup) -> FiniteGroup:
    n1, n2 = g1.order, g2.order
    t = (g1.table[:, :, None, None] * n2 + g2.table[None, None, :, :]).transpose(0, 2, 1, 3)
    table = t.reshape(n1 * n2, n1 * n2)
    names = [f"{a}*{b}" for a in g1.names for b in g2.names]
    return FiniteGroup(table, names=names)


def load_cayley_table(path: str) -> FiniteGroup:
    """Parse a .cay file: line 1 is n, then n rows of n zero-based indices."""
    try:
        with open(path) as fh:
            lines = [ln for ln in fh.read().splitlines()]
    except OSError as exc:
        raise BadFile(f"{path}: {exc}") from exc
    rows = [(i + 1, ln) for i, ln in enumerate(lines) if ln.strip()]
    if not rows:
        raise BadFile(f"{path}: empty file")
    first_lineno, first = rows[0]
    try:
        n = int(first.strip())
    except ValueError:
        raise BadFile(f"{path}:{first_lineno}: expected the group order, got {first!r}")
    if n < 1:
        raise BadFile(f"{path}:{first_lineno}: order must be positive")
    if len(rows) - 1 != n:
        raise BadFile(f"{path}: expected {n} table rows, found {len(rows) - 1}")
    table = np.zeros((n, n), dtype=np.int64)
    for r, (lineno, ln) in enumerate(rows[1:]):
        parts = ln.split()
        if len(parts) != n:
            raise BadFile(f"{path}:{lineno}: expected {n} entries, found {len(parts)}")
        for c, tok in enumerate(parts):
            try:
                v = int(tok)
            except ValueError:
                raise BadFile(f"{path}:{lineno}: column {c + 1}: not an integer: {tok!r}")
            if not 0 <= v < n:
                raise BadFile(f"{path}:{lineno}: column {c + 1}: index {v} out of range")
            table[r, c] = v
    return FiniteGroup(table)


@dataclass(frozen=True)
class GroupSpec:
    """Constructor tag for a built-in group, a table file, or a product."""

    kind: str
    args: tuple = ()

    def build(self) -> FiniteGroup:
        return build_group(self)


_REGISTRY_FIXED = {"Q8": quaternion8, "D8": dihedral8}


def parse_group_spec(text: str) -> GroupSpec:
    """Parse a registry string: Q8, D8, C{n}, E{p^k}, Heis{p}, table:path,
    and products joined with 'x' (e.g. Q8xC2)."""
    text = text.strip()
    if text.startswith("table:"):
        return GroupSpec("table", (text[len("table:"):],))
    parts = text.split("x")
    if len(parts) > 1:
        spec = parse_group_spec(parts[0])
        for part in parts[1:]:
            spec = GroupSpec("product", (spec, parse_group_spec(part)))
        return spec
    if text in _REGISTRY_FIXED:
        return GroupSpec(text)
    for prefix, kind in (("Heis", "heisenberg"), ("C", "cyclic"), ("E", "elementary")):
        if text.startswith(prefix) and text[len(prefix):].isdigit():
            m = int(text[len(prefix):])
            if m < 2:
                raise BadSpec(f"bad group spec {text!r}")
            p = _smallest_prime_factor(m)
            if kind == "heisenberg":
                return GroupSpec("heisenberg", (m,))
            k, q = 0, m
            while q % p == 0:
                q //= p
                k += 1
            if q != 1:
                raise BadSpec(f"{text!r}: {m} is not a prime power")
            return GroupSpec(kind, (p, k))
    raise BadSpec(f"unknown group spec {text!r}")


def build_group(spec: GroupSpec | str) -> FiniteGroup:
    if isinstance(spec, str):
        spec = parse_group_spec(spec)
    if spec.kind in _REGISTRY_FIXED:
        return _REGISTRY_FIXED[spec.kind]()
    if spec.kind == "cyclic":
        return cyclic_group(*spec.args)
    if spec.kind == "elementary":
        return elementary_group(*spec.args)
    if spec.kind == "heisenberg":
        return heisenberg(*spec.args)
    if spec.kind == "product":
        return direct_product(build_group(spec.args[0]), build_group(spec.args[1]))
    if spec.kind == "table":
        return load_cayley_table(spec.args[0])
    raise BadSpec(f"unknown spec kind {spec.kind!r}")


# ---------------------------------------------------------------------------
# subgroup queries


def cyclic_subgroups(G: FiniteGroup) -> list[Subgroup]:
    """All cyclic subgroups, including the trivial one, sorted by bitmask."""
    seen = {}
    for g in range(G.order):
        mask = 0
        for x in G.powers(g):
            mask |= 1 << x
        seen[mask] = True
    return [Subgroup(G, m) for m in sorted(seen)]


def subgroups_of_order_p(G: FiniteGroup) -> list[Subgroup]:
    """T_p(G): the set of subgroups of order p, sorted by bitmask."""
    if G.order == 1:
        return []
    p = G.prime
    return [H for H in cyclic_subgroups(G) if H.order == p]


def maximal_cyclic_subgroups(G: FiniteGroup) -> list[Subgroup]:
    """Cyclic subgroups contained in no strictly larger cyclic subgroup."""
    cyc = [H for H in cyclic_subgroups(G) if H.order > 1]
    out = [
        H
        for H in cyc
        if not any(K is not H and H.issubset(K) and H.order < K.order for K in cyc)
    ]
    if G.order == 1:
        return [Subgroup(G, 1)]
    return out


def elementary_p2_subgroups(G: FiniteGroup) -> list[Subgroup]:
    """All subgroups isomorphic to Z_p x Z_p, sorted by bitmask."""
    if G.order == 1:
        return []
    p = G.prime
    order_p = [g for g in range(1, G.order) if G.element_order[g] == p]
    found = set()
    for a, b in itertools.combinations(order_p, 2):
        if not G.commutes(a, b):
            continue
        mask_a = 0
        for x in G.powers(a):
            mask_a |= 1 << x
        if (mask_a >> b) & 1:
            continue
        found.add(G.closure_mask([a, b]))
    return [Subgroup(G, m) for m in sorted(found)]


def centralizer(G: FiniteGroup, a: int) -> Subgroup:
    if not 0 <= a < G.order:
        raise BadSpec(f"element index {a} out of range")
    mask = 0
    for g in range(G.order):
        if G.commutes(g, a):
            mask |= 1 << g
    return Subgroup(G, mask)


def center(G: FiniteGroup) -> Subgroup:
    mask = G.full_mask
    for a in range(G.order):
        mask &= centralizer(G, a).members
    return Subgroup(G, mask)


def intersect(A: Subgroup, B: Subgroup) -> Subgroup:
    if A.parent is not B.parent:
        raise BadSpec("subgroups have different parent groups")
    return Subgroup(A.parent, A.members & B.members)


def socle(C: Subgroup) -> Subgroup:
    """The unique order-p subgroup of a nontrivial cyclic p-subgroup."""
    if not C.is_cyclic or C.order <= 1:
        raise BadSpec("socle needs a nontrivial cyclic subgroup")
    G = C.parent
    p = G.prime
    g = C.generator()
    h = G.power(g, C.order // p)
    mask = 0
    for x in G.powers(h):
        mask |= 1 << x
    return Subgroup(G, mask)
