"""Abstract target rings and the block decomposition of R_C(G).

The decomposition expresses R_C(G) as a direct product of M2(Z_p) factors
(one per noncyclic C0 cell) and subdirect factors: a block-triangular
matrix ring over Z_p whose diagonal scalar positions carry tuples over the
lattice of cyclic subgroups above an order-p subgroup.
"""
from __future__ import annotations

import itertools
from collections import defaultdict
from dataclasses import dataclass, field

import numpy as np

from .cover import CellClass, Cover
from .errors import BadSpec, NotInRing, NotStarCover
from .funcring import CoverFrame, FunctionRing, _p2_coords, build_frame
from .groups import FiniteGroup, Subgroup, cyclic_subgroups, socle
from .pgraph import build_graph

# ---------------------------------------------------------------------------
# block-triangular matrix rings N^{m+n}


@dataclass(frozen=True)
class BlockSpec:
    """Shape of a block-triangular matrix ring: scalar lam*I_m, a coupling
    column block with one nonzero entry per column, and a diagonal tail."""

    m: int
    n: int
    attachments: tuple[int, ...] = ()

    def __post_init__(self):
        if self.m < 1 or self.n < 0 or len(self.attachments) != self.n:
            raise BadSpec("inconsistent block spec")
        if any(not 1 <= i <= self.m for i in self.attachments):
            raise BadSpec("attachment row out of range")


class BlockRing:
    """The ring of matrices [[lam*I_m, J(nu)], [0, D(mu)]] over Z_p.

    Elements are tuples (lam, nu, mu) with nu, mu in Z_p^n; multiplication
    follows from matrix multiplication of the block form.
    """

    def __init__(self, spec: BlockSpec, p: int):
        self.spec = spec
        self.p = p

    @property
    def order(self) -> int:
        return self.p ** (1 + 2 * self.spec.n)

    def elements(self):
        p, n = self.p, self.spec.n
        for lam in range(p):
            for nu in itertools.product(range(p), repeat=n):
                for mu in itertools.product(range(p), repeat=n):
                    yield (lam, nu, mu)

    def zero(self):
        n = self.spec.n
        return (0, (0,) * n, (0,) * n)

    def one(self):
        n = self.spec.n
        return (1, (0,) * n, (1,) * n)

    def add(self, a, b):
        p = self.p
        return (
            (a[0] + b[0]) % p,
            tuple((x + y) % p for x, y in zip(a[1], b[1])),
            tuple((x + y) % p for x, y in zip(a[2], b[2])),
        )

    def mul(self, a, b):
        p = self.p
        return (
            (a[0] * b[0]) % p,
            tuple((a[0] * b[1][j] + a[1][j] * b[2][j]) % p for j in range(self.spec.n)),
            tuple((a[2][j] * b[2][j]) % p for j in range(self.spec.n)),
        )

    def neg(self, a):
        p = self.p
        return ((-a[0]) % p, tuple(-x % p for x in a[1]), tuple(-x % p for x in a[2]))

    def to_matrix(self, a) -> np.ndarray:
        """Dense (m+n) x (m+n) matrix of the element, for differential tests."""
        m, n = self.spec.m, self.spec.n
        M = np.zeros((m + n, m + n), dtype=np.int64)
        for i in range(m):
            M[i, i] = a[0]
        for j in range(n):
            M[self.spec.attachments[j] - 1, m + j] = a[1][j]
            M[m + j, m + j] = a[2][j]
        return M

    def scalar_ideal(self):
        """The two-sided ideal generated by the scalar idempotent (1, 0, 0).

        Left multiplication smears the coupling column, so the ideal is
        {(lam, nu, 0)} of order p^(1+n); proper and nonzero whenever n > 0,
        which is why these rings are never simple then.
        """
        p, n = self.p, self.spec.n
        return [
            (lam, nu, (0,) * n)
            for lam in range(p)
            for nu in itertools.product(range(p), repeat=n)
        ]


def block_ring(spec: BlockSpec, p: int) -> BlockRing:
    return BlockRing(spec, p)


# ---------------------------------------------------------------------------
# cyclic-subgroup lattices over an order-p subgroup


@dataclass
class Lattice:
    """All cyclic subgroups containing a fixed order-p subgroup K, with the
    maximal ones flagged; phi is the count of maximal members."""

    base: Subgroup
    nodes: list[Subgroup]
    maximal_nodes: list[Subgroup]

    @property
    def phi(self) -> int:
        return len(self.maximal_nodes)

    def hasse_edges(self) -> list[tuple[int, int]]:
        """(i, j) with nodes[i] covered by nodes[j] in the inclusion order."""
        out = []
        for i, a in enumerate(self.nodes):
            for j, b in enumerate(self.nodes):
                if a.order * self.base.parent.prime == b.order and a.issubset(b):
                    out.append((i, j))
        return out


def lattice_of(G: FiniteGroup, K: Subgroup) -> Lattice:
    if K.order != G.prime:
        raise BadSpec("lattice base must have order p")
    nodes = [H for H in cyclic_subgroups(G) if K.issubset(H) and H.order >= K.order]
    maximal = sorted(
        H for H in nodes
        if not any(H.issubset(J) and J.order > H.order for J in nodes)
    )
    return Lattice(K, sorted(nodes), maximal)


class LatticeRing:
    """Tuples of exponents on the maximal nodes, one entry mod the node's
    order, agreeing modulo pairwise intersection orders."""

    def __init__(self, lattice: Lattice):
        self.lattice = lattice
        self.p = lattice.base.parent.prime
        self.moduli = [D.order for D in lattice.maximal_nodes]
        self._meets = {
            (i, j): (
                lattice.maximal_nodes[i].members & lattice.maximal_nodes[j].members
            ).bit_count()
            for i in range(len(self.moduli))
            for j in range(i + 1, len(self.moduli))
        }

    def is_valid(self, entries) -> bool:
        if len(entries) != len(self.moduli):
            return False
        if any(not 0 <= e < m for e, m in zip(entries, self.moduli)):
            return False
        if len({e % self.p for e in entries}) > 1:
            return False
        return all(
            (entries[i] - entries[j]) % t == 0 for (i, j), t in self._meets.items()
        )

    def tuples(self, lam: int | None = None) -> list[tuple[int, ...]]:
        out = []
        for entries in itertools.product(*(range(m) for m in self.moduli)):
            if lam is not None and entries and entries[0] % self.p != lam:
                continue
            if self.is_valid(entries):
                out.append(entries)
        if not self.moduli:
            out.append(())
        return out

    @property
    def order(self) -> int:
        return len(self.tuples())

    def add(self, a, b):
        return tuple((x + y) % m for x, y, m in zip(a, b, self.moduli))

    def mul(self, a, b):
        return tuple((x * y) % m for x, y, m in zip(a, b, self.moduli))

    def neg(self, a):
        return tuple(-x % m for x, m in zip(a, self.moduli))


def lattice_ring(lattice: Lattice) -> LatticeRing:
    return LatticeRing(lattice)


# ---------------------------------------------------------------------------
# decomposition factors


@dataclass
class M2Factor:
    """End of a noncyclic C0 cell: full 2x2 matrices over Z_p."""

    p: int
    cell: Subgroup
    basis: tuple[int, int]

    @property
    def order(self) -> int:
        return self.p**4

    def zero(self):
        return (0, 0, 0, 0)

    def one(self):
        return (1, 0, 0, 1)

    def add(self, a, b):
        return tuple((x + y) % self.p for x, y in zip(a, b))

    def mul(self, a, b):
        # row-major 2x2 matrix product
        return (
            (a[0] * b[0] + a[1] * b[2]) % self.p,
            (a[0] * b[1] + a[1] * b[3]) % self.p,
            (a[2] * b[0] + a[3] * b[2]) % self.p,
            (a[2] * b[1] + a[3] * b[3]) % self.p,
        )

    def neg(self, a):
        return tuple(-x % self.p for x in a)

    def describe(self) -> dict:
        return {"kind": "M2", "p": self.p}


@dataclass
class SubdirectFactor:
    """A block-triangular factor with lattice tuples on the scalar diagonal.

    lambda_positions holds the order-p subgroups K_i behind the scalar
    diagonal (heads with satellite cells first, then the tail); satellites
    holds (cell, e1, b1) triples providing the nu/mu columns.
    """

    p: int
    spec: BlockSpec
    lambda_positions: list[Subgroup]
    satellites: list[tuple[Subgroup, int, int]]
    lattices: list[Lattice]
    _rings: list[LatticeRing] = field(default=None, repr=False)

    def rings(self) -> list[LatticeRing]:
        if self._rings is None:
            self._rings = [LatticeRing(lat) for lat in self.lattices]
        return self._rings

    @property
    def order(self) -> int:
        total = 0
        for lam in range(self.p):
            prod = 1
            for ring in self.rings():
                prod *= len(ring.tuples(lam))
            total += prod
        return total * self.p ** (2 * self.spec.n)

    def zero(self):
        n = self.spec.n
        return (
            0,
            (0,) * n,
            (0,) * n,
            tuple(tuple(0 for _ in ring.moduli) for ring in self.rings()),
        )

    def one(self):
        n = self.spec.n
        return (
            1,
            (0,) * n,
            (1,) * n,
            tuple(tuple(1 % m for m in ring.moduli) for ring in self.rings()),
        )

    def add(self, a, b):
        p, n = self.p, self.spec.n
        return (
            (a[0] + b[0]) % p,
            tuple((x + y) % p for x, y in zip(a[1], b[1])),
            tuple((x + y) % p for x, y in zip(a[2], b[2])),
            tuple(r.add(x, y) for r, x, y in zip(self.rings(), a[3], b[3])),
        )

    def mul(self, a, b):
        p, n = self.p, self.spec.n
        return (
            (a[0] * b[0]) % p,
            tuple((a[0] * b[1][j] + a[1][j] * b[2][j]) % p for j in range(n)),
            tuple((a[2][j] * b[2][j]) % p for j in range(n)),
            tuple(r.mul(x, y) for r, x, y in zip(self.rings(), a[3], b[3])),
        )

    def neg(self, a):
        p = self.p
        return (
            -a[0] % p,
            tuple(-x % p for x in a[1]),
            tuple(-x % p for x in a[2]),
            tuple(r.neg(x) for r, x in zip(self.rings(), a[3])),
        )

    def contains(self, a) -> bool:
        lam, nu, mu, tuples = a
        if not (0 <= lam < self.p and len(nu) == len(mu) == self.spec.n):
            return False
        for ring, t in zip(self.rings(), tuples):
            if not ring.is_valid(t) or (t and t[0] % self.p != lam):
                return False
        return True

    def describe(self) -> dict:
        return {
            "kind": "subdirect",
            "m": self.spec.m,
            "n": self.spec.n,
            "attachments": list(self.spec.attachments),
            "lattices": [
                {"phi": lat.phi, "orders": [D.order for D in lat.maximal_nodes]}
                for lat in self.lattices
            ],
        }


@dataclass
class Decomposition:
    cover: Cover
    frame: CoverFrame
    factors: list
    ordered_basis: list[Subgroup]
    certificate: dict | None = None

    @property
    def order(self) -> int:
        prod = 1
        for f in self.factors:
            prod *= f.order
        return prod

    def report(self) -> dict:
        return {
            "factors": [f.describe() for f in self.factors],
            "order": int(self.order),
            "ordered_basis": [
                {"generator": min(x for x in K.elements() if x != 0),
                 "elements": K.elements()}
                for K in self.ordered_basis
            ],
        }


# ---------------------------------------------------------------------------
# Setup basis sets


@dataclass
class BasisSets:
    b3: list[Subgroup]
    b2: list[Subgroup]
    b11: list[Subgroup]
    b12: list[Subgroup]
    b0_pairs: list[Subgroup]   # noncyclic C0 cells (each yields a basis pair)
    b0_singles: list[Subgroup]  # socles of cyclic cells in no other set


def build_basis_sets(cover: Cover, frame: CoverFrame | None = None) -> BasisSets:
    if not cover.is_star_cover:
        raise NotStarCover("basis sets are defined for star covers")
    if frame is None:
        frame = build_frame(cover)
    G = cover.group
    p = G.prime
    classes = cover.classes()
    b3, b2, b11, b12 = set(), set(), set(), set()
    for cell in cover.cells:
        cls = classes[cell]
        meets = {
            cell.members & o.members
            for o in cover.cells
            if o != cell and (cell.members & o.members).bit_count() == p
        }
        if cls is CellClass.C3:
            b3.update(meets)
        elif cls is CellClass.C2:
            b2.update(meets)
        elif cls is CellClass.C1 and meets:
            b11.update(meets)
        if not cell.is_cyclic and cls is CellClass.C1:
            _, b1 = frame.c1[cell]
            b12.add(_cyclic_mask(G, b1))
    pair_cells = [
        cell for cell in cover.cells
        if not cell.is_cyclic and classes[cell] is CellClass.C0
    ]
    taken = b3 | b2 | b11 | b12
    singles = set()
    for cell in cover.cells:
        if cell.is_cyclic and socle(cell).members not in taken:
            singles.add(socle(cell).members)
    mk = lambda masks: sorted(Subgroup(G, m) for m in masks)
    return BasisSets(mk(b3), mk(b2), mk(b11), mk(b12), sorted(pair_cells), mk(singles))


def _cyclic_mask(G: FiniteGroup, x: int) -> int:
    mask = 0
    for y in G.powers(x):
        mask |= 1 << y
    return mask


# ---------------------------------------------------------------------------
# decomposition


def decompose(cover: Cover, frame: CoverFrame | None = None) -> Decomposition:
    """Execute the block construction over the ordered basis A(C).

    Order of consumption: C3 components with their C1 satellites, then C2
    entries, then remaining C1 entries, then C0 pairs and loose socles.
    Ties are broken by canonical subgroup bitmask order throughout.
    """
    if not cover.is_star_cover:
        raise NotStarCover("decomposition needs a star cover")
    G = cover.group
    p = G.prime
    if frame is None:
        frame = build_frame(cover)
    classes = cover.classes()
    graph = build_graph(cover)
    comp = {v.members: graph.component_of[i] for i, v in enumerate(graph.vertices)}
    basis = build_basis_sets(cover, frame)

    # e1 subgroup -> noncyclic C1 cells hanging off it
    sat: dict[int, list] = defaultdict(list)
    for cell in cover.cells:
        if not cell.is_cyclic and classes[cell] is CellClass.C1:
            e1, b1 = frame.c1[cell]
            sat[_cyclic_mask(G, e1)].append((cell, e1, b1))
    for lst in sat.values():
        lst.sort(key=lambda t: t[0].members)

    processed: set[int] = set()
    ordered_basis: list[Subgroup] = []
    factors: list = []

    def emit_block(head_masks: list[int], tail_masks: list[int]) -> None:
        satellites = []
        attachments = []
        for i, y in enumerate(head_masks):
            for cell, e1, b1 in sat[y]:
                satellites.append((cell, e1, b1))
                attachments.append(i + 1)
        lam_masks = head_masks + tail_masks
        positions = [Subgroup(G, m) for m in lam_masks]
        spec = BlockSpec(len(lam_masks), len(satellites), tuple(attachments))
        lattices = [lattice_of(G, K) for K in positions]
        factors.append(SubdirectFactor(p, spec, positions, satellites, lattices))
        ordered_basis.extend(Subgroup(G, m) for m in head_masks)
        ordered_basis.extend(
            Subgroup(G, _cyclic_mask(G, b1)) for _, _, b1 in satellites
        )
        ordered_basis.extend(Subgroup(G, m) for m in tail_masks)
        processed.update(lam_masks)
        processed.update(_cyclic_mask(G, b1) for _, _, b1 in satellites)

    # stage 1: C3 components
    for sub in basis.b3:
        if sub.members in processed:
            continue
        cid = comp[sub.members]
        members = sorted(v.members for v in basis.b3 if comp[v.members] == cid)
        heads = [y for y in members if sat[y]]
        tail = [y for y in members if not sat[y]]
        emit_block(heads, tail)

    # stage 2: C2 entries
    for sub in basis.b2:
        if sub.members in processed:
            continue
        if sat[sub.members]:
            emit_block([sub.members], [])
        else:
            emit_block([], [sub.members])

    # stage 3: remaining C1 entries
    for sub in basis.b11:
        if sub.members in processed:
            continue
        if sat[sub.members]:
            emit_block([sub.members], [])
        else:
            emit_block([], [sub.members])

    # stage 4: C0 pairs as M2 blocks, then loose socles
    for cell in basis.b0_pairs:
        b0, b0p = frame.c0[cell]
        factors.append(M2Factor(p, cell, (b0, b0p)))
        ordered_basis.append(Subgroup(G, _cyclic_mask(G, b0)))
        ordered_basis.append(Subgroup(G, _cyclic_mask(G, b0p)))
        processed.update((_cyclic_mask(G, b0), _cyclic_mask(G, b0p)))
    for sub in basis.b0_singles:
        if sub.members not in processed:
            emit_block([], [sub.members])

    return Decomposition(cover, frame, factors, ordered_basis)


# ---------------------------------------------------------------------------
# representation and certification


def _exp_of(G: FiniteGroup, g: int, value: int) -> int:
    """Discrete log: the k with g^k == value, in the cyclic group <g>."""
    powers = G.powers(g)
    try:
        return powers.index(value)
    except ValueError:
        raise NotInRing(f"value {value} is outside <{g}>")


def represent(ring_or_group, f_row, decomposition: Decomposition):
    """Read a ring element off the ordered basis: one factor element each."""
    G = decomposition.cover.group
    p = G.prime
    f = np.asarray(f_row)
    out = []
    coords_cache: dict = {}
    for factor in decomposition.factors:
        if isinstance(factor, M2Factor):
            u, v = factor.basis
            cu = _p2_coords(G, factor.cell, u, v)
            a, c = cu[int(f[u])]
            b, d = cu[int(f[v])]
            out.append((a, b, c, d))
            continue
        lam = None
        for K in factor.lambda_positions:
            g = min(x for x in K.elements() if x != 0)
            lk = _exp_of(G, g, int(f[g]))
            if lam is None:
                lam = lk
            elif lam != lk:
                raise NotInRing("scalar disagrees across a block's diagonal")
        nus, mus = [], []
        for cell, e1, b1 in factor.satellites:
            key = (cell.members, e1, b1)
            if key not in coords_cache:
                coords_cache[key] = _p2_coords(G, cell, e1, b1)
            nu, mu = coords_cache[key][int(f[b1])]
            nus.append(nu)
            mus.append(mu)
        tuples = []
        for lat in factor.lattices:
            entries = []
            for D in lat.maximal_nodes:
                g = D.generator()
                entries.append(_exp_of(G, g, int(f[g])))
            tuples.append(tuple(entries))
        out.append((lam, tuple(nus), tuple(mus), tuple(tuples)))
    return out


def factor_zero(decomposition: Decomposition):
    return [f.zero() for f in decomposition.factors]


def factor_add(decomposition: Decomposition, a, b):
    return [f.add(x, y) for f, x, y in zip(decomposition.factors, a, b)]


def factor_mul(decomposition: Decomposition, a, b):
    return [f.mul(x, y) for f, x, y in zip(decomposition.factors, a, b)]


def _freeze(rep) -> tuple:
    return tuple(rep)


def certify_isomorphism(
    ring: FunctionRing,
    decomposition: Decomposition,
    seed: int = 0,
    element_limit: int = 20_000,
    pair_limit: int = 300_000,
    samples: int = 2000,
) -> dict:
    """Verify that represent() is a ring isomorphism onto the factor product.

    Injectivity plus order agreement gives bijectivity; the homomorphism
    laws are checked on all pairs up to pair_limit and on a seeded random
    sample above it.  The certificate records mode, outcome and a witness
    for the first failure.
    """
    cert: dict = {
        "ring_order": int(ring.order),
        "factor_order": int(decomposition.order),
        "order_match": int(ring.order) == int(decomposition.order),
        "mode": None,
        "injective": None,
        "homomorphism": None,
        "witness": None,
        "passed": False,
    }
    rng = np.random.default_rng(seed)
    N = ring.order
    if N <= element_limit:
        idx = np.arange(N)
        cert["mode"] = "exhaustive-elements"
    else:
        idx = np.unique(rng.integers(0, N, min(N, 4 * samples)))
        cert["mode"] = f"sampled-elements({len(idx)}, seed={seed})"
    reps = {}
    try:
        for i in idx:
            reps[int(i)] = represent(ring, ring.elements[i], decomposition)
    except NotInRing as exc:
        cert["injective"] = False
        cert["witness"] = {"stage": "represent", "error": str(exc)}
        return cert
    keys = {_freeze(r) for r in reps.values()}
    cert["injective"] = len(keys) == len(reps)
    if not cert["injective"]:
        cert["witness"] = {"stage": "injectivity"}

    if len(idx) ** 2 <= pair_limit:
        pairs = [(int(i), int(j)) for i in idx for j in idx]
        cert["pair_mode"] = "exhaustive"
    else:
        ii = rng.choice(idx, samples)
        jj = rng.choice(idx, samples)
        pairs = list(zip(ii.tolist(), jj.tolist()))
        cert["pair_mode"] = f"sampled({samples}, seed={seed})"
    hom_ok = True
    for i, j in pairs:
        s = ring.add_rows(ring.elements[i], ring.elements[j])
        c = ring.compose_rows(ring.elements[i], ring.elements[j])
        try:
            rs = represent(ring, s, decomposition)
            rc = represent(ring, c, decomposition)
        except NotInRing as exc:
            hom_ok = False
            cert["witness"] = {"stage": "closure", "pair": [i, j], "error": str(exc)}
            break
        if _freeze(rs) != _freeze(factor_add(decomposition, reps[i], reps[j])):
            hom_ok = False
            cert["witness"] = {"stage": "additivity", "pair": [i, j]}
            break
        if _freeze(rc) != _freeze(factor_mul(decomposition, reps[i], reps[j])):
            hom_ok = False
            cert["witness"] = {"stage": "multiplicativity", "pair": [i, j]}
            break
    cert["homomorphism"] = hom_ok
    cert["passed"] = bool(cert["order_match"] and cert["injective"] and hom_ok)
    return cert
