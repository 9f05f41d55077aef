"""Coverings of a p-group by abelian cells: validation, enumeration, classes.

A cover is a set of subgroups whose union is the whole group.  Star covers
restrict the cell shapes to maximal cyclic subgroups and elementary abelian
subgroups of order p^2; those are the covers the structure machinery accepts.
The brute-force ring oracle accepts any abelian cover.
"""
from __future__ import annotations

import enum
import json
from dataclasses import dataclass, field

from .errors import BadFile, BadSpec, NonAbelianCell, NotACover, SizeLimit
from .groups import (
    FiniteGroup,
    Subgroup,
    build_group,
    elementary_p2_subgroups,
    intersect,
    maximal_cyclic_subgroups,
    parse_group_spec,
)


class CellClass(enum.Enum):
    C0 = "C0"
    C1 = "C1"
    C2 = "C2"
    C3 = "C3"


@dataclass
class Cover:
    group: FiniteGroup
    cells: list[Subgroup]
    is_abelian_cover: bool
    is_star_cover: bool
    _classes: dict[Subgroup, CellClass] | None = field(default=None, repr=False)

    def cell_key(self) -> tuple[int, ...]:
        return tuple(c.members for c in self.cells)

    def classes(self) -> dict[Subgroup, CellClass]:
        if self._classes is None:
            self._classes = classify_cells(self)
        return self._classes

    def describe(self) -> str:
        names = self.group.names
        parts = []
        for cell in self.cells:
            cls = self.classes()[cell].value if self.is_abelian_cover else "?"
            parts.append(
                "{" + ",".join(names[g] for g in cell.elements()) + "}:" + cls
            )
        return "; ".join(parts)


def validate_cover(G: FiniteGroup, cells, require_abelian: bool = True) -> Cover:
    """Check the cover axioms and compute the abelian/star validity flags."""
    cells = list(cells)
    if not cells:
        raise NotACover("a cover needs at least one cell")
    seen = set()
    for cell in cells:
        if cell.parent is not G:
            raise BadSpec("cell does not belong to the given group")
        if cell.members in seen:
            raise BadSpec(f"duplicate cell {cell.elements()}")
        seen.add(cell.members)
    union = 0
    for cell in cells:
        union |= cell.members
    if union != G.full_mask:
        uncovered = (union ^ G.full_mask).bit_length() - 1
        raise NotACover(f"element {uncovered} ({G.names[uncovered]}) is not covered")
    is_abelian = all(cell.is_abelian for cell in cells)
    if require_abelian and not is_abelian:
        bad = next(cell for cell in cells if not cell.is_abelian)
        raise NonAbelianCell(f"cell {bad.elements()} is not abelian")
    is_star = is_abelian and _star_flag(G, cells)
    return Cover(G, sorted(cells), is_abelian, is_star)


def _star_flag(G: FiniteGroup, cells) -> bool:
    maximal = {H.members for H in maximal_cyclic_subgroups(G)}
    p = G.prime
    for cell in cells:
        if cell.members in maximal:
            continue
        if cell.is_elementary_p2:
            continue
        return False
    # every maximal cyclic subgroup of order > p is forced to be a cell
    cell_masks = {c.members for c in cells}
    for H in maximal_cyclic_subgroups(G):
        if p is not None and H.order > p and H.members not in cell_masks:
            return False
    return True


def classify_cells(cover: Cover) -> dict[Subgroup, CellClass]:
    """Partition the cells into C0-C3 by their order-p intersections.

    Only intersections of order exactly p enter the distinct-intersection
    counts; larger cyclic intersections are handled later through the
    lattice congruences.
    """
    if not cover.is_abelian_cover:
        raise NonAbelianCell("classification needs an abelian cover")
    p = cover.group.prime
    out: dict[Subgroup, CellClass] = {}
    for cell in cover.cells:
        trivial = True
        order_p: set[int] = set()
        for other in cover.cells:
            if other is cell:
                continue
            meet = cell.members & other.members
            if meet != 1:
                trivial = False
            if meet.bit_count() == p:
                order_p.add(meet)
        if trivial:
            out[cell] = CellClass.C0
        elif len(order_p) >= 3:
            out[cell] = CellClass.C3
        elif len(order_p) == 2:
            out[cell] = CellClass.C2
        else:
            out[cell] = CellClass.C1
    return out


def intersection_profile(cover: Cover, cell: Subgroup) -> list[Subgroup]:
    """Distinct order-p subgroups arising as cell-with-other-cell meets."""
    if cell not in cover.cells:
        raise BadSpec("cell is not part of the cover")
    p = cover.group.prime
    masks = {
        cell.members & other.members
        for other in cover.cells
        if other != cell and (cell.members & other.members).bit_count() == p
    }
    return [Subgroup(cover.group, m) for m in sorted(masks)]


@dataclass
class StarCoverEnumeration:
    covers: list[Cover]
    complete: bool


def star_cover_candidates(G: FiniteGroup) -> tuple[list[Subgroup], list[Subgroup]]:
    """(forced cells, optional candidate cells) for star covers of G."""
    p = G.prime
    maximal = maximal_cyclic_subgroups(G)
    forced = sorted(H for H in maximal if H.order > p)
    optional = sorted(
        [H for H in maximal if H.order == p] + elementary_p2_subgroups(G)
    )
    return forced, optional


def enumerate_star_covers(G: FiniteGroup, budget: int = 64) -> StarCoverEnumeration:
    """Enumerate distinct star covers, irredundant covers first.

    Within each of the two groups covers are ordered by (cell count,
    lexicographic cell bitmasks).  The result is complete iff every star
    cover fit into the budget.
    """
    if budget < 1:
        raise BadSpec("budget must be >= 1")
    if G.order == 1:
        cover = validate_cover(G, [Subgroup(G, 1)])
        return StarCoverEnumeration([cover], True)
    forced, optional = star_cover_candidates(G)
    forced_mask = 0
    for H in forced:
        forced_mask |= H.members
    if len(optional) <= 20:
        subsets = _all_covering_subsets(G, forced_mask, optional)
        complete = True
    else:
        subsets = _irredundant_covering_subsets(G, forced_mask, optional)
        complete = False
    irred, redun = [], []
    for chosen in subsets:
        cells = forced + list(chosen)
        if _is_irredundant(G, cells):
            irred.append(cells)
        else:
            redun.append(cells)
    key = lambda cells: (len(cells), tuple(sorted(c.members for c in cells)))
    ordered = sorted(irred, key=key) + sorted(redun, key=key)
    if len(ordered) > budget:
        ordered = ordered[:budget]
        complete = False
    covers = [validate_cover(G, cells) for cells in ordered]
    assert all(c.is_star_cover for c in covers)
    return StarCoverEnumeration(covers, complete)


_SUBSET_CAP = 300_000


def _all_covering_subsets(G, forced_mask, optional):
    """Every subset of the optional cells completing the forced cells to a cover."""
    full = G.full_mask
    suffix = [0] * (len(optional) + 1)
    for i in range(len(optional) - 1, -1, -1):
        suffix[i] = suffix[i + 1] | optional[i].members
    out = []

    def rec(i: int, chosen: tuple, union: int) -> None:
        if union | suffix[i] != full:
            return
        if i == len(optional):
            out.append(chosen)
            if len(out) > _SUBSET_CAP:
                raise SizeLimit(f"more than {_SUBSET_CAP} star covers")
            return
        rec(i + 1, chosen + (optional[i],), union | optional[i].members)
        rec(i + 1, chosen, union)

    rec(0, (), forced_mask | 1)
    return out

def _irredundant_covering_subsets(G, forced_mask, optional):
    """All irredundant-capable covering subsets via smallest-uncovered branching."""
    full = G.full_mask
    seen: set[frozenset] = set()
    out = []

    def rec(chosen: tuple, union: int) -> None:
        if union == full:
            key = frozenset(c.members for c in chosen)
            if key not in seen:
                seen.add(key)
                out.append(chosen)
                if len(out) > _SUBSET_CAP:
                    raise SizeLimit(f"more than {_SUBSET_CAP} covers")
            return
        e = (union ^ full).bit_length() - 1  # largest uncovered index, deterministic
        for cell in optional:
            if cell.contains(e) and cell not in chosen:
                rec(chosen + (cell,), union | cell.members)

    rec((), forced_mask | 1)
    return out


def _is_irredundant(G: FiniteGroup, cells) -> bool:
    for i in range(len(cells)):
        union = 0
        for j, c in enumerate(cells):
            if j != i:
                union |= c.members
        if union == G.full_mask:
            return False
    return True


# ---------------------------------------------------------------------------
# .cov files


def load_cover_file(path: str, group: FiniteGroup | None = None) -> Cover:
    """Load a cover from a .cov JSON file; see the package README for the schema."""
    try:
        with open(path) as fh:
            data = json.load(fh)
    except OSError as exc:
        raise BadFile(f"{path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise BadFile(f"{path}: invalid JSON: {exc}") from exc
    if not isinstance(data, dict) or "cells" not in data:
        raise BadFile(f"{path}: expected an object with a 'cells' array")
    if group is None:
        if "group" not in data:
            raise BadFile(f"{path}: missing 'group' and no group supplied")
        gspec = data["group"]
        if gspec.endswith(".cay"):
            group = build_group(parse_group_spec("table:" + gspec))
        else:
            group = build_group(gspec)
    cells = []
    for i, entry in enumerate(data["cells"]):
        if isinstance(entry, dict) and "gens" in entry:
            indices = entry["gens"]
            if not all(isinstance(g, int) and 0 <= g < group.order for g in indices):
                raise BadFile(f"{path}: cell {i}: bad generator index")
            cells.append(Subgroup.generated(group, indices))
        elif isinstance(entry, list):
            if not all(isinstance(g, int) and 0 <= g < group.order for g in entry):
                raise BadFile(f"{path}: cell {i}: bad element index")
            sub = Subgroup.generated(group, entry)
            listed = set(entry) | {0}
            if set(sub.elements()) != listed:
                raise BadFile(f"{path}: cell {i}: element list is not a subgroup")
            cells.append(sub)
        else:
            raise BadFile(f"{path}: cell {i}: expected a list or a gens object")
    return validate_cover(group, cells)
