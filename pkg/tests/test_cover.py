import itertools
import json

import pytest

from pcover.cover import (
    CellClass,
    classify_cells,
    enumerate_star_covers,
    intersection_profile,
    load_cover_file,
    star_cover_candidates,
    validate_cover,
)
from pcover.errors import BadFile, BadSpec, NonAbelianCell, NotACover
from pcover.groups import Subgroup, build_group


def _sub(G, gens):
    return Subgroup.generated(G, gens)


def test_validate_rejects_incomplete_cover():
    G = build_group("Q8")
    with pytest.raises(NotACover):
        validate_cover(G, [_sub(G, [2])])


def test_validate_rejects_duplicates():
    G = build_group("E4")
    with pytest.raises(BadSpec):
        validate_cover(G, [_sub(G, [1, 2]), _sub(G, [2, 1])])


def test_validate_rejects_nonabelian_cell():
    G = build_group("D8")
    with pytest.raises(NonAbelianCell):
        validate_cover(G, [Subgroup(G, G.full_mask)])


def test_star_flag_rejects_large_abelian_cell():
    # the whole of Z4 x Z2 is abelian but neither cyclic nor of order p^2
    G = build_group("C4xC2")
    cover = validate_cover(G, [Subgroup(G, G.full_mask)])
    assert cover.is_abelian_cover
    assert not cover.is_star_cover


def test_star_flag_accepts_standard_d8_cover():
    G = build_group("D8")
    full = validate_cover(G, [_sub(G, [2]), _sub(G, [1, 4]), _sub(G, [3, 4])])
    assert full.is_star_cover


def test_whole_group_cell_classes():
    G = build_group("E4")
    cover = validate_cover(G, [Subgroup(G, G.full_mask)])
    assert cover.is_star_cover
    assert list(cover.classes().values()) == [CellClass.C0]


def test_q8_cover_classes_are_c1():
    G = build_group("Q8")
    cover = enumerate_star_covers(G).covers[0]
    assert all(cls is CellClass.C1 for cls in cover.classes().values())
    for cell in cover.cells:
        prof = intersection_profile(cover, cell)
        assert len(prof) == 1 and prof[0].order == 2


def test_e4_three_line_cover_is_c0():
    # distinct order-2 subgroups of E4 meet trivially
    G = build_group("E4")
    cover = validate_cover(G, [_sub(G, [1]), _sub(G, [2]), _sub(G, [3])])
    assert all(cls is CellClass.C0 for cls in cover.classes().values())


def test_c3_classification_in_e8():
    G = build_group("E8")
    plane = _sub(G, [1, 2])
    others = [_sub(G, [g, 4]) for g in (0, 1, 2, 3)]
    cover = validate_cover(G, [plane] + others)
    assert cover.classes()[plane] is CellClass.C3


def _covering_subsets_oracle(G):
    """Independent brute force: all subsets of candidate cells forming a star cover."""
    forced, optional = star_cover_candidates(G)
    forced_mask = 1
    for H in forced:
        forced_mask |= H.members
    found = []
    for r in range(len(optional) + 1):
        for combo in itertools.combinations(optional, r):
            union = forced_mask
            for c in combo:
                union |= c.members
            if union == G.full_mask:
                found.append(tuple(sorted(c.members for c in forced + list(combo))))
    return sorted(set(found))


@pytest.mark.parametrize("name", ["Q8", "D8", "C4xC2", "E9", "Q8xC2"])
def test_enumeration_matches_brute_force(name):
    G = build_group(name)
    expected = _covering_subsets_oracle(G)
    enum = enumerate_star_covers(G, budget=10_000)
    assert enum.complete
    got = sorted(tuple(sorted(c.members for c in cov.cells)) for cov in enum.covers)
    assert got == expected


def test_enumeration_order_irredundant_first():
    G = build_group("D8")
    enum = enumerate_star_covers(G, budget=10_000)
    flags = []
    for cov in enum.covers:
        masks = [c.members for c in cov.cells]
        redundant = any(
            G.full_mask == _union(masks[:i] + masks[i + 1:]) for i in range(len(masks))
        )
        flags.append(not redundant)
    # all irredundant covers precede all redundant ones
    assert flags == sorted(flags, reverse=True)


def _union(masks):
    u = 0
    for m in masks:
        u |= m
    return u


def test_budget_truncates():
    G = build_group("D8")
    enum = enumerate_star_covers(G, budget=2)
    assert len(enum.covers) == 2
    assert not enum.complete


def test_cover_file_loading(tmp_path):
    G = build_group("Q8")
    path = tmp_path / "q8.cov"
    path.write_text(json.dumps({
        "group": "Q8",
        "cells": [{"gens": [2]}, {"gens": [4]}, {"gens": [6]}],
    }))
    cover = load_cover_file(str(path))
    assert len(cover.cells) == 3
    assert cover.is_star_cover


def test_cover_file_rejects_non_subgroup_list(tmp_path):
    path = tmp_path / "bad.cov"
    path.write_text(json.dumps({"group": "E4", "cells": [[1, 2]]}))
    with pytest.raises(BadFile):
        load_cover_file(str(path))
