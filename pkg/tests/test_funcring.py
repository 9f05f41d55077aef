import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from pcover.cover import enumerate_star_covers, validate_cover
from pcover.errors import NotStarCover, SizeLimit
from pcover.funcring import (
    GroupFunction,
    brute_force_ring,
    build_frame,
    cell_endomorphisms,
    parametrized_ring,
    ring_add,
    ring_compose,
    validate_frame,
    verify_ring_axioms,
)
from pcover.groups import Subgroup, build_group


def _sub(G, gens):
    return Subgroup.generated(G, gens)


def _endo_count_oracle(cell):
    """Count endomorphisms the slow way: try every self-map of the cell."""
    G = cell.parent
    members = cell.elements()
    count = 0
    for images in itertools.product(members, repeat=len(members) - 1):
        vals = {0: 0}
        vals.update(zip(members[1:], images))
        if all(
            vals[G.mul(a, b)] == G.mul(vals[a], vals[b])
            for a in members
            for b in members
        ):
            count += 1
    return count


@pytest.mark.parametrize(
    "spec,gens",
    [("C4", [1]), ("E4", [1, 2]), ("Q8", [2])],
)
def test_cell_endomorphism_counts_exhaustive(spec, gens):
    G = build_group(spec)
    cell = _sub(G, gens)
    members, endos = cell_endomorphisms(cell)
    assert members == cell.elements()
    assert endos.shape[0] == _endo_count_oracle(cell)
    # no duplicates
    assert len({row.tobytes() for row in endos}) == endos.shape[0]


@pytest.mark.parametrize(
    "spec,gens,count",
    [
        # End(Z_{p^k}) has p^k maps (the generator goes anywhere),
        # End(Z_p x Z_p) has p^4 (any 2x2 matrix over Z_p)
        ("C8", [1], 8),
        ("E9", [1, 3], 81),
        ("C4xC2", [2], 4),
    ],
)
def test_cell_endomorphism_counts_closed_form(spec, gens, count):
    G = build_group(spec)
    cell = _sub(G, gens)
    members, endos = cell_endomorphisms(cell)
    assert endos.shape[0] == count
    # each row really is an endomorphism
    for row in endos[:: max(1, endos.shape[0] // 8)]:
        vals = {g: int(v) for g, v in zip(members, row)}
        assert all(
            vals[G.mul(a, b)] == G.mul(vals[a], vals[b])
            for a in members
            for b in members
        )


def test_q8_ring_order_16():
    G = build_group("Q8")
    cover = enumerate_star_covers(G).covers[0]
    assert brute_force_ring(cover).order == 16
    assert parametrized_ring(cover).order == 16


def test_membership_definition_matches_ring():
    G = build_group("D8")
    cover = enumerate_star_covers(G).covers[0]
    ring = brute_force_ring(cover)
    in_ring = {row.tobytes() for row in ring.elements}
    # every value table over the group either is in the ring or violates a cell
    rng = np.random.default_rng(7)
    for _ in range(200):
        vals = tuple(int(v) for v in rng.integers(0, G.order, G.order))
        f = GroupFunction(G, (0,) + vals[1:])
        expected = np.array(f.values, dtype=np.int16).tobytes() in in_ring
        assert f.is_member(cover) == expected


def test_parametrized_requires_star_cover():
    G = build_group("C4xC2")
    cover = validate_cover(G, [Subgroup(G, G.full_mask)])
    with pytest.raises(NotStarCover):
        parametrized_ring(cover)


def test_budget_limits_oracle():
    G = build_group("E8")
    cover = enumerate_star_covers(G, budget=1).covers[0]
    with pytest.raises(SizeLimit):
        brute_force_ring(cover, budget=2)


def test_frame_validation_roundtrip():
    G = build_group("D8xC2")
    for cover in enumerate_star_covers(G, budget=6).covers:
        frame = build_frame(cover)
        validate_frame(cover, frame)  # must not raise


def test_ring_axioms_exhaustive_q8():
    G = build_group("Q8")
    cover = enumerate_star_covers(G).covers[0]
    report = verify_ring_axioms(parametrized_ring(cover))
    assert report["passed"]
    assert report["pair_mode"] == "exhaustive"
    assert report["triple_mode"] == "exhaustive"


@pytest.fixture(scope="module")
def d8_ring():
    cover = enumerate_star_covers(build_group("D8")).covers[0]
    return brute_force_ring(cover)


@given(st.data())
@settings(max_examples=60, deadline=None)
def test_ring_closure_properties(d8_ring, data):
    ring = d8_ring
    i = data.draw(st.integers(0, ring.order - 1))
    j = data.draw(st.integers(0, ring.order - 1))
    k = data.draw(st.integers(0, ring.order - 1))
    f, g, h = ring.elements[i], ring.elements[j], ring.elements[k]
    assert ring.contains_row(ring.add_rows(f, g))
    assert ring.contains_row(ring.compose_rows(f, g))
    assert np.array_equal(ring.add_rows(f, g), ring.add_rows(g, f))
    assert np.array_equal(
        ring.compose_rows(ring.compose_rows(f, g), h),
        ring.compose_rows(f, ring.compose_rows(g, h)),
    )
    # left distributivity of composition over pointwise addition
    assert np.array_equal(
        ring.compose_rows(f, ring.add_rows(g, h)),
        ring.add_rows(ring.compose_rows(f, g), ring.compose_rows(f, h)),
    )


def test_function_level_operations():
    G = build_group("Q8")
    cover = enumerate_star_covers(G).covers[0]
    ring = parametrized_ring(cover)
    funcs = list(ring.functions())
    f, g = funcs[1], funcs[2]
    s = ring_add(ring, f, g)
    c = ring_compose(ring, f, g)
    assert ring.contains_row(np.array(s.values, dtype=np.int16))
    assert c.values == tuple(f.values[x] for x in g.values)


@pytest.mark.parametrize("name", ["C2", "C8", "E4", "D8", "C4xC2", "Q8"])
def test_oracle_equals_parametrized_small(name):
    G = build_group(name)
    for cover in enumerate_star_covers(G, budget=8).covers:
        a = brute_force_ring(cover)
        b = parametrized_ring(cover)
        assert a.elements.shape == b.elements.shape
        assert np.array_equal(a.elements, b.elements)
