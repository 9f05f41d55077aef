import numpy as np
import pytest

from pcover.errors import BadFile, BadSpec, NotAGroup, NotAPGroup, SizeLimit
from pcover.groups import (
    FiniteGroup,
    Subgroup,
    build_group,
    center,
    centralizer,
    cyclic_group,
    cyclic_subgroups,
    dihedral8,
    direct_product,
    elementary_group,
    elementary_p2_subgroups,
    heisenberg,
    load_cayley_table,
    maximal_cyclic_subgroups,
    parse_group_spec,
    quaternion8,
    socle,
    subgroups_of_order_p,
)


def test_cyclic_group_basics():
    G = cyclic_group(2, 3)
    assert G.order == 8
    assert G.prime == 2
    assert G.exponent == 8
    assert G.is_abelian()
    # g^1 has order 8, g^4 has order 2
    assert G.element_order[1] == 8
    assert G.element_order[4] == 2


def test_rejects_non_associative_table():
    # subtraction mod 3 has an identity-ish column but is not associative
    table = [[(a - b) % 3 for b in range(3)] for a in range(3)]
    with pytest.raises(NotAGroup):
        FiniteGroup(np.array(table))


def test_rejects_non_p_group():
    G_table = [[(a + b) % 6 for b in range(6)] for a in range(6)]
    with pytest.raises(NotAPGroup):
        FiniteGroup(np.array(G_table))


def test_identity_must_be_index_zero():
    # shift the cyclic table so index 0 is not the identity
    table = [[(a + b + 1) % 4 for b in range(4)] for a in range(4)]
    with pytest.raises(NotAGroup):
        FiniteGroup(np.array(table))


def test_size_limit():
    with pytest.raises(SizeLimit):
        cyclic_group(2, 9)


def test_quaternion_structure():
    G = quaternion8()
    assert G.order == 8
    assert not G.is_abelian()
    assert G.exponent == 4
    # unique subgroup of order 2
    assert len(subgroups_of_order_p(G)) == 1
    assert len(maximal_cyclic_subgroups(G)) == 3
    assert center(G).order == 2


def test_dihedral_structure():
    G = dihedral8()
    assert G.order == 8
    assert not G.is_abelian()
    # x has order 4, y order 2, yxy = x^-1
    x, y = 2, 1
    assert G.element_order[x] == 4
    assert G.element_order[y] == 2
    assert G.mul(G.mul(y, x), y) == G.inv(x)
    assert len(subgroups_of_order_p(G)) == 5


def test_heisenberg_exponent_p():
    G = heisenberg(3)
    assert G.order == 27
    assert G.exponent == 3
    assert not G.is_abelian()
    assert center(G).order == 3


def test_direct_product_orders():
    G = direct_product(quaternion8(), cyclic_group(2, 1))
    assert G.order == 16
    assert G.exponent == 4
    # (i, w) squares to (-1, e)
    assert G.mul(5, 5) == 2


def test_parse_group_spec_roundtrip():
    for spec, order in [("Q8", 8), ("D8", 8), ("C16", 16), ("E27", 27),
                        ("Heis3", 27), ("Q8xC2", 16), ("C4xC2xC2", 16)]:
        assert build_group(spec).order == order
    with pytest.raises(BadSpec):
        parse_group_spec("C6")
    with pytest.raises(BadSpec):
        parse_group_spec("nonsense")


def test_cayley_file_roundtrip(tmp_path):
    G = dihedral8()
    path = tmp_path / "d8.cay"
    lines = [" ".join(str(int(v)) for v in row) for row in G.table]
    path.write_text("8\n" + "\n".join(lines) + "\n")
    H = load_cayley_table(str(path))
    assert np.array_equal(H.table, G.table)


def test_cayley_file_diagnostics(tmp_path):
    path = tmp_path / "bad.cay"
    path.write_text("2\n0 1\n0 9\n")
    with pytest.raises(BadFile):
        load_cayley_table(str(path))


def test_subgroup_queries_q8():
    G = quaternion8()
    cyc = cyclic_subgroups(G)
    # trivial, center, three order-4 cyclics
    assert sorted(H.order for H in cyc) == [1, 2, 4, 4, 4]
    for H in maximal_cyclic_subgroups(G):
        assert socle(H).order == 2
    assert elementary_p2_subgroups(G) == []


def test_subgroup_queries_e8():
    G = elementary_group(2, 3)
    assert len(subgroups_of_order_p(G)) == 7
    assert len(elementary_p2_subgroups(G)) == 7


def test_centralizer_heisenberg():
    G = heisenberg(3)
    Z = center(G)
    noncentral = next(x for x in range(1, G.order) if not Z.contains(x))
    C = centralizer(G, noncentral)
    assert C.order == 9
    assert all(G.commutes(noncentral, y) for y in C.elements())


def test_subgroup_generated_closure():
    G = dihedral8()
    H = Subgroup.generated(G, [2])  # <x>
    assert H.order == 4
    assert H.is_cyclic
    full = Subgroup.generated(G, [2, 1])
    assert full.members == G.full_mask
