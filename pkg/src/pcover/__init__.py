"""Covering rings of finite p-groups: R_C(G), its block decomposition, and
simplicity analysis."""

from .cover import (
    CellClass,
    Cover,
    classify_cells,
    enumerate_star_covers,
    intersection_profile,
    load_cover_file,
    validate_cover,
)
from .errors import (
    BadFile,
    BadSpec,
    DomainMismatch,
    HypothesisFailed,
    InconsistentFrame,
    NonAbelianCell,
    NotACover,
    NotAGroup,
    NotAPGroup,
    NotInRing,
    NotStarCover,
    PcoverError,
    SizeLimit,
    UnknownVertex,
)
from .funcring import (
    DEFAULT_BUDGET,
    CoverFrame,
    FunctionRing,
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
from .groups import (
    FiniteGroup,
    Subgroup,
    build_group,
    centralizer,
    center,
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
from .pgraph import ThreeIntersectGraph, build_graph, component_of, components
from .structure import (
    BlockRing,
    BlockSpec,
    Decomposition,
    Lattice,
    LatticeRing,
    M2Factor,
    SubdirectFactor,
    block_ring,
    build_basis_sets,
    certify_isomorphism,
    decompose,
    factor_add,
    factor_mul,
    lattice_of,
    lattice_ring,
    represent,
)
from .analysis import (
    SimplicityReport,
    abstract_is_simple,
    abstract_principal_ideal,
    converse_scalar_theorem,
    forward_scalar_theorem,
    is_simple,
    principal_ideal,
    scalar_cover,
    verify_paper_examples,
)

__version__ = "0.1.0"
