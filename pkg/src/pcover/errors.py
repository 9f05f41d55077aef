"""Exception types shared across the package."""


class PcoverError(Exception):
    """Base class for all errors raised by pcover."""


class NotAGroup(PcoverError):
    """A multiplication table violates a group axiom."""


class NotAPGroup(PcoverError):
    """The group order is not a prime power."""


class BadFile(PcoverError):
    """A .cay or .cov file is malformed; message carries diagnostics."""


class SizeLimit(PcoverError):
    """An input or search volume exceeds the configured budget."""


class BadSpec(PcoverError):
    """A group or block specification is malformed."""


class NotACover(PcoverError):
    """The union of the cells does not exhaust the group."""


class NonAbelianCell(PcoverError):
    """A cell of an abelian cover is not abelian."""


class NotStarCover(PcoverError):
    """The cover does not satisfy the star shape condition."""


class InconsistentFrame(PcoverError):
    """A cover frame disagrees with the cell classification."""


class DomainMismatch(PcoverError):
    """Ring operands belong to different covers or groups."""


class NotInRing(PcoverError):
    """A function does not restrict to an endomorphism on every cell."""


class UnknownVertex(PcoverError):
    """A subgroup is not a vertex of the graph."""


class HypothesisFailed(PcoverError):
    """A theorem's hypothesis does not hold for the given group."""
