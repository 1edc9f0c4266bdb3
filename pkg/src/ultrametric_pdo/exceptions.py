"""Exception hierarchy.

Domain violations derive from :class:`UltrametricError`; malformed input
documents raise :class:`SpecFormatError`. The CLI maps the former to exit
code 1 and the latter to exit code 2.
"""


class UltrametricError(ValueError):
    """Base class for violations of tree, measure or operator invariants."""


class SpecFormatError(ValueError):
    """Input document is syntactically or structurally malformed."""


class InvalidParameter(UltrametricError):
    pass


# tree construction

class TreeSpecError(UltrametricError):
    pass


class CycleDetected(TreeSpecError):
    pass


class Disconnected(TreeSpecError):
    pass


class DuplicateId(TreeSpecError):
    pass


class BranchingIndexOne(TreeSpecError):
    pass


class RootDegenerate(BranchingIndexOne):
    """Root of a multi-vertex tree has fewer than two children."""


# tree queries

class UnknownVertex(UltrametricError, KeyError):
    def __str__(self):
        return ValueError.__str__(self)


class NotComparable(UltrametricError):
    pass


class NotStrictAncestor(UltrametricError):
    pass


class NotInternalVertex(UltrametricError):
    pass


# measures, kernels, transforms

class MissingLeafMass(UltrametricError):
    pass


class NonPositiveMass(UltrametricError):
    pass


class InvalidAssignment(UltrametricError):
    pass


class InvalidKernel(UltrametricError):
    pass


class DimensionMismatch(UltrametricError):
    pass


class TooLarge(UltrametricError):
    pass


class MissingKernel(SpecFormatError):
    pass


class BadFunctionFile(SpecFormatError):
    pass
