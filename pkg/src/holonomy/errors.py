"""Exception types raised across the transport engine."""


class HolonomyError(Exception):
    """Base class for all engine errors."""


class OutOfRadius(HolonomyError):
    """Group element outside the injectivity radius of the exponential."""


class TooFarFromGroup(HolonomyError):
    """Matrix too far from the group manifold to repair."""


class EndpointMismatch(HolonomyError):
    """Paths composed although end and start points disagree."""


class InvalidReparam(HolonomyError):
    """Reparameterization is not endpoint-fixing and weakly increasing."""


class NoCoveringSet(HolonomyError):
    """A path sample lies in no cover set with the required clearance."""


class OutOfDomain(HolonomyError):
    """Evaluation point outside the domain of a form or chart."""


class ToleranceNotReached(HolonomyError):
    """Integrator failed to meet the error target within the refinement budget."""


class CoverMismatch(HolonomyError):
    """Operation requires two cocycles over the same cover and group."""


class EmptyOverlap(HolonomyError):
    """Rejection sampling found no point in an overlap."""


class JumpOutsideOverlap(HolonomyError):
    """A jump point is not a member of both cover sets it connects."""


class BasepointMismatch(HolonomyError):
    """Loop does not start at the required basepoint."""


class DimensionMismatch(HolonomyError):
    """Vector dimension does not match the representation."""


class MissingSample(HolonomyError):
    """Section sample not available at a required point."""


class UnsupportedGroup(HolonomyError):
    """Operation restricted to a specific structure group or manifold."""


class SceneError(HolonomyError):
    """Scene file failed to parse or references unresolved names."""
