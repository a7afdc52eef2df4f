"""Exception hierarchy shared across the package."""


class VeertrackError(Exception):
    """Base class for all domain errors."""


class ParseError(VeertrackError):
    def __init__(self, message, line=None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


# -- algebra ----------------------------------------------------------------

class FieldError(VeertrackError):
    pass


class FieldMismatch(FieldError):
    """Two elements do not share a field descriptor."""


class NotPrimitive(VeertrackError):
    """No power of the matrix is entrywise positive."""


# -- train tracks -----------------------------------------------------------

class TrackError(VeertrackError):
    pass


class IncompleteTrack(TrackError):
    pass


class IllegalRegion(TrackError):
    def __init__(self, region, reason):
        self.region = region
        self.reason = reason
        super().__init__(f"illegal complementary region {region}: {reason}")


class SwitchViolation(TrackError):
    def __init__(self, switch):
        self.switch = switch
        super().__init__(f"switch condition fails at {switch}")


class NonpositiveWeight(TrackError):
    def __init__(self, branch):
        self.branch = branch
        super().__init__(f"weight of branch {branch} is not positive")


class NotFullyPunctured(TrackError):
    def __init__(self, regions):
        self.regions = regions
        super().__init__(f"unpunctured complementary regions: {regions}")


class DegenerateStratum(TrackError):
    """chi < 0 but no filling trivalent track exists (branch bound <= 0)."""


# -- moves ------------------------------------------------------------------

class MoveError(VeertrackError):
    pass


class NotLarge(MoveError):
    pass


class NotSmall(MoveError):
    pass


class NotMixed(MoveError):
    pass


class NotFoldable(MoveError):
    pass


class CentralSplit(MoveError):
    """Both guiding weights equal; the move is excluded from the move set."""

    def __init__(self, branch):
        self.branch = branch
        super().__init__(f"central split at branch {branch}")


class CentralSplitInBatch(CentralSplit):
    pass


class NotPseudoAnosov(VeertrackError):
    pass


# -- 2d/3d triangulations ---------------------------------------------------

class SelfAdjacentEdge(VeertrackError):
    def __init__(self, edge):
        self.edge = edge
        super().__init__(f"edge {edge} bounds the same triangle twice")


class TautError(VeertrackError):
    pass


class NotTaut(TautError):
    pass


class VeeringRequired(TautError):
    pass


class ClosingMismatch(TautError):
    """Certificate isomorphism does not match the final layer to the first."""


class DegenerateSystem(TautError):
    """Fiber-cycle linear system has unexpected rank; carries rank data."""

    def __init__(self, message, rank_data=None):
        self.rank_data = rank_data or {}
        super().__init__(message)


class BoundViolated(VeertrackError):
    """An implementation-falsifying inequality failure (internal assertion)."""
