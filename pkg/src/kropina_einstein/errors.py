"""Exception types shared across the package."""


class InputError(ValueError):
    """Malformed or inconsistent input data."""


class DomainError(ValueError):
    """Argument outside the domain of a function (e.g. outside the Kropina cone)."""


class ChartRadiusError(ValueError):
    """The exponential chart is singular or ill-conditioned at the requested point."""


class SampleRejected(ValueError):
    """A chart sample was discarded because the fundamental tensor is ill-conditioned."""


class ReductiveError(InputError):
    """A proposed decomposition g = h + m violates a reductive-space invariant."""

    def __init__(self, invariant: str, defect: float):
        self.invariant = invariant
        self.defect = defect
        super().__init__(f"{invariant} violated (defect {defect:.3e})")
