"""Einstein Kropina metrics on Lie groups and reductive homogeneous spaces."""

from .errors import ChartRadiusError, DomainError, InputError, ReductiveError, SampleRejected
from .lie import BilinearForm, InnerProduct, LieAlgebra

__all__ = [
    "BilinearForm",
    "ChartRadiusError",
    "DomainError",
    "InnerProduct",
    "InputError",
    "LieAlgebra",
    "ReductiveError",
    "SampleRejected",
]

__version__ = "0.1.0"
