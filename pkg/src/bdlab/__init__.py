"""Top level API.

.. data:: __version__
    :type: str

    Version number as calculated by https://github.com/pypa/setuptools_scm
"""

from ._version import __version__
from .chains import build_chain, delta_n, f_even_via_identity, f_odd_via_identity
from .config import LabConfig, ModelKind
from .duhamel import bd_inner, bd_inner_quadrature, convexity_gap, functional_f
from .errors import (
    CapacityError,
    ConfigurationError,
    ConsistencyError,
    LabError,
    NumericError,
    ShapeError,
    VerificationError,
)
from .operators import HermitianOperator
from .spectral import decompose, free_energy_density, gibbs_average

__all__ = [
    "__version__",
    "CapacityError",
    "ConfigurationError",
    "ConsistencyError",
    "HermitianOperator",
    "LabConfig",
    "LabError",
    "ModelKind",
    "NumericError",
    "ShapeError",
    "VerificationError",
    "bd_inner",
    "bd_inner_quadrature",
    "build_chain",
    "convexity_gap",
    "decompose",
    "delta_n",
    "f_even_via_identity",
    "f_odd_via_identity",
    "free_energy_density",
    "functional_f",
    "gibbs_average",
]
