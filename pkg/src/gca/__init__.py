"""Exact arithmetic toolkit for generalized complex structures on
transitive Courant algebroids over Q(i)."""

__version__ = "0.1.0"

from .errors import (  # noqa: E402
    GcaError,
    InconsistentData,
    InvalidInput,
    NoAdaptedSplit,
    NotClosed,
    NotSemisimpleCartan,
    RankDropAtPoint,
    UnsupportedAlgebra,
    UnsupportedCartan,
)
from .exactnum import GaussianRational, Polynomial  # noqa: E402
from .liealg import QuadraticLieAlgebra, get_algebra, standard_roots  # noqa: E402
from .courant import CourantData, IsoData, Section  # noqa: E402
from .dirac import DiracQuadruple, adapted_basis, build_L, check_index_zero  # noqa: E402
from .gcs import GCSField, build_normal_form, build_wang_case, check_integrability  # noqa: E402
from .lagrangian import AdmissibleSystem, build_lagrangian, build_parabolic, weak_regular_span  # noqa: E402
from .report import Certificate  # noqa: E402
