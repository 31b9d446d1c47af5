"""
Exact computations with the isotropy group of the matrix multiplication
tensor <m, n, p> over the rationals and small prime fields.
"""

from .errors import ErrorCode, IsotropyError
from .field_linalg import FieldSpec, Matrix
from .isotropy import (
    IsotropyElement,
    Perm3,
    apply,
    compose,
    equal_mod_scalars,
    invert,
    is_isotropy,
    normalize,
    small_element,
)
from .orbits import GroupMode, enumerate_group, group_order, orbit_equivalent, stabilizer
from .recovery import LinMap, recover_small_element, recover_triple, structure_tensor
from .tensor_space import Decomposition, RankOneTriple, Shape, Tensor3, build_mmt

__version__ = "0.1.0"

__all__ = [
    "Decomposition",
    "ErrorCode",
    "FieldSpec",
    "GroupMode",
    "IsotropyElement",
    "IsotropyError",
    "LinMap",
    "Matrix",
    "Perm3",
    "RankOneTriple",
    "Shape",
    "Tensor3",
    "apply",
    "build_mmt",
    "compose",
    "enumerate_group",
    "equal_mod_scalars",
    "group_order",
    "invert",
    "is_isotropy",
    "normalize",
    "orbit_equivalent",
    "recover_small_element",
    "recover_triple",
    "small_element",
    "stabilizer",
    "structure_tensor",
]
