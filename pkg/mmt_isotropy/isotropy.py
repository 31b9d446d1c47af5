"""
Elements of the isotropy group of <m, n, p>.

An IsotropyElement (pi, a, b, c) stands for rho_pi o T(a, b, c), where

    T(a, b, c)(x (x) y (x) z) = a x b^-1 (x) b y c^-1 (x) c z a^-1

and rho_pi moves the content of factor i to factor pi(i), transposing every
factor when pi is odd.
"""

import logging
from dataclasses import dataclass
from enum import Enum
from typing import Callable, Dict, List, Optional, Tuple

import numpy as np

from .errors import DimensionMismatch, FieldMismatch, InadmissiblePermutation, NotInvertible
from .field_linalg import (
    FieldSpec,
    Matrix,
    contragredient,
    identity,
    inverse,
    is_scalar_matrix,
    kron,
    random_invertible,
    rank,
)
from .tensor_space import (
    RankOneTriple,
    Shape,
    Tensor3,
    apply_sandwiches,
    permute_slots,
)

logger = logging.getLogger(__name__)


class Perm3(str, Enum):
    """Permutations of the three tensor factors."""

    ID = "id"
    P12 = "12"
    P13 = "13"
    P23 = "23"
    P123 = "123"
    P132 = "132"

    @property
    def images(self) -> Tuple[int, int, int]:
        """0-based images: factor i goes to factor images[i]."""
        return _IMAGES[self]

    @property
    def is_odd(self) -> bool:
        return self in (Perm3.P12, Perm3.P13, Perm3.P23)

    @classmethod
    def from_images(cls, images: Tuple[int, int, int]) -> "Perm3":
        for perm, imgs in _IMAGES.items():
            if imgs == tuple(images):
                return perm
        raise ValueError(f"Not a permutation of three factors: {images}")

    @classmethod
    def parse(cls, text: str) -> "Perm3":
        token = text.strip().strip("()")
        try:
            return cls(token)
        except ValueError:
            raise InadmissiblePermutation(f"Unknown permutation {text!r}") from None

    def __mul__(self, other: "Perm3") -> "Perm3":
        """self o other: apply other first."""
        return Perm3.from_images(tuple(self.images[other.images[i]] for i in range(3)))

    def inverse(self) -> "Perm3":
        inv = [0, 0, 0]
        for i, img in enumerate(self.images):
            inv[img] = i
        return Perm3.from_images(tuple(inv))

    def __str__(self) -> str:
        return self.value


_IMAGES = {
    Perm3.ID: (0, 1, 2),
    Perm3.P12: (1, 0, 2),
    Perm3.P13: (2, 1, 0),
    Perm3.P23: (0, 2, 1),
    Perm3.P123: (1, 2, 0),
    Perm3.P132: (2, 0, 1),
}

# rho_pi T(a, b, c) rho_pi^-1 = T(*CONJUGATION[pi](a, b, c))
CONJUGATION: Dict[Perm3, Callable[[Matrix, Matrix, Matrix], Tuple[Matrix, Matrix, Matrix]]] = {
    Perm3.ID: lambda a, b, c: (a, b, c),
    Perm3.P23: lambda a, b, c: (contragredient(b), contragredient(a), contragredient(c)),
    Perm3.P12: lambda a, b, c: (contragredient(c), contragredient(b), contragredient(a)),
    Perm3.P13: lambda a, b, c: (contragredient(a), contragredient(c), contragredient(b)),
    Perm3.P123: lambda a, b, c: (c, a, b),
    Perm3.P132: lambda a, b, c: (b, c, a),
}


def is_admissible(pi: Perm3, shape: Shape) -> bool:
    """rho_pi is well defined iff it maps every factor space onto its target."""
    shapes = shape.factor_shapes
    for src, dst in enumerate(pi.images):
        rows, cols = shapes[src]
        moved = (cols, rows) if pi.is_odd else (rows, cols)
        if moved != shapes[dst]:
            return False
    return True


def admissible_permutations(shape: Shape) -> List[Perm3]:
    """Permutations induced by Q: trivial, Z2 or all of S3 depending on coincidences among m, n, p."""
    return [pi for pi in Perm3 if is_admissible(pi, shape)]


def conjugate(pi: Perm3, a: Matrix, b: Matrix, c: Matrix) -> Tuple[Matrix, Matrix, Matrix]:
    return CONJUGATION[pi](a, b, c)


@dataclass(frozen=True)
class IsotropyElement:
    """rho_pi o T(a, b, c) acting on L for a fixed shape and field."""

    shape: Shape
    field: FieldSpec
    pi: Perm3
    a: Matrix
    b: Matrix
    c: Matrix

    def __post_init__(self):
        for name, mat, size in zip("abc", (self.a, self.b, self.c), self.shape.group_sizes):
            if mat.field != self.field:
                raise FieldMismatch(f"{name} is over {mat.field}, expected {self.field}")
            if mat.shape != (size, size):
                raise DimensionMismatch(f"{name} must be {size}x{size} for {self.shape}, got {mat.shape}")
            if rank(mat) != size:
                raise NotInvertible(f"{name} is not in GL_{size}", {"matrix": name})
        if not is_admissible(self.pi, self.shape):
            raise InadmissiblePermutation(
                f"Permutation ({self.pi}) is not admissible for {self.shape}",
                {"perm": self.pi.value, "shape": list(self.shape)},
            )

    @property
    def factors(self) -> Tuple[Matrix, Matrix, Matrix]:
        return self.a, self.b, self.c

    def key(self) -> Tuple:
        """Sortable key; equal for equal (pi, a, b, c)."""
        return (self.pi.value,) + tuple(self.a.entries() + self.b.entries() + self.c.entries())

    def __repr__(self) -> str:
        return f"IsotropyElement({self.shape}, {self.field}, pi={self.pi}, a={self.a}, b={self.b}, c={self.c})"


def unchecked_element(shape: Shape, field: FieldSpec, pi: Perm3, a: Matrix, b: Matrix, c: Matrix) -> IsotropyElement:
    """Construct without re-checking invertibility (inputs come from group operations)."""
    element = object.__new__(IsotropyElement)
    for name, value in (("shape", shape), ("field", field), ("pi", pi), ("a", a), ("b", b), ("c", c)):
        object.__setattr__(element, name, value)
    return element


def small_element(a: Matrix, b: Matrix, c: Matrix, shape: Optional[Shape] = None) -> IsotropyElement:
    """T(a, b, c) for a in GL_m, b in GL_n, c in GL_p."""
    inferred = Shape(a.rows, b.rows, c.rows)
    if shape is not None and shape != inferred:
        raise DimensionMismatch(f"Matrices of sizes {tuple(inferred)} do not match {shape}")
    return IsotropyElement(inferred, a.field, Perm3.ID, a, b, c)


def identity_element(shape: Shape, field: FieldSpec) -> IsotropyElement:
    m, n, p = shape
    return unchecked_element(shape, field, Perm3.ID, identity(m, field), identity(n, field), identity(p, field))


def rho_element(pi: Perm3, shape: Shape, field: FieldSpec) -> IsotropyElement:
    """The element of Q inducing pi on the factors."""
    m, n, p = shape
    return IsotropyElement(shape, field, pi, identity(m, field), identity(n, field), identity(p, field))


def random_element(shape: Shape, field: FieldSpec, rng: np.random.Generator,
                   full: bool = False) -> IsotropyElement:
    perms = admissible_permutations(shape) if full else [Perm3.ID]
    pi = perms[int(rng.integers(0, len(perms)))]
    a, b, c = (random_invertible(size, field, rng) for size in shape.group_sizes)
    return unchecked_element(shape, field, pi, a, b, c)


def _check_target(g: IsotropyElement, shape: Shape, field: FieldSpec):
    if g.field != field:
        raise FieldMismatch(f"Element over {g.field} cannot act on data over {field}")
    if g.shape != shape:
        raise DimensionMismatch(f"Element for {g.shape} cannot act on {shape}")


def apply(g: IsotropyElement, s: Tensor3) -> Tensor3:
    """Linear action: first T(a, b, c), then rho_pi."""
    _check_target(g, s.shape, s.field)
    a_inv, b_inv, c_inv = inverse(g.a), inverse(g.b), inverse(g.c)
    moved = apply_sandwiches(s, ((g.a, b_inv), (g.b, c_inv), (g.c, a_inv)))
    if g.pi == Perm3.ID:
        return moved
    return permute_slots(moved, g.pi.images, transpose=g.pi.is_odd)


def apply_to_rank_one(g: IsotropyElement, r: RankOneTriple) -> RankOneTriple:
    _check_target(g, r.shape, r.field)
    a_inv, b_inv, c_inv = inverse(g.a), inverse(g.b), inverse(g.c)
    images = (g.a @ r.u @ b_inv, g.b @ r.v @ c_inv, g.c @ r.w @ a_inv)
    slots: List[Optional[Matrix]] = [None, None, None]
    for src, dst in enumerate(g.pi.images):
        slots[dst] = images[src].T if g.pi.is_odd else images[src]
    return RankOneTriple(*slots)


def normalize(g: IsotropyElement) -> IsotropyElement:
    """Scale a, b, c so each has first nonzero entry (row-major) equal to 1."""
    a, b, c = (mat.normalized()[0] for mat in g.factors)
    return unchecked_element(g.shape, g.field, g.pi, a, b, c)


def _check_pair(g: IsotropyElement, h: IsotropyElement):
    if g.field != h.field:
        raise FieldMismatch(f"Cannot combine elements over {g.field} and {h.field}")
    if g.shape != h.shape:
        raise DimensionMismatch(f"Cannot combine elements for {g.shape} and {h.shape}")


def compose(g: IsotropyElement, h: IsotropyElement) -> IsotropyElement:
    """
    The element g o h in canonical (normalized) form.

    rho_g T_g rho_h T_h = rho_g rho_h (rho_h^-1 T_g rho_h) T_h, and the middle
    conjugate comes from the CONJUGATION table for pi_h^-1.
    """
    _check_pair(g, h)
    a, b, c = conjugate(h.pi.inverse(), g.a, g.b, g.c)
    return normalize(unchecked_element(g.shape, g.field, g.pi * h.pi, a @ h.a, b @ h.b, c @ h.c))


def invert(g: IsotropyElement) -> IsotropyElement:
    """(rho_pi T)^-1 = rho_pi^-1 (rho_pi T^-1 rho_pi^-1)."""
    a, b, c = conjugate(g.pi, inverse(g.a), inverse(g.b), inverse(g.c))
    return normalize(unchecked_element(g.shape, g.field, g.pi.inverse(), a, b, c))


def equal_mod_scalars(g: IsotropyElement, h: IsotropyElement) -> bool:
    """Same map on L: same pi and pairwise proportional a, b, c."""
    if g.shape != h.shape or g.field != h.field:
        return False
    g.shape.require_group_structure()
    return normalize(g).key() == normalize(h).key()


def is_isotropy(g: IsotropyElement, s: Tensor3) -> bool:
    return apply(g, s) == s


def kernel_test(a: Matrix, b: Matrix, c: Matrix) -> bool:
    """T(a, b, c) = 1 iff a, b, c are all scalar matrices."""
    return all(is_scalar_matrix(mat) is not None for mat in (a, b, c))


def as_factor_maps(g: IsotropyElement) -> Tuple[Matrix, Matrix, Matrix]:
    """Vec-coordinate matrices of x -> a x b^-1, y -> b y c^-1, z -> c z a^-1."""
    if g.pi != Perm3.ID:
        raise InadmissiblePermutation("Only factor-preserving elements split into factor maps")
    return (kron(contragredient(g.b), g.a),
            kron(contragredient(g.c), g.b),
            kron(contragredient(g.a), g.c))


def action_matrix(g: IsotropyElement) -> Matrix:
    """Matrix of T(a, b, c) on L; column j is the image of the j-th basis tensor."""
    m1, m2, m3 = as_factor_maps(g)
    return kron(kron(m1, m2), m3)


def acts_as_identity(g: IsotropyElement) -> bool:
    """Oracle for kernel_test: every basis tensor of L is fixed."""
    if g.pi != Perm3.ID:
        return False
    mat = action_matrix(g)
    return mat == identity(mat.rows, g.field)
