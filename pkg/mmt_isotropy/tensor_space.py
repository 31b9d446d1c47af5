"""
Order-3 tensors in L = M_mn (x) M_np (x) M_pm and order-2 tensors in C_l (x) R_l.

A Tensor3 stores a dense 6-index coefficient array ``c[i, j, j', k, k', i']``
for the basis element e_ij (x) e_j'k (x) e_k'i'. Indices are 0-based in code
and 1-based in files.
"""

import logging
from dataclasses import dataclass
from typing import Iterable, Iterator, Sequence, Tuple

import numpy as np

from .errors import DimensionMismatch, FieldMismatch, InvalidInput
from .field_linalg import (
    FieldSpec,
    Matrix,
    identity,
    inverse,
    matrix_unit,
    proportionality,
    rank,
    vec,
)

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class Shape:
    """The triple (m, n, p) of <m, n, p>."""

    m: int
    n: int
    p: int

    def __post_init__(self):
        for name in ("m", "n", "p"):
            value = getattr(self, name)
            if not isinstance(value, int) or value < 1:
                raise InvalidInput(f"Shape entries must be positive integers, got {name}={value!r}")

    def __iter__(self):
        return iter((self.m, self.n, self.p))

    def __str__(self) -> str:
        return f"<{self.m},{self.n},{self.p}>"

    @property
    def factor_shapes(self) -> Tuple[Tuple[int, int], Tuple[int, int], Tuple[int, int]]:
        """Matrix shapes of L1, L2, L3."""
        return (self.m, self.n), (self.n, self.p), (self.p, self.m)

    @property
    def coeff_shape(self) -> Tuple[int, ...]:
        m, n, p = self
        return (m, n, n, p, p, m)

    @property
    def group_sizes(self) -> Tuple[int, int, int]:
        """Sizes of a, b, c in T(a, b, c)."""
        return self.m, self.n, self.p

    def supports_group_structure(self) -> bool:
        """Group operations need at least one of m, n, p above 1."""
        return (self.m, self.n, self.p) != (1, 1, 1)

    def require_group_structure(self):
        if not self.supports_group_structure():
            raise InvalidInput(f"Group operations are undefined for {self}",
                               {"shape": [self.m, self.n, self.p]})


class Tensor3:
    """Dense element of L1 (x) L2 (x) L3."""

    __slots__ = ("shape", "field", "coeffs")

    def __init__(self, shape: Shape, field: FieldSpec, coeffs: np.ndarray):
        coeffs = np.asarray(coeffs, dtype=object)
        if coeffs.shape != shape.coeff_shape:
            raise DimensionMismatch(
                f"Coefficient array {coeffs.shape} does not match {shape}",
                {"expected": list(shape.coeff_shape), "got": list(coeffs.shape)},
            )
        coeffs = field.reduce(coeffs)
        coeffs = np.array(coeffs, dtype=object)
        coeffs.flags.writeable = False
        self.shape = shape
        self.field = field
        self.coeffs = coeffs

    @classmethod
    def zero(cls, shape: Shape, field: FieldSpec) -> "Tensor3":
        return cls(shape, field, np.full(shape.coeff_shape, field.zero, dtype=object))

    def _check_compatible(self, other: "Tensor3"):
        if self.field != other.field:
            raise FieldMismatch(f"Field mismatch: {self.field} vs {other.field}")
        if self.shape != other.shape:
            raise DimensionMismatch(f"Shape mismatch: {self.shape} vs {other.shape}")

    def __eq__(self, other) -> bool:
        if not isinstance(other, Tensor3):
            return NotImplemented
        if self.shape != other.shape or self.field != other.field:
            return False
        return all(a == b for a, b in zip(self.coeffs.ravel(), other.coeffs.ravel()))

    def __hash__(self):
        return hash((self.shape, self.field, tuple(self.coeffs.ravel())))

    def __add__(self, other: "Tensor3") -> "Tensor3":
        self._check_compatible(other)
        return Tensor3(self.shape, self.field, self.coeffs + other.coeffs)

    def __sub__(self, other: "Tensor3") -> "Tensor3":
        self._check_compatible(other)
        return Tensor3(self.shape, self.field, self.coeffs - other.coeffs)

    def scale(self, scalar) -> "Tensor3":
        return Tensor3(self.shape, self.field, self.coeffs * self.field.element(scalar))

    def nonzero_items(self) -> Iterator[Tuple[Tuple[int, ...], object]]:
        """Nonzero coefficients in lexicographic index order."""
        for idx, value in np.ndenumerate(self.coeffs):
            if value != 0:
                yield idx, value

    def nonzero_count(self) -> int:
        return sum(1 for _ in self.nonzero_items())

    def is_zero(self) -> bool:
        return self.nonzero_count() == 0

    def __repr__(self) -> str:
        return f"Tensor3({self.shape}, {self.field}, nonzero={self.nonzero_count()})"


@dataclass(frozen=True)
class Tensor2:
    """Element of C_l (x) R_l; coefficient [i][j] belongs to e_i (x) e^j."""

    coeffs: Matrix

    def __post_init__(self):
        if not self.coeffs.is_square():
            raise DimensionMismatch(f"Tensor2 needs a square coefficient array, got {self.coeffs.shape}")

    @property
    def size(self) -> int:
        return self.coeffs.rows

    @property
    def field(self) -> FieldSpec:
        return self.coeffs.field


@dataclass(frozen=True)
class RankOneTriple:
    """The decomposable tensor u (x) v (x) w with u in M_mn, v in M_np, w in M_pm."""

    u: Matrix
    v: Matrix
    w: Matrix

    def __post_init__(self):
        if len({self.u.field, self.v.field, self.w.field}) != 1:
            raise FieldMismatch("All factors of a rank-one triple must share a field")
        m, n = self.u.shape
        if self.v.rows != n or self.w.shape != (self.v.cols, m):
            raise DimensionMismatch(
                f"Factors {self.u.shape}, {self.v.shape}, {self.w.shape} do not form M_mn x M_np x M_pm"
            )
        if self.u.is_zero() or self.v.is_zero() or self.w.is_zero():
            raise InvalidInput("Rank-one triples must have nonzero factors")

    @property
    def factors(self) -> Tuple[Matrix, Matrix, Matrix]:
        return self.u, self.v, self.w

    @property
    def field(self) -> FieldSpec:
        return self.u.field

    @property
    def shape(self) -> Shape:
        return Shape(self.u.rows, self.u.cols, self.v.cols)


@dataclass(frozen=True)
class Decomposition:
    """Ordered list of rank-one terms summing (hopefully) to a tensor."""

    shape: Shape
    field: FieldSpec
    terms: Tuple[RankOneTriple, ...]

    def __post_init__(self):
        object.__setattr__(self, "terms", tuple(self.terms))
        for idx, term in enumerate(self.terms):
            if term.field != self.field:
                raise FieldMismatch(f"Term {idx} is over {term.field}, expected {self.field}")
            if term.shape != self.shape:
                raise DimensionMismatch(f"Term {idx} has shape {term.shape}, expected {self.shape}")

    def __len__(self) -> int:
        return len(self.terms)


# -- construction --------------------------------------------------------------

def build_mmt(shape: Shape, field: FieldSpec) -> Tensor3:
    """<m, n, p> = sum of e_ij (x) e_jk (x) e_ki."""
    coeffs = np.full(shape.coeff_shape, field.zero, dtype=object)
    for i in range(shape.m):
        for j in range(shape.n):
            for k in range(shape.p):
                coeffs[i, j, j, k, k, i] = field.one
    return Tensor3(shape, field, coeffs)


def basis_tensor(shape: Shape, field: FieldSpec, index: Sequence[int]) -> Tensor3:
    coeffs = np.full(shape.coeff_shape, field.zero, dtype=object)
    coeffs[tuple(index)] = field.one
    return Tensor3(shape, field, coeffs)


def random_tensor(shape: Shape, field: FieldSpec, rng: np.random.Generator) -> Tensor3:
    coeffs = np.empty(shape.coeff_shape, dtype=object)
    for idx in np.ndindex(*shape.coeff_shape):
        coeffs[idx] = field.random_scalar(rng)
    return Tensor3(shape, field, coeffs)


def identity_tensor(l: int, field: FieldSpec) -> Tensor2:
    """delta_(l) = sum e_i (x) e^i."""
    return Tensor2(identity(l, field))


def apply_gl_action(g: Matrix, d: Tensor2) -> Tensor2:
    """g(v (x) v') = gv (x) v'g^-1, i.e. coefficients g * D * g^-1."""
    if g.shape != (d.size, d.size):
        raise DimensionMismatch(f"GL_{g.rows} cannot act on C_{d.size} (x) R_{d.size}")
    return Tensor2(g @ d.coeffs @ inverse(g))


def tau_map(dm: Tensor2, dn: Tensor2, dp: Tensor2) -> Tensor3:
    """
    The map c1 (x) r1 (x) c2 (x) r2 (x) c3 (x) r3 -> c1 r2 (x) c2 r3 (x) c3 r1.

    Args:
        dm: Element of C_m (x) R_m
        dn: Element of C_n (x) R_n
        dp: Element of C_p (x) R_p

    Returns:
        Its image in L for shape (m, n, p)
    """
    field = dm.field
    if dn.field != field or dp.field != field:
        raise FieldMismatch("tau_map arguments must share a field")
    shape = Shape(dm.size, dn.size, dp.size)
    outer = np.multiply.outer(np.multiply.outer(dm.coeffs.data, dn.coeffs.data), dp.coeffs.data)
    # outer[i, i', j, j', k, k'] lands on e_ij' (x) e_jk' (x) e_ki'
    return Tensor3(shape, field, outer.transpose(0, 3, 2, 5, 4, 1))


def rank_one_tensor(r: RankOneTriple) -> Tensor3:
    outer = np.multiply.outer(np.multiply.outer(r.u.data, r.v.data), r.w.data)
    return Tensor3(r.shape, r.field, outer)


def decomposition_sum(d: Decomposition) -> Tensor3:
    """Exact sum of the rank-one terms of d."""
    total = np.full(d.shape.coeff_shape, d.field.zero, dtype=object)
    for term in d.terms:
        total = d.field.reduce(total + rank_one_tensor(term).coeffs)
    return Tensor3(d.shape, d.field, total)


def standard_decomposition(shape: Shape, field: FieldSpec) -> Decomposition:
    """The mnp-term decomposition (e_ij, e_jk, e_ki)."""
    m, n, p = shape
    terms = [
        RankOneTriple(matrix_unit(m, n, i, j, field), matrix_unit(n, p, j, k, field),
                      matrix_unit(p, m, k, i, field))
        for i in range(m) for j in range(n) for k in range(p)
    ]
    return Decomposition(shape, field, tuple(terms))


def decomposition_over(d: Decomposition, field: FieldSpec) -> Decomposition:
    """Reduce a decomposition with rational entries into another field."""
    if field == d.field:
        return d
    if d.field.is_finite:
        raise FieldMismatch(f"Cannot move a decomposition from {d.field} to {field}")
    terms = []
    for idx, term in enumerate(d.terms):
        try:
            factors = [Matrix(x.data, field) for x in term.factors]
        except InvalidInput as e:
            raise InvalidInput(f"Term {idx + 1} has an entry with no image in {field}") from e
        if any(x.is_zero() for x in factors):
            raise InvalidInput(f"Term {idx + 1} vanishes over {field}", {"term": idx + 1})
        terms.append(RankOneTriple(*factors))
    return Decomposition(d.shape, field, tuple(terms))


# -- decomposable tensors --------------------------------------------------------

def decomposable_equal(s: RankOneTriple, r: RankOneTriple) -> bool:
    """u(x)v(x)w = u'(x)v'(x)w' iff u' = l1 u, v' = l2 v, w' = l3 w with l1 l2 l3 = 1."""
    if s.shape != r.shape or s.field != r.field:
        return False
    field = s.field
    product = field.one
    for x, y in zip(s.factors, r.factors):
        lam = proportionality(x, y)
        if lam is None:
            return False
        product = field.mul(product, lam)
    return product == field.one


def canonical_rank_one(r: RankOneTriple) -> RankOneTriple:
    """Representative with u and v scaled to first nonzero entry 1."""
    u0, lam_u = r.u.normalized()
    v0, lam_v = r.v.normalized()
    return RankOneTriple(u0, v0, r.w.scale(r.field.mul(lam_u, lam_v)))


# -- factorwise maps -----------------------------------------------------------------

def apply_on_axis(arr: np.ndarray, mat: np.ndarray, axis: int) -> np.ndarray:
    """out[..., i, ...] = sum_k mat[i, k] * arr[..., k, ...] along ``axis``."""
    return np.moveaxis(np.tensordot(mat, arr, axes=([1], [axis])), 0, axis)


def apply_sandwiches(s: Tensor3, pairs: Sequence[Tuple[Matrix, Matrix]]) -> Tensor3:
    """Apply x -> L x R to each factor, one (L, R) pair per factor of L."""
    arr = s.coeffs
    for slot, (left, right) in enumerate(pairs):
        rows, cols = s.shape.factor_shapes[slot]
        if left.shape != (rows, rows) or right.shape != (cols, cols):
            raise DimensionMismatch(f"Sandwich factors {left.shape}, {right.shape} do not act on M_{rows},{cols}")
        arr = apply_on_axis(arr, left.data, 2 * slot)
        arr = apply_on_axis(arr, right.data.T, 2 * slot + 1)
    return Tensor3(s.shape, s.field, arr)


def apply_factor_maps(s: Tensor3, maps: Sequence[Matrix]) -> Tensor3:
    """
    Apply arbitrary linear maps of L1, L2, L3 factorwise.

    Args:
        s: Tensor to transform
        maps: Three square matrices acting on vec coordinates of L1, L2, L3

    Returns:
        (M1 (x) M2 (x) M3) s
    """
    m, n, p = s.shape
    dims = [rows * cols for rows, cols in s.shape.factor_shapes]
    for mat, dim in zip(maps, dims):
        if mat.shape != (dim, dim):
            raise DimensionMismatch(f"Factor map of shape {mat.shape} does not act on a space of dimension {dim}")
    # swapping each index pair makes C-order flattening column-major
    arr = s.coeffs.transpose(1, 0, 3, 2, 5, 4).reshape(dims)
    for axis, mat in enumerate(maps):
        arr = apply_on_axis(arr, mat.data, axis)
    arr = arr.reshape(n, m, p, n, m, p).transpose(1, 0, 3, 2, 5, 4)
    return Tensor3(s.shape, s.field, arr)


def permute_slots(s: Tensor3, images: Sequence[int], transpose: bool) -> Tensor3:
    """Move factor i to factor images[i], transposing every factor if asked."""
    axes = [0] * 6
    for src, dst in enumerate(images):
        first, second = (2 * src + 1, 2 * src) if transpose else (2 * src, 2 * src + 1)
        axes[2 * dst], axes[2 * dst + 1] = first, second
    target_shapes = [None] * 3
    for src, dst in enumerate(images):
        rows, cols = s.shape.factor_shapes[src]
        target_shapes[dst] = (cols, rows) if transpose else (rows, cols)
    if tuple(target_shapes) != s.shape.factor_shapes:
        raise DimensionMismatch(f"Permutation {tuple(images)} does not preserve the factors of {s.shape}")
    return Tensor3(s.shape, s.field, s.coeffs.transpose(axes))


# -- span dimensions -------------------------------------------------------------------

def _span_rank(images: Iterable[Matrix], field: FieldSpec) -> int:
    rows = [vec(img) for img in images]
    if not rows:
        return 0
    return rank(Matrix(rows, field))


def left_span_dim(x: Matrix, shape: Shape) -> int:
    """dim x*M_np for x in M_mn; equals p*rank(x)."""
    if x.shape != (shape.m, shape.n):
        raise DimensionMismatch(f"Expected an element of M_{shape.m},{shape.n}, got {x.shape}")
    images = (x @ matrix_unit(shape.n, shape.p, j, k, x.field)
              for j in range(shape.n) for k in range(shape.p))
    return _span_rank(images, x.field)


def right_span_dim(y: Matrix, shape: Shape) -> int:
    """dim M_mn*y for y in M_np; equals m*rank(y)."""
    if y.shape != (shape.n, shape.p):
        raise DimensionMismatch(f"Expected an element of M_{shape.n},{shape.p}, got {y.shape}")
    images = (matrix_unit(shape.m, shape.n, i, j, y.field) @ y
              for i in range(shape.m) for j in range(shape.n))
    return _span_rank(images, y.field)
