"""
Recovering sandwich forms from linear maps, and the bridge between bilinear
maps and their structure tensors.

Linear maps between matrix spaces are stored as matrices acting on
column-major flattenings (see ``field_linalg.vec``). Dual spaces of matrix
spaces are identified through the trace pairing: the dual basis vector of
e_uv in M_{r,s} is e_vu in M_{s,r}. That identification is made only by
``transpose_permutation`` and ``StructureTensor.to_tensor3``.
"""

import logging
from dataclasses import dataclass, field as dataclass_field
from enum import Enum
from typing import Callable, List, Optional, Tuple

import numpy as np

from .errors import (
    DimensionMismatch,
    FieldMismatch,
    NotInvertible,
    NotMultiplicative,
    NotRankOnePreserving,
    NotSandwichForm,
)
from .field_linalg import (
    FieldSpec,
    Matrix,
    contragredient,
    identity,
    inverse,
    is_scalar_matrix,
    kron,
    matrix_unit,
    proportionality,
    rank,
    unvec,
    vec,
)
from .isotropy import (
    IsotropyElement,
    as_factor_maps,
    equal_mod_scalars,
    small_element,
)
from .tensor_space import Shape, Tensor3, apply_factor_maps, apply_on_axis, build_mmt

logger = logging.getLogger(__name__)

MatShape = Tuple[int, int]


# -- linear maps between matrix spaces -----------------------------------------

@dataclass(frozen=True)
class LinMap:
    """Linear map M_domain -> M_codomain given by its action on vec coordinates."""

    matrix: Matrix
    domain: MatShape
    codomain: MatShape

    def __post_init__(self):
        object.__setattr__(self, "domain", tuple(self.domain))
        object.__setattr__(self, "codomain", tuple(self.codomain))
        expected = (self.codomain[0] * self.codomain[1], self.domain[0] * self.domain[1])
        if self.matrix.shape != expected:
            raise DimensionMismatch(
                f"A map M_{self.domain} -> M_{self.codomain} needs a {expected} matrix, got {self.matrix.shape}"
            )

    @property
    def field(self) -> FieldSpec:
        return self.matrix.field

    @property
    def is_endomorphism(self) -> bool:
        return self.domain == self.codomain

    @classmethod
    def from_function(cls, fn: Callable[[Matrix], Matrix], domain: MatShape, codomain: MatShape,
                      field: FieldSpec) -> "LinMap":
        """Tabulate fn on the basis e_ij of M_domain, in column-major order."""
        rows, cols = domain
        columns = []
        for j in range(cols):
            for i in range(rows):
                image = fn(matrix_unit(rows, cols, i, j, field))
                if image.shape != tuple(codomain):
                    raise DimensionMismatch(f"Image of shape {image.shape} is not in M_{codomain}")
                columns.append(vec(image))
        arr = np.array(columns, dtype=object).reshape(len(columns), -1).T
        return cls(Matrix.wrap(arr, field), domain, codomain)

    @classmethod
    def identity(cls, rows: int, cols: int, field: FieldSpec) -> "LinMap":
        return cls(identity(rows * cols, field), (rows, cols), (rows, cols))

    @classmethod
    def sandwich(cls, left: Matrix, right: Matrix) -> "LinMap":
        """x -> left * x * right."""
        return cls(kron(right.T, left), (left.cols, right.rows), (left.rows, right.cols))

    @classmethod
    def transpose_sandwich(cls, left: Matrix, right: Matrix) -> "LinMap":
        """x -> left * x^t * right."""
        domain = (right.rows, left.cols)
        return cls.from_function(lambda x: left @ x.T @ right, domain, (left.rows, right.cols), left.field)

    def __call__(self, x: Matrix) -> Matrix:
        if x.shape != self.domain:
            raise DimensionMismatch(f"Map on M_{self.domain} cannot take a {x.shape} matrix")
        if x.field != self.field:
            raise FieldMismatch(f"Map over {self.field} cannot take a matrix over {x.field}")
        values = self.field.reduce(np.dot(self.matrix.data, np.array(vec(x), dtype=object)))
        return unvec(values, *self.codomain, self.field)

    def compose(self, other: "LinMap") -> "LinMap":
        """self o other."""
        if other.codomain != self.domain:
            raise DimensionMismatch(f"Cannot compose a map on M_{self.domain} after one into M_{other.codomain}")
        return LinMap(self.matrix @ other.matrix, other.domain, self.codomain)

    def scale(self, scalar) -> "LinMap":
        return LinMap(self.matrix.scale(scalar), self.domain, self.codomain)

    def is_invertible(self) -> bool:
        return self.matrix.is_square() and rank(self.matrix) == self.matrix.rows

    def inverse(self) -> "LinMap":
        return LinMap(inverse(self.matrix), self.codomain, self.domain)


def transpose_permutation(rows: int, cols: int, field: FieldSpec) -> Matrix:
    """P with P vec(x) = vec(x^t) for x in M_{rows,cols}."""
    return LinMap.from_function(lambda x: x.T, (rows, cols), (cols, rows), field).matrix


def dual_via_trace(a_map: LinMap) -> LinMap:
    """
    Contragredient of an automorphism of M_{r,s}, as a map of M_{s,r} = M_{r,s}*.

    For x -> a x b the result is w -> b^-1 w a^-1.
    """
    if not a_map.is_endomorphism:
        raise DimensionMismatch("Only automorphisms of a matrix space have a contragredient")
    rows, cols = a_map.domain
    perm = transpose_permutation(rows, cols, a_map.field)
    return LinMap(perm @ contragredient(a_map.matrix) @ perm.T, (cols, rows), (cols, rows))


# -- rank-one preservers ----------------------------------------------------------

class FormKind(str, Enum):
    SANDWICH = "sandwich"
    TRANSPOSE_SANDWICH = "transpose_sandwich"


@dataclass(frozen=True)
class RecoveredForm:
    """A(x) = a x b (SANDWICH) or A(x) = a x^t b (TRANSPOSE_SANDWICH)."""

    kind: FormKind
    a: Matrix
    b: Matrix

    def as_linmap(self) -> LinMap:
        if self.kind == FormKind.SANDWICH:
            return LinMap.sandwich(self.a, self.b)
        return LinMap.transpose_sandwich(self.a, self.b)


def _rank_one_factors(x: Matrix) -> Tuple[Matrix, Matrix]:
    """Split a rank-one matrix as column * row."""
    pos = x.first_nonzero()
    if pos is None:
        raise NotRankOnePreserving("A basis matrix was mapped to zero")
    i0, j0 = pos
    f = x.field
    col = Matrix.wrap(x.data[:, j0:j0 + 1].copy(), f)
    row = Matrix.wrap(x.data[i0:i0 + 1, :] * f.inv(x.data[i0, j0]), f)
    if col @ row != x:
        raise NotRankOnePreserving(f"Image of rank {rank(x)} where rank one was expected", {"rank": rank(x)})
    return col, row


def _sandwich_from_grid(images: List[List[Matrix]], rows: int, cols: int, field: FieldSpec) -> Tuple[Matrix, Matrix]:
    """
    Find (a, b) with images[i][j] = a e_ij b, assuming every image is rank one.

    Column spaces must depend on i only and row spaces on j only; the scalars
    lam_ij in images[i][j] = lam_ij a_i b_j must form a rank-one matrix.
    """
    a_hat = [_rank_one_factors(images[i][0])[0] for i in range(rows)]
    b_hat = [_rank_one_factors(images[0][j])[1] for j in range(cols)]

    lam = [[None] * cols for _ in range(rows)]
    for i in range(rows):
        for j in range(cols):
            lam[i][j] = proportionality(a_hat[i] @ b_hat[j], images[i][j])
            if lam[i][j] is None:
                raise NotRankOnePreserving(f"Image of e_{i + 1}{j + 1} is not spanned by the first-row and first-column factors",
                                           {"i": i + 1, "j": j + 1})

    for i in range(rows):
        for j in range(cols):
            if field.mul(lam[i][j], lam[0][0]) != field.mul(lam[i][0], lam[0][j]):
                raise NotRankOnePreserving("Scalar grid of the basis images is not rank one")

    a_arr = np.empty((a_hat[0].rows, rows), dtype=object)
    for i in range(rows):
        a_arr[:, i] = (a_hat[i].data[:, 0] * lam[i][0])
    b_arr = np.empty((cols, b_hat[0].cols), dtype=object)
    for j in range(cols):
        b_arr[j, :] = b_hat[j].data[0, :] * field.div(lam[0][j], lam[0][0])
    return Matrix.wrap(a_arr, field), Matrix.wrap(b_arr, field)


def classify_rank1_preserver(a_map: LinMap) -> RecoveredForm:
    """
    Write a rank-one preserving automorphism of M_{r,s} as x -> a x b or x -> a x^t b.

    Args:
        a_map: Automorphism of M_{r,s}

    Returns:
        RecoveredForm with a normalized (first nonzero entry 1); the scalar lives in b

    Raises:
        NotRankOnePreserving: a basis image is not rank one, the images are
            inconsistent, or the assembled form does not reproduce the map
    """
    if not a_map.is_endomorphism:
        raise DimensionMismatch(f"Expected an endomorphism, got M_{a_map.domain} -> M_{a_map.codomain}")
    rows, cols = a_map.domain
    field = a_map.field
    images = [[a_map(matrix_unit(rows, cols, i, j, field)) for j in range(cols)] for i in range(rows)]

    attempts = [(FormKind.SANDWICH, images)]
    if rows == cols:
        # A(x) = a x^t b means A(e_ji) = a e_ij b
        transposed = [[images[j][i] for j in range(rows)] for i in range(cols)]
        attempts.append((FormKind.TRANSPOSE_SANDWICH, transposed))

    failure: Optional[NotRankOnePreserving] = None
    for kind, grid in attempts:
        try:
            a, b = _sandwich_from_grid(grid, rows, cols, field)
        except NotRankOnePreserving as e:
            failure = e
            continue
        if not (a.is_invertible() and b.is_invertible()):
            failure = NotRankOnePreserving(f"{kind.value} factors are singular")
            continue
        a0, alpha = a.normalized()
        form = RecoveredForm(kind, a0, b.scale(alpha))
        if form.as_linmap() != a_map:
            failure = NotRankOnePreserving(f"{kind.value} form fails basis verification")
            continue
        logger.debug(f"Recovered {kind.value} form a={form.a} b={form.b}")
        return form
    raise failure


# -- multiplicative triples -----------------------------------------------------------

def _check_invertible(**maps: LinMap):
    for name, a_map in maps.items():
        if not a_map.is_invertible():
            raise NotInvertible(f"Map {name} is not invertible", {"map": name})


def _is_multiplicative(a_map: LinMap, b_map: LinMap, c_map: LinMap) -> bool:
    """B(y) A(x) = C(yx) on all basis pairs."""
    n, m = a_map.domain
    p = b_map.domain[0]
    field = a_map.field
    xs = [matrix_unit(n, m, u, v, field) for v in range(m) for u in range(n)]
    ys = [matrix_unit(p, n, w, q, field) for q in range(n) for w in range(p)]
    a_images = [a_map(x) for x in xs]
    b_images = [b_map(y) for y in ys]
    for x, ax in zip(xs, a_images):
        for y, by in zip(ys, b_images):
            if by @ ax != c_map(y @ x):
                return False
    return True


def recover_triple(a_map: LinMap, b_map: LinMap, c_map: LinMap) -> Tuple[Matrix, Matrix, Matrix]:
    """
    Solve B(y) A(x) = C(yx) for sandwich factors.

    Args:
        a_map: Automorphism of M_{n,m}
        b_map: Automorphism of M_{p,n}
        c_map: Automorphism of M_{p,m}

    Returns:
        (a, b, c) in GL_p x GL_n x GL_m with B(y) = a y b, A(x) = b^-1 x c
        and C(z) = a z c

    Raises:
        NotMultiplicative: the identity fails on some basis pair
        NotSandwichForm: A or B turns out to involve a transpose
    """
    n, m = a_map.domain
    p = b_map.domain[0]
    if not (a_map.is_endomorphism and b_map.is_endomorphism and c_map.is_endomorphism):
        raise DimensionMismatch("recover_triple needs automorphisms of matrix spaces")
    if b_map.domain != (p, n) or c_map.domain != (p, m):
        raise DimensionMismatch(
            f"Expected maps on M_{n},{m}, M_{p},{n}, M_{p},{m}; got {a_map.domain}, {b_map.domain}, {c_map.domain}"
        )
    if len({a_map.field, b_map.field, c_map.field}) != 1:
        raise FieldMismatch("All three maps must share a field")
    _check_invertible(A=a_map, B=b_map, C=c_map)

    forms = {}
    for name, a_map_i in (("B", b_map), ("A", a_map)):
        try:
            form = classify_rank1_preserver(a_map_i)
        except NotRankOnePreserving as e:
            raise NotMultiplicative(f"Map {name} does not preserve rank one: {e.message}") from e
        if form.kind == FormKind.TRANSPOSE_SANDWICH:
            raise NotSandwichForm(f"Map {name} has the form x -> a x^t b", {"map": name})
        forms[name] = form
    if not _is_multiplicative(a_map, b_map, c_map):
        raise NotMultiplicative("B(y) A(x) != C(yx) on some pair of basis matrices")

    a, b0 = forms["B"].a, forms["B"].b
    b1, c1 = forms["A"].a, forms["A"].b
    # b0 b1 commutes with every y x, so it is scalar
    lam = is_scalar_matrix(b0 @ b1)
    if lam is None:
        raise NotMultiplicative("Middle factors do not reconcile to a scalar")
    c = c1.scale(lam)

    if LinMap.sandwich(a, c) != c_map:
        raise NotMultiplicative("Recovered factors do not reproduce C")
    logger.debug(f"Recovered triple with middle scalar {lam}")
    return a, b0, c


# -- bilinear maps and structure tensors ---------------------------------------------------

@dataclass(frozen=True)
class BilinearMap:
    """f: X x Y -> Z with f(e_x, e_y) = sum_z coeffs[z, x, y] e_z."""

    field: FieldSpec
    coeffs: np.ndarray
    x_shape: MatShape
    y_shape: MatShape
    z_shape: MatShape

    def __post_init__(self):
        coeffs = np.array(self.field.reduce(np.asarray(self.coeffs, dtype=object)), dtype=object)
        dims = tuple(r * s for r, s in (self.z_shape, self.x_shape, self.y_shape))
        if coeffs.shape != dims:
            raise DimensionMismatch(f"Coefficient array {coeffs.shape} does not match dimensions {dims}")
        coeffs.flags.writeable = False
        object.__setattr__(self, "coeffs", coeffs)
        for name in ("x_shape", "y_shape", "z_shape"):
            object.__setattr__(self, name, tuple(getattr(self, name)))

    @classmethod
    def from_dims(cls, field: FieldSpec, coeffs: np.ndarray) -> "BilinearMap":
        """Map between plain column spaces K^x x K^y -> K^z."""
        zdim, xdim, ydim = np.asarray(coeffs).shape
        return cls(field, coeffs, (xdim, 1), (ydim, 1), (zdim, 1))

    @property
    def dims(self) -> Tuple[int, int, int]:
        return self.coeffs.shape

    def with_shapes(self, x_shape: MatShape, y_shape: MatShape, z_shape: MatShape) -> "BilinearMap":
        """Reinterpret the same coefficients on matrix spaces of matching dimension."""
        return BilinearMap(self.field, self.coeffs, x_shape, y_shape, z_shape)

    def __eq__(self, other) -> bool:
        if not isinstance(other, BilinearMap):
            return NotImplemented
        return (self.field == other.field and self.dims == other.dims
                and (self.x_shape, self.y_shape, self.z_shape) == (other.x_shape, other.y_shape, other.z_shape)
                and all(a == b for a, b in zip(self.coeffs.ravel(), other.coeffs.ravel())))

    def __hash__(self):
        return hash((self.field, self.dims, tuple(self.coeffs.ravel())))

    def evaluate(self, x: Matrix, y: Matrix) -> Matrix:
        if x.shape != self.x_shape or y.shape != self.y_shape:
            raise DimensionMismatch(f"Arguments {x.shape}, {y.shape} do not match {self.x_shape}, {self.y_shape}")
        xv = np.array(vec(x), dtype=object)
        yv = np.array(vec(y), dtype=object)
        zv = self.field.reduce(np.dot(np.dot(self.coeffs, yv), xv))
        return unvec(zv, *self.z_shape, self.field)

    def act(self, a_map: LinMap, b_map: LinMap, c_map: LinMap) -> "BilinearMap":
        """(A, B, C) . f = C o f o (A^-1 x B^-1)."""
        _check_invertible(A=a_map, B=b_map, C=c_map)
        arr = apply_on_axis(self.coeffs, c_map.matrix.data, 0)
        arr = apply_on_axis(arr, inverse(a_map.matrix).data.T, 1)
        arr = apply_on_axis(arr, inverse(b_map.matrix).data.T, 2)
        return BilinearMap(self.field, arr, self.x_shape, self.y_shape, self.z_shape)


@dataclass(frozen=True)
class StructureTensor:
    """Element of X* (x) Y* (x) Z in dual-basis coordinates: coeffs[x, y, z]."""

    field: FieldSpec
    coeffs: np.ndarray
    x_shape: MatShape
    y_shape: MatShape
    z_shape: MatShape

    def __post_init__(self):
        coeffs = np.array(self.field.reduce(np.asarray(self.coeffs, dtype=object)), dtype=object)
        coeffs.flags.writeable = False
        object.__setattr__(self, "coeffs", coeffs)

    def __eq__(self, other) -> bool:
        if not isinstance(other, StructureTensor):
            return NotImplemented
        return (self.field == other.field and self.coeffs.shape == other.coeffs.shape
                and all(a == b for a, b in zip(self.coeffs.ravel(), other.coeffs.ravel())))

    def __hash__(self):
        return hash((self.field, self.coeffs.shape, tuple(self.coeffs.ravel())))

    def composition_shape(self) -> Shape:
        """(m, n, p) when X = M_{n,m}, Y = M_{p,n}, Z = M_{p,m}."""
        (n, m), (p, n2), (p2, m2) = self.x_shape, self.y_shape, self.z_shape
        if n != n2 or p != p2 or m != m2:
            raise DimensionMismatch(
                f"Spaces {self.x_shape}, {self.y_shape}, {self.z_shape} are not M_nm, M_pn, M_pm"
            )
        return Shape(m, n, p)

    def to_tensor3(self) -> Tensor3:
        """Identify X* = M_{m,n}, Y* = M_{n,p} by the trace pairing and Z = M_{p,m}."""
        shape = self.composition_shape()
        m, n, p = shape
        # axes come out as (j, i, k, j', k', i') for x = e_ji, y = e_kj', z = e_k'i'
        arr = self.coeffs.reshape((n, m, p, n, p, m), order="F").transpose(1, 0, 3, 2, 4, 5)
        return Tensor3(shape, self.field, arr)

    @classmethod
    def from_tensor3(cls, t: Tensor3) -> "StructureTensor":
        m, n, p = t.shape
        arr = np.ascontiguousarray(t.coeffs.transpose(1, 0, 3, 2, 4, 5)).reshape((n * m, p * n, p * m), order="F")
        return cls(t.field, arr, (n, m), (p, n), (p, m))

    def act(self, a_map: LinMap, b_map: LinMap, c_map: LinMap) -> "StructureTensor":
        """A^v (x) B^v (x) C."""
        _check_invertible(A=a_map, B=b_map, C=c_map)
        arr = apply_on_axis(self.coeffs, contragredient(a_map.matrix).data, 0)
        arr = apply_on_axis(arr, contragredient(b_map.matrix).data, 1)
        arr = apply_on_axis(arr, c_map.matrix.data, 2)
        return StructureTensor(self.field, arr, self.x_shape, self.y_shape, self.z_shape)


def structure_tensor(f: BilinearMap) -> StructureTensor:
    return StructureTensor(f.field, f.coeffs.transpose(1, 2, 0), f.x_shape, f.y_shape, f.z_shape)


def bilinear_from_structure(st: StructureTensor) -> BilinearMap:
    return BilinearMap(st.field, st.coeffs.transpose(2, 0, 1), st.x_shape, st.y_shape, st.z_shape)


def composition_map(shape: Shape, field: FieldSpec) -> BilinearMap:
    """phi(x, y) = yx on M_{n,m} x M_{p,n} -> M_{p,m}; phi(e_uv, e_wq) = delta_qu e_wv."""
    m, n, p = shape
    coeffs = np.full((p * m, n * m, p * n), field.zero, dtype=object)
    for u in range(n):
        for v in range(m):
            for w in range(p):
                coeffs[w + p * v, u + n * v, w + p * u] = field.one
    return BilinearMap(field, coeffs, (n, m), (p, n), (p, m))


def r_triple(g1: Matrix, g2: Matrix, g3: Matrix) -> Tuple[LinMap, LinMap, LinMap]:
    """A x = g2 x g1^-1, B y = g3 y g2^-1, C z = g3 z g1^-1; always in Delta(phi)."""
    g1_inv, g2_inv = inverse(g1), inverse(g2)
    return LinMap.sandwich(g2, g1_inv), LinMap.sandwich(g3, g2_inv), LinMap.sandwich(g3, g1_inv)


def delta_membership(a_map: LinMap, b_map: LinMap, c_map: LinMap, f: BilinearMap) -> bool:
    """f(Ax, By) = C f(x, y) for all basis x, y."""
    if (a_map.domain, b_map.domain, c_map.domain) != (f.x_shape, f.y_shape, f.z_shape):
        raise DimensionMismatch("Maps do not act on the spaces of the bilinear map")
    if not (a_map.is_endomorphism and b_map.is_endomorphism and c_map.is_endomorphism):
        raise DimensionMismatch("delta_membership needs automorphisms")
    lhs = apply_on_axis(f.coeffs, a_map.matrix.data.T, 1)
    lhs = f.field.reduce(apply_on_axis(lhs, b_map.matrix.data.T, 2))
    rhs = f.field.reduce(apply_on_axis(f.coeffs, c_map.matrix.data, 0))
    return all(x == y for x, y in zip(lhs.ravel(), rhs.ravel()))


# -- decomposable maps of L -----------------------------------------------------------------

@dataclass(frozen=True)
class DecomposableMap:
    """M1 (x) M2 (x) M3 acting on L = M_mn (x) M_np (x) M_pm."""

    shape: Shape
    maps: Tuple[LinMap, LinMap, LinMap]
    element: Optional[IsotropyElement] = dataclass_field(default=None, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "maps", tuple(self.maps))
        for idx, (a_map, factor) in enumerate(zip(self.maps, self.shape.factor_shapes)):
            if a_map.domain != factor or a_map.codomain != factor:
                raise DimensionMismatch(f"Factor map {idx + 1} does not act on M_{factor}")

    @property
    def field(self) -> FieldSpec:
        return self.maps[0].field

    def apply(self, s: Tensor3) -> Tensor3:
        return apply_factor_maps(s, [a_map.matrix for a_map in self.maps])

    def fixes(self, s: Tensor3) -> bool:
        return self.apply(s) == s


def recover_small_element(maps: Tuple[LinMap, LinMap, LinMap], shape: Shape) -> IsotropyElement:
    """
    Write a decomposable map fixing <m, n, p> as T(a, b, c).

    Dualizes the first two factors through the trace pairing, which turns the
    map into a multiplicative triple for phi(x, y) = yx, then solves that
    triple with recover_triple. The triple is multiplicative iff the map
    fixes <m, n, p>.

    Raises:
        NotInvertible: a factor map is singular
        NotSandwichForm: a factor map transposes its argument
        NotMultiplicative: the map does not fix <m, n, p>
    """
    decomposable = DecomposableMap(shape, maps)
    first, second, third = decomposable.maps
    a1, b1, c1 = recover_triple(dual_via_trace(first), dual_via_trace(second), third)
    return small_element(inverse(c1), inverse(b1), a1, shape)


def gamma_from_delta(a_map: LinMap, b_map: LinMap, c_map: LinMap) -> DecomposableMap:
    """
    The map A^v (x) B^v (x) C on L for a triple acting on M_{n,m}, M_{p,n}, M_{p,m}.

    The element field holds T(a, b, c) when the map fixes <m, n, p>.
    """
    _check_invertible(A=a_map, B=b_map, C=c_map)
    (n, m), (p, _) = a_map.domain, b_map.domain
    shape = Shape(m, n, p)
    maps = (dual_via_trace(a_map), dual_via_trace(b_map), c_map)
    decomposable = DecomposableMap(shape, maps)
    element = None
    if decomposable.fixes(build_mmt(shape, decomposable.field)):
        element = recover_small_element(maps, shape)
    return DecomposableMap(shape, maps, element)


def factor_linmaps(g: IsotropyElement) -> Tuple[LinMap, LinMap, LinMap]:
    """x -> a x b^-1, y -> b y c^-1, z -> c z a^-1 as LinMaps on L1, L2, L3."""
    return tuple(LinMap(mat, factor, factor) for mat, factor in zip(as_factor_maps(g), g.shape.factor_shapes))


def sandwich_roundtrip(a: Matrix, b: Matrix, c: Matrix) -> bool:
    """Strip T(a, b, c) to raw factor maps and recover it from them alone."""
    g = small_element(a, b, c)
    recovered = recover_small_element(factor_linmaps(g), g.shape)
    return equal_mod_scalars(recovered, g)
