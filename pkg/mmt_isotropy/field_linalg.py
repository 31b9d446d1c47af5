"""
Exact scalar arithmetic over the rationals and prime fields GF(q), and dense
matrix algebra on top of numpy object arrays.

Entries of a Matrix are always canonical: ``fractions.Fraction`` (or int) in
lowest terms for the rationals, ints in ``0..q-1`` for GF(q).
"""

import itertools
import logging
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from typing import Any, Iterable, Iterator, List, Optional, Sequence, Tuple

import numpy as np

from .errors import DimensionMismatch, FieldMismatch, InvalidInput, NotInvertible, ParseError

logger = logging.getLogger(__name__)

MAX_MODULUS = 2 ** 31


class FieldKind(str, Enum):
    RATIONALS = "rational"
    PRIME_FIELD = "gf"


def _is_prime(q: int) -> bool:
    if q < 2:
        return False
    d = 2
    while d * d <= q:
        if q % d == 0:
            return False
        d += 1
    return True


@dataclass(frozen=True)
class FieldSpec:
    """The ground field K: the rationals or GF(q) for a prime q."""

    kind: FieldKind
    modulus: Optional[int] = None

    def __post_init__(self):
        if self.kind == FieldKind.PRIME_FIELD:
            if not isinstance(self.modulus, int) or self.modulus > MAX_MODULUS or not _is_prime(self.modulus):
                raise InvalidInput(f"GF(q) needs a prime q <= 2^31, got {self.modulus!r}",
                                   {"modulus": self.modulus})
        elif self.modulus is not None:
            raise InvalidInput("the rationals take no modulus")

    @classmethod
    def rational(cls) -> "FieldSpec":
        return cls(FieldKind.RATIONALS)

    @classmethod
    def gf(cls, q: int) -> "FieldSpec":
        return cls(FieldKind.PRIME_FIELD, q)

    @classmethod
    def parse(cls, text: str) -> "FieldSpec":
        """Parse ``rational``, ``gf:<q>`` or ``gf <q>``."""
        token = text.strip().lower()
        if token in ("rational", "rationals", "q"):
            return cls.rational()
        for sep in (":", " "):
            head, _, tail = token.partition(sep)
            if head == "gf" and tail.strip():
                try:
                    q = int(tail.strip())
                except ValueError:
                    break
                return cls.gf(q)
        raise ParseError(f"Unknown field: {text!r}", {"field": text})

    @property
    def is_finite(self) -> bool:
        return self.kind == FieldKind.PRIME_FIELD

    @property
    def zero(self):
        return 0 if self.is_finite else Fraction(0)

    @property
    def one(self):
        return 1 if self.is_finite else Fraction(1)

    def __str__(self) -> str:
        return f"gf:{self.modulus}" if self.is_finite else "rational"

    def header(self) -> str:
        """The ``field`` line used by every file format."""
        return f"field gf {self.modulus}" if self.is_finite else "field rational"

    # -- scalars -----------------------------------------------------------

    def element(self, value: Any):
        """Coerce an int, Fraction or numpy integer into a canonical scalar."""
        if self.is_finite:
            if isinstance(value, Fraction):
                if value.denominator % self.modulus == 0:
                    raise InvalidInput(f"{value} has no image in GF({self.modulus})",
                                       {"value": str(value), "modulus": self.modulus})
                return (value.numerator * pow(value.denominator, -1, self.modulus)) % self.modulus
            return int(value) % self.modulus
        if isinstance(value, Fraction):
            return value
        return Fraction(int(value)) if isinstance(value, (int, np.integer)) else Fraction(value)

    def add(self, x, y):
        return (x + y) % self.modulus if self.is_finite else x + y

    def sub(self, x, y):
        return (x - y) % self.modulus if self.is_finite else x - y

    def mul(self, x, y):
        return (x * y) % self.modulus if self.is_finite else x * y

    def neg(self, x):
        return (-x) % self.modulus if self.is_finite else -x

    def inv(self, x):
        if x == 0:
            raise NotInvertible("zero has no inverse")
        if self.is_finite:
            return pow(x, -1, self.modulus)
        return 1 / Fraction(x)

    def div(self, x, y):
        return self.mul(x, self.inv(y))

    def reduce(self, arr: np.ndarray) -> np.ndarray:
        """Bring an object array back to canonical residues (no-op over Q)."""
        if self.is_finite:
            return arr % self.modulus
        return arr

    def elements(self) -> Iterator[int]:
        if not self.is_finite:
            raise InvalidInput("the rationals cannot be enumerated")
        return iter(range(self.modulus))

    def random_scalar(self, rng: np.random.Generator, nonzero: bool = False):
        while True:
            if self.is_finite:
                value = int(rng.integers(0, self.modulus))
            else:
                value = Fraction(int(rng.integers(-4, 5)), int(rng.integers(1, 4)))
            if value != 0 or not nonzero:
                return value

    def parse_scalar(self, text: str):
        """Parse a scalar literal: ``p`` or ``p/q`` (q>0, reduced) or a canonical residue."""
        token = text.strip()
        try:
            if self.is_finite:
                value = int(token)
                if not 0 <= value < self.modulus:
                    raise ParseError(f"Residue {token} is not canonical mod {self.modulus}")
                return value
            if "/" in token:
                num, den = (int(part) for part in token.split("/", 1))
                if den <= 0 or Fraction(num, den).denominator != den:
                    raise ParseError(f"Rational literal {token} is not in lowest terms")
                return Fraction(num, den)
            return Fraction(int(token))
        except ValueError as e:
            raise ParseError(f"Bad scalar literal {token!r}: {e}") from e

    def format_scalar(self, x) -> str:
        if self.is_finite:
            return str(int(x))
        x = Fraction(x)
        return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


RATIONALS = FieldSpec.rational()


class Matrix:
    """Dense immutable matrix over a FieldSpec."""

    __slots__ = ("field", "data")

    def __init__(self, data: Any, field: FieldSpec):
        arr = np.array(data, dtype=object)
        if arr.ndim != 2:
            raise DimensionMismatch(f"Matrix data must be 2-dimensional, got {arr.ndim}")
        canonical = np.empty(arr.size, dtype=object)
        for idx, v in enumerate(arr.ravel()):
            canonical[idx] = field.element(v)
        self._init(canonical.reshape(arr.shape), field)

    def _init(self, arr: np.ndarray, field: FieldSpec):
        arr.flags.writeable = False
        object.__setattr__(self, "data", arr)
        object.__setattr__(self, "field", field)

    @classmethod
    def wrap(cls, arr: np.ndarray, field: FieldSpec) -> "Matrix":
        """Wrap an object array that already holds field elements (reduces mod q)."""
        m = cls.__new__(cls)
        m._init(np.array(field.reduce(arr), dtype=object), field)
        return m

    def __setattr__(self, name, value):
        raise AttributeError("Matrix is immutable")

    @property
    def rows(self) -> int:
        return self.data.shape[0]

    @property
    def cols(self) -> int:
        return self.data.shape[1]

    @property
    def shape(self) -> Tuple[int, int]:
        return self.data.shape

    def __getitem__(self, idx):
        return self.data[idx]

    def entries(self) -> Tuple:
        return tuple(self.data.ravel())

    def __eq__(self, other) -> bool:
        if not isinstance(other, Matrix):
            return NotImplemented
        return (self.field == other.field and self.shape == other.shape
                and all(a == b for a, b in zip(self.data.ravel(), other.data.ravel())))

    def __hash__(self) -> int:
        return hash((self.field, self.shape, self.entries()))

    def __repr__(self) -> str:
        body = "; ".join(" ".join(self.field.format_scalar(v) for v in row) for row in self.data)
        return f"Matrix[{self.field}]({body})"

    def _check_field(self, other: "Matrix"):
        if self.field != other.field:
            raise FieldMismatch(f"Field mismatch: {self.field} vs {other.field}")

    def __matmul__(self, other: "Matrix") -> "Matrix":
        return mat_mul(self, other)

    def __add__(self, other: "Matrix") -> "Matrix":
        self._check_field(other)
        if self.shape != other.shape:
            raise DimensionMismatch(f"Cannot add {self.shape} and {other.shape}")
        return Matrix.wrap(self.data + other.data, self.field)

    def __sub__(self, other: "Matrix") -> "Matrix":
        self._check_field(other)
        if self.shape != other.shape:
            raise DimensionMismatch(f"Cannot subtract {self.shape} and {other.shape}")
        return Matrix.wrap(self.data - other.data, self.field)

    def __neg__(self) -> "Matrix":
        return Matrix.wrap(-self.data, self.field)

    def scale(self, scalar) -> "Matrix":
        return Matrix.wrap(self.data * self.field.element(scalar), self.field)

    @property
    def T(self) -> "Matrix":
        return Matrix.wrap(self.data.T.copy(), self.field)

    def is_zero(self) -> bool:
        return all(v == 0 for v in self.data.ravel())

    def is_square(self) -> bool:
        return self.rows == self.cols

    def first_nonzero(self) -> Optional[Tuple[int, int]]:
        """Row-major position of the first nonzero entry."""
        for idx, v in enumerate(self.data.ravel()):
            if v != 0:
                return divmod(idx, self.cols)
        return None

    def normalized(self) -> Tuple["Matrix", Any]:
        """Return (x0, lam) with self = lam * x0 and the first nonzero entry of x0 equal to 1."""
        pos = self.first_nonzero()
        if pos is None:
            return self, self.field.one
        lam = self.data[pos]
        return self.scale(self.field.inv(lam)), lam

    def trace(self):
        if not self.is_square():
            raise DimensionMismatch(f"Trace needs a square matrix, got {self.shape}")
        total = self.field.zero
        for i in range(self.rows):
            total = self.field.add(total, self.data[i, i])
        return total

    def rank(self) -> int:
        return rank(self)

    def inverse(self) -> "Matrix":
        return inverse(self)

    def contragredient(self) -> "Matrix":
        return contragredient(self)

    def is_invertible(self) -> bool:
        return self.is_square() and rank(self) == self.rows

    def vec(self) -> List:
        return vec(self)


# -- constructors ------------------------------------------------------------

def zeros(rows: int, cols: int, field: FieldSpec) -> Matrix:
    return Matrix.wrap(np.full((rows, cols), field.zero, dtype=object), field)


def identity(n: int, field: FieldSpec) -> Matrix:
    return scalar_matrix(n, field.one, field)


def scalar_matrix(n: int, scalar, field: FieldSpec) -> Matrix:
    arr = np.full((n, n), field.zero, dtype=object)
    for i in range(n):
        arr[i, i] = field.element(scalar)
    return Matrix.wrap(arr, field)


def matrix_unit(rows: int, cols: int, i: int, j: int, field: FieldSpec) -> Matrix:
    """The matrix unit e_ij (0-based indices)."""
    arr = np.full((rows, cols), field.zero, dtype=object)
    arr[i, j] = field.one
    return Matrix.wrap(arr, field)


def diagonal(values: Sequence, field: FieldSpec) -> Matrix:
    n = len(values)
    arr = np.full((n, n), field.zero, dtype=object)
    for i, v in enumerate(values):
        arr[i, i] = field.element(v)
    return Matrix.wrap(arr, field)


def random_matrix(rows: int, cols: int, field: FieldSpec, rng: np.random.Generator) -> Matrix:
    arr = np.empty((rows, cols), dtype=object)
    for idx in np.ndindex(rows, cols):
        arr[idx] = field.random_scalar(rng)
    return Matrix.wrap(arr, field)


def random_invertible(n: int, field: FieldSpec, rng: np.random.Generator) -> Matrix:
    """Rejection-sample an element of GL_n."""
    while True:
        x = random_matrix(n, n, field, rng)
        if rank(x) == n:
            return x


# -- core operations ----------------------------------------------------------

def mat_mul(x: Matrix, y: Matrix) -> Matrix:
    """Exact product x*y."""
    x._check_field(y)
    if x.cols != y.rows:
        raise DimensionMismatch(f"Cannot multiply {x.shape} by {y.shape}",
                                {"left": list(x.shape), "right": list(y.shape)})
    if x.cols == 0:
        return zeros(x.rows, y.cols, x.field)
    return Matrix.wrap(np.dot(x.data, y.data), x.field)


def row_echelon(x: Matrix, augment: Optional[Matrix] = None) -> Tuple[List[List[Any]], List[int]]:
    """
    Reduced row echelon form by exact Gauss-Jordan elimination.

    Args:
        x: Matrix to reduce
        augment: Optional matrix with the same row count carried along

    Returns:
        (rows of the reduced [x | augment], pivot columns of x)
    """
    f = x.field
    work = [list(row) for row in x.data]
    if augment is not None:
        if augment.rows != x.rows:
            raise DimensionMismatch("Augmented block needs the same row count")
        for row, extra in zip(work, augment.data):
            row.extend(extra)

    pivots: List[int] = []
    r = 0
    for col in range(x.cols):
        if r == x.rows:
            break
        pivot = next((i for i in range(r, x.rows) if work[i][col] != 0), None)
        if pivot is None:
            continue
        work[r], work[pivot] = work[pivot], work[r]
        inv = f.inv(work[r][col])
        work[r] = [f.mul(v, inv) for v in work[r]]
        for i in range(x.rows):
            factor = work[i][col]
            if i != r and factor != 0:
                work[i] = [f.sub(a, f.mul(factor, b)) for a, b in zip(work[i], work[r])]
        pivots.append(col)
        r += 1
    return work, pivots


def rank(x: Matrix) -> int:
    """Rank by exact Gaussian elimination."""
    if x.rows == 0 or x.cols == 0:
        return 0
    return len(row_echelon(x)[1])


def inverse(x: Matrix) -> Matrix:
    """Exact inverse; raises NotInvertible when x is singular."""
    if not x.is_square():
        raise DimensionMismatch(f"Only square matrices have inverses, got {x.shape}")
    n = x.rows
    work, pivots = row_echelon(x, identity(n, x.field))
    if len(pivots) != n:
        raise NotInvertible(f"Matrix of rank {len(pivots)} < {n} is singular", {"rank": len(pivots)})
    arr = np.array([row[n:] for row in work], dtype=object).reshape(n, n)
    return Matrix.wrap(arr, x.field)


def contragredient(x: Matrix) -> Matrix:
    """x^v = (x^t)^-1 = (x^-1)^t."""
    return inverse(x).T


def trace_pairing(x: Matrix, y: Matrix):
    """<x, y> = Tr(xy) for x in M_{a,b}, y in M_{b,a}."""
    if x.shape != (y.cols, y.rows):
        raise DimensionMismatch(f"Trace pairing needs M_ab x M_ba, got {x.shape} and {y.shape}")
    return mat_mul(x, y).trace()


def is_scalar_matrix(x: Matrix):
    """Return lam if x = lam*E, otherwise None."""
    if not x.is_square():
        return None
    lam = x.data[0, 0] if x.rows else x.field.one
    for (i, j), v in np.ndenumerate(x.data):
        if v != (lam if i == j else 0):
            return None
    return lam


def proportionality(x: Matrix, y: Matrix):
    """Return lam with y = lam*x (x nonzero), otherwise None."""
    x._check_field(y)
    if x.shape != y.shape:
        return None
    pos = x.first_nonzero()
    if pos is None:
        return x.field.one if y.is_zero() else None
    lam = x.field.div(y.data[pos], x.data[pos])
    return lam if x.scale(lam) == y else None


def vec(x: Matrix) -> List:
    """Column-major flattening: e_ij sits at index i + rows*j."""
    return list(x.data.ravel(order="F"))


def unvec(values: Iterable, rows: int, cols: int, field: FieldSpec) -> Matrix:
    arr = np.array(list(values), dtype=object).reshape((rows, cols), order="F")
    return Matrix.wrap(arr, field)


def kron(x: Matrix, y: Matrix) -> Matrix:
    """Kronecker product; vec(a x b) = kron(b^t, a) vec(x)."""
    x._check_field(y)
    outer = np.multiply.outer(x.data, y.data)
    arr = outer.transpose(0, 2, 1, 3).reshape(x.rows * y.rows, x.cols * y.cols)
    return Matrix.wrap(arr, x.field)


# -- finite field enumeration ---------------------------------------------------

def enumerate_invertible(n: int, field: FieldSpec) -> Iterator[Matrix]:
    """Stream GL_n(q) by brute force over all q^(n*n) matrices."""
    for values in itertools.product(field.elements(), repeat=n * n):
        x = Matrix.wrap(np.array(values, dtype=object).reshape(n, n), field)
        if rank(x) == n:
            yield x


def gl_order(n: int, q: int) -> int:
    order = 1
    for i in range(n):
        order *= q ** n - q ** i
    return order


def pgl_order(n: int, q: int) -> int:
    return gl_order(n, q) // (q - 1)
