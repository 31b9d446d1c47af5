"""
Line-oriented text formats for matrices, tensors, decompositions, elements,
linear maps, bilinear maps and stabilizers.

Every file starts with a header line naming its kind, then a ``field`` line.
Blank lines and everything after ``#`` are ignored. Indices are 1-based.
"""

import logging
from pathlib import Path
from typing import Callable, List, Tuple, TypeVar, Union

import numpy as np

from .errors import IsotropyError, ParseError
from .field_linalg import FieldSpec, Matrix
from .isotropy import IsotropyElement, Perm3
from .orbits import StabilizerResult
from .recovery import BilinearMap, LinMap
from .tensor_space import Decomposition, RankOneTriple, Shape, Tensor3

logger = logging.getLogger(__name__)

T = TypeVar("T")
PathLike = Union[str, Path]


class _Lines:
    """Cursor over the meaningful lines of a text, keeping line numbers for errors."""

    def __init__(self, text: str):
        self._lines: List[Tuple[int, List[str]]] = []
        for number, raw in enumerate(text.splitlines(), 1):
            tokens = raw.split("#", 1)[0].split()
            if tokens:
                self._lines.append((number, tokens))
        self._pos = 0

    def next(self, what: str) -> Tuple[int, List[str]]:
        if self._pos >= len(self._lines):
            raise ParseError(f"Unexpected end of input while reading {what}")
        line = self._lines[self._pos]
        self._pos += 1
        return line

    def expect(self, keyword: str, count: int) -> Tuple[int, List[int]]:
        """Read '<keyword> <int> ... <int>' with exactly count non-negative integers."""
        number, tokens = self.next(f"'{keyword}' header")
        if tokens[0] != keyword or len(tokens) != count + 1:
            raise ParseError(f"Line {number}: expected '{keyword}' followed by {count} integers",
                             {"line": number})
        return number, [_count(tok, number) for tok in tokens[1:]]

    def has_more(self) -> bool:
        return self._pos < len(self._lines)

    def done(self):
        if self._pos < len(self._lines):
            number, _ = self._lines[self._pos]
            raise ParseError(f"Line {number}: unexpected trailing content", {"line": number})


def _count(token: str, number: int) -> int:
    try:
        value = int(token)
    except ValueError:
        raise ParseError(f"Line {number}: {token!r} is not an integer", {"line": number}) from None
    if value < 0:
        raise ParseError(f"Line {number}: {token!r} must not be negative", {"line": number})
    return value


def _parse_field(lines: _Lines) -> FieldSpec:
    number, tokens = lines.next("field line")
    if tokens[0] != "field" or len(tokens) < 2:
        raise ParseError(f"Line {number}: expected 'field rational' or 'field gf <q>'", {"line": number})
    return FieldSpec.parse(" ".join(tokens[1:]))


def _parse_matrix(lines: _Lines, field: FieldSpec) -> Matrix:
    _, (rows, cols) = lines.expect("matrix", 2)
    data = []
    for _ in range(rows):
        number, tokens = lines.next("matrix row")
        if len(tokens) != cols:
            raise ParseError(f"Line {number}: expected {cols} entries, got {len(tokens)}", {"line": number})
        try:
            data.append([field.parse_scalar(tok) for tok in tokens])
        except ParseError as e:
            raise ParseError(f"Line {number}: {e.message}", {"line": number}) from e
    arr = np.empty((rows, cols), dtype=object)
    for i, row in enumerate(data):
        for j, value in enumerate(row):
            arr[i, j] = value
    return Matrix.wrap(arr, field)


def _format_matrix(x: Matrix) -> List[str]:
    lines = [f"matrix {x.rows} {x.cols}"]
    for row in x.data:
        lines.append(" ".join(x.field.format_scalar(v) for v in row))
    return lines


def _joined(lines: List[str]) -> str:
    return "\n".join(lines) + "\n"


def _shape(values: List[int], number: int) -> Shape:
    try:
        return Shape(*values)
    except IsotropyError as e:
        raise ParseError(f"Line {number}: {e.message}", {"line": number}) from e


# -- matrices --------------------------------------------------------------------------

def parse_matrix(text: str) -> Matrix:
    lines = _Lines(text)
    field = _parse_field(lines)
    x = _parse_matrix(lines, field)
    lines.done()
    return x


def format_matrix(x: Matrix) -> str:
    return _joined([x.field.header()] + _format_matrix(x))


# -- tensors ---------------------------------------------------------------------------

def parse_tensor(text: str) -> Tensor3:
    lines = _Lines(text)
    number, dims = lines.expect("tensor", 3)
    shape = _shape(dims, number)
    field = _parse_field(lines)
    coeffs = np.full(shape.coeff_shape, field.zero, dtype=object)
    seen = set()
    while lines.has_more():
        number, tokens = lines.next("coefficient")
        if len(tokens) != 7:
            raise ParseError(f"Line {number}: expected six indices and a scalar", {"line": number})
        index = tuple(_count(tok, number) - 1 for tok in tokens[:6])
        if any(i < 0 or i >= bound for i, bound in zip(index, shape.coeff_shape)):
            raise ParseError(f"Line {number}: index out of range for {shape}", {"line": number})
        if index in seen:
            raise ParseError(f"Line {number}: repeated coefficient index", {"line": number})
        seen.add(index)
        coeffs[index] = field.parse_scalar(tokens[6])
    return Tensor3(shape, field, coeffs)


def format_tensor(t: Tensor3) -> str:
    m, n, p = t.shape
    lines = [f"tensor {m} {n} {p}", t.field.header()]
    for index, value in t.nonzero_items():
        lines.append(" ".join(str(i + 1) for i in index) + " " + t.field.format_scalar(value))
    return _joined(lines)


# -- decompositions --------------------------------------------------------------------

def parse_decomposition(text: str) -> Decomposition:
    lines = _Lines(text)
    number, (m, n, p, count) = lines.expect("decomposition", 4)
    shape = _shape([m, n, p], number)
    field = _parse_field(lines)
    terms = []
    for _ in range(count):
        u, v, w = (_parse_matrix(lines, field) for _ in range(3))
        term = RankOneTriple(u, v, w)
        if term.shape != shape:
            raise ParseError(f"Term {len(terms) + 1} does not belong to {shape}")
        terms.append(term)
    lines.done()
    return Decomposition(shape, field, tuple(terms))


def format_decomposition(d: Decomposition) -> str:
    m, n, p = d.shape
    lines = [f"decomposition {m} {n} {p} {len(d)}", d.field.header()]
    for idx, term in enumerate(d.terms, 1):
        lines.append(f"# term {idx}")
        for factor in term.factors:
            lines.extend(_format_matrix(factor))
    return _joined(lines)


# -- isotropy elements ------------------------------------------------------------------

def _parse_element(lines: _Lines) -> IsotropyElement:
    number, dims = lines.expect("element", 3)
    shape = _shape(dims, number)
    field = _parse_field(lines)
    number, tokens = lines.next("perm line")
    if tokens[0] != "perm" or len(tokens) != 2:
        raise ParseError(f"Line {number}: expected 'perm <id|12|13|23|123|132>'", {"line": number})
    try:
        pi = Perm3(tokens[1].strip("()"))
    except ValueError:
        raise ParseError(f"Line {number}: unknown permutation {tokens[1]!r}", {"line": number}) from None
    a, b, c = (_parse_matrix(lines, field) for _ in range(3))
    return IsotropyElement(shape, field, pi, a, b, c)


def _format_element(g: IsotropyElement) -> List[str]:
    m, n, p = g.shape
    lines = [f"element {m} {n} {p}", g.field.header(), f"perm {g.pi.value}"]
    for factor in g.factors:
        lines.extend(_format_matrix(factor))
    return lines


def parse_element(text: str) -> IsotropyElement:
    lines = _Lines(text)
    g = _parse_element(lines)
    lines.done()
    return g


def format_element(g: IsotropyElement) -> str:
    return _joined(_format_element(g))


# -- linear and bilinear maps -------------------------------------------------------------

def parse_linmap(text: str) -> LinMap:
    lines = _Lines(text)
    number, (rows_out, cols_out, rows_in, cols_in) = lines.expect("linmap", 4)
    field = _parse_field(lines)
    mat = _parse_matrix(lines, field)
    lines.done()
    if mat.shape != (rows_out * cols_out, rows_in * cols_in):
        raise ParseError(f"Line {number}: action matrix {mat.shape} does not fit the declared spaces",
                         {"line": number})
    return LinMap(mat, (rows_in, cols_in), (rows_out, cols_out))


def format_linmap(a_map: LinMap) -> str:
    (rows_in, cols_in), (rows_out, cols_out) = a_map.domain, a_map.codomain
    lines = [f"linmap {rows_out} {cols_out} {rows_in} {cols_in}", a_map.field.header()]
    lines.extend(_format_matrix(a_map.matrix))
    return _joined(lines)


def parse_bilinear(text: str) -> BilinearMap:
    """Bilinear maps on plain coordinate spaces; use BilinearMap.with_shapes for matrix spaces."""
    lines = _Lines(text)
    number, (zdim, xdim, ydim) = lines.expect("bilinear", 3)
    field = _parse_field(lines)
    coeffs = np.empty((zdim, xdim, ydim), dtype=object)
    for z in range(zdim):
        block = _parse_matrix(lines, field)
        if block.shape != (xdim, ydim):
            raise ParseError(f"Block {z + 1} has shape {block.shape}, expected {(xdim, ydim)}",
                             {"line": number})
        coeffs[z] = block.data
    lines.done()
    return BilinearMap.from_dims(field, coeffs)


def format_bilinear(f: BilinearMap) -> str:
    zdim, xdim, ydim = f.dims
    lines = [f"bilinear {zdim} {xdim} {ydim}", f.field.header()]
    for z in range(zdim):
        lines.extend(_format_matrix(Matrix.wrap(f.coeffs[z], f.field)))
    return _joined(lines)


# -- stabilizers ---------------------------------------------------------------------------

def parse_stabilizer(text: str) -> StabilizerResult:
    lines = _Lines(text)
    _, (order,) = lines.expect("stabilizer", 1)
    elements = tuple(_parse_element(lines) for _ in range(order))
    lines.done()
    result = StabilizerResult(elements, order, False)
    return StabilizerResult(elements, order, result.verify_closed())


def format_stabilizer(result: StabilizerResult) -> str:
    lines = [f"stabilizer {result.order}"]
    for g in result.elements:
        lines.extend(_format_element(g))
    return _joined(lines)


# -- files ------------------------------------------------------------------------------------

def read_file(path: PathLike, parser: Callable[[str], T]) -> T:
    """Parse a file, naming it in any parse error."""
    try:
        text = Path(path).read_text()
    except OSError as e:
        raise ParseError(f"Cannot read {path}: {e.strerror}", {"path": str(path)}) from e
    try:
        return parser(text)
    except ParseError as e:
        raise ParseError(f"{path}: {e.message}", dict(e.details, path=str(path))) from e


def write_file(path: PathLike, text: str):
    Path(path).write_text(text)
    logger.debug(f"Wrote {path}")


# -- bundled data ---------------------------------------------------------------------------

DATA_DIR = Path(__file__).parent / 'data'
BUNDLED = ('strassen', 'standard')


def load_bundled(name: str) -> Decomposition:
    """One of the shipped decompositions of <2,2,2>, over the rationals."""
    if name not in BUNDLED:
        raise ParseError(f"Unknown bundled decomposition {name!r}; choose from {', '.join(BUNDLED)}",
                         {"name": name})
    return read_file(DATA_DIR / f'{name}_222.txt', parse_decomposition)
