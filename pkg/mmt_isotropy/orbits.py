"""
The isotropy group acting on rank decompositions of <m, n, p>.

Over a small prime field the group is enumerated exhaustively: every factor
GL_k(q) is listed, reduced to normalized representatives (one per scalar
class), and the product is streamed together with the admissible factor
permutations.
"""

import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from enum import Enum
from typing import Dict, Iterator, List, Optional, Sequence, Tuple

import networkx as nx

from .errors import BudgetExceeded, FieldMismatch, InvalidInput, NotADecompositionOfT
from .field_linalg import FieldSpec, Matrix, enumerate_invertible, gl_order, pgl_order
from .isotropy import (
    IsotropyElement,
    Perm3,
    admissible_permutations,
    apply,
    apply_to_rank_one,
    compose,
    identity_element,
    invert,
    normalize,
    unchecked_element,
)
from .tensor_space import (
    Decomposition,
    RankOneTriple,
    Shape,
    Tensor3,
    build_mmt,
    canonical_rank_one,
    decomposition_sum,
)

logger = logging.getLogger(__name__)

DEFAULT_BUDGET = 10 ** 8


class GroupMode(str, Enum):
    SMALL = "small"
    FULL = "full"


# -- action on decompositions ------------------------------------------------------

def act_on_decomposition(g: IsotropyElement, d: Decomposition) -> Decomposition:
    """Termwise image of d under g, order preserved."""
    if g.shape != d.shape:
        raise InvalidInput(f"Element for {g.shape} cannot act on a decomposition of {d.shape}")
    if g.field != d.field:
        raise FieldMismatch(f"Element over {g.field} cannot act on a decomposition over {d.field}")
    return Decomposition(d.shape, d.field, tuple(apply_to_rank_one(g, term) for term in d.terms))


def _term_key(r: RankOneTriple) -> Optional[Tuple]:
    """Equal keys iff equal decomposable tensors; None for the zero tensor."""
    if any(x.is_zero() for x in r.factors):
        return None
    return tuple(x.entries() for x in canonical_rank_one(r).factors)


def decompositions_equal_as_multisets(d1: Decomposition, d2: Decomposition) -> bool:
    """True iff the terms can be paired so that every pair is the same decomposable tensor."""
    if d1.shape != d2.shape or d1.field != d2.field or len(d1) != len(d2):
        return False
    if len(d1) == 0:
        return True

    graph = nx.Graph()
    left = [("L", i) for i in range(len(d1))]
    right = [("R", j) for j in range(len(d2))]
    graph.add_nodes_from(left, bipartite=0)
    graph.add_nodes_from(right, bipartite=1)
    partners: Dict[Optional[Tuple], List[int]] = {}
    for j, r in enumerate(d2.terms):
        partners.setdefault(_term_key(r), []).append(j)
    for i, s in enumerate(d1.terms):
        for j in partners.get(_term_key(s), ()):
            graph.add_edge(("L", i), ("R", j))


    # a term with no partner rules out a perfect matching
    if any(graph.degree(node) == 0 for node in left):
        return False
    matching = nx.bipartite.hopcroft_karp_matching(graph, top_nodes=left)
    return all(node in matching for node in left)


# -- enumeration ---------------------------------------------------------------------

def projective_representatives(n: int, field: FieldSpec) -> List[Matrix]:
    """One normalized matrix per scalar class of GL_n(q), sorted."""
    seen: Dict[Tuple, Matrix] = {}
    for x in enumerate_invertible(n, field):
        x0, _ = x.normalized()
        seen.setdefault(x0.entries(), x0)
    return [seen[key] for key in sorted(seen)]


def _check_enumerable(shape: Shape, field: FieldSpec, budget: int):
    shape.require_group_structure()
    if not field.is_finite:
        raise InvalidInput("Exhaustive enumeration needs a finite field")
    raw = 1
    for size in shape.group_sizes:
        raw *= gl_order(size, field.modulus)
    if raw > budget:
        raise BudgetExceeded(
            f"{raw} raw triples for {shape} over {field} exceed the budget of {budget}",
            {"raw_triples": raw, "budget": budget},
        )
    if raw * 10 > budget * 9:
        logger.warning(f"Enumeration of {raw} raw triples is close to the budget of {budget}")
    return raw


def _perms_for(shape: Shape, mode: GroupMode) -> List[Perm3]:
    return admissible_permutations(shape) if GroupMode(mode) == GroupMode.FULL else [Perm3.ID]


def _elements_for(shape: Shape, field: FieldSpec, perms: Sequence[Perm3], a_reps: Sequence[Matrix],
                  b_reps: Sequence[Matrix], c_reps: Sequence[Matrix]) -> List[IsotropyElement]:
    return [unchecked_element(shape, field, pi, a, b, c)
            for pi in perms for a in a_reps for b in b_reps for c in c_reps]


def iter_group(shape: Shape, field: FieldSpec, mode: GroupMode = GroupMode.SMALL,
               budget: int = DEFAULT_BUDGET) -> Iterator[IsotropyElement]:
    """Stream each group element once, in a fixed order, without materializing the group."""
    _check_enumerable(shape, field, budget)
    return _stream_group(shape, field, mode)


def _stream_group(shape: Shape, field: FieldSpec, mode: GroupMode) -> Iterator[IsotropyElement]:
    reps = [projective_representatives(size, field) for size in shape.group_sizes]
    for pi in _perms_for(shape, mode):
        for a in reps[0]:
            for b in reps[1]:
                for c in reps[2]:
                    yield unchecked_element(shape, field, pi, a, b, c)


def enumerate_group(shape: Shape, field: FieldSpec, mode: GroupMode = GroupMode.SMALL,
                    budget: int = DEFAULT_BUDGET, workers: int = 1) -> List[IsotropyElement]:
    """
    Every element of the (small or full) isotropy group over GF(q), sorted by key.

    Args:
        shape: The shape (m, n, p)
        field: A prime field
        mode: SMALL for factor-preserving elements only, FULL for all of them
        budget: Upper bound on |GL_m| * |GL_n| * |GL_p|
        workers: Threads sharing the work; the result does not depend on it

    Returns:
        Normalized elements, each exactly once

    Raises:
        BudgetExceeded: the raw triple count exceeds the budget
        InvalidInput: the field is infinite or the shape is (1, 1, 1)
    """
    raw = _check_enumerable(shape, field, budget)
    workers = max(1, int(workers))
    perms = _perms_for(shape, mode)
    reps = [projective_representatives(size, field) for size in shape.group_sizes]
    logger.info(f"Enumerating {GroupMode(mode).value} group of {shape} over {field}: "
                f"{raw} raw triples, {len(perms)} permutations, {workers} workers")

    chunks = [reps[0][k::workers] for k in range(workers)]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        futures = [pool.submit(_elements_for, shape, field, perms, chunk, reps[1], reps[2])
                   for chunk in chunks if chunk]
        merged = {}
        for future in futures:
            for element in future.result():
                merged.setdefault(element.key(), element)

    elements = [merged[key] for key in sorted(merged)]
    logger.info(f"Enumerated {len(elements)} elements")
    return elements


@dataclass(frozen=True)
class GroupOrder:
    """Counts obtained by enumeration, next to the closed formulas."""

    raw_triples: int
    small: int
    full: int
    permutations: int
    formula_small: int

    @property
    def matches_formula(self) -> bool:
        return self.small == self.formula_small


def group_order(shape: Shape, field: FieldSpec, budget: int = DEFAULT_BUDGET) -> GroupOrder:
    """Count GL triples and scalar classes by listing matrices; the formula is reported alongside."""
    _check_enumerable(shape, field, budget)
    raw, small, formula = 1, 1, 1
    for size in shape.group_sizes:
        raw *= sum(1 for _ in enumerate_invertible(size, field))
        small *= len(projective_representatives(size, field))
        formula *= pgl_order(size, field.modulus)
    perms = len(admissible_permutations(shape))
    return GroupOrder(raw, small, small * perms, perms, formula)


def distinct_actions(elements: Sequence[IsotropyElement], tensors: Sequence[Tensor3]) -> int:
    """Number of different images of the given tensors; a lower bound on the number of distinct maps."""
    return len({tuple(apply(g, t) for t in tensors) for g in elements})



# -- stabilizers and orbits --------------------------------------------------------------

def _require_decomposition_of_t(d: Decomposition):
    if decomposition_sum(d) != build_mmt(d.shape, d.field):
        raise NotADecompositionOfT(f"Decomposition with {len(d)} terms does not sum to {d.shape}",
                                   {"terms": len(d)})


@dataclass(frozen=True)
class StabilizerResult:
    elements: Tuple[IsotropyElement, ...]
    order: int
    closed: bool

    def verify_closed(self) -> bool:
        """Identity present, closed under compose and invert."""
        if not self.elements:
            return False
        keys = {g.key() for g in self.elements}
        shape, field = self.elements[0].shape, self.elements[0].field
        if normalize(identity_element(shape, field)).key() not in keys:
            return False
        for g in self.elements:
            if invert(g).key() not in keys:
                return False
            for h in self.elements:
                if compose(g, h).key() not in keys:
                    return False
        return True


def stabilizer(d: Decomposition, field: Optional[FieldSpec] = None, mode: GroupMode = GroupMode.FULL,
               budget: int = DEFAULT_BUDGET, workers: int = 1) -> StabilizerResult:
    """
    All group elements mapping the term multiset of d to itself.

    Raises:
        NotADecompositionOfT: d does not sum to <m, n, p>
        BudgetExceeded: the group is too large to enumerate
    """
    field = field or d.field
    if field != d.field:
        raise FieldMismatch(f"Decomposition is over {d.field}, not {field}")
    d.shape.require_group_structure()
    _require_decomposition_of_t(d)

    found = [g for g in enumerate_group(d.shape, field, mode, budget, workers)
             if decompositions_equal_as_multisets(act_on_decomposition(g, d), d)]
    result = StabilizerResult(tuple(found), len(found), False)
    closed = result.verify_closed()
    logger.info(f"Stabilizer of a {len(d)}-term decomposition of {d.shape}: order {len(found)}, closed={closed}")
    return StabilizerResult(tuple(found), len(found), closed)


def orbit_equivalent(d1: Decomposition, d2: Decomposition, field: Optional[FieldSpec] = None,
                     mode: GroupMode = GroupMode.FULL,
                     budget: int = DEFAULT_BUDGET) -> Optional[IsotropyElement]:
    """Some g with g . d1 = d2 as multisets, or None after exhausting the group."""
    field = field or d1.field
    if d1.field != field or d2.field != field:
        raise FieldMismatch("Both decompositions must be over the requested field")
    if d1.shape != d2.shape:
        raise InvalidInput(f"Decompositions of {d1.shape} and {d2.shape} cannot be equivalent")
    d1.shape.require_group_structure()
    _require_decomposition_of_t(d1)
    _require_decomposition_of_t(d2)
    if len(d1) != len(d2):
        logger.info(f"Term counts differ ({len(d1)} vs {len(d2)}); no search needed")
        return None

    candidates = iter_group(d1.shape, field, mode, budget)
    identity = normalize(identity_element(d1.shape, field))
    for g in _identity_first(identity, candidates):
        if decompositions_equal_as_multisets(act_on_decomposition(g, d1), d2):
            logger.debug(f"Witness found: {g}")
            return g
    return None


def _identity_first(identity: IsotropyElement, elements: Iterator[IsotropyElement]) -> Iterator[IsotropyElement]:
    yield identity
    key = identity.key()
    for g in elements:
        if g.key() != key:
            yield g
