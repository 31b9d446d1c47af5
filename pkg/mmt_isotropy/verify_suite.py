"""Reproducible property checks over every module, run by ``mmt-isotropy verify-suite``."""

import logging
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, List, Sequence, Tuple

import numpy as np

from .field_linalg import (
    FieldSpec,
    enumerate_invertible,
    random_invertible,
    random_matrix,
    rank,
    scalar_matrix,
)
from .formats import load_bundled
from .isotropy import (
    Perm3,
    acts_as_identity,
    apply,
    compose,
    conjugate,
    equal_mod_scalars,
    invert,
    is_isotropy,
    kernel_test,
    random_element,
    rho_element,
    small_element,
)
from .orbits import GroupMode, distinct_actions, enumerate_group, group_order, stabilizer
from .recovery import (
    BilinearMap,
    LinMap,
    StructureTensor,
    bilinear_from_structure,
    composition_map,
    delta_membership,
    gamma_from_delta,
    r_triple,
    sandwich_roundtrip,
    structure_tensor,
)
from .tensor_space import (
    RankOneTriple,
    Shape,
    apply_gl_action,
    build_mmt,
    decomposable_equal,
    decomposition_over,
    decomposition_sum,
    identity_tensor,
    left_span_dim,
    random_tensor,
    rank_one_tensor,
    right_span_dim,
)

logger = logging.getLogger(__name__)
GF2, GF3, GF5 = FieldSpec.gf(2), FieldSpec.gf(3), FieldSpec.gf(5)
RATIONAL = FieldSpec.rational()


@dataclass
class SuiteContext:
    shapes: Sequence[Shape]
    fields: Sequence[FieldSpec]
    samples: int
    seed: int
    workers: int = 1
    rng: np.random.Generator = field(init=False)

    def __post_init__(self):
        self.rng = np.random.default_rng(self.seed)


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    detail: str = ""

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        return f"{status} {self.name}" + (f" ({self.detail})" if self.detail else "")


# -- checks ------------------------------------------------------------------------------
# Each check returns (passed, detail).

def check_sandwich_invariance(ctx: SuiteContext) -> Tuple[bool, str]:
    """T(a, b, c) fixes <m, n, p> for random invertible a, b, c."""
    total = 0
    for shape in ctx.shapes:
        for fld in ctx.fields:
            t = build_mmt(shape, fld)
            for _ in range(ctx.samples):
                g = random_element(shape, fld, ctx.rng)
                if not is_isotropy(g, t):
                    return False, f"{shape} over {fld}: {g}"
                total += 1
    return True, f"{total} elements"


def check_kernel(ctx: SuiteContext) -> Tuple[bool, str]:
    """Over GF(2) only (E, E, E) acts trivially; scalar triples act trivially everywhere."""
    gl2 = list(enumerate_invertible(2, GF2))
    in_kernel = 0
    for a in gl2:
        for b in gl2:
            for c in gl2:
                claimed = kernel_test(a, b, c)
                if claimed != acts_as_identity(small_element(a, b, c)):
                    return False, f"kernel test disagrees with basis action at {a}, {b}, {c}"
                in_kernel += claimed
    if in_kernel != 1:
        return False, f"{in_kernel} triples in the kernel over GF(2)"
    for _ in range(ctx.samples):
        lam, mu, nu = (RATIONAL.random_scalar(ctx.rng, nonzero=True) for _ in range(3))
        triple = (scalar_matrix(2, lam, RATIONAL), scalar_matrix(3, mu, RATIONAL), scalar_matrix(2, nu, RATIONAL))
        if not (kernel_test(*triple) and acts_as_identity(small_element(*triple))):
            return False, f"scalar triple ({lam}, {mu}, {nu}) is not in the kernel"
    return True, f"{len(gl2) ** 3} triples, 1 in the kernel"


def check_group_order(ctx: SuiteContext) -> Tuple[bool, str]:
    """Enumerated group orders for <2,2,2> over GF(2) and GF(3)."""
    shape = Shape(2, 2, 2)
    small = enumerate_group(shape, GF2, GroupMode.SMALL, workers=ctx.workers)
    full = enumerate_group(shape, GF2, GroupMode.FULL, workers=ctx.workers)
    if (len(small), len(full)) != (216, 1296):
        return False, f"GF(2): {len(small)} small, {len(full)} full"
    t = build_mmt(shape, GF2)
    if not all(is_isotropy(g, t) for g in full):
        return False, "an enumerated element moves <2,2,2>"
    if distinct_actions(full, [random_tensor(shape, GF2, ctx.rng) for _ in range(2)]) != 1296:
        return False, "two enumerated elements act alike over GF(2)"
    small3 = enumerate_group(shape, GF3, GroupMode.SMALL, workers=ctx.workers)
    full3 = enumerate_group(shape, GF3, GroupMode.FULL, workers=ctx.workers)
    if (len(small3), len(full3)) != (13824, 82944):
        return False, f"GF(3): {len(small3)} small, {len(full3)} full"
    seen = distinct_actions(small3, [random_tensor(shape, GF3, ctx.rng) for _ in range(2)])
    if seen != 13824:
        return False, f"GF(3): {seen} distinct actions among {len(small3)} elements"
    if not group_order(shape, GF3).matches_formula:
        return False, "GF(3): scalar-class count disagrees with the PGL formula"
    return True, "216/1296 over GF(2), 13824/82944 over GF(3)"


def check_conjugation(ctx: SuiteContext) -> Tuple[bool, str]:
    """rho_pi T(a, b, c) rho_pi^-1 = T(f_pi(a, b, c)) for every permutation."""
    count = 0
    for size in (2, 3):
        shape = Shape(size, size, size)
        for fld in (GF5, RATIONAL):
            for _ in range(ctx.samples):
                a, b, c = (random_invertible(size, fld, ctx.rng) for _ in range(3))
                g = small_element(a, b, c)
                for pi in Perm3:
                    rho = rho_element(pi, shape, fld)
                    lhs = compose(compose(rho, g), invert(rho))
                    if not equal_mod_scalars(lhs, small_element(*conjugate(pi, a, b, c))):
                        return False, f"relation for ({pi}) fails over {fld}"
                count += 1
    return True, f"{count} triples x 6 permutations"


def check_composition_structure_tensor(ctx: SuiteContext) -> Tuple[bool, str]:
    """The structure tensor of phi(x, y) = yx is <m, n, p>, and <m, n, p> reads back as phi."""
    count = 0
    for fld in (GF2, RATIONAL):
        for m in range(1, 5):
            for n in range(1, 5):
                for p in range(1, 5):
                    shape = Shape(m, n, p)
                    phi, t = composition_map(shape, fld), build_mmt(shape, fld)
                    if structure_tensor(phi).to_tensor3() != t:
                        return False, f"{shape} over {fld}"
                    if bilinear_from_structure(StructureTensor.from_tensor3(t)) != phi:
                        return False, f"{shape} over {fld}: <m, n, p> does not read back as yx"
                    count += 1
    return True, f"{count} shapes"


def _perturbed(c_map: LinMap, rng: np.random.Generator) -> LinMap:
    rows, cols = c_map.domain
    while True:
        h = random_invertible(rows, c_map.field, rng)
        if h != scalar_matrix(rows, h[0, 0], c_map.field):
            return c_map.compose(LinMap.sandwich(h, scalar_matrix(cols, 1, c_map.field)))


def check_membership_bridge(ctx: SuiteContext) -> Tuple[bool, str]:
    """Multiplicative triples correspond exactly to decomposable maps fixing <m, n, p>."""
    shape = Shape(2, 3, 2)
    phi_by_field = {fld: composition_map(shape, fld) for fld in ctx.fields}
    for fld, phi in phi_by_field.items():
        t = build_mmt(shape, fld)
        for _ in range(ctx.samples):
            g1, g2, g3 = (random_invertible(size, fld, ctx.rng) for size in shape.group_sizes)
            member = r_triple(g1, g2, g3)
            non_member = (member[0], member[1], _perturbed(member[2], ctx.rng))
            for triple, expected in ((member, True), (non_member, False)):
                in_delta = delta_membership(*triple, phi)
                fixes = gamma_from_delta(*triple).fixes(t)
                if in_delta != expected or fixes != expected:
                    return False, f"over {fld}: delta={in_delta}, gamma={fixes}, expected {expected}"
    return True, f"{2 * ctx.samples * len(phi_by_field)} triples"


def check_structure_equivariance(ctx: SuiteContext) -> Tuple[bool, str]:
    """structure_tensor(g . f) = (A^v (x) B^v (x) C) structure_tensor(f)."""
    for fld in ctx.fields:
        for _ in range(ctx.samples):
            dims = [int(d) for d in ctx.rng.integers(1, 4, size=3)]
            coeffs = np.empty((dims[2], dims[0], dims[1]), dtype=object)
            for idx in np.ndindex(*coeffs.shape):
                coeffs[idx] = fld.random_scalar(ctx.rng)
            f = BilinearMap.from_dims(fld, coeffs)
            maps = [LinMap(random_invertible(d, fld, ctx.rng), (d, 1), (d, 1)) for d in dims]
            if structure_tensor(f.act(*maps)) != structure_tensor(f).act(*maps):
                return False, f"over {fld} with dimensions {dims}"
    return True, ""


def check_recovery_round_trip(ctx: SuiteContext) -> Tuple[bool, str]:
    """Decomposable maps fixing <m, n, p> are recovered as T(a, b, c)."""
    count = 0
    for shape in (Shape(2, 2, 2), Shape(2, 3, 4)):
        for fld in (GF5, RATIONAL):
            for _ in range(ctx.samples):
                a, b, c = (random_invertible(size, fld, ctx.rng) for size in shape.group_sizes)
                if not sandwich_roundtrip(a, b, c):
                    return False, f"{shape} over {fld}"
                count += 1
    return True, f"{count} triples"


def check_identity_tensor_invariance(ctx: SuiteContext) -> Tuple[bool, str]:
    """g . delta = delta in C_l (x) R_l."""
    for size in range(1, 5):
        delta = identity_tensor(size, RATIONAL)
        for _ in range(ctx.samples):
            g = random_invertible(size, RATIONAL, ctx.rng)
            if apply_gl_action(g, delta) != delta:
                return False, f"size {size}"
    return True, ""


def check_span_dimensions(ctx: SuiteContext) -> Tuple[bool, str]:
    """dim x M_np = p rk(x) and dim M_mn y = m rk(y)."""
    shape = Shape(2, 3, 4)
    for fld in ctx.fields:
        for _ in range(ctx.samples):
            x = random_matrix(shape.m, shape.n, fld, ctx.rng)
            y = random_matrix(shape.n, shape.p, fld, ctx.rng)
            if left_span_dim(x, shape) != shape.p * rank(x) or right_span_dim(y, shape) != shape.m * rank(y):
                return False, f"over {fld}"
    return True, ""


def check_rank_preservation(ctx: SuiteContext) -> Tuple[bool, str]:
    """Maps in a multiplicative triple preserve rank."""
    shape = Shape(3, 3, 2)
    for fld in ctx.fields:
        for _ in range(ctx.samples):
            a_map, b_map, _ = r_triple(*(random_invertible(size, fld, ctx.rng) for size in shape.group_sizes))
            x = random_matrix(*a_map.domain, fld, ctx.rng)
            y = random_matrix(*b_map.domain, fld, ctx.rng)
            if rank(a_map(x)) != rank(x) or rank(b_map(y)) != rank(y):
                return False, f"over {fld}"
    return True, ""


def check_decomposable_equality(ctx: SuiteContext) -> Tuple[bool, str]:
    """u (x) v (x) w = l1 u (x) l2 v (x) l3 w exactly when l1 l2 l3 = 1."""
    shape = Shape(2, 2, 3)
    for fld in (GF5, RATIONAL):
        for k in range(ctx.samples):
            u, v, w = (random_matrix(r, c, fld, ctx.rng) for r, c in shape.factor_shapes)
            if u.is_zero() or v.is_zero() or w.is_zero():
                continue
            lam1, lam2 = fld.random_scalar(ctx.rng, nonzero=True), fld.random_scalar(ctx.rng, nonzero=True)
            lam3 = fld.inv(fld.mul(lam1, lam2))
            if k % 2:
                lam3 = fld.mul(lam3, 2 if fld.is_finite else Fraction(2))
            s = RankOneTriple(u, v, w)
            r = RankOneTriple(u.scale(lam1), v.scale(lam2), w.scale(lam3))
            if decomposable_equal(s, r) != (rank_one_tensor(s) == rank_one_tensor(r)):
                return False, f"over {fld}"
    return True, ""


def check_homomorphism(ctx: SuiteContext) -> Tuple[bool, str]:
    """apply(g o h) = apply(g) o apply(h) on random tensors."""
    shape = Shape(2, 2, 2)
    for fld in (GF5, RATIONAL):
        for _ in range(ctx.samples):
            g = random_element(shape, fld, ctx.rng, full=True)
            h = random_element(shape, fld, ctx.rng, full=True)
            s = random_tensor(shape, fld, ctx.rng)
            if apply(compose(g, h), s) != apply(g, apply(h, s)):
                return False, f"over {fld}"
    return True, ""


def check_strassen_stabilizer(ctx: SuiteContext) -> Tuple[bool, str]:
    """The Strassen stabilizer over GF(2) is a group whose order does not depend on worker count."""
    d = load_bundled("strassen")
    if decomposition_sum(d) != build_mmt(d.shape, d.field):
        return False, "bundled decomposition does not sum to <2,2,2>"
    d2 = decomposition_over(d, GF2)
    first = stabilizer(d2, GF2, workers=1)
    second = stabilizer(d2, GF2, workers=max(2, ctx.workers))
    if not first.closed or first.order != second.order:
        return False, f"orders {first.order} and {second.order}, closed={first.closed}"
    if [g.key() for g in first.elements] != [g.key() for g in second.elements]:
        return False, "element lists differ between worker counts"
    return True, f"order {first.order}"


CHECKS: List[Tuple[str, Callable[[SuiteContext], Tuple[bool, str]]]] = [
    ("sandwich transformations fix <m,n,p>", check_sandwich_invariance),
    ("scalar triples are the kernel", check_kernel),
    ("group order by enumeration", check_group_order),
    ("conjugation by permutations", check_conjugation),
    ("composition map structure tensor", check_composition_structure_tensor),
    ("multiplicative triples vs fixed decomposable maps", check_membership_bridge),
    ("structure tensor equivariance", check_structure_equivariance),
    ("sandwich recovery round trip", check_recovery_round_trip),
    ("identity tensor invariance", check_identity_tensor_invariance),
    ("span dimension formula", check_span_dimensions),
    ("rank preservation of multiplicative maps", check_rank_preservation),
    ("decomposable tensor equality", check_decomposable_equality),
    ("action is a homomorphism", check_homomorphism),
    ("Strassen stabilizer", check_strassen_stabilizer),
]


def run_suite(shapes: Sequence[Shape], fields: Sequence[FieldSpec], samples: int, seed: int,
              workers: int = 1, names: Sequence[str] = ()) -> List[CheckResult]:
    """
    Run the checks in order; an exception inside a check counts as a failure.

    Args:
        shapes: Shapes for the sandwich invariance check
        fields: Fields for the sampled checks
        samples: Random cases per configuration; 0 leaves only exhaustive checks meaningful
        seed: Seed for the shared generator
        workers: Threads for the enumeration checks
        names: Restrict to these check names (all when empty)

    Returns:
        One CheckResult per check, in order
    """
    if samples == 0:
        logger.warning("samples=0: sampled checks pass vacuously")
    ctx = SuiteContext(list(shapes), list(fields), samples, seed, workers)
    results = []
    for name, check in CHECKS:
        if names and name not in names:
            continue
        logger.info(f"Running check: {name}")
        try:
            passed, detail = check(ctx)
        except Exception as e:
            logger.error(f"Check {name!r} raised {type(e).__name__}: {e}")
            passed, detail = False, f"{type(e).__name__}: {e}"
        results.append(CheckResult(name, passed, detail))
    return results
