"""Tests for isotropy elements, their action and group operations."""

import unittest

import numpy as np

from mmt_isotropy.errors import DimensionMismatch, FieldMismatch, InadmissiblePermutation, NotInvertible
from mmt_isotropy.field_linalg import (
    FieldSpec,
    Matrix,
    diagonal,
    enumerate_invertible,
    identity,
    random_invertible,
    random_matrix,
    scalar_matrix,
)
from mmt_isotropy.isotropy import (
    IsotropyElement,
    Perm3,
    acts_as_identity,
    admissible_permutations,
    apply,
    apply_to_rank_one,
    as_factor_maps,
    compose,
    conjugate,
    equal_mod_scalars,
    identity_element,
    invert,
    is_isotropy,
    kernel_test,
    normalize,
    random_element,
    rho_element,
    small_element,
)
from mmt_isotropy.tensor_space import (
    RankOneTriple,
    Shape,
    Tensor2,
    apply_gl_action,
    basis_tensor,
    build_mmt,
    random_tensor,
    rank_one_tensor,
    tau_map,
)

Q = FieldSpec.rational()
GF2 = FieldSpec.gf(2)
GF5 = FieldSpec.gf(5)


class TestPerm3(unittest.TestCase):
    """Test the permutation group of the three factors."""

    def test_inverse(self):
        """Test pi o pi^-1 = id."""
        for pi in Perm3:
            self.assertEqual(pi * pi.inverse(), Perm3.ID)
            self.assertEqual(pi.inverse() * pi, Perm3.ID)

    def test_parity(self):
        """Test transpositions are odd and 3-cycles even."""
        self.assertEqual({pi for pi in Perm3 if pi.is_odd}, {Perm3.P12, Perm3.P13, Perm3.P23})
        for pi in Perm3:
            for sigma in Perm3:
                self.assertEqual((pi * sigma).is_odd, pi.is_odd != sigma.is_odd)

    def test_composition_order(self):
        """Test the right factor is applied first."""
        self.assertEqual(Perm3.P12 * Perm3.P23, Perm3.P123)
        self.assertEqual(Perm3.P23 * Perm3.P12, Perm3.P132)

    def test_parse(self):
        """Test parsing with and without parentheses."""
        self.assertEqual(Perm3.parse("(12)"), Perm3.P12)
        self.assertEqual(Perm3.parse("id"), Perm3.ID)
        with self.assertRaises(InadmissiblePermutation):
            Perm3.parse("14")


class TestAdmissibility(unittest.TestCase):
    """Test which factor permutations exist for a shape."""

    def test_counts(self):
        """Test trivial, Z2 or S3 depending on coincidences among m, n, p."""
        self.assertEqual(admissible_permutations(Shape(2, 3, 4)), [Perm3.ID])
        self.assertEqual(len(admissible_permutations(Shape(2, 2, 2))), 6)
        self.assertEqual(set(admissible_permutations(Shape(2, 2, 3))), {Perm3.ID, Perm3.P23})
        self.assertEqual(set(admissible_permutations(Shape(2, 3, 2))), {Perm3.ID, Perm3.P12})
        self.assertEqual(set(admissible_permutations(Shape(3, 2, 2))), {Perm3.ID, Perm3.P13})

    def test_rho_fixes_t(self):
        """Test every admissible rho_pi fixes <m, n, p>."""
        for dims in ((2, 2, 2), (2, 2, 3), (2, 3, 2), (3, 2, 2), (1, 2, 2)):
            shape = Shape(*dims)
            t = build_mmt(shape, Q)
            for pi in admissible_permutations(shape):
                self.assertTrue(is_isotropy(rho_element(pi, shape, Q), t), f"{pi} on {shape}")

    def test_inadmissible_rejected(self):
        """Test rho_pi needs matching factor shapes."""
        with self.assertRaises(InadmissiblePermutation):
            rho_element(Perm3.P12, Shape(2, 3, 4), Q)


class TestElementConstruction(unittest.TestCase):
    """Test validation of (pi, a, b, c)."""

    def test_singular_factor(self):
        """Test a singular factor raises NotInvertible."""
        with self.assertRaises(NotInvertible):
            small_element(identity(2, Q), Matrix([[1, 1], [1, 1]], Q), identity(2, Q))

    def test_wrong_size(self):
        """Test a factor of the wrong size."""
        with self.assertRaises(DimensionMismatch):
            small_element(identity(2, Q), identity(2, Q), identity(2, Q), Shape(2, 2, 3))
        with self.assertRaises(DimensionMismatch):
            IsotropyElement(Shape(2, 2, 2), Q, Perm3.ID, identity(2, Q), identity(3, Q), identity(2, Q))

    def test_mixed_fields(self):
        """Test factors must share the element's field."""
        with self.assertRaises(FieldMismatch):
            IsotropyElement(Shape(2, 2, 2), Q, Perm3.ID, identity(2, Q), identity(2, GF5), identity(2, Q))


class TestAction(unittest.TestCase):
    """Test the linear action on L."""

    def setUp(self):
        self.rng = np.random.default_rng(2024)

    def test_sandwich_invariance(self):
        """Test T(a, b, c) fixes <m, n, p>."""
        for dims in ((2, 2, 2), (2, 3, 4), (1, 2, 2), (3, 3, 3)):
            shape = Shape(*dims)
            for field in (Q, GF2, GF5):
                t = build_mmt(shape, field)
                for _ in range(5):
                    self.assertTrue(is_isotropy(random_element(shape, field, self.rng), t))

    def test_tau_equivariance(self):
        """Test tau(a.dm, b.dn, c.dp) = T(a, b, c)(tau(dm, dn, dp)) on random inputs."""
        for dims in ((2, 2, 2), (2, 3, 4), (1, 2, 3)):
            for field in (Q, GF5):
                for _ in range(3):
                    dm, dn, dp = (Tensor2(random_matrix(size, size, field, self.rng)) for size in dims)
                    a, b, c = (random_invertible(size, field, self.rng) for size in dims)
                    moved = tau_map(apply_gl_action(a, dm), apply_gl_action(b, dn), apply_gl_action(c, dp))
                    self.assertEqual(moved, apply(small_element(a, b, c), tau_map(dm, dn, dp)))

    def test_full_elements_fix_t(self):
        """Test random elements with permutations fix <m, n, p>."""
        for dims in ((2, 2, 2), (2, 2, 3)):
            shape = Shape(*dims)
            t = build_mmt(shape, GF5)
            for _ in range(10):
                self.assertTrue(is_isotropy(random_element(shape, GF5, self.rng, full=True), t))

    def test_non_member(self):
        """Test T(diag(1, 2), E, E) moves a basis tensor."""
        shape = Shape(2, 2, 2)
        g = small_element(diagonal([1, 2], Q), identity(2, Q), identity(2, Q))
        s = basis_tensor(shape, Q, (1, 0, 0, 0, 0, 0))
        self.assertFalse(is_isotropy(g, s))
        self.assertEqual(apply(g, s), s.scale(2))

    def test_field_mismatch(self):
        """Test an element cannot act on a tensor over another field."""
        shape = Shape(2, 2, 2)
        with self.assertRaises(FieldMismatch):
            apply(identity_element(shape, GF5), build_mmt(shape, Q))
        with self.assertRaises(DimensionMismatch):
            apply(identity_element(shape, Q), build_mmt(Shape(2, 2, 3), Q))

    def test_rank_one_action(self):
        """Test the action on a rank-one triple agrees with the dense action."""
        shape = Shape(2, 2, 2)
        for _ in range(10):
            g = random_element(shape, GF5, self.rng, full=True)
            u, v, w = (random_invertible(2, GF5, self.rng) for _ in range(3))
            r = RankOneTriple(u, v, w)
            self.assertEqual(rank_one_tensor(apply_to_rank_one(g, r)), apply(g, rank_one_tensor(r)))

    def test_factor_maps_split_action(self):
        """Test only factor-preserving elements split into factor maps."""
        shape = Shape(2, 2, 2)
        with self.assertRaises(InadmissiblePermutation):
            as_factor_maps(rho_element(Perm3.P123, shape, Q))
        maps = as_factor_maps(identity_element(shape, Q))
        self.assertEqual(maps, tuple(identity(4, Q) for _ in range(3)))


class TestGroupOperations(unittest.TestCase):
    """Test composition, inversion and equality up to scalars."""

    def setUp(self):
        self.rng = np.random.default_rng(99)
        self.shape = Shape(2, 2, 2)

    def test_homomorphism(self):
        """Test apply(g o h) = apply(g) o apply(h)."""
        for field in (Q, GF5):
            for _ in range(10):
                g = random_element(self.shape, field, self.rng, full=True)
                h = random_element(self.shape, field, self.rng, full=True)
                s = random_tensor(self.shape, field, self.rng)
                self.assertEqual(apply(compose(g, h), s), apply(g, apply(h, s)))

    def test_homomorphism_two_permutations(self):
        """Test the law for a shape with only a transposition available."""
        shape = Shape(2, 2, 3)
        for _ in range(5):
            g = random_element(shape, GF5, self.rng, full=True)
            h = random_element(shape, GF5, self.rng, full=True)
            s = random_tensor(shape, GF5, self.rng)
            self.assertEqual(apply(compose(g, h), s), apply(g, apply(h, s)))

    def test_inverse(self):
        """Test g o g^-1 acts as the identity."""
        identity_g = identity_element(self.shape, Q)
        for _ in range(10):
            g = random_element(self.shape, Q, self.rng, full=True)
            self.assertTrue(equal_mod_scalars(compose(g, invert(g)), identity_g))
            self.assertTrue(equal_mod_scalars(compose(invert(g), g), identity_g))

    def test_equal_mod_scalars(self):
        """Test scaled factors give the same element."""
        a, b, c = (random_invertible(2, Q, self.rng) for _ in range(3))
        g = small_element(a, b, c)
        self.assertTrue(equal_mod_scalars(g, small_element(a.scale(2), b.scale(3), c.scale(-5))))
        self.assertFalse(equal_mod_scalars(g, small_element(a @ diagonal([1, 2], Q), b, c)))

    def test_normalize_idempotent(self):
        """Test normalization is idempotent and keeps the action."""
        g = random_element(self.shape, GF5, self.rng, full=True)
        self.assertEqual(normalize(normalize(g)).key(), normalize(g).key())
        s = random_tensor(self.shape, GF5, self.rng)
        self.assertEqual(apply(normalize(g), s), apply(g, s))

    def test_conjugation_table(self):
        """Test rho_pi T(a, b, c) rho_pi^-1 = T(f_pi(a, b, c)) for all pi."""
        for size in (2, 3):
            shape = Shape(size, size, size)
            for field in (GF5, Q):
                for _ in range(3):
                    a, b, c = (random_invertible(size, field, self.rng) for _ in range(3))
                    g = small_element(a, b, c)
                    for pi in Perm3:
                        rho = rho_element(pi, shape, field)
                        lhs = compose(compose(rho, g), invert(rho))
                        self.assertTrue(equal_mod_scalars(lhs, small_element(*conjugate(pi, a, b, c))),
                                        f"({pi}) over {field}")

    def test_mismatched_operands(self):
        """Test composing elements of different shapes."""
        with self.assertRaises(DimensionMismatch):
            compose(identity_element(Shape(2, 2, 2), Q), identity_element(Shape(2, 2, 3), Q))


class TestKernel(unittest.TestCase):
    """Test the kernel of (a, b, c) -> T(a, b, c)."""

    def test_exhaustive_gf2(self):
        """Test kernel_test against the basis-action oracle on all of GL_2(2)^3."""
        gl2 = list(enumerate_invertible(2, GF2))
        self.assertEqual(len(gl2), 6)
        in_kernel = 0
        for a in gl2:
            for b in gl2:
                for c in gl2:
                    claimed = kernel_test(a, b, c)
                    self.assertEqual(claimed, acts_as_identity(small_element(a, b, c)))
                    in_kernel += claimed
        self.assertEqual(in_kernel, 1)

    def test_scalar_triples(self):
        """Test (lambda E, mu E, nu E) is in the kernel."""
        triple = (scalar_matrix(2, 2, Q), scalar_matrix(3, -1, Q), scalar_matrix(2, 7, Q))
        self.assertTrue(kernel_test(*triple))
        self.assertTrue(acts_as_identity(small_element(*triple)))

    def test_non_scalar_triple(self):
        """Test a non-scalar factor leaves the kernel."""
        triple = (diagonal([1, 2], Q), identity(2, Q), identity(2, Q))
        self.assertFalse(kernel_test(*triple))
        self.assertFalse(acts_as_identity(small_element(*triple)))


if __name__ == '__main__':
    unittest.main()
