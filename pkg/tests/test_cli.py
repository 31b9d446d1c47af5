"""Tests for the mmt-isotropy command line."""

import json
import logging
import unittest
from fractions import Fraction

import numpy as np
from click.testing import CliRunner

from mmt_isotropy.cli import cli
from mmt_isotropy.field_linalg import FieldSpec, Matrix, identity, random_invertible
from mmt_isotropy.formats import (
    format_bilinear,
    format_decomposition,
    format_element,
    format_linmap,
    format_tensor,
    parse_element,
    parse_stabilizer,
    parse_tensor,
)
from mmt_isotropy.isotropy import equal_mod_scalars, identity_element, small_element
from mmt_isotropy.recovery import LinMap, composition_map, factor_linmaps, r_triple, structure_tensor
from mmt_isotropy.tensor_space import (
    Decomposition,
    RankOneTriple,
    Shape,
    basis_tensor,
    build_mmt,
    standard_decomposition,
)

Q = FieldSpec.rational()
GF2 = FieldSpec.gf(2)


def _write(name, text):
    with open(name, 'w') as f:
        f.write(text)
    return name


class CliTestCase(unittest.TestCase):
    """Run every command inside an isolated directory."""

    def setUp(self):
        self.runner = CliRunner()
        self._fs = self.runner.isolated_filesystem()
        self._fs.__enter__()
        self.rng = np.random.default_rng(2024)

    def tearDown(self):
        self._fs.__exit__(None, None, None)

    def invoke(self, *args):
        return self.runner.invoke(cli, list(args))

    def assertError(self, result, exit_code, code):
        self.assertEqual(result.exit_code, exit_code, result.output)
        self.assertEqual(json.loads(result.stderr.strip().splitlines()[-1])["error"]["code"], code)


class TestGen(CliTestCase):
    """Test tensor generation."""

    def test_mmt_222(self):
        """Test <2,2,2> has eight coefficient lines."""
        result = self.invoke('gen', '2', '2', '2', '--field', 'gf:2')
        self.assertEqual(result.exit_code, 0, result.output)
        lines = result.stdout.splitlines()
        self.assertEqual(lines[:2], ["tensor 2 2 2", "field gf 2"])
        self.assertEqual(len(lines), 10)

    def test_mmt_234_to_file(self):
        """Test <2,3,4> written with --out re-parses."""
        result = self.invoke('gen', '2', '3', '4', '--out', 't.txt')
        self.assertEqual(result.exit_code, 0, result.output)
        with open('t.txt') as f:
            t = parse_tensor(f.read())
        self.assertEqual(t, build_mmt(Shape(2, 3, 4), Q))
        self.assertEqual(t.nonzero_count(), 24)

    def test_random_is_seeded(self):
        """Test the same seed gives the same random tensor."""
        first = self.invoke('gen', '2', '2', '2', '--random', '--seed', '5')
        second = self.invoke('gen', '2', '2', '2', '--random', '--seed', '5')
        self.assertEqual(first.exit_code, 0, first.output)
        self.assertEqual(first.stdout, second.stdout)

    def test_bad_fields(self):
        """Test composite moduli and unknown names exit with status 2."""
        self.assertError(self.invoke('gen', '2', '2', '2', '--field', 'gf:4'), 2, "ERR_1002")
        self.assertError(self.invoke('gen', '2', '2', '2', '--field', 'reals'), 2, "ERR_1001")

    def test_zero_dimension(self):
        """Test dimensions must be positive."""
        self.assertEqual(self.invoke('gen', '0', '2', '2').exit_code, 2)


class TestElementCommands(CliTestCase):
    """Test apply, check, compose, invert, normalize, equal and rho."""

    def setUp(self):
        super().setUp()
        self.shape = Shape(2, 3, 2)
        a, b, c = (random_invertible(size, Q, self.rng) for size in self.shape.group_sizes)
        self.g = small_element(a, b, c)
        _write('g.txt', format_element(self.g))
        _write('t.txt', format_tensor(build_mmt(self.shape, Q)))

    def test_check_fixed(self):
        """Test an element fixes <m,n,p>."""
        result = self.invoke('check', 'g.txt', 't.txt')
        self.assertEqual(result.exit_code, 0, result.output)
        self.assertEqual(result.stdout.strip(), "fixed")

    def test_check_not_fixed(self):
        """Test a non-scalar element moves a basis tensor."""
        shape = Shape(2, 2, 2)
        a = Matrix([[1, 0], [1, 1]], Q)
        _write('h.txt', format_element(small_element(a, identity(2, Q), identity(2, Q))))
        _write('e.txt', format_tensor(basis_tensor(shape, Q, (0, 0, 0, 0, 0, 0))))
        result = self.invoke('check', 'h.txt', 'e.txt')
        self.assertEqual(result.exit_code, 1)
        self.assertEqual(result.stdout.strip(), "not fixed")

    def test_apply_keeps_mmt(self):
        """Test applying the element writes <m,n,p> back."""
        result = self.invoke('apply', 'g.txt', 't.txt')
        self.assertEqual(result.exit_code, 0, result.output)
        self.assertEqual(parse_tensor(result.stdout), build_mmt(self.shape, Q))

    def test_malformed_tensor(self):
        """Test a malformed file exits with status 2."""
        _write('bad.txt', "tensor 2 3 2\nfield rational\n1 1 1 1 1\n")
        self.assertError(self.invoke('check', 'g.txt', 'bad.txt'), 2, "ERR_1001")

    def test_shape_mismatch(self):
        """Test an element cannot act on a tensor of another shape."""
        _write('t222.txt', format_tensor(build_mmt(Shape(2, 2, 2), Q)))
        self.assertError(self.invoke('apply', 'g.txt', 't222.txt'), 1, "ERR_1003")

    def test_invert_then_compose(self):
        """Test g o g^-1 is the identity up to scalars."""
        self.assertEqual(self.invoke('invert', 'g.txt', '--out', 'ginv.txt').exit_code, 0)
        result = self.invoke('compose', 'g.txt', 'ginv.txt')
        self.assertEqual(result.exit_code, 0, result.output)
        self.assertTrue(equal_mod_scalars(parse_element(result.stdout), identity_element(self.shape, Q)))

    def test_normalize_and_equal(self):
        """Test a normalized element equals the original up to scalars."""
        self.assertEqual(self.invoke('normalize', 'g.txt', '--out', 'n.txt').exit_code, 0)
        result = self.invoke('equal', 'g.txt', 'n.txt')
        self.assertEqual(result.exit_code, 0, result.output)
        self.assertEqual(result.stdout.strip(), "equal")

    def test_not_equal(self):
        """Test a non-scalar element differs from the identity."""
        _write('id.txt', format_element(identity_element(self.shape, Q)))
        a = Matrix([[1, 1], [0, 1]], Q)
        _write('h.txt', format_element(small_element(a, identity(3, Q), identity(2, Q))))
        result = self.invoke('equal', 'h.txt', 'id.txt')
        self.assertEqual(result.exit_code, 1)
        self.assertEqual(result.stdout.strip(), "not equal")

    def test_rho(self):
        """Test admissible and inadmissible permutations."""
        result = self.invoke('rho', '23', '2', '2', '3')
        self.assertEqual(result.exit_code, 0, result.output)
        self.assertIn("perm 23", result.stdout)
        self.assertError(self.invoke('rho', '12', '2', '3', '4'), 1, "ERR_2002")
        self.assertEqual(self.invoke('rho', '321', '2', '2', '2').exit_code, 2)


class TestRecover(CliTestCase):
    """Test recovering T(a, b, c) from linear maps."""

    def test_decomposable(self):
        """Test the factor maps of an element give the element back."""
        a, b, c = (random_invertible(size, Q, self.rng) for size in (2, 3, 2))
        g = small_element(a, b, c)
        for name, a_map in zip(('a.txt', 'b.txt', 'c.txt'), factor_linmaps(g)):
            _write(name, format_linmap(a_map))
        result = self.invoke('recover', 'a.txt', 'b.txt', 'c.txt')
        self.assertEqual(result.exit_code, 0, result.output)
        self.assertTrue(equal_mod_scalars(parse_element(result.stdout), g))

    def test_multiplicative(self):
        """Test a sandwich triple recovers the matching element."""
        g1, g2, g3 = (random_invertible(size, Q, self.rng) for size in (2, 3, 2))
        for name, a_map in zip(('a.txt', 'b.txt', 'c.txt'), r_triple(g1, g2, g3)):
            _write(name, format_linmap(a_map))
        result = self.invoke('recover', 'a.txt', 'b.txt', 'c.txt', '--kind', 'multiplicative')
        self.assertEqual(result.exit_code, 0, result.output)
        self.assertTrue(equal_mod_scalars(parse_element(result.stdout), small_element(g1, g2, g3)))

    def test_not_multiplicative(self):
        """Test a scaled C breaks B(y)A(x) = C(yx)."""
        _write('a.txt', format_linmap(LinMap.identity(2, 2, Q)))
        _write('b.txt', format_linmap(LinMap.identity(2, 2, Q)))
        _write('c.txt', format_linmap(LinMap.identity(2, 2, Q).scale(Fraction(2))))
        self.assertError(self.invoke('recover', 'a.txt', 'b.txt', 'c.txt', '--kind', 'multiplicative'),
                         1, "ERR_2004")


class TestStructureTensor(CliTestCase):
    """Test the structure tensor command."""

    def test_composition_map(self):
        """Test the composition map gives its structure tensor."""
        phi = composition_map(Shape(2, 2, 2), Q)
        _write('phi.txt', format_bilinear(phi))
        result = self.invoke('structure-tensor', 'phi.txt', '--shape', '2', '2', '2')
        self.assertEqual(result.exit_code, 0, result.output)
        self.assertEqual(parse_tensor(result.stdout), structure_tensor(phi).to_tensor3())

    def test_shape_required(self):
        """Test --shape is required."""
        _write('phi.txt', format_bilinear(composition_map(Shape(2, 2, 2), Q)))
        self.assertEqual(self.invoke('structure-tensor', 'phi.txt').exit_code, 2)


class TestGroupCommands(CliTestCase):
    """Test stabilizer, orbit-equal and enumerate."""

    def test_stabilizer_bundled(self):
        """Test the Strassen stabilizer over GF(2) is a group."""
        result = self.invoke('stabilizer', '--bundled', 'strassen', '--field', 'gf:2', '--mode', 'small')
        self.assertEqual(result.exit_code, 0, result.output)
        parsed = parse_stabilizer(result.stdout)
        self.assertTrue(parsed.closed)
        self.assertEqual(216 % parsed.order, 0)

    def test_stabilizer_needs_finite_field(self):
        """Test enumeration over the rationals is rejected."""
        self.assertError(self.invoke('stabilizer', '--bundled', 'strassen'), 2, "ERR_1002")

    def test_entry_with_no_image(self):
        """Test a 1/2 entry cannot be reduced mod 2."""
        d = standard_decomposition(Shape(2, 2, 2), Q)
        x, y, z = d.terms[0].factors
        halved = RankOneTriple(x.scale(Fraction(1, 2)), y.scale(2), z)
        _write('halved.txt', format_decomposition(Decomposition(d.shape, Q, (halved,) + d.terms[1:])))
        self.assertError(self.invoke('stabilizer', 'halved.txt', '--field', 'gf:2'), 2, "ERR_1002")


    def test_stabilizer_needs_input(self):
        """Test a decomposition must be given."""
        self.assertEqual(self.invoke('stabilizer', '--field', 'gf:2').exit_code, 2)

    def test_orbit_equal(self):
        """Test Strassen is equivalent to itself but not to the standard algorithm."""
        same = self.invoke('orbit-equal', '--bundled', 'strassen', '--bundled', 'strassen',
                           '--field', 'gf:2', '--mode', 'small')
        self.assertEqual(same.exit_code, 0, same.output)
        self.assertTrue(equal_mod_scalars(parse_element(same.stdout), identity_element(Shape(2, 2, 2), GF2)))
        other = self.invoke('orbit-equal', '--bundled', 'standard', '--bundled', 'strassen', '--field', 'gf:2')
        self.assertEqual(other.exit_code, 1)
        self.assertEqual(other.stdout.strip(), "not equivalent")

    def test_enumerate(self):
        """Test the group orders of <2,2,2> over GF(2)."""
        result = self.invoke('enumerate', '2', '2', '2', '--field', 'gf:2')
        self.assertEqual(result.exit_code, 0, result.output)
        lines = result.stdout.splitlines()
        self.assertIn("small 216", lines)
        self.assertIn("full 1296", lines)
        self.assertIn("permutations 6", lines)
        self.assertIn("formula_small 216", lines)

    def test_enumerate_list(self):
        """Test --list streams one element per group member."""
        result = self.invoke('enumerate', '1', '1', '2', '--field', 'gf:2', '--list', '--out', 'g.txt')
        self.assertEqual(result.exit_code, 0, result.output)
        with open('g.txt') as f:
            self.assertEqual(f.read().count("element 1 1 2"), 12)

    def test_budget(self):
        """Test the budget stops the enumeration with status 3."""
        self.assertError(self.invoke('enumerate', '2', '2', '2', '--field', 'gf:3', '--budget', '100'),
                         3, "ERR_3001")

    def test_trivial_shape(self):
        """Test <1,1,1> has no group structure to enumerate."""
        self.assertError(self.invoke('enumerate', '1', '1', '1', '--field', 'gf:2'), 2, "ERR_1002")


class TestVerifySuite(CliTestCase):
    """Test the property suite command."""

    def test_selected_checks(self):
        """Test two cheap checks pass."""
        result = self.invoke('verify-suite', '--shape', '2', '2', '2', '--field', 'gf:2', '--samples', '1',
                             '--check', 'scalar triples are the kernel',
                             '--check', 'sandwich recovery round trip')
        self.assertEqual(result.exit_code, 0, result.output)
        self.assertIn("Results: 2/2 checks passed", result.stdout)

    def test_unknown_check(self):
        """Test an unknown check name is a usage error."""
        self.assertEqual(self.invoke('verify-suite', '--check', 'nothing').exit_code, 2)

    def test_config_env(self):
        """Test the ci configuration loads."""
        result = self.runner.invoke(cli, ['--config-env', 'ci', 'gen', '1', '1', '1'])
        self.assertEqual(result.exit_code, 0, result.output)

    def test_log_level_override(self):
        """Test --log-level replaces the configured level."""
        root = logging.getLogger()
        self.addCleanup(root.setLevel, root.level)
        result = self.runner.invoke(cli, ['--log-level', 'debug', 'gen', '1', '1', '1'])
        self.assertEqual(result.exit_code, 0, result.output)
        self.assertEqual(root.level, logging.DEBUG)



if __name__ == '__main__':
    unittest.main()
