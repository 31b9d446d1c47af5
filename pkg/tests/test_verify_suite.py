"""Tests for the property suite."""

import unittest
from unittest import mock

from mmt_isotropy import verify_suite
from mmt_isotropy.field_linalg import FieldSpec
from mmt_isotropy.tensor_space import Shape
from mmt_isotropy.verify_suite import CHECKS, CheckResult, run_suite

GF2 = FieldSpec.gf(2)
Q = FieldSpec.rational()

CHEAP = [
    "sandwich transformations fix <m,n,p>",
    "scalar triples are the kernel",
    "conjugation by permutations",
    "multiplicative triples vs fixed decomposable maps",
    "structure tensor equivariance",
    "sandwich recovery round trip",
    "identity tensor invariance",
    "span dimension formula",
    "rank preservation of multiplicative maps",
    "decomposable tensor equality",
    "action is a homomorphism",
]


class TestCheckResult(unittest.TestCase):
    """Test result lines."""

    def test_line(self):
        """Test PASS and FAIL lines with and without detail."""
        self.assertEqual(CheckResult("kernel", True).line(), "PASS kernel")
        self.assertEqual(CheckResult("kernel", False, "2 triples").line(), "FAIL kernel (2 triples)")


class TestRunSuite(unittest.TestCase):
    """Test running the checks."""

    def test_names_are_unique(self):
        """Test every check has its own name."""
        names = [name for name, _ in CHECKS]
        self.assertEqual(len(names), len(set(names)))
        for name in CHEAP:
            self.assertIn(name, names)

    def test_cheap_checks_pass(self):
        """Test the sampled checks pass over GF(2) and the rationals."""
        results = run_suite([Shape(2, 2, 2), Shape(1, 2, 3)], [GF2, Q], 2, 11, names=CHEAP)
        self.assertEqual([r.name for r in results], CHEAP)
        for result in results:
            self.assertTrue(result.passed, result.line())

    def test_group_order_check(self):
        """Test the enumerated orders of <2,2,2>."""
        results = run_suite([Shape(2, 2, 2)], [GF2], 1, 0, workers=2, names=["group order by enumeration"])
        self.assertEqual(len(results), 1)
        self.assertTrue(results[0].passed, results[0].line())
        self.assertIn("1296", results[0].detail)

    def test_composition_structure_tensor(self):
        """Test the exhaustive structure tensor check."""
        results = run_suite([], [Q], 0, 0, names=["composition map structure tensor"])
        self.assertTrue(results[0].passed, results[0].line())
        self.assertEqual(results[0].detail, "128 shapes")

    def test_zero_samples_warns(self):
        """Test samples=0 is logged as a warning."""
        with self.assertLogs('mmt_isotropy.verify_suite', level='WARNING') as logs:
            results = run_suite([Shape(2, 2, 2)], [GF2], 0, 0, names=["sandwich transformations fix <m,n,p>"])
        self.assertTrue(results[0].passed)
        self.assertEqual(results[0].detail, "0 elements")
        self.assertIn("samples=0", logs.output[0])

    def test_exception_is_failure(self):
        """Test a check that raises is reported as failed."""
        def boom(ctx):
            raise RuntimeError("no luck")

        with mock.patch.object(verify_suite, 'CHECKS', [("boom", boom)]):
            results = run_suite([Shape(2, 2, 2)], [GF2], 1, 0)
        self.assertEqual(results, [CheckResult("boom", False, "RuntimeError: no luck")])

    def test_same_seed_same_results(self):
        """Test runs are reproducible."""
        first = run_suite([Shape(2, 3, 2)], [Q], 2, 99, names=CHEAP[:1])
        second = run_suite([Shape(2, 3, 2)], [Q], 2, 99, names=CHEAP[:1])
        self.assertEqual(first, second)


if __name__ == '__main__':
    unittest.main()
