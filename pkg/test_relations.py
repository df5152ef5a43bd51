#!/usr/bin/env python3
"""
Тесты языка соотношений .ab: разбор, ошибки с позицией, каноническая запись
"""

import unittest
from pathlib import Path

from hypothesis import given, settings, strategies as st

from abmodule import adjoint, direct_sum, elementary
from errors import NonRationalCoefficient, ParseError, UndeclaredSymbol
from relations import parse_module, parse_script, serialize_module_script
from series import BSeries

SAMPLES = Path(__file__).with_name("samples")

exponents = st.sampled_from(["0", "1", "-1", "1/3", "-2/5", "1/2+i", "3*i"])


class TestParsing(unittest.TestCase):

    def test_rank4_sample(self):
        E = parse_module((SAMPLES / "rank4.ab").read_text(encoding='utf-8'))
        self.assertEqual(E.rank, 4)
        self.assertEqual(E.precision, 12)
        self.assertEqual(E.name, "rank4")
        self.assertEqual(E.labels, ("e1", "e2", "e3", "e4"))
        self.assertEqual(E.a_matrix.entry(1, 1), BSeries((0, "1/3"), 12))
        self.assertEqual(E.a_matrix.entry(0, 3), BSeries.zero(12))
        self.assertEqual(E.a_matrix.entry(2, 3), BSeries((-1,), 12))

    def test_precision_override(self):
        E = parse_module((SAMPLES / "rank4.ab").read_text(encoding='utf-8'), 5)
        self.assertEqual(E.precision, 5)

    def test_trivial_module(self):
        E = parse_module("a e = 0", 4)
        self.assertTrue(E.same_presentation(elementary(0, 4)))
        self.assertEqual(E.labels, ("e",))

    def test_script_parts(self):
        script = parse_script("# comment\nprecision 6\nmodule M\nbasis y x\nc = 1/2 + i\na x = c*b*x\na y = x\n")
        self.assertEqual(script.precision, 6)
        self.assertEqual(script.name, "M")
        self.assertEqual(script.basis, ["y", "x"])
        self.assertEqual([st.name for st in script.definitions], ["c"])
        self.assertEqual([st.name for st in script.relations], ["x", "y"])

    def test_explicit_basis_order(self):
        E = parse_module("basis y x\na x = 2*b*x\na y = x + b^2*y\n", 4)
        self.assertEqual(E.labels, ("y", "x"))
        self.assertEqual(E.a_matrix.entry(1, 1), BSeries((0, 2), 4))
        self.assertEqual(E.a_matrix.entry(1, 0), BSeries((1,), 4))
        self.assertEqual(E.a_matrix.entry(0, 0), BSeries((0, 0, 1), 4))

    def test_polynomial_coefficients(self):
        E = parse_module("alpha = 3\na x = 0\na y = (1 + alpha*b)*x - b**2*x\n", 4)
        self.assertEqual(E.a_matrix.entry(0, 1), BSeries((1, 3, -1), 4))

    def test_truncation(self):
        E = parse_module("a e = b*e + b^5*e", 3)
        self.assertEqual(E.a_matrix.entry(0, 0), BSeries((0, 1), 3))


class TestErrors(unittest.TestCase):

    def test_pi(self):
        with self.assertRaises(NonRationalCoefficient) as ctx:
            parse_module("a e = pi*b*e", 4)
        self.assertEqual((ctx.exception.line, ctx.exception.column), (1, 7))

    def test_function_call(self):
        with self.assertRaises(NonRationalCoefficient):
            parse_module("c = sqrt(2)\na e = c*b*e", 4)

    def test_irrational_power(self):
        with self.assertRaises(NonRationalCoefficient):
            parse_module("c = 2^(1/2)\na e = c*b*e", 4)

    def test_undeclared_symbol(self):
        with self.assertRaises(UndeclaredSymbol) as ctx:
            parse_module("a e = mu*b*e", 4)
        self.assertEqual(ctx.exception.line, 1)
        with self.assertRaises(UndeclaredSymbol):
            parse_module("basis e\na e = 0\na f = 0", 4)

    def test_syntax_error_position(self):
        with self.assertRaises(ParseError) as ctx:
            parse_module("precision 8\na x = * x\n")
        self.assertEqual((ctx.exception.line, ctx.exception.column), (2, 7))

    def test_structural_errors(self):
        for text in ("a e = 0\na e = b*e",       # повторное соотношение
                     "basis e f\na e = 0",        # нет соотношения для f
                     "a e = e*e",                 # нелинейно
                     "b = 2\na e = 0",            # зарезервированное имя
                     "precision 1.5\na e = 0"):
            with self.assertRaises(ParseError, msg=text):
                parse_module(text, 4)


class TestSerialization(unittest.TestCase):
    """parse_module(serialize_module_script(E)) совпадает с E"""

    def test_adjoint_labels_are_sanitized(self):
        E = adjoint(parse_module((SAMPLES / "rank4.ab").read_text(encoding='utf-8'), 6))
        text = serialize_module_script(E)
        self.assertIn("basis ", text)
        back = parse_module(text)
        self.assertEqual(back.precision, 6)
        self.assertTrue(back.same_presentation(E))

    def test_remark_sample(self):
        E = parse_module((SAMPLES / "remark.ab").read_text(encoding='utf-8'))
        back = parse_module(serialize_module_script(E))
        self.assertEqual(back.labels, E.labels)
        self.assertTrue(back.same_presentation(E))

    @given(exponents, exponents)
    @settings(max_examples=20, deadline=None)
    def test_sums_of_elementary(self, first, second):
        E = direct_sum(elementary(first, 5), elementary(second, 5))
        self.assertTrue(parse_module(serialize_module_script(E)).same_presentation(E))


if __name__ == "__main__":
    unittest.main()
