#!/usr/bin/env python3
"""
Тесты командной строки ab_tool и конфигурации: коды выхода, JSON-отчеты
"""

import io
import json
import tempfile
import unittest
from contextlib import redirect_stderr, redirect_stdout
from pathlib import Path

from ab_tool import EXIT_ERROR, EXIT_NO, EXIT_OK, run
from abmodule import delta_dual, elementary, elementary_sum
from configuration import get_config, load_config, option, use_config
from documents import dump_document, family_to_document, module_to_document
from errors import ConfigError
from homsolver import ABMorphism
from saito import corrupt, extract_pairings
from series import BMatrix, constant_matrix

SAMPLES = Path(__file__).with_name("samples")


def sample(name: str) -> str:
    return str(SAMPLES / name)


class CLITestCase(unittest.TestCase):

    def setUp(self):
        self._tmp = tempfile.TemporaryDirectory()
        self.tmp = Path(self._tmp.name)

    def tearDown(self):
        self._tmp.cleanup()

    def write(self, name: str, text: str) -> str:
        path = self.tmp / name
        path.write_text(text, encoding='utf-8')
        return str(path)

    def invoke(self, *argv: str):
        out, err = io.StringIO(), io.StringIO()
        with redirect_stdout(out), redirect_stderr(err):
            code = run(list(argv))
        return code, out.getvalue(), err.getvalue()


class TestModuleCommands(CLITestCase):

    def test_show(self):
        code, out, _ = self.invoke("show", sample("rank4.ab"))
        self.assertEqual(code, EXIT_OK)
        self.assertIn("a e4 = e2 - e3 - b*e4", out)

    def test_validate(self):
        code, out, _ = self.invoke("validate", sample("rank4.ab"), "--precision", "6")
        self.assertEqual(code, EXIT_OK)
        self.assertIn("✅", out)

    def test_adjoint_json(self):
        code, out, _ = self.invoke("adjoint", sample("rank4.ab"), "--json")
        self.assertEqual(code, EXIT_OK)
        report = json.loads(out)
        self.assertEqual(report["object"], "report")
        self.assertEqual(report["command"], "adjoint")
        self.assertEqual(report["result"]["module"]["rank"], 4)
        self.assertEqual(report["result"]["module"]["labels"], ["~e1*", "~e2*", "~e3*", "~e4*"])

    def test_sum_and_tensor(self):
        code, out, _ = self.invoke("sum", sample("e0.ab"), sample("jordan.ab"), sample("e0.ab"), "--json")
        self.assertEqual(code, EXIT_OK)
        self.assertEqual(json.loads(out)["result"]["module"]["rank"], 4)
        code, out, _ = self.invoke("tensor", sample("remark.ab"), sample("jordan.ab"), "--json")
        self.assertEqual(code, EXIT_OK)
        self.assertEqual(json.loads(out)["result"]["module"]["rank"], 4)

    def test_json_module_input(self):
        path = self.write("e.json", dump_document(module_to_document(elementary("1/3", 10))))
        code, out, _ = self.invoke("show", path, "--precision", "4", "--json")
        self.assertEqual(code, EXIT_OK)
        self.assertEqual(json.loads(out)["precision"], 4)


class TestVerdicts(CLITestCase):

    def test_remark_is_not_isomorphic_to_conjugate(self):
        code, out, _ = self.invoke("isomorphic", sample("remark.ab"), sample("remark-conj.ab"), "--trials", "32")
        self.assertEqual(code, EXIT_NO)
        self.assertIn("isomorphic: no", out)

    def test_endomorphisms(self):
        code, out, _ = self.invoke("endos", sample("e0.ab"), "--json")
        self.assertEqual(code, EXIT_OK)
        report = json.loads(out)
        self.assertEqual(report["verdict"], "1")
        self.assertEqual(report["result"]["kinds"], ["invertible"])

    def test_hermitianize(self):
        code, out, _ = self.invoke("hermitianize", sample("e0.ab"))
        self.assertEqual(code, EXIT_OK)
        self.assertIn("hermitian", out)
        path = self.write("e1.ab", "a e = b*e\n")
        code, _, _ = self.invoke("hermitianize", path, "--precision", "6")
        self.assertEqual(code, EXIT_NO)

    def test_regular(self):
        code, _, _ = self.invoke("regular", sample("jordan.ab"), "--precision", "6")
        self.assertEqual(code, EXIT_OK)
        path = self.write("irregular.ab", "a e = e\n")
        code, out, _ = self.invoke("regular", path, "--precision", "5")
        self.assertEqual(code, EXIT_NO)
        self.assertIn("not_regular", out)

    def test_composition_series(self):
        code, out, _ = self.invoke("comp-series", sample("jordan.ab"), "--precision", "6")
        self.assertEqual(code, EXIT_OK)
        self.assertIn("0, 1", out)

    def test_decompose(self):
        path = self.write("sum.json", dump_document(module_to_document(elementary_sum([0, 1], 6))))
        code, out, _ = self.invoke("decompose", path, "--seed", "2", "--json")
        self.assertEqual(code, EXIT_OK)
        report = json.loads(out)
        self.assertTrue(report["certified"])
        self.assertEqual([f["multiplicity"] for f in report["result"]["factors"]], [1, 1])


class TestSaitoCommands(CLITestCase):

    def setUp(self):
        super().setUp()
        self.module = self.write("e32.ab", "precision 6\na e = 3/2*b*e\n")

    def family(self):
        E = elementary("3/2", 6)
        Delta = ABMorphism(E, delta_dual(E, 3), BMatrix.constant(constant_matrix([[1]]), 6))
        return extract_pairings(Delta, 3)

    def test_extract(self):
        code, out, _ = self.invoke("saito-extract", self.module, "--delta", "3", "--json")
        self.assertEqual(code, EXIT_OK)
        family = json.loads(out)["result"]["family"]
        self.assertEqual(family["delta"], "3")
        self.assertEqual(family["normalization"], "6")

    def test_check_family_document(self):
        good = self.write("good.json", dump_document(family_to_document(self.family())))
        code, _, _ = self.invoke("saito-check", good)
        self.assertEqual(code, EXIT_OK)
        bad = self.write("bad.json", dump_document(family_to_document(corrupt(self.family(), (1, 0, 0, 1, 0), 5))))
        code, out, _ = self.invoke("saito-check", bad)
        self.assertEqual(code, EXIT_NO)
        self.assertIn("first failure k=0", out)

    def test_check_module(self):
        code, _, _ = self.invoke("saito-check", self.module, "--delta", "3")
        self.assertEqual(code, EXIT_OK)

    def test_module_needs_delta(self):
        code, _, err = self.invoke("saito-check", self.module)
        self.assertEqual(code, EXIT_ERROR)
        self.assertIn("--delta", err)

    def test_symmetrize(self):
        code, out, _ = self.invoke("saito-symmetrize", self.module, "--delta", "3", "--json")
        self.assertEqual(code, EXIT_OK)
        result = json.loads(out)["result"]
        self.assertTrue(result["fixed_point"])
        self.assertEqual(result["half_twist"], "hermitian")


class TestErrors(CLITestCase):

    def test_arity(self):
        code, _, _ = self.invoke("tensor", sample("e0.ab"))
        self.assertEqual(code, EXIT_ERROR)

    def test_unknown_command(self):
        code, _, _ = self.invoke("frobnicate", sample("e0.ab"))
        self.assertEqual(code, EXIT_ERROR)

    def test_missing_file(self):
        code, _, _ = self.invoke("show", str(self.tmp / "missing.ab"))
        self.assertEqual(code, EXIT_ERROR)

    def test_syntax_error(self):
        path = self.write("broken.ab", "a e = * e\n")
        code, _, err = self.invoke("show", path)
        self.assertEqual(code, EXIT_ERROR)
        self.assertIn("1:7", err)

    def test_bad_json(self):
        path = self.write("broken.json", '{"object": "module", "rank": 1}')
        code, _, _ = self.invoke("show", path)
        self.assertEqual(code, EXIT_ERROR)

    def test_help(self):
        code, _, _ = self.invoke("--help")
        self.assertEqual(code, EXIT_OK)


class TestConfiguration(CLITestCase):

    def tearDown(self):
        use_config(None)
        super().tearDown()

    def test_defaults(self):
        self.assertEqual(option('precision', 'default'), 12)
        self.assertEqual(option('solver', 'lookahead'), 2)
        self.assertEqual(option('solver', 'lookahead', 5), 5)

    def test_sections_are_merged(self):
        path = self.write("config.yaml", "precision:\n  default: 5\n")
        config = load_config(path)
        self.assertEqual(config['precision']['default'], 5)
        self.assertEqual(config['isomorphism']['trials'], 32)

    def test_override(self):
        use_config(load_config(self.write("config.yaml", "precision:\n  default: 5\n")))
        self.assertEqual(option('precision', 'default'), 5)
        use_config(None)
        self.assertEqual(get_config()['precision']['default'], 12)

    def test_cli_config(self):
        path = self.write("config.yaml", "precision:\n  default: 5\n")
        code, out, _ = self.invoke("show", self.write("e.ab", "a e = b*e\n"), "--config", path, "--json")
        self.assertEqual(code, EXIT_OK)
        self.assertEqual(json.loads(out)["precision"], 5)
        self.assertEqual(option('precision', 'default'), 12)

    def test_errors(self):
        with self.assertRaises(ConfigError):
            load_config(str(self.tmp / "missing.yaml"))
        with self.assertRaises(ConfigError):
            load_config(self.write("list.yaml", "- 1\n- 2\n"))


if __name__ == "__main__":
    unittest.main()
