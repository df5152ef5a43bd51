#!/usr/bin/env python3
"""
Тесты JSON-документов: модули, морфизмы, формы, семейства, отчеты
"""

import json
import tempfile
import unittest
from pathlib import Path

from abmodule import delta_dual, elementary, elementary_sum
from documents import (
    FamilyDocument, ModuleDocument, ReportDocument, SeriesModel, convert, dump_document,
    family_to_document, form_to_document, load_document, matrix_from_rows, module_to_document,
    morphism_to_document, read_document, report_document, series_from_model, series_to_model,
)
from errors import FormatError
from forms import hermitianize
from homsolver import ABMorphism, solve_hom
from relations import parse_module
from saito import corrupt, extract_pairings
from series import BMatrix, BSeries, constant_matrix, scalar

SAMPLES = Path(__file__).with_name("samples")


def round_trip(doc):
    return convert(load_document(dump_document(doc)))


class TestSeriesModels(unittest.TestCase):

    def test_trailing_zeros_are_dropped(self):
        model = series_to_model(BSeries(("1/2+i", 0, 0), 3))
        self.assertEqual(model.coeffs, ["1/2+i"])
        self.assertEqual(model.precision, 3)
        self.assertEqual(series_from_model(model), BSeries(("1/2+i",), 3))

    def test_too_many_coefficients(self):
        with self.assertRaises(ValueError):
            SeriesModel(coeffs=["1", "2", "3"], precision=2)

    def test_shape_check(self):
        rows = [[SeriesModel(coeffs=["1"], precision=2)]]
        with self.assertRaises(FormatError):
            matrix_from_rows(rows, 2, 1, 2)


class TestRoundTrip(unittest.TestCase):

    def test_module(self):
        E = parse_module((SAMPLES / "rank4.ab").read_text(encoding='utf-8'), 6)
        back = round_trip(module_to_document(E))
        self.assertEqual(back.labels, E.labels)
        self.assertEqual(back.name, E.name)
        self.assertTrue(back.same_presentation(E))

    def test_complex_module(self):
        E = elementary_sum(["1/2+i", "-3*i"], 4)
        self.assertTrue(round_trip(module_to_document(E)).same_presentation(E))

    def test_morphism(self):
        f = solve_hom(elementary(1, 6), elementary(0, 6)).morphisms[0]
        back = round_trip(morphism_to_document(f))
        self.assertIsInstance(back, ABMorphism)
        self.assertTrue(back.matrix.equals(f.matrix))
        self.assertTrue(back.check_intertwining())

    def test_form(self):
        verdict = hermitianize(elementary_sum([0, 0], 6))
        doc = form_to_document(verdict.hermitian, verdict.kind)
        self.assertEqual(doc.kind, "both")
        back = round_trip(doc)
        self.assertTrue(back.pairing.equals(verdict.hermitian.pairing))

    def test_family(self):
        E = elementary("3/2", 6)
        Delta = ABMorphism(E, delta_dual(E, 3), BMatrix.constant(constant_matrix([[2]]), 6))
        family = corrupt(extract_pairings(Delta, 3), (1, 0, 0, 1, 0), "1/2")
        doc = family_to_document(family)
        self.assertEqual(doc.delta, "3")
        self.assertEqual(doc.normalization, "6")
        back = round_trip(doc)
        self.assertEqual(back.delta, scalar(3))
        self.assertEqual(back.overrides, {(1, 0, 0, 1, 0): scalar("1/2")})
        self.assertTrue(back.S.equals(family.S))
        self.assertTrue(back.module.same_presentation(E))

    def test_report(self):
        doc = report_document("homs", "ok", {"dim": 1}, precision=6, elapsed=0.12345)
        back = round_trip(doc)
        self.assertIsInstance(back, ReportDocument)
        self.assertEqual(back.result, {"dim": 1})
        self.assertEqual(back.elapsed, 0.123)

    def test_read_from_file(self):
        E = elementary("1/3", 5)
        with tempfile.TemporaryDirectory() as tmp:
            path = Path(tmp) / "e.json"
            path.write_text(dump_document(module_to_document(E)), encoding='utf-8')
            self.assertTrue(read_document(path).same_presentation(E))


class TestMalformed(unittest.TestCase):

    def module_data(self):
        return json.loads(dump_document(module_to_document(elementary("1/3", 3))))

    def test_module_without_object_field(self):
        data = self.module_data()
        del data["object"]
        self.assertIsInstance(load_document(json.dumps(data)), ModuleDocument)

    def test_invalid_json(self):
        with self.assertRaises(FormatError):
            load_document("{not json")

    def test_unknown_format(self):
        data = self.module_data()
        data["format"] = 2
        with self.assertRaises(FormatError):
            load_document(json.dumps(data))

    def test_unknown_object(self):
        with self.assertRaises(FormatError):
            load_document(json.dumps({"format": 1, "object": "sheaf"}))

    def test_shape_mismatch(self):
        data = self.module_data()
        data["rank"] = 2
        with self.assertRaises(FormatError):
            load_document(json.dumps(data))

    def test_bad_scalar(self):
        data = self.module_data()
        data["a_matrix"][0][0]["coeffs"] = ["0", "pi"]
        with self.assertRaises(FormatError):
            convert(load_document(json.dumps(data)))

    def test_zero_normalization(self):
        doc = FamilyDocument(delta="3", normalization="0",
                             S=[[SeriesModel(coeffs=["1"], precision=2)]])
        with self.assertRaises(FormatError):
            convert(doc)


if __name__ == "__main__":
    unittest.main()
