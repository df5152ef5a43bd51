#!/usr/bin/env python3
"""
Эталонные примеры и наборы свойств: сопряженный модуль ранга 4, эрмитовы и
антиэрмитовы формы, разложение Крулля-Шмидта, функторные изоморфизмы,
семейства высших спариваний, композиционный ряд
"""

import random
import unittest
from collections import Counter
from pathlib import Path

from abmodule import (
    ABModule, adjoint, conjugate, delta_dual, direct_sum, direct_sum_many, dual, elementary,
    elementary_sum, hom_module, permutation_matrix, tensor,
)
from forms import (
    ANTIHERMITIAN, BOTH, HERMITIAN, classify_self_adjoint, hermitian_type, hermitianize, uncurry,
)
from homsolver import (
    ABMorphism, are_isomorphic, associator, base_change_isomorphism, is_invertible, solve_hom,
    swap_morphism, unit_morphism, verify_by_evaluation,
)
from relations import parse_module
from saito import (
    check_axiom_i, check_axiom_ii, check_axiom_iii_partial, check_axiom_iv, extract_pairings,
    ladder_identity, symmetrize_delta,
)
from series import BMatrix, BSeries, constant_matrix, scalar
from structure import (
    classify_endomorphism, composition_series, endomorphism_trichotomy, find_idempotent,
    fitting_split, krull_schmidt,
)

SAMPLES = Path(__file__).with_name("samples")


def load_sample(name: str, precision: int = None) -> ABModule:
    return parse_module((SAMPLES / name).read_text(encoding='utf-8'), precision)


class MorphismTestCase(unittest.TestCase):

    def assertWitness(self, f: ABMorphism, invertible: bool = True):
        """Свидетель проверяется прямым вычислением a на базисе"""
        self.assertIsNotNone(f)
        self.assertTrue(verify_by_evaluation(f), f"{f.domain.name} -> {f.codomain.name}")
        if invertible:
            self.assertTrue(is_invertible(f), f"{f.domain.name} -> {f.codomain.name}")


class TestRank4Adjoint(MorphismTestCase):
    """Модуль ранга 4 при lambda = 1, mu = 1/3"""

    def setUp(self):
        self.E = load_sample("rank4.ab")

    def test_adjoint_matrix(self):
        N = self.E.precision
        expected = BMatrix.from_entries([
            [BSeries((0, -1), N), BSeries.zero(N), BSeries.zero(N), BSeries.zero(N)],
            [BSeries((1,), N), BSeries((0, "-1/3"), N), BSeries.zero(N), BSeries.zero(N)],
            [BSeries((1,), N), BSeries.zero(N), BSeries((0, "1/3"), N), BSeries.zero(N)],
            [BSeries.zero(N), BSeries((1,), N), BSeries((-1,), N), BSeries((0, 1), N)],
        ], 4, 4, N)
        self.assertTrue(adjoint(self.E).a_matrix.equals(expected))
        self.assertEqual(adjoint(self.E).relations()[-1], "a ~e4* = b*~e4*")

    def test_only_antihermitian(self):
        basis = solve_hom(self.E, adjoint(self.E))
        self.assertEqual(basis.dim, 1)
        self.assertTrue(basis.stable)
        generator = basis.morphisms[0]
        self.assertWitness(generator)
        self.assertEqual(hermitian_type(uncurry(generator)), ANTIHERMITIAN)

        verdict = hermitianize(self.E)
        self.assertEqual(verdict.kind, ANTIHERMITIAN)
        self.assertIsNone(verdict.hermitian)
        self.assertIsNotNone(verdict.antihermitian)

    def test_indecomposable(self):
        report = krull_schmidt(self.E, seed=4)
        self.assertEqual(len(report.factors), 1)
        factor, multiplicity = report.factors[0]
        self.assertEqual((factor.rank, multiplicity), (4, 1))
        self.assertEqual(report.precision, self.E.precision)
        self.assertWitness(report.witness)

    def test_single_antihermitian_factor(self):
        result = classify_self_adjoint(self.E, seed=4)
        self.assertTrue(result.self_adjoint)
        self.assertEqual(result.paired_factors, [])
        self.assertEqual(len(result.self_adjoint_factors), 1)
        factor, multiplicity, verdict = result.self_adjoint_factors[0]
        self.assertEqual((factor.rank, multiplicity), (4, 1))
        self.assertEqual(verdict.kind, ANTIHERMITIAN)
        self.assertEqual(hermitian_type(result.form), ANTIHERMITIAN)


class TestHermitianGolden(unittest.TestCase):

    def test_trivial_module(self):
        verdict = hermitianize(load_sample("e0.ab"))
        self.assertEqual(verdict.kind, HERMITIAN)
        self.assertIsNone(verdict.antihermitian)

    def test_two_trivial_modules(self):
        self.assertEqual(hermitianize(elementary_sum([0, 0], 8)).kind, BOTH)


class TestRemarkConjugate(unittest.TestCase):

    def test_not_isomorphic(self):
        E = load_sample("remark.ab")
        for other in (load_sample("remark-conj.ab"), conjugate(E)):
            first = are_isomorphic(E, other, trials=32, seed=7)
            second = are_isomorphic(E, other, trials=32, seed=7)
            self.assertEqual(first.verdict, "no")
            self.assertEqual(second.verdict, first.verdict)


class TestKrullSchmidtSuite(MorphismTestCase):
    """Кратности слагаемых не зависят от перестановки и замены базиса"""

    PRECISION = 6
    RUNS = 50

    def setUp(self):
        N = self.PRECISION
        self.blocks = {
            "E0": elementary(0, N),
            "E1": elementary(1, N),
            "E-1": elementary(-1, N),
            "remark": load_sample("remark.ab", N),
        }

    def scramble(self, E: ABModule, rng: random.Random) -> ABMorphism:
        n, N = E.rank, E.precision
        table = [[BSeries((1 if i == j else (rng.randint(-2, 2) if i > j else 0), rng.randint(-2, 2)), N)
                  for j in range(n)] for i in range(n)]
        order = list(range(n))
        rng.shuffle(order)
        T = permutation_matrix(order, N) @ BMatrix.from_entries(table, n, n, N)
        _, iso = base_change_isomorphism(E, T)
        return iso

    def identify(self, M: ABModule) -> str:
        for name, block in self.blocks.items():
            if block.rank == M.rank and are_isomorphic(M, block.truncate(M.precision), seed=1).isomorphic:
                return name
        self.fail(f"слагаемое {M.name} ранга {M.rank} не опознано")

    def test_random_sums(self):
        names = sorted(self.blocks)
        for seed in range(self.RUNS):
            rng = random.Random(seed)
            chosen = [rng.choice(names) for _ in range(2)]
            E = direct_sum_many([self.blocks[name] for name in chosen])
            iso = self.scramble(E, rng)
            self.assertWitness(iso)

            report = krull_schmidt(iso.domain, seed=seed)
            found = Counter()
            for M, multiplicity in report.factors:
                found[self.identify(M)] += multiplicity
            self.assertEqual(found, Counter(chosen), f"seed={seed}")
            self.assertEqual(sum(M.rank * m for M, m in report.factors), E.rank)
            self.assertWitness(report.witness)

    def test_three_summands_keep_precision(self):
        """Два расщепления подряд не снижают точность результата"""
        names = ["E0", "E1", "E-1"]
        picks = random.Random(3)
        samples = [names] + [[picks.choice(names) for _ in range(3)] for _ in range(10)]
        for seed, chosen in enumerate(samples):
            rng = random.Random(100 + seed)
            E = direct_sum_many([self.blocks[name] for name in chosen])
            iso = self.scramble(E, rng)
            self.assertWitness(iso)

            report = krull_schmidt(iso.domain, seed=seed)
            self.assertEqual(report.precision, self.PRECISION, f"seed={seed}")
            self.assertTrue(report.certified, f"seed={seed}")
            self.assertEqual(report.notes, [])
            found = Counter()
            for M, multiplicity in report.factors:
                found[self.identify(M)] += multiplicity
            self.assertEqual(found, Counter(chosen), f"seed={seed}")
            self.assertEqual(len(report.leaves), 3)
            self.assertWitness(report.witness)

    def test_without_headroom_precision_drops(self):
        E = direct_sum_many([self.blocks[name] for name in ("E0", "E1", "E-1")])
        report = krull_schmidt(E, seed=1, headroom=0)
        self.assertLess(report.precision, self.PRECISION)
        self.assertTrue(report.notes)


class TestTrichotomySuite(unittest.TestCase):

    def test_indecomposable_modules(self):
        for E in (load_sample("remark.ab"), load_sample("jordan.ab"), elementary("1/2", 8)):
            self.assertIsNone(find_idempotent(E, seed=3), E.name)
            basis = solve_hom(E, E)
            for phi in basis.morphisms:
                self.assertTrue(verify_by_evaluation(phi))
            report = endomorphism_trichotomy(E, basis, samples=100, seed=11)
            self.assertEqual(report.checked, basis.dim + 100)
            self.assertTrue(report.passed, E.name)

    def test_fitting_on_random_endomorphisms(self):
        rng = random.Random(2024)
        for E in (elementary_sum([0, 1], 6), elementary_sum([0, 0], 6)):
            basis = solve_hom(E, E)
            for _ in range(50):
                phi = basis.random_element(rng)
                self.assertTrue(verify_by_evaluation(phi))
                split = fitting_split(E, phi)
                r, s = split.image_module.rank, split.kernel_module.rank
                self.assertEqual(r + s, E.rank)
                self.assertEqual(split.image.rank + split.kernel.rank, E.rank)
                kind = classify_endomorphism(phi)
                if kind == "invertible":
                    self.assertEqual(s, 0)
                elif kind == "nilpotent":
                    self.assertEqual(r, 0)
                if r and s:
                    S = direct_sum(split.image_module, split.kernel_module)
                    witness = ABMorphism(S, E.truncate(S.precision), split.transform.truncate(S.precision))
                    self.assertTrue(verify_by_evaluation(witness))
                    self.assertTrue(is_invertible(witness))


class TestFunctorIdentities(MorphismTestCase):
    """Изоморфизмы тензорной категории со свидетелями"""

    PRECISION = 6

    def setUp(self):
        N = self.PRECISION
        self.modules = [
            elementary(0, N),
            elementary("1/2", N),
            elementary("1/3+i", N),
            load_sample("remark.ab", N),
            load_sample("jordan.ab", N),
        ]
        self.pairs = [(E, F) for k, E in enumerate(self.modules) for F in self.modules[k + 1:]]

    def assertIsomorphic(self, E: ABModule, F: ABModule):
        verdict = are_isomorphic(E, F, seed=5)
        self.assertEqual(verdict.verdict, "yes", f"{E.name} ~ {F.name}")
        self.assertWitness(verdict.witness)
        self.assertWitness(verdict.inverse)

    def test_commutativity(self):
        for E, F in self.pairs:
            self.assertWitness(swap_morphism(E, F))

    def test_associativity(self):
        E0, E12, E13, remark, jordan = self.modules
        for triple in ((E12, remark, jordan), (remark, E13, E0), (jordan, E12, E13)):
            self.assertWitness(associator(*triple))

    def test_dual_of_tensor(self):
        for E, F in self.pairs:
            self.assertIsomorphic(dual(tensor(E, F)), tensor(dual(E), dual(F)))

    def test_conjugate_of_tensor(self):
        for E, F in self.pairs:
            self.assertIsomorphic(conjugate(tensor(E, F)), tensor(conjugate(E), conjugate(F)))

    def test_unit(self):
        for E in self.modules:
            self.assertWitness(unit_morphism(E))

    def test_hom_is_tensor_with_dual(self):
        for E, F in self.pairs:
            H = hom_module(E, F)
            same = tensor(F, dual(E))
            self.assertWitness(ABMorphism(H, same, BMatrix.identity(H.rank, H.precision)))
            self.assertIsomorphic(H, tensor(dual(E), F))


class TestLadderGolden(unittest.TestCase):

    def test_ladder(self):
        for n in (0, 1, 2, 5):
            for k in range(10):
                self.assertTrue(ladder_identity(n + 1, k, 12), f"n={n}, k={k}")


class TestSaitoSuite(MorphismTestCase):
    """Семейства из изоморфизмов E -> delta_dual(E, 3), найденных решателем"""

    DELTA = 3
    PRECISION = 6

    def solver_isomorphism(self, E: ABModule) -> ABMorphism:
        verdict = are_isomorphic(E, delta_dual(E, self.DELTA), seed=9)
        self.assertEqual(verdict.verdict, "yes", E.name)
        self.assertWitness(verdict.witness)
        return verdict.witness

    def assertPartialAxioms(self, family):
        for check in (check_axiom_i, check_axiom_ii, check_axiom_iii_partial):
            report = check(family)
            self.assertTrue(report.passed, f"{report.axiom}: {report.first_failure}")

    def assertSymmetrizes(self, E: ABModule, Delta: ABMorphism):
        phi, report = symmetrize_delta(Delta, self.DELTA)
        self.assertWitness(phi)
        self.assertTrue(report.passed)
        self.assertTrue(check_axiom_iv(extract_pairings(phi, self.DELTA)).passed)
        self.assertEqual(report.half_twist_kind, HERMITIAN)
        twisted = tensor(E, elementary(scalar(-self.DELTA) / scalar(2), E.precision))
        self.assertIsNotNone(hermitianize(twisted).hermitian)

    def test_elementary(self):
        E = elementary("3/2", self.PRECISION)
        Delta = self.solver_isomorphism(E)
        self.assertPartialAxioms(extract_pairings(Delta, self.DELTA))
        self.assertSymmetrizes(E, Delta)

    def test_two_copies(self):
        E = elementary_sum(["3/2", "3/2"], self.PRECISION)
        self.assertPartialAxioms(extract_pairings(self.solver_isomorphism(E), self.DELTA))
        identity = ABMorphism(E, delta_dual(E, self.DELTA), BMatrix.identity(2, self.PRECISION))
        self.assertSymmetrizes(E, identity)

    def test_swapped_pair(self):
        E = elementary_sum([1, 2], self.PRECISION)
        Delta = self.solver_isomorphism(E)
        self.assertPartialAxioms(extract_pairings(Delta, self.DELTA))
        self.assertSymmetrizes(E, Delta)

    def test_antisymmetric_constant_term_fails(self):
        E = elementary_sum(["3/2", "3/2"], self.PRECISION)
        Delta = ABMorphism(E, delta_dual(E, self.DELTA),
                           BMatrix.constant(constant_matrix([[0, 1], [-1, 0]]), self.PRECISION))
        self.assertWitness(Delta)
        family = extract_pairings(Delta, self.DELTA)
        self.assertPartialAxioms(family)
        report = check_axiom_iv(family)
        self.assertFalse(report.passed)
        self.assertTrue(report.first_failure.startswith("k=0"))


class TestCompositionSeries(unittest.TestCase):

    def test_jordan(self):
        series = composition_series(load_sample("jordan.ab"))
        self.assertCountEqual(series.exponents, [scalar(0), scalar(1)])
        self.assertEqual(len(series.quotients), 2)
        self.assertEqual(series.quotients[-1].rank, 0)

    def test_elementary(self):
        for value in (0, "1/3", "1/2+i", 2):
            series = composition_series(elementary(value, 8))
            self.assertEqual(series.exponents, [scalar(value)])


if __name__ == "__main__":
    unittest.main()
