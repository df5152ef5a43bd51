#!/usr/bin/env python3
"""
Высшие спаривания вычетов: семейство K_k, извлекаемое из изоморфизма
Delta: E -> delta_dual(E, delta), проверки аксиом (i), (ii), части (iii) и (iv),
симметризация Delta и связь с эрмитовыми формами на E (x) E_{-delta/2}.

Реализация спаривания: для матрицы D морфизма Delta
    S(b) = D(-b),
    K_k(b^p e_i, b^q e_j) = (-1)^q S_ij[k - p - q] / normalization   (0 при k < p + q).
Первый слот b-линеен, второй - через сопряженную структуру (знак (-1)^q).
Аксиома (ii) на базисе равносильна A^T S - S A(-b) = delta b S + b^2 S'.
"""

import logging
import math
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Tuple

from abmodule import ABModule, a_apply, adjoint, delta_dual, elementary, tensor
from errors import DegenerateSymmetrization, NotIsomorphism, WrongCodomain
from forms import SesquilinearForm, hermitian_type, HERMITIAN
from homsolver import ABMorphism, adjoint_of_morphism, identity_morphism, tensor_morphism
from series import (
    BMatrix, BSeries, ONE, ZERO, Scalar, determinant, entries, format_scalar, integer_value, scalar,
)

logger = logging.getLogger(__name__)

# (k, p, i, q, j) -> значение K_k(b^p e_i, b^q e_j)
Key = Tuple[int, int, int, int, int]


def default_normalization(delta: Any) -> Scalar:
    """delta! для натурального delta, иначе 1"""
    d = integer_value(scalar(delta))
    if d is not None and d > 0:
        return scalar(math.factorial(d))
    return ONE


@dataclass
class PairingFamily:
    delta: Scalar
    normalization: Scalar
    S: BMatrix
    overrides: Dict[Key, Scalar] = field(default_factory=dict)
    module: Optional[ABModule] = None

    @property
    def rank(self) -> int:
        return self.S.rows

    @property
    def levels(self) -> int:
        """K_k известны для k < levels"""
        return self.S.precision

    def value(self, k: int, p: int, i: int, q: int, j: int) -> Scalar:
        key = (k, p, i, q, j)
        if key in self.overrides:
            return self.overrides[key]
        m = k - p - q
        if m < 0 or k >= self.levels:
            return ZERO
        entry = entries(self.S.coefficients[m])[i][j] / self.normalization
        return -entry if q % 2 else entry

    def delta_k(self, k: int) -> List[List[Scalar]]:
        """Матрица Delta_k(e_i, e_j)"""
        return [[self.value(k, 0, i, 0, j) for j in range(self.rank)] for i in range(self.rank)]


@dataclass
class AxiomReport:
    axiom: str
    passed: bool
    checked: int = 0
    first_failure: Optional[str] = None
    note: str = ""


def infer_delta(delta_morphism: ABMorphism) -> Scalar:
    """delta из разности матриц delta_dual(E) и adjoint(E) при b^1"""
    E = delta_morphism.domain
    codomain = delta_morphism.codomain
    if codomain.precision < 2 or E.rank == 0:
        return ZERO
    difference = entries(codomain.a_matrix.coefficients[1] - adjoint(E).a_matrix.coefficients[1])
    return difference[0][0]


def _check_codomain(delta_morphism: ABMorphism, delta: Scalar) -> None:
    expected = delta_dual(delta_morphism.domain, delta)
    if not delta_morphism.codomain.same_presentation(expected):
        raise WrongCodomain(f"кодомен не равен delta_dual(E, {format_scalar(delta)})")


def extract_pairings(delta_morphism: ABMorphism, delta: Optional[Any] = None,
                     normalization: Optional[Any] = None) -> PairingFamily:
    d = infer_delta(delta_morphism) if delta is None else scalar(delta)
    _check_codomain(delta_morphism, d)
    norm = default_normalization(d) if normalization is None else scalar(normalization)
    if norm == ZERO:
        raise ValueError("нормировка должна быть ненулевой")
    return PairingFamily(d, norm, delta_morphism.matrix.conjugate(), {}, delta_morphism.domain)


def shift_family(family: PairingFamily) -> PairingFamily:
    """Семейство для S -> -b S: Delta'_{k+1} = -Delta_k"""
    return PairingFamily(family.delta, family.normalization, -family.S.shift(1), dict(family.overrides),
                         family.module)


def corrupt(family: PairingFamily, key: Key, value: Any) -> PairingFamily:
    """Копия семейства с подмененным значением K_k(b^p e_i, b^q e_j)"""
    overrides = dict(family.overrides)
    overrides[key] = scalar(value)
    return PairingFamily(family.delta, family.normalization, family.S, overrides, family.module)


def _describe(key: Key) -> str:
    k, p, i, q, j = key
    return f"k={k}, x=b^{p}e{i + 1}, y=b^{q}e{j + 1}"


def _pairs(family: PairingFamily, k: int):
    n = family.rank
    for p in range(k + 2):
        for q in range(k + 2 - p):
            for i in range(n):
                for j in range(n):
                    yield p, i, q, j


def check_axiom_i(family: PairingFamily) -> AxiomReport:
    """K_k(x, y) = K_{k+1}(bx, y) = -K_{k+1}(x, by): b в любом слоте поднимает уровень на 1"""
    report = AxiomReport("i", True)
    for k in range(max(family.levels - 1, 0)):
        for p, i, q, j in _pairs(family, k):
            base = family.value(k, p, i, q, j)
            report.checked += 1
            if base != family.value(k + 1, p + 1, i, q, j) or base != -family.value(k + 1, p, i, q + 1, j):
                report.passed = False
                report.first_failure = _describe((k, p, i, q, j))
                return report
    return report


def _expand_a(module: ABModule, p: int, i: int, horizon: int) -> List[Tuple[int, int, Scalar]]:
    """a(b^p e_i) = b^p A e_i + p b^{p+1} e_i как список (степень, индекс, коэффициент)"""
    terms = []
    for m in range(min(module.precision, horizon - p + 1)):
        column = entries(module.a_matrix.coefficients[m])
        for l in range(module.rank):
            if column[l][i] != ZERO:
                terms.append((p + m, l, column[l][i]))
    if p:
        terms.append((p + 1, i, scalar(p)))
    return terms


def check_axiom_ii(family: PairingFamily, E: Optional[ABModule] = None) -> AxiomReport:
    """K_k(ax, y) - K_k(x, ay) = (n + k) K_{k-1}(x, y), n = delta - 1"""
    E = E or family.module
    report = AxiomReport("ii", True)
    if E is None:
        report.passed = False
        report.note = "модуль не задан"
        return report
    n = family.delta - ONE
    for k in range(1, family.levels):
        for p, i, q, j in _pairs(family, k):
            if p + q > k:
                continue
            lhs = ZERO
            for degree, l, c in _expand_a(E, p, i, k):
                lhs += c * family.value(k, degree, l, q, j)
            for degree, l, c in _expand_a(E, q, j, k):
                lhs -= c * family.value(k, p, i, degree, l)
            rhs = (n + scalar(k)) * family.value(k - 1, p, i, q, j)
            report.checked += 1
            if lhs != rhs:
                report.passed = False
                report.first_failure = _describe((k, p, i, q, j))
                return report
    return report


def check_axiom_iii_partial(family: PairingFamily) -> AxiomReport:
    """K_k(x, b^{k+1} y) = K_k(b^{k+1} x, y) = 0; сравнение с вычетом Гротендика не проверяется"""
    report = AxiomReport("iii-partial", True, note="residue comparison not checked")
    for k in range(family.levels):
        for i in range(family.rank):
            for j in range(family.rank):
                for p, q in ((k + 1, 0), (0, k + 1)):
                    report.checked += 1
                    if family.value(k, p, i, q, j) != ZERO:
                        report.passed = False
                        report.first_failure = _describe((k, p, i, q, j))
                        return report
    return report


def check_axiom_iv(family: PairingFamily) -> AxiomReport:
    """K_k(x, y) = (-1)^k K_k(y, x)"""
    report = AxiomReport("iv", True)
    for k in range(family.levels):
        sign = -ONE if k % 2 else ONE
        for p, i, q, j in _pairs(family, k):
            report.checked += 1
            if family.value(k, p, i, q, j) != sign * family.value(k, q, j, p, i):
                report.passed = False
                report.first_failure = _describe((k, p, i, q, j))
                return report
    return report


def check_all(family: PairingFamily, E: Optional[ABModule] = None) -> List[AxiomReport]:
    return [check_axiom_i(family), check_axiom_ii(family, E),
            check_axiom_iii_partial(family), check_axiom_iv(family)]


def ladder_identity(delta: Any, k: int, precision: int) -> bool:
    """a b^k e_delta = (delta + k) b^{k+1} e_delta"""
    d = scalar(delta)
    module = elementary(d, precision)
    x = module.element([BSeries.monomial(1, k, precision)])
    expected = module.element([BSeries.monomial(d + scalar(k), k + 1, precision)])
    return a_apply(module, x).equals(expected)


def half_twist(delta_morphism: ABMorphism, delta: Optional[Any] = None) -> SesquilinearForm:
    """Delta (x) Id как полуторалинейная форма на E (x) E_{-delta/2}: P = D^T"""
    d = infer_delta(delta_morphism) if delta is None else scalar(delta)
    _check_codomain(delta_morphism, d)
    E = delta_morphism.domain
    twisted = tensor(E, elementary(-d / scalar(2), E.precision))
    return SesquilinearForm(twisted, delta_morphism.matrix.transpose())


def twist_adjoint(delta_morphism: ABMorphism, delta: Scalar) -> ABMorphism:
    """
    adjoint(Delta) (x) Id_{E_delta}: E (x) E_{-delta} (x) E_delta -> delta_dual(E);
    представление источника совпадает с E, матрица D(-b)^T.
    """
    E = delta_morphism.domain
    twisted = tensor_morphism(adjoint_of_morphism(delta_morphism), identity_morphism(elementary(delta, E.precision)))
    if not twisted.domain.same_presentation(E) or not twisted.codomain.same_presentation(delta_morphism.codomain):
        raise WrongCodomain("сопряженный морфизм не отождествляется с E -> delta_dual(E)")
    return ABMorphism(E, delta_morphism.codomain, twisted.matrix)


@dataclass
class SymmetrizationReport:
    axioms: List[AxiomReport]
    fixed_point: bool        # Phi = Delta
    constant_term_kept: bool  # Phi_0 = Delta_0 (при симметричном Delta_0)
    half_twist_kind: str

    @property
    def passed(self) -> bool:
        return all(r.passed for r in self.axioms)


def symmetrize_delta(delta_morphism: ABMorphism, delta: Optional[Any] = None,
                     normalization: Optional[Any] = None) -> Tuple[ABMorphism, SymmetrizationReport]:
    """Phi = (Delta + adjoint(Delta) (x) Id_{E_delta}) / 2"""
    d = infer_delta(delta_morphism) if delta is None else scalar(delta)
    _check_codomain(delta_morphism, d)
    D = delta_morphism.matrix
    if D.precision == 0 or determinant(D.constant_term()) == ZERO:
        raise NotIsomorphism("Delta не является изоморфизмом")

    phi = (delta_morphism + twist_adjoint(delta_morphism, d)).scale("1/2")
    if determinant(phi.matrix.constant_term()) == ZERO:
        raise DegenerateSymmetrization("det Phi(0) = 0")

    family = extract_pairings(phi, d, normalization)
    original = extract_pairings(delta_morphism, d, normalization)
    report = SymmetrizationReport(
        check_all(family),
        phi.matrix.equals(D),
        family.delta_k(0) == original.delta_k(0),
        hermitian_type(half_twist(phi, d)),
    )
    if report.half_twist_kind != HERMITIAN:
        logger.warning("⚠️ симметризованный изоморфизм не дает эрмитова полуповорота")
    logger.info(f"symmetrize_delta: аксиомы {[(r.axiom, r.passed) for r in report.axioms]}")
    return phi, report
