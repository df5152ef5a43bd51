#!/usr/bin/env python3
"""
(a,b)-модули: свободные модули конечного ранга над C[[b]] с оператором a,
ab - ba = b^2. Модуль задается матрицей A(b): столбец j - координаты a*e_j.

Действие на элемент x = sum S_j(b) e_j:
    a(x) = A(b) S(b) + b^2 S'(b)
Матрицы функторов (выведены из определений и закреплены тестами):
    сопряженный  -A(-b)
    двойственный -A(b)^T
    сопряженно-двойственный (adjoint)  A(-b)^T
    тензорное произведение  A (x) I + I (x) B, базис e_i (x) f_j -> i*n_F + j
"""

import logging
from dataclasses import dataclass, field
from typing import Any, Callable, List, Optional, Sequence, Tuple

from errors import DimensionMismatch, NotInvertible, PrecisionMismatch
from series import (
    BMatrix, BSeries, ZERO, b_times_identity, constant_matrix, determinant, eye, format_scalar, scalar,
)

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class ABModule:
    """Представление (a,b)-модуля матрицей a-действия"""
    a_matrix: BMatrix
    labels: Tuple[str, ...] = ()
    name: str = ""

    def __post_init__(self):
        if self.a_matrix.rows != self.a_matrix.cols:
            raise DimensionMismatch(f"матрица a должна быть квадратной: {self.a_matrix.shape}")
        labels = tuple(self.labels) or tuple(f"e{j + 1}" for j in range(self.a_matrix.rows))
        if len(labels) != self.a_matrix.rows:
            raise DimensionMismatch(f"{len(labels)} меток для ранга {self.a_matrix.rows}")
        object.__setattr__(self, 'labels', labels)

    @property
    def rank(self) -> int:
        return self.a_matrix.rows

    @property
    def precision(self) -> int:
        return self.a_matrix.precision

    def basis_element(self, j: int) -> 'Element':
        coords = [BSeries.constant(1 if i == j else 0, self.precision) for i in range(self.rank)]
        return Element(self, BMatrix.from_entries([[c] for c in coords], self.rank, 1, self.precision))

    def element(self, coords: Sequence[BSeries]) -> 'Element':
        if len(coords) != self.rank:
            raise DimensionMismatch(f"{len(coords)} координат для ранга {self.rank}")
        return Element(self, BMatrix.from_entries([[c] for c in coords], self.rank, 1))

    def same_presentation(self, other: 'ABModule') -> bool:
        """Совпадение матриц a поэлементно (на общей точности)"""
        return self.rank == other.rank and self.a_matrix.equals(other.a_matrix)

    def truncate(self, precision: int) -> 'ABModule':
        return ABModule(self.a_matrix.truncate(precision), self.labels, self.name)

    def extend(self, precision: int) -> 'ABModule':
        """Та же полиномиальная запись на большей точности"""
        return ABModule(self.a_matrix.extend(precision), self.labels, self.name)

    def relations(self) -> List[str]:
        """Человекочитаемые соотношения вида 'a e2 = 1/3*b*e2 + e1'"""
        lines = []
        table = self.a_matrix.table()
        for j, label in enumerate(self.labels):
            terms = []
            for i, target in enumerate(self.labels):
                poly = format_series(table[i][j])
                if poly == "0":
                    continue
                if poly == "1":
                    terms.append(target)
                elif poly == "-1":
                    terms.append(f"-{target}")
                elif any(ch in poly[1:] for ch in "+-"):
                    terms.append(f"({poly})*{target}")
                else:
                    terms.append(f"{poly}*{target}")
            rhs = " + ".join(terms).replace("+ -", "- ") if terms else "0"
            lines.append(f"a {label} = {rhs}")
        return lines

    def __repr__(self) -> str:
        return f"ABModule(rank={self.rank}, precision={self.precision}{', ' + self.name if self.name else ''})"


@dataclass(frozen=True, eq=False)
class Element:
    """Элемент модуля: столбец координат (rank x 1)"""
    module: ABModule
    coords: BMatrix

    @property
    def precision(self) -> int:
        return self.coords.precision

    def coordinates(self) -> List[BSeries]:
        return [row[0] for row in self.coords.table()]

    def __add__(self, other: 'Element') -> 'Element':
        return Element(self.module, self.coords + other.coords)

    def __sub__(self, other: 'Element') -> 'Element':
        return Element(self.module, self.coords - other.coords)

    def times(self, s: BSeries) -> 'Element':
        """S(b) * x"""
        return Element(self.module, self.coords.scale_series(s))

    def times_b(self, k: int = 1) -> 'Element':
        return Element(self.module, self.coords.shift(k))

    def valuation(self) -> Optional[int]:
        return self.coords.valuation()

    def equals(self, other: 'Element', precision: Optional[int] = None) -> bool:
        return self.coords.equals(other.coords, precision)


def format_series(s: BSeries, variable: str = "b") -> str:
    """Многочлен по b в форме '1/2 + 3*b^2' (коэффициенты вне точности не печатаются)"""
    parts = []
    for k, c in enumerate(s.coeffs):
        if c == ZERO:
            continue
        text = format_scalar(c)
        if k == 0:
            parts.append(text)
            continue
        power = variable if k == 1 else f"{variable}^{k}"
        if text == "1":
            parts.append(power)
        elif text == "-1":
            parts.append(f"-{power}")
        elif '+' in text[1:] or '-' in text[1:]:
            parts.append(f"({text})*{power}")
        else:
            parts.append(f"{text}*{power}")
    if not parts:
        return "0"
    return " + ".join(parts).replace("+ -", "- ")


# ------------------------------------------------------------ действие a

def a_apply(E: ABModule, x: Element) -> Element:
    """a(x) = A S + b^2 S' (закрученное правило Лейбница)"""
    if x.coords.rows != E.rank:
        raise DimensionMismatch(f"элемент ранга {x.coords.rows} в модуле ранга {E.rank}")
    linear = E.a_matrix @ x.coords
    leibniz = x.coords.derivative().shift(2)
    return Element(E, linear + leibniz)


@dataclass
class ValidationReport:
    passed: bool
    failures: List[int] = field(default_factory=list)
    effective_precision: int = 0


def validate(E: ABModule, action: Optional[Callable[[Element], Element]] = None) -> ValidationReport:
    """
    Проверка ab - ba = b^2 на базисе прямым вычислением:
    a(b e_j) - b a(e_j) = b^2 e_j. action подменяет a_apply (для проверки самих проверок).
    """
    act = action or (lambda x: a_apply(E, x))
    failures = []
    precision = E.precision
    for j in range(E.rank):
        e = E.basis_element(j)
        lhs = act(e.times_b()) - act(e).times_b()
        rhs = e.times_b(2)
        precision = min(precision, lhs.precision)
        if not lhs.equals(rhs):
            failures.append(j)
    report = ValidationReport(not failures, failures, precision)
    if failures:
        logger.warning(f"⚠️ validate: соотношение нарушено на базисных векторах {failures}")
    return report


# ------------------------------------------------------------ конструкторы

def elementary(value: Any, precision: int) -> ABModule:
    """E_lambda: a e = lambda b e"""
    lam = scalar(value)
    return ABModule(b_times_identity(lam, 1, precision), ("e",), f"E_{format_scalar(lam)}")


def from_matrix(a_matrix: BMatrix, labels: Sequence[str] = (), name: str = "") -> ABModule:
    return ABModule(a_matrix, tuple(labels), name)


def _require_same_precision(*modules: ABModule) -> int:
    precisions = {E.precision for E in modules}
    if len(precisions) > 1:
        raise PrecisionMismatch(f"точности {sorted(precisions)}")
    return precisions.pop() if precisions else 0


def direct_sum(E: ABModule, F: ABModule) -> ABModule:
    _require_same_precision(E, F)
    labels = _disjoint_labels(E.labels, F.labels)
    name = f"{E.name or '?'} + {F.name or '?'}"
    return ABModule(BMatrix.block_diagonal([E.a_matrix, F.a_matrix]), labels, name)


def direct_sum_many(modules: Sequence[ABModule]) -> ABModule:
    result = modules[0]
    for F in modules[1:]:
        result = direct_sum(result, F)
    return result


def elementary_sum(exponents: Sequence[Any], precision: int) -> ABModule:
    """E_{l1} + E_{l2} + ..."""
    return direct_sum_many([elementary(lam, precision) for lam in exponents])


def _disjoint_labels(left: Sequence[str], right: Sequence[str]) -> Tuple[str, ...]:
    labels = list(left) + list(right)
    if len(set(labels)) == len(labels):
        return tuple(labels)
    return tuple(f"e{k + 1}" for k in range(len(labels)))


def zero_module(precision: int) -> ABModule:
    return ABModule(BMatrix.zeros(0, 0, precision), (), "0")


def conjugate(E: ABModule) -> ABModule:
    """a -> -a, b -> -b: матрица -A(-b)"""
    return ABModule(-E.a_matrix.conjugate(), tuple(f"~{l}" for l in E.labels), f"conj({E.name})")


def dual(E: ABModule) -> ABModule:
    """Двойственный модуль Hom(E, E_0): матрица -A^T"""
    return ABModule(-E.a_matrix.transpose(), tuple(f"{l}*" for l in E.labels), f"dual({E.name})")


def adjoint(E: ABModule) -> ABModule:
    """conjugate(dual(E)): матрица A(-b)^T"""
    return ABModule(E.a_matrix.conjugate().transpose(), tuple(f"~{l}*" for l in E.labels), f"adj({E.name})")


def tensor(E: ABModule, F: ABModule) -> ABModule:
    """a(v (x) w) = (av) (x) w + v (x) (aw); базис e_i (x) f_j построчно"""
    precision = _require_same_precision(E, F)
    kronecker_sum = E.a_matrix.kron(BMatrix.identity(F.rank, precision)) + \
        BMatrix.identity(E.rank, precision).kron(F.a_matrix)
    labels = tuple(f"{l}.{m}" for l in E.labels for m in F.labels)
    return ABModule(kronecker_sum, labels, f"({E.name})x({F.name})")


def hom_module(E: ABModule, F: ABModule) -> ABModule:
    """
    Hom_b(E, F) со структурой (Lambda phi)(x) = a_F(phi(x)) - phi(a_E x);
    реализован как tensor(F, dual(E)): базисный вектор i*n_E + j - элементарная матрица E_ij.
    """
    _require_same_precision(E, F)
    H = tensor(F, dual(E))
    return ABModule(H.a_matrix, H.labels, f"Hom({E.name},{F.name})")


def delta_dual(E: ABModule, delta: Any) -> ABModule:
    """delta-двойственный модуль Hom(conj E, E_delta) = adjoint(E) (x) E_delta"""
    d = scalar(delta)
    D = tensor(adjoint(E), elementary(d, E.precision))
    return ABModule(D.a_matrix, D.labels, f"ddual_{format_scalar(d)}({E.name})")


def apply_hom_action(E: ABModule, F: ABModule, phi: BMatrix) -> BMatrix:
    """
    Lambda(phi) = B phi + b^2 phi' - phi A как матрица b-линейного отображения
    (используется для проверки реализации hom_module вычислением).
    """
    return F.a_matrix @ phi + phi.derivative().shift(2) - phi @ E.a_matrix


def flatten_map(phi: BMatrix) -> BMatrix:
    """Матрица n_F x n_E -> столбец координат в базисе hom_module (построчно)"""
    column = [[phi.entry(i, j)] for i in range(phi.rows) for j in range(phi.cols)]
    return BMatrix.from_entries(column, phi.rows * phi.cols, 1, phi.precision)


def base_change(E: ABModule, T: BMatrix) -> Tuple[ABModule, BMatrix]:
    """
    Новый базис e~_j = sum_i T_ij e_i: A~ = T^{-1}(A T + b^2 T').
    Возвращает модуль и матрицу T (изоморфизм нового модуля в E).
    """
    if T.rows != T.cols or T.rows != E.rank:
        raise DimensionMismatch(f"замена базиса {T.shape} для ранга {E.rank}")
    if E.rank and determinant(T.constant_term()) == ZERO:
        raise NotInvertible("det T(0) = 0")
    T_inv = T.inverse()
    new_matrix = T_inv @ (E.a_matrix @ T + T.derivative().shift(2))
    logger.debug(f"замена базиса ранга {E.rank}, точность {E.precision} -> {new_matrix.precision}")
    return ABModule(new_matrix, E.labels, E.name), T


def permutation_matrix(order: Sequence[int], precision: int) -> BMatrix:
    """Столбец j - базисный вектор order[j]"""
    n = len(order)
    rows = [[1 if order[j] == i else 0 for j in range(n)] for i in range(n)]
    return BMatrix.constant(constant_matrix(rows, n, n), precision)


def identity_matrix(E: ABModule) -> BMatrix:
    return BMatrix.constant(eye(E.rank), E.precision)
