#!/usr/bin/env python3
"""
Точная арифметика: гауссовы рациональные скаляры (домен QQ_I из sympy),
усеченные ряды по b (BSeries), ряды Лорана (BLaurent) и матрицы рядов (BMatrix).

Соглашения:
- ряд точности N знает коэффициенты при b^0..b^{N-1}; результат операции
  имеет наименьшую точность аргументов;
- BMatrix хранит список постоянных матриц DomainMatrix над QQ_I,
  k-я матрица - коэффициент при b^k.
"""

import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Any, Dict, Iterable, List, Optional, Sequence, Tuple

import sympy
from sympy.polys.domains import QQ, QQ_I
from sympy.polys.matrices import DomainMatrix

from errors import DimensionMismatch, NotAUnit, NotInvertible, ParseError

Scalar = Any  # элемент QQ_I (GaussianRational)

ZERO = QQ_I.zero
ONE = QQ_I.one
IMAGINARY_UNIT = QQ_I.from_sympy(sympy.I)

_SCALAR_TEXT = re.compile(r'^[\s0-9./+*\-()i]+$')


# ---------------------------------------------------------------- скаляры

def scalar(value: Any) -> Scalar:
    """Приводит int, Fraction, str, sympy-число к элементу Q(i)"""
    if isinstance(value, QQ_I.dtype):
        return value
    if isinstance(value, str):
        return parse_scalar(value)
    if isinstance(value, Fraction):
        value = sympy.Rational(value.numerator, value.denominator)
    try:
        return QQ_I.from_sympy(sympy.sympify(value, rational=True))
    except (sympy.SympifyError, sympy.polys.polyerrors.CoercionFailed) as e:
        raise ValueError(f"{value!r} не является гауссовым рациональным числом") from e


def parse_scalar(text: str) -> Scalar:
    """Текстовая форма: "a/b", "a/b+c/d*i", "-i", "3" """
    if not text or not _SCALAR_TEXT.match(text):
        raise ParseError(f"неверная запись скаляра: {text!r}")
    try:
        value = sympy.sympify(text.replace('i', 'I'), rational=True)
        return QQ_I.from_sympy(sympy.expand(value))
    except (sympy.SympifyError, sympy.polys.polyerrors.CoercionFailed, TypeError) as e:
        raise ParseError(f"неверная запись скаляра: {text!r}") from e


def format_scalar(x: Scalar) -> str:
    re_part, im_part = QQ.to_sympy(x.x), QQ.to_sympy(x.y)
    if im_part == 0:
        return str(re_part)
    if im_part == 1:
        imaginary = "i"
    elif im_part == -1:
        imaginary = "-i"
    else:
        imaginary = f"{im_part}*i"
    if re_part == 0:
        return imaginary
    sign = "" if imaginary.startswith("-") else "+"
    return f"{re_part}{sign}{imaginary}"


def to_sympy(x: Scalar) -> sympy.Expr:
    return QQ_I.to_sympy(x)


def real_part(x: Scalar) -> sympy.Rational:
    return QQ.to_sympy(x.x)


def imag_part(x: Scalar) -> sympy.Rational:
    return QQ.to_sympy(x.y)


def integer_value(x: Scalar) -> Optional[int]:
    """Целое значение скаляра или None"""
    re_part = real_part(x)
    if imag_part(x) == 0 and re_part.is_integer:
        return int(re_part)
    return None


def gaussian_roots(coeffs: Sequence[Scalar]) -> Tuple[List[Tuple[Scalar, int]], bool]:
    """
    Корни многочлена (коэффициенты от старшего) над Q(i) с кратностями.
    Второй элемент - False, если есть неприводимые множители степени > 1.
    """
    t = sympy.Symbol('t')
    degree = len(coeffs) - 1
    expr = sympy.expand(sum(to_sympy(c) * t ** (degree - k) for k, c in enumerate(coeffs)))
    if degree < 1 or expr.is_number:
        return [], True
    _, factors = sympy.factor_list(expr, t, gaussian=True)
    roots = []
    all_rational = True
    for factor, multiplicity in factors:
        poly = sympy.Poly(factor, t)
        if poly.degree() == 1:
            lead, const = poly.all_coeffs()
            roots.append((QQ_I.from_sympy(sympy.expand(-const / lead)), multiplicity))
        elif poly.degree() > 1:
            all_rational = False
    return roots, all_rational


# ------------------------------------------------ постоянные матрицы QQ_I

def constant_matrix(rows: Sequence[Sequence[Any]], nrows: Optional[int] = None,
                    ncols: Optional[int] = None) -> DomainMatrix:
    nrows = len(rows) if nrows is None else nrows
    ncols = (len(rows[0]) if rows else 0) if ncols is None else ncols
    data = [[scalar(v) for v in row] for row in rows]
    return DomainMatrix(data, (nrows, ncols), QQ_I)


def zeros(nrows: int, ncols: int) -> DomainMatrix:
    return DomainMatrix([[ZERO] * ncols for _ in range(nrows)], (nrows, ncols), QQ_I)


def eye(n: int) -> DomainMatrix:
    return DomainMatrix([[ONE if i == j else ZERO for j in range(n)] for i in range(n)], (n, n), QQ_I)


def entries(M: DomainMatrix) -> List[List[Scalar]]:
    return M.to_dense().to_list()


def matmul(A: DomainMatrix, B: DomainMatrix) -> DomainMatrix:
    (r, k1), (k2, c) = A.shape, B.shape
    if k1 != k2:
        raise DimensionMismatch(f"умножение {A.shape} на {B.shape}")
    if r == 0 or c == 0 or k1 == 0:
        return zeros(r, c)
    return A.to_dense().matmul(B.to_dense())


def determinant(M: DomainMatrix) -> Scalar:
    if M.shape[0] != M.shape[1]:
        raise DimensionMismatch(f"определитель неквадратной матрицы {M.shape}")
    if M.shape[0] == 0:
        return ONE
    return M.to_dense().det()


def is_zero_matrix(M: DomainMatrix) -> bool:
    return all(v == ZERO for row in entries(M) for v in row)


def same_matrix(A: DomainMatrix, B: DomainMatrix) -> bool:
    """Поэлементное равенство: плотная и разреженная формы одной матрицы равны"""
    return A.shape == B.shape and entries(A) == entries(B)


def trace(M: DomainMatrix) -> Scalar:
    total = ZERO
    for i, row in enumerate(entries(M)):
        total += row[i]
    return total


def kron(A: DomainMatrix, B: DomainMatrix) -> DomainMatrix:
    """Кронекерово произведение, индекс (i, j) -> i*rows(B) + j"""
    a, b = entries(A), entries(B)
    (ra, ca), (rb, cb) = A.shape, B.shape
    rows = [[a[i][k] * b[j][l] for k in range(ca) for l in range(cb)]
            for i in range(ra) for j in range(rb)]
    return DomainMatrix(rows, (ra * rb, ca * cb), QQ_I)


def vectorize(M: DomainMatrix) -> List[Scalar]:
    """Построчная развертка матрицы"""
    return [v for row in entries(M) for v in row]


def row_basis(vectors: Sequence[Sequence[Scalar]], length: int) -> List[List[Scalar]]:
    """Канонический базис линейной оболочки (ненулевые строки rref)"""
    if not vectors:
        return []
    R, pivots = DomainMatrix([list(v) for v in vectors], (len(vectors), length), QQ_I).rref()
    rows = entries(R)
    return [rows[k] for k in range(len(pivots))]


def kernel_rows(equations: Dict[int, Dict[int, Scalar]], nrows: int, ncols: int) -> List[List[Scalar]]:
    """Базис ядра разреженной системы (строки - векторы ядра)"""
    if ncols == 0:
        return []
    if nrows == 0 or not equations:
        return entries(eye(ncols))
    system = DomainMatrix(equations, (nrows, ncols), QQ_I)
    return system.nullspace().to_dense().to_list()


def solve_in_span(columns: Sequence[Sequence[Scalar]], target: Sequence[Scalar]) -> Optional[List[Scalar]]:
    """Коэффициенты c с sum c_k columns[k] = target или None"""
    length = len(target)
    count = len(columns)
    augmented = [[columns[k][i] for k in range(count)] + [target[i]] for i in range(length)]
    if length == 0:
        return [ZERO] * count
    R, pivots = DomainMatrix(augmented, (length, count + 1), QQ_I).rref()
    if count in pivots:
        return None
    rows = entries(R)
    solution = [ZERO] * count
    for row, col in enumerate(pivots):
        solution[col] = rows[row][count]
    return solution


# ------------------------------------------------------------------ ряды

@dataclass(frozen=True, eq=False)
class BSeries:
    """Ряд по b, известный по модулю b^precision"""
    coeffs: Tuple[Scalar, ...]
    precision: int

    def __post_init__(self):
        if self.precision < 0:
            raise ValueError("точность должна быть неотрицательной")
        padded = tuple(scalar(c) for c in self.coeffs[:self.precision])
        padded += (ZERO,) * (self.precision - len(padded))
        object.__setattr__(self, 'coeffs', padded)

    @classmethod
    def zero(cls, precision: int) -> 'BSeries':
        return cls((), precision)

    @classmethod
    def constant(cls, value: Any, precision: int) -> 'BSeries':
        return cls((scalar(value),), precision)

    @classmethod
    def monomial(cls, value: Any, degree: int, precision: int) -> 'BSeries':
        return cls((ZERO,) * degree + (scalar(value),), precision)

    @classmethod
    def from_list(cls, values: Iterable[Any], precision: Optional[int] = None) -> 'BSeries':
        values = [scalar(v) for v in values]
        return cls(tuple(values), len(values) if precision is None else precision)

    def coeff(self, k: int) -> Scalar:
        if k < 0:
            return ZERO
        if k >= self.precision:
            raise IndexError(f"коэффициент b^{k} за пределами точности {self.precision}")
        return self.coeffs[k]

    def _common(self, other: 'BSeries') -> int:
        return min(self.precision, other.precision)

    def __add__(self, other: 'BSeries') -> 'BSeries':
        n = self._common(other)
        return BSeries(tuple(self.coeffs[k] + other.coeffs[k] for k in range(n)), n)

    def __sub__(self, other: 'BSeries') -> 'BSeries':
        n = self._common(other)
        return BSeries(tuple(self.coeffs[k] - other.coeffs[k] for k in range(n)), n)

    def __neg__(self) -> 'BSeries':
        return BSeries(tuple(-c for c in self.coeffs), self.precision)

    def __mul__(self, other: Any) -> 'BSeries':
        if not isinstance(other, BSeries):
            c = scalar(other)
            return BSeries(tuple(c * x for x in self.coeffs), self.precision)
        n = self._common(other)
        out = [ZERO] * n
        for i in range(n):
            a = self.coeffs[i]
            if a == ZERO:
                continue
            for j in range(n - i):
                out[i + j] += a * other.coeffs[j]
        return BSeries(tuple(out), n)

    __rmul__ = __mul__

    def invert(self) -> 'BSeries':
        if self.precision == 0:
            return self
        if self.coeffs[0] == ZERO:
            raise NotAUnit("ряд с нулевым свободным членом необратим")
        inv0 = ONE / self.coeffs[0]
        out = [inv0]
        for k in range(1, self.precision):
            acc = ZERO
            for p in range(1, k + 1):
                acc += self.coeffs[p] * out[k - p]
            out.append(-inv0 * acc)
        return BSeries(tuple(out), self.precision)

    def derivative(self) -> 'BSeries':
        n = max(self.precision - 1, 0)
        return BSeries(tuple(self.coeffs[k + 1] * (k + 1) for k in range(n)), n)

    def conjugate(self) -> 'BSeries':
        """S(b) -> S(-b)"""
        return BSeries(tuple(c if k % 2 == 0 else -c for k, c in enumerate(self.coeffs)), self.precision)

    def shift(self, k: int) -> 'BSeries':
        """Умножение на b^k (точность растет на k)"""
        return BSeries((ZERO,) * k + self.coeffs, self.precision + k)

    def unshift(self, k: int) -> 'BSeries':
        """Деление на b^k; младшие коэффициенты должны быть нулевыми"""
        if any(c != ZERO for c in self.coeffs[:k]):
            raise ValueError(f"ряд не делится на b^{k}")
        return BSeries(self.coeffs[k:], max(self.precision - k, 0))

    def valuation(self) -> Optional[int]:
        """Порядок по b; None, если ряд нулевой на данной точности"""
        for k, c in enumerate(self.coeffs):
            if c != ZERO:
                return k
        return None

    def is_unit(self) -> bool:
        return self.precision > 0 and self.coeffs[0] != ZERO

    def is_zero(self) -> bool:
        return self.valuation() is None

    def truncate(self, precision: int) -> 'BSeries':
        return BSeries(self.coeffs, min(precision, self.precision))

    def extend(self, precision: int) -> 'BSeries':
        """Дополняет нулями: ряд трактуется как многочлен"""
        return BSeries(self.coeffs, max(precision, self.precision))

    def equals(self, other: 'BSeries') -> bool:
        """Равенство на меньшей из двух точностей"""
        n = self._common(other)
        return self.coeffs[:n] == other.coeffs[:n]

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, BSeries):
            return NotImplemented
        return self.equals(other)

    __hash__ = None

    def __repr__(self) -> str:
        return f"BSeries([{', '.join(format_scalar(c) for c in self.coeffs)}], precision={self.precision})"


@dataclass(frozen=True, eq=False)
class BLaurent:
    """b^valuation_offset * body, body[0] != 0 для ненулевого значения"""
    valuation_offset: int
    body: BSeries

    @classmethod
    def from_series(cls, series: BSeries, offset: int = 0) -> 'BLaurent':
        v = series.valuation()
        if v is None:
            return cls(offset + series.precision, BSeries.zero(0))
        return cls(offset + v, series.unshift(v))

    @property
    def absolute_precision(self) -> int:
        """Коэффициенты известны до b^{absolute_precision - 1}"""
        return self.valuation_offset + self.body.precision

    def is_zero(self) -> bool:
        return self.body.is_zero()

    def shift(self, k: int) -> 'BLaurent':
        return BLaurent(self.valuation_offset + k, self.body)

    def __mul__(self, other: 'BLaurent') -> 'BLaurent':
        return BLaurent.from_series(self.body * other.body, self.valuation_offset + other.valuation_offset)

    def __add__(self, other: 'BLaurent') -> 'BLaurent':
        low = min(self.valuation_offset, other.valuation_offset)
        top = min(self.absolute_precision, other.absolute_precision)
        a = self.body.shift(self.valuation_offset - low).truncate(top - low)
        b = other.body.shift(other.valuation_offset - low).truncate(top - low)
        return BLaurent.from_series(a + b, low)

    def to_series(self) -> BSeries:
        if self.valuation_offset < 0 and not self.is_zero():
            raise ValueError("ряд Лорана с отрицательным порядком")
        return self.body.shift(self.valuation_offset) if self.valuation_offset >= 0 else self.body

    def terms(self) -> List[Tuple[int, Scalar]]:
        return [(self.valuation_offset + k, c) for k, c in enumerate(self.body.coeffs) if c != ZERO]


# -------------------------------------------------------------- матрицы

@dataclass(frozen=True, eq=False)
class BMatrix:
    """Матрица рядов: coefficients[k] - коэффициент при b^k"""
    rows: int
    cols: int
    precision: int
    coefficients: Tuple[DomainMatrix, ...]

    def __post_init__(self):
        # коэффициенты всегда плотные
        coeffs = tuple(C.to_dense() for C in self.coefficients[:self.precision])
        for C in coeffs:
            if C.shape != (self.rows, self.cols):
                raise DimensionMismatch(f"коэффициент {C.shape} в матрице {self.rows}x{self.cols}")
        coeffs += tuple(zeros(self.rows, self.cols) for _ in range(self.precision - len(coeffs)))
        object.__setattr__(self, 'coefficients', coeffs)

    # конструкторы
    @classmethod
    def zeros(cls, rows: int, cols: int, precision: int) -> 'BMatrix':
        return cls(rows, cols, precision, ())

    @classmethod
    def identity(cls, n: int, precision: int) -> 'BMatrix':
        return cls(n, n, precision, (eye(n),) if precision else ())

    @classmethod
    def from_coefficients(cls, coefficients: Sequence[DomainMatrix], precision: int) -> 'BMatrix':
        if not coefficients:
            raise DimensionMismatch("пустой список коэффициентов")
        rows, cols = coefficients[0].shape
        return cls(rows, cols, precision, tuple(c.to_dense() for c in coefficients))

    @classmethod
    def constant(cls, M: DomainMatrix, precision: int) -> 'BMatrix':
        return cls(M.shape[0], M.shape[1], precision, (M.to_dense(),) if precision else ())

    @classmethod
    def from_entries(cls, table: Sequence[Sequence[BSeries]], rows: Optional[int] = None,
                     cols: Optional[int] = None, precision: Optional[int] = None) -> 'BMatrix':
        rows = len(table) if rows is None else rows
        cols = (len(table[0]) if table else 0) if cols is None else cols
        if precision is None:
            precision = min((s.precision for row in table for s in row), default=0)
        coeffs = []
        for k in range(precision):
            coeffs.append(DomainMatrix(
                [[table[i][j].coeffs[k] if k < table[i][j].precision else ZERO for j in range(cols)]
                 for i in range(rows)], (rows, cols), QQ_I))
        return cls(rows, cols, precision, tuple(coeffs))

    @classmethod
    def block_diagonal(cls, blocks: Sequence['BMatrix']) -> 'BMatrix':
        precision = min((B.precision for B in blocks), default=0)
        rows = sum(B.rows for B in blocks)
        cols = sum(B.cols for B in blocks)
        table = [[BSeries.zero(precision) for _ in range(cols)] for _ in range(rows)]
        r0 = c0 = 0
        for B in blocks:
            for i in range(B.rows):
                for j in range(B.cols):
                    table[r0 + i][c0 + j] = B.entry(i, j)
            r0 += B.rows
            c0 += B.cols
        return cls.from_entries(table, rows, cols, precision)

    @classmethod
    def hstack(cls, blocks: Sequence['BMatrix']) -> 'BMatrix':
        rows = blocks[0].rows
        precision = min(B.precision for B in blocks)
        table = [[B.entry(i, j) for B in blocks for j in range(B.cols)] for i in range(rows)]
        return cls.from_entries(table, rows, sum(B.cols for B in blocks), precision)

    @classmethod
    def vstack(cls, blocks: Sequence['BMatrix']) -> 'BMatrix':
        return cls.hstack([B.transpose() for B in blocks]).transpose()

    # доступ
    @property
    def shape(self) -> Tuple[int, int]:
        return self.rows, self.cols

    def entry(self, i: int, j: int) -> BSeries:
        return BSeries(tuple(entries(C)[i][j] for C in self.coefficients), self.precision)

    def table(self) -> List[List[BSeries]]:
        data = [entries(C) for C in self.coefficients]
        return [[BSeries(tuple(d[i][j] for d in data), self.precision) for j in range(self.cols)]
                for i in range(self.rows)]

    def constant_term(self) -> DomainMatrix:
        return self.coefficients[0] if self.precision else zeros(self.rows, self.cols)

    def column(self, j: int) -> 'BMatrix':
        return self.select(range(self.rows), [j])

    def select(self, row_indices: Iterable[int], col_indices: Iterable[int]) -> 'BMatrix':
        row_indices, col_indices = list(row_indices), list(col_indices)
        coeffs = []
        for C in self.coefficients:
            d = entries(C)
            coeffs.append(DomainMatrix([[d[i][j] for j in col_indices] for i in row_indices],
                                       (len(row_indices), len(col_indices)), QQ_I))
        return BMatrix(len(row_indices), len(col_indices), self.precision, tuple(coeffs))

    # арифметика
    def _check_shape(self, other: 'BMatrix') -> None:
        if self.shape != other.shape:
            raise DimensionMismatch(f"{self.shape} и {other.shape}")

    def __add__(self, other: 'BMatrix') -> 'BMatrix':
        self._check_shape(other)
        n = min(self.precision, other.precision)
        return BMatrix(self.rows, self.cols, n,
                       tuple(self.coefficients[k] + other.coefficients[k] for k in range(n)))

    def __sub__(self, other: 'BMatrix') -> 'BMatrix':
        self._check_shape(other)
        n = min(self.precision, other.precision)
        return BMatrix(self.rows, self.cols, n,
                       tuple(self.coefficients[k] - other.coefficients[k] for k in range(n)))

    def __neg__(self) -> 'BMatrix':
        return BMatrix(self.rows, self.cols, self.precision, tuple(-C for C in self.coefficients))

    def scale(self, value: Any) -> 'BMatrix':
        c = scalar(value)
        return BMatrix(self.rows, self.cols, self.precision, tuple(C * c for C in self.coefficients))

    def scale_series(self, s: BSeries) -> 'BMatrix':
        n = min(self.precision, s.precision)
        coeffs = []
        for k in range(n):
            acc = zeros(self.rows, self.cols)
            for p in range(k + 1):
                if s.coeffs[p] != ZERO:
                    acc = acc + self.coefficients[k - p] * s.coeffs[p]
            coeffs.append(acc)
        return BMatrix(self.rows, self.cols, n, tuple(coeffs))

    def __matmul__(self, other: 'BMatrix') -> 'BMatrix':
        if self.cols != other.rows:
            raise DimensionMismatch(f"умножение {self.shape} на {other.shape}")
        n = min(self.precision, other.precision)
        nonzero_left = [not is_zero_matrix(C) for C in self.coefficients[:n]]
        coeffs = []
        for k in range(n):
            acc = zeros(self.rows, other.cols)
            for p in range(k + 1):
                if nonzero_left[p]:
                    acc = acc + matmul(self.coefficients[p], other.coefficients[k - p])
            coeffs.append(acc)
        return BMatrix(self.rows, other.cols, n, tuple(coeffs))

    def power(self, k: int) -> 'BMatrix':
        result = BMatrix.identity(self.rows, self.precision)
        for _ in range(k):
            result = result @ self
        return result

    def derivative(self) -> 'BMatrix':
        n = max(self.precision - 1, 0)
        return BMatrix(self.rows, self.cols, n,
                       tuple(self.coefficients[k + 1] * QQ_I.convert(k + 1) for k in range(n)))

    def conjugate(self) -> 'BMatrix':
        """M(b) -> M(-b)"""
        return BMatrix(self.rows, self.cols, self.precision,
                       tuple(C if k % 2 == 0 else -C for k, C in enumerate(self.coefficients)))

    def transpose(self) -> 'BMatrix':
        return BMatrix(self.cols, self.rows, self.precision,
                       tuple(C.transpose() for C in self.coefficients))

    def shift(self, k: int) -> 'BMatrix':
        return BMatrix(self.rows, self.cols, self.precision + k,
                       tuple(zeros(self.rows, self.cols) for _ in range(k)) + self.coefficients)

    def unshift(self, k: int) -> 'BMatrix':
        if any(not is_zero_matrix(C) for C in self.coefficients[:k]):
            raise ValueError(f"матрица не делится на b^{k}")
        return BMatrix(self.rows, self.cols, max(self.precision - k, 0), self.coefficients[k:])

    def truncate(self, precision: int) -> 'BMatrix':
        n = min(precision, self.precision)
        return BMatrix(self.rows, self.cols, n, self.coefficients[:n])

    def extend(self, precision: int) -> 'BMatrix':
        return BMatrix(self.rows, self.cols, max(precision, self.precision), self.coefficients)

    def kron(self, other: 'BMatrix') -> 'BMatrix':
        n = min(self.precision, other.precision)
        coeffs = []
        for k in range(n):
            acc = zeros(self.rows * other.rows, self.cols * other.cols)
            for p in range(k + 1):
                if not is_zero_matrix(self.coefficients[p]):
                    acc = acc + kron(self.coefficients[p], other.coefficients[k - p])
            coeffs.append(acc)
        return BMatrix(self.rows * other.rows, self.cols * other.cols, n, tuple(coeffs))

    def inverse(self) -> 'BMatrix':
        """Обратная матрица по модулю b^precision (нужна det M(0) != 0)"""
        if self.rows != self.cols:
            raise DimensionMismatch("обращение неквадратной матрицы")
        if self.precision == 0 or self.rows == 0:
            return self
        if determinant(self.constant_term()) == ZERO:
            raise NotInvertible("det M(0) = 0")
        inv0 = self.constant_term().to_dense().inv()
        out = [inv0]
        for k in range(1, self.precision):
            acc = zeros(self.rows, self.cols)
            for p in range(1, k + 1):
                acc = acc + matmul(self.coefficients[p], out[k - p])
            out.append(-matmul(inv0, acc))
        return BMatrix(self.rows, self.cols, self.precision, tuple(out))

    # предикаты
    def is_zero(self) -> bool:
        return all(is_zero_matrix(C) for C in self.coefficients)

    def equals(self, other: 'BMatrix', precision: Optional[int] = None) -> bool:
        if self.shape != other.shape:
            return False
        n = min(self.precision, other.precision)
        if precision is not None:
            n = min(n, precision)
        return all(same_matrix(self.coefficients[k], other.coefficients[k]) for k in range(n))

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, BMatrix):
            return NotImplemented
        return self.equals(other)

    __hash__ = None

    def first_difference(self, other: 'BMatrix') -> Optional[int]:
        """Наименьшая степень b, где матрицы различаются"""
        n = min(self.precision, other.precision)
        for k in range(n):
            if not same_matrix(self.coefficients[k], other.coefficients[k]):
                return k
        return None

    def valuation(self) -> Optional[int]:
        for k, C in enumerate(self.coefficients):
            if not is_zero_matrix(C):
                return k
        return None

    def __repr__(self) -> str:
        return f"BMatrix({self.rows}x{self.cols}, precision={self.precision})"


def b_times_identity(value: Any, n: int, precision: int) -> BMatrix:
    """value * b * I_n"""
    if precision < 2:
        return BMatrix.zeros(n, n, precision)
    return BMatrix(n, n, precision, (zeros(n, n), eye(n) * scalar(value)))
