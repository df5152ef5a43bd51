#!/usr/bin/env python3
"""
Структурная теория (a,b)-модулей на конечной точности:
нормальная форма Смита над C[[b]]/b^N, насыщение и регулярность,
мономы и показатели, фактормодули, композиционный ряд,
расщепление Фиттинга и разложение Крулля-Шмидта.
"""

import logging
import math
import random
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Sequence, Tuple, Union

import sympy
from sympy.polys.domains import QQ_I
from sympy.polys.matrices import DomainMatrix
from tqdm import tqdm

from abmodule import ABModule, Element, base_change, direct_sum_many, elementary
from configuration import option
from errors import (
    Inconclusive, NonRationalExponent, NotEndomorphism, NotNormal, NotRegular, NotStable,
)
from homsolver import ABMorphism, HomBasis, are_isomorphic, solve_hom
from series import (
    BLaurent, BMatrix, BSeries, ZERO, Scalar, determinant, entries, eye, format_scalar,
    gaussian_roots, imag_part, is_zero_matrix, matmul, real_part, same_matrix, scalar,
    solve_in_span, to_sympy, trace, vectorize, zeros,
)

logger = logging.getLogger(__name__)


# ------------------------------------------------------ форма Смита

@dataclass
class SmithForm:
    """U M V = D (mod b^precision), D = diag(b^k_1, b^k_2, ...), k_1 <= k_2 <= ..."""
    U: BMatrix
    D: BMatrix
    V: BMatrix
    diagonal: List[Optional[int]]  # None - нулевой элемент на данной точности

    @property
    def rank(self) -> int:
        return sum(1 for k in self.diagonal if k is not None)

    @property
    def normal(self) -> bool:
        return all(k == 0 for k in self.diagonal if k is not None)

    def image_basis(self) -> BMatrix:
        """Столбцы U^{-1} diag(b^k): базис образа M"""
        U_inv = self.U.inverse()
        columns = [U_inv.column(i).scale_series(BSeries.monomial(1, k, self.U.precision))
                   for i, k in enumerate(self.diagonal) if k is not None]
        if not columns:
            return BMatrix.zeros(self.U.rows, 0, self.U.precision)
        return BMatrix.hstack(columns)

    def kernel_basis(self) -> BMatrix:
        """Столбцы V при нулевых элементах диагонали"""
        rank = self.rank
        columns = list(range(rank, self.V.cols))
        return self.V.select(range(self.V.rows), columns)


def _min_valuation(work: List[List[BSeries]], t: int) -> Optional[Tuple[int, int, int]]:
    best = None
    for i in range(t, len(work)):
        for j in range(t, len(work[i])):
            v = work[i][j].valuation()
            if v is not None and (best is None or v < best[0]):
                best = (v, i, j)
    return best


def smith_normal_form(M: BMatrix) -> SmithForm:
    """
    Исключение по элементу минимального порядка с нормировкой ведущего
    элемента до b^v. Частные q известны по модулю b^{P-v}, но умножаются на
    элементы порядка >= v, поэтому U M V = D выполняется по модулю b^P.
    """
    P = M.precision
    rows, cols = M.shape
    work = M.table()
    U = BMatrix.identity(rows, P).table()
    V = BMatrix.identity(cols, P).table()
    diagonal: List[Optional[int]] = []

    for t in range(min(rows, cols)):
        pivot = _min_valuation(work, t)
        if pivot is None:
            diagonal.extend([None] * (min(rows, cols) - t))
            break
        v, i, j = pivot
        work[t], work[i] = work[i], work[t]
        U[t], U[i] = U[i], U[t]
        for row in work:
            row[t], row[j] = row[j], row[t]
        for row in V:
            row[t], row[j] = row[j], row[t]

        unit = work[t][t].unshift(v).invert().extend(P)
        work[t] = [x * unit for x in work[t]]
        U[t] = [x * unit for x in U[t]]

        for i in range(t + 1, rows):
            if work[i][t].is_zero():
                continue
            q = work[i][t].unshift(v).extend(P)
            work[i] = [x - q * y for x, y in zip(work[i], work[t])]
            U[i] = [x - q * y for x, y in zip(U[i], U[t])]
        for j in range(t + 1, cols):
            if work[t][j].is_zero():
                continue
            q = work[t][j].unshift(v).extend(P)
            for k in range(rows):
                work[k][j] = work[k][j] - q * work[k][t]
            for k in range(cols):
                V[k][j] = V[k][j] - q * V[k][t]
        diagonal.append(v)

    D = [[BSeries.zero(P) for _ in range(cols)] for _ in range(rows)]
    for t, k in enumerate(diagonal):
        if k is not None:
            D[t][t] = BSeries.monomial(1, k, P)
    return SmithForm(BMatrix.from_entries(U, rows, rows, P), BMatrix.from_entries(D, rows, cols, P),
                     BMatrix.from_entries(V, cols, cols, P), diagonal)


def _as_matrix(E: ABModule, generators: Union[BMatrix, Sequence[Element]]) -> BMatrix:
    if isinstance(generators, BMatrix):
        return generators
    if not generators:
        return BMatrix.zeros(E.rank, 0, E.precision)
    return BMatrix.hstack([g.coords for g in generators])


# ------------------------------------------------------ подмодули

@dataclass
class Submodule:
    ambient: ABModule
    basis: BMatrix  # n x s, столбцы - образующие
    normal: bool
    exponent: Optional[Scalar] = None  # тип мономов-образующих, если он общий

    @property
    def rank(self) -> int:
        return self.basis.cols

    @property
    def generators(self) -> List[Element]:
        return [Element(self.ambient, self.basis.column(j)) for j in range(self.basis.cols)]


def submodule(E: ABModule, generators: Union[BMatrix, Sequence[Element]]) -> Submodule:
    """
    Подмодуль, порожденный столбцами: базис - образ по форме Смита.
    a-устойчивость проверяется сравнением форм Смита для [G] и [G | aG].
    """
    G = _as_matrix(E, generators)
    form = smith_normal_form(G)
    basis = form.image_basis()
    if basis.cols:
        action = E.a_matrix @ basis + basis.derivative().shift(2)
        extended = smith_normal_form(BMatrix.hstack([basis.truncate(action.precision), action]))
        if extended.rank != form.rank or \
                sum(k for k in extended.diagonal if k is not None) != sum(k for k in form.diagonal if k is not None):
            raise NotStable(f"образующие не порождают a-устойчивый подмодуль в {E.name}")
    return Submodule(E, basis, form.normal)


# ------------------------------------------------------ регулярность

@dataclass
class Saturation:
    """Насыщение b^{-shift} span(C) и его представление с простым полюсом"""
    lattice: BMatrix
    shift: int
    module: ABModule
    residue: DomainMatrix
    steps: int

    def laurent_basis(self) -> List[List[BLaurent]]:
        """Координаты насыщенного базиса в E (ряды Лорана)"""
        return [[BLaurent.from_series(self.lattice.entry(i, j), -self.shift)
                 for j in range(self.lattice.cols)] for i in range(self.lattice.rows)]


@dataclass
class RegularityVerdict:
    verdict: str  # regular / not_regular / inconclusive
    saturation: Optional[Saturation] = None
    steps: int = 0

    @property
    def regular(self) -> bool:
        return self.verdict == "regular"


def is_regular(E: ABModule, max_steps: Optional[int] = None) -> RegularityVerdict:
    """
    Итерация L <- L + b^{-1} a L. Решетка хранится как b^{-shift} span(C);
    модуль регулярен, если кообъем решетки перестал меняться.
    """
    n, N = E.rank, E.precision
    if n == 0:
        return RegularityVerdict("regular", Saturation(BMatrix.zeros(0, 0, N), 0, E, DomainMatrix([], (0, 0), QQ_I), 0))
    if max_steps is None:
        max_steps = option('regularity', 'max_steps_factor') * n * N
    W = N + max_steps + 2
    A = E.a_matrix.extend(W)
    C = BMatrix.identity(n, W)
    shift = 0
    covolume = 0

    for step in range(1, max_steps + 1):
        action = A @ C + C.derivative().shift(2) - C.scale(shift).shift(1)
        form = smith_normal_form(BMatrix.hstack([C.shift(1), action]).truncate(W))
        if form.rank < n:
            return RegularityVerdict("inconclusive", steps=step)
        ks = form.diagonal[:n]
        low = min(ks)
        if max(ks) - low >= W - N:
            return RegularityVerdict("inconclusive", steps=step)
        scaling = BMatrix.from_entries(
            [[BSeries.monomial(1, ks[i] - low, W) if i == j else BSeries.zero(W) for j in range(n)]
             for i in range(n)], n, n, W)
        U = form.U
        C = U.inverse() @ scaling
        shift = shift + 1 - low
        new_covolume = sum(k - low for k in ks) - n * shift
        logger.debug(f"шаг насыщения {step}: сдвиг {shift}, кообъем {new_covolume}")
        if new_covolume == covolume:
            return _simple_pole(E, A, U, ks, low, C, shift, step)
        covolume = new_covolume

    logger.info(f"{E.name}: насыщение не стабилизировалось за {max_steps} шагов")
    return RegularityVerdict("not_regular", steps=max_steps)


def _simple_pole(E: ABModule, A: BMatrix, U: BMatrix, ks: List[int], low: int, C: BMatrix,
                 shift: int, steps: int) -> RegularityVerdict:
    """A~ = C^{-1}(A C + b^2 C' - shift b C), C^{-1} = diag(b^{-k}) U"""
    N, n = E.precision, E.rank
    X = A @ C + C.derivative().shift(2) - C.scale(shift).shift(1)
    Y = (U @ X).table()
    try:
        rows = [[Y[i][j].unshift(ks[i] - low) for j in range(n)] for i in range(n)]
    except ValueError:
        return RegularityVerdict("inconclusive", steps=steps)
    presentation = BMatrix.from_entries(rows, n, n, N)
    if any(v != ZERO for row in entries(presentation.constant_term()) for v in row):
        return RegularityVerdict("inconclusive", steps=steps)
    module = ABModule(presentation, tuple(f"s{k + 1}" for k in range(n)), f"sat({E.name})")
    residue = presentation.coefficients[1] if N > 1 else zeros(n, n)
    return RegularityVerdict("regular", Saturation(C.truncate(N), shift, module, residue, steps), steps)


def saturation(E: ABModule, max_steps: Optional[int] = None) -> Saturation:
    verdict = is_regular(E, max_steps)
    if verdict.verdict == "regular":
        return verdict.saturation
    if verdict.verdict == "inconclusive":
        raise Inconclusive(f"регулярность {E.name} не установлена на точности {E.precision}", verdict)
    raise NotRegular(f"{E.name} не регулярен")


# ------------------------------------------------- мономы и показатели

@dataclass
class Monomial:
    """Примитивный элемент x с a x = exponent * b x"""
    element: Element
    exponent: Scalar
    valuation: int = 0


def monomials_of_type(E: ABModule, value: Any) -> List[Monomial]:
    """
    Решения a x = value*b*x из Hom(E_value, E); решение порядка v делится
    на b^v и дает примитивный моном типа value - v.
    """
    lam = scalar(value)
    basis = solve_hom(elementary(lam, E.precision), E)
    result = []
    for f in basis.morphisms:
        column = f.matrix
        v = column.valuation()
        if v is None:
            continue
        primitive = column.unshift(v)
        result.append(Monomial(Element(E, primitive), lam - QQ_I.convert(v), v))
    return result


@dataclass
class ExponentClass:
    """Класс показателей по модулю Z"""
    representative: Scalar  # 0 <= Re < 1
    minimum: Scalar
    roots: List[Scalar] = field(default_factory=list)

    def describe(self) -> str:
        return f"{format_scalar(self.representative)} + Z: min {format_scalar(self.minimum)}"


def _class_key(x: Scalar) -> Tuple[Scalar, Tuple[Any, Any]]:
    floor = int(sympy.floor(real_part(x)))
    representative = x - QQ_I.convert(floor)
    return representative, (real_part(representative), imag_part(representative))


def candidate_exponents(E: ABModule) -> List[ExponentClass]:
    """
    Корни характеристического многочлена вычета насыщения, сгруппированные
    по классам mod Z; минимум класса - наименьший сдвиг с ненулевым мономом в E.
    """
    sat = saturation(E)
    roots, rational = gaussian_roots(sat.residue.to_dense().charpoly())
    if not rational:
        raise NonRationalExponent(f"показатели {E.name} не лежат в Q(i)")

    classes: Dict[Tuple[Any, Any], ExponentClass] = {}
    for root, multiplicity in roots:
        representative, key = _class_key(root)
        entry = classes.setdefault(key, ExponentClass(representative, root))
        entry.roots.extend([root] * multiplicity)

    result = []
    for key in sorted(classes):
        entry = classes[key]
        entry.roots.sort(key=real_part)
        low, high = entry.roots[0], entry.roots[-1]
        span = int(real_part(high - low)) + sat.shift
        for j in range(span + 1):
            lam = low + QQ_I.convert(j)
            if monomials_of_type(E, lam):
                entry.minimum = lam
                break
        else:
            raise Inconclusive(f"нет монома в классе {format_scalar(entry.representative)} на точности {E.precision}")
        result.append(entry)
    return result


def v_lambda_min(E: ABModule, representative: Optional[Any] = None) -> Submodule:
    """Подмодуль, порожденный мономами минимального типа в выбранном классе"""
    classes = candidate_exponents(E)
    chosen = classes[0]
    if representative is not None:
        _, key = _class_key(scalar(representative))
        chosen = next(c for c in classes if _class_key(c.representative)[1] == key)
    lam = chosen.minimum
    monomials = [m for m in monomials_of_type(E, lam) if m.exponent == lam]
    result = submodule(E, [m.element for m in monomials])
    result.exponent = lam
    if not result.normal:
        logger.warning(f"⚠️ V_{format_scalar(lam)} модуля {E.name} не нормален на точности {E.precision}")
    return result


# --------------------------------------------------- фактормодули

def quotient(E: ABModule, S: Submodule) -> Tuple[ABModule, ABMorphism]:
    """E/S и проекция E -> E/S; базис E дополняется по форме Смита образующих S"""
    if not S.normal:
        raise NotNormal(f"фактор {E.name} по подмодулю имеет кручение")
    s, n = S.rank, E.rank
    form = smith_normal_form(S.basis)
    T = form.U.inverse()
    adapted, _ = base_change(E.truncate(T.precision), T)
    A = adapted.a_matrix
    if not A.select(range(s, n), range(s)).is_zero():
        raise NotStable("подмодуль не a-устойчив")
    block = A.select(range(s, n), range(s, n))
    Q = ABModule(block, tuple(f"q{k + 1}" for k in range(n - s)), f"{E.name}/S")
    projection = ABMorphism(E.truncate(T.precision), Q, form.U.select(range(s, n), range(n)))
    return Q, projection


@dataclass
class CompositionSeries:
    exponents: List[Scalar]
    quotients: List[ABModule] = field(default_factory=list)
    generators: List[Element] = field(default_factory=list)


def composition_series(E: ABModule) -> CompositionSeries:
    """Последовательно выделяет примитивный моном минимального типа и переходит к фактору"""
    result = CompositionSeries([])
    current = E
    while current.rank > 0:
        cls = candidate_exponents(current)[0]
        lam = cls.minimum
        monomials = [m for m in monomials_of_type(current, lam) if m.exponent == lam]
        if not monomials:
            raise Inconclusive(f"нет примитивного монома типа {format_scalar(lam)}", result)
        line = submodule(current, [monomials[0].element])
        result.exponents.append(lam)
        result.generators.append(monomials[0].element)
        current, _ = quotient(current, line)
        result.quotients.append(current)
        logger.debug(f"шаг композиционного ряда: показатель {format_scalar(lam)}, остался ранг {current.rank}")
    return result


# ------------------------------------------------ расщепление Фиттинга

@dataclass
class FittingSplit:
    image: Submodule      # F: phi биективен
    kernel: Submodule     # K: phi нильпотентен
    index: int            # m: Ker phi^m = Ker phi^{m+1}
    transform: BMatrix    # [F | K] в координатах E
    image_module: ABModule
    kernel_module: ABModule


def fitting_split(E: ABModule, phi: ABMorphism) -> FittingSplit:
    if not (phi.domain.same_presentation(E) and phi.codomain.same_presentation(E)):
        raise NotEndomorphism("fitting_split ожидает эндоморфизм E")
    P = min(phi.precision, E.precision)
    module = E.truncate(P)
    M = phi.matrix.truncate(P)
    n = E.rank

    powers = [BMatrix.identity(n, P)]
    kernel_ranks = [0]
    for _ in range(n):
        powers.append(powers[-1] @ M)
        form = smith_normal_form(powers[-1])
        kernel_ranks.append(n - form.rank)
    m = next(k for k in range(n + 1) if kernel_ranks[k] == kernel_ranks[n])

    form = smith_normal_form(powers[m])
    if not form.normal:
        raise Inconclusive(f"образ phi^{m} не нормален на точности {P}")
    F = form.image_basis()
    K = form.kernel_basis()
    T = BMatrix.hstack([F, K]) if F.cols and K.cols else (F if K.cols == 0 else K)
    if determinant(T.constant_term()) == ZERO:
        raise Inconclusive("F и K не дают разложения в прямую сумму")

    adapted, _ = base_change(module, T)
    A = adapted.a_matrix
    r = F.cols
    if not (A.select(range(r), range(r, n)).is_zero() and A.select(range(r, n), range(r)).is_zero()):
        raise Inconclusive("матрица a не блочно-диагональна в базисе [F | K]")
    restricted = T.inverse() @ M @ T
    on_kernel = restricted.select(range(r, n), range(r, n))
    if r and determinant(restricted.constant_term().extract(list(range(r)), list(range(r)))) == ZERO:
        raise Inconclusive("phi не обратим на F")
    if n - r and not on_kernel.power(m).is_zero():
        raise Inconclusive("phi не нильпотентен на K")

    image_module = ABModule(A.select(range(r), range(r)), tuple(f"f{k + 1}" for k in range(r)), f"F({E.name})")
    kernel_module = ABModule(A.select(range(r, n), range(r, n)),
                             tuple(f"k{k + 1}" for k in range(n - r)), f"K({E.name})")
    logger.debug(f"расщепление Фиттинга {E.name}: индекс {m}, ранги {r} + {n - r}")
    return FittingSplit(Submodule(module, F, True), Submodule(module, K, True), m, T, image_module, kernel_module)


# ------------------------------------------- эндоморфизмы и разложение

@dataclass
class TrichotomyReport:
    checked: int = 0
    invertible: int = 0
    nilpotent: int = 0
    violations: List[ABMorphism] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return not self.violations


def classify_endomorphism(phi: ABMorphism) -> str:
    """invertible / nilpotent / neither (на точности матрицы)"""
    if determinant(phi.matrix.constant_term()) != ZERO:
        return "invertible"
    if phi.matrix.power(phi.domain.rank).is_zero():
        return "nilpotent"
    return "neither"


def endomorphism_trichotomy(E: ABModule, basis: Optional[HomBasis] = None, samples: int = 100,
                            seed: Optional[int] = None) -> TrichotomyReport:
    """Каждый эндоморфизм неразложимого модуля обратим или нильпотентен"""
    basis = basis or solve_hom(E, E)
    rng = random.Random(option('random', 'seed', seed))
    candidates = list(basis.morphisms)
    if basis.morphisms:
        candidates += [basis.random_element(rng) for _ in range(samples)]
    report = TrichotomyReport()
    for phi in candidates:
        kind = classify_endomorphism(phi)
        report.checked += 1
        if kind == "invertible":
            report.invertible += 1
        elif kind == "nilpotent":
            report.nilpotent += 1
        else:
            report.violations.append(phi)
    return report


def check_sum_lemma(phi: ABMorphism) -> Dict[str, bool]:
    """phi + (Id - phi) = Id: хотя бы одно из слагаемых обратимо (для неразложимого E)"""
    n = phi.domain.rank
    first = determinant(phi.matrix.constant_term()) != ZERO
    complement = eye(n) - phi.matrix.constant_term()
    second = determinant(complement) != ZERO
    return {"first_invertible": first, "second_invertible": second, "holds": first or second}


def _charpoly_idempotent(z: DomainMatrix) -> Optional[DomainMatrix]:
    """Спектральный проектор z на первый примарный множитель (None, если множитель один)"""
    n = z.shape[0]
    t = sympy.Symbol('t')
    coeffs = z.to_dense().charpoly()
    expr = sum(to_sympy(c) * t ** (n - k) for k, c in enumerate(coeffs))
    char = sympy.Poly(expr, t, gaussian=True)
    _, factors = char.factor_list()
    if len(factors) < 2:
        return None
    head, multiplicity = factors[0]
    g = head ** multiplicity
    h = char.quo(g)
    _, u, _ = g.gcdex(h)
    e = (u * h).rem(char)
    result = zeros(n, n)
    for c in e.all_coeffs():
        result = matmul(result, z) + eye(n) * QQ_I.from_sympy(sympy.expand(c))
    return result


def _candidates(constants: Sequence[DomainMatrix], trials: int, rng: random.Random):
    yield from constants
    for i in range(len(constants)):
        for j in range(i + 1, len(constants)):
            yield constants[i] + constants[j]
            yield matmul(constants[i], constants[j])
    n = constants[0].shape[0]
    for _ in range(trials):
        z = zeros(n, n)
        for C in constants:
            z = z + C * QQ_I.convert(rng.randint(-3, 3))
        yield z


def find_idempotent(E: ABModule, trials: Optional[int] = None,
                    seed: Optional[int] = None) -> Optional[ABMorphism]:
    """
    None - алгебра постоянных членов End(E) локальна (E неразложим);
    иначе нетривиальный идемпотент, поднятый итерацией e <- 3e^2 - 2e^3.
    """
    n = E.rank
    basis = solve_hom(E, E)
    constants = [f.matrix.constant_term() for f in basis.morphisms]
    gram = [[trace(matmul(Ci, Cj)) for Cj in constants] for Ci in constants]
    semisimple = DomainMatrix(gram, (len(constants), len(constants)), QQ_I).rank() if constants else 0
    logger.debug(f"End({E.name}): размерность {basis.dim}, полупростой фактор {semisimple}")
    if semisimple <= 1:
        return None

    rng = random.Random(option('random', 'seed', seed))
    columns = [vectorize(C) for C in constants]
    for z in _candidates(constants, option('decomposition', 'trials', trials), rng):
        e = _charpoly_idempotent(z)
        if e is None or is_zero_matrix(e) or same_matrix(e, eye(n)):
            continue
        coefficients = solve_in_span(columns, vectorize(e))
        if coefficients is None:
            continue
        eps = basis.combination(coefficients)
        for _ in range(math.ceil(math.log2(max(eps.precision, 2))) + 2):
            square = eps.matrix @ eps.matrix
            eps = ABMorphism(E, E, square.scale(3) - (square @ eps.matrix).scale(2))
        if (eps.matrix @ eps.matrix).equals(eps.matrix):
            return eps
    raise Inconclusive(f"идемпотент для {E.name} не найден")


@dataclass
class DecompositionReport:
    factors: List[Tuple[ABModule, int]]
    leaves: List[ABModule]
    witness: Optional[ABMorphism]
    certified: bool
    precision: int
    notes: List[str] = field(default_factory=list)

    @property
    def multiplicities(self) -> List[int]:
        return [m for _, m in self.factors]

    def ranks(self) -> List[int]:
        return sorted(M.rank for M, _ in self.factors)


@dataclass
class _Piece:
    module: ABModule
    basis: BMatrix  # координаты в E
    local: bool = False


def _split_piece(piece: _Piece, trials: Optional[int], seed: Optional[int]) -> List[_Piece]:
    if piece.module.rank <= 1:
        piece.local = True
        return [piece]
    eps = find_idempotent(piece.module, trials, seed)
    if eps is None:
        piece.local = True
        return [piece]
    split = fitting_split(piece.module, eps)
    r = split.image_module.rank
    n = piece.module.rank
    T = split.transform
    return [_Piece(split.image_module, piece.basis @ T.select(range(n), range(r))),
            _Piece(split.kernel_module, piece.basis @ T.select(range(n), range(r, n)))]


def krull_schmidt(E: ABModule, trials: Optional[int] = None, seed: Optional[int] = None,
                  threads: int = 1, progress: Optional[bool] = None,
                  headroom: Optional[int] = None) -> DecompositionReport:
    """
    Разложение на неразложимые слагаемые, сгруппированные по изоморфизму.

    Каждое расщепление Фиттинга теряет порядок b (эндоморфизмы известны до b^{N-1}),
    поэтому расщепление идет на модуле, продолженном на headroom * (rank - 1) порядков,
    а слагаемые и свидетель возвращаются на исходной точности.
    """
    progress = option('decomposition', 'progress', progress)
    extra = option('decomposition', 'headroom', headroom) * max(E.rank - 1, 0)
    working = E.extend(E.precision + extra) if extra else E
    frontier = [_Piece(working, BMatrix.identity(E.rank, working.precision))]
    leaves: List[_Piece] = []
    with tqdm(total=E.rank, desc="krull-schmidt", disable=not progress) as bar, \
            ThreadPoolExecutor(max_workers=max(threads, 1)) as pool:
        while frontier:
            try:
                results = list(pool.map(lambda p: _split_piece(p, trials, seed), frontier))
            except Inconclusive as e:
                partial = DecompositionReport([], [p.module for p in leaves + frontier], None, False,
                                              E.precision, [str(e)])
                raise Inconclusive(str(e), partial)
            frontier = []
            for pieces in results:
                for piece in pieces:
                    if piece.local:
                        leaves.append(piece)
                        bar.update(piece.module.rank)
                    else:
                        frontier.append(piece)

    precision = min([p.module.precision for p in leaves] + [E.precision])
    modules = [p.module.truncate(precision) for p in leaves]
    groups: List[List[int]] = []
    certified = True
    notes = [] if precision == E.precision else [f"точность упала до {precision}"]
    for idx, M in enumerate(modules):
        for group in groups:
            verdict = are_isomorphic(modules[group[0]], M, seed=seed)
            if verdict.verdict == "yes":
                group.append(idx)
                break
            if verdict.verdict == "inconclusive":
                certified = False
                notes.append(f"изоморфизм листьев {group[0]} и {idx} не определен")
        else:
            groups.append([idx])

    # листья одного класса идут подряд, в порядке блоков свидетеля
    order = [idx for group in groups for idx in group]
    witness = None
    if modules:
        block = direct_sum_many([modules[idx] for idx in order])
        T = BMatrix.hstack([leaves[idx].basis for idx in order]).truncate(precision)
        witness = ABMorphism(block, E.truncate(precision), T)
    factors = [(modules[group[0]], len(group)) for group in groups]
    modules = [modules[idx] for idx in order]
    logger.info(f"✅ krull_schmidt({E.name}): ранги {[M.rank for M, _ in factors]}, "
                f"кратности {[m for _, m in factors]}")
    return DecompositionReport(factors, modules, witness, certified, precision, notes)
