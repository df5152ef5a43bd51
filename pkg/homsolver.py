#!/usr/bin/env python3
"""
Пространства (a,b)-морфизмов.

Морфизм E -> F задается матрицей M (n_F x n_E), для которой
    B M + b^2 M' = M A,
по порядкам b^m:
    sum_{p<=m} [B_p M_{m-p} - M_{m-p} A_p] + (m-1) M_{m-1} = 0.
Все порядки собираются в одну точную линейную систему над Q(i); система
решается с запасом порядков (lookahead), а ядро проецируется на M_0..M_{N-2}.
"""

import itertools
import logging
import random
from collections import defaultdict
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Sequence, Tuple

import sympy

from abmodule import (
    ABModule, Element, a_apply, adjoint, base_change, direct_sum, elementary, tensor,
    _require_same_precision,
)
from configuration import option
from errors import DimensionMismatch, NotInvertible
from series import (
    BMatrix, ONE, ZERO, Scalar, constant_matrix, determinant, entries, eye, gaussian_roots,
    integer_value, is_zero_matrix, kernel_rows, matmul, row_basis, scalar, to_sympy, zeros,
)
from sympy.polys.domains import QQ_I
from sympy.polys.matrices import DomainMatrix

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class ABMorphism:
    """Морфизм domain -> codomain с матрицей n_F x n_E"""
    domain: ABModule
    codomain: ABModule
    matrix: BMatrix

    def __post_init__(self):
        if self.matrix.shape != (self.codomain.rank, self.domain.rank):
            raise DimensionMismatch(
                f"матрица {self.matrix.shape} для {self.domain.rank} -> {self.codomain.rank}")

    @property
    def precision(self) -> int:
        return self.matrix.precision

    def __call__(self, x: Element) -> Element:
        return Element(self.codomain, self.matrix @ x.coords)

    def __add__(self, other: 'ABMorphism') -> 'ABMorphism':
        return ABMorphism(self.domain, self.codomain, self.matrix + other.matrix)

    def __sub__(self, other: 'ABMorphism') -> 'ABMorphism':
        return ABMorphism(self.domain, self.codomain, self.matrix - other.matrix)

    def scale(self, value: Any) -> 'ABMorphism':
        return ABMorphism(self.domain, self.codomain, self.matrix.scale(value))

    def intertwining_defect(self) -> BMatrix:
        """B M + b^2 M' - M A"""
        M = self.matrix
        return self.codomain.a_matrix @ M + M.derivative().shift(2) - M @ self.domain.a_matrix

    def check_intertwining(self) -> bool:
        return self.intertwining_defect().is_zero()

    def is_zero(self) -> bool:
        return self.matrix.is_zero()

    def power(self, k: int) -> 'ABMorphism':
        if not self.is_endomorphism():
            raise DimensionMismatch("степень определена только для эндоморфизмов")
        return ABMorphism(self.domain, self.codomain, self.matrix.power(k))

    def is_endomorphism(self) -> bool:
        return self.domain.same_presentation(self.codomain)

    def truncate(self, precision: int) -> 'ABMorphism':
        return ABMorphism(self.domain, self.codomain, self.matrix.truncate(precision))


@dataclass
class HomBasis:
    morphisms: List[ABMorphism]
    dim: int
    stable: bool
    precision: int
    resonance_bound: Optional[int] = None

    def combination(self, coefficients: Sequence[Scalar]) -> ABMorphism:
        if not self.morphisms:
            raise ValueError("пустой базис")
        result = self.morphisms[0].scale(coefficients[0])
        for c, f in zip(coefficients[1:], self.morphisms[1:]):
            result = result + f.scale(c)
        return result

    def random_element(self, rng: random.Random, spread: int = 3) -> ABMorphism:
        """Случайная целочисленная комбинация базиса"""
        return self.combination([scalar(rng.randint(-spread, spread)) for _ in self.morphisms])


def identity_morphism(E: ABModule) -> ABMorphism:
    return ABMorphism(E, E, BMatrix.constant(eye(E.rank), E.precision))


def zero_morphism(E: ABModule, F: ABModule) -> ABMorphism:
    return ABMorphism(E, F, BMatrix.zeros(F.rank, E.rank, min(E.precision, F.precision)))


# ------------------------------------------------------------ решатель

def _nilpotency_index(M: DomainMatrix) -> int:
    """Наименьшее k с M^k = 0 (ранг, если матрица не нильпотентна)"""
    n = M.shape[0]
    power = eye(n)
    for k in range(1, n + 1):
        power = matmul(power, M)
        if is_zero_matrix(power):
            return k
    return n


def _eigenvalues(M: DomainMatrix) -> Optional[List[Scalar]]:
    if M.shape[0] == 0:
        return []
    roots, rational = gaussian_roots(M.to_dense().charpoly())
    return [r for r, _ in roots] if rational else None


def resonance_bound(E: ABModule, F: ABModule) -> Optional[int]:
    """
    2 + наибольшее целое k >= 0 вида alpha - beta (alpha из спектра A_1, beta из спектра B_1):
    на таком порядке M_k не определяется младшими
    (только для A(0) = B(0) = 0 и корней в Q(i)); иначе None.
    """
    if E.precision < 2 or F.precision < 2:
        return None
    A0, B0 = E.a_matrix.constant_term(), F.a_matrix.constant_term()
    if not (is_zero_matrix(A0) and is_zero_matrix(B0)):
        return None
    alphas = _eigenvalues(E.a_matrix.coefficients[1])
    betas = _eigenvalues(F.a_matrix.coefficients[1])
    if alphas is None or betas is None:
        return None
    gaps = [integer_value(alpha - beta) for beta in betas for alpha in alphas]
    gaps = [g for g in gaps if g is not None and g >= 0]
    return 2 + max(gaps, default=0)


def solve_hom(E: ABModule, F: ABModule, lookahead: Optional[int] = None) -> HomBasis:
    """Базис Hom(E, F) по модулю b^{N-1}"""
    N = _require_same_precision(E, F)
    nE, nF = E.rank, F.rank
    top = N - 2
    bound = resonance_bound(E, F)
    if top < 0 or nE == 0 or nF == 0:
        return HomBasis([], 0, True, max(N - 1, 0), bound)

    extra = option('solver', 'lookahead', lookahead)
    extra += _nilpotency_index(E.a_matrix.constant_term()) + _nilpotency_index(F.a_matrix.constant_term())
    last = top + extra
    block = nF * nE

    A = [entries(C) for C in E.a_matrix.coefficients]
    B = [entries(C) for C in F.a_matrix.coefficients]

    def var(k: int, i: int, j: int) -> int:
        return k * block + i * nE + j

    equations: Dict[int, Dict[int, Scalar]] = {}
    row = 0
    for m in range(last + 1):
        for i in range(nF):
            for j in range(nE):
                eq: Dict[int, Scalar] = defaultdict(lambda: ZERO)
                for p in range(min(m, N - 1) + 1):
                    k = m - p
                    Bp, Ap = B[p], A[p]
                    for l in range(nF):
                        if Bp[i][l] != ZERO:
                            eq[var(k, l, j)] += Bp[i][l]
                    for l in range(nE):
                        if Ap[l][j] != ZERO:
                            eq[var(k, i, l)] -= Ap[l][j]
                if m >= 2:
                    eq[var(m - 1, i, j)] += QQ_I.convert(m - 1)
                eq = {c: v for c, v in eq.items() if v != ZERO}
                if eq:
                    equations[row] = eq
                    row += 1

    unknowns = (last + 1) * block
    kernel = kernel_rows(equations, row, unknowns)
    logger.debug(f"solve_hom {nE}->{nF}: уравнений {row}, неизвестных {unknowns}, ядро {len(kernel)}")

    window = (top + 1) * block
    projected = row_basis([v[:window] for v in kernel], window)
    lower = row_basis([v[:top * block] for v in kernel], top * block) if top > 0 else []
    stable = len(lower) == len(projected) and (bound is None or N > bound)

    morphisms = []
    for v in projected:
        coeffs = [DomainMatrix([v[k * block + i * nE: k * block + (i + 1) * nE] for i in range(nF)],
                               (nF, nE), QQ_I) for k in range(top + 1)]
        morphisms.append(ABMorphism(E, F, BMatrix(nF, nE, top + 1, tuple(coeffs))))
    if not stable:
        logger.warning(f"⚠️ Hom({E.name}, {F.name}): размерность {len(morphisms)} не подтверждена на точности {N}")
    return HomBasis(morphisms, len(morphisms), stable, top + 1, bound)


# ------------------------------------------------------------ операции

def compose(g: ABMorphism, f: ABMorphism) -> ABMorphism:
    """g o f"""
    if g.domain.rank != f.codomain.rank or not g.domain.same_presentation(f.codomain):
        raise DimensionMismatch("domain(g) != codomain(f)")
    return ABMorphism(f.domain, g.codomain, g.matrix @ f.matrix)


@dataclass
class Invertibility:
    invertible: bool
    inverse: Optional[ABMorphism] = None

    def __bool__(self) -> bool:
        return self.invertible


def is_invertible(f: ABMorphism) -> Invertibility:
    """det M(0) != 0; тогда возвращается и обратный морфизм"""
    if f.matrix.rows != f.matrix.cols:
        return Invertibility(False)
    if f.matrix.precision == 0 or determinant(f.matrix.constant_term()) == ZERO:
        return Invertibility(False)
    return Invertibility(True, ABMorphism(f.codomain, f.domain, f.matrix.inverse()))


def inverse_morphism(f: ABMorphism) -> ABMorphism:
    result = is_invertible(f)
    if not result:
        raise NotInvertible("морфизм необратим")
    return result.inverse


def adjoint_of_morphism(f: ABMorphism) -> ABMorphism:
    """adjoint(F) -> adjoint(E) с матрицей M(-b)^T"""
    return ABMorphism(adjoint(f.codomain), adjoint(f.domain), f.matrix.conjugate().transpose())


def tensor_morphism(f: ABMorphism, g: ABMorphism) -> ABMorphism:
    return ABMorphism(tensor(f.domain, g.domain), tensor(f.codomain, g.codomain), f.matrix.kron(g.matrix))


def base_change_isomorphism(E: ABModule, T: BMatrix) -> Tuple[ABModule, ABMorphism]:
    """Новый модуль и изоморфизм нового модуля в E"""
    new_module, T = base_change(E, T)
    return new_module, ABMorphism(new_module, E, T)


def verify_by_evaluation(f: ABMorphism) -> bool:
    """phi(a e_j) = a phi(e_j) для всех базисных e_j, через a_apply"""
    for j in range(f.domain.rank):
        e = f.domain.basis_element(j)
        lhs = f(a_apply(f.domain, e))
        rhs = a_apply(f.codomain, f(e))
        if not lhs.equals(rhs):
            logger.warning(f"⚠️ проверка вычислением не прошла на базисном векторе {j}")
            return False
    return True


# -------------------------------------------- канонические изоморфизмы

def _permutation(rows: int, cols: int, pairs: Sequence[Tuple[int, int]], precision: int) -> BMatrix:
    table = [[0] * cols for _ in range(rows)]
    for r, c in pairs:
        table[r][c] = 1
    return BMatrix.constant(constant_matrix(table, rows, cols), precision)


def swap_morphism(E: ABModule, F: ABModule) -> ABMorphism:
    """E (x) F -> F (x) E, e_i (x) f_j -> f_j (x) e_i"""
    nE, nF = E.rank, F.rank
    pairs = [(j * nE + i, i * nF + j) for i in range(nE) for j in range(nF)]
    return ABMorphism(tensor(E, F), tensor(F, E), _permutation(nE * nF, nE * nF, pairs, E.precision))


def associator(E: ABModule, F: ABModule, G: ABModule) -> ABMorphism:
    """(E (x) F) (x) G -> E (x) (F (x) G); в построчном базисе индексы совпадают"""
    source = tensor(tensor(E, F), G)
    return ABMorphism(source, tensor(E, tensor(F, G)), BMatrix.constant(eye(source.rank), E.precision))


def unit_morphism(E: ABModule) -> ABMorphism:
    """E -> E (x) E_0, v -> v (x) e_0"""
    return ABMorphism(E, tensor(E, elementary(0, E.precision)), BMatrix.constant(eye(E.rank), E.precision))


def sum_injection(E: ABModule, F: ABModule, index: int) -> ABMorphism:
    S = direct_sum(E, F)
    part = E if index == 0 else F
    offset = 0 if index == 0 else E.rank
    return ABMorphism(part, S, _permutation(S.rank, part.rank,
                                            [(offset + k, k) for k in range(part.rank)], E.precision))


def sum_projection(E: ABModule, F: ABModule, index: int) -> ABMorphism:
    S = direct_sum(E, F)
    part = E if index == 0 else F
    offset = 0 if index == 0 else E.rank
    return ABMorphism(S, part, _permutation(part.rank, S.rank,
                                            [(k, offset + k) for k in range(part.rank)], E.precision))


# ------------------------------------------------------ изоморфизмы

@dataclass
class CombinationSearch:
    """Поиск обратимой линейной комбинации постоянных членов"""
    verdict: str  # yes / no / inconclusive
    coefficients: Optional[List[Scalar]] = None
    method: str = "exact"
    failure_bound: float = 0.0


def invertible_combination(constants: Sequence[DomainMatrix], trials: Optional[int] = None,
                           seed: Optional[int] = None) -> CombinationSearch:
    """
    Есть ли t с det(sum t_k C_k) != 0. При малой размерности - точный
    символьный определитель, иначе случайные точки из большого куба
    (оценка вероятности ошибки (n/box)^trials).
    """
    d = len(constants)
    if d == 0:
        return CombinationSearch("no")
    n = constants[0].shape[0]
    if n == 0:
        return CombinationSearch("yes", [ONE] + [ZERO] * (d - 1))

    for k, C in enumerate(constants):
        if determinant(C) != ZERO:
            return CombinationSearch("yes", [ONE if i == k else ZERO for i in range(d)])

    def combine(coeffs: Sequence[Scalar]) -> DomainMatrix:
        acc = zeros(n, n)
        for c, C in zip(coeffs, constants):
            if c != ZERO:
                acc = acc + C * c
        return acc

    if d <= option('isomorphism', 'exact_limit'):
        symbols = sympy.symbols(f"t0:{d}")
        data = [entries(C) for C in constants]
        generic = sympy.Matrix(n, n, lambda i, j: sum(symbols[k] * to_sympy(data[k][i][j]) for k in range(d)))
        det = sympy.expand(generic.det(method='berkowitz'))
        if det == 0:
            return CombinationSearch("no", method="exact")
        for point in itertools.product(range(n + 1), repeat=d):
            if det.subs(dict(zip(symbols, point))) != 0:
                return CombinationSearch("yes", [scalar(v) for v in point], method="exact")
        return CombinationSearch("inconclusive", method="exact")

    trials = option('isomorphism', 'trials', trials)
    box = option('isomorphism', 'box')
    rng = random.Random(option('random', 'seed', seed))
    for _ in range(trials):
        coeffs = [scalar(rng.randint(1, box)) for _ in range(d)]
        if determinant(combine(coeffs)) != ZERO:
            return CombinationSearch("yes", coeffs, method="random")
    bound = (n / box) ** trials
    verdict = "no" if bound <= option('isomorphism', 'max_failure') else "inconclusive"
    return CombinationSearch(verdict, method="random", failure_bound=bound)


@dataclass
class IsomorphismVerdict:
    verdict: str  # yes / no / inconclusive
    witness: Optional[ABMorphism] = None
    inverse: Optional[ABMorphism] = None
    hom_dim: int = 0
    stable: bool = True
    method: str = "exact"
    failure_bound: float = 0.0

    @property
    def isomorphic(self) -> bool:
        return self.verdict == "yes"


def are_isomorphic(E: ABModule, F: ABModule, trials: Optional[int] = None,
                   seed: Optional[int] = None) -> IsomorphismVerdict:
    if E.rank != F.rank:
        return IsomorphismVerdict("no")
    if E.rank == 0:
        return IsomorphismVerdict("yes", zero_morphism(E, F), zero_morphism(F, E))
    basis = solve_hom(E, F)
    search = invertible_combination([f.matrix.constant_term() for f in basis.morphisms], trials, seed)
    result = IsomorphismVerdict(search.verdict, hom_dim=basis.dim, stable=basis.stable,
                                method=search.method, failure_bound=search.failure_bound)
    if search.verdict == "yes":
        result.witness = basis.combination(search.coefficients)
        result.inverse = inverse_morphism(result.witness)
    logger.debug(f"are_isomorphic({E.name}, {F.name}) -> {search.verdict} (dim Hom {basis.dim})")
    return result


def check_composition_lemma(alpha: ABMorphism, beta: ABMorphism) -> Dict[str, bool]:
    """
    alpha: E -> F, beta: F -> E. Если beta o alpha обратим, то
    e = alpha (beta alpha)^{-1} beta - идемпотент F с образом alpha(E);
    для неразложимого F он равен Id, и alpha - изоморфизм.
    """
    composite = compose(beta, alpha)
    inv = is_invertible(composite)
    report = {"composition_invertible": inv.invertible, "alpha_invertible": False,
              "projector_is_identity": False}
    if not inv:
        return report
    projector = compose(alpha, compose(inv.inverse, beta))
    report["projector_is_identity"] = projector.matrix.equals(BMatrix.identity(alpha.codomain.rank,
                                                                               projector.precision))
    report["alpha_invertible"] = is_invertible(alpha).invertible
    return report
