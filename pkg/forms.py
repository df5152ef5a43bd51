#!/usr/bin/env python3
"""
Полуторалинейные, эрмитовы и антиэрмитовы формы на (a,b)-модулях.

Форма H на E задается матрицей спаривания P: P_ij = H(e_i, ~e_j) - коэффициент
при e_0 значения на паре (базис E, базис сопряженного модуля). Соглашения:
    совместимость с a:   b^2 P' = A^T P - P A(-b)
    морфизм E -> adjoint(E) (curry):  матрица P^T
    эрмитова:      P(b) = P(-b)^T
    антиэрмитова:  P(b) = -P(-b)^T
"""

import logging
from dataclasses import dataclass, field
from typing import List, Optional, Tuple

from abmodule import ABModule, Element, a_apply, adjoint, conjugate, direct_sum, elementary
from errors import Inconclusive, NotCompatible, NotSelfAdjoint, WrongCodomain
from homsolver import (
    ABMorphism, are_isomorphic, invertible_combination, solve_hom,
)
from structure import krull_schmidt
from series import (
    BMatrix, BSeries, ZERO, determinant, row_basis, vectorize,
)
from sympy.polys.matrices import DomainMatrix
from sympy.polys.domains import QQ_I

logger = logging.getLogger(__name__)

HERMITIAN = "hermitian"
ANTIHERMITIAN = "antihermitian"
BOTH = "both"
NEITHER = "neither"


@dataclass(frozen=True, eq=False)
class SesquilinearForm:
    module: ABModule
    pairing: BMatrix

    @property
    def precision(self) -> int:
        return self.pairing.precision

    def involution(self) -> BMatrix:
        """P(-b)^T"""
        return self.pairing.conjugate().transpose()


@dataclass
class FormVerdict:
    kind: str
    hermitian: Optional[SesquilinearForm] = None
    antihermitian: Optional[SesquilinearForm] = None
    hom_dim: int = 0

    @property
    def witnesses(self) -> List[SesquilinearForm]:
        return [w for w in (self.hermitian, self.antihermitian) if w is not None]


def compatibility_defect(H: SesquilinearForm) -> BMatrix:
    """b^2 P' - A^T P + P A(-b)"""
    A, P = H.module.a_matrix, H.pairing
    return P.derivative().shift(2) - A.transpose() @ P + P @ A.conjugate()


def check_compatibility(H: SesquilinearForm) -> bool:
    return compatibility_defect(H).is_zero()


def evaluate_form(H: SesquilinearForm, x: Element, y: Element) -> BSeries:
    """H(x, y) = s^T P t; x в E, y в сопряженном модуле"""
    value = x.coords.transpose() @ H.pairing @ y.coords
    return value.entry(0, 0)


def check_by_evaluation(H: SesquilinearForm) -> bool:
    """a H(x, y) = H(ax, y) + H(x, ay) на всех базисных парах через a_apply"""
    E = H.module
    dual_side = conjugate(E)
    unit = elementary(0, H.precision)
    for i in range(E.rank):
        x = E.basis_element(i)
        for j in range(E.rank):
            y = dual_side.basis_element(j)
            value = H.pairing.entry(i, j)
            lhs = a_apply(unit, unit.element([value])).coordinates()[0]
            rhs = evaluate_form(H, a_apply(E, x), y) + evaluate_form(H, x, a_apply(dual_side, y))
            if not lhs.equals(rhs):
                return False
    return True


def curry(H: SesquilinearForm) -> ABMorphism:
    """Морфизм E -> adjoint(E), v -> H(v, .)"""
    if not check_compatibility(H):
        raise NotCompatible("матрица спаривания не совместима с действием a")
    return ABMorphism(H.module, adjoint(H.module), H.pairing.transpose())


def uncurry(f: ABMorphism) -> SesquilinearForm:
    if not f.codomain.same_presentation(adjoint(f.domain)):
        raise WrongCodomain("кодомен морфизма не равен adjoint(domain)")
    return SesquilinearForm(f.domain, f.matrix.transpose())


def is_nondegenerate(H: SesquilinearForm) -> bool:
    return H.precision > 0 and determinant(H.pairing.constant_term()) != ZERO


def hermitian_type(H: SesquilinearForm) -> str:
    """Нулевая форма считается эрмитовой"""
    involuted = H.involution()
    if H.pairing.equals(involuted):
        return HERMITIAN
    if H.pairing.equals(-involuted):
        return ANTIHERMITIAN
    return NEITHER


def hermitian_part(H: SesquilinearForm) -> SesquilinearForm:
    return SesquilinearForm(H.module, (H.pairing + H.involution()).scale("1/2"))


def antihermitian_part(H: SesquilinearForm) -> SesquilinearForm:
    return SesquilinearForm(H.module, (H.pairing - H.involution()).scale("1/2"))


def _span(E: ABModule, pairings: List[BMatrix]) -> List[SesquilinearForm]:
    """Канонический базис линейной оболочки матриц спаривания"""
    if not pairings:
        return []
    n, P = E.rank, pairings[0].precision
    block = n * n
    vectors = [[v for C in M.coefficients for v in vectorize(C)] for M in pairings]
    result = []
    for row in row_basis(vectors, block * P):
        coeffs = tuple(DomainMatrix([row[k * block + i * n: k * block + (i + 1) * n] for i in range(n)],
                                    (n, n), QQ_I) for k in range(P))
        result.append(SesquilinearForm(E, BMatrix(n, n, P, coeffs)))
    return result


def _nondegenerate_member(forms: List[SesquilinearForm], trials: Optional[int],
                          seed: Optional[int]) -> Tuple[Optional[SesquilinearForm], str]:
    search = invertible_combination([H.pairing.constant_term() for H in forms], trials, seed)
    if search.verdict != "yes":
        return None, search.verdict
    pairing = forms[0].pairing.scale(search.coefficients[0])
    for c, H in zip(search.coefficients[1:], forms[1:]):
        pairing = pairing + H.pairing.scale(c)
    return SesquilinearForm(forms[0].module, pairing), "yes"


def sesquilinear_forms(E: ABModule) -> List[SesquilinearForm]:
    """Базис совместимых форм: uncurry базиса Hom(E, adjoint(E))"""
    return [uncurry(f) for f in solve_hom(E, adjoint(E)).morphisms]


def hermitianize(E: ABModule, trials: Optional[int] = None, seed: Optional[int] = None) -> FormVerdict:
    """
    Есть ли на E невырожденная эрмитова и/или антиэрмитова форма.
    Инволюция P -> P(-b)^T сохраняет пространство совместимых форм, поэтому
    эрмитовы (антиэрмитовы) формы - образы проекторов (P +- P(-b)^T)/2.
    """
    forms = sesquilinear_forms(E)
    witness, verdict = _nondegenerate_member(forms, trials, seed) if forms else (None, "no")
    if verdict == "inconclusive":
        raise Inconclusive(f"не удалось решить, самосопряжен ли {E.name}")
    if witness is None:
        raise NotSelfAdjoint(f"{E.name} не имеет невырожденной полуторалинейной формы")

    plus = _span(E, [hermitian_part(H).pairing for H in forms])
    minus = _span(E, [antihermitian_part(H).pairing for H in forms])
    hermitian, _ = _nondegenerate_member(plus, trials, seed) if plus else (None, "no")
    antihermitian, _ = _nondegenerate_member(minus, trials, seed) if minus else (None, "no")

    if hermitian and antihermitian:
        kind = BOTH
    elif hermitian:
        kind = HERMITIAN
    elif antihermitian:
        kind = ANTIHERMITIAN
    else:
        kind = NEITHER
    logger.info(f"hermitianize({E.name}): {kind} (форм {len(forms)}, "
                f"эрмитовых {len(plus)}, антиэрмитовых {len(minus)})")
    return FormVerdict(kind, hermitian, antihermitian, len(forms))


def hyperbolic_form(G: ABModule) -> SesquilinearForm:
    """Эрмитова форма (x, y) -> (y, x) на G + adjoint(G)"""
    S = direct_sum(G, adjoint(G))
    n = G.rank
    swap = [[1 if abs(i - j) == n else 0 for j in range(2 * n)] for i in range(2 * n)]
    pairing = BMatrix.constant(DomainMatrix([[QQ_I.convert(v) for v in row] for row in swap],
                                            (2 * n, 2 * n), QQ_I), S.precision)
    return SesquilinearForm(S, pairing)


def form_sum(first: SesquilinearForm, second: SesquilinearForm) -> SesquilinearForm:
    """Ортогональная сумма форм на прямой сумме модулей"""
    return SesquilinearForm(direct_sum(first.module, second.module),
                            BMatrix.block_diagonal([first.pairing, second.pairing]))


def transport_form(H: SesquilinearForm, T: ABMorphism) -> SesquilinearForm:
    """
    Перенос формы по изоморфизму T: H.module -> E:
    P_E = T^{-T} P T(-b)^{-1}
    """
    T_inv = T.matrix.inverse()
    pairing = T_inv.transpose() @ H.pairing @ T_inv.conjugate()
    return SesquilinearForm(T.codomain, pairing)


# -------------------------------------------- самосопряженные модули

@dataclass
class SelfAdjointClassification:
    self_adjoint_factors: List[Tuple[ABModule, int, FormVerdict]] = field(default_factory=list)
    paired_factors: List[Tuple[ABModule, ABModule, int]] = field(default_factory=list)
    unmatched: List[ABModule] = field(default_factory=list)
    form: Optional[SesquilinearForm] = None
    certified: bool = True

    @property
    def self_adjoint(self) -> bool:
        return not self.unmatched


def classify_self_adjoint(E: ABModule, trials: Optional[int] = None,
                          seed: Optional[int] = None) -> SelfAdjointClassification:
    """
    Разложение Крулля-Шмидта, сопоставление классов слагаемых с классами
    сопряженно-двойственных, вердикт hermitianize на самосопряженных классах
    и сборка невырожденной формы на E из блоков.
    """
    report = krull_schmidt(E, trials, seed)
    leaves = report.leaves
    factors = [M for M, _ in report.factors]
    result = SelfAdjointClassification(certified=report.certified)

    # номера листьев каждого класса в порядке блоков свидетеля
    members: List[List[int]] = []
    offset = 0
    for _, multiplicity in report.factors:
        members.append(list(range(offset, offset + multiplicity)))
        offset += multiplicity

    partner: List[Optional[int]] = []
    for F in factors:
        adj = adjoint(F)
        match = None
        for j, G in enumerate(factors):
            verdict = are_isomorphic(G, adj, trials, seed)
            if verdict.verdict == "inconclusive":
                result.certified = False
            if verdict.isomorphic:
                match = j
                break
        partner.append(match)

    blocks: List[Tuple[int, int, BMatrix]] = []  # (лист, лист, блок P)
    for i, (F, multiplicity) in enumerate(report.factors):
        j = partner[i]
        if j is None or report.factors[j][1] != multiplicity:
            result.unmatched.append(F)
            continue
        if j == i:
            verdict = hermitianize(F, trials, seed)
            result.self_adjoint_factors.append((F, multiplicity, verdict))
            for leaf in members[i]:
                local = hermitianize(leaves[leaf], trials, seed)
                witness = local.hermitian or local.antihermitian
                blocks.append((leaf, leaf, witness.pairing))
        elif j > i:
            result.paired_factors.append((F, factors[j], multiplicity))
            for g, h in zip(members[i], members[j]):
                iso = are_isomorphic(leaves[h], adjoint(leaves[g]), trials, seed).witness
                # форма на G + G': блоки phi(-b) и phi^T
                blocks.append((g, h, iso.matrix.conjugate()))
                blocks.append((h, g, iso.matrix.transpose()))

    if result.self_adjoint and leaves and report.witness is not None:
        result.form = _assemble(report, blocks)
    logger.info(f"classify_self_adjoint({E.name}): самосопряженных классов {len(result.self_adjoint_factors)}, "
                f"пар {len(result.paired_factors)}, без пары {len(result.unmatched)}")
    return result


def _assemble(report, blocks: List[Tuple[int, int, BMatrix]]) -> Optional[SesquilinearForm]:
    witness = report.witness
    block_module = witness.domain
    n = block_module.rank
    precision = min((P.precision for _, _, P in blocks), default=block_module.precision)
    offsets = []
    offset = 0
    for leaf in report.leaves:
        offsets.append(offset)
        offset += leaf.rank
    table = [[BSeries.zero(precision) for _ in range(n)] for _ in range(n)]
    for row_leaf, col_leaf, P in blocks:
        r0, c0 = offsets[row_leaf], offsets[col_leaf]
        for i in range(P.rows):
            for j in range(P.cols):
                table[r0 + i][c0 + j] = P.entry(i, j).truncate(precision)
    pairing = BMatrix.from_entries(table, n, n, precision)
    H = SesquilinearForm(block_module, pairing)
    if not check_compatibility(H):
        logger.warning("⚠️ собранная форма не совместима с блочным представлением")
        return None
    return transport_form(H, witness)
