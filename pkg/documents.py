#!/usr/bin/env python3
"""
JSON-документы ("format": 1) для модулей, морфизмов, форм, семейств спариваний и отчетов.
Ряд хранится как {"coeffs": ["1/2", "3+1/2*i"], "precision": N}; скаляры - в текстовой форме Q(i).
"""

import json
import logging
from pathlib import Path
from typing import Annotated, Any, Dict, List, Literal, Optional, Tuple, Union

from pydantic import BaseModel, Field, TypeAdapter, ValidationError, model_validator

from abmodule import ABModule
from errors import FormatError, ParseError
from forms import SesquilinearForm
from homsolver import ABMorphism
from saito import PairingFamily
from series import BMatrix, BSeries, ZERO, format_scalar, parse_scalar

logger = logging.getLogger(__name__)


class SeriesModel(BaseModel):
    coeffs: List[str] = Field(default_factory=list, description="Коэффициенты при b^0, b^1, ...")
    precision: int = Field(..., ge=0, description="Ряд известен по модулю b^precision")

    @model_validator(mode="after")
    def check_length(self) -> 'SeriesModel':
        if len(self.coeffs) > self.precision:
            raise ValueError(f"{len(self.coeffs)} коэффициентов при точности {self.precision}")
        return self


Rows = List[List[SeriesModel]]


class ModuleDocument(BaseModel):
    format: Literal[1] = 1
    object: Literal["module"] = "module"
    name: str = Field("", description="Имя модуля")
    rank: int = Field(..., ge=0, description="Ранг над C[[b]]")
    precision: int = Field(..., ge=0, description="Точность N")
    labels: List[str] = Field(default_factory=list, description="Имена базисных векторов")
    a_matrix: Rows = Field(default_factory=list, description="A(b): столбец j - координаты a e_j")

    @model_validator(mode="after")
    def check_shape(self) -> 'ModuleDocument':
        if len(self.a_matrix) != self.rank or any(len(row) != self.rank for row in self.a_matrix):
            raise ValueError(f"a_matrix должна быть {self.rank}x{self.rank}")
        if self.labels and len(self.labels) != self.rank:
            raise ValueError(f"{len(self.labels)} меток для ранга {self.rank}")
        return self


class MorphismDocument(BaseModel):
    format: Literal[1] = 1
    object: Literal["morphism"] = "morphism"
    domain: ModuleDocument
    codomain: ModuleDocument
    matrix: Rows = Field(..., description="n_F x n_E, столбец j - образ e_j")


class FormDocument(BaseModel):
    format: Literal[1] = 1
    object: Literal["form"] = "form"
    module: ModuleDocument
    pairing: Rows = Field(..., description="P_ij = H(e_i, ~e_j)")
    kind: Optional[str] = Field(None, description="hermitian / antihermitian / both / neither")


class OverrideModel(BaseModel):
    key: Tuple[int, int, int, int, int] = Field(..., description="(k, p, i, q, j)")
    value: str


class FamilyDocument(BaseModel):
    format: Literal[1] = 1
    object: Literal["family"] = "family"
    delta: str
    normalization: str = "1"
    S: Rows = Field(..., description="S(b) = D(-b)")
    overrides: List[OverrideModel] = Field(default_factory=list)
    module: Optional[ModuleDocument] = None


class ReportDocument(BaseModel):
    format: Literal[1] = 1
    object: Literal["report"] = "report"
    command: str
    verdict: str
    certified: bool = True
    precision: Optional[int] = None
    elapsed: float = Field(0.0, description="Время выполнения, с")
    result: Dict[str, Any] = Field(default_factory=dict)


Document = Annotated[
    Union[ModuleDocument, MorphismDocument, FormDocument, FamilyDocument, ReportDocument],
    Field(discriminator="object"),
]
_adapter = TypeAdapter(Document)


# ------------------------------------------------------------ ряды и матрицы

def series_to_model(s: BSeries) -> SeriesModel:
    coeffs = list(s.coeffs)
    while coeffs and coeffs[-1] == ZERO:
        coeffs.pop()
    return SeriesModel(coeffs=[format_scalar(c) for c in coeffs], precision=s.precision)


def series_from_model(model: SeriesModel) -> BSeries:
    return BSeries(tuple(parse_scalar(c) for c in model.coeffs), model.precision)


def matrix_to_rows(M: BMatrix) -> Rows:
    return [[series_to_model(s) for s in row] for row in M.table()]


def matrix_from_rows(rows: Rows, nrows: int, ncols: int, precision: int) -> BMatrix:
    if len(rows) != nrows or any(len(row) != ncols for row in rows):
        raise FormatError(f"ожидалась матрица {nrows}x{ncols}")
    table = [[series_from_model(s) for s in row] for row in rows]
    # матрица известна не точнее самого грубого элемента
    precision = min([precision] + [s.precision for row in table for s in row])
    return BMatrix.from_entries(table, nrows, ncols, precision)


# ------------------------------------------------------------ объекты

def module_to_document(E: ABModule) -> ModuleDocument:
    return ModuleDocument(name=E.name, rank=E.rank, precision=E.precision,
                          labels=list(E.labels), a_matrix=matrix_to_rows(E.a_matrix))


def module_from_document(doc: ModuleDocument) -> ABModule:
    A = matrix_from_rows(doc.a_matrix, doc.rank, doc.rank, doc.precision)
    return ABModule(A, tuple(doc.labels), doc.name)


def morphism_to_document(f: ABMorphism) -> MorphismDocument:
    return MorphismDocument(domain=module_to_document(f.domain), codomain=module_to_document(f.codomain),
                            matrix=matrix_to_rows(f.matrix))


def morphism_from_document(doc: MorphismDocument) -> ABMorphism:
    E = module_from_document(doc.domain)
    F = module_from_document(doc.codomain)
    return ABMorphism(E, F, matrix_from_rows(doc.matrix, F.rank, E.rank, min(E.precision, F.precision)))


def form_to_document(H: SesquilinearForm, kind: Optional[str] = None) -> FormDocument:
    return FormDocument(module=module_to_document(H.module), pairing=matrix_to_rows(H.pairing), kind=kind)


def form_from_document(doc: FormDocument) -> SesquilinearForm:
    E = module_from_document(doc.module)
    return SesquilinearForm(E, matrix_from_rows(doc.pairing, E.rank, E.rank, E.precision))


def family_to_document(family: PairingFamily) -> FamilyDocument:
    overrides = [OverrideModel(key=key, value=format_scalar(value)) for key, value in sorted(family.overrides.items())]
    return FamilyDocument(
        delta=format_scalar(family.delta),
        normalization=format_scalar(family.normalization),
        S=matrix_to_rows(family.S),
        overrides=overrides,
        module=module_to_document(family.module) if family.module is not None else None,
    )


def family_from_document(doc: FamilyDocument) -> PairingFamily:
    rank = len(doc.S)
    precision = min((s.precision for row in doc.S for s in row), default=0)
    module = module_from_document(doc.module) if doc.module is not None else None
    if module is not None:
        precision = module.precision
    S = matrix_from_rows(doc.S, rank, rank, precision)
    overrides = {tuple(o.key): parse_scalar(o.value) for o in doc.overrides}
    normalization = parse_scalar(doc.normalization)
    if normalization == ZERO:
        raise FormatError("нормировка должна быть ненулевой")
    return PairingFamily(parse_scalar(doc.delta), normalization, S, overrides, module)


def report_document(command: str, verdict: str, result: Dict[str, Any], certified: bool = True,
                    precision: Optional[int] = None, elapsed: float = 0.0) -> ReportDocument:
    return ReportDocument(command=command, verdict=verdict, certified=certified, precision=precision,
                          elapsed=round(elapsed, 3), result=result)


# ------------------------------------------------------------ ввод/вывод

def dump_document(doc: BaseModel) -> str:
    return doc.model_dump_json(indent=2)


def load_document(text: str) -> Union[ModuleDocument, MorphismDocument, FormDocument, FamilyDocument, ReportDocument]:
    """Разбор JSON; документ модуля допускается без поля "object" """
    try:
        data = json.loads(text)
    except json.JSONDecodeError as e:
        raise FormatError(f"неверный JSON: {e}") from e
    if isinstance(data, dict) and "object" not in data and "a_matrix" in data:
        data["object"] = "module"
    try:
        doc = _adapter.validate_python(data)
    except ValidationError as e:
        raise FormatError(f"документ не прошел проверку: {e.error_count()} ошибок\n{e}") from e
    logger.debug(f"загружен документ {doc.object}")
    return doc


def convert(doc: BaseModel) -> Any:
    """Документ -> объект библиотеки (отчет возвращается как есть)"""
    try:
        if isinstance(doc, ModuleDocument):
            return module_from_document(doc)
        if isinstance(doc, MorphismDocument):
            return morphism_from_document(doc)
        if isinstance(doc, FormDocument):
            return form_from_document(doc)
        if isinstance(doc, FamilyDocument):
            return family_from_document(doc)
    except ParseError as e:
        raise FormatError(f"неверный скаляр в документе: {e}") from e
    return doc


def read_document(path: Union[str, Path]) -> Any:
    return convert(load_document(Path(path).read_text(encoding='utf-8')))
