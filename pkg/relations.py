#!/usr/bin/env python3
"""
Язык соотношений (.ab): модуль задается строками вида

    # модуль ранга 4
    precision 12
    module rank4
    lambda = 1
    mu = 1/3
    a e1 = lambda*b*e1
    a e2 = mu*b*e2 + e1

Скаляры - гауссовы рациональные (i - мнимая единица), b зарезервирован,
коэффициенты - многочлены по b. Базис - явная строка `basis` или левые
части соотношений в порядке появления.
"""

import logging
import re
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Tuple

import sympy
from lark import Lark, Transformer
from lark.exceptions import UnexpectedInput, VisitError
from sympy.polys.domains import QQ_I
from sympy.polys.polyerrors import CoercionFailed, PolynomialError

from abmodule import ABModule, validate
from configuration import option
from errors import NonRationalCoefficient, ParseError, UndeclaredSymbol
from series import BMatrix, BSeries

logger = logging.getLogger(__name__)

GRAMMAR = r"""
    start: _NL? (statement (_NL statement)* _NL?)?

    statement: "precision" NUMBER      -> precision
             | "module" NAME           -> module_name
             | "basis" NAME+           -> basis
             | "a" NAME "=" expr       -> relation
             | NAME "=" expr           -> definition

    ?expr: term
         | expr "+" term               -> add
         | expr "-" term               -> sub
    ?term: factor
         | term "*" factor             -> mul
         | term "/" factor             -> div
    ?factor: power
           | "-" factor                -> neg
           | "+" factor
    ?power: atom
          | atom ("^" | "**") factor   -> pow
    ?atom: NUMBER                      -> number
         | NAME                        -> symbol
         | NAME "(" expr ")"           -> call
         | "(" expr ")"

    NAME: /[A-Za-z_][A-Za-z0-9_]*/
    NUMBER: /\d+(\.\d+)?/
    COMMENT: /#[^\n]*/
    _NL: /(\r?\n[\t ]*(#[^\n]*)?)+/

    %ignore /[\t ]+/
    %ignore COMMENT
"""

_parser = Lark(GRAMMAR, parser='lalr')

B = sympy.Symbol('b')
RESERVED = {"a", "b", "i", "pi", "precision", "module", "basis"}
_IDENTIFIER = re.compile(r'^[A-Za-z_][A-Za-z0-9_]*$')


@dataclass
class Statement:
    kind: str
    name: Optional[str]
    value: Any
    line: int
    column: int


@dataclass
class RelationScript:
    name: str = ""
    precision: Optional[int] = None
    basis: List[str] = field(default_factory=list)
    definitions: List[Statement] = field(default_factory=list)
    relations: List[Statement] = field(default_factory=list)
    positions: Dict[str, Tuple[int, int]] = field(default_factory=dict)


class ScriptTransformer(Transformer):
    """Дерево разбора -> выражения sympy и список операторов"""

    def __init__(self):
        super().__init__()
        self.positions: Dict[str, Tuple[int, int]] = {}

    def number(self, items):
        return sympy.Rational(str(items[0]))

    def symbol(self, items):
        token = items[0]
        name = str(token)
        if name == 'i':
            return sympy.I
        if name == 'pi':
            raise NonRationalCoefficient("pi не лежит в Q(i)", token.line, token.column)
        self.positions.setdefault(name, (token.line, token.column))
        return sympy.Symbol(name)

    def call(self, items):
        token = items[0]
        raise NonRationalCoefficient(f"функция {token}(...) не допускается", token.line, token.column)

    def add(self, items):
        return items[0] + items[1]

    def sub(self, items):
        return items[0] - items[1]

    def mul(self, items):
        return items[0] * items[1]

    def div(self, items):
        return items[0] / items[1]

    def neg(self, items):
        return -items[0]

    def pow(self, items):
        return items[0] ** items[1]

    def precision(self, items):
        token = items[0]
        if not str(token).isdigit():
            raise ParseError("точность должна быть целым числом", token.line, token.column)
        return Statement("precision", None, int(str(token)), token.line, token.column)

    def module_name(self, items):
        return Statement("module", str(items[0]), None, items[0].line, items[0].column)

    def basis(self, items):
        return Statement("basis", None, [str(t) for t in items], items[0].line, items[0].column)

    def relation(self, items):
        token = items[0]
        return Statement("relation", str(token), items[1], token.line, token.column)

    def definition(self, items):
        token = items[0]
        return Statement("definition", str(token), items[1], token.line, token.column)

    def start(self, items):
        return [item for item in items if isinstance(item, Statement)]


def parse_script(text: str) -> RelationScript:
    """Синтаксический разбор без вычисления матрицы"""
    try:
        tree = _parser.parse(text)
    except UnexpectedInput as e:
        message = str(e).strip().splitlines()[0] if str(e).strip() else type(e).__name__
        raise ParseError(f"неожиданный ввод: {message}",
                         max(getattr(e, 'line', 0), 0), max(getattr(e, 'column', 0), 0)) from e
    transformer = ScriptTransformer()
    try:
        statements = transformer.transform(tree)
    except VisitError as e:
        raise e.orig_exc

    script = RelationScript(positions=transformer.positions)
    for st in statements:
        if st.kind == "precision":
            script.precision = st.value
        elif st.kind == "module":
            script.name = st.name
        elif st.kind == "basis":
            script.basis.extend(st.value)
        elif st.kind == "definition":
            script.definitions.append(st)
        else:
            script.relations.append(st)
    return script


def _gaussian(value: sympy.Expr, st: Statement) -> Any:
    try:
        return QQ_I.from_sympy(sympy.expand(value))
    except (CoercionFailed, TypeError, ValueError):
        raise NonRationalCoefficient(f"коэффициент {value} не лежит в Q(i)", st.line, st.column)


def _undeclared(script: RelationScript, names, st: Statement) -> UndeclaredSymbol:
    name = sorted(names)[0]
    line, column = script.positions.get(name, (st.line, st.column))
    return UndeclaredSymbol(f"необъявленный символ {name}", line, column)


def build_module(script: RelationScript, precision: Optional[int] = None) -> ABModule:
    N = precision or script.precision or option('precision', 'default')

    scalars: Dict[sympy.Symbol, sympy.Expr] = {}
    for st in script.definitions:
        if st.name in RESERVED:
            raise ParseError(f"имя {st.name} зарезервировано", st.line, st.column)
        value = sympy.expand(st.value.subs(scalars))
        if value.free_symbols:
            raise _undeclared(script, {str(s) for s in value.free_symbols}, st)
        _gaussian(value, st)
        scalars[sympy.Symbol(st.name)] = value

    basis = list(script.basis) or list(dict.fromkeys(st.name for st in script.relations))
    for name in basis:
        if name in RESERVED:
            raise ParseError(f"имя базисного вектора {name} зарезервировано")
    symbols = [sympy.Symbol(name) for name in basis]
    index = {name: k for k, name in enumerate(basis)}
    n = len(basis)

    columns: Dict[int, Statement] = {}
    for st in script.relations:
        if st.name not in index:
            raise UndeclaredSymbol(f"{st.name} не объявлен в basis", st.line, st.column)
        if index[st.name] in columns:
            raise ParseError(f"повторное соотношение для {st.name}", st.line, st.column)
        columns[index[st.name]] = st

    table = [[[QQ_I.zero] * N for _ in range(n)] for _ in range(n)]
    truncated = False
    for j, name in enumerate(basis):
        st = columns.get(j)
        if st is None:
            raise ParseError(f"нет соотношения для {name}")
        expr = sympy.expand(st.value.subs(scalars))
        extra = {str(s) for s in expr.free_symbols} - set(basis) - {"b"}
        if extra:
            raise _undeclared(script, extra, st)
        if expr == 0:
            continue
        try:
            poly = sympy.Poly(expr, *symbols, B)
        except PolynomialError:
            raise NonRationalCoefficient(f"правая часть для {name} не многочлен по b", st.line, st.column)
        for exponents, coeff in poly.terms():
            degrees, power = exponents[:n], exponents[n]
            if sum(degrees) != 1:
                raise ParseError(f"соотношение для {name} не линейно по базису", st.line, st.column)
            if power >= N:
                truncated = True
                continue
            i = degrees.index(1)
            table[i][j][power] += _gaussian(coeff, st)
    if truncated:
        logger.warning(f"⚠️ члены степени >= {N} по b отброшены")

    entries = [[BSeries(tuple(table[i][j]), N) for j in range(n)] for i in range(n)]
    E = ABModule(BMatrix.from_entries(entries, n, n, N), tuple(basis), script.name)
    report = validate(E)
    if not report.passed:
        logger.warning(f"⚠️ модуль {E.name}: соотношение ab - ba = b^2 нарушено на {report.failures}")
    return E


def parse_module(text: str, precision: Optional[int] = None) -> ABModule:
    return build_module(parse_script(text), precision)


def _safe_names(names, fallback: str) -> List[str]:
    cleaned = [re.sub(r'[^A-Za-z0-9_]', '_', name) for name in names]
    cleaned = [name if _IDENTIFIER.match(name) and name not in RESERVED else f"{fallback}{k + 1}"
               for k, name in enumerate(cleaned)]
    if len(set(cleaned)) != len(cleaned):
        cleaned = [f"{fallback}{k + 1}" for k in range(len(cleaned))]
    return cleaned


def serialize_module_script(E: ABModule) -> str:
    """Каноническая запись .ab: parse_module(serialize_module_script(E)) совпадает с E"""
    labels = _safe_names(E.labels, "e")
    renamed = ABModule(E.a_matrix, tuple(labels), E.name)
    lines = [f"precision {E.precision}"]
    if E.name:
        lines.append(f"module {_safe_names([E.name], 'M')[0]}")
    if labels:
        lines.append("basis " + " ".join(labels))
    lines.extend(renamed.relations())
    return "\n".join(lines) + "\n"
