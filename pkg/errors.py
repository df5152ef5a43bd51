#!/usr/bin/env python3
"""
Иерархия исключений библиотеки (a,b)-модулей.
Вердикты (проверки аксиом, тест изоморфизма, validate) не бросают исключений,
они возвращают отчеты; исключения означают невыполненное предусловие.
"""

from typing import Any, Optional


class ABError(Exception):
    """Базовая ошибка библиотеки"""


class NotAUnit(ABError):
    """Ряд не обратим: нулевой свободный член"""


class DimensionMismatch(ABError):
    """Несогласованные размерности матриц, модулей или элементов"""


class PrecisionMismatch(ABError):
    """Операция требует одинаковой точности по b"""


class NotInvertible(ABError):
    """Матрица замены базиса вырождена в b = 0"""


class NonRationalExponent(ABError):
    """Характеристический многочлен имеет корни вне Q(i)"""


class NotRegular(ABError):
    """Модуль не регулярен (или регулярность не установлена)"""


class NotNormal(ABError):
    """Подмодуль не нормален: фактор имеет b-кручение"""


class NotEndomorphism(ABError):
    """Ожидался эндоморфизм"""


class Inconclusive(ABError):
    """Вычисление не дало ответа на данной точности; partial хранит частичный результат"""

    def __init__(self, message: str, partial: Optional[Any] = None):
        super().__init__(message)
        self.partial = partial


class NotCompatible(ABError):
    """Матрица спаривания не удовлетворяет тождеству совместимости с a"""


class WrongCodomain(ABError):
    """Кодомен морфизма не совпадает с ожидаемым модулем"""


class NotSelfAdjoint(ABError):
    """Нет невырожденной полуторалинейной формы"""


class NotIsomorphism(ABError):
    """Морфизм не является изоморфизмом"""


class DegenerateSymmetrization(ABError):
    """Симметризация изоморфизма вырождена в b = 0"""


class ParseError(ABError):
    """Синтаксическая ошибка во входном файле"""

    def __init__(self, message: str, line: int = 0, column: int = 0):
        super().__init__(f"{line}:{column}: {message}" if line else message)
        self.line = line
        self.column = column


class UndeclaredSymbol(ParseError):
    """Символ не объявлен ни как скаляр, ни как базисный вектор"""


class NonRationalCoefficient(ParseError):
    """Коэффициент не лежит в Q(i)[b]"""


class ConfigError(ABError):
    """Ошибка загрузки конфигурации"""


class FormatError(ABError):
    """Неверный JSON-документ"""


class NotStable(ABError):
    """Образующие не задают a-устойчивый подмодуль"""
