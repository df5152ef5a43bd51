#!/usr/bin/env python3
"""
🧮 ab_tool - командная строка библиотеки (a,b)-модулей

Использование:
    python ab_tool.py show rank4.ab                      # Соотношения модуля
    python ab_tool.py adjoint rank4.ab --json            # Сопряженно-двойственный модуль в JSON
    python ab_tool.py isomorphic rank2.ab rank2-conj.ab  # Тест изоморфизма
    python ab_tool.py hermitianize rank4.ab              # Эрмитова / антиэрмитова форма
    python ab_tool.py decompose sum.ab --threads 4       # Разложение Крулля-Шмидта
    python ab_tool.py saito-check family.json            # Аксиомы высших спариваний

Коды выхода: 0 - успех, 1 - ответ "нет", 2 - ошибка, 3 - нет ответа на данной точности.
"""

import argparse
import logging
import sys
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Callable, Dict, List, Optional

from abmodule import (
    ABModule, adjoint, conjugate, delta_dual, direct_sum_many, dual, tensor, validate,
)
from configuration import load_config, option, setup_logging, use_config
from documents import (
    dump_document, family_to_document, form_to_document,
    module_to_document, morphism_to_document, read_document, report_document,
)
from errors import ABError, Inconclusive, NotSelfAdjoint
from forms import classify_self_adjoint, hermitian_type, hermitianize, is_nondegenerate, sesquilinear_forms
from homsolver import ABMorphism, are_isomorphic, solve_hom, verify_by_evaluation
from relations import parse_module
from saito import PairingFamily, check_all, extract_pairings, symmetrize_delta
from series import format_scalar, scalar
from structure import classify_endomorphism, composition_series, is_regular, krull_schmidt

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_NO = 1
EXIT_ERROR = 2
EXIT_INCONCLUSIVE = 3


@dataclass
class Outcome:
    """Результат команды: вердикт, код выхода, строки для человека и данные для JSON"""
    verdict: str
    code: int
    lines: List[str] = field(default_factory=list)
    result: Dict[str, Any] = field(default_factory=dict)
    certified: bool = True
    precision: Optional[int] = None


# ------------------------------------------------------------ ввод

def load_input(path: str, precision: Optional[int] = None) -> Any:
    """.ab - скрипт соотношений, .json - документ; точность обрезается до --precision"""
    file_path = Path(path)
    if file_path.suffix == ".json":
        obj = read_document(file_path)
        if precision is not None and isinstance(obj, ABModule) and obj.precision > precision:
            obj = obj.truncate(precision)
        return obj
    return parse_module(file_path.read_text(encoding='utf-8'), precision)


def _module(args, index: int = 0) -> ABModule:
    obj = load_input(args.inputs[index], args.precision)
    if not isinstance(obj, ABModule):
        raise ABError(f"{args.inputs[index]}: ожидался модуль")
    return obj


def _module_outcome(M: ABModule, verdict: str = "ok") -> Outcome:
    lines = [f"📝 {M.name or 'module'}: rank {M.rank}, precision {M.precision}"] + \
        [f"   {line}" for line in M.relations()]
    return Outcome(verdict, EXIT_OK, lines, {"module": module_to_document(M).model_dump()}, precision=M.precision)


def _seed(args) -> int:
    return option('random', 'seed', args.seed)


# ------------------------------------------------------------ команды

def cmd_validate(args) -> Outcome:
    E = _module(args)
    report = validate(E)
    if report.passed:
        lines = [f"✅ {E.name or 'module'}: ab - ba = b^2 holds to precision {report.effective_precision}"]
    else:
        lines = [f"❌ relation fails on basis vectors {[E.labels[j] for j in report.failures]}"]
    return Outcome("pass" if report.passed else "fail", EXIT_OK if report.passed else EXIT_NO, lines,
                   {"failures": report.failures, "effective_precision": report.effective_precision},
                   precision=report.effective_precision)


def cmd_show(args) -> Outcome:
    return _module_outcome(_module(args))


def cmd_dual(args) -> Outcome:
    return _module_outcome(dual(_module(args)))


def cmd_adjoint(args) -> Outcome:
    return _module_outcome(adjoint(_module(args)))


def cmd_conjugate(args) -> Outcome:
    return _module_outcome(conjugate(_module(args)))


def cmd_tensor(args) -> Outcome:
    return _module_outcome(tensor(_module(args, 0), _module(args, 1)))


def cmd_sum(args) -> Outcome:
    return _module_outcome(direct_sum_many([_module(args, k) for k in range(len(args.inputs))]))


def _hom_outcome(E: ABModule, F: ABModule, endomorphisms: bool) -> Outcome:
    basis = solve_hom(E, F)
    failures = sum(1 for f in basis.morphisms if not verify_by_evaluation(f))
    title = "End" if endomorphisms else "Hom"
    lines = [f"🔍 {title}: dim {basis.dim}, precision {basis.precision}, "
             f"{'stable' if basis.stable else 'not stable'}"]
    result: Dict[str, Any] = {
        "dim": basis.dim, "stable": basis.stable, "resonance_bound": basis.resonance_bound,
        "morphisms": [morphism_to_document(f).model_dump() for f in basis.morphisms],
    }
    if endomorphisms:
        kinds = [classify_endomorphism(f) for f in basis.morphisms]
        result["kinds"] = kinds
        for k, kind in enumerate(kinds):
            lines.append(f"   phi{k + 1}: {kind}")
    if failures:
        lines.append(f"❌ {failures} morphisms fail evaluation")
        return Outcome("error", EXIT_ERROR, lines, result, precision=basis.precision)
    code = EXIT_OK if basis.stable else EXIT_INCONCLUSIVE
    return Outcome(str(basis.dim) if basis.stable else "inconclusive", code, lines, result,
                   certified=basis.stable, precision=basis.precision)


def cmd_homs(args) -> Outcome:
    return _hom_outcome(_module(args, 0), _module(args, 1), False)


def cmd_endos(args) -> Outcome:
    E = _module(args)
    return _hom_outcome(E, E, True)


def cmd_isomorphic(args) -> Outcome:
    E, F = _module(args, 0), _module(args, 1)
    verdict = are_isomorphic(E, F, args.trials, _seed(args))
    icon = {"yes": "✅", "no": "❌"}.get(verdict.verdict, "⚠️")
    lines = [f"{icon} isomorphic: {verdict.verdict} (hom dim {verdict.hom_dim}, method {verdict.method})"]
    result: Dict[str, Any] = {"hom_dim": verdict.hom_dim, "stable": verdict.stable,
                              "method": verdict.method, "failure_bound": verdict.failure_bound}
    if verdict.witness is not None:
        result["witness"] = morphism_to_document(verdict.witness).model_dump()
    code = {"yes": EXIT_OK, "no": EXIT_NO}.get(verdict.verdict, EXIT_INCONCLUSIVE)
    return Outcome(verdict.verdict, code, lines, result, certified=verdict.verdict != "inconclusive")


def cmd_decompose(args) -> Outcome:
    E = _module(args)
    report = krull_schmidt(E, args.trials, _seed(args), args.threads, args.progress)
    lines = [f"🎯 {E.name or 'module'} = " +
             " + ".join(f"{M.name or 'M'}^{m}" if m > 1 else (M.name or "M") for M, m in report.factors)]
    for k, (M, multiplicity) in enumerate(report.factors):
        lines.append(f"   factor {k + 1}: rank {M.rank}, multiplicity {multiplicity}")
        lines.extend(f"      {line}" for line in M.relations())
    lines.extend(f"⚠️ {note}" for note in report.notes)
    result = {
        "factors": [{"module": module_to_document(M).model_dump(), "multiplicity": m} for M, m in report.factors],
        "witness": morphism_to_document(report.witness).model_dump() if report.witness is not None else None,
        "notes": report.notes,
    }
    code = EXIT_OK if report.certified else EXIT_INCONCLUSIVE
    return Outcome("certified" if report.certified else "inconclusive", code, lines, result,
                   report.certified, report.precision)


def cmd_comp_series(args) -> Outcome:
    E = _module(args)
    series = composition_series(E)
    exponents = [format_scalar(x) for x in series.exponents]
    lines = [f"📝 composition series exponents: {', '.join(exponents) or '-'}"]
    return Outcome("ok", EXIT_OK, lines, {"exponents": exponents}, precision=E.precision)


def cmd_regular(args) -> Outcome:
    E = _module(args)
    verdict = is_regular(E)
    icon = {"regular": "✅", "not_regular": "❌"}.get(verdict.verdict, "⚠️")
    lines = [f"{icon} {verdict.verdict} after {verdict.steps} saturation steps"]
    result: Dict[str, Any] = {"steps": verdict.steps}
    if verdict.saturation is not None:
        sat = verdict.saturation
        result["saturation"] = module_to_document(sat.module).model_dump()
        result["shift"] = sat.shift
        lines.append(f"   saturated presentation (shift {sat.shift}):")
        lines.extend(f"      {line}" for line in sat.module.relations())
    code = {"regular": EXIT_OK, "not_regular": EXIT_NO}.get(verdict.verdict, EXIT_INCONCLUSIVE)
    return Outcome(verdict.verdict, code, lines, result, verdict.verdict != "inconclusive", E.precision)


def cmd_forms(args) -> Outcome:
    E = _module(args)
    forms = sesquilinear_forms(E)
    lines = [f"🔍 sesquilinear forms: dim {len(forms)}"]
    documents = []
    for k, H in enumerate(forms):
        kind = hermitian_type(H)
        lines.append(f"   H{k + 1}: {kind}{', nondegenerate' if is_nondegenerate(H) else ''}")
        documents.append(form_to_document(H, kind).model_dump())
    return Outcome(str(len(forms)), EXIT_OK, lines, {"forms": documents}, precision=E.precision)


def cmd_hermitianize(args) -> Outcome:
    E = _module(args)
    try:
        verdict = hermitianize(E, args.trials, _seed(args))
    except NotSelfAdjoint as e:
        return Outcome("no", EXIT_NO, [f"❌ {e}"], precision=E.precision)
    lines = [f"✅ {verdict.kind}"]
    result: Dict[str, Any] = {"kind": verdict.kind, "hom_dim": verdict.hom_dim}
    for name, H in (("hermitian", verdict.hermitian), ("antihermitian", verdict.antihermitian)):
        if H is not None:
            result[name] = form_to_document(H, name).model_dump()
    return Outcome(verdict.kind, EXIT_OK, lines, result, precision=E.precision)


def cmd_classify(args) -> Outcome:
    E = _module(args)
    report = classify_self_adjoint(E, args.trials, _seed(args))
    lines = []
    for M, multiplicity, verdict in report.self_adjoint_factors:
        lines.append(f"   self-adjoint {M.name or 'M'} (rank {M.rank}) x{multiplicity}: {verdict.kind}")
    for G, G2, multiplicity in report.paired_factors:
        lines.append(f"   pair {G.name or 'G'} <-> {G2.name or 'G*'} x{multiplicity}")
    for M in report.unmatched:
        lines.append(f"   unmatched {M.name or 'M'} (rank {M.rank})")
    icon = "✅" if report.self_adjoint else "❌"
    lines.insert(0, f"{icon} self-adjoint: {'yes' if report.self_adjoint else 'no'}")
    result = {
        "self_adjoint": [{"module": module_to_document(M).model_dump(), "multiplicity": m, "kind": v.kind}
                         for M, m, v in report.self_adjoint_factors],
        "pairs": [{"first": module_to_document(G).model_dump(), "second": module_to_document(G2).model_dump(),
                   "multiplicity": m} for G, G2, m in report.paired_factors],
        "unmatched": [module_to_document(M).model_dump() for M in report.unmatched],
        "form": form_to_document(report.form, hermitian_type(report.form)).model_dump() if report.form else None,
    }
    if not report.certified:
        return Outcome("inconclusive", EXIT_INCONCLUSIVE, lines, result, False, E.precision)
    verdict = "yes" if report.self_adjoint else "no"
    return Outcome(verdict, EXIT_OK if report.self_adjoint else EXIT_NO, lines, result, precision=E.precision)


def _delta_isomorphism(args, obj: Any) -> Optional[ABMorphism]:
    """Изоморфизм E -> delta_dual(E, delta): из файла морфизма или через поиск по Hom"""
    if isinstance(obj, ABMorphism):
        return obj
    if args.delta is None:
        raise ABError("для модуля нужен --delta")
    verdict = are_isomorphic(obj, delta_dual(obj, scalar(args.delta)), args.trials, _seed(args))
    if verdict.verdict == "inconclusive":
        raise Inconclusive(f"изоморфизм {obj.name} -> delta_dual не установлен")
    return verdict.witness


def _family_outcome(family: PairingFamily) -> Outcome:
    reports = check_all(family)
    lines = [f"{'✅' if r.passed else '❌'} ({r.axiom}) checked {r.checked}"
             + (f", first failure {r.first_failure}" if r.first_failure else "")
             + (f" [{r.note}]" if r.note else "") for r in reports]
    passed = all(r.passed for r in reports)
    result = {"axioms": [{"axiom": r.axiom, "passed": r.passed, "checked": r.checked,
                          "first_failure": r.first_failure, "note": r.note} for r in reports]}
    return Outcome("pass" if passed else "fail", EXIT_OK if passed else EXIT_NO, lines, result,
                   precision=family.levels)


def cmd_saito_extract(args) -> Outcome:
    obj = load_input(args.inputs[0], args.precision)
    delta_morphism = _delta_isomorphism(args, obj)
    if delta_morphism is None:
        return Outcome("no", EXIT_NO, ["❌ module is not isomorphic to its delta-dual"])
    family = extract_pairings(delta_morphism, args.delta, args.normalization)
    lines = [f"📝 delta {format_scalar(family.delta)}, normalization {format_scalar(family.normalization)}"]
    for k in range(min(family.levels, 3)):
        rows = "; ".join(", ".join(format_scalar(x) for x in row) for row in family.delta_k(k))
        lines.append(f"   Delta_{k} = [{rows}]")
    return Outcome("ok", EXIT_OK, lines, {"family": family_to_document(family).model_dump()},
                   precision=family.levels)


def cmd_saito_check(args) -> Outcome:
    obj = load_input(args.inputs[0], args.precision)
    if isinstance(obj, PairingFamily):
        return _family_outcome(obj)
    delta_morphism = _delta_isomorphism(args, obj)
    if delta_morphism is None:
        return Outcome("no", EXIT_NO, ["❌ module is not isomorphic to its delta-dual"])
    return _family_outcome(extract_pairings(delta_morphism, args.delta, args.normalization))


def cmd_saito_symmetrize(args) -> Outcome:
    obj = load_input(args.inputs[0], args.precision)
    delta_morphism = _delta_isomorphism(args, obj)
    if delta_morphism is None:
        return Outcome("no", EXIT_NO, ["❌ module is not isomorphic to its delta-dual"])
    phi, report = symmetrize_delta(delta_morphism, args.delta, args.normalization)
    lines = [f"{'✅' if r.passed else '❌'} ({r.axiom})" for r in report.axioms]
    lines.append(f"   half twist: {report.half_twist_kind}, fixed point: {'yes' if report.fixed_point else 'no'}")
    result = {
        "morphism": morphism_to_document(phi).model_dump(),
        "axioms": {r.axiom: r.passed for r in report.axioms},
        "fixed_point": report.fixed_point,
        "constant_term_kept": report.constant_term_kept,
        "half_twist": report.half_twist_kind,
    }
    return Outcome("pass" if report.passed else "fail", EXIT_OK if report.passed else EXIT_NO,
                   lines, result, precision=phi.precision)


COMMANDS: Dict[str, Callable[[argparse.Namespace], Outcome]] = {
    "validate": cmd_validate,
    "show": cmd_show,
    "dual": cmd_dual,
    "adjoint": cmd_adjoint,
    "conjugate": cmd_conjugate,
    "tensor": cmd_tensor,
    "sum": cmd_sum,
    "homs": cmd_homs,
    "endos": cmd_endos,
    "isomorphic": cmd_isomorphic,
    "decompose": cmd_decompose,
    "comp-series": cmd_comp_series,
    "regular": cmd_regular,
    "forms": cmd_forms,
    "hermitianize": cmd_hermitianize,
    "classify": cmd_classify,
    "saito-extract": cmd_saito_extract,
    "saito-check": cmd_saito_check,
    "saito-symmetrize": cmd_saito_symmetrize,
}

# число входных файлов
ARITY = {"tensor": 2, "homs": 2, "isomorphic": 2}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        description='🧮 (a,b)-модули: функторы, морфизмы, разложения, формы, спаривания вычетов',
        formatter_class=argparse.RawDescriptionHelpFormatter,
        epilog=__doc__.split("Использование:")[1],
    )
    parser.add_argument('command', choices=list(COMMANDS), help='Команда')
    parser.add_argument('inputs', nargs='+', help='Файлы .ab или .json')
    parser.add_argument('--precision', type=int, help='Точность N (ряды по модулю b^N)')
    parser.add_argument('--seed', type=int, help='Зерно случайных испытаний')
    parser.add_argument('--trials', type=int, help='Число случайных испытаний')
    parser.add_argument('--threads', type=int, default=1, help='Потоки для разложения')
    parser.add_argument('--json', action='store_true', help='Вывод JSON-отчета')
    parser.add_argument('--progress', action='store_true', default=None, help='Показывать прогресс')
    parser.add_argument('--config', help='Путь к config.yaml')
    parser.add_argument('--log-level', help='Уровень логирования')
    parser.add_argument('--delta', help='delta для спариваний вычетов (например 3 или 3/2)')
    parser.add_argument('--normalization', help='Нормировка K_k (по умолчанию delta!)')
    return parser


def run(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return EXIT_OK if e.code == 0 else EXIT_ERROR

    expected = ARITY.get(args.command, 1)
    if args.command != "sum" and len(args.inputs) != expected:
        print(f"❌ {args.command}: ожидается файлов: {expected}", file=sys.stderr)
        return EXIT_ERROR

    try:
        config = load_config(args.config) if args.config else None
        use_config(config)
        setup_logging(config, args.log_level)
        started = time.perf_counter()
        outcome = COMMANDS[args.command](args)
        elapsed = time.perf_counter() - started
    except Inconclusive as e:
        print(f"⚠️ {e}", file=sys.stderr)
        return EXIT_INCONCLUSIVE
    except ABError as e:
        print(f"❌ {e}", file=sys.stderr)
        return EXIT_ERROR
    except (OSError, UnicodeDecodeError, ValueError) as e:
        print(f"❌ {e}", file=sys.stderr)
        return EXIT_ERROR
    finally:
        use_config(None)

    logger.info(f"✅ {args.command}: {outcome.verdict} за {elapsed:.3f} с")
    if args.json:
        document = report_document(args.command, outcome.verdict, outcome.result, outcome.certified,
                                   outcome.precision, elapsed)
        print(dump_document(document))
    else:
        for line in outcome.lines:
            print(line)
    return outcome.code


def main():
    sys.exit(run(sys.argv[1:]))


if __name__ == "__main__":
    main()
