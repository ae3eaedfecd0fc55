#!/usr/bin/env python3
"""
SpectralIndep: спектральные границы классического и квантового
числа k-независимости графа

Основной модуль, который служит точкой входа в приложение.
Координирует ключевые этапы работы:
1. Загрузка конфигурации и настройка логирования
2. Разбор входных графов (каталог, graph6, JSON список рёбер)
3. Выполнение команды и вывод отчёта в stdout (JSON или CSV)
"""

import sys
import argparse
from typing import List, Optional

from models import SpectralIndepError, ConfigError, ZeroPolicy, ZERO_EXACT, ZERO_TOLERANCE
from config import AppConfig, TOOL_VERSION, load_app_config, save_app_config
from core import (
    RunContext, load_inputs, cmd_bound, cmd_exact, cmd_verify, cmd_weights, cmd_scan,
    exit_code_for, report_rows
)
from utils import setup_logging, dumps_report, dumps_csv, parse_int_list

MODE_AUTO = "auto"
FORMAT_JSON = "json"
FORMAT_CSV = "csv"


def build_parser() -> argparse.ArgumentParser:
    """
    Собирает парсер аргументов с подкомандами
    """
    common = argparse.ArgumentParser (add_help=False)
    common.add_argument ('--config', help="JSON файл конфигурации")
    common.add_argument ('--threads', type=int, help="Размер пула обработчиков")
    common.add_argument ('--epsilon', type=float, help="Относительный порог нуля")
    common.add_argument ('--mode', choices=[MODE_AUTO, ZERO_EXACT, ZERO_TOLERANCE], default=MODE_AUTO,
                         help="Режим инерции: auto - точный для целочисленных матриц")
    common.add_argument ('--budget', type=int, help="Бюджет вершин точного оракула")
    common.add_argument ('--format', choices=[FORMAT_JSON, FORMAT_CSV], default=FORMAT_JSON)
    common.add_argument ('--strict', action='store_true', help="Ненулевой код завершения при ошибке любого графа")
    common.add_argument ('--timing', action='store_true', help="Добавить время обработки графов")
    common.add_argument ('--log-level', dest='log_level')
    common.add_argument ('--log-file', dest='log_file')
    common.add_argument ('--save-config', dest='save_config', help="Сохранить итоговую конфигурацию в JSON")

    inputs = argparse.ArgumentParser (add_help=False)
    inputs.add_argument ('--catalog', action='append', help="Идентификатор каталога 'family:params'")
    inputs.add_argument ('--graph6', help="Файл графов: graph6 или JSON по одному на строку")
    inputs.add_argument ('--edges', help="JSON файл {\"n\": ..., \"edges\": [...]}")

    parser = argparse.ArgumentParser (prog='spectral-indep', description="Спектральные границы k-независимости")
    parser.add_argument ('--version', action='version', version=f'%(prog)s {TOOL_VERSION}')
    commands = parser.add_subparsers (dest='command', required=True)

    bound = commands.add_parser ('bound', parents=[common, inputs], help="Все применимые границы")
    bound.add_argument ('-k', type=int, default=1)
    bound.add_argument ('--poly', help="Коэффициенты многочлена 'c0,c1,...,ck'")
    bound.add_argument ('--grid', action='store_true', help="Перебор многочленов x^k + c x")
    bound.add_argument ('--no-exact', dest='exact', action='store_false', help="Не вычислять точное alpha_k")

    exact = commands.add_parser ('exact', parents=[common, inputs], help="Точное alpha_k")
    exact.add_argument ('-k', type=int, default=1)
    exact.add_argument ('--cross-check', dest='cross_check', action='store_true',
                        help="Сверить с полным перебором для малых графов")

    verify = commands.add_parser ('verify', parents=[common, inputs], help="Проверка сертификата")
    verify.add_argument ('--cert', required=True, help="JSON файл сертификата")
    verify.add_argument ('-k', type=int)

    weights = commands.add_parser ('weights', parents=[common, inputs], help="Поиск взвешивания H∘A")
    weights.add_argument ('--restarts', type=int)
    weights.add_argument ('--iterations', type=int)
    weights.add_argument ('--field', choices=['real', 'hermitian'], default='real')
    weights.add_argument ('--seed', type=int, default=0)

    scan = commands.add_parser ('scan', parents=[common], help="Проверка границ на корпусе графов")
    scan.add_argument ('--n', default="4-9", help="Число вершин 'n' или диапазон 'a-b'")
    scan.add_argument ('--count', type=int, default=100)
    scan.add_argument ('--seed', type=int, default=0)
    scan.add_argument ('-k', '--k', dest='ks', default="1", help="Список k через запятую")
    scan.add_argument ('--catalog-only', action='store_true', help="Графы каталога с известной точностью")

    return parser


def make_context(args: argparse.Namespace) -> RunContext:
    """
    Конфигурация из файла и окружения с переопределением флагами командной строки
    """
    config = load_app_config (args.config)
    overrides = {
        "threads": args.threads,
        "epsilon": args.epsilon,
        "oracle_budget": args.budget,
        "log_level": args.log_level,
        "log_file": args.log_file,
    }
    data = {**config.model_dump (), **{k: v for k, v in overrides.items () if v is not None}}
    try:
        config = AppConfig.model_validate (data)
    except ValueError as e:
        raise ConfigError (f"Недопустимые параметры командной строки: {e}") from e

    policy = None
    if args.mode == ZERO_EXACT:
        policy = ZeroPolicy.exact ()
    elif args.mode == ZERO_TOLERANCE:
        policy = config.zero_policy ()
    return RunContext (config=config, policy=policy, strict=args.strict, timing=args.timing)


def run_command(args: argparse.Namespace, ctx: RunContext):
    """Выполняет подкоманду и возвращает отчёт"""
    if args.command == 'scan':
        try:
            ks = parse_int_list (args.ks)
        except ValueError as e:
            raise ConfigError (str (e)) from e
        return cmd_scan (ctx, args.n, args.count, args.seed, ks, args.catalog_only)

    input_desc, items = load_inputs (args.catalog, args.graph6, args.edges)
    if args.command == 'bound':
        return cmd_bound (ctx, input_desc, items, args.k, args.poly, args.grid, args.exact)
    if args.command == 'exact':
        return cmd_exact (ctx, input_desc, items, args.k, args.cross_check)
    if args.command == 'verify':
        return cmd_verify (ctx, args.cert, input_desc, items, args.k)
    return cmd_weights (ctx, input_desc, items, args.restarts, args.iterations, args.field, args.seed)


def main(argv: Optional[List[str]] = None) -> int:
    """
    Основная функция приложения.

    Returns:
        int: код завершения (0 - успех, 1 - некорректный сертификат или нарушение,
             2 - ошибка входных данных, 3 - превышен бюджет оракула)
    """
    args = build_parser ().parse_args (argv)

    try:
        ctx = make_context (args)
    except SpectralIndepError as e:
        print (f"Ошибка: {e}", file=sys.stderr)
        return e.exit_code

    logger = setup_logging (ctx.config.log_level, ctx.config.log_file)
    logger.info (f"Запуск SpectralIndep {TOOL_VERSION}: {args.command}")
    if args.save_config:
        save_app_config (ctx.config, args.save_config)
        logger.info (f"Конфигурация сохранена в {args.save_config}")

    try:
        report = run_command (args, ctx)
    except SpectralIndepError as e:
        logger.error (f"{type (e).__name__}: {e}")
        return e.exit_code
    except KeyboardInterrupt:
        print ("\nПриложение прервано пользователем", file=sys.stderr)
        return 130

    digits = ctx.config.float_digits
    if args.format == FORMAT_CSV:
        sys.stdout.write (dumps_csv (report_rows (report), digits))
    else:
        sys.stdout.write (dumps_report (report.model_dump (), digits) + "\n")

    code = exit_code_for (report, ctx.strict)
    logger.info (f"Завершение: код {code}")
    return code


if __name__ == "__main__":
    sys.exit (main ())
