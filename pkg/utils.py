"""
Модуль утилит для SpectralIndep

Логирование, детерминированный вывод отчётов (JSON/CSV),
кодирование комплексных матриц в JSON и пул обработчиков.
"""

import io
import os
import csv
import json
import logging
from fractions import Fraction
from multiprocessing.pool import ThreadPool
from typing import List, Dict, Any, Callable, Iterable

import numpy as np

from models import CertificateFormatError

LOGGER_NAME = 'SpectralIndep'

# Колонки плоской таблицы границ для формата CSV
CSV_COLUMNS = ["graph", "k", "bound", "value", "floor", "ge_w", "le_W", "tight", "exact", "error"]


# Настройка логирования
def setup_logging(level: str = "INFO", log_file: str = "") -> logging.Logger:
    """
    Настраивает и возвращает логгер приложения.
    Журнал пишется в stderr: stdout зарезервирован под отчёты.
    """
    logger = logging.getLogger (LOGGER_NAME)
    logger.setLevel (getattr (logging, level.upper (), logging.INFO))

    if not logger.handlers:
        formatter = logging.Formatter ('%(asctime)s - %(name)s - %(levelname)s - %(message)s')
        handler = logging.StreamHandler ()
        handler.setFormatter (formatter)
        logger.addHandler (handler)

        # Добавим файловый обработчик
        if log_file:
            folder = os.path.dirname (log_file)
            if folder and not os.path.exists (folder):
                os.makedirs (folder)
            file_handler = logging.FileHandler (log_file)
            file_handler.setFormatter (formatter)
            logger.addHandler (file_handler)

    return logger


def get_logger(module: str) -> logging.Logger:
    """Дочерний логгер модуля"""
    return logging.getLogger (f'{LOGGER_NAME}.{module}')


# Утилиты для детерминированного вывода
def normalize_json(value: Any, digits: int = 12) -> Any:
    """
    Приводит значение к JSON-совместимому виду с фиксированной точностью чисел

    Args:
        value: произвольная структура из словарей, списков, чисел numpy и Fraction
        digits: число значащих цифр для float

    Returns:
        Any: структура, пригодная для json.dumps
    """
    if isinstance (value, dict):
        return {str (k): normalize_json (v, digits) for k, v in value.items ()}
    if isinstance (value, (list, tuple)):
        return [normalize_json (v, digits) for v in value]
    if isinstance (value, np.ndarray):
        return normalize_json (value.tolist (), digits)
    if isinstance (value, (bool, np.bool_)):
        return bool (value)
    if isinstance (value, (int, np.integer)):
        return int (value)
    if isinstance (value, Fraction):
        if value.denominator == 1:
            return value.numerator
        return f"{value.numerator}/{value.denominator}"
    if isinstance (value, (float, np.floating)):
        value = float (value)
        if not np.isfinite (value):
            return None if np.isnan (value) else ("inf" if value > 0 else "-inf")
        return float (format (value, f'.{digits}g'))
    if isinstance (value, (complex, np.complexfloating)):
        return [normalize_json (value.real, digits), normalize_json (value.imag, digits)]
    return value


def dumps_report(data: Any, digits: int = 12) -> str:
    """Сериализует отчёт: отсортированные ключи, фиксированная точность"""
    return json.dumps (normalize_json (data, digits), sort_keys=True, indent=2, ensure_ascii=False)


def dumps_csv(rows: List[Dict[str, Any]], digits: int = 12) -> str:
    """Плоская таблица границ в формате CSV"""
    buffer = io.StringIO ()
    writer = csv.DictWriter (buffer, fieldnames=CSV_COLUMNS, extrasaction='ignore', lineterminator='\n')
    writer.writeheader ()
    for row in rows:
        writer.writerow ({key: normalize_json (row.get (key), digits) for key in CSV_COLUMNS})
    return buffer.getvalue ()


# Кодирование комплексных матриц
def matrix_to_json(matrix: np.ndarray) -> List[List[List[float]]]:
    """Плотная матрица -> список строк из пар [re, im]"""
    matrix = np.asarray (matrix, dtype=complex)
    return [[[float (z.real), float (z.imag)] for z in row] for row in matrix]


def matrix_from_json(data: Any) -> np.ndarray:
    """
    Читает плотную матрицу из JSON: элементы - числа или пары [re, im]

    Args:
        data: список строк

    Returns:
        np.ndarray: комплексная квадратная матрица
    """
    if not isinstance (data, list) or not data or not all (isinstance (row, list) for row in data):
        raise CertificateFormatError ("Матрица должна быть непустым списком строк")
    size = len (data)
    result = np.zeros ((size, size), dtype=complex)
    for i, row in enumerate (data):
        if len (row) != size:
            raise CertificateFormatError (f"Строка {i} матрицы имеет длину {len (row)}, ожидалось {size}")
        for j, entry in enumerate (row):
            result[i, j] = _parse_entry (entry, i, j)
    return result


def _parse_entry(entry: Any, i: int, j: int) -> complex:
    """Элемент матрицы: число или пара [re, im]"""
    if isinstance (entry, bool):
        raise CertificateFormatError (f"Элемент ({i}, {j}) не является числом")
    if isinstance (entry, (int, float)):
        return complex (entry)
    if isinstance (entry, list) and len (entry) == 2 and all (
            isinstance (x, (int, float)) and not isinstance (x, bool) for x in entry):
        return complex (entry[0], entry[1])
    raise CertificateFormatError (f"Элемент ({i}, {j}) должен быть числом или парой [re, im]")


# Пул обработчиков
def run_pool(func: Callable, items: Iterable, threads: int = 1) -> List[Any]:
    """
    Применяет func ко всем элементам; порядок результатов совпадает с порядком входа

    Args:
        func: функция одного аргумента без общего изменяемого состояния
        items: элементы работы
        threads: размер пула (1 - последовательно)

    Returns:
        List[Any]: результаты в исходном порядке
    """
    items = list (items)
    if threads <= 1 or len (items) <= 1:
        return [func (item) for item in items]

    with ThreadPool (min (threads, len (items))) as pool:
        return pool.map (func, items)


def parse_int_list(text: str) -> List[int]:
    """Разбирает список вида '1,2,3'"""
    try:
        return [int (part) for part in text.split (',') if part.strip () != '']
    except ValueError as e:
        raise ValueError (f"Ожидался список целых чисел через запятую: {text}") from e
