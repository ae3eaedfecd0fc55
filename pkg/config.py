"""
Модуль конфигурации для SpectralIndep

Содержит класс конфигурации приложения и функции его загрузки
из JSON файла и переменных окружения.

"""

import os
import json
from typing import Optional

from dotenv import load_dotenv
from pydantic import BaseModel, Field, ValidationError

from models import ConfigError, ZeroPolicy
from exact_oracle import HARD_CAP

load_dotenv ()

# Константы
TOOL_VERSION = "1.0.0"
ENV_PREFIX = "SPECTRAL_INDEP_"
ENV_THREADS = ENV_PREFIX + "THREADS"
MAX_THREADS = 64

# Переменные окружения -> поля конфигурации
ENV_FIELDS = {
    ENV_THREADS: "threads",
    ENV_PREFIX + "EPSILON": "epsilon",
    ENV_PREFIX + "ORACLE_BUDGET": "oracle_budget",
    ENV_PREFIX + "LOG_LEVEL": "log_level",
    ENV_PREFIX + "LOG_FILE": "log_file",
}


class AppConfig (BaseModel):
    """Конфигурация приложения"""
    epsilon: float = Field (1e-9, gt=0, description="Относительный порог нуля для режима tolerance")
    cert_tol: float = Field (1e-8, gt=0, description="Допуск невязок при проверке сертификатов")
    oracle_budget: int = Field (40, ge=1, le=HARD_CAP, description="Бюджет вершин для метода ветвей и границ (не выше HARD_CAP)")
    naive_max_n: int = Field (20, ge=1, le=24, description="Предел полного перебора подмножеств при перекрёстной проверке")
    threads: int = Field (1, ge=1, description="Размер пула обработчиков")
    float_digits: int = Field (12, ge=1, le=17, description="Значащие цифры чисел в JSON")
    rational_denominator: int = Field (10000, ge=1, description="Знаменатель сетки для точной перепроверки весов")
    search_restarts: int = Field (20, ge=1, description="Число перезапусков поиска весов")
    search_iterations: int = Field (300, ge=0, description="Итераций восхождения на перезапуск")
    step_initial: float = Field (1.0, gt=0, description="Начальный шаг возмущения")
    step_final: float = Field (0.01, gt=0, description="Конечный шаг возмущения")
    log_level: str = Field ("INFO", description="Уровень логирования")
    log_file: str = Field ("", description="Файл журнала (пусто - без файла)")

    def zero_policy(self) -> ZeroPolicy:
        """Политика tolerance с порогом из конфигурации"""
        return ZeroPolicy.tolerance (self.epsilon)


def load_app_config(path: Optional[str] = None) -> AppConfig:
    """
    Загружает конфигурацию: значения по умолчанию, затем JSON файл, затем окружение

    Args:
        path: путь к JSON файлу конфигурации (опционально)

    Returns:
        AppConfig: проверенная конфигурация
    """
    data = {}
    if path:
        if not os.path.exists (path):
            raise ConfigError (f"Файл конфигурации не найден: {path}")
        try:
            with open (path, 'r', encoding='utf-8') as file:
                data = json.load (file)
        except json.JSONDecodeError as e:
            raise ConfigError (f"Некорректный JSON в {path}: {e}") from e
        if not isinstance (data, dict):
            raise ConfigError (f"Конфигурация в {path} должна быть объектом")

    # Переменные окружения имеют приоритет над файлом
    for env_name, field_name in ENV_FIELDS.items ():
        value = os.environ.get (env_name)
        if value:
            data[field_name] = value

    try:
        return AppConfig.model_validate (data)
    except ValidationError as e:
        raise ConfigError (f"Недопустимая конфигурация: {e}") from e


def save_app_config(app_config: AppConfig, path: str) -> None:
    """Сохраняет конфигурацию приложения в JSON"""
    folder = os.path.dirname (path)
    if folder and not os.path.exists (folder):
        os.makedirs (folder)

    with open (path, 'w', encoding='utf-8') as file:
        json.dump (app_config.model_dump (), file, indent=4)


def resolve_threads(app_config: AppConfig) -> int:
    """Возвращает число потоков пула в пределах [1, MAX_THREADS]"""
    return max (1, min (app_config.threads, MAX_THREADS))
