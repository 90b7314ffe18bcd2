# app/utils/log_filters.py

import logging
import re
from collections import Counter
from typing import List, Optional

from app.core.config import LOG_EXCLUDE_PATTERNS, LOG_REPEAT_LIMIT


class ExcludeLoggerFilter(logging.Filter):
    """Filtro para excluir logs de loggers específicos"""

    def __init__(self, excluded_loggers: List[str]):
        super().__init__()
        self.excluded_loggers = excluded_loggers

    def filter(self, record: logging.LogRecord) -> bool:
        # Retorna False para excluir el log
        return not any(record.name == name or record.name.startswith(f"{name}.") for name in self.excluded_loggers)


class ExcludePatternFilter(logging.Filter):
    """Filtro para excluir logs que coincidan con patrones específicos"""

    def __init__(self, excluded_patterns: List[str]):
        super().__init__()
        self.excluded_patterns = [re.compile(pattern, re.IGNORECASE) for pattern in excluded_patterns]

    def filter(self, record: logging.LogRecord) -> bool:
        message = record.getMessage()
        return not any(pattern.search(message) for pattern in self.excluded_patterns)


class RepeatedMessageFilter(logging.Filter):
    """
    Deja pasar a lo sumo `limit` copias de cada WARNING idéntico; los barridos
    de grilla repiten el mismo aviso en cada punto.
    """

    def __init__(self, limit: int = LOG_REPEAT_LIMIT):
        super().__init__()
        self.limit = limit
        self.seen: Counter = Counter()

    def filter(self, record: logging.LogRecord) -> bool:
        if record.levelno != logging.WARNING:
            return True
        key = (record.name, record.getMessage())
        self.seen[key] += 1
        count = self.seen[key]
        if count == self.limit + 1:
            record.msg = f"{record.getMessage()} (se omiten repeticiones)"
            record.args = ()
        return count <= self.limit + 1


def setup_logging_filters(extra_patterns: Optional[List[str]] = None) -> RepeatedMessageFilter:
    """Configura todos los filtros de logging necesarios"""

    root_logger = logging.getLogger()

    # Loggers de librerías que no aportan al diagnóstico numérico
    logger_filter = ExcludeLoggerFilter(["matplotlib", "numba", "openpyxl"])

    pattern_filter = ExcludePatternFilter(LOG_EXCLUDE_PATTERNS + list(extra_patterns or []))
    repeat_filter = RepeatedMessageFilter()

    for handler in root_logger.handlers:
        handler.addFilter(logger_filter)
        handler.addFilter(pattern_filter)
        handler.addFilter(repeat_filter)
    return repeat_filter
