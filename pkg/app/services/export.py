"""
Escritura de artefactos de la CLI: CSV, JSON y Excel (.xlsx).

CSV y JSON son deterministas byte a byte para una misma configuración.
"""

import csv
import io
import json
import logging
import math
import re
import sys
from pathlib import Path
from typing import Any, Dict, List, Optional

from openpyxl import Workbook
from openpyxl.styles import Alignment, Border, Font, PatternFill, Side
from openpyxl.utils import get_column_letter

from app.core.config import OUTPUT_FLOAT_FORMAT
from app.core.errors import InvalidInput
from app.models.run_config import ResultTable, RunConfig

logger = logging.getLogger(__name__)

# Constantes de color
COLOR_BORDER = '4a568d'
COLOR_HEADER_BG = '4a568d'
COLOR_HEADER_TEXT = 'FFFFFF'
COLOR_ODD_ROW = 'f6f8f9'
COLOR_EVEN_ROW = 'FFFFFF'
COLOR_TEXT = '48484e'
COLOR_TITLE = '4a568d'

ROW_HEIGHT_NORMAL = 20
ROW_HEIGHT_HEADER = 26

HEADER_FONT = Font(name='Calibri', size=12, bold=False, color=COLOR_HEADER_TEXT)
HEADER_FILL = PatternFill(start_color=COLOR_HEADER_BG, end_color=COLOR_HEADER_BG, fill_type='solid')
HEADER_ALIGNMENT = Alignment(horizontal='center', vertical='center', wrap_text=False)

TITLE_FONT = Font(name='Calibri', size=14, bold=False, color=COLOR_TITLE)
LABEL_FONT = Font(name='Calibri', size=12, bold=True, color=COLOR_TEXT)
NORMAL_FONT = Font(name='Calibri', size=12, color=COLOR_TEXT)

DATA_FONT = Font(name='Calibri', size=11, color=COLOR_TEXT)
DATA_ALIGNMENT_RIGHT = Alignment(horizontal='right', vertical='center')
DATA_ALIGNMENT_LEFT = Alignment(horizontal='left', vertical='center')

EVEN_ROW_FILL = PatternFill(start_color=COLOR_EVEN_ROW, end_color=COLOR_EVEN_ROW, fill_type='solid')
ODD_ROW_FILL = PatternFill(start_color=COLOR_ODD_ROW, end_color=COLOR_ODD_ROW, fill_type='solid')

BORDER_COLOR = Side(style='thin', color=COLOR_BORDER)
HEADER_BORDER = Border(bottom=BORDER_COLOR)

SCIENTIFIC_FORMAT = '0.000000000E+00'


def sanitize_filename(text: str, max_length: int = 100) -> str:
    """
    Sanitiza un texto para usarlo como nombre de archivo o de hoja.
    Remueve caracteres no válidos y limita la longitud.
    """
    text = re.sub(r'[/\\:*?"<>|\[\]]', '', text)
    text = text.replace(' ', '_')
    return text[:max_length]


def format_value(value: Any) -> str:
    """Celda CSV: NaN/None en blanco, flotantes con OUTPUT_FLOAT_FORMAT."""
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        if math.isnan(value):
            return ""
        return format(value, OUTPUT_FLOAT_FORMAT)
    return str(value)


def _json_value(value: Any) -> Any:
    if isinstance(value, float) and not math.isfinite(value):
        return None
    if isinstance(value, dict):
        return {k: _json_value(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_json_value(v) for v in value]
    return value


# ------------------------------------------------------------------------------------
# CSV / JSON
# ------------------------------------------------------------------------------------

def render_csv(table: ResultTable, config: RunConfig) -> str:
    """
    Línea de comentario con el eco de la configuración, encabezado y filas.
    El resumen, si existe, va como comentario final.
    """
    buffer = io.StringIO()
    buffer.write("# config: " + json.dumps(config.echo(), sort_keys=True) + "\n")
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(table.columns)
    for row in table.rows:
        writer.writerow([format_value(row.get(col)) for col in table.columns])
    if table.summary:
        buffer.write("# summary: " + json.dumps(_json_value(table.summary), sort_keys=True) + "\n")
    return buffer.getvalue()


def render_json(table: ResultTable, config: RunConfig) -> str:
    payload: Dict[str, Any] = {
        "config": config.echo(),
        "rows": [{col: _json_value(row.get(col)) for col in table.columns} for row in table.rows],
    }
    if table.summary:
        payload["summary"] = _json_value(table.summary)
    return json.dumps(payload, sort_keys=True, indent=2) + "\n"


# ------------------------------------------------------------------------------------
# EXCEL
# ------------------------------------------------------------------------------------

def add_header_info(ws, info: Dict[str, Any], current_row: int = 1) -> int:
    """
    Bloque de pares etiqueta/valor al inicio de la hoja.
    Retorna la siguiente fila disponible.
    """
    for label, value in info.items():
        ws[f'A{current_row}'] = f"{label}:"
        ws[f'A{current_row}'].font = LABEL_FONT
        ws[f'A{current_row}'].alignment = DATA_ALIGNMENT_LEFT
        ws[f'B{current_row}'] = value if isinstance(value, (int, float, str)) else json.dumps(value, sort_keys=True)
        ws[f'B{current_row}'].font = NORMAL_FONT
        ws[f'B{current_row}'].alignment = DATA_ALIGNMENT_LEFT
        current_row += 1

    # Separación (1 fila vacía)
    return current_row + 1


def add_table(ws, title: str, columns: List[str], rows: List[Dict[str, Any]], current_row: int) -> int:
    """Tabla con encabezado coloreado y filas alternadas. Retorna la siguiente fila."""
    ws[f'A{current_row}'] = title
    ws[f'A{current_row}'].font = TITLE_FONT
    current_row += 1

    for idx, name in enumerate(columns, start=1):
        cell = ws.cell(row=current_row, column=idx, value=name)
        cell.font = HEADER_FONT
        cell.fill = HEADER_FILL
        cell.alignment = HEADER_ALIGNMENT
        cell.border = HEADER_BORDER
    ws.row_dimensions[current_row].height = ROW_HEIGHT_HEADER
    current_row += 1

    for r, row in enumerate(rows):
        fill = EVEN_ROW_FILL if r % 2 == 0 else ODD_ROW_FILL
        for idx, name in enumerate(columns, start=1):
            value = row.get(name)
            if isinstance(value, float) and math.isnan(value):
                value = None
            cell = ws.cell(row=current_row, column=idx, value=value)
            cell.font = DATA_FONT
            cell.fill = fill
            if isinstance(value, float):
                cell.number_format = SCIENTIFIC_FORMAT
                cell.alignment = DATA_ALIGNMENT_RIGHT
            else:
                cell.alignment = DATA_ALIGNMENT_LEFT
        ws.row_dimensions[current_row].height = ROW_HEIGHT_NORMAL
        current_row += 1

    return current_row + 1


def build_workbook(table: ResultTable, config: RunConfig) -> Workbook:
    wb = Workbook()
    ws = wb.active
    ws.title = sanitize_filename(config.subcommand, max_length=31)
    ws.sheet_view.showGridLines = False

    row = add_header_info(ws, config.echo())
    if table.summary:
        row = add_header_info(ws, table.summary, row)
    add_table(ws, f"Resultados: {config.subcommand}", table.columns, table.rows, row)

    for idx in range(1, len(table.columns) + 1):
        ws.column_dimensions[get_column_letter(idx)].width = 20
    return wb


# ------------------------------------------------------------------------------------
# ESCRITURA
# ------------------------------------------------------------------------------------

def write_table(table: ResultTable, config: RunConfig, out: Optional[Path] = None) -> None:
    """
    Escribe la tabla en el formato pedido; sin `out` escribe en stdout.

    Raises:
        InvalidInput: xlsx sin archivo de salida.
    """
    out = out if out is not None else config.out

    if config.format == "xlsx":
        if out is None:
            raise InvalidInput("El formato xlsx requiere --out")
        build_workbook(table, config).save(out)
        logger.info(f"[CLI] Libro Excel escrito en {out} ({len(table.rows)} filas)")
        return

    text = render_csv(table, config) if config.format == "csv" else render_json(table, config)
    if out is None:
        sys.stdout.write(text)
        return
    Path(out).write_text(text, encoding="utf-8", newline="")
    logger.info(f"[CLI] {config.format.upper()} escrito en {out} ({len(table.rows)} filas)")
