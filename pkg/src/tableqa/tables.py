"""Table data model and its text serializations.

A table is a rectangular grid of cell strings under a header row, plus
title and surrounding text. Three serializations feed the rest of the
pipeline: a whole-table document for the lexical index, and per-row /
per-column sequences for the relevance scorer. Row indices are 0-based
over body rows; the header is schema, not data.
"""

from dataclasses import dataclass

from .errors import CorruptRecordError, EmptyTableError, RaggedRowsError

# Sequence templates. Overridable so an external scorer trained on a
# different textual form can be matched without code changes.
ROW_CELL_TEMPLATE = "{header} is {value}"
ROW_SEPARATOR = " ; "
COLUMN_HEADER_SEPARATOR = " : "
COLUMN_VALUE_SEPARATOR = " | "


@dataclass(frozen=True)
class Table:
    """Immutable rectangular table; every row has exactly len(header) cells."""

    id: str
    header: list[str]
    rows: list[list[str]]
    title: str = ""
    surrounding_text: str = ""

    @property
    def n_cols(self) -> int:
        return len(self.header)

    @property
    def n_rows(self) -> int:
        return len(self.rows)

    def column(self, col: int) -> list[str]:
        return [row[col] for row in self.rows]


@dataclass(frozen=True)
class Question:
    qid: str
    text: str


@dataclass(frozen=True)
class CellRef:
    """0-based (row, col) into a table's body; header row excluded."""

    row: int
    col: int


def validate_table(raw: dict, pad_ragged: bool = False) -> Table:
    """Build a Table from a parsed corpus record.

    Ragged rows are rejected unless `pad_ragged`, in which case short rows
    are right-padded with empty strings (overlong rows are always errors).
    """
    table_id = raw.get("id")
    if not isinstance(table_id, str) or not table_id:
        raise CorruptRecordError("missing or empty id")
    header = raw.get("header")
    if not isinstance(header, list) or not all(isinstance(h, str) for h in header):
        raise CorruptRecordError(f"table {table_id!r}: header must be a list of strings")
    rows = raw.get("rows")
    if not isinstance(rows, list) or not all(isinstance(r, list) for r in rows):
        raise CorruptRecordError(f"table {table_id!r}: rows must be a list of lists")

    n = len(header)
    if n == 0 or len(rows) == 0:
        raise EmptyTableError(f"table {table_id!r}: needs at least one column and one row")

    fixed_rows = []
    for i, row in enumerate(rows):
        if not all(isinstance(c, str) for c in row):
            raise CorruptRecordError(f"table {table_id!r}: row {i} has non-string cells")
        if len(row) != n:
            if pad_ragged and len(row) < n:
                row = row + [""] * (n - len(row))
            else:
                raise RaggedRowsError(
                    f"table {table_id!r}: row {i} has {len(row)} cells, expected {n}"
                )
        fixed_rows.append(list(row))

    return Table(
        id=table_id,
        header=list(header),
        rows=fixed_rows,
        title=str(raw.get("title", "") or ""),
        surrounding_text=str(raw.get("surrounding_text", "") or ""),
    )


def table_to_record(t: Table) -> dict:
    return {
        "id": t.id,
        "title": t.title,
        "surrounding_text": t.surrounding_text,
        "header": t.header,
        "rows": t.rows,
    }


def serialize_table_document(t: Table) -> str:
    """Whole-table text document for indexing: title, surrounding text,
    header, then body cells in row-major order, single-space separated."""
    parts = []
    if t.title:
        parts.append(t.title)
    if t.surrounding_text:
        parts.append(t.surrounding_text)
    parts.extend(t.header)
    for row in t.rows:
        parts.extend(row)
    return " ".join(parts)


def serialize_row(t: Table, row: int, cell_template: str = ROW_CELL_TEMPLATE,
                  separator: str = ROW_SEPARATOR) -> str:
    """Row sequence: one "<header> is <value>" segment per column."""
    if not 0 <= row < t.n_rows:
        raise IndexError(f"row {row} out of range for table {t.id!r} with {t.n_rows} rows")
    return separator.join(
        cell_template.format(header=h, value=v) for h, v in zip(t.header, t.rows[row])
    )


def serialize_column(t: Table, col: int, header_separator: str = COLUMN_HEADER_SEPARATOR,
                     value_separator: str = COLUMN_VALUE_SEPARATOR) -> str:
    """Column sequence: "<header> : v1 | v2 | ... | vm" in row order."""
    if not 0 <= col < t.n_cols:
        raise IndexError(f"column {col} out of range for table {t.id!r} with {t.n_cols} columns")
    return t.header[col] + header_separator + value_separator.join(t.column(col))
