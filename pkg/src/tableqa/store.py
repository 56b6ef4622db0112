"""Corpus ingest and the on-disk table store.

Layout under the store directory:
    tables.jsonl   append-only table records, one JSON object per line
    offsets.json   table id -> byte offset into tables.jsonl
    manifest.json  corpus metadata
    ingest_report.json   per-record ingest errors (skip-and-report)

After ingest the store is immutable; readers may share one Store across
threads (seeks are serialized internally).
"""

import json
import threading
from dataclasses import asdict, dataclass
from datetime import datetime, timezone
from pathlib import Path

from .errors import (
    CorruptRecordError,
    DuplicateIdError,
    EmptyTableError,
    ManifestExistsError,
    NotFoundError,
    RaggedRowsError,
    StoreError,
)
from .tables import Question, Table, table_to_record, validate_table

FORMAT_VERSION = 1

TABLES_FILE = "tables.jsonl"
OFFSETS_FILE = "offsets.json"
MANIFEST_FILE = "manifest.json"
REPORT_FILE = "ingest_report.json"


@dataclass(frozen=True)
class CorpusManifest:
    corpus_name: str
    table_count: int
    created_at: str
    format_version: int
    source_path: str


@dataclass(frozen=True)
class IngestError:
    line_number: int
    error_kind: str
    detail: str


@dataclass(frozen=True)
class IngestResult:
    manifest: CorpusManifest
    errors: list[IngestError]


@dataclass(frozen=True)
class QuestionSet:
    name: str
    questions: list[Question]

    def __iter__(self):
        return iter(self.questions)

    def __len__(self):
        return len(self.questions)


def _source_files(source: Path) -> list[Path]:
    if source.is_dir():
        files = sorted(p for p in source.iterdir() if p.is_file())
        if not files:
            raise StoreError(f"corpus directory {source} is empty")
        return files
    if not source.exists():
        raise StoreError(f"corpus path {source} does not exist")
    return [source]


def ingest_corpus(
    source: str | Path,
    store_path: str | Path,
    corpus_name: str | None = None,
    pad_ragged: bool = False,
    overwrite: bool = False,
) -> IngestResult:
    """Load every valid table record from `source` into a new store.

    Bad records are skipped and reported, never fatal; duplicate ids keep
    the first occurrence.
    """
    source = Path(source)
    store_path = Path(store_path)
    manifest_path = store_path / MANIFEST_FILE
    if manifest_path.exists() and not overwrite:
        raise ManifestExistsError(f"{manifest_path} exists; pass overwrite to replace")
    store_path.mkdir(parents=True, exist_ok=True)

    errors: list[IngestError] = []
    offsets: dict[str, int] = {}
    count = 0
    with open(store_path / TABLES_FILE, "w", encoding="utf-8") as out:
        for file in _source_files(source):
            with open(file, "r", encoding="utf-8") as fh:
                for line_number, line in enumerate(fh, start=1):
                    if not line.strip():
                        continue
                    try:
                        table = _parse_record(line, pad_ragged)
                        if table.id in offsets:
                            raise DuplicateIdError(f"table id {table.id!r} repeated")
                    except (CorruptRecordError, EmptyTableError,
                            RaggedRowsError, DuplicateIdError) as exc:
                        errors.append(IngestError(line_number, type(exc).__name__.removesuffix("Error"), str(exc)))
                        continue
                    offsets[table.id] = out.tell()
                    out.write(json.dumps(table_to_record(table), ensure_ascii=False) + "\n")
                    count += 1

    manifest = CorpusManifest(
        corpus_name=corpus_name or source.stem,
        table_count=count,
        created_at=datetime.now(timezone.utc).isoformat(),
        format_version=FORMAT_VERSION,
        source_path=str(source),
    )
    _write_json(store_path / OFFSETS_FILE, offsets)
    _write_json(manifest_path, asdict(manifest))
    _write_json(store_path / REPORT_FILE, [asdict(e) for e in errors])
    return IngestResult(manifest=manifest, errors=errors)


def _parse_record(line: str, pad_ragged: bool) -> Table:
    try:
        raw = json.loads(line)
    except json.JSONDecodeError as exc:
        raise CorruptRecordError(f"invalid JSON: {exc}") from exc
    if not isinstance(raw, dict):
        raise CorruptRecordError("record is not an object")
    return validate_table(raw, pad_ragged=pad_ragged)


def _write_json(path: Path, obj) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(obj, fh, ensure_ascii=False, indent=None)
        fh.write("\n")


class Store:
    """Read-only view over an ingested corpus."""

    def __init__(self, path: str | Path):
        self.path = Path(path)
        try:
            with open(self.path / MANIFEST_FILE, encoding="utf-8") as fh:
                self.manifest = CorpusManifest(**json.load(fh))
            with open(self.path / OFFSETS_FILE, encoding="utf-8") as fh:
                self._offsets: dict[str, int] = json.load(fh)
        except FileNotFoundError as exc:
            raise StoreError(f"no corpus store at {self.path}") from exc
        if self.manifest.format_version != FORMAT_VERSION:
            raise StoreError(
                f"store format {self.manifest.format_version}, expected {FORMAT_VERSION}"
            )
        if self.manifest.table_count != len(self._offsets):
            raise StoreError("manifest table_count disagrees with offset index")
        self._fh = open(self.path / TABLES_FILE, "rb")
        self._lock = threading.Lock()

    def __len__(self) -> int:
        return len(self._offsets)

    def ids(self) -> list[str]:
        """Table ids in ingest order."""
        return sorted(self._offsets, key=self._offsets.__getitem__)

    def __contains__(self, table_id: str) -> bool:
        return table_id in self._offsets

    def get_table(self, table_id: str) -> Table:
        offset = self._offsets.get(table_id)
        if offset is None:
            raise NotFoundError(f"table {table_id!r} not in store")
        with self._lock:
            self._fh.seek(offset)
            line = self._fh.readline()
        return _parse_record(line.decode("utf-8"), pad_ragged=False)

    def __iter__(self):
        for table_id in self.ids():
            yield self.get_table(table_id)

    def ingest_report(self) -> list[IngestError]:
        with open(self.path / REPORT_FILE, encoding="utf-8") as fh:
            return [IngestError(**e) for e in json.load(fh)]

    def close(self) -> None:
        self._fh.close()

    def __enter__(self):
        return self

    def __exit__(self, *exc):
        self.close()


def load_questions(path: str | Path, name: str | None = None) -> QuestionSet:
    """Read a question file: one {qid, text} object per line."""
    path = Path(path)
    questions: list[Question] = []
    seen: set[str] = set()
    with open(path, encoding="utf-8") as fh:
        for line_number, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            try:
                raw = json.loads(line)
            except json.JSONDecodeError as exc:
                raise CorruptRecordError(f"line {line_number}: invalid JSON") from exc
            qid, text = raw.get("qid"), raw.get("text")
            if not isinstance(qid, str) or not qid or not isinstance(text, str) or not text:
                raise CorruptRecordError(f"line {line_number}: needs non-empty qid and text")
            if qid in seen:
                raise DuplicateIdError(f"line {line_number}: duplicate qid {qid!r}")
            seen.add(qid)
            questions.append(Question(qid=qid, text=text))
    return QuestionSet(name=name or path.stem, questions=questions)


def write_questions(path: str | Path, questions: list[Question]) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for q in questions:
            fh.write(json.dumps({"qid": q.qid, "text": q.text}, ensure_ascii=False) + "\n")
