"""TP53 mutation table ingestion and the 11-input / 1-output encoding."""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass
from typing import Sequence as Seq, TextIO

import numpy as np

from .errors import BadInteger, EmptyDataset, EmptyFile, MissingColumn, SingleClass, UnknownCategory, UnknownLabel

COLUMNS = (
    "mutation_position", "wt_codon", "wt_codon_2", "mutant", "wt_aa", "mutant_aa",
    "event", "mutant_flag", "type_1", "type_2", "gene_location", "cancer",
)
# Input order: position first, then the categoricals in table order.
CATEGORICAL = COLUMNS[1:-1]
INPUT_FIELDS = COLUMNS[:-1]
N_INPUTS = len(INPUT_FIELDS)


@dataclass(frozen=True)
class Record:
    mutation_position: int
    wt_codon: str
    wt_codon_2: str
    mutant: str
    wt_aa: str
    mutant_aa: str
    event: str
    mutant_flag: str
    type_1: str
    type_2: str
    gene_location: str
    cancer: str = ""

    def inputs(self) -> dict:
        return {name: getattr(self, name) for name in INPUT_FIELDS}


def _position(value, row) -> int:
    text = str(value).strip()
    if not text.isdigit() or int(text) < 1:
        raise BadInteger(value, row)
    return int(text)


def load_records(csv_text: str | TextIO) -> list[Record]:
    if not isinstance(csv_text, str):
        csv_text = csv_text.read()
    reader = csv.reader(io.StringIO(csv_text))
    header = next(reader, None)
    if header is None:
        raise EmptyFile("CSV has no header row")
    index = {name.strip().lower(): i for i, name in enumerate(header)}
    missing = [c for c in COLUMNS if c not in index]
    if missing:
        raise MissingColumn(f"missing column(s): {', '.join(missing)}")
    records = []
    # row numbers count the header as row 1
    for rowno, row in enumerate(reader, start=2):
        if not row or all(not cell.strip() for cell in row):
            continue
        if len(row) < len(header):
            row = row + [""] * (len(header) - len(row))
        values = {c: row[index[c]].strip() for c in COLUMNS}
        values["mutation_position"] = _position(values["mutation_position"], rowno)
        records.append(Record(**values))
    if not records:
        raise EmptyFile("CSV contains a header but no records")
    return records


def read_records(path) -> list[Record]:
    with open(path, encoding="utf-8", newline="") as fh:
        return load_records(fh)


def dump_records(records: Seq[Record]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(COLUMNS)
    for r in records:
        writer.writerow([getattr(r, c) for c in COLUMNS])
    return buf.getvalue()


@dataclass(frozen=True)
class Encoder:
    vocabularies: dict  # field name -> tuple of sorted strings
    position_range: tuple
    labels: tuple

    @property
    def n_classes(self) -> int:
        return len(self.labels)

    def to_json(self) -> dict:
        return {
            "vocabularies": {k: list(self.vocabularies[k]) for k in CATEGORICAL},
            "position_range": list(self.position_range),
            "labels": list(self.labels),
        }

    @classmethod
    def from_json(cls, obj: dict) -> "Encoder":
        vocab = {k: tuple(obj["vocabularies"][k]) for k in CATEGORICAL}
        lo, hi = obj["position_range"]
        return cls(vocab, (int(lo), int(hi)), tuple(obj["labels"]))

    def target(self, label: str) -> float:
        try:
            i = self.labels.index(label)
        except ValueError:
            raise UnknownLabel("cancer", label, self.labels) from None
        return i / (self.n_classes - 1)


def fit_encoder(records: Seq[Record]) -> Encoder:
    if not records:
        raise EmptyDataset("cannot fit an encoder on zero records")
    vocab = {name: tuple(sorted({getattr(r, name) for r in records})) for name in CATEGORICAL}
    positions = [r.mutation_position for r in records]
    labels = tuple(sorted({r.cancer for r in records}))
    if len(labels) < 2:
        raise SingleClass(f"need at least 2 cancer labels, found {len(labels)}")
    return Encoder(vocab, (min(positions), max(positions)), labels)


def encode_inputs(r: Record, e: Encoder) -> np.ndarray:
    x = np.empty(N_INPUTS)
    lo, hi = e.position_range
    x[0] = 0.5 if hi == lo else min(max((r.mutation_position - lo) / (hi - lo), 0.0), 1.0)
    for k, name in enumerate(CATEGORICAL, start=1):
        vocab = e.vocabularies[name]
        value = getattr(r, name)
        try:
            i = vocab.index(value)
        except ValueError:
            raise UnknownCategory(name, value, vocab) from None
        x[k] = i / (len(vocab) - 1) if len(vocab) > 1 else 0.0
    return x


def encode(r: Record, e: Encoder) -> tuple[np.ndarray, float]:
    """Map a record to its 11-element input vector and scalar target."""
    return encode_inputs(r, e), e.target(r.cancer)


def encode_all(records: Seq[Record], e: Encoder) -> tuple[np.ndarray, np.ndarray]:
    X = np.array([encode_inputs(r, e) for r in records])
    T = np.array([[e.target(r.cancer)] for r in records])
    return X, T


def decode_label(y: float, e: Encoder) -> str:
    y = min(max(float(y), 0.0), 1.0)
    c = e.n_classes - 1
    # exact distances to i/c; argmin keeps the lower index on ties
    dists = [abs(y - i / c) for i in range(c + 1)]
    return e.labels[int(np.argmin(dists))]


def split(records: Seq[Record], test_fraction: float, seed: int):
    if not 0 <= test_fraction < 1:
        raise ValueError("test_fraction must lie in [0, 1)")
    order = np.random.default_rng(seed).permutation(len(records))
    shuffled = [records[i] for i in order]
    n_test = math.ceil(len(records) * test_fraction)
    return shuffled[n_test:], shuffled[:n_test]

