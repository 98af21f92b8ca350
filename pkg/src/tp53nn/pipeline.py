"""End-to-end workflows: detect, train, classify and evaluate."""

from __future__ import annotations

import csv
import hashlib
import io
import json
import os
import tempfile
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Callable, Optional

from . import bpnn
from .align import DEFAULT_SCORING, Scoring
from .dataset import (
    CATEGORICAL, INPUT_FIELDS, Encoder, Record, decode_label, encode_all, encode_inputs,
    fit_encoder, read_records, split, _position,
)
from .errors import EmptyInput, ModelError, UnknownCategory, WriteFailed
from .mutcall import Diagnosis, MutationRecord, Structural, Verdict, diagnose, with_metadata
from .seqcore import Kind, read_fasta

# Table columns that cannot be derived from a sequence comparison. Values are
# the ones the sample table uses for plain point mutations.
DEFAULT_WT_CODON_COLUMN = "AT"
DEFAULT_TYPE_1 = "SN"
MUTANT_FLAG = {
    Structural.SUBSTITUTION: "B",
    Structural.FRAMESHIFT: "F",
    Structural.IN_FRAME_INDEL: "I",
}


def sample_path(name: str) -> Path:
    """Path of a file bundled in ``tp53nn/data``."""
    return Path(str(resources.files("tp53nn") / "data" / name))


def canonical_json(obj) -> str:
    return json.dumps(obj, sort_keys=True, indent=2, ensure_ascii=False, allow_nan=False) + "\n"


def atomic_write(path, text: str) -> None:
    """Write ``text`` to ``path`` via a temporary file and rename."""
    path = Path(path)
    try:
        fd, tmp = tempfile.mkstemp(dir=path.parent or ".", prefix=f".{path.name}.", suffix=".tmp")
    except OSError as exc:
        raise WriteFailed(f"cannot write {path}: {exc}") from None
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except OSError as exc:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise WriteFailed(f"cannot write {path}: {exc}") from None


def read_single_dna(path):
    seqs = read_fasta(path)
    seq = seqs[0]
    if seq.kind is not Kind.DNA:
        raise EmptyInput(f"{path}: first record is not a DNA sequence")
    return seq


@dataclass(frozen=True)
class Model:
    net: bpnn.Network
    encoder: Encoder
    model_id: str


def load_model_file(path) -> Model:
    try:
        data = Path(path).read_bytes()
    except OSError as exc:
        raise ModelError(f"cannot read model {path}: {exc}") from None
    try:
        text = data.decode("utf-8")
    except UnicodeDecodeError:
        raise bpnn.BadMagic(f"{path} is not a UTF-8 model file") from None
    net, encoder = bpnn.load_model(text)
    if encoder is None:
        raise ModelError(f"{path} carries no encoder")
    if net.topology[0] != len(INPUT_FIELDS) or net.topology[2] != 1:
        raise bpnn.DimensionMismatch(f"model topology {net.topology} does not fit 11 inputs / 1 output")
    return Model(net, encoder, "sha256:" + hashlib.sha256(data).hexdigest())


def mutation_to_record(m: MutationRecord, gene_location: str) -> Record:
    """The 11 classifier inputs for a called mutation."""
    return Record(
        mutation_position=m.nt_position,
        wt_codon=DEFAULT_WT_CODON_COLUMN,
        wt_codon_2=m.wt_codon,
        mutant=m.mutant_codon,
        wt_aa=m.wt_aa,
        mutant_aa=m.mutant_aa,
        event=m.event,
        mutant_flag=MUTANT_FLAG[m.structural],
        type_1=DEFAULT_TYPE_1,
        type_2=m.subst_class if m.subst_class in ("Ts", "Tv") else "Fe",
        gene_location=gene_location,
    )


def _predict_record(rec: Record, model: Model) -> tuple[str, float]:
    x = encode_inputs(rec, model.encoder)
    _, y = bpnn.forward(model.net, x)
    y = float(y[0])
    return decode_label(y, model.encoder), y


@dataclass
class Prediction:
    mutation: MutationRecord
    cancer: Optional[str]
    output: Optional[float]
    error: Optional[str] = None

    def to_json(self) -> dict:
        return {
            "mutation": self.mutation.to_json(),
            "predicted_cancer": self.cancer,
            "network_output": self.output,
            "error": self.error,
        }


@dataclass
class ClassificationReport:
    diagnosis: Diagnosis
    predictions: list = field(default_factory=list)
    model_id: str = ""

    @property
    def ok(self) -> bool:
        return all(p.error is None for p in self.predictions)

    def to_json(self) -> dict:
        return {
            "model_id": self.model_id,
            "diagnosis": self.diagnosis.to_json(),
            "predictions": [p.to_json() for p in self.predictions],
        }


def detect(reference_path, person_path, scoring: Scoring = DEFAULT_SCORING) -> Diagnosis:
    return diagnose(read_single_dna(reference_path), read_single_dna(person_path), scoring)


def classify_person(reference_path, person_path, model_path, gene_location: str,
                    scoring: Scoring = DEFAULT_SCORING) -> ClassificationReport:
    """Diagnose a person's CDS and classify every malignant mutation found.

    A mutation whose fields were never seen in training gets an ``error``
    entry instead of a prediction; the others are still classified.
    """
    model = load_model_file(model_path)
    dx = detect(reference_path, person_path, scoring)
    report = ClassificationReport(dx, model_id=model.model_id)
    if dx.verdict is not Verdict.MALIGNANT:
        return report
    for m in sorted(dx.records, key=lambda r: r.nt_position):
        m = with_metadata(m, gene_location)
        try:
            label, y = _predict_record(mutation_to_record(m, gene_location), model)
            report.predictions.append(Prediction(m, label, y))
        except UnknownCategory as exc:
            report.predictions.append(Prediction(m, None, None, str(exc)))
    return report


def classify_manual(fields: dict, model: Model | str | os.PathLike) -> tuple[str, float]:
    """Classify one mutation described field by field.

    ``fields`` must hold exactly the 11 input columns; values are strings
    (``mutation_position`` may also be an int).
    """
    if not isinstance(model, Model):
        model = load_model_file(model)
    given = set(fields)
    expected = set(INPUT_FIELDS)
    if given != expected:
        missing = sorted(expected - given)
        extra = sorted(given - expected)
        raise ValueError(f"manual entry needs exactly the 11 input fields; "
                         f"missing {missing}, unexpected {extra}")
    values = {k: str(fields[k]).strip() for k in CATEGORICAL}
    rec = Record(mutation_position=_position(fields["mutation_position"], "manual"), **values)
    return _predict_record(rec, model)


@dataclass
class TrainingOutcome:
    report: bpnn.TrainReport
    train_accuracy: float
    n_train: int
    n_test: int = 0
    test_accuracy: Optional[float] = None
    test_unencodable: int = 0

    @property
    def success(self) -> bool:
        return self.report.stopped_by is bpnn.StopReason.GOAL_REACHED or self.train_accuracy == 1.0

    def to_json(self) -> dict:
        return {
            "epochs_run": self.report.epochs_run,
            "final_mse": self.report.final_mse,
            "stopped_by": self.report.stopped_by.value,
            "train_accuracy": self.train_accuracy,
            "n_train": self.n_train,
            "n_test": self.n_test,
            "test_accuracy": self.test_accuracy,
            "test_unencodable": self.test_unencodable,
        }


def score_records(net: bpnn.Network, encoder: Encoder, records) -> dict:
    """Accuracy and MSE of a model on labelled records.

    Records carrying values the encoder never saw count as misclassified and
    are left out of the MSE.
    """
    usable, skipped = [], 0
    for r in records:
        try:
            encode_inputs(r, encoder)
            encoder.target(r.cancer)
        except UnknownCategory:
            skipped += 1
            continue
        usable.append(r)
    out = {"n": len(records), "unencodable": skipped, "mse": None, "accuracy": 0.0,
           "targets": [], "outputs": [], "labels": [], "predicted": []}
    if not usable:
        return out
    X, T = encode_all(usable, encoder)
    y = bpnn.predict(net, X)[:, 0]
    predicted = [decode_label(v, encoder) for v in y]
    hits = sum(p == r.cancer for p, r in zip(predicted, usable))
    out.update(
        mse=bpnn.mse(net, (X, T)),
        accuracy=hits / len(records),
        targets=T[:, 0].tolist(),
        outputs=y.tolist(),
        labels=[r.cancer for r in usable],
        predicted=predicted,
    )
    return out


def run_training(data_path, topology=(11, 100, 1), cfg: bpnn.TrainConfig = bpnn.TrainConfig(),
                 out_path=None, test_fraction: float = 0.0,
                 on_epoch: Optional[Callable[[int, float], None]] = None):
    """Fit encoder and network on a mutation table and optionally save the model.

    Returns ``(outcome, net, encoder)``.
    """
    records = read_records(data_path)
    if test_fraction > 0:
        train_rows, test_rows = split(records, test_fraction, cfg.seed)
    else:
        train_rows, test_rows = records, []
    encoder = fit_encoder(train_rows)
    X, T = encode_all(train_rows, encoder)
    net = bpnn.init_network(topology, cfg.seed)
    if net.topology[0] != X.shape[1] or net.topology[2] != 1:
        raise bpnn.DimensionMismatch(f"topology {tuple(topology)} must be 11-H-1 for this table")
    net, report = bpnn.train(net, (X, T), cfg, on_epoch=on_epoch)
    train_acc = score_records(net, encoder, train_rows)["accuracy"]
    outcome = TrainingOutcome(report, train_acc, len(train_rows), len(test_rows))
    if test_rows:
        held = score_records(net, encoder, test_rows)
        outcome.test_accuracy = held["accuracy"]
        outcome.test_unencodable = held["unencodable"]
    if out_path is not None:
        atomic_write(out_path, bpnn.save_model(net, encoder))
    return outcome, net, encoder


def evaluate(model_path, data_path) -> dict:
    model = load_model_file(model_path)
    result = score_records(model.net, model.encoder, read_records(data_path))
    result["model_id"] = model.model_id
    return result


def history_csv(history) -> str:
    lines = ["epoch,mse"] + [f"{i},{m!r}" for i, m in enumerate(history, start=1)]
    return "\n".join(lines) + "\n"


def predictions_csv(result: dict) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["target", "output", "cancer", "predicted"])
    for row in zip(result["targets"], result["outputs"], result["labels"], result["predicted"]):
        w.writerow([repr(row[0]), repr(row[1]), row[2], row[3]])
    return buf.getvalue()
