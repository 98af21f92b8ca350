"""Command-line interface.

Exit codes: 0 success, 1 training did not fit / write failure, 2 usage
error, 3 input parse error, 4 model error, 5 unknown category.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from . import bpnn, pipeline
from .align import Scoring, global_align
from .dataset import INPUT_FIELDS
from .errors import InputError, ModelError, TP53Error, UnknownCategory
from .seqcore import read_fasta, translate, write_fasta

EXIT_USAGE = 2
EXIT_INPUT = 3


def _emit(text: str, out):
    if out:
        pipeline.atomic_write(out, text)
    else:
        sys.stdout.write(text)


def _note(msg: str):
    print(msg, file=sys.stderr)


def _topology(text: str):
    try:
        parts = tuple(int(p) for p in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"topology must be three integers like 11,100,1, got {text!r}")
    if len(parts) != 3:
        raise argparse.ArgumentTypeError("topology needs exactly three layer sizes")
    return parts


def _scoring(args) -> Scoring:
    try:
        return Scoring(args.match, args.mismatch, args.gap)
    except ValueError as exc:
        raise _UsageError(str(exc))


class _UsageError(Exception):
    pass


def cmd_detect(args):
    dx = pipeline.detect(args.reference, args.person, _scoring(args))
    _emit(pipeline.canonical_json(dx.to_json()), args.out)
    _note(f"verdict: {dx.verdict.value}; {len(dx.dna_mutations)} DNA change(s), "
          f"{len(dx.records)} protein-affecting")
    return 0


def cmd_align(args):
    a = read_fasta(args.a)[0]
    b = read_fasta(args.b)[0]
    al = global_align(a, b, _scoring(args))
    sys.stdout.write(al.to_text())
    return 0


def cmd_translate(args):
    seqs = [translate(s, args.mode) for s in read_fasta(args.input)]
    sys.stdout.write(write_fasta(seqs))
    return 0


def cmd_train(args):
    cfg = bpnn.TrainConfig(alpha=args.lr, max_epochs=args.max_epochs, goal_mse=args.goal_mse,
                           seed=args.seed, shuffle_each_epoch=args.shuffle)

    def log(epoch, err):
        if args.log_every and (epoch % args.log_every == 0 or epoch == 1):
            _note(f"epoch {epoch:>7d}  mse {err:.6e}")

    outcome, _, _ = pipeline.run_training(args.data, args.topology, cfg, args.out,
                                          test_fraction=args.test_fraction, on_epoch=log)
    if args.report_dir:
        from .plotting import plot_performance
        d = Path(args.report_dir)
        d.mkdir(parents=True, exist_ok=True)
        pipeline.atomic_write(d / "history.csv", pipeline.history_csv(outcome.report.mse_history))
        plot_performance(outcome.report.mse_history, d / "performance.png", goal=cfg.goal_mse)
    sys.stdout.write(pipeline.canonical_json(outcome.to_json()))
    _note(f"stopped by {outcome.report.stopped_by.value} after {outcome.report.epochs_run} epochs; "
          f"mse {outcome.report.final_mse:.6e}; training accuracy {outcome.train_accuracy:.4f}")
    return 0 if outcome.success else 1


def _parse_sets(pairs):
    fields = {}
    for item in pairs:
        key, sep, value = item.partition("=")
        key = key.strip().lower()
        if not sep:
            raise _UsageError(f"--set expects field=value, got {item!r}")
        if key in fields:
            raise _UsageError(f"field {key!r} given twice")
        fields[key] = value
    missing = [f for f in INPUT_FIELDS if f not in fields]
    extra = [f for f in fields if f not in INPUT_FIELDS]
    if missing or extra:
        raise _UsageError(f"manual mode needs exactly these fields: {', '.join(INPUT_FIELDS)}"
                          + (f"; missing {missing}" if missing else "")
                          + (f"; unexpected {extra}" if extra else ""))
    return fields


def cmd_classify(args):
    if args.set:
        if args.reference or args.person or args.gene_location is not None:
            raise _UsageError("use either --set fields or --reference/--person/--gene-location")
        fields = _parse_sets(args.set)
        model = pipeline.load_model_file(args.model)
        label, y = pipeline.classify_manual(fields, model)
        result = {"model_id": model.model_id, "fields": fields,
                  "predicted_cancer": label, "network_output": y}
        _emit(pipeline.canonical_json(result), args.out)
        _note(f"predicted: {label} (output {y:.6f})")
        return 0
    if not (args.reference and args.person and args.gene_location is not None):
        raise _UsageError("classify needs --reference, --person and --gene-location (or --set fields)")
    report = pipeline.classify_person(args.reference, args.person, args.model,
                                      args.gene_location, _scoring(args))
    _emit(pipeline.canonical_json(report.to_json()), args.out)
    _note(f"verdict: {report.diagnosis.verdict.value}")
    for p in report.predictions:
        where = f"codon {p.mutation.codon_number} {p.mutation.wt_codon}>{p.mutation.mutant_codon}"
        _note(f"  {where}: {p.cancer}" if p.error is None else f"  {where}: {p.error}")
    return 0 if report.ok else UnknownCategory.exit_code


def cmd_eval(args):
    result = pipeline.evaluate(args.model, args.data)
    if args.report_dir:
        from .plotting import plot_regression
        d = Path(args.report_dir)
        d.mkdir(parents=True, exist_ok=True)
        pipeline.atomic_write(d / "predictions.csv", pipeline.predictions_csv(result))
        plot_regression(result["targets"], result["outputs"], d / "regression.png")
    summary = {k: result[k] for k in ("model_id", "n", "unencodable", "mse", "accuracy")}
    sys.stdout.write(pipeline.canonical_json(summary))
    mse = "n/a" if result["mse"] is None else f"{result['mse']:.6e}"
    _note(f"mse {mse}; accuracy {result['accuracy']:.4f} over {result['n']} records")
    return 0


def _add_scoring(p):
    p.add_argument("--match", type=int, default=1)
    p.add_argument("--mismatch", type=int, default=-1)
    p.add_argument("--gap", type=int, default=-2)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="tp53nn",
        description="Detect TP53 mutations by alignment and classify cancer type with a BP network.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("detect", help="diagnose a person's CDS against a reference")
    p.add_argument("--reference", required=True)
    p.add_argument("--person", required=True)
    _add_scoring(p)
    p.add_argument("--out")
    p.set_defaults(func=cmd_detect)

    p = sub.add_parser("align", help="globally align two FASTA sequences")
    p.add_argument("--a", required=True)
    p.add_argument("--b", required=True)
    _add_scoring(p)
    p.set_defaults(func=cmd_align)

    p = sub.add_parser("translate", help="translate DNA FASTA records to protein")
    p.add_argument("--in", dest="input", required=True)
    p.add_argument("--mode", choices=("cds", "full"), default="cds")
    p.set_defaults(func=cmd_translate)

    p = sub.add_parser("train", help="train a classifier on a mutation table")
    p.add_argument("--data", required=True)
    p.add_argument("--topology", type=_topology, default=(11, 100, 1))
    p.add_argument("--lr", type=float, default=0.3)
    p.add_argument("--goal-mse", type=float, default=1e-6)
    p.add_argument("--max-epochs", type=int, default=100_000)
    p.add_argument("--seed", type=int, default=42)
    p.add_argument("--shuffle", action="store_true")
    p.add_argument("--test-fraction", type=float, default=0.0)
    p.add_argument("--log-every", type=int, default=1000, help="epochs between MSE lines on stderr (0: off)")
    p.add_argument("--report-dir", help="write history.csv and performance.png here")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("classify", help="classify a person's mutations or a manually entered record")
    p.add_argument("--model", required=True)
    p.add_argument("--reference")
    p.add_argument("--person")
    p.add_argument("--gene-location")
    p.add_argument("--set", action="append", metavar="FIELD=VALUE")
    _add_scoring(p)
    p.add_argument("--out")
    p.set_defaults(func=cmd_classify)

    p = sub.add_parser("eval", help="report MSE and accuracy of a model on a table")
    p.add_argument("--model", required=True)
    p.add_argument("--data", required=True)
    p.add_argument("--report-dir", help="write predictions.csv and regression.png here")
    p.set_defaults(func=cmd_eval)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except _UsageError as exc:
        parser.print_usage(sys.stderr)
        _note(f"{parser.prog}: error: {exc}")
        return EXIT_USAGE
    except TP53Error as exc:
        _note(f"error: {exc}")
        return exc.exit_code
    except ValueError as exc:
        # invalid values that passed argparse (e.g. a bad learning rate)
        _note(f"error: {exc}")
        return EXIT_USAGE
    except FileNotFoundError as exc:
        _note(f"error: {exc}")
        return ModelError.exit_code if getattr(args, "model", None) == exc.filename else InputError.exit_code
    except (OSError, UnicodeDecodeError) as exc:
        _note(f"error: {exc}")
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
