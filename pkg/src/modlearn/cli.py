"""Command line interface.

Every subcommand exits 0 on success; failures print a single
``error: <message>`` line on stderr and exit nonzero. Tabular output is
UTF-8 CSV with LF line endings and 17-significant-digit floats.
"""

import argparse
import sys
from pathlib import Path

import numpy as np

from modlearn import dataset, encoders, fourier, harness, mlp


def _add_run_flags(parser):
    parser.add_argument("--config", help="flat key=value config file")
    parser.add_argument("--p", type=int)
    parser.add_argument("--encoder", choices=encoders.KINDS)
    parser.add_argument("--model", choices=harness.MODEL_KINDS)
    parser.add_argument("--count", type=int)
    parser.add_argument("--train-fraction", type=float, dest="train_fraction")
    parser.add_argument("--replicate-seeds", dest="replicate_seeds",
                        help="comma-separated seeds, e.g. 1,2,3")
    parser.add_argument("--round-tolerance", type=float, dest="round_tolerance")
    parser.add_argument("--pair-count", dest="pair_count")
    parser.add_argument("--sine-only", dest="sine_only", action="store_const", const="true")
    parser.add_argument("--hidden", help="comma-separated layer sizes, e.g. 64,32")
    parser.add_argument("--learning-rate", type=float, dest="learning_rate")
    parser.add_argument("--epochs", type=int)
    parser.add_argument("--batch-size", type=int, dest="batch_size")
    parser.add_argument("--validation-fraction", type=float, dest="validation_fraction")
    parser.add_argument("--output-activation", choices=mlp.OUTPUT_ACTIVATIONS,
                        dest="output_activation")


def _config_from_args(args):
    mapping = {}
    if args.config:
        mapping.update(harness.read_config_file(args.config))
    for name in ("p", "encoder", "model", "count", "train_fraction", "replicate_seeds",
                 "round_tolerance", "pair_count", "sine_only", "hidden", "learning_rate",
                 "epochs", "batch_size", "validation_fraction", "output_activation"):
        value = getattr(args, name)
        if value is not None:
            mapping[name] = value if isinstance(value, str) else harness._fmt(value)
    return harness.config_from_mapping(mapping)


def cmd_generate(args):
    d = dataset.generate(args.seed, args.count, args.p)
    dataset.write_csv(d, args.out)
    print(args.out)
    return 0


def cmd_encode(args):
    d = dataset.read_csv(args.data, p=args.p)
    features = encoders.encode_dataset(d, args.kind)
    encoders.write_features_csv(features, d.ys, args.out)
    print(args.out)
    return 0


def cmd_fit_fourier(args):
    d = dataset.read_csv(args.data, p=args.p)
    pair_count = None if args.pair_count in (None, "none") else int(args.pair_count)
    model = fourier.FourierRegressionClassifier(
        p=d.p, pair_count=pair_count, sine_only=args.sine_only,
        round_tolerance=args.round_tolerance,
    ).fit(d.xs, d.ys)
    harness.atomic_write_text(args.out, model.to_text())
    print(f"r_squared={model.diagnostics_.r_squared:.17g} "
          f"rank_warning={str(model.diagnostics_.rank_warning).lower()}")
    return 0


def cmd_fit_mlp(args):
    X, y = encoders.read_features_csv(args.features)
    hidden = tuple(int(v) for v in args.hidden.split(",")) if args.hidden else ()
    model = mlp.MlpClassifier(
        hidden=hidden, output_activation=args.output_activation,
        learning_rate=args.learning_rate, epochs=args.epochs,
        batch_size=args.batch_size, seed=args.seed,
        validation_fraction=args.validation_fraction,
    ).fit(X * args.input_scale, y)
    harness.atomic_write_text(args.out, model.to_text())
    if args.history:
        model.write_history_csv(args.history)
    last = model.training_history_[-1]
    print(f"loss={last.loss:.17g} val_accuracy={last.val_accuracy:.17g}")
    return 0


def cmd_evaluate(args):
    text = Path(args.model).read_text(encoding="utf-8")
    first = text.strip().splitlines()[0]
    if first == "model=fourier":
        if not args.data:
            raise ValueError("a fourier model needs --data (dataset CSV)")
        model = fourier.FourierRegressionClassifier.from_text(text)
        try:
            d = dataset.read_csv(args.data)  # sidecar modulus, when present
        except ValueError as exc:
            if "modulus" not in str(exc):
                raise
            d = dataset.read_csv(args.data, p=model.p)
        accuracy = fourier.evaluate_accuracy(model, d)
    elif first == "model=mlp":
        if not args.features:
            raise ValueError("an mlp model needs --features (features CSV)")
        model = mlp.MlpClassifier.from_text(text)
        X, y = encoders.read_features_csv(args.features)
        accuracy = float(np.mean(model.predict(X * args.input_scale) == y))
    else:
        raise ValueError(f"unrecognized model file {args.model}")
    print(f"{accuracy:.17g}")
    return 0


def cmd_run(args):
    config = _config_from_args(args)
    report = harness.run(config)
    harness.write_report(report, args.out)
    print(f"mean_accuracy={report.mean_accuracy:.17g} "
          f"std_accuracy={report.std_accuracy:.17g}")
    return 0


def cmd_reproduce_table(args):
    result = harness.reproduce_table(args.name, args.outdir)
    print(f"{Path(args.outdir) / (result.name + '.csv')} "
          f"all_pass={str(result.all_pass).lower()}")
    return 0


def cmd_emit_plot_data(args):
    rows = harness.emit_plot_data(args.kind, args.p, (args.start, args.stop, args.step))
    lines = ["x,value"]
    lines.extend(f"{x:.17g},{value:.17g}" for x, value in rows)
    text = "\n".join(lines) + "\n"
    if args.out:
        harness.atomic_write_text(args.out, text)
        print(args.out)
    else:
        sys.stdout.write(text)
    return 0


def build_parser():
    parser = argparse.ArgumentParser(prog="modlearn",
                                     description="Residue-mod-p classification benchmarks")
    sub = parser.add_subparsers(dest="command", required=True)

    p_gen = sub.add_parser("generate", help="sample a labeled dataset to CSV")
    p_gen.add_argument("--seed", type=int, required=True)
    p_gen.add_argument("--count", type=int, required=True)
    p_gen.add_argument("--p", type=int, required=True)
    p_gen.add_argument("--out", required=True)
    p_gen.set_defaults(func=cmd_generate)

    p_enc = sub.add_parser("encode", help="encode a dataset CSV into features")
    p_enc.add_argument("--data", required=True)
    p_enc.add_argument("--kind", required=True, choices=encoders.KINDS)
    p_enc.add_argument("--p", type=int)
    p_enc.add_argument("--out", required=True)
    p_enc.set_defaults(func=cmd_encode)

    p_ff = sub.add_parser("fit-fourier", help="fit the periodic-basis regression")
    p_ff.add_argument("--data", required=True)
    p_ff.add_argument("--p", type=int)
    p_ff.add_argument("--round-tolerance", type=float, default=fourier.DEFAULT_ROUND_TOLERANCE,
                      dest="round_tolerance")
    p_ff.add_argument("--pair-count", dest="pair_count")
    p_ff.add_argument("--sine-only", action="store_true", dest="sine_only")
    p_ff.add_argument("--out", required=True)
    p_ff.set_defaults(func=cmd_fit_fourier)

    p_fm = sub.add_parser("fit-mlp", help="train the feedforward network on features")
    p_fm.add_argument("--features", required=True)
    p_fm.add_argument("--hidden", default="64,32")
    p_fm.add_argument("--output-activation", default="sigmoid", choices=mlp.OUTPUT_ACTIVATIONS,
                      dest="output_activation")
    p_fm.add_argument("--learning-rate", type=float, default=0.05, dest="learning_rate")
    p_fm.add_argument("--epochs", type=int, default=60)
    p_fm.add_argument("--batch-size", type=int, default=64, dest="batch_size")
    p_fm.add_argument("--seed", type=int, default=0)
    p_fm.add_argument("--validation-fraction", type=float, default=0.1,
                      dest="validation_fraction")
    p_fm.add_argument("--input-scale", type=float, default=1.0, dest="input_scale")
    p_fm.add_argument("--history")
    p_fm.add_argument("--out", required=True)
    p_fm.set_defaults(func=cmd_fit_mlp)

    p_ev = sub.add_parser("evaluate", help="accuracy of a saved model on held-out data")
    p_ev.add_argument("--model", required=True)
    p_ev.add_argument("--data")
    p_ev.add_argument("--features")
    p_ev.add_argument("--input-scale", type=float, default=1.0, dest="input_scale")
    p_ev.set_defaults(func=cmd_evaluate)

    p_run = sub.add_parser("run", help="full experiment: generate, encode, fit, evaluate")
    _add_run_flags(p_run)
    p_run.add_argument("--out", required=True, help="report CSV path")
    p_run.set_defaults(func=cmd_run)

    p_tab = sub.add_parser("reproduce-table", help="re-run a pre-registered result table")
    p_tab.add_argument("--name", required=True, choices=harness.TABLE_NAMES)
    p_tab.add_argument("--outdir", required=True)
    p_tab.set_defaults(func=cmd_reproduce_table)

    p_plot = sub.add_parser("emit-plot-data", help="CSV of curve values over a grid")
    p_plot.add_argument("--kind", required=True, choices=harness.PLOT_KINDS)
    p_plot.add_argument("--p", type=int, required=True)
    p_plot.add_argument("--start", type=float, required=True)
    p_plot.add_argument("--stop", type=float, required=True)
    p_plot.add_argument("--step", type=float, required=True)
    p_plot.add_argument("--out")
    p_plot.set_defaults(func=cmd_emit_plot_data)

    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except Exception as exc:  # single machine-parsable error line
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
