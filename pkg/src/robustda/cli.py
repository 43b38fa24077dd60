"""Command-line interface: simulate, fit, predict, diagnose, plot.

Exit codes: 0 success, 1 usage/configuration error, 2 data error,
3 numerical or degeneracy error. All outputs are written atomically.
"""

from __future__ import annotations

import argparse
import os
import sys

import numpy as np

from . import diagnostics as dg
from . import viz
from .data import (
    LabeledDataset,
    SyntheticConfig,
    generate_contaminated_pair,
    load_csv,
    save_csv,
    write_text_atomic,
)
from .discriminant import (
    DASpec,
    fit,
    load_model,
    predict_batch,
    save_model,
)
from .errors import (
    ConfigurationError,
    DegenerateClassError,
    ExactFitError,
    IngestionError,
    PlotError,
    RobustDAError,
    ShapeError,
)
from .estimators import EstimatorConfig

EXIT_USAGE = 1
EXIT_DATA = 2
EXIT_NUMERIC = 3


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise ConfigurationError(message)


def _read_config_file(path) -> dict:
    """Flat key=value file; '#' starts a comment. Values stay strings."""
    out = {}
    try:
        with open(path, encoding="utf-8") as fh:
            for lineno, line in enumerate(fh, start=1):
                line = line.split("#", 1)[0].strip()
                if not line:
                    continue
                if "=" not in line:
                    raise ConfigurationError(f"{path}:{lineno}: expected key=value")
                key, val = (s.strip() for s in line.split("=", 1))
                out[key] = val
        return out
    except OSError as exc:
        raise ConfigurationError(f"cannot read config file: {exc}") from exc


def _resolve(args, key, default, cast):
    """Flag value if given, else config-file value, else the default."""
    flag = getattr(args, key)
    if flag is not None:
        return flag
    cfg = getattr(args, "_config", {})
    if key in cfg:
        try:
            return cast(cfg[key])
        except ValueError as exc:
            raise ConfigurationError(f"config key {key}: {exc}") from exc
    return default


def _vec(text):
    return tuple(float(v) for v in text.split(","))


def build_parser() -> _Parser:
    parser = _Parser(prog="robustda",
                     description="Robust discriminant analysis toolkit")
    sub = parser.add_subparsers(dest="command", required=True)

    sim = sub.add_parser("simulate",
                         help="generate the two-Gaussian contamination experiment")
    sim.add_argument("--out-dir", default=".")
    sim.add_argument("--config", help="key=value file; flags override it")
    sim.add_argument("--seed", type=int, default=None)
    sim.add_argument("--n1", type=int, default=None)
    sim.add_argument("--n2", type=int, default=None)
    sim.add_argument("--swap1", type=int, default=None)
    sim.add_argument("--swap2", type=int, default=None)
    sim.add_argument("--out1", type=int, default=None,
                     help="class-1 cases replaced by outliers")
    sim.add_argument("--out2", type=int, default=None,
                     help="class-2 cases replaced by outliers")

    def add_data_args(p, need_label=True):
        p.add_argument("--data", required=True, help="input CSV")
        p.add_argument("--label-column", default="label")

    fitp = sub.add_parser("fit", help="fit a discriminant model")
    add_data_args(fitp)
    fitp.add_argument("--rule", choices=["linear", "quadratic"], default="quadratic")
    fitp.add_argument("--estimation", choices=["classical", "robust"],
                      default="robust")
    fitp.add_argument("--alpha", type=float, default=0.75)
    fitp.add_argument("--engine", choices=["fastmcd", "exact"], default="fastmcd")
    fitp.add_argument("--n-starts", type=int, default=500)
    fitp.add_argument("--seed", type=int, default=0)
    fitp.add_argument("--cutoff", type=float, default=0.99,
                      help="overall-outlier cutoff probability")
    fitp.add_argument("--out", default="model.json")

    pred = sub.add_parser("predict", help="predict classes for a CSV")
    pred.add_argument("--model", required=True)
    add_data_args(pred)
    pred.add_argument("--out", default="predictions.csv")

    diag = sub.add_parser("diagnose",
                          help="per-case diagnostics, confusion matrices, accuracies")
    diag.add_argument("--model", required=True)
    add_data_args(diag)
    diag.add_argument("--out-dir", default=".")

    plot = sub.add_parser("plot", help="emit SVG plots (and plot-data CSV)")
    plot.add_argument("--model", required=True)
    add_data_args(plot)
    plot.add_argument("--kind", required=True,
                      choices=["scores", "mosaic", "silhouette", "qrp",
                               "classmap", "qq", "scatter"])
    plot.add_argument("--class", dest="class_index", type=int, default=None,
                      help="1-based class for classmap/qq/qrp")
    plot.add_argument("--feature", default=None,
                      help="feature column name for qrp (default: rd_predicted)")
    plot.add_argument("--combined", action="store_true",
                      help="qrp: single combined plot with the average-PAC curve")
    plot.add_argument("--export-csv", action="store_true",
                      help="also write the plot-data CSV next to each SVG")
    plot.add_argument("--out-dir", default=".")
    return parser


def cmd_simulate(args) -> int:
    args._config = _read_config_file(args.config) if args.config else {}
    defaults = SyntheticConfig()
    config = SyntheticConfig(
        n1=_resolve(args, "n1", defaults.n1, int),
        n2=_resolve(args, "n2", defaults.n2, int),
        swap1=_resolve(args, "swap1", defaults.swap1, int),
        swap2=_resolve(args, "swap2", defaults.swap2, int),
        replace1=_resolve(args, "out1", defaults.replace1, int),
        replace2=_resolve(args, "out2", defaults.replace2, int),
        seed=_resolve(args, "seed", defaults.seed, int),
        mean1=_vec(args._config["mean1"]) if "mean1" in args._config else defaults.mean1,
        mean2=_vec(args._config["mean2"]) if "mean2" in args._config else defaults.mean2,
        outlier_spread=float(args._config.get("outlier_spread",
                                              defaults.outlier_spread)),
    )
    clean, contaminated, provenance = generate_contaminated_pair(config)
    os.makedirs(args.out_dir, exist_ok=True)
    save_csv(clean, os.path.join(args.out_dir, "clean.csv"))
    save_csv(contaminated, os.path.join(args.out_dir, "contaminated.csv"))
    prov_lines = ["case,provenance"] + [f"{i},{s}" for i, s in enumerate(provenance)]
    write_text_atomic(os.path.join(args.out_dir, "provenance.csv"),
                      "\n".join(prov_lines) + "\n")
    print(f"wrote clean.csv ({clean.n} cases), contaminated.csv "
          f"({contaminated.n} cases), provenance.csv to {args.out_dir}")
    return 0


def cmd_fit(args) -> int:
    data = load_csv(args.data, args.label_column)
    spec = DASpec(
        rule=args.rule,
        estimation=args.estimation,
        estimator_config=EstimatorConfig(alpha=args.alpha, n_starts=args.n_starts,
                                         seed=args.seed),
        outlier_cutoff_prob=args.cutoff,
        engine=args.engine,
    )
    model = fit(data, spec)
    save_model(model, args.out)
    print(f"fitted {args.estimation} {args.rule} model on {data.n} cases "
          f"({data.G} classes); wrote {args.out}")
    return 0


def cmd_predict(args) -> int:
    model = load_model(args.model)
    data = load_csv(args.data, args.label_column)
    preds = predict_batch(model, data)
    names = model.class_names
    header = (["case", "predicted", "overall_outlier"]
              + [f"score_{c}" for c in names] + [f"rd_{c}" for c in names])
    lines = [",".join(header)]
    for i, pr in enumerate(preds):
        row = [str(i), names[pr.predicted - 1], str(int(pr.overall_outlier))]
        row += [repr(float(v)) for v in pr.scores]
        row += [repr(float(v)) for v in pr.distances]
        lines.append(",".join(row))
    write_text_atomic(args.out, "\n".join(lines) + "\n")
    print(f"wrote predictions for {len(preds)} cases to {args.out}")
    return 0


def cmd_diagnose(args) -> int:
    model = load_model(args.model)
    data = load_csv(args.data, args.label_column)
    fm = dg.fit_farness(model, data)
    diags = dg.compute_diagnostics(model, data, fm)
    os.makedirs(args.out_dir, exist_ok=True)
    write_text_atomic(os.path.join(args.out_dir, "diagnostics.csv"),
                      dg.diagnostics_csv(diags, model.class_names))
    cm_plain = dg.confusion(model, data, with_outlier_class=False)
    cm_ext = dg.confusion(model, data, with_outlier_class=True)
    write_text_atomic(
        os.path.join(args.out_dir, "confusion.txt"),
        cm_plain.to_text() + "\n\nwith outlier class:\n" + cm_ext.to_text() + "\n",
    )
    write_text_atomic(os.path.join(args.out_dir, "confusion.csv"), cm_ext.to_csv())
    acc = dg.accuracy(cm_ext)
    acc_ex = dg.accuracy(cm_ext, exclude_outliers=True)
    per_class, overall = dg.silhouette_summary(diags)
    print(f"accuracy (all cases):        {acc:.4f}")
    print(f"accuracy (outliers removed): {acc_ex:.4f}")
    for g in sorted(per_class):
        print(f"silhouette avg, class {model.class_names[g - 1]}: {per_class[g]:.4f}")
    print(f"silhouette avg, overall: {overall:.4f}")
    if fm.unavailable_classes():
        bad = ", ".join(model.class_names[g - 1] for g in fm.unavailable_classes())
        print(f"note: farness unavailable for class(es): {bad}")
    return 0


def _write_plot(pd, path_base, export_csv):
    write_text_atomic(path_base + ".svg", viz.render_svg(pd))
    if export_csv:
        write_text_atomic(path_base + ".csv", viz.export_plot_csv(pd))


def cmd_plot(args) -> int:
    model = load_model(args.model)
    data = load_csv(args.data, args.label_column)
    fm = dg.fit_farness(model, data)
    diags = dg.compute_diagnostics(model, data, fm)
    os.makedirs(args.out_dir, exist_ok=True)
    base = os.path.join(args.out_dir, args.kind)
    written = []

    if args.kind == "scores":
        pd = viz.score_score_plot(model, data)
        _write_plot(pd, base, args.export_csv)
        written.append(base + ".svg")
    elif args.kind == "mosaic":
        cm = dg.confusion(model, data, with_outlier_class=True)
        _write_plot(viz.mosaic_plot(cm), base, args.export_csv)
        written.append(base + ".svg")
    elif args.kind == "silhouette":
        pd = viz.silhouette_plot(diags, model.class_names)
        _write_plot(pd, base, args.export_csv)
        written.append(base + ".svg")
    elif args.kind == "qrp":
        if args.feature is None:
            feature = np.array([d.rd_predicted for d in diags])
            label = "robust distance to predicted class"
        else:
            if args.feature not in data.feature_names:
                raise ConfigurationError(
                    f"unknown feature column {args.feature!r}; "
                    f"choices: {data.feature_names}"
                )
            feature = data.features[:, data.feature_names.index(args.feature)]
            label = args.feature
        if args.combined:
            pd = viz.quasi_residual_plot(diags, feature, "combined", label,
                                         class_names=model.class_names)
            _write_plot(pd, base, args.export_csv)
            written.append(base + ".svg")
        else:
            targets = ([args.class_index] if args.class_index
                       else range(1, model.G + 1))
            for g in targets:
                pd = viz.quasi_residual_plot(diags, feature, "per_class", label,
                                             given_class=g,
                                             class_names=model.class_names)
                path = f"{base}_class{g}"
                _write_plot(pd, path, args.export_csv)
                written.append(path + ".svg")
    elif args.kind == "classmap":
        targets = ([args.class_index] if args.class_index
                   else [g for g in range(1, model.G + 1) if fm.available(g)])
        for g in targets:
            pd = viz.class_map(diags, fm, g, model.class_names)
            path = f"{base}_class{g}"
            _write_plot(pd, path, args.export_csv)
            written.append(path + ".svg")
    elif args.kind == "qq":
        g = args.class_index or 1
        idx = data.class_rows(g)
        sq = np.array([diags[i].rd_given for i in idx]) ** 2
        pd = viz.qq_plot(dg.qq_data(sq, data.p))
        path = f"{base}_class{g}"
        _write_plot(pd, path, args.export_csv)
        written.append(path + ".svg")
    elif args.kind == "scatter":
        pd = viz.scatter_plot(model, data)
        _write_plot(pd, base, args.export_csv)
        written.append(base + ".svg")

    for path in written:
        print(f"wrote {path}")
    return 0


_COMMANDS = {
    "simulate": cmd_simulate,
    "fit": cmd_fit,
    "predict": cmd_predict,
    "diagnose": cmd_diagnose,
    "plot": cmd_plot,
}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return _COMMANDS[args.command](args)
    except ConfigurationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (IngestionError, FileNotFoundError) as exc:
        print(f"data error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except (DegenerateClassError, ExactFitError, ShapeError, PlotError) as exc:
        print(f"numerical error: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except RobustDAError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


def main_entry():
    sys.exit(main())


if __name__ == "__main__":
    main_entry()
