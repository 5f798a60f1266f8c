"""Command-line entry point.

Subcommands: sample, embed, train, eval, pipeline, variants, kernel-check,
gram, bench.  Every run is reproducible from its master seed; the resolved
configuration is embedded in every output file.  Option precedence is
command-line flag > config file > built-in default.
"""

import argparse
import json
import os
import sys

import numpy as np

from . import bench as bench_mod
from . import figures
from .data import DatasetError, load_train_test, parse_dataset, split_dataset
from .diagnostics import convergence_harness, gram_matrix
from .distance import FeatureParams
from .embedding import (
    EmbeddingFormatError,
    check_same_bank,
    embed,
    read_embeddings,
    write_dense,
    write_svmlight,
)
from .rng import substream
from .sampler import BankFormatError, RandomStringBank, SamplerConfig, build_bank
from .svm import EvalReport, LinearModel, ModelError, evaluate, train

STAGE_EXIT_CODES = {
    "config": 2,
    "ingest": 3,
    "sample": 4,
    "embed": 5,
    "train": 6,
    "eval": 7,
    "diagnostics": 8,
    "bench": 9,
}


class StageError(Exception):
    def __init__(self, stage, message):
        super().__init__(message)
        self.stage = stage


DEFAULTS = {
    "format": "tsv",
    "strategy": "bss",
    "d_max": 10,
    "r": 512,
    "feature": "sf",
    "gamma": 0.1,
    "reg_c": 1.0,
    "epochs": 1000,
    "split_fraction": 0.7,
    "seed": 0,
    "workers": None,
    "out_format": "dense",
}


def load_config_file(path):
    """Flat key=value file; '#' starts a comment, blank lines ignored."""
    out = {}
    try:
        with open(path, encoding="utf-8") as fh:
            for lineno, line in enumerate(fh, start=1):
                line = line.split("#", 1)[0].strip()
                if not line:
                    continue
                if "=" not in line:
                    raise StageError("config", f"{path}:{lineno}: expected key=value")
                k, v = line.split("=", 1)
                out[k.strip()] = v.strip()
        return out
    except OSError as exc:
        raise StageError("config", f"cannot read config file: {exc}") from exc


def resolve_config(args, keys):
    """Merge defaults, config file, and explicit flags for the given keys."""
    filecfg = load_config_file(args.config) if getattr(args, "config", None) else {}
    cfg = {}
    for key in keys:
        val = getattr(args, key, None)
        if val is None and key in filecfg:
            raw = filecfg[key]
            default = DEFAULTS.get(key)
            if isinstance(default, int) and not isinstance(default, bool):
                val = int(raw)
            elif isinstance(default, float):
                val = float(raw)
            else:
                val = raw
        if val is None:
            val = DEFAULTS.get(key)
        cfg[key] = val
    return cfg


def config_json(cfg):
    return json.dumps(cfg, sort_keys=True, separators=(",", ":"))


def _feature_params(cfg):
    try:
        return FeatureParams(map_kind=cfg["feature"], gamma=float(cfg["gamma"]))
    except ValueError as exc:
        raise StageError("config", str(exc)) from exc


def _load_dataset(cfg, require_test=False):
    try:
        if cfg.get("test_path"):
            ds = load_train_test(cfg["train_path"], cfg["test_path"], format=cfg["format"])
        else:
            ds = parse_dataset(cfg["train_path"], format=cfg["format"])
            if require_test:
                ds = split_dataset(ds, float(cfg["split_fraction"]), int(cfg["seed"]))
        return ds
    except (DatasetError, OSError) as exc:
        raise StageError("ingest", str(exc)) from exc


def _build_bank(ds, cfg):
    try:
        sampler_cfg = SamplerConfig(strategy=cfg["strategy"], d_max=int(cfg["d_max"]), seed=int(cfg["seed"]))
        return build_bank(ds, sampler_cfg, int(cfg["r"]))
    except ValueError as exc:
        raise StageError("sample", str(exc)) from exc


def _write_embedding(em, labels, path, cfg):
    header = [f"config {config_json(cfg)}"]
    if cfg.get("out_format", "dense") == "svmlight":
        write_svmlight(em, labels, path, header_lines=header)
    else:
        write_dense(em, labels, path, header_lines=header)


# ---------------------------------------------------------------- subcommands


def cmd_sample(args):
    keys = ["train_path", "test_path", "format", "strategy", "d_max", "r", "seed"]
    cfg = resolve_config(args, keys)
    ds = _load_dataset(cfg)
    bank = _build_bank(ds, cfg)
    bank.save(args.out, extra={"config": config_json(cfg)})
    print(f"wrote bank of {len(bank)} strings to {args.out}")
    return 0


def cmd_embed(args):
    keys = ["train_path", "format", "feature", "gamma", "seed", "workers", "out_format"]
    cfg = resolve_config(args, keys)
    cfg["bank"] = args.bank
    ds = _load_dataset(cfg)
    params = _feature_params(cfg)
    try:
        bank = RandomStringBank.load(args.bank)
        em = embed(ds.train_strings, bank, params, workers=_workers(cfg))
    except (BankFormatError, OSError) as exc:
        raise StageError("embed", str(exc)) from exc
    labels = [ds.label_names[rec.label] for rec in ds.train]
    _write_embedding(em, labels, args.out, cfg)
    print(f"wrote {len(em)}x{em.r} embedding to {args.out}")
    return 0


def _labels_to_ids(tokens, classes=None):
    if classes is None:
        classes = []
        index = {}
        for t in tokens:
            if t not in index:
                index[t] = len(index)
                classes.append(t)
        return [index[t] for t in tokens], tuple(classes)
    index = {str(c): i for i, c in enumerate(classes)}
    try:
        return [index[t] for t in tokens], tuple(classes)
    except KeyError as exc:
        raise StageError("eval", f"label {exc.args[0]!r} not present in the model") from exc


def cmd_train(args):
    keys = ["reg_c", "epochs", "seed"]
    cfg = resolve_config(args, keys)
    cfg["embeddings"] = args.embeddings
    try:
        values, tokens, _ = read_embeddings(args.embeddings)
    except (EmbeddingFormatError, OSError) as exc:
        raise StageError("train", str(exc)) from exc
    ids, classes = _labels_to_ids(tokens)
    try:
        model = train(values, ids, reg_c=float(cfg["reg_c"]), epochs=int(cfg["epochs"]), seed=int(cfg["seed"]), classes=classes)
    except ModelError as exc:
        raise StageError("train", str(exc)) from exc
    model.save(args.out, header_lines=[f"config {config_json(cfg)}"])
    print(f"wrote model ({len(classes)} classes, R={model.r}) to {args.out}")
    return 0


def cmd_eval(args):
    try:
        model = LinearModel.load(args.model)
        values, tokens, _ = read_embeddings(args.embeddings)
    except (ModelError, EmbeddingFormatError, OSError) as exc:
        raise StageError("eval", str(exc)) from exc
    ids, _ = _labels_to_ids(tokens, classes=model.classes)
    try:
        report = evaluate(model, values, ids)
    except ModelError as exc:
        raise StageError("eval", str(exc)) from exc
    payload = report.to_dict()
    payload["config"] = {"model": args.model, "embeddings": args.embeddings}
    text = json.dumps(payload, indent=2)
    print(text)
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text + "\n")
    return 0


def _workers(cfg):
    w = cfg.get("workers")
    return int(w) if w is not None else None


def run_pipeline(cfg, out_dir):
    """Shared pipeline body: ingest -> bank -> embeddings -> model -> report.

    Returns the EvalReport; writes all artifacts under out_dir.
    """
    os.makedirs(out_dir, exist_ok=True)
    ds = _load_dataset(cfg, require_test=True)
    if not ds.test:
        raise StageError("ingest", "pipeline needs a test partition (give test_path or split_fraction)")
    bank = _build_bank(ds, cfg)
    bank.save(os.path.join(out_dir, "bank.txt"), extra={"config": config_json(cfg)})
    params = _feature_params(cfg)
    try:
        em_train = embed(ds.train_strings, bank, params, workers=_workers(cfg))
        em_test = embed(ds.test_strings, bank, params, workers=_workers(cfg))
        check_same_bank(em_train, em_test)
    except (ValueError, EmbeddingFormatError) as exc:
        raise StageError("embed", str(exc)) from exc
    train_labels = [ds.label_names[rec.label] for rec in ds.train]
    test_labels = [ds.label_names[rec.label] for rec in ds.test]
    _write_embedding(em_train, train_labels, os.path.join(out_dir, "train_embeddings.txt"), cfg)
    _write_embedding(em_test, test_labels, os.path.join(out_dir, "test_embeddings.txt"), cfg)
    try:
        model = train(
            em_train,
            [rec.label for rec in ds.train],
            reg_c=float(cfg["reg_c"]),
            epochs=int(cfg["epochs"]),
            seed=int(cfg["seed"]),
            classes=ds.label_names,
        )
    except ModelError as exc:
        raise StageError("train", str(exc)) from exc
    model.save(os.path.join(out_dir, "model.txt"), header_lines=[f"config {config_json(cfg)}"])
    try:
        report = evaluate(model, em_test, [rec.label for rec in ds.test])
    except ModelError as exc:
        raise StageError("eval", str(exc)) from exc
    payload = report.to_dict()
    payload["config"] = cfg
    with open(os.path.join(out_dir, "report.json"), "w", encoding="utf-8") as fh:
        fh.write(json.dumps(payload, indent=2, sort_keys=True) + "\n")
    return report


def cmd_pipeline(args):
    keys = [
        "train_path", "test_path", "format", "split_fraction", "strategy",
        "d_max", "r", "feature", "gamma", "reg_c", "epochs", "seed", "workers",
        "out_format",
    ]
    cfg = resolve_config(args, keys)
    if not cfg.get("train_path"):
        raise StageError("config", "pipeline requires --train-path")
    report = run_pipeline(cfg, args.out_dir)
    print(json.dumps({"accuracy": report.accuracy, "out_dir": args.out_dir}, indent=2))
    return 0


def run_variants(cfg, out_dir):
    """All sampling-strategy x feature-map combinations with shared seeds."""
    rows = []
    for strategy in ("rf", "rfd", "ss", "bss"):
        for feat in ("df", "sf"):
            sub = dict(cfg)
            sub["strategy"] = strategy
            sub["feature"] = feat
            row_dir = os.path.join(out_dir, f"{strategy}-{feat}")
            report = run_pipeline(sub, row_dir)
            rows.append({"strategy": strategy, "feature": feat, "accuracy": report.accuracy})
    return rows


def cmd_variants(args):
    keys = [
        "train_path", "test_path", "format", "split_fraction", "d_max", "r",
        "gamma", "reg_c", "epochs", "seed", "workers", "out_format",
    ]
    cfg = resolve_config(args, keys)
    if not cfg.get("train_path"):
        raise StageError("config", "variants requires --train-path")
    os.makedirs(args.out_dir, exist_ok=True)
    rows = run_variants(cfg, args.out_dir)
    payload = {"config": cfg, "rows": rows}
    with open(os.path.join(args.out_dir, "variants.json"), "w", encoding="utf-8") as fh:
        fh.write(json.dumps(payload, indent=2, sort_keys=True) + "\n")
    with open(os.path.join(args.out_dir, "variants.tsv"), "w", encoding="utf-8") as fh:
        fh.write(f"# config {config_json(cfg)}\n")
        fh.write("strategy\tfeature\taccuracy\n")
        for row in rows:
            fh.write(f"{row['strategy']}\t{row['feature']}\t{row['accuracy']:.4f}\n")
    figures.plot_variants(rows, os.path.join(args.out_dir, "variants.png"))
    for row in rows:
        print(f"{row['strategy']}-{row['feature']}\t{row['accuracy']:.4f}")
    return 0


def cmd_kernel_check(args):
    keys = ["train_path", "test_path", "format", "strategy", "d_max", "gamma", "seed", "workers"]
    cfg = resolve_config(args, keys)
    cfg.update({"pairs": args.pairs, "r_grid": args.r_grid, "r_ref": args.r_ref})
    ds = _load_dataset(cfg)
    r_grid = sorted(int(v) for v in args.r_grid.split(","))
    try:
        params = FeatureParams(map_kind="sf", gamma=float(cfg["gamma"]))
        bank_cfg = SamplerConfig(strategy=cfg["strategy"], d_max=int(cfg["d_max"]), seed=int(cfg["seed"]))
        ref_bank = build_bank(ds, bank_cfg, int(args.r_ref))
        rng = substream(int(cfg["seed"]), "probe-pairs")
        strings = ds.train_strings
        pairs = [
            (strings[int(rng.integers(0, len(strings)))], strings[int(rng.integers(0, len(strings)))])
            for _ in range(args.pairs)
        ]
        report = convergence_harness(pairs, ref_bank, params, r_grid, workers=_workers(cfg))
    except ValueError as exc:
        raise StageError("diagnostics", str(exc)) from exc
    with open(args.out, "w", encoding="utf-8") as fh:
        fh.write(json.dumps({"config": cfg}, sort_keys=True) + "\n")
        for r, mx, mn in zip(report.r_grid, report.max_abs_error, report.mean_abs_error):
            fh.write(json.dumps({"R": r, "max_abs_error": mx, "mean_abs_error": mn}) + "\n")
    figures.plot_convergence(report, os.path.splitext(args.out)[0] + ".png")
    print(f"fitted rate {report.fitted_rate:.3f} over R grid {list(report.r_grid)}")
    return 0


def cmd_gram(args):
    keys = ["train_path", "test_path", "format", "strategy", "d_max", "r", "feature", "gamma", "seed", "workers"]
    cfg = resolve_config(args, keys)
    cfg["probes"] = args.probes
    ds = _load_dataset(cfg)
    params = _feature_params(cfg)
    try:
        bank = _build_bank(ds, cfg)
        rng = substream(int(cfg["seed"]), "gram-probes")
        strings = ds.train_strings
        idx = rng.choice(len(strings), size=min(args.probes, len(strings)), replace=False)
        probes = [strings[int(i)] for i in idx]
        gram = gram_matrix(probes, bank, params, workers=_workers(cfg))
    except ValueError as exc:
        raise StageError("diagnostics", str(exc)) from exc
    eigs = gram.eigenvalues()
    with open(args.out, "w", encoding="utf-8") as fh:
        fh.write(f"# config {config_json(cfg)}\n")
        fh.write(f"# min_eigenvalue {eigs[0]:.6e} max_eigenvalue {eigs[-1]:.6e}\n")
        for row in gram.values:
            fh.write(" ".join("%.12g" % v for v in row) + "\n")
    figures.plot_eigenvalues(eigs, os.path.splitext(args.out)[0] + ".png")
    print(f"min eigenvalue {eigs[0]:.3e}, max eigenvalue {eigs[-1]:.3e}")
    return 0


def cmd_bench(args):
    keys = ["seed"]
    cfg = resolve_config(args, keys)
    grid = [int(v) for v in args.grid.split(",")]
    cfg.update({"axis": args.axis, "grid": grid, "workers": args.workers, "repeats": args.repeats})
    try:
        run = bench_mod.run_scaling(
            args.axis,
            grid,
            num=args.num,
            length=args.length,
            d_max=args.d_max,
            r=args.r,
            repeats=args.repeats,
            workers=args.workers,
            seed=int(cfg["seed"]),
        )
    except ValueError as exc:
        raise StageError("bench", str(exc)) from exc
    with open(args.out, "w", encoding="utf-8") as fh:
        fh.write(f"# config {config_json(cfg)}\n")
        fh.write("size,run,seconds\n")
        for size, times in zip(run.grid, run.all_times):
            for k, t in enumerate(times):
                fh.write(f"{size},{k},{t:.6f}\n")
        fh.write(f"# slope={run.fitted_slope:.4f} r_squared={run.r_squared:.4f}\n")
    figures.plot_scaling(run, os.path.splitext(args.out)[0] + ".png")
    print(f"axis {run.axis}: slope {run.fitted_slope:.3f}, R^2 {run.r_squared:.4f}")
    return 0


# ---------------------------------------------------------------- arg parsing


def _add_common(p, *names):
    if "dataset" in names:
        p.add_argument("--train-path", dest="train_path", help="training dataset file")
        p.add_argument("--test-path", dest="test_path", help="optional pre-split test file")
        p.add_argument("--format", choices=["tsv", "fasta"], help="dataset file format")
    if "sampler" in names:
        p.add_argument("--strategy", choices=["rf", "rfd", "ss", "bss"], help="bank sampling strategy")
        p.add_argument("--d-max", dest="d_max", type=int, help="maximum reference-string length")
    if "feature" in names:
        p.add_argument("--feature", choices=["df", "sf"], help="feature map: raw distance or soft similarity")
        p.add_argument("--gamma", type=float, help="decay rate of the soft feature")
    p.add_argument("--seed", type=int, help="master seed")
    p.add_argument("--config", help="flat key=value config file")


def build_parser():
    parser = argparse.ArgumentParser(
        prog="strembed",
        description="Fixed-dimension embeddings of variable-length strings from edit distances to random reference strings.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("sample", help="generate and save a reference-string bank")
    _add_common(p, "dataset", "sampler")
    p.add_argument("--r", type=int, help="bank size")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_sample)

    p = sub.add_parser("embed", help="embed a dataset against a saved bank")
    _add_common(p, "dataset", "feature")
    p.add_argument("--bank", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--out-format", dest="out_format", choices=["dense", "svmlight"])
    p.add_argument("--workers", type=int)
    p.set_defaults(func=cmd_embed)

    p = sub.add_parser("train", help="train a one-vs-rest linear SVM on an embedding file")
    p.add_argument("--embeddings", required=True)
    p.add_argument("--reg-c", dest="reg_c", type=float)
    p.add_argument("--epochs", type=int)
    p.add_argument("--seed", type=int)
    p.add_argument("--config")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("eval", help="evaluate a saved model on an embedding file")
    p.add_argument("--model", required=True)
    p.add_argument("--embeddings", required=True)
    p.add_argument("--out")
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("pipeline", help="full run: ingest, sample, embed, train, evaluate")
    _add_common(p, "dataset", "sampler", "feature")
    p.add_argument("--split-fraction", dest="split_fraction", type=float)
    p.add_argument("--r", type=int)
    p.add_argument("--reg-c", dest="reg_c", type=float)
    p.add_argument("--epochs", type=int)
    p.add_argument("--workers", type=int)
    p.add_argument("--out-format", dest="out_format", choices=["dense", "svmlight"])
    p.add_argument("--out-dir", dest="out_dir", required=True)
    p.set_defaults(func=cmd_pipeline)

    p = sub.add_parser("variants", help="compare all sampling/feature combinations")
    _add_common(p, "dataset")
    p.add_argument("--split-fraction", dest="split_fraction", type=float)
    p.add_argument("--d-max", dest="d_max", type=int)
    p.add_argument("--r", type=int)
    p.add_argument("--gamma", type=float)
    p.add_argument("--reg-c", dest="reg_c", type=float)
    p.add_argument("--epochs", type=int)
    p.add_argument("--workers", type=int)
    p.add_argument("--out-dir", dest="out_dir", required=True)
    p.set_defaults(func=cmd_variants)

    p = sub.add_parser("kernel-check", help="empirical convergence of the kernel estimate")
    _add_common(p, "dataset", "sampler")
    p.add_argument("--gamma", type=float)
    p.add_argument("--pairs", type=int, default=50)
    p.add_argument("--r-grid", dest="r_grid", default="64,256,1024,4096")
    p.add_argument("--r-ref", dest="r_ref", type=int, default=65536)
    p.add_argument("--workers", type=int)
    p.add_argument("--out", required=True, help="JSON-lines report path")
    p.set_defaults(func=cmd_kernel_check)

    p = sub.add_parser("gram", help="Gram matrix over probe strings with eigenvalue summary")
    _add_common(p, "dataset", "sampler", "feature")
    p.add_argument("--r", type=int)
    p.add_argument("--probes", type=int, default=100)
    p.add_argument("--workers", type=int)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_gram)

    p = sub.add_parser("bench", help="embedding-time scaling along one axis")
    p.add_argument("--axis", choices=["n", "l", "r"], required=True)
    p.add_argument("--grid", required=True, help="comma-separated sizes")
    p.add_argument("--num", type=int, default=2000, help="dataset size when not the swept axis")
    p.add_argument("--length", type=int, default=512, help="string length when not the swept axis")
    p.add_argument("--d-max", dest="d_max", type=int, default=10)
    p.add_argument("--r", type=int, default=256)
    p.add_argument("--repeats", type=int, default=3)
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--seed", type=int)
    p.add_argument("--config")
    p.add_argument("--out", required=True, help="CSV output path")
    p.set_defaults(func=cmd_bench)

    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except StageError as exc:
        print(f"error [{exc.stage}]: {exc}", file=sys.stderr)
        return STAGE_EXIT_CODES.get(exc.stage, 1)


if __name__ == "__main__":
    sys.exit(main())
