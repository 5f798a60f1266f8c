import json
import os

import pytest

from strembed.cli import main
from surrogate import make_splice_like

from strembed.data import write_dataset


@pytest.fixture(scope="module")
def tiny_files(tmp_path_factory):
    root = tmp_path_factory.mktemp("tiny")
    ds = make_splice_like(n=240, seed=5)
    train_path = root / "train.tsv"
    write_dataset(ds.train, ds.label_names, str(train_path))
    return {"root": root, "train": str(train_path)}


def _run(argv):
    return main(argv)


def test_sample_embed_train_eval_chain(tiny_files, tmp_path):
    bank = str(tmp_path / "bank.txt")
    emb = str(tmp_path / "train.emb")
    model = str(tmp_path / "model.txt")
    report = str(tmp_path / "report.json")
    assert _run(["sample", "--train-path", tiny_files["train"], "--strategy", "ss",
                 "--d-max", "20", "--r", "64", "--seed", "3", "--out", bank]) == 0
    assert _run(["embed", "--train-path", tiny_files["train"], "--bank", bank,
                 "--feature", "sf", "--gamma", "0.02", "--out", emb]) == 0
    assert _run(["train", "--embeddings", emb, "--reg-c", "100", "--epochs", "100",
                 "--seed", "0", "--out", model]) == 0
    assert _run(["eval", "--model", model, "--embeddings", emb, "--out", report]) == 0
    rep = json.loads(open(report).read())
    assert 0.0 <= rep["accuracy"] <= 1.0
    assert len(rep["confusion"]) == 3


def test_bank_file_embeds_config(tiny_files, tmp_path):
    bank = tmp_path / "bank.txt"
    _run(["sample", "--train-path", tiny_files["train"], "--strategy", "rf",
          "--d-max", "5", "--r", "8", "--seed", "1", "--out", str(bank)])
    header = bank.read_text().splitlines()[0]
    assert "config=" in header
    assert header.startswith("RSE-BANK v1 ")


def test_pipeline_writes_all_artifacts(tiny_files, tmp_path):
    out = str(tmp_path / "run")
    code = _run(["pipeline", "--train-path", tiny_files["train"], "--split-fraction", "0.7",
                 "--strategy", "bss", "--d-max", "30", "--r", "32", "--feature", "sf",
                 "--gamma", "0.02", "--reg-c", "10", "--epochs", "50", "--seed", "4",
                 "--out-dir", out])
    assert code == 0
    for name in ("bank.txt", "train_embeddings.txt", "test_embeddings.txt", "model.txt", "report.json"):
        assert os.path.exists(os.path.join(out, name)), name
    payload = json.loads(open(os.path.join(out, "report.json")).read())
    assert "config" in payload and payload["config"]["seed"] == 4


def test_pipeline_rerun_byte_identical(tiny_files, tmp_path):
    args = ["pipeline", "--train-path", tiny_files["train"], "--split-fraction", "0.7",
            "--strategy", "ss", "--d-max", "15", "--r", "16", "--feature", "df",
            "--reg-c", "1", "--epochs", "30", "--seed", "7"]
    out1, out2 = str(tmp_path / "a"), str(tmp_path / "b")
    assert _run(args + ["--out-dir", out1]) == 0
    assert _run(args + ["--out-dir", out2]) == 0
    for name in ("bank.txt", "train_embeddings.txt", "test_embeddings.txt", "model.txt", "report.json"):
        b1 = open(os.path.join(out1, name), "rb").read()
        b2 = open(os.path.join(out2, name), "rb").read()
        assert b1 == b2, name


def test_pipeline_minimal_r_smoke(tiny_files, tmp_path):
    out = str(tmp_path / "smoke")
    code = _run(["pipeline", "--train-path", tiny_files["train"], "--split-fraction", "0.7",
                 "--strategy", "rf", "--d-max", "5", "--r", "4", "--feature", "sf",
                 "--gamma", "0.1", "--epochs", "20", "--seed", "0", "--out-dir", out])
    assert code == 0
    assert os.path.exists(os.path.join(out, "report.json"))


def test_missing_dataset_exit_code(tmp_path):
    code = _run(["pipeline", "--train-path", str(tmp_path / "nope.tsv"),
                 "--out-dir", str(tmp_path / "out")])
    assert code == 3  # ingest stage


def test_bad_config_exit_code(tiny_files, tmp_path):
    code = _run(["pipeline", "--out-dir", str(tmp_path / "out")])
    assert code == 2  # config stage


def test_config_file_and_flag_precedence(tiny_files, tmp_path):
    cfg = tmp_path / "run.cfg"
    cfg.write_text(f"train_path={tiny_files['train']}\nstrategy=rf\nd_max=5\nr=8\nseed=9\n")
    bank = tmp_path / "bank.txt"
    # flag overrides the file's strategy
    assert _run(["sample", "--config", str(cfg), "--strategy", "ss",
                 "--out", str(bank)]) == 0
    assert "strategy=SS" in bank.read_text().splitlines()[0]


def test_variants_all_rows(tiny_files, tmp_path):
    out = str(tmp_path / "variants")
    code = _run(["variants", "--train-path", tiny_files["train"], "--split-fraction", "0.7",
                 "--d-max", "20", "--r", "16", "--gamma", "0.02", "--reg-c", "10",
                 "--epochs", "30", "--seed", "2", "--out-dir", out])
    assert code == 0
    payload = json.loads(open(os.path.join(out, "variants.json")).read())
    combos = {(r["strategy"], r["feature"]) for r in payload["rows"]}
    assert combos == {(s, f) for s in ("rf", "rfd", "ss", "bss") for f in ("df", "sf")}
    assert os.path.exists(os.path.join(out, "variants.tsv"))
    assert os.path.exists(os.path.join(out, "variants.png"))


def test_variants_deterministic(tiny_files, tmp_path):
    args = ["variants", "--train-path", tiny_files["train"], "--split-fraction", "0.7",
            "--d-max", "10", "--r", "8", "--gamma", "0.05", "--epochs", "20", "--seed", "6"]
    out1, out2 = str(tmp_path / "v1"), str(tmp_path / "v2")
    assert _run(args + ["--out-dir", out1]) == 0
    assert _run(args + ["--out-dir", out2]) == 0
    rows1 = json.loads(open(os.path.join(out1, "variants.json")).read())["rows"]
    rows2 = json.loads(open(os.path.join(out2, "variants.json")).read())["rows"]
    assert rows1 == rows2


def test_kernel_check_report(tiny_files, tmp_path):
    out = str(tmp_path / "kc.jsonl")
    code = _run(["kernel-check", "--train-path", tiny_files["train"], "--strategy", "rf",
                 "--d-max", "10", "--gamma", "0.1", "--seed", "1", "--pairs", "10",
                 "--r-grid", "16,64,256", "--r-ref", "4096", "--out", out])
    assert code == 0
    lines = [json.loads(ln) for ln in open(out)]
    assert "config" in lines[0]
    rows = lines[1:]
    assert [row["R"] for row in rows] == [16, 64, 256]
    assert all(row["max_abs_error"] >= 0 for row in rows)
    assert os.path.exists(str(tmp_path / "kc.png"))


def test_kernel_check_r_ref_too_small(tiny_files, tmp_path):
    code = _run(["kernel-check", "--train-path", tiny_files["train"], "--r-grid", "16,64",
                 "--r-ref", "128", "--out", str(tmp_path / "kc.jsonl")])
    assert code == 8  # diagnostics stage


def test_gram_output(tiny_files, tmp_path):
    out = str(tmp_path / "gram.txt")
    code = _run(["gram", "--train-path", tiny_files["train"], "--strategy", "ss",
                 "--d-max", "15", "--r", "32", "--feature", "sf", "--gamma", "0.05",
                 "--probes", "20", "--seed", "0", "--out", out])
    assert code == 0
    lines = open(out).read().splitlines()
    assert lines[1].startswith("# min_eigenvalue")
    data = [ln for ln in lines if not ln.startswith("#")]
    assert len(data) == 20 and len(data[0].split()) == 20


def test_bench_csv(tmp_path):
    out = str(tmp_path / "bench.csv")
    code = _run(["bench", "--axis", "n", "--grid", "20,40,80,160", "--length", "32",
                 "--r", "16", "--repeats", "2", "--workers", "1", "--seed", "0", "--out", out])
    assert code == 0
    lines = open(out).read().splitlines()
    assert lines[1] == "size,run,seconds"
    rows = [ln for ln in lines if ln and not ln.startswith("#") and ln != "size,run,seconds"]
    assert len(rows) == 8  # 4 sizes x 2 repeats
    assert lines[-1].startswith("# slope=")
    assert os.path.exists(str(tmp_path / "bench.png"))
