import json

import pytest

from cifa.cli import EXIT_CODES, build_parser, main
from cifa.errors import InvalidSpec, IoError



def report(path):
    return json.loads((path / "report.json").read_text())


@pytest.fixture
def generated(tmp_path):
    assert main(["generate", "--out", str(tmp_path / "data"), "--seed", "7"]) == 0
    return tmp_path / "data"


def test_generate_layout(generated):
    names = sorted(p.name for p in generated.iterdir())
    assert names[:5] == [f"block_{n:03d}.csv" for n in range(5)]
    assert {"meta.json", "truth.json", "report.json", "report.csv"} <= set(names)


def test_generate_invalid_spec(tmp_path, capsys):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"c": 9}))
    code = main(["generate", "--config", str(cfg), "--out", str(tmp_path / "x")])
    assert code == EXIT_CODES[InvalidSpec]
    assert "c <= min(R)" in capsys.readouterr().err


def test_generate_deterministic(tmp_path):
    for name in ("a", "b"):
        assert main(["generate", "--out", str(tmp_path / name), "--seed", "3"]) == 0
    for f in ("block_000.csv", "block_004.csv", "truth.json"):
        assert (tmp_path / "a" / f).read_bytes() == (tmp_path / "b" / f).read_bytes()


def test_cobe_and_cobec(generated, tmp_path):
    assert main(["cobe", "--input", str(generated), "--out", str(tmp_path / "r1"), "--epsilon", "1e-6"]) == 0
    assert report(tmp_path / "r1")["metrics"]["c"] == 3
    assert main(["cobe", "--input", str(generated), "--out", str(tmp_path / "r2"), "--c", "3"]) == 0
    rep = report(tmp_path / "r2")
    assert rep["metrics"]["mode"] == "cobec"
    assert (tmp_path / "r2" / "a_bar.csv").is_file()
    assert (tmp_path / "r2" / "b_bar_004.csv").is_file()


def test_cobe_projected(tmp_path):
    cfg = tmp_path / "gen.json"
    cfg.write_text(json.dumps({"I": 5000, "snr_db": 20}))
    assert main(["generate", "--config", str(cfg), "--out", str(tmp_path / "big")]) == 0
    run_cfg = tmp_path / "run.json"
    run_cfg.write_text(json.dumps({"rank": 8, "auto": True, "auto_ceiling": 0.5}))
    assert main(["cobe", "--config", str(run_cfg), "--input", str(tmp_path / "big"), "--project", "100", "--out", str(tmp_path / "p")]) == 0
    rep = report(tmp_path / "p")
    assert rep["metrics"]["c"] == 3
    assert all(rep["metrics"]["accepted"])
    assert rep["time"]["extract"] > 0


def test_split_and_cnfe(generated, tmp_path):
    assert main(["split", "--input", str(generated), "--out", str(tmp_path / "s")]) == 0
    assert (tmp_path / "s" / "individual_000.csv").is_file()
    assert main(["cnfe", "--input", str(generated), "--out", str(tmp_path / "n")]) == 0
    assert report(tmp_path / "n")["metrics"]["r"] == 3


def test_bench_single_run(tmp_path):
    assert main(["bench-linked-bss", "--runs", "1", "--out", str(tmp_path / "b")]) == 0
    header = (tmp_path / "b" / "report.csv").read_text().splitlines()[0]
    assert header == "method,SIR1,SIR2,SIR3,SIR4"
    sir = report(tmp_path / "b")["metrics"]["sir"]
    assert all(c["mean"] > p["mean"] for c, p in zip(sir["COBE"], sir["PCA"]))


def test_bench_snr_sweep_gap_grows(tmp_path):
    cfg = tmp_path / "c.json"
    cfg.write_text(json.dumps({"snr_sweep": [10, 20, 30, 40]}))
    assert main(["bench-linked-bss", "--config", str(cfg), "--runs", "2", "--out", str(tmp_path / "b")]) == 0
    gaps = [row["gap"] for row in report(tmp_path / "b")["metrics"]["sweep"]]
    assert all(b > a for a, b in zip(gaps, gaps[1:]))


def test_cluster_demo(tmp_path):
    assert main(["cluster-demo", "--out", str(tmp_path / "c")]) == 0
    m = report(tmp_path / "c")["metrics"]
    assert m["with"]["accuracy"] > m["without"]["accuracy"]
    lines = (tmp_path / "c" / "embedding.csv").read_text().splitlines()
    assert lines[0] == "x,y,label,truth"
    assert len(lines) == 121


def test_classify_demo(tmp_path):
    assert main(["classify-demo", "--runs", "20", "--out", str(tmp_path / "c")]) == 0
    m = report(tmp_path / "c")["metrics"]
    assert m["train_fraction"] == 0.5
    assert {"mean", "std"} <= set(m["accuracy"])


def test_missing_input(tmp_path, capsys):
    code = main(["cluster-demo", "--input", str(tmp_path / "missing"), "--out", str(tmp_path / "o")])
    assert code == EXIT_CODES[IoError]
    assert "IoError" in capsys.readouterr().err
    assert main(["cobe", "--out", str(tmp_path / "o")]) != 0


def test_bad_config(tmp_path):
    cfg = tmp_path / "bad.json"
    cfg.write_text("{not json")
    assert main(["generate", "--config", str(cfg), "--out", str(tmp_path / "o")]) == 5


def test_help_documents_exit_codes(capsys):
    with pytest.raises(SystemExit):
        build_parser().parse_args(["--help"])
    out = capsys.readouterr().out
    for cls, code in EXIT_CODES.items():
        assert f"{code:<3} {cls.__name__}" in out
    assert len(set(EXIT_CODES.values())) == len(EXIT_CODES)


@pytest.mark.parametrize(
    "args",
    [
        ["generate", "--seed", "5"],
        ["bench-linked-bss", "--runs", "2", "--seed", "5"],
        ["cluster-demo", "--seed", "5"],
        ["classify-demo", "--runs", "3", "--seed", "5"],
    ],
)
def test_metric_sections_repeat(tmp_path, args):
    outs = []
    for name in ("a", "b"):
        assert main(args + ["--out", str(tmp_path / name)]) == 0
        rep = report(tmp_path / name)
        outs.append(json.dumps(rep["metrics"], sort_keys=True))
        assert (tmp_path / name / "report.csv").is_file()
    assert outs[0] == outs[1]
    assert (tmp_path / "a" / "report.csv").read_bytes() == (tmp_path / "b" / "report.csv").read_bytes()
