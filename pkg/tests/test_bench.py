import csv
import io
import math

import numpy as np
import pytest

from dpmark import bench
from dpmark import watermark as wm
from dpmark.attacks import parse_attack_list
from dpmark.pixelcore import write_pgm


def _cover(seed):
    r = np.random.default_rng(seed)
    x = np.add.outer(np.arange(512), np.arange(512)) / 4.0 + 40
    return np.clip(x + r.normal(0, 8, x.shape), 0, 255).round().astype(np.uint8)


@pytest.fixture(scope="module")
def covers():
    return [("a", _cover(1)), ("b", _cover(2))]


@pytest.fixture(scope="module")
def image_dir(tmp_path_factory, covers):
    d = tmp_path_factory.mktemp("imgs")
    for name, img in covers:
        write_pgm(d / f"{name}.pgm", img)
    return d


ATTACKS = "jpeg:qf=50, spnoise:pct=1, avg:k=3"


@pytest.fixture(scope="module")
def suite(image_dir):
    cfg = bench.BenchConfig(images=image_dir, attacks=parse_attack_list(ATTACKS), seed=11)
    records, errors = bench.run_suite(cfg)
    assert errors == []
    return records


def test_parse_config(tmp_path):
    text = """
    # comment
    images = imgs
    methods = dp
    dp_m = 50
    dp_n = 9   # trailing comment
    attacks = jpeg:qf=30, gauss:k=7,sigma=2.5
    seed = 4
    out_csv = out/r.csv
    """
    cfg = bench.parse_config_text(text, tmp_path, {"seed": 9, "out_md": None})
    assert cfg.images == tmp_path / "imgs"
    assert cfg.methods == ("dp",)
    assert cfg.dp == wm.DpParams(50.0, 9.0)
    assert cfg.normal == wm.NormalParams()
    assert [a.cli_name for a in cfg.attacks] == ["jpeg", "gauss"]
    assert cfg.seed == 9
    assert cfg.out_csv == tmp_path / "out" / "r.csv" and cfg.out_md is None


@pytest.mark.parametrize("text", ["", "images = x\nbogus = 1", "images = x\nmethods = svd", "images x"])
def test_parse_config_errors(text):
    with pytest.raises(ValueError):
        bench.parse_config_text(text)


def test_empty_grid_only_psnr_records(make_config, covers):
    records, _ = bench.run_suite(make_config(), images=covers[:1])
    assert [(r.method, r.attack) for r in records] == [("dp", "none"), ("normal", "none")]
    assert all(r.psnr_attack_db == math.inf for r in records)
    assert all(40 < r.psnr_embed_db < 48 for r in records)


def test_one_image_one_attack(make_config, covers):
    cfg = make_config(attacks=parse_attack_list("jpeg:qf=60"))
    records, _ = bench.run_suite(cfg, images=covers[:1])
    assert len(records) == 4
    assert [r.attack for r in records if r.method == "dp"] == ["none", "jpeg"]


def test_record_count(suite):
    assert len(suite) == 2 * 2 * (1 + 3)


def test_seed_only_on_stochastic(suite):
    for r in suite:
        assert (r.seed == 11) == (r.attack == "spnoise")


def test_csv_layout(suite):
    rows = list(csv.reader(io.StringIO(bench.emit_csv(suite).decode())))
    assert rows[0] == bench.CSV_COLUMNS
    assert len(rows) == 1 + len(suite)
    for row in rows[1:]:
        assert row[4].count(".") == 1 and len(row[4].split(".")[1]) == 2
        if row[2] == "none":
            assert row[6] == "inf"
        else:
            assert len(row[6].split(".")[1]) == 2
    # image, grid order, method
    assert [r[:3] for r in rows[1:5]] == [["a", "dp", "none"], ["a", "normal", "none"],
                                          ["a", "dp", "jpeg"], ["a", "normal", "jpeg"]]


def test_csv_header_only_when_empty():
    assert bench.emit_csv([]).decode() == ",".join(bench.CSV_COLUMNS) + "\n"


def test_summary_mean_matches_records(suite):
    for s in bench.summarize(suite):
        vals = [r.ber_percent for r in suite if (r.method, r.attack, r.params) == (s.method, s.attack, s.params)]
        assert s.n == len(vals) == 2
        assert s.mean_ber == pytest.approx(np.mean(vals))
        assert s.std_ber == pytest.approx(np.std(vals))


def test_markdown_tables(suite):
    md = bench.emit_markdown(suite, seed=11)
    assert "Seed: 11" in md
    for kind in ("jpeg", "spnoise", "avg"):
        assert md.count(f"## {bench.TITLES[kind]}") == 1
    assert md.count("| params | dp | normal |") == 3
    assert " +- " in md
    assert "## Embedding quality" in md


def test_rerun_byte_identical(image_dir, suite):
    cfg = bench.BenchConfig(images=image_dir, attacks=parse_attack_list(ATTACKS), seed=11)
    again, _ = bench.run_suite(cfg)
    assert bench.emit_csv(again) == bench.emit_csv(suite)
    assert bench.emit_markdown(again, 11) == bench.emit_markdown(suite, 11)


def test_workers_same_output(image_dir, suite):
    cfg = bench.BenchConfig(images=image_dir, attacks=parse_attack_list(ATTACKS), seed=11, workers=2)
    records, _ = bench.run_suite(cfg)
    assert bench.emit_csv(records) == bench.emit_csv(suite)


def test_seed_changes_noise_rows(image_dir, suite):
    cfg = bench.BenchConfig(images=image_dir, attacks=parse_attack_list("spnoise:pct=5"), seed=12)
    records, _ = bench.run_suite(cfg)
    assert all(r.seed == 12 for r in records if r.attack == "spnoise")


def test_bad_files_skipped(tmp_path, covers):
    write_pgm(tmp_path / "good.pgm", covers[0][1])
    (tmp_path / "broken.pgm").write_bytes(b"P5\n12 12\n255\nxx")
    write_pgm(tmp_path / "small.pgm", np.zeros((256, 256), np.uint8))
    records, errors = bench.run_suite(bench.BenchConfig(images=tmp_path))
    assert {name for name, _ in errors} == {"broken.pgm", "small.pgm"}
    assert {r.image for r in records} == {"good"}


def test_empty_dir_is_error(tmp_path):
    with pytest.raises(ValueError):
        bench.run_suite(bench.BenchConfig(images=tmp_path))


def test_jpeg_curve_and_monotonicity():
    def rec(method, qf, b):
        return bench.BenchRecord("x", method, "jpeg", f"qf={qf}", b, 44.0, 30.0)

    records = [rec("dp", 60, 1.0), rec("dp", 40, 5.0), rec("dp", 20, 4.5),
               rec("normal", 60, 3.0), rec("normal", 40, 0.2)]
    assert bench.jpeg_curve(records)[:3] == [(60, "dp", 1.0), (40, "dp", 5.0), (20, "dp", 4.5)]
    # BER should not rise as QF rises
    issues = bench.jpeg_monotonicity(records)
    assert issues == [("dp", 20, 40, pytest.approx(0.5), True), ("normal", 40, 60, pytest.approx(2.8), False)]
    assert "VIOLATION: normal" in bench.emit_markdown(records)
    assert bench.emit_jpeg_curve_csv(records).decode().splitlines()[0] == "qf,method,mean_ber"


def test_write_outputs(tmp_path, suite):
    cfg = bench.BenchConfig(images=tmp_path, seed=11, out_csv=tmp_path / "r.csv", out_md=tmp_path / "r.md",
                            out_jpeg_curve=tmp_path / "j.csv")
    written = bench.write_outputs(cfg, suite)
    assert len(written) == 3 and all(p.exists() for p in written)
    assert (tmp_path / "r.csv").read_bytes() == bench.emit_csv(suite)


def test_save_attacked(tmp_path, covers):
    cfg = bench.BenchConfig(images=tmp_path, attacks=parse_attack_list("jpeg:qf=50"), methods=("dp",),
                            save_attacked=tmp_path / "att")
    bench.run_suite(cfg, images=covers[:1])
    assert [p.name for p in (tmp_path / "att").iterdir()] == ["a__dp__jpeg_qf=50.pgm"]
