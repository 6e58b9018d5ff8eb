import pytest

pytest.importorskip("matplotlib")

from dpmark import bench  # noqa: E402
from dpmark.figures import render_figures  # noqa: E402


def _records():
    out = []
    for method, scale in (("dp", 1.0), ("normal", 2.0)):
        out.append(bench.BenchRecord("x", method, "none", "", 0.0, 44.0, float("inf")))
        for i, qf in enumerate((60, 40, 20), 1):
            out.append(bench.BenchRecord("x", method, "jpeg", f"qf={qf}", scale * i, 44.0, 30.0, None, i))
        out.append(bench.BenchRecord("x", method, "gnoise", "var=0.001", scale, 44.0, 30.0, 3, 4))
    return out


def test_render_writes_pngs(tmp_path):
    paths = render_figures(_records(), tmp_path / "figs")
    assert sorted(p.name for p in paths) == ["ber_gnoise.png", "jpeg_ber.png"]
    for p in paths:
        assert p.read_bytes()[:8] == b"\x89PNG\r\n\x1a\n"


def test_render_empty(tmp_path):
    assert render_figures([], tmp_path) == []
