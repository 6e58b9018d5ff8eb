import numpy as np
import pytest

from dpmark import bench
from dpmark.samples import default_logo, desk_images


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture(scope="session")
def logo():
    return default_logo()


@pytest.fixture(scope="session")
def desk():
    """The 12 standard 512x512 desk images as ``[(name, array)]``."""
    return sorted(desk_images().items())


@pytest.fixture(scope="session")
def camera(desk):
    return dict(desk)["camera"]


@pytest.fixture(scope="session")
def desk_dir(tmp_path_factory, desk, logo):
    from dpmark.pixelcore import write_pgm

    root = tmp_path_factory.mktemp("desk")
    (root / "images").mkdir()
    for name, img in desk:
        write_pgm(root / "images" / f"{name}.pgm", img)
    write_pgm(root / "logo.pgm", logo * 255)
    return root


# -- acceptance reporting ------------------------------------------------------

_ACCEPTANCE = []


@pytest.fixture
def criterion():
    """``criterion(n, ok, detail)`` records a pass/fail line, then asserts."""

    def record(n, ok, detail):
        _ACCEPTANCE.append((n, bool(ok), detail))
        assert ok, f"criterion {n}: {detail}"

    return record


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for n, ok, detail in sorted(_ACCEPTANCE, key=lambda t: t[0]):
        terminalreporter.write_line(f"[{'PASS' if ok else 'FAIL'}] {n:>2}: {detail}")


@pytest.fixture(scope="session")
def make_config(tmp_path_factory):
    def make(**kw):
        kw.setdefault("images", tmp_path_factory.mktemp("unused"))
        return bench.BenchConfig(**kw)

    return make
