import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from dpmark.qim import embed_binary, embed_ternary, extract_binary, extract_ternary

M = 69.1
N = 12.0


# -- brute-force oracles: enumerate lattice points around delta ---------------

def oracle_binary_points(bit, M, delta, span=8):
    k0 = int(np.floor(delta / M))
    c = M / 4 if bit else -M / 4
    return [c + k * M for k in range(k0 - span, k0 + span + 1)]


def oracle_embed_binary(delta, bit, M):
    return min(oracle_binary_points(bit, M, delta), key=lambda p: abs(p - delta))


def oracle_extract_binary(delta, M):
    best = [(abs(p - delta), b) for b in (0, 1) for p in oracle_binary_points(b, M, delta)]
    d = min(best)[0]
    return 1 if (d, 1) in best else 0


def oracle_embed_ternary(delta, s, N, span=8):
    q0 = int(np.floor(delta / N))
    pts = [q * N for q in range(q0 - span, q0 + span + 1) if (q - s) % 3 == 0]
    return min(pts, key=lambda p: abs(p - delta))


# -- examples -----------------------------------------------------------------

def test_binary_examples():
    assert embed_binary(7 * M / 8, 1, M) == pytest.approx(5 * M / 4)
    assert embed_binary(0.0, 1, M) == pytest.approx(M / 4)
    assert embed_binary(0.0, 0, M) == pytest.approx(-M / 4)
    assert extract_binary(0.3 * M, M) == 1
    assert extract_binary(-M / 4, M) == 0
    assert extract_binary(M / 4 + 0.2 * M, M) == 1


def test_binary_tie_prefers_one():
    assert extract_binary(0.0, M) == 1
    assert extract_binary(M / 2, M) == 1
    assert extract_binary(-M / 2, M) == 1


def test_ternary_examples():
    assert embed_ternary(0.0, 0, N) == 0
    assert embed_ternary(0.0, 1, N) == pytest.approx(N)
    assert embed_ternary(1.4 * N, -1, N) == pytest.approx(2 * N)
    assert extract_ternary(1.4 * N, N) == 1
    assert extract_ternary(-N, N) == -1
    assert extract_ternary(2 * N, N) == -1


def test_ternary_tie_rounds_up():
    assert extract_ternary(0.5 * N, N) == 1
    assert extract_ternary(-0.5 * N, N) == 0


@pytest.mark.parametrize("fn", [embed_binary, embed_ternary])
def test_nonpositive_step(fn):
    with pytest.raises(ValueError):
        fn(1.0, 1, 0.0)
    with pytest.raises(ValueError):
        fn(1.0, 1, -2.0)


def test_nonpositive_step_extract():
    with pytest.raises(ValueError):
        extract_binary(1.0, 0)
    with pytest.raises(ValueError):
        extract_ternary(1.0, -1)


# -- oracle agreement ---------------------------------------------------------

def test_binary_matches_enumeration(rng):
    for delta in rng.uniform(-5 * M, 5 * M, 500):
        for bit in (0, 1):
            assert embed_binary(delta, bit, M) == pytest.approx(oracle_embed_binary(delta, bit, M), abs=1e-9)
        assert extract_binary(delta, M) == oracle_extract_binary(delta, M)


def test_ternary_matches_enumeration(rng):
    for delta in rng.uniform(-8 * N, 8 * N, 500):
        for s in (-1, 0, 1):
            assert embed_ternary(delta, s, N) == pytest.approx(oracle_embed_ternary(delta, s, N), abs=1e-9)


def test_vectorised_agrees_with_scalar(rng):
    deltas = rng.uniform(-300, 300, 200)
    bits = rng.integers(0, 2, 200)
    vec = embed_binary(deltas, bits, M)
    assert np.allclose(vec, [embed_binary(d, b, M) for d, b in zip(deltas, bits)])
    syms = rng.integers(-1, 2, 200)
    vec = embed_ternary(deltas, syms, N)
    assert np.array_equal(extract_ternary(vec, N), syms)


# -- properties ---------------------------------------------------------------

finite = st.floats(-1e4, 1e4, allow_nan=False)


@given(finite, st.integers(0, 1), st.floats(0.5, 200))
def test_binary_embed_properties(delta, bit, m):
    out = embed_binary(delta, bit, m)
    assert abs(out - delta) <= m / 2 + 1e-9
    assert extract_binary(out, m) == bit
    assert embed_binary(out, bit, m) == pytest.approx(out, abs=1e-9)


@given(finite, st.integers(-1, 1), st.floats(0.5, 200))
def test_ternary_embed_properties(delta, s, n):
    out = embed_ternary(delta, s, n)
    assert abs(out - delta) <= 1.5 * n + 1e-9
    assert extract_ternary(out, n) == s
    assert embed_ternary(out, s, n) == pytest.approx(out, abs=1e-9)


@given(finite, st.integers(0, 1), st.floats(-0.2499, 0.2499))
def test_binary_survives_quarter_step(delta, bit, frac):
    assert extract_binary(embed_binary(delta, bit, M) + frac * M, M) == bit


@given(finite, st.integers(-1, 1), st.floats(-0.4999, 0.4999))
def test_ternary_survives_half_step(delta, s, frac):
    assert extract_ternary(embed_ternary(delta, s, N) + frac * N, N) == s


def test_distortion_bounds_grid():
    deltas = np.arange(-4 * M, 4 * M, M / 97)
    for bit in (0, 1):
        assert np.abs(embed_binary(deltas, bit, M) - deltas).max() <= M / 2 + 1e-9
    for s in (-1, 0, 1):
        assert np.abs(embed_ternary(deltas, s, N) - deltas).max() <= 1.5 * N + 1e-9
