import math

from hypothesis import given, strategies as st
import numpy as np
import pytest

from structdft.core import (
    OpCount, SupportSet, aliased_spectra, aliased_spectrum, downsample, fft_paper_cost,
    fft_pow2, ifft_pow2, paper_cost_model, random_spectrum, restrict, shift,
    solve_paper_cost, synthesize_signal,
)
from structdft.errors import InvalidInputError

from oracles import aliased_sum, direct_dft

WORKED = (0, 1, 6, 7, 38, 65, 135, 512)


def complex_vec(rng, n):
    return rng.standard_normal(n) + 1j * rng.standard_normal(n)


def test_fft_impulse_and_constant():
    x = np.zeros(8, dtype=complex)
    x[0] = 1
    np.testing.assert_allclose(fft_pow2(x), np.ones(8))
    np.testing.assert_allclose(fft_pow2([1, 1, 1, 1]), [4, 0, 0, 0], atol=1e-15)


@pytest.mark.parametrize("n", [1, 2, 4, 8, 64, 256])
def test_fft_matches_direct_sum(n):
    x = complex_vec(np.random.default_rng(n), n)
    ref = direct_dft(x)
    assert np.linalg.norm(fft_pow2(x) - ref) <= 1e-12 * max(np.linalg.norm(ref), 1)
    inv = direct_dft(x, sign=+1) / n
    assert np.linalg.norm(ifft_pow2(x) - inv) <= 1e-12 * np.linalg.norm(inv)


def test_fft_rejects_bad_lengths():
    for bad in ([], [1, 2, 3], np.zeros(12)):
        with pytest.raises(InvalidInputError):
            fft_pow2(bad)
    with pytest.raises(InvalidInputError):
        fft_pow2([1, 2], direction="sideways")


def test_fft_batches_over_leading_axes():
    x = complex_vec(np.random.default_rng(0), 3 * 16).reshape(3, 16)
    np.testing.assert_allclose(fft_pow2(x), np.stack([fft_pow2(row) for row in x]))


@given(st.integers(0, 16), st.integers(0, 2**31))
def test_round_trip_and_parseval(m, seed):
    x = complex_vec(np.random.default_rng(seed), 1 << m)
    fx = fft_pow2(x)
    assert np.linalg.norm(ifft_pow2(fx) - x) <= 1e-10 * np.linalg.norm(x)
    assert math.isclose(np.sum(abs(x) ** 2), np.sum(abs(fx) ** 2) / x.size, rel_tol=1e-10)


def test_fft_op_counts():
    ops = OpCount()
    fft_pow2(np.ones(1024), ops=ops)
    assert ops.mults == 512 * 10 and ops.adds == 2 * 512 * 10
    assert ops.paper_model == 15360
    before = ops.total
    ifft_pow2(np.ones(1024), ops=ops)
    assert ops.total == 2 * before + 1024


def test_paper_cost_model():
    assert fft_paper_cost(4) == 12
    assert fft_paper_cost(1024) == 15360
    assert solve_paper_cost(8) == 384
    assert paper_cost_model(4, 2) == (12, 5)
    assert solve_paper_cost(1) == 1
    with pytest.raises(InvalidInputError):
        solve_paper_cost(0)


def test_shift_and_downsample_definitions():
    imp = np.zeros(8, dtype=complex)
    imp[0] = 1
    np.testing.assert_array_equal(shift(imp, 0), imp)
    np.testing.assert_array_equal(shift(imp, 1), np.roll(imp, 1))
    np.testing.assert_array_equal(shift(imp, 9), shift(imp, 1))
    f = np.arange(8)
    np.testing.assert_array_equal(downsample(f, 0), f)
    np.testing.assert_array_equal(downsample(f, 2), [0, 4])
    with pytest.raises(InvalidInputError):
        downsample(f, 4)


@given(st.integers(4, 12), st.integers(0, 5000), st.integers(0, 2**31))
def test_shift_phase_identity(m, t, seed):
    n = 1 << m
    f = complex_vec(np.random.default_rng(seed), n)
    ratio = fft_pow2(shift(f, t)) / fft_pow2(f)
    expect = np.exp(-2j * np.pi * ((np.arange(n) * t) % n) / n)
    np.testing.assert_allclose(ratio, expect, rtol=1e-10, atol=1e-10)


@given(st.integers(1, 10), st.data())
def test_aliasing_identity(m, data):
    n = 1 << m
    level = data.draw(st.integers(0, m))
    t = data.draw(st.integers(0, 3 * n))
    f = complex_vec(np.random.default_rng(data.draw(st.integers(0, 2**31))), n)
    ref = aliased_sum(fft_pow2(f), level, t)
    got = aliased_spectrum(f, level, t)
    assert np.linalg.norm(got - ref) <= 1e-10 * np.linalg.norm(ref)


def test_aliasing_worked_example():
    n = 1024
    support = SupportSet(WORKED, n)
    coeffs = random_spectrum(support, np.random.default_rng(3))
    f = synthesize_signal(support, coeffs)
    v0 = aliased_spectrum(f, 2, 0)
    assert abs(v0[0] - (coeffs[0] + coeffs[512])) < 1e-12
    v1 = aliased_spectrum(f, 2, 1)
    assert abs(v1[0] - (coeffs[0] + coeffs[512] * np.exp(-2j * np.pi * 512 / n))) < 1e-12
    np.testing.assert_allclose(aliased_spectrum(f, 10, 0), fft_pow2(f), atol=1e-12)
    rows = aliased_spectra(f, 2, [0, 1])
    np.testing.assert_allclose(rows, np.stack([v0, v1]))
    with pytest.raises(InvalidInputError):
        aliased_spectrum(f, 11)


def test_synthesis():
    dc = synthesize_signal(SupportSet((0,), 16), {0: 1.0})
    np.testing.assert_allclose(dc, np.full(16, 1 / 16))

    full = SupportSet(tuple(range(8)), 8)
    vals = complex_vec(np.random.default_rng(1), 8)
    np.testing.assert_allclose(synthesize_signal(full, dict(enumerate(vals))), np.fft.ifft(vals))

    support = SupportSet(WORKED, 1024)
    coeffs = random_spectrum(support, np.random.default_rng(2))
    spec = fft_pow2(synthesize_signal(support, coeffs))
    got = restrict(spec, support)
    for j in WORKED:
        assert abs(got[j] - coeffs[j]) <= 1e-10 * abs(coeffs[j])
    off = np.delete(spec, list(WORKED))
    assert np.abs(off).max() <= 1e-10

    with pytest.raises(InvalidInputError):
        synthesize_signal(support, {2: 1.0})


def test_support_set_validation():
    s = SupportSet.from_iterable([5, 1, 3], 8)
    assert s.indices == (1, 3, 5) and s.k == 3 and len(s) == 3 and 3 in s
    for bad in ((3, 1), (1, 1), (0, 8), (-1,)):
        with pytest.raises(InvalidInputError):
            SupportSet(bad, 8)
    with pytest.raises(InvalidInputError):
        SupportSet.from_iterable([1, 1], 8)
    with pytest.raises(InvalidInputError):
        SupportSet((0,), 12)


def test_opcount_is_monotone_and_mergeable():
    a, b = OpCount(), OpCount()
    a.count(adds=3, mults=2)
    b.count(divs=1)
    b.paper_model = 7
    a += b
    assert a.as_dict() == {"adds": 3, "mults": 2, "divs": 1, "total": 6, "paper_model": 7}
