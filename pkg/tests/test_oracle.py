from __future__ import annotations

import numpy as np
import pytest

from dealias.oracle import (
    MAX_DIRECT_WORK,
    OracleReport,
    block_indices,
    direct_convolution,
    padded_dft_slice,
    random_input,
    relative_error,
    residue_indices,
    spectral_convolution,
    symmetrize_hermitian,
)

def test_hand_evaluable_sum():
    np.testing.assert_allclose(direct_convolution([[1, 2], [3, 4]]), [3, 10])

def test_three_inputs():
    # (1 + x)^3 truncated to 3 terms
    np.testing.assert_allclose(direct_convolution([[1, 1, 0]] * 3), [1, 3, 3])

def test_delta(rng):
    g = random_input(rng, (6,))
    delta = np.eye(1, 6)[0]
    np.testing.assert_allclose(direct_convolution([delta, g]), g)
    centered = np.eye(1, 6, 3)[0]
    np.testing.assert_allclose(direct_convolution([centered, g], "centered"), g)

def test_hermitian_small_by_hand():
    # f = g = [a, b] stored, symmetrized [conj b, a, b]
    a, b = 2.0, 1 + 1j
    h = direct_convolution([[a, b], [a, b]], "hermitian")
    full = np.convolve([np.conj(b), a, b], [np.conj(b), a, b])
    np.testing.assert_allclose(h, full[2:4])
    assert abs(h[0].imag) < 1e-15

def test_hermitian_product_is_real_in_physical_space(rng):
    f = random_input(rng, (3,), "hermitian")
    full = np.fft.ifft(np.fft.ifftshift(symmetrize_hermitian(f)))
    # real-valued spectrum of the symmetrized data
    np.testing.assert_allclose(full.imag, 0, atol=1e-14)

def test_symmetrize_2d():
    f = np.array([[1, 2 + 1j], [3, 4j], [3, 5 - 1j]])
    full = symmetrize_hermitian(f)
    assert full.shape == (3, 3)
    np.testing.assert_array_equal(full[:, 1:], f)
    np.testing.assert_array_equal(full[:, 0], np.conj(f[::-1, 1]))

@pytest.mark.parametrize("L", range(1, 17))
@pytest.mark.parametrize("kind", ["complex", "centered"])
def test_direct_and_spectral_routes_agree(L, kind, rng):
    f, g = random_input(rng, (L,)), random_input(rng, (L,))
    N = 2 * L - 1 if kind == "complex" else 2 * L
    assert relative_error(spectral_convolution([f, g], [N], kind), direct_convolution([f, g], kind)) < 1e-12

@pytest.mark.parametrize("L", [1, 3, 5])
def test_direct_and_spectral_routes_agree_hermitian_2d(L, rng):
    shape = (L, (L + 1) // 2)
    f, g = random_input(rng, shape, "hermitian"), random_input(rng, shape, "hermitian")
    expected = direct_convolution([f, g], "hermitian")
    assert relative_error(spectral_convolution([f, g], [2 * L, 2 * L], "hermitian"), expected) < 1e-12

def test_unpadded_slice_is_full_dft(rng):
    f = random_input(rng, (8,))
    np.testing.assert_allclose(padded_dft_slice(f, 8, range(8)), 8 * np.fft.ifft(f), atol=1e-12)

def test_zeros_give_zeros():
    np.testing.assert_array_equal(padded_dft_slice(np.zeros(5), 12, range(12)), np.zeros(12))

def test_slice_indices():
    np.testing.assert_array_equal(residue_indices(3, 4, 1), [1, 4, 7, 10])
    np.testing.assert_array_equal(block_indices(6, 2, 2, 1, 3), [1, 7, 3, 9, 5, 11])

def test_guards(rng):
    with pytest.raises(ValueError, match="limit"):
        padded_dft_slice(np.ones(4), 5000, [0])
    with pytest.raises(ValueError, match="does not fit"):
        padded_dft_slice(np.ones(8), 4, [0])
    big = np.ones(int(MAX_DIRECT_WORK ** 0.5) + 1)
    with pytest.raises(ValueError, match="multiply-adds"):
        direct_convolution([big, big])
    with pytest.raises(ValueError, match="at least 2"):
        direct_convolution([np.ones(3)])
    with pytest.raises(ValueError, match="equal-size"):
        direct_convolution([np.ones(3), np.ones(4)])
    with pytest.raises(ValueError, match="Unsupported kind"):
        direct_convolution([np.ones(3)] * 2, "real")

def test_report():
    report = OracleReport(kind="complex", dims=1, L=6, M=11, m=4, D=1, seed=0, error=3e-13, tolerance=1e-11)
    assert report.passed
    assert report.to_event()["passed"] is True
    assert not OracleReport("complex", 1, 6, 11, 4, 1, 0, error=float("nan"), tolerance=1e-11).passed

def test_relative_error():
    assert relative_error([1, 2], [1, 2]) == 0
    assert relative_error([1, 3], [1, 2]) == pytest.approx(0.5)
    assert relative_error([1e-310], [0]) == pytest.approx(1e-310)
    with pytest.raises(ValueError, match="shape mismatch"):
        relative_error([1], [1, 2])
