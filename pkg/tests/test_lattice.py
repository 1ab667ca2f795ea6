from fractions import Fraction

import numpy as np
import pytest

from tisim.lattice import (
    Circulant,
    DenseCapError,
    LatticeMismatchError,
    LatticeSpec,
    Sector,
    convolve,
    dense_realize,
    fourier_symbol,
    shift_coeffs,
)


def lat(d=1, m=4):
    return LatticeSpec(d, m)


def test_site_count_and_offsets():
    L = LatticeSpec(2, 3)
    assert L.N == 9
    assert len(list(L.offsets())) == 9
    assert L.offset((4, -1)) == (1, 2)
    assert L.neg((1, 2)) == (2, 1)
    assert L.add((2, 2), (2, 1)) == (1, 0)


def test_signed_range_keeps_half_positive():
    L = LatticeSpec(1, 4)
    assert [L.signed(k) for k in range(4)] == [(0,), (1,), (2,), (-1,)]


@pytest.mark.parametrize("bad", [dict(d=0, m=3), dict(d=1, m=1), dict(d=1, m=3, D=1)])
def test_invalid_lattices(bad):
    with pytest.raises(ValueError):
        LatticeSpec(**bad)


def test_spin_lattice_must_be_ring():
    with pytest.raises(ValueError):
        LatticeSpec(2, 3, Sector.SPIN)


def test_shift_zero_is_identity():
    L = lat()
    assert shift_coeffs(L, 0) == Circulant.identity(L)
    assert shift_coeffs(L, 0).entries == {(0,): 1}


def test_self_inverse_shift_at_m2():
    L = LatticeSpec(1, 2)
    assert shift_coeffs(L, 1) == shift_coeffs(L, -1)
    assert L.is_self_inverse(1)


def test_dense_realization_d2_m3():
    L = LatticeSpec(2, 3)
    G = np.asarray(dense_realize(shift_coeffs(L, (1, 2))), dtype=float)
    assert G.sum() == 9
    sites = list(L.offsets())
    for k, s in enumerate(sites):
        t = ((s[0] + 1) % 3, (s[1] + 2) % 3)
        assert G[k, sites.index(t)] == 1


def test_dense_shift_m3_superdiagonal_and_corner():
    G = np.asarray(dense_realize(shift_coeffs(LatticeSpec(1, 3), 1)), dtype=float)
    assert np.array_equal(G, np.array([[0, 1, 0], [0, 0, 1], [1, 0, 0]]))


def test_convolution_examples():
    L = lat()
    assert convolve(shift_coeffs(L, 1), shift_coeffs(L, 2)) == shift_coeffs(L, 3)
    g = Circulant(L, {1: 2, 3: Fraction(1, 3)})
    assert convolve(g, Circulant.identity(L)) == g
    a = Circulant(L, {1: 1, 3: 1})
    assert convolve(a, a) == Circulant(L, {0: 2, 2: 2})
    # dense oracle for the same product
    A = np.asarray(a.dense(), dtype=float)
    assert np.array_equal(A @ A, np.asarray(convolve(a, a).dense(), dtype=float))


def test_fourier_symbol():
    L = lat()
    assert np.allclose(fourier_symbol(Circulant.identity(L)), np.ones(4))
    assert np.allclose(fourier_symbol(shift_coeffs(L, 1)), [1, -1j, -1, 1j])
    # columns of the DFT matrix are the common eigenvectors
    G = np.asarray(shift_coeffs(L, 1).dense(), dtype=float)
    F = np.exp(-2j * np.pi * np.outer(range(4), range(4)) / 4)
    assert np.allclose(np.diag(np.linalg.inv(F) @ G @ F), fourier_symbol(shift_coeffs(L, 1)))


def test_symbol_is_multiplicative():
    L = LatticeSpec(2, 3)
    a = Circulant(L, {(1, 0): 2, (0, 2): -1})
    b = Circulant(L, {(1, 1): 3, (0, 0): 1})
    assert np.allclose(fourier_symbol(convolve(a, b)), fourier_symbol(a) * fourier_symbol(b))


def test_symmetry_classes():
    L = lat()
    s = Circulant(L, {1: 2, 3: 2, 2: 5})
    a = Circulant(L, {1: 1, 3: -1})
    assert s.is_symmetric() and not s.is_antisymmetric()
    assert a.is_antisymmetric() and not a.is_symmetric()
    S = np.asarray(s.dense(), dtype=float)
    assert np.array_equal(S, S.T)
    assert not Circulant(L, {2: 1}).is_antisymmetric()


def test_transpose_matches_dense():
    L = LatticeSpec(2, 3)
    g = Circulant(L, {(1, 2): 3, (0, 1): -2})
    assert np.array_equal(np.asarray(g.T.dense(), dtype=float), np.asarray(g.dense(), dtype=float).T)


def test_zero_pruning_and_mixed_lattices():
    L = lat()
    assert Circulant(L, {1: 1}) - Circulant(L, {1: 1}) == Circulant.zero(L)
    with pytest.raises(LatticeMismatchError):
        convolve(shift_coeffs(L, 1), shift_coeffs(LatticeSpec(1, 5), 1))


def test_dense_cap(monkeypatch):
    L = LatticeSpec(1, 8)
    with pytest.raises(DenseCapError):
        dense_realize(shift_coeffs(L, 1), cap=4)
    monkeypatch.setenv("TISIM_DENSE_CAP", "4")
    with pytest.raises(DenseCapError):
        dense_realize(shift_coeffs(L, 1))


def test_json_roundtrip():
    L = LatticeSpec(2, 3)
    g = Circulant(L, {(1, 2): Fraction(3, 4), (0, 1): -2})
    assert Circulant.from_json(L, g.to_json()) == g
    assert LatticeSpec.from_json(L.to_json()) == L
