from fractions import Fraction

import numpy as np
import pytest

from tisim.lattice import Circulant, LatticeMismatchError, LatticeSpec, Sector
from tisim.quadratic import (
    DegenerateElementError,
    HermiticityError,
    QuadraticElement,
    QuadraticHamiltonianAB,
    SectorError,
    SectorSymmetry,
    boson_commutator,
    boson_named,
    boson_nn,
    boson_onsite,
    convert_representation,
    fermion_commutator,
    fermion_named,
    fermion_nn,
    fermion_onsite,
    sector_symmetry,
    to_ab_representation,
)

F4 = LatticeSpec(1, 4, Sector.FERMION)
B4 = LatticeSpec(1, 4, Sector.BOSON)


def dense(el):
    return np.asarray(el.dense(), dtype=float)


def test_onsite_squares_to_minus_identity():
    E = dense(fermion_onsite(F4))
    assert np.array_equal(E @ E, -np.eye(8))
    assert sector_symmetry(fermion_onsite(F4)) is SectorSymmetry.FERMION_R


def test_hx_e_and_e_hw():
    for k in range(1, 4):
        HX = fermion_named(F4, "HX", k)
        assert fermion_commutator(HX, fermion_onsite(F4)) == fermion_named(F4, "HWminus", k) * 2
        assert fermion_commutator(fermion_onsite(F4), fermion_named(F4, "HW", k)) == fermion_named(F4, "HX", k)


def test_named_relations():
    for k in range(4):
        assert fermion_named(F4, "HWplus", k) == fermion_named(F4, "HW", k) + fermion_named(F4, "HW", -k)
    assert fermion_named(F4, "HW", 0) == fermion_onsite(F4)


def test_hx_degenerate_cases():
    m2 = LatticeSpec(1, 2, Sector.FERMION)
    assert fermion_named(m2, "HX", 1).is_zero()
    assert fermion_named(m2, "HX", 1).degenerate
    with pytest.raises(DegenerateElementError):
        fermion_named(F4, "HX", 0)
    with pytest.raises(ValueError):
        fermion_named(F4, "HQ", 1)


def test_fermion_bracket_identities():
    for k in range(1, 4):
        for l in range(4):
            hxk, hwl = fermion_named(F4, "HX", k), fermion_named(F4, "HW", l)
            assert fermion_commutator(hxk, fermion_named(F4, "HX", max(l, 1))).is_zero()
            assert fermion_commutator(hxk, hwl) == (fermion_named(F4, "HW", l + k) - fermion_named(F4, "HW", l - k)) * 2
    for k in range(4):
        for l in range(4):
            lhs = fermion_commutator(fermion_named(F4, "HW", k), fermion_named(F4, "HW", l))
            rhs = QuadraticElement.zero(F4) if (l - k) % 2 == 0 else fermion_named(F4, "HX", l - k)
            assert lhs == rhs


def test_fermion_commutator_matches_dense():
    L = LatticeSpec(2, 3, Sector.FERMION)
    a = QuadraticElement(L, Circulant(L, {(1, 0): 1, (2, 0): -1}), Circulant(L, {(0, 1): 2, (0, 2): -2}),
                         Circulant(L, {(1, 1): 3, (0, 0): 1}))
    b = fermion_nn(L, 2, 1, 0, 2, Fraction(1, 2))
    A, B = dense(a), dense(b)
    assert np.allclose(dense(fermion_commutator(a, b)), A @ B - B @ A)


def test_fermion_seed_examples():
    h = fermion_nn(F4, 1, 1, 1, 1, 1)
    assert fermion_commutator(h, fermion_onsite(F4)).is_zero()
    h = fermion_nn(F4, 1, 1, 0, 0, 0)
    assert h.Y.is_zero() and not h.X.is_zero()
    assert sector_symmetry(h) is SectorSymmetry.NONE
    assert sector_symmetry(fermion_nn(F4, 1, 1, -1, 1, 0)) is SectorSymmetry.FERMION_R
    assert sector_symmetry(fermion_nn(F4, 1, 1, 1, 1, 1)) is SectorSymmetry.NONE


def test_fermion_sector_checks():
    with pytest.raises(SectorError):
        fermion_onsite(B4)
    with pytest.raises(LatticeMismatchError):
        fermion_commutator(fermion_onsite(F4), fermion_onsite(LatticeSpec(1, 5)))


def test_boson_identities():
    e = (1,)
    LY = boson_named(B4, "LY", e)
    LX = boson_named(B4, "LX", e)
    assert boson_commutator(LY, boson_onsite(B4, 1, 0, 0)) == boson_named(B4, "LW", e)
    assert boson_onsite(B4, 0, 0, 0).is_zero()
    for w, wt in ((1, 2), (3, -1)):
        L = boson_nn(B4, e, 0, 0, w, wt)
        assert boson_commutator(L, boson_onsite(B4, 0, -1, 0)) == LY * (w + wt)
    assert boson_commutator(LY, LX) - boson_onsite(B4, 0, 0, 2) == boson_named(B4, "LW", 2)
    for k in range(5):
        assert boson_commutator(boson_named(B4, "LY", k), LX) == boson_named(B4, "LW", k + 1) + boson_named(B4, "LW", k - 1)


def test_boson_named_points():
    e = (1,)
    assert boson_nn(B4, e, 1, 0, 0, 0) == boson_named(B4, "LX", e)
    assert boson_nn(B4, e, 0, 1, 0, 0) == boson_named(B4, "LY", e)
    assert boson_nn(B4, e, 0, 0, 1, 1) == boson_named(B4, "LW", e)
    with pytest.raises(ValueError):
        boson_nn(B4, (2,), 1, 0, 0, 0)
    with pytest.raises(ValueError):
        boson_nn(B4, (0,), 1, 0, 0, 0)


def test_boson_w_transfer():
    for v in range(4):
        LW = boson_named(B4, "LW", v)
        assert boson_commutator(LW, boson_onsite(B4, 0, Fraction(-1, 2), 0)) == boson_named(B4, "LY", v)
        assert boson_commutator(LW, boson_onsite(B4, Fraction(1, 2), 0, 0)) == boson_named(B4, "LX", v)


def test_boson_commutator_matches_dense_and_is_hamiltonian():
    L = LatticeSpec(2, 3, Sector.BOSON)
    a = boson_nn(L, (1, -1), 1, 2, 3, -1)
    b = boson_nn(L, (0, 1), Fraction(1, 2), 0, 1, 4)
    A, B = dense(a), dense(b)
    C = dense(boson_commutator(a, b))
    assert np.allclose(C, A @ B - B @ A)
    N = L.N
    sigma = np.block([[np.zeros((N, N)), np.eye(N)], [-np.eye(N), np.zeros((N, N))]])
    # every boson generator is Hamiltonian: (sigma L)^T = sigma L
    for M in (A, B, C):
        assert np.allclose((sigma @ M).T, sigma @ M)
    assert boson_commutator(a, a).is_zero()
    assert sector_symmetry(boson_commutator(a, b)) is SectorSymmetry.BOSON_P


def test_fermion_generators_are_antisymmetric():
    L = LatticeSpec(1, 5, Sector.FERMION)
    h = fermion_nn(L, 1, 1, 2, 3, -1)
    H = dense(h)
    assert np.allclose(H, -H.T)


def test_arithmetic_and_json():
    a = fermion_nn(F4, 1, 1, 2, 3, Fraction(1, 3))
    assert a - a == QuadraticElement.zero(F4)
    assert (a * 2) / 2 == a
    assert QuadraticElement.from_json(a.to_json()) == a
    assert a.equals(a + fermion_onsite(F4), modulo_onsite=True)
    assert not a.equals(a + fermion_onsite(F4))


def test_convert_representation_examples():
    z = QuadraticHamiltonianAB.build(F4)
    assert convert_representation(z).is_zero()
    # real (Hermitian) hopping lies in R
    h = QuadraticHamiltonianAB.build(F4, B={1: 1, 3: 1}, C={1: -1, 3: -1})
    L = convert_representation(h)
    assert sector_symmetry(L) is SectorSymmetry.FERMION_R
    # imaginary hopping leaves R
    h = QuadraticHamiltonianAB.build(F4, B={1: 1j, 3: -1j})
    assert sector_symmetry(convert_representation(h)) is SectorSymmetry.NONE
    with pytest.raises(HermiticityError):
        convert_representation(QuadraticHamiltonianAB.build(F4, B={1: 1}, C={3: 1}))


@pytest.mark.parametrize("lat", [F4, B4])
def test_ab_roundtrip(lat):
    L = QuadraticElement(lat, Circulant(lat, {1: 1.0, 3: -1.0 if lat.sector is Sector.FERMION else 1.0}),
                         Circulant(lat, {2: 2.0} if lat.sector is Sector.BOSON else {}),
                         Circulant(lat, {1: 0.5, 0: 1.0}))
    back = convert_representation(to_ab_representation(L))
    for blk in ("X", "Y", "W"):
        diff = getattr(back, blk) - getattr(L, blk)
        assert all(abs(complex(c)) < 1e-12 for _, c in diff.items())


def test_block_class_enforced():
    from tisim.quadratic import BlockClassError, m_minus, m_plus

    F = LatticeSpec(1, 4, Sector.FERMION)
    B = LatticeSpec(1, 4, Sector.BOSON)
    with pytest.raises(BlockClassError):
        QuadraticElement(F, X=m_plus(F, 1))
    with pytest.raises(BlockClassError):
        QuadraticElement(B, Y=m_minus(B, 1))
    QuadraticElement(F, X=m_minus(F, 1), W=m_plus(F, 1))
    QuadraticElement(B, X=m_plus(B, 1), W=m_minus(B, 1))
