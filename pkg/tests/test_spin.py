from fractions import Fraction

import numpy as np
import pytest

from dense_oracles import pauli_string, tau_dense
from tisim.spin import (
    OffsetCollisionError,
    SpinElement,
    canonical_rotation,
    dense_realize_spin,
    enumerate_necklaces,
    g,
    necklace,
    nn_generators,
    pauli_product,
    spin_commutator,
    spin_lattice,
    tau_symmetrize,
)
from tisim.witness import spin_target


def dense(A):
    return dense_realize_spin(A)


def test_tau_identity_is_m_identity():
    L = spin_lattice(4)
    assert tau_symmetrize([0], L) == SpinElement(L, {(0, 0, 0, 0): 4})
    assert np.allclose(dense(tau_symmetrize([0], L)), 4 * np.eye(16))


def test_period_two_necklace():
    L = spin_lattice(4)
    t = tau_symmetrize([1, 0, 1, 0], L)
    assert t.terms == {(0, 1, 0, 1): Fraction(2)}
    assert necklace((1, 0, 1, 0)).period == 2
    assert np.allclose(dense(t), tau_dense([1, 0, 1, 0], 4))


def test_g_matches_dense_sum():
    for m in (2, 3, 4):
        L = spin_lattice(m)
        for k in (1, 2, 3):
            for l in (1, 2, 3):
                assert np.allclose(dense(g(L, k, l)), tau_dense([k, l], m))


def test_g11_m3_traceless_three_terms():
    L = spin_lattice(3)
    G = dense(g(L, 1, 1))
    assert abs(np.trace(G)) < 1e-12
    assert np.allclose(G, pauli_string([1, 1, 0]) + pauli_string([0, 1, 1]) + pauli_string([1, 0, 1]))


def test_pauli_products():
    assert pauli_product((1, 2), (1, 2)) == (1, (0, 0))
    assert pauli_product((1,), (2,)) == (1j, (3,))
    p, q = (1, 3, 0), (3, 1, 2)  # anticommute on two sites -> commute
    a, x = pauli_product(p, q)
    b, y = pauli_product(q, p)
    assert x == y and a == b
    for p in ((1, 2, 3), (0, 3, 1)):
        for q in ((2, 2, 1), (3, 0, 0)):
            ph, r = pauli_product(p, q)
            assert np.allclose(pauli_string(p) @ pauli_string(q), ph * pauli_string(r))


def test_necklace_basics():
    s = (2, 0, 1, 0)
    c = canonical_rotation(s)
    assert c == (0, 1, 0, 2)
    n = necklace(s)
    assert n.period * n.multiplicity == 4
    assert len(set(n.rotations())) == n.period
    assert all(canonical_rotation(r) == c for r in n.rotations())
    assert len(enumerate_necklaces(3)) == 24


def test_collision_and_bad_letters():
    L = spin_lattice(3)
    with pytest.raises(OffsetCollisionError):
        tau_symmetrize([(0, 1), (0, 2)], L)
    with pytest.raises(ValueError):
        tau_symmetrize([4], L)


def test_spin_commutator_recipes():
    L = spin_lattice(5)
    # stored-H convention: bracket returns i[H_A, H_B]
    assert spin_commutator(g(L, 2, 1), g(L, 1, 3)) == tau_symmetrize([1, 1, 1], L) * -2
    for r in (1, 2):
        J = lambda r: spin_target(L, ("J", 1, 2, r))  # noqa: E731
        assert spin_commutator(J(r), g(L, 3, 1)) == (J(r - 1) - J(r + 1)) * -2


def test_commutator_matches_dense():
    for m in (3, 4):
        L = spin_lattice(m)
        gens = nn_generators(L)
        for a in gens[::2]:
            for b in gens[1::3]:
                A, B = dense(a), dense(b)
                assert np.allclose(dense(spin_commutator(a, b)), 1j * (A @ B - B @ A))


def test_antisymmetry_and_zero():
    L = spin_lattice(4)
    a = g(L, 1, 2) + tau_symmetrize([3, 0, 1], L) * Fraction(1, 3)
    assert spin_commutator(a, a).is_zero()
    b = g(L, 3, 3)
    assert spin_commutator(a, b) == -spin_commutator(b, a)


def test_json_roundtrip():
    L = spin_lattice(4)
    a = g(L, 1, 2) * Fraction(-2, 3) + g(L, 3, 3)
    assert SpinElement.from_json(a.to_json()) == a


def test_qutrit_strings_are_traceless_hermitian():
    L = spin_lattice(3, D=3)
    t = tau_symmetrize([1, 5], L)
    H = dense(t)
    assert np.allclose(H, H.conj().T)
    assert abs(np.trace(H)) < 1e-12
