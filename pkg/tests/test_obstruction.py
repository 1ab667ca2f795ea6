import itertools
from fractions import Fraction

import numpy as np
import pytest

from dense_oracles import pauli_string, tau_dense, translation
from tisim.obstruction import (
    CasimirAdmissibilityError,
    CasimirSpec,
    ExactComplex,
    NoGoCertificate,
    NoGoRejection,
    analytic_constant,
    casimir_pairing,
    certify_no_go,
    contracted_trace,
    shift_trace,
)
from tisim.spin import g, nn_generators, spin_lattice, tau_symmetrize
from tisim.witness import spin_target


def test_identity_string_gives_D_to_f():
    for m, f in ((4, 2), (6, 3), (6, 2), (5, 5)):
        assert contracted_trace(f, (0,) * m) == 2**f
    assert contracted_trace(1, (0, 0, 0), D=3) == 3


def test_single_letter_vanishes():
    for m in (3, 4, 6):
        for f in (d for d in range(1, m + 1) if m % d == 0):
            for x in (1, 2, 3):
                assert not contracted_trace(f, (x,) + (0,) * (m - 1))


def test_m4_period_two_value():
    assert contracted_trace(2, (1, 0, 1, 0)) == 4
    T = translation(4)
    assert np.isclose(np.trace(T @ T @ pauli_string([1, 0, 1, 0])), 4)


def test_nondivisor_rejected():
    with pytest.raises(ValueError):
        contracted_trace(3, (0, 0, 0, 0))
    with pytest.raises(CasimirAdmissibilityError):
        CasimirSpec.power(5, 2)


def test_shift_trace_matches_dense_exhaustively():
    for m in (2, 3, 4):
        T = translation(m)
        Tk = np.eye(2**m)
        for k in range(m):
            for s in itertools.product(range(4), repeat=m):
                got = complex(shift_trace(k, s))
                assert np.isclose(got, np.trace(Tk @ pauli_string(s))), (k, s)
            Tk = Tk @ T


def test_antisymmetric_casimir_values():
    for m in (3, 4, 5):
        L = spin_lattice(m)
        c = CasimirSpec.antisymmetric(m)
        for gen in nn_generators(L):
            assert not casimir_pairing(c, gen)
    L = spin_lattice(3)
    assert casimir_pairing(CasimirSpec.antisymmetric(3), tau_symmetrize([1, 2, 3], L)) == ExactComplex(0, 12)


def test_two_letter_pairing_nonzero_and_matches_dense():
    for m, f in ((4, 2), (6, 2), (6, 3)):
        L = spin_lattice(m)
        for j in (1, 2, 3):
            t = tau_symmetrize({0: j, f: j}, L)
            val = casimir_pairing(CasimirSpec.power(m, f), t)
            assert val
            if m <= 4:
                T = translation(m)
                dense = np.trace(np.linalg.matrix_power(T, f) @ tau_dense([j] + [0] * (f - 1) + [j], m))
                assert np.isclose(complex(val), dense)


def test_m4_certificate():
    L = spin_lattice(4)
    cert = certify_no_go(CasimirSpec.power(4, 2), nn_generators(L), spin_target(L, ("N", 1)))
    assert isinstance(cert, NoGoCertificate) and cert.valid
    assert cert.target_pairing == 16
    assert cert.reference_constant == analytic_constant(4, 2, 2) == 32
    js = cert.to_json()
    assert js["verdict"] == "certificate" and js["reference_constant"] == 32


def test_target_in_span_is_rejected():
    L = spin_lattice(4)
    gens = nn_generators(L)
    rej = certify_no_go(CasimirSpec.power(4, 2), gens, gens[4].bracket(gens[7]))
    assert isinstance(rej, NoGoRejection) and not rej.valid
    assert rej.to_json()["verdict"] == "rejected"


def test_rejection_names_offending_generator():
    L = spin_lattice(4)
    gens = nn_generators(L) + [tau_symmetrize({0: 1, 2: 1}, L)]
    rej = certify_no_go(CasimirSpec.power(4, 2), gens, spin_target(L, ("N", 1)))
    assert rej.offending == len(gens) - 1


def test_casimir_json_and_normalisation():
    c = CasimirSpec.from_gammas(4, {5: 1, 1: Fraction(1, 2), 0: 2})
    assert dict(c.gammas) == {1: Fraction(3, 2), 4: 2}
    assert CasimirSpec.from_json(c.to_json()) == c


def test_exact_complex_arithmetic():
    a = ExactComplex(Fraction(1), Fraction(2))
    assert a * a == ExactComplex(-3, 4)
    assert a - a == 0
    assert complex(a) == 1 + 2j
    with pytest.raises(TypeError):
        ExactComplex.of(True)
