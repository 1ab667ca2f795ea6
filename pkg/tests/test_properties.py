"""Property tests over random rational inputs."""
from fractions import Fraction

import numpy as np
from hypothesis import given, settings
from hypothesis import strategies as st

from dense_oracles import translation
from tisim.lattice import Circulant, LatticeSpec, Sector
from tisim.obstruction import CasimirSpec, casimir_pairing
from tisim.quadratic import QuadraticElement, boson_commutator, fermion_commutator
from tisim.spin import SpinElement, canonical_rotation, dense_realize_spin, necklace, spin_commutator, spin_lattice

rationals = st.fractions(min_value=-4, max_value=4, max_denominator=3)


@st.composite
def lattices(draw, sector, max_m=5):
    d = draw(st.sampled_from([1, 1, 2]))
    m = draw(st.integers(2, max_m if d == 1 else 3))
    return LatticeSpec(d, m, sector)


@st.composite
def circulants(draw, lat):
    offs = list(lat.offsets())
    chosen = draw(st.lists(st.sampled_from(offs), max_size=4, unique=True))
    return Circulant(lat, {v: draw(rationals) for v in chosen})


@st.composite
def quad_triples(draw, sector):
    """Three sector-valid elements: X, Y antisymmetric for fermions, symmetric for bosons."""
    lat = draw(lattices(sector))
    sign = -1 if sector is Sector.FERMION else 1

    def blk():
        c = draw(circulants(lat))
        return c + c.T * sign

    return [QuadraticElement(lat, blk(), blk(), draw(circulants(lat))) for _ in range(3)]


@st.composite
def spin_triples(draw, max_m=4):
    m = draw(st.integers(2, max_m))
    lat = spin_lattice(m)
    def el():
        n = draw(st.integers(0, 3))
        terms = {}
        for _ in range(n):
            s = tuple(draw(st.lists(st.integers(0, 3), min_size=m, max_size=m)))
            terms[canonical_rotation(s)] = draw(rationals)
        return SpinElement(lat, terms)
    return [el(), el(), el()]


def _fdense(el):
    return el.dense().astype(float)


# ------------------------------------------------------------------ sector symmetry


@settings(max_examples=60, deadline=None)
@given(quad_triples(Sector.FERMION))
def test_fermion_bracket_lands_in_r(els):
    a, b, _ = els
    c = fermion_commutator(a, b)
    assert c.Y == -c.X


@settings(max_examples=60, deadline=None)
@given(quad_triples(Sector.BOSON))
def test_boson_bracket_has_symmetric_w(els):
    a, b, _ = els
    assert boson_commutator(a, b).W.is_symmetric()


@settings(max_examples=40, deadline=None)
@given(spin_triples(max_m=5))
def test_spin_bracket_rational_and_dense(els):
    a, b, _ = els
    c = spin_commutator(a, b)
    assert all(isinstance(v, Fraction) for _, v in c.items())
    A, B = dense_realize_spin(a), dense_realize_spin(b)
    assert np.allclose(dense_realize_spin(c), 1j * (A @ B - B @ A), atol=1e-9)


# ------------------------------------------------------------------ Lie axioms


@settings(max_examples=40, deadline=None)
@given(st.sampled_from([(Sector.FERMION, fermion_commutator), (Sector.BOSON, boson_commutator)]), st.data())
def test_quadratic_antisymmetry_and_jacobi(pair, data):
    sector, br = pair
    a, b, c = data.draw(quad_triples(sector))
    assert br(a, b) == -br(b, a)
    jac = br(a, br(b, c)) + br(b, br(c, a)) + br(c, br(a, b))
    assert jac.is_zero()


@settings(max_examples=40, deadline=None)
@given(st.sampled_from([(Sector.FERMION, fermion_commutator), (Sector.BOSON, boson_commutator)]), st.data())
def test_quadratic_bracket_is_matrix_commutator(pair, data):
    sector, br = pair
    a, b, _ = data.draw(quad_triples(sector))
    A, B = _fdense(a), _fdense(b)
    assert np.allclose(_fdense(br(a, b)), A @ B - B @ A)


@settings(max_examples=30, deadline=None)
@given(spin_triples())
def test_spin_antisymmetry_and_jacobi(els):
    a, b, c = els
    assert spin_commutator(a, b) == -spin_commutator(b, a)
    jac = spin_commutator(a, spin_commutator(b, c)) + spin_commutator(b, spin_commutator(c, a)) \
        + spin_commutator(c, spin_commutator(a, b))
    assert jac.is_zero()


# ------------------------------------------------------------------ Casimir traces


@settings(max_examples=30, deadline=None)
@given(st.integers(2, 5), st.data())
def test_casimir_kills_commutators(m, data):
    gammas = data.draw(st.dictionaries(st.integers(1, m), st.integers(-3, 3), min_size=1, max_size=3))
    C = sum(g * np.linalg.matrix_power(translation(m), k) for k, g in gammas.items())
    lat = spin_lattice(m)
    a, b = _random_pair(data, lat)
    H = dense_realize_spin(spin_commutator(a, b))
    assert abs(np.trace(C @ H)) < 1e-8
    spec = CasimirSpec.from_gammas(m, gammas)
    assert casimir_pairing(spec, spin_commutator(a, b)) == 0
    assert np.isclose(complex(casimir_pairing(spec, a)), np.trace(C @ dense_realize_spin(a)))


def _random_pair(data, lat):
    m = lat.m
    out = []
    for _ in range(2):
        n = data.draw(st.integers(1, 3))
        terms = {}
        for _ in range(n):
            s = tuple(data.draw(st.lists(st.integers(0, 3), min_size=m, max_size=m)))
            terms[canonical_rotation(s)] = data.draw(rationals)
        out.append(SpinElement(lat, terms))
    return out


# ------------------------------------------------------------------ circulants


@settings(max_examples=60, deadline=None)
@given(st.data())
def test_convolution_matches_dense_and_symbol(data):
    lat = data.draw(lattices(Sector.FERMION))
    a, b, c = (data.draw(circulants(lat)) for _ in range(3))
    assert a @ b == b @ a
    assert (a @ b) @ c == a @ (b @ c)
    assert a @ (b + c) == a @ b + a @ c
    A, B = a.dense().astype(float), b.dense().astype(float)
    assert np.allclose((a @ b).dense().astype(float), A @ B)
    assert np.allclose((a @ b).symbol(), a.symbol() * b.symbol())
    assert np.allclose(a.T.dense().astype(float), A.T)
    assert np.allclose((a + b).symbol(), a.symbol() + b.symbol())


@settings(max_examples=60, deadline=None)
@given(st.data())
def test_circulant_json_round_trip(data):
    lat = data.draw(lattices(Sector.BOSON))
    a = data.draw(circulants(lat))
    assert Circulant.from_json(lat, a.to_json()) == a


@settings(max_examples=40, deadline=None)
@given(st.sampled_from([Sector.FERMION, Sector.BOSON]), st.data())
def test_quadratic_json_round_trip(sector, data):
    a = data.draw(quad_triples(sector))[0]
    assert QuadraticElement.from_json(a.to_json()) == a


@settings(max_examples=40, deadline=None)
@given(spin_triples())
def test_spin_json_round_trip(els):
    a = els[0]
    assert SpinElement.from_json(a.to_json()) == a


# ------------------------------------------------------------------ necklaces


@settings(max_examples=100, deadline=None)
@given(st.lists(st.integers(0, 3), min_size=1, max_size=8), st.integers(0, 7))
def test_necklace_canonical_and_period(s, r):
    s = tuple(s)
    r %= len(s)
    rot = s[r:] + s[:r]
    assert canonical_rotation(rot) == canonical_rotation(s)
    nk = necklace(s)
    assert nk.period * nk.multiplicity == len(s)
    assert len(set(nk.rotations())) == nk.period
    assert min(nk.rotations()) == nk.canonical
