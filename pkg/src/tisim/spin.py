"""Exact algebra of translationally symmetrized Pauli strings on a ring.

A spin element stores a Hermitian TI operator ``H`` as rational
coefficients on necklaces; the Lie-algebra element it stands for is ``iH``.
The basis operator of a necklace is the sum of its *distinct* rotations, so
``tau(P) = (m / period) * basis(necklace(P))`` for any Pauli string ``P``.

Letters: ``0`` is the identity and ``1, 2, 3`` are the Pauli matrices.  For
``D > 2`` the letter code ``1 + (k - 1) * n_pairs + slot`` denotes Pauli
``k`` embedded on the level pair ``slot`` (pairs ordered lexicographically).
Only dense realization and traces are available for ``D > 2``; the product
of two embedded Paulis on different level pairs leaves the Pauli basis.
"""
from __future__ import annotations

import functools
import itertools
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

import numpy as np

from .lattice import DenseCapError, LatticeMismatchError, LatticeSpec, Sector, dense_cap

__all__ = [
    "PAULI",
    "PauliString",
    "Necklace",
    "SpinElement",
    "OffsetCollisionError",
    "pauli_product",
    "canonical_rotation",
    "necklace",
    "tau_symmetrize",
    "spin_commutator",
    "dense_realize_spin",
    "embedded_pauli",
    "local_matrix",
    "translation_operator",
    "enumerate_necklaces",
    "spin_lattice",
    "onsite_generators",
    "nn_generators",
    "g",
]

PAULI = (
    np.eye(2, dtype=complex),
    np.array([[0, 1], [1, 0]], dtype=complex),
    np.array([[0, -1j], [1j, 0]], dtype=complex),
    np.array([[1, 0], [0, -1]], dtype=complex),
)

# sigma_a sigma_b = i**power * sigma_c
_MUL: dict[tuple[int, int], tuple[int, int]] = {}
for _a in range(4):
    for _b in range(4):
        if _a == 0:
            _MUL[_a, _b] = (0, _b)
        elif _b == 0:
            _MUL[_a, _b] = (0, _a)
        elif _a == _b:
            _MUL[_a, _b] = (0, 0)
        else:
            _c = 6 - _a - _b
            _MUL[_a, _b] = (1 if (_a, _b, _c) in ((1, 2, 3), (2, 3, 1), (3, 1, 2)) else 3, _c)

_I_POW = (1, 1j, -1, -1j)


class OffsetCollisionError(ValueError):
    """Two letters were placed on the same lattice site."""


class UnsupportedLocalDimension(NotImplementedError):
    """Pauli-necklace products are only closed for qubits (D = 2)."""


PauliString = tuple  # tuple[int, ...] of letters


def spin_lattice(m: int, D: int = 2) -> LatticeSpec:
    return LatticeSpec(1, m, Sector.SPIN, D)


def pauli_product(p: Sequence[int], q: Sequence[int]) -> tuple[complex, tuple[int, ...]]:
    """Sitewise product ``p q = phase * r`` of two qubit Pauli strings."""
    if len(p) != len(q):
        raise ValueError("Pauli strings of different length")
    power = 0
    out = []
    for a, b in zip(p, q):
        k, c = _MUL[a, b]
        power += k
        out.append(c)
    return _I_POW[power % 4], tuple(out)


def _product_power(p, q) -> tuple[int, tuple[int, ...]]:
    power = 0
    out = []
    for a, b in zip(p, q):
        k, c = _MUL[a, b]
        power += k
        out.append(c)
    return power % 4, tuple(out)


def canonical_rotation(s: Sequence[int]) -> tuple[int, ...]:
    s = tuple(s)
    return min(s[r:] + s[:r] for r in range(len(s)))


def _period(s: tuple[int, ...]) -> int:
    m = len(s)
    for p in range(1, m + 1):
        if m % p == 0 and s[p:] + s[:p] == s:
            return p
    return m


@dataclass(frozen=True, order=True)
class Necklace:
    """Rotation class of a Pauli string.

    ``canonical`` is the lexicographically smallest rotation and ``period``
    the number of distinct rotations (always a divisor of the length).
    """

    canonical: tuple[int, ...]

    @property
    def period(self) -> int:
        return _period(self.canonical)

    @property
    def multiplicity(self) -> int:
        return len(self.canonical) // self.period

    def rotations(self) -> list[tuple[int, ...]]:
        s = self.canonical
        return [s[r:] + s[:r] for r in range(self.period)]


def necklace(s: Sequence[int]) -> Necklace:
    return Necklace(canonical_rotation(s))


@functools.lru_cache(maxsize=None)
def _rotations(s: tuple[int, ...]) -> tuple[tuple[int, ...], ...]:
    return tuple(Necklace(s).rotations())


@functools.lru_cache(maxsize=None)
def _canon(s: tuple[int, ...]) -> tuple[tuple[int, ...], int]:
    c = canonical_rotation(s)
    return c, _period(c)


class SpinElement:
    """Immutable map ``necklace -> rational coefficient`` on a spin ring."""

    __slots__ = ("lattice", "_terms")

    def __init__(self, lattice: LatticeSpec, terms: Mapping | Iterable = ()):
        if lattice.sector is not Sector.SPIN:
            raise ValueError(f"spin elements need a spin lattice, got {lattice.sector.value}")
        self.lattice = lattice
        items = terms.items() if isinstance(terms, Mapping) else terms
        acc: dict[tuple[int, ...], Fraction] = {}
        for key, c in items:
            key = key.canonical if isinstance(key, Necklace) else tuple(key)
            if len(key) != lattice.m:
                raise ValueError(f"necklace {key} does not have length {lattice.m}")
            key = canonical_rotation(key)
            acc[key] = acc.get(key, 0) + _coeff(c)
        self._terms = {k: c for k, c in sorted(acc.items()) if c != 0}

    @property
    def terms(self) -> dict[tuple[int, ...], Fraction]:
        return dict(self._terms)

    def items(self):
        return self._terms.items()

    def __getitem__(self, key) -> Fraction:
        return self._terms.get(canonical_rotation(key), Fraction(0))

    def __len__(self):
        return len(self._terms)

    def is_zero(self) -> bool:
        return not self._terms

    @classmethod
    def zero(cls, lattice: LatticeSpec) -> "SpinElement":
        return cls(lattice)

    def _check(self, other):
        if not isinstance(other, SpinElement):
            raise TypeError(f"expected SpinElement, got {type(other).__name__}")
        if self.lattice != other.lattice:
            raise LatticeMismatchError(f"incompatible spin lattices {self.lattice} and {other.lattice}")

    def __add__(self, other):
        self._check(other)
        acc = dict(self._terms)
        for k, c in other._terms.items():
            acc[k] = acc.get(k, 0) + c
        return SpinElement(self.lattice, acc)

    def __neg__(self):
        return SpinElement(self.lattice, {k: -c for k, c in self._terms.items()})

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, scalar):
        s = _coeff(scalar)
        return SpinElement(self.lattice, {k: c * s for k, c in self._terms.items()})

    __rmul__ = __mul__

    def __truediv__(self, scalar):
        return self * (1 / _coeff(scalar))

    def __eq__(self, other):
        if not isinstance(other, SpinElement):
            return NotImplemented
        return self.lattice == other.lattice and self._terms == other._terms

    def __hash__(self):
        return hash((self.lattice, tuple(self._terms.items())))

    def bracket(self, other: "SpinElement") -> "SpinElement":
        return spin_commutator(self, other)

    def dense(self, cap: int | None = None) -> np.ndarray:
        return dense_realize_spin(self, cap)

    def norm2(self):
        return sum(c * c for c in self._terms.values())

    @property
    def kind(self) -> str:
        return "exact"

    def to_json(self) -> dict:
        return {
            "m": self.lattice.m,
            "D": self.lattice.D,
            "terms": [
                {"necklace": list(k), "coeff": str(c)} for k, c in self._terms.items()
            ],
        }

    @classmethod
    def from_json(cls, obj: Mapping) -> "SpinElement":
        lat = spin_lattice(int(obj["m"]), int(obj.get("D", 2)))
        return cls(lat, [(tuple(t["necklace"]), Fraction(str(t["coeff"]))) for t in obj["terms"]])

    def __repr__(self):
        body = " + ".join(f"{c}*{''.join(map(str, k))}" for k, c in self._terms.items()) or "0"
        return f"SpinElement(m={self.lattice.m}: {body})"


def _coeff(c) -> Fraction:
    if isinstance(c, Fraction):
        return c
    if isinstance(c, (int, np.integer)) and not isinstance(c, bool):
        return Fraction(int(c))
    if isinstance(c, str):
        return Fraction(c)
    if isinstance(c, float) and c.is_integer():
        return Fraction(int(c))
    raise TypeError(f"spin coefficients must be rational, got {c!r}")


def _n_letters(D: int) -> int:
    return 1 + 3 * (D * (D - 1) // 2)


def tau_symmetrize(local, lattice: LatticeSpec, coeff=1) -> SpinElement:
    """``tau`` of a local product operator, as a spin element.

    ``local`` is either a sequence of letters placed on sites ``0, 1, ...``
    or an iterable of ``(site, letter)`` pairs / a ``{site: letter}`` map.
    """
    m = lattice.m
    if isinstance(local, Mapping):
        pairs = list(local.items())
    else:
        local = list(local)
        if local and isinstance(local[0], (tuple, list)):
            pairs = [tuple(p) for p in local]
        else:
            pairs = list(enumerate(local))
    s = [0] * m
    seen = set()
    for site, letter in pairs:
        if not 0 <= site < m:
            raise ValueError(f"site {site} outside the ring 0..{m - 1}")
        if site in seen:
            raise OffsetCollisionError(f"two letters placed on site {site}")
        if not 0 <= letter < _n_letters(lattice.D):
            raise ValueError(f"letter {letter} invalid for D = {lattice.D}")
        seen.add(site)
        s[site] = letter
    c, period = _canon(tuple(s))
    return SpinElement(lattice, {c: Fraction(m, period) * _coeff(coeff)})


def g(lattice: LatticeSpec, k: int, l: int) -> SpinElement:
    """Nearest-neighbour generator ``tau(sigma_k (x) sigma_l)``."""
    return tau_symmetrize([k, l], lattice)


def onsite_generators(lattice: LatticeSpec) -> list[SpinElement]:
    return [tau_symmetrize([k], lattice) for k in (1, 2, 3)]


def nn_generators(lattice: LatticeSpec) -> list[SpinElement]:
    """All on-site plus all nearest-neighbour ``tau`` strings (qubits).

    Order: ``tau(s1), tau(s2), tau(s3), g11, g12, ..., g33``.
    """
    return onsite_generators(lattice) + [g(lattice, k, l) for k in (1, 2, 3) for l in (1, 2, 3)]


@functools.lru_cache(maxsize=None)
def _necklace_bracket(a: tuple[int, ...], b: tuple[int, ...]) -> tuple[tuple[tuple[int, ...], Fraction], ...]:
    """``i [basis(a), basis(b)]`` expanded on necklaces."""
    m = len(a)
    per_a = _period(a)
    acc: dict[tuple[int, ...], Fraction] = {}
    for s in _rotations(b):
        power, r = _product_power(a, s)
        power_ba, _ = _product_power(s, a)
        if power == power_ba:
            continue  # commuting strings
        # i (PQ - QP) = 2 i * i**power * R for anticommuting strings
        val = 2 if power == 3 else -2
        c, per_r = _canon(r)
        acc[c] = acc.get(c, 0) + Fraction(val * per_a, per_r)
    return tuple((k, v) for k, v in sorted(acc.items()) if v != 0)


def spin_commutator(a: SpinElement, b: SpinElement) -> SpinElement:
    """Stored-``H`` bracket: the element ``i [H_a, H_b]`` (rational coefficients)."""
    a._check(b)
    if a.lattice.D != 2:
        raise UnsupportedLocalDimension("spin commutators are implemented for D = 2 only")
    acc: dict[tuple[int, ...], Fraction] = {}
    for ka, ca in a._terms.items():
        for kb, cb in b._terms.items():
            w = ca * cb
            for kc, v in _necklace_bracket(ka, kb):
                acc[kc] = acc.get(kc, 0) + w * v
    return SpinElement(a.lattice, acc)


def _pairs(D: int) -> list[tuple[int, int]]:
    return list(itertools.combinations(range(D), 2))


def embedded_pauli(D: int, k: int, pair: tuple[int, int]) -> np.ndarray:
    """Pauli ``k`` acting on levels ``pair = (a, b)`` of a ``D``-level system."""
    a, b = pair
    out = np.zeros((D, D), dtype=complex)
    out[np.ix_([a, b], [a, b])] = PAULI[k]
    return out


def local_matrix(letter: int, D: int = 2) -> np.ndarray:
    if D == 2:
        return PAULI[letter]
    if letter == 0:
        return np.eye(D, dtype=complex)
    pairs = _pairs(D)
    k, slot = divmod(letter - 1, len(pairs))
    return embedded_pauli(D, k + 1, pairs[slot])


def _string_matrix(s: Sequence[int], D: int) -> np.ndarray:
    return functools.reduce(np.kron, [local_matrix(x, D) for x in s])


def dense_realize_spin(A: SpinElement, cap: int | None = None) -> np.ndarray:
    """Dense Hermitian ``D^m x D^m`` matrix of ``H`` (site 1 is the leading tensor factor)."""
    lat = A.lattice
    cap = dense_cap() if cap is None else cap
    dim = lat.D ** lat.m
    if dim > cap:
        raise DenseCapError(f"D^m = {dim} exceeds dense cap {cap}")
    out = np.zeros((dim, dim), dtype=complex)
    for key, c in A.items():
        for r in _rotations(key):
            out += float(c) * _string_matrix(r, lat.D)
    return out


def translation_operator(m: int, D: int = 2) -> np.ndarray:
    """Dense ``T`` with ``T|i1 i2 ... im> = |i2 ... im i1>``."""
    dim = D ** m
    T = np.zeros((dim, dim))
    for idx, digits in enumerate(itertools.product(range(D), repeat=m)):
        shifted = digits[1:] + digits[:1]
        T[int(np.ravel_multi_index(shifted, (D,) * m)), idx] = 1
    return T


def enumerate_necklaces(m: int, D: int = 2) -> list[tuple[int, ...]]:
    """All canonical necklaces (identity included) in lexicographic order."""
    q = _n_letters(D)
    out = []
    for s in itertools.product(range(q), repeat=m):
        if canonical_rotation(s) == s:
            out.append(s)
    return out
