"""Periodic cubic lattices, offsets and circulant coefficient maps.

A circulant block is stored by its first row: ``entries[v]`` is the matrix
element ``G[k, k + v]`` for every site ``k``.  With that convention the
single-entry map ``{v: 1}`` is the shift matrix ``M^(v)`` with
``M^(v)[k, l] = delta(l, k + v)``, products of matrices are offset-wise
convolutions, and transposition negates offsets.
"""
from __future__ import annotations

import enum
import itertools
import os
from dataclasses import dataclass
from fractions import Fraction
from numbers import Number
from typing import Iterable, Iterator, Mapping

import numpy as np

__all__ = [
    "Sector",
    "LatticeSpec",
    "Circulant",
    "shift_coeffs",
    "convolve",
    "fourier_symbol",
    "dense_realize",
    "DenseCapError",
    "LatticeMismatchError",
    "dense_cap",
    "as_scalar",
    "FLOAT_PRUNE",
]

FLOAT_PRUNE = 1e-14
DEFAULT_DENSE_CAP = 4096


class DenseCapError(ValueError):
    """Requested dense matrix exceeds the configured size cap."""


class LatticeMismatchError(ValueError):
    """Operands live on different lattices or sectors."""


def dense_cap() -> int:
    """Dense-size cap; overridable with the ``TISIM_DENSE_CAP`` environment variable."""
    raw = os.environ.get("TISIM_DENSE_CAP")
    return int(raw) if raw else DEFAULT_DENSE_CAP


class Sector(str, enum.Enum):
    FERMION = "fermion"
    BOSON = "boson"
    SPIN = "spin"


def as_scalar(value):
    """Coerce ints and rational strings to ``Fraction``; pass floats/complex through."""
    if isinstance(value, bool):
        raise TypeError("booleans are not scalars")
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        return Fraction(value)
    if isinstance(value, (float, complex, np.floating, np.complexfloating)):
        value = complex(value) if isinstance(value, (complex, np.complexfloating)) else float(value)
        if isinstance(value, complex) and value.imag == 0:
            return value.real
        return value
    if isinstance(value, np.integer):
        return Fraction(int(value))
    if isinstance(value, Number):
        return value
    raise TypeError(f"unsupported scalar {value!r}")


def _is_zero(value) -> bool:
    if isinstance(value, Fraction):
        return value == 0
    return abs(value) < FLOAT_PRUNE


@dataclass(frozen=True)
class LatticeSpec:
    """Cubic lattice ``Z_m^d`` with periodic boundaries.

    ``D`` is the local Hilbert-space dimension and only matters for the spin
    sector.
    """

    d: int
    m: int
    sector: Sector = Sector.FERMION
    D: int = 2

    def __post_init__(self):
        object.__setattr__(self, "sector", Sector(self.sector))
        if not isinstance(self.d, int) or self.d < 1:
            raise ValueError(f"dimension d must be a positive integer, got {self.d!r}")
        if not isinstance(self.m, int) or self.m < 2:
            raise ValueError(f"edge length m must be an integer >= 2, got {self.m!r}")
        if not isinstance(self.D, int) or self.D < 2:
            raise ValueError(f"local dimension D must be an integer >= 2, got {self.D!r}")
        if self.sector is Sector.SPIN and self.d != 1:
            raise ValueError("spin lattices are rings (d = 1)")

    @property
    def N(self) -> int:
        return self.m ** self.d

    def offset(self, v) -> tuple[int, ...]:
        """Canonical form of an offset (an int is accepted for d = 1)."""
        if isinstance(v, (int, np.integer)):
            v = (int(v),)
        v = tuple(int(c) for c in v)
        if len(v) != self.d:
            raise ValueError(f"offset {v} does not have {self.d} components")
        return tuple(c % self.m for c in v)

    def neg(self, v) -> tuple[int, ...]:
        return tuple((-c) % self.m for c in self.offset(v))

    def add(self, v, w) -> tuple[int, ...]:
        return tuple((a + b) % self.m for a, b in zip(self.offset(v), self.offset(w)))

    def unit(self, axis: int) -> tuple[int, ...]:
        """Basis vector along ``axis`` (1-based)."""
        if not 1 <= axis <= self.d:
            raise ValueError(f"axis must lie in 1..{self.d}, got {axis}")
        return tuple(1 if i == axis - 1 else 0 for i in range(self.d))

    def offsets(self) -> Iterator[tuple[int, ...]]:
        return itertools.product(range(self.m), repeat=self.d)

    def index(self, v) -> int:
        """Row-major site index of a canonical offset."""
        idx = 0
        for c in self.offset(v):
            idx = idx * self.m + c
        return idx

    def is_self_inverse(self, v) -> bool:
        v = self.offset(v)
        return v == self.neg(v)

    def signed(self, v) -> tuple[int, ...]:
        """Map to the symmetric range ``(-m/2, m/2]``; ``m/2`` stays positive."""
        half = self.m // 2
        return tuple(c if c <= half else c - self.m for c in self.offset(v))

    def with_sector(self, sector, D: int | None = None) -> "LatticeSpec":
        return LatticeSpec(self.d, self.m, Sector(sector), self.D if D is None else D)

    def to_json(self) -> dict:
        out = {"d": self.d, "m": self.m, "sector": self.sector.value}
        if self.sector is Sector.SPIN:
            out["D"] = self.D
        return out

    @classmethod
    def from_json(cls, obj: Mapping) -> "LatticeSpec":
        return cls(int(obj["d"]), int(obj["m"]), Sector(obj.get("sector", "fermion")), int(obj.get("D", 2)))


def _lattice_key(lattice: LatticeSpec) -> tuple[int, int]:
    # circulant algebra only depends on the geometry, not on the sector tag
    return (lattice.d, lattice.m)


class Circulant:
    """Immutable coefficient map ``offset -> scalar`` of one circulant block.

    Coefficients are exact ``Fraction`` values unless a float (or complex)
    value is involved, in which case the whole map is in floating mode.
    """

    __slots__ = ("lattice", "_entries", "_hash")

    def __init__(self, lattice: LatticeSpec, entries: Mapping | Iterable = ()):
        self.lattice = lattice
        items = entries.items() if isinstance(entries, Mapping) else entries
        acc: dict[tuple[int, ...], object] = {}
        for v, c in items:
            key = lattice.offset(v)
            acc[key] = acc.get(key, 0) + as_scalar(c)
        self._entries = {k: as_scalar(c) for k, c in sorted(acc.items()) if not _is_zero(c)}
        self._hash = None

    # -- basic accessors -------------------------------------------------
    @property
    def entries(self) -> dict:
        return dict(self._entries)

    def items(self):
        return self._entries.items()

    def __getitem__(self, v):
        return self._entries.get(self.lattice.offset(v), Fraction(0))

    def __len__(self):
        return len(self._entries)

    def __iter__(self):
        return iter(self._entries)

    @property
    def kind(self) -> str:
        if all(isinstance(c, Fraction) for c in self._entries.values()):
            return "exact"
        if any(isinstance(c, complex) for c in self._entries.values()):
            return "complex"
        return "float"

    def is_zero(self) -> bool:
        return not self._entries

    # -- algebra -----------------------------------------------------------
    def _check(self, other: "Circulant"):
        if not isinstance(other, Circulant):
            raise TypeError(f"expected Circulant, got {type(other).__name__}")
        if _lattice_key(self.lattice) != _lattice_key(other.lattice):
            raise LatticeMismatchError(
                f"incompatible circulants on Z_{self.lattice.m}^{self.lattice.d} "
                f"and Z_{other.lattice.m}^{other.lattice.d}"
            )

    def __add__(self, other: "Circulant") -> "Circulant":
        self._check(other)
        acc = dict(self._entries)
        for v, c in other._entries.items():
            acc[v] = acc.get(v, 0) + c
        return Circulant(self.lattice, acc)

    def __neg__(self) -> "Circulant":
        return Circulant(self.lattice, {v: -c for v, c in self._entries.items()})

    def __sub__(self, other: "Circulant") -> "Circulant":
        return self + (-other)

    def __mul__(self, scalar) -> "Circulant":
        if isinstance(scalar, Circulant):
            return convolve(self, scalar)
        s = as_scalar(scalar)
        return Circulant(self.lattice, {v: c * s for v, c in self._entries.items()})

    __rmul__ = __mul__

    def __matmul__(self, other: "Circulant") -> "Circulant":
        return convolve(self, other)

    @property
    def T(self) -> "Circulant":
        lat = self.lattice
        return Circulant(lat, {lat.neg(v): c for v, c in self._entries.items()})

    def conj(self) -> "Circulant":
        return Circulant(self.lattice, {v: c.conjugate() for v, c in self._entries.items()})

    def is_symmetric(self) -> bool:
        return self == self.T

    def is_antisymmetric(self) -> bool:
        return self == -self.T

    def __eq__(self, other) -> bool:
        if not isinstance(other, Circulant):
            return NotImplemented
        if _lattice_key(self.lattice) != _lattice_key(other.lattice):
            return False
        diff = self._sub_entries(other)
        return not diff

    def _sub_entries(self, other):
        acc = dict(self._entries)
        for v, c in other._entries.items():
            acc[v] = acc.get(v, 0) - c
        return {v: c for v, c in acc.items() if not _is_zero(c)}

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((_lattice_key(self.lattice), tuple(self._entries.items())))
        return self._hash

    def __repr__(self):
        body = ", ".join(f"{v}: {c}" for v, c in self._entries.items())
        return f"Circulant({{{body}}})"

    # -- realizations -----------------------------------------------------
    def dense(self, cap: int | None = None) -> np.ndarray:
        return dense_realize(self, cap)

    def symbol(self) -> np.ndarray:
        return fourier_symbol(self)

    def to_json(self) -> dict:
        offsets = sorted(self._entries)
        return {
            "offsets": [list(v) for v in offsets],
            "coeffs": [_scalar_json(self._entries[v]) for v in offsets],
        }

    @classmethod
    def from_json(cls, lattice: LatticeSpec, obj: Mapping) -> "Circulant":
        if len(obj["offsets"]) != len(obj["coeffs"]):
            raise ValueError("offsets and coeffs have different lengths")
        return cls(lattice, [(tuple(v), _scalar_from_json(c)) for v, c in zip(obj["offsets"], obj["coeffs"])])

    @classmethod
    def zero(cls, lattice: LatticeSpec) -> "Circulant":
        return cls(lattice)

    @classmethod
    def identity(cls, lattice: LatticeSpec) -> "Circulant":
        return cls(lattice, {(0,) * lattice.d: 1})


def _scalar_json(c):
    if isinstance(c, Fraction):
        return str(c) if c.denominator != 1 else int(c.numerator)
    if isinstance(c, complex):
        return {"re": c.real, "im": c.imag}
    return float(c)


def _scalar_from_json(c):
    if isinstance(c, dict):
        return complex(float(c["re"]), float(c["im"]))
    if isinstance(c, str):
        return Fraction(c)
    if isinstance(c, int):
        return Fraction(c)
    return float(c)


def shift_coeffs(lattice: LatticeSpec, v) -> Circulant:
    """Coefficient map of the shift matrix ``M^(v)``."""
    return Circulant(lattice, {lattice.offset(v): 1})


def convolve(a: Circulant, b: Circulant) -> Circulant:
    """Matrix product of two circulants as a modular offset convolution."""
    a._check(b)
    lat = a.lattice
    acc: dict[tuple[int, ...], object] = {}
    for v, x in a._entries.items():
        for w, y in b._entries.items():
            key = tuple((p + q) % lat.m for p, q in zip(v, w))
            acc[key] = acc.get(key, 0) + x * y
    return Circulant(lat, acc)


def fourier_symbol(g: Circulant) -> np.ndarray:
    """Simultaneous eigenvalues: ``sum_k g[k] exp(-2 pi i k.l / m)`` for each ``l``.

    The returned vector is indexed by the row-major site index of ``l``.
    """
    lat = g.lattice
    out = np.zeros(lat.N, dtype=complex)
    if not len(g):
        return out
    ls = np.array(list(lat.offsets()), dtype=float)
    for v, c in g.items():
        phase = ls @ np.array(v, dtype=float)
        out += complex(c) * np.exp(-2j * np.pi * phase / lat.m)
    return out


def dense_realize(g: Circulant, cap: int | None = None) -> np.ndarray:
    """Dense ``N x N`` matrix with ``G[k, l] = entries[l - k]``.

    Exact coefficients give an object array of ``Fraction``; floats give a
    float (or complex) array.
    """
    lat = g.lattice
    cap = dense_cap() if cap is None else cap
    if lat.N > cap:
        raise DenseCapError(f"N = {lat.N} exceeds dense cap {cap}")
    kind = g.kind
    if kind == "exact":
        out = np.full((lat.N, lat.N), Fraction(0), dtype=object)
    else:
        out = np.zeros((lat.N, lat.N), dtype=complex if kind == "complex" else float)
    sites = list(lat.offsets())
    for k in sites:
        row = lat.index(k)
        for v, c in g.items():
            out[row, lat.index(lat.add(k, v))] += c
    return out
