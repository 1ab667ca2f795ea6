"""Translationally invariant quadratic generators for fermions and bosons.

An element is the triple of circulant blocks ``(X, Y, W)``.  Its dense
generator is

* fermions: ``[[X, W], [-W^T, Y]]`` (an element of ``so(2N)``),
* bosons:   ``[[-W, Y], [-X, W^T]]`` (an element of ``sp(2N)``).

Commutators are evaluated block-wise on coefficient maps; the dense forms
are only used as oracles.

Bosonic nearest-neighbour convention: ``boson_nn(v, x, y, w, wt)`` has
``X = x M_+``, ``Y = y M_+`` and ``W = w M^(v) + wt M^(-v)``.  With this
choice the named elements are ``L_X = (1, 0, 0, 0)``, ``L_Y = (0, 1, 0, 0)``
and ``L_W = (0, 0, 1, 1)``, and ``[L, E_(0,-1,0)] = (w + wt) L_Y`` holds for
``x = y = 0``.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping

import numpy as np

from .lattice import (
    Circulant,
    DenseCapError,
    LatticeMismatchError,
    LatticeSpec,
    Sector,
    as_scalar,
    dense_cap,
    shift_coeffs,
)

__all__ = [
    "QuadraticElement",
    "QuadraticHamiltonianAB",
    "SectorSymmetry",
    "SectorError",
    "BlockClassError",
    "DegenerateElementError",
    "HermiticityError",
    "fermion_onsite",
    "fermion_named",
    "fermion_nn",
    "fermion_commutator",
    "boson_onsite",
    "boson_nn",
    "boson_named",
    "boson_commutator",
    "convert_representation",
    "to_ab_representation",
    "sector_symmetry",
    "m_plus",
    "m_minus",
]


class SectorError(ValueError):
    """Operation applied to an element of the wrong sector."""


class DegenerateElementError(ValueError):
    """A named generator that vanishes identically was requested."""


class HermiticityError(ValueError):
    """Creation/annihilation blocks violate a Hermiticity relation."""


class BlockClassError(ValueError):
    """``X`` or ``Y`` lies outside the class its sector requires."""


class SectorSymmetry(str, enum.Enum):
    FERMION_R = "FermionR"
    BOSON_P = "BosonP"
    NONE = "None"


def m_plus(lattice: LatticeSpec, v) -> Circulant:
    return shift_coeffs(lattice, v) + shift_coeffs(lattice, lattice.neg(v))


def m_minus(lattice: LatticeSpec, v) -> Circulant:
    return shift_coeffs(lattice, v) - shift_coeffs(lattice, lattice.neg(v))


class QuadraticElement:
    """Immutable TI quadratic generator ``(X, Y, W)``.

    ``degenerate`` marks named constructors whose blocks cancel (for
    instance ``H_X^(v)`` with ``2v = 0``); such elements are zero.
    """

    __slots__ = ("lattice", "X", "Y", "W", "degenerate")

    def __init__(self, lattice: LatticeSpec, X=None, Y=None, W=None, degenerate: bool = False):
        if lattice.sector not in (Sector.FERMION, Sector.BOSON):
            raise SectorError(f"quadratic elements need a fermion or boson lattice, got {lattice.sector.value}")
        self.lattice = lattice
        self.X = X if X is not None else Circulant.zero(lattice)
        self.Y = Y if Y is not None else Circulant.zero(lattice)
        self.W = W if W is not None else Circulant.zero(lattice)
        self.degenerate = degenerate
        for blk in (self.X, self.Y, self.W):
            if (blk.lattice.d, blk.lattice.m) != (lattice.d, lattice.m):
                raise LatticeMismatchError("block lattice differs from element lattice")
        # fermions need antisymmetric X, Y (real antisymmetric generator); bosons symmetric ones
        ok = Circulant.is_antisymmetric if lattice.sector is Sector.FERMION else Circulant.is_symmetric
        for name, blk in (("X", self.X), ("Y", self.Y)):
            if not ok(blk):
                want = "antisymmetric" if lattice.sector is Sector.FERMION else "symmetric"
                raise BlockClassError(f"{lattice.sector.value} {name} block must be {want}-class")

    @classmethod
    def _raw(cls, lattice, X, Y, W) -> "QuadraticElement":
        # skips the block-class check; for closed operations and coordinate units
        out = object.__new__(cls)
        out.lattice, out.X, out.Y, out.W, out.degenerate = lattice, X, Y, W, False
        return out

    @property
    def sector(self) -> Sector:
        return self.lattice.sector

    @classmethod
    def zero(cls, lattice: LatticeSpec) -> "QuadraticElement":
        return cls(lattice)

    def _check(self, other):
        if not isinstance(other, QuadraticElement):
            raise TypeError(f"expected QuadraticElement, got {type(other).__name__}")
        if self.lattice != other.lattice:
            raise LatticeMismatchError(f"incompatible lattices {self.lattice} and {other.lattice}")

    def __add__(self, other):
        self._check(other)
        return QuadraticElement._raw(self.lattice, self.X + other.X, self.Y + other.Y, self.W + other.W)

    def __sub__(self, other):
        self._check(other)
        return QuadraticElement._raw(self.lattice, self.X - other.X, self.Y - other.Y, self.W - other.W)

    def __neg__(self):
        return QuadraticElement._raw(self.lattice, -self.X, -self.Y, -self.W)

    def __mul__(self, scalar):
        s = as_scalar(scalar)
        return QuadraticElement._raw(self.lattice, self.X * s, self.Y * s, self.W * s)

    __rmul__ = __mul__

    def __truediv__(self, scalar):
        s = as_scalar(scalar)
        return self * (1 / s)

    def __eq__(self, other):
        if not isinstance(other, QuadraticElement):
            return NotImplemented
        return self.lattice == other.lattice and (self.X, self.Y, self.W) == (other.X, other.Y, other.W)

    def __hash__(self):
        return hash((self.lattice, self.X, self.Y, self.W))

    def equals(self, other, modulo_onsite: bool = False) -> bool:
        """Strict equality, or equality after discarding the on-site ``E`` direction.

        The quotient only applies to fermions, where ``E`` is the on-site
        generator (``W`` entry at offset 0).
        """
        if not modulo_onsite or self.sector is not Sector.FERMION:
            return self == other
        self._check(other)
        zero = (0,) * self.lattice.d
        diff = self - other
        W = Circulant(self.lattice, {v: c for v, c in diff.W.items() if v != zero})
        return diff.X.is_zero() and diff.Y.is_zero() and W.is_zero()

    def is_zero(self) -> bool:
        return self.X.is_zero() and self.Y.is_zero() and self.W.is_zero()

    @property
    def kind(self) -> str:
        kinds = {self.X.kind, self.Y.kind, self.W.kind}
        if "complex" in kinds:
            return "complex"
        return "float" if "float" in kinds else "exact"

    def bracket(self, other: "QuadraticElement") -> "QuadraticElement":
        if self.sector is Sector.FERMION:
            return fermion_commutator(self, other)
        return boson_commutator(self, other)

    def dense(self, cap: int | None = None) -> np.ndarray:
        """Dense ``2N x 2N`` generator matrix."""
        N = self.lattice.N
        cap = dense_cap() if cap is None else cap
        if 2 * N > cap:
            raise DenseCapError(f"2N = {2 * N} exceeds dense cap {cap}")
        X, Y, W = (b.dense(cap) for b in (self.X, self.Y, self.W))
        if self.sector is Sector.FERMION:
            return np.block([[X, W], [-W.T, Y]])
        return np.block([[-W, Y], [-X, W.T]])

    def norm2(self):
        return sum(c * c for blk in (self.X, self.Y, self.W) for _, c in blk.items())

    def to_json(self) -> dict:
        return {
            "sector": self.sector.value,
            "lattice": self.lattice.to_json(),
            "X": self.X.to_json(),
            "Y": self.Y.to_json(),
            "W": self.W.to_json(),
        }

    @classmethod
    def from_json(cls, obj: Mapping) -> "QuadraticElement":
        lat = LatticeSpec.from_json({**obj["lattice"], "sector": obj.get("sector", obj["lattice"].get("sector"))})
        return cls(lat, *(Circulant.from_json(lat, obj[b]) for b in ("X", "Y", "W")))

    def __repr__(self):
        return f"QuadraticElement({self.sector.value}, X={self.X!r}, Y={self.Y!r}, W={self.W!r})"


def _require(lattice: LatticeSpec, sector: Sector):
    if lattice.sector is not sector:
        raise SectorError(f"expected a {sector.value} lattice, got {lattice.sector.value}")


def fermion_onsite(lattice: LatticeSpec) -> QuadraticElement:
    """The on-site generator ``E`` (identity ``W`` block)."""
    _require(lattice, Sector.FERMION)
    return QuadraticElement(lattice, W=Circulant.identity(lattice))


def fermion_named(lattice: LatticeSpec, kind: str, v) -> QuadraticElement:
    """Named fermionic generators ``HX``, ``HWplus``, ``HWminus`` and ``HW``.

    ``HX`` at ``v = 0`` raises; at other self-inverse offsets it (like
    ``HWminus``) is returned as a flagged zero element.
    """
    _require(lattice, Sector.FERMION)
    v = lattice.offset(v)
    zero = v == (0,) * lattice.d
    if kind == "HX":
        if zero:
            raise DegenerateElementError("H_X^(0) vanishes identically")
        Mm = m_minus(lattice, v)
        return QuadraticElement(lattice, X=Mm, Y=-Mm, degenerate=Mm.is_zero())
    if kind == "HWplus":
        return QuadraticElement(lattice, W=m_plus(lattice, v))
    if kind == "HWminus":
        Mm = m_minus(lattice, v)
        return QuadraticElement(lattice, W=Mm, degenerate=Mm.is_zero())
    if kind == "HW":
        return QuadraticElement(lattice, W=shift_coeffs(lattice, v))
    raise ValueError(f"unknown fermionic generator kind {kind!r}")


def fermion_nn(lattice: LatticeSpec, axis: int, x, y, w, wt) -> QuadraticElement:
    """Nearest-neighbour fermionic generator along ``e_axis``."""
    _require(lattice, Sector.FERMION)
    e = lattice.unit(axis)
    Mm = m_minus(lattice, e)
    W = shift_coeffs(lattice, e) * w + shift_coeffs(lattice, lattice.neg(e)) * wt
    return QuadraticElement(lattice, X=Mm * x, Y=Mm * y, W=W)


def fermion_commutator(a: QuadraticElement, b: QuadraticElement) -> QuadraticElement:
    """``[a, b]`` for fermionic generators; the result always has ``Y = -X``."""
    a._check(b)
    _require(a.lattice, Sector.FERMION)
    X = b.W @ a.W.T - a.W @ b.W.T
    W = a.W @ (b.Y - b.X) - b.W @ (a.Y - a.X)
    return QuadraticElement._raw(a.lattice, X, -X, W)


def boson_onsite(lattice: LatticeSpec, x, y, w) -> QuadraticElement:
    """On-site bosonic generator ``E_(x, y, w)``."""
    _require(lattice, Sector.BOSON)
    one = Circulant.identity(lattice)
    return QuadraticElement(lattice, X=one * x, Y=one * y, W=one * w)


def boson_nn(lattice: LatticeSpec, v, x, y, w, wt) -> QuadraticElement:
    """Nearest-neighbour bosonic generator along direction ``v`` (components in {0, +-1})."""
    _require(lattice, Sector.BOSON)
    raw = (v,) if isinstance(v, int) else tuple(v)
    if any(c not in (-1, 0, 1) for c in raw):
        raise ValueError(f"nearest-neighbour direction must have components in {{0, +-1}}, got {raw}")
    v = lattice.offset(raw)
    if v == (0,) * lattice.d:
        raise ValueError("zero direction: use boson_onsite for on-site generators")
    Mp = m_plus(lattice, v)
    W = shift_coeffs(lattice, v) * w + shift_coeffs(lattice, lattice.neg(v)) * wt
    return QuadraticElement(lattice, X=Mp * x, Y=Mp * y, W=W)


def boson_named(lattice: LatticeSpec, kind: str, v) -> QuadraticElement:
    """``LX``, ``LY`` or ``LW`` at any offset (``M_+`` in the named block)."""
    _require(lattice, Sector.BOSON)
    Mp = m_plus(lattice, v)
    blocks = {"LX": "X", "LY": "Y", "LW": "W"}
    if kind not in blocks:
        raise ValueError(f"unknown bosonic generator kind {kind!r}")
    return QuadraticElement(lattice, **{blocks[kind]: Mp})


def boson_commutator(a: QuadraticElement, b: QuadraticElement) -> QuadraticElement:
    """``[a, b]`` for bosonic generators; the result has a symmetric ``W`` block.

    Derived from the block form ``[[-W, Y], [-X, W^T]]``:
    ``X'' = X_b (W_a + W_a^T) - X_a (W_b + W_b^T)``,
    ``Y'' = Y_a (W_b + W_b^T) - Y_b (W_a + W_a^T)``,
    ``W'' = X_b Y_a - X_a Y_b``.
    """
    a._check(b)
    _require(a.lattice, Sector.BOSON)
    Sa = a.W + a.W.T
    Sb = b.W + b.W.T
    X = b.X @ Sa - a.X @ Sb
    Y = a.Y @ Sb - b.Y @ Sa
    W = b.X @ a.Y - a.X @ b.Y
    return QuadraticElement._raw(a.lattice, X, Y, W)


def sector_symmetry(L: QuadraticElement) -> SectorSymmetry:
    if L.sector is Sector.FERMION:
        return SectorSymmetry.FERMION_R if L.Y == -L.X else SectorSymmetry.NONE
    return SectorSymmetry.BOSON_P if L.W.is_symmetric() else SectorSymmetry.NONE


# ---------------------------------------------------------------------------
# creation/annihilation representation


@dataclass(frozen=True)
class QuadraticHamiltonianAB:
    """``sum A a a + B a a^dag + C a^dag a + D a^dag a^dag`` with circulant blocks."""

    lattice: LatticeSpec
    A: Circulant
    B: Circulant
    C: Circulant
    D: Circulant

    @classmethod
    def build(cls, lattice, A=None, B=None, C=None, D=None) -> "QuadraticHamiltonianAB":
        z = Circulant.zero(lattice)
        conv = lambda g: z if g is None else (g if isinstance(g, Circulant) else Circulant(lattice, g))
        return cls(lattice, conv(A), conv(B), conv(C), conv(D))

    def validate(self, tol: float = 1e-12):
        def dagger(g):
            return g.T.conj()

        for name, lhs, rhs in (
            ("B = B^dagger", self.B, dagger(self.B)),
            ("C = C^dagger", self.C, dagger(self.C)),
            ("A = D^dagger", self.A, dagger(self.D)),
        ):
            diff = lhs - rhs
            if any(abs(complex(c)) > tol for _, c in diff.items()):
                raise HermiticityError(f"Hermiticity relation violated: {name}")

    def normalized(self) -> "QuadraticHamiltonianAB":
        """Reorder with the (anti)commutation relations so that
        ``A = tau A^T``, ``D = tau D^T`` and ``B = tau C^T`` (constants dropped)."""
        tau = _tau(self.lattice)
        C_eff = self.C + self.B.T * tau
        C = C_eff * Fraction(1, 2)
        return QuadraticHamiltonianAB(
            self.lattice,
            (self.A + self.A.T * tau) * Fraction(1, 2),
            C.T * tau,
            C,
            (self.D + self.D.T * tau) * Fraction(1, 2),
        )


def _tau(lattice: LatticeSpec) -> int:
    return -1 if lattice.sector is Sector.FERMION else 1


def _real_part(g: Circulant, what: str, tol: float = 1e-12) -> Circulant:
    out = {}
    for v, c in g.items():
        c = complex(c) if isinstance(c, complex) else c
        if isinstance(c, complex):
            if abs(c.imag) > tol:
                raise HermiticityError(f"{what} acquired an imaginary part; input is not Hermitian")
            c = c.real
        out[v] = c
    return Circulant(g.lattice, out)


def convert_representation(h: QuadraticHamiltonianAB) -> QuadraticElement:
    """Generator ``L`` of a creation/annihilation Hamiltonian.

    The real Majorana/quadrature Hamiltonian matrix ``H = [[X, W], [tau W^T, Y]]``
    is recovered by inverting the linear relation between the two
    representations; then ``L = -H`` (fermions) or ``L = H sigma^T`` (bosons)
    is expressed in this module's block convention.
    """
    h.validate()
    n = h.normalized()
    tau = _tau(h.lattice)
    s = (1j if tau == -1 else 1) / 4  # sqrt(tau) / 4
    inv2s = 1 / (2 * s)
    XmY = (n.A + n.D) * inv2s
    XpY = (n.B + n.C) * inv2s
    Wsym = (n.D - n.A) * (inv2s / 1j)  # W + tau W^T
    Wanti = (n.B - n.C) * (inv2s / 1j)  # W - tau W^T
    X = _real_part((XpY + XmY) * 0.5, "X")
    Y = _real_part((XpY - XmY) * 0.5, "Y")
    W = _real_part((Wsym + Wanti) * 0.5, "W")
    lat = h.lattice
    if lat.sector is Sector.FERMION:
        return QuadraticElement(lat, -X, -Y, -W)
    # H sigma^T = [[W, -X], [Y, -W^T]] == [[-W', Y'], [-X', W'^T]]
    return QuadraticElement(lat, X=-Y, Y=-X, W=-W)


def to_ab_representation(L: QuadraticElement) -> QuadraticHamiltonianAB:
    """Inverse of :func:`convert_representation` (normalized blocks)."""
    lat = L.lattice
    if lat.sector is Sector.FERMION:
        X, Y, W = -L.X, -L.Y, -L.W
        tau = -1
    else:
        X, Y, W = -L.Y, -L.X, -L.W
        tau = 1
    s = (1j if tau == -1 else 1) / 4
    Wp = W + W.T * tau
    Wm = W - W.T * tau
    A = (X - Y - Wp * 1j) * s
    B = (X + Y + Wm * 1j) * s
    C = (X + Y - Wm * 1j) * s
    D = (X - Y + Wp * 1j) * s
    return QuadraticHamiltonianAB(lat, A, B, C, D)
