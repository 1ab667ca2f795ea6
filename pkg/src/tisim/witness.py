"""Constructive commutator words for the universality results.

Each builder follows a fixed bracket pattern: the on-site commutators of
the seed, the odd/even offset ladders along a line, the diagonal base case
and the box climb in ``d`` dimensions, the block transfers for bosons and
the string ladders for spins.  At every step the scalar prefactors are
obtained by an exact linear solve over the small pool of words that step
prescribes, so a returned word expands to its target exactly instead of
up to proportionality.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np

from .closure import element_space
from .lattice import LatticeSpec, Sector
from .quadratic import (
    QuadraticElement,
    boson_named,
    boson_nn,
    boson_onsite,
    fermion_named,
    fermion_nn,
    fermion_onsite,
)
from .spin import SpinElement, nn_generators, tau_symmetrize
from .words import Bracket, CommutatorWord, Leaf, combo, word_expand, word_to_json

__all__ = [
    "BoxVector",
    "decompose_box",
    "Witness",
    "NoWitnessError",
    "BranchSelectionError",
    "UnsupportedTargetError",
    "PreconditionError",
    "classify_fermion_seed",
    "fermion_witness_1d",
    "FermionSeedSet",
    "fermion_witness_dd",
    "boson_directions",
    "boson_witness",
    "spin_target",
    "spin_recipes",
]


class NoWitnessError(ValueError):
    """The seed generates nothing beyond its own span."""


class BranchSelectionError(ValueError):
    """A construction step could not be carried out for these seed parameters."""


class UnsupportedTargetError(ValueError):
    """The target lies outside the set the construction guarantees."""


class PreconditionError(ValueError):
    """The seed set violates the genericity conditions of the construction."""


# --------------------------------------------------------------------------
# boxes


@dataclass(frozen=True)
class BoxVector:
    """Offset with signed components; ``level`` is its infinity norm."""

    v: tuple

    @classmethod
    def from_offset(cls, lattice: LatticeSpec, v) -> "BoxVector":
        return cls(lattice.signed(v))

    @property
    def level(self) -> int:
        return max((abs(c) for c in self.v), default=0)

    def in_box(self, z: int) -> bool:
        return self.level <= z

    def __add__(self, other):
        return BoxVector(tuple(a + b for a, b in zip(self.v, other.v)))

    def __sub__(self, other):
        return BoxVector(tuple(a - b for a, b in zip(self.v, other.v)))


def decompose_box(v: BoxVector | Sequence[int], z: int | None = None) -> tuple[BoxVector, BoxVector]:
    """Split ``v`` of level ``z + 1`` as ``p + q`` with ``p, q, p - q`` all of level ``<= z``."""
    if not isinstance(v, BoxVector):
        v = BoxVector(tuple(v))
    if z is None:
        z = v.level - 1
    if z < 1:
        raise ValueError("decomposition needs z >= 1")
    if v.level != z + 1:
        raise ValueError(f"{v.v} has level {v.level}, expected {z + 1}")
    q = BoxVector(tuple((1 if c > 0 else -1) if abs(c) == z + 1 else 0 for c in v.v))
    return v - q, q


# --------------------------------------------------------------------------
# results and the exact step solver


@dataclass(frozen=True, eq=False)
class Witness:
    word: CommutatorWord
    generators: tuple
    target: object

    def expand(self):
        return word_expand(self.word, self.generators)

    def verify(self, tol: float = 1e-9) -> bool:
        got = self.expand()
        if self.target.kind == "exact" and got.kind == "exact":
            return got == self.target
        space = element_space(self.target.lattice)
        diff = np.asarray([complex(c) for c in space.to_vec(got - self.target)])
        return float(np.abs(diff).max(initial=0.0)) <= tol

    def to_json(self) -> dict:
        return {
            "word": word_to_json(self.word),
            "generators": [g.to_json() for g in self.generators],
            "target": self.target.to_json(),
        }


def _exact_solve(columns: list[list[Fraction]], target: list[Fraction]) -> list[Fraction] | None:
    """Some rational ``c`` with ``sum_j c_j columns[j] == target``, or ``None``."""
    n = len(columns)
    rows = [[col[i] for col in columns] + [target[i]] for i in range(len(target))]
    rows = [r for r in rows if any(r)]
    pivots = []
    r = 0
    for c in range(n):
        piv = next((i for i in range(r, len(rows)) if rows[i][c] != 0), None)
        if piv is None:
            continue
        rows[r], rows[piv] = rows[piv], rows[r]
        lead = rows[r][c]
        rows[r] = [x / lead for x in rows[r]]
        for i in range(len(rows)):
            if i != r and rows[i][c] != 0:
                f = rows[i][c]
                rows[i] = [a - f * b for a, b in zip(rows[i], rows[r])]
        pivots.append(c)
        r += 1
    if any(row[n] != 0 for row in rows[r:]):
        return None
    sol = [Fraction(0)] * n
    for i, c in enumerate(pivots):
        sol[c] = rows[i][n]
    return sol


class _Builder:
    """Words with cached values over a fixed generator list."""

    def __init__(self, generators: Sequence):
        self.gens = tuple(generators)
        self.lattice = self.gens[0].lattice
        self.space = element_space(self.lattice)
        self.exact = all(g.kind == "exact" for g in self.gens)
        self._val: dict[int, tuple] = {}
        self.leaves = [self._keep(Leaf(i), g) for i, g in enumerate(self.gens)]

    def _keep(self, w, value):
        self._val[id(w)] = (w, value)
        return w

    def value(self, w):
        hit = self._val.get(id(w))
        if hit is not None and hit[0] is w:
            return hit[1]
        return self._keep(w, word_expand(w, self.gens))  # pragma: no cover - words are built here

    def br(self, a, b) -> Bracket:
        return self._keep(Bracket(a, b), self.value(a).bracket(self.value(b)))

    def solve(self, target, pool: Sequence[CommutatorWord]) -> CommutatorWord | None:
        pool = list(pool)
        t = self.space.to_vec(target)
        cols = [self.space.to_vec(self.value(w)) for w in pool]
        if self.exact and target.kind == "exact":
            sol = _exact_solve([[Fraction(c) for c in col] for col in cols], [Fraction(c) for c in t])
            if sol is None:
                return None
        else:
            if not cols:
                return combo() if not any(t) else None
            A = np.array([[float(c) for c in col] for col in cols]).T
            b = np.array([float(c) for c in t])
            x, *_ = np.linalg.lstsq(A, b, rcond=None)
            if np.linalg.norm(A @ x - b) > 1e-9 * max(1.0, float(np.linalg.norm(b))):
                return None
            sol = [float(c) if abs(c) > 1e-13 else 0 for c in x]
        w = combo(*[(c, pw) for c, pw in zip(sol, pool)])
        if id(w) not in self._val:
            self._keep(w, target)
        return w

    def need(self, target, pool, what: str) -> CommutatorWord:
        w = self.solve(target, pool)
        if w is None:
            raise BranchSelectionError(f"construction step for {what} failed")
        return w


# --------------------------------------------------------------------------
# fermions


def classify_fermion_seed(m: int, x, y, w, wt) -> str:
    """Case label ``1a``/``1b`` (odd ``m``) or ``2a``..``2d`` (even ``m``) of a nearest-neighbour seed."""
    if m < 3:
        raise ValueError("classification needs m >= 3")
    trivial = x == y and w == wt
    if m % 2:
        return "1a" if trivial else "1b"
    if trivial:
        return "2a"
    if w == -wt:
        return "2b"
    return "2c" if y == -x else "2d"


_GUARANTEED = {
    "1a": "the initial span",
    "1b": "the space with Y = -X",
    "2a": "the initial span",
    "2b": "the odd-hopping set spanned by H_X^(odd), H_W+^(even), H_W-^(odd)",
    "2c": "the space with Y = -X",
    "2d": "the set spanned by H_X^(k), H_W^(even) and consecutive odd H_W differences",
}


class _FermionLine:
    """Named generators along multiples of a primitive direction ``u``."""

    def __init__(self, b: _Builder, u: tuple, e_word, h_word, params: tuple):
        self.b = b
        self.lat = b.lattice
        self.u = u
        self.m = self.lat.m
        self.e = e_word
        self.h = h_word
        self.case = classify_fermion_seed(self.m, *params)
        self.params = params
        self.words: dict[tuple[str, int], CommutatorWord] = {}
        self.pool: list[CommutatorWord] = [e_word, h_word]
        if self.case not in ("1a", "2a"):
            self._odd_ladder()
            if self.case == "2c":
                self._hw_ladder_real()
            elif self.case == "2d":
                self._hw_ladder_even()

    def off(self, k: int) -> tuple:
        return self.lat.offset(tuple(k * c for c in self.u))

    def named(self, kind: str, k: int) -> QuadraticElement:
        if kind == "HX" and self.off(k) == (0,) * self.lat.d:
            return QuadraticElement.zero(self.lat)
        return fermion_named(self.lat, kind, self.off(k))

    def _put(self, kind, k, pool):
        w = self.b.need(self.named(kind, k), pool, f"{kind}^({k}u)")
        self.words[kind, k] = w
        self.pool.append(w)
        return w

    def _odd_ladder(self):
        b, e, h = self.b, self.e, self.h
        c1 = b.br(h, e)
        c2 = b.br(c1, e)
        wm1 = self._put("HWminus", 1, [c1, c2])
        hx1 = self._put("HX", 1, [b.br(e, wm1)])
        wp2 = self._put("HWplus", 2, [b.br(hx1, wm1), e])
        top = self.m - 1 if self.m % 2 else self.m // 2 - 1
        for k in range(1, top + 1):
            wm = self._put("HWminus", 2 * k + 1, [b.br(hx1, self.words["HWplus", 2 * k]), self.words["HWminus", 2 * k - 1]])
            self._put("HX", 2 * k + 1, [b.br(e, wm)])
            self._put("HWplus", 2 * k + 2, [b.br(hx1, wm), self.words["HWplus", 2 * k]])

    def _reflect(self, k):
        # H_W^(-k) = H_W^(k) + [[H_W^(k), E], E] / 2
        if ("HW", -k) not in self.words:
            hw = self.words["HW", k]
            self._put("HW", -k, [hw, self.b.br(self.b.br(hw, self.e), self.e)])
        return self.words["HW", -k]

    def _hw_ladder_real(self):
        b, e = self.b, self.e
        self.words["HW", 0] = e
        hw1 = self._put("HW", 1, [self.h, self.words["HX", 1], self.words["HWminus", 1]])
        half = self.m // 2
        for k in range(1, half + 1):
            back = self._reflect(2 * (k - 1)) if k > 1 else e
            hw = self._put("HW", 2 * k, [b.br(self.words["HX", 2 * k - 1], hw1), back])
            self._put("HX", 2 * k, [b.br(e, hw)])
        for k in range(1, half):
            back = self._reflect(2 * k - 1)
            self._put("HW", 2 * k + 1, [b.br(self.words["HX", 2 * k], hw1), back])

    def _hw_ladder_even(self):
        # [H~, H_X^(2k-1)] ~ H_W^(2k) - H_W^(-(2k-2)) with H~ = H_0 - wt0 H_W-^(e)
        b, e = self.b, self.e
        wm1 = self.words["HWminus", 1]
        hx1 = self.words["HX", 1]
        self.words["HW", 0] = e
        half = self.m // 2
        for k in range(1, half + 1):
            hx = self.words["HX", 2 * k - 1]
            pool = [b.br(self.h, hx), b.br(wm1, hx), self._reflect(2 * k - 2) if k > 1 else e]
            if ("HW", self.m - 2 * k) in self.words:
                pool.append(self._reflect(self.m - 2 * k))
            hw = self._put("HW", 2 * k, pool)
            self._put("HX", 2 * k, [b.br(e, hw)])
        for l in range(half):
            self.pool.append(b.br(hx1, self.words["HW", 2 * l]))

    def witness(self, target) -> CommutatorWord:
        w = self.b.solve(target, self.pool)
        if w is not None:
            return w
        if self.case in ("1a", "2a"):
            raise NoWitnessError(f"case {self.case}: the seed commutes with E up to its own span, "
                                 "no further interaction can be reached")
        raise UnsupportedTargetError(f"case {self.case} only guarantees {_GUARANTEED[self.case]}")


def _fermion_target(lattice: LatticeSpec, target) -> QuadraticElement:
    if isinstance(target, QuadraticElement):
        if target.lattice != lattice:
            raise ValueError("target lattice differs from the seed lattice")
        return target
    kind, v = target
    if kind == "E":
        return fermion_onsite(lattice)
    return fermion_named(lattice, kind, v)


def fermion_witness_1d(seed: Sequence, m: int, target) -> Witness:
    """Word over ``[E, H_0]`` expanding to ``target``.

    ``seed`` is ``(x0, y0, w0, wt0)``; ``target`` a ``QuadraticElement`` or
    a pair ``(kind, k)`` with ``kind`` in ``HX``, ``HWplus``, ``HWminus``,
    ``HW``, ``E``.
    """
    lat = LatticeSpec(1, m, Sector.FERMION)
    x, y, w, wt = seed
    gens = [fermion_onsite(lat), fermion_nn(lat, 1, x, y, w, wt)]
    b = _Builder(gens)
    line = _FermionLine(b, (1,), b.leaves[0], b.leaves[1], (x, y, w, wt))
    tgt = _fermion_target(lat, target)
    return Witness(line.witness(tgt), b.gens, tgt)


@dataclass(frozen=True)
class FermionSeedSet:
    """On-site ``E``, one nearest-neighbour seed per axis and explicit diagonal ``H_W`` seeds."""

    d: int
    m: int
    axis_seeds: tuple  # ((x, y, w, wt), ...) one per axis
    diagonal_seeds: tuple = ()  # offsets v for extra H_W^(v) generators

    def __post_init__(self):
        if len(self.axis_seeds) != self.d:
            raise ValueError(f"need {self.d} axis seeds, got {len(self.axis_seeds)}")

    @property
    def lattice(self) -> LatticeSpec:
        return LatticeSpec(self.d, self.m, Sector.FERMION)

    def generators(self) -> list[QuadraticElement]:
        lat = self.lattice
        gens = [fermion_onsite(lat)]
        gens += [fermion_nn(lat, i + 1, *s) for i, s in enumerate(self.axis_seeds)]
        gens += [fermion_named(lat, "HW", v) for v in self.diagonal_seeds]
        return gens

    def check(self):
        for i, (x, y, w, wt) in enumerate(self.axis_seeds):
            if self.m % 2:
                if x == y and w == wt:
                    raise PreconditionError(f"axis {i + 1}: need x != y or w != wt")
            elif not (x == -y and w != -wt):
                raise PreconditionError(f"axis {i + 1}: even m needs x = -y and w != -wt")


class _FermionBox:
    def __init__(self, seeds: FermionSeedSet):
        seeds.check()
        self.seeds = seeds
        self.lat = seeds.lattice
        self.b = _Builder(seeds.generators())
        self.e = self.b.leaves[0]
        d = seeds.d
        self.lines = []
        for i in range(d):
            u = self.lat.unit(i + 1)
            self.lines.append(_FermionLine(self.b, u, self.e, self.b.leaves[i + 1], tuple(seeds.axis_seeds[i])))
        self.diag = {self.lat.offset(v): self.b.leaves[1 + d + k] for k, v in enumerate(seeds.diagonal_seeds)}
        self._hw: dict = {}
        self._hx: dict = {}

    def _axis_word(self, kind, v):
        nz = [i for i, c in enumerate(v) if c]
        i = nz[0]
        line = self.lines[i]
        tgt = fermion_named(self.lat, kind, v)
        return line.witness(tgt)

    def hw(self, v) -> CommutatorWord:
        v = self.lat.offset(v)
        if v in self._hw:
            return self._hw[v]
        sv = self.lat.signed(v)
        nz = [i for i, c in enumerate(sv) if c]
        tgt = fermion_named(self.lat, "HW", v)
        if not nz:
            w = self.e
        elif len(nz) == 1:
            w = self._axis_word("HW", v)
        elif BoxVector(sv).level == 1:
            w = self._diag_hw(v, sv)
        else:
            p, q = decompose_box(BoxVector(sv))
            pw, qx, dw = self.hw(p.v), self.hx(q.v), self.hw((p - q).v)
            w = self.b.need(tgt, [self.b.br(qx, pw), dw], f"H_W^{sv}")
        self._hw[v] = w
        return w

    def _diag_hw(self, v, sv):
        tgt = fermion_named(self.lat, "HW", v)
        if self.lat.m % 2 == 0:
            neg = self.lat.neg(v)
            if v in self.diag:
                return self.diag[v]
            if neg in self.diag:
                seed = self.diag[neg]
                return self.b.need(tgt, [seed, self.b.br(self.b.br(seed, self.e), self.e)], f"H_W^{sv}")
            raise UnsupportedTargetError(
                f"even m: diagonal H_W^{sv} is not reachable from axis seeds; add it to the diagonal seeds")
        hx = self.hx(v)
        line = _FermionLine(self.b, sv, self.e, hx, (1, -1, 0, 0))
        return line.witness(tgt)

    def hx(self, v) -> CommutatorWord:
        v = self.lat.offset(v)
        if v in self._hx:
            return self._hx[v]
        sv = self.lat.signed(v)
        nz = [i for i, c in enumerate(sv) if c]
        tgt = (QuadraticElement.zero(self.lat) if self.lat.is_self_inverse(v)
               else fermion_named(self.lat, "HX", v))
        if not nz:
            w = combo()
        elif len(nz) == 1:
            w = self._axis_word("HX", v) if not self.lat.is_self_inverse(v) else combo()
        elif BoxVector(sv).level == 1:
            j = nz[0]
            ej = tuple(sv[j] if i == j else 0 for i in range(len(sv)))
            rest = tuple(0 if i == j else c for i, c in enumerate(sv))
            a = self.hw(tuple(-c for c in ej))
            c = self.hw(rest)
            w = self.b.need(tgt, [self.b.br(a, c)], f"H_X^{sv}")
        else:
            w = self.b.need(tgt, [self.b.br(self.e, self.hw(v))], f"H_X^{sv}")
        self._hx[v] = w
        return w

    def witness(self, target: QuadraticElement) -> CommutatorWord:
        if target.Y != -target.X:
            raise UnsupportedTargetError("target is outside the space with Y = -X")
        pool = []
        seen = set()
        for v, c in target.X.items():
            key = min(v, self.lat.neg(v))
            if key not in seen:
                seen.add(key)
                pool.append(self.hx(key))
        for v, c in target.W.items():
            pool.append(self.hw(v))
        w = self.b.solve(target, pool)
        if w is None:  # pragma: no cover - pool spans every R element with these offsets
            raise BranchSelectionError("could not assemble the target from box words")
        return w


def fermion_witness_dd(seeds: FermionSeedSet, target) -> Witness:
    """Word over the seed set's generators expanding to ``target`` (``(kind, v)`` or element)."""
    box = _FermionBox(seeds)
    tgt = _fermion_target(box.lat, target)
    return Witness(box.witness(tgt), box.b.gens, tgt)


# --------------------------------------------------------------------------
# bosons


def boson_directions(d: int) -> list[tuple[int, ...]]:
    """Nonzero directions with components in ``{0, +-1}``, one per sign pair."""
    out = []
    for c in itertools.product((0, 1, -1), repeat=d):
        if any(c) and next(x for x in c if x) > 0:
            out.append(c)
    return out


class _BosonLine:
    def __init__(self, b: _Builder, u: tuple, seed_word, params: tuple):
        self.b = b
        self.lat = b.lattice
        self.u = u
        ex, ey, ew = b.leaves[:3]
        self.ex, self.ey, self.ew = ex, ey, ew
        self.words: dict = {}
        x, y, w, wt = params
        seed_val = b.value(seed_word)
        ly = b.solve(self.named("LY", 1), [seed_word])
        if ly is None:
            if y != 0:
                lw = b.need(self.named("LW", 1), [b.br(b.br(seed_word, ew), ex)], "L_W from the y-branch")
                ly = b.need(self.named("LY", 1), [b.br(lw, ey)], "L_Y")
            elif x != 0:
                lw = b.need(self.named("LW", 1), [b.br(b.br(seed_word, ew), ey)], "L_W from the x-branch")
                ly = b.need(self.named("LY", 1), [b.br(lw, ey)], "L_Y")
            elif w + wt != 0:
                ly = b.need(self.named("LY", 1), [b.br(seed_word, ey)], "L_Y from the w-branch")
            elif seed_val.is_zero():
                raise NoWitnessError("zero seed generates nothing")
            else:
                raise NoWitnessError("antisymmetric-W seed commutes with every on-site generator")
        self.words["LY", 1] = ly
        self.words["LW", 0] = b.need(self.named("LW", 0), [ew], "L_W^(0)")
        lw1 = b.need(self.named("LW", 1), [b.br(ly, ex)], "L_W^(u)")
        self.words["LW", 1] = lw1
        self.words["LX", 1] = self._to_x(1)
        lx1 = self.words["LX", 1]
        self.words["LW", 2] = b.need(self.named("LW", 2), [b.br(ly, lx1), ew], "L_W^(2u)")
        self.words["LX", 2] = self._to_x(2)
        self.words["LY", 2] = self._to_y(2)
        for k in range(2, self.lat.m):
            prev = self.words["LW", k - 1]
            lw = b.need(self.named("LW", k + 1), [b.br(self.words["LY", k], lx1), prev], f"L_W^({k + 1}u)")
            self.words["LW", k + 1] = lw
            self.words["LX", k + 1] = self._to_x(k + 1)
            self.words["LY", k + 1] = self._to_y(k + 1)

    def named(self, kind, k):
        return boson_named(self.lat, kind, self.lat.offset(tuple(k * c for c in self.u)))

    def _to_x(self, k):
        return self.b.need(self.named("LX", k), [self.b.br(self.words["LW", k], self.ex)], "W-to-X transfer")

    def _to_y(self, k):
        return self.b.need(self.named("LY", k), [self.b.br(self.words["LW", k], self.ey)], "W-to-Y transfer")


class _BosonBox:
    def __init__(self, lattice: LatticeSpec, seeds: dict):
        self.lat = lattice
        d = lattice.d
        dirs = boson_directions(d) if d > 1 else [(1,)]
        norm = {}
        for u, p in seeds.items():
            # accept canonical offsets such as (1, 2) for (1, -1) on m = 3
            u = lattice.signed(u) if lattice.m > 2 else tuple(u)
            key = u if next(x for x in u if x) > 0 else tuple(-x for x in u)
            norm[key] = (u, p)
        missing = [u for u in dirs if u not in norm]
        if missing:
            raise PreconditionError(f"missing nearest-neighbour seeds along directions {missing}")
        gens = [boson_onsite(lattice, 1, 0, 0), boson_onsite(lattice, 0, 1, 0), boson_onsite(lattice, 0, 0, 1)]
        order = [norm[u] for u in dirs]
        gens += [boson_nn(lattice, u, *p) for u, p in order]
        self.b = _Builder(gens)
        self.lines = {}
        for k, (u, p) in enumerate(order):
            self.lines[dirs[k]] = _BosonLine(self.b, u, self.b.leaves[3 + k], tuple(p))
        self._cache: dict = {}

    def get(self, kind: str, v) -> CommutatorWord:
        v = self.lat.offset(v)
        key = (kind, min(v, self.lat.neg(v)))
        if key in self._cache:
            return self._cache[key]
        sv = self.lat.signed(v)
        tgt = boson_named(self.lat, kind, v)
        bv = BoxVector(sv)
        if bv.level == 0:
            w = self._base(kind, sv)
        elif bv.level == 1 or self.lat.d == 1:
            w = self._base(kind, sv)
        elif kind == "LW":
            p, q = decompose_box(bv)
            pool = [self.b.br(self.get("LX", p.v), self.get("LY", q.v)), self.get("LW", (p - q).v)]
            w = self.b.need(tgt, pool, f"L_W^{sv}")
        else:
            e = self.b.leaves[0] if kind == "LX" else self.b.leaves[1]
            w = self.b.need(tgt, [self.b.br(self.get("LW", v), e)], f"{kind}^{sv}")
        self._cache[key] = w
        return w

    def _base(self, kind, sv):
        if not any(sv):
            line = next(iter(self.lines.values()))
            return self._line_word(line, kind, 0)
        u0 = next(x for x in sv if x)
        sign = 1 if u0 > 0 else -1
        u = tuple(sign * x for x in sv)
        if self.lat.d == 1:
            line = self.lines[(1,)]
            return self._line_word(line, kind, self.lat.offset(sv)[0])
        line = self.lines[tuple(1 if x > 0 else -1 if x < 0 else 0 for x in u)]
        return self._line_word(line, kind, 1)

    def _line_word(self, line: _BosonLine, kind, k):
        if k == 0:
            tgt = boson_named(self.lat, kind, (0,) * self.lat.d)
            if kind == "LW":
                return line.words["LW", 0]
            e = self.b.leaves[0] if kind == "LX" else self.b.leaves[1]
            return self.b.need(tgt, [e], f"{kind}^(0)")
        return line.words[kind, k]

    def witness(self, target: QuadraticElement) -> CommutatorWord:
        if not target.W.is_symmetric():
            raise UnsupportedTargetError("target is outside the point-symmetric space (W must be symmetric)")
        pool = []
        for kind, blk in (("LX", target.X), ("LY", target.Y), ("LW", target.W)):
            for v, _ in blk.items():
                pool.append(self.get(kind, v))
        w = self.b.solve(target, pool)
        if w is None:  # pragma: no cover - named words span the symmetric blocks
            raise BranchSelectionError("could not assemble the target from box words")
        return w


def boson_witness(lattice: LatticeSpec, seeds, target) -> Witness:
    """Word over ``[E_X, E_Y, E_W, L^(u)...]`` expanding to ``target``.

    ``seeds`` maps directions to ``(x, y, w, wt)``; in one dimension a
    single tuple is accepted.  ``target`` is a ``QuadraticElement`` or a
    pair ``(kind, v)`` with ``kind`` in ``LX``, ``LY``, ``LW``.
    """
    if lattice.sector is not Sector.BOSON:
        raise ValueError("boson witnesses need a boson lattice")
    if not isinstance(seeds, dict):
        if lattice.d != 1:
            raise PreconditionError("d > 1 needs a seed for every direction")
        seeds = {(1,): tuple(seeds)}
    box = _BosonBox(lattice, seeds)
    if isinstance(target, QuadraticElement):
        tgt = target
    else:
        kind, v = target
        tgt = boson_named(lattice, kind, v)
    return Witness(box.witness(tgt), box.b.gens, tgt)


# --------------------------------------------------------------------------
# spins


def _third(i: int, j: int) -> int:
    return 6 - i - j


def _gidx(k: int, l: int) -> int:
    # generator order: tau(sigma_1..3), then g_11, g_12, ..., g_33
    return 3 + 3 * (k - 1) + (l - 1)


def spin_target(lattice: LatticeSpec, spec) -> SpinElement:
    """Element for ``("sss", i)``, ``("J", i, j, r)`` or ``("N", i)``."""
    kind = spec[0]
    m = lattice.m
    if kind == "sss":
        return tau_symmetrize([spec[1]] * 3, lattice)
    if kind == "J":
        _, i, j, r = spec
        if r + 2 > m:
            raise UnsupportedTargetError(f"J^({r}) needs {r + 2} sites, ring has {m}")
        return tau_symmetrize([i] + [j] * r + [i], lattice)
    if kind == "N":
        return tau_symmetrize({0: spec[1], 2: spec[1]}, lattice)
    raise UnsupportedTargetError(f"unknown spin target family {kind!r}")


class _SpinChain:
    def __init__(self, lattice: LatticeSpec):
        if lattice.D != 2:
            raise UnsupportedTargetError("spin recipes are for qubits (D = 2)")
        if lattice.m < 3:
            raise UnsupportedTargetError("spin recipes need m >= 3")
        self.lat = lattice
        self.b = _Builder(nn_generators(lattice))
        self._J: dict = {}

    def g(self, k, l):
        return self.b.leaves[_gidx(k, l)]

    def need(self, tgt, pool, what):
        # on-site strings are always available and absorb same-site overlap terms
        return self.b.need(tgt, list(pool) + self.b.leaves[:3], what)

    def sss(self, i):
        a = i % 3 + 1
        c = _third(i, a)
        tgt = spin_target(self.lat, ("sss", i))
        return self.need(tgt, [self.b.br(self.g(a, i), self.g(i, c))], f"tau(s{i} s{i} s{i})")

    def J(self, i, j, r):
        if i == j:
            raise UnsupportedTargetError("J_ij needs i != j")
        key = (i, j, r)
        if key in self._J:
            return self._J[key]
        tgt = spin_target(self.lat, ("J", i, j, r))
        k = _third(i, j)
        if r == 0:
            w = self.g(i, i)
        elif r == 1:
            w = self.need(tgt, [self.b.br(self.g(i, k), self.g(i, i))], f"J_{i}{j}^(1)")
        else:
            w = self.need(tgt, [self.b.br(self.J(i, j, r - 1), self.g(k, i)), self.J(i, j, r - 2)], f"J_{i}{j}^({r})")
        self._J[key] = w
        return w

    def four(self, a, outer):
        # tau(s_a s_a s_a s_a 1) from the J ladder with outer letter ``outer``
        k = _third(a, outer)
        tgt = tau_symmetrize([a] * 4, self.lat)
        pool = [self.b.br(self.g(outer, k), self.J(outer, a, 3)), self.J(outer, a, 2)]
        return self.need(tgt, pool, f"tau(s{a}^4)")

    def N(self, i):
        if self.lat.m != 5:
            raise UnsupportedTargetError("next-to-nearest-neighbour recipe exists only for m = 5")
        a = i % 3 + 1
        c = _third(i, a)
        tgt = spin_target(self.lat, ("N", i))
        inner = self.b.br(self.b.br(self.g(i, i), self.g(a, c)), self.g(c, a))
        return self.need(tgt, [inner, self.four(a, i), self.four(c, i)], f"N_{i}")


def spin_recipes(m: int, target) -> Witness:
    """Word over on-site and nearest-neighbour qubit generators for a supported target family."""
    from .spin import spin_lattice

    lat = spin_lattice(m)
    chain = _SpinChain(lat)
    kind = target[0]
    if kind == "sss":
        w = chain.sss(target[1])
    elif kind == "J":
        w = chain.J(*target[1:])
    elif kind == "N":
        w = chain.N(target[1])
    else:
        raise UnsupportedTargetError(f"unknown spin target family {kind!r}")
    return Witness(w, chain.b.gens, spin_target(lat, target))
