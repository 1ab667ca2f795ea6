"""Catalogue of structural bracket identities, checked exhaustively on small lattices.

Every identity is stated in this package's conventions (fermionic block
form ``[[X, W], [-W^T, Y]]``, bosonic block form ``[[-W, Y], [-X, W^T]]``).
The bracket used for checking can be swapped out, which is how the
harness verifies that a corrupted convention is caught and attributed to
the right identity.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Iterable

from .lattice import LatticeSpec, Sector
from .quadratic import (
    QuadraticElement,
    boson_commutator,
    boson_named,
    boson_nn,
    boson_onsite,
    fermion_commutator,
    fermion_named,
    fermion_nn,
    fermion_onsite,
)

__all__ = ["IdentityResult", "RelationsReport", "relations_suite", "IDENTITIES"]

Bracket = Callable[[QuadraticElement, QuadraticElement], QuadraticElement]


@dataclass
class IdentityResult:
    name: str
    sector: str
    statement: str
    checked: int = 0
    failures: list = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return self.checked > 0 and not self.failures

    def to_json(self) -> dict:
        return {
            "name": self.name,
            "sector": self.sector,
            "statement": self.statement,
            "checked": self.checked,
            "passed": self.passed,
            "failures": self.failures[:10],
        }


@dataclass
class RelationsReport:
    results: list

    @property
    def passed(self) -> bool:
        return all(r.passed for r in self.results)

    def failed(self) -> list[str]:
        return [r.name for r in self.results if not r.passed]

    def to_json(self) -> dict:
        return {"passed": self.passed, "identities": [r.to_json() for r in self.results]}


# --------------------------------------------------------------------------
# helpers


def _mul(lat, k, v):
    return lat.offset(tuple(k * c for c in v))


def _hx(lat, v):
    v = lat.offset(v)
    if lat.is_self_inverse(v):
        return QuadraticElement.zero(lat)
    return fermion_named(lat, "HX", v)


def _hw(lat, v):
    return fermion_named(lat, "HW", v)


def _wp(lat, v):
    return fermion_named(lat, "HWplus", v)


def _wm(lat, v):
    return fermion_named(lat, "HWminus", v)


def _sample_offsets(lat: LatticeSpec) -> list[tuple]:
    if lat.d == 1:
        return list(lat.offsets())
    base = {0, 1, 2, lat.m - 1}
    return sorted({lat.offset(c) for c in itertools.product(sorted(base), repeat=lat.d)})


def _neg(lat, v):
    return lat.neg(v)


def _add(lat, a, b):
    return lat.add(a, b)


# each identity: (name, sector, statement, generator of (label, lhs, rhs) given lattice and bracket)


def _fermion_identities():
    def hx_e(lat, br):
        E = fermion_onsite(lat)
        for k in _sample_offsets(lat):
            yield k, br(_hx(lat, k), E), _wm(lat, k) * 2

    def e_hw(lat, br):
        E = fermion_onsite(lat)
        for k in _sample_offsets(lat):
            yield k, br(E, _hw(lat, k)), _hx(lat, k)

    def hx_hx(lat, br):
        offs = _sample_offsets(lat)
        for k, l in itertools.product(offs, offs):
            yield (k, l), br(_hx(lat, k), _hx(lat, l)), QuadraticElement.zero(lat)

    def hx_hw(lat, br):
        offs = _sample_offsets(lat)
        for k, l in itertools.product(offs, offs):
            rhs = (_hw(lat, _add(lat, l, k)) - _hw(lat, _add(lat, l, _neg(lat, k)))) * 2
            yield (k, l), br(_hx(lat, k), _hw(lat, l)), rhs

    def hw_hw(lat, br):
        offs = _sample_offsets(lat)
        for k, l in itertools.product(offs, offs):
            yield (k, l), br(_hw(lat, k), _hw(lat, l)), _hx(lat, _add(lat, l, _neg(lat, k)))

    def wplus_base(lat, br):
        e = lat.unit(1)
        E = fermion_onsite(lat)
        yield e, br(_hx(lat, e), _wm(lat, e)) / 2 + E * 2, _wp(lat, _mul(lat, 2, e))

    def odd_ladder(lat, br):
        e = lat.unit(1)
        for k in range(1, lat.m):
            lhs = br(_hx(lat, e), _wp(lat, _mul(lat, 2 * k, e))) / 2 + _wm(lat, _mul(lat, 2 * k - 1, e))
            yield k, lhs, _wm(lat, _mul(lat, 2 * k + 1, e))

    def even_ladder(lat, br):
        e = lat.unit(1)
        for k in range(1, lat.m):
            lhs = br(_hx(lat, e), _wm(lat, _mul(lat, 2 * k + 1, e))) / 2 + _wp(lat, _mul(lat, 2 * k, e))
            yield k, lhs, _wp(lat, _mul(lat, 2 * k + 2, e))

    def reflection(lat, br):
        E = fermion_onsite(lat)
        for k in _sample_offsets(lat):
            hw = _hw(lat, k)
            yield k, hw + br(br(hw, E), E) / 2, _hw(lat, _neg(lat, k))

    def real_seed(lat, br):
        e = lat.unit(1)
        for x, w, wt in ((1, 2, 3), (Fraction(1, 2), -1, 4), (0, 1, 0)):
            lhs = fermion_nn(lat, 1, x, -x, w, wt)
            rhs = _hx(lat, e) * x - _wm(lat, e) * wt + _hw(lat, e) * (w + wt)
            yield (x, w, wt), lhs, rhs

    def onsite_commutes(lat, br):
        for x, w in ((1, 1), (2, -3)):
            yield (x, w), br(fermion_nn(lat, 1, x, x, w, w), fermion_onsite(lat)), QuadraticElement.zero(lat)

    return [
        ("HX-E", "[H_X^(k), E] = 2 H_W-^(k)", hx_e),
        ("E-HW", "[E, H_W^(k)] = H_X^(k)", e_hw),
        ("HX-HX", "[H_X^(k), H_X^(l)] = 0", hx_hx),
        ("HX-HW", "[H_X^(k), H_W^(l)] = 2 (H_W^(l+k) - H_W^(l-k))", hx_hw),
        ("HW-HW", "[H_W^(k), H_W^(l)] = H_X^(l-k)", hw_hw),
        ("W+-base", "[H_X^(e), H_W-^(e)]/2 + 2E = H_W+^(2e)", wplus_base),
        ("odd-ladder", "[H_X^(e), H_W+^(2ke)]/2 + H_W-^((2k-1)e) = H_W-^((2k+1)e)", odd_ladder),
        ("even-ladder", "[H_X^(e), H_W-^((2k+1)e)]/2 + H_W+^(2ke) = H_W+^((2k+2)e)", even_ladder),
        ("HW-reflection", "H_W^(k) + [[H_W^(k), E], E]/2 = H_W^(-k)", reflection),
        ("real-seed", "H_0 (y = -x) = x H_X^(e) - wt H_W-^(e) + (w + wt) H_W^(e)", real_seed),
        ("symmetric-seed", "[H_0, E] = 0 when X_0 = Y_0 and W_0 symmetric", onsite_commutes),
    ]


def _boson_identities():
    def LX(lat, v):
        return boson_named(lat, "LX", v)

    def LY(lat, v):
        return boson_named(lat, "LY", v)

    def LW(lat, v):
        return boson_named(lat, "LW", v)

    def ly_ex(lat, br):
        for v in _sample_offsets(lat):
            yield v, br(LY(lat, v), boson_onsite(lat, 1, 0, 0)), LW(lat, v)

    def ly_lx_base(lat, br):
        e = lat.unit(1)
        yield e, br(LY(lat, e), LX(lat, e)) - boson_onsite(lat, 0, 0, 2), LW(lat, _mul(lat, 2, e))

    def range_ladder(lat, br):
        e = lat.unit(1)
        for k in range(0, lat.m + 1):
            ke = _mul(lat, k, e)
            rhs = LW(lat, _mul(lat, k + 1, e)) + LW(lat, _mul(lat, k - 1, e))
            yield k, br(LY(lat, ke), LX(lat, e)), rhs

    def lx_ly(lat, br):
        offs = _sample_offsets(lat)
        for p, q in itertools.product(offs, offs):
            rhs = -(LW(lat, _add(lat, p, q)) + LW(lat, _add(lat, p, _neg(lat, q))))
            yield (p, q), br(LX(lat, p), LY(lat, q)), rhs

    def w_to_y(lat, br):
        for v in _sample_offsets(lat):
            yield v, br(LW(lat, v), boson_onsite(lat, 0, Fraction(-1, 2), 0)), LY(lat, v)

    def w_to_x(lat, br):
        for v in _sample_offsets(lat):
            yield v, br(LW(lat, v), boson_onsite(lat, Fraction(1, 2), 0, 0)), LX(lat, v)

    def lw_zero(lat, br):
        yield 0, LW(lat, (0,) * lat.d), boson_onsite(lat, 0, 0, 2)

    seeds = ((1, 2, 3, 4), (Fraction(1, 3), -1, 0, 2), (0, 1, 1, 1))

    def y_branch(lat, br):
        e = lat.unit(1)
        for x, y, w, wt in seeds:
            L = boson_nn(lat, e, x, y, w, wt)
            lhs = br(br(L, boson_onsite(lat, 0, 0, Fraction(1, 2))), boson_onsite(lat, -1, 0, 0))
            yield (x, y, w, wt), lhs, LW(lat, e) * (-y)

    def x_branch(lat, br):
        e = lat.unit(1)
        for x, y, w, wt in seeds:
            L = boson_nn(lat, e, x, 0, w, wt)
            lhs = br(br(L, boson_onsite(lat, 0, 0, Fraction(1, 2))), boson_onsite(lat, 0, 1, 0))
            yield (x, w, wt), lhs, LW(lat, e) * x

    def w_branch(lat, br):
        e = lat.unit(1)
        for _, _, w, wt in seeds:
            L = boson_nn(lat, e, 0, 0, w, wt)
            yield (w, wt), br(L, boson_onsite(lat, 0, -1, 0)), LY(lat, e) * (w + wt)

    return [
        ("LY-EX", "[L_Y^(v), E_(1,0,0)] = L_W^(v)", ly_ex),
        ("LY-LX-base", "[L_Y^(e), L_X^(e)] - 2 E_(0,0,1) = L_W^(2e)", ly_lx_base),
        ("range-ladder", "[L_Y^(ke), L_X^(e)] = L_W^((k+1)e) + L_W^((k-1)e)", range_ladder),
        ("LX-LY", "[L_X^(p), L_Y^(q)] = -(L_W^(p+q) + L_W^(p-q))", lx_ly),
        ("W-to-Y", "[L_W^(v), E_(0,-1/2,0)] = L_Y^(v)", w_to_y),
        ("W-to-X", "[L_W^(v), E_(1/2,0,0)] = L_X^(v)", w_to_x),
        ("LW-zero", "L_W^(0) = 2 E_(0,0,1)", lw_zero),
        ("y-branch", "[[L, E_(0,0,1/2)], E_(-1,0,0)] = -y L_W^(e)", y_branch),
        ("x-branch", "[[L, E_(0,0,1/2)], E_(0,1,0)] = x L_W^(e)  (y = 0)", x_branch),
        ("w-branch", "[L, E_(0,-1,0)] = (w + wt) L_Y^(e)  (x = y = 0)", w_branch),
    ]


IDENTITIES = {"fermion": _fermion_identities, "boson": _boson_identities}


def relations_suite(ms: Iterable[int] = range(2, 9), ds: Iterable[int] = (1, 2),
                    brackets: dict | None = None, catalogue: dict | None = None) -> RelationsReport:
    """Check every catalogued identity on every ``(m, d)``; failures are report content.

    ``brackets`` and ``catalogue`` replace the per-sector bracket or the
    identity list ``[(name, statement, cases), ...]``; both exist so a
    deliberately broken convention can be fed through the same harness.
    """
    brackets = {"fermion": fermion_commutator, "boson": boson_commutator, **(brackets or {})}
    catalogue = {s: f() for s, f in IDENTITIES.items()} | (catalogue or {})
    ms, ds = list(ms), list(ds)
    results = []
    for sector in ("fermion", "boson"):
        br = brackets[sector]
        for name, statement, gen in catalogue[sector]:
            res = IdentityResult(name, sector, statement)
            for m, d in itertools.product(ms, ds):
                lat = LatticeSpec(d, m, Sector(sector))
                for label, lhs, rhs in gen(lat, br):
                    res.checked += 1
                    if lhs != rhs:
                        res.failures.append({"m": m, "d": d, "case": repr(label)})
            results.append(res)
    return RelationsReport(results)
